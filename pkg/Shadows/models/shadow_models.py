from __future__ import annotations

from typing import Annotated, Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from Shadows.ensembles import NCSetting, PermSetting


class FguSettingRecord(BaseModel):
    kind: Literal['fgu'] = 'fgu'
    pi: list[int]

    def to_setting(self, n: int) -> PermSetting:
        return PermSetting(n, tuple(self.pi))


class NcSettingRecord(BaseModel):
    kind: Literal['nc'] = 'nc'
    u: list[int]
    basis: str

    def to_setting(self, n: int) -> NCSetting:
        return NCSetting(n, tuple(self.u), self.basis)


SettingRecord = Annotated[FguSettingRecord | NcSettingRecord, Field(discriminator='kind')]


def record_for(setting: PermSetting | NCSetting) -> FguSettingRecord | NcSettingRecord:
    if isinstance(setting, PermSetting):
        return FguSettingRecord(pi=list(setting.pi))
    return NcSettingRecord(u=list(setting.u), basis=setting.basis)


class PlanFile(BaseModel):
    """Serialized coverage plan: config header, summary and setting records."""
    header: dict[str, Any] = Field(default_factory=dict)
    summary: dict[str, Any] = Field(default_factory=dict)
    settings: list[SettingRecord] = Field(default_factory=list)

    @property
    def n(self) -> int:
        return int(self.summary['n'])

    @property
    def ensemble(self) -> str:
        return str(self.summary['ensemble'])

    def to_settings(self) -> list[PermSetting | NCSetting]:
        return [rec.to_setting(self.n) for rec in self.settings]


class StateFile(BaseModel):
    """Reference state: exactly one of fock occupations, amplitudes or density ([re, im] pairs)."""
    model_config = ConfigDict(extra='forbid')

    fock: list[int] | None = None
    amplitudes: list[tuple[float, float]] | None = None
    density: list[list[tuple[float, float]]] | None = None

    @model_validator(mode='after')
    def _exactly_one(self) -> StateFile:
        given = [name for name in ('fock', 'amplitudes', 'density') if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"state file needs exactly one of fock/amplitudes/density, got {given or 'none'}")
        return self

    def to_spec(self) -> dict[str, Any]:
        for name in ('fock', 'amplitudes', 'density'):
            value = getattr(self, name)
            if value is not None:
                return {name: value}
        raise ValueError("empty state file")  # unreachable after validation


class RunConfig(BaseModel):
    """Resolved CLI invocation; echoed as the header of every output file."""
    model_config = ConfigDict(extra='forbid')

    command: Literal['plan', 'estimate', 'count', 'variance', 'validate']
    n: int | None = Field(None, ge=1)
    k: int | None = Field(None, ge=1)
    ensemble: Literal['fgu', 'nc'] = 'fgu'
    mapping: Literal['jw', 'bk'] = 'jw'
    r: int | None = Field(None, ge=1)
    epsilon: float | None = Field(None, gt=0, lt=1)
    delta: float | None = Field(None, gt=0, lt=1)
    seed: int | None = None
    shots: int | None = None
    strategy: str | None = None
    expectation: float | None = None
    quick: bool = False
    state_path: str | None = None
    hamiltonian_path: str | None = None
    plan_path: str | None = None
    output_path: str | None = None
    threads: int = Field(1, ge=1)

    def header(self) -> dict[str, Any]:
        return self.model_dump(exclude_none=True)


class VarianceReport(BaseModel):
    """Shadow-norm breakdown of an observable under the FGU ensemble."""
    n: int
    identity: float = 0.0
    contributions: dict[int, float] = Field(default_factory=dict)
    term_counts: dict[int, int] = Field(default_factory=dict)
    total_norm_sq: float = 0.0
    expectation: float = 0.0
    variance: float = 0.0
    mapping: str = 'jw'
    pauli_norm_sq: float = 0.0  # same observable under random single-qubit Pauli measurements


__all__ = [
    'FguSettingRecord', 'NcSettingRecord', 'SettingRecord', 'record_for', 'PlanFile', 'StateFile',
    'RunConfig', 'VarianceReport',
]

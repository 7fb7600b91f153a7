"""Shadow estimation pipeline.

Role:
    Simulate outcomes for every setting of a plan (or a freshly sampled,
    Bernstein-budgeted FGU batch) on a dense reference state, fold the
    per-sample estimators over all even-degree targets up to 2k and assemble
    the k-RDM.

Inputs:
    settings: PermSetting or NCSetting list (one ensemble per run)
    state: DenseState in the Fock picture
    k, mapping, shots per setting, seed, workers

Outputs:
    EstimationResult with per-target (mean, covering-sample count), the
    assembled RDMTensor and bookkeeping counts.

Side Effects:
    - Emits shadows.estimate.* events; METRICS counts shots and folds.

Determinism:
    Outcomes for setting i are drawn from setting_rng(seed, i), so results do
    not depend on the worker count.
"""
from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

from Shadows.constants import Event, emit
from Shadows.core.metrics import timed
from Shadows.core.structured_logging import log_event, run_context
from Shadows.dense_sim import DenseState, RDMTensor, outcome_distribution, sample_outcomes
from Shadows.ensembles import NCSetting, PermSetting, sample_perm_setting, setting_rng
from Shadows.fgu_estimator import EstimationPlan, ShadowSample, estimate_all, rdm_sample_budget
from Shadows.majorana import MajoranaIndex
from Shadows.mappings import Mapping, get_mapping
from Shadows.nc_estimator import estimate_all_nc, nc_eigenvalue
from Shadows.observables import assemble_rdm
from Shadows.planner import all_targets


@dataclass
class EstimationResult:
    n: int
    k: int
    ensemble: str
    mapping: str
    settings: int
    samples: int
    estimates: dict[MajoranaIndex, tuple[float, int]] = field(default_factory=dict)
    rdm: RDMTensor | None = None
    budget: EstimationPlan | None = None

    def means(self) -> dict[MajoranaIndex, float]:
        return {mu: mean for mu, (mean, _) in self.estimates.items()}

    def estimate_rows(self) -> list[dict[str, object]]:
        return [
            {'mu': ' '.join(map(str, mu)), 'degree': len(mu), 'estimate': mean, 'covering_samples': count}
            for mu, (mean, count) in sorted(self.estimates.items(), key=lambda kv: (len(kv[0]), kv[0]))
        ]


class EstimationPipeline:
    def __init__(self, logger: logging.Logger | None = None, workers: int = 1) -> None:
        self.logger = logger or logging.getLogger(__name__)
        self.workers = workers

    def simulate(self, settings: Sequence[PermSetting | NCSetting], state: DenseState, m: Mapping, shots: int, seed: int) -> list[ShadowSample]:
        if shots < 1:
            raise ValueError(f"shots per setting must be >= 1, got {shots}")
        samples: list[ShadowSample] = []
        for i, setting in enumerate(settings):
            if setting.n != state.n:
                raise ValueError(f"setting {i} acts on {setting.n} modes, state has {state.n}")
            probs = outcome_distribution(state, setting, m)
            for z in sample_outcomes(probs, shots, setting_rng(seed, i)):
                samples.append(ShadowSample(setting, z))
        return samples

    @timed()
    def run(
        self,
        settings: Sequence[PermSetting | NCSetting],
        state: DenseState,
        k: int,
        *,
        mapping: str = 'jw',
        shots: int = 1,
        seed: int = 0,
    ) -> EstimationResult:
        if not settings:
            raise ValueError("estimation needs at least one setting")
        ensemble = 'fgu' if isinstance(settings[0], PermSetting) else 'nc'
        if any(isinstance(s, PermSetting) != (ensemble == 'fgu') for s in settings):
            raise ValueError("a run cannot mix FGU and NC settings")
        n = state.n
        m = get_mapping(mapping, n)
        with run_context(ensemble=ensemble, mapping=str(m.kind), n=n, k=k, seed=seed):
            emit(Event.ESTIMATE_START, log_event, settings=len(settings), shots=shots)
            samples = self.simulate(settings, state, m, shots, seed)
            targets = all_targets(n, k)
            if ensemble == 'fgu':
                estimates = estimate_all(samples, targets, m, workers=self.workers)
            else:
                eigenvalues = {mu: nc_eigenvalue(mu, m) for mu in targets}
                estimates = estimate_all_nc(samples, targets, m, eigenvalues, workers=self.workers)
            rdm = assemble_rdm({mu: mean for mu, (mean, _) in estimates.items()}, n, k)
            result = EstimationResult(n, k, ensemble, str(m.kind), len(settings), len(samples), estimates, rdm)
            uncovered = sum(1 for _, count in estimates.values() if count == 0)
            if uncovered:
                self.logger.warning("%d of %d targets were never covered; their estimates are 0", uncovered, len(targets))
            self.logger.info("estimated %d targets from %d samples", len(targets), len(samples))
            emit(Event.ESTIMATE_COMPLETE, log_event, samples=len(samples), uncovered=uncovered)
            return result

    def run_budgeted(self, state: DenseState, k: int, epsilon: float, delta: float, *, mapping: str = 'jw', seed: int = 0) -> EstimationResult:
        """FGU run with one shot on each of M Bernstein-budgeted random settings."""
        budget = rdm_sample_budget(state.n, k, epsilon, delta)
        settings = [sample_perm_setting(state.n, setting_rng(seed, i)) for i in range(budget.M)]
        # outcome streams must not reuse the setting streams
        result = self.run(settings, state, k, mapping=mapping, shots=1, seed=seed + 1)
        result.budget = budget
        return result


__all__ = ['EstimationResult', 'EstimationPipeline']

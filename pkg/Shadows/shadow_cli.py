"""Batch command-line surface for fermionic shadow tomography.

Commands:
    plan      sample a coverage plan (K_r settings covering every target r times)
    estimate  simulate a plan on a reference state and assemble the k-RDM
    count     deterministic strategy setting counts (swap1, eqot, mt, naive, swap-k, all)
    variance  shadow-norm / variance report for a Hamiltonian file
    validate  exhaustive desk-scale identity checks (--quick: n = 2 only)

Examples:
    python -m Shadows.shadow_cli plan --modes 8 --k 2 --ensemble fgu --r 50 --seed 7
    python -m Shadows.shadow_cli estimate --state fock.json --plan plan.json --shots 100 --seed 3
    python -m Shadows.shadow_cli estimate --state fock.json --k 2 --epsilon 0.2 --delta 0.05 --seed 3
    python -m Shadows.shadow_cli count --strategy eqot --k 4 --modes 8
    python -m Shadows.shadow_cli variance --hamiltonian h.txt --expectation 0.0
    python -m Shadows.shadow_cli validate --quick

Exit Codes:
    0 success | 2 usage / invalid config | 3 validation failure | 4 I/O error
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from Shadows.config import PLANNER_CONFIG, get_settings
from Shadows.constants import Event, emit
from Shadows.core.common_validation import RunConfigValidator
from Shadows.core.logging_setup import init_logging
from Shadows.core.structured_logging import log_event, log_exception, run_context
from Shadows.dense_sim import exact_majorana_expectations, reference_state
from Shadows.mappings import get_mapping
from Shadows.models.shadow_models import PlanFile, RunConfig, StateFile, record_for
from Shadows.observables import hamiltonian_variance_report, ingest_hamiltonian, rdm_to_rows
from Shadows.persistence.result_writer import ResultWriter, ResultWriteError
from Shadows.planner import coverage_plan, eqot, mt_count, naive_count, strategy_counts, swap1_count, swap_circuit_count
from Shadows.services.estimation_pipeline import EstimationPipeline
from Shadows.services.validation_suite import ValidationSuite

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_IO = 4

logger = logging.getLogger('Shadows.cli')


class UsageError(ValueError):
    """Invalid flags or configuration."""


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog='shadows', description='Fermionic partial tomography via classical shadows')
    p.add_argument('--log-level', default=None, help='Logging level (default: SHADOWS_LOG_LEVEL or INFO)')
    p.add_argument('--json', action='store_true', help='Print a JSON summary to stdout')
    sub = p.add_subparsers(dest='command', required=True)

    plan = sub.add_parser('plan', help='Sample a coverage plan')
    plan.add_argument('--modes', type=int, required=True, dest='n')
    plan.add_argument('--k', type=int, required=True)
    plan.add_argument('--ensemble', default='fgu', choices=['fgu', 'nc'])
    plan.add_argument('--mapping', default='jw', choices=['jw', 'bk'])
    plan.add_argument('--r', type=int, default=PLANNER_CONFIG['default_r'])
    plan.add_argument('--seed', type=int)
    plan.add_argument('--output', dest='output_path')

    est = sub.add_parser('estimate', help='Simulate a plan and assemble the k-RDM')
    est.add_argument('--state', dest='state_path')
    est.add_argument('--plan', dest='plan_path', help='Plan file (omit to draw a Bernstein-budgeted FGU batch)')
    est.add_argument('--epsilon', type=float, help='Additive error target for the budgeted batch')
    est.add_argument('--delta', type=float, help='Failure probability for the budgeted batch')
    est.add_argument('--k', type=int, help='RDM order (default: the plan k)')
    est.add_argument('--mapping', choices=['jw', 'bk'], help='Mapping (default: the plan mapping)')
    est.add_argument('--shots', type=int, default=1, help='Shots per setting')
    est.add_argument('--seed', type=int)
    est.add_argument('--threads', type=int, help='Fold workers (default: SHADOWS_THREADS)')
    est.add_argument('--output', dest='output_path')

    cnt = sub.add_parser('count', help='Deterministic strategy setting counts')
    cnt.add_argument('--strategy', default='all')
    cnt.add_argument('--modes', type=int, required=True, dest='n')
    cnt.add_argument('--k', type=int, required=True)
    cnt.add_argument('--output', dest='output_path')

    var = sub.add_parser('variance', help='Shadow-norm report for a Hamiltonian file')
    var.add_argument('--hamiltonian', dest='hamiltonian_path')
    var.add_argument('--expectation', type=float, help='tr(H rho) of the traceless part')
    var.add_argument('--state', dest='state_path', help='State file used for the exact expectation')
    var.add_argument('--modes', type=int, dest='n')
    var.add_argument('--mapping', choices=['jw', 'bk'], default='jw', help='Encoding for the Pauli-shadow baseline')
    var.add_argument('--output', dest='output_path')

    val = sub.add_parser('validate', help='Exhaustive identity checks')
    val.add_argument('--quick', action='store_true', help='n = 2 only')
    val.add_argument('--output', dest='output_path')
    return p


def _run_config(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if k not in ('log_level', 'json') and v is not None}
    ok, errors = RunConfigValidator.validate_run_config(fields)
    if not ok:
        raise UsageError('; '.join(errors))
    if fields.get('threads') is None:
        fields['threads'] = get_settings().threads
    try:
        return RunConfig(**fields)
    except ValidationError as e:
        raise UsageError(str(e)) from e


def _default_output(cfg: RunConfig, stem: str) -> Path:
    return Path(cfg.output_path) if cfg.output_path else Path(get_settings().results_dir) / stem


def _load_state(path: str) -> StateFile:
    try:
        return StateFile.model_validate_json(Path(path).read_text(encoding='utf-8'))
    except ValidationError as e:
        raise UsageError(f"invalid state file {path}: {e}") from e


# ------------------- commands -------------------

def cmd_plan(cfg: RunConfig) -> dict[str, Any]:
    assert cfg.n is not None and cfg.k is not None and cfg.r is not None and cfg.seed is not None
    m = get_mapping(cfg.mapping, cfg.n)
    plan = coverage_plan(cfg.n, cfg.k, cfg.ensemble, cfg.r, np.random.default_rng(cfg.seed), m)
    summary = plan.summary()
    out = _default_output(cfg, f"plan_{cfg.ensemble}_n{cfg.n}_k{cfg.k}_r{cfg.r}_s{cfg.seed}")
    path = ResultWriter(out, cfg.header()).write_document({
        'summary': summary,
        'settings': [record_for(s).model_dump() for s in plan.settings],
    })
    print(f"K_{cfg.r} = {plan.K_r} settings ({summary['targets']} targets, "
          f"min coverage {summary['min_coverage']}, mean {summary['mean_coverage']:.2f}) -> {path}")
    return {**summary, 'path': str(path)}


def cmd_estimate(cfg: RunConfig) -> dict[str, Any]:
    assert cfg.state_path is not None and cfg.seed is not None
    state = reference_state(_load_state(cfg.state_path).to_spec())
    pipeline = EstimationPipeline(workers=cfg.threads)
    if cfg.plan_path is None:
        assert cfg.k is not None and cfg.epsilon is not None and cfg.delta is not None
        k, mapping = cfg.k, cfg.mapping
        result = pipeline.run_budgeted(state, k, cfg.epsilon, cfg.delta, mapping=mapping, seed=cfg.seed)
    else:
        try:
            plan = PlanFile.model_validate_json(Path(cfg.plan_path).read_text(encoding='utf-8'))
        except ValidationError as e:
            raise UsageError(f"invalid plan file {cfg.plan_path}: {e}") from e
        k = cfg.k or int(plan.summary['k'])
        mapping = cfg.mapping if 'mapping' in cfg.model_fields_set else str(plan.summary.get('mapping', cfg.mapping))
        result = pipeline.run(plan.to_settings(), state, k, mapping=mapping, shots=cfg.shots or 1, seed=cfg.seed)
    assert result.rdm is not None
    out = _default_output(cfg, f"rdm_{result.ensemble}_n{result.n}_k{k}_s{cfg.seed}")
    header = {**cfg.header(), 'mapping': mapping, 'k': k}
    writer = ResultWriter(out, header)
    csv_path, json_path = writer.write_table(rdm_to_rows(result.rdm), ['p', 'q', 'real', 'imag'])
    ResultWriter(writer.stem.with_name(writer.stem.name + '_estimates'), header).write_table(
        result.estimate_rows(), ['mu', 'degree', 'estimate', 'covering_samples'])
    print(f"{result.samples} samples over {result.settings} settings -> {csv_path}")
    budget = {'budget_M': result.budget.M, 'budget_L': result.budget.L} if result.budget else {}
    return {'samples': result.samples, 'settings': result.settings, **budget, 'csv': str(csv_path), 'json': str(json_path)}


def _count_rows(strategy: str, n: int, k: int) -> list[dict[str, Any]]:
    if strategy == 'all':
        return [{'strategy': s, 'n': n, 'k': k, 'settings': c} for s, c in strategy_counts(k, n).items()]
    single = {
        'swap1': lambda: swap1_count(n),
        'eqot': lambda: eqot(k, n),
        'mt': lambda: mt_count(k, n),
        'naive': lambda: naive_count(k, n),
        'swap-k': lambda: swap_circuit_count(k, n),
    }[strategy]
    return [{'strategy': strategy, 'n': n, 'k': 1 if strategy == 'swap1' else k, 'settings': single()}]


def cmd_count(cfg: RunConfig) -> dict[str, Any]:
    assert cfg.n is not None and cfg.k is not None and cfg.strategy is not None
    rows = _count_rows(cfg.strategy, cfg.n, cfg.k)
    print('strategy,n,k,settings')
    for row in rows:
        print(f"{row['strategy']},{row['n']},{row['k']},{row['settings']}")
    if cfg.output_path:
        ResultWriter(cfg.output_path, cfg.header()).write_table(rows, ['strategy', 'n', 'k', 'settings'])
    emit(Event.COUNT_COMPLETE, log_event, strategy=cfg.strategy, n=cfg.n, k=cfg.k, rows=len(rows))
    return {'rows': rows}


def cmd_variance(cfg: RunConfig) -> dict[str, Any]:
    assert cfg.hamiltonian_path is not None
    h = ingest_hamiltonian(cfg.hamiltonian_path, cfg.n)
    expectation = cfg.expectation
    if expectation is None:
        assert cfg.state_path is not None
        state = reference_state(_load_state(cfg.state_path).to_spec())
        if state.n != h.n:
            raise UsageError(f"state has {state.n} modes, Hamiltonian has {h.n}")
        expectation = h.expectation(exact_majorana_expectations(state, 2 * h.n))
    report = hamiltonian_variance_report(h, expectation, get_mapping(cfg.mapping, h.n))
    payload = report.model_dump(mode='json')
    if cfg.output_path:
        ResultWriter(cfg.output_path, cfg.header()).write_document({'report': payload})
    for degree, value in sorted(report.contributions.items()):
        print(f"degree {degree}: {report.term_counts[degree]} terms, norm^2 contribution {value:.6g}")
    print(f"total shadow norm^2 = {report.total_norm_sq:.6g}; variance = {report.variance:.6g}")
    print(f"Pauli-shadow baseline ({cfg.mapping}) norm^2 = {report.pauli_norm_sq:.6g}")
    emit(Event.VARIANCE_COMPLETE, log_event, n=h.n, total=report.total_norm_sq, variance=report.variance)
    return payload


def cmd_validate(cfg: RunConfig) -> dict[str, Any]:
    report = ValidationSuite().run(quick=cfg.quick)
    for r in report.results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}{': ' + r.detail if r.detail else ''}")
    if cfg.output_path:
        ResultWriter(cfg.output_path, cfg.header()).write_table(report.rows(), ['check', 'passed', 'detail'])
    return {'passed': report.passed, 'checks': len(report.results), 'failures': [r.name for r in report.failures]}


COMMANDS = {
    'plan': cmd_plan,
    'estimate': cmd_estimate,
    'count': cmd_count,
    'variance': cmd_variance,
    'validate': cmd_validate,
}


def _run_fields(cfg: RunConfig) -> dict[str, Any]:
    fields: dict[str, Any] = {'n': cfg.n, 'k': cfg.k, 'seed': cfg.seed}
    if cfg.command in ('plan', 'estimate'):
        fields.update(ensemble=cfg.ensemble, mapping=cfg.mapping)
    return fields


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    init_logging(args.log_level or get_settings().log_level)
    try:
        cfg = _run_config(args)
        with run_context(**_run_fields(cfg)):
            summary = COMMANDS[cfg.command](cfg)
    except ValueError as e:
        emit(Event.CLI_ERROR, log_event, command=args.command, error=str(e))
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ResultWriteError, OSError) as e:
        log_exception(str(Event.IO_ERROR), exc=e, command=args.command)
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    logger.info("command %s finished", cfg.command)
    if args.json:
        print(json.dumps(summary, sort_keys=True, default=str))
    if cfg.command == 'validate' and not summary['passed']:
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == '__main__':
    raise SystemExit(main())

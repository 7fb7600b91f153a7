"""
Deterministic strategy setting counts and measurement-time comparison per n.
- swap / EQOT / naive counts for k in 1..4
- optional randomized K_r from a fresh FGU coverage plan for the time model
"""
from __future__ import annotations

import argparse
import os
import sys

# Ensure repository root is on sys.path so `Shadows` package imports resolve
REPO_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
if REPO_ROOT not in sys.path:
    sys.path.insert(0, REPO_ROOT)

import numpy as np

from Shadows.core.logging_setup import init_logging
from Shadows.persistence.result_writer import ResultWriter
from Shadows.planner import coverage_plan, strategy_counts, time_comparison


def main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(description='Strategy count table')
    p.add_argument('--modes', type=int, nargs='+', default=[8, 12, 16, 20])
    p.add_argument('--k', type=int, nargs='+', default=[1, 2, 3, 4])
    p.add_argument('--times', action='store_true', help='Add deterministic vs randomized time model columns')
    p.add_argument('--r', type=int, default=50)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--output', default=os.path.join('results', 'strategy_counts'))
    args = p.parse_args(argv)
    init_logging('WARNING')
    rows = []
    for n in args.modes:
        for k in args.k:
            if n < 2 * k:
                continue
            counts = strategy_counts(k, n)
            row: dict[str, object] = {'n': n, 'k': k, **counts}
            if args.times:
                plan = coverage_plan(n, k, 'fgu', args.r, np.random.default_rng(args.seed))
                deterministic = counts.get('mt', counts.get('swap1', counts['naive']))
                row.update(K_r=plan.K_r, **time_comparison(deterministic, plan.K_r, args.r))
            rows.append(row)
            print(row)
    fields = sorted({key for row in rows for key in row}, key=lambda f: (f not in ('n', 'k'), f))
    header = {k: v for k, v in vars(args).items() if k != 'output'}
    ResultWriter(args.output, header).write_table(rows, fields)
    return 0


if __name__ == '__main__':
    raise SystemExit(main())

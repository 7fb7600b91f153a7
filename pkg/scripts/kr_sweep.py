"""
Sweep the coverage parameter r and record K_r / r for external plotting.
- One coverage plan per (r, seed); rows written as CSV + JSON mirror
- Prints the mean K_r / r per r
"""
from __future__ import annotations

import argparse
import os
import sys

# Ensure repository root is on sys.path so `Shadows` package imports resolve
REPO_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
if REPO_ROOT not in sys.path:
    sys.path.insert(0, REPO_ROOT)

from Shadows.core.logging_setup import init_logging
from Shadows.mappings import get_mapping
from Shadows.persistence.result_writer import ResultWriter
from Shadows.planner import kr_sweep, mean_kr_table


def main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(description='K_r / r sweep over coverage targets')
    p.add_argument('--modes', type=int, default=8)
    p.add_argument('--k', type=int, default=2)
    p.add_argument('--ensemble', default='fgu', choices=['fgu', 'nc'])
    p.add_argument('--mapping', default='jw', choices=['jw', 'bk'])
    p.add_argument('--r', type=int, nargs='+', default=[1, 10, 50])
    p.add_argument('--seeds', type=int, default=10, help='Seeds 0..N-1')
    p.add_argument('--output', default=os.path.join('results', 'kr_sweep'))
    args = p.parse_args(argv)
    init_logging('WARNING')
    rows = kr_sweep(args.modes, args.k, args.ensemble, args.r, range(args.seeds), get_mapping(args.mapping, args.modes))
    header = {k: v for k, v in vars(args).items() if k != 'output'}
    ResultWriter(args.output, header).write_table(rows, ['r', 'seed', 'K_r', 'K_r_over_r'])
    for r, mean in mean_kr_table(rows).items():
        print(f"r={r:4d}  mean K_r/r = {mean:.2f}")
    return 0


if __name__ == '__main__':
    raise SystemExit(main())

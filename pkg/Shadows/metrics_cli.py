"""Dump the in-process shadow metrics as JSON.

Usage:
  python -m Shadows.metrics_cli                  # pretty JSON
  python -m Shadows.metrics_cli --raw            # compact
  python -m Shadows.metrics_cli --validate       # run the quick validation suite first
"""
from __future__ import annotations

import argparse
import json

from Shadows.core.metrics import METRICS


def main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(description='Dump in-memory metrics snapshot')
    p.add_argument('--raw', action='store_true', help='Compact JSON output')
    p.add_argument('--validate', action='store_true', help='Run the quick validation suite before dumping')
    args = p.parse_args(argv)
    if args.validate:
        from Shadows.services.validation_suite import ValidationSuite
        ValidationSuite().run(quick=True)
    snap = METRICS.snapshot()
    if args.raw:
        print(json.dumps(snap, separators=(',', ':')))
    else:
        print(json.dumps(snap, indent=2))
    return 0


if __name__ == '__main__':
    raise SystemExit(main())

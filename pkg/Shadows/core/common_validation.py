"""Common validation for run configurations."""
from __future__ import annotations

import os
from typing import Any

from Shadows.config import VALIDATION_RULES

_RANDOMIZED = ('plan', 'estimate')


class RunConfigValidator:
    @staticmethod
    def validate_modes(n: Any) -> bool:
        return isinstance(n, int) and not isinstance(n, bool) and 1 <= n <= VALIDATION_RULES['max_modes']

    @staticmethod
    def validate_degree(n: Any, k: Any) -> bool:
        return isinstance(k, int) and RunConfigValidator.validate_modes(n) and 1 <= k <= n

    @staticmethod
    def validate_choice(value: Any, rule: str) -> bool:
        return value in VALIDATION_RULES[rule]

    @staticmethod
    def validate_file(path: Any) -> bool:
        return bool(path) and os.path.isfile(str(path))

    @staticmethod
    def validate_run_config(params: dict[str, Any]) -> tuple[bool, list[str]]:
        errors: list[str] = []
        command = params.get('command')
        if command in _RANDOMIZED and params.get('seed') is None:
            errors.append(f"--seed is required for '{command}'")
        if params.get('ensemble') is not None and not RunConfigValidator.validate_choice(params['ensemble'], 'ensembles'):
            errors.append(f"Unknown ensemble: {params['ensemble']}")
        if params.get('mapping') is not None and not RunConfigValidator.validate_choice(params['mapping'], 'mappings'):
            errors.append(f"Unknown mapping: {params['mapping']}")
        n, k = params.get('n'), params.get('k')
        if command in ('plan', 'count'):
            if not RunConfigValidator.validate_modes(n):
                errors.append(f"Invalid mode count: {n}")
            elif not RunConfigValidator.validate_degree(n, k):
                errors.append(f"Invalid RDM order k={k} for n={n}")
        if command == 'plan' and (params.get('r') is None or params['r'] < 1):
            errors.append(f"Coverage target r must be >= 1, got {params.get('r')}")
        if command == 'estimate':
            if params.get('shots') is None or params['shots'] < 1:
                errors.append(f"Shots per setting must be >= 1, got {params.get('shots')}")
            if not RunConfigValidator.validate_file(params.get('state_path')):
                errors.append(f"File not found for state_path: {params.get('state_path')}")
            if params.get('plan_path') is not None:
                if not RunConfigValidator.validate_file(params['plan_path']):
                    errors.append(f"File not found for plan_path: {params['plan_path']}")
            elif params.get('epsilon') is None or params.get('delta') is None or k is None:
                errors.append("estimate needs --plan, or --epsilon, --delta and --k for a budgeted batch")
            if k is not None and (not isinstance(k, int) or k < 1):
                errors.append(f"Invalid RDM order k={k}")
        if command == 'count':
            strategy = params.get('strategy')
            if not RunConfigValidator.validate_choice(strategy, 'strategies'):
                errors.append(f"Unknown strategy: {strategy}")
            elif strategy == 'eqot':
                if isinstance(k, int) and k < 2:
                    errors.append("eqot requires k >= 2")
            elif isinstance(n, int) and isinstance(k, int) and n < 2 * k:
                errors.append(f"strategy '{strategy}' requires n >= 2k, got n={n} k={k}")
        if command == 'variance':
            if not RunConfigValidator.validate_file(params.get('hamiltonian_path')):
                errors.append(f"Hamiltonian file not found: {params.get('hamiltonian_path')}")
            if params.get('expectation') is None and not RunConfigValidator.validate_file(params.get('state_path')):
                errors.append("variance needs --expectation or an existing --state file")
        return (len(errors) == 0, errors)


__all__ = ['RunConfigValidator']

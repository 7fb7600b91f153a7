"""
Configuration settings for the fermionic classical-shadows toolkit
"""

import os
from functools import lru_cache
from typing import Any

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))

# Dense simulator limits
SIMULATION_CONFIG = {
    'max_dense_modes': 8,      # unitaries, distributions, RDM oracles (256 x 256)
    'max_gamma_modes': 10,     # single Majorana matrices
    'probability_tolerance': 1e-8,  # outcome distributions must sum to 1 within this
    'state_tolerance': 1e-8,        # unit trace and Hermiticity of input states
    'psd_tolerance': 1e-10,
    'adjoint_tolerance': 1e-9,
}

# Number-conserving ensemble eigenvalues
NC_CONFIG = {
    'exact_enumeration_limit': 181440,  # |Alt(9)|
    'mc_samples': 20000,
    'mc_max_rel_stderr': 0.01,
}

# Coverage planning
PLANNER_CONFIG = {
    'default_r': 50,
    'max_settings': 5_000_000,
}

# Wall-clock model defaults (superconducting device figures)
TIME_MODEL_DEFAULTS = {
    'f_samp': 5e3,
    't_load': 0.1,
    'shots': 2.5e5,
}

# Hamiltonian ingestion
OBSERVABLE_CONFIG = {
    'hermiticity_tolerance': 1e-10,
    'comment_prefix': '#',
}

LOGGING_CONFIG = {
    'level': 'INFO',
    # %(run)s is the bound run label, e.g. 'fgu/jw n=4 k=2 seed=7'
    'format': '%(asctime)s %(levelname)s %(name)s [%(run)s] :: %(message)s',
    'file_path': 'Shadows/logs/shadows.log',
    'file_max_bytes': 2_000_000,
    'file_backups': 3,
    'json_max_bytes': 5_242_880,
    'json_keep': 3,
}

VALIDATION_RULES = {
    'max_modes': 200,
    'ensembles': ('fgu', 'nc'),
    'mappings': ('jw', 'bk'),
    'strategies': ('swap1', 'eqot', 'mt', 'naive', 'swap-k', 'all'),
}


class Settings(BaseSettings):
    """Environment-level knobs (SHADOWS_* variables or .env)."""
    threads: int = Field(1, ge=1, alias='SHADOWS_THREADS')
    log_level: str = Field('INFO', alias='SHADOWS_LOG_LEVEL')
    results_dir: str = Field('results', alias='SHADOWS_RESULTS_DIR')

    model_config = SettingsConfigDict(env_file='.env', case_sensitive=False, extra='ignore', populate_by_name=True)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    load_dotenv(dotenv_path=os.path.join(PROJECT_ROOT, '.env'))
    return Settings()


def validate_config() -> dict[str, Any]:
    """Validate configuration and return status"""
    issues = []
    if SIMULATION_CONFIG['max_dense_modes'] > SIMULATION_CONFIG['max_gamma_modes']:
        issues.append("max_dense_modes exceeds max_gamma_modes")
    if not 0 < NC_CONFIG['mc_max_rel_stderr'] < 1:
        issues.append("mc_max_rel_stderr must lie in (0, 1)")
    if NC_CONFIG['mc_samples'] < 2:
        issues.append("mc_samples must be at least 2")
    if PLANNER_CONFIG['default_r'] < 1:
        issues.append("default_r must be positive")
    if any(v <= 0 for v in TIME_MODEL_DEFAULTS.values()):
        issues.append("time model defaults must be positive")
    log_dir = os.path.join(PROJECT_ROOT, os.path.dirname(LOGGING_CONFIG['file_path']))
    if not os.path.exists(log_dir):
        try:
            os.makedirs(log_dir, exist_ok=True)
        except Exception as e:
            issues.append(f"Cannot create log directory: {e}")
    try:
        settings = get_settings()
        threads = settings.threads
    except Exception as e:  # pydantic ValidationError on bad env values
        issues.append(f"Invalid environment settings: {e}")
        threads = None
    return {
        'valid': len(issues) == 0,
        'issues': issues,
        'threads': threads,
        'max_dense_modes': SIMULATION_CONFIG['max_dense_modes'],
    }

if __name__ == "__main__":
    status = validate_config()
    if status['valid']:
        print("Configuration is valid")
    else:
        print("Configuration issues found:")
        for issue in status['issues']:
            print(f"   - {issue}")
    print(f"   - Threads: {status['threads']}")
    print(f"   - Dense size cap: {status['max_dense_modes']} modes")
    print(f"   - NC exact enumeration limit: {NC_CONFIG['exact_enumeration_limit']}")
    print(f"   - Default coverage r: {PLANNER_CONFIG['default_r']}")

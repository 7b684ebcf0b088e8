# modules/config_loader.py

import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from functools import lru_cache
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError

from modules.errors import ConfigError

logger = logging.getLogger(__name__)

ROOT = Path(__file__).resolve().parent.parent

SUITES = {
    'smoke': 'claims/smoke.toml',
    'paper': 'claims/paper.toml',
    'full': 'claims/full.toml',
}

ENV_VARS = {
    'budget': 'DYCK_LAB_BUDGET',
    'workers': 'DYCK_LAB_WORKERS',
    'max_block_edges': 'DYCK_LAB_MAX_BLOCK_EDGES',
    'iso_limit': 'DYCK_LAB_ISO_LIMIT',
    'seed': 'DYCK_LAB_SEED',
    'report_dir': 'DYCK_LAB_REPORT_DIR',
}


class LabSettings(BaseModel):
    budget: int = Field(5_000_000, gt=0)
    workers: int = Field(4, ge=1)
    max_block_edges: int = Field(24, ge=1)
    iso_limit: int = Field(16, ge=1)
    seed: int = 20240917
    report_dir: str = "reports"

    @classmethod
    def from_env(cls, environ=None):
        """
        Build settings from DYCK_LAB_* environment variables, falling back to defaults.

        Parameters:
        - environ (Mapping | None): Environment to read; os.environ when None.

        Returns:
        LabSettings: Validated settings.
        """
        environ = os.environ if environ is None else environ
        values = {field: environ[var] for field, var in ENV_VARS.items() if environ.get(var)}
        try:
            return cls(**values)
        except ValidationError as e:
            raise ConfigError(f"invalid DYCK_LAB_* environment: {e}") from e


@lru_cache(maxsize=1)
def get_settings():
    return LabSettings.from_env()


def load_toml(file_name):
    """
    Load a TOML file.

    Parameters:
    - file_name (str | Path): Path to the file, relative paths resolve against the repository root.

    Returns:
    dict: Parsed document.
    """
    path = Path(file_name)
    if not path.is_absolute():
        path = ROOT / path
    try:
        with open(path, 'rb') as file:
            return tomllib.load(file)
    except FileNotFoundError as e:
        raise ConfigError(f"File not found: {path}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"An error occurred while parsing {path}: {e}") from e


def load_claims_file(file_name):
    """
    Load and validate every [[claim]] table of a claim file.

    Parameters:
    - file_name (str | Path): Claim registry file.

    Returns:
    list[ClaimSpec]: Claims in file order.
    """
    from modules.claims import ClaimSpec

    document = load_toml(file_name)
    tables = document.get('claim', [])
    if not isinstance(tables, list):
        raise ConfigError(f"{file_name}: 'claim' must be an array of tables")

    claims = []
    seen = set()
    for i, table in enumerate(tables):
        try:
            claim = ClaimSpec.model_validate(table)
        except ValidationError as e:
            raise ConfigError(f"{file_name}: claim #{i} is malformed: {e}") from e
        if claim.id in seen:
            raise ConfigError(f"{file_name}: duplicate claim id {claim.id!r}")
        seen.add(claim.id)
        claims.append(claim)

    # A suite may pull in other suites by name.
    for name in document.get('include', []):
        for claim in load_claims(name):
            if claim.id not in seen:
                seen.add(claim.id)
                claims.append(claim)
    if not claims:
        raise ConfigError(f"{file_name}: no [[claim]] tables")
    logger.info("loaded %d claims from %s", len(claims), file_name)
    return claims


def load_claims(suite):
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; expected one of {sorted(SUITES)}")
    return load_claims_file(SUITES[suite])

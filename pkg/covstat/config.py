"""Runtime configuration: environment, species table and unit conversion.

Values come from the environment (a local ``.env`` is loaded first), so a
run can be pointed at another species file or quadrature order without
touching the command line.
"""

import json
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, Optional

from dotenv import load_dotenv

from .errors import ConfigError

load_dotenv()

BOLTZMANN_MEV_PER_K = 8.617333262e-11
HBARC_MEV_FM = 197.3269804
CSV_SCHEMA_VERSION = 1
RESIDUAL_TOLERANCE = 1e-12
CONVERGENCE_TOLERANCE = 1e-8
DEFAULT_SPECIES_FILE = Path(__file__).with_name("species.json")

_SPECIES_NAMES = {
    "hydrogen": "H",
    "helium": "He",
    "neon": "Ne",
    "argon": "Ar",
}


@dataclass(frozen=True)
class Settings:
    quadrature_order: int
    species_file: Path
    workers: int
    output_dir: Path


def _env_int(name: str, default: int, low: int, high: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None
    if not low <= value <= high:
        raise ConfigError(f"{name} must lie in [{low}, {high}], got {value}")
    return value


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Read the COVSTAT_* environment once per process."""
    species = os.getenv("COVSTAT_SPECIES_FILE")
    output_dir = os.getenv("COVSTAT_OUTPUT_DIR")
    return Settings(
        quadrature_order=_env_int("COVSTAT_QUADRATURE_ORDER", 15, 1, 128),
        species_file=Path(species) if species else DEFAULT_SPECIES_FILE,
        workers=_env_int("COVSTAT_WORKERS", 1, 1, 256),
        output_dir=Path(output_dir) if output_dir else Path("."),
    )


def load_species_table(path: Optional[Path] = None) -> Dict[str, float]:
    """Species symbol -> rest mass in MeV."""
    path = Path(path) if path is not None else get_settings().species_file
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read species table {path}: {exc}") from exc

    table = {}
    for symbol, entry in raw.items():
        mass = entry["mass_mev"] if isinstance(entry, dict) else entry
        mass = float(mass)
        if not mass > 0.0:
            raise ConfigError(f"species {symbol!r} has non-positive mass {mass}")
        table[symbol] = mass
    return table


def resolve_mass(gas: Optional[str] = None, mass_mev: Optional[float] = None, path: Optional[Path] = None) -> float:
    """Explicit mass wins over the species table; one of the two is required."""
    if mass_mev is not None:
        if not mass_mev > 0.0 or not math.isfinite(mass_mev):
            raise ConfigError(f"mass must be positive, got {mass_mev!r}")
        return float(mass_mev)
    if gas is None:
        raise ConfigError("either a gas species or an explicit mass is required")

    table = load_species_table(path)
    key = gas.strip()
    symbol = _SPECIES_NAMES.get(key.lower(), key)
    lookup = {name.lower(): name for name in table}
    if symbol.lower() not in lookup:
        known = ", ".join(sorted(table))
        raise ConfigError(f"unknown species {gas!r} (known: {known})")
    return table[lookup[symbol.lower()]]


def beta_m_from_kelvin(t_kelvin: float, mass_mev: float) -> float:
    if not t_kelvin > 0.0:
        raise ConfigError(f"temperature must be positive, got {t_kelvin!r}")
    return mass_mev / (BOLTZMANN_MEV_PER_K * t_kelvin)


def kelvin_from_beta_m(beta_m: float, mass_mev: float) -> float:
    if not beta_m > 0.0:
        raise ConfigError(f"beta_m must be positive, got {beta_m!r}")
    return mass_mev / (BOLTZMANN_MEV_PER_K * beta_m)


def volume_from_fm3(volume_fm3: float) -> float:
    """Volume in fm^3 to natural units MeV^-3."""
    return volume_fm3 / HBARC_MEV_FM**3


def pressure_to_mev_fm3(pressure: float) -> float:
    """Pressure in natural units MeV^4 to MeV/fm^3."""
    return pressure / HBARC_MEV_FM**3

import json

import pytest

from covstat.config import (
    BOLTZMANN_MEV_PER_K,
    DEFAULT_SPECIES_FILE,
    HBARC_MEV_FM,
    beta_m_from_kelvin,
    get_settings,
    kelvin_from_beta_m,
    load_species_table,
    pressure_to_mev_fm3,
    resolve_mass,
    volume_from_fm3,
)
from covstat.errors import ConfigError


def test_default_settings(monkeypatch):
    for name in ("COVSTAT_QUADRATURE_ORDER", "COVSTAT_SPECIES_FILE", "COVSTAT_WORKERS", "COVSTAT_OUTPUT_DIR"):
        monkeypatch.delenv(name, raising=False)
    settings = get_settings()
    assert settings.quadrature_order == 15
    assert settings.workers == 1
    assert settings.species_file == DEFAULT_SPECIES_FILE
    assert get_settings() is settings


def test_settings_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("COVSTAT_QUADRATURE_ORDER", "40")
    monkeypatch.setenv("COVSTAT_WORKERS", "4")
    monkeypatch.setenv("COVSTAT_OUTPUT_DIR", str(tmp_path))
    settings = get_settings()
    assert settings.quadrature_order == 40
    assert settings.workers == 4
    assert settings.output_dir == tmp_path


@pytest.mark.parametrize("value", ["0", "129", "fifteen"])
def test_bad_order_in_environment(monkeypatch, value):
    monkeypatch.setenv("COVSTAT_QUADRATURE_ORDER", value)
    with pytest.raises(ConfigError):
        get_settings()


def test_bundled_species_table():
    table = load_species_table(DEFAULT_SPECIES_FILE)
    assert set(table) == {"H", "He", "Ne", "Ar"}
    assert table["H"] == pytest.approx(938.8)


def test_species_table_from_environment(monkeypatch, tmp_path):
    path = tmp_path / "species.json"
    path.write_text(json.dumps({"Kr": {"mass_mev": 78000.0}, "Xe": 122300.0}), encoding="utf-8")
    monkeypatch.setenv("COVSTAT_SPECIES_FILE", str(path))
    assert load_species_table() == {"Kr": 78000.0, "Xe": 122300.0}
    assert resolve_mass("kr") == 78000.0


def test_broken_species_tables(tmp_path):
    with pytest.raises(ConfigError):
        load_species_table(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_species_table(bad)
    negative = tmp_path / "negative.json"
    negative.write_text('{"H": -1.0}', encoding="utf-8")
    with pytest.raises(ConfigError):
        load_species_table(negative)


def test_resolve_mass():
    assert resolve_mass("hydrogen") == pytest.approx(938.8)
    assert resolve_mass("AR") == pytest.approx(37211.0)
    assert resolve_mass("He", mass_mev=1.0) == 1.0
    with pytest.raises(ConfigError):
        resolve_mass("unobtainium")
    with pytest.raises(ConfigError):
        resolve_mass()
    with pytest.raises(ConfigError):
        resolve_mass(mass_mev=-3.0)


def test_hydrogen_at_a_trillion_kelvin():
    assert beta_m_from_kelvin(1e12, resolve_mass("H")) == pytest.approx(10.894, abs=1e-3)


def test_temperature_conversions_round_trip():
    mass = 3727.4
    b = beta_m_from_kelvin(3.3e11, mass)
    assert kelvin_from_beta_m(b, mass) == pytest.approx(3.3e11)
    assert BOLTZMANN_MEV_PER_K * 3.3e11 == pytest.approx(mass / b)
    with pytest.raises(ConfigError):
        beta_m_from_kelvin(0.0, mass)
    with pytest.raises(ConfigError):
        kelvin_from_beta_m(-1.0, mass)


def test_unit_conversions():
    assert volume_from_fm3(HBARC_MEV_FM**3) == pytest.approx(1.0)
    assert pressure_to_mev_fm3(HBARC_MEV_FM**3) == pytest.approx(1.0)

import math

import pytest

from plasmonbus import config
from plasmonbus.errors import ConfigError


def test_defaults_are_paper_point():
    cfg = config.RunConfig()
    assert cfg.radius == pytest.approx(20e-9)
    assert cfg.length == pytest.approx(10e-6)
    assert cfg.gap == pytest.approx(30e-9)
    assert cfg.E_tau == pytest.approx(1305.0968248129765, rel=1e-13)
    config.validate(cfg)


def test_parse_text_types():
    cfg = config.parse_text("""
    # comment
    geometry.R_nm = 25      # trailing comment
    gate.Q = inf
    sweep.Gamma_list = 0.002, 0.05
    gate.coarse_points = 3, 4
    dynamics.n_fock = 4
    dynamics.frame = rotating
    seed = 9
    """)
    assert cfg.geometry.R_nm == 25.0
    assert math.isinf(cfg.gate.Q)
    assert cfg.sweep.Gamma_list == (0.002, 0.05)
    assert cfg.gate.coarse_points == (3, 4) and isinstance(cfg.gate.coarse_points[0], int)
    assert cfg.dynamics.n_fock == 4
    assert cfg.dynamics.frame == "rotating"
    assert cfg.seed == 9
    config.validate(cfg)


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError) as info:
        config.parse_text("geometry.R_nm = 25\ngeometry.radius = 3\n")
    assert info.value.line == 2
    assert info.value.field == "geometry.radius"


def test_bad_value_reports_field():
    with pytest.raises(ConfigError) as info:
        config.parse_text("qd.f = lots")
    assert info.value.field == "qd.f" and info.value.line == 1
    with pytest.raises(ConfigError):
        config.parse_text("dynamics.n_fock = 2.5")
    with pytest.raises(ConfigError):
        config.parse_text("just words")


@pytest.mark.parametrize("override,field", [
    ("qd.f=-1", "qd.f"),
    ("qd.d_nm=-2", "qd.d_nm"),
    ("geometry.R_nm=0", "geometry.R_nm"),
    ("material.eps2_re=4", "material.eps2_re"),
    ("gate.Gamma_per_ps=-0.1", "gate.Gamma_per_ps"),
    ("dynamics.n_fock=1", "dynamics.n_fock"),
    ("dynamics.frame=lab", "dynamics.frame"),
    ("gate.method=guess", "gate.method"),
    ("gate.Delta_bounds=5, 1", "gate.Delta_bounds"),
    ("sweep.Q_list=1000, 500", "sweep.Q_list"),
    ("sweep.gn_R_nm_list=5, 20", "sweep.gn_R_nm_list"),
    ("sweep.kR_max=0.001", "sweep.kR_max"),
    ("sweep.m_list=0, 7", "sweep.m_list"),
    ("geometry.L_um=nan", "geometry.L_um"),
])
def test_validation_names_field(override, field):
    with pytest.raises(ConfigError) as info:
        config.parse_config(overrides=[override], use_env=False)
    assert info.value.field == field


def test_file_env_and_override_precedence(tmp_path, monkeypatch):
    p = tmp_path / "run.cfg"
    p.write_text("geometry.R_nm = 30\nqd.f = 50\n")
    monkeypatch.setenv(config.CONFIG_ENV, str(p))
    cfg = config.parse_config(overrides=["qd.f=80"])
    assert cfg.geometry.R_nm == 30.0 and cfg.qd.f == 80.0
    assert config.parse_config(use_env=False).geometry.R_nm == 20.0


def test_missing_file():
    with pytest.raises(ConfigError):
        config.parse_config("/nonexistent/run.cfg", use_env=False)


def test_override_syntax():
    with pytest.raises(ConfigError):
        config.parse_config(overrides=["qd.f"], use_env=False)


def test_header_round_trip():
    cfg = config.parse_config(overrides=["geometry.R_nm=33.5", "sweep.Q_list=100, 300"],
                              use_env=False)
    text = "\n".join(cfg.header_lines())
    again = config.parse_text(text)
    assert again.to_dict() == cfg.to_dict()

"""Run configuration: nested dataclasses, a dotted key = value file format, overrides.

File format (one setting per line, ``#`` starts a comment)::

    geometry.R_nm = 25
    gate.Q = 2000
    sweep.Gamma_list = 0.002, 0.01, 0.05

Unknown keys and unparsable values are errors that carry the line number.
"""

import dataclasses
import math
import os
from dataclasses import dataclass, field

from .constants import energy_mev_from_wavelength
from .errors import ConfigError

CONFIG_ENV = "PLASMONBUS_CONFIG"


@dataclass
class GeometryConfig:
    R_nm: float = 20.0
    L_um: float = 10.0


@dataclass
class MaterialConfig:
    eps1: float = 2.0
    eps_s: float = 3.3
    eps2_re: float = -50.0
    eps2_im: float = 0.6
    lambda0_nm: float = 950.0


@dataclass
class QDConfig:
    f: float = 100.0
    d_nm: float = 30.0
    delta_pl_meV: float = 0.0  # selects the mode frequency, hbar omega0 = E_tau - delta_pl


@dataclass
class DynamicsConfig:
    n_fock: int = 3
    dt_ps: float = 0.0  # 0 selects the step from the spectral span
    frame: str = "static"
    decay_to: str = "up"


@dataclass
class GateConfig:
    Omega0_ratio: float = 0.1
    Q: float = 1000.0
    Gamma_per_ps: float = 0.01
    deltaL_bounds: tuple = (2.0, 50.0)  # units of g
    Delta_bounds: tuple = (1.0, 30.0)  # units of g
    min_delta_pl: float = 5.0  # units of g
    coarse_points: tuple = (7, 7)
    method: str = "adiabatic"
    deltaL_g: float = 20.0  # single-gate run (units of g)
    Delta_g: float = 4.0


@dataclass
class SweepConfig:
    Gamma_list: tuple = (0.002, 0.01, 0.025, 0.05)
    Q_list: tuple = (200.0, 500.0, 1000.0, 2000.0)
    R_nm_list: tuple = (10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0)
    d_nm_list: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0)
    gn_R_nm_list: tuple = tuple(float(r) for r in range(10, 201, 10))
    kR_min: float = 0.01
    kR_max: float = 50.0
    kR_points: int = 60
    m_list: tuple = (0,)


@dataclass
class OutputConfig:
    path: str = ""  # empty writes to stdout


@dataclass
class RunConfig:
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    material: MaterialConfig = field(default_factory=MaterialConfig)
    qd: QDConfig = field(default_factory=QDConfig)
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    gate: GateConfig = field(default_factory=GateConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 0

    # derived SI / meV quantities used by the commands
    @property
    def radius(self):
        return self.geometry.R_nm * 1e-9

    @property
    def length(self):
        return self.geometry.L_um * 1e-6

    @property
    def lambda0(self):
        return self.material.lambda0_nm * 1e-9

    @property
    def gap(self):
        return self.qd.d_nm * 1e-9

    @property
    def E_tau(self):
        return energy_mev_from_wavelength(self.lambda0)

    def items(self):
        """Flat [(dotted key, value)] in declaration order."""
        out = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if dataclasses.is_dataclass(v):
                out += [(f"{f.name}.{g.name}", getattr(v, g.name)) for g in dataclasses.fields(v)]
            else:
                out.append((f.name, v))
        return out

    def to_dict(self):
        return dataclasses.asdict(self)

    def header_lines(self):
        return [f"{k} = {format_value(v)}" for k, v in self.items()]


def format_value(v):
    if isinstance(v, tuple):
        return ", ".join(format_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _field_types():
    types = {}
    for f in dataclasses.fields(RunConfig):
        default = f.default_factory() if f.default_factory is not dataclasses.MISSING else f.default
        if dataclasses.is_dataclass(default):
            for g in dataclasses.fields(default):
                types[f"{f.name}.{g.name}"] = (g.type, getattr(default, g.name))
        else:
            types[f.name] = (f.type, default)
    return types


def _convert(key, raw, line=None):
    types = _field_types()
    if key not in types:
        raise ConfigError(f"unknown key {key!r}", line=line, field=key)
    typ, default = types[key]
    raw = raw.strip()
    try:
        if typ is tuple:
            parts = [p.strip() for p in raw.split(",") if p.strip()]
            elem = type(default[0]) if default else float
            return tuple(elem(float(p)) if elem is int and float(p).is_integer() else elem(p)
                         for p in parts)
        if typ is int:
            v = float(raw)
            if not v.is_integer():
                raise ValueError(raw)
            return int(v)
        if typ is float:
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"cannot parse {raw!r} for {key}", line=line, field=key) from None


def _assign(cfg, key, value):
    if "." in key:
        section, name = key.split(".", 1)
        setattr(getattr(cfg, section), name, value)
    else:
        setattr(cfg, key, value)


def parse_text(text, cfg=None):
    cfg = RunConfig() if cfg is None else cfg
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", line=lineno)
        key, raw = body.split("=", 1)
        key = key.strip()
        _assign(cfg, key, _convert(key, raw, lineno))
    return cfg


def parse_config(path=None, overrides=(), use_env=True):
    """Load defaults, then the file (``path`` or $PLASMONBUS_CONFIG), then ``key=value`` overrides."""
    cfg = RunConfig()
    if path is None and use_env:
        path = os.environ.get(CONFIG_ENV) or None
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
        parse_text(text, cfg)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        key, raw = item.split("=", 1)
        key = key.strip()
        _assign(cfg, key, _convert(key, raw))
    validate(cfg)
    return cfg


def _positive(cfg, keys):
    values = dict(cfg.items())
    for k in keys:
        v = values[k]
        if not (v > 0 and (math.isfinite(v) or k == "gate.Q")):
            raise ConfigError(f"{k} must be positive, got {v!r}", field=k)


def validate(cfg):
    _positive(cfg, ["geometry.R_nm", "geometry.L_um", "material.eps1", "material.eps_s",
                    "material.lambda0_nm", "qd.f", "gate.Omega0_ratio", "gate.Q",
                    "gate.deltaL_g", "gate.Delta_g", "sweep.kR_min", "sweep.kR_max"])
    values = dict(cfg.items())
    if cfg.qd.d_nm < 0:
        raise ConfigError("qd.d_nm must be >= 0", field="qd.d_nm")
    if cfg.material.eps2_re >= cfg.material.eps_s:
        raise ConfigError("material.eps2_re must be below material.eps_s", field="material.eps2_re")
    if cfg.material.eps2_re >= 0:
        raise ConfigError("material.eps2_re must be negative", field="material.eps2_re")
    if cfg.gate.Gamma_per_ps < 0:
        raise ConfigError("gate.Gamma_per_ps must be >= 0", field="gate.Gamma_per_ps")
    if cfg.dynamics.n_fock < 2:
        raise ConfigError("dynamics.n_fock must be >= 2", field="dynamics.n_fock")
    if cfg.dynamics.dt_ps < 0:
        raise ConfigError("dynamics.dt_ps must be >= 0", field="dynamics.dt_ps")
    if cfg.dynamics.frame not in ("static", "rotating"):
        raise ConfigError("dynamics.frame must be static or rotating", field="dynamics.frame")
    if cfg.dynamics.decay_to not in ("up", "down"):
        raise ConfigError("dynamics.decay_to must be up or down", field="dynamics.decay_to")
    if cfg.gate.method not in ("adiabatic", "master"):
        raise ConfigError("gate.method must be adiabatic or master", field="gate.method")
    for k in ("gate.deltaL_bounds", "gate.Delta_bounds"):
        b = values[k]
        if len(b) != 2 or not 0 < b[0] < b[1]:
            raise ConfigError(f"{k} must be two increasing positive numbers, got {b!r}", field=k)
    cp = cfg.gate.coarse_points
    if len(cp) != 2 or min(cp) < 2:
        raise ConfigError("gate.coarse_points must be two integers >= 2", field="gate.coarse_points")
    for k in ("sweep.Gamma_list", "sweep.Q_list", "sweep.R_nm_list", "sweep.d_nm_list",
              "sweep.gn_R_nm_list"):
        axis = values[k]
        if not axis:
            raise ConfigError(f"{k} must not be empty", field=k)
        if any(b <= a for a, b in zip(axis, axis[1:])):
            raise ConfigError(f"{k} must be strictly increasing", field=k)
        if any(v < 0 for v in axis) or (k != "sweep.d_nm_list" and k != "sweep.Gamma_list"
                                        and any(v == 0 for v in axis)):
            raise ConfigError(f"{k} has out-of-range entries", field=k)
    if min(cfg.sweep.gn_R_nm_list) < 10 or max(cfg.sweep.gn_R_nm_list) > 200:
        raise ConfigError("sweep.gn_R_nm_list must lie within [10, 200] nm",
                          field="sweep.gn_R_nm_list")
    if cfg.sweep.kR_max <= cfg.sweep.kR_min:
        raise ConfigError("sweep.kR_max must exceed sweep.kR_min", field="sweep.kR_max")
    if cfg.sweep.kR_points < 2:
        raise ConfigError("sweep.kR_points must be >= 2", field="sweep.kR_points")
    if any(m < 0 or m > 3 for m in cfg.sweep.m_list):
        raise ConfigError("sweep.m_list entries must lie in 0..3", field="sweep.m_list")
    return cfg

"""Quantum-dot / nanowire coupling strength for the fundamental plasmon mode."""

import math
from dataclasses import dataclass, field

from . import specfun
from .constants import E_CHARGE, EPS0, HBAR, HBAR_MEV_PS, JOULE_PER_MEV, M_E
from .errors import DomainError, NoRootError
from .grid import SweepGrid
from .plasmon import NanowireGeometry, mode_shape_factor, solve_k_parallel

G_N_REFERENCE_RADIUS = 20e-9


@dataclass(frozen=True)
class QDParams:
    """Dot parameters.

    ``delta_pl`` (meV) is the trion-plasmon detuning E_tau - hbar*omega0; it
    selects the mode frequency and hence k_par.  ``omega_ratio`` overrides the
    hbar*omega0/E_tau factor of the coupling formula; by default it follows
    from ``delta_pl`` (exactly 1 when resonant).
    """

    f: float
    E_tau: float  # meV
    d: float  # m
    delta_pl: float = 0.0
    omega_ratio: float = None

    def __post_init__(self):
        if not self.f > 0:
            raise DomainError(f"oscillator strength must be positive, got {self.f}")
        if not self.E_tau > 0:
            raise DomainError(f"trion energy must be positive, got {self.E_tau}")
        if self.d < 0:
            raise DomainError(f"dot-surface gap must be >= 0, got {self.d}")
        if self.delta_pl >= self.E_tau:
            raise DomainError("delta_pl must be smaller than the trion energy")

    @property
    def mode_energy(self):
        """hbar*omega0 in meV."""
        return self.E_tau - self.delta_pl

    @property
    def omega0(self):
        """Mode angular frequency in rad/s."""
        return self.mode_energy / HBAR_MEV_PS * 1e12

    @property
    def energy_ratio(self):
        if self.omega_ratio is not None:
            return self.omega_ratio
        return self.mode_energy / self.E_tau


@dataclass(frozen=True)
class CouplingResult:
    g: float  # meV
    C: float  # k_par * R
    k_par: float  # 1/m
    diagnostics: dict = field(default_factory=dict)


def coupling_g(geom, mat, qd, k_par=None):
    """Coupling strength g (meV) between a dot at gap ``qd.d`` and the m = 0 mode.

    ``k_par`` may be passed to skip the root solve (it depends only on the
    mode frequency and the radius).
    """
    if k_par is None:
        k_par = solve_k_parallel(qd.omega0, 0, geom, mat)
    R, L = geom.radius, geom.length
    C = k_par * R
    shape = mode_shape_factor(0, C)
    bracket = mat.eps1 + (mat.eps_s - mat.eps1) * shape
    if bracket <= 0:
        raise DomainError(f"non-positive dielectric bracket {bracket:g} at C={C:g}")
    i0 = specfun.bessel_i(0, C)
    k0 = specfun.bessel_k(0, C)
    k1 = specfun.bessel_k(1, k_par * (R + qd.d))
    inside = (
        1.0 / (4.0 * math.pi * bracket * EPS0)
        * math.pi * E_CHARGE**2 * qd.f / (M_E * L * R**2)
        * qd.energy_ratio
        * i0 / k0
    )  # s^-2
    g_joule = HBAR * C * math.sqrt(inside) * k1
    return CouplingResult(
        g=g_joule / JOULE_PER_MEV,
        C=C,
        k_par=k_par,
        diagnostics={
            "bracket": bracket,
            "shape_factor": shape,
            "I0_over_K0": i0 / k0,
            "K1_gap": k1,
            "energy_ratio": qd.energy_ratio,
        },
    )


def coupling_from_mode_volume(f, V, eps1):
    """g (meV) from an effective mode volume V (m^3)."""
    if not V > 0:
        raise DomainError(f"mode volume must be positive, got {V}")
    inside = 1.0 / (4.0 * math.pi * eps1 * EPS0) * math.pi * E_CHARGE**2 * f / (M_E * V)
    return HBAR * math.sqrt(inside) / JOULE_PER_MEV


def mode_volume_for_coupling(f, g, eps1):
    """Inverse of :func:`coupling_from_mode_volume`: V (m^3) giving g (meV)."""
    if not g > 0:
        raise DomainError(f"coupling must be positive, got {g}")
    omega = g * JOULE_PER_MEV / HBAR
    return E_CHARGE**2 * f / (4.0 * eps1 * EPS0 * M_E * omega**2)


def normalized_coupling_curve(R_grid, d, length, mat, qd):
    """[(R, g(R, d) / g(20 nm, 0))] for a fixed wire length."""
    ref_qd = QDParams(qd.f, qd.E_tau, 0.0, qd.delta_pl, qd.omega_ratio)
    g_ref = coupling_g(NanowireGeometry(G_N_REFERENCE_RADIUS, length), mat, ref_qd).g
    at_d = QDParams(qd.f, qd.E_tau, d, qd.delta_pl, qd.omega_ratio)
    return [
        (float(R), coupling_g(NanowireGeometry(float(R), length), mat, at_d).g / g_ref)
        for R in R_grid
    ]


def coupling_map(R_grid, d_grid, length, mat, qd):
    """SweepGrid of g (meV) over radius x gap; cells without a mode are NaN."""
    grid = SweepGrid("R", R_grid, "d", d_grid, "g_meV")
    for i, R in enumerate(grid.x_values):
        geom = NanowireGeometry(float(R), length)
        try:
            k_par = solve_k_parallel(qd.omega0, 0, geom, mat)
        except (NoRootError, DomainError) as exc:
            for j in range(grid.y_values.size):
                grid.mark_failed(i, j, exc)
            continue
        for j, d in enumerate(grid.y_values):
            cell_qd = QDParams(qd.f, qd.E_tau, float(d), qd.delta_pl, qd.omega_ratio)
            try:
                res = coupling_g(geom, mat, cell_qd, k_par=k_par)
            except DomainError as exc:
                grid.mark_failed(i, j, exc)
            else:
                grid.set(i, j, res.g, {"C": res.C})
    return grid


def gap_ratio(k_par, R, d):
    """g(d) / g(0) = K1(k(R+d)) / K1(kR)."""
    return specfun.bessel_k(1, k_par * (R + d)) / specfun.bessel_k(1, k_par * R)


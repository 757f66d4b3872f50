"""Surface-plasmon modes of a cylindrical metal nanowire (quasi-static).

The mode frequency of azimuthal order ``m`` at longitudinal wave vector ``k``
depends on ``k`` and the radius only through ``x = kR``::

    omega^2 = omega_p^2 * F / (eps1 + (eps_s - eps1) * F),   F = x I'_m(x) K_m(x)

For ``m = 0`` the curve rises monotonically from 0 towards the surface-plasmon
asymptote ``omega_p / sqrt(eps1 + eps_s)``.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import specfun
from .constants import angular_frequency_from_wavelength
from .errors import DomainError, NoRootError

# Log-spaced bracket in kR.  The upper end is 500 rather than 100: the m = 0
# branch approaches its asymptote only as 1/(4 kR), so 0.999 of it sits near
# kR ~ 190.
KR_BRACKET = (1e-4, 500.0)
_BRACKET_POINTS = 60


@dataclass(frozen=True)
class NanowireGeometry:
    radius: float  # m
    length: float  # m

    def __post_init__(self):
        if not (self.radius > 0 and self.length > 0):
            raise DomainError(f"radius and length must be positive: {self}")
        if self.length < 10 * self.radius:
            warnings.warn(
                f"wire length {self.length:g} m is not much larger than radius "
                f"{self.radius:g} m; the infinite-wire mode picture is poor",
                stacklevel=2,
            )


@dataclass(frozen=True)
class MaterialParams:
    eps1: float  # surrounding dielectric
    eps_s: float  # metal background (core-electron) dielectric constant
    eps2: complex  # full metal permittivity at the working wavelength
    omega_p: float  # bulk plasma frequency, rad/s

    def __post_init__(self):
        if self.eps1 <= 0 or self.eps_s <= 0:
            raise DomainError("eps1 and eps_s must be positive")
        if complex(self.eps2).real >= 0:
            raise DomainError("metal permittivity must have negative real part")
        if self.omega_p <= 0:
            raise DomainError("omega_p must be positive")

    @classmethod
    def from_permittivity(cls, eps1, eps_s, eps2, lambda0):
        """Build from the permittivity at ``lambda0`` (m); omega_p by Drude inversion."""
        omega = angular_frequency_from_wavelength(lambda0)
        wp = drude_plasma_frequency(complex(eps2).real, eps_s, omega)
        return cls(eps1=eps1, eps_s=eps_s, eps2=complex(eps2), omega_p=wp)

    @property
    def asymptote(self):
        """Large-kR limit of every branch, omega_p / sqrt(eps1 + eps_s)."""
        return self.omega_p / math.sqrt(self.eps1 + self.eps_s)


def silver_pmma(lambda0=950e-9):
    """Silver wire under a thin PMMA layer at ``lambda0``."""
    return MaterialParams.from_permittivity(2.0, 3.3, -50 + 0.6j, lambda0)


@dataclass(frozen=True)
class PlasmonMode:
    m: int
    k_par: float  # 1/m
    omega0: float  # rad/s


def drude_plasma_frequency(eps2_re, eps_s, omega):
    """Plasma frequency with eps_s - omega_p^2/omega^2 = eps2_re."""
    if eps_s - eps2_re <= 0:
        raise DomainError(
            f"Drude inversion needs eps2_re < eps_s (got {eps2_re} >= {eps_s})"
        )
    return omega * math.sqrt(eps_s - eps2_re)


def mode_shape_factor(m, x):
    """x I'_m(x) K_m(x), the geometric factor shared by dispersion and coupling."""
    return x * specfun.bessel_i_prime(m, x) * specfun.bessel_k(m, x)


def dispersion_ratio(x, m, mat):
    """omega / omega_p at reduced wave vector x = kR."""
    f = mode_shape_factor(m, x)
    denom = mat.eps1 + (mat.eps_s - mat.eps1) * f
    if denom <= 0:
        raise DomainError(
            f"non-positive dispersion denominator {denom:g} at kR={x:g}, m={m}"
        )
    return math.sqrt(f / denom)


def dispersion_omega(k, m, geom, mat):
    """Mode frequency omega_{k,m} in rad/s."""
    if not k > 0:
        raise DomainError(f"wave vector must be positive, got {k}")
    return mat.omega_p * dispersion_ratio(k * geom.radius, m, mat)


def _bracket(omega_target, m, geom, mat):
    lo, hi = KR_BRACKET
    xs = np.geomspace(lo, hi, _BRACKET_POINTS)
    vals = [dispersion_omega(x / geom.radius, m, geom, mat) - omega_target for x in xs]
    for i in range(len(xs) - 1):
        if vals[i] == 0.0:
            return xs[i], xs[i]
        if vals[i] * vals[i + 1] < 0:
            return xs[i], xs[i + 1]
    return None


def solve_k_parallel(omega_target, m, geom, mat, rel_tol=1e-12):
    """Longitudinal wave vector (1/m) at which the m-branch reaches ``omega_target``.

    Geometric bracketing on kR followed by bisection, stopped once both the
    frequency residual and the kR bracket are below ``rel_tol`` (relative);
    the branch flattens at large kR, so the residual alone under-resolves k.
    For ``m >= 1`` the branch is not monotone; the lowest-kR crossing is
    returned.
    """
    if rel_tol < 1e-14:
        raise DomainError("rel_tol below 1e-14 is not attainable in double precision")
    if omega_target >= mat.asymptote and m == 0:
        raise NoRootError(
            f"omega {omega_target:.6g} rad/s at or above the asymptote "
            f"{mat.asymptote:.6g} rad/s",
            limit=mat.asymptote,
        )
    br = _bracket(omega_target, m, geom, mat)
    if br is None:
        raise NoRootError(
            f"no m={m} mode at omega {omega_target:.6g} rad/s for kR in {KR_BRACKET}",
            limit=mat.asymptote,
        )
    a, b = br
    fa = dispersion_omega(a / geom.radius, m, geom, mat) - omega_target
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = dispersion_omega(mid / geom.radius, m, geom, mat) - omega_target
        if fm == 0 or (abs(fm) <= rel_tol * omega_target and b - a <= rel_tol * mid):
            return float(mid / geom.radius)
        if (fm < 0) == (fa < 0):
            a, fa = mid, fm
        else:
            b = mid
    raise NoRootError("bisection did not reach the requested tolerance")


def fundamental_mode(omega0, geom, mat, rel_tol=1e-12):
    k = solve_k_parallel(omega0, 0, geom, mat, rel_tol)
    return PlasmonMode(m=0, k_par=k, omega0=omega0)


def mode_cutoff_report(geom, mat, omega, m_max=1):
    """[(m, propagating)] for m = 0..m_max at frequency ``omega``."""
    if m_max > 3:
        raise DomainError("m_max must be <= 3")
    report = []
    for m in range(m_max + 1):
        if m == 0:
            report.append((0, omega < mat.asymptote))
        else:
            report.append((m, _bracket(omega, m, geom, mat) is not None))
    return report


def dispersion_curve(kR_values, mat, m_values=(0,)):
    """Rows of (kR, omega/omega_p for each m)."""
    return [
        (float(x), *(dispersion_ratio(float(x), m, mat) for m in m_values))
        for x in kR_values
    ]

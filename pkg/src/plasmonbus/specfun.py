r"""Modified Bessel functions :math:`I_m(x)`, :math:`K_m(x)` and derivatives.

Integer order, real positive argument, double precision.  Three regimes:

* ascending power series for small arguments (all of :math:`I_m`, and
  :math:`K_0, K_1` for :math:`x \le 2`),
* the integral representation
  :math:`K_m(x) = \int_0^\infty e^{-x\cosh t}\cosh(mt)\,dt` evaluated with the
  trapezoidal rule (exponentially convergent for this integrand) for
  :math:`2 < x \le 25`,
* Hankel's asymptotic expansion (optimally truncated) for :math:`x > 25`.

:math:`K_m` for :math:`m \ge 2` comes from upward recurrence, which is
stable for :math:`K`.  Derivatives use the recurrences whose terms share a
sign, so no cancellation occurs:

.. math::
    I'_m = I_{m+1} + \frac{m}{x} I_m, \qquad
    K'_m = -K_{m-1} - \frac{m}{x} K_m .
"""

import math
from typing import NamedTuple

import numpy as np

from .constants import EULER_GAMMA
from .errors import DomainError

MAX_ORDER = 20
MAX_ARGUMENT = 700.0  # exp(700) ~ 1e304; beyond this I overflows and K underflows

_SERIES_MAX_X = 25.0
_K_SERIES_MAX_X = 2.0
_TINY = 1e-17


class BesselEval(NamedTuple):
    kind: str
    order: int
    argument: float
    value: float
    derivative: float


def _check(m, x):
    if isinstance(m, bool) or int(m) != m:
        raise DomainError(f"order must be a non-negative integer, got {m!r}")
    m = int(m)
    if m < 0 or m > MAX_ORDER:
        raise DomainError(f"order {m} outside supported range 0..{MAX_ORDER}")
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"argument must be positive and finite, got {x!r}")
    if x > MAX_ARGUMENT:
        raise OverflowError(
            f"argument {x} beyond supported range (x <= {MAX_ARGUMENT}); "
            "I_m overflows and K_m underflows in double precision"
        )
    return m, x


def _i_series(m, x):
    q = 0.25 * x * x
    term = (0.5 * x) ** m / math.factorial(m)
    total = term
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + m))
        total += term
        if term < _TINY * total:
            return total


def _hankel_coeffs(m, x):
    """Partial sums sum_k a_k(m) x^-k with alternating and non-alternating signs."""
    mu = 4.0 * m * m
    term = 1.0
    plus = 1.0  # for K: all terms added
    minus = 1.0  # for I: alternating
    k = 0
    last = math.inf
    while True:
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(term) >= last or term == 0.0:
            break
        last = abs(term)
        plus += term
        minus += term * (-1) ** k
        if abs(term) < _TINY:
            break
    return plus, minus


def _i_asymptotic(m, x):
    _, minus = _hankel_coeffs(m, x)
    return math.exp(x) / math.sqrt(2.0 * math.pi * x) * minus


def _k_asymptotic(m, x):
    plus, _ = _hankel_coeffs(m, x)
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * plus


def _k01_series(x):
    q = 0.25 * x * x
    log_half = math.log(0.5 * x)
    i0 = _i_series(0, x)
    i1 = _i_series(1, x)
    # K0 = -(ln(x/2) + gamma) I0 + sum_{k>=1} q^k/(k!)^2 H_k
    term = 1.0
    harmonic = 0.0
    s0 = 0.0
    # K1 = 1/x + ln(x/2) I1 - (x/4) sum_{k>=0} (psi(k+1)+psi(k+2)) q^k / (k!(k+1)!)
    term1 = 1.0
    s1 = (2.0 * -EULER_GAMMA + 1.0) * term1
    k = 0
    while True:
        k += 1
        harmonic += 1.0 / k
        term *= q / (k * k)
        term1 *= q / (k * (k + 1))
        d0 = term * harmonic
        d1 = term1 * (2.0 * (-EULER_GAMMA + harmonic) + 1.0 / (k + 1))
        s0 += d0
        s1 += d1
        if abs(d0) < _TINY * abs(s0) and abs(d1) < _TINY * abs(s1):
            break
    k0 = -(log_half + EULER_GAMMA) * i0 + s0
    k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1
    return k0, k1


def _k01_integral(x):
    # integrand decays to relative 1e-18 of its peak once x (cosh t - 1) > 42
    t_max = math.acosh(1.0 + 42.0 / x)
    h = 0.05
    n = int(math.ceil(t_max / h))
    t = np.arange(n + 1) * h
    w = np.exp(-x * (np.cosh(t) - 1.0))
    w[0] *= 0.5
    scale = h * math.exp(-x)
    return scale * float(np.sum(w)), scale * float(np.sum(w * np.cosh(t)))


def _k01(x):
    if x <= _K_SERIES_MAX_X:
        return _k01_series(x)
    if x <= _SERIES_MAX_X:
        return _k01_integral(x)
    return _k_asymptotic(0, x), _k_asymptotic(1, x)


def _i(m, x):
    if x <= _SERIES_MAX_X or m * m > x:
        return _i_series(m, x)
    return _i_asymptotic(m, x)


def _k_upto(m, x):
    """K_0..K_m as a list, by upward recurrence."""
    k0, k1 = _k01(x)
    ks = [k0, k1]
    for n in range(1, m):
        ks.append(ks[n - 1] + 2.0 * n / x * ks[n])
    return ks[: m + 1]


def bessel_i(m, x):
    """Modified Bessel function of the first kind, I_m(x)."""
    m, x = _check(m, x)
    return _i(m, x)


def bessel_k(m, x):
    """Modified Bessel function of the second kind, K_m(x)."""
    m, x = _check(m, x)
    return _k_upto(m, x)[m]


def bessel_i_prime(m, x):
    """dI_m/dx; exactly I_1 for m = 0."""
    m, x = _check(m, x)
    if m == 0:
        return _i(1, x)
    return _i(m + 1, x) + m / x * _i(m, x)


def bessel_k_prime(m, x):
    """dK_m/dx; exactly -K_1 for m = 0."""
    m, x = _check(m, x)
    ks = _k_upto(max(m, 1), x)
    if m == 0:
        return -ks[1]
    return -ks[m - 1] - m / x * ks[m]


def bessel_eval(kind, m, x):
    """Value and derivative bundled as a :class:`BesselEval`."""
    if kind == "I":
        return BesselEval("I", int(m), float(x), bessel_i(m, x), bessel_i_prime(m, x))
    if kind == "K":
        return BesselEval("K", int(m), float(x), bessel_k(m, x), bessel_k_prime(m, x))
    raise DomainError(f"kind must be 'I' or 'K', got {kind!r}")


def wronskian_residual(m, x):
    """Relative residual of I_m K'_m - I'_m K_m = -1/x."""
    w = bessel_i(m, x) * bessel_k_prime(m, x) - bessel_i_prime(m, x) * bessel_k(m, x)
    return abs(w + 1.0 / x) * x

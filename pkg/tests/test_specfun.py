import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plasmonbus import specfun
from plasmonbus.constants import EULER_GAMMA
from plasmonbus.errors import DomainError

mp.mp.dps = 30

# frozen mpmath values, 30+ digits
ORACLE = {
    ("I", 0, 1.0): 1.2660658777520083356,
    ("I", 1, 1.0): 0.56515910399248502721,
    ("K", 0, 1.0): 0.42102443824070833334,
    ("K", 1, 1.0): 0.60190723019723457474,
    ("I", 0, 0.37): 1.0345189536380983975,
    ("K", 0, 0.37): 1.1831724747926970520,
    ("I", 1, 0.37): 0.18818392241421158296,
    ("K", 1, 0.37): 2.3972964988046691075,
    ("I", 0, 5.0): 27.239871823604446895,
    ("K", 0, 5.0): 0.0036910983340425942747,
    ("I", 1, 5.0): 24.335642142450527199,
    ("K", 1, 5.0): 0.0040446134454521642084,
    ("I", 0, 30.0): 781672297823.97748972,
    ("K", 0, 30.0): 2.1324774964630563712e-14,
    ("I", 1, 30.0): 768532038938.95699949,
    ("K", 1, 30.0): 2.1677320018915494249e-14,
    ("I", 2, 2.0): 0.68894844769873820405,
    ("K", 2, 2.0): 0.25375975456605586294,
    ("I", 3, 2.0): 0.21273995923985265527,
    ("K", 3, 2.0): 0.64738539094863415316,
}


def _lib(kind, m, x):
    return specfun.bessel_i(m, x) if kind == "I" else specfun.bessel_k(m, x)


@pytest.mark.parametrize("key", sorted(ORACLE))
def test_frozen_oracle_values(key):
    kind, m, x = key
    assert _lib(kind, m, x) == pytest.approx(ORACLE[key], rel=1e-12)


def test_spec_examples():
    assert specfun.bessel_i(0, 1.0) == pytest.approx(1.26607, abs=1e-5)
    assert specfun.bessel_i(1, 1.0) == pytest.approx(0.56516, abs=1e-5)
    assert specfun.bessel_k(0, 1.0) == pytest.approx(0.42102, abs=1e-5)
    assert specfun.bessel_k(1, 1.0) == pytest.approx(0.60191, abs=1e-5)
    assert specfun.bessel_i(0, 1e-8) == pytest.approx(1.0, abs=1e-15)
    assert specfun.bessel_k(0, 10.0) < specfun.bessel_k(0, 5.0)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_against_live_mpmath_on_log_grid(m):
    worst = 0.0
    for x in np.logspace(-8, math.log10(699.0), 45):
        for kind, ref in (("I", mp.besseli), ("K", mp.besselk)):
            r = float(ref(m, mp.mpf(float(x))))
            worst = max(worst, abs(_lib(kind, m, float(x)) - r) / r)
    assert worst <= 1e-10


def test_k0_small_argument_log():
    x = 1e-6
    approx = -math.log(x / 2) - EULER_GAMMA
    assert specfun.bessel_k(0, x) == pytest.approx(approx, rel=1e-6)


def test_derivative_identities_exact():
    for x in (1e-5, 0.37, 1.0, 7.5, 40.0):
        assert specfun.bessel_i_prime(0, x) == specfun.bessel_i(1, x)
        assert specfun.bessel_k_prime(0, x) == -specfun.bessel_k(1, x)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_derivatives_against_mpmath(m):
    for x in (0.05, 0.37, 2.0, 12.0, 33.0):
        di = float(mp.diff(lambda t: mp.besseli(m, t), x))
        dk = float(mp.diff(lambda t: mp.besselk(m, t), x))
        assert specfun.bessel_i_prime(m, x) == pytest.approx(di, rel=1e-10)
        assert specfun.bessel_k_prime(m, x) == pytest.approx(dk, rel=1e-10)


def test_wronskian_at_037():
    x = 0.37
    w = specfun.bessel_i(0, x) * specfun.bessel_k_prime(0, x) - \
        specfun.bessel_i_prime(0, x) * specfun.bessel_k(0, x)
    assert w == pytest.approx(-1 / x, rel=1e-10)


def test_wronskian_grid():
    for m in range(4):
        for x in np.logspace(-6, math.log10(50), 80):
            assert specfun.wronskian_residual(m, float(x)) <= 1e-10


@given(st.integers(0, 3), st.floats(1e-6, 600.0))
def test_wronskian_property(m, x):
    assert specfun.wronskian_residual(m, x) <= 1e-10


@given(st.integers(1, 6), st.floats(1e-3, 80.0))
def test_k_recurrence(m, x):
    lhs = specfun.bessel_k(m + 1, x)
    rhs = specfun.bessel_k(m - 1, x) + 2 * m / x * specfun.bessel_k(m, x)
    assert lhs == pytest.approx(rhs, rel=1e-9)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_monotonicity(m):
    xs = np.logspace(-4, 2, 200)
    i = [specfun.bessel_i(m, float(x)) for x in xs]
    k = [specfun.bessel_k(m, float(x)) for x in xs]
    assert all(b > a for a, b in zip(i, i[1:]))
    assert all(b < a for a, b in zip(k, k[1:]))
    assert min(i) > 0 and min(k) > 0


def test_seam_continuity():
    # both branches of each scheme agree across the switch points
    for x0 in (2.0, 25.0):
        for m in (0, 1):
            below = specfun.bessel_k(m, x0 * (1 - 1e-12))
            above = specfun.bessel_k(m, x0 * (1 + 1e-12))
            assert above == pytest.approx(below, rel=1e-10)
            below = specfun.bessel_i(m, x0 * (1 - 1e-12))
            above = specfun.bessel_i(m, x0 * (1 + 1e-12))
            assert above == pytest.approx(below, rel=1e-10)


def test_bessel_eval_bundle():
    b = specfun.bessel_eval("K", 1, 2.0)
    assert b.order == 1 and b.argument == 2.0
    assert b.value == specfun.bessel_k(1, 2.0)
    assert b.derivative == specfun.bessel_k_prime(1, 2.0)
    with pytest.raises(DomainError):
        specfun.bessel_eval("J", 0, 1.0)


@pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
def test_domain_errors(x):
    with pytest.raises(DomainError):
        specfun.bessel_i(0, x)
    with pytest.raises(DomainError):
        specfun.bessel_k(0, x)


def test_bad_order():
    with pytest.raises(DomainError):
        specfun.bessel_i(-1, 1.0)
    with pytest.raises(DomainError):
        specfun.bessel_k(1.5, 1.0)


def test_overflow_signalled():
    with pytest.raises(OverflowError):
        specfun.bessel_i(0, 800.0)
    with pytest.raises(OverflowError):
        specfun.bessel_k(0, 800.0)

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import E_TAU
from plasmonbus import coupling, specfun
from plasmonbus.coupling import QDParams, coupling_g
from plasmonbus.errors import DomainError
from plasmonbus.plasmon import NanowireGeometry, silver_pmma

# frozen from an mpmath evaluation of the same closed form (40 digits)
G_20_30 = 0.51550696870924573  # meV
G_20_0 = 1.5056301749474436  # meV
GN_50_30 = 0.23666030085936184
V_STAR = 1.0253140194796038e-19  # m^3 giving g = 0.41 meV
G_V1E21 = 4.1515694222127781  # meV at V = 1e-21 m^3


def test_paper_point(mat, geom20, qd30):
    res = coupling_g(geom20, mat, qd30)
    assert res.g == pytest.approx(G_20_30, rel=1e-10)
    assert abs(res.g - 0.49) <= 0.049


def test_zero_gap(mat, geom20):
    assert coupling_g(geom20, mat, QDParams(100.0, E_TAU, 0.0)).g == pytest.approx(G_20_0, rel=1e-10)


def test_live_mpmath_oracle(mat, geom20, qd30):
    mp.mp.dps = 30
    res = coupling_g(geom20, mat, qd30)
    C = mp.mpf(res.C)
    assert float(mp.besselk(1, C * 50 / 20) / mp.besselk(1, C)) == pytest.approx(
        G_20_30 / G_20_0, rel=1e-12)


def test_gap_factorization(mat, geom20):
    g0 = coupling_g(geom20, mat, QDParams(100.0, E_TAU, 0.0))
    for d in (5e-9, 17e-9, 30e-9, 50e-9):
        gd = coupling_g(geom20, mat, QDParams(100.0, E_TAU, d), k_par=g0.k_par)
        ratio = specfun.bessel_k(1, g0.k_par * (20e-9 + d)) / specfun.bessel_k(1, g0.C)
        assert gd.g / g0.g == pytest.approx(ratio, rel=1e-12)
        assert coupling.gap_ratio(g0.k_par, 20e-9, d) == pytest.approx(ratio, rel=1e-15)


@given(st.floats(0.1, 1000.0))
def test_sqrt_f_scaling(f):
    mat = silver_pmma()
    geom = NanowireGeometry(20e-9, 10e-6)
    base = coupling_g(geom, mat, QDParams(100.0, E_TAU, 30e-9))
    other = coupling_g(geom, mat, QDParams(f, E_TAU, 30e-9), k_par=base.k_par)
    assert other.g / base.g == pytest.approx(math.sqrt(f / 100.0), rel=1e-12)


def test_length_scaling(mat, qd30):
    a = coupling_g(NanowireGeometry(20e-9, 10e-6), mat, qd30).g
    b = coupling_g(NanowireGeometry(20e-9, 40e-6), mat, qd30).g
    assert b / a == pytest.approx(0.5, rel=1e-12)


def test_mode_volume_round_trip(mat):
    V = coupling.mode_volume_for_coupling(100.0, 0.41, mat.eps1)
    assert V == pytest.approx(V_STAR, rel=1e-10)
    assert coupling.coupling_from_mode_volume(100.0, V, mat.eps1) == pytest.approx(0.41, rel=1e-12)
    assert coupling.coupling_from_mode_volume(100.0, 1e-21, mat.eps1) == pytest.approx(G_V1E21, rel=1e-10)
    with pytest.raises(DomainError):
        coupling.coupling_from_mode_volume(100.0, 0.0, mat.eps1)
    with pytest.raises(DomainError):
        coupling.mode_volume_for_coupling(100.0, -1.0, mat.eps1)


def test_normalized_curve_zero_gap_is_inverse_radius(mat):
    R = np.arange(10, 201, 10) * 1e-9
    curve = coupling.normalized_coupling_curve(R, 0.0, 10e-6, mat, QDParams(100.0, E_TAU, 0.0))
    for r, gn in curve:
        assert gn == pytest.approx(20e-9 / r, rel=1e-10)


def test_normalized_curve_paper_gap(mat):
    curve = coupling.normalized_coupling_curve([50e-9], 30e-9, 10e-6, mat, QDParams(100.0, E_TAU, 0.0))
    assert curve[0][1] == pytest.approx(GN_50_30, rel=1e-10)


def test_normalized_curve_decreases_with_gap(mat):
    qd = QDParams(100.0, E_TAU, 0.0)
    R = [20e-9, 60e-9, 150e-9]
    prev = None
    for d in (0.0, 10e-9, 30e-9, 50e-9):
        vals = [gn for _, gn in coupling.normalized_coupling_curve(R, d, 10e-6, mat, qd)]
        if prev is not None:
            assert all(v < p for v, p in zip(vals, prev))
        prev = vals


def test_coupling_map_pointwise(mat, quiet):
    R = np.array([10, 20, 50]) * 1e-9
    d = np.array([0, 15, 30]) * 1e-9
    qd = QDParams(100.0, E_TAU, 0.0)
    grid = coupling.coupling_map(R, d, 10e-6, mat, qd)
    for i, j, r, dd in grid.cells():
        ref = coupling_g(NanowireGeometry(r, 10e-6), mat, QDParams(100.0, E_TAU, dd)).g
        assert grid.values[i, j] == ref
    assert not grid.failed.any()


def test_coupling_map_nan_without_mode(mat):
    # a mode energy above the surface-plasmon asymptote has no bound solution
    qd = QDParams(100.0, E_TAU, 0.0, delta_pl=-3000.0)
    grid = coupling.coupling_map([20e-9, 40e-9], [0.0, 10e-9], 10e-6, mat, qd)
    assert np.isnan(grid.values).all()
    assert grid.failed.all()
    assert len(grid.errors) == 4


def test_energy_ratio(mat, geom20):
    qd = QDParams(100.0, E_TAU, 30e-9, delta_pl=10.0)
    assert qd.mode_energy == pytest.approx(E_TAU - 10.0)
    assert qd.energy_ratio == pytest.approx((E_TAU - 10.0) / E_TAU)
    assert QDParams(100.0, E_TAU, 0.0, omega_ratio=1.0).energy_ratio == 1.0


def test_qd_validation():
    with pytest.raises(DomainError):
        QDParams(0.0, E_TAU, 0.0)
    with pytest.raises(DomainError):
        QDParams(100.0, -1.0, 0.0)
    with pytest.raises(DomainError):
        QDParams(100.0, E_TAU, -1e-9)
    with pytest.raises(DomainError):
        QDParams(100.0, E_TAU, 0.0, delta_pl=E_TAU)

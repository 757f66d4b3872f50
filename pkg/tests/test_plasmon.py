import math
import warnings

import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plasmonbus import plasmon
from plasmonbus.constants import angular_frequency_from_wavelength
from plasmonbus.errors import DomainError, NoRootError
from plasmonbus.plasmon import NanowireGeometry

OMEGA_950 = 1982791123483003.4498  # rad/s
OMEGA_P = 14475733213832293.550  # rad/s, omega * sqrt(53.3)
C_STAR = 0.21241175639742755638  # k_par R at the 950 nm mode (mpmath root)
RATIO_KR50 = 0.43272570374464658438  # omega / omega_p at kR = 50 (mpmath)
KR_999 = 188.89825893978110932  # kR where omega = 0.999 x asymptote (mpmath)


def test_drude_examples():
    w = angular_frequency_from_wavelength(950e-9)
    assert w == pytest.approx(OMEGA_950, rel=1e-14)
    wp = plasmon.drude_plasma_frequency(-50.0, 3.3, w)
    assert wp == pytest.approx(1.448e16, rel=5e-3)
    assert wp == pytest.approx(OMEGA_P, rel=1e-13)
    assert plasmon.drude_plasma_frequency(2.3, 3.3, w) == pytest.approx(w, rel=1e-15)
    assert plasmon.drude_plasma_frequency(0.0, 4.0, w) == pytest.approx(2 * w, rel=1e-15)
    with pytest.raises(DomainError):
        plasmon.drude_plasma_frequency(3.3, 3.3, w)


def test_material_inversion_round_trip(mat):
    eps = mat.eps_s - (mat.omega_p / OMEGA_950) ** 2
    assert eps == pytest.approx(-50.0, rel=1e-12)
    assert mat.asymptote == pytest.approx(OMEGA_P / math.sqrt(5.3), rel=1e-13)


def test_kr50_value_matches_oracle(mat):
    assert plasmon.dispersion_ratio(50.0, 0, mat) == pytest.approx(RATIO_KR50, rel=1e-12)


def test_kr50_within_a_percent_of_asymptote(mat):
    # the large-kR limit is approached as 1/2 - 1/(4 kR); at kR = 50 the gap is 0.38 %
    r = plasmon.dispersion_ratio(50.0, 0, mat)
    assert 0 < 1 / math.sqrt(5.3) - r < 0.005


def test_small_kr_goes_to_zero(mat):
    vals = [plasmon.dispersion_ratio(x, 0, mat) for x in (1e-2, 1e-3, 1e-4)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 2e-4


def test_monotone_doubling(mat):
    x = 0.01
    while x < 10:
        assert plasmon.dispersion_ratio(2 * x, 0, mat) > plasmon.dispersion_ratio(x, 0, mat)
        x *= 1.3


def test_bounded_by_asymptote(mat):
    for x in (0.1, 1.0, 10.0, 100.0, 400.0):
        assert plasmon.dispersion_ratio(x, 0, mat) < 1 / math.sqrt(5.3)


def test_dimensional_omega(mat, geom20):
    k = 1.0 / 20e-9
    w = plasmon.dispersion_omega(k, 0, geom20, mat)
    assert w == pytest.approx(mat.omega_p * plasmon.dispersion_ratio(1.0, 0, mat), rel=1e-15)
    with pytest.raises(DomainError):
        plasmon.dispersion_omega(0.0, 0, geom20, mat)


def test_c_star(mat, geom20):
    k = plasmon.solve_k_parallel(OMEGA_950, 0, geom20, mat)
    assert isinstance(k, float)
    assert k * 20e-9 == pytest.approx(C_STAR, rel=1e-11)


def test_c_star_oracle_live(mat):
    mp.mp.dps = 30
    target = mp.mpf(OMEGA_950) / mp.mpf(mat.omega_p)

    def ratio(x):
        f = x * mp.besseli(1, x) * mp.besselk(0, x)
        return mp.sqrt(f / (2 + 1.3 * f)) - target

    assert float(mp.findroot(ratio, 0.2)) == pytest.approx(C_STAR, rel=1e-14)


def test_c_star_independent_of_radius(mat):
    for R in (10e-9, 50e-9, 200e-9):
        g = NanowireGeometry(R, 100 * R)
        assert plasmon.solve_k_parallel(OMEGA_950, 0, g, mat) * R == pytest.approx(C_STAR, rel=1e-11)


def test_near_asymptote_gives_large_kr(mat, geom20):
    k = plasmon.solve_k_parallel(0.999 * mat.asymptote, 0, geom20, mat)
    assert k * 20e-9 > 10
    assert k * 20e-9 == pytest.approx(KR_999, rel=1e-9)


def test_no_root_reports_asymptote(mat, geom20):
    with pytest.raises(NoRootError) as info:
        plasmon.solve_k_parallel(mat.asymptote, 0, geom20, mat)
    assert info.value.limit == pytest.approx(mat.asymptote)
    with pytest.raises(NoRootError):
        plasmon.solve_k_parallel(1.1 * mat.asymptote, 0, geom20, mat)


def test_rel_tol_floor(mat, geom20):
    with pytest.raises(DomainError):
        plasmon.solve_k_parallel(OMEGA_950, 0, geom20, mat, rel_tol=1e-15)


@given(st.floats(1e-3, 40.0), st.floats(5e-9, 500e-9))
def test_round_trip_property(kR, R):
    mat = plasmon.silver_pmma()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        geom = NanowireGeometry(R, 1e-5)
    k0 = kR / R
    w = plasmon.dispersion_omega(k0, 0, geom, mat)
    k = plasmon.solve_k_parallel(w, 0, geom, mat, rel_tol=1e-13)
    assert abs(plasmon.dispersion_omega(k, 0, geom, mat) - w) / w <= 1e-13
    assert k == pytest.approx(k0, rel=1e-10)


@given(st.floats(1e-3, 30.0), st.floats(0.1, 10.0))
def test_scaling_invariance(kR, alpha):
    mat = plasmon.silver_pmma()
    R = 20e-9
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        a = plasmon.dispersion_omega(kR / R, 0, NanowireGeometry(R, 1e-5), mat)
        b = plasmon.dispersion_omega(alpha * kR / R, 0, NanowireGeometry(R / alpha, 1e-5), mat)
    assert b == pytest.approx(a, rel=1e-12)


def test_cutoff_report_paper_wire(mat, geom20):
    rep = plasmon.mode_cutoff_report(geom20, mat, OMEGA_950, m_max=1)
    assert rep[0] == (0, True)
    assert len(rep) == 2


def test_cutoff_report_consistent_with_root_solver(mat):
    geom = NanowireGeometry(1e-6, 50e-6)
    for m, prop in plasmon.mode_cutoff_report(geom, mat, OMEGA_950, m_max=3):
        if prop:
            k = plasmon.solve_k_parallel(OMEGA_950, m, geom, mat)
            assert plasmon.dispersion_omega(k, m, geom, mat) == pytest.approx(OMEGA_950, rel=1e-10)
        else:
            with pytest.raises(NoRootError):
                plasmon.solve_k_parallel(OMEGA_950, m, geom, mat)
    with pytest.raises(DomainError):
        plasmon.mode_cutoff_report(geom, mat, OMEGA_950, m_max=4)


def test_fundamental_mode(mat, geom20):
    mode = plasmon.fundamental_mode(OMEGA_950, geom20, mat)
    assert mode.m == 0
    assert mode.omega0 == pytest.approx(plasmon.dispersion_omega(mode.k_par, 0, geom20, mat), rel=1e-12)


def test_geometry_validation():
    with pytest.raises(DomainError):
        NanowireGeometry(0.0, 1e-6)
    with pytest.raises(DomainError):
        NanowireGeometry(1e-8, -1.0)
    with pytest.warns(UserWarning):
        NanowireGeometry(20e-9, 100e-9)


def test_material_validation():
    with pytest.raises(DomainError):
        plasmon.MaterialParams(2.0, 3.3, 5 + 0j, 1e16)
    with pytest.raises(DomainError):
        plasmon.MaterialParams(-2.0, 3.3, -50 + 0j, 1e16)


def test_dispersion_curve_rows(mat):
    rows = plasmon.dispersion_curve([0.1, 1.0], mat, (0, 1))
    assert len(rows) == 2 and len(rows[0]) == 3
    assert rows[1][1] == plasmon.dispersion_ratio(1.0, 0, mat)

"""Fast invariant checks run by ``plasmonbus selftest``."""

import math

import numpy as np

from . import dynamics, network, specfun
from .coupling import QDParams, coupling_g, gap_ratio
from .linalg import fidelity, hermitian_eig
from .plasmon import NanowireGeometry, dispersion_omega, silver_pmma, solve_k_parallel

# arbitrary-precision reference values (mpmath, 40 digits)
SPOT_VALUES = {
    ("I", 0): 1.2660658777520083356,
    ("I", 1): 0.56515910399248502721,
    ("K", 0): 0.42102443824070833334,
    ("K", 1): 0.60190723019723457474,
}


def _wronskian():
    worst = max(
        specfun.wronskian_residual(m, x)
        for m in range(4) for x in np.logspace(-6, math.log10(50), 60)
    )
    return worst <= 1e-10, f"max relative residual {worst:.2e}"


def _spot_values():
    worst = 0.0
    for (kind, m), ref in SPOT_VALUES.items():
        v = specfun.bessel_i(m, 1.0) if kind == "I" else specfun.bessel_k(m, 1.0)
        worst = max(worst, abs(v - ref) / ref)
    return worst <= 1e-9, f"max relative error {worst:.2e}"


def _round_trip():
    mat = silver_pmma()
    geom = NanowireGeometry(20e-9, 10e-6)
    worst = 0.0
    for kR in (0.05, 0.2, 1.0, 5.0):
        k0 = kR / geom.radius
        k = solve_k_parallel(dispersion_omega(k0, 0, geom, mat), 0, geom, mat)
        worst = max(worst, abs(k - k0) / k0)
    return worst <= 1e-10, f"max relative error {worst:.2e}"


def _gap_factorization():
    mat = silver_pmma()
    geom = NanowireGeometry(20e-9, 10e-6)
    e_tau = 1305.0
    g0 = coupling_g(geom, mat, QDParams(100.0, e_tau, 0.0))
    g30 = coupling_g(geom, mat, QDParams(100.0, e_tau, 30e-9), k_par=g0.k_par)
    err = abs(g30.g / g0.g - gap_ratio(g0.k_par, geom.radius, 30e-9))
    return err <= 1e-12, f"ratio error {err:.2e}"


def _lindblad_trace():
    rng = np.random.default_rng(7)
    p = dynamics.PulseSpec(0.3, 10.0)
    cfg = dynamics.SystemConfig(
        (dynamics.DotConfig(0.5, 5.0, 2.0, Gamma=0.01, pulse=p),
         dynamics.DotConfig(0.5, 5.0, 2.0, Gamma=0.01, pulse=p)),
        kappa=1.0,
    )
    n = cfg.hilbert.dim
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    tr = abs(np.trace(dynamics.lindblad_rhs(rho, 1.0, cfg)))
    return tr <= 1e-12, f"|Tr drho/dt| = {tr:.2e}"


def _fidelity_closed_form():
    p = 0.3
    rho = np.diag([p, 1 - p]).astype(complex)
    ket = np.diag([1.0, 0.0]).astype(complex)
    err = abs(fidelity(rho, ket) - math.sqrt(p))
    return err <= 1e-9, f"error {err:.2e}"


def _eigensolver():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    m = a + a.conj().T
    w, v = hermitian_eig(m)
    err = np.linalg.norm(v @ np.diag(w) @ v.conj().T - m) / np.linalg.norm(m)
    return err <= 1e-8, f"reconstruction error {err:.2e}"


def _nonlocal_cnot():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(3):
        ab = network.random_state(rng, 2)
        reg = network.QubitRegister(4, np.kron(ab, [1, 0, 0, 0]), ("A", "B", "ti", "tj"))
        reg = network.prepare_epr(reg, "ti", "tj")
        for m1 in (0, 1):
            for m2 in (0, 1):
                _, tr = network.nonlocal_cnot(reg, "A", "B", "ti", "tj", forced=(m1, m2))
                worst = max(worst, tr.verification["max_deviation"])
    return worst <= 1e-10, f"max deviation {worst:.2e}"


CHECKS = (
    ("bessel wronskian", _wronskian),
    ("bessel spot values", _spot_values),
    ("dispersion round trip", _round_trip),
    ("coupling gap factorization", _gap_factorization),
    ("lindblad traceless", _lindblad_trace),
    ("fidelity closed form", _fidelity_closed_form),
    ("jacobi eigensolver", _eigensolver),
    ("nonlocal cnot", _nonlocal_cnot),
)


def run_selftest():
    """[(name, passed, detail)] for every check; exceptions count as failures."""
    out = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check, reported not raised
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, bool(ok), detail))
    return out

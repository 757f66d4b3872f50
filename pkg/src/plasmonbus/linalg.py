"""Hermitian eigensolver, PSD matrix square root, Uhlmann fidelity, state checks."""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceError, DomainError, InvariantError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-8
PSD_TOL = 1e-9


def hermiticity_residual(m):
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def hermitian_eig(m, tol=1e-15, max_sweeps=60):
    """Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.

    Cyclic Jacobi rotations; each pair satisfies ||Mv - lv|| <= 1e-9 ||M||.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if hermiticity_residual(m) > HERMITIAN_TOL * scale:
        raise DomainError("matrix is not Hermitian to 1e-10")
    herm = 0.5 * (m + m.conj().T)
    w, v, sweeps = _kernels.jacobi_hermitian(herm, tol, max_sweeps)
    if sweeps < 0:
        raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def sqrtm_psd(m, tol=PSD_TOL):
    w, v = hermitian_eig(m)
    if w[0] < -tol:
        raise InvariantError(f"matrix not positive semidefinite (min eigenvalue {w[0]:.3e})")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(rho, rho_prime):
    """Uhlmann fidelity Tr sqrt( sqrt(rho') rho sqrt(rho') ), not squared."""
    rho = np.asarray(rho, dtype=np.complex128)
    rho_prime = np.asarray(rho_prime, dtype=np.complex128)
    if rho.shape != rho_prime.shape:
        raise DomainError(f"dimension mismatch {rho.shape} vs {rho_prime.shape}")
    check_density_matrix(rho, trace_tol=None)
    check_density_matrix(rho_prime, trace_tol=None)
    s = sqrtm_psd(rho_prime)
    inner = s @ rho @ s
    inner = 0.5 * (inner + inner.conj().T)
    w, _ = hermitian_eig(inner)
    if w[0] < -PSD_TOL:
        raise InvariantError(f"fidelity kernel not PSD (min eigenvalue {w[0]:.3e})")
    return float(min(1.0, np.sum(np.sqrt(np.clip(w, 0.0, None)))))


@dataclass(frozen=True)
class DensityDiagnostics:
    trace_error: float
    hermiticity: float
    min_eigenvalue: float

    def ok(self, trace_tol=TRACE_TOL, herm_tol=HERMITIAN_TOL, psd_tol=PSD_TOL):
        return (
            self.trace_error <= trace_tol
            and self.hermiticity <= herm_tol
            and self.min_eigenvalue >= -psd_tol
        )


def density_diagnostics(rho):
    rho = np.asarray(rho, dtype=np.complex128)
    herm = hermiticity_residual(rho)
    w, _ = _kernels.jacobi_hermitian(0.5 * (rho + rho.conj().T), 1e-15, 60)[:2]
    return DensityDiagnostics(
        trace_error=float(abs(np.trace(rho) - 1.0)),
        hermiticity=herm,
        min_eigenvalue=float(np.min(w)),
    )


def check_density_matrix(rho, trace_tol=TRACE_TOL, herm_tol=HERMITIAN_TOL, psd_tol=PSD_TOL):
    """Raise InvariantError unless rho is a valid density matrix.

    ``trace_tol=None`` skips the trace test (useful for sub-normalized states).
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvariantError("density matrix has non-finite entries")
    diag = density_diagnostics(rho)
    if diag.hermiticity > herm_tol:
        raise InvariantError(f"Hermiticity residual {diag.hermiticity:.3e} > {herm_tol}")
    if trace_tol is not None and diag.trace_error > trace_tol:
        raise InvariantError(f"trace error {diag.trace_error:.3e} > {trace_tol}")
    if diag.min_eigenvalue < -psd_tol:
        raise InvariantError(f"min eigenvalue {diag.min_eigenvalue:.3e} < -{psd_tol}")
    return diag


def purity(rho):
    return float(np.real(np.trace(rho @ rho)))

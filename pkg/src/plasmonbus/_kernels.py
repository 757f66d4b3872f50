"""Compiled inner loops: sparse RK4 propagation and Jacobi diagonalization.

A generator is described by

* ``hdiag`` (real, meV): static diagonal of H,
* ``lam`` (real, ps^-1): diagonal of sum_k L_k^dag L_k (decay-free: zeros),
* off-diagonal entries ``(rows, cols, vals, coef)``: H[r, c] += vals * c_k(t),
* coefficient table ``ckind, cpar``: kind 0 constant 1, kind 1 Gaussian
  ``p0 exp(-(t - p2)^2 / p1^2)``, kind 2 phase ``exp(i p0 t / hbar)``,
* jump entries ``(jptr, jrow, jcol, jval)``: CSR-like lists of the nonzeros of
  each sqrt(rate) * L_k.
"""

import numba
import numpy as np


@numba.njit(cache=True, fastmath=True)
def _coefs(t, ckind, cpar, hbar, out):
    for k in range(ckind.shape[0]):
        kind = ckind[k]
        if kind == 0:
            out[k] = 1.0
        elif kind == 1:
            u = (t - cpar[k, 2]) / cpar[k, 1]
            out[k] = cpar[k, 0] * np.exp(-u * u)
        else:
            ph = cpar[k, 0] * t / hbar
            out[k] = np.cos(ph) + 1j * np.sin(ph)


@numba.njit(cache=True, fastmath=True)
def _lindblad_rhs(rho, t, hdiag, lam, rows, cols, vals, coef, ckind, cpar,
                  jptr, jrow, jcol, jval, hbar, cbuf, out):
    # out = X + X^dag + sum_k L_k rho L_k^dag with X = (-i/hbar) H rho - lam rho / 2
    n = rho.shape[0]
    ih = -1j / hbar
    x = np.empty_like(rho)
    for a in range(n):
        da = ih * hdiag[a] - 0.5 * lam[a]
        for b in range(n):
            x[a, b] = da * rho[a, b]
    _coefs(t, ckind, cpar, hbar, cbuf)
    for e in range(rows.shape[0]):
        r = rows[e]
        c = cols[e]
        h = ih * vals[e] * cbuf[coef[e]]
        for b in range(n):
            x[r, b] += h * rho[c, b]
    for a in range(n):
        for b in range(a, n):
            v = x[a, b] + np.conj(x[b, a])
            out[a, b] = v
            out[b, a] = np.conj(v)
    for k in range(jptr.shape[0] - 1):
        for p in range(jptr[k], jptr[k + 1]):
            m1 = jrow[p]
            c1 = jcol[p]
            v1 = jval[p]
            for q in range(jptr[k], jptr[k + 1]):
                out[m1, jrow[q]] += v1 * np.conj(jval[q]) * rho[c1, jcol[q]]


@numba.njit(cache=True, fastmath=True)
def rk4_density(rho0, t0, dt, nsteps, record_every, hdiag, lam, rows, cols, vals,
                coef, ckind, cpar, jptr, jrow, jcol, jval, hbar):
    """Fixed-step RK4 for the Lindblad equation.

    Returns the final matrix and snapshots taken every ``record_every`` steps
    (including the initial state; ``record_every <= 0`` records none).
    """
    n = rho0.shape[0]
    rho = rho0.copy()
    k1 = np.empty_like(rho)
    k2 = np.empty_like(rho)
    k3 = np.empty_like(rho)
    k4 = np.empty_like(rho)
    tmp = np.empty_like(rho)
    cbuf = np.empty(ckind.shape[0], dtype=np.complex128)
    nrec = 0
    if record_every > 0:
        nrec = nsteps // record_every + 1
    snaps = np.empty((nrec, n, n), dtype=np.complex128)
    times = np.empty(nrec)
    ir = 0
    if nrec > 0:
        snaps[0] = rho
        times[0] = t0
        ir = 1
    for step in range(nsteps):
        t = t0 + step * dt
        _lindblad_rhs(rho, t, hdiag, lam, rows, cols, vals, coef, ckind, cpar,
                      jptr, jrow, jcol, jval, hbar, cbuf, k1)
        for a in range(n):
            for b in range(n):
                tmp[a, b] = rho[a, b] + 0.5 * dt * k1[a, b]
        _lindblad_rhs(tmp, t + 0.5 * dt, hdiag, lam, rows, cols, vals, coef, ckind, cpar,
                      jptr, jrow, jcol, jval, hbar, cbuf, k2)
        for a in range(n):
            for b in range(n):
                tmp[a, b] = rho[a, b] + 0.5 * dt * k2[a, b]
        _lindblad_rhs(tmp, t + 0.5 * dt, hdiag, lam, rows, cols, vals, coef, ckind, cpar,
                      jptr, jrow, jcol, jval, hbar, cbuf, k3)
        for a in range(n):
            for b in range(n):
                tmp[a, b] = rho[a, b] + dt * k3[a, b]
        _lindblad_rhs(tmp, t + dt, hdiag, lam, rows, cols, vals, coef, ckind, cpar,
                      jptr, jrow, jcol, jval, hbar, cbuf, k4)
        for a in range(n):
            for b in range(n):
                rho[a, b] += dt / 6.0 * (k1[a, b] + 2.0 * k2[a, b] + 2.0 * k3[a, b] + k4[a, b])
        if nrec > 0 and (step + 1) % record_every == 0 and ir < nrec:
            snaps[ir] = rho
            times[ir] = t0 + (step + 1) * dt
            ir += 1
    return rho, snaps[:ir], times[:ir]


@numba.njit(cache=True, fastmath=True)
def _schrodinger_rhs(psi, t, hdiag, rows, cols, vals, coef, ckind, cpar, hbar, cbuf, out):
    ih = -1j / hbar
    for a in range(psi.shape[0]):
        out[a] = ih * hdiag[a] * psi[a]
    _coefs(t, ckind, cpar, hbar, cbuf)
    for e in range(rows.shape[0]):
        out[rows[e]] += ih * vals[e] * cbuf[coef[e]] * psi[cols[e]]


@numba.njit(cache=True, fastmath=True)
def rk4_state(psi0, t0, dt, nsteps, record_every, hdiag, rows, cols, vals, coef,
              ckind, cpar, hbar, weights):
    """Fixed-step RK4 for the Schrodinger equation.

    Also tracks the running maximum of sum_a weights[a] |psi_a|^2 over all
    steps (used for the instantaneous plasmon population).
    """
    n = psi0.shape[0]
    psi = psi0.copy()
    k1 = np.empty_like(psi)
    k2 = np.empty_like(psi)
    k3 = np.empty_like(psi)
    k4 = np.empty_like(psi)
    tmp = np.empty_like(psi)
    cbuf = np.empty(ckind.shape[0], dtype=np.complex128)
    nrec = 0
    if record_every > 0:
        nrec = nsteps // record_every + 1
    snaps = np.empty((nrec, n), dtype=np.complex128)
    times = np.empty(nrec)
    ir = 0
    if nrec > 0:
        snaps[0] = psi
        times[0] = t0
        ir = 1
    wmax = 0.0
    for step in range(nsteps):
        t = t0 + step * dt
        _schrodinger_rhs(psi, t, hdiag, rows, cols, vals, coef, ckind, cpar, hbar, cbuf, k1)
        for a in range(n):
            tmp[a] = psi[a] + 0.5 * dt * k1[a]
        _schrodinger_rhs(tmp, t + 0.5 * dt, hdiag, rows, cols, vals, coef, ckind, cpar, hbar, cbuf, k2)
        for a in range(n):
            tmp[a] = psi[a] + 0.5 * dt * k2[a]
        _schrodinger_rhs(tmp, t + 0.5 * dt, hdiag, rows, cols, vals, coef, ckind, cpar, hbar, cbuf, k3)
        for a in range(n):
            tmp[a] = psi[a] + dt * k3[a]
        _schrodinger_rhs(tmp, t + dt, hdiag, rows, cols, vals, coef, ckind, cpar, hbar, cbuf, k4)
        w = 0.0
        for a in range(n):
            psi[a] += dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a])
            w += weights[a] * (psi[a].real ** 2 + psi[a].imag ** 2)
        if w > wmax:
            wmax = w
        if nrec > 0 and (step + 1) % record_every == 0 and ir < nrec:
            snaps[ir] = psi
            times[ir] = t0 + (step + 1) * dt
            ir += 1
    return psi, snaps[:ir], times[:ir], wmax


@numba.njit(cache=True)
def jacobi_hermitian(a, tol, max_sweeps):
    """Cyclic complex Jacobi rotations.

    Returns (eigenvalues, eigenvectors, sweeps) with the eigenvalues unsorted;
    sweeps = -1 signals nonconvergence.
    """
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=np.complex128)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += a[i, j].real ** 2 + a[i, j].imag ** 2
    thresh = (tol * np.sqrt(fro)) ** 2
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += a[i, j].real ** 2 + a[i, j].imag ** 2
        if off <= thresh:
            w = np.empty(n)
            for i in range(n):
                w[i] = a[i, i].real
            return w, v, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                ph = apq / r  # e^{i phi}
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                if theta >= 0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                g00 = c + 0j
                g01 = s + 0j
                g10 = -s * np.conj(ph)
                g11 = c * np.conj(ph)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * g00 + akq * g10
                    a[k, q] = akp * g01 + akq * g11
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = np.conj(g00) * apk + np.conj(g10) * aqk
                    a[q, k] = np.conj(g01) * apk + np.conj(g11) * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * g00 + vkq * g10
                    v[k, q] = vkp * g01 + vkq * g11
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    return w, v, -1

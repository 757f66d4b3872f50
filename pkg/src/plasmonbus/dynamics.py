"""Open-system dynamics of n three-level dots sharing one plasmon mode.

Basis ordering is dot 0 (x) dot 1 (x) ... (x) Fock, with dot levels
``DOWN = 0`` (|down>), ``UP = 1`` (|up>) and ``TRION = 2`` (|up down, Up>).
Energies are in meV and times in ps; ``hbar = HBAR_MEV_PS``.

Two equivalent frames are supported.  ``"static"`` carries the plasmon
detuning as ``Delta a^dag a`` and has time dependence only through the
pulses; ``"rotating"`` is the laser-frame form with the explicit phase
``exp(i Delta t / hbar)`` on the plasmon creation term.  Populations agree
between the two.

The dense builders (:func:`hamiltonian`, :func:`lindblad_rhs`) are the
readable reference.  :func:`integrate` and :func:`evolve_decay_free` run the
same generator through compiled sparse RK4 loops.
"""

import math
from dataclasses import dataclass, field, replace
from functools import reduce

import numpy as np

from . import _kernels
from .constants import HBAR_MEV_PS
from .errors import ConvergenceError, DomainError, InvariantError
from .linalg import check_density_matrix

DOWN, UP, TRION = 0, 1, 2
STEP_HALVING_TOL = 1e-7
TRACE_DRIFT_TOL = 1e-6
NORM_TOL = 1e-9
MAX_REFINEMENTS = 4  # automatic dt is halved at most this often


@dataclass(frozen=True)
class HilbertSpace:
    n_qds: int = 2
    n_fock: int = 3  # plasmon occupations 0..n_fock

    levels_per_qd = 3

    def __post_init__(self):
        if self.n_qds < 1:
            raise DomainError("need at least one dot")
        if self.n_fock < 2:
            raise DomainError(f"n_fock must be >= 2, got {self.n_fock}")

    @property
    def n_levels(self):
        return self.n_fock + 1

    @property
    def dim(self):
        return 3**self.n_qds * self.n_levels

    def index(self, levels, n=0):
        if len(levels) != self.n_qds:
            raise DomainError(f"expected {self.n_qds} dot levels, got {levels}")
        idx = 0
        for lv in levels:
            idx = idx * 3 + lv
        return idx * self.n_levels + n

    def basis(self, levels, n=0):
        v = np.zeros(self.dim, dtype=np.complex128)
        v[self.index(levels, n)] = 1.0
        return v

    def qubit_index(self, bits):
        """Index of |bits> (x) |vac> with qubit 0 = |down>, 1 = |up>."""
        return self.index(tuple(UP if b else DOWN for b in bits), 0)

    def qubit_indices(self):
        """Indices of all 2^n computational states with the plasmon in vacuum, in binary order."""
        n = self.n_qds
        return [self.qubit_index([(k >> (n - 1 - j)) & 1 for j in range(n)]) for k in range(2**n)]

    def with_fock(self, n_fock):
        return HilbertSpace(self.n_qds, n_fock)


@dataclass(frozen=True)
class PulseSpec:
    Omega0: float  # meV
    tau: float  # ps
    t_center: float = 0.0  # ps

    def __post_init__(self):
        if self.Omega0 < 0:
            raise DomainError("pulse amplitude must be >= 0")
        if not self.tau > 0:
            raise DomainError("pulse width must be positive")

    def __call__(self, t):
        return gaussian_pulse(t, self)


def gaussian_pulse(t, p):
    """Rabi amplitude Omega0 exp(-(t - t_c)^2 / tau^2) in meV."""
    u = (t - p.t_center) / p.tau
    return p.Omega0 * np.exp(-u * u)


@dataclass(frozen=True)
class DotConfig:
    """One dot: coupling g, laser detuning delta_L, two-photon detuning Delta (meV).

    ``decay_to`` picks the level the trion relaxes into: ``"up"`` (the
    sigma+ radiative partner, default) or ``"down"``.
    """

    g: float
    delta_L: float
    Delta: float
    Gamma: float = 0.0  # ps^-1
    pulse: PulseSpec = None
    decay_to: str = "up"

    def __post_init__(self):
        if self.Gamma < 0:
            raise DomainError("Gamma must be >= 0")
        if self.decay_to not in ("up", "down"):
            raise DomainError(f"decay_to must be 'up' or 'down', got {self.decay_to!r}")

    @property
    def delta_pl(self):
        """Trion-plasmon detuning, delta_L - Delta."""
        return self.delta_L - self.Delta


@dataclass(frozen=True)
class SystemConfig:
    dots: tuple
    kappa: float = 0.0  # ps^-1
    hilbert: HilbertSpace = None
    frame: str = "static"

    def __post_init__(self):
        object.__setattr__(self, "dots", tuple(self.dots))
        if self.hilbert is None:
            object.__setattr__(self, "hilbert", HilbertSpace(len(self.dots)))
        if self.hilbert.n_qds != len(self.dots):
            raise DomainError(
                f"Hilbert space has {self.hilbert.n_qds} dots, config has {len(self.dots)}"
            )
        if self.kappa < 0:
            raise DomainError("kappa must be >= 0")
        if self.frame not in ("static", "rotating"):
            raise DomainError(f"frame must be 'static' or 'rotating', got {self.frame!r}")

    @property
    def Delta(self):
        """Common two-photon detuning; the static frame requires all dots to agree."""
        ds = [d.Delta for d in self.dots]
        if max(ds) - min(ds) > 1e-12:
            raise DomainError(f"static frame needs a common Delta, got {ds}")
        return ds[0]

    def without_decay(self):
        return replace(self, kappa=0.0, dots=tuple(replace(d, Gamma=0.0) for d in self.dots))

    def with_frame(self, frame):
        return replace(self, frame=frame)

    def with_fock(self, n_fock):
        return replace(self, hilbert=self.hilbert.with_fock(n_fock))


# -- operators ---------------------------------------------------------------


def _dot_op(space, j, op3):
    mats = [np.eye(3)] * space.n_qds
    mats = list(mats)
    mats[j] = op3
    return np.kron(reduce(np.kron, mats), np.eye(space.n_levels)).astype(np.complex128)


def transition(space, j, to, frm):
    """|to><frm| on dot j."""
    op = np.zeros((3, 3))
    op[to, frm] = 1.0
    return _dot_op(space, j, op)


def annihilation(space):
    a = np.diag(np.sqrt(np.arange(1, space.n_levels)), 1)
    return np.kron(np.eye(3**space.n_qds), a).astype(np.complex128)


def number_operator(space):
    a = annihilation(space)
    return a.conj().T @ a


def jump_operators(cfg):
    """[(name, sqrt(rate) * L)] for all nonzero decay channels."""
    space = cfg.hilbert
    ops = []
    for j, dot in enumerate(cfg.dots):
        if dot.Gamma > 0:
            target = UP if dot.decay_to == "up" else DOWN
            ops.append((f"trion{j}", math.sqrt(dot.Gamma) * transition(space, j, target, TRION)))
    if cfg.kappa > 0:
        ops.append(("plasmon", math.sqrt(cfg.kappa) * annihilation(space)))
    return ops


# -- Hamiltonians ----------------------------------------------------------------


def _terms(cfg):
    """Hamiltonian as [(matrix, coefficient spec)].

    Coefficient specs: ("const",), ("gauss", Omega0, tau, tc), ("phase", w)
    meaning exp(i w t / hbar).
    """
    space = cfg.hilbert
    a = annihilation(space)
    ad = a.conj().T
    static = np.zeros((space.dim, space.dim), dtype=np.complex128)
    terms = []
    if cfg.frame == "static":
        static += cfg.Delta * (ad @ a)
    for j, dot in enumerate(cfg.dots):
        sig = transition(space, j, UP, TRION)  # |up><T|
        static += dot.delta_L * transition(space, j, TRION, TRION)
        if dot.g != 0:
            if cfg.frame == "static":
                static += dot.g * (ad @ sig + sig.conj().T @ a)
            else:
                terms.append((dot.g * (ad @ sig), ("phase", dot.Delta)))
                terms.append((dot.g * (sig.conj().T @ a), ("phase", -dot.Delta)))
        if dot.pulse is not None and dot.pulse.Omega0 != 0:
            p = dot.pulse
            terms.append((sig + sig.conj().T, ("gauss", p.Omega0, p.tau, p.t_center)))
    return [(static, ("const",))] + terms


def _coef_value(spec, t):
    kind = spec[0]
    if kind == "const":
        return 1.0
    if kind == "gauss":
        return gaussian_pulse(t, PulseSpec(spec[1], spec[2], spec[3]))
    return np.exp(1j * spec[1] * t / HBAR_MEV_PS)


def hamiltonian(t, cfg):
    """Dense H(t) in the frame selected by ``cfg.frame``."""
    return sum(m * _coef_value(spec, t) for m, spec in _terms(cfg))


def build_static_hamiltonian(t, cfg):
    return hamiltonian(t, cfg.with_frame("static"))


def build_rotating_hamiltonian(t, cfg):
    return hamiltonian(t, cfg.with_frame("rotating"))


def lindblad_rhs(rho, t, cfg):
    """Dense Lindblad right-hand side d rho / dt (ps^-1)."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (cfg.hilbert.dim, cfg.hilbert.dim):
        raise DomainError(f"rho has shape {rho.shape}, expected dim {cfg.hilbert.dim}")
    h = hamiltonian(t, cfg)
    out = -1j / HBAR_MEV_PS * (h @ rho - rho @ h)
    for _, L in jump_operators(cfg):
        LdL = L.conj().T @ L
        out += L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)
    return out


# -- compiled generator ------------------------------------------------------


@dataclass
class _Generator:
    hdiag: np.ndarray
    lam: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    coef: np.ndarray
    ckind: np.ndarray
    cpar: np.ndarray
    jptr: np.ndarray
    jrow: np.ndarray
    jcol: np.ndarray
    jval: np.ndarray
    span: float = field(default=0.0)


def _compile(cfg):
    terms = _terms(cfg)
    static = terms[0][0]
    hdiag = np.real(np.diag(static)).copy()
    rows, cols, vals, coef = [], [], [], []
    ckind, cpar = [0], [(0.0, 1.0, 0.0)]
    off = static - np.diag(np.diag(static))
    r, c = np.nonzero(off)
    rows += list(r)
    cols += list(c)
    vals += list(off[r, c])
    coef += [0] * len(r)
    for m, spec in terms[1:]:
        if np.any(np.diag(m) != 0):
            raise DomainError("time-dependent terms must be off-diagonal")
        k = len(ckind)
        if spec[0] == "gauss":
            ckind.append(1)
            cpar.append((spec[1], spec[2], spec[3]))
        else:
            ckind.append(2)
            cpar.append((spec[1], 0.0, 0.0))
        r, c = np.nonzero(m)
        rows += list(r)
        cols += list(c)
        vals += list(m[r, c])
        coef += [k] * len(r)
    jumps = jump_operators(cfg)
    lam = np.zeros(cfg.hilbert.dim)
    jptr, jrow, jcol, jval = [0], [], [], []
    for _, L in jumps:
        LdL = L.conj().T @ L
        if np.any(np.abs(LdL - np.diag(np.diag(LdL))) > 0):
            raise DomainError("jump operators must have diagonal L^dag L")
        lam += np.real(np.diag(LdL))
        r, c = np.nonzero(L)
        jrow += list(r)
        jcol += list(c)
        jval += list(L[r, c])
        jptr.append(len(jrow))
    gen = _Generator(
        hdiag=hdiag,
        lam=lam,
        rows=np.array(rows, dtype=np.int64),
        cols=np.array(cols, dtype=np.int64),
        vals=np.array(vals, dtype=np.complex128),
        coef=np.array(coef, dtype=np.int64),
        ckind=np.array(ckind, dtype=np.int64),
        cpar=np.array(cpar, dtype=np.float64).reshape(-1, 3),
        jptr=np.array(jptr, dtype=np.int64),
        jrow=np.array(jrow, dtype=np.int64),
        jcol=np.array(jcol, dtype=np.int64),
        jval=np.array(jval, dtype=np.complex128),
    )
    gen.span = spectral_span(cfg)
    return gen


def spectral_span(cfg):
    """Upper bound (meV) on eigenvalue differences of H(t), by Gershgorin."""
    bound = 0.0
    terms = _terms(cfg)
    diag = np.real(np.diag(terms[0][0]))
    radius = np.sum(np.abs(terms[0][0]), axis=1) - np.abs(diag)
    for m, spec in terms[1:]:
        amp = spec[1] if spec[0] == "gauss" else 1.0
        radius = radius + abs(amp) * np.sum(np.abs(m), axis=1)
    bound = float(np.max(diag + radius) - np.min(diag - radius))
    return bound


def default_dt(cfg, factor=0.5):
    """Step (ps) with (spectral span) * dt / hbar = factor."""
    span = spectral_span(cfg)
    if span <= 0:
        return 1.0
    return factor * HBAR_MEV_PS / span


def _steps(t0, t1, dt):
    if not dt > 0:
        raise DomainError("dt must be positive")
    if not t1 > t0:
        raise DomainError("need t1 > t0")
    n = max(1, int(math.ceil((t1 - t0) / dt - 1e-9)))
    return n, (t1 - t0) / n


def _checked_run(run, t0, t1, cfg, dt, record_every, check, tol):
    """Run at dt and dt/2 and compare; returns (fine output, dt used, difference).

    An automatic step (``dt=None``) is halved up to MAX_REFINEMENTS times
    before ConvergenceError is raised; an explicit step is tried once.
    """
    auto = dt is None
    if auto:
        dt = default_dt(cfg)
    attempts = MAX_REFINEMENTS + 1 if auto and check else 1
    for _ in range(attempts):
        n, h = _steps(t0, t1, dt)
        if not check:
            return run(n, h, record_every), h, float("nan")
        coarse = run(n, h, 0)[0]
        out = run(2 * n, h / 2, 2 * record_every)
        err = float(np.max(np.abs(out[0] - coarse)))
        if err <= tol:
            return out, h / 2, err
        dt = h / 2
    raise ConvergenceError(
        f"step halving changed the state by {err:.3e} > {tol:.1e} (dt={h:.4g} ps)"
    )


@dataclass
class Trajectory:
    """Result of a checked propagation."""

    final: np.ndarray
    times: np.ndarray
    snapshots: np.ndarray
    dt: float
    step_error: float  # max-norm difference between dt and dt/2 results
    max_weight: float = float("nan")  # state propagation: max plasmon population


def integrate(rho0, t0, t1, cfg, dt=None, record_every=0, check=True,
              tol=STEP_HALVING_TOL, full_output=False):
    """Propagate a density matrix with fixed-step RK4.

    With ``check`` the run is repeated at dt/2; a max-norm difference above
    ``tol`` raises ConvergenceError (an automatic step is refined first).  The dt/2 result is returned.  The final
    state must keep its trace to 1e-6 and stay Hermitian and PSD; violations
    raise InvariantError (no renormalization).
    """
    rho0 = np.ascontiguousarray(rho0, dtype=np.complex128)
    if rho0.shape != (cfg.hilbert.dim, cfg.hilbert.dim):
        raise DomainError(f"rho0 has shape {rho0.shape}, expected dim {cfg.hilbert.dim}")
    gen = _compile(cfg)

    def run(nsteps, h, rec):
        return _kernels.rk4_density(
            rho0, float(t0), h, nsteps, rec, gen.hdiag, gen.lam, gen.rows, gen.cols,
            gen.vals, gen.coef, gen.ckind, gen.cpar, gen.jptr, gen.jrow, gen.jcol,
            gen.jval, HBAR_MEV_PS,
        )

    (rho, snaps, times), dt_used, err = _checked_run(
        run, t0, t1, cfg, dt, record_every, check, tol)
    drift = abs(np.trace(rho) - np.trace(rho0))
    if drift > TRACE_DRIFT_TOL:
        raise InvariantError(f"trace drifted by {drift:.3e}")
    check_density_matrix(rho, trace_tol=None)
    if full_output:
        return Trajectory(rho, times, snaps, dt_used, err)
    return rho


def evolve_decay_free(psi0, t0, t1, cfg, dt=None, record_every=0, check=True,
                      tol=STEP_HALVING_TOL, full_output=False):
    """Schrodinger propagation with all decay switched off (same checks as integrate).

    ``full_output`` returns a Trajectory whose ``max_weight`` is the largest
    instantaneous plasmon number seen along the (finer) run.
    """
    cfg = cfg.without_decay()
    psi0 = np.ascontiguousarray(psi0, dtype=np.complex128)
    if psi0.shape != (cfg.hilbert.dim,):
        raise DomainError(f"psi0 has shape {psi0.shape}, expected ({cfg.hilbert.dim},)")
    gen = _compile(cfg)
    weights = np.real(np.diag(number_operator(cfg.hilbert))).copy()

    def run(nsteps, h, rec):
        return _kernels.rk4_state(
            psi0, float(t0), h, nsteps, rec, gen.hdiag, gen.rows, gen.cols, gen.vals,
            gen.coef, gen.ckind, gen.cpar, HBAR_MEV_PS, weights,
        )

    (psi, snaps, times, wmax), dt_used, err = _checked_run(
        run, t0, t1, cfg, dt, record_every, check, tol)
    drift = abs(np.vdot(psi, psi).real - np.vdot(psi0, psi0).real)
    if drift > NORM_TOL:
        raise InvariantError(f"norm drifted by {drift:.3e}")
    if full_output:
        return Trajectory(psi, times, snaps, dt_used, err, wmax)
    return psi


def populations(rho):
    return np.real(np.diag(rho)).copy()


def fock_truncation_change(psi0_levels, t0, t1, cfg, dt=None):
    """Largest change in final computational-state amplitudes when n_fock -> n_fock + 1.

    ``psi0_levels`` maps dot-level tuples to amplitudes (plasmon vacuum).
    """
    outs = []
    for nf in (cfg.hilbert.n_fock, cfg.hilbert.n_fock + 1):
        c = cfg.with_fock(nf)
        psi0 = sum(amp * c.hilbert.basis(lv) for lv, amp in psi0_levels.items())
        psi = evolve_decay_free(psi0, t0, t1, c, dt=dt, check=False)
        outs.append(np.array([psi[c.hilbert.index(lv)] for lv in psi0_levels]))
    return float(np.max(np.abs(outs[0] - outs[1])))

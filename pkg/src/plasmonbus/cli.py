"""Command-line front end.

Every output begins with the package version and the fully resolved
configuration: ``#`` comment lines for CSV, a ``"header"`` object for JSON.
Exit status is 0 on success, 1 on a computational failure, 2 on a usage or
configuration error.
"""

import argparse
import json
import math
import sys
import warnings

import numpy as np

from . import __version__, gates, network, selftest
from .config import CONFIG_ENV, parse_config
from .coupling import (
    QDParams,
    coupling_g,
    coupling_map,
    mode_volume_for_coupling,
    normalized_coupling_curve,
)
from .errors import ConfigError, PlasmonBusError
from .plasmon import MaterialParams, NanowireGeometry, dispersion_curve, mode_cutoff_report

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

COMMANDS = {
    "dispersion": "Dispersion curve omega/omega_p versus kR.\n"
                  "CSV columns: kR, omega_over_omega_p (m = 0), then "
                  "omega_over_omega_p_m<m> for any further m in sweep.m_list.",
    "coupling": "Single-point coupling strength (JSON): g_meV, C = k_par R, k_par_per_m, "
                "diagnostics, mode_volume_m3 (volume giving the same g).",
    "coupling-map": "Coupling over sweep.R_nm_list x sweep.d_nm_list.\n"
                    "CSV columns: R_nm, d_nm, g_meV (nan where no mode exists).",
    "gn-curve": "Normalized coupling g(R, qd.d_nm) / g(20 nm, 0) over sweep.gn_R_nm_list.\n"
                "CSV columns: R_nm, gN.",
    "gate": "One CPHASE gate at gate.deltaL_g, gate.Delta_g (units of g), JSON: phases, "
            "theta, fidelity, diagnostics.",
    "sweep": "Optimized fidelity over sweep.Gamma_list x sweep.Q_list.\n"
             "CSV columns: Gamma_per_ps, Q, fidelity, deltaL_meV, Delta_meV.",
    "optimize": "Optimized detunings at gate.Gamma_per_ps, gate.Q (JSON).",
    "nonlocal-cnot": "Nonlocal CNOT through a singlet pair on a seeded random input (JSON "
                     "transcript and verification).",
    "selftest": "Run the fast invariant checks; exit 0 when all pass.",
}


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _clean(o):
    """Recursively replace non-finite floats by strings so the JSON stays standard."""
    if isinstance(o, dict):
        return {str(k): _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    if isinstance(o, (float, np.floating)):
        v = float(o)
        return v if math.isfinite(v) else repr(v)
    if isinstance(o, complex):
        return [_clean(o.real), _clean(o.imag)]
    return o


def _header(cfg):
    return {"artifact": "plasmonbus", "version": __version__, "config": cfg.to_dict()}


def _csv_header(cfg):
    return [f"plasmonbus {__version__}"] + cfg.header_lines()


def _json(cfg, payload):
    body = {"header": _header(cfg)}
    body.update(payload)
    return json.dumps(_clean(body), indent=2, default=_json_default) + "\n"


def _materials(cfg):
    m = cfg.material
    mat = MaterialParams.from_permittivity(m.eps1, m.eps_s, complex(m.eps2_re, m.eps2_im),
                                           cfg.lambda0)
    return mat


def _qd(cfg, d=None):
    return QDParams(cfg.qd.f, cfg.E_tau, cfg.gap if d is None else d, cfg.qd.delta_pl_meV)


def _geometry(cfg, R=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return NanowireGeometry(cfg.radius if R is None else R, cfg.length)


def _g(cfg):
    return coupling_g(_geometry(cfg), _materials(cfg), _qd(cfg))


def _template(cfg):
    gc = cfg.gate
    return gates.GateTemplate(
        g=_g(cfg).g,
        mode_energy=_qd(cfg).mode_energy,
        Omega0_ratio=gc.Omega0_ratio,
        deltaL_bounds=gc.deltaL_bounds,
        Delta_bounds=gc.Delta_bounds,
        min_delta_pl=gc.min_delta_pl,
        coarse_points=gc.coarse_points,
        n_fock=cfg.dynamics.n_fock,
        decay_to=cfg.dynamics.decay_to,
        method=gc.method,
    )


def cmd_dispersion(cfg, args):
    s = cfg.sweep
    kR = np.logspace(math.log10(s.kR_min), math.log10(s.kR_max), s.kR_points)
    mat = _materials(cfg)
    cols = ["kR"] + ["omega_over_omega_p" if m == 0 else f"omega_over_omega_p_m{m}"
                     for m in s.m_list]
    lines = [f"# {h}" for h in _csv_header(cfg)] + [",".join(cols)]
    for x in kR:
        vals = [repr(float(x))]
        for m in s.m_list:
            try:
                vals.append(repr(dispersion_curve([x], mat, (m,))[0][1]))
            except PlasmonBusError:
                vals.append("nan")
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"


def cmd_coupling(cfg, args):
    res = _g(cfg)
    geom, mat = _geometry(cfg), _materials(cfg)
    cut = mode_cutoff_report(geom, mat, _qd(cfg).omega0, m_max=1)
    return _json(cfg, {
        "g_meV": res.g,
        "C": res.C,
        "k_par_per_m": res.k_par,
        "diagnostics": res.diagnostics,
        "mode_volume_m3": mode_volume_for_coupling(cfg.qd.f, res.g, cfg.material.eps1),
        "mode_cutoff": [{"m": m, "propagating": bool(p)} for m, p in cut],
    })


def cmd_coupling_map(cfg, args):
    s = cfg.sweep
    grid = coupling_map([r * 1e-9 for r in s.R_nm_list], [d * 1e-9 for d in s.d_nm_list],
                        cfg.length, _materials(cfg), _qd(cfg))
    return grid.to_csv(
        ["R_nm", "d_nm", "g_meV"],
        lambda i, j, x, y: [float(s.R_nm_list[i]), float(s.d_nm_list[j]),
                            float(grid.values[i, j])],
        _csv_header(cfg),
    )


def cmd_gn_curve(cfg, args):
    R = [r * 1e-9 for r in cfg.sweep.gn_R_nm_list]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        curve = normalized_coupling_curve(R, cfg.gap, cfg.length, _materials(cfg), _qd(cfg))
    lines = [f"# {h}" for h in _csv_header(cfg)] + ["R_nm,gN"]
    lines += [f"{float(rn)!r},{gn!r}" for rn, (_, gn) in zip(cfg.sweep.gn_R_nm_list, curve)]
    return "\n".join(lines) + "\n"


def _gate_payload(res):
    d = dict(res.diagnostics)
    return {"phases": res.phases, "theta": res.theta, "theta_over_pi": res.theta / math.pi,
            "fidelity": res.fidelity, "diagnostics": d}


def cmd_gate(cfg, args):
    g = _g(cfg).g
    gc = cfg.gate
    sched = gates.GateSchedule.symmetric(
        g, gc.deltaL_g * g, gc.Delta_g * g, Omega0_ratio=gc.Omega0_ratio, Q=gc.Q,
        Gamma=gc.Gamma_per_ps, mode_energy=_qd(cfg).mode_energy,
        decay_to=cfg.dynamics.decay_to, n_fock=cfg.dynamics.n_fock,
    )
    dt = cfg.dynamics.dt_ps or None
    res = gates.cphase_fidelity(sched, method=gc.method, frame=cfg.dynamics.frame, dt=dt)
    payload = {"g_meV": g, "deltaL_meV": sched.delta_L[0], "Delta_meV": sched.Delta,
               "Omega0_meV": sched.pulses[0].Omega0, "tau_ps": sched.pulses[0].tau,
               "phase_quadrature": gates.gate_phase_quadrature(sched)}
    payload.update(_gate_payload(res))
    return _json(cfg, payload)


def cmd_optimize(cfg, args):
    tpl = _template(cfg)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = gates.optimize_detunings(cfg.gate.Gamma_per_ps, cfg.gate.Q, tpl)
    msgs = [str(w.message) for w in caught]
    for m in msgs:
        print(f"warning: {m}", file=sys.stderr)
    payload = {
        "g_meV": tpl.g,
        "Gamma_per_ps": cfg.gate.Gamma_per_ps,
        "Q": cfg.gate.Q,
        "deltaL_meV": res.delta_L,
        "Delta_meV": res.Delta,
        "fidelity": res.fidelity,
        "evaluations": res.evaluations,
        "on_boundary": res.on_boundary,
        "warnings": msgs,
        "gate": _gate_payload(res.result),
    }
    return _json(cfg, payload)


def cmd_sweep(cfg, args):
    s = cfg.sweep
    grid = gates.fidelity_sweep(s.Gamma_list, s.Q_list, _template(cfg), workers=args.threads)
    report = gates.monotonicity_report(grid)
    print("monotonicity: " + json.dumps({k: report[k] for k in
                                         ("gamma_nonincreasing", "q_nondecreasing",
                                          "corner_is_max", "complete")}), file=sys.stderr)

    def row(i, j, x, y):
        rec = grid.records.get((i, j), {})
        return [float(x), float(y), float(grid.values[i, j]),
                float(rec.get("delta_L", float("nan"))), float(rec.get("Delta", float("nan")))]

    return grid.to_csv(["Gamma_per_ps", "Q", "fidelity", "deltaL_meV", "Delta_meV"], row,
                       _csv_header(cfg))


def cmd_nonlocal_cnot(cfg, args):
    rng = np.random.default_rng(cfg.seed)
    ab = network.random_state(rng, 2)
    reg = network.QubitRegister(4, np.kron(ab, [1, 0, 0, 0]), ("A", "B", "ti", "tj"))
    reg = network.prepare_epr(reg, "ti", "tj")
    forced = None
    if args.forced:
        try:
            forced = tuple(int(b) for b in args.forced.split(","))
        except ValueError:
            raise ConfigError(f"--forced expects 'm1,m2', got {args.forced!r}") from None
        if len(forced) != 2:
            raise ConfigError(f"--forced expects 'm1,m2', got {args.forced!r}")
    _, tr = network.nonlocal_cnot(reg, "A", "B", "ti", "tj", rng=rng, forced=forced)
    payload = {"input_AB": [[complex(a).real, complex(a).imag] for a in ab],
               "transcript": tr.to_dict(),
               "verdict": "pass" if tr.verification["passed"] else "fail"}
    if not tr.verification["passed"]:
        raise PlasmonBusError("nonlocal CNOT verification failed")
    return _json(cfg, payload)


def cmd_selftest(cfg, args):
    results = selftest.run_selftest()
    lines = [f"{'PASS' if ok else 'FAIL'}  {name}: {detail}" for name, ok, detail in results]
    text = "\n".join(lines) + "\n"
    if not all(ok for _, ok, _ in results):
        sys.stdout.write(text)
        raise PlasmonBusError("selftest failed")
    return text


HANDLERS = {
    "dispersion": cmd_dispersion,
    "coupling": cmd_coupling,
    "coupling-map": cmd_coupling_map,
    "gn-curve": cmd_gn_curve,
    "gate": cmd_gate,
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
    "nonlocal-cnot": cmd_nonlocal_cnot,
    "selftest": cmd_selftest,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="plasmonbus",
        description="Plasmonic quantum-bus simulations: dispersion, coupling, gates, network.",
        epilog=f"Configuration: dotted 'section.key = value' file via --config or ${CONFIG_ENV}; "
               "--set key=value overrides (repeatable).",
    )
    parser.add_argument("--version", action="version", version=f"plasmonbus {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="configuration file (default: $%s)" % CONFIG_ENV)
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a configuration key, e.g. geometry.R_nm=25")
    common.add_argument("-o", "--output", help="output file (default: output.path or stdout)")
    common.add_argument("--threads", type=int, default=1,
                        help="maximum number of worker processes (sweep)")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name, text in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=text.split("\n")[0], description=text,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        if name == "nonlocal-cnot":
            p.add_argument("--forced", help="force measurement outcomes, e.g. 0,1")
    return parser


def run_subcommand(name, cfg, args=None):
    """Run one command and return its text output."""
    if name not in HANDLERS:
        raise ConfigError(f"unknown subcommand {name!r}")
    if args is None:
        args = argparse.Namespace(threads=1, forced=None)
    return HANDLERS[name](cfg, args)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = parse_config(args.config, args.set)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        text = run_subcommand(args.command, cfg, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PlasmonBusError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    path = args.output or cfg.output.path
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

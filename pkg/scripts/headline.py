"""Print the headline numbers at the default configuration."""

import math
import warnings

from _common import parser, setup
from plasmonbus import gates
from plasmonbus.cli import _g, _qd, _template
from plasmonbus.errors import BoundaryOptimumWarning


def main():
    args = parser(__doc__).parse_args()
    cfg = setup(args)
    res = _g(cfg)
    print(f"g           = {res.g:.6f} meV  (C = k_par R = {res.C:.6f})")
    g = res.g
    gc = cfg.gate
    sched = gates.GateSchedule.symmetric(g, gc.deltaL_g * g, gc.Delta_g * g,
                                         Omega0_ratio=gc.Omega0_ratio,
                                         mode_energy=_qd(cfg).mode_energy)
    ph = gates.extract_phases(sched)
    print(f"theta / pi  = {ph.theta / math.pi:.5f}  at delta_L = {gc.deltaL_g:g} g, "
          f"Delta = {gc.Delta_g:g} g, tau = {sched.pulses[0].tau:.1f} ps")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryOptimumWarning)
        opt = gates.optimize_detunings(gc.Gamma_per_ps, gc.Q, _template(cfg))
    print(f"F*          = {opt.fidelity:.5f}  at Gamma = {gc.Gamma_per_ps:g} /ps, Q = {gc.Q:g} "
          f"(delta_L = {opt.delta_L / g:.2f} g, Delta = {opt.Delta / g:.2f} g, "
          f"boundary: {opt.on_boundary})")


if __name__ == "__main__":
    main()

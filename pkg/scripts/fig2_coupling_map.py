"""Coupling strength g over nanowire radius R and dot gap d (L = 10 um)."""

import os

import matplotlib.pyplot as plt
import numpy as np

from _common import parser, read_csv, setup, write
from plasmonbus.cli import run_subcommand


def main():
    p = parser(__doc__)
    p.add_argument("--fine", action="store_true", help="use a 40 x 41 grid")
    args = p.parse_args()
    if args.fine:
        args.set += ["sweep.R_nm_list=" + ", ".join(f"{r:g}" for r in np.linspace(10, 100, 40)),
                     "sweep.d_nm_list=" + ", ".join(f"{d:g}" for d in np.linspace(0, 50, 41))]
    cfg = setup(args)
    text = run_subcommand("coupling-map", cfg)
    write(os.path.join(args.out, "fig2_coupling_map.csv"), text)

    rows = read_csv(text)
    R = np.unique(rows["R_nm"])
    d = np.unique(rows["d_nm"])
    g = rows["g_meV"].reshape(R.size, d.size)
    fig, ax = plt.subplots(figsize=(5, 4))
    cs = ax.contourf(R, d, g.T, levels=20, cmap="viridis")
    ax.contour(R, d, g.T, levels=[0.49], colors="w", linewidths=1)
    fig.colorbar(cs, label="g (meV)")
    ax.set_xlabel("R (nm)")
    ax.set_ylabel("d (nm)")
    ax.set_title(f"L = {cfg.geometry.L_um:g} um, f = {cfg.qd.f:g}")
    fig.tight_layout()
    path = os.path.join(args.out, "fig2_coupling_map.png")
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()

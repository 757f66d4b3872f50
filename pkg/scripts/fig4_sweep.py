"""Optimized CPHASE fidelity over trion decay rate Gamma and plasmon quality factor Q."""

import argparse
import os

import matplotlib.pyplot as plt
import numpy as np

from _common import parser, read_csv, setup, write
from plasmonbus.cli import run_subcommand


def main():
    p = parser(__doc__)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = p.parse_args()
    cfg = setup(args)
    text = run_subcommand("sweep", cfg, argparse.Namespace(threads=args.workers, forced=None))
    write(os.path.join(args.out, "fig4_sweep.csv"), text)

    rows = read_csv(text)
    G = np.unique(rows["Gamma_per_ps"])
    Q = np.unique(rows["Q"])
    F = rows["fidelity"].reshape(G.size, Q.size)
    fig, ax = plt.subplots(figsize=(5, 4))
    cs = ax.contourf(G, Q, F.T, levels=15, cmap="magma")
    fig.colorbar(cs, label="F")
    ax.set_xlabel("Gamma (1/ps)")
    ax.set_ylabel("Q")
    ax.set_yscale("log")
    fig.tight_layout()
    path = os.path.join(args.out, "fig4_sweep.png")
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()

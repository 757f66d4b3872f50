"""Normalized coupling g_N = g(R, d) / g(20 nm, 0) against R for d = 0 and 30 nm."""

import os

import matplotlib.pyplot as plt

from _common import parser, read_csv, setup, write
from plasmonbus.cli import run_subcommand
from plasmonbus.config import parse_config


def main():
    p = parser(__doc__)
    p.add_argument("--gaps", default="0,30", help="comma separated gaps in nm")
    args = p.parse_args()
    setup(args)
    fig, ax = plt.subplots(figsize=(5, 4))
    for d in (float(x) for x in args.gaps.split(",")):
        cfg = parse_config(args.config, args.set + [f"qd.d_nm={d}"])
        text = run_subcommand("gn-curve", cfg)
        write(os.path.join(args.out, f"fig3_gn_d{d:g}nm.csv"), text)
        data = read_csv(text)
        ax.plot(data["R_nm"], data["gN"], "o-", ms=3, label=f"d = {d:g} nm")
    ax.set_xlabel("R (nm)")
    ax.set_ylabel("g_N")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(args.out, "fig3_gn_curves.png")
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()

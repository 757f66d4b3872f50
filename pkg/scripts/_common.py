"""Shared helpers for the figure scripts."""

import argparse
import csv
import os

import matplotlib

matplotlib.use("Agg")

import numpy as np  # noqa: E402

from plasmonbus.config import parse_config  # noqa: E402


def parser(description):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--config", help="run configuration file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    return p


def setup(args):
    os.makedirs(args.out, exist_ok=True)
    return parse_config(args.config, args.set)


def write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {path}")


def read_csv(text):
    """{column: float array} from CLI CSV output, skipping '#' header lines."""
    rows = list(csv.reader(ln for ln in text.splitlines() if ln and not ln.startswith("#")))
    cols = rows[0]
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    return {c: data[:, k] for k, c in enumerate(cols)}

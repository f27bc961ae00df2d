"""Normalized single-plaquette spectrum E / sqrt(E_J^2 + Delta^2) against E_J / Delta."""

import argparse
from pathlib import Path

import numpy as np

from kagome_jja.coupling import finite_kernel
from kagome_jja.io import write_csv
from kagome_jja.lattice import single_plaquette
from kagome_jja.quantum import spectrum_vs_ratio


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--output", type=Path, default=Path("results/fig7"))
    ap.add_argument("--max-ratio", type=float, default=40.0)
    ap.add_argument("--points", type=int, default=161)
    args = ap.parse_args()
    ratios = np.linspace(0.0, args.max_ratio, args.points)
    sweep = spectrum_vs_ratio(finite_kernel(single_plaquette()), ratios)
    write_csv(args.output / "spectrum.csv", ["ratio", "index", "energy"], [(r, i, float(e)) for r, w in sweep for i, e in enumerate(w)])
    print(f"ratio 0: levels {sweep[0][1].min():.1f} .. {sweep[0][1].max():.1f}")


if __name__ == "__main__":
    main()

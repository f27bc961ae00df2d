"""Colour-map data for the cross couplings around a reference tuple.

Writes the closed form over a window of offsets, the same window from a large
open finite lattice (bulk reference site) and the three decay rays.
"""

import argparse
from pathlib import Path

import numpy as np

from kagome_jja.coupling import CROSS_SCALE, closed_form_table, finite_kernel, infinite_kernel_entry, kernel_decay_profile, write_profile_csv
from kagome_jja.io import write_csv
from kagome_jja.lattice import PLUS, build_lattice


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--output", type=Path, default=Path("results/fig5"))
    ap.add_argument("--window", type=int, default=10)
    ap.add_argument("--extent", type=int, default=30)
    args = ap.parse_args()
    w = args.window
    table = closed_form_table(w)
    offs = range(-w, w + 1)
    # G^{+-}_{lm;00}: + triangle at the origin, - triangle at offset; G^{-+}_{00;lm} is its mirror
    rows = [(dl, dm, table[dl + w, dm + w], infinite_kernel_entry(-dl, -dm)) for dl in offs for dm in offs]
    write_csv(args.output / "closed_form_map.csv", ["dl", "dm", "g_pm", "g_mp"], rows)

    lat = build_lattice(args.extent, args.extent)
    kernel = finite_kernel(lat)
    c = args.extent // 2
    a = int(np.flatnonzero(lat.plus_sites == lat.site_index[(c, c, PLUS)])[0])
    finite_rows = []
    for b, site in enumerate(lat.minus_sites):
        l, m, _ = lat.triangles[site]
        dl, dm = l - c, m - c
        if abs(dl) <= w and abs(dm) <= w:
            finite_rows.append((dl, dm, kernel.g_pm[a, b], CROSS_SCALE * infinite_kernel_entry(dl, dm)))
    write_csv(args.output / "finite_map.csv", ["dl", "dm", "finite", "scaled_closed_form"], finite_rows)
    dev = max(abs(r[2] - r[3]) for r in finite_rows)
    print(f"max |finite - closed form/2| in window: {dev:.3e}")

    profiles = {d: kernel_decay_profile(direction=d, max_range=60) for d in ("horizontal", "vertical", "diagonal")}
    write_profile_csv(args.output / "profiles.csv", profiles)


if __name__ == "__main__":
    main()

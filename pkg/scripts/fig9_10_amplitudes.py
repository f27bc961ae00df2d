"""Ground and first excited state amplitudes f_n and probabilities |f_n|^2 at Delta = E_J / 20."""

import argparse
from pathlib import Path

from kagome_jja.classical import SpinConfig, ground_census
from kagome_jja.coupling import finite_kernel
from kagome_jja.io import write_csv, write_json
from kagome_jja.lattice import single_plaquette
from kagome_jja.quantum import build_hamiltonian, diagonalize, ground_overlaps


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--output", type=Path, default=Path("results/fig9_10"))
    ap.add_argument("--ratio", type=float, default=20.0)
    args = ap.parse_args()
    kernel = finite_kernel(single_plaquette())
    spec = diagonalize(build_hamiltonian(kernel, 1.0, 1.0 / args.ratio))
    _, census = ground_census(kernel)
    ground = ground_overlaps(spec, census)
    excited = ground_overlaps(spec.excited_vector, census)
    in_census = set(int(i) for i in ground.census_indices)
    rows = [
        (n, SpinConfig(n, 6).bitstring(), int(n in in_census), g, gp, e, ep)
        for (n, g, gp), (_, e, ep) in zip(ground.rows(), excited.rows())
    ]
    write_csv(args.output / "amplitudes.csv", ["n", "bits", "in_census", "f_ground", "p_ground", "f_excited", "p_excited"], rows)
    write_json(args.output / "census.json", {"census_weight_ground": ground.census_weight, "census_weight_excited": excited.census_weight})
    print(f"census weight: ground {ground.census_weight:.4f}, first excited {excited.census_weight:.4f}")


if __name__ == "__main__":
    main()

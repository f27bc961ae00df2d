"""Command-line front end emitting figure data as CSV/JSON.

Resolution order for every setting: built-in defaults < --config file < flags.
Every run writes manifest.json with the resolved configuration.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import platform
import sys
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .classical import energy_table, enumerate_states, magnetization_sums, m_bar_from_table, ground_census
from .core import ModelParams, triangle_physics, tunneling_amplitude
from .coupling import (
    Direction,
    closed_form_kernel,
    closed_form_table,
    finite_kernel,
    fourier_oracle_table,
    infinite_kernel_entry,
    kernel_decay_profile,
    write_profile_csv,
)
from .errors import CapabilityError, NumericalError
from .io import write_csv, write_json
from .lattice import Boundary, LatticeSpec, build_lattice, build_plaquettes
from .montecarlo import QuenchSchedule, quench_run, write_series, write_snapshot
from .quantum import band_gap_ratio, ground_overlaps, normalized_couplings, solve_at_ratio, spectrum_vs_ratio

COMMANDS = ("triangle", "kernel", "classical", "mc", "ed")
FORMATS = ("csv", "json")

EXIT_OK, EXIT_USAGE, EXIT_CAPABILITY, EXIT_NUMERICAL = 0, 2, 3, 4

LATTICE_KEYS = ("plaquette", "plaquettes", "l_extent", "m_extent", "boundary")
PARAM_KEYS = tuple(f.name for f in fields(ModelParams))
SCHEDULE_KEYS = tuple(f.name for f in fields(QuenchSchedule))
OPTION_DEFAULTS = {
    "triangle": {},
    "kernel": {"source": "closed", "profile": ["horizontal", "vertical", "diagonal"], "range": 20, "grid": 1024, "map": 0},
    "classical": {"t_grid": "0.05:3:60"},
    "mc": {},
    "ed": {"ratio": 20.0, "ratios": "0:40:81", "band": 14},
}
LATTICE_DEFAULTS = {
    "triangle": None,
    "kernel": None,
    "classical": {"plaquette": True},
    "mc": {"l_extent": 30, "m_extent": 30, "boundary": "open"},
    "ed": {"plaquette": True},
}
TOP_KEYS = ("command", "lattice", "params", "schedule", "seeds", "output_dir", "formats", "options")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeConfig:
    plaquette: bool = False
    plaquettes: tuple[int, int] | None = None
    l_extent: int | None = None
    m_extent: int | None = None
    boundary: str = "open"

    def build(self) -> LatticeSpec:
        if self.plaquette:
            return build_plaquettes(1, 1)
        if self.plaquettes is not None:
            return build_plaquettes(*self.plaquettes)
        if self.l_extent is None or self.m_extent is None:
            raise UsageError("lattice: give --plaquette, --plaquettes AxB or --extent")
        return build_lattice(self.l_extent, self.m_extent, Boundary(self.boundary))

    def to_dict(self) -> dict:
        return {
            "plaquette": self.plaquette,
            "plaquettes": list(self.plaquettes) if self.plaquettes else None,
            "l_extent": self.l_extent,
            "m_extent": self.m_extent,
            "boundary": self.boundary,
        }


@dataclass(frozen=True)
class RunConfig:
    command: str
    lattice: LatticeConfig | None
    params: ModelParams
    schedule: QuenchSchedule | None
    seeds: tuple[int, ...]
    output_dir: Path
    formats: tuple[str, ...]
    options: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "lattice": self.lattice.to_dict() if self.lattice else None,
            "params": {k: getattr(self.params, k) for k in PARAM_KEYS},
            "schedule": self.schedule.to_dict() if self.schedule else None,
            "seeds": list(self.seeds),
            "output_dir": str(self.output_dir),
            "formats": list(self.formats),
            "options": self.options,
        }


def parse_grid(text: str, key: str) -> np.ndarray:
    """``a:b:n`` -> n evenly spaced points from a to b inclusive."""
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except (ValueError, AttributeError):
        raise UsageError(f"{key}: expected start:stop:count, got {text!r}") from None
    if n < 1:
        raise UsageError(f"{key}: count must be >= 1")
    return np.linspace(a, b, n)


def _pair(text: str) -> list[int]:
    try:
        a, b = text.lower().split("x")
        return [int(a), int(b)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected AxB, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kagome-jja", description="Frustrated Kagome Josephson array as a long-range Ising model")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float)
    common.add_argument("--e-j", dest="e_j", type=float)
    common.add_argument("--e-c", dest="e_c", type=float)
    common.add_argument("--temperature", type=float)
    common.add_argument("--delta", type=float)
    common.add_argument("--output", dest="output_dir")
    common.add_argument("--format", dest="formats", help="comma list from csv,json")
    common.add_argument("--seed", dest="seeds", type=int, action="append")
    common.add_argument("--config", type=Path)

    lat = argparse.ArgumentParser(add_help=False)
    lat.add_argument("--plaquette", action="store_true", default=None)
    lat.add_argument("--plaquettes", type=_pair, metavar="AxB")
    lat.add_argument("--extent", type=int, help="square lattice of extent x extent tuples")
    lat.add_argument("--l-extent", dest="l_extent", type=int)
    lat.add_argument("--m-extent", dest="m_extent", type=int)
    lat.add_argument("--boundary", choices=[b.value for b in Boundary])

    sub.add_parser("triangle", parents=[common], help="single-triangle quantities")

    k = sub.add_parser("kernel", parents=[common, lat], help="coupling kernel and decay profiles")
    k.add_argument("--source", choices=["closed", "finite", "oracle"])
    k.add_argument("--profile", action="append", choices=[d.value for d in Direction] + ["all"])
    k.add_argument("--range", type=int)
    k.add_argument("--grid", type=int)
    k.add_argument("--map", type=int, help="write the offset map for |dl|, |dm| <= MAP")

    c = sub.add_parser("classical", parents=[common, lat], help="exact enumeration")
    c.add_argument("--t-grid", dest="t_grid")

    m = sub.add_parser("mc", parents=[common, lat], help="Metropolis quench")
    m.add_argument("--t-end", dest="t_end", type=float)
    m.add_argument("--t-start", dest="t_start", type=float)
    m.add_argument("--cooling", dest="cooling_factor", type=float)
    m.add_argument("--sweeps-per-step", dest="sweeps_per_step", type=int)
    m.add_argument("--equilibration", dest="equilibration_sweeps", type=int)
    m.add_argument("--snapshot-every", dest="snapshot_every", type=int)

    e = sub.add_parser("ed", parents=[common, lat], help="exact diagonalization")
    e.add_argument("--ratio", type=float)
    e.add_argument("--ratios")
    e.add_argument("--band", type=int)
    return parser


def _check_keys(section: str, data: dict, allowed) -> None:
    for key in data:
        if key not in allowed:
            raise UsageError(f"unknown config key: {section + '.' if section else ''}{key}")


def _merge(base: dict, update: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _defaults(command: str) -> dict:
    return {
        "command": command,
        "lattice": copy.deepcopy(LATTICE_DEFAULTS[command]),
        "params": {},
        "schedule": {"t_end": 0.12} if command == "mc" else None,
        "seeds": [0],
        "output_dir": "out",
        "formats": list(FORMATS),
        "options": copy.deepcopy(OPTION_DEFAULTS[command]),
    }


def _flag_overrides(ns: argparse.Namespace) -> dict:
    v = vars(ns)
    over: dict = {}
    params = {k: v[k] for k in PARAM_KEYS if v.get(k) is not None}
    if params:
        over["params"] = params
    lattice = {}
    if v.get("extent") is not None:
        lattice.update(l_extent=v["extent"], m_extent=v["extent"], plaquette=False, plaquettes=None)
    for key in ("l_extent", "m_extent", "boundary"):
        if v.get(key) is not None:
            lattice.update({key: v[key], "plaquette": False, "plaquettes": None})
    if v.get("plaquettes") is not None:
        lattice.update(plaquettes=v["plaquettes"], plaquette=False)
    if v.get("plaquette"):
        lattice.update(plaquette=True, plaquettes=None)
    if lattice:
        over["lattice"] = lattice
    schedule = {k: v[k] for k in SCHEDULE_KEYS if v.get(k) is not None}
    if schedule:
        over["schedule"] = schedule
    if v.get("seeds"):
        over["seeds"] = v["seeds"]
    if v.get("output_dir") is not None:
        over["output_dir"] = v["output_dir"]
    if v.get("formats") is not None:
        over["formats"] = [f.strip() for f in v["formats"].split(",") if f.strip()]
    options = {k: v[k] for k in OPTION_DEFAULTS[ns.command] if v.get(k) is not None}
    if "profile" in options and "all" in options["profile"]:
        options["profile"] = [d.value for d in Direction]
    if options:
        over["options"] = options
    return over


def _resolve(data: dict) -> RunConfig:
    _check_keys("", data, TOP_KEYS)
    command = data["command"]
    if command not in COMMANDS:
        raise UsageError(f"command: unknown command {command!r}")
    lattice = None
    if data.get("lattice") is not None:
        lat = dict(data["lattice"])
        _check_keys("lattice", lat, LATTICE_KEYS)
        if lat.get("plaquettes") is not None:
            lat["plaquettes"] = tuple(int(x) for x in lat["plaquettes"])
        if lat.get("boundary") not in (None, *[b.value for b in Boundary]):
            raise UsageError(f"lattice.boundary: unknown boundary {lat['boundary']!r}")
        lattice = LatticeConfig(**{k: v for k, v in lat.items() if v is not None})
    params = data.get("params") or {}
    _check_keys("params", params, PARAM_KEYS)
    try:
        model = ModelParams(**params)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"params: {exc}") from None
    schedule = None
    if data.get("schedule") is not None:
        _check_keys("schedule", data["schedule"], SCHEDULE_KEYS)
        try:
            schedule = QuenchSchedule(**data["schedule"])
        except (TypeError, ValueError) as exc:
            raise UsageError(f"schedule: {exc}") from None
    formats = tuple(data.get("formats") or FORMATS)
    for f in formats:
        if f not in FORMATS:
            raise UsageError(f"formats: unsupported format {f!r}")
    options = data.get("options") or {}
    _check_keys("options", options, OPTION_DEFAULTS[command])
    seeds = data.get("seeds") or [0]
    if not all(isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in seeds):
        raise UsageError("seeds: expected non-negative integers")
    return RunConfig(command, lattice, model, schedule, tuple(seeds), Path(data["output_dir"]), formats, options)


def parse_config(argv: list[str]) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command is None:
        parser.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)
    data = _defaults(ns.command)
    if ns.config is not None:
        try:
            file_data = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"config: cannot read {ns.config}: {exc}") from None
        if not isinstance(file_data, dict):
            raise UsageError("config: top level must be an object")
        _check_keys("", file_data, TOP_KEYS)
        if file_data.get("command", ns.command) != ns.command:
            raise UsageError(f"command: config file says {file_data['command']!r}, command line says {ns.command!r}")
        for section, allowed in (("lattice", LATTICE_KEYS), ("params", PARAM_KEYS), ("schedule", SCHEDULE_KEYS), ("options", OPTION_DEFAULTS[ns.command])):
            if isinstance(file_data.get(section), dict):
                _check_keys(section, file_data[section], allowed)
        data = _merge(data, file_data)
    data = _merge(data, _flag_overrides(ns))
    return _resolve(data)


def _kernel_for(lattice: LatticeSpec):
    return finite_kernel(lattice)


def _manifest(cfg: RunConfig, lattice: LatticeSpec | None, outputs: list[Path], extra: dict | None = None) -> Path:
    doc = {
        "config": cfg.to_dict(),
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "outputs": sorted(p.name for p in outputs),
    }
    if lattice is not None:
        doc["lattice"] = {
            "digest": lattice.digest(),
            "n_sites": lattice.n_sites,
            "n_hexagons": lattice.n_hexagons,
            "note": "extents count (l, m) tuples, each holding one + and one - triangle",
        }
    if extra:
        doc.update(extra)
    return write_json(cfg.output_dir / "manifest.json", doc)


def run_triangle(cfg: RunConfig) -> tuple[list[Path], LatticeSpec | None, dict]:
    phys = triangle_physics(cfg.params)
    result = {
        "alpha": phys.alpha,
        "frustration": cfg.params.frustration,
        "u0": phys.u0,
        "barrier": phys.barrier,
        "gamma": phys.gamma,
        "omega": phys.omega,
        "delta_estimate": tunneling_amplitude(phys),
    }
    out = []
    if "json" in cfg.formats:
        out.append(write_json(cfg.output_dir / "triangle.json", result))
    if "csv" in cfg.formats:
        out.append(write_csv(cfg.output_dir / "triangle.csv", ["quantity", "value"], sorted(result.items())))
    return out, None, {}


def run_kernel(cfg: RunConfig) -> tuple[list[Path], LatticeSpec | None, dict]:
    opt = cfg.options
    out: list[Path] = []
    lattice = None
    source = opt["source"]
    if source == "oracle":
        size = max(int(opt["range"]), int(opt["map"]) or 0)
        table = fourier_oracle_table(size, int(opt["grid"]))

        def fn(dl, dm):
            return table[dl + size, dm + size] if abs(dl) <= size and abs(dm) <= size else float("nan")
    else:
        fn = infinite_kernel_entry
    profiles = {d: kernel_decay_profile(fn, d, int(opt["range"])) for d in opt["profile"]}
    if "csv" in cfg.formats:
        out.append(write_profile_csv(cfg.output_dir / "profile.csv", profiles))
        if opt["map"]:
            size = int(opt["map"])
            table = closed_form_table(size) if source != "oracle" else fourier_oracle_table(size, int(opt["grid"]))
            rows = [
                (dl, dm, float(table[dl + size, dm + size]))
                for dl in range(-size, size + 1)
                for dm in range(-size, size + 1)
            ]
            out.append(write_csv(cfg.output_dir / "kernel_map.csv", ["dl", "dm", "value"], rows))
    if cfg.lattice is not None:
        lattice = cfg.lattice.build()
        kernel = closed_form_kernel(lattice) if source == "closed" else finite_kernel(lattice)
        npz, sidecar = kernel.save(cfg.output_dir / "kernel", lattice)
        out += [npz, sidecar]
    return out, lattice, {}


def run_classical(cfg: RunConfig) -> tuple[list[Path], LatticeSpec | None, dict]:
    lattice = cfg.lattice.build()
    kernel = _kernel_for(lattice)
    temps = parse_grid(cfg.options["t_grid"], "options.t_grid")
    if np.any(temps <= 0):
        raise UsageError("options.t_grid: temperatures must be positive")
    energies = energy_table(kernel)
    n = lattice.n_sites
    msum = magnetization_sums(n)
    curve = [(float(t), m_bar_from_table(energies, msum, n, float(t))) for t in temps]
    degeneracy, patterns = ground_census(kernel)
    res = enumerate_states(kernel, cfg.params.temperature)
    out = []
    if "csv" in cfg.formats:
        out.append(write_csv(cfg.output_dir / "m_bar.csv", ["temperature", "m_bar"], curve))
        out.append(write_csv(cfg.output_dir / "p_m.csv", ["M", "P_M"], sorted(res.p_m.items())))
        out.append(
            write_csv(
                cfg.output_dir / "ground.csv",
                ["index", "bits", "M"],
                [(p.bits, p.bitstring(), p.magnetization) for p in patterns],
            )
        )
        out.append(
            write_csv(cfg.output_dir / "sites.csv", ["site", "l", "m", "sublattice"], [(i, *t) for i, t in enumerate(lattice.triangles)])
        )
    summary = {"n_sites": n, "degeneracy": degeneracy, "m_bar_high_t_reference": 1 / math.sqrt(n)}
    if "json" in cfg.formats:
        out.append(write_json(cfg.output_dir / "classical.json", summary))
    return out, lattice, {"summary": summary}


def run_mc(cfg: RunConfig) -> tuple[list[Path], LatticeSpec | None, dict]:
    lattice = cfg.lattice.build()
    kernel = _kernel_for(lattice)
    schedule = cfg.schedule
    out = []
    rows = []
    for seed in cfg.seeds:
        res = quench_run(lattice, kernel, schedule, seed)
        st = res.state
        rows.append((seed, schedule.t_end, st.energy, st.magnetization, res.series[-1][4], st.acceptance_rate))
        if "csv" in cfg.formats:
            out.append(write_series(cfg.output_dir / f"series_seed{seed}.csv", res.series))
            for sweep, t, spins in res.snapshots:
                out += write_snapshot(cfg.output_dir / f"snapshot_seed{seed}_sweep{sweep}", spins, lattice)
    if "csv" in cfg.formats:
        out.append(
            write_csv(
                cfg.output_dir / "summary.csv",
                ["seed", "t_end", "energy", "magnetization", "stripe_score", "acceptance"],
                rows,
            )
        )
    summary = {"median_stripe_score": float(np.median([r[4] for r in rows]))}
    if "json" in cfg.formats:
        out.append(write_json(cfg.output_dir / "mc.json", summary))
    return out, lattice, {"summary": summary}


def run_ed(cfg: RunConfig) -> tuple[list[Path], LatticeSpec | None, dict]:
    lattice = cfg.lattice.build()
    kernel = _kernel_for(lattice)
    energies = energy_table(kernel)
    opt = cfg.options
    ratio = float(opt["ratio"])
    band = int(opt["band"])
    spectrum = solve_at_ratio(kernel, ratio, energies)
    _, patterns = ground_census(kernel)
    ground = ground_overlaps(spectrum, patterns)
    excited = ground_overlaps(spectrum.excited_vector, patterns)
    gap, spread, quality = band_gap_ratio(spectrum.eigenvalues, band)
    e_j, delta = normalized_couplings(ratio)
    out = []
    if "csv" in cfg.formats:
        sweep = spectrum_vs_ratio(kernel, parse_grid(opt["ratios"], "options.ratios"))
        out.append(
            write_csv(
                cfg.output_dir / "spectrum_vs_ratio.csv",
                ["ratio", "index", "energy"],
                [(r, i, float(e)) for r, w in sweep for i, e in enumerate(w)],
            )
        )
        classical_sorted = np.sort(energies) * e_j
        out.append(
            write_csv(
                cfg.output_dir / "levels.csv",
                ["index", "classical", "quantum"],
                [(i, float(c), float(q)) for i, (c, q) in enumerate(zip(classical_sorted, spectrum.eigenvalues))],
            )
        )
        out.append(write_csv(cfg.output_dir / "ground_amplitudes.csv", ["n", "f_n", "prob"], ground.rows()))
        out.append(write_csv(cfg.output_dir / "excited_amplitudes.csv", ["n", "f_n", "prob"], excited.rows()))
    summary = {
        "ratio": ratio,
        "e_j": e_j,
        "delta": delta,
        "band_size": band,
        "band_gap": gap,
        "band_spread": spread,
        "gap_over_spread": quality,
        "census_weight_ground": ground.census_weight,
        "census_weight_excited": excited.census_weight,
        "census": [int(i) for i in ground.census_indices],
        "note": "diagonal includes same-sublattice kernel terms",
    }
    if "json" in cfg.formats:
        out.append(write_json(cfg.output_dir / "ed.json", summary))
    return out, lattice, {"summary": summary}


RUNNERS = {
    "triangle": run_triangle,
    "kernel": run_kernel,
    "classical": run_classical,
    "mc": run_mc,
    "ed": run_ed,
}


def run(cfg: RunConfig) -> int:
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    outputs, lattice, extra = RUNNERS[cfg.command](cfg)
    _manifest(cfg, lattice, outputs, extra)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapabilityError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        print("hint: use the mc command for lattices too large for enumeration or ED", file=sys.stderr)
        return EXIT_CAPABILITY
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

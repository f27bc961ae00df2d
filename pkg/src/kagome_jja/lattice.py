"""Tuple-indexed Kagome geometry and hexagon flux-quantization constraints.

The lattice is a rhombic tiling of tuples (l, m). Each tuple holds a
downward (+) and an upward (-) triangle. Hexagon (l, m) closes a loop through
six triangles with integer weights::

    +  triangles  (l-1, m): -2   (l, m-1): +1   (l, m): +1
    -  triangles  (l, m-1): -2   (l-1, m): +1   (l-1, m-1): +1

Sites are ordered row-major in (l, m) with + before -.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

PLUS = 1
MINUS = -1

Site = tuple[int, int, int]

# (dl, dm, sublattice, weight) relative to the hexagon index
HEXAGON_STENCIL: tuple[tuple[int, int, int, int], ...] = (
    (-1, 0, PLUS, -2),
    (0, -1, PLUS, 1),
    (0, 0, PLUS, 1),
    (0, -1, MINUS, -2),
    (-1, 0, MINUS, 1),
    (-1, -1, MINUS, 1),
)

_A1 = np.array([1.0, 0.0])
_A2 = np.array([0.5, math.sqrt(3.0) / 2.0])


class Boundary(str, enum.Enum):
    OPEN = "open"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class LatticeSpec:
    l_extent: int
    m_extent: int
    boundary: Boundary
    triangles: tuple[Site, ...]
    hexagons: tuple[tuple[int, int], ...]
    pruned: bool = False

    @property
    def n_sites(self) -> int:
        return len(self.triangles)

    @property
    def n_hexagons(self) -> int:
        return len(self.hexagons)

    @cached_property
    def site_index(self) -> dict[Site, int]:
        return {site: i for i, site in enumerate(self.triangles)}

    @cached_property
    def plus_sites(self) -> np.ndarray:
        return np.array([i for i, t in enumerate(self.triangles) if t[2] == PLUS], dtype=np.int64)

    @cached_property
    def minus_sites(self) -> np.ndarray:
        return np.array([i for i, t in enumerate(self.triangles) if t[2] == MINUS], dtype=np.int64)

    def wrap(self, l: int, m: int) -> tuple[int, int]:
        if self.boundary is Boundary.PERIODIC:
            return l % self.l_extent, m % self.m_extent
        return l, m

    def hexagon_members(self, hexagon: tuple[int, int]) -> list[tuple[Site, int]]:
        """(site, weight) pairs of one constraint loop; wrapped duplicates are merged."""
        l, m = hexagon
        merged: dict[Site, int] = {}
        for dl, dm, s, w in HEXAGON_STENCIL:
            site = (*self.wrap(l + dl, m + dm), s)
            merged[site] = merged.get(site, 0) + w
        return list(merged.items())

    def to_dict(self) -> dict:
        return {
            "l_extent": self.l_extent,
            "m_extent": self.m_extent,
            "boundary": self.boundary.value,
            "pruned": self.pruned,
            "triangles": [list(t) for t in self.triangles],
            "hexagons": [list(h) for h in self.hexagons],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "LatticeSpec":
        return cls(
            l_extent=int(data["l_extent"]),
            m_extent=int(data["m_extent"]),
            boundary=Boundary(data["boundary"]),
            triangles=tuple(tuple(int(v) for v in t) for t in data["triangles"]),
            hexagons=tuple(tuple(int(v) for v in h) for h in data["hexagons"]),
            pruned=bool(data.get("pruned", False)),
        )

    @classmethod
    def from_json(cls, text: str) -> "LatticeSpec":
        return cls.from_dict(json.loads(text))

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def _check_extent(name: str, value: int) -> None:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")


def _all_sites(l_extent: int, m_extent: int) -> tuple[Site, ...]:
    return tuple((l, m, s) for l in range(l_extent) for m in range(m_extent) for s in (PLUS, MINUS))


def build_lattice(l_extent: int, m_extent: int, boundary: Boundary | str = Boundary.OPEN) -> LatticeSpec:
    """Full rectangular block of tuples.

    Open boundaries keep only hexagons whose six triangles all exist, so every
    retained constraint is a closed loop. Periodic boundaries wrap indices.
    """
    _check_extent("l_extent", l_extent)
    _check_extent("m_extent", m_extent)
    boundary = Boundary(boundary)
    triangles = _all_sites(l_extent, m_extent)
    if boundary is Boundary.PERIODIC:
        hexagons = tuple((l, m) for l in range(l_extent) for m in range(m_extent))
    else:
        hexagons = tuple((l, m) for l in range(1, l_extent) for m in range(1, m_extent))
    return LatticeSpec(l_extent, m_extent, boundary, triangles, hexagons)


def build_plaquettes(l_count: int = 1, m_count: int = 1) -> LatticeSpec:
    """Grid of ``l_count x m_count`` hexagon plaquettes sharing triangles.

    Only triangles that belong to at least one retained hexagon are kept, so a
    single plaquette has exactly six sites and a grid of a x b plaquettes has
    2(a+1)(b+1) - 2.
    """
    _check_extent("l_count", l_count)
    _check_extent("m_count", m_count)
    full = build_lattice(l_count + 1, m_count + 1, Boundary.OPEN)
    used = {site for h in full.hexagons for site, _ in full.hexagon_members(h)}
    triangles = tuple(t for t in full.triangles if t in used)
    return LatticeSpec(full.l_extent, full.m_extent, Boundary.OPEN, triangles, full.hexagons, pruned=True)


def single_plaquette() -> LatticeSpec:
    return build_plaquettes(1, 1)


@dataclass(frozen=True)
class ConstraintMatrix:
    """Hexagon constraint weights split by sublattice.

    ``plus`` has one row per + triangle (in site order), ``minus`` one row per
    - triangle; columns follow ``LatticeSpec.hexagons``.
    """

    plus: sp.csc_matrix
    minus: sp.csc_matrix
    plus_sites: np.ndarray
    minus_sites: np.ndarray
    n_sites: int

    @property
    def n_hexagons(self) -> int:
        return self.plus.shape[1]

    def embedded(self, sign: int | None = None) -> sp.csc_matrix:
        """Constraint weights as an (N x hexagons) matrix in site order.

        ``sign`` selects one sublattice (PLUS or MINUS); ``None`` stacks both.
        """
        n_hex = self.n_hexagons
        blocks = []
        if sign in (None, PLUS):
            blocks.append((self.plus.tocoo(), self.plus_sites))
        if sign in (None, MINUS):
            blocks.append((self.minus.tocoo(), self.minus_sites))
        rows = np.concatenate([sites[b.row] for b, sites in blocks])
        cols = np.concatenate([b.col for b, _ in blocks])
        vals = np.concatenate([b.data for b, _ in blocks])
        return sp.csc_matrix((vals, (rows, cols)), shape=(self.n_sites, n_hex))


def constraint_matrices(lattice: LatticeSpec) -> ConstraintMatrix:
    index = lattice.site_index
    sub_row = np.empty(lattice.n_sites, dtype=np.int64)
    sub_row[lattice.plus_sites] = np.arange(len(lattice.plus_sites))
    sub_row[lattice.minus_sites] = np.arange(len(lattice.minus_sites))
    entries = {PLUS: ([], [], []), MINUS: ([], [], [])}
    for col, hexagon in enumerate(lattice.hexagons):
        for site, weight in lattice.hexagon_members(hexagon):
            if weight == 0:
                continue
            rows, cols, vals = entries[site[2]]
            rows.append(sub_row[index[site]])
            cols.append(col)
            vals.append(weight)
    n_hex = lattice.n_hexagons

    def assemble(sign: int, n_rows: int) -> sp.csc_matrix:
        rows, cols, vals = entries[sign]
        return sp.csc_matrix(
            (np.asarray(vals, dtype=np.int64), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
            shape=(n_rows, n_hex),
        )

    return ConstraintMatrix(
        plus=assemble(PLUS, len(lattice.plus_sites)),
        minus=assemble(MINUS, len(lattice.minus_sites)),
        plus_sites=lattice.plus_sites,
        minus_sites=lattice.minus_sites,
        n_sites=lattice.n_sites,
    )


def constraint_residual(lattice: LatticeSpec, phases) -> np.ndarray:
    """Loop sums C_lm = sum_ij phi_ij G_ij,lm for every hexagon."""
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (lattice.n_sites,):
        raise ValueError(f"expected {lattice.n_sites} phases, got shape {phases.shape}")
    return constraint_matrices(lattice).embedded().T @ phases


def triangle_position(site: Site) -> np.ndarray:
    """Cartesian centroid of a triangle; hexagon centres sit on a unit triangular lattice."""
    l, m, s = site
    frac = 1.0 / 3.0 if s == PLUS else 2.0 / 3.0
    return (l + frac) * _A1 + (m + frac) * _A2


def hexagon_position(hexagon: tuple[int, int]) -> np.ndarray:
    l, m = hexagon
    return l * _A1 + m * _A2


def site_positions(lattice: LatticeSpec) -> np.ndarray:
    return np.array([triangle_position(t) for t in lattice.triangles])


def tuple_coordinates(lattice: LatticeSpec) -> np.ndarray:
    """Fractional (l, m) coordinates of triangle centroids, shape (N, 2)."""
    frac = {PLUS: 1.0 / 3.0, MINUS: 2.0 / 3.0}
    return np.array([(l + frac[s], m + frac[s]) for l, m, s in lattice.triangles])

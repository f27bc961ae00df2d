"""Ising coupling kernels induced by the hexagon constraints.

Three independent routes:

* ``finite_kernel``: G_s A^+ G_t^T with A = G_+^T G_+ + G_-^T G_- on a finite
  lattice (pseudo-inverse drops the zero mode).
* ``infinite_kernel_entry``: the binomial closed form on the infinite lattice.
* ``fourier_oracle_entry``: midpoint quadrature of the Brillouin-zone
  integral of (1 + e^{ir} - 2e^{iq}) / (e^{i(q+r)} + e^{iq} - 2e^{ir}).

Offset convention for the closed form and the oracle: ``(dl, dm)`` is the
position of the - triangle minus the position of the + triangle, in tuple
units. The closed form equals the Brillouin-zone integral; the pair coupling
that enters the energy is ``CROSS_SCALE`` times that value (the finite kernel
converges to it in the bulk).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import NumericalError
from .io import write_csv, write_json
from .lattice import ConstraintMatrix, LatticeSpec, constraint_matrices

CROSS_SCALE = 0.5
DEFAULT_TOLERANCE = 1e-10
# midpoint error of the oracle integrand: a uniform h**1.5 term from the thin wedge
# at r = 2q near the origin, then an offset-dependent term close to h**2
RICHARDSON_ORDERS = (1.5, 2.0)


class KernelSource(str, enum.Enum):
    FINITE_PSEUDO_INVERSE = "finite_pseudo_inverse"
    INFINITE_CLOSED_FORM = "infinite_closed_form"


@dataclass(frozen=True)
class CouplingKernel:
    """Dense coupling blocks between + and - triangles.

    Row/column order of each block follows ``plus_sites`` / ``minus_sites``
    (indices into the lattice site list). ``g_pm[a, b]`` couples + site ``a``
    with - site ``b``.
    """

    g_pp: np.ndarray
    g_mm: np.ndarray
    g_pm: np.ndarray
    g_mp: np.ndarray
    source: KernelSource
    tolerance: float
    plus_sites: np.ndarray
    minus_sites: np.ndarray
    n_sites: int
    rank: int = 0
    empty: bool = False

    def total(self) -> np.ndarray:
        """Full symmetric (N x N) matrix K in site order; energy = sigma^T K sigma."""
        k = np.zeros((self.n_sites, self.n_sites))
        p, m = self.plus_sites, self.minus_sites
        k[np.ix_(p, p)] = self.g_pp
        k[np.ix_(m, m)] = self.g_mm
        k[np.ix_(p, m)] = self.g_pm
        k[np.ix_(m, p)] = self.g_mp
        return k

    def save(self, stem: str | Path, lattice: LatticeSpec | None = None) -> tuple[Path, Path]:
        """Write ``<stem>.npz`` with the blocks and ``<stem>.json`` with metadata."""
        stem = Path(stem)
        stem.parent.mkdir(parents=True, exist_ok=True)
        npz = stem.with_suffix(".npz")
        np.savez(
            npz,
            g_pp=self.g_pp,
            g_mm=self.g_mm,
            g_pm=self.g_pm,
            g_mp=self.g_mp,
            plus_sites=self.plus_sites,
            minus_sites=self.minus_sites,
        )
        meta = {
            "source": self.source.value,
            "tolerance": self.tolerance,
            "n_sites": self.n_sites,
            "rank": self.rank,
            "empty": self.empty,
            "lattice_digest": lattice.digest() if lattice is not None else None,
        }
        sidecar = write_json(stem.with_suffix(".json"), meta)
        return npz, sidecar

    @classmethod
    def load(cls, stem: str | Path) -> "CouplingKernel":
        import json

        stem = Path(stem)
        meta = json.loads(stem.with_suffix(".json").read_text())
        with np.load(stem.with_suffix(".npz")) as data:
            return cls(
                g_pp=data["g_pp"],
                g_mm=data["g_mm"],
                g_pm=data["g_pm"],
                g_mp=data["g_mp"],
                source=KernelSource(meta["source"]),
                tolerance=float(meta["tolerance"]),
                plus_sites=data["plus_sites"],
                minus_sites=data["minus_sites"],
                n_sites=int(meta["n_sites"]),
                rank=int(meta["rank"]),
                empty=bool(meta["empty"]),
            )


def pseudo_inverse(a: np.ndarray, tolerance: float = DEFAULT_TOLERANCE) -> tuple[np.ndarray, int]:
    """Eigenvalue-cutoff pseudo-inverse of a symmetric PSD matrix and its rank."""
    if tolerance <= 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    w, v = np.linalg.eigh(a)
    top = w.max() if w.size else 0.0
    if top <= 0:
        return np.zeros_like(a), 0
    keep = w > tolerance * top
    vk = v[:, keep]
    return (vk / w[keep]) @ vk.T, int(keep.sum())


def finite_kernel(
    constraints: ConstraintMatrix | LatticeSpec, tolerance: float = DEFAULT_TOLERANCE
) -> CouplingKernel:
    if tolerance <= 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    if isinstance(constraints, LatticeSpec):
        constraints = constraint_matrices(constraints)
    gp = constraints.plus.toarray().astype(float)
    gm = constraints.minus.toarray().astype(float)
    n_p, n_m = gp.shape[0], gm.shape[0]
    a = gp.T @ gp + gm.T @ gm
    common = dict(
        source=KernelSource.FINITE_PSEUDO_INVERSE,
        tolerance=tolerance,
        plus_sites=constraints.plus_sites,
        minus_sites=constraints.minus_sites,
        n_sites=constraints.n_sites,
    )
    if a.size == 0 or not np.any(a):
        warnings.warn("constraint matrix has no non-trivial hexagon loops; kernel is zero", RuntimeWarning)
        return CouplingKernel(
            g_pp=np.zeros((n_p, n_p)),
            g_mm=np.zeros((n_m, n_m)),
            g_pm=np.zeros((n_p, n_m)),
            g_mp=np.zeros((n_m, n_p)),
            rank=0,
            empty=True,
            **common,
        )
    w, v = np.linalg.eigh(a)
    keep = w > tolerance * w.max()
    half = v[:, keep] / np.sqrt(w[keep])
    xp = gp @ half
    xm = gm @ half
    g_pp = xp @ xp.T
    g_mm = xm @ xm.T
    g_pm = xp @ xm.T
    return CouplingKernel(
        g_pp=0.5 * (g_pp + g_pp.T),
        g_mm=0.5 * (g_mm + g_mm.T),
        g_pm=g_pm,
        g_mp=g_pm.T.copy(),
        rank=int(keep.sum()),
        **common,
    )


def _binom(n: int, k: int) -> int:
    return math.comb(n, k) if 0 <= k <= n else 0


def infinite_kernel_entry_exact(dl: int, dm: int) -> Fraction:
    """Binomial closed form, exact rational value. Zero outside the support wedge."""
    d, e = int(dl), int(dm)
    value = Fraction(0)
    if d < 0:
        return value
    scale = Fraction(1, 2**d)
    if -d - 1 <= e <= -1:
        value -= Fraction(1, 2) * scale * _binom(d, d + e + 1)
    if -d <= e <= 0:
        value -= Fraction(1, 2) * scale * _binom(d, d + e)
    if d >= 1 and -d <= e <= -1:
        value += 2 * scale * _binom(d - 1, d + e)
    return value


@lru_cache(maxsize=1 << 16)
def infinite_kernel_entry(dl: int, dm: int) -> float:
    return float(infinite_kernel_entry_exact(dl, dm))


def infinite_kernel_entry_mp(dl: int, dm: int) -> float:
    """Coupling G^{-+}(dl, dm), the transpose partner: G^{+-}(-dl, -dm)."""
    return infinite_kernel_entry(-dl, -dm)


def closed_form_kernel(lattice: LatticeSpec) -> CouplingKernel:
    """Infinite-lattice couplings restricted to the sites of ``lattice`` (no wrapping)."""
    tri = np.array(lattice.triangles)
    p, m = lattice.plus_sites, lattice.minus_sites
    dl = tri[m, 0][None, :] - tri[p, 0][:, None]
    dm = tri[m, 1][None, :] - tri[p, 1][:, None]
    offsets = {(int(a), int(b)) for a, b in zip(dl.ravel(), dm.ravel())}
    lookup = {o: infinite_kernel_entry(*o) for o in offsets}
    g_pm = CROSS_SCALE * np.vectorize(lambda a, b: lookup[(int(a), int(b))], otypes=[float])(dl, dm)
    return CouplingKernel(
        g_pp=0.5 * np.eye(len(p)),
        g_mm=0.5 * np.eye(len(m)),
        g_pm=g_pm,
        g_mp=g_pm.T.copy(),
        source=KernelSource.INFINITE_CLOSED_FORM,
        tolerance=0.0,
        plus_sites=p,
        minus_sites=m,
        n_sites=lattice.n_sites,
        rank=0,
    )


@dataclass(frozen=True)
class FourierKernel:
    """Fourier symbols of the constraint matrices on a shifted midpoint grid."""

    grid_size: int

    @staticmethod
    def g_plus(q, r):
        return 1.0 + np.exp(1j * r) - 2.0 * np.exp(1j * q)

    @staticmethod
    def g_minus(q, r):
        return np.exp(1j * (r + q)) + np.exp(1j * q) - 2.0 * np.exp(1j * r)

    @staticmethod
    def modulus_sq(q, r):
        return -4.0 * np.sin(r / 2) ** 2 + 8.0 * np.sin((q - r) / 2) ** 2 + 8.0 * np.sin(q / 2) ** 2

    @property
    def nodes(self) -> np.ndarray:
        n = self.grid_size
        return -np.pi + (np.arange(n) + 0.5) * (2.0 * np.pi / n)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.nodes, self.nodes, indexing="ij")

    def ratio(self) -> np.ndarray:
        q, r = self.mesh()
        return self.g_plus(q, r) / self.g_minus(q, r)


def _check_grid(grid_size: int) -> None:
    if grid_size < 64 or grid_size % 2:
        raise ValueError(f"grid_size must be an even integer >= 64, got {grid_size}")


def _midpoint_entry(dl: int, dm: int, grid_size: int) -> complex:
    fk = FourierKernel(grid_size)
    q, r = fk.mesh()
    return complex(np.mean(fk.ratio() * np.exp(-1j * (q * dl + r * dm))))


def _richardson(values: list, orders=RICHARDSON_ORDERS):
    """Repeated Richardson elimination; ``values`` ordered fine to coarse, halving the grid each time."""
    for p in orders[: len(values) - 1]:
        factor = 2.0**p
        values = [(factor * f - c) / (factor - 1.0) for f, c in zip(values[:-1], values[1:])]
    return values[0]


def _grids(grid_size: int, extrapolate: bool) -> list[int]:
    _check_grid(grid_size)
    if not extrapolate:
        return [grid_size]
    levels = len(RICHARDSON_ORDERS)
    if grid_size % (2**levels):
        raise ValueError(f"grid_size must be divisible by {2**levels} for extrapolation, got {grid_size}")
    return [grid_size // 2**j for j in range(levels + 1)]


def fourier_oracle_entry(dl: int, dm: int, grid_size: int = 1024, extrapolate: bool = True) -> float:
    """Brillouin-zone quadrature of the cross coupling at offset (dl, dm).

    With ``extrapolate`` the midpoint sums on grid_size, grid_size/2 and
    grid_size/4 are combined to cancel the h**1.5 and h**2 error terms.
    """
    value = _richardson([_midpoint_entry(dl, dm, n) for n in _grids(grid_size, extrapolate)])
    if abs(value.imag) > 1e-8:
        raise NumericalError(f"imaginary part {value.imag:.3e} at offset ({dl}, {dm})")
    return value.real


def _midpoint_table(max_offset: int, grid_size: int) -> np.ndarray:
    fk = FourierKernel(grid_size)
    n = grid_size
    spectrum = np.fft.fft2(fk.ratio()) / (n * n)
    offs = np.arange(-max_offset, max_offset + 1)
    x0 = fk.nodes[0]
    phase = np.exp(-1j * x0 * offs)
    sub = spectrum[np.ix_(offs % n, offs % n)]
    return sub * phase[:, None] * phase[None, :]


def fourier_oracle_table(max_offset: int, grid_size: int = 1024, extrapolate: bool = True) -> np.ndarray:
    """All oracle values for |dl|, |dm| <= max_offset; entry [dl + K, dm + K]."""
    table = _richardson([_midpoint_table(max_offset, n) for n in _grids(grid_size, extrapolate)])
    worst = np.abs(table.imag).max()
    if worst > 1e-8:
        raise NumericalError(f"imaginary part up to {worst:.3e} in oracle table")
    return table.real


def closed_form_table(max_offset: int) -> np.ndarray:
    offs = range(-max_offset, max_offset + 1)
    return np.array([[infinite_kernel_entry(a, b) for b in offs] for a in offs])


class Direction(str, enum.Enum):
    HORIZONTAL = "horizontal"  # (d, 0): exponential
    VERTICAL = "vertical"  # (d, -(d+1)): opposite exponential edge of the support wedge
    DIAGONAL = "diagonal"  # (d, -ceil(d/2)): centre of the wedge, algebraic


def ray_offset(direction: Direction | str, distance: int) -> tuple[int, int]:
    direction = Direction(direction)
    d = int(distance)
    if direction is Direction.HORIZONTAL:
        return d, 0
    if direction is Direction.VERTICAL:
        return d, -(d + 1)
    return d, -((d + 1) // 2)


def kernel_decay_profile(
    kernel_fn: Callable[[int, int], float] = infinite_kernel_entry,
    direction: Direction | str = Direction.HORIZONTAL,
    max_range: int = 20,
) -> list[tuple[int, float]]:
    if max_range < 2:
        raise ValueError(f"max_range must be >= 2, got {max_range}")
    return [(d, float(kernel_fn(*ray_offset(direction, d)))) for d in range(max_range + 1)]


def write_profile_csv(path, profiles: dict[str, list[tuple[int, float]]]) -> Path:
    rows = [(name, d, v) for name, table in profiles.items() for d, v in table]
    return write_csv(path, ["direction", "distance", "value"], rows)

"""Exact diagonalization of the transverse-field Ising Hamiltonian.

H = E_J F(sigma) + Delta sum_i sigma^x_i on the 2^N basis of classical
patterns, in the same bit order as the classical module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import SpinConfig, energy_table
from .errors import CapabilityError

MAX_DENSE_SITES = 14


def _n_from_dim(dim: int) -> int:
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValueError(f"matrix dimension {dim} is not a power of two")
    return n


def transverse_matrix(n: int) -> np.ndarray:
    """sum_i sigma^x_i: ones between patterns differing in exactly one bit."""
    dim = 1 << n
    idx = np.arange(dim)
    x = np.zeros((dim, dim))
    for i in range(n):
        x[idx, idx ^ (1 << i)] = 1.0
    return x


def build_hamiltonian(kernel, e_j: float, delta: float, energies: np.ndarray | None = None) -> np.ndarray:
    """Dense H. ``energies`` (the classical table) can be passed to skip recomputation."""
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    n = kernel.n_sites if energies is None else _n_from_dim(energies.size)
    if n > MAX_DENSE_SITES:
        raise CapabilityError(f"dense exact diagonalization supports N <= {MAX_DENSE_SITES}, got {n}")
    if energies is None:
        energies = energy_table(kernel)
    h = delta * transverse_matrix(n)
    h[np.diag_indices_from(h)] = e_j * energies
    return h


def _fix_sign(v: np.ndarray) -> np.ndarray:
    mag = np.abs(v)
    first = int(np.argmax(mag >= mag.max() - 1e-12))
    return -v if v[first] < 0 else v


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    ground_vector: np.ndarray
    excited_vector: np.ndarray
    ratio: float
    vectors: np.ndarray | None = None

    @property
    def n_sites(self) -> int:
        return _n_from_dim(self.ground_vector.size)


def diagonalize(h: np.ndarray, ratio: float = float("nan"), keep_vectors: bool = False) -> Spectrum:
    if not np.allclose(h, h.T, atol=1e-12, rtol=0):
        raise ValueError("Hamiltonian is not symmetric")
    w, v = np.linalg.eigh(h)
    order = np.argsort(w, kind="stable")
    w, v = w[order], v[:, order]
    ground = _fix_sign(v[:, 0])
    excited = _fix_sign(v[:, 1]) if v.shape[1] > 1 else np.zeros_like(ground)
    return Spectrum(w, ground, excited, float(ratio), v if keep_vectors else None)


def normalized_couplings(ratio: float) -> tuple[float, float]:
    """(E_J, Delta) with E_J / Delta = ratio and E_J^2 + Delta^2 = 1."""
    if ratio < 0:
        raise ValueError(f"ratio must be non-negative, got {ratio}")
    if math.isinf(ratio):
        return 1.0, 0.0
    norm = math.hypot(ratio, 1.0)
    return ratio / norm, 1.0 / norm


def solve_at_ratio(kernel, ratio: float, energies: np.ndarray | None = None, keep_vectors: bool = False) -> Spectrum:
    e_j, delta = normalized_couplings(ratio)
    return diagonalize(build_hamiltonian(kernel, e_j, delta, energies), ratio, keep_vectors)


def spectrum_vs_ratio(kernel, ratios) -> list[tuple[float, np.ndarray]]:
    """Eigenvalues E / sqrt(E_J^2 + Delta^2) for each E_J / Delta."""
    energies = energy_table(kernel)
    n = _n_from_dim(energies.size)
    if n > MAX_DENSE_SITES:
        raise CapabilityError(f"dense exact diagonalization supports N <= {MAX_DENSE_SITES}, got {n}")
    out = []
    for r in np.atleast_1d(ratios):
        e_j, delta = normalized_couplings(float(r))
        w = np.linalg.eigvalsh(build_hamiltonian(kernel, e_j, delta, energies))
        out.append((float(r), w))
    return out


@dataclass(frozen=True)
class OverlapTable:
    amplitudes: np.ndarray
    probabilities: np.ndarray
    census_indices: np.ndarray
    census_weight: float

    def rows(self) -> list[tuple[int, float, float]]:
        return [(n, float(a), float(p)) for n, (a, p) in enumerate(zip(self.amplitudes, self.probabilities))]


def ground_overlaps(spectrum: Spectrum | np.ndarray, census) -> OverlapTable:
    """Amplitudes f_n = <psi|n>, probabilities and total weight on the census patterns."""
    psi = spectrum.ground_vector if isinstance(spectrum, Spectrum) else np.asarray(spectrum)
    idx = np.array(sorted(c.bits if isinstance(c, SpinConfig) else int(c) for c in census), dtype=np.int64)
    prob = psi**2
    return OverlapTable(psi.copy(), prob, idx, float(prob[idx].sum()))


def spin_flip_permutation(n: int) -> np.ndarray:
    """Permutation matrix of the global flip sigma -> -sigma on basis patterns."""
    dim = 1 << n
    idx = np.arange(dim)
    p = np.zeros((dim, dim))
    p[idx ^ (dim - 1), idx] = 1.0
    return p


def band_gap_ratio(eigenvalues: np.ndarray, band_size: int) -> tuple[float, float, float]:
    """(gap to level band_size + 1, spread within the lowest band, gap / spread)."""
    w = np.sort(eigenvalues)
    spread = float(w[band_size - 1] - w[0])
    gap = float(w[band_size] - w[band_size - 1])
    return gap, spread, gap / spread if spread > 0 else math.inf

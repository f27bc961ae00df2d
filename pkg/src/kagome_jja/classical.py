"""Exact enumeration of the classical Ising free energy over all spin patterns.

Energies are the quadratic form F = sigma^T K sigma with K the full kernel in
site order, measured in units of the triangle barrier E_J(alpha). Bit i of a
configuration index is 1 iff sigma_i = +1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .coupling import CouplingKernel
from .errors import CapabilityError

MAX_ENUMERATION_SITES = 30
CHUNK = 1 << 16


@dataclass(frozen=True)
class SpinConfig:
    bits: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("a configuration needs at least one site")
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"bit pattern {self.bits} does not fit in {self.n} sites")

    @property
    def spins(self) -> np.ndarray:
        return bits_to_spins(self.bits, self.n)

    @classmethod
    def from_spins(cls, spins) -> "SpinConfig":
        spins = np.asarray(spins)
        if not np.all(np.abs(spins) == 1):
            raise ValueError("spins must be +-1")
        bits = 0
        for i in np.flatnonzero(spins > 0):
            bits |= 1 << int(i)
        return cls(bits, spins.size)

    def flipped(self) -> "SpinConfig":
        return SpinConfig(self.bits ^ ((1 << self.n) - 1), self.n)

    @property
    def magnetization(self) -> float:
        return (2 * bin(self.bits).count("1") - self.n) / self.n

    def bitstring(self) -> str:
        """Site 0 first."""
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(self.n))


def bits_to_spins(bits: int, n: int) -> np.ndarray:
    return np.array([1 if (bits >> i) & 1 else -1 for i in range(n)], dtype=np.int8)


def spin_table(indices: np.ndarray, n: int) -> np.ndarray:
    """Rows of +-1 spins for an array of configuration indices."""
    shifts = np.arange(n, dtype=np.int64)
    return (((indices[:, None] >> shifts) & 1) * 2 - 1).astype(np.float64)


def _kernel_matrix(kernel) -> np.ndarray:
    return kernel.total() if isinstance(kernel, CouplingKernel) else np.asarray(kernel, dtype=float)


def config_energy(kernel, config: SpinConfig | np.ndarray) -> float:
    k = _kernel_matrix(kernel)
    s = config.spins if isinstance(config, SpinConfig) else np.asarray(config)
    if s.shape != (k.shape[0],):
        raise ValueError(f"configuration has {s.size} sites, kernel has {k.shape[0]}")
    s = s.astype(float)
    return float(s @ k @ s)


def config_energy_bruteforce(kernel: CouplingKernel, config: SpinConfig) -> float:
    """Explicit sum of the four sublattice blocks (reference implementation)."""
    s = config.spins
    if s.size != kernel.n_sites:
        raise ValueError(f"configuration has {s.size} sites, kernel has {kernel.n_sites}")
    sp = s[kernel.plus_sites]
    sm = s[kernel.minus_sites]
    total = 0.0
    for a in range(sp.size):
        for b in range(sp.size):
            total += sp[a] * kernel.g_pp[a, b] * sp[b]
        for b in range(sm.size):
            total += sp[a] * kernel.g_pm[a, b] * sm[b]
    for a in range(sm.size):
        for b in range(sm.size):
            total += sm[a] * kernel.g_mm[a, b] * sm[b]
        for b in range(sp.size):
            total += sm[a] * kernel.g_mp[a, b] * sp[b]
    return float(total)


def _check_size(n: int) -> None:
    if n > MAX_ENUMERATION_SITES:
        raise CapabilityError(
            f"exact enumeration supports N <= {MAX_ENUMERATION_SITES} sites, got {n}; use the montecarlo module"
        )


def energy_table(kernel) -> np.ndarray:
    """F for every configuration index 0 .. 2^N - 1."""
    k = _kernel_matrix(kernel)
    n = k.shape[0]
    _check_size(n)
    total = 1 << n
    out = np.empty(total)
    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        s = spin_table(idx, n)
        out[start : start + idx.size] = np.einsum("ij,ij->i", s @ k, s)
    return out


def magnetization_sums(n: int) -> np.ndarray:
    """sum_i sigma_i for every configuration index."""
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts[1 << i : 1 << (i + 1)] = counts[: 1 << i] + 1
    return 2 * counts - n


@dataclass(frozen=True)
class EnumerationResult:
    energies: np.ndarray
    degeneracy: int
    ground_patterns: tuple[SpinConfig, ...]
    p_m: dict[float, float]
    temperature: float
    n_sites: int

    @property
    def m_bar(self) -> float:
        return float(np.sqrt(sum(p * m * m for m, p in self.p_m.items())))


def _census(energies: np.ndarray, n: int, rel_tol: float = 1e-9) -> tuple[int, tuple[SpinConfig, ...]]:
    e_min = energies.min()
    scale = max(1.0, float(np.abs(energies).max()))
    ground = np.flatnonzero(energies <= e_min + rel_tol * scale)
    return ground.size, tuple(SpinConfig(int(b), n) for b in ground)


def _polarization_distribution(energies: np.ndarray, msum: np.ndarray, n: int, temperature: float) -> dict[float, float]:
    logw = -energies / temperature
    logw -= logsumexp(logw)
    weights = np.exp(logw)
    probs = np.bincount(msum + n, weights=weights, minlength=2 * n + 1)
    probs /= probs.sum()
    # msum + n is always even, so every other bin is populated
    return {(2 * k - n) / n: float(p) for k, p in enumerate(probs[::2])}


def enumerate_states(kernel, temperature: float) -> EnumerationResult:
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    energies = energy_table(kernel)
    n = int(np.log2(energies.size))
    degeneracy, patterns = _census(energies, n)
    p_m = _polarization_distribution(energies, magnetization_sums(n), n, temperature)
    return EnumerationResult(energies, degeneracy, patterns, p_m, float(temperature), n)


def m_bar_from_table(energies: np.ndarray, msum: np.ndarray, n: int, temperature: float) -> float:
    p = _polarization_distribution(energies, msum, n, temperature)
    return float(np.sqrt(sum(prob * m * m for m, prob in p.items())))


def polarization_curve(kernel, temperatures) -> list[tuple[float, float]]:
    temps = [float(t) for t in np.atleast_1d(temperatures)]
    if any(t <= 0 for t in temps):
        raise ValueError("all temperatures must be positive")
    energies = energy_table(kernel)
    n = int(np.log2(energies.size))
    msum = magnetization_sums(n)
    return [(t, m_bar_from_table(energies, msum, n, t)) for t in temps]


def ground_census(kernel, rel_tol: float = 1e-9) -> tuple[int, tuple[SpinConfig, ...]]:
    energies = energy_table(kernel)
    return _census(energies, int(np.log2(energies.size)), rel_tol)


def ground_m_bar(patterns) -> float:
    """sqrt of the mean M^2 over an equally weighted set of ground patterns."""
    return float(np.sqrt(np.mean([p.magnetization**2 for p in patterns])))

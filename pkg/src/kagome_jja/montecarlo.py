"""Single-flip Metropolis sampling of the long-range Ising model with quenches.

The energy is F = sigma^T K sigma with the dense total kernel K. Each site
carries a cached local field h = K sigma so a flip costs O(1) to evaluate and
O(N) to accept. Randomness comes from a numpy PCG64 generator; orders and
uniforms are drawn in fixed-size blocks so a seed fixes the whole trajectory.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numba
import numpy as np

from .classical import SpinConfig
from .coupling import CouplingKernel
from .errors import NumericalError
from .io import atomic_write_text, write_csv
from .lattice import PLUS, LatticeSpec

ENERGY_CHECK_INTERVAL = 1000
ENERGY_TOLERANCE = 1e-8
RNG_BLOCK = 256  # sweeps of randomness drawn per generator call
HISTOGRAM_MAX_SITES = 20


def _kernel_matrix(kernel) -> np.ndarray:
    k = kernel.total() if isinstance(kernel, CouplingKernel) else np.asarray(kernel, dtype=float)
    return np.ascontiguousarray(0.5 * (k + k.T))


def local_field(kernel, config: SpinConfig | np.ndarray, site: int) -> float:
    """h_i = sum_j K_ij sigma_j."""
    k = _kernel_matrix(kernel)
    s = config.spins if isinstance(config, SpinConfig) else np.asarray(config)
    if not 0 <= site < k.shape[0]:
        raise IndexError(f"site {site} out of range for {k.shape[0]} sites")
    return float(k[site] @ s)


def flip_delta(kernel, config: SpinConfig | np.ndarray, site: int) -> float:
    """Exact energy change of flipping ``site``: -4 sigma_i h_i + 4 K_ii."""
    k = _kernel_matrix(kernel)
    s = config.spins if isinstance(config, SpinConfig) else np.asarray(config)
    h = local_field(k, s, site)
    return -4.0 * float(s[site]) * h + 4.0 * float(k[site, site])


@numba.njit(cache=True)
def _sweeps(k, spins, h, orders, uniforms, beta, code, hist):
    n = spins.size
    d_energy = 0.0
    accepted = 0
    for t in range(orders.shape[0]):
        for step in range(n):
            i = orders[t, step]
            s = spins[i]
            de = -4.0 * s * h[i] + 4.0 * k[i, i]
            if de <= 0.0 or uniforms[t, step] < math.exp(-beta * de):
                spins[i] = -s
                change = -2.0 * s
                for j in range(n):
                    h[j] += change * k[i, j]  # k symmetric; row access is contiguous
                d_energy += de
                accepted += 1
                if hist.size > 0:
                    code ^= 1 << i
        if hist.size > 0:
            hist[code] += 1
    return d_energy, accepted, code


@dataclass
class MCState:
    spins: np.ndarray
    energy: float
    rng: np.random.Generator
    sweep_count: int = 0
    temperature: float = float("inf")
    accepted: int = 0
    proposed: int = 0
    max_drift: float = 0.0

    @property
    def config(self) -> SpinConfig:
        return SpinConfig.from_spins(self.spins)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else 0.0

    @property
    def magnetization(self) -> float:
        return float(self.spins.mean())


def initial_state(kernel, seed: int, spins=None) -> MCState:
    """Random (infinite temperature) start unless ``spins`` is given."""
    k = _kernel_matrix(kernel)
    rng = np.random.Generator(np.random.PCG64(seed))
    if spins is None:
        spins = rng.integers(0, 2, size=k.shape[0]) * 2 - 1
    spins = np.asarray(spins, dtype=np.float64).copy()
    return MCState(spins=spins, energy=float(spins @ k @ spins), rng=rng)


class Sampler:
    """Holds the dense kernel and cached local fields for one chain."""

    def __init__(self, kernel, state: MCState):
        self.k = _kernel_matrix(kernel)
        if state.spins.shape != (self.k.shape[0],):
            raise ValueError("state and kernel sizes differ")
        self.state = state
        self.h = self.k @ state.spins
        self.n = self.k.shape[0]
        self._since_check = 0

    def _draw(self, n_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
        rng = self.state.rng
        orders = rng.permuted(np.tile(np.arange(self.n, dtype=np.int64), (n_sweeps, 1)), axis=1)
        uniforms = rng.random((n_sweeps, self.n))
        return orders, uniforms

    def recompute(self) -> float:
        """Refresh cached fields and energy; returns the drift that was removed."""
        st = self.state
        exact = float(st.spins @ self.k @ st.spins)
        drift = abs(exact - st.energy)
        st.max_drift = max(st.max_drift, drift)
        if drift > ENERGY_TOLERANCE * max(1.0, abs(exact)):
            raise NumericalError(f"incremental energy drifted by {drift:.3e}")
        st.energy = exact
        self.h = self.k @ st.spins
        return drift

    def run(self, n_sweeps: int, temperature: float, histogram: np.ndarray | None = None) -> MCState:
        if temperature <= 0:
            raise ValueError(f"temperature must be positive, got {temperature}")
        st = self.state
        st.temperature = float(temperature)
        beta = 0.0 if math.isinf(temperature) else 1.0 / temperature
        hist = histogram if histogram is not None else np.zeros(0, dtype=np.int64)
        code = int(SpinConfig.from_spins(st.spins).bits) if hist.size else 0
        done = 0
        while done < n_sweeps:
            block = min(RNG_BLOCK, n_sweeps - done, ENERGY_CHECK_INTERVAL - self._since_check)
            orders, uniforms = self._draw(block)
            d_energy, accepted, code = _sweeps(self.k, st.spins, self.h, orders, uniforms, beta, code, hist)
            st.energy += d_energy
            st.accepted += accepted
            st.proposed += block * self.n
            st.sweep_count += block
            done += block
            self._since_check += block
            if self._since_check >= ENERGY_CHECK_INTERVAL:
                self.recompute()
                self._since_check = 0
        return st


def metropolis_sweep(state: MCState, kernel, temperature: float, n_sweeps: int = 1) -> MCState:
    """Advance ``state`` in place by ``n_sweeps`` sweeps of N random-order proposals."""
    return Sampler(kernel, state).run(n_sweeps, temperature)


def sample_histogram(kernel, temperature: float, n_sweeps: int, seed: int, burn_in: int = 1000) -> np.ndarray:
    """Visit counts of every configuration index, one sample per sweep."""
    k = _kernel_matrix(kernel)
    n = k.shape[0]
    if n > HISTOGRAM_MAX_SITES:
        raise ValueError(f"histogram sampling limited to N <= {HISTOGRAM_MAX_SITES}")
    sampler = Sampler(k, initial_state(k, seed))
    sampler.run(burn_in, temperature)
    hist = np.zeros(1 << n, dtype=np.int64)
    sampler.run(n_sweeps, temperature, histogram=hist)
    return hist


@dataclass(frozen=True)
class QuenchSchedule:
    t_end: float
    t_start: float = 2.0
    cooling_factor: float = 0.95
    sweeps_per_step: int = 200
    equilibration_sweeps: int = 5000
    snapshot_every: int = 0  # temperature steps between snapshots; 0 keeps only the final one

    def __post_init__(self) -> None:
        if not self.t_start > self.t_end > 0:
            raise ValueError(f"need t_start > t_end > 0, got {self.t_start}, {self.t_end}")
        if not 0 < self.cooling_factor < 1:
            raise ValueError(f"cooling_factor must be in (0, 1), got {self.cooling_factor}")
        if self.sweeps_per_step < 1 or self.equilibration_sweeps < 0 or self.snapshot_every < 0:
            raise ValueError("sweep counts must be non-negative (sweeps_per_step >= 1)")

    def temperatures(self) -> list[float]:
        temps = []
        t = self.t_start
        while t > self.t_end:
            temps.append(t)
            t *= self.cooling_factor
        return temps

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class OrderParameters:
    magnetization: float
    k_values: np.ndarray
    structure_factor: np.ndarray  # S(0, k) = |sum_j sigma_j exp(i k m_j)|^2 / N
    stripe_score: float  # max over k != 0 of S(0, k) / N

    @property
    def peak_k(self) -> float:
        ks = self.k_values[1:]
        return float(ks[np.argmax(self.structure_factor[1:])])


def order_parameters(config: SpinConfig | np.ndarray, lattice: LatticeSpec, n_k: int | None = None) -> OrderParameters:
    """Polarization and the structure factor along the m axis of the tuple grid.

    Positions are integer tuple coordinates; both triangles of a tuple share
    one position. k = 2 pi j / n_k is sampled for j = 0 .. n_k // 2 (default
    n_k = m_extent); S is even in k so the upper half adds nothing.
    """
    s = config.spins if isinstance(config, SpinConfig) else np.asarray(config)
    s = s.astype(float)
    n = s.size
    if n != lattice.n_sites:
        raise ValueError(f"configuration has {n} sites, lattice has {lattice.n_sites}")
    m_coord = np.array([t[1] for t in lattice.triangles])
    n_k = n_k or lattice.m_extent
    line = np.bincount(m_coord, weights=s)
    k = 2.0 * np.pi * np.arange(n_k // 2 + 1) / n_k
    amp = np.exp(1j * np.outer(k, np.arange(line.size))) @ line
    sk = np.abs(amp) ** 2 / n
    score = float(sk[1:].max() / n) if sk.size > 1 else 0.0
    return OrderParameters(float(s.mean()), k, sk, score)


@dataclass
class QuenchResult:
    state: MCState
    snapshots: list[tuple[int, float, np.ndarray]] = field(default_factory=list)
    series: list[tuple[int, float, float, float, float]] = field(default_factory=list)

    @property
    def final_spins(self) -> np.ndarray:
        return self.state.spins.astype(np.int8)


def quench_run(lattice: LatticeSpec, kernel, schedule: QuenchSchedule, seed: int) -> QuenchResult:
    """Cool a random start through ``schedule`` and equilibrate at t_end."""
    k = _kernel_matrix(kernel)
    if k.shape[0] != lattice.n_sites:
        raise ValueError("kernel and lattice sizes differ")
    sampler = Sampler(k, initial_state(k, seed))
    result = QuenchResult(sampler.state)

    def record(t: float, snapshot: bool) -> None:
        st = sampler.state
        op = order_parameters(st.spins, lattice)
        result.series.append((st.sweep_count, t, st.energy, op.magnetization, op.stripe_score))
        if snapshot:
            result.snapshots.append((st.sweep_count, t, st.spins.astype(np.int8)))

    for step, t in enumerate(schedule.temperatures()):
        sampler.run(schedule.sweeps_per_step, t)
        record(t, schedule.snapshot_every > 0 and step % schedule.snapshot_every == 0)
    sampler.run(schedule.equilibration_sweeps, schedule.t_end)
    sampler.recompute()
    record(schedule.t_end, True)
    return result


def snapshot_grid(spins, lattice: LatticeSpec) -> np.ndarray:
    """(l_extent, 2 m_extent) grid: column 2m holds the + triangle, 2m+1 the -; 0 marks no site."""
    grid = np.zeros((lattice.l_extent, 2 * lattice.m_extent), dtype=np.int8)
    for (l, m, s), v in zip(lattice.triangles, np.asarray(spins)):
        grid[l, 2 * m + (0 if s == PLUS else 1)] = int(v)
    return grid


def pgm_text(grid: np.ndarray) -> str:
    """Plain PGM: vortex (+1) dark, antivortex (-1) light, missing sites mid grey."""
    shade = np.where(grid > 0, 0, np.where(grid < 0, 255, 128))
    rows = [" ".join(str(v) for v in row) for row in shade]
    return f"P2\n{grid.shape[1]} {grid.shape[0]}\n255\n" + "\n".join(rows) + "\n"


def write_snapshot(stem: str | Path, spins, lattice: LatticeSpec) -> tuple[Path, Path]:
    stem = Path(stem)
    grid = snapshot_grid(spins, lattice)
    csv_path = write_csv(stem.with_suffix(".csv"), [f"c{j}" for j in range(grid.shape[1])], grid.tolist())
    pgm_path = atomic_write_text(stem.with_suffix(".pgm"), pgm_text(grid))
    return csv_path, pgm_path


def write_series(path, series) -> Path:
    return write_csv(path, ["sweep", "temperature", "energy", "magnetization", "stripe_score"], series)

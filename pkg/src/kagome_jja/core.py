"""Single-triangle physics of a frustrated 0/pi Josephson junction loop.

A superconducting triangle with two 0-junctions (coupling E_J) and one
pi-junction (coupling alpha*E_J, alpha < 0) has the potential

    U(phi1, phi2) = E_J [2 + alpha - cos(phi1) - cos(phi2) - alpha cos(phi1 + phi2)]

For alpha < -1/2 it develops two degenerate minima at phi1 = phi2 = +-u0, the
vortex and antivortex states that become the Ising spin sigma = +-1.

Units: energies in units of E_J (default 1.0), hbar = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

ALPHA_CRITICAL = -0.5
FRUSTRATION_CRITICAL = 0.75


def _check_alpha(alpha: float) -> None:
    if not -1.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [-1, 1], got {alpha}")


def frustration_from_alpha(alpha: float) -> float:
    """Frustration parameter f = (1 - alpha) / 2."""
    _check_alpha(alpha)
    return (1.0 - alpha) / 2.0


def is_frustrated(alpha: float) -> bool:
    """True iff the triangle potential is a double well (alpha < -1/2)."""
    _check_alpha(alpha)
    return alpha < ALPHA_CRITICAL


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the array.

    ``temperature`` is k_B T in units of the barrier E_J(alpha), matching the
    classical and Monte Carlo conventions. ``delta`` is the tunneling
    amplitude; when left as ``None`` it is derived from the triangle
    physics (only possible in the frustrated regime).
    """

    alpha: float = -1.0
    e_j: float = 1.0
    e_c: float = 0.1
    temperature: float = 1.0
    delta: float | None = None

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)
        if self.e_j <= 0:
            raise ValueError(f"e_j must be positive, got {self.e_j}")
        if self.e_c <= 0:
            raise ValueError(f"e_c must be positive, got {self.e_c}")
        if self.temperature < 0:
            raise ValueError(f"temperature must be non-negative, got {self.temperature}")
        if self.delta is not None and self.delta < 0:
            raise ValueError(f"delta must be non-negative, got {self.delta}")

    @property
    def frustration(self) -> float:
        return frustration_from_alpha(self.alpha)

    def resolved_delta(self) -> float:
        if self.delta is not None:
            return self.delta
        return tunneling_amplitude(triangle_physics(self))

    def with_delta(self, delta: float) -> "ModelParams":
        return replace(self, delta=delta)


@dataclass(frozen=True)
class TrianglePhysics:
    alpha: float
    u0: float
    barrier: float
    gamma: float
    omega: float


def triangle_potential(phi1, phi2, alpha: float, e_j: float = 1.0):
    """Josephson potential of one triangle after eliminating phi3 = -phi1 - phi2."""
    phi1 = np.asarray(phi1, dtype=float)
    phi2 = np.asarray(phi2, dtype=float)
    return e_j * (2.0 + alpha - np.cos(phi1) - np.cos(phi2) - alpha * np.cos(phi1 + phi2))


def minimum_location(alpha: float) -> float:
    """u0 = arccos(1 / (2|alpha|))."""
    if not is_frustrated(alpha):
        raise ValueError(f"no double well for alpha = {alpha} (need alpha < -1/2)")
    return math.acos(1.0 / (2.0 * abs(alpha)))


def barrier_height(alpha: float, e_j: float = 1.0) -> float:
    """Barrier E_J(alpha) between the two minima, measured from the saddle at phi_s = 0.

    The closed expression E_J [2(1 + alpha) + 1/(2 alpha)] is negative in the
    frustrated regime; the barrier is its magnitude. At alpha = -1/2 the
    expression is exactly zero, which is returned as the continuous limit.
    """
    _check_alpha(alpha)
    if alpha > ALPHA_CRITICAL:
        raise ValueError(f"no double well for alpha = {alpha} (need alpha <= -1/2)")
    return abs(e_j * (2.0 * (1.0 + alpha) + 1.0 / (2.0 * alpha)))


def triangle_physics(params: ModelParams) -> TrianglePhysics:
    alpha = params.alpha
    if not is_frustrated(alpha):
        raise ValueError(f"alpha = {alpha} is not in the frustrated regime (alpha < -1/2)")
    u0 = minimum_location(alpha)
    barrier = barrier_height(alpha, params.e_j)
    gamma = 1.0 + 2.0 * abs(alpha)
    omega = (2.0 / u0) * math.sqrt(params.e_c * barrier / gamma)
    return TrianglePhysics(alpha=alpha, u0=u0, barrier=barrier, gamma=gamma, omega=omega)


def tunneling_amplitude(physics: TrianglePhysics) -> float:
    """Order-of-magnitude estimate Delta ~ Omega exp(-2 E_J(alpha) / Omega)."""
    if physics.omega <= 0:
        raise ValueError("oscillation frequency is zero; tunneling estimate undefined at alpha_c")
    return physics.omega * math.exp(-2.0 * physics.barrier / physics.omega)

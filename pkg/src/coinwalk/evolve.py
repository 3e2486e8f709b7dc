"""Direct position-space evolution of the walk.

This is the ground truth the k-space machinery is checked against: pure
states for unitary walks and full density operators on a fixed position
window for walks with a noisy coin.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .channel import KrausChannel, step_channels
from .coin import Walk, coin_state, step_coins
from .config import Tolerances, resolve
from .errors import WindowOverflow

__all__ = [
    "WalkState",
    "DensityState",
    "PositionDistribution",
    "MomentSeries",
    "initial_walk_state",
    "initial_density_state",
    "step_unitary",
    "step_density",
    "distribution",
    "moments",
    "simulate_pure",
    "simulate_density",
    "classical_reference",
]


@dataclass(frozen=True, eq=False)
class WalkState:
    """Pure state ``amplitudes[i, c]`` for position ``offset + i`` and coin index ``c``."""

    t: int
    offset: int
    amplitudes: np.ndarray

    @property
    def positions(self) -> np.ndarray:
        return self.offset + np.arange(self.amplitudes.shape[0])

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True, eq=False)
class DensityState:
    """Density operator ``rho[i, c, j, c']`` on positions ``[-tmax, tmax]``."""

    t: int
    tmax: int
    rho: np.ndarray

    @property
    def positions(self) -> np.ndarray:
        return np.arange(-self.tmax, self.tmax + 1)

    def matrix(self) -> np.ndarray:
        n = self.rho.shape[0] * self.rho.shape[1]
        return self.rho.reshape(n, n)

    def trace(self) -> complex:
        return complex(np.einsum("xaxa->", self.rho))


@dataclass(frozen=True, eq=False)
class PositionDistribution:
    t: int
    positions: np.ndarray
    probabilities: np.ndarray

    def as_dict(self) -> dict[int, float]:
        return {int(x): float(p) for x, p in zip(self.positions, self.probabilities)}


@dataclass(eq=False)
class MomentSeries:
    """Per-step mean and second moment of the position, tagged with the producing method.

    ``residual`` is set by the k-space path: the largest change in any moment
    when the quadrature grid is doubled.
    """

    t: np.ndarray
    mean: np.ndarray
    second_moment: np.ndarray
    method: str
    residual: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=int)
        self.mean = np.asarray(self.mean, dtype=float)
        self.second_moment = np.asarray(self.second_moment, dtype=float)
        if not (self.t.shape == self.mean.shape == self.second_moment.shape):
            raise ValueError("t, mean and second_moment must have the same length")

    @property
    def variance(self) -> np.ndarray:
        return self.second_moment - self.mean**2

    def __len__(self) -> int:
        return len(self.t)

    def at(self, t: int) -> tuple[float, float, float]:
        i = int(np.searchsorted(self.t, t))
        if i >= len(self.t) or self.t[i] != t:
            raise KeyError(t)
        return float(self.mean[i]), float(self.second_moment[i]), float(self.variance[i])

    def records(self):
        return list(zip(self.t.tolist(), self.mean.tolist(), self.second_moment.tolist(),
                        self.variance.tolist()))

    def validate(self, floor: float = -1e-9) -> None:
        bad = np.flatnonzero(self.variance < floor)
        if bad.size:
            raise ValueError(f"negative variance {self.variance[bad[0]]:.3e} at t={self.t[bad[0]]}")


def initial_walk_state(walk: Walk, initial="R", tol: Tolerances | None = None) -> WalkState:
    phi = coin_state(walk, initial, tol)
    return WalkState(0, 0, phi[None, :].astype(np.complex128))


def step_unitary(state: WalkState, walk: Walk) -> WalkState:
    """Flip the active coin, then shift right on ``P_R`` and left on ``P_L``."""
    coins = step_coins(walk)
    c = coins[state.t % len(coins)]
    amps = _kernels.pure_step(np.ascontiguousarray(state.amplitudes), c.flip, c.proj_right, c.proj_left)
    return WalkState(state.t + 1, state.offset - 1, amps)


def initial_density_state(walk: Walk, tmax: int, initial="R", tol: Tolerances | None = None) -> DensityState:
    phi = coin_state(walk, initial, tol)
    d = phi.size
    npos = 2 * tmax + 1
    rho = np.zeros((npos, d, npos, d), dtype=np.complex128)
    rho[tmax, :, tmax, :] = np.outer(phi, phi.conj())
    return DensityState(0, tmax, rho)


def step_density(state: DensityState, walk: Walk, channel: KrausChannel | None) -> DensityState:
    """Apply the channel to the coin, then the unitary step.

    Raises
    ------
    WindowOverflow
        If step ``t+1`` would leave the preallocated window.
    """
    if state.t + 1 > state.tmax:
        raise WindowOverflow(f"step {state.t + 1} exceeds the density window of +-{state.tmax}")
    coins = step_coins(walk)
    chans = step_channels(walk, channel)
    j = state.t % len(coins)
    c = coins[j]
    kops = np.ascontiguousarray(c.flip @ chans[j].ops)
    rho = _kernels.density_step(state.rho, kops, c.proj_right, c.proj_left)
    return DensityState(state.t + 1, state.tmax, rho)


def distribution(state: WalkState | DensityState) -> PositionDistribution:
    """Position probabilities on ``[-t, t]``."""
    t = state.t
    if isinstance(state, WalkState):
        p = np.sum(np.abs(state.amplitudes) ** 2, axis=1)
        pos = state.positions
    else:
        p = np.einsum("xaxa->x", state.rho).real
        pos = state.positions
        keep = np.abs(pos) <= t
        p, pos = p[keep], pos[keep]
    return PositionDistribution(t, pos.copy(), p)


def moments(dist: PositionDistribution) -> tuple[float, float, float]:
    """``(mean, second_moment, variance)`` of a position distribution."""
    x = dist.positions.astype(float)
    p = dist.probabilities
    m1 = float(np.dot(x, p))
    m2 = float(np.dot(x * x, p))
    return m1, m2, m2 - m1 * m1


def _checked_moments(dist: PositionDistribution, tol: Tolerances) -> tuple[float, float, float]:
    total = float(dist.probabilities.sum())
    if abs(total - 1.0) > tol.norm:
        raise RuntimeError(f"probability not conserved at t={dist.t}: total {total!r}")
    return moments(dist)


def simulate_pure(walk: Walk, steps: int, initial="R", tol: Tolerances | None = None,
                  return_state: bool = False):
    tol = resolve(tol)
    state = initial_walk_state(walk, initial, tol)
    mean = np.empty(steps)
    second = np.empty(steps)
    for i in range(steps):
        state = step_unitary(state, walk)
        mean[i], second[i], _ = _checked_moments(distribution(state), tol)
    series = MomentSeries(np.arange(1, steps + 1), mean, second, "direct-pure")
    return (series, state) if return_state else series


def simulate_density(walk: Walk, channel: KrausChannel | None, steps: int, initial="R",
                     tmax: int | None = None, tol: Tolerances | None = None,
                     return_state: bool = False):
    tol = resolve(tol)
    state = initial_density_state(walk, steps if tmax is None else tmax, initial, tol)
    mean = np.empty(steps)
    second = np.empty(steps)
    for i in range(steps):
        state = step_density(state, walk, channel)
        mean[i], second[i], _ = _checked_moments(distribution(state), tol)
    series = MomentSeries(np.arange(1, steps + 1), mean, second, "direct-density")
    return (series, state) if return_state else series


def classical_reference(t: int) -> MomentSeries:
    """Unbiased +-1 random walk: mean 0 and variance ``s`` at every step ``s = 0..t``."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    s = np.arange(t + 1)
    return MomentSeries(s, np.zeros(t + 1), s.astype(float), "closed-form")

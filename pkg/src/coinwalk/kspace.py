"""Position moments computed in wavenumber space.

The walk is translation invariant, so each wavenumber ``k`` evolves an
independent coin operator under ``L_k``. Moments of the position follow from
traces of ``Z = P_R - P_L`` against these operators, integrated over ``k``.
Every integrand at horizon ``t`` is a trigonometric polynomial of degree at
most ``2t``, so the uniform periodic rule with ``N >= 2t+1`` nodes is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .channel import KrausChannel, kraus_grid, step_channels, superop_k
from .coin import CoinSpec, MultiCoinSpec, Walk, coin_state, step_coins, u_k_grid
from .config import Tolerances, resolve
from .errors import DomainError, EmptyWindow, GridTooCoarse
from .evolve import MomentSeries, PositionDistribution
from .linalg import adjoint, devectorize, group_degenerate, solve_on_subspace, traceless_projector, \
    unitary_eigensystem, vectorize

__all__ = [
    "KGrid",
    "AsymptoticEstimate",
    "kspace_moments",
    "first_moment_kspace",
    "second_moment_kspace",
    "distribution_kspace",
    "multicoin_variance_coefficient",
    "dephasing_variance_slope",
    "decoherent_asymptotic_slope",
    "unitary_asymptotic_coefficient",
    "fit_growth",
]


@dataclass(frozen=True)
class KGrid:
    """Uniform periodic rule: nodes ``-pi + 2 pi j / N``, each weighted ``1/N`` of ``dk/2pi``."""

    n_points: int

    def __post_init__(self):
        if self.n_points < 1:
            raise ValueError(f"grid needs at least one node, got {self.n_points}")

    @classmethod
    def for_steps(cls, steps: int) -> "KGrid":
        return cls(2 * steps + 2)

    @property
    def nodes(self) -> np.ndarray:
        return -np.pi + 2 * np.pi * np.arange(self.n_points) / self.n_points

    @property
    def weight(self) -> float:
        return 2 * np.pi / self.n_points

    def doubled(self) -> "KGrid":
        return KGrid(2 * self.n_points)

    def check(self, steps: int) -> None:
        if self.n_points < 2 * steps + 1:
            raise GridTooCoarse(f"{self.n_points} nodes cannot integrate degree {2 * steps} exactly; "
                                f"need at least {2 * steps + 1}")


@dataclass
class AsymptoticEstimate:
    model: str  # unitary-multicoin | unitary-general | decoherent-dephasing | decoherent-general
    leading_coefficient: float
    order: str  # quadratic | linear
    subleading: float | None = None
    residual: float | None = None
    meta: dict = field(default_factory=dict)


def _per_node(walk: Walk, channel: KrausChannel | None, rho0: np.ndarray, steps: int,
              grid: KGrid) -> tuple[np.ndarray, np.ndarray]:
    coins = step_coins(walk)
    chans = step_channels(walk, channel)
    ks = grid.nodes
    ops = np.ascontiguousarray(np.stack([kraus_grid(c, a, ks) for c, a in zip(coins, chans)]))
    zs = np.ascontiguousarray(np.stack([c.z for c in coins]))
    return _kernels.kspace_traces(ops, zs, np.ascontiguousarray(rho0), steps)


def _moments_on(walk, channel, rho0, steps, grid):
    first, second = _per_node(walk, channel, rho0, steps, grid)
    # node average in fixed order, then running sum over steps
    return np.cumsum(first.mean(axis=1)), np.cumsum(second.mean(axis=1))


def kspace_moments(walk: Walk, channel: KrausChannel | None, steps: int, initial="R",
                   grid: KGrid | None = None, check_residual: bool = True,
                   tol: Tolerances | None = None) -> MomentSeries:
    """Mean and second moment for ``t = 1..steps`` from wavenumber-space traces.

    The mean accumulates ``Tr Z_j s_j`` over steps; the second moment adds,
    per step, ``Tr Z_j^2 s_j`` plus the correlation of the current
    displacement with every earlier one, the latter carried forward in a
    single accumulated operator so the cost is linear in ``steps``.
    """
    if steps < 1:
        raise ValueError(f"steps must be positive, got {steps}")
    grid = KGrid.for_steps(steps) if grid is None else grid
    grid.check(steps)
    phi = coin_state(walk, initial, tol)
    rho0 = np.outer(phi, phi.conj())
    mean, second = _moments_on(walk, channel, rho0, steps, grid)
    residual = None
    if check_residual:
        m2, s2 = _moments_on(walk, channel, rho0, steps, grid.doubled())
        residual = float(max(np.max(np.abs(m2 - mean)), np.max(np.abs(s2 - second))))
    return MomentSeries(np.arange(1, steps + 1), mean, second, "kspace", residual,
                        {"kgrid": grid.n_points})


def first_moment_kspace(walk: Walk, channel: KrausChannel | None, initial, steps: int,
                        grid: KGrid | None = None) -> np.ndarray:
    return kspace_moments(walk, channel, steps, initial, grid, check_residual=False).mean


def second_moment_kspace(walk: Walk, channel: KrausChannel | None, initial, steps: int,
                         grid: KGrid | None = None) -> np.ndarray:
    return kspace_moments(walk, channel, steps, initial, grid, check_residual=False).second_moment


def distribution_kspace(walk: Walk, channel: KrausChannel | None, initial, steps: int,
                        grid: KGrid | None = None) -> PositionDistribution:
    """``p(x, t)`` from the off-diagonal superoperators on a ``N x N`` wavenumber grid.

    Costs ``O(N^2 t)`` small matrix products; meant for short horizons.
    """
    grid = KGrid.for_steps(steps) if grid is None else grid
    grid.check(steps)
    coins = step_coins(walk)
    chans = step_channels(walk, channel)
    ks = grid.nodes
    phi = coin_state(walk, initial)
    n, d = len(ks), phi.size
    x = np.broadcast_to(np.outer(phi, phi.conj()), (n, n, d, d)).copy()
    for j in range(steps):
        ops = kraus_grid(coins[j % len(coins)], chans[j % len(chans)], ks)  # (N, K, D, D)
        x = np.einsum("akij,abjl,bkml->abim", ops, x, ops.conj(), optimize=True)
    tr = np.einsum("abii->ab", x)
    pos = np.arange(-steps, steps + 1)
    phase = np.exp(1j * np.outer(pos, ks))  # <x|k> = e^{ikx}
    p = np.einsum("xa,ab,xb->x", phase, tr, phase.conj()).real / n**2
    return PositionDistribution(steps, pos, p)


def multicoin_variance_coefficient(m: int) -> float:
    """Long-time ``t^2`` coefficient of the variance for ``m`` cyclic Hadamard coins."""
    if m < 1:
        raise ValueError(f"coin count must be at least 1, got {m}")
    return (3.0 - math.sqrt(8.0) + 1.0 / m) / math.sqrt(32.0)


def dephasing_variance_slope(theta: float, tol: Tolerances | None = None) -> float:
    """Long-time variance slope ``cot^2 2theta + csc^2 2theta`` of the dephased Hadamard walk."""
    tol = resolve(tol)
    if not np.isfinite(theta) or theta <= 0 or theta > np.pi / 4 + tol.theta_slack:
        raise DomainError(f"slope formula needs theta in (0, pi/4]; it diverges at 0 (got {theta!r})")
    theta = min(theta, np.pi / 4)
    s = math.sin(2 * theta)
    c = math.cos(2 * theta)
    return (c * c + 1.0) / (s * s)


def _resolvent_integral(coin: CoinSpec, channel: KrausChannel, grid: KGrid, tol) -> float:
    d = coin.dim
    proj = traceless_projector(d)
    z = coin.z
    vz = vectorize(z)
    acc = np.empty(grid.n_points)
    eye = np.eye(d * d)
    for i, k in enumerate(grid.nodes):
        lk = superop_k(coin, channel, k).matrix
        x = solve_on_subspace(eye - lk, lk @ vz, proj, tol)
        acc[i] = np.trace(z @ devectorize(x)).real
    return float(np.trace(z @ z).real / d + 2.0 / d * acc.mean())


def decoherent_asymptotic_slope(coin: CoinSpec, channel: KrausChannel, grid: KGrid | None = None,
                                tol: Tolerances | None = None) -> AsymptoticEstimate:
    """Long-time slope of the second moment under a noisy coin.

    Evaluates ``1 + (2/D) int dk/2pi Tr Z (1 - L_k)^{-1} L_k Z`` with the
    resolvent taken on traceless operators, where ``1 - L_k`` is invertible
    whenever the noise removes every unit-modulus eigenvalue but the one
    belonging to the identity.

    Raises
    ------
    SingularOnSubspace
        When the restricted resolvent is too ill-conditioned (noise too weak).
    """
    tol = resolve(tol)
    if isinstance(coin, MultiCoinSpec):
        raise NotImplementedError("the resolvent slope is implemented for a single coin")
    grid = KGrid(1024) if grid is None else grid
    value = _resolvent_integral(coin, channel, grid, tol)
    check = _resolvent_integral(coin, channel, grid.doubled(), tol)
    return AsymptoticEstimate("decoherent-general", value, "linear", residual=float(abs(check - value)),
                              meta={"kgrid": grid.n_points})


def _period_velocity(coins: list[CoinSpec], ks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Period propagator ``V_k`` and summed Heisenberg displacement ``W_k`` per node."""
    n = len(ks)
    d = coins[0].dim
    g = np.broadcast_to(np.eye(d, dtype=np.complex128), (n, d, d)).copy()
    w = np.zeros((n, d, d), dtype=np.complex128)
    for c in coins:
        g = u_k_grid(c, ks) @ g
        w += adjoint(g) @ c.z @ g
    return g, w


def _unitary_coefficient(coins, phi, grid, tol) -> tuple[float, float]:
    period = len(coins)
    v, w = _period_velocity(coins, grid.nodes)
    drift = np.empty(grid.n_points)
    spread = np.empty(grid.n_points)
    for i in range(grid.n_points):
        vals, vecs = unitary_eigensystem(v[i], tol)
        c = adjoint(vecs) @ phi
        wb = adjoint(vecs) @ w[i] @ vecs
        avg = np.zeros_like(wb)
        # keep only the non-oscillating blocks of W in the eigenbasis
        for grp in group_degenerate(vals, tol.degeneracy):
            avg[np.ix_(grp, grp)] = wb[np.ix_(grp, grp)]
        ac = avg @ c
        drift[i] = np.vdot(c, ac).real
        spread[i] = np.vdot(ac, ac).real
    mean_rate = float(drift.mean()) / period
    return float(spread.mean()) / period**2 - mean_rate**2, mean_rate


def unitary_asymptotic_coefficient(walk: Walk, initial="R", grid: KGrid | None = None,
                                   tol: Tolerances | None = None) -> AsymptoticEstimate:
    """``t^2`` coefficient of the variance of a noiseless walk at long times.

    The per-period displacement operator is averaged over the eigenbasis of
    the period propagator: only blocks between (near-)equal eigenvalues
    survive the time average, which covers degenerate spectra through the
    full within-block cross terms. ``meta["drift"]`` is the limiting mean
    velocity ``<x>/t``.
    """
    tol = resolve(tol)
    grid = KGrid(4096) if grid is None else grid
    coins = step_coins(walk)
    phi = coin_state(walk, initial, tol)
    coef, drift = _unitary_coefficient(coins, phi, grid, tol)
    check, _ = _unitary_coefficient(coins, phi, grid.doubled(), tol)
    model = "unitary-multicoin" if isinstance(walk, MultiCoinSpec) else "unitary-general"
    return AsymptoticEstimate(model, coef, "quadratic", residual=abs(check - coef),
                              meta={"drift": drift, "kgrid": grid.n_points})


def fit_growth(series: MomentSeries, window: tuple[int, int] | None = None,
               model: str = "linear") -> tuple[float, float]:
    """Fit the variance of ``series`` over ``window`` (inclusive step range).

    ``linear`` is a least-squares line ``a t + b`` and returns ``a``;
    ``quadratic`` returns the mean of ``variance / t^2``, which averages out
    the bounded oscillation around the ``t^2`` law. The second value is the
    RMS deviation of the fitted model. The default window is the second half
    of the series.
    """
    t = series.t
    if window is None:
        hi = int(t.max()) if len(t) else 0
        window = (max(1, math.ceil(hi / 2)), hi)
    lo, hi = window
    if lo < 1:
        raise EmptyWindow(f"window must start at t >= 1, got {lo}")
    sel = (t >= lo) & (t <= hi)
    if not np.any(sel):
        raise EmptyWindow(f"no steps of the series fall in [{lo}, {hi}]")
    ts = t[sel].astype(float)
    var = series.variance[sel]
    if model == "quadratic":
        coef = float(np.mean(var / ts**2))
        resid = var - coef * ts**2
    elif model == "linear":
        if ts.size == 1:
            coef = float(var[0] / ts[0])
            resid = np.zeros(1)
        else:
            coef, icpt = np.polyfit(ts, var, 1)
            coef = float(coef)
            resid = var - (coef * ts + icpt)
    else:
        raise ValueError(f"model must be 'linear' or 'quadratic', got {model!r}")
    return coef, float(np.sqrt(np.mean(resid**2)))

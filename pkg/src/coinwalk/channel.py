"""Unital Kraus channels on the coin and the per-wavenumber evolution superoperators.

Within one step the channel acts first and the flip-and-shift second, so the
superoperator at wavenumbers ``(k, k')`` is
``X -> sum_n U_k A_n X A_n^dag U_{k'}^dag``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coin import CoinSpec, MultiCoinSpec, Walk, _embed, step_coins, u_k, u_k_grid
from .config import Tolerances, resolve
from .errors import DimensionMismatch, DomainError, InvalidChannel
from .linalg import adjoint, as_matrix, devectorize, vectorize

__all__ = [
    "KrausChannel",
    "SuperOperator",
    "dephasing_channel",
    "identity_channel",
    "superop_k",
    "superop_offdiag",
    "step_channels",
    "kraus_grid",
]


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Completely positive, trace-preserving and unital map ``X -> sum A X A^dag``."""

    ops: tuple
    tol: Tolerances = field(default=None, repr=False)

    def __post_init__(self):
        tol = resolve(self.tol)
        ops = [as_matrix(a, "Kraus operator") for a in self.ops]
        if not ops:
            raise InvalidChannel("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        if any(a.shape != (d, d) for a in ops):
            raise InvalidChannel("Kraus operators must all be square of the same size")
        stack = np.array(ops)
        eye = np.eye(d)
        tp = np.max(np.abs(np.sum(adjoint(stack) @ stack, axis=0) - eye))
        un = np.max(np.abs(np.sum(stack @ adjoint(stack), axis=0) - eye))
        if tp > tol.kraus:
            raise InvalidChannel(f"sum A^dag A deviates from I by {tp:.2e} (not trace preserving)")
        if un > tol.kraus:
            raise InvalidChannel(f"sum A A^dag deviates from I by {un:.2e} (not unital)")
        stack.flags.writeable = False
        object.__setattr__(self, "ops", stack)
        object.__setattr__(self, "tol", tol)

    @property
    def dim(self) -> int:
        return self.ops.shape[1]

    def apply(self, chi) -> np.ndarray:
        chi = as_matrix(chi, "chi")
        return np.sum(self.ops @ chi @ adjoint(self.ops), axis=0)

    def embed(self, slot: int, m: int) -> "KrausChannel":
        """The same channel acting on one slot of an ``m``-coin register."""
        return KrausChannel(tuple(_embed(a, slot, m) for a in self.ops), self.tol)


@dataclass(frozen=True, eq=False)
class SuperOperator:
    """``D^2 x D^2`` matrix acting on column-stacked ``D x D`` operators."""

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.matrix.shape[0])))

    def apply(self, x) -> np.ndarray:
        return devectorize(self.matrix @ vectorize(x))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.matrix)

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues())))


def dephasing_channel(theta: float, tol: Tolerances | None = None) -> KrausChannel:
    """Pure dephasing of a two-level coin with angle ``theta`` in ``[0, pi/4]``.

    ``A_{0,1} = (e^{+-i theta}|R><R| + e^{-+i theta}|L><L|)/sqrt2``; coherences
    between R and L are multiplied by ``cos(2 theta)`` per application.
    """
    tol = resolve(tol)
    theta = float(theta)
    if not np.isfinite(theta) or theta < 0 or theta > np.pi / 4 + tol.theta_slack:
        raise DomainError(f"dephasing angle must lie in [0, pi/4], got {theta!r}")
    theta = min(theta, np.pi / 4)
    a0 = np.diag([np.exp(1j * theta), np.exp(-1j * theta)]) / np.sqrt(2.0)
    a1 = np.diag([np.exp(-1j * theta), np.exp(1j * theta)]) / np.sqrt(2.0)
    return KrausChannel((a0, a1), tol)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel((np.eye(dim, dtype=np.complex128),))


def _check_dims(coin: CoinSpec, channel: KrausChannel) -> None:
    if channel.dim != coin.dim:
        raise DimensionMismatch(f"channel acts on dimension {channel.dim}, coin has {coin.dim}")


def superop_offdiag(coin: CoinSpec, channel: KrausChannel, k: float, kprime: float) -> SuperOperator:
    """Superoperator ``X -> sum_n U_k A_n X A_n^dag U_{k'}^dag``."""
    _check_dims(coin, channel)
    left = u_k(coin, k) @ channel.ops
    right = u_k(coin, kprime) @ channel.ops
    mat = sum(np.kron(np.conj(r), l) for l, r in zip(left, right))
    return SuperOperator(mat)


def superop_k(coin: CoinSpec, channel: KrausChannel, k: float) -> SuperOperator:
    """Diagonal superoperator ``L_k``; unital and trace preserving."""
    return superop_offdiag(coin, channel, k, k)


def step_channels(walk: Walk, channel: KrausChannel | None) -> list[KrausChannel]:
    """Channels for one period of the step schedule, aligned with ``step_coins``.

    A two-level channel paired with a multicoin walk acts on the active slot.
    """
    coins = step_coins(walk)
    if channel is None:
        return [identity_channel(c.dim) for c in coins]
    if isinstance(walk, MultiCoinSpec) and channel.dim == walk.base.dim and walk.dim != channel.dim:
        return [channel.embed(j, walk.m) for j in range(walk.m)]
    for c in coins:
        _check_dims(c, channel)
    return [channel] * len(coins)


def kraus_grid(coin: CoinSpec, channel: KrausChannel, ks: Sequence[float]) -> np.ndarray:
    """Products ``U_k A_n`` over a wavenumber grid, shape ``(N, K, D, D)``."""
    _check_dims(coin, channel)
    uk = u_k_grid(coin, ks)
    return uk[:, None, :, :] @ channel.ops[None, :, :, :]

"""Coin specifications: flip unitary, Right/Left projectors and derived operators.

Basis ordering for the two-level coin is ``0 = |R>``, ``1 = |L>``. Multicoin
registers order their slots left to right in the Kronecker product, and slot
0 is the one flipped at step 0.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .config import Tolerances, resolve
from .errors import ConfigError, InvalidCoin
from .linalg import adjoint, as_matrix, unitarity_defect

__all__ = [
    "CoinSpec",
    "MultiCoinSpec",
    "Walk",
    "hadamard_coin",
    "u_k",
    "u_k_grid",
    "multicoin_composite",
    "step_coins",
    "coin_state",
    "parse_coin_text",
    "load_coin",
    "MAX_COINS",
]

MAX_COINS = 12


@dataclass(frozen=True, eq=False)
class CoinSpec:
    """A validated coin: ``dim``, flip ``U``, and projectors ``P_R``, ``P_L``."""

    flip: np.ndarray
    proj_right: np.ndarray
    proj_left: np.ndarray
    tol: Tolerances = field(default=None, repr=False)

    def __post_init__(self):
        tol = resolve(self.tol)
        u = as_matrix(self.flip, "flip")
        pr = as_matrix(self.proj_right, "proj_right")
        pl = as_matrix(self.proj_left, "proj_left")
        d = u.shape[0]
        if u.shape != (d, d) or pr.shape != (d, d) or pl.shape != (d, d):
            raise InvalidCoin(f"flip {u.shape} and projectors {pr.shape}, {pl.shape} must be equal squares")
        if d % 2:
            raise InvalidCoin(f"coin dimension must be even, got {d}")
        if unitarity_defect(u) > tol.unitary:
            raise InvalidCoin(f"flip is not unitary (defect {unitarity_defect(u):.2e})")
        eye = np.eye(d)
        for name, p in (("P_R", pr), ("P_L", pl)):
            if np.max(np.abs(p @ p - p)) > tol.projector or np.max(np.abs(adjoint(p) - p)) > tol.projector:
                raise InvalidCoin(f"{name} is not an orthogonal projector")
        if np.max(np.abs(pr @ pl)) > tol.projector:
            raise InvalidCoin("P_R and P_L are not mutually orthogonal")
        if np.max(np.abs(pr + pl - eye)) > tol.projector:
            raise InvalidCoin("P_R + P_L must equal the identity")
        tr_r, tr_l = np.trace(pr).real, np.trace(pl).real
        if abs(tr_r - d / 2) > 1e-9 or abs(tr_l - d / 2) > 1e-9:
            raise InvalidCoin(f"biased coin: Tr P_R = {tr_r:g}, Tr P_L = {tr_l:g}, need {d / 2:g} each")
        for name, arr in (("flip", u), ("proj_right", pr), ("proj_left", pl)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "tol", tol)

    @classmethod
    def from_indices(cls, flip, right: Sequence[int], tol: Tolerances | None = None) -> "CoinSpec":
        """Coin whose ``P_R`` projects onto the listed basis indices and ``P_L = I - P_R``."""
        u = as_matrix(flip, "flip")
        d = u.shape[0]
        diag = np.zeros(d)
        idx = list(right)
        if any(i < 0 or i >= d for i in idx) or len(set(idx)) != len(idx):
            raise InvalidCoin(f"right indices {idx} invalid for dimension {d}")
        diag[idx] = 1.0
        pr = np.diag(diag).astype(np.complex128)
        return cls(u, pr, np.eye(d) - pr, tol)

    @property
    def dim(self) -> int:
        return self.flip.shape[0]

    @cached_property
    def z(self) -> np.ndarray:
        """``P_R - P_L``: +1 on the Right subspace, -1 on the Left."""
        z = self.proj_right - self.proj_left
        z.flags.writeable = False
        return z

    def u_k(self, k: float) -> np.ndarray:
        return u_k(self, k)


@dataclass(frozen=True)
class MultiCoinSpec:
    """``m`` copies of ``base`` flipped cyclically, one per step."""

    m: int
    base: CoinSpec = field(default=None)

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise InvalidCoin(f"coin count must be a positive integer, got {self.m!r}")
        if self.m > MAX_COINS:
            raise InvalidCoin(f"at most {MAX_COINS} coins are supported, got {self.m}")
        if self.base is None:
            object.__setattr__(self, "base", hadamard_coin())

    @property
    def dim(self) -> int:
        return self.base.dim ** self.m

    @property
    def period(self) -> int:
        return self.m


Walk = Union[CoinSpec, MultiCoinSpec]


def hadamard_coin() -> CoinSpec:
    """Two-level Hadamard coin, ``H|R> = (|R>+|L>)/sqrt2``, ``H|L> = (|R>-|L>)/sqrt2``."""
    h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)
    return CoinSpec.from_indices(h, [0])


def u_k(coin: CoinSpec, k: float) -> np.ndarray:
    """``(e^{-ik} P_R + e^{ik} P_L) U``, the flip-and-shift at wavenumber ``k``."""
    phase = np.exp(-1j * k) * coin.proj_right + np.exp(1j * k) * coin.proj_left
    return phase @ coin.flip


def u_k_grid(coin: CoinSpec, ks) -> np.ndarray:
    """``u_k`` stacked over an array of wavenumbers, shape ``(len(ks), D, D)``."""
    ks = np.asarray(ks, dtype=float)
    phase = (np.exp(-1j * ks)[:, None, None] * coin.proj_right
             + np.exp(1j * ks)[:, None, None] * coin.proj_left)
    return phase @ coin.flip


def _embed(op: np.ndarray, slot: int, m: int) -> np.ndarray:
    d = op.shape[0]
    left = np.eye(d**slot)
    right = np.eye(d ** (m - slot - 1))
    return np.kron(np.kron(left, op), right)


def multicoin_composite(spec: MultiCoinSpec, step_index: int) -> CoinSpec:
    """Composite coin active at step ``step_index`` (0-based) of a cyclic multicoin walk."""
    if step_index < 0:
        raise ValueError(f"step index must be non-negative, got {step_index}")
    slot = step_index % spec.m
    b = spec.base
    return CoinSpec(
        _embed(b.flip, slot, spec.m),
        _embed(b.proj_right, slot, spec.m),
        _embed(b.proj_left, slot, spec.m),
        b.tol,
    )


def step_coins(walk: Walk) -> list[CoinSpec]:
    """Coins for one period of the step schedule; step ``j`` uses entry ``j % len``."""
    if isinstance(walk, MultiCoinSpec):
        return [multicoin_composite(walk, j) for j in range(walk.m)]
    return [walk]


_NAMED = {
    "R": np.array([1.0, 0.0], dtype=np.complex128),
    "L": np.array([0.0, 1.0], dtype=np.complex128),
    "symmetric": np.array([1.0, 1j], dtype=np.complex128) / np.sqrt(2.0),
}


def coin_state(walk: Walk, initial: Union[str, Sequence[complex], np.ndarray] = "R",
               tol: Tolerances | None = None) -> np.ndarray:
    """Normalized initial coin vector for ``walk``.

    ``initial`` is ``"R"``, ``"L"``, ``"symmetric"`` (``(|R>+i|L>)/sqrt2``) or an
    explicit amplitude vector. For a multicoin walk a named state or a
    single-coin vector is applied to every coin as a product state; a vector
    of the full composite dimension is used as given.
    """
    tol = resolve(tol)
    d = walk.dim
    base_dim = walk.base.dim if isinstance(walk, MultiCoinSpec) else d
    if isinstance(initial, str):
        if initial not in _NAMED:
            raise ConfigError(f"unknown initial state {initial!r}; use R, L, symmetric or amplitudes")
        if base_dim != 2:
            raise ConfigError(f"named initial states need a two-level coin, not dimension {base_dim}")
        vec = _NAMED[initial]
    else:
        vec = np.asarray(initial, dtype=np.complex128).ravel()
    if isinstance(walk, MultiCoinSpec) and vec.size == base_dim and d != base_dim:
        single = vec
        vec = single
        for _ in range(walk.m - 1):
            vec = np.kron(vec, single)
    if vec.size != d:
        raise ConfigError(f"initial state has {vec.size} amplitudes, coin dimension is {d}")
    nrm = np.linalg.norm(vec)
    if abs(nrm - 1.0) > tol.norm:
        raise ConfigError(f"initial coin state has norm {nrm:.12g}, expected 1")
    return vec.copy()


_SECTION = re.compile(r"^\s*(\w+)\s*[=:]\s*(.*)$")


def parse_coin_text(text: str, tol: Tolerances | None = None) -> CoinSpec:
    """Parse a plain-text coin description.

    Format (``#`` starts a comment, entries separated by whitespace or commas)::

        dim = 2
        flip = 0.7071067811865476 0.7071067811865476
               0.7071067811865476 -0.7071067811865476
        right = 0

    ``flip`` holds ``dim*dim`` row-major complex literals (``1+2j`` style);
    ``right`` lists the basis indices spanned by ``P_R``.
    """
    fields: dict[str, list[str]] = {}
    current = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m and m.group(1).lower() in ("dim", "flip", "right"):
            current = m.group(1).lower()
            fields[current] = []
            line = m.group(2)
        if current is None:
            raise ConfigError(f"coin file: unexpected line {raw!r}")
        fields[current].extend(tok for tok in re.split(r"[\s,]+", line) if tok)
    missing = {"dim", "flip", "right"} - fields.keys()
    if missing:
        raise ConfigError(f"coin file missing {sorted(missing)}")
    try:
        d = int(fields["dim"][0])
        entries = [complex(tok.replace("i", "j")) for tok in fields["flip"]]
        right = [int(tok) for tok in fields["right"]]
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"coin file: {exc}") from None
    if len(entries) != d * d:
        raise ConfigError(f"coin file: flip has {len(entries)} entries, need {d * d}")
    return CoinSpec.from_indices(np.array(entries).reshape(d, d), right, tol)


def load_coin(path, tol: Tolerances | None = None) -> CoinSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_coin_text(fh.read(), tol)

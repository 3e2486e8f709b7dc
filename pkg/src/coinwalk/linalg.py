"""Dense complex linear algebra used throughout the package.

Operators are vectorized by column stacking: entry ``(r, c)`` of a ``D x D``
operator lands at index ``c * D + r``. Under this convention the map
``X -> A @ X @ B`` has matrix ``kron(B.T, A)``.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

from .config import Tolerances, resolve
from .errors import DimensionMismatch, NotUnitary, SingularOnSubspace

__all__ = [
    "as_matrix",
    "adjoint",
    "kron",
    "vectorize",
    "devectorize",
    "sandwich_superop",
    "unitarity_defect",
    "eig_unitary",
    "unitary_eigensystem",
    "group_degenerate",
    "traceless_projector",
    "solve_on_subspace",
]


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {m.shape}")
    return m


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def vectorize(x) -> np.ndarray:
    x = as_matrix(x, "operator")
    if x.shape[0] != x.shape[1]:
        raise DimensionMismatch(f"operator must be square, got {x.shape}")
    return x.reshape(-1, order="F")


def devectorize(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).ravel()
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise DimensionMismatch(f"length {v.size} is not a perfect square")
    return v.reshape((d, d), order="F")


def sandwich_superop(a, b) -> np.ndarray:
    """Matrix of ``X -> a @ X @ b`` acting on vectorized operators."""
    return np.kron(as_matrix(b, "b").T, as_matrix(a, "a"))


def unitarity_defect(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(adjoint(u) @ u - np.eye(u.shape[-1]))))


def unitary_eigensystem(u, tol: Tolerances | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and orthonormal eigenvectors (columns) of a unitary matrix.

    A complex Schur decomposition is used: for a normal matrix the triangular
    factor is diagonal and the Schur vectors are an orthonormal eigenbasis, so
    degenerate eigenspaces come out orthogonalized.
    """
    tol = resolve(tol)
    u = as_matrix(u, "u")
    if u.shape[0] != u.shape[1]:
        raise DimensionMismatch(f"u must be square, got {u.shape}")
    defect = unitarity_defect(u)
    if defect > tol.unitary:
        raise NotUnitary(f"||U^dag U - I||_max = {defect:.3e} exceeds {tol.unitary:.1e}")
    t, q = scipy.linalg.schur(u, output="complex")
    vals = np.diag(t).copy()
    # unit modulus is exact for a unitary; strip rounding drift
    vals /= np.abs(vals)
    return vals, q


def eig_unitary(u, tol: Tolerances | None = None) -> list[tuple[complex, np.ndarray]]:
    """Eigenpairs ``(lambda, v)`` of a unitary matrix, checked against tolerance."""
    tol = resolve(tol)
    vals, vecs = unitary_eigensystem(u, tol)
    u = np.asarray(u, dtype=np.complex128)
    resid = np.max(np.abs(u @ vecs - vecs * vals))
    ortho = np.max(np.abs(adjoint(vecs) @ vecs - np.eye(len(vals))))
    if resid > tol.eig or ortho > tol.eig:
        raise NotUnitary(
            f"eigendecomposition failed its checks (residual {resid:.2e}, orthonormality {ortho:.2e})"
        )
    return [(complex(vals[i]), vecs[:, i].copy()) for i in range(len(vals))]


def group_degenerate(vals, tol: float) -> list[np.ndarray]:
    """Cluster unit-modulus eigenvalues whose angular separation is below ``tol``.

    Clusters are formed by chaining neighbours on the circle, including the
    wrap-around between the largest and smallest angle.
    """
    vals = np.asarray(vals)
    n = len(vals)
    if n == 0:
        return []
    ang = np.angle(vals)
    order = np.argsort(ang)
    sa = ang[order]
    gaps = np.diff(sa)
    breaks = np.flatnonzero(gaps >= tol) + 1
    groups = [list(g) for g in np.split(order, breaks)]
    if len(groups) > 1 and (sa[0] + 2 * np.pi - sa[-1]) < tol:
        groups[0] = groups[-1] + groups[0]
        groups.pop()
    return [np.array(sorted(g), dtype=int) for g in groups]


def traceless_projector(dim: int) -> np.ndarray:
    """Orthogonal projector onto vectorized traceless ``dim x dim`` operators."""
    vi = vectorize(np.eye(dim)) / np.sqrt(dim)
    return np.eye(dim * dim, dtype=np.complex128) - np.outer(vi, vi.conj())


def solve_on_subspace(m, rhs, projector, tol: Tolerances | None = None) -> np.ndarray:
    """Solve ``m @ x = rhs`` with ``x`` restricted to the range of ``projector``.

    Raises
    ------
    ValueError
        If ``rhs`` is not inside the subspace.
    SingularOnSubspace
        If the one-norm condition number of the restricted system exceeds
        ``tol.condition_bound``.
    """
    tol = resolve(tol)
    m = as_matrix(m, "m")
    p = as_matrix(projector, "projector")
    rhs = np.asarray(rhs, dtype=np.complex128).ravel()
    n = rhs.size
    if m.shape != (n, n) or p.shape != (n, n):
        raise DimensionMismatch(f"shapes m{m.shape}, projector{p.shape}, rhs({n},) disagree")

    w, v = np.linalg.eigh((p + adjoint(p)) / 2)
    q = v[:, w > 0.5]
    scale = max(1.0, float(np.linalg.norm(rhs)))
    off = float(np.linalg.norm(rhs - q @ (adjoint(q) @ rhs)))
    if off > tol.subspace * scale:
        raise ValueError(f"rhs lies {off:.2e} outside the projector range")
    if q.shape[1] == 0:
        return np.zeros(n, dtype=np.complex128)

    mr = adjoint(q) @ m @ q
    try:
        cond = float(np.real(np.linalg.cond(mr, 1)))
    except np.linalg.LinAlgError:
        cond = np.inf
    if not np.isfinite(cond) or cond > tol.condition_bound:
        raise SingularOnSubspace(
            f"restricted system condition {cond:.3e} exceeds {tol.condition_bound:.1e}"
        )
    y = np.linalg.solve(mr, adjoint(q) @ rhs)
    return q @ y

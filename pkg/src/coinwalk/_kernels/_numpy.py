"""Vectorized NumPy kernels. Reference path and fallback when numba is unavailable."""
import numpy as np


def kspace_traces(ops, zs, rho0, steps):
    """Per-node traces driving the k-space moments.

    ``ops`` has shape ``(P, N, K, D, D)`` holding ``U_k A_n`` for each step
    of a period ``P``; ``zs`` is ``(P, D, D)``. Returns ``first`` and
    ``second`` of shape ``(steps, N)``: ``first[j-1] = Tr Z_j s_j`` and
    ``second[j-1] = Tr Z_j^2 s_j + Re Tr Z_j W_j`` where ``s_j`` is the coin
    operator after ``j`` steps and ``W_j`` accumulates the propagated
    ``Z s + s Z`` insertions of earlier steps.
    """
    period, n = ops.shape[0], ops.shape[1]
    d = rho0.shape[0]
    first = np.empty((steps, n))
    second = np.empty((steps, n))
    sigma = np.broadcast_to(rho0, (n, d, d)).astype(np.complex128)
    w = np.zeros((n, d, d), dtype=np.complex128)
    for j in range(steps):
        kops = ops[j % period]
        kadj = np.conj(np.swapaxes(kops, -1, -2))
        z = zs[j % period]
        if j > 0:
            zp = zs[(j - 1) % period]
            w = w + zp @ sigma + sigma @ zp
            w = np.sum(kops @ w[:, None] @ kadj, axis=1)
        sigma = np.sum(kops @ sigma[:, None] @ kadj, axis=1)
        first[j] = np.einsum("ab,nba->n", z, sigma).real
        second[j] = np.einsum("ab,nba->n", z @ z, sigma).real + np.einsum("ab,nba->n", z, w).real
    return first, second


def pure_step(psi, flip, proj_right, proj_left):
    """One flip-then-shift step on amplitudes ``psi[x, c]``; output grows by 2 rows."""
    phi = psi @ flip.T
    out = np.zeros((psi.shape[0] + 2, psi.shape[1]), dtype=np.complex128)
    out[2:] += phi @ proj_right.T
    out[:-2] += phi @ proj_left.T
    return out


def density_step(rho, kops, proj_right, proj_left):
    """Channel, flip and shift on ``rho[x, c, y, c']`` inside a fixed window.

    ``kops`` holds ``U A_n``. Entries shifted past the window edge are dropped;
    the caller guarantees the support leaves room.
    """
    sigma = np.zeros_like(rho)
    for k in kops:
        sigma += np.einsum("ab,xbyc,dc->xayd", k, rho, k.conj(), optimize=True)
    out = np.zeros_like(rho)
    projs = ((proj_right, 1), (proj_left, -1))
    for pa, sa in projs:
        left = np.einsum("ab,xbyc->xayc", pa, sigma)
        for pb, sb in projs:
            block = np.einsum("xayc,cd->xayd", left, pb)
            out[_dst(sa), :, _dst(sb), :] += block[_src(sa), :, _src(sb), :]
    return out


def _dst(s):
    return slice(1, None) if s > 0 else slice(None, -1)


def _src(s):
    return slice(None, -1) if s > 0 else slice(1, None)

"""numba-compiled kernels with the same signatures as the NumPy path."""
import os

import numba
import numpy as np

if "NUMBA_THREADING_LAYER" not in os.environ and "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
    # skip the TBB probe, which warns on older system TBB builds
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

_opts = dict(cache=True, fastmath=False)


# below this size hand loops beat the BLAS call overhead
_SMALL = 4


@numba.njit(**_opts)
def _mm(a, b, out):
    d = a.shape[0]
    if d > _SMALL:
        out[:, :] = np.dot(a, b)
        return
    for i in range(d):
        for j in range(d):
            acc = 0j
            for m in range(d):
                acc += a[i, m] * b[m, j]
            out[i, j] = acc


@numba.njit(**_opts)
def _sandwich_add(k, x, out, tmp):
    # out += k @ x @ k^dag
    d = k.shape[0]
    _mm(k, x, tmp)
    if d > _SMALL:
        out += np.dot(tmp, np.conj(k).T.copy())
        return
    for i in range(d):
        for j in range(d):
            acc = 0j
            for m in range(d):
                acc += tmp[i, m] * np.conj(k[j, m])
            out[i, j] += acc


@numba.njit(**_opts)
def _trace_prod(a, b):
    d = a.shape[0]
    acc = 0j
    for i in range(d):
        for m in range(d):
            acc += a[i, m] * b[m, i]
    return acc


@numba.njit(parallel=True, **_opts)
def kspace_traces(ops, zs, rho0, steps):
    period, n, nk, d = ops.shape[0], ops.shape[1], ops.shape[2], ops.shape[3]
    first = np.empty((steps, n))
    second = np.empty((steps, n))
    zz = np.empty((period, d, d), dtype=np.complex128)
    for p in range(period):
        _mm(zs[p], zs[p], zz[p])
    for node in numba.prange(n):
        sigma = rho0.copy()
        w = np.zeros((d, d), dtype=np.complex128)
        nxt = np.empty((d, d), dtype=np.complex128)
        tmp = np.empty((d, d), dtype=np.complex128)
        ins = np.empty((d, d), dtype=np.complex128)
        for j in range(steps):
            p = j % period
            if j > 0:
                zp = zs[(j - 1) % period]
                _mm(zp, sigma, ins)
                _mm(sigma, zp, tmp)
                for a in range(d):
                    for b in range(d):
                        ins[a, b] += tmp[a, b] + w[a, b]
                w[:, :] = 0
                for kk in range(nk):
                    _sandwich_add(ops[p, node, kk], ins, w, tmp)
            nxt[:, :] = 0
            for kk in range(nk):
                _sandwich_add(ops[p, node, kk], sigma, nxt, tmp)
            sigma[:, :] = nxt
            first[j, node] = _trace_prod(zs[p], sigma).real
            second[j, node] = _trace_prod(zz[p], sigma).real + _trace_prod(zs[p], w).real
    return first, second


@numba.njit(**_opts)
def pure_step(psi, flip, proj_right, proj_left):
    npos, d = psi.shape
    phi = np.dot(psi, flip.T.copy())
    right = np.dot(phi, proj_right.T.copy())
    left = np.dot(phi, proj_left.T.copy())
    out = np.zeros((npos + 2, d), dtype=np.complex128)
    out[2:] += right
    out[:-2] += left
    return out


@numba.njit(**_opts)
def _basis_shifts(proj_right, proj_left):
    """Per-index shift (+1/-1) when both projectors are diagonal 0/1 matrices, else empty."""
    d = proj_right.shape[0]
    shifts = np.zeros(d, dtype=np.int64)
    for a in range(d):
        for b in range(d):
            if a != b and (proj_right[a, b] != 0 or proj_left[a, b] != 0):
                return np.zeros(0, dtype=np.int64)
        if proj_right[a, a] == 1 and proj_left[a, a] == 0:
            shifts[a] = 1
        elif proj_right[a, a] == 0 and proj_left[a, a] == 1:
            shifts[a] = -1
        else:
            return np.zeros(0, dtype=np.int64)
    return shifts


@numba.njit(parallel=True, **_opts)
def density_step(rho, kops, proj_right, proj_left):
    npos, d = rho.shape[0], rho.shape[1]
    nk = kops.shape[0]
    shifts = _basis_shifts(proj_right, proj_left)
    out = np.zeros_like(rho)
    if shifts.size == d:
        # basis-aligned projectors: the shift is a pure index move
        for x in numba.prange(npos):
            blk = np.empty((d, d), dtype=np.complex128)
            acc = np.empty((d, d), dtype=np.complex128)
            tmp = np.empty((d, d), dtype=np.complex128)
            for y in range(npos):
                nonzero = False
                for a in range(d):
                    for b in range(d):
                        blk[a, b] = rho[x, a, y, b]
                        if blk[a, b] != 0:
                            nonzero = True
                if not nonzero:
                    continue
                acc[:, :] = 0
                for kk in range(nk):
                    _sandwich_add(kops[kk], blk, acc, tmp)
                for a in range(d):
                    xd = x + shifts[a]
                    if xd < 0 or xd >= npos:
                        continue
                    for b in range(d):
                        yd = y + shifts[b]
                        if 0 <= yd < npos:
                            out[xd, a, yd, b] = acc[a, b]
        return out
    sig = np.zeros_like(rho)
    for x in numba.prange(npos):
        blk = np.empty((d, d), dtype=np.complex128)
        acc = np.empty((d, d), dtype=np.complex128)
        tmp = np.empty((d, d), dtype=np.complex128)
        for y in range(npos):
            nonzero = False
            for a in range(d):
                for b in range(d):
                    blk[a, b] = rho[x, a, y, b]
                    if blk[a, b] != 0:
                        nonzero = True
            if not nonzero:
                continue
            acc[:, :] = 0
            for kk in range(nk):
                _sandwich_add(kops[kk], blk, acc, tmp)
            for a in range(d):
                for b in range(d):
                    sig[x, a, y, b] = acc[a, b]
    # gather by destination row so parallel iterations never share output
    for xd in numba.prange(npos):
        blk = np.empty((d, d), dtype=np.complex128)
        half = np.empty((d, d), dtype=np.complex128)
        res = np.empty((d, d), dtype=np.complex128)
        for ia in range(2):
            pa = proj_right if ia == 0 else proj_left
            x = xd - 1 if ia == 0 else xd + 1
            if x < 0 or x >= npos:
                continue
            for ib in range(2):
                pb = proj_right if ib == 0 else proj_left
                for yd in range(npos):
                    y = yd - 1 if ib == 0 else yd + 1
                    if y < 0 or y >= npos:
                        continue
                    for a in range(d):
                        for b in range(d):
                            blk[a, b] = sig[x, a, y, b]
                    _mm(pa, blk, half)
                    _mm(half, pb, res)
                    for a in range(d):
                        for b in range(d):
                            out[xd, a, yd, b] += res[a, b]
    return out

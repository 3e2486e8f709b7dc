"""The numba and NumPy kernel paths must agree."""
import numpy as np
import pytest

from coinwalk import _kernels
from oracles import random_unitary

BACKENDS = _kernels.available_backends()
needs_numba = pytest.mark.skipif("numba" not in BACKENDS, reason="numba not installed")


def _general_coin(rng, d):
    v = random_unitary(rng, d)
    pr = v @ np.diag([1.0] * (d // 2) + [0.0] * (d // 2)) @ v.conj().T
    return random_unitary(rng, d), pr, np.eye(d) - pr


@needs_numba
@pytest.mark.parametrize("d,period,nk", [(2, 1, 2), (4, 2, 1), (4, 3, 2)])
def test_kspace_traces_agree(rng, d, period, nk):
    n, steps = 7, 15
    ops = np.empty((period, n, nk, d, d), dtype=complex)
    for p in range(period):
        for i in range(n):
            u = random_unitary(rng, d)
            for kk in range(nk):
                ops[p, i, kk] = u / np.sqrt(nk)
    zs = np.stack([np.diag(rng.choice([-1.0, 1.0], d)).astype(complex) for _ in range(period)])
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    ref = _kernels.get_backend("numpy").kspace_traces(ops, zs, rho, steps)
    got = _kernels.get_backend("numba").kspace_traces(ops, zs, rho, steps)
    for r, g in zip(ref, got):
        assert np.max(np.abs(r - g)) < 1e-12


@needs_numba
def test_pure_step_agrees(rng):
    flip, pr, pl = _general_coin(rng, 4)
    psi = rng.standard_normal((9, 4)) + 1j * rng.standard_normal((9, 4))
    ref = _kernels.get_backend("numpy").pure_step(psi, flip, pr, pl)
    got = _kernels.get_backend("numba").pure_step(psi, flip, pr, pl)
    assert np.max(np.abs(ref - got)) < 1e-13


@needs_numba
def test_density_step_agrees(rng):
    d, npos = 2, 9
    flip, pr, pl = _general_coin(rng, d)
    a = rng.standard_normal((npos * d, npos * d)) + 1j * rng.standard_normal((npos * d, npos * d))
    rho = (a @ a.conj().T).reshape(npos, d, npos, d)
    # keep the window edges empty so no amplitude is shifted out
    rho[0] = rho[-1] = 0
    rho[:, :, 0] = rho[:, :, -1] = 0
    kops = np.stack([flip / np.sqrt(2), flip @ np.diag([1, -1]) / np.sqrt(2)]).astype(complex)
    ref = _kernels.get_backend("numpy").density_step(rho, kops, pr, pl)
    got = _kernels.get_backend("numba").density_step(rho, kops, pr, pl)
    assert np.max(np.abs(ref - got)) < 1e-12
    assert np.trace(ref.reshape(npos * d, -1)) == pytest.approx(np.trace(rho.reshape(npos * d, -1)))


@pytest.mark.parametrize("backend", BACKENDS)
def test_library_results_identical_per_backend(backend):
    from coinwalk import dephasing_channel, hadamard_coin, kspace_moments, simulate_density
    prev = _kernels.BACKEND
    try:
        _kernels.set_backend(backend)
        k = kspace_moments(hadamard_coin(), dephasing_channel(np.pi / 8), 20, check_residual=False)
        d = simulate_density(hadamard_coin(), dephasing_channel(np.pi / 8), 20)
    finally:
        _kernels.set_backend(prev)
    assert np.max(np.abs(k.second_moment - d.second_moment)) < 1e-10


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.get_backend("cuda")


@needs_numba
def test_density_step_basis_projectors_agree(rng):
    from coinwalk import MultiCoinSpec
    from coinwalk.coin import multicoin_composite
    c = multicoin_composite(MultiCoinSpec(2), 1)
    npos, d = 7, 4
    a = rng.standard_normal((npos * d, npos * d)) + 1j * rng.standard_normal((npos * d, npos * d))
    rho = (a @ a.conj().T).reshape(npos, d, npos, d)
    rho[0] = rho[-1] = 0
    rho[:, :, 0] = rho[:, :, -1] = 0
    kops = np.ascontiguousarray(c.flip[None])
    ref = _kernels.get_backend("numpy").density_step(rho, kops, c.proj_right, c.proj_left)
    got = _kernels.get_backend("numba").density_step(rho, kops, c.proj_right, c.proj_left)
    assert np.max(np.abs(ref - got)) < 1e-12

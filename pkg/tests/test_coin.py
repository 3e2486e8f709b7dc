import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coinwalk.coin import (CoinSpec, MultiCoinSpec, coin_state, hadamard_coin, multicoin_composite,
                           parse_coin_text, u_k)
from coinwalk.errors import ConfigError, InvalidCoin
from coinwalk.linalg import unitarity_defect
from oracles import H, random_unitary

R = np.array([1, 0], dtype=complex)
L = np.array([0, 1], dtype=complex)


def test_hadamard_action(hadamard):
    assert np.allclose(hadamard.flip @ R, (R + L) / np.sqrt(2), atol=1e-16)
    assert np.allclose(hadamard.flip @ L, (R - L) / np.sqrt(2), atol=1e-16)
    assert np.max(np.abs(hadamard.flip @ hadamard.flip - np.eye(2))) < 1e-15
    assert np.array_equal(hadamard.z, np.diag([1, -1]))
    assert hadamard.dim == 2


def test_u_k_special_points(hadamard):
    assert np.max(np.abs(u_k(hadamard, 0.0) - H)) < 1e-15
    assert np.max(np.abs(u_k(hadamard, np.pi) + H)) < 1e-15
    expected = np.diag([-1j, 1j]) @ H
    got = u_k(hadamard, np.pi / 2)
    assert np.max(np.abs(got - expected)) < 1e-15
    assert np.abs(np.linalg.eigvals(got)) == pytest.approx([1, 1], abs=1e-12)


def _coins():
    yield hadamard_coin()
    yield CoinSpec.from_indices(random_unitary(np.random.default_rng(3), 4), [1, 2])
    for m in (2, 3):
        for j in range(m):
            yield multicoin_composite(MultiCoinSpec(m), j)


@pytest.mark.parametrize("coin", list(_coins()), ids=lambda c: f"D{c.dim}")
def test_u_k_unitary_on_grid_and_traceless_z(coin):
    for k in np.linspace(-np.pi, np.pi, 128, endpoint=False):
        assert unitarity_defect(u_k(coin, k)) < 1e-12
    assert abs(np.trace(coin.z)) < 1e-14
    assert np.max(np.abs(coin.z @ coin.z - np.eye(coin.dim))) < 1e-14


@pytest.mark.parametrize("coin", list(_coins()), ids=lambda c: f"D{c.dim}")
def test_u_k_derivative_identity(coin):
    h = 1e-5
    for k in np.linspace(-3.0, 3.0, 13):
        fd = (u_k(coin, k + h) - u_k(coin, k - h)) / (2 * h)
        exact = -1j * coin.z @ u_k(coin, k)
        assert np.max(np.abs(fd - exact)) < 1e-8


def test_multicoin_single_coin_matches_base(hadamard):
    spec = MultiCoinSpec(1)
    for j in range(4):
        c = multicoin_composite(spec, j)
        assert np.array_equal(c.flip, hadamard.flip)
        assert np.array_equal(c.proj_right, hadamard.proj_right)


def test_multicoin_cyclic_schedule():
    spec = MultiCoinSpec(2)
    c0, c1, c2 = (multicoin_composite(spec, j) for j in range(3))
    assert np.array_equal(c0.flip, c2.flip)
    assert not np.array_equal(c0.flip, c1.flip)
    assert np.max(np.abs(c0.flip - np.kron(H, np.eye(2)))) < 1e-15
    assert np.max(np.abs(c1.flip - np.kron(np.eye(2), H))) < 1e-15
    assert np.array_equal(np.diag(c1.z).real, [1, -1, 1, -1])
    assert np.array_equal(np.diag(c0.z).real, [1, 1, -1, -1])


def test_multicoin_cap():
    with pytest.raises(InvalidCoin):
        MultiCoinSpec(13)
    with pytest.raises(InvalidCoin):
        MultiCoinSpec(0)


def test_rejects_biased_and_invalid():
    with pytest.raises(InvalidCoin):
        CoinSpec.from_indices(np.eye(4), [0])  # Tr P_R = 1 != 2
    with pytest.raises(InvalidCoin):
        CoinSpec.from_indices(np.array([[1, 1], [0, 1]]), [0])
    with pytest.raises(InvalidCoin):
        CoinSpec(H, np.diag([1, 0]), np.diag([1, 0]))


def test_coin_is_immutable(hadamard):
    with pytest.raises(ValueError):
        hadamard.flip[0, 0] = 2


@settings(max_examples=25, deadline=None)
@given(a=st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       b=st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_coin_state_normalization_enforced(a, b):
    v = np.array([a, b])
    n = np.linalg.norm(v)
    if abs(n - 1) > 1e-10:
        with pytest.raises(ConfigError):
            coin_state(hadamard_coin(), v)
    else:
        assert np.allclose(coin_state(hadamard_coin(), v), v)


def test_named_and_product_states():
    assert np.allclose(coin_state(hadamard_coin(), "symmetric"), np.array([1, 1j]) / np.sqrt(2))
    v = coin_state(MultiCoinSpec(3), "R")
    assert v.size == 8 and v[0] == 1 and np.sum(np.abs(v)) == 1


def test_parse_coin_text():
    text = """
    # Hadamard coin
    dim = 2
    flip = 0.7071067811865476, 0.7071067811865476
           0.7071067811865476 -0.7071067811865476
    right = 0
    """
    c = parse_coin_text(text, tol=None)
    assert np.max(np.abs(c.flip - H)) < 1e-15
    assert np.array_equal(c.z, np.diag([1, -1]))
    with pytest.raises(ConfigError):
        parse_coin_text("dim = 2\nflip = 1 0 0\nright = 0")

import math

import numpy as np
import pytest

from coinwalk import CoinSpec, MultiCoinSpec, dephasing_channel, hadamard_coin, identity_channel
from coinwalk.errors import DomainError, EmptyWindow, GridTooCoarse, SingularOnSubspace
from coinwalk.evolve import MomentSeries, distribution, simulate_density, simulate_pure
from coinwalk.kspace import (KGrid, decoherent_asymptotic_slope, dephasing_variance_slope,
                             distribution_kspace, first_moment_kspace, fit_growth, kspace_moments,
                             multicoin_variance_coefficient, second_moment_kspace,
                             unitary_asymptotic_coefficient)
from oracles import full_space_density, path_sum_distribution

THETAS = [np.pi / 16, np.pi / 8, 3 * np.pi / 16, np.pi / 4]


def test_grid_nodes():
    g = KGrid(4)
    assert np.allclose(g.nodes, [-np.pi, -np.pi / 2, 0, np.pi / 2])
    assert g.weight == pytest.approx(np.pi / 2)
    assert KGrid.for_steps(10).n_points == 22


def test_grid_too_coarse(hadamard):
    with pytest.raises(GridTooCoarse):
        kspace_moments(hadamard, None, 10, grid=KGrid(20))
    kspace_moments(hadamard, None, 10, grid=KGrid(21))


def test_first_steps_by_hand(hadamard):
    mean = first_moment_kspace(hadamard, identity_channel(2), "R", 3)
    second = second_moment_kspace(hadamard, identity_channel(2), "R", 3)
    # path sums: t=1 {+-1: 1/2}; t=2 {2: 1/4, 0: 1/2, -2: 1/4}; t=3 mean 1/2
    assert mean == pytest.approx([0.0, 0.0, 0.5], abs=1e-14)
    assert second == pytest.approx([1.0, 2.0, 3.0], abs=1e-14)


def test_second_moment_one_step_any_start(hadamard):
    for init in ("R", "L", "symmetric"):
        assert second_moment_kspace(hadamard, None, init, 1)[0] == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("walk", [hadamard_coin(), MultiCoinSpec(2), MultiCoinSpec(3)], ids=["M1", "M2", "M3"])
@pytest.mark.parametrize("initial", ["R", "symmetric"])
def test_unitary_matches_direct(walk, initial):
    d = simulate_pure(walk, 30, initial)
    k = kspace_moments(walk, None, 30, initial)
    assert np.max(np.abs(d.mean - k.mean)) < 1e-10
    assert np.max(np.abs(d.second_moment - k.second_moment)) < 1e-10


@pytest.mark.parametrize("theta", [np.pi / 16, np.pi / 8, np.pi / 4])
def test_dephasing_matches_density(theta, hadamard):
    ch = dephasing_channel(theta)
    d = simulate_density(hadamard, ch, 30)
    k = kspace_moments(hadamard, ch, 30)
    assert np.max(np.abs(d.mean - k.mean)) < 1e-10
    assert np.max(np.abs(d.second_moment - k.second_moment)) < 1e-10


def test_grid_doubling_stable(hadamard):
    k = kspace_moments(hadamard, dephasing_channel(np.pi / 8), 50)
    assert k.residual < 1e-12
    a = kspace_moments(hadamard, None, 50, grid=KGrid(101), check_residual=False)
    b = kspace_moments(hadamard, None, 50, grid=KGrid(202), check_residual=False)
    assert np.max(np.abs(a.second_moment - b.second_moment)) < 1e-12
    assert np.max(np.abs(a.mean - b.mean)) < 1e-12


def test_distribution_from_offdiag_superoperators(hadamard):
    t = 3
    got = distribution_kspace(hadamard, None, "R", t)
    oracle = path_sum_distribution(t)
    assert max(abs(p - oracle.get(int(x), 0.0)) for x, p in zip(got.positions, got.probabilities)) < 1e-12
    ch = dephasing_channel(np.pi / 8)
    _, ps = full_space_density(t, ch.ops)
    got = distribution_kspace(hadamard, ch, "R", t)
    assert np.max(np.abs(got.probabilities - ps[-1])) < 1e-12


def test_distribution_kspace_multicoin():
    walk = MultiCoinSpec(2)
    t = 4
    _, state = simulate_pure(walk, t, return_state=True)
    got = distribution_kspace(walk, None, "R", t)
    assert np.max(np.abs(got.probabilities - distribution(state).probabilities)) < 1e-12


def test_first_moment_saturates(hadamard):
    mean = first_moment_kspace(hadamard, dephasing_channel(np.pi / 8), "R", 200)
    inc = np.abs(np.diff(mean))
    assert inc[-20:].max() < 1e-6
    assert inc[-20:].max() < inc[:20].max()


@pytest.mark.parametrize("m,expected", [
    (1, 0.207107), (2, 0.118718), (3, 0.0892557), (4, 0.0745243), (5, 0.0656854)])
def test_multicoin_coefficient_values(m, expected):
    assert multicoin_variance_coefficient(m) == pytest.approx(expected, abs=5e-7)


def test_multicoin_coefficient_monotone_with_floor():
    vals = [multicoin_variance_coefficient(m) for m in range(1, 200)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    floor = (3 - math.sqrt(8)) / math.sqrt(32)
    assert floor == pytest.approx(0.030330, abs=5e-7)
    assert min(vals) > floor
    assert multicoin_variance_coefficient(10**9) == pytest.approx(floor, abs=1e-9)


def test_dephasing_slope_values():
    assert dephasing_variance_slope(np.pi / 4) == pytest.approx(1.0, abs=1e-15)
    assert dephasing_variance_slope(np.pi / 8) == pytest.approx(3.0, abs=1e-14)
    assert dephasing_variance_slope(np.pi / 16) == pytest.approx(12.65685, abs=5e-6)
    assert dephasing_variance_slope(3 * np.pi / 16) == pytest.approx(1.343146, abs=5e-7)
    with pytest.raises(DomainError):
        dephasing_variance_slope(0.0)


@pytest.mark.parametrize("theta", THETAS)
def test_resolvent_slope_matches_closed_form(theta, hadamard):
    est = decoherent_asymptotic_slope(hadamard, dephasing_channel(theta))
    assert est.order == "linear"
    assert est.leading_coefficient == pytest.approx(dephasing_variance_slope(theta), abs=1e-8)
    assert est.residual < 1e-10


def test_resolvent_singular_when_noiseless(hadamard):
    with pytest.raises(SingularOnSubspace):
        decoherent_asymptotic_slope(hadamard, identity_channel(2), KGrid(16))


def test_unitary_coefficient_hadamard(hadamard):
    est = unitary_asymptotic_coefficient(hadamard, "R", KGrid(4096))
    assert est.leading_coefficient == pytest.approx(0.207107, abs=1e-4)
    assert est.order == "quadratic"


def test_unitary_coefficient_trivial_coin_is_zero():
    coin = CoinSpec.from_indices(np.eye(2), [0])
    est = unitary_asymptotic_coefficient(coin, "R", KGrid(64))
    assert est.leading_coefficient == pytest.approx(0.0, abs=1e-14)
    assert est.meta["drift"] == pytest.approx(1.0, abs=1e-14)
    s = simulate_pure(coin, 20)
    assert np.allclose(s.mean, np.arange(1, 21)) and np.allclose(s.variance, 0)


def test_unitary_coefficient_symmetric_start(hadamard):
    est = unitary_asymptotic_coefficient(hadamard, "symmetric", KGrid(1024))
    assert est.leading_coefficient > 0
    assert est.meta["drift"] == pytest.approx(0.0, abs=1e-12)
    direct = simulate_pure(hadamard, 200, "symmetric").variance[-1] / 200**2
    assert est.leading_coefficient == pytest.approx(direct, rel=1e-3)


@pytest.mark.parametrize("m", [2, 3])
def test_unitary_coefficient_multicoin(m):
    est = unitary_asymptotic_coefficient(MultiCoinSpec(m), "R", KGrid(256))
    assert est.leading_coefficient == pytest.approx(multicoin_variance_coefficient(m), abs=1e-10)


def _series(var):
    t = np.arange(1, len(var) + 1)
    return MomentSeries(t, np.zeros(len(var)), var, "test")


def test_fit_growth_exact_models():
    t = np.arange(1, 101, dtype=float)
    coef, res = fit_growth(_series(t), (10, 100), "linear")
    assert coef == pytest.approx(1.0, abs=1e-12) and res < 1e-10
    coef, res = fit_growth(_series(0.2 * t**2), (10, 100), "quadratic")
    assert coef == pytest.approx(0.2, abs=1e-15) and res < 1e-10


def test_fit_growth_default_window_and_errors():
    t = np.arange(1, 11, dtype=float)
    coef, _ = fit_growth(_series(3 * t + 1), None, "linear")
    assert coef == pytest.approx(3.0)
    with pytest.raises(EmptyWindow):
        fit_growth(_series(t), (20, 30))
    with pytest.raises(EmptyWindow):
        fit_growth(_series(t), (0, 5))

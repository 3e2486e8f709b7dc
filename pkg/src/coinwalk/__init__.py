"""Discrete-time quantum walks on the line with multiple and decoherent coins."""
from .channel import KrausChannel, SuperOperator, dephasing_channel, identity_channel, superop_k, superop_offdiag
from .coin import CoinSpec, MultiCoinSpec, coin_state, hadamard_coin, multicoin_composite, u_k
from .config import DEFAULT as DEFAULT_TOLERANCES
from .config import Tolerances
from .evolve import (DensityState, MomentSeries, PositionDistribution, WalkState, classical_reference,
                     distribution, moments, simulate_density, simulate_pure, step_density, step_unitary)
from .kspace import (AsymptoticEstimate, KGrid, decoherent_asymptotic_slope, dephasing_variance_slope,
                     distribution_kspace, fit_growth, kspace_moments, multicoin_variance_coefficient,
                     unitary_asymptotic_coefficient)

__version__ = "0.1.0"

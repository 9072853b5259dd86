"""Directional correlations of coined quantum walks on the line and the plane."""

from .coin_algebra import CoinState, cdelta_coin, hadamard_coin
from .delta_walk import DeltaEvolutionSpec, ShiftModel, WalkState2D
from .fourier import FourierField, PropagatorEigensystem
from .line_walk import WalkState1D
from .multiparticle import InitialCoinSpec

__version__ = "0.1.0"

__all__ = [
    "CoinState",
    "cdelta_coin",
    "hadamard_coin",
    "DeltaEvolutionSpec",
    "ShiftModel",
    "WalkState2D",
    "FourierField",
    "PropagatorEigensystem",
    "WalkState1D",
    "InitialCoinSpec",
]

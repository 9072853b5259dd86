"""
Single-particle coined walk on the integer line.

State storage is dense over x ∈ [-t, t]; index ``i`` holds position ``i - t``.
Chirality L (index 0) moves to x-1, R (index 1) moves to x+1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .coin_algebra import CoinState, check_unitary, hadamard_coin

__all__ = [
    "SHIFT",
    "WalkState1D",
    "origin_state",
    "step",
    "evolve",
    "trajectory",
    "distribution",
    "side_probabilities",
    "chiral_amplitudes",
]

# chirality -> displacement
SHIFT = {0: -1, 1: +1}


@dataclass(frozen=True)
class WalkState1D:
    t: int
    amps: NDArray[np.complex128]  # shape (2t+1, 2)

    def __post_init__(self) -> None:
        if self.amps.shape != (2 * self.t + 1, 2):
            raise ValueError(f"amps shape {self.amps.shape} does not match t={self.t}")

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(-self.t, self.t + 1)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def amplitude(self, x: int) -> NDArray[np.complex128]:
        if abs(x) > self.t:
            return np.zeros(2, dtype=np.complex128)
        return self.amps[x + self.t]


def origin_state(coin_state: CoinState | NDArray) -> WalkState1D:
    if isinstance(coin_state, CoinState):
        v = coin_state.vector
    else:
        v = CoinState.from_vector(coin_state).vector
    return WalkState1D(0, v.reshape(1, 2).copy())


def _step_amps(amps: NDArray[np.complex128], coin: NDArray[np.complex128]) -> NDArray[np.complex128]:
    coined = amps @ coin.T
    n = amps.shape[0]
    out = np.zeros((n + 2, 2), dtype=np.complex128)
    # old index i (x = i - t) -> new index i+1+dx
    out[0:n, 0] = coined[:, 0]
    out[2 : n + 2, 1] = coined[:, 1]
    return out


def step(state: WalkState1D, coin: NDArray | None = None) -> WalkState1D:
    """One application of S·(I⊗coin)."""
    coin = hadamard_coin() if coin is None else check_unitary(coin, 2)
    return WalkState1D(state.t + 1, _step_amps(state.amps, coin))


def evolve(initial: CoinState | NDArray, t: int, coin: NDArray | None = None) -> WalkState1D:
    """Walk started at the origin with coin state `initial`, after `t` steps."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    coin = hadamard_coin() if coin is None else check_unitary(coin, 2)
    state = origin_state(initial)
    amps = state.amps
    for _ in range(t):
        amps = _step_amps(amps, coin)
    return WalkState1D(t, amps)


def trajectory(initial: CoinState | NDArray, t_max: int, coin: NDArray | None = None):
    """Yield the states at t = 0, 1, ..., t_max."""
    coin = hadamard_coin() if coin is None else check_unitary(coin, 2)
    state = origin_state(initial)
    yield state
    for _ in range(t_max):
        state = WalkState1D(state.t + 1, _step_amps(state.amps, coin))
        yield state


def distribution(state: WalkState1D) -> NDArray[np.float64]:
    """p(x) = |L_x|² + |R_x|² over x ∈ [-t, t]."""
    return np.sum(np.abs(state.amps) ** 2, axis=1)


def side_probabilities(state: WalkState1D) -> tuple[float, float]:
    """
    (p_minus, p_plus): mass on x ∈ [-t, 0] and on x ∈ [1, t].

    The origin belongs to the negative side.
    """
    p = distribution(state)
    t = state.t
    return float(np.sum(p[: t + 1])), float(np.sum(p[t + 1 :]))


def chiral_amplitudes(source: str, t: int) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """
    Hadamard-walk amplitudes psi^source_L(m, t), psi^source_R(m, t) for m ∈ [-t, t],
    starting from coin state |source> at the origin.
    """
    if source not in ("L", "R"):
        raise ValueError(f"source must be 'L' or 'R', got {source!r}")
    init = CoinState.L() if source == "L" else CoinState.R()
    amps = evolve(init, t).amps
    return amps[:, 0].copy(), amps[:, 1].copy()

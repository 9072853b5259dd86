"""
Two-particle walk on the line viewed as a walk on Z², with an optional
contact (δ) interaction that swaps the coin on the diagonal x = y.

Two shift models:

``axial``     chirality (L, R, D, U) moves (x-1), (x+1), (y-1), (y+1); one
              coordinate per step.
``diagonal``  chirality slots (LL, LR, RL, RR) move both coordinates, particle
              1 along x and particle 2 along y (the S₁⊗S₂ tensor shift).

Walks start at the origin, so after t steps the amplitude lives on a parity
sublattice of [-t, t]² with (t+1)² sites. States store that sublattice
("light-cone" coordinates, chirality-major array of shape (4, t+1, t+1)):

    diagonal   x = 2i - t,      y = 2j - t
    axial      x = i + j - t,   y = i - j

In these coordinates every chirality channel moves by an index offset of
0 or 1 along each axis per step. ``WalkState2D.amps`` gives the dense box.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np
from numpy.typing import NDArray

from .coin_algebra import NORM_ATOL, cdelta_coin, check_unitary, hadamard_coin

__all__ = [
    "ShiftModel",
    "DISPLACEMENTS",
    "WalkState2D",
    "DeltaEvolutionSpec",
    "hh_coin",
    "origin_state_2d",
    "step_uniform",
    "step_delta",
    "evolve_uniform",
    "evolve_delta",
    "sameside_2p",
    "distribution_2d",
    "ScanReport",
    "sphere_grid",
    "scan_delta_initial_states",
]


class ShiftModel(str, Enum):
    AXIAL = "axial"
    DIAGONAL = "diagonal"


# per chirality slot: lattice displacement (dx, dy)
DISPLACEMENTS = {
    ShiftModel.AXIAL: ((-1, 0), (1, 0), (0, -1), (0, 1)),
    ShiftModel.DIAGONAL: ((-1, -1), (-1, 1), (1, -1), (1, 1)),
}

# the same displacements as light-cone index offsets
_OFFSETS = {
    ShiftModel.AXIAL: ((0, 0), (1, 1), (0, 1), (1, 0)),
    ShiftModel.DIAGONAL: ((0, 0), (0, 1), (1, 0), (1, 1)),
}


def _site_coords(model: ShiftModel, t: int) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """Lattice (x, y) of every light-cone index, each of shape (t+1, t+1)."""
    i, j = np.indices((t + 1, t + 1))
    if model is ShiftModel.DIAGONAL:
        return 2 * i - t, 2 * j - t
    return i + j - t, i - j


@dataclass(frozen=True, eq=False)
class WalkState2D:
    """
    Amplitudes after `t` steps. ``data[c, i, j]`` is in light-cone coordinates;
    ``amps[x + t, y + t, c]`` is the dense box over [-t, t]².
    """

    t: int
    data: NDArray[np.complex128] = field(repr=False)
    model: ShiftModel = ShiftModel.DIAGONAL

    def __post_init__(self) -> None:
        object.__setattr__(self, "model", ShiftModel(self.model))
        if self.data.shape != (4, self.t + 1, self.t + 1):
            raise ValueError(f"data shape {self.data.shape} does not match t={self.t}")

    @cached_property
    def amps(self) -> NDArray[np.complex128]:
        n = 2 * self.t + 1
        out = np.zeros((n, n, 4), dtype=np.complex128)
        x, y = _site_coords(self.model, self.t)
        out[x + self.t, y + self.t, :] = np.moveaxis(self.data, 0, -1)
        return out

    @classmethod
    def from_dense(
        cls, t: int, amps: NDArray, model: ShiftModel | str, atol: float = 1e-20
    ) -> "WalkState2D":
        """Inverse of ``amps``; rejects more than `atol` probability off the parity sublattice."""
        model = ShiftModel(model)
        amps = np.asarray(amps, dtype=np.complex128)
        n = 2 * t + 1
        if amps.shape != (n, n, 4):
            raise ValueError(f"dense amplitudes must have shape {(n, n, 4)}, got {amps.shape}")
        x, y = _site_coords(model, t)
        data = np.moveaxis(amps[x + t, y + t, :], -1, 0).copy()
        on = np.zeros((n, n), dtype=bool)
        on[x + t, y + t] = True
        off = np.sum(np.abs(amps[~on]) ** 2)
        if off > atol:
            raise ValueError("amplitude found off the parity sublattice reachable from the origin")
        return cls(t, data, model)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.data) ** 2))


@dataclass(frozen=True, eq=False)
class DeltaEvolutionSpec:
    bulk_coin: NDArray[np.complex128]
    diag_coin: NDArray[np.complex128]
    shift_model: ShiftModel = ShiftModel.DIAGONAL

    def __post_init__(self) -> None:
        object.__setattr__(self, "bulk_coin", check_unitary(self.bulk_coin, 4))
        object.__setattr__(self, "diag_coin", check_unitary(self.diag_coin, 4))
        object.__setattr__(self, "shift_model", ShiftModel(self.shift_model))

    @classmethod
    def standard(cls, shift_model: ShiftModel | str = ShiftModel.DIAGONAL) -> "DeltaEvolutionSpec":
        """H⊗H off the diagonal, C_δ on it."""
        return cls(hh_coin(), cdelta_coin(), ShiftModel(shift_model))


def hh_coin() -> NDArray[np.complex128]:
    """H⊗H in the (LL, LR, RL, RR) slot order."""
    h = hadamard_coin()
    return np.kron(h, h)


def origin_state_2d(chirality: Sequence[complex], model: ShiftModel | str = ShiftModel.DIAGONAL) -> WalkState2D:
    v = np.asarray(chirality, dtype=np.complex128)
    if v.shape != (4,):
        raise ValueError(f"chirality vector must have 4 entries, got shape {v.shape}")
    if abs(np.vdot(v, v).real - 1.0) > NORM_ATOL:
        raise ValueError("initial chirality vector is not normalized")
    return WalkState2D(0, v.reshape(4, 1, 1).copy(), ShiftModel(model))


def _apply_coin(data: NDArray, coin: NDArray) -> NDArray:
    return (coin @ data.reshape(4, -1)).reshape(data.shape)


def _shift(coined: NDArray, model: ShiftModel) -> NDArray:
    n = coined.shape[1]
    out = np.zeros((4, n + 1, n + 1), dtype=np.complex128)
    for c, (di, dj) in enumerate(_OFFSETS[model]):
        out[c, di : di + n, dj : dj + n] = coined[c]
    return out


def _check_model(state: WalkState2D, model: ShiftModel) -> None:
    if state.model is not model:
        raise ValueError(f"state was built for the {state.model.value} model, not {model.value}")


def step_uniform(state: WalkState2D, coin: NDArray, shift_model: ShiftModel | str) -> WalkState2D:
    """Same coin at every site, then the shift of `shift_model`."""
    coin = check_unitary(coin, 4)
    model = ShiftModel(shift_model)
    _check_model(state, model)
    return WalkState2D(state.t + 1, _shift(_apply_coin(state.data, coin), model), model)


def _diagonal_index(model: ShiftModel, t: int) -> tuple[NDArray, NDArray]:
    """Light-cone indices of the sites with x = y."""
    if model is ShiftModel.DIAGONAL:
        i = np.arange(t + 1)
        return i, i
    if t % 2:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    i = np.arange(t + 1)
    return i, np.full(t + 1, t // 2)


def _coin_delta(state: WalkState2D, bulk: NDArray, diag: NDArray) -> NDArray:
    # both coins go through the same full-array product so that diag == bulk
    # reproduces the uniform step bit for bit
    coined = _apply_coin(state.data, bulk)
    i, j = _diagonal_index(state.model, state.t)
    if i.size:
        coined[:, i, j] = _apply_coin(state.data, diag)[:, i, j]
    return coined


def step_delta(state: WalkState2D, spec: DeltaEvolutionSpec) -> WalkState2D:
    """diag_coin on sites with x = y, bulk_coin elsewhere, then the shift."""
    _check_model(state, spec.shift_model)
    coined = _coin_delta(state, spec.bulk_coin, spec.diag_coin)
    return WalkState2D(state.t + 1, _shift(coined, spec.shift_model), spec.shift_model)


def evolve_uniform(
    chirality: Sequence[complex], t: int, coin: NDArray, shift_model: ShiftModel | str
) -> Iterator[WalkState2D]:
    """Yield states at t = 0..t from an origin-localized chirality vector."""
    coin = check_unitary(coin, 4)
    model = ShiftModel(shift_model)
    state = origin_state_2d(chirality, model)
    yield state
    for _ in range(t):
        state = WalkState2D(state.t + 1, _shift(_apply_coin(state.data, coin), model), model)
        yield state


def evolve_delta(chirality: Sequence[complex], t: int, spec: DeltaEvolutionSpec) -> Iterator[WalkState2D]:
    state = origin_state_2d(chirality, spec.shift_model)
    yield state
    for _ in range(t):
        state = step_delta(state, spec)
        yield state


def distribution_2d(state: WalkState2D) -> NDArray[np.float64]:
    """Dense p(x, y) over [-t, t]²."""
    return np.sum(np.abs(state.amps) ** 2, axis=2)


def _sameside_mask(model: ShiftModel, t: int) -> NDArray[np.bool_]:
    x, y = _site_coords(model, t)
    return ((x <= 0) & (y <= 0)) | ((x >= 1) & (y >= 1))


def sameside_2p(state: WalkState2D) -> float:
    """Mass on {x <= 0, y <= 0} plus mass on {x >= 1, y >= 1}."""
    p = np.sum(np.abs(state.data) ** 2, axis=0)
    return float(p[_sameside_mask(state.model, state.t)].sum())


@dataclass
class ScanReport:
    """
    Same-side statistics for a grid of real initial chirality vectors.

    ``trajectories[i, t]`` is P_sameside(t) for grid point i. ``tail_mean`` averages
    the last quarter of each trajectory; ``running_max`` is the maximum tail mean
    over grid points 0..i in scan order.
    """

    angles: NDArray[np.float64]  # (n_points, 3)
    vectors: NDArray[np.float64]  # (n_points, 4)
    separable: NDArray[np.bool_]
    trajectories: NDArray[np.float64]  # (n_points, t_max + 1)
    tail_mean: NDArray[np.float64]
    running_max: NDArray[np.float64]
    t_max: int

    @property
    def final(self) -> NDArray[np.float64]:
        return self.trajectories[:, -1]

    def records(self) -> list[dict]:
        out = []
        for i in range(len(self.vectors)):
            out.append(
                {
                    "index": i,
                    "theta1": float(self.angles[i, 0]),
                    "theta2": float(self.angles[i, 1]),
                    "theta3": float(self.angles[i, 2]),
                    "c0": float(self.vectors[i, 0]),
                    "c1": float(self.vectors[i, 1]),
                    "c2": float(self.vectors[i, 2]),
                    "c3": float(self.vectors[i, 3]),
                    "separable": bool(self.separable[i]),
                    "p_final": float(self.final[i]),
                    "p_tail_mean": float(self.tail_mean[i]),
                    "running_max": float(self.running_max[i]),
                }
            )
        return out


def sphere_grid(resolution: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Row-major grid on the real unit 3-sphere in hyperspherical angles.

    θ1, θ2 take `resolution` values in [0, π]; θ3 takes `resolution` values in
    [0, 2π). Returns (angles (n, 3), vectors (n, 4)).
    """
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    a = np.linspace(0.0, np.pi, resolution)
    b = np.linspace(0.0, 2.0 * np.pi, resolution, endpoint=False)
    t1, t2, t3 = np.meshgrid(a, a, b, indexing="ij")
    angles = np.stack([t1.ravel(), t2.ravel(), t3.ravel()], axis=1)
    s1, s2 = np.sin(angles[:, 0]), np.sin(angles[:, 1])
    vectors = np.stack(
        [
            np.cos(angles[:, 0]),
            s1 * np.cos(angles[:, 1]),
            s1 * s2 * np.cos(angles[:, 2]),
            s1 * s2 * np.sin(angles[:, 2]),
        ],
        axis=1,
    )
    return angles, vectors


def scan_delta_initial_states(resolution: int, t: int, spec: DeltaEvolutionSpec) -> ScanReport:
    """
    Sweep P_sameside over a grid of real initial chirality vectors.

    The walk is linear, so the four basis evolutions suffice: with
    G(t)[j, k] = sum over both orthants of conj(Ψ_j) Ψ_k, a state c has
    P_sameside(t) = c^T Re G(t) c.
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    angles, vectors = sphere_grid(resolution)
    states = [origin_state_2d(np.eye(4)[j], spec.shift_model) for j in range(4)]
    grams = np.empty((t + 1, 4, 4), dtype=np.complex128)
    for step_no in range(t + 1):
        if step_no > 0:
            states = [step_delta(s, spec) for s in states]
        mask = _sameside_mask(spec.shift_model, step_no)
        flat = np.stack([s.data[:, mask].ravel() for s in states])
        grams[step_no] = flat.conj() @ flat.T
    traj = np.einsum("pj,tjk,pk->pt", vectors, grams.real, vectors)
    tail = traj[:, t - t // 4 :].mean(axis=1)
    separable = np.abs(vectors[:, 0] * vectors[:, 3] - vectors[:, 1] * vectors[:, 2]) < 1e-12
    return ScanReport(
        angles=angles,
        vectors=vectors,
        separable=separable,
        trajectories=traj,
        tail_mean=tail,
        running_max=np.maximum.accumulate(tail),
        t_max=t,
    )

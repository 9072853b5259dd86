"""
Momentum-space form of the uniform C_δ walk with the axial shift.

Forward transform: Ψ̂(k) = Σ_x Ψ(x) e^{+i k·x} on the grid k = 2πj/N − π,
j = 0..N-1 per axis. Inverse: Ψ(x) = (1/N²) Σ_k Ψ̂(k) e^{−i k·x}.

With this kernel one walk step is Ψ̂ ↦ M(k) Ψ̂ where

    M(kx, ky) = diag(e^{−ikx}, e^{ikx}, e^{−iky}, e^{iky}) · C_δ

in the (L, R, D, U) slot order. On an N-periodic grid the spectral propagation
equals direct lattice evolution with wrap-around, so N >= 2t + 1 makes it exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .coin_algebra import cdelta_coin
from .delta_walk import ShiftModel, WalkState2D

__all__ = [
    "CLUSTER_TOL",
    "FourierField",
    "PropagatorEigensystem",
    "k_grid",
    "m_matrix",
    "eigensystem",
    "propagate",
    "forward_transform",
    "inverse_transform",
]

CLUSTER_TOL = 1e-9


def k_grid(N: int) -> NDArray[np.float64]:
    """2πj/N − π for j = 0..N-1."""
    return 2.0 * np.pi * np.arange(N) / N - np.pi


def _check_N(N: int) -> None:
    if N < 2 or N % 2:
        raise ValueError(f"grid size must be even and >= 2, got {N}")


@dataclass(frozen=True, eq=False)
class FourierField:
    """4-component field on the N×N momentum grid; ``values[jx, jy, c]``."""

    N: int
    values: NDArray[np.complex128]

    def __post_init__(self) -> None:
        _check_N(self.N)
        if self.values.shape != (self.N, self.N, 4):
            raise ValueError(f"values must have shape {(self.N, self.N, 4)}, got {self.values.shape}")

    @property
    def kx(self) -> NDArray[np.float64]:
        return k_grid(self.N)

    @property
    def ky(self) -> NDArray[np.float64]:
        return k_grid(self.N)

    def norm(self) -> float:
        """Plancherel norm (1/N²) Σ_k ‖Ψ̂(k)‖², equal to the position-space norm."""
        return float(np.sum(np.abs(self.values) ** 2) / self.N**2)


@dataclass(frozen=True, eq=False)
class PropagatorEigensystem:
    """
    Unitary diagonalization of M at one or more k points.

    ``eigenvalues[..., i]`` pairs with the column ``eigenvectors[..., :, i]``.
    Eigenvalues at each point are sorted by phase in (−π, π].
    """

    eigenvalues: NDArray[np.complex128]
    eigenvectors: NDArray[np.complex128]

    def reconstruct(self, t: int = 1) -> NDArray[np.complex128]:
        """Σ_i λ_iᵗ |Φ_i⟩⟨Φ_i|."""
        v = self.eigenvectors
        return (v * (self.eigenvalues**t)[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)


def m_matrix(kx, ky) -> NDArray[np.complex128]:
    """M(kx, ky); broadcasts over array arguments, returning shape (..., 4, 4)."""
    kx, ky = np.broadcast_arrays(np.asarray(kx, dtype=float), np.asarray(ky, dtype=float))
    phases = np.stack(
        [np.exp(-1j * kx), np.exp(1j * kx), np.exp(-1j * ky), np.exp(1j * ky)],
        axis=-1,
    )
    return phases[..., :, None] * cdelta_coin()


def _needs_repair(lam: NDArray, vec: NDArray, tol: float) -> NDArray[np.bool_]:
    gram = np.swapaxes(vec.conj(), -1, -2) @ vec
    off = np.max(np.abs(gram - np.eye(4)), axis=(-2, -1))
    gaps = np.abs(lam[..., :, None] - lam[..., None, :]) + np.eye(4) * 4.0
    return (off > 1e-10) | (np.min(gaps, axis=(-2, -1)) < tol)


def _repair(m: NDArray, tol: float) -> tuple[NDArray, NDArray]:
    """
    Orthonormal eigenbasis for a single normal matrix with clustered eigenvalues.

    The complex Schur vectors of a normal matrix are an orthonormal eigenbasis,
    and within each cluster they span the invariant subspace; a QR pass per
    cluster keeps the basis orthonormal to rounding.
    """
    tri, q = scipy.linalg.schur(m, output="complex")
    lam = np.diag(tri).copy()
    order = np.argsort(np.angle(lam), kind="stable")
    lam, q = lam[order], q[:, order]
    start = 0
    for i in range(1, 5):
        if i == 4 or abs(lam[i] - lam[i - 1]) > tol:
            if i - start > 1:
                q[:, start:i], _ = np.linalg.qr(q[:, start:i])
            start = i
    return lam, q


def eigensystem(kx, ky, cluster_tol: float = CLUSTER_TOL) -> PropagatorEigensystem:
    """
    Eigenvalues and orthonormal eigenvectors of M(kx, ky); broadcasts over arrays.

    Points whose eigenvalues fall within `cluster_tol` of each other, or whose
    eigenvectors come out non-orthonormal, are redone with a Schur-based basis
    orthonormalized cluster by cluster.
    """
    m = m_matrix(kx, ky)
    shape = m.shape[:-2]
    m = m.reshape(-1, 4, 4)
    lam, vec = np.linalg.eig(m)
    vec = vec / np.linalg.norm(vec, axis=-2, keepdims=True)
    order = np.argsort(np.angle(lam), axis=-1, kind="stable")
    lam = np.take_along_axis(lam, order, axis=-1)
    vec = np.take_along_axis(vec, order[..., None, :], axis=-1)
    bad = _needs_repair(lam, vec, cluster_tol)
    for i in np.flatnonzero(bad):
        lam[i], vec[i] = _repair(m[i], cluster_tol)
    return PropagatorEigensystem(lam.reshape(shape + (4,)), vec.reshape(shape + (4, 4)))


def propagate(
    field: FourierField, t: int, eig: PropagatorEigensystem | None = None
) -> FourierField:
    """
    Ψ̂(t) = Σ_i λ_iᵗ ⟨Φ_i|Ψ̂(0)⟩ |Φ_i⟩ at every grid point.

    A precomputed eigensystem on the field's grid can be passed in to skip
    the diagonalization.
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    if t == 0:
        return FourierField(field.N, field.values.copy())
    if eig is None:
        k = k_grid(field.N)
        eig = eigensystem(k[:, None], k[None, :])
    v = eig.eigenvectors
    coeff = np.einsum("...ci,...c->...i", v.conj(), field.values)
    coeff *= eig.eigenvalues**t
    return FourierField(field.N, np.einsum("...ci,...i->...c", v, coeff))


def _sign_grid(N: int) -> NDArray[np.float64]:
    # (−1)^(x+y) for positions x stored at index x mod N
    s = 1.0 - 2.0 * (np.arange(N) % 2)
    return s[:, None] * s[None, :]


def forward_transform(state: WalkState2D, N: int) -> FourierField:
    """Ψ̂(k) = Σ_x Ψ(x) e^{+i k·x}. Requires 2t + 1 <= N."""
    _check_N(N)
    t = state.t
    if 2 * t + 1 > N:
        raise ValueError(f"state support [-{t}, {t}]² does not fit an N={N} grid")
    box = np.zeros((N, N, 4), dtype=np.complex128)
    pos = np.arange(-t, t + 1) % N
    box[np.ix_(pos, pos)] = state.amps
    box *= _sign_grid(N)[..., None]
    # e^{+2πi jx/N} sums are N·ifft
    return FourierField(N, np.fft.ifft2(box, axes=(0, 1)) * N**2)


def inverse_transform(
    field: FourierField, t: int, model: ShiftModel | str = ShiftModel.AXIAL, atol: float = 1e-10
) -> WalkState2D:
    """
    Ψ(x) = (1/N²) Σ_k Ψ̂(k) e^{−i k·x}, read back onto the box [−t, t]².

    Raises ValueError if more than `atol` of probability lies outside the box
    or off the sublattice of `model`.
    """
    N = field.N
    if 2 * t + 1 > N:
        raise ValueError(f"box [-{t}, {t}]² does not fit an N={N} grid")
    box = np.fft.fft2(field.values, axes=(0, 1)) / N**2
    box *= _sign_grid(N)[..., None]
    pos = np.arange(-t, t + 1) % N
    amps = box[np.ix_(pos, pos)]
    inside = np.zeros((N, N), dtype=bool)
    inside[np.ix_(pos, pos)] = True
    outside = np.sum(np.abs(box[~inside]) ** 2)
    if outside > atol:
        raise ValueError(f"probability {outside:.3g} lies outside the box [-{t}, {t}]²")
    return WalkState2D.from_dense(t, amps, model, atol=atol)

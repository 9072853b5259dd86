"""
Long-time limits of the Hadamard walk: the Konno density, side probabilities,
same-side limits for separable states, and the M-dimensional weak-limit density
for arbitrary coin states.

Quadrature runs in the angle θ with q = sin(θ)/√2, which removes the
(1 - 2q²)^(-1/2) endpoint singularity of every density here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.special import roots_legendre

from .coin_algebra import NORM_ATOL, CoinState, HadamardCoords, hadamard_coin

__all__ = [
    "Q_MAX",
    "WeakLimitSpec",
    "konno_density",
    "side_limits",
    "sameside_limit_separable",
    "sameside_limit_from_d",
    "group_velocity_profile",
    "dispersion",
    "generator",
    "eigvec_u",
    "weak_limit_density",
    "axis_kernel",
    "axis_kernel_theta",
    "side_kernels",
    "sameside_limit_general",
    "theta_nodes",
    "GL_POINTS",
]

Q_MAX = 1.0 / math.sqrt(2.0)
GL_POINTS = 2048
_SQ2 = math.sqrt(2.0)


def _check_support(q) -> NDArray[np.float64]:
    q = np.asarray(q, dtype=np.float64)
    if np.any(np.abs(q) >= Q_MAX):
        raise ValueError(f"scaled position outside the open support (-1/√2, 1/√2): {q}")
    return q


def _bias(a: complex, b: complex) -> float:
    norm = abs(a) ** 2 + abs(b) ** 2
    if abs(norm - 1.0) > NORM_ATOL:
        raise ValueError(f"(a, b) not normalized: {norm!r}")
    return abs(a) ** 2 - abs(b) ** 2 + 2.0 * (a * np.conj(b)).real


def konno_density(q, a: complex, b: complex):
    """
    Weak-limit density of X_t / t for a single walker started in a|L> + b|R>.

        [1 - q w] / [π (1 - q²) √(1 - 2q²)],  w = |a|² - |b|² + 2 Re(a b̄)
    """
    w = _bias(a, b)
    q = _check_support(q)
    out = (1.0 - q * w) / (np.pi * (1.0 - q**2) * np.sqrt(1.0 - 2.0 * q**2))
    return float(out) if out.ndim == 0 else out


def side_limits(a: complex, b: complex) -> tuple[float, float]:
    """(p_minus, p_plus) = ((2 + w)/4, (2 - w)/4)."""
    w = _bias(a, b)
    return (2.0 + w) / 4.0, (2.0 - w) / 4.0


def sameside_limit_separable(coords: Sequence[HadamardCoords]) -> float:
    """
    Limit of P_sameside for a product coin state:

        4^-M [prod_i (2 + √2 d_i) + prod_i (2 - √2 d_i)],  d_i = |h_i+|² - |h_i-|²
    """
    return float(sameside_limit_from_d([c.d for c in coords]))


def sameside_limit_from_d(d):
    """
    Product-state limit as a function of d_i = |h_i+|² - |h_i-|².

    `d` has shape (..., M); each d_i must lie in [-1, 1].
    """
    d = np.asarray(d, dtype=np.float64)
    if d.ndim == 0:
        raise ValueError("d needs a trailing particle axis")
    if np.any(np.abs(d) > 1.0):
        raise ValueError("every d_i must lie in [-1, 1]")
    M = d.shape[-1]
    out = (np.prod(2.0 + _SQ2 * d, axis=-1) + np.prod(2.0 - _SQ2 * d, axis=-1)) / 4.0**M
    return float(out) if out.ndim == 0 else out


def group_velocity_profile(k):
    """C(k) = cos k / √(1 + cos² k)."""
    k = np.asarray(k, dtype=np.float64)
    return np.cos(k) / np.sqrt(1.0 + np.cos(k) ** 2)


def dispersion(k):
    """Eigenphases (w1, w2) with w1 = arcsin(sin k / √2), w2 = π - w1."""
    w1 = np.arcsin(np.sin(k) / _SQ2)
    return w1, np.pi - w1


def generator(k: float) -> NDArray[np.complex128]:
    """
    One-step momentum-space generator diag(e^{ik}, e^{-ik}) · H.

    This is the phase convention under which eigvec_u(k, x) has eigenvalue
    exp(i w_x(k)); it corresponds to the kernel e^{-ikx}, so a branch with
    phase w_x moves with velocity -dw_x/dk.
    """
    return np.diag([np.exp(1j * k), np.exp(-1j * k)]) @ hadamard_coin()


def _eigvec_batch(k: NDArray[np.float64], branch: int) -> NDArray[np.complex128]:
    """Normalized eigenvectors, shape (..., 2)."""
    k = np.asarray(k, dtype=np.float64)
    c = np.cos(k)
    root = np.sqrt(1.0 + c**2)
    w1 = np.arcsin(np.sin(k) / _SQ2)
    e = np.exp(1j * k)
    if branch == 1:
        n = 2.0 * (1.0 + c**2 - c * root)
        v = np.stack([e, _SQ2 * np.exp(1j * w1) - e], axis=-1)
    elif branch == 2:
        n = 2.0 * (1.0 + c**2 + c * root)
        v = np.stack([-e, _SQ2 * np.exp(-1j * w1) + e], axis=-1)
    else:
        raise ValueError(f"branch must be 1 or 2, got {branch}")
    # n >= 2(2 - √2) for the Hadamard walk
    assert np.all(n > 0)
    return v / np.sqrt(n)[..., None]


def eigvec_u(k: float, branch: int) -> NDArray[np.complex128]:
    """Normalized eigenvector v_branch(k) of `generator(k)`."""
    return _eigvec_batch(np.float64(k), branch)


def _theta_of(q: NDArray[np.float64]) -> tuple[NDArray, NDArray]:
    """θ = arcsin(√2 q) and cos θ = √(1 - 2q²), the latter without cancellation."""
    r = _SQ2 * q
    return np.arcsin(r), np.sqrt((1.0 - r) * (1.0 + r))


def _roots_for_velocity(theta: NDArray[np.float64], branch: int) -> tuple[NDArray, NDArray]:
    """
    The two momenta k with velocity q = sin θ / √2 on the given branch.

    Branch 1 moves with -C(k), branch 2 with +C(k). C(k) = c has solutions
    k = ±k0 with cos k0 = c/√(1-c²) and sin k0 = √(1-2c²)/√(1-c²); in θ both
    are closed form, so k0 = atan2(√2 |cos θ|, ±sin θ).
    """
    s = np.sin(theta) if branch == 2 else -np.sin(theta)
    k0 = np.arctan2(_SQ2 * np.abs(np.cos(theta)), s)
    return k0, -k0


def _jacobian(q: NDArray[np.float64]) -> NDArray[np.float64]:
    """|dk/dq| = 1 / ((1 - q²) √(1 - 2q²))."""
    return 1.0 / ((1.0 - q**2) * _theta_of(q)[1])


@dataclass(frozen=True, eq=False)
class WeakLimitSpec:
    M: int
    psi_c: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self) -> None:
        v = np.asarray(self.psi_c, dtype=np.complex128)
        if v.shape != (2**self.M,):
            raise ValueError(f"psi_c must have length 2^M = {2**self.M}, got {v.shape}")
        if abs(np.vdot(v, v).real - 1.0) > NORM_ATOL:
            raise ValueError("psi_c is not normalized")
        object.__setattr__(self, "psi_c", v)

    @classmethod
    def from_vector(cls, v) -> "WeakLimitSpec":
        v = np.asarray(v, dtype=np.complex128)
        return cls(int(round(math.log2(v.size))), v)

    @classmethod
    def product(cls, states: Sequence[CoinState]) -> "WeakLimitSpec":
        v = np.ones(1, dtype=np.complex128)
        for s in states:
            v = np.kron(v, s.vector)
        return cls(len(states), v)


def weak_limit_density(spec: WeakLimitSpec, q) -> NDArray[np.float64] | float:
    """
    Weak-limit density of (X_1/t, ..., X_M/t) at q (shape (M,) or (npts, M)).

    Sums |<v_x1(k1) ⊗ ... ⊗ v_xM(kM), psi_c>|² over branch assignments x and
    the two momentum roots per axis, times prod_i |dk_i/dq_i| / (2π).
    """
    q = _check_support(q)
    single = q.ndim == 1
    q = np.atleast_2d(q)
    if q.shape[-1] != spec.M:
        raise ValueError(f"expected {spec.M} coordinates per point, got {q.shape[-1]}")
    npts = q.shape[0]
    # per axis: conj eigenvectors for the 4 (branch, root) combinations, (npts, 4, 2)
    axes = []
    for i in range(spec.M):
        vs = []
        theta = _theta_of(q[:, i])[0]
        for branch in (1, 2):
            for k in _roots_for_velocity(theta, branch):
                vs.append(_eigvec_batch(k, branch).conj())
        axes.append(np.stack(vs, axis=1))
    amp = np.broadcast_to(spec.psi_c.reshape((1,) + (2,) * spec.M), (npts,) + (2,) * spec.M)
    for i in range(spec.M):
        # contract the leading source axis (after the point axis) with axis i
        amp = np.einsum("ps...,pcs->p...c", amp, axes[i])
    weight = np.sum(np.abs(amp.reshape(npts, -1)) ** 2, axis=1)
    out = weight * np.prod(_jacobian(q), axis=1) / (2.0 * np.pi) ** spec.M
    return float(out[0]) if single else out


def _projector_sum(theta: NDArray[np.float64]) -> NDArray[np.complex128]:
    """sum over branches and momentum roots of v v†, shape (..., 2, 2)."""
    out = np.zeros(np.shape(theta) + (2, 2), dtype=np.complex128)
    for branch in (1, 2):
        for k in _roots_for_velocity(theta, branch):
            v = _eigvec_batch(k, branch)
            out += v[..., :, None] * v[..., None, :].conj()
    return out


def axis_kernel(q) -> NDArray[np.complex128]:
    """
    Per-axis 2×2 density kernel K(q), shape (..., 2, 2), so that the weak-limit
    density is <psi_c| K(q_1) ⊗ ... ⊗ K(q_M) |psi_c>.
    """
    q = _check_support(q)
    theta = _theta_of(q)[0]
    return _projector_sum(theta) * (_jacobian(q) / (2.0 * np.pi))[..., None, None]


def axis_kernel_theta(theta) -> NDArray[np.complex128]:
    """K(q(θ)) · dq/dθ, smooth on [-π/2, π/2]: sum v v† / (2π √2 (1 - q²))."""
    theta = np.asarray(theta, dtype=np.float64)
    q = np.sin(theta) / _SQ2
    return _projector_sum(theta) / (2.0 * np.pi * _SQ2 * (1.0 - q**2))[..., None, None]


@lru_cache(maxsize=16)
def theta_nodes(n: int, lo: float, hi: float) -> tuple[NDArray, NDArray]:
    """n-point Gauss-Legendre nodes and weights on θ ∈ (lo, hi)."""
    x, wx = roots_legendre(n)
    theta = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * wx
    theta.setflags(write=False)
    w.setflags(write=False)
    return theta, w


@lru_cache(maxsize=4)
def _side_kernels_cached(n: int) -> tuple[NDArray, NDArray]:
    out = []
    for lo, hi in ((-np.pi / 2, 0.0), (0.0, np.pi / 2)):
        theta, w = theta_nodes(n, lo, hi)
        out.append(np.einsum("p,pij->ij", w, axis_kernel_theta(theta)))
    return out[0], out[1]


def side_kernels(n: int = GL_POINTS) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """Integrated kernels K- = ∫_{-1/√2}^0 K(q) dq and K+ = ∫_0^{1/√2} K(q) dq."""
    km, kp = _side_kernels_cached(n)
    return km.copy(), kp.copy()


def _kron_power(g: NDArray, M: int) -> NDArray:
    out = np.ones((1, 1), dtype=np.complex128)
    for _ in range(M):
        out = np.kron(out, g)
    return out


def sameside_limit_general(spec: WeakLimitSpec, n: int = GL_POINTS) -> float:
    """
    Orthant integrals of the weak-limit density over (-1/√2, 0]^M and [0, 1/√2)^M.

    The density is a tensor product of per-axis kernels sandwiched by psi_c,
    so each orthant integral is <psi_c| K±^{⊗M} |psi_c>.
    """
    km, kp = side_kernels(n)
    v = spec.psi_c
    val = np.vdot(v, _kron_power(km, spec.M) @ v) + np.vdot(v, _kron_power(kp, spec.M) @ v)
    return float(val.real)

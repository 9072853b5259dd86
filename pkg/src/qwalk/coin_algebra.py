"""
Coin operators and the Hadamard eigenbasis.

Chirality order for 4×4 coins is (L, R, D, U). In the two-particle
(diagonal-shift) reading the same slots hold (LL, LR, RL, RR).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "UNITARY_ATOL",
    "NORM_ATOL",
    "CoinState",
    "HadamardCoords",
    "check_unitary",
    "is_unitary",
    "hadamard_coin",
    "cdelta_coin",
    "identity_coin",
    "chi_eigenstates",
    "to_hadamard_basis",
    "from_hadamard_basis",
    "random_unitary",
]

UNITARY_ATOL = 1e-12
NORM_ATOL = 1e-12

_SQ2 = np.sqrt(2.0)
# magnitudes of the Hadamard eigenvector components
_A_PLUS = np.sqrt(2.0 + _SQ2) / 2.0
_A_MINUS = np.sqrt(2.0 - _SQ2) / 2.0


@dataclass(frozen=True)
class CoinState:
    """Single-particle coin state a|L> + b|R>."""

    a: complex
    b: complex

    def __post_init__(self) -> None:
        norm = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"coin state not normalized: |a|^2+|b|^2 = {norm!r}")

    @property
    def vector(self) -> NDArray[np.complex128]:
        return np.array([self.a, self.b], dtype=np.complex128)

    @classmethod
    def from_vector(cls, v) -> "CoinState":
        v = np.asarray(v, dtype=np.complex128)
        if v.shape != (2,):
            raise ValueError(f"expected a 2-vector, got shape {v.shape}")
        return cls(complex(v[0]), complex(v[1]))

    @classmethod
    def L(cls) -> "CoinState":
        return cls(1.0 + 0j, 0j)

    @classmethod
    def R(cls) -> "CoinState":
        return cls(0j, 1.0 + 0j)

    @classmethod
    def symmetric(cls) -> "CoinState":
        """(|L> + i|R>)/√2, the state with a mirror-symmetric distribution."""
        return cls(1 / _SQ2 + 0j, 1j / _SQ2)

    def bias(self) -> float:
        """|a|² − |b|² + 2 Re(a b̄), the weight entering the Konno density."""
        return float(abs(self.a) ** 2 - abs(self.b) ** 2 + 2.0 * (self.a * np.conj(self.b)).real)


@dataclass(frozen=True)
class HadamardCoords:
    """Coefficients of a coin state in the (chi+, chi-) basis."""

    h_plus: complex
    h_minus: complex

    def __post_init__(self) -> None:
        norm = abs(self.h_plus) ** 2 + abs(self.h_minus) ** 2
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"Hadamard coordinates not normalized: {norm!r}")

    @property
    def d(self) -> float:
        """|h+|² − |h-|²."""
        return float(abs(self.h_plus) ** 2 - abs(self.h_minus) ** 2)


def is_unitary(mat: NDArray, atol: float = UNITARY_ATOL) -> bool:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    resid = mat.conj().T @ mat - np.eye(mat.shape[0])
    return bool(np.max(np.abs(resid)) <= atol)


def check_unitary(mat: NDArray, dim: int | None = None) -> NDArray[np.complex128]:
    """Return `mat` as complex128, raising ValueError unless it is a unitary coin."""
    mat = np.asarray(mat, dtype=np.complex128)
    if dim is not None and mat.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} coin, got shape {mat.shape}")
    if not is_unitary(mat):
        raise ValueError("coin matrix is not unitary to 1e-12")
    return mat


def hadamard_coin() -> NDArray[np.complex128]:
    """(1/√2)·[[1, 1], [1, -1]]."""
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / _SQ2


def cdelta_coin() -> NDArray[np.complex128]:
    """
    The unfactorized 4×4 coin C_δ.

    Real orthogonal, close in structure to H⊗H but not equal to it.
    """
    return 0.5 * np.array(
        [
            [1, 1, 1, 1],
            [1, -1, -1, 1],
            [-1, 1, -1, 1],
            [-1, -1, 1, 1],
        ],
        dtype=np.complex128,
    )


def identity_coin(d: int) -> NDArray[np.complex128]:
    return np.eye(d, dtype=np.complex128)


def random_unitary(d: int, rng: np.random.Generator) -> NDArray[np.complex128]:
    """Haar-random d×d unitary via QR with phase fix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / _SQ2
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def chi_eigenstates() -> tuple[CoinState, CoinState]:
    """
    Eigenstates (chi+, chi-) of the Hadamard coin, eigenvalues +1 and -1.

    chi+ = (√(2+√2)/2, √(2-√2)/2) and chi- = (√(2-√2)/2, -√(2+√2)/2).
    The minus sign on the R component of chi- is what makes it an eigenvector
    orthogonal to chi+.
    """
    return (
        CoinState(_A_PLUS + 0j, _A_MINUS + 0j),
        CoinState(_A_MINUS + 0j, -_A_PLUS + 0j),
    )


def to_hadamard_basis(s: CoinState) -> HadamardCoords:
    """h± = <chi±|s>. Rejects non-normalized input."""
    if not isinstance(s, CoinState):
        s = CoinState.from_vector(s)
    chi_p, chi_m = chi_eigenstates()
    v = s.vector
    return HadamardCoords(
        complex(np.vdot(chi_p.vector, v)),
        complex(np.vdot(chi_m.vector, v)),
    )


def from_hadamard_basis(h: HadamardCoords) -> CoinState:
    """a = A+ h+ + A- h-,  b = A- h+ - A+ h-."""
    a = _A_PLUS * h.h_plus + _A_MINUS * h.h_minus
    b = _A_MINUS * h.h_plus - _A_PLUS * h.h_minus
    return CoinState(complex(a), complex(b))

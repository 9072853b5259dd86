"""
Brute-force reference implementations used as ground truth by the tests.

Nothing here imports qwalk. Every walk lives in a fixed periodic box large
enough that nothing wraps, and the shift is done with np.roll.
"""

from __future__ import annotations

import numpy as np

SQ2 = np.sqrt(2.0)
H = np.array([[1.0, 1.0], [1.0, -1.0]]) / SQ2
CDELTA = 0.5 * np.array(
    [[1, 1, 1, 1], [1, -1, -1, 1], [-1, 1, -1, 1], [-1, -1, 1, 1]], dtype=float
)


def line_walk_matrix(t: int, coin=H) -> np.ndarray:
    """Explicit (2n·2n) unitary S·(I⊗coin) on positions [-t-1, t+1] with periodic wrap."""
    n = 2 * t + 3
    shift = np.zeros((2 * n, 2 * n))
    for i in range(n):
        shift[2 * ((i - 1) % n) + 0, 2 * i + 0] = 1.0  # L -> x-1
        shift[2 * ((i + 1) % n) + 1, 2 * i + 1] = 1.0  # R -> x+1
    return shift @ np.kron(np.eye(n), coin)


def line_amplitudes(coin_state, t: int, coin=H) -> np.ndarray:
    """(2t+1, 2) amplitudes over x in [-t, t] via the explicit matrix power."""
    n = 2 * t + 3
    psi = np.zeros(2 * n, dtype=complex)
    psi[2 * (t + 1) : 2 * (t + 1) + 2] = coin_state
    psi = np.linalg.matrix_power(line_walk_matrix(t, coin), t) @ psi
    return psi.reshape(n, 2)[1:-1]


def tensor_walk(c: np.ndarray, t: int, M: int = 2) -> np.ndarray:
    """
    M independent Hadamard walkers with joint coin vector c (particle 1 most significant).

    Returns amplitudes shaped (2t+1,)*M + (2,)*M over positions [-t, t].
    """
    n = 2 * t + 3
    psi = np.zeros((n,) * M + (2,) * M, dtype=complex)
    psi[(t + 1,) * M] = np.asarray(c, dtype=complex).reshape((2,) * M)
    for _ in range(t):
        for p in range(M):
            psi = np.moveaxis(np.tensordot(H, psi, axes=([1], [M + p])), 0, M + p)
        for p in range(M):
            new = np.empty_like(psi)
            for chi, dx in ((0, -1), (1, 1)):
                sl = [slice(None)] * (2 * M)
                sl[M + p] = chi
                new[tuple(sl)] = np.roll(psi[tuple(sl)], dx, axis=p)
            psi = new
    return psi[(slice(1, -1),) * M]


def tensor_joint(c: np.ndarray, t: int, M: int = 2) -> np.ndarray:
    psi = tensor_walk(c, t, M)
    return np.sum(np.abs(psi) ** 2, axis=tuple(range(M, 2 * M)))


def orthant_total(p: np.ndarray, t: int) -> float:
    M = p.ndim
    return float(p[(slice(0, t + 1),) * M].sum() + p[(slice(t + 1, None),) * M].sum())


AXIAL = ((-1, 0), (1, 0), (0, -1), (0, 1))
DIAGONAL = ((-1, -1), (-1, 1), (1, -1), (1, 1))


def box_walk_2d(c, t: int, bulk, diag=None, moves=DIAGONAL) -> np.ndarray:
    """
    Dense 2D walk on a periodic box [-t-1, t+1]², coin `diag` on x = y when given.

    Returns amplitudes (2t+1, 2t+1, 4) over [-t, t]².
    """
    n = 2 * t + 3
    psi = np.zeros((n, n, 4), dtype=complex)
    psi[t + 1, t + 1] = c
    on_diag = np.eye(n, dtype=bool)
    for _ in range(t):
        coined = np.einsum("ij,xyj->xyi", bulk, psi)
        if diag is not None:
            coined[on_diag] = psi[on_diag] @ np.asarray(diag).T
        psi = np.stack(
            [np.roll(coined[..., ch], (dx, dy), axis=(0, 1)) for ch, (dx, dy) in enumerate(moves)],
            axis=-1,
        )
    return psi[1:-1, 1:-1]


def direct_dft(box: np.ndarray, t: int, N: int) -> np.ndarray:
    """Ψ̂(k) = Σ_x Ψ(x) e^{+i k·x} on k = 2πj/N − π by explicit summation."""
    k = 2 * np.pi * np.arange(N) / N - np.pi
    x = np.arange(-t, t + 1)
    phase = np.exp(1j * np.outer(k, x))  # [j, x]
    return np.einsum("ax,by,xyc->abc", phase, phase, box)


def occupation_coincident(psi_l: np.ndarray, psi_r: np.ndarray, fermion: bool) -> np.ndarray:
    """
    Probability of finding both walkers on the same site, from occupation numbers.

    psi_l / psi_r are (n, 2) amplitudes of the walks started in |L> and |R>.
    The two-particle state a†(ψ^L) a†(ψ^R)|0> at one site has modes L and R:
    bosons can doubly occupy a mode (norm √2), fermions cannot.
    """
    ll = psi_l[:, 0] * psi_r[:, 0]
    rr = psi_l[:, 1] * psi_r[:, 1]
    if fermion:
        return np.abs(psi_l[:, 0] * psi_r[:, 1] - psi_l[:, 1] * psi_r[:, 0]) ** 2
    mixed = psi_l[:, 0] * psi_r[:, 1] + psi_l[:, 1] * psi_r[:, 0]
    return 2 * np.abs(ll) ** 2 + 2 * np.abs(rr) ** 2 + np.abs(mixed) ** 2


def occupation_distinct(psi_l, psi_r, i: int, j: int, fermion: bool) -> float:
    """Probability of one walker at site index i and one at j != i, from mode amplitudes."""
    s = -1.0 if fermion else 1.0
    total = 0.0
    for a in range(2):
        for b in range(2):
            amp = psi_l[i, a] * psi_r[j, b] + s * psi_r[i, a] * psi_l[j, b]
            total += abs(amp) ** 2
    return total


if __name__ == "__main__":
    # values frozen into tests/frozen_values.py
    for t in (2, 10, 30):
        for name, c in (("LL", [1, 0, 0, 0]),):
            print(t, name, orthant_total(tensor_joint(np.array(c, dtype=complex), t), t))

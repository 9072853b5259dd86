"""
Non-interacting M-particle walks on the line built from single-particle
Hadamard amplitudes.

Every joint quantity here is assembled from the two amplitude families
psi^L_k(m, t) and psi^R_k(m, t) (walks started in |L> and |R>), indexed as
``table[source, m + t, k]``. Multi-index coin vectors use particle 1 as the
most significant bit with L = 0, R = 1 (the ``np.kron`` ordering).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np
from numpy.typing import NDArray

from .coin_algebra import NORM_ATOL, CoinState
from .line_walk import distribution, evolve, side_probabilities, trajectory

__all__ = [
    "Kind",
    "InitialCoinSpec",
    "JointAccessor",
    "amplitude_table",
    "bell_patterns",
    "joint_separable",
    "joint_general",
    "joint_bell",
    "joint_grid",
    "interference_term",
    "pattern_sameside",
    "joint_indistinguishable",
    "side_grams",
    "SideSeries",
    "side_series",
    "sameside_from_coin_vector",
    "sameside_distinguishable",
    "sameside_indistinguishable",
    "orthant_sum",
]

L, R = 0, 1


class Kind(str, Enum):
    SEPARABLE = "separable"
    BELL_PSI = "bell_psi"
    BELL_PHI = "bell_phi"
    BOSON = "boson"
    FERMION = "fermion"
    GENERAL = "general"


def bell_patterns(M: int, family: str, sign: int) -> list[tuple[tuple[int, ...], int]]:
    """
    Signed chirality patterns of a Bell-type coin state.

    family "psi": LRLR..., RLRL..., LR...RL, RL...LR (alternating patterns with
    the last pair flipped for the third and fourth). family "phi": LL...L, RR...R.
    Duplicate patterns are dropped keeping the first occurrence, so for M = 2 the
    psi family reduces to {LR, RL}.
    """
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if family == "psi":
        a = tuple(i % 2 for i in range(M))
        b = tuple(1 - i % 2 for i in range(M))
        cands = [a, b]
        if M >= 2:
            cands.append(a[: M - 2] + (R, L))
            cands.append(b[: M - 2] + (L, R))
    elif family == "phi":
        cands = [(L,) * M, (R,) * M]
    else:
        raise ValueError(f"unknown Bell family {family!r}")
    out: list[tuple[tuple[int, ...], int]] = []
    seen: set[tuple[int, ...]] = set()
    for i, p in enumerate(cands):
        if p in seen:
            continue
        seen.add(p)
        out.append((p, 1 if i == 0 else sign))
    return out


def _pattern_index(p: Sequence[int]) -> int:
    idx = 0
    for s in p:
        idx = 2 * idx + s
    return idx


@dataclass(frozen=True, eq=False)
class InitialCoinSpec:
    """
    Initial coin state of M walkers, all starting at the origin.

    Build with the class constructors rather than directly.
    """

    M: int
    kind: Kind
    states: tuple[CoinState, ...] | None = None
    sign: int = 1
    vector: NDArray[np.complex128] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")
        if self.kind is Kind.SEPARABLE:
            if self.states is None or len(self.states) != self.M:
                raise ValueError("separable spec needs exactly M coin states")
        if self.kind is Kind.GENERAL:
            v = np.asarray(self.vector, dtype=np.complex128)
            if v.shape != (2**self.M,):
                raise ValueError(f"general coin vector must have length 2^M = {2**self.M}")
            if abs(np.vdot(v, v).real - 1.0) > NORM_ATOL:
                raise ValueError("general coin vector is not normalized")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @classmethod
    def separable(cls, states: Sequence[CoinState]) -> "InitialCoinSpec":
        states = tuple(states)
        return cls(len(states), Kind.SEPARABLE, states=states)

    @classmethod
    def bell_psi(cls, M: int, sign: int) -> "InitialCoinSpec":
        return cls(M, Kind.BELL_PSI, sign=sign)

    @classmethod
    def bell_phi(cls, M: int, sign: int) -> "InitialCoinSpec":
        return cls(M, Kind.BELL_PHI, sign=sign)

    @classmethod
    def boson(cls, M: int = 2) -> "InitialCoinSpec":
        return cls(M, Kind.BOSON, sign=1)

    @classmethod
    def fermion(cls, M: int = 2) -> "InitialCoinSpec":
        return cls(M, Kind.FERMION, sign=-1)

    @classmethod
    def general(cls, vector) -> "InitialCoinSpec":
        v = np.asarray(vector, dtype=np.complex128)
        M = int(round(math.log2(v.size)))
        if 2**M != v.size:
            raise ValueError(f"coin vector length {v.size} is not a power of two")
        return cls(M, Kind.GENERAL, vector=v)

    def patterns(self) -> list[tuple[tuple[int, ...], int]]:
        if self.kind in (Kind.BELL_PSI, Kind.BOSON, Kind.FERMION):
            return bell_patterns(self.M, "psi", self.sign)
        if self.kind is Kind.BELL_PHI:
            return bell_patterns(self.M, "phi", self.sign)
        raise ValueError(f"{self.kind.value} spec has no pattern decomposition")

    def coin_vector(self) -> NDArray[np.complex128]:
        """Normalized 2^M coin vector. Boson/fermion map to their psi± counterpart."""
        if self.kind is Kind.SEPARABLE:
            v = np.ones(1, dtype=np.complex128)
            for s in self.states:
                v = np.kron(v, s.vector)
            return v
        if self.kind is Kind.GENERAL:
            return np.asarray(self.vector, dtype=np.complex128).copy()
        v = np.zeros(2**self.M, dtype=np.complex128)
        for p, s in self.patterns():
            v[_pattern_index(p)] += s
        return v / np.linalg.norm(v)


@lru_cache(maxsize=64)
def _amplitude_table_cached(t: int) -> NDArray[np.complex128]:
    tab = np.stack([evolve(CoinState.L(), t).amps, evolve(CoinState.R(), t).amps])
    tab.setflags(write=False)
    return tab


def amplitude_table(t: int) -> NDArray[np.complex128]:
    """Read-only array ``[source, m + t, k]`` of Hadamard amplitudes psi^source_k(m, t)."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    return _amplitude_table_cached(int(t))


def _check_sites(m: Sequence[int], M: int, t: int) -> tuple[int, ...]:
    m = tuple(int(x) for x in m)
    if len(m) != M:
        raise ValueError(f"expected {M} sites, got {len(m)}")
    return m


def _pattern_product(tab, pattern, k, m, t) -> complex:
    """psi^{p_1}_{k_1}(m_1) ... psi^{p_M}_{k_M}(m_M)."""
    out = 1.0 + 0j
    for p_i, k_i, m_i in zip(pattern, k, m):
        if abs(m_i) > t:
            return 0j
        out *= tab[p_i, m_i + t, k_i]
    return out


@dataclass(frozen=True, eq=False)
class JointAccessor:
    """Joint position distribution p(m_1, ..., m_M, t) of a non-interacting walk."""

    spec: InitialCoinSpec
    t: int
    evaluator: Callable[[tuple[int, ...]], float] = field(repr=False)
    side_probs: tuple[tuple[float, float], ...] | None = field(default=None, repr=False)

    @property
    def M(self) -> int:
        return self.spec.M

    def __call__(self, *m: int) -> float:
        if len(m) == 1 and not isinstance(m[0], (int, np.integer)):
            m = tuple(m[0])
        return self.evaluator(_check_sites(m, self.M, self.t))

    def grid(self) -> NDArray[np.float64]:
        """Full (2t+1)^M probability tensor, axis i indexed by m_i + t."""
        if self.spec.kind is Kind.SEPARABLE:
            out = np.ones(())
            for s in self.spec.states:
                out = np.multiply.outer(out, distribution(evolve(s, self.t)))
            return out
        return joint_grid(self.spec.coin_vector(), self.t)


def joint_separable(spec: InitialCoinSpec, t: int) -> JointAccessor:
    """p(m_1..m_M) = prod_i p_i(m_i) for a product coin state."""
    if spec.kind is not Kind.SEPARABLE:
        raise ValueError(f"joint_separable needs a separable spec, got {spec.kind.value}")
    dists = [distribution(evolve(s, t)) for s in spec.states]
    sides = tuple(side_probabilities(evolve(s, t)) for s in spec.states)

    def evaluate(m: tuple[int, ...]) -> float:
        out = 1.0
        for d, x in zip(dists, m):
            if abs(x) > t:
                return 0.0
            out *= d[x + t]
        return float(out)

    return JointAccessor(spec, t, evaluate, sides)


def joint_general(spec: InitialCoinSpec, t: int) -> JointAccessor:
    """Accessor for any coin vector: sum_k |sum_s c_s prod_i psi^{s_i}_{k_i}(m_i)|²."""
    c = spec.coin_vector().reshape((2,) * spec.M)
    tab = amplitude_table(t)

    def evaluate(m: tuple[int, ...]) -> float:
        amp = c
        for x in m:
            if abs(x) > t:
                return 0.0
        # contract source axis 0 of the remaining tensor with A_i[s, k]
        for x in m:
            amp = np.tensordot(amp, tab[:, x + t, :], axes=([0], [0]))
        return float(np.sum(np.abs(amp) ** 2))

    return JointAccessor(spec, t, evaluate)


def joint_bell(spec: InitialCoinSpec, t: int, m: Sequence[int]) -> float:
    """
    Bell-type joint probability from signed pattern products.

    p(m) = (1/n) sum_k |sum_p s_p prod_i psi^{p_i}_{k_i}(m_i)|², n = number of patterns.
    """
    if spec.kind not in (Kind.BELL_PSI, Kind.BELL_PHI):
        raise ValueError(f"joint_bell needs a Bell-type spec, got {spec.kind.value}")
    m = _check_sites(m, spec.M, t)
    tab = amplitude_table(t)
    pats = spec.patterns()
    total = 0.0
    for k in itertools.product((L, R), repeat=spec.M):
        amp = sum(s * _pattern_product(tab, p, k, m, t) for p, s in pats)
        total += abs(amp) ** 2
    return total / len(pats)


def joint_grid(coin_vector: NDArray, t: int) -> NDArray[np.float64]:
    """Full joint distribution tensor (2t+1)^M for an arbitrary coin vector."""
    c = np.asarray(coin_vector, dtype=np.complex128)
    M = int(round(math.log2(c.size)))
    amp = c.reshape((2,) * M)
    tab = amplitude_table(t)  # [s, m, k]
    for _ in range(M):
        # consume the leading source axis, append (m, k) axes at the end
        amp = np.tensordot(amp, tab, axes=([0], [0]))
    # axes now (m1, k1, m2, k2, ...)
    prob = np.abs(amp) ** 2
    return prob.sum(axis=tuple(range(1, 2 * M, 2)))


def _phi_sites(t: int) -> NDArray[np.float64]:
    """phi(m,t) = psi^L_L psi^R_L + psi^L_R psi^R_R (real for the Hadamard walk)."""
    tab = amplitude_table(t)
    return np.real(tab[L, :, L] * tab[R, :, L] + tab[L, :, R] * tab[R, :, R])


def interference_term(M: int, t: int) -> tuple[float, float, float]:
    """
    (I(t), phi_minus(t), phi_plus(t)) with phi± the sums of phi(m,t) over the
    negative ([-t, 0]) and positive ([1, t]) sides and I = phi_minus^M + phi_plus^M.

    For two-pattern Bell-type states (psi± with M <= 3, phi± for any M)
    P_sameside = pattern_sameside ± I exactly.
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    phi = _phi_sites(t)
    phi_minus = float(np.sum(phi[: t + 1]))
    phi_plus = float(np.sum(phi[t + 1 :]))
    return phi_minus**M + phi_plus**M, phi_minus, phi_plus


def pattern_sameside(spec: InitialCoinSpec, t: int) -> float:
    """Mean same-side probability of the product states named by the state's patterns."""
    pats = spec.patterns()
    vals = [
        sameside_from_coin_vector(InitialCoinSpec.general(_basis(p)).coin_vector(), t)
        for p, _ in pats
    ]
    return float(np.mean(vals))


def _basis(pattern: Sequence[int]) -> NDArray[np.complex128]:
    v = np.zeros(2 ** len(pattern), dtype=np.complex128)
    v[_pattern_index(pattern)] = 1.0
    return v


@lru_cache(maxsize=64)
def _side_grams_cached(t: int) -> tuple[NDArray, NDArray]:
    tab = amplitude_table(t)
    neg = tab[:, : t + 1, :]
    pos = tab[:, t + 1 :, :]
    g_minus = np.einsum("smk,umk->su", neg.conj(), neg)
    g_plus = np.einsum("smk,umk->su", pos.conj(), pos)
    return g_minus, g_plus


def side_grams(t: int) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """
    2×2 matrices G±[s, s'] = sum_{m on side} sum_k conj(psi^s_k(m)) psi^{s'}_k(m).

    For any coin vector c, the orthant sum of the joint distribution is
    <c| G^{⊗M} |c>.
    """
    gm, gp = _side_grams_cached(int(t))
    return gm.copy(), gp.copy()


@dataclass(frozen=True)
class SideSeries:
    """Per-time side quantities: the Gram pair and the phi sums of ``interference_term``."""

    t: int
    g_minus: NDArray[np.complex128]
    g_plus: NDArray[np.complex128]
    phi_minus: float
    phi_plus: float

    def sameside(self, c: NDArray) -> float:
        """<c|G-^{⊗M}|c> + <c|G+^{⊗M}|c>."""
        c = np.asarray(c, dtype=np.complex128)
        M = int(round(math.log2(c.size)))
        val = np.vdot(c, _kron_power(self.g_minus, M) @ c) + np.vdot(c, _kron_power(self.g_plus, M) @ c)
        return float(val.real)

    def interference(self, M: int) -> float:
        return self.phi_minus**M + self.phi_plus**M


def side_series(t_max: int) -> Iterator[SideSeries]:
    """
    Yield SideSeries for t = 0..t_max from one pass of the |L> and |R> walks.

    Same values as ``side_grams`` and ``interference_term`` without
    re-evolving from the origin at every t.
    """
    if t_max < 0:
        raise ValueError(f"t_max must be non-negative, got {t_max}")
    for sl, sr in zip(trajectory(CoinState.L(), t_max), trajectory(CoinState.R(), t_max)):
        t = sl.t
        tab = np.stack([sl.amps, sr.amps])
        grams = []
        for side in (slice(0, t + 1), slice(t + 1, 2 * t + 1)):
            part = tab[:, side, :].reshape(2, -1)
            grams.append(part.conj() @ part.T)
        phi = np.real(np.sum(sl.amps * sr.amps, axis=1))
        yield SideSeries(t, grams[0], grams[1], float(phi[: t + 1].sum()), float(phi[t + 1 :].sum()))


def _kron_power(g: NDArray, M: int) -> NDArray:
    out = np.ones((1, 1), dtype=np.complex128)
    for _ in range(M):
        out = np.kron(out, g)
    return out


def sameside_from_coin_vector(c: NDArray, t: int) -> float:
    c = np.asarray(c, dtype=np.complex128)
    M = int(round(math.log2(c.size)))
    gm, gp = side_grams(t)
    val = np.vdot(c, _kron_power(gm, M) @ c) + np.vdot(c, _kron_power(gp, M) @ c)
    return float(val.real)


def orthant_sum(accessor: JointAccessor) -> float:
    """Brute-force double orthant sum over the full joint tensor."""
    g = accessor.grid()
    t = accessor.t
    neg = g[(slice(0, t + 1),) * accessor.M]
    pos = g[(slice(t + 1, 2 * t + 1),) * accessor.M]
    return float(neg.sum() + pos.sum())


def sameside_distinguishable(accessor: JointAccessor, t: int | None = None) -> float:
    """
    Probability that all particles are on [-t, 0] or all on [1, t].

    Separable specs use prod p_i^- + prod p_i^+; other kinds use the side Gram
    matrices, which equal the orthant sum exactly.
    """
    if t is not None and t != accessor.t:
        raise ValueError(f"accessor is at t={accessor.t}, asked for t={t}")
    if accessor.spec.kind is Kind.SEPARABLE:
        pm = np.prod([p[0] for p in accessor.side_probs])
        pp = np.prod([p[1] for p in accessor.side_probs])
        return float(pm + pp)
    return sameside_from_coin_vector(accessor.spec.coin_vector(), accessor.t)


def _indist_sign(spec: InitialCoinSpec) -> int:
    if spec.kind is Kind.BOSON:
        return 1
    if spec.kind is Kind.FERMION:
        return -1
    raise ValueError(f"indistinguishable counting needs boson/fermion, got {spec.kind.value}")


def joint_indistinguishable(spec: InitialCoinSpec, t: int, m: Sequence[int]) -> float:
    """
    Probability of detecting one particle at each of the ordered sites m_1 >= ... >= m_M.

    Distinct sites: sum_r |sum_p (±) prod_i psi^{p_i}_{r_i}(m_i)|² over the
    alternating patterns (+ bosons, - fermions). All sites equal: the psi±
    joint probability at that point. Partially repeated sites (M >= 3) divide
    the pattern sum by prod_j c_j! for site multiplicities c_j.
    """
    sign = _indist_sign(spec)
    m = _check_sites(m, spec.M, t)
    if any(m[i] < m[i + 1] for i in range(len(m) - 1)):
        raise ValueError(f"sites must be ordered m_1 >= m_2 >= ...; got {m}")
    bell = InitialCoinSpec.bell_psi(spec.M, sign)
    if len(set(m)) == 1 and spec.M > 1:
        return joint_bell(bell, t, m)
    tab = amplitude_table(t)
    pats = bell.patterns()
    total = 0.0
    for r in itertools.product((L, R), repeat=spec.M):
        amp = sum(s * _pattern_product(tab, p, r, m, t) for p, s in pats)
        total += abs(amp) ** 2
    mult = 1
    for site in set(m):
        mult *= math.factorial(m.count(site))
    return total / mult


def _ordered_tuples(lo: int, hi: int, M: int):
    """All m_1 >= m_2 >= ... >= m_M with every entry in [lo, hi]."""
    for comb in itertools.combinations_with_replacement(range(hi, lo - 1, -1), M):
        yield comb


def sameside_indistinguishable(spec: InitialCoinSpec, t: int) -> float:
    """Sum of joint_indistinguishable over ordered tuples inside each orthant."""
    _indist_sign(spec)
    if spec.M == 2:
        return _sameside_indist_2p(spec, t)
    total = 0.0
    for lo, hi in ((-t, 0), (1, t)):
        for m in _ordered_tuples(lo, hi, spec.M):
            total += joint_indistinguishable(spec, t, m)
    return total


def _sameside_indist_2p(spec: InitialCoinSpec, t: int) -> float:
    # vectorized M = 2 path: same formula as joint_indistinguishable
    sign = _indist_sign(spec)
    tab = amplitude_table(t)
    lr = np.einsum("ak,bl->akbl", tab[L], tab[R])  # psi^L_k(m1) psi^R_l(m2)
    rl = np.einsum("ak,bl->akbl", tab[R], tab[L])
    pattern_sum = np.sum(np.abs(lr + sign * rl) ** 2, axis=(1, 3))  # [m1, m2]
    n = 2 * t + 1
    i, j = np.indices((n, n))
    weights = np.where(i > j, 1.0, np.where(i == j, 0.5, 0.0))
    w = pattern_sum * weights
    return float(w[: t + 1, : t + 1].sum() + w[t + 1 :, t + 1 :].sum())

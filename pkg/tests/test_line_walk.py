import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import line_amplitudes
from frozen_values import LINE_P_MINUS
from qwalk.coin_algebra import CoinState, identity_coin, random_unitary
from qwalk.line_walk import (
    WalkState1D,
    chiral_amplitudes,
    distribution,
    evolve,
    origin_state,
    side_probabilities,
    step,
    trajectory,
)

SQ2 = np.sqrt(2.0)


def test_first_step_from_L():
    s = step(origin_state(CoinState.L()))
    assert s.t == 1
    assert s.amplitude(-1)[0] == pytest.approx(1 / SQ2)
    assert s.amplitude(1)[1] == pytest.approx(1 / SQ2)
    assert abs(s.amplitude(-1)[1]) == 0 and abs(s.amplitude(1)[0]) == 0


def test_two_steps_distribution():
    p = distribution(evolve(CoinState.L(), 2))
    assert np.allclose(p, [0.25, 0, 0.5, 0, 0.25], atol=1e-15)


def test_evolve_matches_matrix_power_oracle():
    for c in ([1, 0], [0, 1], [1 / SQ2, 1j / SQ2]):
        for t in (0, 1, 2, 9):
            ours = evolve(np.array(c), t).amps
            assert np.max(np.abs(ours - line_amplitudes(np.array(c, dtype=complex), t))) < 1e-13


def test_identity_coin_translates():
    s = WalkState1D(2, np.array([[0, 0], [0.6, 0], [0, 0], [0, 0.8j], [0, 0]], dtype=complex))
    out = step(s, identity_coin(2))
    # L at x=-1 moves to -2, R at x=+1 moves to +2
    assert out.amplitude(-2)[0] == 0.6
    assert out.amplitude(2)[1] == 0.8j
    assert out.norm() == pytest.approx(1.0, abs=1e-15)


def test_parity_support_is_exact_zero():
    s = evolve(CoinState.symmetric(), 37)
    odd = (s.positions + s.t) % 2 == 1
    assert np.all(s.amps[odd] == 0)


def test_norm_random_coin():
    rng = np.random.default_rng(0)
    c = random_unitary(2, rng)
    s = evolve(CoinState.L(), 300, c)
    assert abs(s.norm() - 1) < 1e-12


def test_symmetric_state_is_mirror_symmetric():
    for t in (5, 40, 101):
        p = distribution(evolve(CoinState.symmetric(), t))
        assert np.max(np.abs(p - p[::-1])) < 1e-12


def test_side_probabilities_small_t():
    assert side_probabilities(evolve(CoinState.L(), 0)) == (1.0, 0.0)
    pm, pp = side_probabilities(evolve(CoinState.L(), 1))
    assert pm == pytest.approx(0.5) and pp == pytest.approx(0.5)


def test_side_probabilities_frozen_oracle():
    states = {"L": CoinState.L(), "R": CoinState.R(), "sym": CoinState.symmetric()}
    for (name, t), expected in LINE_P_MINUS.items():
        pm, pp = side_probabilities(evolve(states[name], t))
        assert pm == pytest.approx(expected, abs=1e-12)
        assert pm + pp == pytest.approx(1.0, abs=1e-12)


def test_side_probability_converges_for_L():
    pm, _ = side_probabilities(evolve(CoinState.L(), 2000))
    assert abs(pm - 0.75) < 0.02


def test_chiral_amplitudes():
    aL, aR = chiral_amplitudes("L", 0)
    assert aL[0] == 1 and aR[0] == 0
    aL, aR = chiral_amplitudes("R", 1)
    assert aL[0] == pytest.approx(1 / SQ2)
    assert aR[2] == pytest.approx(-1 / SQ2)
    for src in "LR":
        aL, aR = chiral_amplitudes(src, 50)
        assert np.sum(np.abs(aL) ** 2 + np.abs(aR) ** 2) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        chiral_amplitudes("U", 3)


def test_trajectory_matches_evolve():
    states = list(trajectory(CoinState.R(), 12))
    assert [s.t for s in states] == list(range(13))
    assert np.array_equal(states[-1].amps, evolve(CoinState.R(), 12).amps)


def test_negative_t_rejected():
    with pytest.raises(ValueError):
        evolve(CoinState.L(), -1)


@settings(max_examples=50, deadline=None)
@given(
    st.floats(0, 2 * np.pi),
    st.floats(0, 2 * np.pi),
    st.floats(0.05, np.pi / 2 - 0.05),
    st.integers(0, 40),
)
def test_linearity(phase_a, phase_b, angle, t):
    alpha = np.cos(angle) * np.exp(1j * phase_a)
    beta = np.sin(angle) * np.exp(1j * phase_b)
    sup = evolve(np.array([alpha, beta]), t).amps
    parts = alpha * evolve(CoinState.L(), t).amps + beta * evolve(CoinState.R(), t).amps
    assert np.max(np.abs(sup - parts)) < 1e-12

import numpy as np
import pytest

from oracles import direct_dft
from qwalk.coin_algebra import cdelta_coin
from qwalk.delta_walk import WalkState2D, evolve_uniform, origin_state_2d
from qwalk.fourier import (
    FourierField,
    eigensystem,
    forward_transform,
    inverse_transform,
    k_grid,
    m_matrix,
    propagate,
)

C0 = np.array([0.5, 0.5j, -0.5, 0.5])


def _last(gen):
    for s in gen:
        pass
    return s


def _random_axial_state(t, seed):
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((4, t + 1, t + 1)) + 1j * rng.standard_normal((4, t + 1, t + 1))
    return WalkState2D(t, data / np.linalg.norm(data), "axial")


def test_m_matrix_origin_is_cdelta():
    assert np.array_equal(m_matrix(0.0, 0.0), cdelta_coin())


def test_m_matrix_first_row():
    rng = np.random.default_rng(0)
    for kx, ky in rng.uniform(-np.pi, np.pi, (20, 2)):
        assert np.allclose(m_matrix(kx, ky)[0], np.exp(-1j * kx) / 2, atol=1e-15)


def test_m_matrix_unitary_everywhere():
    rng = np.random.default_rng(1)
    k = rng.uniform(-np.pi, np.pi, (1000, 2))
    m = m_matrix(k[:, 0], k[:, 1])
    resid = np.swapaxes(m.conj(), -1, -2) @ m - np.eye(4)
    assert np.max(np.abs(resid)) <= 1e-12
    single = m_matrix(np.pi / 3, -np.pi / 4)
    assert np.max(np.abs(single.conj().T @ single - np.eye(4))) <= 1e-12


def test_m_matrix_is_one_step_of_axial_walk():
    # a single site at (x, y) picks up e^{ik·x'} for each moved channel
    N = 8
    s = _last(evolve_uniform(C0, 1, cdelta_coin(), "axial"))
    f1 = forward_transform(s, N).values
    f0 = forward_transform(origin_state_2d(C0, "axial"), N).values
    k = k_grid(N)
    m = m_matrix(k[:, None], k[None, :])
    assert np.max(np.abs(np.einsum("abij,abj->abi", m, f0) - f1)) < 1e-14


def test_eigensystem_at_origin():
    e = eigensystem(0.0, 0.0)
    assert np.allclose(np.abs(e.eigenvalues), 1.0, atol=1e-12)
    assert np.prod(e.eigenvalues) == pytest.approx(np.linalg.det(cdelta_coin()), abs=1e-12)
    assert np.max(np.abs(e.reconstruct() - cdelta_coin())) < 1e-12


def test_eigensystem_invariants_on_grid():
    k = k_grid(64)
    e = eigensystem(k[:, None], k[None, :])
    v = e.eigenvectors
    assert np.max(np.abs(np.abs(e.eigenvalues) - 1)) < 1e-10
    assert np.max(np.abs(np.swapaxes(v.conj(), -1, -2) @ v - np.eye(4))) < 1e-10
    assert np.max(np.abs(e.reconstruct() - m_matrix(k[:, None], k[None, :]))) < 1e-10


def test_spectral_power_matches_matrix_power():
    rng = np.random.default_rng(2)
    for _ in range(100):
        kx, ky = rng.uniform(-np.pi, np.pi, 2)
        t = int(rng.integers(0, 21))
        e = eigensystem(kx, ky)
        ref = np.linalg.matrix_power(m_matrix(kx, ky), t)
        assert np.max(np.abs(e.reconstruct(t) - ref)) < 1e-10


def test_eigensystem_deterministic():
    a = eigensystem(0.7, -1.1)
    b = eigensystem(0.7, -1.1)
    assert np.max(np.abs(a.eigenvalues - b.eigenvalues)) <= 1e-12


def test_degenerate_points_handled():
    # forcing every point through the cluster path still gives an orthonormal eigenbasis
    k = np.array([0.0, np.pi / 2, -np.pi, np.pi / 4])
    e = eigensystem(k[:, None], k[None, :], cluster_tol=10.0)
    v = e.eigenvectors
    assert np.max(np.abs(np.swapaxes(v.conj(), -1, -2) @ v - np.eye(4))) < 1e-12
    assert np.max(np.abs(e.reconstruct(7) - np.linalg.matrix_power(m_matrix(k[:, None], k[None, :]), 7))) < 1e-10


def test_eigenphases_continuous_along_diagonal():
    k = np.arange(-np.pi, np.pi, 1e-3)
    lam = eigensystem(k, k).eigenvalues
    for i in range(1, len(k)):
        # each eigenvalue has a partner at the previous sample within π/2 in phase
        d = np.abs(np.angle(lam[i][:, None] / lam[i - 1][None, :]))
        assert np.all(d.min(axis=1) < np.pi / 2)


def test_forward_of_origin_state_is_constant():
    f = forward_transform(origin_state_2d(C0, "axial"), 16)
    assert np.max(np.abs(f.values - C0)) < 1e-15


def test_forward_matches_direct_dft():
    s = _random_axial_state(5, 3)
    assert np.max(np.abs(forward_transform(s, 12).values - direct_dft(s.amps, 5, 12))) < 1e-13


def test_round_trip_and_plancherel():
    s = _random_axial_state(10, 4)
    f = forward_transform(s, 64)
    assert f.norm() == pytest.approx(1.0, abs=1e-12)
    back = inverse_transform(f, 10)
    assert np.max(np.abs(back.amps - s.amps)) <= 1e-12


def test_transform_rejects_oversized_support():
    s = _random_axial_state(10, 5)
    with pytest.raises(ValueError):
        forward_transform(s, 20)
    with pytest.raises(ValueError):
        forward_transform(s, 31)
    f = forward_transform(s, 22)
    with pytest.raises(ValueError):
        inverse_transform(f, 4)


def test_propagate_t0_and_t1():
    f = forward_transform(_random_axial_state(3, 6), 16)
    assert np.array_equal(propagate(f, 0).values, f.values)
    k = k_grid(16)
    m = m_matrix(k[:, None], k[None, :])
    one = propagate(f, 1)
    assert np.max(np.abs(one.values - np.einsum("abij,abj->abi", m, f.values))) < 1e-10
    with pytest.raises(ValueError):
        propagate(f, -1)


def test_end_to_end_matches_direct_axial_walk():
    N = 256
    f0 = forward_transform(origin_state_2d(C0, "axial"), N)
    k = k_grid(N)
    eig = eigensystem(k[:, None], k[None, :])
    for direct in evolve_uniform(C0, 50, cdelta_coin(), "axial"):
        if direct.t % 10:
            continue
        ft = propagate(f0, direct.t, eig)
        assert ft.norm() == pytest.approx(1.0, abs=1e-10)
        assert np.max(np.abs(inverse_transform(ft, direct.t).amps - direct.amps)) < 1e-10


def test_field_validation():
    with pytest.raises(ValueError):
        FourierField(3, np.zeros((3, 3, 4), dtype=complex))
    with pytest.raises(ValueError):
        FourierField(4, np.zeros((4, 4, 2), dtype=complex))

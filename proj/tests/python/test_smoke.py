import numpy as np
import pytest

import muprobe as mp


def half_delay():
    return mp.StateSpaceModel([[0.0]], [[1.0]], [[0.5]], [[0.0]])


def test_random_stable_and_freq_response():
    m = mp.random_stable(3, 6, 0.9, 1)
    assert m.n == 3
    assert m.spectral_radius <= 0.9 + 1e-12
    G = mp.freq_response(m, 0.3)
    A, B, C, D = m.A, m.B, m.C, m.D
    z = np.exp(1j * 0.3)
    ref = C @ np.linalg.solve(z * np.eye(A.shape[0]) - A, B) + D
    assert np.allclose(G, ref, atol=1e-12)


def test_transforms_round_trip():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((16, 2)) + 1j * rng.standard_normal((16, 2))
    assert np.allclose(mp.idft_standard(mp.dft_standard(x)), x, atol=1e-12)
    assert np.allclose(mp.idft_time_reversed(mp.dft_time_reversed(x)), x, atol=1e-12)


def test_power_iteration_full_block():
    M = np.diag([2.0, 1.0]).astype(complex)
    r = mp.model_power_iteration(M, mp.BlockStructure.single_full(2))
    assert r["status"] == "converged"
    assert r["mu"] == pytest.approx(2.0, rel=1e-8)


def test_estimate_half_delay():
    est = mp.estimate(half_delay(), mp.BlockStructure.single_full(1), N=64)
    assert est["converged"]
    assert est["mu"] == pytest.approx(0.5, rel=1e-3)
    assert est["peak_bin"] == 0


def test_oracle_functions():
    rng = np.random.default_rng(3)
    M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    s = mp.BlockStructure([1], [2])
    sigma = np.linalg.norm(M, 2)
    rho = max(abs(np.linalg.eigvals(M)))
    assert mp.exact_single_full(M) == pytest.approx(sigma, rel=1e-12)
    lo = mp.random_search_lower_bound(M, s, 500, 1)
    up = mp.diag_scaling_upper_bound(M, s)
    assert rho - 1e-9 <= lo <= up + 1e-9
    assert up <= sigma + 1e-12
    assert mp.hinf_grid(half_delay(), 16) == pytest.approx(0.5)


def test_errors_raise():
    with pytest.raises(mp.DimensionError):
        mp.model_power_iteration(np.eye(3, dtype=complex), mp.BlockStructure.single_full(2))
    with pytest.raises(ValueError):
        mp.BlockStructure.from_rm([1, 0], [0])
    assert issubclass(mp.ConfigError, ValueError)

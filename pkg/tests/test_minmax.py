"""Grid embeddings, Fourier-matrix identities, and the adversarial pair."""
import math

import numpy as np
import pytest

from confvan.matrices import confluent_rect, svd
from confvan.minmax import (adversarial_pair, adversarial_report,
                            brute_force_estimator, embed_on_grid,
                            extract_from_grid, fourier_grid_matrices,
                            minmax_lower_estimate)
from confvan.signals import (ClusterParams, Grid, MeasurementSet, SpikeSignal,
                             fourier_coeff, validate_cluster_config,
                             weighted_norm)


def coarse_grid(points=11):
    # delta = pi / (2M + 0.5) puts exactly 2M+1 points in the window
    M = (points - 1) // 2
    return Grid(delta=math.pi / (2 * M + 0.5))


def on_grid_signal(rng, grid, s):
    idx = rng.choice(grid.G, size=s, replace=False)
    nodes = (np.sort(idx) - grid.M) * grid.delta
    return SpikeSignal(nodes=nodes,
                       a=rng.standard_normal(s) + 1j * rng.standard_normal(s),
                       b=rng.standard_normal(s) + 1j * rng.standard_normal(s))


# ---------------------------------------------------------------------------
# embedding
# ---------------------------------------------------------------------------

def test_embed_single_dirac_at_center():
    grid = coarse_grid()
    emb = embed_on_grid(SpikeSignal(nodes=[0.0], a=[1.0], b=[0.0]), grid)
    expected = np.zeros(2 * grid.G, dtype=np.complex128)
    expected[grid.M] = 1.0
    np.testing.assert_array_equal(emb.x_mu, expected)


def test_embed_derivative_entry_is_minus_i_b():
    grid = coarse_grid()
    emb = embed_on_grid(SpikeSignal(nodes=[0.0], a=[0.0], b=[1.0]), grid)
    assert emb.x_mu[grid.G + grid.M] == -1j
    assert np.count_nonzero(emb.x_mu) == 1


def test_embed_extract_roundtrip():
    rng = np.random.default_rng(0)
    grid = coarse_grid(15)
    mu = on_grid_signal(rng, grid, 3)
    back = extract_from_grid(embed_on_grid(mu, grid))
    np.testing.assert_allclose(back.nodes, mu.nodes, atol=1e-15)
    np.testing.assert_allclose(back.a, mu.a)
    np.testing.assert_allclose(back.b, mu.b)


def test_embed_rejects_off_grid_node():
    grid = coarse_grid()
    mu = SpikeSignal(nodes=[0.4 * grid.delta], a=[1.0], b=[0.0])
    with pytest.raises(ValueError, match="not on the grid"):
        embed_on_grid(mu, grid)


# ---------------------------------------------------------------------------
# Fourier matrices
# ---------------------------------------------------------------------------

def test_fourier_row_against_one_hot():
    grid = coarse_grid(13)
    F, Fp, Ftilde = fourier_grid_matrices(grid, 2)
    j = 2  # grid point (j - M) * delta
    t = (j - grid.M) * grid.delta
    one_hot = np.zeros(2 * grid.G, dtype=np.complex128)
    one_hot[j] = 1.0
    got = Ftilde @ one_hot
    np.testing.assert_allclose(got, np.exp(1j * np.arange(5) * t),
                               atol=1e-14)


def test_fourier_matrices_reject_wide_frequency_range():
    grid = coarse_grid(11)  # M = 5
    with pytest.raises(ValueError, match="2N <= M"):
        fourier_grid_matrices(grid, 3)


def test_grid_identity_matches_confluent_matrix():
    # same linear map in two bases: embedding through the grid rows vs
    # the confluent matrix acting on (a, -i z b), both equal mu_hat
    rng = np.random.default_rng(1)
    grid = Grid(delta=math.pi / 40.5)  # M = 40
    N = 10
    _, _, Ftilde = fourier_grid_matrices(grid, N)
    for _ in range(100):
        s = int(rng.integers(1, 4))
        mu = on_grid_signal(rng, grid, s)
        x = embed_on_grid(mu, grid).x_mu
        lhs = Ftilde @ x
        z = np.exp(1j * mu.nodes)
        w = np.concatenate([mu.a, -1j * z * mu.b])
        rhs = math.sqrt(2 * N) * (confluent_rect(mu.nodes, N) @ w)
        direct = fourier_coeff(mu, np.arange(2 * N + 1))
        scale = np.linalg.norm(direct)
        assert np.linalg.norm(lhs - rhs) <= 1e-11 * scale
        assert np.linalg.norm(lhs - direct) <= 1e-11 * scale


# ---------------------------------------------------------------------------
# adversarial pair
# ---------------------------------------------------------------------------

def doubled_cluster(ell, delta):
    return delta * (np.arange(2 * ell) - ell)


def test_pair_at_zero_epsilon_is_degenerate():
    mu1, mu2, y, sep = adversarial_pair(doubled_cluster(2, 0.05), 8, 0.0)
    assert sep == 0.0
    np.testing.assert_array_equal(mu1.a, 0.0)
    np.testing.assert_array_equal(mu2.a, 0.0)
    np.testing.assert_array_equal(y.y, 0.0)


def test_pair_separation_sigma_identity():
    t = doubled_cluster(2, 0.04)
    N = 10
    eps = 1e-6
    mu1, mu2, y, sep = adversarial_pair(t, N, eps)
    rep = adversarial_report(t, N, eps)
    assert sep * rep["sigma_min"] == pytest.approx(eps, rel=1e-12)
    assert set(rep) == {"mu1", "mu2", "y", "epsilon", "sigma_min",
                        "separation"}


def test_pair_data_gap_has_norm_epsilon():
    t = doubled_cluster(2, 0.06)
    N = 9
    eps = 1e-5
    mu1, mu2, _, _ = adversarial_pair(t, N, eps)
    k = np.arange(2 * N + 1)
    gap = fourier_coeff(mu1, k) - fourier_coeff(mu2, k)
    assert weighted_norm(gap) == pytest.approx(eps, rel=1e-10)


def test_pair_halves_validate_as_clustered():
    delta = 0.03
    t = doubled_cluster(2, delta)
    mu1, mu2, _, _ = adversarial_pair(t, 10, 1e-8)
    # odd/even split of a delta-spaced run leaves 2-delta spacing
    params = ClusterParams(delta=2 * delta, rho=math.pi, s=2, ell=2, tau=1.0)
    assert validate_cluster_config(mu1.nodes, params).ok
    assert validate_cluster_config(mu2.nodes, params).ok
    assert not np.intersect1d(mu1.nodes, mu2.nodes).size


def test_pair_rejects_odd_node_count():
    with pytest.raises(ValueError, match="disjoint halves"):
        adversarial_pair([0.0, 0.1, 0.2], 8, 1e-6)


def test_pair_separation_matches_embedding_distance():
    grid = coarse_grid(11)
    t = grid.delta * (np.arange(4) - 2)
    mu1, mu2, _, sep = adversarial_pair(t, 5, 1e-7)
    x1 = embed_on_grid(mu1, grid).x_mu
    x2 = embed_on_grid(mu2, grid).x_mu
    assert np.linalg.norm(x1 - x2) == pytest.approx(sep, rel=1e-12)


# ---------------------------------------------------------------------------
# instance lower bound
# ---------------------------------------------------------------------------

def test_lower_estimate_linear_in_epsilon():
    t = doubled_cluster(2, 0.05)
    one = minmax_lower_estimate(t, 8, 1e-6)
    two = minmax_lower_estimate(t, 8, 2e-6)
    assert two == pytest.approx(2.0 * one, rel=1e-12)


def test_lower_estimate_matches_svd_oracle():
    # well separated so the double-precision SVD itself is trustworthy
    t = doubled_cluster(2, 0.7)
    sigma = svd(confluent_rect(t, 8))[1][-1]
    assert minmax_lower_estimate(t, 8, 1e-6) == pytest.approx(
        1e-6 / (2 * sigma), rel=1e-10)


def test_lower_estimate_scaling_slope():
    # single doubled cluster, ell = 2: the bound grows like srf^(4l-1)
    N = 12
    srfs = np.logspace(1.0, 3.0, 10)
    vals = [minmax_lower_estimate(doubled_cluster(2, math.pi / (N * srf)),
                                  N, 1e-12) for srf in srfs]
    slope = np.polyfit(np.log(srfs), np.log(vals), 1)[0]
    assert slope == pytest.approx(7.0, abs=0.15)


# ---------------------------------------------------------------------------
# brute-force feasible estimator
# ---------------------------------------------------------------------------

def test_brute_force_recovers_exact_on_grid_signal():
    grid = coarse_grid(11)
    truth = SpikeSignal(nodes=[(3 - grid.M) * grid.delta], a=[1.5],
                        b=[0.7j])
    N = 4
    y = MeasurementSet(y=fourier_coeff(truth, np.arange(2 * N + 1)), N=N,
                       epsilon=0.0)
    est = brute_force_estimator(y, grid, 1, 0.0)
    np.testing.assert_allclose(est.nodes, truth.nodes, atol=1e-15)
    np.testing.assert_allclose(est.a, truth.a, atol=1e-8)
    np.testing.assert_allclose(est.b, truth.b, atol=1e-8)


def test_brute_force_error_bounded_by_feasibility_gap():
    rng = np.random.default_rng(2)
    grid = coarse_grid(11)
    N = 2  # the grid rows cover frequencies up to M = 5 only
    eps = 1e-3
    truth = on_grid_signal(rng, grid, 1)
    exact = fourier_coeff(truth, np.arange(2 * N + 1))
    noise = rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1)
    noise *= 0.9 * eps / weighted_norm(noise)
    y = MeasurementSet(y=exact + noise, N=N, epsilon=eps)
    est = brute_force_estimator(y, grid, 1, eps)
    x_t = embed_on_grid(truth, grid).x_mu
    x_e = embed_on_grid(est, grid).x_mu
    support = np.flatnonzero(x_t - x_e)
    if support.size:
        _, _, Ftilde = fourier_grid_matrices(grid, N)
        sig = svd(Ftilde[:, support])[1][-1]
        bound = 2 * eps * math.sqrt(2 * N) / sig
        assert np.linalg.norm(x_t - x_e) <= bound


def test_brute_force_rejects_inconsistent_data():
    rng = np.random.default_rng(3)
    grid = coarse_grid(7)
    N = 4
    y = MeasurementSet(y=rng.standard_normal(2 * N + 1)
                       + 1j * rng.standard_normal(2 * N + 1),
                       N=N, epsilon=1e-12)
    with pytest.raises(ValueError, match="inconsistent data/epsilon"):
        brute_force_estimator(y, grid, 1, 1e-12)


def test_brute_force_guard_on_problem_size():
    grid = Grid(delta=math.pi / 20.5)  # G = 41
    y = MeasurementSet(y=np.zeros(9, dtype=np.complex128), N=4, epsilon=0.0)
    with pytest.raises(AssertionError):
        brute_force_estimator(y, grid, 1, 0.0)


def test_any_estimate_misses_one_adversarial_half():
    # the triangle chain: both halves are feasible for the shared data, so
    # whatever the estimator answers, it sits >= separation/2 from one
    grid = coarse_grid(11)
    N = 5
    for ell, eps in [(1, 1e-9), (2, 1e-7), (2, 1e-4)]:
        t = grid.delta * (np.arange(2 * ell) - ell)
        mu1, mu2, y, sep = adversarial_pair(t, N, eps)
        est = brute_force_estimator(y, grid, ell, eps)
        x1 = embed_on_grid(mu1, grid).x_mu
        x2 = embed_on_grid(mu2, grid).x_mu
        xe = embed_on_grid(est, grid).x_mu
        worst = max(np.linalg.norm(x1 - xe), np.linalg.norm(x2 - xe))
        assert worst >= sep / 2.0

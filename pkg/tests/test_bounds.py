"""Certified lower/upper bounds, finite differences, and torus identities."""
import math
import warnings

import numpy as np
import pytest

from confvan._accel import trig_poly_eval
from confvan.bounds import (certificate_report, certified_lower_bound,
                            convolution_norm_quadrature, decimation_search,
                            dirichlet, fd_apply, fd_coefficients,
                            fd_sum_bound_constants, kappa_factor,
                            parseval_convolution_norm, taylor_remainders,
                            theoretical_lower_bound, u_norm_lower_bound,
                            u_vector, upper_bound_certificate,
                            upper_bound_constant)
from confvan.matrices import confluent_rect, phi_unnormalized, sigma_min
from confvan.signals import ClusterParams, SpikeSignal, wraparound_distance

TWO_PI = 2.0 * math.pi


def pair_cluster_params(delta, s=2, ell=2, tau=1.0):
    return ClusterParams(delta=delta, rho=math.pi, s=s, ell=ell, tau=tau)


# ---------------------------------------------------------------------------
# decimation search
# ---------------------------------------------------------------------------

def test_decimation_single_node_always_admissible():
    # params describe the enclosing family; the search reads s off x
    params = pair_cluster_params(0.1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = decimation_search([0.3], params, Omega=16.0, N=32)
    assert res.admissible
    assert 16.0 / 2.0 <= res.lam <= 16.0 + 1e-12
    assert res.intra_sep == math.inf and res.inter_sep == math.inf


def test_decimation_pair_in_hypothesis_region():
    delta = 1e-3
    params = pair_cluster_params(delta)
    res = decimation_search([0.0, delta], params, Omega=16.0, N=64)
    assert res.admissible
    assert res.lam == pytest.approx(res.m * 16.0 / 64.0)
    assert res.intra_sep >= delta * 16.0 / 4.0 * (1 - 1e-12)


def test_decimation_separations_match_brute_force():
    rng = np.random.default_rng(0)
    delta = 0.02
    x = np.array([0.0, delta, 2.5, 2.5 + delta])
    params = ClusterParams(delta=delta, rho=2.0, s=4, ell=2, tau=1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = decimation_search(x, params, Omega=40.0, N=40)
    lam = res.lam
    intra, inter = math.inf, math.inf
    for i in range(4):
        for j in range(i + 1, 4):
            d = wraparound_distance(lam * (x[i] - x[j]))
            if {i, j} in ({0, 1}, {2, 3}):
                intra = min(intra, d)
            else:
                inter = min(inter, d)
    assert res.intra_sep == pytest.approx(intra, rel=1e-12)
    assert res.inter_sep == pytest.approx(inter, rel=1e-12)


# ---------------------------------------------------------------------------
# certified bounds
# ---------------------------------------------------------------------------

def test_certified_bound_single_node():
    params = pair_cluster_params(0.1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lo = certified_lower_bound([0.3], params, Omega=16.0, N=16)
    sig = sigma_min(confluent_rect([0.3], 16))
    assert lo <= sig * (1 + 1e-9)
    assert lo >= 0.1 * sig


def test_certified_bound_random_pairs_below_sigma_min():
    rng = np.random.default_rng(1)
    for _ in range(100):
        delta = 10.0 ** rng.uniform(-4.0, -1.4)
        N = int(rng.integers(8, 49))
        x = np.array([0.0, delta])
        lo = certified_lower_bound(x, pair_cluster_params(delta),
                                   Omega=float(N), N=N)
        sig = sigma_min(confluent_rect(x, N))
        assert lo <= sig * (1 + 1e-9)
        # and the closed-form bound sits below the computed certificate
        assert theoretical_lower_bound(2, 2, delta, N) <= lo


def test_certified_bound_requires_admissible_stride():
    # rho tight enough that no stride separates the antipodal pair
    x = np.array([0.0, 1e-3, math.pi / 2, math.pi / 2 + 1e-3])
    params = ClusterParams(delta=1e-3, rho=1.0, s=4, ell=2, tau=1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        dec = decimation_search(x, params, Omega=4.0, N=8)
        if not dec.admissible:
            with pytest.raises(ValueError, match="no certificate"):
                certified_lower_bound(x, params, Omega=4.0, N=8)


def test_kappa_single_node_hand_value():
    assert kappa_factor(1) == pytest.approx(1.0 / (10.0 * math.pi))


def test_theoretical_bound_decreasing_in_node_count():
    vals = [theoretical_lower_bound(s, 1, 0.05, 10) for s in range(1, 5)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_theoretical_bound_below_measured_sigma_min():
    rng = np.random.default_rng(2)
    for _ in range(20):
        delta = 10.0 ** rng.uniform(-3.0, -1.6)
        N = int(rng.integers(8, 40))
        x = np.array([0.0, delta])
        assert theoretical_lower_bound(2, 2, delta, N) <= \
            sigma_min(confluent_rect(x, N))


def test_theoretical_bound_warns_outside_hypothesis_region():
    with pytest.warns(UserWarning, match="hypothesis region"):
        theoretical_lower_bound(2, 2, 0.5, 1000)


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

def test_fd_single_offset_is_pure_derivative():
    fd = fd_coefficients([0.0], h=-0.25)
    np.testing.assert_allclose(fd.A, [0.0], atol=1e-15)
    np.testing.assert_allclose(fd.B, [1.0], atol=1e-15)


def test_fd_two_offsets_moment_conditions():
    # the dataclass itself asserts the four moment residuals at 1e-9
    fd = fd_coefficients([0.0, 1.0], h=-0.01)
    assert fd.ell == 2
    assert fd.offsets[1] == pytest.approx(-0.01)


def test_fd_rejects_coincident_offsets():
    with pytest.raises(ValueError, match="singular"):
        fd_coefficients([0.0, 1.0, 1.0], h=-0.1)


def test_fd_weight_sums_within_assembled_constants():
    rng = np.random.default_rng(3)
    for _ in range(50):
        ell = int(rng.integers(1, 4))
        tau = np.concatenate([[0.0],
                              np.sort(rng.uniform(0.2, 2.0 * ell, ell - 1))])
        h = -rng.uniform(1e-4, 0.5)
        fd = fd_coefficients(tau, h)
        C_A, C_B = fd_sum_bound_constants(tau)
        assert np.abs(fd.A).sum() <= C_A * abs(h) ** (1 - 2 * ell)
        assert np.abs(fd.B).sum() <= C_B * abs(h) ** (2 - 2 * ell)


def test_u_vector_padding_is_zero():
    u = u_vector([0.0, 1.0], alpha=0.4, M=12, s=5)
    assert u.shape == (10,)
    np.testing.assert_array_equal(u[2:5], 0.0)
    np.testing.assert_array_equal(u[7:], 0.0)
    assert np.all(u[:2] != 0.0) and np.all(u[5:7] != 0.0)


@pytest.mark.parametrize("ell", [2, 3])
@pytest.mark.parametrize("spread_factor", [1, 2])
def test_u_vector_norm_lower_bound(ell, spread_factor):
    tau_max = float(ell - 1) if spread_factor == 1 else 2.0 * ell
    tau = np.linspace(0.0, tau_max, ell)
    lb = u_norm_lower_bound(ell, tau_max)
    for alpha in (0.1, 0.5, 0.9):
        u = u_vector(tau, alpha=alpha, M=16, s=ell + 1)
        assert np.linalg.norm(u) >= lb


def test_u_vector_rayleigh_quotient_dominates_sigma_min():
    tau = np.array([0.0, 1.0])
    alpha, M, s = 0.3, 10, 2
    u = u_vector(tau, alpha, M, s)
    om = tau * alpha / M
    Phi = phi_unnormalized(om, M)
    assert np.linalg.norm(Phi @ u) / np.linalg.norm(u) >= \
        sigma_min(Phi) * (1 - 1e-12)


# ---------------------------------------------------------------------------
# Dirichlet kernel
# ---------------------------------------------------------------------------

def test_dirichlet_at_zero():
    assert dirichlet(7, 0.0) == pytest.approx(8.0)


def test_dirichlet_l2_norm():
    M = 9
    grid = np.arange(64 * M) / (64 * M)
    vals = dirichlet(M, grid)
    norm = math.sqrt(float(np.mean(np.abs(vals) ** 2)))
    assert norm == pytest.approx(math.sqrt(M + 1), rel=1e-12)


@pytest.mark.parametrize("q", [1, 2, 3])
def test_dirichlet_derivative_bernstein_bound(q):
    M = 9
    grid = np.arange(64 * M) / (64 * M)
    vals = dirichlet(M, grid, order=q)
    norm = math.sqrt(float(np.mean(np.abs(vals) ** 2)))
    assert norm <= (TWO_PI * M) ** q * math.sqrt(M + 1)


# ---------------------------------------------------------------------------
# upper bound certificate
# ---------------------------------------------------------------------------

def test_upper_certificate_dominates_sigma_min():
    rng = np.random.default_rng(4)
    for _ in range(10):
        N = int(rng.integers(8, 33))
        srf = 10.0 ** rng.uniform(1.0, 2.5)
        delta = math.pi / (N * srf)
        xi = np.array([0.0, delta])
        up = upper_bound_certificate(xi, N, pair_cluster_params(delta))
        assert up >= sigma_min(confluent_rect(xi, N)) * (1 - 1e-9)


def test_upper_certificate_rejects_oversampled_cluster():
    delta = 0.2
    with pytest.raises(ValueError, match="precondition"):
        upper_bound_certificate([0.0, delta], 100,
                                pair_cluster_params(delta))


def test_upper_certificate_within_assembled_envelope():
    # constants are loose by design; only the envelope direction is fixed
    C2 = upper_bound_constant(2, [0.0, 1.0])
    for srf in (10.0, 100.0, 1000.0):
        N = 24
        delta = math.pi / (N * srf)
        xi = np.array([0.0, delta])
        up = upper_bound_certificate(xi, N, pair_cluster_params(delta))
        envelope = C2 * math.sqrt(2 * N + 1) * (2.0 * N * delta) ** 3
        assert up <= envelope


def test_upper_certificate_slope():
    srfs = np.logspace(1.0, 3.0, 12)
    N = 24
    vals = []
    for srf in srfs:
        delta = math.pi / (N * srf)
        xi = np.array([0.0, delta])
        vals.append(upper_bound_certificate(xi, N,
                                            pair_cluster_params(delta)))
    slope = np.polyfit(np.log(srfs), np.log(vals), 1)[0]
    assert slope == pytest.approx(-3.0, abs=0.1)


# ---------------------------------------------------------------------------
# Taylor identity and remainders
# ---------------------------------------------------------------------------

def test_fd_rule_equals_derivative_plus_remainders():
    rng = np.random.default_rng(5)
    for _ in range(20):
        ell = int(rng.integers(1, 4))
        M = int(rng.integers(4, 20))
        tau = np.concatenate([[0.0],
                              np.sort(rng.uniform(0.2, 2.0 * ell, ell - 1))])
        fd = fd_coefficients(tau, h=-rng.uniform(1e-3, 0.05))
        c = rng.standard_normal(M + 1) + 1j * rng.standard_normal(M + 1)
        w = rng.uniform(0.0, 1.0, 7)
        S = fd_apply(c, fd, w)
        dc = (2j * np.pi * np.arange(M + 1)) ** (2 * ell - 1) * c
        P = trig_poly_eval(dc.astype(np.complex128), w)
        R_A, R_B = taylor_remainders(c, fd, w)
        resid = np.abs(S - P - R_A - R_B)
        scale = np.maximum(np.abs(S), np.maximum(np.abs(P), 1.0))
        assert float((resid / scale).max()) <= 1e-6


def test_remainder_l2_norms_within_lemma_bounds():
    # p = one-sided Dirichlet kernel, the certificate's worst case
    rng = np.random.default_rng(6)
    for _ in range(50):
        ell = int(rng.integers(2, 4))
        M = int(rng.integers(6, 24))
        tau_max = rng.uniform(ell - 1.0, 2.0 * ell)
        inner = np.sort(rng.uniform(0.3, tau_max, ell - 2))
        tau = np.concatenate([[0.0], inner, [tau_max]])
        alpha = rng.uniform(0.05, 0.9)
        fd = fd_coefficients(tau, h=-alpha / M)
        grid = np.arange(8 * M) / (8 * M)
        R_A, R_B = taylor_remainders(np.ones(M + 1, dtype=np.complex128),
                                     fd, grid)
        n_a = math.sqrt(float(np.mean(np.abs(R_A) ** 2)))
        n_b = math.sqrt(float(np.mean(np.abs(R_B) ** 2)))
        bern = math.sqrt(M + 1.0) * (TWO_PI * M) ** (2 * ell)
        bound_a = ((alpha / M) ** (2 * ell) * bern * tau_max ** (2 * ell)
                   / math.factorial(2 * ell - 1) * np.abs(fd.A).sum())
        bound_b = ((alpha / M) ** (2 * ell - 1) * bern
                   * tau_max ** (2 * ell - 1)
                   / math.factorial(2 * ell - 2) * np.abs(fd.B).sum())
        assert n_a <= bound_a and n_b <= bound_b


# ---------------------------------------------------------------------------
# torus moment identities
# ---------------------------------------------------------------------------

def test_parseval_single_dirac():
    sig = SpikeSignal(nodes=[0.37], a=[1.0], b=[0.0])
    assert parseval_convolution_norm(sig, 12) == pytest.approx(
        math.sqrt(13.0), rel=1e-12)


def test_parseval_derivative_only_closed_form():
    M = 9
    sig = SpikeSignal(nodes=[0.61], a=[0.0], b=[0.5])
    closed = 0.5 * TWO_PI * math.sqrt(M * (M + 1) * (2 * M + 1) / 6.0)
    assert parseval_convolution_norm(sig, M) == pytest.approx(closed,
                                                              rel=1e-12)


def test_parseval_matches_convolution_quadrature():
    rng = np.random.default_rng(7)
    for _ in range(10):
        t0 = rng.uniform(0.1, 0.8)
        sig = SpikeSignal(nodes=[t0, t0 + rng.uniform(0.01, 0.05)],
                          a=rng.standard_normal(2),
                          b=0.1 * rng.standard_normal(2))
        M = int(rng.integers(4, 16))
        p = parseval_convolution_norm(sig, M)
        q = convolution_norm_quadrature(sig, M)
        assert q == pytest.approx(p, rel=1e-6)


# ---------------------------------------------------------------------------
# consolidated report
# ---------------------------------------------------------------------------

def test_certificate_report_shape_and_sandwich():
    delta = 1e-3
    N = 32
    rep = certificate_report(np.array([0.0, delta]),
                             pair_cluster_params(delta), float(N), N)
    assert set(rep) == {"sigma_min", "lower_certificate",
                        "upper_certificate", "m", "lambda", "admissible",
                        "constants"}
    assert set(rep["constants"]) == {"kappa", "C1", "C2"}
    assert rep["admissible"]
    lo, sig, up = (rep["lower_certificate"], rep["sigma_min"],
                   rep["upper_certificate"])
    assert lo <= sig * (1 + 1e-9) <= up * (1 + 2e-9)

"""Certified two-sided bounds on the smallest singular value of the
confluent Vandermonde matrix of a clustered node configuration.

Lower side: decimate the rows with a stride m chosen so the decimated
nodes spread out on the circle, bound sigma_min below by aggregating the
smallest singular values of the resulting square blocks (valid for any
disjoint row subsets), and compare with the closed-form constant bound.

Upper side: build an explicit near-kernel vector from finite-difference
weights on the cluster and evaluate its Rayleigh quotient, which always
dominates sigma_min.

Everything here works on two coordinate systems joined by a fixed bridge:
node angles xi in (-pi, pi] with z_j = exp(i xi_j), and torus positions
omega = xi/(-2 pi) + 1/2 in [0, 1) with z_j = exp(-2 pi i omega_j).  The
derivative term of the torus-side transform carries +2 pi i m (the sign
that makes the convolution-norm identity hold).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._accel import pair_separation_scan, trig_poly_eval
from .matrices import phi_apply_norm_mp, sigma_min_auto
from .signals import (ClusterParams, SpikeSignal, as_nodes, wraparound_distance,
                      validate_cluster_config)

__all__ = [
    "DecimationResult",
    "FDCoefficients",
    "certificate_report",
    "certified_lower_bound",
    "convolution_norm_quadrature",
    "decimation_search",
    "dirichlet",
    "fd_apply",
    "fd_coefficients",
    "fd_sum_bound_constants",
    "kappa_factor",
    "parseval_convolution_norm",
    "taylor_remainders",
    "theoretical_constant",
    "theoretical_lower_bound",
    "u_norm_lower_bound",
    "u_vector",
    "upper_bound_certificate",
    "upper_bound_constant",
]

TWO_PI = 2.0 * math.pi

# Quadrature density for L2 norms of degree-M trigonometric polynomials;
# the rectangle rule on 64*M points integrates |p|^2 exactly.
QUADRATURE_FACTOR = 64


# =============================================================================
# Decimation search and the certified lower bound
# =============================================================================

@dataclass(frozen=True)
class DecimationResult:
    """Outcome of the decimation-stride search.

    m is the stride, lam = m*Omega/N the scaled frequency, intra_sep and
    inter_sep the worst scaled wraparound distances achieved within and
    across clusters (inf when the group has no pairs).  admissible means
    lam sits in the target window and both separation thresholds hold.
    """

    m: int
    lam: float
    intra_sep: float
    inter_sep: float
    admissible: bool

    def __post_init__(self):
        assert self.m >= 0, f"stride must be nonnegative, got {self.m}"
        assert self.intra_sep >= 0 and self.inter_sep >= 0, (
            "separations must be nonnegative"
        )


def decimation_search(x, params: ClusterParams, Omega: float,
                      N: int) -> DecimationResult:
    """Scan strides m = 0..2N for the best row decimation.

    Candidate strides keep lam = m*Omega/N inside [Omega/2s, Omega/s].
    Each candidate is scored by how far the decimated nodes exceed the
    two separation thresholds delta*Omega/(2s) (within clusters) and
    pi/(2 s^2) (across clusters); the best score wins, ties to smaller m.
    When no stride lands in the window the best scorer overall is
    returned with admissible=False; the caller decides whether that is
    fatal.
    """
    x = as_nodes(x)
    s = x.size
    if params.rho <= 0 or not (4.0 * math.pi * s / params.rho <= Omega
                               <= math.pi * s / (params.tau * params.delta)):
        warnings.warn(
            f"bandwidth Omega={Omega:.6g} outside the guaranteed window "
            f"[{4 * math.pi * s / params.rho if params.rho > 0 else math.inf:.6g}, "
            f"{math.pi * s / (params.tau * params.delta):.6g}]; "
            "the search runs anyway", stacklevel=2)

    report = validate_cluster_config(x, params)
    pairs_i, pairs_j = np.triu_indices(s, k=1)
    diffs = x[pairs_i] - x[pairs_j]
    is_intra = np.array([pj in report.members[pi]
                         for pi, pj in zip(pairs_i, pairs_j)], dtype=bool)

    m_all = np.arange(2 * N + 1)
    lam_all = m_all * (Omega / float(N))
    intra_min, inter_min = pair_separation_scan(diffs, is_intra, lam_all)

    thr_intra = params.delta * Omega / (2.0 * s)
    thr_inter = math.pi / (2.0 * s * s)
    slack = 1.0 - 1e-12  # boundary strides may hit the threshold exactly
    score = np.minimum(intra_min / thr_intra, inter_min / thr_inter)

    window = (lam_all >= Omega / (2.0 * s) * slack) & (lam_all <= Omega / s)
    if np.any(window):
        cand = np.flatnonzero(window)
        best = int(cand[np.argmax(score[cand])])
        admissible = bool(intra_min[best] >= thr_intra * slack
                          and inter_min[best] >= thr_inter * slack)
    else:
        best = int(np.argmax(score))
        admissible = False
    return DecimationResult(m=best, lam=float(lam_all[best]),
                            intra_sep=float(intra_min[best]),
                            inter_sep=float(inter_min[best]),
                            admissible=admissible)


def certified_lower_bound(x, params: ClusterParams, Omega: float,
                          N: int) -> float:
    """Computed lower bound on sigma_min of the bandlimited confluent
    matrix: root sum of squares of the block sigma_mins over the rows
    {k, m+k, .., (2s-1)m+k}, k = 0..m-1.

    Any disjoint row subsets aggregate this way, so the value is a
    certificate whenever the block SVDs are trustworthy; the blocks
    escalate to extended precision exactly like sigma_min_auto.
    """
    x = as_nodes(x)
    s = x.size
    dec = decimation_search(x, params, Omega, N)
    if not dec.admissible:
        raise ValueError(
            f"no certificate: decimation search found no admissible stride "
            f"(best m={dec.m}, intra={dec.intra_sep:.3g}, "
            f"inter={dec.inter_sep:.3g})"
        )
    xi = x * (Omega / float(N))
    m = dec.m
    total = 0.0
    for k in range(m):
        rows = k + m * np.arange(2 * s)
        total += sigma_min_auto(xi, N, rows=rows) ** 2
    return math.sqrt(total)


def kappa_factor(s: int) -> float:
    """Separation constant 1/(5 pi s^2 (1 + s^2))."""
    assert s >= 1, f"s must be >= 1, got {s}"
    return 1.0 / (5.0 * math.pi * s * s * (1.0 + s * s))


def theoretical_constant(s: int) -> float:
    """Prefactor of the closed-form lower bound."""
    kap = kappa_factor(s)
    kap_tilde = math.pi ** (2 * (1 - s)) / math.sqrt(2.0 * s) * kap
    return kap_tilde / math.sqrt(16.0 * s)


def theoretical_lower_bound(s: int, ell: int, delta: float, N: int) -> float:
    """Closed-form lower bound C1(s) * (N*delta)^(2*ell-1).

    Warns (never fails) when (N, delta) sit outside the guaranteed
    hypothesis region, where the bound may not hold.
    """
    assert 1 <= ell <= s, f"need 1 <= ell <= s, got ell={ell}, s={s}"
    assert delta > 0 and N >= 1
    hi = math.pi * s / (max(ell - 1, 1) * delta)
    if not 2 * s <= N <= hi:
        warnings.warn(
            f"(N={N}, delta={delta:.3g}) outside the hypothesis region "
            f"[{2 * s}, {hi:.3g}]; the closed-form bound is advisory only",
            stacklevel=2)
    return theoretical_constant(s) * (N * delta) ** (2 * ell - 1)


# =============================================================================
# Finite-difference weights
# =============================================================================

@dataclass(frozen=True)
class FDCoefficients:
    """Weights (A_i, B_i) at offsets h_i = tau_vec[i] * h combining value
    and first-derivative samples into a (2*ell-1)-th derivative rule.

    Validated against the defining moment conditions: sum of A is 0, all
    mixed power sums up to order 2*ell-2 vanish, and the top one equals
    (2*ell-1)!.
    """

    tau_vec: np.ndarray
    h: float
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        tau = np.atleast_1d(np.asarray(self.tau_vec, dtype=np.float64))
        A = np.atleast_1d(np.asarray(self.A, dtype=np.complex128))
        B = np.atleast_1d(np.asarray(self.B, dtype=np.complex128))
        ell = tau.size
        assert A.size == ell and B.size == ell, "weight lengths must match tau"
        assert self.h != 0.0, "step h must be nonzero"
        object.__setattr__(self, "tau_vec", tau)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        h_i = tau * self.h
        fact = float(math.factorial(2 * ell - 1))
        for k in range(2 * ell):
            target = fact if k == 2 * ell - 1 else 0.0
            if k == 0:
                terms = A
                mass = np.abs(A)
            else:
                terms = A * h_i ** k + k * B * h_i ** (k - 1)
                # residual is relative to the addends before cancellation;
                # the A and B parts of one node can cancel to roundoff
                mass = (np.abs(A) * np.abs(h_i) ** k
                        + k * np.abs(B) * np.abs(h_i) ** (k - 1))
            resid = abs(terms.sum() - target)
            scale = float(mass.sum()) + abs(target)
            assert resid <= 1e-9 * max(scale, 1.0), (
                f"moment condition k={k} violated: residual {resid:.3g} "
                f"against scale {scale:.3g}"
            )

    @property
    def ell(self) -> int:
        return self.tau_vec.size

    @property
    def offsets(self) -> np.ndarray:
        return self.tau_vec * self.h


def fd_coefficients(tau_vec, h: float) -> FDCoefficients:
    """Solve for the finite-difference weights at offsets tau_vec * h.

    Solves the unit-scale system in the tau variables (condition number
    independent of h) and rescales: A by h^(1-2*ell), B by h^(2-2*ell).
    The raw system in the h variables is equivalent but its conditioning
    degrades like h^(-(2*ell-1)).
    """
    tau = np.atleast_1d(np.asarray(tau_vec, dtype=np.float64))
    ell = tau.size
    assert h != 0.0, "step h must be nonzero"
    assert tau[0] == 0.0, f"tau grid must start at 0, got {tau[0]}"
    if ell >= 2 and np.any(np.diff(tau) <= 0.0):
        raise ValueError(
            f"singular system: tau values must be strictly increasing and "
            f"distinct, got {tau.tolist()}"
        )
    L = np.zeros((2 * ell, 2 * ell))
    for k in range(2 * ell):
        L[k, :ell] = tau ** k
        L[k, ell:] = 0.0 if k == 0 else k * tau ** (k - 1)
    rhs = np.zeros(2 * ell)
    rhs[-1] = float(math.factorial(2 * ell - 1))
    y = np.linalg.solve(L, rhs)
    A = y[:ell] * float(h) ** (1 - 2 * ell)
    B = y[ell:] * float(h) ** (2 - 2 * ell)
    return FDCoefficients(tau_vec=tau, h=float(h), A=A, B=B)


def fd_sum_bound_constants(tau_vec) -> tuple[float, float]:
    """Constants (C_A, C_B) bounding the weight sums:
    sum|A_i| <= C_A * |h|^(1-2*ell) and sum|B_i| <= C_B * |h|^(2-2*ell),
    assembled from the inverse-norm bound of the unit-scale system."""
    tau = np.atleast_1d(np.asarray(tau_vec, dtype=np.float64))
    ell = tau.size
    assert ell >= 1 and tau[0] == 0.0
    spread = float(tau.max()) if ell >= 2 else 1.0
    fact = float(math.factorial(2 * ell - 1))
    sum_a = 0.0
    sum_b = 0.0
    for n in range(ell):
        others = np.delete(tau, n)
        gaps = tau[n] - others
        S_n = float(np.sum(1.0 / gaps)) if gaps.size else 0.0
        P_n = float(np.prod(gaps ** 2)) if gaps.size else 1.0
        sum_a += (abs(1.0 + 2.0 * tau[n] * S_n) + 2.0 * abs(S_n)) / P_n
        sum_b += 1.0 / P_n
    C_A = fact * (1.0 + spread) ** (2 * ell - 2) * sum_a
    C_B = fact * (1.0 + spread) ** (2 * ell - 1) * sum_b
    return C_A, C_B


def u_norm_lower_bound(ell: int, tau: float) -> float:
    """Closed-form lower bound (2*ell-1)! / (4 ell^3 tau^(2*ell-1)) on the
    norm of the padded finite-difference vector."""
    assert ell >= 2, f"the norm bound needs ell >= 2, got {ell}"
    assert tau > 0, f"spread tau must be positive, got {tau}"
    return float(math.factorial(2 * ell - 1)) / (4.0 * ell ** 3
                                                 * tau ** (2 * ell - 1))


def upper_bound_constant(ell: int, tau_vec) -> float:
    """Assembled prefactor C2 such that the Rayleigh certificate is at
    most C2 * sqrt(M+1) * (2 pi alpha)^(2*ell-1) for alpha <= 1."""
    tau = np.atleast_1d(np.asarray(tau_vec, dtype=np.float64))
    ell_v = tau.size
    assert ell_v == ell, f"tau grid length {ell_v} does not match ell={ell}"
    C_A, C_B = fd_sum_bound_constants(tau)
    spread = float(tau.max()) if ell >= 2 else 1.0
    fact = float(math.factorial(2 * ell - 1))
    c_tilde = (C_A * spread ** (2 * ell) + C_B * spread ** (2 * ell - 1)) / fact
    return (1.0 + TWO_PI * c_tilde) / u_norm_lower_bound(max(ell, 2), spread)


# =============================================================================
# Dirichlet kernel and the pad vector
# =============================================================================

def dirichlet(M: int, omega, order: int = 0):
    """One-sided Dirichlet kernel derivative:
    sum_{m=0..M} (2 pi i m)^order * exp(2 pi i m omega)."""
    assert M >= 1, f"M must be >= 1, got {M}"
    assert order >= 0, f"order must be >= 0, got {order}"
    m = np.arange(M + 1, dtype=np.float64)
    weights = (2j * np.pi * m) ** order
    w = np.asarray(omega, dtype=np.float64)
    out = trig_poly_eval(weights.astype(np.complex128), np.atleast_1d(w))
    return complex(out[0]) if w.ndim == 0 else out


def u_vector(tau_vec, alpha: float, M: int, s: int) -> np.ndarray:
    """Padded test vector of length 2s for the cluster at torus positions
    tau_j * alpha / M.

    First ell slots carry (alpha/M)^(2*ell-1) * A_j, slots s..s+ell carry
    the same power times 2 pi i z_j B_j; everything else is zero.  Its
    norm stays above u_norm_lower_bound while the matrix-vector product
    against the torus confluent matrix collapses, which is what makes it
    a useful Rayleigh witness.
    """
    tau = np.atleast_1d(np.asarray(tau_vec, dtype=np.float64))
    ell = tau.size
    assert ell <= s, f"cluster size {ell} exceeds node count {s}"
    assert M >= 1 and 0.0 < alpha < 1.0, (
        f"need M >= 1 and 0 < alpha < 1, got M={M}, alpha={alpha}"
    )
    dw = alpha / M
    fd = fd_coefficients(tau, h=-dw)
    z = np.exp(-2j * np.pi * (tau * dw))
    u = np.zeros(2 * s, dtype=np.complex128)
    u[:ell] = dw ** (2 * ell - 1) * fd.A
    u[s:s + ell] = dw ** (2 * ell - 1) * (2j * np.pi) * z * fd.B
    return u


def upper_bound_certificate(xi, N: int, params: ClusterParams) -> float:
    """Rayleigh-quotient upper bound on sigma_min of the normalized
    confluent matrix at a clustered configuration.

    Maps the nodes to the torus, builds the finite-difference vector on
    the cluster containing the globally minimal gap, and evaluates the
    quotient with an extended-precision numerator (the product cancels
    to roughly (N*delta)^(2*ell-1) of its operand scale).
    """
    xi = as_nodes(xi)
    s = xi.size
    assert N >= 1, f"N must be >= 1, got {N}"
    report = validate_cluster_config(xi, params)
    if not report.ok:
        raise ValueError(
            f"precondition violation: not a clustered configuration "
            f"({report.first_violation()})"
        )
    if N > 1.0 / (2.0 * params.delta):
        raise ValueError(
            f"precondition violation: N = {N} exceeds 1/(2 delta) = "
            f"{1.0 / (2.0 * params.delta):.6g}"
        )
    omega = xi / (-TWO_PI) + 0.5

    dist = wraparound_distance(xi[:, None] - xi[None, :])
    np.fill_diagonal(dist, np.inf)
    anchor = int(np.argmin(dist.min(axis=1)))
    cluster = np.array(report.members[anchor], dtype=np.int64)
    d_torus = float(dist.min()) / TWO_PI

    # unwrap the cluster's torus positions around the anchor before
    # ordering; the positions may straddle 0
    rel = omega[cluster] - omega[anchor]
    rel -= np.round(rel)
    order = np.argsort(rel)
    cluster = cluster[order]
    rel = rel[order]
    tau = (rel - rel[0]) / d_torus

    fd = fd_coefficients(tau, h=-d_torus)
    ell = tau.size
    z = np.exp(-2j * np.pi * omega[cluster])
    u = np.zeros(2 * s, dtype=np.complex128)
    u[cluster] = d_torus ** (2 * ell - 1) * fd.A
    u[s + cluster] = d_torus ** (2 * ell - 1) * (2j * np.pi) * z * fd.B

    numer = phi_apply_norm_mp(omega, 2 * N, u, scale=1.0 / math.sqrt(2.0 * N))
    return numer / float(np.linalg.norm(u))


# =============================================================================
# Taylor identity machinery (shared by the certificate analysis and tests)
# =============================================================================

def fd_apply(p_coeffs, fd: FDCoefficients, omega):
    """Apply the finite-difference rule to the trigonometric polynomial
    p(w) = sum_m c_m exp(2 pi i m w):
    sum_i A_i p(w + h_i) + B_i p'(w + h_i)."""
    c = np.atleast_1d(np.asarray(p_coeffs, dtype=np.complex128))
    m = np.arange(c.size, dtype=np.float64)
    dc = (2j * np.pi * m) * c
    w = np.atleast_1d(np.asarray(omega, dtype=np.float64))
    out = np.zeros(w.size, dtype=np.complex128)
    for i, h_i in enumerate(fd.offsets):
        out += fd.A[i] * trig_poly_eval(c, w + h_i)
        out += fd.B[i] * trig_poly_eval(dc, w + h_i)
    return out


def taylor_remainders(p_coeffs, fd: FDCoefficients, omega, n_gauss: int = 64):
    """Integral Taylor remainders (R_A, R_B) of the rule at omega.

    fd_apply minus the (2*ell-1)-th derivative of p equals R_A + R_B for
    every trigonometric polynomial p; the r-integrals over [0, 1] run on
    an n_gauss-point Gauss-Legendre rule.
    """
    c = np.atleast_1d(np.asarray(p_coeffs, dtype=np.complex128))
    ell = fd.ell
    m = np.arange(c.size, dtype=np.float64)
    c_top = (2j * np.pi * m) ** (2 * ell) * c
    w = np.atleast_1d(np.asarray(omega, dtype=np.float64))
    xg, wg = np.polynomial.legendre.leggauss(n_gauss)
    r = 0.5 * (xg + 1.0)
    wr = 0.5 * wg
    fact_a = float(math.factorial(2 * ell - 1))
    fact_b = float(math.factorial(2 * ell - 2))
    R_A = np.zeros(w.size, dtype=np.complex128)
    R_B = np.zeros(w.size, dtype=np.complex128)
    for i, h_i in enumerate(fd.offsets):
        # p^(2l) evaluated at all (omega, gauss node) pairs in one call
        args = (w[:, None] + h_i * r[None, :]).ravel()
        vals = trig_poly_eval(c_top, args).reshape(w.size, r.size)
        R_A += (fd.A[i] * h_i ** (2 * ell) / fact_a) * (
            vals @ (wr * (1.0 - r) ** (2 * ell - 1)))
        R_B += (fd.B[i] * h_i ** (2 * ell - 1) / fact_b) * (
            vals @ (wr * (1.0 - r) ** (2 * ell - 2)))
    return R_A, R_B


# =============================================================================
# Moment-sum identity on the torus
# =============================================================================

def parseval_convolution_norm(signal: SpikeSignal, M: int) -> float:
    """Root sum of squared torus moments (sum_{m=0..M} |mu_hat(m)|^2)^(1/2)
    with mu_hat(m) = sum_j (a_j + 2 pi i m b_j) exp(-2 pi i m t_j).

    The signal's nodes are read as positions on the unit torus [0, 1) and
    b as derivative weights under the exp(-2 pi i m t) transform.  Equals
    the L2 norm of the convolution with the one-sided Dirichlet kernel;
    convolution_norm_quadrature evaluates that side independently.
    """
    assert M >= 1, f"M must be >= 1, got {M}"
    t = np.asarray(signal.nodes, dtype=np.float64)
    m = np.arange(M + 1, dtype=np.float64)
    Z = np.exp(-2j * np.pi * np.outer(m, t))
    moments = Z @ signal.a + (2j * np.pi * m) * (Z @ signal.b)
    return float(np.sqrt(np.sum(np.abs(moments) ** 2)))


def convolution_norm_quadrature(signal: SpikeSignal, M: int,
                                factor: int = QUADRATURE_FACTOR) -> float:
    """L2([0,1)) norm of the signal convolved with the one-sided Dirichlet
    kernel, by the periodic rectangle rule on factor*M points.

    The integrand is a trigonometric polynomial of degree M, so any
    factor > 2 integrates |f|^2 exactly up to rounding.
    """
    assert M >= 1 and factor * M > 2 * M, "quadrature grid too coarse"
    n = factor * M
    grid = np.arange(n) / float(n)
    f = np.zeros(n, dtype=np.complex128)
    for j in range(signal.s):
        shifted = grid - signal.nodes[j]
        f += signal.a[j] * dirichlet(M, shifted, order=0)
        f += signal.b[j] * dirichlet(M, shifted, order=1)
    return float(np.sqrt(np.mean(np.abs(f) ** 2)))


# =============================================================================
# Consolidated certificate report
# =============================================================================

def certificate_report(x, params: ClusterParams, Omega: float,
                       N: int) -> dict:
    """All certificate quantities for one configuration, JSON-shaped:
    {sigma_min, lower_certificate, upper_certificate, m, lambda,
    admissible, constants: {kappa, C1, C2}}.  Certificates that do not
    apply are null, never an exception."""
    x = as_nodes(x)
    s = x.size
    dec = decimation_search(x, params, Omega, N)
    xi = x * (Omega / float(N))
    sig = sigma_min_auto(xi, N)
    lower = None
    if dec.admissible:
        lower = certified_lower_bound(x, params, Omega, N)
    upper = None
    # multiply by the ratio, not (value * Omega) / N: when Omega == N the
    # ratio is exactly 1.0 and the params stay bit-identical, which the
    # exact-comparison validator depends on
    ratio = Omega / float(N)
    params_xi = ClusterParams(delta=params.delta * ratio,
                              rho=params.rho * ratio,
                              s=params.s, ell=params.ell, tau=params.tau)
    try:
        upper = upper_bound_certificate(xi, N, params_xi)
    except ValueError:
        pass
    tau_grid = np.arange(params.ell, dtype=np.float64)
    return {
        "sigma_min": sig,
        "lower_certificate": lower,
        "upper_certificate": upper,
        "m": dec.m,
        "lambda": dec.lam,
        "admissible": dec.admissible,
        "constants": {
            "kappa": kappa_factor(s),
            "C1": theoretical_constant(s),
            "C2": upper_bound_constant(params.ell, tau_grid),
        },
    }

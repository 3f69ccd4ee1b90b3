"""Structured matrices for the spike + derivative model and spectral
primitives on top of them.

Builders: rectangular confluent Vandermonde matrices sampled at integer
frequencies, their square decimated blocks, the torus-convention variants
with derivative column scaling, block factorization matrices, and Hankel
matrices of moment sequences.

Spectral primitives: dense SVD and smallest singular value, plus
extended-precision (mpmath) evaluation of the smallest singular value via
the Gram matrix.  The latter exists because float64 SVD resolves sigma_min
only down to about 1e-16 relative to sigma_max, while clustered node
configurations push sigma_min far below that floor.
"""

from __future__ import annotations

import json
import math

import mpmath
import numpy as np

from .signals import as_nodes, wraparound_distance

__all__ = [
    "ComplexMatrix",
    "as_unit_nodes",
    "block_factors",
    "confluent_apply_norm_mp",
    "confluent_bandlimited",
    "confluent_rect",
    "confluent_square",
    "gautschi_inverse_norm_bound",
    "hankel_from_moments",
    "hankel_pair_coefficient_matrix",
    "matrix_from_json",
    "matrix_to_json",
    "pascal_vandermonde",
    "phi_apply_norm_mp",
    "phi_sigma_min_auto",
    "phi_unnormalized",
    "row_submatrix",
    "sigma_min",
    "sigma_min_auto",
    "sigma_min_mp",
    "square_sigma_min_lower_bound",
    "svd",
    "unitary_factors",
]

# Dense complex matrices are plain numpy arrays; no wrapper type.
ComplexMatrix = np.ndarray

TWO_PI = 2.0 * math.pi

# Below this ratio to sigma_max, a float64 sigma_min is dominated by
# rounding in the SVD itself and the mpmath path takes over.
FLOAT64_TRUST_RATIO = 1e-8


def as_unit_nodes(z) -> np.ndarray:
    """Validate a vector of pairwise distinct unit-modulus nodes."""
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    assert z.ndim == 1 and z.size >= 1, f"unit nodes must be 1d, got shape {z.shape}"
    assert np.all(np.abs(np.abs(z) - 1.0) <= 1e-12), (
        "unit nodes must have modulus 1 within 1e-12"
    )
    if z.size >= 2:
        iu = np.triu_indices(z.size, k=1)
        gap = np.abs(z[:, None] - z[None, :])[iu].min()
        assert gap > 0.0, "unit nodes must be pairwise distinct"
    return z


# =============================================================================
# Builders
# =============================================================================

def _confluent_rows(z: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Rows [z_j^k | k * z_j^(k-1)] for row indices k (vectorized)."""
    kk = k[:, None].astype(np.float64)
    plain = z[None, :] ** k[:, None]
    deriv = kk * z[None, :] ** (k[:, None] - 1)
    return np.hstack([plain, deriv])


def confluent_rect(xi, N: int) -> ComplexMatrix:
    """Normalized rectangular confluent Vandermonde matrix.

    Rows k = 0..2N; columns ``z_j^k / sqrt(2N)`` then
    ``k z_j^(k-1) / sqrt(2N)`` with ``z_j = exp(i xi_j)``.
    Shape (2N+1) x 2s.
    """
    assert N >= 1, f"N must be >= 1, got {N}"
    xi = as_nodes(xi)
    z = np.exp(1j * xi)
    k = np.arange(2 * N + 1)
    return _confluent_rows(z, k) / math.sqrt(2.0 * N)


def confluent_bandlimited(x, Omega: float, N: int) -> ComplexMatrix:
    """Confluent matrix at bandwidth-rescaled nodes ``xi_j = x_j * Omega/N``."""
    assert N >= 1, f"N must be >= 1, got {N}"
    if not 0.0 < Omega <= 2.0 * N:
        raise ValueError(
            f"bandwidth Omega must lie in (0, 2N] = (0, {2 * N}], got {Omega}"
        )
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    return confluent_rect(x * (Omega / N), N)


def confluent_square(z) -> ComplexMatrix:
    """Square 2s x 2s confluent Vandermonde matrix at unit nodes.

    Rows k = 0..2s-1, columns [z_j^k | k z_j^(k-1)], unnormalized.
    """
    z = as_unit_nodes(z)
    k = np.arange(2 * z.size)
    return _confluent_rows(z, k)


def phi_unnormalized(omega, M: int) -> ComplexMatrix:
    """Torus-convention confluent matrix, (M+1) x 2s, unnormalized.

    Rows m = 0..M of [z_j^m | m z_j^(m-1)] with ``z_j = exp(-2 pi i w_j)``
    for node positions ``w_j`` in [0, 1).
    """
    assert M >= 1, f"M must be >= 1, got {M}"
    w = np.atleast_1d(np.asarray(omega, dtype=np.float64))
    assert np.all((w >= 0.0) & (w < 1.0)), (
        f"torus positions must lie in [0, 1), got {w}"
    )
    z = np.exp(-2j * np.pi * w)
    return _confluent_rows(z, np.arange(M + 1))


def pascal_vandermonde(omega, M: int) -> ComplexMatrix:
    """Torus confluent matrix with derivative columns scaled by 2 pi i z_j.

    Equals phi_unnormalized(omega, M) times diag(1,..,1, 2 pi i z_1,..)
    exactly (column scaling, no rounding beyond the products).
    """
    w = np.atleast_1d(np.asarray(omega, dtype=np.float64))
    V = phi_unnormalized(w, M)
    s = w.size
    V[:, s:] *= (2j * np.pi) * np.exp(-2j * np.pi * w)[None, :]
    return V


def block_factors(z, m: int, r: int):
    """Factorization matrices (D, T, P) for a decimated row block.

    D scales derivative columns by ``m z_j^(m-1)``; T shifts the row origin
    by r.  P = D @ T exactly, and its inverse has max row sum 1 + |r/m|.
    """
    z = as_unit_nodes(z)
    if m == 0:
        raise ValueError("decimation stride m must be >= 1 (D is singular at m=0)")
    assert m >= 1, f"decimation stride m must be >= 1, got {m}"
    assert r >= 0, f"row offset r must be >= 0, got {r}"
    s = z.size
    D = np.diag(np.concatenate([np.ones(s, dtype=np.complex128),
                                m * z ** (m - 1)]))
    T = np.zeros((2 * s, 2 * s), dtype=np.complex128)
    T[:s, :s] = np.diag(z ** r)
    T[:s, s:] = np.diag(r * z ** (r - 1))
    T[s:, s:] = np.diag(z ** r)
    P = D @ T
    return D, T, P


def row_submatrix(U: ComplexMatrix, R) -> ComplexMatrix:
    """Select rows of U by a strictly increasing index set."""
    R = np.atleast_1d(np.asarray(R, dtype=np.int64))
    assert R.size >= 1 and np.all(np.diff(R) > 0), (
        f"row index set must be strictly increasing, got {R.tolist()}"
    )
    if R[0] < 0 or R[-1] >= U.shape[0]:
        raise ValueError(
            f"row index out of range: {int(R[0] if R[0] < 0 else R[-1])} "
            f"for a matrix with {U.shape[0]} rows"
        )
    return U[R, :]


def unitary_factors(N: int, s: int):
    """Diagonal sign matrices linking the integer-frequency and torus
    conventions.

    E1 is (2N+1) x (2N+1) with entries (-1)^k; E2 is 2s x 2s with entries
    (1,..,1, -1,..,-1).  Conjugating phi_unnormalized at shifted positions
    by these reproduces the normalized confluent matrix, so the two share
    singular values.
    """
    k = np.arange(2 * N + 1)
    E1 = np.diag(((-1.0) ** k).astype(np.complex128))
    E2 = np.diag(np.concatenate([np.ones(s), -np.ones(s)]).astype(np.complex128))
    return E1, E2


def hankel_from_moments(moments, C: int) -> ComplexMatrix:
    """C x C Hankel matrix with entry (i, j) = moments[i + j]."""
    m = np.atleast_1d(np.asarray(moments, dtype=np.complex128))
    assert C >= 1, f"C must be >= 1, got {C}"
    if m.size < 2 * C - 1:
        raise ValueError(
            f"insufficient moments: need at least {2 * C - 1}, got {m.size}"
        )
    idx = np.arange(C)
    return m[idx[:, None] + idx[None, :]]


def hankel_pair_coefficient_matrix(z, a, b) -> ComplexMatrix:
    """Middle factor B of the moment-Hankel factorization
    H = phi_unnormalized(...) @ B @ phi_unnormalized(...).T.

    For moments m_k = sum_j (a_j + 2 pi i k b_j) z_j^k the factor is
    symmetric with 2x2 pair structure: B[j, j] = a_j and
    B[j, s+j] = B[s+j, j] = 2 pi i z_j b_j (the derivative diagonal is
    zero; no diagonal B reproduces the k-linear term).
    """
    z = as_unit_nodes(z)
    s = z.size
    a = np.atleast_1d(np.asarray(a, dtype=np.complex128))
    b = np.atleast_1d(np.asarray(b, dtype=np.complex128))
    assert a.size == s and b.size == s, (
        f"coefficient lengths {a.size}, {b.size} must match node count {s}"
    )
    B = np.zeros((2 * s, 2 * s), dtype=np.complex128)
    B[np.arange(s), np.arange(s)] = a
    cross = (2j * np.pi) * z * b
    B[np.arange(s), s + np.arange(s)] = cross
    B[s + np.arange(s), np.arange(s)] = cross
    return B


# =============================================================================
# Inverse-norm and sigma_min lower bounds for the square matrix
# =============================================================================

def gautschi_inverse_norm_bound(x) -> float:
    """Upper bound on the max-row-sum norm of the inverse of the square
    confluent Vandermonde matrix at nodes x (distinct complex numbers)."""
    x = np.atleast_1d(np.asarray(x, dtype=np.complex128))
    n = x.size
    dist = np.abs(x[:, None] - x[None, :])
    if n >= 2:
        iu = np.triu_indices(n, k=1)
        if dist[iu].min() == 0.0:
            raise ValueError("coincident nodes: inverse norm bound undefined")
    best = 0.0
    for lam in range(n):
        others = np.delete(np.arange(n), lam)
        inv_sum = float(np.sum(1.0 / dist[lam, others])) if others.size else 0.0
        b_lam = max(1.0 + abs(x[lam]),
                    1.0 + 2.0 * (1.0 + abs(x[lam])) * inv_sum)
        prod = 1.0
        for nu in others:
            prod *= (1.0 + abs(x[nu])) / dist[lam, nu]
        best = max(best, b_lam * prod ** 2)
    return best


def square_sigma_min_lower_bound(z) -> float:
    """Certified lower bound on sigma_min of the square confluent matrix
    at unit nodes, from angular pairwise distances.

    For a single node the empty-product convention gives 1/(2 sqrt(2)).
    """
    z = as_unit_nodes(z)
    s = z.size
    theta = np.angle(z)
    pref = math.pi ** (2 * (1 - s)) / math.sqrt(2.0 * s)
    if s == 1:
        return pref * 0.5
    delta = wraparound_distance(theta[:, None] - theta[None, :])
    worst = math.inf
    for j in range(s):
        others = np.delete(np.arange(s), j)
        inv_sum = float(np.sum(1.0 / delta[j, others]))
        gamma = min(0.5, (2.0 / (5.0 * math.pi)) / inv_sum)
        worst = min(worst, gamma * float(np.prod(delta[j, others] ** 2)))
    return pref * worst


# =============================================================================
# Spectral primitives
# =============================================================================

def svd(A: ComplexMatrix):
    """Dense SVD; returns (left vectors, values descending, right vectors
    conjugate-transposed) so that A = left @ diag(values) @ right_h."""
    A = np.asarray(A, dtype=np.complex128)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return np.linalg.svd(A, full_matrices=False)


def sigma_min(A: ComplexMatrix) -> float:
    """Smallest singular value of a tall (rows >= cols) matrix."""
    A = np.asarray(A, dtype=np.complex128)
    if A.shape[0] < A.shape[1]:
        raise ValueError(
            f"rank-deficient by shape: {A.shape[0]} rows < {A.shape[1]} columns"
        )
    return float(svd(A)[1][-1])


# ---- extended precision -----------------------------------------------------

def _confluent_matrix_mp(theta, rows, scale: float) -> mpmath.matrix:
    """Confluent rows [w^k | k w^(k-1)], w_j = exp(i theta_j), at the
    current mpmath precision.  theta entries are float64 values treated as
    exact; all precision levels therefore build the same matrix."""
    rows = list(rows)
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    s = theta.size
    A = mpmath.matrix(len(rows), 2 * s)
    sc = mpmath.mpf(scale)
    for j in range(s):
        w = mpmath.expj(mpmath.mpf(float(theta[j])))
        # running power pw = w^(k-1), advanced along the increasing rows
        pw = mpmath.mpc(1) / w
        last = -1  # exponent currently held by pw
        for i, k in enumerate(rows):
            step = (k - 1) - last
            if step > 0:
                pw = pw * w if step == 1 else pw * w ** step
            last = k - 1
            A[i, j] = sc * pw * w
            A[i, s + j] = sc * k * pw
    return A


def _gram_mp(A: mpmath.matrix) -> mpmath.matrix:
    """Hermitian Gram matrix A* A at the current mpmath precision."""
    n, m = A.rows, A.cols
    G = mpmath.matrix(m, m)
    for i in range(m):
        for j in range(i, m):
            acc = mpmath.mpc(0)
            for k in range(n):
                acc += mpmath.conj(A[k, i]) * A[k, j]
            G[i, j] = acc
            if j != i:
                G[j, i] = mpmath.conj(acc)
    return G


def sigma_min_mp(theta, rows, scale: float = 1.0,
                 start_dps: int = 60, cap_dps: int = 1920) -> float:
    """Smallest singular value of the confluent matrix with unit nodes
    ``exp(i theta_j)`` and the given row index set, times ``scale``.

    Forms the Gram matrix in mpmath and takes the square root of its
    smallest eigenvalue, doubling the working precision until the smallest
    eigenvalue carries at least 15 trustworthy digits.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    rows = sorted(int(k) for k in rows)
    assert len(rows) >= 2 * theta.size, (
        f"rank-deficient by shape: {len(rows)} rows < {2 * theta.size} columns"
    )
    dps = start_dps
    while True:
        with mpmath.workdps(dps):
            A = _confluent_matrix_mp(theta, rows, scale)
            ev = mpmath.eigh(_gram_mp(A), eigvals_only=True)
            lam = [mpmath.re(e) for e in ev]
            lam_min, lam_max = min(lam), max(lam)
            if lam_max <= 0:
                return 0.0
            resolved = lam_min > lam_max * mpmath.mpf(10) ** (-(dps - 15))
            if resolved or dps >= cap_dps:
                return float(mpmath.sqrt(max(lam_min, mpmath.mpf(0))))
        dps *= 2


def sigma_min_auto(xi, N: int, rows=None) -> float:
    """sigma_min of the normalized confluent matrix (optionally a row
    subset), escalating from float64 SVD to mpmath when the float64 value
    sinks below FLOAT64_TRUST_RATIO times sigma_max."""
    xi = as_nodes(xi)
    U = confluent_rect(xi, N)
    if rows is not None:
        U = row_submatrix(U, rows)
    if U.shape[0] < U.shape[1]:
        raise ValueError(
            f"rank-deficient by shape: {U.shape[0]} rows < {U.shape[1]} columns"
        )
    vals = svd(U)[1]
    if vals[0] == 0.0:
        return 0.0
    if vals[-1] > FLOAT64_TRUST_RATIO * vals[0]:
        return float(vals[-1])
    row_list = range(2 * N + 1) if rows is None else rows
    return sigma_min_mp(xi, row_list, scale=1.0 / math.sqrt(2.0 * N))


def phi_sigma_min_auto(omega, M: int) -> float:
    """sigma_min of the unnormalized torus confluent matrix, with the same
    float64 -> mpmath escalation as sigma_min_auto."""
    w = np.atleast_1d(np.asarray(omega, dtype=np.float64))
    vals = svd(phi_unnormalized(w, M))[1]
    if vals[-1] > FLOAT64_TRUST_RATIO * vals[0]:
        return float(vals[-1])
    return sigma_min_mp(-TWO_PI * w, range(M + 1), scale=1.0)


def _apply_norm_mp(theta, rows, u, scale: float, dps: int) -> float:
    """Euclidean norm of (scale * confluent matrix) @ u in extended
    precision.  The vector u is taken entrywise exact (its float64
    entries define the test vector); only the matrix entries and the
    accumulation run in mpmath.  Needed because the product cancels
    almost completely for the near-kernel vectors this certifies."""
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    u = np.atleast_1d(np.asarray(u, dtype=np.complex128))
    assert u.size == 2 * theta.size, (
        f"vector length {u.size} does not match 2s = {2 * theta.size}"
    )
    rows = list(rows)
    with mpmath.workdps(dps):
        A = _confluent_matrix_mp(theta, rows, scale)
        uc = [mpmath.mpc(v) for v in u]
        acc = mpmath.mpf(0)
        for i in range(len(rows)):
            row = mpmath.mpc(0)
            for j in range(u.size):
                row += A[i, j] * uc[j]
            acc += mpmath.re(row) ** 2 + mpmath.im(row) ** 2
        return float(mpmath.sqrt(acc))


def phi_apply_norm_mp(omega, M: int, u, scale: float = 1.0,
                      dps: int = 80) -> float:
    """Norm of (scale * Phi_M(omega)) @ u under the torus convention."""
    w = np.atleast_1d(np.asarray(omega, dtype=np.float64))
    return _apply_norm_mp(-TWO_PI * w, range(M + 1), u, scale, dps)


def confluent_apply_norm_mp(xi, N: int, u, dps: int = 80) -> float:
    """Norm of the normalized confluent matrix at angles xi applied to u."""
    xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    return _apply_norm_mp(xi, range(2 * N + 1), u,
                          1.0 / math.sqrt(2.0 * N), dps)


# =============================================================================
# Debug serialization
# =============================================================================

def matrix_to_json(A: ComplexMatrix) -> str:
    A = np.asarray(A, dtype=np.complex128)
    return json.dumps({
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "entries": [[float(c.real), float(c.imag)] for c in A.ravel()],
    })


def matrix_from_json(text: str) -> ComplexMatrix:
    obj = json.loads(text)
    flat = np.array([complex(re, im) for re, im in obj["entries"]])
    return flat.reshape(int(obj["rows"]), int(obj["cols"]))

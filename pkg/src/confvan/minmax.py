"""On-grid embedding of spike signals, the Fourier-matrix identities that
tie the grid picture to the confluent Vandermonde matrix, and the
adversarial signal pair behind instance lower bounds for any estimator.

The adversarial construction takes the minimal singular vector of the
confluent matrix on a doubled node set, splits the resulting signal into
two halves with disjoint supports, and scales so that both halves explain
the same data up to the noise budget while staying far apart in
coefficient space.  Any estimator must then miss at least one of them by
half their separation.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .matrices import (confluent_apply_norm_mp, confluent_rect,
                       sigma_min_auto, svd)
from .signals import (Grid, MeasurementSet, SpikeSignal, as_nodes,
                      fourier_coeff, weighted_norm)

__all__ = [
    "GridEmbedding",
    "adversarial_pair",
    "adversarial_report",
    "brute_force_estimator",
    "embed_on_grid",
    "extract_from_grid",
    "fourier_grid_matrices",
    "minmax_lower_estimate",
]

# Feasibility slack for the brute-force search: noiseless data never has
# an exactly zero least-squares residual in floating point.
FEASIBILITY_SLACK = 1e-9


@dataclass(frozen=True)
class GridEmbedding:
    """Signal as a sparse coefficient vector over a grid.

    x_mu has length 2G: entry i holds a_j for a node at grid index i,
    entry i+G holds -1j * b_j.  support lists the placed indices (both
    blocks), so at most 2s entries are structurally nonzero.
    """

    grid: Grid
    x_mu: np.ndarray
    support: tuple[int, ...]

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x_mu, dtype=np.complex128))
        assert x.size == 2 * self.grid.G, (
            f"embedding length {x.size} does not match 2G = {2 * self.grid.G}"
        )
        assert all(0 <= i < 2 * self.grid.G for i in self.support), (
            "support indices out of range"
        )
        object.__setattr__(self, "x_mu", x)
        object.__setattr__(self, "support", tuple(sorted(self.support)))


def embed_on_grid(signal: SpikeSignal, grid: Grid) -> GridEmbedding:
    """Place a_j at the node's grid index and -1j * b_j at index + G.

    Every node must sit on the grid to 1e-12; an off-grid node raises
    with the offending value and its nearest grid point.
    """
    x = np.zeros(2 * grid.G, dtype=np.complex128)
    support = []
    for t, a, b in zip(signal.nodes, signal.a, signal.b):
        i = grid.index_of(float(t))
        x[i] = a
        x[i + grid.G] = -1j * b
        support.extend([i, i + grid.G])
    return GridEmbedding(grid=grid, x_mu=x, support=tuple(support))


def extract_from_grid(emb: GridEmbedding) -> SpikeSignal:
    """Inverse of embed_on_grid over the stored support."""
    node_idx = [i for i in emb.support if i < emb.grid.G]
    nodes = (np.asarray(node_idx, dtype=np.float64) - emb.grid.M) * emb.grid.delta
    a = emb.x_mu[node_idx]
    b = 1j * emb.x_mu[[i + emb.grid.G for i in node_idx]]
    return SpikeSignal(nodes=nodes, a=a, b=b)


def fourier_grid_matrices(grid: Grid, N: int):
    """Fourier matrices of the grid: F with entries exp(i k j delta) for
    k, j = -M..M, its row-scaled derivative counterpart diag(k) F, and
    the (2N+1) x 2G concatenation of their rows k = 0..2N.

    Applied to an embedding, the concatenation reproduces the signal's
    Fourier samples at frequencies 0..2N.
    """
    assert N >= 1, f"N must be >= 1, got {N}"
    if 2 * N > grid.M:
        raise ValueError(
            f"frequency range too wide for the grid: need 2N <= M, got "
            f"2N = {2 * N}, M = {grid.M}"
        )
    k = np.arange(-grid.M, grid.M + 1, dtype=np.float64)
    F = np.exp(1j * grid.delta * np.outer(k, k))
    Fp = k[:, None] * F
    sel = slice(grid.M, grid.M + 2 * N + 1)  # rows k = 0..2N
    Ftilde = np.hstack([F[sel], Fp[sel]])
    return F, Fp, Ftilde


def adversarial_pair(t, N: int, epsilon: float):
    """Two signals with disjoint node halves that share data within the
    noise budget.

    Splits the sorted doubled node set into even and odd positions, loads
    them with the minimal singular vector's coefficients scaled by
    epsilon/sigma (the second half negated), and returns
    (mu1, mu2, y, separation) where y is mu1's exact data and separation
    is the coefficient-space distance epsilon/sigma.  sigma is the norm
    of the matrix-vector product evaluated in extended precision, so the
    identity ||data gap|| = epsilon survives even when the minimal
    singular value sits far below the float64 floor.
    """
    t = as_nodes(t)
    n = t.size
    if n % 2 != 0:
        raise ValueError(
            f"cannot split {n} nodes into two disjoint halves of equal size"
        )
    assert epsilon >= 0.0, f"epsilon must be >= 0, got {epsilon}"
    assert 2 * N + 1 >= 2 * n, (
        f"need 2N+1 >= {2 * n} rows for a meaningful minimal singular "
        f"vector, got N={N}"
    )
    U = confluent_rect(t, N)
    v = svd(U)[2][-1].conj()
    sigma = confluent_apply_norm_mp(t, N, v)
    z = np.exp(1j * t)
    scale = 0.0 if epsilon == 0.0 else epsilon / sigma
    a_full = scale * v[:n]
    b_full = scale * 1j * v[n:] / z

    order = np.argsort(t)
    half1, half2 = order[0::2], order[1::2]
    mu1 = SpikeSignal(nodes=t[half1], a=a_full[half1], b=b_full[half1])
    mu2 = SpikeSignal(nodes=t[half2], a=-a_full[half2], b=-b_full[half2])
    y = MeasurementSet(y=fourier_coeff(mu1, np.arange(2 * N + 1)),
                       N=N, epsilon=epsilon)
    separation = 0.0 if epsilon == 0.0 else epsilon / sigma
    return mu1, mu2, y, separation


def adversarial_report(t, N: int, epsilon: float) -> dict:
    """JSON-shaped adversarial pair:
    {mu1, mu2, y, epsilon, sigma_min, separation}."""
    mu1, mu2, y, separation = adversarial_pair(t, N, epsilon)
    if separation > 0.0:
        sigma = epsilon / separation
    else:
        sigma = confluent_apply_norm_mp(
            as_nodes(t), N, svd(confluent_rect(t, N))[2][-1].conj())
    return {
        "mu1": json.loads(mu1.to_json()),
        "mu2": json.loads(mu2.to_json()),
        "y": json.loads(y.to_json()),
        "epsilon": float(epsilon),
        "sigma_min": sigma,
        "separation": separation,
    }


def minmax_lower_estimate(t, N: int, epsilon: float) -> float:
    """Instance lower bound epsilon / (2 sigma_min) that any estimator
    must incur on the adversarial pair at these nodes."""
    assert epsilon >= 0.0, f"epsilon must be >= 0, got {epsilon}"
    return epsilon / (2.0 * sigma_min_auto(t, N))


def brute_force_estimator(y: MeasurementSet, grid: Grid, s: int,
                          epsilon: float) -> SpikeSignal:
    """Exhaustive feasible-point estimator over on-grid supports.

    Enumerates supports by size then lexicographic order, fits
    coefficients by least squares, and returns the first signal whose
    weighted misfit is within the noise budget (plus numerical slack).
    Only intended for tiny instances; cost grows like G^s.
    """
    assert grid.G <= 15 and s <= 2, (
        f"brute force is restricted to G <= 15 and s <= 2, got "
        f"G={grid.G}, s={s}"
    )
    assert epsilon >= 0.0, f"epsilon must be >= 0, got {epsilon}"
    tol = max(epsilon, FEASIBILITY_SLACK * max(1.0, weighted_norm(y.y)))
    rhs = y.y / math.sqrt(2.0 * y.N)
    for size in range(1, s + 1):
        for comb in itertools.combinations(range(grid.G), size):
            nodes = (np.asarray(comb, dtype=np.float64) - grid.M) * grid.delta
            U = confluent_rect(nodes, y.N)
            w, *_ = np.linalg.lstsq(U, rhs, rcond=None)
            residual = float(np.linalg.norm(U @ w - rhs))
            if residual <= tol:
                z = np.exp(1j * nodes)
                return SpikeSignal(nodes=nodes, a=w[:size],
                                   b=1j * w[size:] / z)
    raise ValueError(
        f"inconsistent data/epsilon: no support of size <= {s} fits the "
        f"measurements within {tol:.3g}"
    )

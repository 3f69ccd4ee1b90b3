"""Domain types for node configurations, grids and spike-train signals,
plus exact Fourier sampling of the spike + derivative signal model.

A signal is a finite combination of Dirac spikes and first-derivative
spikes sitting at angles ``t_j`` in ``(-pi, pi]``:

    mu = sum_j a_j * delta(t - t_j) + b_j * delta'(t - t_j)

Its Fourier transform at frequency ``w`` is
``mu_hat(w) = sum_j (a_j - i w b_j) exp(i w t_j)``, and the measurement
model samples ``mu_hat`` at the integers ``k = 0..2N`` with additive noise
bounded in the weighted norm implemented by :func:`weighted_norm`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TWO_PI",
    "ClusterParams",
    "ClusterReport",
    "Grid",
    "MeasurementSet",
    "NoiseSpec",
    "SpikeSignal",
    "as_nodes",
    "fourier_coeff",
    "minimal_separation",
    "normalize_angle",
    "sample_measurements",
    "signal_l2_norm",
    "validate_cluster_config",
    "weighted_norm",
    "wraparound_distance",
]

TWO_PI = 2.0 * math.pi


# =============================================================================
# Angles and node vectors
# =============================================================================

def normalize_angle(t):
    """Reduce angles into the canonical range ``(-pi, pi]``."""
    t = np.asarray(t, dtype=np.float64)
    # no-op (bit-exact) on angles already in range; the additive form
    # pi - mod(pi - t) perturbs every value by ~ulp(pi)
    r = t - TWO_PI * np.round(t / TWO_PI)
    return np.where(r <= -np.pi, r + TWO_PI, r)


def wraparound_distance(t):
    """Distance of ``t`` from 0 on the circle, in ``[0, pi]``.

    Accepts scalars or arrays; the distance between two angles is
    ``wraparound_distance(t1 - t2)``.
    """
    t = np.asarray(t, dtype=np.float64)
    if not np.all(np.isfinite(t)):
        raise ValueError("wraparound_distance requires finite input")
    # round-based reduction is exact for |t| < pi; the additive form
    # mod(t + pi) - pi loses ulp(pi) even on tiny inputs
    d = np.abs(t - TWO_PI * np.round(t / TWO_PI))
    return float(d) if d.ndim == 0 else d


def as_nodes(nodes) -> np.ndarray:
    """Validate and canonicalize a node vector.

    Returns a float array of pairwise distinct angles in ``(-pi, pi]``.
    """
    x = normalize_angle(np.atleast_1d(np.asarray(nodes, dtype=np.float64)))
    assert x.ndim == 1 and x.size >= 1, f"node vector must be 1d, got shape {x.shape}"
    assert np.all(np.isfinite(x)), "node angles must be finite"
    if x.size >= 2:
        sep = minimal_separation(x)
        assert sep > 0.0, f"nodes must be pairwise distinct, got separation {sep}"
    return x


def minimal_separation(nodes) -> float:
    """Smallest pairwise wraparound distance of a node vector."""
    x = np.atleast_1d(np.asarray(nodes, dtype=np.float64))
    if x.size < 2:
        raise ValueError("separation undefined for fewer than 2 nodes")
    d = wraparound_distance(x[:, None] - x[None, :])
    iu = np.triu_indices(x.size, k=1)
    return float(d[iu].min())


# =============================================================================
# Cluster geometry
# =============================================================================

@dataclass(frozen=True)
class ClusterParams:
    """Geometry of a clustered node configuration.

    delta : node separation scale (radians), > 0
    rho   : minimal gap to nodes outside a cluster, >= 0
    s     : total node count
    ell   : maximal cluster size, 2 <= ell <= s
    tau   : cluster spread factor; a cluster fits inside a tau*delta arc
    """

    delta: float
    rho: float
    s: int
    ell: int
    tau: float

    def __post_init__(self):
        assert self.delta > 0, f"delta must be positive, got {self.delta}"
        assert self.rho >= 0, f"rho must be nonnegative, got {self.rho}"
        assert self.s >= 1, f"s must be a positive integer, got {self.s}"
        assert 2 <= self.ell <= self.s, (
            f"cluster size must satisfy 2 <= ell <= s, got ell={self.ell}, s={self.s}"
        )
        assert self.ell - 1 <= self.tau <= math.pi / self.delta, (
            f"tau must lie in [ell-1, pi/delta], got tau={self.tau}"
        )


@dataclass(frozen=True)
class ClusterReport:
    """Outcome of checking nodes against :class:`ClusterParams`.

    members[j] lists the indices of the cluster containing node j
    (including j itself).  violations[j] is None when node j satisfies all
    conditions, otherwise a message naming the first failed condition.
    """

    members: tuple[tuple[int, ...], ...]
    violations: tuple[str | None, ...]

    @property
    def ok(self) -> bool:
        return all(v is None for v in self.violations)

    def first_violation(self) -> str | None:
        for v in self.violations:
            if v is not None:
                return v
        return None


def validate_cluster_config(nodes, params: ClusterParams) -> ClusterReport:
    """Check whether nodes form a clustered configuration.

    For each node j the cluster is the set of nodes within ``tau*delta``.
    Conditions per node: cluster mates sit at distance in
    ``[delta, tau*delta]``, every other node sits at distance >= ``rho``,
    and the cluster holds at most ``ell`` nodes.  Violations are reported
    as data, not raised.
    """
    x = np.atleast_1d(np.asarray(nodes, dtype=np.float64))
    s = x.size
    dist = wraparound_distance(x[:, None] - x[None, :])
    # boundary-exact configurations (nodes laid out at exactly delta) land
    # a few ulps off after angle reduction; compare with relative slack
    slack = 1.0 - 1e-12
    radius = params.tau * params.delta * (2.0 - slack)

    members: list[tuple[int, ...]] = []
    violations: list[str | None] = []
    for j in range(s):
        inside = np.flatnonzero(dist[j] <= radius)
        members.append(tuple(int(i) for i in inside))
        problem = None
        if inside.size > params.ell:
            problem = (
                f"node {j}: cluster has {inside.size} nodes, "
                f"more than ell={params.ell}"
            )
        if problem is None:
            for i in inside:
                if i == j:
                    continue
                if dist[j, i] < params.delta * slack:
                    problem = (
                        f"node {j}: cluster mate {int(i)} at distance "
                        f"{dist[j, i]:.6g} below delta={params.delta:.6g}"
                    )
                    break
        if problem is None:
            for i in range(s):
                if i in inside:
                    continue
                if dist[j, i] < params.rho * slack:
                    problem = (
                        f"node {j}: node {i} at distance {dist[j, i]:.6g} is "
                        f"outside the cluster radius {radius:.6g} yet closer "
                        f"than rho={params.rho:.6g} (fails both the cluster "
                        f"and the far-node condition)"
                    )
                    break
        violations.append(problem)
    return ClusterReport(members=tuple(members), violations=tuple(violations))


# =============================================================================
# Grid
# =============================================================================

@dataclass(frozen=True)
class Grid:
    """Uniform grid ``{k*delta : k = -M..M}`` inside ``[-pi/2, pi/2]``."""

    delta: float
    M: int = field(init=False)
    G: int = field(init=False)

    def __post_init__(self):
        assert self.delta > 0, f"grid spacing must be positive, got {self.delta}"
        M = int(math.floor(math.pi / (2.0 * self.delta)))
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "G", 2 * M + 1)

    @property
    def points(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1) * self.delta

    def index_of(self, t: float, tol: float = 1e-12) -> int:
        """0-based grid index of an on-grid angle; raises when off-grid."""
        k = round(t / self.delta)
        if abs(k) > self.M or abs(t - k * self.delta) > tol:
            nearest = max(-self.M, min(self.M, k)) * self.delta
            raise ValueError(
                f"node {t!r} is not on the grid (spacing {self.delta!r}); "
                f"nearest grid point is {nearest!r}"
            )
        return int(k) + self.M


# =============================================================================
# Signals and measurements
# =============================================================================

@dataclass(frozen=True)
class SpikeSignal:
    """Spike-train signal: nodes with Dirac coefficients ``a`` and
    derivative coefficients ``b``.

    Zero coefficient pairs are representable (the adversarial construction
    degenerates to the zero signal at noise level 0); generators that claim
    a live spike at every node assert that separately.
    """

    nodes: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        nodes = as_nodes(self.nodes)
        a = np.atleast_1d(np.asarray(self.a, dtype=np.complex128))
        b = np.atleast_1d(np.asarray(self.b, dtype=np.complex128))
        assert a.shape == nodes.shape and b.shape == nodes.shape, (
            f"coefficient lengths {a.shape}, {b.shape} must match "
            f"node count {nodes.shape}"
        )
        assert np.all(np.isfinite(a)) and np.all(np.isfinite(b)), (
            "coefficients must be finite"
        )
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def s(self) -> int:
        return self.nodes.size

    def to_json(self) -> str:
        return json.dumps({
            "nodes": [float(t) for t in self.nodes],
            "a": [[float(c.real), float(c.imag)] for c in self.a],
            "b": [[float(c.real), float(c.imag)] for c in self.b],
        })

    @classmethod
    def from_json(cls, text: str) -> "SpikeSignal":
        obj = json.loads(text)
        a = np.array([complex(re, im) for re, im in obj["a"]])
        b = np.array([complex(re, im) for re, im in obj["b"]])
        return cls(nodes=np.asarray(obj["nodes"], dtype=np.float64), a=a, b=b)


@dataclass(frozen=True)
class MeasurementSet:
    """Fourier samples ``y_k``, ``k = 0..2N``, with noise budget epsilon."""

    y: np.ndarray
    N: int
    epsilon: float

    def __post_init__(self):
        y = np.atleast_1d(np.asarray(self.y, dtype=np.complex128))
        assert self.N >= 1, f"N must be a positive integer, got {self.N}"
        assert y.size == 2 * self.N + 1, (
            f"need 2N+1 = {2 * self.N + 1} samples, got {y.size}"
        )
        assert self.epsilon >= 0, f"epsilon must be nonnegative, got {self.epsilon}"
        object.__setattr__(self, "y", y)

    def to_json(self) -> str:
        return json.dumps({
            "N": int(self.N),
            "epsilon": float(self.epsilon),
            "y": [[float(c.real), float(c.imag)] for c in self.y],
        })

    @classmethod
    def from_json(cls, text: str) -> "MeasurementSet":
        obj = json.loads(text)
        y = np.array([complex(re, im) for re, im in obj["y"]])
        return cls(y=y, N=int(obj["N"]), epsilon=float(obj["epsilon"]))


def fourier_coeff(signal: SpikeSignal, omega):
    """Fourier transform of the signal at frequency ``omega``.

    ``mu_hat(w) = sum_j (a_j - i w b_j) exp(i w t_j)``.  Vectorized over
    ``omega``; returns a scalar for scalar input.
    """
    w = np.asarray(omega, dtype=np.float64)
    scalar = w.ndim == 0
    w2 = np.atleast_1d(w)[:, None]
    terms = (signal.a[None, :] - 1j * w2 * signal.b[None, :]) * np.exp(
        1j * w2 * signal.nodes[None, :])
    out = terms.sum(axis=1)
    return complex(out[0]) if scalar else out


def weighted_norm(y) -> float:
    """Measurement-space norm ``((1/2N) * sum_k |y_k|^2)^(1/2)``.

    The length of ``y`` must be odd, ``2N+1`` with ``N >= 1``.
    """
    y = np.atleast_1d(np.asarray(y, dtype=np.complex128))
    assert y.size >= 3 and y.size % 2 == 1, (
        f"expected 2N+1 samples with N >= 1, got length {y.size}"
    )
    n = (y.size - 1) // 2
    return float(np.sqrt(np.sum(np.abs(y) ** 2) / (2.0 * n)))


def signal_l2_norm(signal: SpikeSignal) -> float:
    """Coefficient norm ``(sum_j |a_j|^2 + |b_j|^2)^(1/2)``."""
    return float(np.sqrt(np.sum(np.abs(signal.a) ** 2)
                         + np.sum(np.abs(signal.b) ** 2)))


# =============================================================================
# Noisy sampling
# =============================================================================

@dataclass(frozen=True)
class NoiseSpec:
    """Noise model for measurement sampling.

    kind = "none":            exact samples.
    kind = "bounded-uniform": per-sample uniform complex noise rescaled so
                              its weighted norm equals ``epsilon`` exactly.
    kind = "complex-gaussian": i.i.d. complex gaussian with scale ``sigma``,
                              clipped (rescaled down) when its weighted norm
                              exceeds ``epsilon``.
    """

    kind: str = "none"
    epsilon: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        assert self.kind in ("none", "bounded-uniform", "complex-gaussian"), (
            f"unknown noise kind {self.kind!r}"
        )
        assert self.epsilon >= 0, f"epsilon must be nonnegative, got {self.epsilon}"


def sample_measurements(signal: SpikeSignal, N: int,
                        noise: NoiseSpec = NoiseSpec(),
                        rng: np.random.Generator | None = None) -> MeasurementSet:
    """Sample ``y_k = mu_hat(k) + eta_k`` for ``k = 0..2N``.

    The perturbation always satisfies ``weighted_norm(eta) <= epsilon``;
    the bounded-uniform model achieves equality (unless epsilon is 0).
    """
    assert N >= 1, f"N must be >= 1, got {N}"
    k = np.arange(2 * N + 1, dtype=np.float64)
    exact = fourier_coeff(signal, k)
    if noise.kind == "none" or noise.epsilon == 0.0:
        eta = np.zeros_like(exact)
        eps = 0.0 if noise.kind == "none" else noise.epsilon
        return MeasurementSet(y=exact + eta, N=N, epsilon=eps)

    if rng is None:
        rng = np.random.default_rng()
    if noise.kind == "bounded-uniform":
        eta = rng.uniform(-1.0, 1.0, 2 * N + 1) + 1j * rng.uniform(-1.0, 1.0, 2 * N + 1)
        eta *= noise.epsilon / weighted_norm(eta)
    else:  # complex-gaussian, clipped into the epsilon ball
        eta = noise.sigma * (rng.standard_normal(2 * N + 1)
                             + 1j * rng.standard_normal(2 * N + 1)) / np.sqrt(2.0)
        nrm = weighted_norm(eta)
        if nrm > noise.epsilon:
            eta *= noise.epsilon / nrm
    return MeasurementSet(y=exact + eta, N=N, epsilon=noise.epsilon)

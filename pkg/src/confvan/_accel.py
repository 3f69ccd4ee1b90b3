"""Hot numeric kernels with optional numba acceleration.

Two inner loops dominate the pure-python cost of the library: evaluating
trigonometric polynomials on quadrature grids and scanning dilation strides
for the decimation search.  Both get an ``@njit`` implementation here with a
vectorized numpy fallback.  Set ``CONFVAN_DISABLE_NUMBA=1`` to force the
numpy path (the test suite runs both).
"""

from __future__ import annotations

import math
import os

import numpy as np

_DISABLE_NUMBA = os.environ.get("CONFVAN_DISABLE_NUMBA", "0") == "1"

try:
    if _DISABLE_NUMBA:
        raise ImportError("numba disabled by CONFVAN_DISABLE_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        # Transparent decorator so the same source works without numba.
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap


TWO_PI = 2.0 * np.pi


# =============================================================================
# Trigonometric polynomial evaluation: sum_m c_m exp(2 pi i m w)
# =============================================================================

def _trig_poly_eval_numpy(coeffs: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    m = np.arange(coeffs.shape[0])
    # Chunk over omegas so the (points x modes) table stays small.
    out = np.empty(omegas.shape[0], dtype=np.complex128)
    step = max(1, 2_000_000 // max(coeffs.shape[0], 1))
    for lo in range(0, omegas.shape[0], step):
        hi = min(lo + step, omegas.shape[0])
        table = np.exp(2j * np.pi * np.outer(omegas[lo:hi], m))
        out[lo:hi] = table @ coeffs
    return out


@njit(cache=True)
def _trig_poly_eval_numba(coeffs, omegas):  # pragma: no cover - jit body
    n = omegas.shape[0]
    deg = coeffs.shape[0] - 1
    out = np.empty(n, dtype=np.complex128)
    for p in range(n):
        z = np.exp(2j * np.pi * omegas[p])
        # Horner in z keeps |z| = 1 evaluation backward stable.
        acc = coeffs[deg]
        for m in range(deg - 1, -1, -1):
            acc = acc * z + coeffs[m]
        out[p] = acc
    return out


def trig_poly_eval(coeffs: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    """Evaluate ``sum_m coeffs[m] * exp(2 pi i m w)`` at each ``w`` in `omegas`."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    omegas = np.ascontiguousarray(omegas, dtype=np.float64)
    if coeffs.size == 0:
        return np.zeros(omegas.shape[0], dtype=np.complex128)
    if HAS_NUMBA:
        return _trig_poly_eval_numba(coeffs, omegas)
    return _trig_poly_eval_numpy(coeffs, omegas)


# =============================================================================
# Decimation separation scan
# =============================================================================

def _pair_sep_scan_numpy(diffs, is_intra, lambdas):
    scaled = lambdas[:, None] * diffs[None, :]
    # same reduction as wraparound_distance: exact below pi
    wrapped = np.abs(scaled - TWO_PI * np.round(scaled / TWO_PI))
    big = np.inf
    intra = np.where(is_intra[None, :], wrapped, big).min(axis=1, initial=big)
    inter = np.where(is_intra[None, :], big, wrapped).min(axis=1, initial=big)
    return intra, inter


@njit(cache=True)
def _pair_sep_scan_numba(diffs, is_intra, lambdas):  # pragma: no cover - jit body
    n_lam = lambdas.shape[0]
    n_pair = diffs.shape[0]
    intra = np.full(n_lam, np.inf)
    inter = np.full(n_lam, np.inf)
    for a in range(n_lam):
        lam = lambdas[a]
        for p in range(n_pair):
            d = lam * diffs[p]
            w = abs(d - TWO_PI * math.floor(d / TWO_PI + 0.5))
            if is_intra[p]:
                if w < intra[a]:
                    intra[a] = w
            else:
                if w < inter[a]:
                    inter[a] = w
    return intra, inter


def pair_separation_scan(diffs: np.ndarray, is_intra: np.ndarray,
                         lambdas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Minimum wraparound distance of dilated node pairs, per dilation.

    Parameters
    ----------
    diffs : pairwise node differences (one entry per unordered pair).
    is_intra : boolean mask, True where the pair shares a cluster.
    lambdas : dilation factors to scan.

    Returns
    -------
    (intra_min, inter_min) : arrays of length ``len(lambdas)`` holding the
    minimal wrapped distance over intra- and inter-cluster pairs (``inf``
    where a group has no pairs).
    """
    diffs = np.ascontiguousarray(diffs, dtype=np.float64)
    is_intra = np.ascontiguousarray(is_intra, dtype=np.bool_)
    lambdas = np.ascontiguousarray(lambdas, dtype=np.float64)
    if diffs.size == 0 or lambdas.size == 0:
        return (np.full(lambdas.shape[0], np.inf),
                np.full(lambdas.shape[0], np.inf))
    if HAS_NUMBA:
        return _pair_sep_scan_numba(diffs, is_intra, lambdas)
    return _pair_sep_scan_numpy(diffs, is_intra, lambdas)


__all__ = ["HAS_NUMBA", "trig_poly_eval", "pair_separation_scan"]

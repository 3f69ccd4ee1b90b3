"""Parity tests for the accelerated kernels and their numpy fallbacks."""

import os
import subprocess
import sys

import numpy as np
import pytest

from confvan._accel import (HAS_NUMBA, _pair_sep_scan_numpy,
                            _trig_poly_eval_numpy, pair_separation_scan,
                            trig_poly_eval)
from confvan.signals import wraparound_distance

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba not active")


def scan_oracle(diffs, is_intra, lambdas):
    intra = np.full(lambdas.size, np.inf)
    inter = np.full(lambdas.size, np.inf)
    for i, lam in enumerate(lambdas):
        w = wraparound_distance(lam * diffs)
        if is_intra.any():
            intra[i] = w[is_intra].min()
        if (~is_intra).any():
            inter[i] = w[~is_intra].min()
    return intra, inter


def random_scan_problem(rng, n_pairs=12, n_lam=40):
    diffs = rng.uniform(-4.0, 4.0, size=n_pairs)
    is_intra = rng.random(n_pairs) < 0.5
    lambdas = rng.uniform(0.0, 30.0, size=n_lam)
    return diffs, is_intra, lambdas


# =============================================================================
# Trigonometric polynomial evaluation
# =============================================================================

class TestTrigPolyEval:
    def test_matches_direct_sum(self):
        rng = np.random.default_rng(0)
        coeffs = rng.normal(size=9) + 1j * rng.normal(size=9)
        omegas = rng.uniform(-2.0, 2.0, size=33)
        direct = np.exp(2j * np.pi * np.outer(omegas, np.arange(9))) @ coeffs
        got = trig_poly_eval(coeffs, omegas)
        assert np.allclose(got, direct, rtol=1e-12, atol=1e-12)

    def test_empty_coefficients(self):
        out = trig_poly_eval(np.array([]), np.linspace(0, 1, 5))
        assert np.array_equal(out, np.zeros(5, dtype=np.complex128))

    def test_numpy_path_chunks_consistently(self):
        # force several chunks through the omega loop
        rng = np.random.default_rng(1)
        coeffs = rng.normal(size=1500) + 0j
        omegas = rng.uniform(0.0, 1.0, size=4001)
        whole = _trig_poly_eval_numpy(coeffs, omegas)
        parts = np.concatenate([_trig_poly_eval_numpy(coeffs, omegas[:7]),
                                _trig_poly_eval_numpy(coeffs, omegas[7:])])
        assert np.allclose(whole, parts, rtol=0, atol=0)

    @needs_numba
    def test_jit_and_numpy_paths_agree(self):
        from confvan._accel import _trig_poly_eval_numba
        rng = np.random.default_rng(2)
        for size, n_pts in ((1, 1), (5, 17), (64, 200)):
            coeffs = np.ascontiguousarray(
                rng.normal(size=size) + 1j * rng.normal(size=size))
            omegas = np.ascontiguousarray(rng.uniform(-3.0, 3.0, size=n_pts))
            a = _trig_poly_eval_numba(coeffs, omegas)
            b = _trig_poly_eval_numpy(coeffs, omegas)
            scale = np.abs(coeffs).sum()
            assert np.allclose(a, b, rtol=0, atol=1e-13 * scale)


# =============================================================================
# Pair separation scan
# =============================================================================

class TestPairSeparationScan:
    def test_matches_wraparound_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            diffs, is_intra, lambdas = random_scan_problem(rng)
            intra, inter = pair_separation_scan(diffs, is_intra, lambdas)
            o_intra, o_inter = scan_oracle(diffs, is_intra, lambdas)
            assert np.allclose(intra, o_intra, rtol=0, atol=1e-15)
            assert np.allclose(inter, o_inter, rtol=0, atol=1e-15)

    def test_single_group_leaves_other_infinite(self):
        diffs = np.array([0.3, 0.4])
        lambdas = np.array([1.0, 2.0])
        intra, inter = pair_separation_scan(diffs, np.array([True, True]),
                                            lambdas)
        assert np.all(np.isinf(inter))
        assert np.allclose(intra, [0.3, 0.6])

    def test_empty_inputs(self):
        intra, inter = pair_separation_scan(np.array([]), np.array([], bool),
                                            np.array([1.0, 2.0]))
        assert np.all(np.isinf(intra)) and np.all(np.isinf(inter))

    def test_small_products_wrap_exactly(self):
        # reduction must be a no-op (bit-exact) below pi
        diffs = np.array([1.3089969389957472e-4, -2.5e-7])
        lambdas = np.array([1.0, 3.0])
        intra, _ = pair_separation_scan(diffs, np.array([True, True]),
                                        lambdas)
        assert intra[0] == 2.5e-7
        assert intra[1] == 7.5e-7

    @needs_numba
    def test_jit_and_numpy_paths_agree(self):
        from confvan._accel import _pair_sep_scan_numba
        rng = np.random.default_rng(4)
        for _ in range(5):
            diffs, is_intra, lambdas = random_scan_problem(rng, 20, 100)
            a = _pair_sep_scan_numba(diffs, is_intra, lambdas)
            b = _pair_sep_scan_numpy(diffs, is_intra, lambdas)
            assert np.array_equal(a[0], b[0])
            assert np.array_equal(a[1], b[1])


# =============================================================================
# Environment switch
# =============================================================================

def test_disable_flag_forces_numpy_path():
    code = (
        "from confvan._accel import HAS_NUMBA, pair_separation_scan\n"
        "import numpy as np\n"
        "assert not HAS_NUMBA\n"
        "intra, inter = pair_separation_scan(\n"
        "    np.array([0.3]), np.array([True]), np.array([2.0]))\n"
        "assert abs(intra[0] - 0.6) < 1e-15 and np.isinf(inter[0])\n"
        "print('fallback ok')\n"
    )
    env = dict(os.environ, CONFVAN_DISABLE_NUMBA="1")
    proc = subprocess.run([sys.executable, "-c", code], env=env,
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "fallback ok" in proc.stdout

"""Conditioning bounds and subspace recovery for signals made of spikes
and spike derivatives, measured through noisy bandlimited Fourier samples.

Layout:

* signals     -- domain types (nodes, clusters, grids, spike signals) and
                 exact Fourier sampling.
* matrices    -- confluent Vandermonde family builders plus float64 and
                 extended-precision spectral primitives.
* bounds      -- certified lower/upper bounds on the smallest singular
                 value; finite-difference and Dirichlet-kernel machinery.
* recovery    -- multiplicity-aware subspace estimation of nodes and
                 coefficients.
* minmax      -- grid embedding, adversarial pairs and worst-case error
                 estimates.
* experiments -- seeded Monte-Carlo sweeps and the CSV/JSON record schema.
* cli         -- the ``confvan`` command-line driver.
"""

from .signals import (ClusterParams, ClusterReport, Grid, MeasurementSet,
                      NoiseSpec, SpikeSignal, as_nodes, fourier_coeff,
                      minimal_separation, normalize_angle,
                      sample_measurements, signal_l2_norm,
                      validate_cluster_config, weighted_norm,
                      wraparound_distance)
from .matrices import (block_factors, confluent_bandlimited, confluent_rect,
                       confluent_square, gautschi_inverse_norm_bound,
                       hankel_from_moments, hankel_pair_coefficient_matrix,
                       pascal_vandermonde, phi_unnormalized, row_submatrix,
                       sigma_min, sigma_min_auto, sigma_min_mp,
                       square_sigma_min_lower_bound, svd, unitary_factors)
from .bounds import (certificate_report, certified_lower_bound,
                     decimation_search, dirichlet, fd_coefficients,
                     theoretical_lower_bound, u_vector,
                     upper_bound_certificate)
from .recovery import (RecoveredSignal, esprit_nodes, esprit_recover,
                       fit_coefficients, match_and_error)
from .minmax import (adversarial_pair, adversarial_report,
                     brute_force_estimator, embed_on_grid, extract_from_grid,
                     fourier_grid_matrices, minmax_lower_estimate)
from .experiments import (ExperimentRecord, Scenario, emit_results,
                          fit_loglog_slope, generate_scenario, load_rows,
                          run_esprit_sweep, run_rayleigh_sweep,
                          run_sigma_sweep)

__version__ = "0.1.0"

__all__ = [
    "ClusterParams", "ClusterReport", "Grid", "MeasurementSet", "NoiseSpec",
    "SpikeSignal", "as_nodes", "fourier_coeff", "minimal_separation",
    "normalize_angle", "sample_measurements", "signal_l2_norm",
    "validate_cluster_config", "weighted_norm", "wraparound_distance",
    "block_factors", "confluent_bandlimited", "confluent_rect",
    "confluent_square", "gautschi_inverse_norm_bound", "hankel_from_moments",
    "hankel_pair_coefficient_matrix", "pascal_vandermonde",
    "phi_unnormalized", "row_submatrix", "sigma_min", "sigma_min_auto",
    "sigma_min_mp", "square_sigma_min_lower_bound", "svd", "unitary_factors",
    "certificate_report", "certified_lower_bound", "decimation_search",
    "dirichlet", "fd_coefficients", "theoretical_lower_bound", "u_vector",
    "upper_bound_certificate",
    "RecoveredSignal", "esprit_nodes", "esprit_recover", "fit_coefficients",
    "match_and_error",
    "adversarial_pair", "adversarial_report", "brute_force_estimator",
    "embed_on_grid", "extract_from_grid", "fourier_grid_matrices",
    "minmax_lower_estimate",
    "ExperimentRecord", "Scenario", "emit_results", "fit_loglog_slope",
    "generate_scenario", "load_rows", "run_esprit_sweep",
    "run_rayleigh_sweep", "run_sigma_sweep",
    "__version__",
]

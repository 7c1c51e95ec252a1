"""Distribution-free confidence ellipsoids for ridge regression.

Membership of a candidate parameter is decided by ranking an unperturbed
residual statistic among random sign-flipped copies, which gives a region
with exact finite-sample coverage under symmetric noise. The region's
ellipsoidal outer approximation is computed from small analytically-solved
semidefinite programs, and PAC-style calculators bound its size.
"""

__version__ = "0.1.0"

from .bounds import (CoherenceResult, PacBoundInputs, PerturbationOperators,
                     coherence, f_delta, g_delta, gram_ratio_bound,
                     min_sample_size, noise_quadratic_bound,
                     perturbation_norm_bound, perturbation_operators,
                     size_bound)
from .eoa import (Ellipsoid, SdpData, boundary_polyline, build_eoa,
                  ellipsoid_contains, ellipsoid_geometry, eoa_radius,
                  perturbed_grams, sdp_coefficients, sdp_objective, solve_sdp,
                  solve_sdp_detail)
from .errors import (DimensionMismatch, DomainError, IndexOutOfRange,
                     InfiniteRegion, IrrationalConfidence, NonPositiveLambda,
                     NumericalFailure, RankDeficient, SampleTooSmall,
                     SingularGram, SingularSystem, SpsRegionError)
from .harness import (CoverageResult, CoverageScenario, ExperimentReport,
                      FirConfig, FirResult, NoiseModel, SweepEntry,
                      TableConfig, asymptotic_ellipsoid, binomial_ci,
                      coverage_experiment, gen_fir, lambda_sweep, sample_noise,
                      size_table, stationary_input_variance)
from .indicator import (SpsDecision, SpsState, compute_s, confidence_integers,
                        indicator, indicator_batch, sign_matrix, sps_init)
from .problem import (ExtendedProblem, RegressionData, extend, load_csv,
                      ls_estimate, plain_problem, ridge_estimate, save_csv)

__all__ = [name for name in dir() if not name.startswith("_")]

"""RIS-enabled radar spoofing: profile design and deception analysis."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .bounds import (BoundReport, PositionGrid, Variant, bound_sweep, crb,
                     fi_closed, fi_exact, kappa, peb, position_peb_map)
from .channel import (CascadedChannel, Observation, SceneConfig, attenuation,
                      cascaded_channel, dbm_to_watts, deceptive_mean,
                      default_pilots, mrt_precoder, observe,
                      synthesize_observation, watts_to_dbm, wavelength)
from .deception import (DeceptionReport, DecoyScore, certified_rho,
                        deception_report, eta, kappa_min, leakage_worst,
                        phi_score, rho_band_ok, rho_pointwise_ok,
                        rho_ub_sweep, rho_upper_bound, shortlist_decoys)
from .geometry import AngleGrid, atan2_angle, steering, steering_derivative
from .radar_ml import (MlSpectrum, TrialSummary, classify_estimate,
                       ml_spectrum, run_trials, sample_covariance,
                       steering_matrix)
from .ris_kernel import (Convention, KernelBasis, NullingWindow, beta,
                         beta_bar, beta_bar_sweep, build_basis, kernel_vector,
                         uniform_profile, validate_profile)
from .scenario import (FeasibilityError, Scenario, SchemaError,
                       canonical_toml, config_hash, load_scenario,
                       parse_scenario, validate_scenario)
from .solver import (SolverParams, SolveResult, objective_p1, objective_p2,
                     phase_project, solve_p3)

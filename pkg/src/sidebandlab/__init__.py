"""Simulator and branch-analysis toolkit for a pair of dispersively coupled
vibrational modes pumped at a secondary sideband."""

from .adiabatic import (AdiabaticCurve, AdiabaticState, ThresholdResult,
                        adiabatic_curve, gamma_ad_simple,
                        solve_extended_adiabatic, thresholds)
from .errors import (AmbiguousRootsError, CalibrationError, ConfigError,
                     FitError, ParameterDomainError, SolverError,
                     StiffnessError)
from .params import (CalibrationData, DriveConfig, ModeParams, RawCouplings,
                     RwaParams, ScalingConfig, Sideband, SystemParams,
                     alpha_beta, amplitude_from_scaled,
                     calibrate_fp_from_bifurcation, calibrate_mass_from_drive,
                     fit_dispersive_slope, force_from_scaled_drive,
                     g_constant, load_config, paper_device, raw_from_scaled,
                     save_config, scaled_drive_from_force,
                     scaled_from_amplitude, scaled_params_from_raw,
                     system_from_config, system_to_config)
from .response import (MergeResult, PeakSharpening, ResponseState,
                       ResponseSummary, SweepResult, force_sweep,
                       frequency_sweep, gamma_peak_curve, isola_clearance,
                       locate_branch_merge, locate_isola_birth,
                       peak_sharpening_check, stability_of_state,
                       stationary_states)
from .selfsustained import (BifurcationResult, Branch, NormalFormFit,
                            SelfSustainedSolution, delta_b, normal_form_fit,
                            oscillation_frequencies, solve_limit_cycles,
                            stability_of_cycle)
from .timedomain import (BasinOutcome, BasinResult, FullState, FullTrace,
                         InstantaneousRate, RingdownTrace, RwaState,
                         classify_basin, envelope_mode1, full_state_from_rwa,
                         h_rwa, instantaneous_rate, integrate_full_eom,
                         integrate_rwa, omega_pump, rwa_rhs)

__version__ = "0.1.0"

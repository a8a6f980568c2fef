"""Cramér–Rao bounds for receiver localization via satellite constellations.

The library computes exact and large-constellation-limit localization bounds
for TDOA and combined TDOA+RSS measurement models, constellation coverage
probabilities and design inverses, Monte Carlo bound distributions over random
constellations, a planar closed-form cross-check, and a maximum-likelihood
estimator on simulated sampled signals that attains the bound.

Distances are kilometres, angles radians, time seconds, bandwidth hertz.
"""

from .closed_form import (
    DegenerateGeometry,
    LimitCoefficients,
    MomentSet,
    aacrb,
    acrb,
    cup_expectation,
    lcrb_tdoa,
    lcrb_tdoa_from_moments,
    lcrb_tdoa_rss,
    lcrb_tdoa_rss_from_moments,
    limit_coefficients,
    moment_integrals,
    quadrature_moments,
)
from .coverage import (
    CoverageResult,
    Unachievable,
    coverage_prob,
    coverage_result,
    min_angle_for_coverage,
    min_height_for_coverage,
    visibility_prob,
    visibility_prob_dmax_form,
)
from .fim import (
    BoundSet,
    FisherMatrix,
    SingularInformation,
    crb_from_fim,
    fim_tdoa,
    fim_tdoa_rss,
)
from .geometry import (
    C_KM_S,
    Constellation,
    InvalidConfig,
    SatelliteState,
    SystemParams,
    chi_max,
    constellation_rng,
    constellation_states,
    d_max,
    e_to_l,
    max_earth_angle,
    sample_constellation,
)
from .montecarlo import (
    MODELS,
    ConvergenceRow,
    CrbDistribution,
    ParameterRow,
    convergence_sweep,
    crb_distribution,
    mean_fim,
    parameter_sweep,
)
from .planar import (
    CollinearSensors,
    PlanarSensors,
    planar_crb_closed,
    planar_crb_fim,
)
from .signal_ml import (
    MODES,
    PULSES,
    InsufficientCoverage,
    LocationEstimate,
    Measurement,
    MseRow,
    SampledPulse,
    SignalConfig,
    decoupling_check,
    effective_bandwidth,
    effective_bandwidth_time,
    make_pulse,
    ml_localize,
    mse_experiment,
    rss_negligibility_threshold,
    sat_positions,
    signal_crb,
    signal_fim,
    simulate_measurements,
    zenith_ring_geometry,
)

__version__ = "1.0.0"

__all__ = [
    "C_KM_S",
    "MODELS",
    "MODES",
    "PULSES",
    "BoundSet",
    "CollinearSensors",
    "Constellation",
    "ConvergenceRow",
    "CoverageResult",
    "CrbDistribution",
    "DegenerateGeometry",
    "FisherMatrix",
    "InsufficientCoverage",
    "InvalidConfig",
    "LimitCoefficients",
    "LocationEstimate",
    "Measurement",
    "MomentSet",
    "MseRow",
    "ParameterRow",
    "PlanarSensors",
    "SampledPulse",
    "SatelliteState",
    "SignalConfig",
    "SingularInformation",
    "SystemParams",
    "Unachievable",
    "aacrb",
    "acrb",
    "chi_max",
    "constellation_rng",
    "constellation_states",
    "convergence_sweep",
    "coverage_prob",
    "coverage_result",
    "crb_distribution",
    "crb_from_fim",
    "cup_expectation",
    "d_max",
    "decoupling_check",
    "e_to_l",
    "effective_bandwidth",
    "effective_bandwidth_time",
    "fim_tdoa",
    "fim_tdoa_rss",
    "lcrb_tdoa",
    "lcrb_tdoa_from_moments",
    "lcrb_tdoa_rss",
    "lcrb_tdoa_rss_from_moments",
    "limit_coefficients",
    "make_pulse",
    "max_earth_angle",
    "mean_fim",
    "min_angle_for_coverage",
    "min_height_for_coverage",
    "ml_localize",
    "moment_integrals",
    "mse_experiment",
    "parameter_sweep",
    "planar_crb_closed",
    "planar_crb_fim",
    "quadrature_moments",
    "rss_negligibility_threshold",
    "sample_constellation",
    "sat_positions",
    "signal_crb",
    "signal_fim",
    "simulate_measurements",
    "visibility_prob",
    "visibility_prob_dmax_form",
    "zenith_ring_geometry",
    "__version__",
]

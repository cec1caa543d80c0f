"""boxsqueeze: squeezed quantum states on a finite interval.

Construction of theta-function, truncated-Gaussian, discretized-density,
and well-adapted state families; position/momentum/energy moments with
certified error bookkeeping; verifiers for the finite-size bounds and
asymptotic estimates; large-interval and semiclassical limits.
"""

from . import bounds, families, limits, moments, quadrature, series, specfun, states
from .errors import (
    AtSingularity,
    BoundViolation,
    BoxSqueezeError,
    DensityNotEven,
    DensityNotMonotone,
    EpsilonTooLarge,
    InfiniteSecondMoment,
    InvalidGamma,
    InvalidTau,
    NoFiniteTail,
    NonSummable,
    NotInDomain,
    NotMonotone,
    NumericalError,
    OutOfDomain,
    QuadratureFailure,
    TargetTooCloseToWall,
    ValidationError,
    ZeroSeries,
)
from .families import (
    BUILTIN_DENSITIES,
    DensitySpec,
    MollifierSpec,
    build_discretized_state,
    build_mollifier,
    build_theta_state,
    build_truncated_gaussian,
    build_well_adapted,
    gaussian_density,
    laplace_density,
    triangular_density,
)
from .geometry import HBAR_SI, ClassicalTarget, IntervalGeometry
from .moments import (
    MomentReport,
    energy_expand,
    energy_moments,
    finiteness_diagnostic,
    momentum_moments,
    momentum_moments_quadrature,
    position_moments,
    uncertainty_report,
)
from .series import (
    EnergySeries,
    GaussianDecay,
    SpectralSeries,
    choose_truncation,
    evaluate_series,
    normalize_series,
    series_from_map,
)
from .specfun import (
    gaussian_tail,
    lattice_distance,
    theta_asymptotic_oracles,
    theta_eval,
    theta_eval_with_bound,
)
from .states import (
    StateDescriptor,
    boundary_values,
    evaluate_closed_form,
    evaluate_wave,
    momentum_eigenstate,
)

__version__ = "0.1.0"

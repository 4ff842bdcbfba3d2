"""Whole-space pressure toolkit.

Computes the pressure term of incompressible flow on the full space for
slowly decaying velocity data: split-kernel pressure assembly, Leray
projection, drift extraction under Galilean changes of frame, local Morrey
norms, and two independent oracles for cross-validation.
"""

from .errors import (
    DecompositionWarning,
    FormatError,
    InvalidFieldError,
    NotAGradientError,
    ParameterError,
    RangeError,
    RegimeWarning,
    ResolutionError,
    SingularityError,
    StructuralError,
    WspError,
)
from .fields import (
    Grid,
    ScalarField,
    TensorField,
    TimeSeriesField,
    VectorField,
    curl,
    curl_sup,
    divergence,
    gradient,
    laplacian,
    lp_norm,
    outer,
    poincare_potential,
    sample_scalar_at,
    sample_vector_at,
    shifted_field,
    tensor_divergence,
    tensor_source,
    time_derivative,
    weighted_lp_norm,
)
from .fldio import read_field, read_series, write_field, write_series
from .galilean import DriftCurve, displacement, galilean_pressure, galilean_transform, valid_window
from .kernels import (
    CutoffSpec,
    cutoff,
    cutoff_profile,
    far_kernel,
    grad_green,
    green_function,
    heat_kernel,
    heat_smoothed_third_kernel,
    hessian_green,
    third_green,
)
from .leray import (
    HodgeParts,
    SuitabilityReport,
    build_battery,
    leray_project,
    make_test_function,
    mns_residual,
    ns_residual,
    suitability_residual,
)
from .oracle import (
    quadrature_conv,
    spectral_pressure,
    spectral_pressure_gradient,
)
from .pressure import (
    FAST_DECAY,
    SLOW_DECAY,
    HeatDecayReport,
    PressureDecomposition,
    assemble_from_tensor,
    assemble_p0,
    assemble_p_phi,
    decompose_source,
    far_field_corrected,
    far_field_plain,
    heat_normalization,
    near_field_conv,
    phi_change_constant,
    poisson_residual,
    truncation_tail_bound,
)
from .runtime import resolve_workers
from .spaces import (
    InterpolationSplit,
    NormReport,
    b_norm,
    embedding_bounds,
    embedding_constants,
    interpolation_split,
    k_functional,
    radius_set,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

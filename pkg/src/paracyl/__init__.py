"""Numerical toolkit for a plane map tangent to an irrational rotation:
small-divisor diagnostics, the blow-up lift and its attracting region,
Fatou-type coordinates, and the circles that orbits accumulate on."""

from .config import RunConfig, load_config
from .errors import (
    ChartExitError,
    ConfigError,
    ConvergenceError,
    DegenerateFiberError,
    DomainError,
    InversionError,
    ParacylError,
    SamplingError,
    SearchError,
)
from .germ import (
    ChartPoint,
    MapFamily,
    OrbitRecord,
    PerturbationPoly,
    apply_down,
    apply_up,
    default_perturbed_family,
    down,
    invert_down,
    jacobian_down,
    model_family,
    orbit_up,
    up,
)
from .regions import (
    BasinParams,
    RadiusWitness,
    find_r0,
    in_basin_down,
    in_basin_up,
    in_H,
    in_sector,
    membership_image,
    sample_basin,
)
from .rotation import (
    BrjunoReport,
    RotationNumber,
    brjuno_partial_sum,
    brjuno_report,
    from_cf,
    golden_mean,
    liouville_like,
    small_divisor,
)
from .coords import (
    CylinderCoords,
    FatouEstimate,
    Phi,
    Psi,
    U_of,
    digamma,
    estimate_c,
    harmonic_log_limit,
    psi,
    sigma,
    tau,
)
from .analysis import (
    CircleReport,
    InvarianceReport,
    OrbitDiagnostics,
    ProbeResult,
    equidistribution,
    invariance_suite,
    limit_circle,
    rotation_freedom,
    stable_set_probe,
    verify_asymptotics,
)

__version__ = "0.1.0"

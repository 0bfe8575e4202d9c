"""sphlis: analytical model of spherical large intelligent surfaces.

Field samples, received signal strength on spherical caps and planar disks,
received-power positioning with its variance bounds, and phase-compensated
reflection, with brute-force integration oracles cross-checking every
closed form.  The ``sphlis`` CLI turns the model into CSV parameter sweeps.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .errors import (
    DetectionError,
    EstimationError,
    LayoutError,
    QuadratureBudgetError,
    SphlisError,
    VisibilityError,
)
from .geometry import (
    SPEED_OF_LIGHT,
    FieldSample,
    LisGeometry,
    RadioConfig,
    SurfacePoint,
    TerminalPose,
    cos_aoa,
    distance_eta,
    field_sample,
    visibility_angle,
)
from .oracle import (
    IntegralResult,
    QuadratureSpec,
    gamma_ratio_numeric,
    integrate_disk_power,
    integrate_disk_power_theta_avg,
    integrate_sphere_power,
    integrate_sphere_power_cartesian,
)
from .rss import (
    gamma_ratio,
    gamma_ratio_near_surface,
    rss_disk_approx,
    rss_sphere_cap,
    rss_sphere_full,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "SPEED_OF_LIGHT",
    "SphlisError",
    "VisibilityError",
    "QuadratureBudgetError",
    "DetectionError",
    "EstimationError",
    "LayoutError",
    "LisGeometry",
    "TerminalPose",
    "RadioConfig",
    "FieldSample",
    "SurfacePoint",
    "visibility_angle",
    "distance_eta",
    "cos_aoa",
    "field_sample",
    "rss_sphere_cap",
    "rss_sphere_full",
    "rss_disk_approx",
    "gamma_ratio",
    "gamma_ratio_near_surface",
    "QuadratureSpec",
    "IntegralResult",
    "integrate_sphere_power",
    "integrate_sphere_power_cartesian",
    "integrate_disk_power",
    "integrate_disk_power_theta_avg",
    "gamma_ratio_numeric",
    "__version__",
]

"""Single-photon funneling through a plasmonic resonator nested in a dielectric cavity."""

__version__ = "0.1.0"

from .errors import FunnelkitError, NoPhotonFlux  # noqa: E402
from .params import BASELINE, PhysicalSpec, RateParams, validate_params  # noqa: E402
from .metrics import MetricsResult, compute_point  # noqa: E402
from .analytic import analytic_metrics  # noqa: E402

__all__ = [
    "BASELINE",
    "FunnelkitError",
    "MetricsResult",
    "NoPhotonFlux",
    "PhysicalSpec",
    "RateParams",
    "analytic_metrics",
    "compute_point",
    "validate_params",
]

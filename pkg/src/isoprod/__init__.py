"""Isoperimetric profiles of warped products ``(M x N, lam^{2n} g + lam^{-2m} h)``.

Submodules
----------
profiles
    One-dimensional profiles, sphere caps, scaling and Cheeger-type constants.
model_strip
    The weighted two-dimensional strip and its perimeter minimisers.
bounds
    Two-sided bounds at large ``lam`` and their thresholds.
geometry
    Cylinder candidates, map Jacobians and the stability criterion.
oracle
    Brute-force and randomised cross-checks.
cli
    Command-line front end.
"""

from .profiles import Profile, scale_profile, sphere_profile
from .model_strip import MonotonePath, StripConfig, minimize_perimeter
from .bounds import SandwichResult, Verdict, f_upper, lambda0_threshold, sandwich_check
from .geometry import CylinderSpec, StabilityReport, stability_report

__version__ = "0.1.0"

__all__ = [
    "Profile", "scale_profile", "sphere_profile", "MonotonePath", "StripConfig",
    "minimize_perimeter", "SandwichResult", "Verdict", "f_upper", "lambda0_threshold",
    "sandwich_check", "CylinderSpec", "StabilityReport", "stability_report",
]

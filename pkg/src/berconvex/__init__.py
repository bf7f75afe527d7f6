"""Error rates of minimum-distance detection in AWGN and their convexity."""

from .constellation import Constellation, ConstellationError, load, make_standard, parse_constellation
from .convexity import (
    classify, find_inflections, sweep, thresholds, verify, VerifyConfig,
)
from .error_rates import ber, pep, rate_point, ser, ser_point, simulate
from .gaussian_core import (
    Estimate, gaussian_pdf, noise_curvature_integrand, polytope_curvature,
    polytope_probability, q_function, snr_curvature_integrand,
)
from .geometry import decision_region, summarize

__version__ = "0.1.0"

__all__ = [
    "Constellation", "ConstellationError", "Estimate", "VerifyConfig", "ber", "classify",
    "decision_region", "find_inflections", "gaussian_pdf", "load", "make_standard",
    "noise_curvature_integrand", "parse_constellation", "pep", "polytope_curvature",
    "polytope_probability", "q_function", "rate_point", "ser", "ser_point", "simulate",
    "snr_curvature_integrand", "summarize", "sweep", "thresholds", "verify",
]

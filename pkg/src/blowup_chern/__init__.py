"""Exact computation of the second Chern class jump ``l(Q) + l(R^1 pi_* V)`` of a
rank-2 bundle on the blow-up of a point, from its transition matrix."""

from .cech import h0, h1, h0_sections, profile, r1_length
from .errors import (
    BlowupChernError,
    CertificationFailure,
    NonFiniteLength,
    NonStabilization,
    ParseError,
    RankDeficient,
    WindowViolation,
)
from .laurent import BiLaurentPoly, BundleData, format_poly, parse_poly, validate_bundle
from .local_algebra import Presentation, XYPoly, double_dual_map, l_of_Q
from .report import InvariantReport, SweepConfig, compute, sweep
from .sections import build_presentation, build_sections_module, l_of_Q_for_bundle

__version__ = "0.1.0"

__all__ = [
    "BiLaurentPoly",
    "BlowupChernError",
    "BundleData",
    "CertificationFailure",
    "InvariantReport",
    "NonFiniteLength",
    "NonStabilization",
    "ParseError",
    "Presentation",
    "RankDeficient",
    "SweepConfig",
    "WindowViolation",
    "XYPoly",
    "build_presentation",
    "build_sections_module",
    "compute",
    "double_dual_map",
    "format_poly",
    "h0",
    "h0_sections",
    "h1",
    "l_of_Q",
    "l_of_Q_for_bundle",
    "parse_poly",
    "profile",
    "r1_length",
    "sweep",
    "validate_bundle",
]

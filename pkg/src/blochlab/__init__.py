"""Numerical laboratory for Bloch-type spaces and extended Cesaro composition operators on the unit ball."""

from .bloch import decay_profile, growth_check, norm_chain, restriction_sup_check, seminorm, bloch_norm
from .cesaro import (
    CriterionReport,
    OperatorSpec,
    apply_exact,
    apply_quadrature,
    classify_boundedness,
    classify_compactness,
    criterion_quantity,
    epsnet_probe,
    sup_quantity,
)
from .holo import OrthonormalSystem, PolyFunction, SelfMap, compose, restrict
from .moebius import MoebiusMap, invariant_gradient, pseudohyperbolic
from .sampling import SamplerConfig, SupremumEstimate
from .testfuncs import GSeries, TestConstants, build_g, constants
from .weights import NormalWeight, check_normality, integral_reciprocal, power_weight, standard_weight

__version__ = "0.1.0"

__all__ = [
    "CriterionReport",
    "GSeries",
    "MoebiusMap",
    "NormalWeight",
    "OperatorSpec",
    "OrthonormalSystem",
    "PolyFunction",
    "SamplerConfig",
    "SelfMap",
    "SupremumEstimate",
    "TestConstants",
    "apply_exact",
    "apply_quadrature",
    "bloch_norm",
    "build_g",
    "check_normality",
    "classify_boundedness",
    "classify_compactness",
    "compose",
    "constants",
    "criterion_quantity",
    "decay_profile",
    "epsnet_probe",
    "growth_check",
    "integral_reciprocal",
    "invariant_gradient",
    "norm_chain",
    "power_weight",
    "pseudohyperbolic",
    "restrict",
    "restriction_sup_check",
    "seminorm",
    "standard_weight",
    "sup_quantity",
]

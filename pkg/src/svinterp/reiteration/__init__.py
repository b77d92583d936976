"""Reiteration rules, verification and Lorentz specialization."""

from .chains import ChainReport, run_chain
from .instances import default_instance, default_lorentz_instance
from .lorentz import COROLLARY_OF, CorollaryOutput, specialize_lorentz
from .properties import PropertyReport, check_property, default_property_instance, identify
from .rules import (COROLLARY_RULES, MIRROR, PROPERTY_RULES, REITERATION_RULES, MonotoneMap, Outer,
                    RegularMap, RuleId, RuleInput, RuleOutput, construct, derive, hypotheses, match,
                    sigma_surrogate)
from .verify import default_family, truncation_k, unit_family, verify_equivalence

__all__ = [
    "COROLLARY_OF", "COROLLARY_RULES", "ChainReport", "CorollaryOutput", "MIRROR", "MonotoneMap", "Outer",
    "PROPERTY_RULES", "PropertyReport", "REITERATION_RULES", "RegularMap", "RuleId", "RuleInput",
    "RuleOutput", "check_property", "construct", "default_family", "default_instance",
    "default_lorentz_instance", "default_property_instance", "derive", "hypotheses", "identify", "match",
    "run_chain", "sigma_surrogate", "specialize_lorentz", "truncation_k", "unit_family",
    "verify_equivalence",
]

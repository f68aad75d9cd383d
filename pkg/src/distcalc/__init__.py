"""Exact reduction of distributional integrals in perturbative path integrals.

Checks that the ground-state energy of a harmonic oscillator is unchanged by
a nonlinear coordinate transformation, order by order in the coupling.
"""

from __future__ import annotations

from .expr import Expr, Factor, Term, canonicalize, dirac, integral, local, prop, sign
from .reduce import (
    ALL_RULES,
    PAPER_RULES,
    IrreducibleProductError,
    NoDecayError,
    NonterminationError,
    Reducer,
    ReductionError,
    RuleSet,
    RuleViolationError,
    Variant,
    apply_eom,
    derive_eps_square_delta,
    integrate_by_parts,
    reduce_to_value,
)
from .value import Value, value_eval
from .verify import VerificationReport, compare_rules, intermediate_identities, verify_order
from .wick import Diagram, TransformSpec, Vertex, expand_action, generate_diagrams

__all__ = [
    "ALL_RULES",
    "PAPER_RULES",
    "Diagram",
    "Expr",
    "Factor",
    "IrreducibleProductError",
    "NoDecayError",
    "NonterminationError",
    "Reducer",
    "ReductionError",
    "RuleSet",
    "RuleViolationError",
    "Term",
    "TransformSpec",
    "Value",
    "Variant",
    "VerificationReport",
    "Vertex",
    "apply_eom",
    "canonicalize",
    "compare_rules",
    "derive_eps_square_delta",
    "dirac",
    "expand_action",
    "generate_diagrams",
    "integral",
    "integrate_by_parts",
    "intermediate_identities",
    "local",
    "prop",
    "reduce_to_value",
    "sign",
    "value_eval",
    "verify_order",
]

"""Free-choice checks for finite probability models with a causal order."""

__version__ = "0.1.0"

from .freedom import Criterion, FreedomVerdict, audit, check_bell_condition, is_free, is_free_past_only
from .order import CausalOrder, bell_order, from_edges
from .prob import (
    JointDistribution,
    VariableSpec,
    condition,
    is_independent,
    make_joint,
    marginalize,
    max_factorization_deviation,
    product,
)
from .scenarios import Scenario

__all__ = [
    "CausalOrder",
    "Criterion",
    "FreedomVerdict",
    "JointDistribution",
    "Scenario",
    "VariableSpec",
    "audit",
    "bell_order",
    "check_bell_condition",
    "condition",
    "from_edges",
    "is_free",
    "is_free_past_only",
    "is_independent",
    "make_joint",
    "marginalize",
    "max_factorization_deviation",
    "product",
]

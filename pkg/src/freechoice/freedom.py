"""Free-choice verdicts.

A variable is free when it is independent of the joint of every variable
outside its causal future.  The past-only variant, which only asks for
independence from the causal past, is kept for comparison: it accepts
settings that are perfectly correlated with each other.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .errors import LabelMismatch, UnknownVariable, WrongOrderShape
from .order import BELL_LABELS, CausalOrder, bell_order
from .prob import JointDistribution, Probability, is_independent, max_factorization_deviation

__all__ = [
    "Criterion",
    "FreedomVerdict",
    "Witness",
    "audit",
    "check_bell_condition",
    "find_witness",
    "is_free",
    "is_free_past_only",
]


class Criterion(str, enum.Enum):
    PAPER_DEFINITION = "PaperDefinition"
    PAST_ONLY = "PastOnlyVariant"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Witness:
    """Assignment pair where ``P(subject, ref) != P(subject) P(ref)``."""

    subject_assignment: dict[str, int]
    reference_assignment: dict[str, int]
    lhs: Probability
    rhs: Probability
    deviation: Probability

    def describe(self) -> str:
        sub = ",".join(f"{k}={v}" for k, v in self.subject_assignment.items())
        ref = ",".join(f"{k}={v}" for k, v in self.reference_assignment.items())
        return f"P({sub},{ref})={self.lhs} vs P({sub})P({ref})={self.rhs}, deviation {self.deviation}"


@dataclass(frozen=True)
class FreedomVerdict:
    subject: str
    free: bool
    reference_set: tuple[str, ...]
    criterion: Criterion
    witness: Witness | None = field(default=None)

    def __post_init__(self):
        if self.subject in self.reference_set:
            raise ValueError("subject cannot be part of its own reference set")
        if (self.witness is None) != self.free:
            raise ValueError("a witness is required exactly when the verdict is 'not free'")


def _check_labels(d: JointDistribution, o: CausalOrder, a: str) -> None:
    if set(d.names) != set(o.labels):
        raise LabelMismatch(
            f"order labels {sorted(o.labels)} differ from distribution variables {sorted(d.names)}"
        )
    if a not in o:
        raise UnknownVariable(f"unknown variable {a!r}")


def find_witness(d: JointDistribution, a: str, ref: Sequence[str]) -> Witness:
    """Strongest dependence between ``a`` and any sub-event of the reference joint.

    Every nonempty subset of ``ref`` is scanned, smallest first and in
    label order within a size; the first maximal deviation wins.  The
    full reference set is among the subsets, so a dependent pair always
    yields a positive deviation, and a smaller subset is reported when it
    shows the dependence at least as strongly.
    """
    best = None
    for size in range(1, len(ref) + 1):
        for subset in itertools.combinations(ref, size):
            gap = max_factorization_deviation(d, [a], subset)
            if best is None or gap.deviation > best[1].deviation:
                best = (subset, gap)
    subset, gap = best
    # Reference assignment follows the order's label sequence, not the table's.
    ref_assign = {w: gap.right[w] for w in subset}
    return Witness(gap.left, ref_assign, gap.joint, gap.product, gap.deviation)


def _verdict(d: JointDistribution, a: str, ref: Sequence[str], criterion: Criterion) -> FreedomVerdict:
    ref = tuple(ref)
    if not ref or is_independent(d, [a], ref):
        return FreedomVerdict(a, True, ref, criterion)
    return FreedomVerdict(a, False, ref, criterion, find_witness(d, a, ref))


def is_free(d: JointDistribution, o: CausalOrder, a: str) -> FreedomVerdict:
    """Is ``a`` independent of everything outside its causal future?"""
    _check_labels(d, o, a)
    return _verdict(d, a, o.non_future(a), Criterion.PAPER_DEFINITION)


def is_free_past_only(d: JointDistribution, o: CausalOrder, a: str) -> FreedomVerdict:
    """The weaker variant: independence from the strict causal past only."""
    _check_labels(d, o, a)
    return _verdict(d, a, o.strict_past(a), Criterion.PAST_ONLY)


def audit(d: JointDistribution, o: CausalOrder, past_only: bool = False) -> list[FreedomVerdict]:
    """One verdict per label, in the order's label sequence."""
    if set(d.names) != set(o.labels):
        raise LabelMismatch(
            f"order labels {sorted(o.labels)} differ from distribution variables {sorted(d.names)}"
        )
    check = is_free_past_only if past_only else is_free
    return [check(d, o, a) for a in o.labels]


def check_bell_condition(d: JointDistribution, o: CausalOrder, a: str) -> bool:
    """``P(A | B, Y, Z) = P(A)`` (or the mirror condition for B) under the two-party order."""
    if set(o.labels) != set(BELL_LABELS) or o != bell_order():
        raise WrongOrderShape("the Bell condition needs the two-party order over Z, A, B, X, Y")
    if a not in ("A", "B"):
        raise WrongOrderShape(f"the Bell condition concerns the settings A or B, not {a!r}")
    return is_free(d, o, a).free

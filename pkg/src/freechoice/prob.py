"""Finite discrete joint distributions.

Two numeric modes are supported.  *Exact* tables hold
:class:`fractions.Fraction` entries and every comparison is exact.
*Approx* tables hold floats and comparisons use a per-entry tolerance
``epsilon`` (default ``1e-9``).  A table never mixes the two.

Tables are dense: every outcome tuple of the Cartesian product of the
alphabets has an entry, stored in lexicographic order of the tuples.
"""

from __future__ import annotations

import itertools
import math
import numbers
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence, Union

from .errors import (
    DistributionError,
    DuplicateVariable,
    EmptyKeepSet,
    InvalidVariable,
    MixedMode,
    NameCollision,
    NegativeProbability,
    NotNormalized,
    OutOfAlphabet,
    OverlappingSets,
    UnknownVariable,
    ZeroProbabilityEvent,
)

__all__ = [
    "APPROX",
    "DEFAULT_EPSILON",
    "EXACT",
    "FactorizationGap",
    "JointDistribution",
    "Probability",
    "VariableSpec",
    "condition",
    "event_probability",
    "is_independent",
    "make_joint",
    "marginalize",
    "max_factorization_deviation",
    "point_mass",
    "product",
    "uniform",
]

EXACT = "exact"
APPROX = "approx"
DEFAULT_EPSILON = 1e-9
# Approx entries within this distance outside [0, 1] are clamped.
CLAMP_SLACK = 1e-12

Probability = Union[Fraction, float]

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class VariableSpec:
    """A named variable with alphabet ``{0, ..., cardinality - 1}``."""

    name: str
    cardinality: int

    def __post_init__(self):
        if not isinstance(self.name, str) or not _NAME_RE.match(self.name):
            raise InvalidVariable(f"bad variable name {self.name!r}")
        if isinstance(self.cardinality, bool) or not isinstance(self.cardinality, int):
            raise InvalidVariable(f"cardinality of {self.name} must be an int")
        if self.cardinality < 1:
            raise InvalidVariable(f"cardinality of {self.name} must be >= 1")

    def __str__(self):
        return f"{self.name}:{self.cardinality}"


def _to_exact(value) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, numbers.Rational):
        raise MixedMode(f"non-rational value {value!r} in an exact table")
    p = Fraction(value)
    if p < 0:
        raise NegativeProbability(f"negative probability {p}")
    if p > 1:
        raise DistributionError(f"probability {p} exceeds 1")
    return p


def _to_approx(value) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise DistributionError(f"not a probability: {value!r}")
    p = float(value)
    if not math.isfinite(p):
        raise DistributionError(f"non-finite probability {value!r}")
    if p < -CLAMP_SLACK:
        raise NegativeProbability(f"negative probability {p!r}")
    if p > 1 + CLAMP_SLACK:
        raise DistributionError(f"probability {p!r} exceeds 1")
    return min(max(p, 0.0), 1.0)


def _infer_mode(values: Iterable) -> str:
    kinds = set()
    for v in values:
        if isinstance(v, bool):
            raise DistributionError(f"not a probability: {v!r}")
        if isinstance(v, numbers.Rational):
            kinds.add(EXACT)
        elif isinstance(v, numbers.Real):
            kinds.add(APPROX)
        else:
            raise DistributionError(f"not a probability: {v!r}")
    if len(kinds) > 1:
        raise MixedMode("table mixes exact and floating-point entries")
    return kinds.pop() if kinds else EXACT


class JointDistribution:
    """Immutable dense probability table over an ordered tuple of variables.

    Build instances with :func:`make_joint`; the constructor trusts its
    input.
    """

    __slots__ = ("_variables", "_probs", "_exact", "_epsilon", "_index", "_strides")

    def __init__(self, variables, probs, exact, epsilon=DEFAULT_EPSILON):
        self._variables = tuple(variables)
        self._probs = tuple(probs)
        self._exact = bool(exact)
        self._epsilon = float(epsilon)
        self._index = {v.name: i for i, v in enumerate(self._variables)}
        strides = []
        step = 1
        for v in reversed(self._variables):
            strides.append(step)
            step *= v.cardinality
        self._strides = tuple(reversed(strides))

    # -- introspection -----------------------------------------------------

    @property
    def variables(self) -> tuple[VariableSpec, ...]:
        return self._variables

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self._variables)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(v.cardinality for v in self._variables)

    @property
    def mode(self) -> str:
        return EXACT if self._exact else APPROX

    @property
    def exact(self) -> bool:
        return self._exact

    @property
    def epsilon(self) -> float:
        return self._epsilon

    def spec(self, name: str) -> VariableSpec:
        return self._variables[self.position(name)]

    def position(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariable(f"unknown variable {name!r}") from None

    def outcomes(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(v.cardinality) for v in self._variables))

    def items(self) -> Iterator[tuple[tuple[int, ...], Probability]]:
        return zip(self.outcomes(), self._probs)

    def values(self) -> tuple[Probability, ...]:
        return self._probs

    def __getitem__(self, outcome) -> Probability:
        if not isinstance(outcome, tuple):
            outcome = (outcome,)
        if len(outcome) != len(self._variables):
            raise OutOfAlphabet(f"outcome {outcome!r} has wrong length")
        idx = 0
        for v, x, stride in zip(self._variables, outcome, self._strides):
            if not 0 <= x < v.cardinality:
                raise OutOfAlphabet(f"{v.name}={x} outside alphabet of size {v.cardinality}")
            idx += x * stride
        return self._probs[idx]

    def __len__(self):
        return len(self._probs)

    def __eq__(self, other):
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return (
            self._variables == other._variables
            and self._exact == other._exact
            and self._epsilon == other._epsilon
            and self._probs == other._probs
        )

    def __hash__(self):
        return hash((self._variables, self._exact, self._probs))

    def __repr__(self):
        vs = ", ".join(str(v) for v in self._variables)
        return f"JointDistribution([{vs}], mode={self.mode}, support={self.support_size()})"

    def support_size(self) -> int:
        return sum(1 for p in self._probs if p != 0)

    def total(self) -> Probability:
        return sum(self._probs, Fraction(0) if self._exact else 0.0)

    def _zero(self):
        return Fraction(0) if self._exact else 0.0

    def _table(self, names: Sequence[str]) -> dict[tuple[int, ...], Probability]:
        """Marginal table over ``names`` keyed by value tuples (sparse)."""
        pos = [self.position(n) for n in names]
        table: dict[tuple[int, ...], Probability] = {}
        zero = self._zero()
        for outcome, p in self.items():
            key = tuple(outcome[i] for i in pos)
            table[key] = table.get(key, zero) + p
        return table

    def _ordered(self, names: Iterable[str]) -> list[str]:
        """Names sorted by their position in this distribution."""
        return sorted(set(names), key=self.position)


def make_joint(
    variables: Sequence[VariableSpec],
    entries: Mapping,
    mode: str | None = None,
    epsilon: float = DEFAULT_EPSILON,
) -> JointDistribution:
    """Build a validated distribution from a sparse ``{outcome: probability}`` map.

    Missing outcomes are zero.  ``mode`` is inferred from the entry types
    when omitted: rationals give an exact table, floats an approximate one.
    Passing ``mode="approx"`` converts rational entries to floats.
    """
    variables = tuple(variables)
    seen = set()
    for v in variables:
        if not isinstance(v, VariableSpec):
            raise InvalidVariable(f"expected VariableSpec, got {v!r}")
        if v.name in seen:
            raise DuplicateVariable(f"duplicate variable {v.name!r}")
        seen.add(v.name)
    if mode is None:
        mode = _infer_mode(entries.values())
    if mode not in (EXACT, APPROX):
        raise DistributionError(f"unknown mode {mode!r}")
    if not epsilon > 0:
        raise DistributionError("epsilon must be positive")
    exact = mode == EXACT
    convert = _to_exact if exact else _to_approx

    size = math.prod(v.cardinality for v in variables)
    probs: list[Probability] = [Fraction(0) if exact else 0.0] * size
    dist = JointDistribution(variables, probs, exact, epsilon)
    strides = dist._strides
    for outcome, value in entries.items():
        if not isinstance(outcome, tuple):
            outcome = (outcome,)
        if len(outcome) != len(variables):
            raise OutOfAlphabet(f"outcome {outcome!r} does not match {len(variables)} variables")
        idx = 0
        for v, x, stride in zip(variables, outcome, strides):
            if isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < v.cardinality:
                raise OutOfAlphabet(f"{v.name}={x!r} outside alphabet of size {v.cardinality}")
            idx += x * stride
        probs[idx] = convert(value)

    total = sum(probs, Fraction(0) if exact else 0.0)
    if exact:
        if total != 1:
            raise NotNormalized(total)
    elif abs(total - 1.0) > epsilon:
        raise NotNormalized(total)
    return JointDistribution(variables, probs, exact, epsilon)


def uniform(variables: Sequence[VariableSpec]) -> JointDistribution:
    """Exact uniform distribution over the product alphabet."""
    variables = tuple(variables)
    size = math.prod(v.cardinality for v in variables)
    outcomes = itertools.product(*(range(v.cardinality) for v in variables))
    return make_joint(variables, {o: Fraction(1, size) for o in outcomes})


def point_mass(variables: Sequence[VariableSpec], outcome) -> JointDistribution:
    return make_joint(variables, {outcome if isinstance(outcome, tuple) else (outcome,): Fraction(1)})


def _check_names(d: JointDistribution, names: Iterable[str]) -> list[str]:
    names = list(names)
    for n in names:
        d.position(n)
    return names


def marginalize(d: JointDistribution, keep: Sequence[str]) -> JointDistribution:
    """Sum out every variable not in ``keep``; result variables follow ``keep``'s order."""
    if isinstance(keep, str):
        keep = [keep]
    keep = _check_names(d, keep)
    if not keep:
        raise EmptyKeepSet("keep set is empty")
    if len(set(keep)) != len(keep):
        raise DuplicateVariable(f"duplicate names in keep set {keep}")
    table = d._table(keep)
    specs = [d.spec(n) for n in keep]
    return _build(specs, table, d)


def _build(specs, table, like: JointDistribution) -> JointDistribution:
    zero = like._zero()
    outcomes = itertools.product(*(range(v.cardinality) for v in specs))
    probs = [table.get(o, zero) for o in outcomes]
    return JointDistribution(specs, probs, like.exact, like.epsilon)


def event_probability(d: JointDistribution, assignment: Mapping[str, int]) -> Probability:
    """Probability that every named variable takes its assigned value."""
    pos = []
    for name, value in assignment.items():
        i = d.position(name)
        if not 0 <= value < d.variables[i].cardinality:
            raise OutOfAlphabet(f"{name}={value} outside alphabet")
        pos.append((i, value))
    total = d._zero()
    for outcome, p in d.items():
        if all(outcome[i] == v for i, v in pos):
            total += p
    return total


def condition(d: JointDistribution, given: Mapping[str, int]) -> JointDistribution:
    """Distribution of the remaining variables given a partial assignment."""
    given = dict(given)
    p_given = event_probability(d, given)
    if p_given == 0:
        raise ZeroProbabilityEvent(f"conditioning event {given} has probability zero")
    rest = [v for v in d.variables if v.name not in given]
    rest_pos = [d.position(v.name) for v in rest]
    pos = [(d.position(n), x) for n, x in given.items()]
    table: dict[tuple[int, ...], Probability] = {}
    for outcome, p in d.items():
        if all(outcome[i] == x for i, x in pos):
            table[tuple(outcome[i] for i in rest_pos)] = p / p_given
    return _build(rest, table, d)


def product(d1: JointDistribution, d2: JointDistribution) -> JointDistribution:
    """Independent product; variables of ``d1`` come first."""
    clash = set(d1.names) & set(d2.names)
    if clash:
        raise NameCollision(f"variables {sorted(clash)} appear in both factors")
    if d1.exact != d2.exact:
        raise MixedMode("cannot multiply an exact and an approximate distribution")
    probs = [p * q for p in d1.values() for q in d2.values()]
    return JointDistribution(
        d1.variables + d2.variables, probs, d1.exact, max(d1.epsilon, d2.epsilon)
    )


class FactorizationGap(NamedTuple):
    """Largest violation of ``P(s, t) = P(s) P(t)`` found in a table."""

    left: dict[str, int]
    right: dict[str, int]
    joint: Probability
    product: Probability
    deviation: Probability

    @property
    def assignment(self) -> tuple[dict[str, int], dict[str, int]]:
        return self.left, self.right


def _split(d: JointDistribution, s: Iterable[str], t: Iterable[str]):
    if isinstance(s, str):
        s = [s]
    if isinstance(t, str):
        t = [t]
    s = _check_names(d, s)
    t = _check_names(d, t)
    overlap = set(s) & set(t)
    if overlap:
        raise OverlappingSets(f"sets overlap on {sorted(overlap)}")
    return d._ordered(s), d._ordered(t)


def _gaps(d: JointDistribution, s: list[str], t: list[str]):
    """Yield ``(sigma, tau, joint, product)`` in lexicographic order of (sigma, tau)."""
    joint = d._table(s + t)
    ps = d._table(s)
    pt = d._table(t)
    zero = d._zero()
    sigmas = itertools.product(*(range(d.spec(n).cardinality) for n in s))
    taus = list(itertools.product(*(range(d.spec(n).cardinality) for n in t)))
    for sigma in sigmas:
        a = ps.get(sigma, zero)
        for tau in taus:
            yield sigma, tau, joint.get(sigma + tau, zero), a * pt.get(tau, zero)


def is_independent(d: JointDistribution, s: Iterable[str], t: Iterable[str]) -> bool:
    """True iff the joint of ``s`` is independent of the joint of ``t``.

    Decided entry by entry on the factorized form, exactly for exact
    tables and within ``d.epsilon`` otherwise.  An empty side is
    trivially independent.
    """
    s, t = _split(d, s, t)
    if not s or not t:
        return True
    if d.exact:
        return all(j == q for _, _, j, q in _gaps(d, s, t))
    eps = d.epsilon
    return all(abs(j - q) <= eps for _, _, j, q in _gaps(d, s, t))


def max_factorization_deviation(
    d: JointDistribution, s: Iterable[str], t: Iterable[str]
) -> FactorizationGap:
    """Assignment pair maximizing ``|P(s, t) - P(s) P(t)|``.

    Ties go to the lexicographically first ``(sigma, tau)``.  The
    deviation is a Fraction for exact tables and a float otherwise.
    """
    s, t = _split(d, s, t)
    best = None
    best_dev = None
    for sigma, tau, j, q in _gaps(d, s, t):
        dev = abs(j - q)
        if best_dev is None or dev > best_dev:
            best, best_dev = (sigma, tau, j, q), dev
    sigma, tau, j, q = best
    return FactorizationGap(dict(zip(s, sigma)), dict(zip(t, tau)), j, q, best_dev)

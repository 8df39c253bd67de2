"""Causal orders derived from event coordinates in Minkowski space (c = 1).

An event ``b`` is in the causal future of ``a`` when it lies in the closed
future light cone of ``a``: ``dt > 0`` and ``dt**2 - |dx|**2 >= -tol``.
That relation holds in every inertial frame, which is the point: spacelike
pairs stay unordered because their time order depends on the frame.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import BadAxis, DimensionMismatch, DuplicateLabel, SpacetimeError, SuperluminalBoost
from .order import CausalOrder, from_edges
from .prob import _NAME_RE

__all__ = [
    "CLASSIFICATION_TOLERANCE",
    "IntervalClass",
    "SpacetimeEvent",
    "bell_layout",
    "boost",
    "derive_order",
    "interval_class",
    "squared_interval",
]

CLASSIFICATION_TOLERANCE = 1e-9


class IntervalClass(enum.Enum):
    TIMELIKE = "Timelike"
    LIGHTLIKE = "Lightlike"
    SPACELIKE = "Spacelike"
    COINCIDENT = "Coincident"


@dataclass(frozen=True)
class SpacetimeEvent:
    label: str
    t: float
    x: tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.label, str) or not _NAME_RE.match(self.label):
            raise SpacetimeError(f"bad event label {self.label!r}")
        x = self.x
        if isinstance(x, (int, float)):
            x = (x,)
        x = tuple(float(c) for c in x)
        if not 1 <= len(x) <= 3:
            raise DimensionMismatch(f"event {self.label} needs 1 to 3 spatial coordinates")
        t = float(self.t)
        if not all(math.isfinite(c) for c in (t, *x)):
            raise SpacetimeError(f"event {self.label} has non-finite coordinates")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", t)

    @property
    def dim(self) -> int:
        return len(self.x)


def _check_dims(events: Sequence[SpacetimeEvent]) -> None:
    dims = {e.dim for e in events}
    if len(dims) > 1:
        raise DimensionMismatch(f"events mix spatial dimensions {sorted(dims)}")


def squared_interval(e1: SpacetimeEvent, e2: SpacetimeEvent) -> float:
    """``dt**2 - |dx|**2``; positive for timelike separation."""
    _check_dims([e1, e2])
    dt = e2.t - e1.t
    dx2 = sum((b - a) ** 2 for a, b in zip(e1.x, e2.x))
    return dt * dt - dx2


def interval_class(
    e1: SpacetimeEvent, e2: SpacetimeEvent, tol: float = CLASSIFICATION_TOLERANCE
) -> IntervalClass:
    s2 = squared_interval(e1, e2)
    if e1.t == e2.t and e1.x == e2.x:
        return IntervalClass.COINCIDENT
    if s2 > tol:
        return IntervalClass.TIMELIKE
    if s2 < -tol:
        return IntervalClass.SPACELIKE
    return IntervalClass.LIGHTLIKE


def _causally_precedes(a: SpacetimeEvent, b: SpacetimeEvent, tol: float) -> bool:
    if b.t - a.t <= 0:
        return False
    return interval_class(a, b, tol) in (IntervalClass.TIMELIKE, IntervalClass.LIGHTLIKE)


def derive_order(
    events: Sequence[SpacetimeEvent], tol: float = CLASSIFICATION_TOLERANCE
) -> CausalOrder:
    """Order events by closed-future-light-cone containment.

    Distinct events at identical coordinates are left unordered.  The
    result is passed through transitive closure so that the preorder laws
    hold even for pairs inside the near-null tolerance band (outside it
    the closure adds nothing).
    """
    events = list(events)
    labels = [e.label for e in events]
    if len(set(labels)) != len(labels):
        dupes = sorted({lab for lab in labels if labels.count(lab) > 1})
        raise DuplicateLabel(f"duplicate event labels {dupes}")
    _check_dims(events)
    edges = [
        (a.label, b.label)
        for a in events
        for b in events
        if a is not b and _causally_precedes(a, b, tol)
    ]
    return from_edges(labels, edges)


def boost(events: Sequence[SpacetimeEvent], v: float, axis: int = 0) -> list[SpacetimeEvent]:
    """Lorentz boost with velocity ``v`` along spatial ``axis`` (0-based)."""
    if not math.isfinite(v) or abs(v) >= 1:
        raise SuperluminalBoost(f"boost velocity {v} must satisfy |v| < 1")
    events = list(events)
    _check_dims(events)
    if events and not 0 <= axis < events[0].dim:
        raise BadAxis(f"axis {axis} invalid for {events[0].dim} spatial dimensions")
    gamma = 1.0 / math.sqrt(1.0 - v * v)
    out = []
    for e in events:
        xa = e.x[axis]
        x = list(e.x)
        x[axis] = gamma * (xa - v * e.t)
        out.append(SpacetimeEvent(e.label, gamma * (e.t - v * xa), tuple(x)))
    return out


def bell_layout() -> list[SpacetimeEvent]:
    """Source Z, spacelike settings A, B, and their outcomes X, Y in 1+1 dimensions."""
    return [
        SpacetimeEvent("Z", -2.0, (0.0,)),
        SpacetimeEvent("A", 0.0, (-1.0,)),
        SpacetimeEvent("B", 0.0, (1.0,)),
        SpacetimeEvent("X", 1.0, (-1.0,)),
        SpacetimeEvent("Y", 1.0, (1.0,)),
    ]

"""Built-in scenarios and Bell-type helpers.

Outcome encoding for the +/-1 convention is fixed: value 0 means +1 and
value 1 means -1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import BadResponseMap, FreeChoiceError, LabelMismatch
from .order import BELL_LABELS, CausalOrder, bell_order, from_edges
from .prob import (
    JointDistribution,
    Probability,
    VariableSpec,
    condition,
    event_probability,
    make_joint,
    marginalize,
)
from .spacetime import SpacetimeEvent, derive_order

__all__ = [
    "BUILTINS",
    "Scenario",
    "chsh_sum",
    "chsh_value",
    "correlated_settings",
    "correlator",
    "is_no_signalling",
    "local_hidden_variable",
    "pr_box",
    "shared_coin",
    "single_measurement",
    "singlet",
]


@dataclass(frozen=True)
class Scenario:
    """Variables, their joint distribution and a causal order.

    ``distribution`` may be ``None`` for order-only scenarios read from a
    file.  When ``embedding`` is given the order must be the one derived
    from it.
    """

    name: str
    order: CausalOrder
    distribution: JointDistribution | None = None
    embedding: tuple[SpacetimeEvent, ...] | None = None

    def __post_init__(self):
        if self.distribution is not None and set(self.distribution.names) != set(self.order.labels):
            raise LabelMismatch(
                f"scenario {self.name!r}: order labels {list(self.order.labels)} "
                f"differ from variables {list(self.distribution.names)}"
            )
        if self.embedding is not None:
            object.__setattr__(self, "embedding", tuple(self.embedding))
            if derive_order(self.embedding) != self.order:
                raise FreeChoiceError(
                    f"scenario {self.name!r}: order differs from the one derived from its events"
                )

    @property
    def labels(self) -> tuple[str, ...]:
        return self.order.labels


def _bits(*names: str) -> list[VariableSpec]:
    return [VariableSpec(n, 2) for n in names]


def single_measurement() -> Scenario:
    """State Z, setting A, outcome X = Z xor A; Z and A uniform and independent."""
    variables = _bits("Z", "A", "X")
    entries = {(z, a, z ^ a): Fraction(1, 4) for z in (0, 1) for a in (0, 1)}
    order = from_edges(["Z", "A", "X"], [("Z", "X"), ("A", "X")])
    return Scenario("single_measurement", order, make_joint(variables, entries))


def correlated_settings() -> Scenario:
    """Perfectly correlated settings that are each independent of the source Z."""
    variables = _bits(*BELL_LABELS)
    entries = {(z, a, a, a, a): Fraction(1, 4) for z in (0, 1) for a in (0, 1)}
    return Scenario("correlated_settings", bell_order(), make_joint(variables, entries))


def _bell_vars(z_card: int | None) -> list[VariableSpec]:
    head = [VariableSpec("Z", z_card)] if z_card else []
    return head + _bits("A", "B", "X", "Y")


def _bell_scenario(name, z_card, entries, mode=None) -> Scenario:
    variables = _bell_vars(z_card)
    order = bell_order()
    if not z_card:
        order = order.restrict(["A", "B", "X", "Y"])
    return Scenario(name, order, make_joint(variables, entries, mode=mode))


def pr_box(include_trivial_z: bool = True) -> Scenario:
    """Popescu-Rohrlich box: x xor y = a*b with certainty, uniform settings."""
    entries = {}
    for a, b, x in itertools.product((0, 1), repeat=3):
        y = x ^ (a & b)
        key = (a, b, x, y)
        entries[(0,) + key if include_trivial_z else key] = Fraction(1, 8)
    return _bell_scenario("pr_box", 1 if include_trivial_z else None, entries)


def singlet(
    angles_a: Sequence[float] = (0.0, math.pi / 2),
    angles_b: Sequence[float] = (math.pi / 4, 3 * math.pi / 4),
) -> Scenario:
    """Singlet-state statistics with correlator ``-cos(theta_a - theta_b)``."""
    if len(angles_a) != 2 or len(angles_b) != 2:
        raise ValueError("singlet needs exactly two angles per side")
    if not all(math.isfinite(t) for t in (*angles_a, *angles_b)):
        raise ValueError("singlet angles must be finite")
    entries = {}
    for a, b, x, y in itertools.product((0, 1), repeat=4):
        e = -math.cos(angles_a[a] - angles_b[b])
        sign = (1 - 2 * x) * (1 - 2 * y)
        entries[(0, a, b, x, y)] = 0.25 * (1 + sign * e) / 4
    return _bell_scenario("singlet", 1, entries, mode="approx")


def local_hidden_variable(
    lambda_card: int,
    response_x: Mapping[tuple[int, int], int],
    response_y: Mapping[tuple[int, int], int],
    lambda_probs: Sequence,
    name: str = "local_hidden_variable",
) -> Scenario:
    """Hidden variable Z = lambda; outcomes fixed by ``response[(setting, lambda)]``."""
    if lambda_card < 1 or len(lambda_probs) != lambda_card:
        raise BadResponseMap(f"need {lambda_card} lambda probabilities, got {len(lambda_probs)}")
    for label, resp in (("X", response_x), ("Y", response_y)):
        for s, lam in itertools.product((0, 1), range(lambda_card)):
            if (s, lam) not in resp:
                raise BadResponseMap(f"response for {label} missing at (setting={s}, lambda={lam})")
            if resp[(s, lam)] not in (0, 1):
                raise BadResponseMap(f"response for {label} at ({s}, {lam}) is not a bit")
    rational = all(isinstance(p, (int, Fraction)) for p in lambda_probs)
    quarter = Fraction(1, 4) if rational else 0.25
    entries: dict[tuple[int, ...], Probability] = {}
    for lam, a, b in itertools.product(range(lambda_card), (0, 1), (0, 1)):
        key = (lam, a, b, response_x[(a, lam)], response_y[(b, lam)])
        p = (Fraction(lambda_probs[lam]) if rational else float(lambda_probs[lam])) * quarter
        entries[key] = entries.get(key, 0) + p
    return _bell_scenario(name, lambda_card, entries)


def shared_coin() -> Scenario:
    """Uniform two-valued hidden variable copied to both outcomes."""
    resp = {(s, lam): lam for s in (0, 1) for lam in (0, 1)}
    return local_hidden_variable(2, resp, resp, [Fraction(1, 2)] * 2, name="shared_coin")


# -- Bell-type quantities -------------------------------------------------


def correlator(d: JointDistribution, a: int, b: int) -> Probability:
    """``E(a, b) = sum_xy (+-1)(+-1) P(x, y | a, b)`` in the 0 -> +1, 1 -> -1 encoding."""
    cond = marginalize(condition(d, {"A": a, "B": b}), ["X", "Y"])
    total = Fraction(0) if d.exact else 0.0
    for (x, y), p in cond.items():
        total += (1 - 2 * x) * (1 - 2 * y) * p
    return total


def chsh_sum(d: JointDistribution, minus_at: tuple[int, int] = (1, 1)) -> Probability:
    """``sum_ab E(a, b)`` with the single minus sign placed on setting pair ``minus_at``."""
    return sum(
        (-1 if (a, b) == tuple(minus_at) else 1) * correlator(d, a, b)
        for a, b in itertools.product((0, 1), repeat=2)
    )


def chsh_value(d: JointDistribution) -> Probability:
    """Largest ``|chsh_sum|`` over the four placements of the minus sign.

    Equivalent to maximizing over relabelings of settings and outcomes, so
    the value does not depend on the angle or labeling convention.
    """
    return max(abs(chsh_sum(d, m)) for m in itertools.product((0, 1), repeat=2))


def is_no_signalling(d: JointDistribution) -> bool:
    """Each outcome's marginal is unaffected by the remote setting."""
    for local, remote, out in (("A", "B", "X"), ("B", "A", "Y")):
        for s in (0, 1):
            rows = []
            for r in (0, 1):
                c = marginalize(condition(d, {local: s, remote: r}), [out])
                rows.append(c.values())
            if d.exact:
                if rows[0] != rows[1]:
                    return False
            elif any(abs(p - q) > d.epsilon for p, q in zip(*rows)):
                return False
    return True


BUILTINS: dict[str, Callable[[], Scenario]] = {
    "single_measurement": single_measurement,
    "correlated_settings": correlated_settings,
    "pr_box": pr_box,
    "singlet": singlet,
    "shared_coin": shared_coin,
}

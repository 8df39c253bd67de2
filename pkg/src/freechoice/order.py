"""Causal orders: reflexive, transitive relations over variable labels.

Antisymmetry is not required, so cycles are allowed and simply make
their members precede one another.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import OrderError, SameLabel, UnknownLabel

__all__ = ["CausalOrder", "bell_order", "from_edges"]

BELL_LABELS = ("Z", "A", "B", "X", "Y")
# The source precedes both settings; settings precede only their own outcome.
BELL_EDGES = (("Z", "A"), ("Z", "B"), ("Z", "X"), ("Z", "Y"), ("A", "X"), ("B", "Y"))


class CausalOrder:
    """A closed preorder stored as a dense boolean matrix.

    ``order.precedes(a, b)`` reads "b is in the causal future of a".
    """

    __slots__ = ("_labels", "_index", "_matrix")

    def __init__(self, labels: Sequence[str], matrix: Sequence[Sequence[bool]]):
        self._labels = tuple(labels)
        self._index = {lab: i for i, lab in enumerate(self._labels)}
        if len(self._index) != len(self._labels):
            raise OrderError(f"duplicate labels in {self._labels}")
        self._matrix = tuple(tuple(bool(x) for x in row) for row in matrix)
        n = len(self._labels)
        if len(self._matrix) != n or any(len(row) != n for row in self._matrix):
            raise OrderError("relation matrix does not match the label count")
        if not (self.is_reflexive() and self.is_transitive()):
            raise OrderError("relation is not a preorder; build it with from_edges")

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def matrix(self) -> tuple[tuple[bool, ...], ...]:
        return self._matrix

    def _i(self, label: str) -> int:
        try:
            return self._index[label]
        except (KeyError, TypeError):
            raise UnknownLabel(f"unknown label {label!r}") from None

    def __contains__(self, label):
        return label in self._index

    def __eq__(self, other):
        if not isinstance(other, CausalOrder):
            return NotImplemented
        if set(self._labels) != set(other._labels):
            return False
        return self.pairs() == other.pairs()

    def __hash__(self):
        return hash((frozenset(self._labels), self.pairs()))

    def __repr__(self):
        edges = ", ".join(f"{a}->{b}" for a, b in self.edges())
        return f"CausalOrder({list(self._labels)}, [{edges}])"

    # -- queries ------------------------------------------------------------

    def precedes(self, a: str, b: str) -> bool:
        return self._matrix[self._i(a)][self._i(b)]

    def non_future(self, a: str) -> tuple[str, ...]:
        """Labels ``w`` with ``not a -> w``, in label order."""
        row = self._matrix[self._i(a)]
        return tuple(w for w, r in zip(self._labels, row) if not r)

    def future(self, a: str) -> tuple[str, ...]:
        row = self._matrix[self._i(a)]
        return tuple(w for w, r in zip(self._labels, row) if r)

    def strict_past(self, a: str) -> tuple[str, ...]:
        """Labels ``w != a`` with ``w -> a``, in label order."""
        j = self._i(a)
        return tuple(w for i, w in enumerate(self._labels) if i != j and self._matrix[i][j])

    def mutually_unordered(self, a: str, b: str) -> bool:
        i, j = self._i(a), self._i(b)
        if i == j:
            raise SameLabel(f"mutually_unordered needs two distinct labels, got {a!r} twice")
        return not self._matrix[i][j] and not self._matrix[j][i]

    def pairs(self) -> frozenset[tuple[str, str]]:
        """Every related pair, self-pairs included."""
        return frozenset(
            (a, b)
            for a, row in zip(self._labels, self._matrix)
            for b, r in zip(self._labels, row)
            if r
        )

    def edges(self) -> list[tuple[str, str]]:
        """Non-reflexive related pairs in label order."""
        return [
            (a, b)
            for i, a in enumerate(self._labels)
            for j, b in enumerate(self._labels)
            if i != j and self._matrix[i][j]
        ]

    def unordered_pairs(self) -> list[tuple[str, str]]:
        n = len(self._labels)
        return [
            (self._labels[i], self._labels[j])
            for i in range(n)
            for j in range(i + 1, n)
            if not self._matrix[i][j] and not self._matrix[j][i]
        ]

    def restrict(self, labels: Iterable[str]) -> "CausalOrder":
        """Induced order on a subset of labels (still a preorder)."""
        wanted = set(labels)
        for lab in wanted:
            self._i(lab)
        keep = [lab for lab in self._labels if lab in wanted]
        idx = [self._i(lab) for lab in keep]
        return CausalOrder(keep, [[self._matrix[i][j] for j in idx] for i in idx])

    def is_reflexive(self) -> bool:
        return all(self._matrix[i][i] for i in range(len(self._labels)))

    def is_transitive(self) -> bool:
        m = self._matrix
        n = len(m)
        return all(
            m[i][k]
            for i in range(n)
            for j in range(n)
            if m[i][j]
            for k in range(n)
            if m[j][k]
        )


def from_edges(labels: Sequence[str], edges: Iterable[tuple[str, str]]) -> CausalOrder:
    """Reflexive-transitive closure of ``edges`` over ``labels`` (Warshall)."""
    labels = tuple(labels)
    index = {lab: i for i, lab in enumerate(labels)}
    if len(index) != len(labels):
        raise OrderError(f"duplicate labels in {labels}")
    n = len(labels)
    m = [[i == j for j in range(n)] for i in range(n)]
    for a, b in edges:
        for lab in (a, b):
            if lab not in index:
                raise UnknownLabel(f"edge endpoint {lab!r} is not a label")
        m[index[a]][index[b]] = True
    for k in range(n):
        mk = m[k]
        for i in range(n):
            if m[i][k]:
                mi = m[i]
                for j in range(n):
                    if mk[j]:
                        mi[j] = True
    return CausalOrder(labels, m)


def bell_order() -> CausalOrder:
    """Two-party order: shared source Z, settings A, B, outcomes X, Y."""
    return from_edges(BELL_LABELS, BELL_EDGES)

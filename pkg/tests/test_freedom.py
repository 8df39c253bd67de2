import itertools
import random
from fractions import Fraction

import pytest

from conftest import random_exact, table_of
from freechoice.errors import LabelMismatch, UnknownVariable, WrongOrderShape
from freechoice.freedom import (
    Criterion,
    FreedomVerdict,
    audit,
    check_bell_condition,
    find_witness,
    is_free,
    is_free_past_only,
)
from freechoice.order import bell_order, from_edges
from freechoice.prob import VariableSpec, condition, make_joint, marginalize, uniform
from freechoice.scenarios import correlated_settings, pr_box, single_measurement
import oracles


def test_pr_box_without_source():
    sc = pr_box(include_trivial_z=False)
    v = is_free(sc.distribution, sc.order, "A")
    assert v.free and v.reference_set == ("B", "Y")
    assert v.criterion is Criterion.PAPER_DEFINITION and v.witness is None
    assert oracles.independent(oracles.pr_box_table(), ["A", "B", "X", "Y"], [2] * 4, ["A"], ["B", "Y"])


def test_correlated_settings_rejected_with_witness():
    sc = correlated_settings()
    v = is_free(sc.distribution, sc.order, "A")
    assert not v.free
    assert v.reference_set == ("Z", "B", "Y")
    w = v.witness
    assert w.subject_assignment == {"A": 0}
    assert w.reference_assignment == {"B": 0}
    assert (w.lhs, w.rhs, w.deviation) == (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))


def test_witness_is_the_strongest_sub_event():
    # oracle: brute-force every nonempty subset of the reference set
    sc = correlated_settings()
    d = sc.distribution
    names, cards = list(d.names), list(d.cardinalities)
    ref = sc.order.non_future("A")
    best = max(
        oracles.max_gap(table_of(d), names, cards, ["A"], list(sub))[0]
        for k in range(1, len(ref) + 1)
        for sub in itertools.combinations(ref, k)
    )
    assert find_witness(d, "A", ref).deviation == best == Fraction(1, 4)
    full = oracles.max_gap(table_of(d), names, cards, ["A"], list(ref))[0]
    assert full == Fraction(1, 8)


def test_vacuously_free():
    o = from_edges(["A", "B"], [("A", "B")])
    d = make_joint([VariableSpec("A", 2), VariableSpec("B", 2)], {(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)})
    v = is_free(d, o, "A")
    assert v.free and v.reference_set == ()


class TestPastOnly:
    def test_correlated_settings_accepted(self):
        sc = correlated_settings()
        for a in "AB":
            v = is_free_past_only(sc.distribution, sc.order, a)
            assert v.free and v.reference_set == ("Z",)
            assert v.criterion is Criterion.PAST_ONLY
            assert not is_free(sc.distribution, sc.order, a).free

    def test_past_dependence_rejected_by_both(self):
        o = from_edges(["Z", "A"], [("Z", "A")])
        d = make_joint([VariableSpec("Z", 2), VariableSpec("A", 2)], {(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)})
        assert not is_free(d, o, "A").free
        assert not is_free_past_only(d, o, "A").free


class TestAudit:
    def test_independent_bits_identity_order(self):
        specs = [VariableSpec(n, 2) for n in "ABC"]
        verdicts = audit(uniform(specs), from_edges("ABC", []))
        assert [v.subject for v in verdicts] == ["A", "B", "C"]
        assert all(v.free for v in verdicts)

    def test_correlated_settings(self):
        sc = correlated_settings()
        got = {v.subject: v.free for v in audit(sc.distribution, sc.order)}
        assert got["A"] is False and got["B"] is False and got["Z"] is True

    def test_pr_box_restricted(self):
        sc = pr_box(include_trivial_z=False)
        got = {v.subject: v.free for v in audit(sc.distribution, sc.order)}
        assert got["A"] and got["B"]

    def test_past_only_flag(self):
        sc = correlated_settings()
        verdicts = audit(sc.distribution, sc.order, past_only=True)
        assert all(v.criterion is Criterion.PAST_ONLY for v in verdicts)

    def test_label_mismatch(self):
        sc = pr_box(include_trivial_z=False)
        with pytest.raises(LabelMismatch):
            audit(sc.distribution, bell_order())
        with pytest.raises(LabelMismatch):
            is_free(sc.distribution, bell_order(), "A")

    def test_unknown_subject(self):
        sc = correlated_settings()
        with pytest.raises(UnknownVariable):
            is_free(sc.distribution, sc.order, "Q")


class TestBellCondition:
    def test_pr_box_trivial_source(self):
        sc = pr_box()
        assert check_bell_condition(sc.distribution, sc.order, "A")
        assert check_bell_condition(sc.distribution, sc.order, "B")

    def test_correlated_settings(self):
        sc = correlated_settings()
        assert not check_bell_condition(sc.distribution, sc.order, "A")

    def test_point_mass_setting(self):
        specs = [VariableSpec(n, 2) for n in "ZABXY"]
        rng = random.Random(1)
        entries = {}
        for z, b, x, y in itertools.product((0, 1), repeat=4):
            entries[(z, 0, b, x, y)] = rng.randint(1, 9)
        total = sum(entries.values())
        d = make_joint(specs, {k: Fraction(v, total) for k, v in entries.items()})
        assert check_bell_condition(d, bell_order(), "A")

    def test_wrong_shape(self):
        sc = pr_box(include_trivial_z=False)
        with pytest.raises(WrongOrderShape):
            check_bell_condition(sc.distribution, sc.order, "A")
        with pytest.raises(WrongOrderShape):
            check_bell_condition(pr_box().distribution, bell_order(), "X")


def test_verdict_invariants():
    with pytest.raises(ValueError):
        FreedomVerdict("A", True, ("A",), Criterion.PAPER_DEFINITION)
    with pytest.raises(ValueError):
        FreedomVerdict("A", False, ("B",), Criterion.PAPER_DEFINITION)


def test_single_measurement_is_free():
    sc = single_measurement()
    v = is_free(sc.distribution, sc.order, "A")
    assert v.free and v.reference_set == ("Z",)


def _random_order(rng, labels):
    edges = [(rng.choice(labels), rng.choice(labels)) for _ in range(rng.randint(0, 5))]
    return edges, from_edges(labels, edges)


def test_agreement_with_conditional_form():
    rng = random.Random(17)
    checked = 0
    for _ in range(300):
        d = random_exact(rng)
        labels = list(d.names)
        _, o = _random_order(rng, labels)
        for a in labels:
            ref = o.non_future(a)
            if not ref:
                continue
            ref_marg = marginalize(d, list(ref))
            if any(p == 0 for p in ref_marg.values()):
                continue
            checked += 1
            p_a = marginalize(d, [a]).values()
            cond_form = all(
                marginalize(condition(d, dict(zip(ref, r))), [a]).values() == p_a
                for r, _ in ref_marg.items()
            )
            assert is_free(d, o, a).free == cond_form
    assert checked > 100


def test_monotone_under_order_growth():
    rng = random.Random(23)
    for _ in range(300):
        d = random_exact(rng)
        labels = list(d.names)
        edges, o = _random_order(rng, labels)
        extra = [(rng.choice(labels), rng.choice(labels)) for _ in range(rng.randint(1, 3))]
        grown = from_edges(labels, edges + extra)
        for a in labels:
            if is_free(d, o, a).free:
                assert is_free(d, grown, a).free


def test_witness_invariants_random():
    rng = random.Random(29)
    for _ in range(200):
        d = random_exact(rng)
        labels = list(d.names)
        _, o = _random_order(rng, labels)
        for v in audit(d, o):
            assert v.subject not in v.reference_set
            if not v.free:
                w = v.witness
                assert w.deviation > 0
                assert w.deviation == abs(w.lhs - w.rhs)
                assert set(w.reference_assignment) <= set(v.reference_set)

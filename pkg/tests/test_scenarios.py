import itertools
import math
import random
from fractions import Fraction

import pytest

from conftest import table_of
from freechoice.errors import BadResponseMap, FreeChoiceError, LabelMismatch, NotNormalized
from freechoice.freedom import is_free, is_free_past_only
from freechoice.order import bell_order, from_edges
from freechoice.prob import condition, is_independent, marginalize
from freechoice.scenarios import (
    BUILTINS,
    Scenario,
    chsh_sum,
    chsh_value,
    correlated_settings,
    correlator,
    is_no_signalling,
    local_hidden_variable,
    pr_box,
    shared_coin,
    single_measurement,
    singlet,
)
from freechoice.spacetime import bell_layout
import oracles


def _drop_z(d):
    """Full (A, B, X, Y) table from a scenario with trivial Z."""
    return table_of(marginalize(d, ["A", "B", "X", "Y"]))


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtin_invariants(name):
    sc = BUILTINS[name]()
    assert set(sc.order.labels) == set(sc.distribution.names)
    assert sc.distribution.total() == pytest.approx(1, abs=1e-12)
    assert sc.order.is_reflexive() and sc.order.is_transitive()


class TestSingleMeasurement:
    def test_free_choices(self):
        sc = single_measurement()
        d, o = sc.distribution, sc.order
        assert is_free(d, o, "A").free and is_free(d, o, "A").reference_set == ("Z",)
        assert is_free(d, o, "Z").free and is_free(d, o, "Z").reference_set == ("A",)

    def test_outcome_dependence(self):
        d = single_measurement().distribution
        table, names = table_of(d), list(d.names)
        assert oracles.independent(table, names, [2, 2, 2], ["A"], ["X"])
        assert not oracles.independent(table, names, [2, 2, 2], ["A"], ["Z", "X"])
        assert is_independent(d, ["A"], ["X"])
        assert not is_independent(d, ["A"], ["Z", "X"])


class TestCorrelatedSettings:
    def test_criteria_disagree(self):
        sc = correlated_settings()
        d, o = sc.distribution, sc.order
        for a in "AB":
            assert is_free_past_only(d, o, a).free
            assert not is_free(d, o, a).free
        assert is_free(d, o, "A").witness.deviation == Fraction(1, 4)

    def test_settings_independent_of_source(self):
        d = correlated_settings().distribution
        for z in (0, 1):
            c = marginalize(condition(d, {"Z": z}), ["A"])
            assert c.values() == (Fraction(1, 2), Fraction(1, 2))

    def test_outcomes_copy_settings(self):
        d = correlated_settings().distribution
        for outcome, p in d.items():
            z, a, b, x, y = outcome
            if p:
                assert a == b == x and b == y


class TestPRBox:
    def test_table_matches_formula(self):
        assert _drop_z(pr_box().distribution) == oracles.pr_box_table()
        assert table_of(pr_box(False).distribution) == oracles.pr_box_table()

    def test_settings_free(self):
        sc = pr_box()
        assert is_free(sc.distribution, sc.order, "A").free
        assert is_free(sc.distribution, sc.order, "B").free

    def test_no_signalling(self):
        d = pr_box().distribution
        assert is_no_signalling(d)
        table = oracles.pr_box_table()
        for a, x in itertools.product((0, 1), repeat=2):
            per_b = [
                sum(p for (aa, bb, xx, _), p in table.items() if (aa, bb, xx) == (a, b, x))
                / sum(p for (aa, bb, _, _), p in table.items() if (aa, bb) == (a, b))
                for b in (0, 1)
            ]
            assert per_b[0] == per_b[1]

    def test_chsh_four(self):
        d = pr_box().distribution
        assert oracles.chsh_from_table(oracles.pr_box_table()) == 4
        assert chsh_sum(d) == 4
        assert chsh_value(d) == 4
        assert correlator(d, 1, 1) == -1


class TestSinglet:
    def test_chsh_tsirelson(self):
        d = singlet().distribution
        assert d.mode == "approx"
        assert abs(chsh_value(d) - 2 * math.sqrt(2)) <= 1e-6
        # same value from the raw table, minus sign on (0, 1) for these angles
        assert abs(abs(oracles.chsh_from_table(_drop_z(d), sign_at=(0, 1))) - 2 * math.sqrt(2)) <= 1e-6

    def test_correlator_formula(self):
        angles_a, angles_b = (0.3, 1.1), (-0.4, 2.0)
        d = singlet(angles_a, angles_b).distribution
        for a, b in itertools.product((0, 1), repeat=2):
            assert correlator(d, a, b) == pytest.approx(-math.cos(angles_a[a] - angles_b[b]), abs=1e-12)

    def test_settings_free_within_epsilon(self):
        sc = singlet()
        d = sc.distribution
        assert is_free(d, sc.order, "A").free and is_free(d, sc.order, "B").free
        names = list(d.names)
        assert oracles.independent(table_of(d), names, list(d.cardinalities), ["A"], ["Z", "B", "Y"], eps=1e-9)

    def test_equal_angles_anticorrelated(self):
        d = singlet((0.7, 0.2), (0.7, 1.5)).distribution
        same = sum(p for (z, a, b, x, y), p in d.items() if (a, b) == (0, 0) and x == y)
        assert same == pytest.approx(0.0, abs=1e-15)

    def test_no_signalling(self):
        assert is_no_signalling(singlet((0.1, 0.9), (2.2, -1.3)).distribution)


class TestLocalHiddenVariable:
    def test_shared_coin(self):
        sc = shared_coin()
        d, o = sc.distribution, sc.order
        assert len(d) == 32
        assert is_free(d, o, "A").free and is_free(d, o, "B").free
        xy = marginalize(d, ["X", "Y"])
        assert xy[0, 0] == Fraction(1, 2) and xy[1, 1] == Fraction(1, 2)

    def test_constant_responses(self):
        zero = {(s, 0): 0 for s in (0, 1)}
        sc = local_hidden_variable(1, zero, zero, [1])
        d = sc.distribution
        assert marginalize(d, ["X"]).values() == (1, 0)
        assert all(is_free(d, sc.order, a).free for a in sc.labels)

    def test_chsh_classical_bound(self):
        rng = random.Random(41)
        for _ in range(200):
            k = rng.randint(1, 4)
            rx = {(s, lam): rng.randint(0, 1) for s in (0, 1) for lam in range(k)}
            ry = {(s, lam): rng.randint(0, 1) for s in (0, 1) for lam in range(k)}
            w = [rng.randint(1, 5) for _ in range(k)]
            sc = local_hidden_variable(k, rx, ry, [Fraction(x, sum(w)) for x in w])
            d = sc.distribution
            assert chsh_value(d) <= 2 + 1e-9
            assert is_free(d, sc.order, "A").free and is_free(d, sc.order, "B").free
            assert is_no_signalling(d)

    def test_float_weights(self):
        resp = {(s, lam): lam for s in (0, 1) for lam in range(2)}
        sc = local_hidden_variable(2, resp, resp, [0.25, 0.75])
        assert sc.distribution.mode == "approx"

    def test_errors(self):
        resp = {(s, lam): lam for s in (0, 1) for lam in range(2)}
        with pytest.raises(BadResponseMap):
            local_hidden_variable(2, {(0, 0): 0}, resp, [Fraction(1, 2)] * 2)
        with pytest.raises(BadResponseMap):
            local_hidden_variable(2, {**resp, (0, 0): 2}, resp, [Fraction(1, 2)] * 2)
        with pytest.raises(NotNormalized):
            local_hidden_variable(2, resp, resp, [Fraction(1, 2), Fraction(1, 4)])


def test_scenario_rejects_label_mismatch():
    with pytest.raises(LabelMismatch):
        Scenario("bad", bell_order(), pr_box(False).distribution)


def test_scenario_with_embedding():
    sc = Scenario("layout", bell_order(), correlated_settings().distribution, bell_layout())
    assert sc.embedding[0].label == "Z"
    with pytest.raises(FreeChoiceError):
        Scenario("layout", from_edges("ZABXY", []), None, bell_layout())

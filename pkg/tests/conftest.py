import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from freechoice.prob import VariableSpec, make_joint, product

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

NAMES = "ABCD"


def random_exact(rng: random.Random, max_vars=4, max_card=3):
    """Random exact distribution; about half are built as products so independence occurs."""
    n = rng.randint(1, max_vars)
    specs = [VariableSpec(NAMES[i], rng.randint(1, max_card)) for i in range(n)]
    if n >= 2 and rng.random() < 0.5:
        cut = rng.randint(1, n - 1)
        return product(_weights(rng, specs[:cut]), _weights(rng, specs[cut:]))
    return _weights(rng, specs)


def _weights(rng, specs):
    outcomes = list(itertools.product(*(range(v.cardinality) for v in specs)))
    w = [rng.choice([0, 0, 1, 2, 3, 5]) for _ in outcomes]
    if not any(w):
        w[rng.randrange(len(w))] = 1
    total = sum(w)
    return make_joint(specs, {o: Fraction(x, total) for o, x in zip(outcomes, w) if x})


@st.composite
def exact_distributions(draw, max_vars=4, max_card=3):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_exact(random.Random(seed), max_vars, max_card)


@st.composite
def disjoint_pair(draw, names):
    names = list(names)
    s_size = draw(st.integers(1, len(names) - 1))
    perm = draw(st.permutations(names))
    s = perm[:s_size]
    rest = perm[s_size:]
    t = rest[: draw(st.integers(1, len(rest)))]
    return list(s), list(t)


def table_of(d):
    return dict(d.items())


def pytest_terminal_summary(terminalreporter):
    lines = []
    for status in ("passed", "failed"):
        for rep in terminalreporter.stats.get(status, []):
            if rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "acceptance" in props:
                lines.append((props["acceptance"], "PASS" if status == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, verdict in sorted(lines):
            terminalreporter.write_line(f"{verdict}  {name}")


@pytest.fixture
def rng():
    return random.Random(20130218)

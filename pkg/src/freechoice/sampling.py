"""Seeded sampling and G-test independence checks on sampled data.

Random numbers come from SplitMix64 (Steele, Lea & Flood 2014).  Draw
``i`` (0-based) of the stream for a 64-bit ``seed`` is::

    z = (seed + (i + 1) * 0x9E3779B97F4A7C15)   mod 2**64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9     mod 2**64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB     mod 2**64
    z =  z ^ (z >> 31)

and the uniform variate is ``(z >> 11) * 2**-53``.  Because each draw
depends only on ``(seed, i)``, batch ``k`` of size ``m`` is the counter
range ``[k*m, (k+1)*m)``: batches can run in any order or concurrently
and the merged rows are identical to a single sequential run.

An outcome is picked by inverse CDF over the lexicographically ordered
outcome tuples of the distribution.
"""

from __future__ import annotations

import csv
import io
import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy.special import gammaincc

from .errors import (
    DegenerateTable,
    OverlappingSets,
    SampleFileError,
    SpecMismatch,
    UnknownVariable,
)
from .prob import JointDistribution, VariableSpec, make_joint

__all__ = [
    "DEFAULT_ALPHAS",
    "GTestResult",
    "SampleSet",
    "dumps_samples",
    "empirical_distribution",
    "g_statistic",
    "g_test",
    "read_samples",
    "sample",
    "splitmix64",
    "uniforms",
    "write_samples",
]

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
DEFAULT_BATCH = 1 << 16
DEFAULT_ALPHAS = (0.05, 0.01)
MIN_EXPECTED = 5.0


def splitmix64(seed: int, start: int, count: int) -> np.ndarray:
    """Raw 64-bit outputs for counters ``start .. start + count - 1``."""
    _check_seed(seed)
    ctr = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed) + ctr * np.uint64(GOLDEN_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Doubles in [0, 1) with 53 random bits each."""
    z = splitmix64(seed, start, count)
    return (z >> np.uint64(11)).astype(np.float64) * (2.0**-53)


def _check_seed(seed: int) -> None:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")


@dataclass(frozen=True, eq=False)
class SampleSet:
    """``n`` sampled outcome rows; ``rows`` is a read-only ``(n, k)`` int array."""

    variables: tuple[str, ...]
    rows: np.ndarray
    seed: int
    n: int = field(init=False)

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.int64, copy=True)
        if rows.ndim != 2 or rows.shape[1] != len(self.variables):
            rows = rows.reshape(-1, len(self.variables))
        rows.setflags(write=False)
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "n", rows.shape[0])

    def __eq__(self, other):
        if not isinstance(other, SampleSet):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.seed == other.seed
            and np.array_equal(self.rows, other.rows)
        )

    def __len__(self):
        return self.n

    def column(self, name: str) -> np.ndarray:
        try:
            return self.rows[:, self.variables.index(name)]
        except ValueError:
            raise UnknownVariable(f"unknown variable {name!r}") from None


def _cdf(d: JointDistribution) -> np.ndarray:
    if d.exact:
        # Accumulate exactly, round once per entry.
        cum = itertools.accumulate(d.values(), initial=Fraction(0))
        next(cum)
        return np.array([float(c) for c in cum])
    return np.cumsum(np.array(d.values(), dtype=np.float64))


def sample(
    d: JointDistribution,
    n: int,
    seed: int,
    batch_size: int = DEFAULT_BATCH,
    workers: int = 1,
) -> SampleSet:
    """Draw ``n`` i.i.d. outcome rows from ``d``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    _check_seed(seed)
    cdf = _cdf(d)
    support = np.flatnonzero(np.array([p != 0 for p in d.values()]))
    last = int(support[-1])
    outcomes = np.array(list(d.outcomes()), dtype=np.int64).reshape(len(d), len(d.variables))

    def batch(k: int) -> np.ndarray:
        start = k * batch_size
        u = uniforms(seed, start, min(batch_size, n - start))
        idx = np.searchsorted(cdf, u, side="right")
        # u can land above a total that rounds just below 1.
        return np.minimum(idx, last)

    nbatch = -(-n // batch_size)
    if workers > 1 and nbatch > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(batch, range(nbatch)))
    else:
        parts = [batch(k) for k in range(nbatch)]
    return SampleSet(d.names, outcomes[np.concatenate(parts)], seed)


def empirical_distribution(s: SampleSet, specs: Sequence[VariableSpec]) -> JointDistribution:
    """Relative frequencies as an approximate distribution."""
    specs = tuple(specs)
    if tuple(v.name for v in specs) != s.variables:
        raise SpecMismatch(f"specs {[v.name for v in specs]} do not match sample variables {list(s.variables)}")
    cards = np.array([v.cardinality for v in specs])
    if s.n and ((s.rows < 0).any() or (s.rows >= cards).any()):
        raise SpecMismatch("sample rows fall outside the declared alphabets")
    flat = (s.rows * _strides(cards)).sum(axis=1) if len(cards) else np.zeros(s.n, dtype=np.int64)
    counts = np.bincount(flat, minlength=int(np.prod(cards)))
    keys = itertools.product(*(range(v.cardinality) for v in specs))
    entries = {k: c / s.n for k, c in zip(keys, counts.tolist()) if c}
    return make_joint(specs, entries, mode="approx")


def _strides(cards: np.ndarray) -> np.ndarray:
    out = np.ones(len(cards), dtype=np.int64)
    for i in range(len(cards) - 2, -1, -1):
        out[i] = out[i + 1] * cards[i + 1]
    return out


# -- G-test ----------------------------------------------------------------


@dataclass(frozen=True)
class GTestResult:
    statistic: float
    degrees_of_freedom: int
    p_value: float
    reject_at: dict[float, bool]
    warnings: tuple[str, ...] = ()
    table: np.ndarray | None = field(default=None, compare=False, repr=False)


def g_statistic(table) -> tuple[float, int, np.ndarray]:
    """``G = 2 sum O ln(O / E)`` for a two-way table; returns ``(G, df, expected)``."""
    obs = np.asarray(table, dtype=np.float64)
    if obs.ndim != 2 or min(obs.shape) < 2:
        raise DegenerateTable(f"need at least a 2x2 table, got shape {obs.shape}")
    n = obs.sum()
    expected = np.outer(obs.sum(axis=1), obs.sum(axis=0)) / n
    mask = obs > 0
    g = 2.0 * float(np.sum(obs[mask] * np.log(obs[mask] / expected[mask])))
    df = (obs.shape[0] - 1) * (obs.shape[1] - 1)
    return max(g, 0.0), df, expected


def _codes(s: SampleSet, names: list[str]) -> tuple[np.ndarray, int]:
    cols = s.rows[:, [s.variables.index(n) for n in names]]
    if cols.size == 0:
        return np.zeros(0, dtype=np.int64), 0
    # Mixed-radix code per row; np.unique on 1-D is much faster than axis=0.
    cols = cols - cols.min(axis=0)
    flat = (cols * _strides(cols.max(axis=0) + 1)).sum(axis=1)
    _, inverse = np.unique(flat, return_inverse=True)
    return inverse, int(inverse.max()) + 1


def g_test(
    s: SampleSet,
    lhs: Iterable[str],
    rhs: Iterable[str],
    alphas: Sequence[float] = DEFAULT_ALPHAS,
) -> GTestResult:
    """Likelihood-ratio test of independence between the joints of ``lhs`` and ``rhs``.

    Categories are the value combinations actually observed on each side;
    a side with only one observed category cannot be tested.
    """
    lhs, rhs = list(dict.fromkeys(lhs)), list(dict.fromkeys(rhs))
    if not lhs or not rhs:
        raise ValueError("both sides of the test need at least one variable")
    for name in lhs + rhs:
        if name not in s.variables:
            raise UnknownVariable(f"unknown variable {name!r}")
    overlap = set(lhs) & set(rhs)
    if overlap:
        raise OverlappingSets(f"sets overlap on {sorted(overlap)}")
    li, nl = _codes(s, lhs)
    ri, nr = _codes(s, rhs)
    if nl < 2 or nr < 2:
        side = ",".join(lhs if nl < 2 else rhs)
        raise DegenerateTable(f"only one observed category for {side}")
    table = np.bincount(li * nr + ri, minlength=nl * nr).reshape(nl, nr)
    g, df, expected = g_statistic(table)
    p = float(gammaincc(df / 2.0, g / 2.0))
    warnings = []
    low = int((expected < MIN_EXPECTED).sum())
    if low:
        warnings.append(
            f"{low} of {expected.size} cells have expected count below {MIN_EXPECTED:g}; "
            "the chi-squared approximation may be poor"
        )
    reject = {float(a): p < a for a in alphas}
    return GTestResult(g, df, p, reject, tuple(warnings), table)


# -- file format -------------------------------------------------------------


def _dump(s: SampleSet, fh: TextIO) -> None:
    fh.write(f"# seed={s.seed} n={s.n}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(s.variables)
    w.writerows(s.rows.tolist())


def write_samples(s: SampleSet, path: str | os.PathLike | TextIO) -> None:
    """Comment line with seed and n, a header of names, then one CSV row per sample."""
    if hasattr(path, "write"):
        _dump(s, path)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _dump(s, fh)


def dumps_samples(s: SampleSet) -> str:
    buf = io.StringIO()
    _dump(s, buf)
    return buf.getvalue()


def read_samples(path: str | os.PathLike | TextIO) -> SampleSet:
    if hasattr(path, "read"):
        text = path.read()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    lines = text.splitlines()
    meta: dict[str, str] = {}
    body = []
    for line in lines:
        if line.startswith("#"):
            for tok in line[1:].split():
                key, sep, value = tok.partition("=")
                if sep:
                    meta[key] = value
        elif line.strip():
            body.append(line)
    if not body:
        raise SampleFileError("sample file has no header row")
    reader = csv.reader(body)
    header = [h.strip() for h in next(reader)]
    try:
        rows = [[int(x) for x in row] for row in reader]
    except ValueError as exc:
        raise SampleFileError(f"non-integer outcome in sample file: {exc}") from None
    if any(len(r) != len(header) for r in rows):
        raise SampleFileError("row length does not match header")
    try:
        seed = int(meta.get("seed", 0))
        n = int(meta.get("n", len(rows)))
    except ValueError:
        raise SampleFileError("malformed seed/n comment line") from None
    if n != len(rows):
        raise SampleFileError(f"comment says n={n} but file has {len(rows)} rows")
    return SampleSet(tuple(header), np.array(rows, dtype=np.int64).reshape(len(rows), len(header)), seed)

"""Plug-in entropy estimation from samples and memoized entropy oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .discrete import JointTable, VarSet, _marginal_array, as_subset, entropy_of, from_mask, to_mask
from .errors import InvalidBudget, InvalidSamples


@dataclass(frozen=True, eq=False)
class SampleSet:
    """``rows[i, v]`` is the category of variable ``v`` in sample ``i``."""

    vars: VarSet
    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.int64)
        if rows.ndim == 1 and self.vars.n == 1:
            rows = rows.reshape(-1, 1)
        if rows.ndim != 2 or rows.shape[1] != self.vars.n:
            raise InvalidSamples(f"rows must have shape (m, {self.vars.n}), got {rows.shape}")
        if rows.shape[0] < 1:
            raise InvalidSamples("a SampleSet needs at least one row")
        if np.any(rows < 0) or np.any(rows >= np.asarray(self.vars.cards)):
            raise InvalidSamples("category index outside its variable's cardinality")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.vars.n

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def cards(self) -> tuple[int, ...]:
        return self.vars.cards


@dataclass(frozen=True)
class EstimatorBudget:
    eps1: float
    delta1: float
    m: int

    def __post_init__(self):
        if not (self.eps1 > 0 and 0 < self.delta1 < 1 and self.m >= 1):
            raise InvalidBudget(f"invalid budget {self}")

    @classmethod
    def for_problem(cls, n: int, max_card: int, eps1: float, delta1: float) -> "EstimatorBudget":
        return cls(eps1, delta1, required_samples(n, max_card, eps1, delta1))


def required_samples(n: int, max_card: int, eps1: float, delta1: float, m0: float = 1.0) -> int:
    """Sample count for (eps1, delta1)-accurate entropy queries.

    Hoeffding form with range ``n * log2(max_card * m0)`` bits, the largest
    joint entropy when ``m0 == 1``::

        m = ceil(2 * n**2 * log2(max_card * m0)**2 / eps1**2 * ln(2 / delta1))
    """
    if not (eps1 > 0 and 0 < delta1 < 1):
        raise InvalidBudget(f"need eps1 > 0 and 0 < delta1 < 1, got eps1={eps1}, delta1={delta1}")
    if n < 1 or max_card < 2 or m0 < 1:
        raise InvalidBudget(f"need n >= 1, max_card >= 2, m0 >= 1, got {n}, {max_card}, {m0}")
    span = math.log2(max_card * m0)
    return max(1, math.ceil(2.0 * n * n * span * span / (eps1 * eps1) * math.log(2.0 / delta1)))


def _codes(s: SampleSet, A: tuple[int, ...]) -> np.ndarray:
    code = np.zeros(s.m, dtype=np.int64)
    for v in A:
        code = code * s.cards[v] + s.rows[:, v]
    return code


def empirical_table(s: SampleSet) -> JointTable:
    counts = np.bincount(_codes(s, tuple(range(s.n))), minlength=s.vars.size)
    return JointTable(s.vars, counts / s.m)


def estimate_entropy(s: SampleSet, A: Iterable[int]) -> float:
    """Plug-in entropy (bits) of the empirical marginal on ``A``."""
    A = as_subset(A, s.n)
    if not A:
        return 0.0
    _, counts = np.unique(_codes(s, A), return_counts=True)
    return entropy_of(counts / s.m)


Source = Union[JointTable, SampleSet]


class EntropyOracle:
    """Memoized subset -> entropy (bits) map over a table or a sample set.

    Answers are cached per subset, so repeated queries are bit-identical.
    ``queries`` counts every call, ``evaluations`` only cache misses.
    """

    def __init__(self, source: Source):
        if not isinstance(source, (JointTable, SampleSet)):
            raise TypeError(f"unsupported entropy source {type(source).__name__}")
        self.source = source
        self.n = source.n
        self.exact = isinstance(source, JointTable)
        self._cache: dict[int, float] = {0: 0.0}
        self.queries = 0
        self.evaluations = 0

    def __call__(self, subset: Iterable[int]) -> float:
        return self.of_mask(to_mask(as_subset(subset, self.n)))

    def of_mask(self, mask: int) -> float:
        self.queries += 1
        try:
            return self._cache[mask]
        except KeyError:
            pass
        A = from_mask(mask)
        if A and A[-1] >= self.n:
            raise ValueError(f"mask {mask:#x} has ids beyond {self.n} variables")
        self.evaluations += 1
        if self.exact:
            value = entropy_of(_marginal_array(self.source.array, A))
        else:
            value = estimate_entropy(self.source, A)
        self._cache[mask] = value
        return value


def entropy_oracle(source: Source) -> EntropyOracle:
    return EntropyOracle(source)

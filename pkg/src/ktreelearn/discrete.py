"""Dense joint probability tables over discrete variables and their information measures.

All logarithms are base 2, so entropies and divergences are in bits. Cells are
stored flat in row-major order (last variable varies fastest).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    InvalidSubset,
    NegativeProbability,
    NotNormalized,
    OverlappingSets,
    ShapeMismatch,
    SizeMismatch,
    TableTooLarge,
)

MAX_CELLS = 2**24
NORMALIZATION_TOL = 1e-9
CMI_GUARD = 1e-9


@dataclass(frozen=True)
class VarSet:
    """Variables 0..n-1 with their cardinalities."""

    cards: tuple[int, ...]

    def __post_init__(self):
        cards = tuple(int(c) for c in self.cards)
        if len(cards) < 1:
            raise SizeMismatch("a VarSet needs at least one variable")
        if any(c < 2 for c in cards):
            raise SizeMismatch(f"every cardinality must be >= 2, got {cards}")
        object.__setattr__(self, "cards", cards)

    @property
    def n(self) -> int:
        return len(self.cards)

    @property
    def size(self) -> int:
        return int(np.prod(self.cards, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class JointTable:
    """Explicit joint distribution: ``probs`` is flat, row-major over ``vars.cards``.

    Construction only checks that the table is not absurdly large; use
    :func:`validate` (or :meth:`from_flat`) to enforce the probability axioms.
    """

    vars: VarSet
    probs: np.ndarray

    def __post_init__(self):
        if self.vars.size > MAX_CELLS:
            raise TableTooLarge(f"{self.vars.size} cells exceeds the cap of {MAX_CELLS}")
        probs = np.array(self.probs, dtype=float).reshape(-1)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_flat(cls, cards: Sequence[int], probs) -> "JointTable":
        t = cls(VarSet(tuple(cards)), np.asarray(probs, dtype=float))
        validate(t)
        return t

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "JointTable":
        arr = np.asarray(arr, dtype=float)
        return cls.from_flat(arr.shape, arr.reshape(-1))

    @property
    def n(self) -> int:
        return self.vars.n

    @property
    def cards(self) -> tuple[int, ...]:
        return self.vars.cards

    @property
    def array(self) -> np.ndarray:
        """The table viewed with one axis per variable."""
        return self.probs.reshape(self.cards)

    def __eq__(self, other):
        if not isinstance(other, JointTable):
            return NotImplemented
        return self.cards == other.cards and np.array_equal(self.probs, other.probs)

    __hash__ = None


def validate(t: JointTable) -> None:
    """Raise if ``t`` is not a proper probability table."""
    if t.probs.size != t.vars.size:
        raise SizeMismatch(f"table has {t.probs.size} entries, cardinalities imply {t.vars.size}")
    if not np.all(np.isfinite(t.probs)):
        raise NotNormalized("table contains non-finite entries")
    if np.any(t.probs < 0):
        raise NegativeProbability(f"negative entry {t.probs.min()!r}")
    total = float(t.probs.sum())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"entries sum to {total!r}")


def as_subset(ids: Iterable[int], n: int) -> tuple[int, ...]:
    """Normalize ``ids`` to a strictly increasing tuple of variable ids below ``n``."""
    out = tuple(sorted(int(i) for i in ids))
    if len(set(out)) != len(out):
        raise InvalidSubset(f"repeated variable id in {out}")
    if out and (out[0] < 0 or out[-1] >= n):
        raise InvalidSubset(f"ids {out} out of range for {n} variables")
    return out


def to_mask(ids: Iterable[int]) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


def from_mask(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _marginal_array(arr: np.ndarray, keep: tuple[int, ...]) -> np.ndarray:
    drop = tuple(ax for ax in range(arr.ndim) if ax not in keep)
    return arr.sum(axis=drop) if drop else arr


def marginalize(t: JointTable, A: Iterable[int]) -> JointTable:
    """Marginal table over ``A``; its variables are A's ids in increasing order."""
    A = as_subset(A, t.n)
    if not A:
        raise InvalidSubset("cannot marginalize onto the empty set")
    arr = _marginal_array(t.array, A)
    return JointTable(VarSet(tuple(t.cards[i] for i in A)), arr.reshape(-1))


def entropy_of(p: np.ndarray) -> float:
    """Shannon entropy in bits of a nonnegative array that sums to one."""
    p = np.asarray(p, dtype=float).reshape(-1)
    p = p[p > 0]
    return float(max(0.0, -np.dot(p, np.log2(p))))


def entropy(t: JointTable, A: Iterable[int]) -> float:
    A = as_subset(A, t.n)
    if not A:
        return 0.0
    return entropy_of(_marginal_array(t.array, A))


def cond_mutual_info(t: JointTable, A: Iterable[int], B: Iterable[int], S: Iterable[int] = ()) -> float:
    """I(A; B | S) in bits. The three sets must be pairwise disjoint."""
    A, B, S = as_subset(A, t.n), as_subset(B, t.n), as_subset(S, t.n)
    sa, sb, ss = set(A), set(B), set(S)
    if sa & sb or sa & ss or sb & ss:
        raise OverlappingSets(f"A={A}, B={B}, S={S} must be pairwise disjoint")
    value = (
        entropy(t, sa | ss)
        + entropy(t, sb | ss)
        - entropy(t, sa | sb | ss)
        - entropy(t, ss)
    )
    return max(0.0, value)


def kl_divergence(p: JointTable, q: JointTable) -> float:
    """D(p || q) in bits; ``inf`` when p puts mass where q has none."""
    if p.cards != q.cards:
        raise ShapeMismatch(f"cardinalities differ: {p.cards} vs {q.cards}")
    support = p.probs > 0
    if np.any(q.probs[support] <= 0):
        return float("inf")
    pp, qq = p.probs[support], q.probs[support]
    return float(max(0.0, np.dot(pp, np.log2(pp) - np.log2(qq))))

"""Minimization of symmetric submodular set functions (Queyranne's algorithm).

Set functions are accessed only through a value oracle. Elements are integer
ids; subsets are passed to the oracle as frozensets.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Optional, Sequence

from .discrete import to_mask
from .errors import GroundTooLarge, GroundTooSmall, InvalidSubset
from .estimation import EntropyOracle


class SetFunctionOracle:
    """Value oracle for ``fn`` over ``ground``, counting every call."""

    def __init__(self, ground: Iterable[int], fn: Callable[[frozenset], float]):
        self.ground = tuple(sorted(ground))
        self.fn = fn
        self.calls = 0

    def __call__(self, subset: Iterable[int]) -> float:
        self.calls += 1
        return float(self.fn(frozenset(subset)))


@dataclass(frozen=True)
class PendantPair:
    t: int
    u: int


@dataclass(frozen=True)
class MinCutResult:
    set: tuple[int, ...]
    value: float


def _pendant_order(f: SetFunctionOracle, items: Sequence[frozenset]) -> tuple[int, int, float]:
    """Maximum-adjacency style ordering over ``items`` (each a super-element).

    Returns indices of the last two items picked and f of the last one.
    Ties go to the earliest item, which callers keep sorted by smallest id.
    """
    m = len(items)
    single = [None] * m
    remaining = list(range(1, m))
    W = items[0]
    prev = last = 0
    for _ in range(m - 1):
        best_key = best_i = None
        for i in remaining:
            if single[i] is None:
                single[i] = f(items[i])
            key = f(W | items[i]) - single[i]
            if best_key is None or key < best_key:
                best_key, best_i = key, i
        remaining.remove(best_i)
        W = W | items[best_i]
        prev, last = last, best_i
    return prev, last, single[last]


def _check_ground(f: SetFunctionOracle, ground) -> tuple[int, ...]:
    ground = f.ground if ground is None else tuple(sorted(ground))
    if len(ground) < 2:
        raise GroundTooSmall(f"need at least two elements, got {ground}")
    return ground


def pendant_pair(f: SetFunctionOracle, ground: Optional[Iterable[int]] = None) -> PendantPair:
    """Pendant pair (t, u): for symmetric submodular f, f({u}) <= f(U) whenever u in U, t not in U."""
    ground = _check_ground(f, ground)
    t, u, _ = _pendant_order(f, [frozenset([g]) for g in ground])
    return PendantPair(ground[t], ground[u])


def queyranne_minimize(f: SetFunctionOracle, ground: Optional[Iterable[int]] = None) -> MinCutResult:
    """Nonempty proper subset minimizing a symmetric submodular ``f``.

    Each round finds a pendant pair (t, u) over the current super-elements,
    records u's members as a candidate, then merges u into t. Uses fewer than
    ``len(ground)**3`` oracle calls.
    """
    ground = _check_ground(f, ground)
    items = [frozenset([g]) for g in ground]
    best: Optional[MinCutResult] = None
    while len(items) >= 2:
        t, u, value = _pendant_order(f, items)
        if best is None or value < best.value:
            best = MinCutResult(tuple(sorted(items[u])), value)
        merged = items[t] | items[u]
        items = [x for i, x in enumerate(items) if i not in (t, u)] + [merged]
        items.sort(key=min)
    return best


def brute_force_minimize(
    f: SetFunctionOracle, ground: Optional[Iterable[int]] = None, symmetric: bool = True
) -> MinCutResult:
    """Exhaustive minimum over nonempty proper subsets.

    With ``symmetric`` only subsets holding the first element are scanned.
    Ties prefer the smaller subset, then the lexicographically smaller one.
    """
    ground = _check_ground(f, ground)
    if len(ground) > 20:
        raise GroundTooLarge(f"{len(ground)} elements is too many to enumerate")
    first, rest = ground[0], ground[1:]
    best = None
    for r in range(len(ground)):
        for combo in combinations(rest, r):
            cands = [(first,) + combo]
            if not symmetric and r >= 1:
                cands.append(combo)
            for cand in cands:
                if len(cand) == len(ground):
                    continue
                key = (f(cand), len(cand), cand)
                if best is None or key < best:
                    best = key
    return MinCutResult(best[2], best[0])


def info_cut_oracle(H: EntropyOracle, V: Iterable[int], S: Iterable[int]) -> SetFunctionOracle:
    """F(A) = I(A; G \\ A | S) over the ground G = V \\ S, from entropy queries.

    F(A) and F(G \\ A) run through the same arithmetic, so the oracle is
    exactly symmetric in floating point.
    """
    V, S = set(V), set(S)
    if not S <= V:
        raise InvalidSubset(f"S={sorted(S)} is not inside V={sorted(V)}")
    ground = V - S
    if len(ground) < 2:
        raise InvalidSubset(f"need |V \\ S| >= 2, got {sorted(ground)}")
    if max(V) >= H.n or min(V) < 0:
        raise InvalidSubset(f"V={sorted(V)} out of range for {H.n} variables")
    s_mask = to_mask(S)
    g_mask = to_mask(ground)
    h_s = H.of_mask(s_mask)
    h_all = H.of_mask(g_mask | s_mask)

    def fn(A: frozenset) -> float:
        a = to_mask(A)
        if a & ~g_mask:
            raise InvalidSubset(f"{sorted(A)} is not inside the ground {sorted(ground)}")
        return (H.of_mask(a | s_mask) + H.of_mask((g_mask & ~a) | s_mask)) - h_all - h_s

    return SetFunctionOracle(ground, fn)

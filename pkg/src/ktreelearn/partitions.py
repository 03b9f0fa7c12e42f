"""Approximate conditional-independence partitions and the separator family."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .discrete import JointTable, cond_mutual_info
from .errors import EmptyResidual, GroundMismatch, InvalidSubset
from .estimation import EntropyOracle
from .submodular import info_cut_oracle, queyranne_minimize


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty blocks, each sorted, ordered by smallest element."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[:1]))
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise ValueError("partition blocks must be nonempty")
            if seen & set(b):
                raise ValueError(f"blocks overlap: {blocks}")
            seen |= set(b)
        object.__setattr__(self, "blocks", blocks)

    @property
    def ground(self) -> frozenset:
        return frozenset(v for b in self.blocks for v in b)

    def block_of(self, v: int) -> tuple[int, ...]:
        for b in self.blocks:
            if v in b:
                return b
        raise KeyError(v)

    def __len__(self):
        return len(self.blocks)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.blocks)

    def __str__(self):
        return "|".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)


@dataclass(frozen=True)
class SeparatorEntry:
    S: tuple[int, ...]
    pi: Partition
    threshold: float


@dataclass
class PartitionFamily:
    """One partition of V \\ S for every separator S with |S| <= k."""

    n: int
    k: int
    entries: dict[tuple[int, ...], SeparatorEntry]
    oracle_calls: int = field(default=0, compare=False)

    def __getitem__(self, S: Iterable[int]) -> Partition:
        return self.entries[tuple(sorted(S))].pi

    def __contains__(self, S) -> bool:
        return tuple(sorted(S)) in self.entries

    def separators(self) -> list[tuple[int, ...]]:
        return sorted(self.entries, key=lambda S: (len(S), S))

    def dump(self) -> str:
        lines = []
        for S in sorted(self.entries):
            lines.append("S: {" + ",".join(map(str, S)) + "} | blocks: " + str(self.entries[S].pi))
        return "\n".join(lines) + "\n"


class _CallCount:
    def __init__(self):
        self.calls = 0


def epsilon_partition(
    H: EntropyOracle, V: Iterable[int], S: Iterable[int], eps: float, _count: _CallCount | None = None
) -> Partition:
    """Split V \\ S while some block has a bipartition with conditional MI <= eps.

    Blocks are scanned by smallest element; the first splittable one is split
    along the cut Queyranne's algorithm returns for I(X1; X2 | S).
    """
    V, S = sorted(set(V)), tuple(sorted(set(S)))
    if not set(S) <= set(V):
        raise InvalidSubset(f"S={S} is not inside V")
    rest = tuple(v for v in V if v not in S)
    if not rest:
        raise EmptyResidual(f"V \\ S is empty for S={S}")
    blocks = [rest]
    settled: set[tuple[int, ...]] = set()
    while True:
        for X in blocks:
            if len(X) < 2 or X in settled:
                continue
            f = info_cut_oracle(H, X + S, S)
            cut = queyranne_minimize(f)
            if _count is not None:
                _count.calls += f.calls
            if cut.value <= eps:
                other = tuple(v for v in X if v not in cut.set)
                blocks.remove(X)
                blocks.extend([cut.set, other])
                blocks.sort(key=lambda b: b[0])
                break
            settled.add(X)
        else:
            return Partition(tuple(blocks))


def family_threshold(n: int, eps1: float, eps2: float) -> float:
    return eps2 + (n + 2) * eps1


def build_family(H: EntropyOracle, V: Iterable[int], k: int, eps1: float, eps2: float) -> PartitionFamily:
    """Partitions pi_S at threshold eps2 + (|V| + 2) eps1 for every |S| <= k (S empty included)."""
    V = tuple(sorted(set(V)))
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if eps1 < 0 or eps2 < 0:
        raise ValueError("eps1 and eps2 must be nonnegative")
    thr = family_threshold(len(V), eps1, eps2)
    count = _CallCount()
    entries = {}
    for size in range(0, min(k, len(V) - 1) + 1):
        for S in combinations(V, size):
            entries[S] = SeparatorEntry(S, epsilon_partition(H, V, S, thr, count), thr)
    return PartitionFamily(len(V), k, entries, count.calls)


def refines(fine: Partition, coarse: Partition) -> bool:
    """True iff every block of ``fine`` lies inside a single block of ``coarse``."""
    if fine.ground != coarse.ground:
        raise GroundMismatch("partitions cover different ground sets")
    owner = {v: i for i, b in enumerate(coarse.blocks) for v in b}
    return all(len({owner[v] for v in b}) == 1 for b in fine.blocks)


def max_pairwise_cmi(P: JointTable, pi: Partition, S: Sequence[int]) -> float:
    best = 0.0
    for a, b in combinations(pi.blocks, 2):
        best = max(best, cond_mutual_info(P, a, b, S))
    return best

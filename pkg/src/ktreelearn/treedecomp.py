"""Tree-decompositions, chordal graphs, and the compatible-decomposition search."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .discrete import from_mask, to_mask
from .errors import (
    CoverageGap,
    InvalidTD,
    NoDecomposition,
    NotATree,
    RunningIntersectionViolation,
    SeparatorTooLarge,
)
from .partitions import PartitionFamily


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(tuple(sorted(set(b))) for b in self.bags))
        object.__setattr__(self, "edges", tuple((int(i), int(j)) for i, j in self.edges))

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags) - 1

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted({v for b in self.bags for v in b}))

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.bags]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj


@dataclass(frozen=True)
class EdgeSeparator:
    edge: tuple[int, int]
    sep: tuple[int, ...]
    sideA: tuple[int, ...]
    sideB: tuple[int, ...]


def _check_tree(td: TreeDecomposition) -> None:
    nb = len(td.bags)
    if nb == 0:
        raise NotATree("a decomposition needs at least one bag")
    for i, j in td.edges:
        if not (0 <= i < nb and 0 <= j < nb) or i == j:
            raise NotATree(f"bad edge ({i}, {j}) for {nb} bags")
    if len(td.edges) != nb - 1:
        raise NotATree(f"{nb} bags need {nb - 1} edges, got {len(td.edges)}")
    adj = td.neighbors()
    seen = {0}
    stack = [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != nb:
        raise NotATree("bag tree is disconnected")


def validate_td(td: TreeDecomposition, V: Iterable[int]) -> None:
    """Raise unless ``td`` is a tree-decomposition of the vertex set ``V``."""
    _check_tree(td)
    V = set(V)
    covered = set(td.vertices)
    if V - covered:
        raise CoverageGap(f"vertices {sorted(V - covered)} are in no bag")
    if covered - V:
        raise CoverageGap(f"bags mention unknown vertices {sorted(covered - V)}")
    adj = td.neighbors()
    for v in sorted(V):
        holding = {i for i, b in enumerate(td.bags) if v in b}
        start = min(holding)
        seen = {start}
        stack = [start]
        while stack:
            for j in adj[stack.pop()]:
                if j in holding and j not in seen:
                    seen.add(j)
                    stack.append(j)
        if seen != holding:
            raise RunningIntersectionViolation(f"bags holding vertex {v} are not connected in the tree")


def edge_separators(td: TreeDecomposition) -> list[EdgeSeparator]:
    """For every tree edge: the bag intersection and the vertices on either side of it."""
    try:
        validate_td(td, td.vertices)
    except InvalidTD as exc:
        raise InvalidTD(str(exc)) from exc
    adj = td.neighbors()
    out = []
    for i, j in td.edges:
        sides = []
        for start, blocked in ((i, j), (j, i)):
            seen = {start}
            stack = [start]
            while stack:
                for x in adj[stack.pop()]:
                    if x != blocked and x not in seen:
                        seen.add(x)
                        stack.append(x)
            sides.append({v for b in seen for v in td.bags[b]})
        sep = set(td.bags[i]) & set(td.bags[j])
        out.append(
            EdgeSeparator((i, j), tuple(sorted(sep)), tuple(sorted(sides[0] - sep)), tuple(sorted(sides[1] - sep)))
        )
    return out


def perfect_elimination_order(n: int, adj: dict[int, set[int]]) -> Optional[list[int]]:
    """Maximum cardinality search; returns a PEO if the graph is chordal, else None."""
    weight = {v: 0 for v in range(n)}
    unnumbered = set(range(n))
    visit = []
    while unnumbered:
        v = max(sorted(unnumbered), key=lambda x: weight[x])
        unnumbered.remove(v)
        visit.append(v)
        for u in adj[v]:
            if u in unnumbered:
                weight[u] += 1
    order = visit[::-1]
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        later = [u for u in adj[v] if pos[u] > pos[v]]
        if later:
            first = min(later, key=pos.__getitem__)
            if any(u != first and u not in adj[first] for u in later):
                return None
    return order


@dataclass(frozen=True)
class ChordalGraph:
    n: int
    edges: frozenset

    def __post_init__(self):
        edges = frozenset(frozenset(e) for e in self.edges)
        if any(len(e) != 2 for e in edges):
            raise ValueError("edges must join two distinct vertices")
        object.__setattr__(self, "edges", edges)
        if perfect_elimination_order(self.n, self.adjacency()) is None:
            raise ValueError("graph is not chordal")

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in range(self.n)}
        for e in self.edges:
            a, b = tuple(e)
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def components_without(self, removed: Iterable[int]) -> list[tuple[int, ...]]:
        """Connected components of the graph after deleting ``removed``."""
        removed = set(removed)
        adj = self.adjacency()
        seen: set[int] = set()
        comps = []
        for s in range(self.n):
            if s in removed or s in seen:
                continue
            comp = {s}
            queue = deque([s])
            while queue:
                for u in adj[queue.popleft()]:
                    if u not in removed and u not in comp:
                        comp.add(u)
                        queue.append(u)
            seen |= comp
            comps.append(tuple(sorted(comp)))
        return comps


def td_to_chordal(td: TreeDecomposition, n: Optional[int] = None) -> ChordalGraph:
    """Graph whose edges join every pair of vertices sharing a bag."""
    validate_td(td, td.vertices)
    n = (max(td.vertices) + 1) if n is None else n
    edges = {frozenset((a, b)) for bag in td.bags for x, a in enumerate(bag) for b in bag[x + 1 :]}
    return ChordalGraph(n, frozenset(edges))


def compatible(td: TreeDecomposition, fam: PartitionFamily) -> bool:
    """True iff each edge's family partition refines the split that edge induces."""
    for es in edge_separators(td):
        if len(es.sep) > fam.k or es.sep not in fam.entries:
            raise SeparatorTooLarge(f"separator {es.sep} has no family entry (k={fam.k})")
        side = set(es.sideA)
        for block in fam[es.sep].blocks:
            inside = {v in side for v in block}
            if len(inside) > 1:
                return False
    return True


@dataclass
class DPState:
    """A pair (S, A) with A a block of pi_S; ``children`` are the covering sub-states."""

    S: tuple[int, ...]
    A: tuple[int, ...]
    realizable: bool = False
    v: Optional[int] = None
    children: list[tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.S) + len(self.A)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _exact_cover(target: int, cands: list[tuple[int, int]]) -> Optional[list[tuple[int, int]]]:
    """Choose candidate states whose B-masks partition ``target`` exactly."""
    memo: dict[int, Optional[list]] = {}

    def go(rest: int):
        if rest == 0:
            return []
        if rest in memo:
            return memo[rest]
        low = rest & -rest
        found = None
        for L, B in cands:
            if B & low and not (B & ~rest):
                tail = go(rest & ~B)
                if tail is not None:
                    found = [(L, B)] + tail
                    break
        memo[rest] = found
        return found

    return go(target)


def run_dp(fam: PartitionFamily, k: Optional[int] = None) -> tuple[dict, Optional[tuple[int, ...]]]:
    """Dynamic program over (S, A) states in increasing |S u A|.

    State (S, A) is realizable when some v in S u A gives a bag S + {v} and the
    rest of A is exactly partitioned by blocks B of realizable smaller states
    (L, B) with L inside the bag. States of size <= k + 1 are realizable as a
    single bag. Stops as soon as some S has every block realizable and returns
    that S (or None after all states are processed).
    """
    k = fam.k if k is None else k
    if k > fam.k:
        raise ValueError(f"family was built for k={fam.k}, cannot search width {k}")
    seps = [S for S in fam.separators() if len(S) <= k]
    states: dict[tuple[int, int], DPState] = {}
    pending: dict[int, int] = {}
    for S in seps:
        Sm = to_mask(S)
        pending[Sm] = len(fam[S].blocks)
        for A in fam[S].blocks:
            states[(Sm, to_mask(A))] = DPState(S, A)
    order = sorted(states, key=lambda st: (states[st].size, -len(states[st].S), states[st].S, states[st].A))
    done: list[tuple[int, int]] = []

    def mark(st, v=None, children=()):
        ds = states[st]
        ds.realizable, ds.v = True, v
        ds.children = [(from_mask(L), from_mask(B)) for L, B in children]
        done.append(st)
        pending[st[0]] -= 1

    for st in order:
        if states[st].size <= k + 1:
            mark(st)
    for S in seps:
        if pending[to_mask(S)] == 0:
            return states, S

    for st in order:
        if states[st].realizable:
            continue
        Sm, Am = st
        for v in from_mask(Sm | Am):
            bag = Sm | (1 << v)
            rest = Am & ~(1 << v)
            cands = [c for c in done if c != st and not (c[0] & ~bag) and not (c[1] & ~rest)]
            cover = _exact_cover(rest, cands)
            if cover is not None:
                mark(st, v, cover)
                break
        if states[st].realizable and pending[Sm] == 0:
            return states, states[st].S
    return states, None


def find_compatible_td(fam: PartitionFamily, V: Optional[Iterable[int]] = None, k: Optional[int] = None) -> TreeDecomposition:
    """Tree-decomposition of width <= k compatible with ``fam``; raises NoDecomposition if none is found."""
    V = tuple(range(fam.n)) if V is None else tuple(sorted(V))
    k = fam.k if k is None else k
    if len(V) <= k + 1:
        return TreeDecomposition((V,), ())
    states, root = run_dp(fam, k)
    if root is None:
        raise NoDecomposition(f"no width-{k} decomposition is compatible with the partition family")

    bags: list[tuple[int, ...]] = []
    edges: list[tuple[int, int]] = []

    def build(S, A) -> int:
        ds = states[(to_mask(S), to_mask(A))]
        idx = len(bags)
        if ds.v is None:
            bags.append(tuple(sorted(S + A)))
            return idx
        bags.append(tuple(sorted(set(S) | {ds.v})))
        for L, B in ds.children:
            edges.append((idx, build(L, B)))
        return idx

    roots = [build(root, A) for A in fam[root].blocks]
    edges.extend((roots[0], r) for r in roots[1:])
    td = TreeDecomposition(tuple(bags), tuple(edges))
    validate_td(td, V)
    if td.width > k or not compatible(td, fam):
        raise AssertionError("reconstructed decomposition violates its own contract")
    return td

"""Ground-truth generators for testing: random k-trees, factorizing distributions, samplers."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .discrete import MAX_CELLS, JointTable, VarSet, to_mask
from .errors import InvalidSpec, TableTooLarge, TooLarge
from .estimation import EntropyOracle, SampleSet
from .treedecomp import TreeDecomposition, edge_separators, td_to_chordal, validate_td


@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    k: int
    seed: int = 0
    card: int = 2
    dependence_strength: float = 0.3

    def __post_init__(self):
        if self.k < 1 or self.n < self.k + 1:
            raise InvalidSpec(f"need k >= 1 and n >= k + 1, got n={self.n}, k={self.k}")
        if self.card < 2:
            raise InvalidSpec(f"card must be >= 2, got {self.card}")
        if not 0 < self.dependence_strength < 0.5:
            raise InvalidSpec(f"dependence_strength must lie in (0, 0.5), got {self.dependence_strength}")


def random_ktree_td(spec: GeneratorSpec) -> TreeDecomposition:
    """Width-k decomposition of a random k-tree on ``spec.n`` vertices, with ``n - k`` bags."""
    rng = np.random.default_rng([spec.seed, 0])
    order = [int(v) for v in rng.permutation(spec.n)]
    bags = [tuple(sorted(order[: spec.k + 1]))]
    edges = []
    for v in order[spec.k + 1 :]:
        parent = int(rng.integers(len(bags)))
        keep = rng.choice(len(bags[parent]), size=spec.k, replace=False)
        bags.append(tuple(sorted([bags[parent][i] for i in keep] + [v])))
        edges.append((parent, len(bags) - 1))
    td = TreeDecomposition(tuple(bags), tuple(edges))
    validate_td(td, range(spec.n))
    return td


def _conditional(rng: np.random.Generator, n_parent_cells: int, card: int, strength: float) -> np.ndarray:
    """Rows of (1 + 2 s d) / card with d zero-sum and 0.5 <= max|d| <= 1.

    Row directions are flipped for a random half of the parent cells so the
    child actually depends on its parents.
    """
    d = rng.uniform(-1.0, 1.0, size=(n_parent_cells, card))
    d -= d.mean(axis=1, keepdims=True)
    peak = np.abs(d).max(axis=1, keepdims=True)
    peak[peak == 0] = 1.0
    d *= rng.uniform(0.5, 1.0, size=(n_parent_cells, 1)) / peak
    if n_parent_cells > 1:
        d *= np.where(d[:, :1] < 0, -1.0, 1.0)
        d *= np.where(rng.permutation(n_parent_cells) < n_parent_cells // 2, -1.0, 1.0)[:, None]
    rows = (1.0 + 2.0 * strength * d) / card
    return rows / rows.sum(axis=1, keepdims=True)


def _traversal(td: TreeDecomposition) -> list[tuple[int, int]]:
    """(bag, parent) pairs in BFS order from bag 0; the root's parent is -1."""
    adj = td.neighbors()
    out = [(0, -1)]
    seen = {0}
    queue = deque([0])
    while queue:
        b = queue.popleft()
        for c in sorted(adj[b]):
            if c not in seen:
                seen.add(c)
                out.append((c, b))
                queue.append(c)
    return out


def random_factorizing_dist(td: TreeDecomposition, spec: GeneratorSpec, attempt: int = 0) -> JointTable:
    """Positive distribution that factorizes exactly over ``td``.

    Walking the bags from the root, every vertex not yet placed gets a
    conditional given the bag's separator with its parent and the vertices
    placed before it in the same bag.
    """
    n = spec.n
    validate_td(td, range(n))
    cards = (spec.card,) * n
    if spec.card**n > MAX_CELLS:
        raise TableTooLarge(f"{spec.card}**{n} cells exceeds the cap of {MAX_CELLS}")
    rng = np.random.default_rng([spec.seed, 1, attempt])
    logp = np.zeros(cards)
    for b, parent in _traversal(td):
        placed = [v for v in td.bags[b] if parent >= 0 and v in td.bags[parent]]
        for v in td.bags[b]:
            if v in placed:
                continue
            pa = list(placed)
            cond = _conditional(rng, spec.card ** len(pa), spec.card, spec.dependence_strength)
            ids = pa + [v]
            arr = cond.reshape([spec.card] * len(ids))
            perm = np.argsort(ids)
            arr = arr.transpose(perm)
            shape = [1] * n
            for i in ids:
                shape[i] = spec.card
            logp = logp + np.log(arr).reshape(shape)
            placed.append(v)
    p = np.exp(logp)
    return JointTable(VarSet(cards), (p / p.sum()).reshape(-1))


def measure_alpha(P: JointTable, td: TreeDecomposition) -> float:
    """Smallest I(C1; C2 | S) over edge separators S, components C of G - S and bipartitions of C.

    G is the chordal graph of ``td``. Returns ``inf`` when no component has two vertices.
    """
    if P.n > 12:
        raise TooLarge(f"exhaustive alpha measurement is limited to 12 variables, got {P.n}")
    G = td_to_chordal(td, n=P.n)
    H = EntropyOracle(P)
    best = math.inf
    for S in sorted({es.sep for es in edge_separators(td)}):
        s = to_mask(S)
        hs = H.of_mask(s)
        for comp in G.components_without(S):
            c = to_mask(comp)
            hc = H.of_mask(c | s)
            first, rest = comp[0], comp[1:]
            for r in range(len(rest)):
                for other in combinations(rest, r):
                    a = to_mask((first,) + other)
                    value = H.of_mask(a | s) + H.of_mask((c & ~a) | s) - hc - hs
                    best = min(best, max(0.0, value))
    return best


def draw_samples(P: JointTable, m: int, seed: int) -> SampleSet:
    """``m`` i.i.d. rows by inverse-CDF lookup on the flat table."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(P.probs)
    idx = np.searchsorted(cdf, rng.random(m) * cdf[-1], side="right")
    idx = np.minimum(idx, P.probs.size - 1)
    rows = np.stack(np.unravel_index(idx, P.cards), axis=1)
    return SampleSet(P.vars, rows)


@dataclass(frozen=True)
class GeneratedModel:
    td: TreeDecomposition
    dist: JointTable
    alpha: float
    attempts: int


def generate_model(spec: GeneratorSpec, min_alpha: float = 0.0, max_tries: int = 50) -> GeneratedModel:
    """Random k-tree plus a factorizing distribution, redrawn until measured alpha exceeds ``min_alpha``."""
    td = random_ktree_td(spec)
    if spec.n > 12:
        if min_alpha > 0:
            raise TooLarge("alpha cannot be measured beyond 12 variables")
        return GeneratedModel(td, random_factorizing_dist(td, spec), math.nan, 1)
    alpha = -math.inf
    for attempt in range(max_tries):
        P = random_factorizing_dist(td, spec, attempt)
        alpha = measure_alpha(P, td)
        if alpha > min_alpha:
            return GeneratedModel(td, P, alpha, attempt + 1)
    raise InvalidSpec(f"no draw reached alpha > {min_alpha} in {max_tries} tries (last {alpha})")

"""KL projection onto a tree-decomposition and the end-to-end learner."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .discrete import JointTable, VarSet, cond_mutual_info, entropy, marginalize
from .errors import InconsistentModel, ShapeMismatch
from .estimation import SampleSet, empirical_table, entropy_oracle
from .partitions import PartitionFamily, build_family
from .treedecomp import TreeDecomposition, edge_separators, find_compatible_td, validate_td

CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True)
class FactorizedModel:
    """Bag and separator marginals; ``sep_marginals[e]`` is None for an empty separator."""

    cards: tuple[int, ...]
    td: TreeDecomposition
    bag_marginals: tuple[JointTable, ...]
    sep_marginals: tuple[Optional[JointTable], ...]


@dataclass(frozen=True)
class Tolerances:
    eps1: float
    eps2: float
    delta1: float

    def threshold(self, n: int) -> float:
        return self.eps2 + (n + 2) * self.eps1


@dataclass(frozen=True)
class LearnConfig:
    """Target accuracy ``eps`` (bits), failure probability ``delta``, width ``k``.

    ``alpha`` is the strong-connectivity floor in bits and defaults to ``eps``.
    The overrides replace the derived eps1/eps2 schedule, which is far too
    conservative for sampled runs at desk scale.
    """

    k: int
    eps: float
    delta: float
    alpha: Optional[float] = None
    eps1_override: Optional[float] = None
    eps2_override: Optional[float] = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not (self.eps > 0 and 0 < self.delta < 1):
            raise ValueError(f"need eps > 0 and 0 < delta < 1, got eps={self.eps}, delta={self.delta}")
        if self.alpha is not None and not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        for name in ("eps1_override", "eps2_override"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be nonnegative")

    @property
    def floor(self) -> float:
        return min(self.eps, self.eps if self.alpha is None else self.alpha)

    def derive(self, n: int, exact: bool = False) -> Tolerances:
        """eps1 = eps2 = min(eps, alpha) / (8 n^4) and delta1 = delta / n^5.

        Half of the largest admissible value keeps the strict inequality. An
        exact oracle has no estimation error, so eps1 is 0 in that case.
        """
        base = self.floor / (8.0 * n**4)
        eps1 = 0.0 if exact else base
        eps2 = base
        if self.eps1_override is not None:
            eps1 = self.eps1_override
        if self.eps2_override is not None:
            eps2 = self.eps2_override
        return Tolerances(eps1, eps2, self.delta / n**5)


def _broadcast(t: JointTable, ids: tuple[int, ...], cards: tuple[int, ...]) -> np.ndarray:
    shape = [1] * len(cards)
    for i in ids:
        shape[i] = cards[i]
    return t.probs.reshape(shape)


def project(P: JointTable, td: TreeDecomposition) -> FactorizedModel:
    """Bag and separator marginals of P: the KL-closest distribution factorizing over ``td``."""
    validate_td(td, range(P.n))
    bags = tuple(marginalize(P, b) for b in td.bags)
    seps = []
    for i, j in td.edges:
        sep = sorted(set(td.bags[i]) & set(td.bags[j]))
        seps.append(marginalize(P, sep) if sep else None)
    return FactorizedModel(P.cards, td, bags, tuple(seps))


def _check_consistent(fm: FactorizedModel) -> None:
    td = fm.td
    for (i, j), sm in zip(td.edges, fm.sep_marginals):
        sep = tuple(sorted(set(td.bags[i]) & set(td.bags[j])))
        if not sep:
            continue
        for b in (i, j):
            local = tuple(td.bags[b].index(v) for v in sep)
            m = marginalize(fm.bag_marginals[b], local)
            if sm is None or sm.cards != m.cards or np.max(np.abs(m.probs - sm.probs)) > CONSISTENCY_TOL:
                raise InconsistentModel(f"bag {b} disagrees with separator {sep}")


def materialize(fm: FactorizedModel) -> JointTable:
    """Full table of prod(bag marginals) / prod(separator marginals), with 0/0 read as 0."""
    _check_consistent(fm)
    cards = fm.cards
    num = np.ones(cards)
    den = np.ones(cards)
    for bag, t in zip(fm.td.bags, fm.bag_marginals):
        num = num * _broadcast(t, bag, cards)
    for (i, j), t in zip(fm.td.edges, fm.sep_marginals):
        if t is not None:
            sep = tuple(sorted(set(fm.td.bags[i]) & set(fm.td.bags[j])))
            den = den * _broadcast(t, sep, cards)
    out = np.divide(num, den, out=np.zeros(cards), where=den > 0)
    total = float(out.sum())
    if abs(total - 1.0) > CONSISTENCY_TOL:
        raise InconsistentModel(f"materialized model sums to {total!r}")
    return JointTable(VarSet(cards), out.reshape(-1))


def projection_kl(P: JointTable, td: TreeDecomposition) -> float:
    """Sum over tree edges of I(side A; side B | separator).

    This equals D(P || projection) when ``td`` has at most one edge and is an
    upper bound otherwise: on a three-bag chain the excess is I(B1; B3 | B2).
    It is zero exactly when P factorizes over ``td``. Use
    :func:`projection_divergence` for the divergence itself.
    """
    validate_td(td, range(P.n))
    return float(sum(cond_mutual_info(P, es.sideA, es.sideB, es.sep) for es in edge_separators(td)))


def projection_divergence(P: JointTable, td: TreeDecomposition) -> float:
    """D(P || projection of P onto td) = sum H(bags) - sum H(separators) - H(V), clamped at 0."""
    validate_td(td, range(P.n))
    value = sum(entropy(P, b) for b in td.bags)
    value -= sum(entropy(P, es.sep) for es in edge_separators(td))
    return max(0.0, float(value - entropy(P, range(P.n))))


@dataclass(frozen=True)
class LearnResult:
    td: TreeDecomposition
    model: FactorizedModel
    family: PartitionFamily
    tolerances: Tolerances
    kl: float
    divergence: float


def learn(source: Union[JointTable, SampleSet], cfg: LearnConfig) -> LearnResult:
    """Partition family, compatible decomposition, then projection of the source distribution.

    ``kl`` is the separator-CMI sum of :func:`projection_kl` and
    ``divergence`` the exact divergence to the fitted model. For a sample set
    both, and the fitted model, use the empirical table. Raises
    NoDecomposition when the search fails.
    """
    if not isinstance(source, (JointTable, SampleSet)):
        raise ShapeMismatch(f"unsupported source {type(source).__name__}")
    exact = isinstance(source, JointTable)
    n = source.n
    tol = cfg.derive(n, exact=exact)
    H = entropy_oracle(source)
    fam = build_family(H, range(n), cfg.k, tol.eps1, tol.eps2)
    td = find_compatible_td(fam, range(n), cfg.k)
    table = source if exact else empirical_table(source)
    return LearnResult(td, project(table, td), fam, tol, projection_kl(table, td), projection_divergence(table, td))

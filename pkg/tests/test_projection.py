import itertools

import numpy as np
import pytest

from conftest import coins, copies, random_table
from oracles import cmi_direct
from ktreelearn import (
    GeneratorSpec,
    JointTable,
    LearnConfig,
    NoDecomposition,
    TreeDecomposition,
    draw_samples,
    generate_model,
    kl_divergence,
    learn,
    materialize,
    project,
    projection_divergence,
    projection_kl,
    random_factorizing_dist,
    random_ktree_td,
)
from ktreelearn.errors import InconsistentModel, InvalidTD, ShapeMismatch
from ktreelearn.projection import FactorizedModel, Tolerances

CHAIN = TreeDecomposition(((0, 1), (1, 2)), ((0, 1),))


def test_projection_fixed_point():
    spec = GeneratorSpec(6, 2, 4)
    td = random_ktree_td(spec)
    P = random_factorizing_dist(td, spec)
    assert np.max(np.abs(materialize(project(P, td)).probs - P.probs)) <= 1e-12
    assert projection_kl(P, td) < 1e-12


def test_single_bag_projection_is_identity():
    P = random_table(1, (2, 3, 2))
    td = TreeDecomposition(((0, 1, 2),))
    assert np.allclose(materialize(project(P, td)).probs, P.probs, atol=1e-15)
    assert projection_kl(P, td) == 0.0


def test_copies_on_a_chain():
    P = copies(3)
    P1 = materialize(project(P, CHAIN)).array
    for x in itertools.product(range(2), repeat=3):
        # P(x0, x1) P(x1, x2) / P(x1) by hand: 1/2 on the two constant cells.
        expected = 0.5 if x[0] == x[1] == x[2] else 0.0
        assert P1[x] == pytest.approx(expected, abs=1e-15)


def test_projection_kl_of_split_copies():
    td = TreeDecomposition(((0,), (1,)), ((0, 1),))
    assert projection_kl(copies(2), td) == pytest.approx(1.0)
    fm = project(copies(2), td)
    assert fm.sep_marginals == (None,)


@pytest.mark.parametrize("seed", range(5))
def test_divergence_matches_direct_kl(seed):
    P = random_table(seed, (2,) * 5, concentration=0.5)
    td = random_ktree_td(GeneratorSpec(5, 2, seed))
    direct = kl_divergence(P, materialize(project(P, td)))
    assert projection_divergence(P, td) == pytest.approx(direct, abs=1e-9)
    assert projection_kl(P, td) >= direct - 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_separator_sum_on_a_single_edge_is_the_divergence(seed):
    P = random_table(seed, (2, 3, 2, 2), concentration=0.5)
    td = TreeDecomposition(((0, 1, 2), (2, 3)), ((0, 1),))
    assert projection_kl(P, td) == pytest.approx(kl_divergence(P, materialize(project(P, td))), abs=1e-9)


def test_separator_sum_excess_on_a_chain():
    P = random_table(1, (2,) * 5, concentration=0.5)
    td = TreeDecomposition(((0, 1), (1, 2, 3), (3, 4)), ((0, 1), (1, 2)))
    excess = projection_kl(P, td) - projection_divergence(P, td)
    assert excess == pytest.approx(cmi_direct(P.array, [0], [4], [1, 2, 3]), abs=1e-9)
    assert excess > 0.1


@pytest.mark.parametrize("seed", range(5))
def test_projection_factorizes_and_is_idempotent(seed):
    P = random_table(seed, (2, 3, 2, 2, 2), concentration=0.5)
    td = TreeDecomposition(((0, 1), (1, 2, 3), (3, 4)), ((0, 1), (1, 2)))
    P1 = materialize(project(P, td))
    assert abs(P1.probs.sum() - 1.0) <= 1e-9
    assert cmi_direct(P1.array, [0], [2, 3, 4], [1]) < 1e-9
    assert cmi_direct(P1.array, [0, 1, 2], [4], [3]) < 1e-9
    again = project(P1, td)
    for a, b in zip(again.bag_marginals, project(P, td).bag_marginals):
        assert np.max(np.abs(a.probs - b.probs)) <= 1e-9


def test_projection_rejects_bad_td():
    with pytest.raises(InvalidTD):
        project(coins(3), CHAIN.__class__(((0, 1),), ()))


def test_materialize_examples():
    P = random_table(3, (3, 2))
    td = TreeDecomposition(((0, 1),))
    assert np.allclose(materialize(project(P, td)).probs, P.probs)
    fm = project(coins(2), TreeDecomposition(((0,), (1,)), ((0, 1),)))
    assert np.allclose(materialize(fm).probs, 0.25)


def test_materialize_chain_by_hand():
    P = random_table(9, (2, 2, 2))
    arr = P.array
    Q = materialize(project(P, CHAIN)).array
    for a, b, c in itertools.product(range(2), repeat=3):
        pab = arr[a, b, :].sum()
        pbc = arr[:, b, c].sum()
        pb = arr[:, b, :].sum()
        assert Q[a, b, c] == pytest.approx(pab * pbc / pb, abs=1e-15)


def test_materialize_rejects_inconsistent_marginals():
    fm = project(random_table(2, (2, 2, 2)), CHAIN)
    bad = FactorizedModel(fm.cards, fm.td, (fm.bag_marginals[0], JointTable.from_flat((2, 2), [0.25] * 4)), fm.sep_marginals)
    with pytest.raises(InconsistentModel):
        materialize(bad)


@pytest.mark.parametrize("seed", range(5))
def test_projection_beats_other_factorizing_models(seed):
    P = random_table(seed, (2,) * 5)
    spec = GeneratorSpec(5, 2, seed)
    td = random_ktree_td(spec)
    best = projection_kl(P, td)
    for i in range(20):
        Q = random_factorizing_dist(td, GeneratorSpec(5, 2, 1000 + i, dependence_strength=0.05 + 0.02 * i))
        assert best <= kl_divergence(P, Q) + 1e-9


def test_learn_config_schedule():
    cfg = LearnConfig(k=2, eps=0.1, delta=0.2, alpha=0.05)
    tol = cfg.derive(4)
    assert tol.eps1 == tol.eps2 == pytest.approx(0.05 / (8 * 4**4))
    assert tol.eps1 < min(0.1, 0.05) / (4 * 4**4)
    assert tol.delta1 == pytest.approx(0.2 / 4**5)
    assert cfg.derive(4, exact=True).eps1 == 0.0
    assert LearnConfig(k=1, eps=0.1, delta=0.1).floor == 0.1
    over = LearnConfig(k=1, eps=0.1, delta=0.1, eps1_override=0.01, eps2_override=0.2).derive(6)
    assert (over.eps1, over.eps2) == (0.01, 0.2)
    assert Tolerances(0.01, 0.2, 0.1).threshold(6) == pytest.approx(0.28)


@pytest.mark.parametrize(
    "kwargs",
    [dict(k=0, eps=0.1, delta=0.1), dict(k=1, eps=0.0, delta=0.1), dict(k=1, eps=0.1, delta=1.0),
     dict(k=1, eps=0.1, delta=0.1, alpha=-1.0), dict(k=1, eps=0.1, delta=0.1, eps1_override=-0.1)],
)
def test_learn_config_validation(kwargs):
    with pytest.raises(ValueError):
        LearnConfig(**kwargs)


def test_learn_independent_coins():
    res = learn(coins(5), LearnConfig(k=1, eps=0.1, delta=0.1))
    assert res.kl == pytest.approx(0.0, abs=1e-12)
    assert res.td.width <= 1


def test_learn_width_two_ktree():
    gm = generate_model(GeneratorSpec(8, 2, 3))
    res = learn(gm.dist, LearnConfig(k=2, eps=0.1, delta=0.1))
    assert res.kl < 1e-9 and res.divergence < 1e-9 and projection_kl(gm.dist, res.td) < 1e-9
    assert res.td.width <= 2


def test_learn_from_samples_reports_empirical_kl():
    gm = generate_model(GeneratorSpec(5, 1, 7, dependence_strength=0.45))
    S = draw_samples(gm.dist, 20000, seed=1)
    res = learn(S, LearnConfig(k=1, eps=0.1, delta=0.2, eps1_override=0.005, eps2_override=0.02))
    assert res.tolerances.eps1 == 0.005
    assert res.td.width <= 1 and res.kl >= 0.0


def test_learn_rejects_other_sources():
    with pytest.raises(ShapeMismatch):
        learn(np.ones(4) / 4, LearnConfig(k=1, eps=0.1, delta=0.1))


def test_learn_raises_without_decomposition():
    from test_treedecomp import loop_model

    with pytest.raises(NoDecomposition):
        learn(loop_model(), LearnConfig(k=1, eps=0.1, delta=0.1))

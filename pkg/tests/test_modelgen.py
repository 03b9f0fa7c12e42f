import math

import numpy as np
import pytest

from conftest import coins, copies, random_table
from oracles import alpha_double_loop
from ktreelearn import (
    GeneratorSpec,
    JointTable,
    TreeDecomposition,
    draw_samples,
    empirical_table,
    generate_model,
    measure_alpha,
    projection_kl,
    random_factorizing_dist,
    random_ktree_td,
    validate_td,
)
from ktreelearn.errors import InvalidSpec, TableTooLarge, TooLarge


@pytest.mark.parametrize("kwargs", [dict(n=3, k=0), dict(n=2, k=2), dict(n=4, k=1, card=1), dict(n=4, k=1, dependence_strength=0.5)])
def test_spec_validation(kwargs):
    with pytest.raises(InvalidSpec):
        GeneratorSpec(**kwargs)


def test_ktree_examples():
    assert random_ktree_td(GeneratorSpec(3, 2, 0)).bags == ((0, 1, 2),)
    td = random_ktree_td(GeneratorSpec(8, 2, 1))
    validate_td(td, range(8))
    assert td.width == 2 and len(td.bags) == 6
    assert random_ktree_td(GeneratorSpec(8, 2, 1)) == td


@pytest.mark.parametrize("seed", range(10))
def test_ktree_shape(seed):
    n, k = 9, 3
    td = random_ktree_td(GeneratorSpec(n, k, seed))
    validate_td(td, range(n))
    assert all(len(b) == k + 1 for b in td.bags)
    assert all(len(set(td.bags[i]) & set(td.bags[j])) == k for i, j in td.edges)


@pytest.mark.parametrize("seed", range(10))
def test_factorizing_dist_factorizes(seed):
    spec = GeneratorSpec(7, 1 + seed % 3, seed, card=2 + seed % 2)
    td = random_ktree_td(spec)
    P = random_factorizing_dist(td, spec)
    assert projection_kl(P, td) < 1e-9
    assert P.probs.min() > 0 and abs(P.probs.sum() - 1) < 1e-12


def test_factorizing_dist_on_a_general_decomposition():
    td = TreeDecomposition(((0, 1, 2), (2, 3), (2, 4, 5)), ((0, 1), (1, 2)))
    P = random_factorizing_dist(td, GeneratorSpec(6, 2, 3))
    assert projection_kl(P, td) < 1e-9


@pytest.mark.parametrize("s", [0.05, 0.2, 0.45])
def test_conditionals_stay_within_strength(s):
    spec = GeneratorSpec(2, 1, 5, dependence_strength=s)
    arr = random_factorizing_dist(random_ktree_td(spec), spec).array
    first = arr.sum(axis=1)
    cond = arr / first[:, None]
    assert np.all(np.abs(first - 0.5) <= s + 1e-12)
    assert np.all(np.abs(cond - 0.5) <= s + 1e-12)
    assert np.all(np.abs(cond - 0.5) >= s / 2 - 1e-12)


def test_factorizing_dist_size_cap():
    spec = GeneratorSpec(25, 1, 0)
    with pytest.raises(TableTooLarge):
        random_factorizing_dist(random_ktree_td(spec), spec)


def test_alpha_positive_example():
    gm = generate_model(GeneratorSpec(6, 1, 7))
    assert gm.alpha > 0


def test_alpha_examples():
    chain = TreeDecomposition(((0, 1), (1, 2), (2, 3)), ((0, 1), (1, 2)))
    assert measure_alpha(coins(4), chain) == pytest.approx(0.0, abs=1e-12)
    path = TreeDecomposition(((0, 1), (1, 2)), ((0, 1),))
    assert measure_alpha(copies(3), path) == math.inf
    with pytest.raises(TooLarge):
        measure_alpha(coins(13), random_ktree_td(GeneratorSpec(13, 1, 0)))


@pytest.mark.parametrize("seed", range(5))
def test_alpha_matches_double_loop(seed):
    for k in (1, 2):
        gm = generate_model(GeneratorSpec(6, k, seed))
        ref = alpha_double_loop(gm.dist.array, gm.td.bags, gm.td.edges)
        assert gm.alpha == pytest.approx(ref, abs=1e-12)
    P = random_table(seed, (2,) * 6)
    td = random_ktree_td(GeneratorSpec(6, 2, seed))
    assert measure_alpha(P, td) == pytest.approx(alpha_double_loop(P.array, td.bags, td.edges), abs=1e-12)


def test_alpha_is_usually_positive_at_low_strength():
    hits = 0
    for seed in range(100):
        spec = GeneratorSpec(6, 2, seed, dependence_strength=0.1)
        td = random_ktree_td(spec)
        hits += measure_alpha(random_factorizing_dist(td, spec), td) > 0
    assert hits >= 95


def test_generate_model_regenerates():
    gm = generate_model(GeneratorSpec(6, 1, 1, dependence_strength=0.45), min_alpha=0.1)
    assert gm.alpha > 0.1 and gm.attempts >= 1
    with pytest.raises(InvalidSpec):
        generate_model(GeneratorSpec(6, 1, 1, dependence_strength=0.01), min_alpha=0.5, max_tries=3)
    big = generate_model(GeneratorSpec(13, 1, 0))
    assert math.isnan(big.alpha)
    with pytest.raises(TooLarge):
        generate_model(GeneratorSpec(13, 1, 0), min_alpha=0.1)


def test_draw_samples_examples():
    point = JointTable.from_flat((2, 3), [0, 0, 0, 0, 1, 0])
    rows = draw_samples(point, 50, seed=1).rows
    assert np.all(rows == [1, 1])
    P = random_table(2, (2, 3))
    assert np.array_equal(draw_samples(P, 100, 5).rows, draw_samples(P, 100, 5).rows)
    fair = draw_samples(coins(1), 10**5, seed=3)
    assert abs(np.mean(fair.rows[:, 0] == 0) - 0.5) < 0.01
    with pytest.raises(ValueError):
        draw_samples(P, 0, 1)


@pytest.mark.parametrize("seed", range(3))
def test_samples_converge_in_total_variation(seed):
    P = random_table(seed, (2, 3, 2))
    t = empirical_table(draw_samples(P, 10**5, seed))
    assert 0.5 * np.abs(t.probs - P.probs).sum() < 0.02

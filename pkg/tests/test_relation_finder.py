import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from heightrel.height_relations import RelationSet, in_span
from heightrel.neron_tate.heights import GramMeasurement
from heightrel.relation_finder import (
    Verdict,
    compare_values,
    compare_with_prediction,
    estimate_span_dim,
    find_relations,
)


def test_exact_dependency():
    rels = find_relations([1.0, 2.0, 3.0], 12, 10)
    vecs = [r.coefficients for r in rels]
    assert in_span(vecs, (1, 1, -1))
    assert any(r.residual == 0 for r in rels)


def test_planted_ratio():
    h = 0.3137281946
    (rel,) = find_relations([h, 5 * h], 12, 100)
    assert rel.coefficients == (5, -1)


def test_irrational_pairs():
    assert find_relations([1.0, round(math.sqrt(2), 12)], 12, 100) == []
    assert estimate_span_dim([1.0, round(math.pi, 12)], 12, 100) == 2
    assert estimate_span_dim([1.0, 2.0]) == 1


def test_one_planted_among_three():
    h, h2 = 0.7071234987, 1.2843917265
    assert estimate_span_dim([h, 5 * h, h2]) == 2


def test_input_checks():
    with pytest.raises(ValueError):
        find_relations([1.0, float("nan")])
    with pytest.raises(ValueError):
        find_relations([1.0, 2.0], precision_digits=4)
    with pytest.raises(ValueError):
        find_relations([1.0, 2.0], height_bound=0)


def test_relations_are_normalized():
    for rel in find_relations([0.5, 1.5, 2.0, 0.25], 12, 20):
        c = rel.coefficients
        assert math.gcd(*c) == 1
        assert next(x for x in c if x) > 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(0.01, 1000))
def test_scale_robustness(seed, factor):
    rng = random.Random(seed)
    a, b = rng.uniform(1, 2), rng.uniform(1, 2)
    values = [a, b, 3 * a - 2 * b]
    base = [r.coefficients for r in find_relations(values)]
    scaled = [r.coefficients for r in find_relations([factor * v for v in values])]
    assert base == scaled


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=5))
def test_span_dim_bounds(values):
    k = estimate_span_dim(values)
    assert 0 <= k <= len(values)
    assert k == len(values) - len(find_relations(values))


def test_compare_examples():
    g = [1.1734019283, 1.5380193746]
    empty = RelationSet(((0, 0), (1, 1)), ())
    rep = compare_values(g, empty, 1e-14)
    assert rep.verdict is Verdict.consistent and rep.estimated_span_dim == 2

    h = 0.4129382711
    planted = [h, 0.9182736455, 5 * h + 3e-11]
    pred = RelationSet(((0, 0), (0, 1), (1, 1)), ((5, 0, -1),))
    gm = GramMeasurement((), ((planted[0], planted[1]), (planted[1], planted[2])), 1e-12)
    assert compare_with_prediction(gm, pred, precision_digits=10, height_bound=20).verdict is Verdict.consistent

    broken = [planted[0], planted[1], planted[2] + 0.1]
    assert compare_values(broken, pred, 1e-12, 10, 20).verdict is Verdict.inconsistent

    assert compare_values(planted, pred, 1e-3, 10, 20).verdict is Verdict.undetermined
    with pytest.raises(ValueError):
        compare_values(planted[:2], pred, 1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 7))
def test_returned_relations_meet_acceptance_rule(seed, k):
    from heightrel.relation_finder import detection_threshold
    rng = random.Random(seed)
    values = [rng.uniform(1, 2) for _ in range(k)]
    for rel in find_relations(values, 12, 100):
        assert max(abs(c) for c in rel.coefficients) <= 100
        assert rel.residual < detection_threshold(values, 12)
        assert math.gcd(*rel.coefficients) == 1

import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meanorder import DomainError, FinitePoset, bracket, check_closure_laws, gi_set, is_interval_type, parse_poset
from meanorder.order import (
    bracket_union_gap,
    chain,
    diamond,
    format_poset,
    iter_interval_type_masks,
    random_poset,
)

FIXTURES = __import__("pathlib").Path(__file__).parent / "fixtures"


def squeezed(P, S):
    """Definitional hull: every x with s <= x <= t for some s, t in S."""
    return {x for x in P.elements if any(P.le(s, x) and P.le(x, t) for s in S for t in S)}


def convex(P, S):
    return all(x in S for s, t in itertools.product(S, repeat=2) for x in P.elements if P.le(s, x) and P.le(x, t))


posets = st.builds(
    lambda n, d, seed: random_poset(n, d, np.random.default_rng(seed)),
    st.integers(0, 7), st.floats(0, 1), st.integers(0, 2**32 - 1),
)


def test_chain_brackets():
    P = chain(3)
    assert bracket(P.full(), 1, 3) == {1, 2, 3}
    assert bracket(P.full(), 3, 1) == frozenset()
    assert bracket(P.subset({1, 3}), 1, 3) == {1, 3}


def test_diamond_bracket_outside_space():
    D = diamond()
    assert bracket(D.subset({"a", "b"}), "bot", "top") == {"a", "b"}


def test_unknown_ids_rejected():
    with pytest.raises(DomainError):
        bracket(chain(3).full(), 1, 9)
    with pytest.raises(DomainError):
        chain(3).subset({4})


def test_gi_set_examples():
    P = chain(4)
    assert gi_set(P.full(), P) == set(P.elements)
    assert gi_set(P.subset(()), P) == frozenset()
    assert gi_set(P.subset({1, 4}), P) == {1, 2, 3, 4}


def test_interval_type_examples():
    P = chain(3)
    verdict = is_interval_type(P.subset({1, 3}), P)
    assert not verdict and verdict.witness == 2
    assert is_interval_type(P.full(), P)


def test_bracket_union_law():
    P = chain(3)
    assert bracket_union_gap(P, 1, 2, 3) == frozenset()
    assert bracket_union_gap(diamond(), "bot", "a", "top") == {"b"}


@settings(max_examples=150, deadline=None)
@given(posets)
def test_hull_matches_definition(P):
    for mask in range(1 << len(P)):
        S = P.members(mask)
        hull = gi_set(P.subset(S), P)
        assert hull == squeezed(P, S)
        assert S <= hull
        assert gi_set(P.subset(hull), P) == hull
        assert bool(is_interval_type(P.subset(S), P)) == convex(P, S)


@settings(max_examples=100, deadline=None)
@given(posets)
def test_hull_is_monotone(P):
    masks = list(range(1 << len(P)))
    for a, b in itertools.product(masks[:32], repeat=2):
        if a & ~b == 0:
            assert gi_set(P.subset(P.members(a)), P) <= gi_set(P.subset(P.members(b)), P)


@settings(max_examples=100, deadline=None)
@given(posets)
def test_down_and_up_sets_are_interval_type(P):
    for r in range(len(P) + 1):
        for gen in itertools.combinations(P.elements, r):
            assert is_interval_type(P.subset(P.down_set(gen)), P)
            assert is_interval_type(P.subset(P.up_set(gen)), P)


def test_iter_masks_are_exactly_the_fixpoints():
    P = diamond()
    found = {P.members(m) for m in iter_interval_type_masks(P)}
    brute = {P.members(m) for m in range(16) if convex(P, P.members(m))}
    assert found == brute
    assert frozenset({"bot", "top"}) not in found


@pytest.mark.parametrize(
    "rel, msg",
    [
        ([[1, 0], [0, 0]], "reflexive"),
        ([[1, 1], [1, 1]], "antisymmetric"),
        ([[1, 1, 0], [0, 1, 1], [0, 0, 1]], "transitive"),
    ],
)
def test_invalid_relations_are_not_repaired(rel, msg):
    with pytest.raises(DomainError, match=msg):
        FinitePoset(list(range(len(rel))), rel)


def test_fixture_round_trip():
    P = parse_poset((FIXTURES / "diamond.poset").read_text())
    assert P.elements == ("bot", "a", "b", "top")
    assert np.array_equal(P.leq, diamond().leq)
    Q = parse_poset(format_poset(P))
    assert np.array_equal(Q.leq, P.leq)


def test_fixture_without_reflexive_pairs_is_rejected():
    with pytest.raises(DomainError, match="reflexive"):
        parse_poset("elements: x y\nle: x y\n")
    with pytest.raises(DomainError, match="unknown element"):
        parse_poset("elements: x\nle: x z\n")


@settings(max_examples=50, deadline=None)
@given(posets, st.integers(0, 1000))
def test_closure_laws_hold(P, seed):
    rep = check_closure_laws(P, trials=5, seed=seed)
    assert rep.ok
    for rec in rep.records:
        row = json.loads(rec.to_json())
        assert set(row) >= {"law", "poset_seed", "verdict"}


def test_closure_report_is_deterministic():
    P = random_poset(7, 0.4, np.random.default_rng(5))
    a = [r.to_json() for r in check_closure_laws(P, 4, seed=9).records]
    b = [r.to_json() for r in check_closure_laws(P, 4, seed=9).records]
    assert a == b

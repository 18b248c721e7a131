from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from morphic_lab.errors import AonU, BudgetExceeded, DimensionMismatch, NotMaximal
from morphic_lab.fplinalg import (
    enumerate_maximal_subspaces,
    enumerate_subspaces_containing,
    full_space,
    rref,
    zero_subspace,
)
from morphic_lab.triples import (
    Triple,
    check_dim_bound,
    derived_of,
    search_triples,
    spread,
    t_of,
    verify_morphic_triple,
    zset,
)


def line(p, *vec):
    return rref([list(vec)], p, len(vec))


def symplectic(p, d, e=1):
    """beta(e_{2i}, e_{2i+1}) = w_0, all other basis pairs zero."""
    return Triple.from_pairs(p, d, e, {(2 * i, 2 * i + 1): (1,) + (0,) * (e - 1) for i in range(d // 2)})


def brute_derived(t, u):
    """Span of beta over all pairs of vectors of U."""
    vecs = u.vectors()
    vals = [list(t.apply(x, y)) for x in vecs for y in vecs]
    return rref(vals, t.p, t.dim_w)


def brute_verdict(t):
    hyps = enumerate_maximal_subspaces(t.dim_v, t.p)
    if brute_derived(t, full_space(t.dim_v, t.p)).dim != t.dim_w:
        return False
    if t.dim_w == 0:
        return t.dim_v <= 1
    meet = set(full_space(t.dim_w, t.p).vectors())
    for u in hyps:
        ud = brute_derived(t, u)
        if ud.dim != t.dim_w - 1:
            return False
        meet &= set(ud.vectors())
    return meet == {(0,) * t.dim_w}


def test_triple_is_reduced_and_alternating():
    t = Triple(3, 3, 2, ((4, -1), (0, 0), (1, 2)))
    assert t.beta[0] == (1, 2)
    assert t.value(1, 0) == (2, 1) and t.value(2, 2) == (0, 0)
    x, y = (1, 2, 0), (0, 1, 1)
    assert t.apply(x, y) == tuple((-v) % 3 for v in t.apply(y, x))
    assert t.apply(x, x) == (0, 0)
    with pytest.raises(DimensionMismatch):
        Triple(2, 3, 1, ((1,),))


def test_json_round_trip():
    t = symplectic(3, 4, 2)
    assert Triple.from_json(t.to_json()) == t
    assert t.to_json()["beta"][0] == [0, 1, [1, 0]]


def test_derived_of_examples():
    h = symplectic(3, 2)
    assert derived_of(h, line(3, 1, 0)).dim == 0
    assert derived_of(h, full_space(2, 3)) == full_space(1, 3)
    t = Triple.from_pairs(2, 3, 1, {(1, 2): (1,)})
    assert derived_of(t, rref([[1, 0, 0], [0, 1, 0]], 2, 3)).dim == 0
    with pytest.raises(DimensionMismatch):
        derived_of(h, line(3, 1, 0, 0))


def test_verify_examples():
    assert verify_morphic_triple(symplectic(3, 2)).is_morphic_triple
    degenerate = verify_morphic_triple(Triple(2, 1, 0))
    assert degenerate.is_morphic_triple and degenerate.degenerate
    bad = verify_morphic_triple(symplectic(2, 4, 1))
    assert not bad.is_morphic_triple and bad.failed_condition in (1, 2, 3)
    assert not check_dim_bound(symplectic(2, 4, 1))


def test_failure_witnesses_re_verify():
    # condition 1: V' smaller than W
    v = verify_morphic_triple(Triple.from_pairs(2, 2, 2, {(0, 1): (1, 0)}))
    assert v.failed_condition == 1 and v.witness.dim < 2
    # condition 2: the witness hyperplane has U' not of codimension one
    v = verify_morphic_triple(symplectic(2, 4, 1))
    assert v.failed_condition == 2
    assert derived_of(symplectic(2, 4, 1), v.witness).dim != 0
    # degenerate W = 0 with d > 1
    v = verify_morphic_triple(Triple(3, 2, 0))
    assert v.failed_condition == 2 and v.degenerate


def test_t_of_examples():
    h = symplectic(3, 2)
    u = line(3, 1, 0)
    assert t_of(h, u, (0, 1)).dim == 0
    assert t_of(h, u, (1, 1)) == t_of(h, u, (0, 1))
    with pytest.raises(AonU):
        t_of(h, u, (2, 0))
    with pytest.raises(NotMaximal):
        t_of(h, zero_subspace(2, 3), (1, 0))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_spread_and_zset_for_d2(p):
    t = symplectic(p, 2)
    for u in enumerate_maximal_subspaces(2, p):
        s = spread(t, u)
        assert len(s) == p + 1 == len(enumerate_maximal_subspaces(2, p))
        assert s == enumerate_subspaces_containing(t_of(t, u, (1, 1) if not u.contains((1, 1)) else (1, 0)), 1)
    assert len(zset(t)) == 1


def test_search_examples():
    r = search_triples(2, 2, 1)
    assert r.exhaustive and [t.beta for t in r.triples] == [((1,),)]
    for k in (1, 2, 3):
        assert search_triples(2, 3, k).triples == []
    assert search_triples(2, 4, 2).triples == []
    assert len(search_triples(3, 2, 1).triples) == 2


def test_search_budget():
    r = search_triples(2, 4, 2, budget=100, mode="exhaustive")
    assert r.budget_exceeded and not r.exhaustive and r.examined == 100
    with pytest.raises(BudgetExceeded) as exc:
        search_triples(2, 4, 2, budget=100, mode="exhaustive", strict=True)
    assert exc.value.partial.examined == 100 and exc.value.exit_code == 3


def test_sampled_search_is_reproducible():
    a = search_triples(3, 3, 3, budget=300, mode="sample", seed=4)
    b = search_triples(3, 3, 3, budget=300, mode="sample", seed=4)
    assert a.to_json() == b.to_json() and a.mode == "sample" and a.triples == []


@st.composite
def triples(draw):
    p = draw(st.sampled_from([2, 3]))
    d = draw(st.integers(1, 4))
    e = draw(st.integers(0, 3))
    npairs = d * (d - 1) // 2
    beta = tuple(tuple(draw(st.integers(0, p - 1)) for _ in range(e)) for _ in range(npairs))
    return Triple(p, d, e, beta)


@settings(max_examples=200, deadline=None)
@given(triples())
def test_verify_matches_brute_force(t):
    assert verify_morphic_triple(t).is_morphic_triple == brute_verdict(t)


@settings(max_examples=200, deadline=None)
@given(triples(), st.data())
def test_derived_of_matches_brute_force(t, data):
    rows = data.draw(st.lists(st.lists(st.integers(0, t.p - 1), min_size=t.dim_v, max_size=t.dim_v), max_size=3))
    u = rref(rows, t.p, t.dim_v)
    assert derived_of(t, u) == brute_derived(t, u)


@pytest.mark.parametrize("p,d,e", [(2, 2, 1), (3, 2, 1), (2, 2, 2), (2, 3, 2), (3, 3, 1)])
def test_laws_on_every_searched_triple(p, d, e):
    for t in search_triples(p, d, e).triples:
        assert d % 2 == 0 and check_dim_bound(t)
        assert len(zset(t)) == sum(p ** (2 * i) for i in range(d // 2))
        for u in enumerate_maximal_subspaces(d, p):
            a = next(v for v in product(range(p), repeat=d) if not u.contains(v))
            assert len(spread(t, u)) == p + 1
            assert t_of(t, u, a).dim == d - 2

import pytest

from morphic_lab import groups as G
from morphic_lab.errors import AbelianInput, NotAPGroup, NotElementaryAbelian, OrderCapExceeded
from morphic_lab.families import make_family
from morphic_lab.iso import are_isomorphic
from morphic_lab.lattice import all_subgroups, maximal_subgroups, normal_subgroups
from morphic_lab.morphic import (
    PredicateReport,
    all_maximal_isomorphic,
    extract_triple,
    images_properties,
    is_ea_morphic,
    is_morphic,
    is_self_dual,
    k_contains_frattini_commutators,
    reverify,
)
from morphic_lab.triples import derived_of, verify_morphic_triple
from morphic_lab.fplinalg import full_space

TINY = ["abelian:2:1,1", "abelian:2:2,2", "abelian:2:1,2", "dihedral:8", "quaternion:2:8",
        "heisenberg:3", "modular_maximal_cyclic:3:3", "abelian:3:1,1", "dihedral:2:16",
        "quaternion:2:16", "modular_maximal_cyclic:2:4", "dihedral:8*abelian:2:1"]


def iso(a, b):
    return are_isomorphic(a, b).isomorphic


def oracle(g):
    """Direct pairwise evaluation of every predicate, no class tables."""
    normals = normal_subgroups(g)
    subs = all_subgroups(g).all
    quot = [G.quotient_group(g, n) for n in normals]
    ngrp = [n.as_group() for n in normals]
    k = len(normals)
    qn = [[iso(quot[i], ngrp[j]) for j in range(k)] for i in range(k)]
    morphic = all(qn[j][i] for i in range(k) for j in range(k) if qn[i][j])
    ea = True
    for i in range(k):
        if G.is_elementary_abelian(ngrp[i]) or G.is_elementary_abelian(quot[i]):
            ms = [j for j in range(k) if qn[j][i]]
            if not ms or not all(qn[i][j] for j in ms):
                ea = False
    sg = [h.as_group() for h in subs]
    sub_is_quot = all(any(iso(h, q) for q in quot) for h in sg)
    quot_is_sub = all(any(iso(q, h) for h in sg) for q in quot)
    quot_is_normal = all(any(iso(q, n) for n in ngrp) for q in quot)
    maxes = [m.as_group() for m in maximal_subgroups(g)] if g.order > 1 else []
    allmax = all(iso(maxes[0], m) for m in maxes)
    return {
        "morphic": morphic,
        "ea-morphic": ea,
        "self-dual": sub_is_quot and quot_is_sub,
        "all-max-iso": allmax,
        "subgroups-are-images": sub_is_quot,
        "images-are-normal-subgroups": quot_is_normal,
    }


def reports(g):
    out = [is_morphic(g), is_ea_morphic(g), is_self_dual(g), all_maximal_isomorphic(g)]
    return out + list(images_properties(g))


@pytest.mark.parametrize("spec", TINY)
def test_predicates_match_pairwise_oracle(spec):
    g = make_family(spec)
    expected = oracle(g)
    for r in reports(g):
        assert r.verdict == expected[r.predicate], r.predicate
        assert reverify(g, r)


def test_morphic_examples():
    assert is_morphic(make_family("abelian:2:2,2")).verdict
    assert is_morphic(make_family("heisenberg:3")).verdict
    r = is_morphic(make_family("abelian:2:1,2"))
    assert not r.verdict
    g = make_family("abelian:2:1,2")
    n1, n2 = G.Subgroup(g, tuple(r.witness["N1"])), G.Subgroup(g, tuple(r.witness["N2"]))
    assert n1.order == 4 and n2.order == 2
    assert iso(G.quotient_group(g, n1), n2.as_group())
    assert not iso(G.quotient_group(g, n2), n1.as_group())


def test_ea_morphic_examples():
    assert is_ea_morphic(make_family("heisenberg:3")).verdict
    assert is_ea_morphic(G.from_mult_table([[0]])).verdict
    d8 = make_family("dihedral:8")
    r = is_ea_morphic(d8)
    assert not r.verdict and reverify(d8, r)


def test_ea_readings_differ_only_in_strength():
    for spec in TINY:
        g = make_family(spec)
        if is_ea_morphic(g, "paper").verdict:
            assert is_ea_morphic(g, "existential").verdict
    with pytest.raises(ValueError):
        is_ea_morphic(make_family("dihedral:8"), "sometimes")


def test_self_dual_examples():
    d8 = make_family("dihedral:8")
    r = is_self_dual(d8)
    assert not r.verdict and reverify(d8, r)
    assert r.witness["class"]["order"] == 4
    assert is_self_dual(make_family("heisenberg:3")).verdict
    assert is_self_dual(make_family("heisenberg:3*abelian:3:1")).verdict


def test_all_maximal_isomorphic_examples():
    assert all_maximal_isomorphic(make_family("heisenberg:3")).verdict
    r = all_maximal_isomorphic(make_family("abelian:2:1,2"))
    assert not r.verdict
    assert all_maximal_isomorphic(make_family("abelian:3:1,1,1")).verdict


def test_images_examples():
    a, b = images_properties(make_family("abelian:3:1,1"))
    assert a.verdict and b.verdict
    a, _ = images_properties(make_family("quaternion:2:8"))
    assert not a.verdict and len(a.witness["H"]) == 4
    a, b = images_properties(G.from_mult_table([[0]]))
    assert a.verdict and b.verdict


def test_preconditions():
    s3 = G.from_perm_generators(3, [[1, 2, 0], [1, 0, 2]])
    with pytest.raises(NotAPGroup):
        is_morphic(s3)
    with pytest.raises(OrderCapExceeded):
        is_morphic(make_family("abelian:2:10"))
    with pytest.raises(OrderCapExceeded):
        is_self_dual(make_family("abelian:2:1,2"), cap=4)


def test_reverify_rejects_forged_witness():
    g = make_family("abelian:2:2,2")
    fake = PredicateReport(g.name, "morphic", False, {"N1": [0], "N2": [0], "failed": "forged"})
    assert not reverify(g, fake)


@pytest.mark.parametrize("spec", ["heisenberg:3", "quaternion:2:8", "heisenberg:5", "dihedral:8"])
def test_extract_d2_examples(spec):
    g = make_family(spec)
    ex = extract_triple(g)
    assert (ex.d, ex.e) == (2, 1) and ex.k_order == 1
    assert ex.d == G.min_generators(g)
    assert verify_morphic_triple(ex.triple).is_morphic_triple
    assert derived_of(ex.triple, full_space(2, g.prime)) == full_space(1, g.prime)
    # beta on the lifted basis equals the commutator coordinates
    c = g.comm(ex.v_lifts[0], ex.v_lifts[1])
    assert ex.triple.beta[0][0] != 0 and c in G.commutator_subgroup(g)


def test_extract_errors():
    with pytest.raises(AbelianInput):
        extract_triple(make_family("abelian:3:1,1"))
    with pytest.raises(NotElementaryAbelian):
        extract_triple(make_family("dihedral:2:16"))


def test_frattini_commutators_in_k():
    for spec in ["heisenberg:3", "quaternion:2:8", "modular_maximal_cyclic:3:4", "heisenberg:3*abelian:3:1"]:
        assert k_contains_frattini_commutators(make_family(spec))


def test_report_json_shape():
    r = is_morphic(make_family("dihedral:8")).to_json()
    assert set(r) == {"group", "predicate", "verdict", "witness"}
    assert r["witness"]["N1"] == sorted(r["witness"]["N1"])

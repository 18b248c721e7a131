"""Morphic, ea-morphic and self-dual predicates, and extraction of (V, W, beta).

Every predicate works from one table of isomorphism classes per group: the
normal subgroups, the quotients by them and (for self-duality) all
subgroups are classified once, then the pair conditions become lookups.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from . import groups as G
from .errors import AbelianInput, InternalConsistencyError, NotAPGroup, NotElementaryAbelian, OrderCapExceeded
from .iso import SEARCH_BUDGET, IsoClassifier, are_isomorphic
from .lattice import LATTICE_CAP, all_subgroups, k_subgroup, maximal_subgroups, normal_subgroups
from .triples import Triple, verify_morphic_triple

EA_READINGS = ("paper", "existential")


@dataclass
class PredicateReport:
    group: str
    predicate: str
    verdict: bool
    witness: dict | None = None

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "predicate": self.predicate,
            "verdict": self.verdict,
            "witness": self.witness,
        }


def _els(h: G.Subgroup) -> list[int]:
    return list(h.elements)


class GroupAnalysis:
    """Memoized subgroup/quotient class tables for one group."""

    def __init__(self, g: G.FiniteGroup, budget: int = SEARCH_BUDGET, cap: int = LATTICE_CAP):
        self.g = g
        self.cap = cap
        self.classifier = IsoClassifier(budget)

    @classmethod
    def of(cls, g: G.FiniteGroup, budget: int = SEARCH_BUDGET, cap: int = LATTICE_CAP) -> GroupAnalysis:
        key = ("analysis", budget, cap)
        if key not in g._memo:
            g._memo[key] = cls(g, budget, cap)
        return g._memo[key]

    def require_p_group(self) -> None:
        if not self.g.is_p_group:
            raise NotAPGroup(f"{self.g.name} has order {self.g.order}, not a prime power")
        if self.g.order > self.cap:
            raise OrderCapExceeded(f"{self.g.name} has order {self.g.order} > cap {self.cap}")

    @cached_property
    def normals(self) -> list[G.Subgroup]:
        return normal_subgroups(self.g, self.cap)

    @cached_property
    def normal_classes(self) -> list[int]:
        return [self.classifier.classify(n.as_group()) for n in self.normals]

    @cached_property
    def quotient_classes(self) -> list[int]:
        out = []
        for n in self.normals:
            q = G.quotient_group(self.g, n, f"{self.g.name}/N{len(out)}")
            out.append(self.classifier.classify(q))
        return out

    @cached_property
    def subgroups(self) -> list[G.Subgroup]:
        return list(all_subgroups(self.g, self.cap).all)

    @cached_property
    def subgroup_classes(self) -> list[int]:
        return [self.classifier.classify(h.as_group()) for h in self.subgroups]

    @cached_property
    def ea_flags(self) -> list[tuple[bool, bool]]:
        """(N elementary abelian, G/N elementary abelian) per normal subgroup."""
        g = self.g
        phi = G.frattini_fast(g) if g.order > 1 else G.trivial(g)
        p = g.prime
        out = []
        for n in self.normals:
            n_ea = n.order == 1 or bool(
                (g.power_map(p)[n.array] == 0).all()
                and not (g.comm_table[np.ix_(n.array, n.array)] != 0).any()
            )
            # G/N is elementary abelian iff N contains Phi(G)
            q_ea = phi.issubset(n)
            out.append((n_ea, q_ea))
        return out


def _context(g, budget, cap) -> GroupAnalysis:
    ctx = GroupAnalysis.of(g, budget, cap)
    ctx.require_p_group()
    return ctx


def is_morphic(g: G.FiniteGroup, budget: int = SEARCH_BUDGET, cap: int = LATTICE_CAP) -> PredicateReport:
    """For all normal N1, N2: G/N1 ~ N2 implies G/N2 ~ N1."""
    ctx = _context(g, budget, cap)
    ncls, qcls = ctx.normal_classes, ctx.quotient_classes
    by_class: dict[int, list[int]] = {}
    for j, c in enumerate(ncls):
        by_class.setdefault(c, []).append(j)
    for i in range(len(ctx.normals)):
        for j in by_class.get(qcls[i], ()):
            if qcls[j] != ncls[i]:
                return PredicateReport(
                    g.name,
                    "morphic",
                    False,
                    {
                        "N1": _els(ctx.normals[i]),
                        "N2": _els(ctx.normals[j]),
                        "failed": "G/N1 ~ N2 but G/N2 !~ N1",
                    },
                )
    return PredicateReport(g.name, "morphic", True)


def is_ea_morphic(
    g: G.FiniteGroup,
    reading: str = "paper",
    budget: int = SEARCH_BUDGET,
    cap: int = LATTICE_CAP,
) -> PredicateReport:
    """Morphic condition restricted to N with N or G/N elementary abelian.

    ``reading="paper"``: some normal M has G/M ~ N, and every such M has
    G/N ~ M. ``reading="existential"``: some normal M has both.
    """
    if reading not in EA_READINGS:
        raise ValueError(f"unknown ea reading {reading!r}")
    ctx = _context(g, budget, cap)
    ncls, qcls = ctx.normal_classes, ctx.quotient_classes
    name = "ea-morphic" if reading == "paper" else "ea-morphic-existential"
    for i, (n_ea, q_ea) in enumerate(ctx.ea_flags):
        if not (n_ea or q_ea):
            continue
        ms = [j for j, c in enumerate(qcls) if c == ncls[i]]
        n = ctx.normals[i]
        if not ms:
            return PredicateReport(g.name, name, False, {"N": _els(n), "failed": "no normal M with G/M ~ N"})
        good = [j for j in ms if ncls[j] == qcls[i]]
        if reading == "existential" and not good:
            return PredicateReport(
                g.name, name, False,
                {"N": _els(n), "M": _els(ctx.normals[ms[0]]), "failed": "no M with G/M ~ N and G/N ~ M"},
            )
        if reading == "paper" and len(good) != len(ms):
            bad = next(j for j in ms if ncls[j] != qcls[i])
            return PredicateReport(
                g.name, name, False,
                {"N": _els(n), "M": _els(ctx.normals[bad]), "failed": "G/M ~ N but G/N !~ M"},
            )
    return PredicateReport(g.name, name, True)


def is_self_dual(g: G.FiniteGroup, budget: int = SEARCH_BUDGET, cap: int = LATTICE_CAP) -> PredicateReport:
    """Subgroup iso classes coincide with quotient iso classes."""
    ctx = GroupAnalysis.of(g, budget, cap)
    if g.order > cap:
        raise OrderCapExceeded(f"{g.name} has order {g.order} > cap {cap}")
    scls, qcls = ctx.subgroup_classes, ctx.quotient_classes
    qset = set(qcls)
    for h, c in zip(ctx.subgroups, scls):
        if c not in qset:
            return PredicateReport(
                g.name, "self-dual", False,
                {"side": "subgroup-only", "H": _els(h), "class": ctx.classifier.describe(c)},
            )
    sset = set(scls)
    for n, c in zip(ctx.normals, qcls):
        if c not in sset:
            return PredicateReport(
                g.name, "self-dual", False,
                {"side": "quotient-only", "N": _els(n), "class": ctx.classifier.describe(c)},
            )
    return PredicateReport(g.name, "self-dual", True)


def all_maximal_isomorphic(g: G.FiniteGroup, budget: int = SEARCH_BUDGET, cap: int = LATTICE_CAP) -> PredicateReport:
    ctx = _context(g, budget, cap)
    maxes = maximal_subgroups(g)
    classes = [ctx.classifier.classify(m.as_group()) for m in maxes]
    for m, c in zip(maxes, classes):
        if c != classes[0]:
            return PredicateReport(
                g.name, "all-max-iso", False, {"M1": _els(maxes[0]), "M2": _els(m)}
            )
    return PredicateReport(g.name, "all-max-iso", True)


def images_properties(
    g: G.FiniteGroup, budget: int = SEARCH_BUDGET, cap: int = LATTICE_CAP
) -> tuple[PredicateReport, PredicateReport]:
    """(every subgroup is a quotient, every quotient is a normal subgroup)."""
    ctx = GroupAnalysis.of(g, budget, cap)
    if g.order > cap:
        raise OrderCapExceeded(f"{g.name} has order {g.order} > cap {cap}")
    qset = set(ctx.quotient_classes)
    first = PredicateReport(g.name, "subgroups-are-images", True)
    for h, c in zip(ctx.subgroups, ctx.subgroup_classes):
        if c not in qset:
            first = PredicateReport(g.name, "subgroups-are-images", False, {"H": _els(h)})
            break
    nset = set(ctx.normal_classes)
    second = PredicateReport(g.name, "images-are-normal-subgroups", True)
    for n, c in zip(ctx.normals, ctx.quotient_classes):
        if c not in nset:
            second = PredicateReport(g.name, "images-are-normal-subgroups", False, {"N": _els(n)})
            break
    return first, second


# -- witness re-verification --------------------------------------------------


def _sub(g, els) -> G.Subgroup:
    return G.Subgroup(g, tuple(els))


def _iso(a, b) -> bool:
    return are_isomorphic(a, b).isomorphic


def _quot(g, els) -> G.FiniteGroup:
    return G.quotient_group(g, _sub(g, els))


def _is_ea(h: G.FiniteGroup) -> bool:
    return G.is_elementary_abelian(h)


def reverify(g: G.FiniteGroup, report: PredicateReport) -> bool:
    """Independently recheck a FALSE report's witness from fresh quotients."""
    if report.verdict:
        return True
    w = report.witness or {}
    pred = report.predicate
    if pred == "morphic":
        n1, n2 = _sub(g, w["N1"]), _sub(g, w["N2"])
        return _iso(_quot(g, w["N1"]), n2.as_group()) and not _iso(_quot(g, w["N2"]), n1.as_group())
    if pred.startswith("ea-morphic"):
        n = _sub(g, w["N"])
        qn = _quot(g, w["N"])
        if not (_is_ea(n.as_group()) or _is_ea(qn)):
            return False
        if "M" not in w:
            return not any(_iso(G.quotient_group(g, m), n.as_group()) for m in normal_subgroups(g))
        m = _sub(g, w["M"])
        if pred == "ea-morphic":
            return _iso(_quot(g, w["M"]), n.as_group()) and not _iso(qn, m.as_group())
        return not any(
            _iso(G.quotient_group(g, mm), n.as_group()) and _iso(qn, mm.as_group())
            for mm in normal_subgroups(g)
        )
    if pred == "self-dual":
        if w["side"] == "subgroup-only":
            h = _sub(g, w["H"]).as_group()
            return not any(_iso(G.quotient_group(g, n), h) for n in normal_subgroups(g))
        q = _quot(g, w["N"])
        return not any(_iso(h.as_group(), q) for h in all_subgroups(g).all)
    if pred == "all-max-iso":
        return not _iso(_sub(g, w["M1"]).as_group(), _sub(g, w["M2"]).as_group())
    if pred == "subgroups-are-images":
        h = _sub(g, w["H"]).as_group()
        return not any(_iso(G.quotient_group(g, n), h) for n in normal_subgroups(g))
    if pred == "images-are-normal-subgroups":
        q = _quot(g, w["N"])
        return not any(_iso(n.as_group(), q) for n in normal_subgroups(g))
    raise ValueError(f"unknown predicate {pred!r}")


# -- triple extraction ----------------------------------------------------------


@dataclass
class TripleExtraction:
    group: str
    p: int
    d: int
    e: int
    v_lifts: list[int]
    w_lifts: list[int]
    triple: Triple
    k_order: int
    derived_order: int
    checks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "p": self.p,
            "d": self.d,
            "e": self.e,
            "v_lifts": self.v_lifts,
            "w_lifts": self.w_lifts,
            "k_order": self.k_order,
            "derived_order": self.derived_order,
            "triple": self.triple.to_json(),
            "checks": self.checks,
        }


class _CosetCoords:
    """Coordinates of the cosets xN (x in a subgroup A) in an elementary abelian A/N."""

    def __init__(self, g: G.FiniteGroup, a: G.Subgroup, n: G.Subgroup, basis: list[int], p: int):
        self.g, self.n, self.p = g, n, p
        self.label = {}
        for coeffs in product(range(p), repeat=len(basis)):
            x = 0
            for b, c in zip(basis, coeffs):
                x = g.mul(x, g.power(b, c))
            key = self._coset(x)
            if key in self.label:
                raise NotElementaryAbelian("chosen lifts are not independent")
            self.label[key] = coeffs
        if len(self.label) * n.order != a.order:
            raise NotElementaryAbelian("lifts do not span the quotient")

    def _coset(self, x: int) -> int:
        return int(self.g.table[x, self.n.array].min())

    def __call__(self, x: int) -> tuple[int, ...]:
        return self.label[self._coset(x)]


def _quotient_basis(g: G.FiniteGroup, a: G.Subgroup, n: G.Subgroup) -> list[int]:
    """Smallest-index lifts of a basis of the elementary abelian A/N."""
    basis: list[int] = []
    span = n.mask.copy()
    for x in a.elements:
        if not span[x]:
            basis.append(x)
            span = G.closure_mask(g, basis + list(n.elements))
    return basis


def extract_triple(g: G.FiniteGroup, samples: int = 100, seed: int = 0) -> TripleExtraction:
    """The triple (G/Phi(G), G'/K, (a, b) -> [a, b]K) of a nonabelian p-group."""
    if not g.is_p_group:
        raise NotAPGroup(f"{g.name} is not a p-group")
    if g.is_abelian:
        raise AbelianInput(f"{g.name} is abelian")
    p = g.prime
    phi = G.frattini_subgroup(g)
    derived = G.commutator_subgroup(g)
    k = k_subgroup(g)
    if not (k.mask[g.power_map(p)[derived.array]].all()
            and k.mask[g.comm_table[np.ix_(derived.array, derived.array)]].all()):
        raise NotElementaryAbelian(f"G'/K is not elementary abelian in {g.name}")
    v_lifts = G.minimal_generating_set(g)
    d = len(v_lifts)
    if d != G.min_generators(g):
        raise InternalConsistencyError("generating set size differs from d(G)")
    w_lifts = _quotient_basis(g, derived, k)
    e = len(w_lifts)
    wcoords = _CosetCoords(g, derived, k, w_lifts, p)
    values = {}
    for i in range(d):
        for j in range(i + 1, d):
            values[(i, j)] = wcoords(g.comm(v_lifts[i], v_lifts[j]))
    triple = Triple.from_pairs(p, d, e, values)

    # beta must not depend on the representatives: compare [x, y]K for random
    # lifts of random u, v against the bilinear extension of the tensor.
    rng = random.Random(seed)
    for _ in range(samples):
        u = [rng.randrange(p) for _ in range(d)]
        v = [rng.randrange(p) for _ in range(d)]
        x = _lift(g, v_lifts, u, phi, rng)
        y = _lift(g, v_lifts, v, phi, rng)
        got = wcoords(g.comm(x, y))
        if got != triple.apply(u, v):
            raise InternalConsistencyError(
                f"beta is not well defined on {g.name}: [x, y]K = {got}, tensor gives {triple.apply(u, v)}"
            )
    verdict = verify_morphic_triple(triple)
    checks = {
        "well_defined_samples": samples,
        "morphic_triple": verdict.is_morphic_triple,
        "failed_condition": verdict.failed_condition,
        "dim_bound": e >= d - 1,
    }
    return TripleExtraction(g.name, p, d, e, list(v_lifts), w_lifts, triple, k.order, derived.order, checks)


def _lift(g, basis, coeffs, phi, rng) -> int:
    x = 0
    for b, c in zip(basis, coeffs):
        x = g.mul(x, g.power(b, c))
    return g.mul(x, phi.elements[rng.randrange(phi.order)])


def k_contains_frattini_commutators(g: G.FiniteGroup) -> bool:
    """[G, Phi(G)] <= K and Phi(G)' <= K."""
    phi = G.frattini_subgroup(g)
    k = k_subgroup(g)
    whole = G.whole(g)
    return G.commutator_of(whole, phi).issubset(k) and G.commutator_of(phi, phi).issubset(k)

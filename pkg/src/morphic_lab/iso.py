"""Isomorphism testing: invariant fingerprints refute, generator search certifies."""

from __future__ import annotations

from collections import Counter
from dataclasses import astuple, dataclass, fields

import numpy as np

from .errors import InternalConsistencyError, SearchBudgetExceeded
from .groups import (
    FiniteGroup,
    Subgroup,
    abelian_invariants,
    center,
    closure_mask,
    commutator_subgroup,
    conjugacy_classes,
    exponent,
    frattini_fast,
    minimal_generating_set,
    quotient_group,
)

SEARCH_BUDGET = 10**7

__all__ = [
    "IsoFingerprint",
    "IsoWitness",
    "IsoResult",
    "IsoClassifier",
    "abelian_invariants",
    "are_isomorphic",
    "fingerprint",
    "invariant_value",
]


@dataclass(frozen=True)
class IsoFingerprint:
    order: int
    abelian: bool
    element_orders: tuple
    class_sizes: tuple
    center_order: int
    derived_order: int
    exponent: int
    abelianization: tuple
    element_profile: tuple


@dataclass(frozen=True)
class IsoWitness:
    mapping: tuple[int, ...]

    def verify(self, a: FiniteGroup, b: FiniteGroup) -> bool:
        m = np.asarray(self.mapping, dtype=np.int64)
        if len(m) != a.order or a.order != b.order or m[0] != 0:
            return False
        if len(np.unique(m)) != a.order:
            return False
        return bool(np.array_equal(m[a.table], b.table[np.ix_(m, m)]))


@dataclass(frozen=True)
class IsoResult:
    isomorphic: bool
    witness: IsoWitness | None = None
    invariant: str | None = None
    nodes: int = 0

    def __bool__(self):
        return self.isomorphic


def _class_size_of(g: FiniteGroup) -> np.ndarray:
    memo = g._memo
    if "class_size_of" not in memo:
        sizes = np.ones(g.order, dtype=np.int64)
        for cls in conjugacy_classes(g):
            sizes[list(cls)] = len(cls)
        memo["class_size_of"] = sizes
    return memo["class_size_of"]


def _order_modulo(g: FiniteGroup, n: Subgroup) -> np.ndarray:
    """Order of xN in G/N for every x (N normal)."""
    out = np.zeros(g.order, dtype=np.int64)
    idx = np.arange(g.order)
    cur = idx.copy()
    k = 1
    while True:
        hit = n.mask[cur] & (out == 0)
        out[hit] = k
        if (out > 0).all():
            return out
        cur = g.table[cur, idx]
        k += 1


def _element_invariants(g: FiniteGroup) -> np.ndarray:
    """Per-element labels preserved by every automorphism, one row per element."""
    memo = g._memo
    if "element_invariants" in memo:
        return memo["element_invariants"]
    n = g.order
    orders = g.element_orders
    cols = [orders, _class_size_of(g)]
    if g.order > 1 and g.prime:
        roots = np.bincount(g.power_map(g.prime), minlength=n)
        cols += [roots, frattini_fast(g).mask.astype(np.int64)]
    else:
        cols += [np.zeros(n, dtype=np.int64)] * 2
    if g.is_abelian:
        ones = np.ones(n, dtype=np.int64)
        cols += [(np.arange(n) == 0).astype(np.int64), ones, ones, orders, ones]
    else:
        derived = commutator_subgroup(g)
        z = center(g)
        q = quotient_group(g, z)
        z2 = center(q).mask[q.projection]
        cols += [
            derived.mask.astype(np.int64),
            z.mask.astype(np.int64),
            z2.astype(np.int64),
            _order_modulo(g, derived),
            _order_modulo(g, z),
        ]
    inv = np.stack(cols, axis=1)
    inv.setflags(write=False)
    memo["element_invariants"] = inv
    return inv


def fingerprint(g: FiniteGroup) -> IsoFingerprint:
    memo = g._memo
    if "fingerprint" in memo:
        return memo["fingerprint"]
    orders = g.element_orders
    derived = commutator_subgroup(g)
    if g.is_abelian:
        ab = tuple(abelian_invariants(g))
    else:
        ab = tuple(abelian_invariants(quotient_group(g, derived)))
    rows, counts = np.unique(_element_invariants(g), axis=0, return_counts=True)
    fp = IsoFingerprint(
        order=g.order,
        abelian=g.is_abelian,
        element_orders=tuple(sorted(Counter(orders.tolist()).items())),
        class_sizes=tuple(sorted(Counter(len(c) for c in conjugacy_classes(g)).items())),
        center_order=center(g).order,
        derived_order=derived.order,
        exponent=exponent(g),
        abelianization=ab,
        element_profile=tuple(zip(map(tuple, rows.tolist()), counts.tolist())),
    )
    memo["fingerprint"] = fp
    return fp


def invariant_value(g: FiniteGroup, name: str):
    """Recompute one named fingerprint field from scratch."""
    return getattr(fingerprint(g), name)


def _relative_orders(g: FiniteGroup, xs: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Least m >= 1 with x^m in the subgroup given by mask, for each x in xs."""
    out = np.zeros(len(xs), dtype=np.int64)
    cur = xs.copy()
    m = 1
    while True:
        hit = mask[cur] & (out == 0)
        out[hit] = m
        if (out > 0).all():
            return out
        cur = g.table[cur, xs]
        m += 1


class _Search:
    def __init__(self, a: FiniteGroup, b: FiniteGroup, budget: int, refine: bool):
        self.a, self.b = a, b
        self.budget = budget
        self.nodes = 0
        gens = minimal_generating_set(a) if a.is_p_group else list(a.generators)
        if refine:
            inv_a, inv_b = _element_invariants(a), _element_invariants(b)
        else:
            inv_a, inv_b = a.element_orders[:, None], b.element_orders[:, None]
        self.inv_a, self.inv_b = inv_a, inv_b
        cands = []
        for x in gens:
            ok = (inv_b == inv_a[x]).all(axis=1)
            cands.append(np.nonzero(ok)[0].tolist())
        order = sorted(range(len(gens)), key=lambda i: (len(cands[i]), i))
        self.gens = [gens[i] for i in order]
        self.cands = [cands[i] for i in order]
        key = ("iso_prefix", tuple(self.gens))
        if key not in a._memo:
            a._memo[key] = [self._bfs(self.gens[:k]) for k in range(len(self.gens) + 1)]
        self.prefix = a._memo[key]
        self.rel_orders = []
        for k, x in enumerate(self.gens):
            mask = np.zeros(a.order, dtype=bool)
            mask[self.prefix[k][0]] = True
            self.rel_orders.append(int(_relative_orders(a, np.array([x]), mask)[0]))

    def _bfs(self, gens):
        """Elements of <gens> in BFS layers: (elements, [(layer, parents, gen idx)])."""
        t = self.a.table
        seen = np.zeros(self.a.order, dtype=bool)
        seen[0] = True
        frontier = np.array([0], dtype=np.int64)
        layers = []
        els = [frontier]
        gens_arr = np.asarray(gens, dtype=np.int64)
        while frontier.size and gens_arr.size:
            prod = t[frontier[:, None], gens_arr[None, :]]
            par = np.repeat(frontier, len(gens_arr))
            via = np.tile(np.arange(len(gens_arr)), frontier.size)
            flat = prod.ravel()
            _, first = np.unique(flat, return_index=True)
            keep = first[~seen[flat[first]]]
            new = flat[keep]
            seen[new] = True
            layers.append((new, par[keep], via[keep]))
            els.append(new)
            frontier = new
        return np.concatenate(els), layers

    def run(self) -> IsoWitness | None:
        # all candidates together must generate b, or no choice of images can
        pool = sorted({y for c in self.cands for y in c})
        if not closure_mask(self.b, pool).all():
            return None
        phi = np.full(self.a.order, -1, dtype=np.int64)
        phi[0] = 0
        return self._extend([], phi)

    def _image(self, imgs):
        """The map on <gens[:k]> induced by imgs, or None if inconsistent."""
        k = len(imgs)
        els, layers = self.prefix[k]
        tb = self.b.table
        img_arr = np.asarray(imgs, dtype=np.int64)
        phi = np.full(self.a.order, -1, dtype=np.int64)
        phi[0] = 0
        for new, par, via in layers:
            phi[new] = tb[phi[par], img_arr[via]]
        vals = phi[els]
        if len(np.unique(vals)) != len(els):
            return None
        # an isomorphism preserves every automorphism-invariant label
        if not np.array_equal(self.inv_b[vals], self.inv_a[els]):
            return None
        ta = self.a.table
        for j, s in enumerate(self.gens[:k]):
            if not np.array_equal(phi[ta[els, s]], tb[vals, imgs[j]]):
                return None
        return phi

    def _extend(self, imgs, phi):
        k = len(imgs)
        if k == len(self.gens):
            return IsoWitness(tuple(int(x) for x in phi))
        els_prev = self.prefix[k][0]
        prev_img = np.zeros(self.b.order, dtype=bool)
        prev_img[phi[els_prev]] = True
        # x^m lands in the prefix subgroup exactly when phi(x)^m lands in its image
        cands = np.asarray(self.cands[k], dtype=np.int64)
        if cands.size:
            cands = cands[_relative_orders(self.b, cands, prev_img) == self.rel_orders[k]]
        for y in cands.tolist():
            self.nodes += 1
            if self.nodes > self.budget:
                raise SearchBudgetExceeded(
                    f"isomorphism search {self.a.name} vs {self.b.name} exceeded {self.budget} nodes"
                )
            cand = imgs + [y]
            nxt = self._image(cand)
            if nxt is None:
                continue
            found = self._extend(cand, nxt)
            if found is not None:
                return found
        return None


def are_isomorphic(
    a: FiniteGroup,
    b: FiniteGroup,
    budget: int = SEARCH_BUDGET,
    use_fingerprint: bool = True,
    refine: bool | None = None,
) -> IsoResult:
    """Decide a ~ b. ``use_fingerprint`` refutes by invariants before any search;
    ``refine`` (default: same as use_fingerprint) prunes search candidates by
    per-element invariant labels instead of element orders alone."""
    if a.order != b.order:
        return IsoResult(False, invariant="order")
    if use_fingerprint:
        fa, fb = fingerprint(a), fingerprint(b)
        if fa != fb:
            for f, x, y in zip(fields(fa), astuple(fa), astuple(fb)):
                if x != y:
                    return IsoResult(False, invariant=f.name)
    nodes = 0
    if np.array_equal(a.table, b.table):
        w = IsoWitness(tuple(range(a.order)))
    else:
        search = _Search(a, b, budget, refine=use_fingerprint if refine is None else refine)
        w = search.run()
        nodes = search.nodes
        if w is None:
            return IsoResult(False, invariant="exhausted-search", nodes=nodes)
    if not w.verify(a, b):
        raise InternalConsistencyError(f"search produced an invalid witness for {a.name} -> {b.name}")
    return IsoResult(True, witness=w, nodes=nodes)


class IsoClassifier:
    """Assigns isomorphism-class ids, bucketing by fingerprint first."""

    def __init__(self, budget: int = SEARCH_BUDGET):
        self.budget = budget
        self.buckets: dict[IsoFingerprint, list[int]] = {}
        self.reps: list[FiniteGroup] = []
        self.searches = 0

    def classify(self, h: FiniteGroup) -> int:
        fp = fingerprint(h)
        bucket = self.buckets.setdefault(fp, [])
        for cid in bucket:
            rep = self.reps[cid]
            if rep is h:
                return cid
            self.searches += 1
            if are_isomorphic(rep, h, self.budget):
                return cid
        cid = len(self.reps)
        self.reps.append(h)
        bucket.append(cid)
        return cid

    def describe(self, cid: int) -> dict:
        rep = self.reps[cid]
        fp = fingerprint(rep)
        return {
            "order": fp.order,
            "abelian": fp.abelian,
            "exponent": fp.exponent,
            "abelian_invariants": list(fp.abelianization) if fp.abelian else None,
            "example": rep.name,
        }

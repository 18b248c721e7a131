"""Subgroup lattices, normal and maximal subgroups, and K = meet of the M'."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import fplinalg
from .errors import AbelianInput, InternalConsistencyError, NotAPGroup, OrderCapExceeded
from .groups import (
    FiniteGroup,
    Subgroup,
    closure_mask,
    commutator_of,
    commutator_subgroup,
    is_normal,
    whole,
)

LATTICE_CAP = 512


@dataclass(frozen=True)
class SubgroupLattice:
    parent: FiniteGroup
    all: tuple[Subgroup, ...]
    normal_flags: tuple[bool, ...]

    def __len__(self):
        return len(self.all)

    def normal(self) -> list[Subgroup]:
        return [h for h, f in zip(self.all, self.normal_flags) if f]


def _key(h: Subgroup):
    return (h.order, h.elements)


def _check_cap(g: FiniteGroup, cap: int) -> None:
    if g.order > cap:
        raise OrderCapExceeded(f"{g.name} has order {g.order} > lattice cap {cap}")


def _extend_by_p(g: FiniteGroup, normal_only: bool) -> list[np.ndarray]:
    """Layered search for p-groups: every subgroup J > 1 has some H < J of index p
    with J = H<x>; for normal J, H can be taken normal in G as well."""
    p = g.prime
    t = g.table
    n = g.order
    pw = g.power_map(p)
    allx = np.arange(n)
    start = np.zeros(n, dtype=bool)
    start[0] = True
    found = {start.tobytes(): start}
    level = [start]
    while level:
        nxt_level = []
        for hm in level:
            els = np.nonzero(hm)[0]
            cand = ~hm & hm[pw]
            if not g.is_abelian:
                if normal_only:
                    cand &= hm[g.comm_table].all(axis=1)
                else:
                    conj = t[t[g.inverses[:, None], els[None, :]], allx[:, None]]
                    cand &= hm[conj].all(axis=1)
            covered = hm.copy()
            for x in np.nonzero(cand)[0]:
                if covered[x]:
                    continue
                jm = hm.copy()
                cur = x
                for _ in range(p - 1):
                    jm[t[els, cur]] = True
                    cur = t[cur, x]
                covered |= jm
                key = jm.tobytes()
                if key not in found:
                    found[key] = jm
                    nxt_level.append(jm)
        level = nxt_level
    return list(found.values())


def _join_closure(g: FiniteGroup) -> list[np.ndarray]:
    cyclic = {}
    for x in range(g.order):
        m = closure_mask(g, [x])
        cyclic.setdefault(m.tobytes(), m)
    found = dict(cyclic)
    queue = list(cyclic.values())
    cyc = list(cyclic.values())
    while queue:
        h = queue.pop()
        for c in cyc:
            if (c & ~h).any():
                j = closure_mask(g, np.nonzero(h | c)[0])
                k = j.tobytes()
                if k not in found:
                    found[k] = j
                    queue.append(j)
    return list(found.values())


def all_subgroups(g: FiniteGroup, cap: int = LATTICE_CAP) -> SubgroupLattice:
    _check_cap(g, cap)
    key = "all_subgroups"
    if key not in g._memo:
        masks = _extend_by_p(g, False) if g.prime else _join_closure(g)
        subs = sorted((Subgroup.from_mask(g, m) for m in masks), key=_key)
        flags = tuple(is_normal(g, h) for h in subs)
        g._memo[key] = SubgroupLattice(g, tuple(subs), flags)
    return g._memo[key]


def normal_subgroups(g: FiniteGroup, cap: int = LATTICE_CAP) -> list[Subgroup]:
    _check_cap(g, cap)
    key = "normal_subgroups"
    if key not in g._memo:
        if g.prime:
            masks = _extend_by_p(g, True)
            g._memo[key] = sorted((Subgroup.from_mask(g, m) for m in masks), key=_key)
        else:
            g._memo[key] = all_subgroups(g, cap).normal()
    return g._memo[key]


def hom_to_cyclic_p(g: FiniteGroup) -> tuple[np.ndarray, fplinalg.SubspaceFp]:
    """Hom(G, Z/p) as a subspace of F_p^k, k = len(generators).

    Returns the coefficient matrix C (element -> coefficients of the
    generator values) and the solution space; phi(x) = C[x] . v.
    """
    p = g.prime
    gens = g.generators
    k = len(gens)
    parent, via, order = g.cayley_tree
    coeff = np.zeros((g.order, k), dtype=np.int64)
    for x in order[1:]:
        coeff[x] = coeff[parent[x]]
        coeff[x, via[x]] = (coeff[x, via[x]] + 1) % p
    rows = []
    for j, s in enumerate(gens):
        ys = g.table[np.arange(g.order), s]
        d = (coeff - coeff[ys]) % p
        d[:, j] = (d[:, j] + 1) % p
        rows.append(np.unique(d, axis=0))
    cons = np.unique(np.vstack(rows), axis=0)
    cons = [r for r in cons.tolist() if any(r)]
    if not cons:
        space = fplinalg.full_space(k, p)
    else:
        # v with cons . v = 0 is the left kernel of cons^T
        space = fplinalg.kernel([list(col) for col in zip(*cons)], p)
    return coeff, space


def maximal_subgroups(g: FiniteGroup) -> list[Subgroup]:
    """Index-p subgroups of a p-group, found as kernels of maps onto Z/p."""
    if not g.is_p_group:
        raise NotAPGroup(f"{g.name} is not a p-group")
    key = "maximal_subgroups"
    if key in g._memo:
        return g._memo[key]
    if g.order == 1:
        g._memo[key] = []
        return []
    p = g.prime
    coeff, space = hom_to_cyclic_p(g)
    out = []
    seen = set()
    for coeffs in product(range(p), repeat=space.dim):
        if not any(coeffs) or next(c for c in coeffs if c) != 1:
            continue
        v = np.asarray(fplinalg.combine(coeffs, space.basis, p, space.ambient_dim))
        mask = (coeff @ v) % p == 0
        if mask.tobytes() in seen:
            raise InternalConsistencyError("two distinct maps to Z/p share a kernel")
        seen.add(mask.tobytes())
        out.append(Subgroup.from_mask(g, mask))
    out.sort(key=_key)
    for m in out:
        if m.order * p != g.order:
            raise InternalConsistencyError(f"kernel of index {g.order // m.order} in {g.name}")
    g._memo[key] = out
    return out


def k_subgroup(g: FiniteGroup) -> Subgroup:
    """K = intersection of M' over the maximal subgroups M of G."""
    if not g.is_p_group:
        raise NotAPGroup(f"{g.name} is not a p-group")
    if g.is_abelian:
        raise AbelianInput(f"{g.name} is abelian; K is trivial and no triple exists")
    key = "k_subgroup"
    if key not in g._memo:
        mask = whole(g).mask.copy()
        for m in maximal_subgroups(g):
            mask &= commutator_of(m, m).mask
        g._memo[key] = Subgroup.from_mask(g, mask)
    return g._memo[key]


def maximal_derived_indices(g: FiniteGroup) -> list[int]:
    """|G'/M'| for each maximal subgroup M."""
    dg = commutator_subgroup(g).order
    return [dg // commutator_of(m, m).order for m in maximal_subgroups(g)]


def derived_over_k_elementary(g: FiniteGroup) -> bool:
    """Whether G'/K is elementary abelian."""
    p = g.prime
    k = k_subgroup(g)
    dg = commutator_subgroup(g)
    if not k.mask[g.power_map(p)[dg.array]].all():
        return False
    return bool(k.mask[g.comm_table[np.ix_(dg.array, dg.array)]].all())

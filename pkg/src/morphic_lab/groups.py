"""Finite groups as multiplication tables.

Elements are the integers 0..n-1 and 0 is always the identity. Tables are
numpy int32 arrays; subgroups are sorted tuples of element indices.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import cached_property, wraps
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .errors import (
    ClosureExceedsCap,
    InternalConsistencyError,
    NoIdentity,
    NoInverse,
    NotAbelian,
    NotAPermutation,
    NotAPGroup,
    NotAssociative,
    NotNormal,
    ParentMismatch,
)

MAX_ORDER = 4096
FULL_ASSOC_CHECK = 512
ASSOC_SAMPLES = 10**6


def prime_power(n: int) -> tuple[int, int] | None:
    """(p, k) with n = p**k, or None. The trivial order 1 gives None."""
    if n < 2:
        return None
    p = next(q for q in range(2, n + 1) if n % q == 0)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return (p, k) if n == 1 else None


def memoized(fn):
    """Cache a one-argument function of a group on the group itself."""

    @wraps(fn)
    def wrapper(g):
        memo = g._memo
        key = fn.__name__
        if key not in memo:
            memo[key] = fn(g)
        return memo[key]

    return wrapper


class FiniteGroup:
    """Validated group given by its multiplication table; immutable."""

    def __init__(self, table, name: str = "G", generators: Sequence[int] | None = None):
        table = np.ascontiguousarray(table, dtype=np.int32)
        table.setflags(write=False)
        self.table = table
        self.order = int(table.shape[0])
        self.name = name
        inv = np.empty(self.order, dtype=np.int32)
        rows, cols = np.nonzero(table == 0)
        inv[rows] = cols
        inv.setflags(write=False)
        self.inverses = inv
        self._generators = None if generators is None else [int(x) for x in generators if x]
        self._memo: dict = {}

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order})"

    def __len__(self):
        return self.order

    # -- element arithmetic --------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverses[a])

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        result, base = 0, int(a)
        while k:
            if k & 1:
                result = int(self.table[result, base])
            base = int(self.table[base, base])
            k >>= 1
        return result

    def comm(self, a: int, b: int) -> int:
        """[a, b] = a^-1 b^-1 a b."""
        t = self.table
        return int(t[t[self.inverses[a], self.inverses[b]], t[a, b]])

    # -- cached structure ----------------------------------------------------

    @cached_property
    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    @cached_property
    def prime(self) -> int | None:
        pp = prime_power(self.order)
        return pp[0] if pp else None

    @property
    def is_p_group(self) -> bool:
        return self.order == 1 or self.prime is not None

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        orders[0] = 1
        idx = np.arange(n)
        cur = idx.copy()
        k = 1
        while (orders == 0).any():
            cur = self.table[cur, idx]
            k += 1
            hit = (cur == 0) & (orders == 0)
            orders[hit] = k
        orders.setflags(write=False)
        return orders

    @cached_property
    def comm_table(self) -> np.ndarray:
        t, inv = self.table, self.inverses
        c = t[t[inv[:, None], inv[None, :]], t]
        c.setflags(write=False)
        return c

    def power_map(self, k: int) -> np.ndarray:
        key = ("power_map", k)
        if key not in self._memo:
            idx = np.arange(self.order)
            result = np.zeros(self.order, dtype=np.int32)
            base = idx.astype(np.int32)
            while k:
                if k & 1:
                    result = self.table[result, base]
                base = self.table[base, base]
                k >>= 1
            self._memo[key] = result
        return self._memo[key]

    @cached_property
    def generators(self) -> list[int]:
        """A generating set; the construction one when known, else greedy."""
        if self._generators is not None:
            return list(self._generators)
        gens: list[int] = []
        mask = np.zeros(self.order, dtype=bool)
        mask[0] = True
        for x in range(self.order):
            if not mask[x]:
                gens.append(x)
                mask = closure_mask(self, gens)
        return gens

    @cached_property
    def cayley_tree(self) -> tuple[np.ndarray, np.ndarray, list[int]]:
        """BFS tree over ``generators``: (order, parent, gen-index) arrays."""
        gens = self.generators
        parent = np.full(self.order, -1, dtype=np.int64)
        via = np.full(self.order, -1, dtype=np.int64)
        seen = np.zeros(self.order, dtype=bool)
        seen[0] = True
        order = [0]
        i = 0
        while i < len(order):
            x = order[i]
            for k, g in enumerate(gens):
                y = int(self.table[x, g])
                if not seen[y]:
                    seen[y] = True
                    parent[y] = x
                    via[y] = k
                    order.append(y)
            i += 1
        return parent, via, order


def closure_mask(g: FiniteGroup, seeds: Iterable[int]) -> np.ndarray:
    """Boolean membership mask of the subgroup generated by ``seeds``."""
    gens = np.unique(np.asarray([int(s) for s in seeds if s], dtype=np.int64))
    mask = np.zeros(g.order, dtype=bool)
    mask[0] = True
    if gens.size == 0:
        return mask
    frontier = np.array([0], dtype=np.int64)
    while frontier.size:
        nxt = g.table[frontier[:, None], gens[None, :]].ravel()
        nxt = np.unique(nxt[~mask[nxt]])
        mask[nxt] = True
        frontier = nxt
    return mask


# -- construction --------------------------------------------------------------


def from_mult_table(table, name: str = "G") -> FiniteGroup:
    """Validate a raw multiplication table and wrap it as a FiniteGroup."""
    t = np.asarray(table)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise NoIdentity(0)
    n = t.shape[0]
    if n > MAX_ORDER:
        raise ClosureExceedsCap(f"order {n} exceeds cap {MAX_ORDER}")
    if ((t < 0) | (t >= n)).any():
        i, j = map(int, np.argwhere((t < 0) | (t >= n))[0])
        raise NoIdentity(i) from ValueError(f"entry ({i},{j}) out of range")
    t = t.astype(np.int32)
    idx = np.arange(n)
    bad = np.nonzero((t[0] != idx) | (t[:, 0] != idx))[0]
    if bad.size:
        raise NoIdentity(int(bad[0]))
    zero = t == 0
    for i in range(n):
        cols = np.nonzero(zero[i])[0]
        if cols.size != 1 or t[cols[0], i] != 0:
            raise NoInverse(i)
    _check_associative(t)
    return FiniteGroup(t, name)


def _check_associative(t: np.ndarray) -> None:
    n = t.shape[0]
    if n <= FULL_ASSOC_CHECK:
        for a in range(n):
            lhs = t[t[a]]  # (a*b)*c over all b, c
            rhs = t[a][t]  # a*(b*c)
            if not np.array_equal(lhs, rhs):
                b, c = map(int, np.argwhere(lhs != rhs)[0])
                raise NotAssociative((a, b, c))
        return
    rng = np.random.default_rng(0)
    for _ in range(ASSOC_SAMPLES // 10**5):
        a, b, c = rng.integers(0, n, size=(3, 10**5))
        bad = np.nonzero(t[t[a, b], c] != t[a, t[b, c]])[0]
        if bad.size:
            k = bad[0]
            raise NotAssociative((int(a[k]), int(b[k]), int(c[k])))


def from_generators(
    identity: Hashable,
    gens: Sequence[Hashable],
    mul: Callable[[Hashable, Hashable], Hashable],
    name: str,
    cap: int = MAX_ORDER,
) -> FiniteGroup:
    """Close ``gens`` under ``mul`` by BFS from the identity.

    Element i+1 is the next product x*g discovered, scanning elements in
    index order and generators in list order, so numbering is reproducible.
    """
    elements = [identity]
    index = {identity: 0}
    parent = [-1]
    via = [-1]
    right: list[list[int]] = [[] for _ in gens]
    i = 0
    while i < len(elements):
        x = elements[i]
        for k, s in enumerate(gens):
            y = mul(x, s)
            j = index.get(y)
            if j is None:
                j = len(elements)
                if j >= cap:
                    raise ClosureExceedsCap(f"closure of {name} exceeds {cap} elements")
                index[y] = j
                elements.append(y)
                parent.append(i)
                via.append(k)
            right[k].append(j)
        i += 1
    n = len(elements)
    table = np.empty((n, n), dtype=np.int32)
    table[:, 0] = np.arange(n)
    if gens:
        rmul = np.asarray(right, dtype=np.int32)
        for j in range(1, n):
            table[:, j] = rmul[via[j]][table[:, parent[j]]]
    gen_idx = []
    for s in gens:
        k = index[s]
        if k and k not in gen_idx:
            gen_idx.append(k)
    return FiniteGroup(table, name, gen_idx)


def from_perm_generators(degree: int, gens: Sequence[Sequence[int]], name: str | None = None) -> FiniteGroup:
    """Group generated by permutations given as 0-based image arrays.

    Products compose left to right: (x*g)[i] = g[x[i]].
    """
    perms = []
    for k, g in enumerate(gens):
        g = tuple(int(x) for x in g)
        if len(g) != degree:
            raise NotAPermutation(k, f"length {len(g)} != degree {degree}")
        if sorted(g) != list(range(degree)):
            raise NotAPermutation(k, "not a bijection on 0..degree-1")
        perms.append(g)
    ident = tuple(range(degree))
    return from_generators(
        ident,
        perms,
        lambda x, g: tuple(g[i] for i in x),
        name or f"perm({degree})",
    )


def direct_product(a: FiniteGroup, b: FiniteGroup, name: str | None = None) -> FiniteGroup:
    if a.order * b.order > MAX_ORDER:
        raise ClosureExceedsCap(f"direct product order {a.order * b.order} exceeds {MAX_ORDER}")
    ta, tb = a.table.tolist(), b.table.tolist()
    gens = [(x, 0) for x in a.generators] + [(0, y) for y in b.generators]
    return from_generators(
        (0, 0),
        gens,
        lambda x, y: (ta[x[0]][y[0]], tb[x[1]][y[1]]),
        name or f"{a.name}*{b.name}",
    )


# -- subgroups -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: FiniteGroup
    elements: tuple[int, ...]

    @classmethod
    def from_mask(cls, parent: FiniteGroup, mask: np.ndarray) -> Subgroup:
        return cls(parent, tuple(int(x) for x in np.nonzero(mask)[0]))

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and self.parent is other.parent
            and self.elements == other.elements
        )

    def __hash__(self):
        return hash((id(self.parent), self.elements))

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return bool(self.mask[x])

    def __repr__(self):
        return f"Subgroup(order={self.order} in {self.parent.name})"

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.elements)] = True
        m.setflags(write=False)
        return m

    @cached_property
    def bits(self) -> int:
        return int.from_bytes(np.packbits(self.mask, bitorder="little").tobytes(), "little")

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.elements, dtype=np.int64)

    def issubset(self, other: Subgroup) -> bool:
        return not (self.mask & ~other.mask).any()

    def intersection(self, other: Subgroup) -> Subgroup:
        _same_parent(self, other)
        return Subgroup.from_mask(self.parent, self.mask & other.mask)

    def as_group(self, name: str | None = None) -> FiniteGroup:
        """The subgroup as a standalone group, relabelled 0..|H|-1 in element order."""
        key = ("as_group", self.elements)
        memo = self.parent._memo
        if key not in memo:
            els = self.array
            relabel = np.full(self.parent.order, -1, dtype=np.int32)
            relabel[els] = np.arange(len(els), dtype=np.int32)
            sub = relabel[self.parent.table[np.ix_(els, els)]]
            memo[key] = FiniteGroup(sub, name or f"{self.parent.name}[{len(els)}]")
        return memo[key]


def _same_parent(a: Subgroup, b: Subgroup) -> None:
    if a.parent is not b.parent:
        raise ParentMismatch("subgroups belong to different groups")


def whole(g: FiniteGroup) -> Subgroup:
    return Subgroup(g, tuple(range(g.order)))


def trivial(g: FiniteGroup) -> Subgroup:
    return Subgroup(g, (0,))


def subgroup_generated(g: FiniteGroup, seed: Iterable[int]) -> Subgroup:
    return Subgroup.from_mask(g, closure_mask(g, seed))


def join(a: Subgroup, b: Subgroup) -> Subgroup:
    _same_parent(a, b)
    return subgroup_generated(a.parent, a.elements + b.elements)


def commutator_of(a: Subgroup, b: Subgroup) -> Subgroup:
    _same_parent(a, b)
    g = a.parent
    comms = np.unique(g.comm_table[np.ix_(a.array, b.array)])
    return subgroup_generated(g, comms.tolist())


@memoized
def commutator_subgroup(g: FiniteGroup) -> Subgroup:
    if g.is_abelian:
        return trivial(g)
    return commutator_of(whole(g), whole(g))


@memoized
def center(g: FiniteGroup) -> Subgroup:
    return Subgroup.from_mask(g, (g.table == g.table.T).all(axis=1))


def normality_witness(g: FiniteGroup, n: Subgroup) -> tuple[int, int] | None:
    """(conjugator, element) with element^conjugator outside n, or None if normal."""
    t, inv = g.table, g.inverses
    els = n.array
    conj = t[t[inv[:, None], els[None, :]], np.arange(g.order)[:, None]]
    bad = ~n.mask[conj]
    if not bad.any():
        return None
    x, k = map(int, np.argwhere(bad)[0])
    return x, int(els[k])


def is_normal(g: FiniteGroup, n: Subgroup) -> bool:
    if g.is_abelian:
        return True
    return normality_witness(g, n) is None


def quotient_group(g: FiniteGroup, n: Subgroup, name: str | None = None) -> FiniteGroup:
    """G/N with cosets numbered by their minimal representative.

    The returned group carries ``projection`` (element -> coset index) and
    ``coset_reps``.
    """
    if n.parent is not g:
        raise ParentMismatch("normal subgroup belongs to a different group")
    if not g.is_abelian:
        w = normality_witness(g, n)
        if w is not None:
            raise NotNormal(*w)
    proj = np.full(g.order, -1, dtype=np.int64)
    reps = []
    for x in range(g.order):
        if proj[x] < 0:
            proj[g.table[x, n.array]] = len(reps)
            reps.append(x)
    reps_arr = np.asarray(reps, dtype=np.int64)
    qt = proj[g.table[np.ix_(reps_arr, reps_arr)]]
    q = FiniteGroup(qt, name or f"{g.name}/[{n.order}]")
    q.projection = proj
    q.coset_reps = reps_arr
    return q


@memoized
def power_subgroup(g: FiniteGroup) -> Subgroup:
    """G^p, generated by all p-th powers."""
    p = _require_p(g)
    return subgroup_generated(g, np.unique(g.power_map(p)).tolist())


def _require_p(g: FiniteGroup) -> int:
    if not g.is_p_group:
        raise NotAPGroup(f"{g.name} has order {g.order}, not a prime power")
    return g.prime or 2


@memoized
def frattini_subgroup(g: FiniteGroup) -> Subgroup:
    """Phi(G), computed as G'G^p and cross-checked against the meet of maximals."""
    _require_p(g)
    if g.order == 1:
        return trivial(g)
    fast = join(commutator_subgroup(g), power_subgroup(g))
    from .lattice import maximal_subgroups

    meet = whole(g).mask.copy()
    for m in maximal_subgroups(g):
        meet &= m.mask
    if not np.array_equal(meet, fast.mask):
        raise InternalConsistencyError(
            f"Frattini mismatch in {g.name}: G'G^p has order {fast.order}, "
            f"meet of maximals has order {int(meet.sum())}"
        )
    return fast


def frattini_fast(g: FiniteGroup) -> Subgroup:
    _require_p(g)
    if g.order == 1:
        return trivial(g)
    key = "frattini_fast"
    if key not in g._memo:
        if "frattini_subgroup" in g._memo:
            g._memo[key] = g._memo["frattini_subgroup"]
        else:
            g._memo[key] = join(commutator_subgroup(g), power_subgroup(g))
    return g._memo[key]


# -- structure probes ----------------------------------------------------------


def exponent(g: FiniteGroup) -> int:
    return int(np.lcm.reduce(g.element_orders))


def is_abelian(g: FiniteGroup) -> bool:
    return g.is_abelian


def is_elementary_abelian(g: FiniteGroup) -> bool:
    if g.order == 1:
        return True
    return g.is_abelian and g.prime is not None and exponent(g) == g.prime


def abelian_invariants(g: FiniteGroup) -> list[int]:
    """Prime-power invariants of an abelian group, ascending."""
    if not g.is_abelian:
        raise NotAbelian(f"{g.name} is not abelian")
    out: list[int] = []
    orders = g.element_orders
    n = g.order
    q = 2
    while n > 1:
        if n % q:
            q += 1
            continue
        while n % q == 0:
            n //= q
        # counts[k] = #{x : x^(q^k) = 1} = q^(sum_i min(k, e_i))
        prev_log = 0
        k = 1
        ge_counts = []
        while True:
            c = int(np.count_nonzero(q**k % orders == 0))
            log = round(math.log(c, q))
            if log == prev_log:
                break
            ge_counts.append(log - prev_log)  # number of e_i >= k
            prev_log = log
            k += 1
        for k, m in enumerate(ge_counts, start=1):
            nxt = ge_counts[k] if k < len(ge_counts) else 0
            out.extend([q**k] * (m - nxt))
        q += 1
    return sorted(out)


def is_homocyclic(g: FiniteGroup) -> bool:
    _require_p(g)
    if not g.is_abelian:
        return False
    return len(set(abelian_invariants(g))) <= 1


@memoized
def conjugacy_classes(g: FiniteGroup) -> list[tuple[int, ...]]:
    n = g.order
    if g.is_abelian:
        return [(x,) for x in range(n)]
    t, inv = g.table, g.inverses
    seen = np.zeros(n, dtype=bool)
    classes = []
    allg = np.arange(n)
    for x in range(n):
        if seen[x]:
            continue
        cls = np.unique(t[t[inv, x], allg])
        seen[cls] = True
        classes.append(tuple(int(c) for c in cls))
    return classes


def min_generators(g: FiniteGroup) -> int:
    p = _require_p(g)
    if g.order == 1:
        return 0
    index = g.order // frattini_fast(g).order
    return round(math.log(index, p))


@memoized
def minimal_generating_set(g: FiniteGroup) -> list[int]:
    """Lifts of a basis of G/Phi(G), chosen greedily by smallest index."""
    if g.order == 1:
        return []
    if not g.is_p_group:
        return g.generators
    phi = frattini_fast(g)
    chosen: list[int] = []
    mask = phi.mask.copy()
    for x in range(g.order):
        if not mask[x]:
            chosen.append(x)
            mask = closure_mask(g, chosen + list(phi.elements))
            if mask.all():
                break
    return chosen


def random_element_of(sub: Subgroup, rng: random.Random) -> int:
    return sub.elements[rng.randrange(sub.order)]

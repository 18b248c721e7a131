"""Alternating bilinear maps V x V -> W over F_p and the morphic-triple conditions.

A triple stores only the values beta(e_i, e_j) for i < j, in lexicographic
pair order; the alternating extension is computed on demand.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, islice, product
from typing import Sequence

import numpy as np

from .errors import AonU, BudgetExceeded, DimensionMismatch, InternalConsistencyError, NotMaximal, PreconditionError
from .fplinalg import (
    PrimeField,
    SubspaceFp,
    enumerate_maximal_subspaces,
    enumerate_subspaces_containing,
    full_space,
    geometric_count,
    kernel,
    rref,
    subspace_intersect,
    zero_subspace,
)


def pair_index(d: int) -> list[tuple[int, int]]:
    return list(combinations(range(d), 2))


@dataclass(frozen=True)
class Triple:
    p: int
    dim_v: int
    dim_w: int
    beta: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        PrimeField(self.p)
        npairs = self.dim_v * (self.dim_v - 1) // 2
        beta = self.beta or tuple((0,) * self.dim_w for _ in range(npairs))
        if len(beta) != npairs or any(len(v) != self.dim_w for v in beta):
            raise DimensionMismatch(
                f"beta needs {npairs} values of length {self.dim_w}"
            )
        object.__setattr__(self, "beta", tuple(tuple(int(x) % self.p for x in v) for v in beta))

    @classmethod
    def from_pairs(cls, p: int, dim_v: int, dim_w: int, values: dict) -> Triple:
        beta = [tuple(values.get((i, j), (0,) * dim_w)) for i, j in pair_index(dim_v)]
        return cls(p, dim_v, dim_w, tuple(beta))

    def value(self, i: int, j: int) -> tuple[int, ...]:
        """beta(e_i, e_j) for any i, j, using the alternating extension."""
        if i == j:
            return (0,) * self.dim_w
        if i < j:
            return self.beta[pair_index(self.dim_v).index((i, j))]
        return tuple((-x) % self.p for x in self.value(j, i))

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.beta, dtype=np.int64).reshape(len(self.beta), self.dim_w)

    def apply(self, x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
        coeffs = np.asarray(_pair_coeffs([list(x)], [list(y)], self.dim_v), dtype=np.int64)
        return tuple(int(v) for v in (coeffs @ self.matrix)[0] % self.p)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "dimV": self.dim_v,
            "dimW": self.dim_w,
            "beta": [[i, j, list(v)] for (i, j), v in zip(pair_index(self.dim_v), self.beta)],
        }

    @classmethod
    def from_json(cls, data: dict) -> Triple:
        values = {}
        for i, j, coords in data.get("beta", []):
            if not i < j:
                raise DimensionMismatch(f"beta entries need i < j, got ({i}, {j})")
            values[(i, j)] = tuple(coords)
        return cls.from_pairs(data["p"], data["dimV"], data["dimW"], values)


@dataclass(frozen=True)
class TripleVerdict:
    is_morphic_triple: bool
    failed_condition: int | None = None
    witness: SubspaceFp | None = None
    degenerate: bool = False

    def to_json(self) -> dict:
        return {
            "is_morphic_triple": self.is_morphic_triple,
            "failed_condition": self.failed_condition,
            "witness": self.witness.to_json() if self.witness is not None else None,
            "degenerate": self.degenerate,
        }


def _pair_coeffs(xs, ys, d):
    """Rows of coefficients c with beta(x, y) = sum_pairs c_ij beta_ij."""
    out = []
    for x, y in zip(xs, ys):
        out.append([x[i] * y[j] - x[j] * y[i] for i, j in combinations(range(d), 2)])
    return out


@lru_cache(maxsize=None)
def _basis_pair_coeffs(basis: tuple, d: int) -> np.ndarray:
    xs, ys = [], []
    for k, l in combinations(range(len(basis)), 2):
        xs.append(basis[k])
        ys.append(basis[l])
    if not xs:
        return np.zeros((0, d * (d - 1) // 2), dtype=np.int64)
    return np.asarray(_pair_coeffs(xs, ys, d), dtype=np.int64)


@lru_cache(maxsize=None)
def _hyperplanes(d: int, p: int) -> tuple[SubspaceFp, ...]:
    return tuple(enumerate_maximal_subspaces(d, p))


def _check_u(t: Triple, u: SubspaceFp) -> None:
    if u.p != t.p or u.ambient_dim != t.dim_v:
        raise DimensionMismatch(f"subspace of F_{u.p}^{u.ambient_dim} is not in V = F_{t.p}^{t.dim_v}")


def derived_of(t: Triple, u: SubspaceFp) -> SubspaceFp:
    """U' = span of beta(b_k, b_l) over basis pairs of U."""
    _check_u(t, u)
    coeffs = _basis_pair_coeffs(u.basis, t.dim_v)
    if coeffs.shape[0] == 0 or t.dim_w == 0:
        return zero_subspace(t.dim_w, t.p)
    vecs = (coeffs @ t.matrix) % t.p
    return rref(vecs.tolist(), t.p, t.dim_w)


def verify_morphic_triple(t: Triple) -> TripleVerdict:
    d, e, p = t.dim_v, t.dim_w, t.p
    if d < 1:
        raise PreconditionError("dimV must be at least 1")
    v_derived = derived_of(t, full_space(d, p))
    if v_derived.dim != e:
        return TripleVerdict(False, 1, v_derived)
    degenerate = e == 0
    hyperplanes = _hyperplanes(d, p)
    meet = full_space(e, p)
    for u in hyperplanes:
        ud = derived_of(t, u)
        if degenerate:
            # 0 < 0 is read as unsatisfiable except in the one-dimensional case.
            if d > 1:
                return TripleVerdict(False, 2, u, degenerate=True)
        elif ud.dim != e - 1:
            return TripleVerdict(False, 2, u)
        meet = subspace_intersect(meet, ud)
    if meet.dim:
        return TripleVerdict(False, 3, meet, degenerate=degenerate)
    return TripleVerdict(True, degenerate=degenerate)


def _as_vector(a, p: int) -> tuple[int, ...]:
    return tuple(int(x) % p for x in a)


def _t_of_once(t: Triple, u: SubspaceFp, a: tuple[int, ...], ud: SubspaceFp) -> SubspaceFp:
    p, e = t.p, t.dim_w
    # f spans the annihilator of U' in W*, so x -> f . [a, x] is tau.
    cols = [[row[i] for row in ud.basis] for i in range(e)] if ud.dim else [[0] for _ in range(e)]
    f = kernel(cols, p)
    if f.dim != 1:
        raise PreconditionError("U' is not a hyperplane of W")
    fvec = np.asarray(f.basis[0], dtype=np.int64)
    tau = [int(np.dot(fvec, t.apply(a, b)) % p) for b in u.basis]
    coeffs = kernel([[x] for x in tau], p)
    vecs = [
        [sum(c * b[j] for c, b in zip(row, u.basis)) % p for j in range(t.dim_v)]
        for row in coeffs.basis
    ]
    return rref(vecs, p, t.dim_v)


def t_of(t: Triple, u: SubspaceFp, a) -> SubspaceFp:
    """T(U) = {x in U : [a, x] in U'} for a outside the hyperplane U.

    The result is recomputed from a second vector outside U and the two must
    agree; a mismatch means the triple is not morphic or there is a bug.
    """
    _check_u(t, u)
    if u.dim != t.dim_v - 1:
        raise NotMaximal(f"U has dimension {u.dim}, expected {t.dim_v - 1}")
    a = _as_vector(a, t.p)
    if len(a) != t.dim_v:
        raise DimensionMismatch("a has the wrong length")
    if u.contains(a):
        raise AonU("a lies in U")
    ud = derived_of(t, u)
    result = _t_of_once(t, u, a, ud)
    if result.dim != u.dim - 1:
        raise InternalConsistencyError(f"T(U) has dimension {result.dim}, expected {u.dim - 1}")
    if u.dim:
        a2 = tuple((x + y) % t.p for x, y in zip(a, u.basis[-1]))
    else:
        a2 = tuple((2 * x) % t.p for x in a) if t.p > 2 else a
    if _t_of_once(t, u, a2, ud) != result:
        raise InternalConsistencyError("T(U) depends on the choice of a")
    return result


def outside_vector(u: SubspaceFp) -> tuple[int, ...]:
    """The first standard basis vector not in u."""
    for i in range(u.ambient_dim):
        e = tuple(int(i == j) for j in range(u.ambient_dim))
        if not u.contains(e):
            return e
    raise AonU("U is the whole space")


def spread(t: Triple, u: SubspaceFp) -> list[SubspaceFp]:
    """Hyperplanes S with S' = U', cross-checked against those containing T(U)."""
    ud = derived_of(t, u)
    found = [s for s in _hyperplanes(t.dim_v, t.p) if derived_of(t, s) == ud]
    tu = t_of(t, u, outside_vector(u))
    expected = enumerate_subspaces_containing(tu, 1)
    if sorted(found) != expected or len(found) != t.p + 1:
        raise InternalConsistencyError(
            f"spread of size {len(found)} disagrees with the {len(expected)} hyperplanes over T(U)"
        )
    return sorted(found)


def zset(t: Triple) -> list[SubspaceFp]:
    """Distinct hyperplanes of W of the form U' with U a hyperplane of V."""
    d, p = t.dim_v, t.p
    out = sorted({derived_of(t, u) for u in _hyperplanes(d, p)})
    if len(out) * (p + 1) != geometric_count(d, p) or d % 2:
        raise InternalConsistencyError(
            f"|Z| = {len(out)} but (p+1)|Z| must equal {geometric_count(d, p)} with d even"
        )
    expected = sum(p ** (2 * i) for i in range(d // 2))
    if len(out) != expected:
        raise InternalConsistencyError(f"|Z| = {len(out)}, expected {expected}")
    return out


def check_dim_bound(t: Triple) -> bool:
    return t.dim_w >= t.dim_v - 1


@dataclass
class TripleSearchResult:
    p: int
    dim_v: int
    dim_w: int
    triples: list[Triple]
    examined: int
    total: int
    exhaustive: bool
    budget_exceeded: bool = False
    mode: str = "exhaustive"

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "dimV": self.dim_v,
            "dimW": self.dim_w,
            "mode": self.mode,
            "examined": self.examined,
            "total": self.total,
            "exhaustive": self.exhaustive,
            "budget_exceeded": self.budget_exceeded,
            "found": len(self.triples),
            "triples": [t.to_json() for t in self.triples],
        }


def search_triples(
    p: int,
    dim_v: int,
    dim_w: int,
    budget: int = 10**5,
    mode: str = "auto",
    seed: int = 0,
    strict: bool = False,
) -> TripleSearchResult:
    """Look for morphic triples with the given dimensions.

    ``mode`` is "exhaustive", "sample" or "auto" (exhaustive when the whole
    tensor space fits in ``budget``). Degenerate triples (dimW = 0) are not
    reported. With ``strict`` an exhausted budget raises BudgetExceeded
    carrying the partial result instead of returning it flagged.
    """
    PrimeField(p)
    npairs = dim_v * (dim_v - 1) // 2
    total = p ** (npairs * dim_w)
    if mode == "auto":
        mode = "exhaustive" if total <= budget else "sample"
    if mode == "exhaustive":
        values = product(range(p), repeat=npairs * dim_w)
        stream = islice(values, budget)
    elif mode == "sample":
        rng = random.Random(seed)
        stream = (tuple(rng.randrange(p) for _ in range(npairs * dim_w)) for _ in range(budget))
    else:
        raise ValueError(f"unknown search mode {mode!r}")
    found = {}
    examined = 0
    for flat in stream:
        examined += 1
        beta = tuple(tuple(flat[k * dim_w:(k + 1) * dim_w]) for k in range(npairs))
        if beta in found or dim_w == 0:
            continue
        t = Triple(p, dim_v, dim_w, beta)
        if verify_morphic_triple(t).is_morphic_triple:
            found[beta] = t
    triples = [found[k] for k in sorted(found)]
    exceeded = mode == "exhaustive" and examined < total
    result = TripleSearchResult(
        p, dim_v, dim_w, triples, examined, total,
        exhaustive=mode == "exhaustive" and not exceeded,
        budget_exceeded=exceeded,
        mode=mode,
    )
    if exceeded and strict:
        raise BudgetExceeded(f"exhaustive search needs {total} tensors, budget {budget}", result)
    return result

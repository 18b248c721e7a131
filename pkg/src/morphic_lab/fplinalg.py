"""Exact linear algebra over a prime field F_p.

Vectors are tuples of ints in [0, p). Subspaces are always held in reduced
row-echelon form, so two equal subspaces compare equal structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Sequence

from .errors import DimensionMismatch, ParameterOutOfRange

MAX_DIM = 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ParameterOutOfRange(f"{self.p} is not prime")

    def inv(self, x: int) -> int:
        return pow(x % self.p, -1, self.p)


@dataclass(frozen=True)
class VectorFp:
    p: int
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) % self.p for c in self.coords))

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)


@dataclass(frozen=True, order=True)
class SubspaceFp:
    """A subspace of F_p^ambient_dim given by its canonical RREF basis."""

    p: int
    ambient_dim: int
    basis: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(row) if x) for row in self.basis)

    def contains(self, vec: Sequence[int]) -> bool:
        v = [int(x) % self.p for x in vec]
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector length does not match ambient dimension")
        for row, piv in zip(self.basis, self.pivots):
            c = v[piv]
            if c:
                v = [(a - c * b) % self.p for a, b in zip(v, row)]
        return not any(v)

    def contains_subspace(self, other: SubspaceFp) -> bool:
        _check_compatible(self, other)
        return all(self.contains(row) for row in other.basis)

    def vectors(self) -> list[tuple[int, ...]]:
        """All p**dim vectors of the subspace."""
        out = []
        for coeffs in product(range(self.p), repeat=self.dim):
            out.append(combine(coeffs, self.basis, self.p, self.ambient_dim))
        return out

    def to_json(self) -> list[list[int]]:
        return [list(row) for row in self.basis]


def combine(coeffs: Sequence[int], rows: Sequence[Sequence[int]], p: int, n: int) -> tuple[int, ...]:
    acc = [0] * n
    for c, row in zip(coeffs, rows):
        if c:
            for j, x in enumerate(row):
                acc[j] += c * x
    return tuple(x % p for x in acc)


def _check_compatible(a: SubspaceFp, b: SubspaceFp) -> None:
    if a.p != b.p:
        raise DimensionMismatch(f"field mismatch: F_{a.p} vs F_{b.p}")
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(
            f"ambient dimension mismatch: {a.ambient_dim} vs {b.ambient_dim}"
        )


def _row_reduce(rows: list[list[int]], p: int, ncols: int) -> list[list[int]]:
    rows = [[x % p for x in r] for r in rows]
    out: list[list[int]] = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = pow(rows[r][col], -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                c = rows[i][col]
                rows[i] = [(a - c * b) % p for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    out = rows[:r]
    return out


def rref(matrix: Iterable[Sequence[int]], p: int, ambient_dim: int | None = None) -> SubspaceFp:
    """Canonical row-reduced span of the rows of ``matrix`` over F_p."""
    rows = [list(map(int, r)) for r in matrix]
    if ambient_dim is None:
        if not rows:
            raise DimensionMismatch("ambient_dim required for an empty matrix")
        ambient_dim = len(rows[0])
    if any(len(r) != ambient_dim for r in rows):
        raise DimensionMismatch("ragged matrix or wrong column count")
    reduced = _row_reduce(rows, p, ambient_dim)
    return SubspaceFp(p, ambient_dim, tuple(tuple(r) for r in reduced))


def rank(matrix: Sequence[Sequence[int]], p: int) -> int:
    if not matrix:
        return 0
    return rref(matrix, p).dim


def kernel(matrix: Sequence[Sequence[int]], p: int) -> SubspaceFp:
    """Left kernel {x : x . matrix = 0} of an m x k matrix, as a subspace of F_p^m."""
    m = len(matrix)
    k = len(matrix[0]) if m else 0
    # Row reduce [matrix | I]; rows whose left block vanishes span the kernel.
    aug = [list(matrix[i]) + [int(i == j) for j in range(m)] for i in range(m)]
    reduced = _row_reduce(aug, p, k + m)
    basis = [row[k:] for row in reduced if not any(row[:k])]
    return rref(basis, p, m)


def subspace_sum(a: SubspaceFp, b: SubspaceFp) -> SubspaceFp:
    _check_compatible(a, b)
    return rref(list(a.basis) + list(b.basis), a.p, a.ambient_dim)


def subspace_intersect(a: SubspaceFp, b: SubspaceFp) -> SubspaceFp:
    _check_compatible(a, b)
    p, n = a.p, a.ambient_dim
    if a.dim == 0 or b.dim == 0:
        return SubspaceFp(p, n)
    # x.A = y.B  <=>  (x, -y) lies in the left kernel of [A; B].
    stacked = list(a.basis) + [[(-x) % p for x in row] for row in b.basis]
    ker = kernel(stacked, p)
    vecs = [combine(row[: a.dim], a.basis, p, n) for row in ker.basis]
    return rref(vecs, p, n)


def zero_subspace(n: int, p: int) -> SubspaceFp:
    return SubspaceFp(p, n)


def full_space(n: int, p: int) -> SubspaceFp:
    return SubspaceFp(p, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def _normalized_functionals(n: int, p: int):
    # Lexicographic order on vectors whose first nonzero coordinate is 1.
    for lead in range(n):
        for tail in product(range(p), repeat=n - lead - 1):
            yield (0,) * lead + (1,) + tail


def enumerate_maximal_subspaces(ambient_dim: int, p: int) -> list[SubspaceFp]:
    if ambient_dim > MAX_DIM:
        raise ParameterOutOfRange(f"dimension {ambient_dim} exceeds {MAX_DIM}")
    if ambient_dim <= 0:
        return []
    out = []
    for f in sorted(_normalized_functionals(ambient_dim, p)):
        out.append(kernel([[x] for x in f], p))
    return out


def _rref_matrices(rank_: int, ncols: int, p: int):
    """Every RREF matrix of the given rank with ``ncols`` columns."""
    for pivots in combinations(range(ncols), rank_):
        free = [
            (i, j)
            for i, piv in enumerate(pivots)
            for j in range(piv + 1, ncols)
            if j not in pivots
        ]
        for values in product(range(p), repeat=len(free)):
            rows = [[0] * ncols for _ in range(rank_)]
            for i, piv in enumerate(pivots):
                rows[i][piv] = 1
            for (i, j), v in zip(free, values):
                rows[i][j] = v
            yield rows


def enumerate_subspaces(ambient_dim: int, dim: int, p: int) -> list[SubspaceFp]:
    if dim < 0 or dim > ambient_dim:
        return []
    return sorted(
        SubspaceFp(p, ambient_dim, tuple(tuple(r) for r in rows))
        for rows in _rref_matrices(dim, ambient_dim, p)
    )


def enumerate_subspaces_containing(t: SubspaceFp, codim: int) -> list[SubspaceFp]:
    """All S >= t with dim S = ambient_dim - codim."""
    if codim < 0:
        raise ParameterOutOfRange("codim must be non-negative")
    n, p = t.ambient_dim, t.p
    target = n - codim
    if target < t.dim:
        return []
    # V/t is modelled on the non-pivot coordinates of t.
    free_cols = [j for j in range(n) if j not in set(t.pivots)]
    out = []
    for rows in _rref_matrices(target - t.dim, len(free_cols), p):
        lifted = []
        for row in rows:
            v = [0] * n
            for j, x in zip(free_cols, row):
                v[j] = x
            lifted.append(v)
        out.append(rref(list(t.basis) + lifted, p, n))
    return sorted(out)


def geometric_count(e: int, p: int) -> int:
    """1 + p + ... + p^(e-1)."""
    return sum(p**i for i in range(e))

"""Constructors for the p-group families used throughout the package.

Family spec strings have the form ``family:prime[:params]``; a direct
product joins two specs with ``*``, e.g. ``heisenberg:3*abelian:3:1``.
The 2-group families take the group order as parameter
(``dihedral:2:8``); ``dihedral:8`` is accepted as shorthand.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

from .errors import InputError, OddPrimeRequired, ParameterOutOfRange
from .fplinalg import is_prime
from .groups import MAX_ORDER, FiniteGroup, direct_product, from_generators

FAMILIES = (
    "abelian",
    "heisenberg",
    "dihedral",
    "quaternion",
    "semidihedral",
    "modular_maximal_cyclic",
    "direct_product",
)


@dataclass(frozen=True)
class GroupFamilySpec:
    family: str
    p: int | None = None
    params: tuple[int, ...] = ()
    factors: tuple["GroupFamilySpec", ...] = ()

    def __str__(self):
        if self.family == "direct_product":
            return "*".join(str(f) for f in self.factors)
        out = f"{self.family}:{self.p}"
        if self.family in ("abelian", "modular_maximal_cyclic", "dihedral", "quaternion", "semidihedral"):
            out += ":" + ",".join(map(str, self.params))
        return out


def parse_family(text: str) -> GroupFamilySpec:
    text = text.strip()
    if "*" in text:
        parts = [parse_family(t) for t in text.split("*")]
        spec = parts[0]
        for nxt in parts[1:]:
            spec = GroupFamilySpec("direct_product", factors=(spec, nxt))
        return spec
    fields = text.split(":")
    fam = fields[0]
    if fam not in FAMILIES or fam == "direct_product":
        raise InputError(f"unknown family {fam!r} in {text!r}")
    try:
        nums = [[int(x) for x in f.split(",") if x != ""] for f in fields[1:]]
    except ValueError:
        raise InputError(f"non-integer parameter in {text!r}") from None
    if fam in ("dihedral", "quaternion", "semidihedral") and len(nums) == 1:
        nums = [[2], nums[0]]
    if not nums or len(nums[0]) != 1:
        raise InputError(f"missing prime in {text!r}")
    p = nums[0][0]
    params = tuple(nums[1]) if len(nums) > 1 else ()
    if len(nums) > 2:
        raise InputError(f"too many fields in {text!r}")
    if fam == "heisenberg" and params:
        raise InputError(f"heisenberg takes only a prime: {text!r}")
    return GroupFamilySpec(fam, p, params)


def make_family(spec: GroupFamilySpec | str) -> FiniteGroup:
    if isinstance(spec, str):
        spec = parse_family(spec)
    name = str(spec)
    fam = spec.family
    if fam == "direct_product":
        a, b = (make_family(f) for f in spec.factors)
        return direct_product(a, b, name)
    p = spec.p
    if p is None or not is_prime(p):
        raise ParameterOutOfRange(f"{p} is not prime")
    if fam == "abelian":
        return abelian(p, spec.params, name)
    if fam == "heisenberg":
        return heisenberg(p, name)
    if fam == "modular_maximal_cyclic":
        if len(spec.params) != 1:
            raise ParameterOutOfRange("modular_maximal_cyclic needs p and n")
        return modular_maximal_cyclic(p, spec.params[0], name)
    if p != 2:
        raise ParameterOutOfRange(f"{fam} is a 2-group family")
    if len(spec.params) != 1:
        raise ParameterOutOfRange(f"{fam} needs the group order")
    builder = {"dihedral": dihedral, "quaternion": quaternion, "semidihedral": semidihedral}[fam]
    return builder(spec.params[0], name)


def abelian(p: int, exps, name: str | None = None) -> FiniteGroup:
    exps = tuple(int(e) for e in exps)
    if any(e < 1 for e in exps):
        raise ParameterOutOfRange("exponents must be positive")
    if p ** sum(exps) > MAX_ORDER:
        raise ParameterOutOfRange(f"order {p}^{sum(exps)} exceeds {MAX_ORDER}")
    mods = tuple(p**e for e in exps)
    k = len(mods)
    gens = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    return from_generators(
        (0,) * k,
        gens,
        lambda x, y: tuple((a + b) % m for a, b, m in zip(x, y, mods)),
        name or f"abelian:{p}:{','.join(map(str, exps))}",
    )


def heisenberg(p: int, name: str | None = None) -> FiniteGroup:
    """Upper unitriangular 3x3 matrices over F_p, as triples (a, b, c)."""
    if p == 2:
        raise OddPrimeRequired("heisenberg(p) needs an odd prime")
    if not is_prime(p) or p > 7:
        raise ParameterOutOfRange("heisenberg(p) needs an odd prime <= 7")

    def mul(x, y):
        return ((x[0] + y[0]) % p, (x[1] + y[1]) % p, (x[2] + y[2] + x[0] * y[1]) % p)

    return from_generators((0, 0, 0), [(1, 0, 0), (0, 1, 0)], mul, name or f"heisenberg:{p}")


def _two_power(n: int, lo: int, fam: str) -> int:
    if n < lo or n > 256 or n & (n - 1):
        raise ParameterOutOfRange(f"{fam} order must be a power of 2 in [{lo}, 256], got {n}")
    return n // 2


def _metacyclic_2(n_half: int, twist, square_of_b: int, name: str) -> FiniteGroup:
    # a^k b^e with b a^k b^-1 = a^(twist*k) and b^2 = a^square_of_b
    m = n_half

    def mul(x, y):
        k1, e1 = x
        k2, e2 = y
        if e1 == 0:
            return ((k1 + k2) % m, e2)
        k = (k1 + twist * k2) % m
        if e2 == 0:
            return (k, 1)
        return ((k + square_of_b) % m, 0)

    return from_generators((0, 0), [(1, 0), (0, 1)], mul, name)


def dihedral(order: int, name: str | None = None) -> FiniteGroup:
    m = _two_power(order, 4, "dihedral")
    return _metacyclic_2(m, -1, 0, name or f"dihedral:2:{order}")


def quaternion(order: int, name: str | None = None) -> FiniteGroup:
    m = _two_power(order, 8, "quaternion")
    return _metacyclic_2(m, -1, m // 2, name or f"quaternion:2:{order}")


def semidihedral(order: int, name: str | None = None) -> FiniteGroup:
    m = _two_power(order, 16, "semidihedral")
    return _metacyclic_2(m, m // 2 - 1, 0, name or f"semidihedral:2:{order}")


def modular_maximal_cyclic(p: int, n: int, name: str | None = None) -> FiniteGroup:
    """<a, b | a^(p^(n-1)) = b^p = 1, a^b = a^(1+p^(n-2))>."""
    if n < 3 or p**n > 2401:
        raise ParameterOutOfRange(f"modular_maximal_cyclic needs n >= 3 and p^n <= 2401, got p={p}, n={n}")
    m = p ** (n - 1)
    r = 1 + p ** (n - 2)
    s = pow(r, -1, m)  # b a b^-1 = a^s
    spow = [pow(s, j, m) for j in range(p)]

    def mul(x, y):
        k1, j1 = x
        k2, j2 = y
        return ((k1 + k2 * spow[j1]) % m, (j1 + j2) % p)

    return from_generators((0, 0), [(1, 0), (0, 1)], mul, name or f"modular_maximal_cyclic:{p}:{n}")


def family_order(spec: GroupFamilySpec) -> int:
    """Order of the group a spec describes, without building it."""
    fam = spec.family
    if fam == "direct_product":
        return prod(family_order(f) for f in spec.factors)
    if fam == "abelian":
        return spec.p ** sum(spec.params)
    if fam == "heisenberg":
        return spec.p**3
    if fam == "modular_maximal_cyclic":
        return spec.p ** spec.params[0]
    return spec.params[0]

"""The built-in catalog of small p-groups and loading of group files."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import GroupFileError, InputError, MorphicLabError
from .families import GroupFamilySpec, family_order, make_family, parse_family
from .groups import FiniteGroup, from_mult_table, from_perm_generators

PRODUCT_ORDER_CAP = 512
PRODUCT_RANK_CAP = 4


def partitions(n: int, largest: int | None = None):
    """Partitions of n as non-increasing tuples."""
    if n == 0:
        yield ()
        return
    largest = n if largest is None else largest
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def _abelian_specs(p: int, max_order: int) -> list[GroupFamilySpec]:
    out = []
    k = 1
    while p**k <= max_order:
        for part in partitions(k):
            out.append(GroupFamilySpec("abelian", p, tuple(sorted(part))))
        k += 1
    return out


def _rank(spec: GroupFamilySpec) -> int:
    """d(G) of a catalog member, known from the construction."""
    if spec.family == "abelian":
        return len(spec.params)
    if spec.family == "direct_product":
        return sum(_rank(f) for f in spec.factors)
    return 2


def base_specs(primes=(2, 3)) -> list[GroupFamilySpec]:
    specs: list[GroupFamilySpec] = []
    for p in primes:
        specs += _abelian_specs(p, 81)
    if 2 in primes:
        for fam, orders in (("dihedral", (8, 16, 32)), ("quaternion", (8, 16, 32)), ("semidihedral", (16, 32))):
            specs += [GroupFamilySpec(fam, 2, (n,)) for n in orders]
    for p in primes:
        specs += [GroupFamilySpec("modular_maximal_cyclic", p, (n,)) for n in (3, 4)]
        if p % 2:
            specs.append(GroupFamilySpec("heisenberg", p))
    if 3 in primes:
        specs.append(GroupFamilySpec("heisenberg", 5))
    return specs


def product_specs(
    base: list[GroupFamilySpec],
    order_cap: int = PRODUCT_ORDER_CAP,
    rank_cap: int = PRODUCT_RANK_CAP,
) -> list[GroupFamilySpec]:
    """Products A*B of base members over one prime with |A||B| <= order_cap
    and d(A) + d(B) <= rank_cap.

    A product of two abelian members is written as a single abelian spec and
    kept only when it is not already a base member.
    """
    out = []
    seen = {s for s in base if s.family == "abelian"}
    for i, a in enumerate(base):
        for b in base[i:]:
            if a.p != b.p:
                continue
            if family_order(a) * family_order(b) > order_cap:
                continue
            if _rank(a) + _rank(b) > rank_cap:
                continue
            if a.family == "abelian" and b.family == "abelian":
                spec = GroupFamilySpec("abelian", a.p, tuple(sorted(a.params + b.params)))
                if spec not in seen:
                    seen.add(spec)
                    out.append(spec)
                continue
            # keep the nonabelian factor first
            first, second = (b, a) if a.family == "abelian" else (a, b)
            out.append(GroupFamilySpec("direct_product", factors=(first, second)))
    return out


def builtin_specs(primes=(2, 3), products: bool = True, rank_cap: int = PRODUCT_RANK_CAP) -> list[GroupFamilySpec]:
    base = base_specs(primes)
    return base + (product_specs(base, rank_cap=rank_cap) if products else [])


def describe_builtin(primes=(2, 3), rank_cap: int = PRODUCT_RANK_CAP) -> str:
    return (
        f"built-in: abelian p-groups of order <= 81, p in {list(primes)}; dihedral/quaternion 8..32, "
        f"semidihedral 16..32; modular_maximal_cyclic(p, 3..4); heisenberg 3, 5; "
        f"pairwise direct products over one prime, order <= {PRODUCT_ORDER_CAP}, d <= {rank_cap}"
    )


# -- group files -----------------------------------------------------------------


@dataclass
class CatalogEntry:
    name: str
    source: str
    group: FiniteGroup | None = None
    error: MorphicLabError | None = None


def _require(data: dict, key: str, kind, path: str):
    if key not in data:
        raise GroupFileError(f"missing field {key!r}", f"{path}:$")
    val = data[key]
    if not isinstance(val, kind) or isinstance(val, bool):
        raise GroupFileError(f"field {key!r} must be {kind.__name__}", f"{path}:$.{key}")
    return val


def group_from_json(data, path: str = "<input>") -> FiniteGroup:
    """Parse either group-file variant; errors carry a JSON-path position."""
    if not isinstance(data, dict):
        raise GroupFileError("top level must be an object", f"{path}:$")
    fmt = _require(data, "format", str, path)
    name = data.get("name", Path(path).stem)
    if not isinstance(name, str):
        raise GroupFileError("field 'name' must be str", f"{path}:$.name")
    if fmt == "mult-table":
        n = _require(data, "order", int, path)
        table = _require(data, "table", list, path)
        if len(table) != n:
            raise GroupFileError(f"table has {len(table)} rows, order is {n}", f"{path}:$.table")
        for i, row in enumerate(table):
            if not isinstance(row, list) or len(row) != n:
                raise GroupFileError(f"row must be a list of {n} entries", f"{path}:$.table[{i}]")
            for j, x in enumerate(row):
                if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < n:
                    raise GroupFileError(f"entry must be an integer in [0, {n})", f"{path}:$.table[{i}][{j}]")
        try:
            return from_mult_table(table, name)
        except InputError as exc:
            raise GroupFileError(str(exc), f"{path}:$.table") from exc
    if fmt == "perm-gens":
        degree = _require(data, "degree", int, path)
        gens = _require(data, "generators", list, path)
        for k, g in enumerate(gens):
            if not isinstance(g, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in g):
                raise GroupFileError("generator must be a list of integers", f"{path}:$.generators[{k}]")
        try:
            return from_perm_generators(degree, gens, name)
        except InputError as exc:
            raise GroupFileError(str(exc), f"{path}:$.generators") from exc
    raise GroupFileError(f"unknown format {fmt!r}", f"{path}:$.format")


def load_group_file(path: str | Path) -> FiniteGroup:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise GroupFileError(f"cannot read file: {exc.strerror}", str(path)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GroupFileError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from exc
    return group_from_json(data, str(path))


def group_to_json(g: FiniteGroup) -> dict:
    return {"format": "mult-table", "name": g.name, "order": g.order, "table": g.table.tolist()}


def resolve_source(source: str) -> FiniteGroup:
    """A family spec string, or a path to a group file."""
    if source.endswith(".json") or Path(source).exists():
        return load_group_file(source)
    return make_family(parse_family(source))


def load_directory(directory: str | Path) -> list[CatalogEntry]:
    out = []
    for path in sorted(Path(directory).glob("*.json")):
        try:
            g = load_group_file(path)
            out.append(CatalogEntry(g.name, str(path), g))
        except MorphicLabError as exc:
            out.append(CatalogEntry(path.stem, str(path), None, exc))
    return out


def builtin_entries(primes=(2, 3), products: bool = True, rank_cap: int = PRODUCT_RANK_CAP) -> list[CatalogEntry]:
    return [
        CatalogEntry(str(s), "builtin", make_family(s))
        for s in builtin_specs(primes, products, rank_cap)
    ]

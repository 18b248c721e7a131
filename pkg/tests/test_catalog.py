import json

import pytest

from morphic_lab.catalog import (
    base_specs,
    builtin_specs,
    group_from_json,
    group_to_json,
    load_directory,
    load_group_file,
    partitions,
    product_specs,
    resolve_source,
)
from morphic_lab.errors import GroupFileError, InputError
from morphic_lab.families import family_order, make_family
from morphic_lab.iso import are_isomorphic


def test_partitions():
    assert list(partitions(4)) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]


def test_builtin_contents():
    names = {str(s) for s in builtin_specs()}
    for must in ["heisenberg:3", "heisenberg:5", "dihedral:2:32", "quaternion:2:8", "semidihedral:2:32",
                 "modular_maximal_cyclic:3:4", "abelian:3:1,1,1,1", "abelian:2:6",
                 "heisenberg:3*abelian:3:1", "abelian:2:3,3,3"]:
        assert must in names
    assert all(family_order(s) <= 512 for s in builtin_specs())
    assert len(names) == len(builtin_specs())


def test_products_are_single_prime():
    for s in product_specs(base_specs()):
        if s.family == "direct_product":
            a, b = s.factors
            assert a.p == b.p and a.family != "abelian"


def test_mult_table_round_trip(tmp_path):
    g = make_family("quaternion:2:8")
    path = tmp_path / "q8.json"
    path.write_text(json.dumps(group_to_json(g)))
    h = load_group_file(path)
    assert h.name == "quaternion:2:8" and are_isomorphic(g, h).isomorphic


def test_perm_file(tmp_path):
    path = tmp_path / "d8.json"
    path.write_text(json.dumps({"format": "perm-gens", "name": "D8", "degree": 4,
                                "generators": [[1, 2, 3, 0], [0, 3, 2, 1]]}))
    g = resolve_source(str(path))
    assert g.order == 8 and are_isomorphic(g, make_family("dihedral:8")).isomorphic


@pytest.mark.parametrize("data,where", [
    ([], "$"),
    ({"order": 2}, "$"),
    ({"format": "mult-table", "order": 2, "table": [[0, 1]]}, "$.table"),
    ({"format": "mult-table", "order": 2, "table": [[0, 1], [1, 5]]}, "$.table[1][1]"),
    ({"format": "mult-table", "order": 2, "table": [[0, 1], [1, 1]]}, "$.table"),
    ({"format": "perm-gens", "degree": 3, "generators": [[0, "a", 1]]}, "$.generators[0]"),
    ({"format": "perm-gens", "degree": 3, "generators": [[0, 0, 1]]}, "$.generators"),
    ({"format": "cayley"}, "$.format"),
])
def test_group_file_errors_carry_position(data, where):
    with pytest.raises(GroupFileError) as exc:
        group_from_json(data, "f.json")
    assert exc.value.position == f"f.json:{where}"
    assert exc.value.exit_code == 2


def test_bad_json_and_missing_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"format": "mult-table",\n "order": }')
    with pytest.raises(GroupFileError) as exc:
        load_group_file(path)
    assert exc.value.position.endswith(":2:11")
    with pytest.raises(GroupFileError):
        load_group_file(tmp_path / "missing.json")


def test_resolve_family_errors():
    with pytest.raises(InputError):
        resolve_source("nosuchfamily:2")
    with pytest.raises(InputError):
        resolve_source("abelian:x:1")


def test_load_directory_collects_errors(tmp_path):
    (tmp_path / "a.json").write_text(json.dumps(group_to_json(make_family("abelian:2:1"))))
    (tmp_path / "b.json").write_text("{broken")
    entries = load_directory(tmp_path)
    assert [e.name for e in entries] == ["abelian:2:1", "b"]
    assert entries[0].group is not None and entries[1].error is not None

import pytest

from constructions import co_singleton_family, erdos_shelah_family, power_set
from properties import FamilyProperty, PropertyKind


@pytest.mark.parametrize("text,kind,params", [
    ("bd:2", PropertyKind.BD_FREE, (2,)),
    ("uf:3", PropertyKind.UNION_FREE, (3,)),
    ("abuf:2,3", PropertyKind.AB_UNION_FREE, (2, 3)),
    (" UF:2", PropertyKind.UNION_FREE, (2,)),
])
def test_parse(text, kind, params):
    prop = FamilyProperty.parse(text)
    assert (prop.kind, prop.params) == (kind, params)


@pytest.mark.parametrize("text", ["bd", "bd:x", "xx:2", "abuf:2", "uf:2,3", "uf:0"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        FamilyProperty.parse(text)


def test_tag_and_violation_size():
    assert FamilyProperty.ab_union_free(2, 3).tag == "abuf:2,3"
    assert FamilyProperty.bd_free(3).violation_size == 8
    assert FamilyProperty.union_free(2).violation_size == 3
    assert FamilyProperty.ab_union_free(2, 3).violation_size == 5


def test_find_violation_per_kind():
    assert FamilyProperty.bd_free(2).find_violation(power_set(2).masks) == (0, 1, 2, 3)
    assert FamilyProperty.union_free(2).find_violation(erdos_shelah_family(2).masks) == (1, 2, 3)
    family = co_singleton_family(4)
    assert FamilyProperty.ab_union_free(2, 2).find_violation(family.masks) == (0, 1, 2, 3)


def test_holds_on_index_subset():
    family = erdos_shelah_family(2)
    prop = FamilyProperty.union_free(2)
    assert not prop.holds(family)
    assert prop.holds(family, [0, 1, 2])


def test_iter_violations_lists_each_solution():
    family = erdos_shelah_family(2)
    assert list(FamilyProperty.union_free(2).iter_violations(family.masks)) == [(1, 2, 3)]
    # {1}, {2} and {1,2} give one B_2 with an empty base
    assert len(list(FamilyProperty.bd_free(2).iter_violations(power_set(2).masks))) == 1
    assert list(FamilyProperty.bd_free(2, strict=True).iter_violations(power_set(2).masks)) == []

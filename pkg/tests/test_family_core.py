import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_force_union_free
from errors import DuplicateSet, ElementOutOfRange, FamilyParseError, UniverseTooLarge
from family_core import (
    FiniteSet,
    ceil_log2,
    ceil_sqrt,
    family_from_masks,
    format_family,
    is_a_union_free,
    is_ab_union_free,
    is_antichain,
    make_family,
    parse_family,
    rank_partition,
)


def test_finite_set_elements_are_one_based():
    s = FiniteSet.from_elements([3, 1])
    assert s.elements() == [1, 3]
    assert len(s) == 2
    assert 3 in s and 2 not in s
    assert s.min_element() == 1
    assert FiniteSet().min_element() is None
    assert (s | FiniteSet.from_elements([2])).elements() == [1, 2, 3]
    assert FiniteSet.from_elements([1]).is_proper_subset(s)


def test_ceil_helpers():
    assert [ceil_sqrt(x) for x in (1, 2, 3, 4, 5, 9, 10)] == [1, 2, 2, 2, 3, 3, 4]
    assert [ceil_log2(x) for x in (1, 2, 3, 4, 5, 6, 8, 9)] == [0, 1, 2, 2, 3, 3, 3, 4]


def test_make_family_keeps_order():
    family = make_family(3, [[1, 2], [], [3]])
    assert family.size == 3
    assert family.as_lists() == [[1, 2], [], [3]]
    assert family.index_of[0b100] == 2


def test_make_family_rejects_duplicates():
    with pytest.raises(DuplicateSet) as info:
        make_family(3, [[1], [2], [1]])
    assert (info.value.first, info.value.second) == (0, 2)


def test_make_family_rejects_out_of_range():
    with pytest.raises(ElementOutOfRange) as info:
        make_family(3, [[1], [4]])
    assert info.value.element == 4


def test_family_from_masks_rejects_negative_masks():
    with pytest.raises(ValueError, match="member 1 has negative mask -3"):
        family_from_masks(3, [1, -3])


def test_universe_limit_is_enforced():
    with pytest.raises(UniverseTooLarge):
        family_from_masks(70, [1], universe_limit=64)
    # bit masks have no intrinsic width
    assert family_from_masks(70, [1 << 69]).members[0].elements() == [70]


def test_parse_family_with_empty_set():
    family = parse_family("3 3\n1\n1 2\n-\n")
    assert family.as_lists() == [[1], [1, 2], []]
    assert format_family(family) == "3 3\n1\n1 2\n-\n"


def test_parse_duplicate_names_both_lines():
    with pytest.raises(DuplicateSet) as info:
        parse_family("3 3\n1 2\n3\n1 2\n")
    assert info.value.line_numbers == (2, 4)


def test_parse_element_out_of_range_reports_line():
    with pytest.raises(ElementOutOfRange) as info:
        parse_family("3 2\n1\n2 5\n")
    assert info.value.line_number == 3


@pytest.mark.parametrize("text", ["", "3\n1\n", "3 2\n1\n", "3 1\n2 1\n", "3 1\nx\n", "3 1\n\n1\n"])
def test_parse_errors(text):
    with pytest.raises(FamilyParseError):
        parse_family(text)


def test_rank_partition_chain_and_antichain():
    chain = make_family(3, [[1, 2, 3], [1], [1, 2]])
    table = rank_partition(chain)
    assert table.ranks == (3, 1, 2)
    assert table.max_rank == 3
    assert table.chain_to(0) == (1, 2, 0)

    antichain = make_family(4, [[1, 2], [3, 4], [1, 3]])
    assert rank_partition(antichain).levels == ((0, 1, 2),)


def test_union_free_witness():
    family = make_family(2, [[1], [2], [1, 2]])
    check = is_a_union_free(family, 2)
    assert not check
    assert check.witness == (0, 1, 2)
    assert is_a_union_free(family.subfamily([0, 1]), 2).holds


def test_ab_union_free():
    family = make_family(3, [[1], [2], [1, 3], [2, 3]])
    check = is_ab_union_free(family, 2, 2)
    assert not check.holds
    assert sorted(check.witness) == [0, 1, 2, 3]
    assert is_ab_union_free(family, 1, 1).holds


family_masks = st.sets(st.integers(0, 63), min_size=1, max_size=14).map(sorted)


@pytest.mark.property_based
@given(family_masks)
@settings(max_examples=200, deadline=None)
def test_rank_levels_are_antichains(masks):
    family = family_from_masks(6, masks)
    table = rank_partition(family)
    assert sum(len(level) for level in table.levels) == family.size
    for k in range(1, table.max_rank + 1):
        assert is_antichain(family.masks, table.level(k))
        for top in table.level(k):
            assert len(table.chain_to(top)) == k


@pytest.mark.property_based
@given(family_masks, st.integers(2, 3))
@settings(max_examples=200, deadline=None)
def test_union_free_matches_definition(masks, a):
    family = family_from_masks(6, masks)
    assert is_a_union_free(family, a).holds == brute_force_union_free(masks, a)

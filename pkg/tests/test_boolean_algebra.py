import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boolean_algebra import (
    corollary_bound,
    count_boolean_algebras,
    determining_size,
    determining_subfamily,
    enumerate_boolean_algebras,
    generates,
    is_bd_free,
    minimum_determining_size,
    power_set_witness_count,
    verify_witness,
)
from conftest import brute_force_b2_count
from constructions import power_set
from errors import LimitExceeded
from family_core import ceil_log2, family_from_masks, make_family


def expected_minimum(witness):
    """2^k - 1 nonempty regions must cover the nonempty atoms"""
    nonempty_atoms = witness.d + 1 if witness.atoms[0] else witness.d
    return ceil_log2(nonempty_atoms + 1)


@pytest.mark.parametrize("n,d,expected", [(3, 2, 9), (4, 2, 55), (5, 2, 285), (4, 3, 14)])
def test_power_set_counts(n, d, expected):
    assert power_set_witness_count(n, d) == expected
    assert count_boolean_algebras(power_set(n), d) == expected


def test_square_is_a_b2():
    family = make_family(2, [[], [1], [2], [1, 2]])
    witnesses = enumerate_boolean_algebras(family, 2)
    assert len(witnesses) == 1
    witness = witnesses[0]
    assert witness.atoms == (0, 0b01, 0b10)
    assert witness.index_map == (0, 1, 2, 3)
    assert verify_witness(family, witness)


def test_strict_mode_needs_nonempty_base():
    family = make_family(2, [[], [1], [2], [1, 2]])
    assert count_boolean_algebras(family, 2, strict=True) == 0
    shifted = make_family(3, [[3], [1, 3], [2, 3], [1, 2, 3]])
    assert count_boolean_algebras(shifted, 2, strict=True) == 1


def test_chain_is_bd_free():
    family = make_family(3, [[], [1], [1, 2], [1, 2, 3]])
    assert is_bd_free(family, 2)
    assert count_boolean_algebras(family, 2) == 0


def test_enumeration_limit_keeps_partial():
    with pytest.raises(LimitExceeded) as info:
        enumerate_boolean_algebras(power_set(3), 2, limit=4)
    assert len(info.value.partial) == 4


def test_determining_sizes():
    assert [determining_size(d) for d in (1, 2, 3, 6, 7)] == [2, 2, 3, 3, 4]
    assert corollary_bound(10, 2) == 45


@pytest.mark.parametrize("d", [1, 2, 3])
def test_binary_code_subfamily_generates(d):
    witness = enumerate_boolean_algebras(power_set(d + 1), d)[0]
    chosen = determining_subfamily(witness)
    assert chosen.size == determining_size(d)
    assert generates(chosen.masks, witness)
    assert minimum_determining_size(witness) == expected_minimum(witness)


def test_single_member_does_not_generate_b2():
    witness = enumerate_boolean_algebras(power_set(2), 2)[0]
    assert not generates([witness.member_mask(0b11)], witness)


@pytest.mark.property_based
@given(st.sets(st.integers(0, 31), min_size=1, max_size=16).map(sorted))
@settings(max_examples=200, deadline=None)
def test_b2_count_matches_brute_force(masks):
    family = family_from_masks(5, masks)
    witnesses = enumerate_boolean_algebras(family, 2)
    assert len(witnesses) == brute_force_b2_count(masks)
    assert all(verify_witness(family, w) for w in witnesses)


@pytest.mark.parametrize("d", [2, 3])
def test_every_witness_in_power_set_has_minimal_determining_set(d):
    family = power_set(4)
    witnesses = enumerate_boolean_algebras(family, d)
    assert len(witnesses) <= corollary_bound(family.size, d)
    for witness in witnesses:
        chosen = determining_subfamily(witness)
        assert chosen.size == determining_size(d)
        assert generates(chosen.masks, witness)
        assert minimum_determining_size(witness) == expected_minimum(witness)


def test_nested_pairs_are_b1():
    family = make_family(2, [[], [1], [1, 2]])
    witnesses = enumerate_boolean_algebras(family, 1)
    assert [w.index_map for w in witnesses] == [(0, 1), (0, 2), (1, 2)]
    assert count_boolean_algebras(family, 1, strict=True) == 1


def test_empty_base_needs_fewer_generators():
    witness = next(w for w in enumerate_boolean_algebras(power_set(3), 3))
    assert witness.atoms[0] == 0
    assert minimum_determining_size(witness) == 2 < determining_size(3)

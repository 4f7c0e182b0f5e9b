import pytest

from boolean_algebra import count_boolean_algebras
from constructions import (
    ChainProductSpec,
    LeveledSpec,
    bd_extremal_family,
    bd_extremal_sizes,
    chain_product,
    chain_product_coordinates,
    co_singleton_family,
    erdos_shelah_family,
    level_slices,
    leveled_family,
    power_set,
)
from errors import GeometricUndefined, UniverseTooLarge
from family_core import is_a_union_free


def test_erdos_shelah_member_order():
    family = erdos_shelah_family(2)
    assert family.universe_size == 4
    assert family.as_lists() == [[1, 3], [1, 2, 3], [1, 3, 4], [1, 2, 3, 4]]


def test_chain_product_coordinates_first_fastest():
    assert chain_product_coordinates((2, 3))[:4] == [(1, 1), (2, 1), (1, 2), (2, 2)]
    assert len(chain_product_coordinates((2, 3, 4))) == 24


def test_chain_product_sizes():
    spec = ChainProductSpec((2, 3, 4))
    family = chain_product(spec)
    assert (family.size, family.universe_size) == (24, 9)
    assert chain_product(ChainProductSpec((3,))).as_lists() == [[1], [1, 2], [1, 2, 3]]
    with pytest.raises(ValueError):
        chain_product(ChainProductSpec((2, 0)))


def test_bd_extremal_family():
    assert bd_extremal_sizes(2, 3) == (2, 4, 16)
    family = bd_extremal_family(2, 2)
    assert (family.size, family.universe_size) == (8, 6)
    # one B_2 per pair of values in each chain
    assert count_boolean_algebras(family, 2) == 6
    with pytest.raises(ValueError):
        bd_extremal_family(1, 2)


def test_limits_are_enforced():
    with pytest.raises(UniverseTooLarge):
        bd_extremal_family(3, 3, universe_limit=64)
    with pytest.raises(UniverseTooLarge):
        power_set(6, max_family_size=32)


def test_uniform_leveled_family():
    spec = LeveledSpec.uniform(3, 2)
    family = leveled_family(spec)
    assert (family.size, family.universe_size) == (12, 12)
    slices = level_slices(spec)
    assert [len(s) for s in slices] == [4, 4, 4]
    lower, upper = family.masks[slices[0].start:slices[0].stop], family.masks[slices[1].start:]
    assert all(low & ~high == 0 for low in lower for high in upper)


def test_geometric_levels():
    spec = LeveledSpec.geometric(2, 3, 8)
    assert spec.level_sizes == (2, 8, 32)
    assert spec.real_level_sizes == (2.0, 8.0, 32.0)
    assert spec.size == 4 + 64 + 1024
    with pytest.raises(GeometricUndefined):
        LeveledSpec.geometric(2, 3, 3)


def test_geometric_rounds_half_up():
    # b = 3, ratio 2: sizes k * 4^l
    assert LeveledSpec.geometric(1, 2, 5).level_sizes == (1, 4)


def test_co_singleton_order():
    family = co_singleton_family(4)
    assert family.as_lists() == [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]
    assert is_a_union_free(family, 2).holds
    with pytest.raises(ValueError):
        co_singleton_family(1)


def test_power_set_order():
    family = power_set(2)
    assert family.as_lists() == [[], [1], [2], [1, 2]]
    assert power_set(0).as_lists() == [[]]

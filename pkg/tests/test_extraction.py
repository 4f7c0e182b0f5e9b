import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from constructions import co_singleton_family, erdos_shelah_family, power_set
from errors import InternalVerificationFailed
from extraction import default_probability, greedy_extract, kleitman_extract, random_deletion_bd_free
from family_core import family_from_masks, is_a_union_free
from properties import FamilyProperty


def test_default_probability():
    assert default_probability(32, 2) == pytest.approx(0.25)
    assert default_probability(1, 2) == pytest.approx(2 ** (-1 / 3))
    # d = 3: k = 3, exponent -(k-1)/7
    assert default_probability(128, 3) == pytest.approx(128 ** (-2 / 7))
    with pytest.raises(ValueError):
        default_probability(10, 1)


def test_random_deletion_meets_guarantee():
    family = power_set(5)
    result = random_deletion_bd_free(family, 2, seed=7, trials=200)
    assert result.details["witness_count"] == 285
    assert result.guarantee == pytest.approx(8 - 285 / 256)
    assert result.size >= math.ceil(result.guarantee) == 7
    assert FamilyProperty.bd_free(2).holds(family, result.indices)
    assert result.property_tag == "bd:2"
    assert result.mean >= 0.9 * result.guarantee


def test_random_deletion_is_reproducible():
    family = power_set(4)
    first = random_deletion_bd_free(family, 2, seed=11, trials=20)
    second = random_deletion_bd_free(family, 2, seed=11, trials=20)
    assert first.indices == second.indices
    assert first.details["trial_sizes"] == second.details["trial_sizes"]


def test_random_deletion_rejects_bad_arguments():
    family = power_set(3)
    with pytest.raises(ValueError):
        random_deletion_bd_free(family, 2, p=0.0)
    with pytest.raises(ValueError):
        random_deletion_bd_free(family, 1)
    with pytest.raises(ValueError):
        random_deletion_bd_free(family, 2, trials=0)


def test_random_deletion_pessimistic_when_count_too_large():
    family = power_set(4)
    result = random_deletion_bd_free(family, 2, seed=1, trials=5, enumeration_limit=10)
    assert result.guarantee_pessimistic
    # C(16, 2) replaces the true count 55
    assert result.details["witness_count"] == 120


def test_kleitman_on_power_set():
    result = kleitman_extract(power_set(3), 2)
    assert result.size == 5
    assert result.details["level"] == 3
    assert result.guarantee == 5.0
    assert result.details["average_bound"] == pytest.approx(8 / 4 + 3 / 2)


def test_kleitman_on_erdos_shelah_grid():
    result = kleitman_extract(erdos_shelah_family(2), 2)
    assert result.size == 3
    assert result.details["level"] == 2


def test_greedy_orders():
    family = power_set(2)
    prop = FamilyProperty.bd_free(2)
    assert greedy_extract(family, prop).indices == [0, 1, 2]
    assert greedy_extract(family, prop, "size-descending").indices == [1, 2, 3]
    with pytest.raises(ValueError):
        greedy_extract(family, prop, "random")


@pytest.mark.property_based
@given(st.sets(st.integers(0, 31), min_size=1, max_size=20).map(sorted), st.integers(2, 3))
@settings(max_examples=100, deadline=None)
def test_kleitman_output_is_union_free(masks, a):
    family = family_from_masks(5, masks)
    try:
        result = kleitman_extract(family, a)
    except InternalVerificationFailed:
        pytest.fail("rank-split subfamily failed its own check")
    assert is_a_union_free(family.subfamily(result.indices), a).holds
    assert result.size >= math.sqrt(2 * family.size) - 0.5


def test_kleitman_keeps_whole_antichain():
    family = co_singleton_family(6)
    result = kleitman_extract(family, 3)
    assert result.indices == list(range(6))


@pytest.mark.property_based
@given(st.sets(st.integers(0, 1023), min_size=1, max_size=40).map(sorted), st.integers(2, 4))
@settings(max_examples=1000, deadline=None)
def test_kleitman_guarantee_over_ten_elements(masks, a):
    family = family_from_masks(10, masks)
    result = kleitman_extract(family, a)
    assert result.size >= math.ceil(math.sqrt(2 * family.size) - 0.5)
    assert is_a_union_free(family.subfamily(result.indices), a).holds

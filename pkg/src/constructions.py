"""
Constructions - the named families: chain products, Erdős–Shelah grids, the
B_d extremal products, leveled stacks, co-singletons and power sets
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import product
from typing import List, Optional, Sequence, Tuple

from errors import GeometricUndefined, UniverseTooLarge
from family_core import (
    DEFAULT_UNIVERSE_LIMIT,
    SetFamily,
    ceil_sqrt,
    check_universe,
    family_from_masks,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_FAMILY_SIZE = 1 << 16


@dataclass(frozen=True)
class ChainProductSpec:
    """Chain i uses a fresh contiguous block of s_i elements; S^i_j is its first j"""
    chain_sizes: Tuple[int, ...]

    @property
    def universe_size(self) -> int:
        return sum(self.chain_sizes)

    @property
    def size(self) -> int:
        return math.prod(self.chain_sizes)

    def offsets(self) -> List[int]:
        offsets, start = [], 0
        for s in self.chain_sizes:
            offsets.append(start)
            start += s
        return offsets


@dataclass(frozen=True)
class LeveledSpec:
    level_sizes: Tuple[int, ...]
    # unrounded sizes of the geometric variant, empty otherwise
    real_level_sizes: Tuple[float, ...] = field(default=())

    @classmethod
    def uniform(cls, q: int, k: int) -> "LeveledSpec":
        return cls(tuple([k] * q))

    @classmethod
    def geometric(cls, k: int, q: int, a: int) -> "LeveledSpec":
        """k_l = k((b-1)/(b-2))^(2(l-1)) with b = ceil(sqrt(a+1)), rounded half up, at least 1"""
        if a < 4:
            raise GeometricUndefined(f"geometric levels need a >= 4 (b - 2 > 0), got a={a}")
        b = ceil_sqrt(a + 1)
        ratio = (b - 1) / (b - 2)
        real = tuple(k * ratio ** (2 * level) for level in range(q))
        rounded = tuple(max(1, math.floor(value + 0.5)) for value in real)
        return cls(rounded, real)

    @property
    def q(self) -> int:
        return len(self.level_sizes)

    @property
    def size(self) -> int:
        return sum(k * k for k in self.level_sizes)


def _check_size(size: int, max_family_size: Optional[int]) -> None:
    if max_family_size is not None and size > max_family_size:
        raise UniverseTooLarge(f"family of {size} members exceeds the configured limit {max_family_size}")


def chain_product_coordinates(chain_sizes: Sequence[int]) -> List[Tuple[int, ...]]:
    """(j_1, ..., j_d) for every member, in member order (j_1 varies fastest)"""
    ranges = [range(1, s + 1) for s in reversed(chain_sizes)]
    return [tuple(reversed(coords)) for coords in product(*ranges)]


def chain_product(spec: ChainProductSpec, universe_limit: Optional[int] = DEFAULT_UNIVERSE_LIMIT,
                  max_family_size: Optional[int] = DEFAULT_MAX_FAMILY_SIZE) -> SetFamily:
    if any(s < 1 for s in spec.chain_sizes):
        raise ValueError(f"chain sizes must be >= 1, got {spec.chain_sizes}")
    check_universe(spec.universe_size, universe_limit)
    _check_size(spec.size, max_family_size)

    offsets = spec.offsets()
    masks = []
    for coords in chain_product_coordinates(spec.chain_sizes):
        mask = 0
        for offset, j in zip(offsets, coords):
            mask |= ((1 << j) - 1) << offset
        masks.append(mask)
    logger.debug(f"Built chain product {spec.chain_sizes}: m={len(masks)}, n={spec.universe_size}")
    return family_from_masks(spec.universe_size, masks)


def erdos_shelah_family(k: int, **limits) -> SetFamily:
    """F_ES(k) = {A_i ∪ B_j}; member (i, j) sits at index (j-1)*k + (i-1)"""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return chain_product(ChainProductSpec((k, k)), **limits)


def bd_extremal_sizes(k: int, d: int) -> Tuple[int, ...]:
    return tuple(k ** (2 ** i) for i in range(d))


def bd_extremal_family(k: int, d: int, **limits) -> SetFamily:
    """Product of d chains of sizes k, k^2, ..., k^(2^(d-1)); m = k^(2^d - 1)"""
    if k < 2 or d < 2:
        raise ValueError(f"need k >= 2 and d >= 2, got k={k}, d={d}")
    return chain_product(ChainProductSpec(bd_extremal_sizes(k, d)), **limits)


def leveled_family(spec: LeveledSpec, universe_limit: Optional[int] = DEFAULT_UNIVERSE_LIMIT,
                   max_family_size: Optional[int] = DEFAULT_MAX_FAMILY_SIZE) -> SetFamily:
    """Level l is F_ES(k_l) on fresh elements, shifted up by the tops of all lower levels"""
    if spec.q < 1 or any(k < 1 for k in spec.level_sizes):
        raise ValueError(f"need q >= 1 and every k >= 1, got {spec.level_sizes}")
    universe_size = 2 * sum(spec.level_sizes)
    check_universe(universe_size, universe_limit)
    _check_size(spec.size, max_family_size)

    masks = []
    below, offset = 0, 0
    for k in spec.level_sizes:
        a_offset, b_offset = offset, offset + k
        for j in range(1, k + 1):
            for i in range(1, k + 1):
                a_part = ((1 << i) - 1) << a_offset
                b_part = ((1 << j) - 1) << b_offset
                masks.append(below | a_part | b_part)
        below |= ((1 << (2 * k)) - 1) << offset
        offset += 2 * k
    return family_from_masks(universe_size, masks)


def level_slices(spec: LeveledSpec) -> List[range]:
    """Member index range of each level"""
    slices, start = [], 0
    for k in spec.level_sizes:
        slices.append(range(start, start + k * k))
        start += k * k
    return slices


def co_singleton_family(m: int) -> SetFamily:
    """All (m-1)-subsets of [m], in lexicographic order"""
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    full = (1 << m) - 1
    masks = [full & ~(1 << omitted) for omitted in range(m - 1, -1, -1)]
    return family_from_masks(m, masks)


def power_set(n: int, universe_limit: Optional[int] = DEFAULT_UNIVERSE_LIMIT,
              max_family_size: Optional[int] = DEFAULT_MAX_FAMILY_SIZE) -> SetFamily:
    """2^[n] ordered by the numeric value of the membership vector"""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    check_universe(n, universe_limit)
    _check_size(2 ** n, max_family_size)
    return family_from_masks(n, list(range(2 ** n)))

"""
Family Core - finite sets, set families, rank levels and the union-type predicates
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from errors import DuplicateSet, ElementOutOfRange, FamilyParseError, UniverseTooLarge

logger = logging.getLogger(__name__)

# Sets are Python ints used as bit vectors, so any universe size works; the
# limit only keeps desk-scale runs honest and can be raised in config.json.
DEFAULT_UNIVERSE_LIMIT = 64


def ceil_sqrt(x: int) -> int:
    """Smallest b with b*b >= x"""
    if x <= 0:
        return 0
    root = math.isqrt(x)
    return root if root * root == x else root + 1


def ceil_log2(x: int) -> int:
    """Smallest k with 2**k >= x, for x >= 1"""
    return (x - 1).bit_length()


def check_universe(universe_size: int, limit: Optional[int]) -> None:
    if limit is not None and universe_size > limit:
        raise UniverseTooLarge(
            f"universe of {universe_size} elements exceeds the configured limit {limit}"
        )


@dataclass(frozen=True)
class FiniteSet:
    """A set over universe positions 0..n-1 stored as a bit mask"""
    mask: int = 0

    @classmethod
    def from_elements(cls, elements: Iterable[int]) -> "FiniteSet":
        """Build from 1-based elements"""
        mask = 0
        for element in elements:
            mask |= 1 << (element - 1)
        return cls(mask)

    def elements(self) -> List[int]:
        """Sorted 1-based elements"""
        return [position + 1 for position in self.positions()]

    def positions(self) -> Iterator[int]:
        mask = self.mask
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements())

    def __contains__(self, element: int) -> bool:
        return element >= 1 and (self.mask >> (element - 1)) & 1 == 1

    def __or__(self, other: "FiniteSet") -> "FiniteSet":
        return FiniteSet(self.mask | other.mask)

    def __and__(self, other: "FiniteSet") -> "FiniteSet":
        return FiniteSet(self.mask & other.mask)

    def __sub__(self, other: "FiniteSet") -> "FiniteSet":
        return FiniteSet(self.mask & ~other.mask)

    def issubset(self, other: "FiniteSet") -> bool:
        return self.mask & ~other.mask == 0

    def is_proper_subset(self, other: "FiniteSet") -> bool:
        return self.mask != other.mask and self.issubset(other)

    def min_element(self) -> Optional[int]:
        if not self.mask:
            return None
        return (self.mask & -self.mask).bit_length()

    def __repr__(self) -> str:
        return "{" + ",".join(str(e) for e in self.elements()) + "}"


@dataclass(frozen=True)
class SetFamily:
    """Ordered family of distinct sets over [n]; build it with make_family"""
    universe_size: int
    members: Tuple[FiniteSet, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[FiniteSet]:
        return iter(self.members)

    def __getitem__(self, index: int) -> FiniteSet:
        return self.members[index]

    @cached_property
    def masks(self) -> Tuple[int, ...]:
        return tuple(member.mask for member in self.members)

    @cached_property
    def index_of(self) -> Dict[int, int]:
        return {mask: index for index, mask in enumerate(self.masks)}

    def subfamily(self, indices: Iterable[int]) -> "SetFamily":
        """Members at `indices`, kept in family order"""
        chosen = sorted(set(indices))
        return SetFamily(self.universe_size, tuple(self.members[i] for i in chosen))

    def as_lists(self) -> List[List[int]]:
        return [member.elements() for member in self.members]


@dataclass(frozen=True)
class RankTable:
    ranks: Tuple[int, ...]
    levels: Tuple[Tuple[int, ...], ...]
    max_rank: int
    # the proper subset a longest chain steps down to, None at rank 1
    predecessors: Tuple[Optional[int], ...]

    def level(self, k: int) -> Tuple[int, ...]:
        """Member indices of rank k (1-based)"""
        return self.levels[k - 1]

    def chain_to(self, top: int) -> Tuple[int, ...]:
        """A longest chain ending at `top`, listed bottom to top"""
        chain = [top]
        while self.predecessors[chain[-1]] is not None:
            chain.append(self.predecessors[chain[-1]])
        return tuple(reversed(chain))


@dataclass(frozen=True)
class UnionCheck:
    holds: bool
    witness: Optional[Tuple[int, ...]] = None

    def __bool__(self) -> bool:
        return self.holds


def family_from_masks(universe_size: int, masks: Sequence[int],
                      universe_limit: Optional[int] = None) -> SetFamily:
    check_universe(universe_size, universe_limit)
    seen: Dict[int, int] = {}
    for index, mask in enumerate(masks):
        if mask < 0:
            raise ValueError(f"member {index} has negative mask {mask}")
        if mask >> universe_size:
            bad = FiniteSet(mask).elements()[-1]
            raise ElementOutOfRange(bad, universe_size, index)
        if mask in seen:
            raise DuplicateSet(seen[mask], index)
        seen[mask] = index
    return SetFamily(universe_size, tuple(FiniteSet(mask) for mask in masks))


def make_family(universe_size: int, sets: Sequence[Iterable[int]],
                universe_limit: Optional[int] = None) -> SetFamily:
    """Build a family from 1-based element lists, keeping the given order"""
    masks = []
    for index, elements in enumerate(sets):
        mask = 0
        for element in elements:
            if element < 1 or element > universe_size:
                raise ElementOutOfRange(element, universe_size, index)
            mask |= 1 << (element - 1)
        masks.append(mask)
    return family_from_masks(universe_size, masks, universe_limit)


def is_antichain(masks: Sequence[int], indices: Iterable[int]) -> bool:
    chosen = list(indices)
    for i, j in combinations(chosen, 2):
        if masks[i] & ~masks[j] == 0 or masks[j] & ~masks[i] == 0:
            return False
    return True


def rank_partition(family: SetFamily) -> RankTable:
    """Rank = length of the longest chain in the family ending at the member"""
    masks = family.masks
    m = len(masks)
    order = sorted(range(m), key=lambda i: (masks[i].bit_count(), i))
    ranks = [0] * m
    predecessors: List[Optional[int]] = [None] * m
    done: List[int] = []
    for i in order:
        best, pred = 0, None
        for j in done:
            if masks[j] != masks[i] and masks[j] & ~masks[i] == 0:
                if ranks[j] > best or (ranks[j] == best and pred is not None and j < pred):
                    best, pred = ranks[j], j
        ranks[i] = best + 1
        predecessors[i] = pred
        done.append(i)

    max_rank = max(ranks, default=0)
    levels = tuple(
        tuple(i for i in range(m) if ranks[i] == k) for k in range(1, max_rank + 1)
    )
    return RankTable(tuple(ranks), levels, max_rank, tuple(predecessors))


def _find_cover(target: int, candidates: Sequence[Tuple[int, int]], need: int) -> Optional[Tuple[int, ...]]:
    """Lexicographically first `need` candidates (index, mask) whose union is `target`.

    Every candidate mask must already be a subset of `target`.
    """
    if need <= 0 or len(candidates) < need:
        return None
    suffix = [0] * (len(candidates) + 1)
    for pos in range(len(candidates) - 1, -1, -1):
        suffix[pos] = suffix[pos + 1] | candidates[pos][1]
    if suffix[0] != target:
        return None

    chosen: List[int] = []

    def search(start: int, covered: int) -> bool:
        remaining = need - len(chosen)
        if remaining == 0:
            return covered == target
        for pos in range(start, len(candidates) - remaining + 1):
            # suffix unions shrink as pos grows
            if covered | suffix[pos] != target:
                return False
            chosen.append(candidates[pos][0])
            if search(pos + 1, covered | candidates[pos][1]):
                return True
            chosen.pop()
        return False

    return tuple(chosen) if search(0, 0) else None


def union_violation(masks: Sequence[int], a: int,
                    active: Optional[Sequence[int]] = None) -> Optional[Tuple[int, ...]]:
    """First (F_1..F_a, F_{a+1}) index tuple with F_1 | ... | F_a == F_{a+1}"""
    pool = sorted(active) if active is not None else list(range(len(masks)))
    for target in pool:
        t_mask = masks[target]
        candidates = [
            (i, masks[i]) for i in pool
            if i != target and masks[i] & ~t_mask == 0
        ]
        cover = _find_cover(t_mask, candidates, a)
        if cover is not None:
            return cover + (target,)
    return None


def iter_union_solutions(masks: Sequence[int], a: int,
                         active: Optional[Sequence[int]] = None) -> Iterator[Tuple[int, ...]]:
    """Every solution as (sorted a-combination..., target)"""
    pool = sorted(active) if active is not None else list(range(len(masks)))
    for target in pool:
        t_mask = masks[target]
        candidates = [i for i in pool if i != target and masks[i] & ~t_mask == 0]
        if len(candidates) < a:
            continue
        for combo in combinations(candidates, a):
            union = 0
            for i in combo:
                union |= masks[i]
            if union == t_mask:
                yield combo + (target,)


def ab_union_violation(masks: Sequence[int], a: int, b: int,
                       active: Optional[Sequence[int]] = None) -> Optional[Tuple[int, ...]]:
    """First a+b distinct indices whose first a and last b members have equal unions"""
    pool = sorted(active) if active is not None else list(range(len(masks)))
    if len(pool) < a + b:
        return None
    for left in combinations(pool, a):
        union = 0
        for i in left:
            union |= masks[i]
        taken = set(left)
        candidates = [
            (i, masks[i]) for i in pool
            if i not in taken and masks[i] & ~union == 0
        ]
        cover = _find_cover(union, candidates, b)
        if cover is not None:
            return left + cover
    return None


def iter_ab_union_solutions(masks: Sequence[int], a: int, b: int,
                            active: Optional[Sequence[int]] = None) -> Iterator[Tuple[int, ...]]:
    """Every ordered (left a-set, right b-set) solution"""
    pool = sorted(active) if active is not None else list(range(len(masks)))
    if len(pool) < a + b:
        return
    for left in combinations(pool, a):
        union = 0
        for i in left:
            union |= masks[i]
        taken = set(left)
        candidates = [i for i in pool if i not in taken and masks[i] & ~union == 0]
        for right in combinations(candidates, b):
            other = 0
            for i in right:
                other |= masks[i]
            if other == union:
                yield left + right


def is_a_union_free(family: SetFamily, a: int) -> UnionCheck:
    if a < 1:
        raise ValueError(f"a must be >= 1, got {a}")
    witness = union_violation(family.masks, a)
    return UnionCheck(witness is None, witness)


def is_ab_union_free(family: SetFamily, a: int, b: int) -> UnionCheck:
    if a < 1 or b < 1:
        raise ValueError(f"a and b must be >= 1, got a={a}, b={b}")
    witness = ab_union_violation(family.masks, a, b)
    return UnionCheck(witness is None, witness)


# ---------------------------------------------------------------------------
# Text format: "n m" header, then one strictly increasing 1-based list per
# line, "-" for the empty set.
# ---------------------------------------------------------------------------

def parse_family(text: str, universe_limit: Optional[int] = None) -> SetFamily:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FamilyParseError(1, "missing 'n m' header")

    header = lines[0].split()
    if len(header) != 2 or not all(token.isdigit() for token in header):
        raise FamilyParseError(1, f"expected 'n m' header, got {lines[0]!r}")
    universe_size, declared = int(header[0]), int(header[1])
    check_universe(universe_size, universe_limit)

    body = lines[1:]
    if len(body) != declared:
        raise FamilyParseError(len(lines), f"header declares {declared} sets but {len(body)} follow")

    masks: List[int] = []
    first_line: Dict[int, int] = {}
    for offset, raw in enumerate(body):
        line_number = offset + 2
        tokens = raw.split()
        if tokens == ["-"]:
            mask = 0
        else:
            if not tokens:
                raise FamilyParseError(line_number, "empty line (use '-' for the empty set)")
            if not all(token.isdigit() for token in tokens):
                raise FamilyParseError(line_number, f"non-integer element in {raw!r}")
            elements = [int(token) for token in tokens]
            if any(x >= y for x, y in zip(elements, elements[1:])):
                raise FamilyParseError(line_number, "elements must be strictly increasing")
            mask = 0
            for element in elements:
                if element < 1 or element > universe_size:
                    raise ElementOutOfRange(element, universe_size, offset, line_number)
                mask |= 1 << (element - 1)
        if mask in first_line:
            raise DuplicateSet(masks.index(mask), offset, (first_line[mask], line_number))
        first_line[mask] = line_number
        masks.append(mask)

    logger.debug(f"Parsed family with n={universe_size}, m={len(masks)}")
    return SetFamily(universe_size, tuple(FiniteSet(mask) for mask in masks))


def format_family(family: SetFamily) -> str:
    lines = [f"{family.universe_size} {family.size}"]
    for member in family.members:
        elements = member.elements()
        lines.append(" ".join(str(e) for e in elements) if elements else "-")
    return "\n".join(lines) + "\n"

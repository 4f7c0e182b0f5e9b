"""
Boolean Algebra - detects, counts and certifies Boolean subalgebras of dimension d
inside a set family, and builds determining subfamilies for them
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from math import comb, factorial
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from errors import InternalVerificationFailed, LimitExceeded
from family_core import FiniteSet, SetFamily, ceil_log2

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BooleanAlgebraWitness:
    """B_I for every I ⊆ [d]; I is a bit mask with bit i-1 standing for i"""
    d: int
    index_map: Tuple[int, ...]
    # A_0 (may be empty), then A_1..A_d sorted by least element
    atoms: Tuple[int, ...]

    def member_mask(self, subset: int) -> int:
        mask = self.atoms[0]
        for i in range(self.d):
            if subset >> i & 1:
                mask |= self.atoms[i + 1]
        return mask

    def members(self) -> Tuple[int, ...]:
        return tuple(sorted(self.index_map))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "atoms": [FiniteSet(atom).elements() for atom in self.atoms],
            "members": {str(subset): index for subset, index in enumerate(self.index_map)},
        }


@dataclass(frozen=True)
class DeterminingSet:
    indices: Tuple[int, ...]
    masks: Tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.indices)


def determining_size(d: int) -> int:
    """ceil(log2(d+2)): optimal once A_0 is nonempty, one more than needed for some empty bases"""
    return ceil_log2(d + 2)


def corollary_bound(m: int, d: int) -> int:
    """Upper bound C(m, ceil(log2(d+2))) on the number of B_d copies among m sets"""
    return comb(m, determining_size(d))


def power_set_witness_count(n: int, d: int) -> int:
    """Exact number of B_d copies in 2^[n]: A_0 free, d nonempty disjoint atoms, unordered"""
    total = sum((-1) ** j * comb(d, j) * (d + 2 - j) ** n for j in range(d + 1))
    return total // factorial(d)


def iter_boolean_algebras(masks: Sequence[int], d: int,
                          active: Optional[Iterable[int]] = None,
                          strict: bool = False) -> Iterator[BooleanAlgebraWitness]:
    """Yield each canonical B_d witness whose members all lie in `active`.

    Candidates for the generators B_{1},...,B_{d} are d-subsets of the pool; the
    common intersection is A_0 and the remainders are the atoms. Each algebra has
    exactly one generator set, so unordered d-subsets already cover every labelling.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    pool = sorted(active) if active is not None else list(range(len(masks)))
    if len(pool) < 2 ** d:
        return
    in_pool = {masks[i]: i for i in pool}
    seen = set()

    if d == 1:
        # a lone generator is its own intersection; B_1 is a strictly nested pair
        for low in pool:
            if strict and masks[low] == 0:
                continue
            for high in pool:
                if masks[low] != masks[high] and masks[low] & ~masks[high] == 0:
                    yield BooleanAlgebraWitness(1, (low, high), (masks[low], masks[high] & ~masks[low]))
        return

    for generators in combinations(pool, d):
        base = masks[generators[0]]
        for g in generators[1:]:
            base &= masks[g]
        if strict and base == 0:
            continue
        if base not in in_pool:
            continue

        atoms = [masks[g] & ~base for g in generators]
        if any(atom == 0 for atom in atoms):
            continue
        joined = 0
        for atom in atoms:
            if joined & atom:
                break
            joined |= atom
        else:
            atoms.sort(key=lambda atom: atom & -atom)
            key = (base, tuple(atoms))
            if key in seen:
                continue

            index_map = []
            for subset in range(2 ** d):
                mask = base
                for i in range(d):
                    if subset >> i & 1:
                        mask |= atoms[i]
                index = in_pool.get(mask)
                if index is None:
                    break
                index_map.append(index)
            else:
                seen.add(key)
                yield BooleanAlgebraWitness(d, tuple(index_map), (base, *atoms))


def enumerate_boolean_algebras(family: SetFamily, d: int, limit: Optional[int] = None,
                               strict: bool = False) -> List[BooleanAlgebraWitness]:
    found: List[BooleanAlgebraWitness] = []
    for witness in iter_boolean_algebras(family.masks, d, strict=strict):
        found.append(witness)
        if limit is not None and len(found) > limit:
            logger.warning(f"B_{d} enumeration stopped after {limit} witnesses")
            raise LimitExceeded(f"more than {limit} B_{d} witnesses", partial=found[:limit])
    return found


def count_boolean_algebras(family: SetFamily, d: int, limit: Optional[int] = None,
                           strict: bool = False) -> int:
    if 2 ** d > family.size:
        return 0
    return len(enumerate_boolean_algebras(family, d, limit=limit, strict=strict))


def is_bd_free(family: SetFamily, d: int, strict: bool = False) -> bool:
    return next(iter_boolean_algebras(family.masks, d, strict=strict), None) is None


def verify_witness(family: SetFamily, witness: BooleanAlgebraWitness) -> bool:
    """The defining check: B_I ∪ B_J = B_{I∪J} and B_I ∩ B_J = B_{I∩J} for all I, J"""
    size = 2 ** witness.d
    if len(witness.index_map) != size or len(set(witness.index_map)) != size:
        return False
    sets = [family.masks[index] for index in witness.index_map]
    for i in range(size):
        for j in range(size):
            if sets[i] | sets[j] != sets[i | j] or sets[i] & sets[j] != sets[i & j]:
                return False
    return True


def _as_mask(item: Union[FiniteSet, int]) -> int:
    return item.mask if isinstance(item, FiniteSet) else item


def closure(generators: Sequence[Union[FiniteSet, int]]) -> set:
    """Closure under union, intersection and difference (no complements)"""
    closed = {_as_mask(g) for g in generators}
    frontier = list(closed)
    while frontier:
        snapshot = list(closed)
        fresh = []
        for x in frontier:
            for y in snapshot:
                for z in (x | y, x & y, x & ~y, y & ~x):
                    if z not in closed:
                        closed.add(z)
                        fresh.append(z)
        frontier = fresh
    return closed


def generates(generators: Sequence[Union[FiniteSet, int]], witness: BooleanAlgebraWitness) -> bool:
    if not generators:
        raise ValueError("generators must be nonempty")
    closed = closure(generators)
    return all(witness.member_mask(subset) in closed for subset in range(2 ** witness.d))


def determining_subfamily(witness: BooleanAlgebraWitness) -> DeterminingSet:
    """C_j = A_0 ∪ {A_i : bit j-1 of i is set}, j = 1..ceil(log2(d+2))"""
    k = determining_size(witness.d)
    indices, masks = [], []
    for j in range(k):
        subset = 0
        for i in range(1, witness.d + 1):
            if i >> j & 1:
                subset |= 1 << (i - 1)
        indices.append(witness.index_map[subset])
        masks.append(witness.member_mask(subset))
    result = DeterminingSet(tuple(indices), tuple(masks))
    if not generates(result.masks, witness):
        raise InternalVerificationFailed(f"binary-code subfamily does not determine B_{witness.d}")
    return result


def minimum_determining_size(witness: BooleanAlgebraWitness) -> int:
    """Exhaustive: size of the smallest generating subfamily of the witness"""
    members = [witness.member_mask(subset) for subset in range(2 ** witness.d)]
    for size in range(1, len(members) + 1):
        for chosen in combinations(members, size):
            if generates(chosen, witness):
                return size
    raise InternalVerificationFailed("the full algebra failed to generate itself")

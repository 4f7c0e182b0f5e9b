"""
Exact Oracle - branch and bound for the largest Γ-subfamily of a small family,
and the minimum of that value over all m-member families on [n]
"""

import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, islice, permutations
from math import comb
from typing import Callable, List, Optional, Sequence

from dataclasses_json import dataclass_json

from boolean_algebra import count_boolean_algebras
from errors import InternalVerificationFailed, LimitExceeded
from extraction import greedy_extract
from family_core import SetFamily, family_from_masks
from metrics import SEARCH_NODES, SEARCH_SECONDS, SEARCH_UNPROVEN
from properties import FamilyProperty, PropertyKind

logger = logging.getLogger(__name__)

# violations sampled when ranking branch candidates and when packing
PRIORITY_SAMPLE = 200_000
PACKING_SAMPLE = 5_000

ViolationFinder = Callable[[List[int]], Optional[Sequence[int]]]


@dataclass
class SearchConfig:
    node_limit: int = 2_000_000
    time_limit: float = 60.0
    initial: Optional[List[int]] = None

    def __post_init__(self):
        if self.node_limit <= 0 or self.time_limit <= 0:
            raise ValueError("search limits must be positive")


@dataclass_json
@dataclass
class OracleResult:
    optimum: int
    indices: List[int]
    proven: bool
    nodes: int
    property_tag: str = ""
    method: str = "branch-and-bound"


@dataclass_json
@dataclass
class MinFamilyResult:
    value: int
    universe_size: int
    family: List[List[int]]
    families_examined: int
    proven: bool
    property_tag: str = ""
    details: dict = field(default_factory=dict)


class _Search:
    """Depth-first deletion search; branch i deletes participant i and keeps 1..i-1"""

    def __init__(self, find_violation: ViolationFinder, config: SearchConfig,
                 priority: Sequence[float], upper_bound: Optional[Callable[[List[int]], int]],
                 incumbent: List[int]):
        self.find_violation = find_violation
        self.config = config
        self.priority = priority
        self.upper_bound = upper_bound
        self.best = list(incumbent)
        self.nodes = 0
        self.deadline = time.monotonic() + config.time_limit

    def run(self, candidate: List[int], fixed: frozenset) -> None:
        self.nodes += 1
        if self.nodes > self.config.node_limit:
            raise LimitExceeded(f"node limit {self.config.node_limit} reached", partial=self.best)
        if time.monotonic() > self.deadline:
            raise LimitExceeded(f"time limit {self.config.time_limit}s reached", partial=self.best)

        if len(candidate) <= len(self.best):
            return
        if self.upper_bound is not None and self.upper_bound(candidate) <= len(self.best):
            return
        violation = self.find_violation(candidate)
        if violation is None:
            self.best = list(candidate)
            logger.debug(f"New incumbent of size {len(candidate)} after {self.nodes} nodes")
            return
        if len(candidate) - 1 <= len(self.best):
            return

        kept = set(fixed)
        for victim in sorted(violation, key=lambda i: (-self.priority[i], i)):
            if victim in kept:
                continue
            self.run([i for i in candidate if i != victim], frozenset(kept))
            kept.add(victim)


def branch_and_bound(size: int, find_violation: ViolationFinder, config: SearchConfig,
                     priority: Optional[Sequence[float]] = None,
                     upper_bound: Optional[Callable[[List[int]], int]] = None,
                     initial: Optional[Sequence[int]] = None,
                     label: str = "family") -> OracleResult:
    """Largest subset of range(size) with no violation; violations must be hereditary"""
    priority = priority if priority is not None else [0] * size
    incumbent: List[int] = []
    if initial:
        if find_violation(sorted(initial)) is None:
            incumbent = sorted(initial)
        else:
            logger.warning("Initial incumbent violates the property; starting from empty")

    search = _Search(find_violation, config, priority, upper_bound, incumbent)
    started = time.monotonic()
    proven = True
    try:
        search.run(list(range(size)), frozenset())
    except LimitExceeded as e:
        proven = False
        SEARCH_UNPROVEN.labels(search=label).inc()
        logger.warning(f"Search stopped early ({e}); best found {len(search.best)}")
    SEARCH_NODES.labels(search=label).inc(search.nodes)
    if proven:
        SEARCH_SECONDS.labels(search=label).observe(time.monotonic() - started)

    if find_violation(search.best) is not None:
        raise InternalVerificationFailed(f"incumbent of size {len(search.best)} fails the property")
    return OracleResult(len(search.best), search.best, proven, search.nodes)


def _participation(prop: FamilyProperty, masks: Sequence[int]) -> List[int]:
    counts = Counter()
    for violation in islice(prop.iter_violations(masks), PRIORITY_SAMPLE):
        counts.update(violation)
    return [counts[i] for i in range(len(masks))]


def packing_bound(prop: FamilyProperty, masks: Sequence[int]) -> Callable[[List[int]], int]:
    """Size minus a greedy packing of disjoint violations; each needs its own deletion"""
    def bound(candidate: List[int]) -> int:
        used = set()
        packed = 0
        for violation in islice(prop.iter_violations(masks, candidate), PACKING_SAMPLE):
            if used.isdisjoint(violation):
                used.update(violation)
                packed += 1
        return len(candidate) - packed
    return bound


def max_subfamily(family: SetFamily, prop: FamilyProperty,
                  config: Optional[SearchConfig] = None) -> OracleResult:
    config = config or SearchConfig()
    masks = family.masks
    initial = config.initial
    if initial is None:
        initial = greedy_extract(family, prop).indices

    result = branch_and_bound(
        family.size,
        lambda candidate: prop.find_violation(masks, candidate),
        config,
        priority=_participation(prop, masks),
        upper_bound=packing_bound(prop, masks),
        initial=initial,
        label=prop.kind.value,
    )
    result.property_tag = prop.tag
    logger.info(f"Oracle {prop.tag}: optimum {result.optimum} of {family.size} "
                f"({'proven' if result.proven else 'unproven'}, {result.nodes} nodes)")
    return result


def count_violations(family: SetFamily, prop: FamilyProperty) -> int:
    """Minimal violating configurations; (a,b) solutions with a == b count each pair once"""
    if prop.kind is PropertyKind.BD_FREE:
        return count_boolean_algebras(family, prop.params[0], strict=prop.strict)
    total = sum(1 for _ in prop.iter_violations(family.masks))
    if prop.kind is PropertyKind.AB_UNION_FREE and prop.params[0] == prop.params[1]:
        total //= 2
    return total


def canonical_form(masks: Sequence[int], tables: Sequence[Sequence[int]]) -> tuple:
    """Least sorted image of the family over all ground permutations"""
    return min(tuple(sorted(table[mask] for mask in masks)) for table in tables)


def permutation_tables(n: int) -> List[List[int]]:
    tables = []
    for perm in permutations(range(n)):
        table = []
        for mask in range(2 ** n):
            image = 0
            for position in range(n):
                if mask >> position & 1:
                    image |= 1 << perm[position]
            table.append(image)
        tables.append(table)
    return tables


def min_over_families(m: int, n: int, prop: FamilyProperty, config: Optional[SearchConfig] = None,
                      budget: int = 50_000) -> MinFamilyResult:
    """Exhaustive over m-subsets of 2^[n], one representative per relabelling class"""
    if m < 1 or m > 2 ** n:
        raise ValueError(f"need 1 <= m <= 2^n, got m={m}, n={n}")
    total = comb(2 ** n, m)
    if total > budget:
        raise LimitExceeded(f"C(2^{n}, {m}) = {total} families exceeds the budget {budget}")

    tables = permutation_tables(n)
    seen = set()
    best_value, best_family = None, None
    proven = True
    for combo in combinations(range(2 ** n), m):
        form = canonical_form(combo, tables)
        if form in seen:
            continue
        seen.add(form)
        family = family_from_masks(n, list(form))
        result = max_subfamily(family, prop, config)
        proven = proven and result.proven
        if best_value is None or result.optimum < best_value:
            best_value, best_family = result.optimum, family

    logger.info(f"min over {len(seen)} classes of {m}-families on [{n}], {prop.tag}: {best_value}")
    return MinFamilyResult(
        value=best_value,
        universe_size=n,
        family=best_family.as_lists(),
        families_examined=len(seen),
        proven=proven,
        property_tag=prop.tag,
        details={"raw_families": total},
    )

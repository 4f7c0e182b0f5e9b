"""
Turan - complete d-partite hypergraphs K(k, k^2, ..., k^(2^(d-1))), copies of
K(2,...,2) inside them, exact Turán numbers for small hosts, and the
correspondence between edges and members of the B_d extremal family.

Edges are coordinate tuples listed in member order of the matching chain
product, so edge e and member e describe the same object.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from dataclasses_json import dataclass_json

from boolean_algebra import count_boolean_algebras
from constructions import (
    ChainProductSpec,
    bd_extremal_family,
    bd_extremal_sizes,
    chain_product_coordinates,
)
from errors import BijectionViolated, BudgetExceeded, InternalVerificationFailed, LimitExceeded
from exact_oracle import OracleResult, SearchConfig, branch_and_bound
from family_core import SetFamily
from properties import FamilyProperty

logger = logging.getLogger(__name__)

DEFAULT_EDGE_BUDGET = 1 << 16
DEFAULT_LINK_OPTION_BUDGET = 4096
EX_METHODS = ("links", "deletion")

Edge = Tuple[int, ...]


@dataclass(frozen=True)
class MultipartiteHypergraph:
    part_sizes: Tuple[int, ...]
    edges: Tuple[Edge, ...]
    complete: bool = False

    @property
    def d(self) -> int:
        return len(self.part_sizes)

    @property
    def size(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_index(self) -> Dict[Edge, int]:
        return {edge: index for index, edge in enumerate(self.edges)}

    def subgraph(self, indices: Sequence[int]) -> "MultipartiteHypergraph":
        chosen = sorted(set(indices))
        return MultipartiteHypergraph(self.part_sizes, tuple(self.edges[i] for i in chosen),
                                      complete=len(chosen) == self.size and self.complete)


def complete_hypergraph(part_sizes: Sequence[int],
                        edge_budget: Optional[int] = DEFAULT_EDGE_BUDGET) -> MultipartiteHypergraph:
    if not part_sizes or any(a < 1 for a in part_sizes):
        raise ValueError(f"part sizes must be >= 1, got {tuple(part_sizes)}")
    total = math.prod(part_sizes)
    if edge_budget is not None and total > edge_budget:
        raise BudgetExceeded(f"K{tuple(part_sizes)} has {total} edges, over the budget {edge_budget}")
    edges = tuple(chain_product_coordinates(part_sizes))
    return MultipartiteHypergraph(tuple(part_sizes), edges, complete=True)


def build_kdk(k: int, d: int, edge_budget: Optional[int] = DEFAULT_EDGE_BUDGET) -> MultipartiteHypergraph:
    """K(k, k^2, ..., k^(2^(d-1))), part i of size k^(2^(i-1))"""
    if k < 2 or d < 2:
        raise ValueError(f"need k >= 2 and d >= 2, got k={k}, d={d}")
    return complete_hypergraph(bd_extremal_sizes(k, d), edge_budget)


def count_copies(edges: Sequence[Edge], r: int) -> int:
    """Copies of K(2,...,2) with r parts among `edges`"""
    edges = set(edges)
    if r == 1:
        return math.comb(len(edges), 2)
    if len(edges) < 2 ** r:
        return 0

    last: Dict[Edge, int] = {}
    parts: List[set] = [set() for _ in range(r - 1)]
    for edge in edges:
        prefix = edge[:-1]
        last[prefix] = last.get(prefix, 0) | (1 << edge[-1])
        for i, v in enumerate(prefix):
            parts[i].add(v)

    total = 0
    for pairs in product(*(combinations(sorted(p), 2) for p in parts)):
        common = -1
        for prefix in product(*pairs):
            common &= last.get(prefix, 0)
            if not common:
                break
        total += math.comb(common.bit_count(), 2) if common > 0 else 0
    return total


def count_kd2(hypergraph: MultipartiteHypergraph) -> int:
    return count_copies(hypergraph.edges, hypergraph.d)


def copy_edge_masks(part_sizes: Sequence[int]) -> List[int]:
    """Every K(2,...,2) of the complete host, as a bit mask over edge indices"""
    strides, stride = [], 1
    for a in part_sizes:
        strides.append(stride)
        stride *= a
    masks = []
    for pairs in product(*(combinations(range(a), 2) for a in part_sizes)):
        mask = 0
        for corner in product(*pairs):
            mask |= 1 << sum(c * s for c, s in zip(corner, strides))
        masks.append(mask)
    return masks


def turan_bound(k: int, d: int) -> Fraction:
    """(2 - 1/2^(d-1)) k^(2^d - 2)"""
    if k < 2 or d < 2:
        raise ValueError(f"need k >= 2 and d >= 2, got k={k}, d={d}")
    return Fraction(2 ** d - 1, 2 ** (d - 1)) * k ** (2 ** d - 2)


def base_case_bound(k: int) -> int:
    """C(k,2) + k^2, the sharper count for two parts"""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    return math.comb(k, 2) + k * k


def _degree_bound(degrees: Sequence[int], pair_budget: int) -> int:
    """Max sum of d_v <= degrees[v] subject to sum C(d_v, 2) <= pair_budget"""
    total = sum(min(1, deg) for deg in degrees)
    budget, t = pair_budget, 1
    while budget >= t:
        available = sum(1 for deg in degrees if deg > t)
        if not available:
            break
        taken = min(available, budget // t)
        total += taken
        budget -= taken * t
        if taken < available:
            break
        t += 1
    return total


def _ex_by_deletion(hypergraph: MultipartiteHypergraph, config: SearchConfig) -> OracleResult:
    copies = copy_edge_masks(hypergraph.part_sizes)

    def find_copy(candidate: List[int]) -> Optional[Tuple[int, ...]]:
        present = 0
        for e in candidate:
            present |= 1 << e
        for copy in copies:
            if copy & ~present == 0:
                return tuple(e for e in range(hypergraph.size) if copy >> e & 1)
        return None

    upper_bound = None
    if hypergraph.d == 2:
        first, second = hypergraph.part_sizes

        def upper_bound(candidate: List[int]) -> int:
            degrees = [0] * second
            for e in candidate:
                degrees[hypergraph.edges[e][1] - 1] += 1
            return _degree_bound(degrees, math.comb(first, 2))

    greedy: List[int] = []
    for e in range(hypergraph.size):
        if find_copy(greedy + [e]) is None:
            greedy.append(e)

    result = branch_and_bound(hypergraph.size, find_copy, config, upper_bound=upper_bound,
                              initial=config.initial or greedy, label="turan")
    result.method = "deletion"
    return result


def _link_options(prefix_sizes: Sequence[int], option_budget: int) -> List[Tuple[int, int, int]]:
    """Undominated (copy mask, link size, link mask) choices for one top vertex"""
    prefix_count = math.prod(prefix_sizes)
    if 2 ** prefix_count > option_budget:
        raise LimitExceeded(
            f"{2 ** prefix_count} candidate links exceed link_option_budget {option_budget}; "
            f"use the deletion method"
        )
    copies = copy_edge_masks(prefix_sizes)
    best: Dict[int, Tuple[int, int]] = {}
    for link in range(2 ** prefix_count):
        used = 0
        for c, copy in enumerate(copies):
            if copy & ~link == 0:
                used |= 1 << c
        size = link.bit_count()
        if used not in best or size > best[used][0]:
            best[used] = (size, link)
    options = []
    for used, (size, link) in best.items():
        dominated = any(other != used and other & ~used == 0 and best[other][0] >= size for other in best)
        if not dominated:
            options.append((used, size, link))
    options.sort(key=lambda o: (-o[1], o[0]))
    return options


def _ex_by_links(hypergraph: MultipartiteHypergraph, option_budget: int) -> OracleResult:
    """Top-part vertices pick links whose K(2,...,2) copies are pairwise disjoint"""
    prefix_sizes = hypergraph.part_sizes[:-1]
    top = hypergraph.part_sizes[-1]
    prefix_count = math.prod(prefix_sizes)
    options = _link_options(prefix_sizes, option_budget)
    free = max((o for o in options if o[0] == 0), key=lambda o: o[1])
    costly = [o for o in options if o[0] != 0]
    states = 0

    @lru_cache(maxsize=None)
    def solve(remaining: int, used: int, start: int) -> Tuple[int, Tuple[int, ...]]:
        nonlocal states
        states += 1
        best = (remaining * free[1], ())
        if remaining == 0:
            return best
        for i in range(start, len(costly)):
            mask, size, _ = costly[i]
            if mask & used:
                continue
            value, picks = solve(remaining - 1, used | mask, i + 1)
            if value + size > best[0]:
                best = (value + size, (i,) + picks)
        return best

    optimum, picks = solve(top, 0, 0)
    links = [costly[i][2] for i in picks] + [free[2]] * (top - len(picks))
    indices = sorted(
        v * prefix_count + p for v, link in enumerate(links) for p in range(prefix_count) if link >> p & 1
    )
    return OracleResult(optimum, indices, True, states, method="links")


def ex_exact(hypergraph: MultipartiteHypergraph, config: Optional[SearchConfig] = None,
             method: str = "links", link_option_budget: int = DEFAULT_LINK_OPTION_BUDGET) -> OracleResult:
    """Largest K(2,...,2)-free edge subset of a complete host"""
    if method not in EX_METHODS:
        raise ValueError(f"method must be one of {EX_METHODS}, got {method!r}")
    if not hypergraph.complete:
        raise ValueError("exact Turán numbers are computed for complete hosts only")
    config = config or SearchConfig()
    if method == "links":
        result = _ex_by_links(hypergraph, link_option_budget)
    else:
        result = _ex_by_deletion(hypergraph, config)

    if count_kd2(hypergraph.subgraph(result.indices)) != 0:
        raise InternalVerificationFailed(f"{method} search returned an edge set containing K(2,...,2)")
    result.property_tag = f"kd2:{hypergraph.d}"
    logger.info(f"ex(K{hypergraph.part_sizes}) = {result.optimum} by {method} "
                f"({'proven' if result.proven else 'unproven'})")
    return result


@dataclass_json
@dataclass
class LinkReport:
    """Per top-part vertex: degree and K(2,...,2) copies inside its link"""
    degrees: List[int]
    copies: List[int]
    total_copies: int
    capacity: int
    disjoint: bool


def link_report(hypergraph: MultipartiteHypergraph, indices: Optional[Sequence[int]] = None) -> LinkReport:
    edges = hypergraph.edges if indices is None else [hypergraph.edges[i] for i in indices]
    top = hypergraph.part_sizes[-1]
    links: List[List[Edge]] = [[] for _ in range(top)]
    for edge in edges:
        links[edge[-1] - 1].append(edge[:-1])
    r = hypergraph.d - 1
    copies = [count_copies(link, r) for link in links]
    capacity = math.prod(math.comb(a, 2) for a in hypergraph.part_sizes[:-1])
    # disjointness of copies across links is exactly freeness of the whole edge set
    disjoint = count_copies(edges, hypergraph.d) == 0
    return LinkReport([len(link) for link in links], copies, sum(copies), capacity, disjoint)


def pull_back(k: int, d: int, edge_indices: Sequence[int], **limits) -> SetFamily:
    """Members of the B_d extremal family matching the given edges"""
    family = bd_extremal_family(k, d, **limits)
    bad = [e for e in edge_indices if not 0 <= e < family.size]
    if bad:
        raise ValueError(f"edge indices out of range: {bad[:5]}")
    return family.subfamily(edge_indices)


@dataclass_json
@dataclass
class BijectionReport:
    k: int
    d: int
    members: int
    edges: int
    witness_count: int
    copy_count: int
    spot_checks: int
    bijective: bool = True
    details: dict = field(default_factory=dict)


def family_hypergraph_bijection(k: int, d: int, spot_checks: int = 32, seed: int = 0,
                                edge_budget: Optional[int] = DEFAULT_EDGE_BUDGET,
                                **limits) -> BijectionReport:
    """Members ↔ edges, B_d witnesses ↔ copies, and freeness on sampled subfamilies"""
    hypergraph = build_kdk(k, d, edge_budget)
    family = bd_extremal_family(k, d, **limits)
    spec = ChainProductSpec(bd_extremal_sizes(k, d))
    offsets = spec.offsets()

    images = []
    for edge in hypergraph.edges:
        mask = 0
        for offset, j in zip(offsets, edge):
            mask |= ((1 << j) - 1) << offset
        images.append(mask)
    if len(set(images)) != hypergraph.size or hypergraph.size != family.size:
        raise BijectionViolated(f"edge map is not injective onto {family.size} members")
    for e, mask in enumerate(images):
        if family.masks[e] != mask:
            raise BijectionViolated(f"edge {hypergraph.edges[e]} maps outside member {e}")

    witnesses = count_boolean_algebras(family, d)
    copies = count_kd2(hypergraph)
    if witnesses != copies:
        raise BijectionViolated(f"{witnesses} B_{d} witnesses but {copies} K(2,...,2) copies")

    prop = FamilyProperty.bd_free(d)
    rng = np.random.default_rng(seed)
    for check in range(spot_checks):
        keep = rng.random() * 0.5 + 0.5
        chosen = np.flatnonzero(rng.random(hypergraph.size) < keep).tolist()
        family_free = prop.holds(family, chosen)
        graph_free = count_kd2(hypergraph.subgraph(chosen)) == 0
        if family_free != graph_free:
            raise BijectionViolated(
                f"spot check {check}: subfamily free={family_free} but edge set free={graph_free}"
            )

    logger.info(f"Bijection k={k}, d={d}: {family.size} members, {copies} copies, {spot_checks} spot checks")
    return BijectionReport(k, d, family.size, hypergraph.size, witnesses, copies, spot_checks)

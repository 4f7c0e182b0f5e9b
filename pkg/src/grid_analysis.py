"""
Grid Analysis - subfamilies of F_ES(k) seen as point sets of the k x k grid.

Point (i, j) stands for A_i ∪ B_j. A member is a union of a other chosen
members exactly when its lower-left rectangle holds at least a other points,
one of them on its top row and one on its right column.
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from constructions import erdos_shelah_family
from errors import NotASubfamily
from family_core import SetFamily, ceil_sqrt, family_from_masks, is_a_union_free

logger = logging.getLogger(__name__)

Point = Tuple[int, int]


@dataclass(frozen=True)
class GridPointSet:
    k: int
    points: FrozenSet[Point]

    def __len__(self) -> int:
        return len(self.points)

    def column(self, x: int) -> List[Point]:
        return sorted(p for p in self.points if p[0] == x)

    def row(self, y: int) -> List[Point]:
        return sorted(p for p in self.points if p[1] == y)


@dataclass(frozen=True)
class GridViolation:
    point: Point
    covering: Tuple[Point, ...]


def grid_from_indices(k: int, indices: Iterable[int]) -> GridPointSet:
    """Member indices of F_ES(k) to grid points"""
    return GridPointSet(k, frozenset((index % k + 1, index // k + 1) for index in indices))


def grid_to_indices(grid: GridPointSet) -> List[int]:
    return sorted((j - 1) * grid.k + (i - 1) for i, j in grid.points)


def to_grid(subfamily: SetFamily, k: int) -> GridPointSet:
    host = erdos_shelah_family(k)
    if subfamily.universe_size != host.universe_size:
        raise NotASubfamily(
            f"universe size {subfamily.universe_size} does not match F_ES({k}) ({host.universe_size})"
        )
    indices = []
    for position, mask in enumerate(subfamily.masks):
        index = host.index_of.get(mask)
        if index is None:
            raise NotASubfamily(f"member {position} is not a member of F_ES({k})")
        indices.append(index)
    return grid_from_indices(k, indices)


def grid_to_family(grid: GridPointSet) -> SetFamily:
    host = erdos_shelah_family(grid.k)
    return family_from_masks(host.universe_size, [host.masks[i] for i in grid_to_indices(grid)])


def grid_violation(grid: GridPointSet, a: int) -> Optional[GridViolation]:
    """Lexicographically smallest (i, j) whose rectangle covers it with a other points"""
    if a < 2:
        raise ValueError(f"a must be >= 2, got {a}")
    for i, j in sorted(grid.points):
        inside = sorted(
            (x, y) for x, y in grid.points if x <= i and y <= j and (x, y) != (i, j)
        )
        if len(inside) < a:
            continue
        top = [p for p in inside if p[1] == j]
        right = [p for p in inside if p[0] == i]
        if not top or not right:
            continue
        # top-row and right-column roles are distinct points (neither is (i, j))
        chosen = {top[0], right[0]}
        for p in inside:
            if len(chosen) >= a:
                break
            chosen.add(p)
        return GridViolation((i, j), tuple(sorted(chosen)))
    return None


def grid_equivalence_check(subfamily: SetFamily, a: int, k: int) -> bool:
    """The grid criterion and the definitional check agree on `subfamily`"""
    by_grid = grid_violation(to_grid(subfamily, k), a) is None
    by_definition = is_a_union_free(subfamily, a).holds
    return by_grid == by_definition


def exhaustive_equivalence(k: int, a: int) -> List[int]:
    """Check every subfamily of F_ES(k); returns the selection masks that disagree"""
    host = erdos_shelah_family(k)
    m = host.size
    disagreements = []
    for selection in range(2 ** m):
        indices = [i for i in range(m) if selection >> i & 1]
        if not grid_equivalence_check(host.subfamily(indices), a, k):
            disagreements.append(selection)
    if disagreements:
        logger.warning(f"grid criterion disagrees on {len(disagreements)} subfamilies of F_ES({k}), a={a}")
    return disagreements


def column_prune(grid: GridPointSet, a: int) -> GridPointSet:
    """Drop the lowest ceil(sqrt(a+1)) - 1 points of every column"""
    if a < 2:
        raise ValueError(f"a must be >= 2, got {a}")
    drop = ceil_sqrt(a + 1) - 1
    kept = []
    for x in range(1, grid.k + 1):
        kept.extend(grid.column(x)[drop:])
    return GridPointSet(grid.k, frozenset(kept))


def max_row_after_prune(grid: GridPointSet, a: int) -> int:
    pruned = column_prune(grid, a)
    counts: Dict[int, int] = {}
    for _, y in pruned.points:
        counts[y] = counts.get(y, 0) + 1
    return max(counts.values(), default=0)


def grid_bound(k: int, a: int) -> int:
    """2(ceil(sqrt(a+1)) - 1)k: no a-union-free subfamily of F_ES(k) is larger"""
    if k < 1 or a < 2:
        raise ValueError(f"need k >= 1 and a >= 2, got k={k}, a={a}")
    return 2 * (ceil_sqrt(a + 1) - 1) * k


def render_grid(grid: GridPointSet) -> str:
    """Rows from j=k down to 1, '#' for occupied cells"""
    lines = []
    for y in range(grid.k, 0, -1):
        cells = "".join("#" if (x, y) in grid.points else "." for x in range(1, grid.k + 1))
        lines.append(f"{y:>3} {cells}")
    return "\n".join(lines) + "\n"

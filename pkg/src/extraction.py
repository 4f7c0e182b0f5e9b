"""
Extraction - pulls a large Γ-subfamily out of an arbitrary family with a
certified size guarantee: random deletion for B_d-freeness, rank splitting for
a-union-freeness, and a greedy baseline for both
"""

import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from dataclasses_json import dataclass_json

from boolean_algebra import corollary_bound, count_boolean_algebras, determining_size, iter_boolean_algebras
from errors import InternalVerificationFailed, LimitExceeded
from family_core import SetFamily, is_a_union_free, rank_partition
from properties import FamilyProperty

logger = logging.getLogger(__name__)

GREEDY_ORDERS = ("given", "size-ascending", "size-descending")


@dataclass_json
@dataclass
class ExtractionResult:
    indices: List[int]
    property_tag: str
    guarantee: float
    method: str
    seed: Optional[int] = None
    trials: int = 1
    best: int = 0
    mean: float = 0.0
    # True when the guarantee used the worst-case witness count
    guarantee_pessimistic: bool = False
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.indices)


def default_probability(m: int, d: int) -> float:
    """2^(-1/3) m^(-1/3) for d=2, m^(-(k-1)/(2^d-1)) with k=ceil(log2(d+2)) otherwise"""
    if m < 1 or d < 2:
        raise ValueError(f"need m >= 1 and d >= 2, got m={m}, d={d}")
    if d == 2:
        p = 2 ** (-1 / 3) * m ** (-1 / 3)
    else:
        k = determining_size(d)
        p = m ** (-(k - 1) / (2 ** d - 1))
    return min(1.0, p)


def _deletion_trial(masks: Sequence[int], d: int, p: float, seed: int, trial: int,
                    strict: bool = False) -> List[int]:
    rng = np.random.default_rng([seed, trial])
    alive = set(np.flatnonzero(rng.random(len(masks)) < p).tolist())
    while True:
        witnesses = list(iter_boolean_algebras(masks, d, alive, strict))
        if not witnesses:
            return sorted(alive)
        participation = Counter(i for w in witnesses for i in w.index_map)
        victim = min(participation, key=lambda i: (-participation[i], i))
        alive.discard(victim)


def random_deletion_bd_free(family: SetFamily, d: int, p: Optional[float] = None,
                            seed: Optional[int] = None, trials: int = 200, workers: int = 1,
                            enumeration_limit: Optional[int] = None,
                            strict: bool = False) -> ExtractionResult:
    """Keep each member with probability p, then delete members until no B_d remains"""
    m = family.size
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if p is None:
        p = default_probability(m, d) if m >= 1 else 1.0
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (2 ** 32))
        logger.info(f"No seed given, using generated seed {seed}")

    pessimistic = False
    try:
        count = count_boolean_algebras(family, d, limit=enumeration_limit, strict=strict)
    except LimitExceeded:
        count = corollary_bound(m, d)
        pessimistic = True
        logger.warning(f"B_{d} count too large to enumerate; guarantee uses C(m, k) = {count}")
    guarantee = m * p - p ** (2 ** d) * count

    masks = list(family.masks)
    jobs = range(trials)
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_deletion_trial, [masks] * trials, [d] * trials, [p] * trials,
                                     [seed] * trials, jobs, [strict] * trials))
    else:
        outcomes = [_deletion_trial(masks, d, p, seed, trial, strict) for trial in jobs]

    sizes = [len(outcome) for outcome in outcomes]
    best_trial = max(range(trials), key=lambda t: (sizes[t], -t))
    chosen = outcomes[best_trial]
    if not FamilyProperty.bd_free(d, strict).holds(family, chosen):
        raise InternalVerificationFailed(f"random deletion left a B_{d} in trial {best_trial}")

    logger.info(f"Random deletion: best {sizes[best_trial]} of {m}, guarantee {guarantee:.3f}")
    return ExtractionResult(
        indices=chosen,
        property_tag=f"bd:{d}",
        guarantee=guarantee,
        method="random-deletion",
        seed=seed,
        trials=trials,
        best=sizes[best_trial],
        mean=sum(sizes) / trials,
        guarantee_pessimistic=pessimistic,
        details={"p": p, "witness_count": count, "best_trial": best_trial, "trial_sizes": sizes},
    )


def kleitman_extract(family: SetFamily, a: int) -> ExtractionResult:
    """Best rank level plus a longest chain under one of its members"""
    if a < 2:
        raise ValueError(f"a must be >= 2, got {a}")
    m = family.size
    table = rank_partition(family)
    if m == 0:
        return ExtractionResult([], f"uf:{a}", 0.0, "kleitman")

    best_k = max(range(1, table.max_rank + 1), key=lambda k: (len(table.level(k)) + k - 1, -k))
    level = table.level(best_k)
    chain = table.chain_to(level[0])
    chosen = sorted(set(level) | set(chain))
    expected = len(level) + best_k - 1
    if len(chosen) != expected:
        raise InternalVerificationFailed(
            f"level {best_k} and its chain overlap: got {len(chosen)} members, expected {expected}"
        )
    check = is_a_union_free(family.subfamily(chosen), a)
    if not check.holds:
        raise InternalVerificationFailed(f"rank-split subfamily is not {a}-union-free: {check.witness}")

    ell = table.max_rank
    return ExtractionResult(
        indices=chosen,
        property_tag=f"uf:{a}",
        guarantee=max(float(expected), math.sqrt(2 * m) - 0.5),
        method="kleitman",
        best=len(chosen),
        mean=float(len(chosen)),
        details={
            "level": best_k,
            "level_size": len(level),
            "max_rank": ell,
            "chain": list(chain),
            "average_bound": m / ell + (ell - 1) / 2,
        },
    )


def greedy_extract(family: SetFamily, prop: FamilyProperty, order: str = "given") -> ExtractionResult:
    """Scan members in `order`, keeping each one that leaves the property intact"""
    if order not in GREEDY_ORDERS:
        raise ValueError(f"order must be one of {GREEDY_ORDERS}, got {order!r}")
    masks = family.masks
    scan = list(range(family.size))
    if order == "size-ascending":
        scan.sort(key=lambda i: masks[i].bit_count())
    elif order == "size-descending":
        scan.sort(key=lambda i: -masks[i].bit_count())

    accepted: List[int] = []
    for index in scan:
        if prop.find_violation(masks, accepted + [index]) is None:
            accepted.append(index)
    accepted.sort()
    return ExtractionResult(
        indices=accepted,
        property_tag=prop.tag,
        guarantee=float(len(accepted)),
        method="greedy",
        best=len(accepted),
        mean=float(len(accepted)),
        details={"order": order},
    )

"""
Bounds Report - closed-form bounds on largest B_d-free and union-free
subfamilies, evaluated for a context and kept next to their formulas so
empirical results can be compared against them
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from dataclasses_json import dataclass_json

from boolean_algebra import determining_size
from errors import GeometricUndefined
from extraction import default_probability
from family_core import ceil_sqrt
from grid_analysis import grid_bound
from turan import base_case_bound, turan_bound

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]


@dataclass_json
@dataclass
class BoundValue:
    name: str
    formula: str
    inputs: Dict[str, Any]
    value: float
    # exact rational when the bound is one, e.g. "5/7"
    exact: Optional[str] = None
    direction: str = "upper"
    asymptotic: bool = False
    caveat: Optional[str] = None
    reference: bool = False


@dataclass_json
@dataclass
class BoundsProfile:
    context: Dict[str, Any]
    bounds: List[BoundValue] = field(default_factory=list)

    def get(self, name: str) -> Optional[BoundValue]:
        return next((b for b in self.bounds if b.name == name), None)

    def names(self) -> List[str]:
        return [b.name for b in self.bounds]


def _bound(name: str, formula: str, inputs: Dict[str, Any], value: Number, **kwargs) -> BoundValue:
    exact = None
    if isinstance(value, (int, Fraction)):
        exact = str(Fraction(value))
    return BoundValue(name, formula, inputs, float(value), exact, **kwargs)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValueError(message)


def exponents(d: int) -> Tuple[Fraction, Fraction]:
    """(e_d, e'_d) = ((2^d - ceil(log2(d+2))) / (2^d - 1), (2^d - 2) / (2^d - 1))"""
    _require(d >= 2, f"d must be >= 2, got {d}")
    denominator = 2 ** d - 1
    return Fraction(2 ** d - determining_size(d), denominator), Fraction(2 ** d - 2, denominator)


B2_LOWER_CONSTANT = 3 * 2 ** (-7 / 3)


def b2_bounds(m: int) -> Tuple[float, float]:
    _require(m >= 1, f"m must be >= 1, got {m}")
    scale = m ** (2 / 3)
    return B2_LOWER_CONSTANT * scale, 1.5 * scale


def union_free_bounds(m: int, a: int) -> Tuple[float, float, float]:
    """(rank-splitting lower, construction upper, earlier lower estimate)"""
    _require(m >= 1 and a >= 2, f"need m >= 1 and a >= 2, got m={m}, a={a}")
    root = math.sqrt(m)
    kleitman = math.sqrt(2 * m) - 0.5
    upper = 4 * a + 4 * a ** 0.25 * root
    earlier = max(a, a ** 0.25 * root / 3)
    return kleitman, upper, earlier


def kleitman_average_bound(m: int, ell: int) -> float:
    """m/l + (l-1)/2: some rank level plus a chain reaches this size"""
    _require(m >= 1 and ell >= 1, f"need m >= 1 and l >= 1, got m={m}, l={ell}")
    return m / ell + (ell - 1) / 2


def classical_union_free_bounds(m: int) -> Dict[str, float]:
    _require(m >= 1, f"m must be >= 1, got {m}")
    root = math.sqrt(m)
    return {
        "sqrt_m_lower": root,
        "two_sqrt_two_upper": 2 * math.sqrt(2) * root,
        "sqrt_2m_minus_one_lower": math.sqrt(2 * m) - 1,
        "two_sqrt_m_plus_one_upper": 2 * root + 1,
    }


def leveled_bound(a: int, k: int, q: int) -> int:
    """a - 2 + 2k(ceil(sqrt(a+1)) - 1) + (2k - 1)(q - 1), exceeding f of the leveled family"""
    _require(a >= 2 and k >= 1 and q >= 1, f"need a >= 2, k >= 1, q >= 1, got a={a}, k={k}, q={q}")
    return a - 2 + 2 * k * (ceil_sqrt(a + 1) - 1) + (2 * k - 1) * (q - 1)


def construction_upper_bound(m: int, a: int) -> Tuple[int, int, int]:
    """(a + (4k-1)(2q-1), k, q) with q = ceil(sqrt(a+1)), k = ceil(sqrt(m/q))"""
    _require(m >= 1 and a >= 2, f"need m >= 1 and a >= 2, got m={m}, a={a}")
    q = ceil_sqrt(a + 1)
    k = ceil_sqrt(-(-m // q))
    return a + (4 * k - 1) * (2 * q - 1), k, q


def geometric_refinement_bound(m: int, a: int) -> float:
    """sqrt(8) a^(1/4) sqrt(m), up to an additive O(a)"""
    if a < 4:
        raise GeometricUndefined(f"geometric refinement needs a >= 4, got a={a}")
    _require(m >= 1, f"m must be >= 1, got {m}")
    return math.sqrt(8) * a ** 0.25 * math.sqrt(m)


def deletion_guarantee(m: int, d: int, p: Optional[float] = None) -> float:
    """m p - p^(2^d) C(m, k): expected survivors minus expected witnesses"""
    if p is None:
        p = default_probability(m, d)
    # for d=2 the witness count cannot drop below (1/2 + o(1)) C(m, 2) in general
    return m * p - p ** (2 ** d) * math.comb(m, determining_size(d))


def limiting_constant(d: int) -> float:
    """Limit of deletion_guarantee(m, d) / m^(e_d)"""
    if d == 2:
        return B2_LOWER_CONSTANT
    return 1 - 1 / math.factorial(determining_size(d))


def deletion_scaling(d: int, ms: Sequence[int]) -> List[Dict[str, float]]:
    """Ratio of the deletion guarantee to m^(e_d) along `ms`; it should settle at limiting_constant"""
    e_d = float(exponents(d)[0])
    rows = []
    for m in ms:
        guarantee = deletion_guarantee(m, d)
        rows.append({"m": m, "guarantee": guarantee, "ratio": guarantee / m ** e_d})
    return rows


def reference_formulas(n: Optional[int] = None, d: Optional[int] = None, a: Optional[int] = None,
                       b: Optional[int] = None, m: Optional[int] = None,
                       empirical: Optional[float] = None) -> List[BoundValue]:
    """Order-only and external values, each labelled as such"""
    values = []
    if n is not None and d is not None:
        _require(n >= 1 and d >= 2, f"need n >= 1 and d >= 2, got n={n}, d={d}")
        values.append(_bound(
            "power_set_bd_order", "2^n / n^(2^-d)", {"n": n, "d": d}, 2 ** n / n ** (2 ** -d),
            direction="reference", asymptotic=True, reference=True,
            caveat="order of magnitude only; the constant is unknown",
        ))
    if a is not None and b is not None:
        _require(a >= 1 and b >= 1, f"need a, b >= 1, got a={a}, b={b}")
        values.append(_bound("ab_union_free_exact", "a + b - 1", {"a": a, "b": b}, a + b - 1,
                             direction="reference", reference=True))
    if empirical is not None and a is not None and m is not None:
        values.append(_bound(
            "union_free_ratio", "f / (a^(1/4) sqrt(m))", {"f": empirical, "a": a, "m": m},
            empirical / (a ** 0.25 * math.sqrt(m)), direction="reference", asymptotic=True,
            caveat="if the limit exists it lies between 1/3 and 4",
        ))
    return values


def build_profile(m: Optional[int] = None, d: Optional[int] = None, a: Optional[int] = None,
                  b: Optional[int] = None, k: Optional[int] = None, q: Optional[int] = None,
                  n: Optional[int] = None, empirical: Optional[float] = None) -> BoundsProfile:
    """Every bound whose inputs appear in the context"""
    context = {key: value for key, value in
               dict(m=m, d=d, a=a, b=b, k=k, q=q, n=n, empirical=empirical).items() if value is not None}
    bounds: List[BoundValue] = []

    if d is not None:
        e_d, e_d_prime = exponents(d)
        caveat = None if d == 2 else "constants not known for d >= 3; compare exponents only"
        bounds.append(_bound("e_d", "(2^d - ceil(log2(d+2))) / (2^d - 1)", {"d": d}, e_d,
                             direction="lower", asymptotic=True, caveat=caveat))
        bounds.append(_bound("e_d_prime", "(2^d - 2) / (2^d - 1)", {"d": d}, e_d_prime,
                             direction="upper", asymptotic=True, caveat=caveat))
        if m is not None:
            bounds.append(_bound("deletion_guarantee", "m p - p^(2^d) C(m, ceil(log2(d+2)))",
                                 {"m": m, "d": d}, deletion_guarantee(m, d), direction="lower"))
    if m is not None and d == 2:
        lower, upper = b2_bounds(m)
        bounds.append(_bound("b2_lower", "3 * 2^(-7/3) m^(2/3)", {"m": m}, lower, direction="lower",
                             asymptotic=True, caveat="holds up to a (1 + o(1)) factor"))
        bounds.append(_bound("b2_upper", "(3/2) m^(2/3)", {"m": m}, upper, direction="upper"))

    if m is not None and a is not None and b is None:
        kleitman, upper, earlier = union_free_bounds(m, a)
        bounds.append(_bound("kleitman_lower", "sqrt(2m) - 1/2", {"m": m}, kleitman, direction="lower"))
        bounds.append(_bound("union_free_upper", "4a + 4 a^(1/4) sqrt(m)", {"m": m, "a": a}, upper))
        bounds.append(_bound("earlier_lower", "max(a, a^(1/4) sqrt(m) / 3)", {"m": m, "a": a}, earlier,
                             direction="lower", reference=True))
        value, ck, cq = construction_upper_bound(m, a)
        bounds.append(_bound("construction_upper", "a + (4k - 1)(2q - 1)",
                             {"m": m, "a": a, "k": ck, "q": cq}, value))
        if a >= 4:
            bounds.append(_bound("geometric_upper", "sqrt(8) a^(1/4) sqrt(m)", {"m": m, "a": a},
                                 geometric_refinement_bound(m, a), asymptotic=True,
                                 caveat="up to an additive O(a)"))
        if a == 2:
            for name, value in classical_union_free_bounds(m).items():
                bounds.append(_bound(name, name.replace("_", " "), {"m": m}, value,
                                     direction="lower" if name.endswith("lower") else "upper",
                                     reference=True))

    if a is not None and k is not None:
        bounds.append(_bound("grid_bound", "2(ceil(sqrt(a+1)) - 1) k", {"a": a, "k": k}, grid_bound(k, a)))
        if a == 2:
            bounds.append(_bound("grid_bound_a2", "2k - 1", {"k": k}, 2 * k - 1, reference=True))
        if q is not None:
            bounds.append(_bound("leveled_bound", "a - 2 + 2k(ceil(sqrt(a+1)) - 1) + (2k - 1)(q - 1)",
                                 {"a": a, "k": k, "q": q}, leveled_bound(a, k, q),
                                 caveat="strict: f of the leveled family is smaller"))
    if d is not None and k is not None:
        bounds.append(_bound("turan_bound", "(2 - 1/2^(d-1)) k^(2^d - 2)", {"k": k, "d": d},
                             turan_bound(k, d), caveat="strict"))
        if d == 2:
            bounds.append(_bound("base_case_bound", "C(k,2) + k^2", {"k": k}, base_case_bound(k)))

    bounds.extend(reference_formulas(n=n, d=d, a=a, b=b, m=m, empirical=empirical))
    logger.debug(f"Profile for {context}: {len(bounds)} bounds")
    return BoundsProfile(context, bounds)

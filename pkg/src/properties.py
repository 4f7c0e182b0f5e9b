"""
Properties - the hereditary properties Γ a subfamily can be asked to have,
and the violation search shared by extraction, the oracle and the bench
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Sequence, Tuple

from boolean_algebra import iter_boolean_algebras
from family_core import (
    SetFamily,
    ab_union_violation,
    iter_ab_union_solutions,
    iter_union_solutions,
    union_violation,
)


class PropertyKind(Enum):
    BD_FREE = "bd"
    UNION_FREE = "uf"
    AB_UNION_FREE = "abuf"


@dataclass(frozen=True)
class FamilyProperty:
    kind: PropertyKind
    params: Tuple[int, ...]
    strict: bool = False

    @classmethod
    def parse(cls, text: str, strict: bool = False) -> "FamilyProperty":
        """'bd:d', 'uf:a' or 'abuf:a,b'"""
        try:
            name, _, args = text.partition(":")
            kind = PropertyKind(name.strip().lower())
            params = tuple(int(x) for x in args.split(","))
        except ValueError:
            raise ValueError(f"unrecognised property {text!r}; use bd:d, uf:a or abuf:a,b") from None
        expected = 2 if kind is PropertyKind.AB_UNION_FREE else 1
        if len(params) != expected or any(p < 1 for p in params):
            raise ValueError(f"property {text!r} needs {expected} positive parameter(s)")
        return cls(kind, params, strict)

    @classmethod
    def bd_free(cls, d: int, strict: bool = False) -> "FamilyProperty":
        return cls(PropertyKind.BD_FREE, (d,), strict)

    @classmethod
    def union_free(cls, a: int) -> "FamilyProperty":
        return cls(PropertyKind.UNION_FREE, (a,))

    @classmethod
    def ab_union_free(cls, a: int, b: int) -> "FamilyProperty":
        return cls(PropertyKind.AB_UNION_FREE, (a, b))

    @property
    def tag(self) -> str:
        return f"{self.kind.value}:{','.join(str(p) for p in self.params)}"

    @property
    def violation_size(self) -> int:
        """How many distinct members a minimal violation involves"""
        if self.kind is PropertyKind.BD_FREE:
            return 2 ** self.params[0]
        if self.kind is PropertyKind.UNION_FREE:
            return self.params[0] + 1
        return self.params[0] + self.params[1]

    def find_violation(self, masks: Sequence[int],
                       active: Optional[Sequence[int]] = None) -> Optional[Tuple[int, ...]]:
        """Indices taking part in the first violation inside `active`, or None"""
        if self.kind is PropertyKind.BD_FREE:
            witness = next(iter_boolean_algebras(masks, self.params[0], active, self.strict), None)
            return None if witness is None else witness.members()
        if self.kind is PropertyKind.UNION_FREE:
            return union_violation(masks, self.params[0], active)
        return ab_union_violation(masks, self.params[0], self.params[1], active)

    def iter_violations(self, masks: Sequence[int],
                        active: Optional[Sequence[int]] = None) -> Iterator[Tuple[int, ...]]:
        if self.kind is PropertyKind.BD_FREE:
            for witness in iter_boolean_algebras(masks, self.params[0], active, self.strict):
                yield witness.members()
        elif self.kind is PropertyKind.UNION_FREE:
            yield from iter_union_solutions(masks, self.params[0], active)
        else:
            yield from iter_ab_union_solutions(masks, self.params[0], self.params[1], active)

    def holds(self, family: SetFamily, indices: Optional[Sequence[int]] = None) -> bool:
        return self.find_violation(family.masks, indices) is None

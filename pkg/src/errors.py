"""
Errors raised across the toolkit
"""

from typing import Any, List, Optional


class ExtremalError(Exception):
    """Base class for every error the toolkit raises on purpose"""

    code = "extremal_error"

    def to_dict(self) -> dict:
        return {"error": self.code, "message": str(self)}


class DuplicateSet(ExtremalError):
    code = "duplicate_set"

    def __init__(self, first: int, second: int, line_numbers: Optional[tuple] = None):
        self.first = first
        self.second = second
        self.line_numbers = line_numbers
        if line_numbers:
            message = f"duplicate set on lines {line_numbers[0]} and {line_numbers[1]}"
        else:
            message = f"member {second} duplicates member {first}"
        super().__init__(message)


class ElementOutOfRange(ExtremalError):
    code = "element_out_of_range"

    def __init__(self, element: int, universe_size: int, member: int, line_number: Optional[int] = None):
        self.element = element
        self.universe_size = universe_size
        self.member = member
        self.line_number = line_number
        where = f"line {line_number}" if line_number is not None else f"member {member}"
        super().__init__(f"element {element} outside universe [1..{universe_size}] at {where}")


class FamilyParseError(ExtremalError):
    code = "parse_error"

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class UniverseTooLarge(ExtremalError):
    code = "universe_too_large"


class BudgetExceeded(ExtremalError):
    code = "budget_exceeded"


class LimitExceeded(ExtremalError):
    """A search or enumeration hit its limit; `partial` keeps what was found"""

    code = "limit_exceeded"

    def __init__(self, message: str, partial: Optional[List[Any]] = None):
        self.partial = partial if partial is not None else []
        super().__init__(message)


class NotASubfamily(ExtremalError):
    code = "not_a_subfamily"


class InternalVerificationFailed(ExtremalError):
    code = "internal_verification_failed"


class BijectionViolated(ExtremalError):
    code = "bijection_violated"


class GeometricUndefined(ExtremalError):
    code = "geometric_undefined"

"""
Extremal Subfamily Toolkit
Large B_d-free and union-free subfamilies: extraction, exact search and bounds
"""

from bench import TOOL_VERSION
from family_core import FiniteSet, SetFamily, make_family
from family_lab import FamilyLab
from properties import FamilyProperty

__version__ = TOOL_VERSION
__author__ = "Extremal Toolkit Team"

__all__ = [
    "FamilyLab",
    "FamilyProperty",
    "FiniteSet",
    "SetFamily",
    "make_family"
]

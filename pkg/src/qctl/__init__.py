"""Model checking and satisfiability for CTL with propositional quantifiers."""

from .errors import (BlowUpError, BudgetError, EnumerationBudgetError, FormulaSyntaxError,
                     FragmentError, QctlError, ScaleError, StructureError, UndecidableError)
from .kripke import KripkeStructure, parse_structure, print_structure
from .logic_ast import classify, parse_formula, print_formula
from .mc_structure import CheckOptions, check_structure, sat_set
from .mc_tree import check_tree
from .sat_tree import sat

__version__ = "0.1.0"

__all__ = [
    "BlowUpError", "BudgetError", "CheckOptions", "EnumerationBudgetError", "FormulaSyntaxError",
    "FragmentError", "KripkeStructure", "QctlError", "ScaleError", "StructureError",
    "UndecidableError", "check_structure", "check_tree", "classify", "parse_formula",
    "parse_structure", "print_formula", "print_structure", "sat", "sat_set",
]

"""Exact verification of partial Poisson, PQ, PN and P-Omega structures on polynomial spaces."""

__version__ = "0.1.0"

from .polycore import Polynomial, VarSpace, parse_polynomial
from .fields import Bivector, OneForm, OneOneTensor, TwoForm, VecField
from .partial import CoflatBasis, PartialAnchor, full_anchor, is_admissible, partial_bracket
from .schouten import is_compatible, is_poisson, jacobiator, mixed_schouten, pencil_check
from .verdict import Verdict

__all__ = [
    "Bivector",
    "CoflatBasis",
    "OneForm",
    "OneOneTensor",
    "PartialAnchor",
    "Polynomial",
    "TwoForm",
    "VarSpace",
    "VecField",
    "Verdict",
    "full_anchor",
    "is_admissible",
    "is_compatible",
    "is_poisson",
    "jacobiator",
    "mixed_schouten",
    "parse_polynomial",
    "partial_bracket",
    "pencil_check",
]

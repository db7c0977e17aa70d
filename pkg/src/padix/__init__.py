"""padix: exact p-adic function evaluation.

Elements of an unramified or totally ramified extension of Q_p are carried
as integer polynomial residues, and series solutions of linear ODEs are
summed by binary splitting.  ``elementary.pow`` is not re-exported here so
that ``from padix import *`` leaves the builtin alone.
"""

from . import analytic, elementary, field, functions, recurrence, regsing
from .analytic import default_context, digit_burst_solve
from .elementary import artin_hasse, exp, log1m, log1p
from .errors import DomainError, PadixError, PrecisionError
from .field import (ApproxElement, ExactElement, FractionElement, make_field,
                    parse_literal, reduce_mod, valuation)
from .functions import (DworkContext, HypergeomParams, dwork_log_derivative,
                        hypergeom_2f1, polylog)
from .recurrence import ODESpec, SystemODESpec, partial_sum_matrix
from .regsing import regsing_partial_sum

__version__ = "0.1.0"

__all__ = [
    "ApproxElement", "DomainError", "DworkContext", "ExactElement", "FractionElement",
    "HypergeomParams", "ODESpec", "PadixError", "PrecisionError", "SystemODESpec",
    "analytic", "artin_hasse", "default_context", "digit_burst_solve",
    "dwork_log_derivative", "elementary", "exp", "field", "functions", "hypergeom_2f1",
    "log1m", "log1p", "make_field", "parse_literal", "partial_sum_matrix", "polylog",
    "recurrence", "reduce_mod", "regsing", "regsing_partial_sum", "valuation",
]

"""Distribution of the longest increasing subsequence of random permutations.

Exact small-n tables, Fredholm-determinant evaluation of the Poissonized
and limiting distributions, finite-size expansion terms, de-Poissonization,
Stirling-type formulas, moment expansions and exact linear F-forms.
"""

from .errors import (DomainError, LisdistError, NoConvergence, NonFinite, ResourceLimit,
                     SingularSystem, ToleranceExceeded, TruncationWarning)
from .exact_lis import exact_dist, lis_length, monte_carlo, poisson_gf
from .expansions import cdf_expansion, coeff, e2_hard, pdf_expansion
from .moments import expected_value, moment_M, variance
from .stirling import stirling_S, stirling_S_tilde
from .tracy_widom import F

__version__ = "0.1.0"

__all__ = [
    "DomainError", "LisdistError", "NoConvergence", "NonFinite", "ResourceLimit", "SingularSystem",
    "ToleranceExceeded", "TruncationWarning", "exact_dist", "lis_length", "monte_carlo", "poisson_gf",
    "cdf_expansion", "coeff", "e2_hard", "pdf_expansion", "expected_value", "moment_M", "variance",
    "stirling_S", "stirling_S_tilde", "F",
]

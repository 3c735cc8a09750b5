"""Admissible series, hypergeometric modification, mirror normalization and the main-theorem checker."""

from .admissible import (AdmissibilityReport, AdmissibleContext, Violation, admissible_triples,
                         is_admissible_pair, validate_admissible_series)
from .checker import MainTheoremReport, check_main_theorem
from .mirror import InstantonTable, MirrorData, extract_instanton_numbers, mirror_normalize
from .modification import factor_count, hyper_factor, hypergeometric_modification, mu_plus
from .oracle import GWOracle, SmallJOracle

__all__ = [
    "AdmissibilityReport", "AdmissibleContext", "GWOracle", "InstantonTable", "MainTheoremReport", "MirrorData",
    "SmallJOracle", "Violation", "admissible_triples", "check_main_theorem", "extract_instanton_numbers",
    "factor_count", "hyper_factor", "hypergeometric_modification", "is_admissible_pair", "mirror_normalize",
    "mu_plus", "validate_admissible_series",
]

"""Exact-rational quantum Lefschetz toolkit.

Subpackages: ``coh_ring`` (super-commutative Chen-Ruan rings), ``formal_series``
(truncated Novikov/z/lambda/kappa series), ``targets`` (built-in targets and
configs), ``quantum_lefschetz`` (modification, admissibility, mirror map,
checker), ``localization`` (meta graphs and the recursion bookkeeping),
``orbifold_groups`` (edge automorphism counts) and ``cli``.
"""

from .coh_ring import CohRing, RingElement, RingHom, build_ring, restriction_hom
from .errors import ModeUnavailable, OracleGap, QLError
from .formal_series import DegreeLattice, ExtendedVariableSpec, FormalSeries, Window
from .targets import LineBundleData, TargetModel, builtin_target, load_target_config, small_J_series

__version__ = "0.1.0"

__all__ = [
    "CohRing", "DegreeLattice", "ExtendedVariableSpec", "FormalSeries", "LineBundleData", "ModeUnavailable",
    "OracleGap", "QLError", "RingElement", "RingHom", "TargetModel", "Window", "build_ring", "builtin_target",
    "load_target_config", "restriction_hom", "small_J_series",
]

"""Star-graph combinatorics, edge/node factors and the localization recursion."""

from .assembly import (AmbientData, CorrelatorSum, RecursionReport, assemble_typeI_II, jcomp_block,
                       recursion_report, structural_terms)
from .factors import (edge_factor_counts, edge_inverse_euler, edge_lambda_form, edge_product_form,
                      node_smoothing_factor)
from .graphs import MetaGraph, dump_graphs, enumerate_meta_graphs, graph_key, line_bundle_delta
from .symbolic import SymExpr

__all__ = [
    "AmbientData", "CorrelatorSum", "MetaGraph", "RecursionReport", "SymExpr", "assemble_typeI_II",
    "dump_graphs", "edge_factor_counts", "edge_inverse_euler", "edge_lambda_form", "edge_product_form",
    "enumerate_meta_graphs", "graph_key", "jcomp_block", "line_bundle_delta", "node_smoothing_factor",
    "recursion_report", "structural_terms",
]

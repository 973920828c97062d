"""Non-backtracking spectra, boundary measures and edge reconstruction for small multigraphs."""

from __future__ import annotations

from .errors import GraphFormatError, GraphRigidityError
from .graph import Multigraph, OrientedEdge, betti_number, format_graph, parse_graph, read_graph
from .iso import canonical_form, edge_deck, isomorphic
from .nb import build_nb_matrix, graph_pf, ps_dimension

__version__ = "0.1.0"

__all__ = [
    "GraphFormatError",
    "GraphRigidityError",
    "Multigraph",
    "OrientedEdge",
    "__version__",
    "betti_number",
    "build_nb_matrix",
    "canonical_form",
    "edge_deck",
    "format_graph",
    "graph_pf",
    "isomorphic",
    "parse_graph",
    "ps_dimension",
    "read_graph",
]

"""Finite presentations of infinite graphs: rational graphs, prefix-recognizable
graphs, hyperedge-replacement grammars and contextual (CHR) grammars."""

from .errors import ResourceLimitError, ValidationError
from .graph import Graph, Hypergraph

__version__ = "0.1.0"

__all__ = ["Graph", "Hypergraph", "ResourceLimitError", "ValidationError", "__version__"]

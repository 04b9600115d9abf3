"""Complete-graph identification protocols for population protocols on digraphs."""

from .core import Output, Phase, ProtocolSpec, all_outputs, apply_interaction
from .graph import Digraph, complete, generate, is_complete, validate
from .protocols import cig, ciw_n, ciw_nk, make_protocol

__all__ = [
    "Digraph", "Output", "Phase", "ProtocolSpec", "all_outputs", "apply_interaction",
    "cig", "ciw_n", "ciw_nk", "complete", "generate", "is_complete", "make_protocol",
    "validate",
]

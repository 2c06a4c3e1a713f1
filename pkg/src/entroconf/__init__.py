"""Entropy-based precision and recall between process models and event logs."""

from . import errors
from .automata import (
    SILENT,
    UNBOUNDED,
    Dfa,
    EventLog,
    Nfa,
    ShortCircuitGraph,
    Trace,
    determinize,
    log_to_dfa,
    product,
    short_circuit,
    skip_closure,
    trim,
)
from .formats import (
    Dfg,
    load_artifact,
    parse_dfg,
    parse_pnml,
    parse_sdfa,
    parse_spnml,
    parse_xes,
    read_dfg,
    serialize_dfg,
    serialize_pnml,
    serialize_sdfa,
    serialize_spnml,
    serialize_xes,
)
from .measures import (
    EntropyValue,
    PrecisionRecall,
    controlled_partial_precision_recall,
    exact_precision_recall,
    partial_precision_recall,
    spectral_radius,
    topological_entropy,
)
from .petri import (
    Marking,
    PetriNet,
    ReachabilityGraph,
    StochasticPetriNet,
    is_bounded,
    reachability_graph,
    rg_to_dfa,
    stochastic_rg_to_sdfa,
)
from .stochastic import (
    RelevanceValue,
    Sdfa,
    StochasticEntropy,
    conjunction,
    entropic_relevance,
    log_to_sdfa,
    sdfa_entropy,
    stochastic_precision_recall,
    trace_probability,
)

__version__ = "0.1.0"

__all__ = [
    "SILENT",
    "UNBOUNDED",
    "Dfa",
    "Dfg",
    "EntropyValue",
    "EventLog",
    "Marking",
    "Nfa",
    "PetriNet",
    "PrecisionRecall",
    "ReachabilityGraph",
    "RelevanceValue",
    "Sdfa",
    "ShortCircuitGraph",
    "StochasticEntropy",
    "StochasticPetriNet",
    "Trace",
    "conjunction",
    "controlled_partial_precision_recall",
    "determinize",
    "entropic_relevance",
    "errors",
    "exact_precision_recall",
    "is_bounded",
    "load_artifact",
    "log_to_dfa",
    "log_to_sdfa",
    "parse_dfg",
    "parse_pnml",
    "parse_sdfa",
    "parse_spnml",
    "parse_xes",
    "partial_precision_recall",
    "product",
    "reachability_graph",
    "read_dfg",
    "rg_to_dfa",
    "sdfa_entropy",
    "serialize_dfg",
    "serialize_pnml",
    "serialize_sdfa",
    "serialize_spnml",
    "serialize_xes",
    "short_circuit",
    "skip_closure",
    "spectral_radius",
    "stochastic_precision_recall",
    "stochastic_rg_to_sdfa",
    "topological_entropy",
    "trace_probability",
    "trim",
]

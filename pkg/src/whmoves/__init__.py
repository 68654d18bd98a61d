"""Whitehead-move graphs of cubic multigraphs: enumeration, spectra, and
conductance bottlenecks."""

from .config import CapExceededError, EnumerationCaps, SolverConfig
from .cubic import (
    CanonicalCode,
    CubicGraph,
    LabelledCode,
    canonical_form,
    dumbbell_graph,
    enumerate_labelled,
    enumerate_unlabelled,
    has_j_cycle,
    petersen_graph,
    special_edges,
    theta_graph,
    validate,
)
from .metagraph import MetaGraph, build, build_by_closure, load, save
from .whitehead import WhiteheadMove, apply_move, labelled_neighbors, unlabelled_neighbors

__all__ = [
    "CanonicalCode",
    "CapExceededError",
    "CubicGraph",
    "EnumerationCaps",
    "LabelledCode",
    "MetaGraph",
    "SolverConfig",
    "WhiteheadMove",
    "apply_move",
    "build",
    "build_by_closure",
    "canonical_form",
    "dumbbell_graph",
    "enumerate_labelled",
    "enumerate_unlabelled",
    "has_j_cycle",
    "labelled_neighbors",
    "load",
    "petersen_graph",
    "save",
    "special_edges",
    "theta_graph",
    "unlabelled_neighbors",
    "validate",
]

__version__ = "0.1.0"

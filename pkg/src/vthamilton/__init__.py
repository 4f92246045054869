"""Constructive tooling for Hamilton cycles in dense vertex-transitive graphs."""

from .assembly import PipelineConfig, PipelineReport, find_hamilton_cycle, verify_hamilton_cycle
from .errors import CapacityError, GraphFormatError, HypothesisError, InternalConsistencyError
from .graph import Digraph, Graph
from .instances import AutomorphismWitness, circulant, double_clique, fixture
from .matching import FractionalMatching, fvc, nu_star
from .pathition import EndpointRequest, PathSystem, bipathition, pathition

__all__ = [
    "AutomorphismWitness",
    "CapacityError",
    "Digraph",
    "EndpointRequest",
    "FractionalMatching",
    "Graph",
    "GraphFormatError",
    "HypothesisError",
    "InternalConsistencyError",
    "PathSystem",
    "PipelineConfig",
    "PipelineReport",
    "bipathition",
    "circulant",
    "double_clique",
    "find_hamilton_cycle",
    "fixture",
    "fvc",
    "nu_star",
    "pathition",
    "verify_hamilton_cycle",
]

"""netcpd: online change-point detection for dynamic networks with a learned
graph similarity function, classical baselines, and synthetic benchmarks."""

from . import baselines, detection, evaluation, graph, ingest, linalg, sampling, selfsup, sgnn, synthetic
from .graph import DynamicNetwork, EncodingKind, Graph

__version__ = "0.1.0"

__all__ = [
    "DynamicNetwork",
    "EncodingKind",
    "Graph",
    "baselines",
    "detection",
    "evaluation",
    "graph",
    "ingest",
    "linalg",
    "sampling",
    "selfsup",
    "sgnn",
    "synthetic",
]

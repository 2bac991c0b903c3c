"""Spectral hallucination-energy toolkit for multimodal semantic hypergraphs."""

from hallspec.graph import (
    CouplingWeights,
    GraphError,
    Hyperedge,
    InteractionClass,
    MultimodalLaplacian,
    Node,
    SemanticGraph,
    build_graph,
    compose_multimodal_laplacian,
    hyperedge_weight,
    hypergraph_laplacian,
    induced_subgraph,
    pairwise_distance,
)
from hallspec.spectral import (
    Spectrum,
    diffusion_kernel,
    eigendecompose,
    feature_coefficients,
    mode_coefficients,
    rkhs_distance_sq,
)

__version__ = "0.1.0"

__all__ = [
    "CouplingWeights",
    "GraphError",
    "Hyperedge",
    "InteractionClass",
    "MultimodalLaplacian",
    "Node",
    "SemanticGraph",
    "Spectrum",
    "build_graph",
    "compose_multimodal_laplacian",
    "diffusion_kernel",
    "eigendecompose",
    "feature_coefficients",
    "hyperedge_weight",
    "hypergraph_laplacian",
    "induced_subgraph",
    "mode_coefficients",
    "pairwise_distance",
    "rkhs_distance_sq",
]

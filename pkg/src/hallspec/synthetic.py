"""Seeded synthetic multimodal hypergraphs with plausible sets and prompt/output pairs."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hallspec.config import ConfigError, SweepConfig
from hallspec.graph import Hyperedge, Node, SemanticGraph, build_graph


@dataclass(frozen=True)
class SyntheticInstance:
    graph: SemanticGraph
    plausible: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]


def _split(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if k < extra else 0) for k in range(parts)]


def _nearest(dist_row: np.ndarray, candidates: np.ndarray, k: int) -> np.ndarray:
    order = np.argsort(dist_row[candidates], kind="stable")
    return candidates[order[:k]]


def sample_pairs(rng: np.random.Generator, n_nodes: int, plausible, count: int) -> tuple[tuple[int, int], ...]:
    """Draw ``(x, p)`` with ``p`` uniform over ``plausible`` and ``x != p`` uniform over the rest."""
    plausible = np.asarray(sorted(plausible), dtype=int)
    if n_nodes < 2 and count:
        raise ConfigError("need at least two nodes to draw distinct output/prompt pairs")
    pairs = []
    for _ in range(count):
        p = int(plausible[rng.integers(plausible.size)])
        x = int(rng.integers(n_nodes - 1))
        x += x >= p
        pairs.append((x, p))
    return tuple(pairs)


def generate_synthetic(config: SweepConfig, temperature: float = 5.0) -> SyntheticInstance:
    """Gaussian clusters per modality joined by kNN 2-edges and random joint triples.

    Intra-modal edges link each node to its ``neighbors`` nearest nodes of the
    same modality, cross-modal edges to its ``cross_neighbors`` nearest nodes
    of every other modality.  The plausible set is the
    ``ceil(plausible_fraction * n)`` nodes closest to the global centroid.
    """
    rng = np.random.default_rng(config.seed)
    mods = config.modalities
    counts = _split(config.node_count, len(mods))
    if min(counts) == 0:
        raise ConfigError("fewer nodes than modalities")
    if config.neighbors >= min(counts):
        raise ConfigError(f"neighbors={config.neighbors} needs more than {min(counts)} nodes per modality")
    if config.cross_neighbors > min(counts):
        raise ConfigError(f"cross_neighbors={config.cross_neighbors} exceeds {min(counts)} nodes per modality")
    if config.joint_edges and len(mods) < 2:
        raise ConfigError("joint edges need at least two modalities")

    dim = config.embedding_dim
    centers = rng.normal(0.0, config.cluster_separation, size=(len(mods), dim))
    labels = np.repeat(np.arange(len(mods)), counts)
    emb = centers[labels] + rng.normal(0.0, 1.0, size=(config.node_count, dim))
    nodes = [Node(i, mods[labels[i]], tuple(emb[i])) for i in range(config.node_count)]

    diff = emb[:, None, :] - emb[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    groups = [np.flatnonzero(labels == m) for m in range(len(mods))]
    edges = []
    for i in range(config.node_count):
        own = groups[labels[i]]
        for j in _nearest(dist[i], own[own != i], config.neighbors):
            edges.append(Hyperedge((i, int(j))))
        for m, group in enumerate(groups):
            if m == labels[i]:
                continue
            for j in _nearest(dist[i], group, config.cross_neighbors):
                edges.append(Hyperedge((i, int(j))))
    for _ in range(config.joint_edges):
        if len(mods) >= 3:
            chosen = rng.choice(len(mods), size=3, replace=False)
        else:
            chosen = np.array([0, 1, rng.integers(2)])
        members = set()
        for m in chosen:
            pool = [v for v in groups[m] if v not in members]
            members.add(int(pool[rng.integers(len(pool))]))
        edges.append(Hyperedge(tuple(members)))
    graph = build_graph(nodes, edges, temperature)

    keep = math.ceil(config.plausible_fraction * config.node_count)
    centroid = emb.mean(axis=0)
    order = np.argsort(np.linalg.norm(emb - centroid, axis=1), kind="stable")
    plausible = tuple(sorted(int(v) for v in order[:keep]))
    pairs = sample_pairs(rng, config.node_count, plausible, config.pair_count)
    return SyntheticInstance(graph, plausible, pairs)


def random_hypergraph(
    rng: np.random.Generator,
    n_nodes: int,
    n_edges: int,
    modalities: tuple[str, ...] = ("T", "V", "A"),
    dim: int = 4,
    node_temperatures: bool = False,
) -> SemanticGraph:
    """Unstructured random hypergraph of 2- and 3-edges, for property checks."""
    if n_nodes < 2:
        raise ConfigError("random hypergraph needs at least two nodes")
    nodes = []
    for i in range(n_nodes):
        temp = float(rng.uniform(0.5, 3.0)) if node_temperatures else None
        nodes.append(Node(i, modalities[rng.integers(len(modalities))], tuple(rng.normal(size=dim)), temp))
    edges = []
    for _ in range(n_edges):
        size = 3 if n_nodes >= 3 and rng.random() < 0.4 else 2
        edges.append(Hyperedge(tuple(int(v) for v in rng.choice(n_nodes, size=size, replace=False))))
    return build_graph(nodes, edges, float(rng.uniform(0.5, 5.0)))

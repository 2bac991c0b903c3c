"""Temperature-modulated multimodal semantic hypergraphs and their Laplacians.

Nodes carry a modality tag (``T``, ``V`` or ``A``), an embedding and an
optional node-local temperature.  Hyperedges join two or three nodes and are
tagged with an interaction class: intra-modal, cross-modal between one pair of
modalities, or joint.  Each class yields its own normalized hypergraph
Laplacian block; the multimodal operator is their coupling-weighted sum.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

MODALITIES = ("T", "V", "A")
METRICS = ("euclidean", "cosine")
LAPLACIAN_FORMS = ("zhou", "edge_unnormalized")

_KIND_ORDER = {"intra": 0, "cross": 1, "joint": 2}


class GraphError(ValueError):
    """Invalid graph structure or an operation that is undefined on it."""


def _modality_key(m: str) -> int:
    return MODALITIES.index(m)


@dataclass(frozen=True)
class InteractionClass:
    """Interaction class of a hyperedge: ``intra(M)``, ``cross(M, M')`` or ``joint``."""

    kind: str
    modalities: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in _KIND_ORDER:
            raise GraphError(f"unknown interaction kind {self.kind!r}")
        for m in self.modalities:
            if m not in MODALITIES:
                raise GraphError(f"unknown modality {m!r}")
        expected = {"intra": 1, "cross": 2, "joint": 0}[self.kind]
        if len(self.modalities) != expected:
            raise GraphError(f"{self.kind} class needs {expected} modalities, got {self.modalities}")
        if self.kind == "cross":
            if self.modalities[0] == self.modalities[1]:
                raise GraphError("cross class needs two distinct modalities")
            object.__setattr__(self, "modalities", tuple(sorted(self.modalities, key=_modality_key)))

    @classmethod
    def intra(cls, modality: str) -> "InteractionClass":
        return cls("intra", (modality,))

    @classmethod
    def cross(cls, a: str, b: str) -> "InteractionClass":
        return cls("cross", (a, b))

    @classmethod
    def joint(cls) -> "InteractionClass":
        return cls("joint")

    @classmethod
    def parse(cls, text: str) -> "InteractionClass":
        """Inverse of ``str()``: ``"intra:T"``, ``"cross:T-V"``, ``"joint"``."""
        kind, _, rest = text.partition(":")
        mods = tuple(rest.split("-")) if rest else ()
        return cls(kind, mods)

    def sort_key(self) -> tuple:
        return (_KIND_ORDER[self.kind], tuple(_modality_key(m) for m in self.modalities))

    def __str__(self) -> str:
        if self.kind == "joint":
            return "joint"
        return f"{self.kind}:{'-'.join(self.modalities)}"


@dataclass(frozen=True)
class Node:
    id: int
    modality: str
    embedding: tuple[float, ...]
    temperature: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "embedding", tuple(float(v) for v in self.embedding))


@dataclass(frozen=True)
class Hyperedge:
    members: tuple[int, ...]
    interaction_class: InteractionClass | None = None

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(int(m) for m in self.members)))


@dataclass(frozen=True)
class SemanticGraph:
    """Validated hypergraph; construct with :func:`build_graph`."""

    nodes: tuple[Node, ...]
    edges: tuple[Hyperedge, ...]
    global_temperature: float

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def modalities(self) -> tuple[str, ...]:
        present = {n.modality for n in self.nodes}
        return tuple(m for m in MODALITIES if m in present)

    def embeddings(self) -> np.ndarray:
        return np.array([n.embedding for n in self.nodes], dtype=float)

    def temperatures(self) -> np.ndarray:
        """Resolved per-node temperature (node-local, else the global one)."""
        return np.array(
            [self.global_temperature if n.temperature is None else n.temperature for n in self.nodes],
            dtype=float,
        )

    def interaction_classes(self) -> list[InteractionClass]:
        return sorted({e.interaction_class for e in self.edges}, key=InteractionClass.sort_key)

    def edges_of(self, cls: InteractionClass) -> list[Hyperedge]:
        return [e for e in self.edges if e.interaction_class == cls]

    def with_temperature(self, temperature: float) -> "SemanticGraph":
        """Rescale to a new global temperature.

        Node-local temperatures keep their ratio to the global one, so a node
        at twice the global temperature stays at twice the new value.
        """
        if not temperature > 0:
            raise GraphError(f"temperature must be positive, got {temperature}")
        scale = temperature / self.global_temperature
        nodes = tuple(
            n if n.temperature is None else replace(n, temperature=n.temperature * scale)
            for n in self.nodes
        )
        return SemanticGraph(nodes, self.edges, float(temperature))


def _derive_class(modalities: Sequence[str]) -> InteractionClass:
    distinct = sorted(set(modalities), key=_modality_key)
    if len(distinct) == 1:
        return InteractionClass.intra(distinct[0])
    if len(modalities) == 3:
        return InteractionClass.joint()
    return InteractionClass.cross(*distinct)


def _check_class(edge: Hyperedge, modalities: Sequence[str]) -> None:
    cls = edge.interaction_class
    distinct = set(modalities)
    if cls.kind == "intra" and distinct != {cls.modalities[0]}:
        raise GraphError(f"edge {edge.members} tagged {cls} spans modalities {sorted(distinct)}")
    if cls.kind == "cross" and distinct != set(cls.modalities):
        raise GraphError(f"edge {edge.members} tagged {cls} spans modalities {sorted(distinct)}")
    if cls.kind == "joint" and len(edge.members) != 3:
        raise GraphError(f"joint edge {edge.members} must have exactly 3 members")


def build_graph(
    nodes: Iterable[Node], edges: Iterable[Hyperedge], global_temperature: float
) -> SemanticGraph:
    """Validate nodes and edges and assemble a :class:`SemanticGraph`.

    Duplicate edges (same members and class) are dropped, keeping the first.
    Edges without an interaction class get one derived from their member
    modalities; mixed-modality triples default to ``joint``.
    """
    nodes = tuple(nodes)
    if not nodes:
        raise GraphError("graph needs at least one node")
    if not (isinstance(global_temperature, (int, float)) and global_temperature > 0):
        raise GraphError(f"global temperature must be positive, got {global_temperature}")
    dim = len(nodes[0].embedding)
    for idx, node in enumerate(nodes):
        if node.id != idx:
            raise GraphError(f"node ids must be dense and ordered; position {idx} has id {node.id}")
        if node.modality not in MODALITIES:
            raise GraphError(f"node {node.id}: unknown modality {node.modality!r}")
        if len(node.embedding) != dim:
            raise GraphError(
                f"node {node.id}: embedding dimension {len(node.embedding)} differs from {dim}"
            )
        if not all(math.isfinite(v) for v in node.embedding):
            raise GraphError(f"node {node.id}: non-finite embedding entry")
        if node.temperature is not None and not node.temperature > 0:
            raise GraphError(f"node {node.id}: temperature must be positive, got {node.temperature}")

    kept: list[Hyperedge] = []
    seen: set[tuple] = set()
    for edge in edges:
        members = edge.members
        if len(members) not in (2, 3):
            raise GraphError(f"edge {members}: cardinality must be 2 or 3")
        if len(set(members)) != len(members):
            raise GraphError(f"edge {members}: members must be distinct")
        for m in members:
            if not 0 <= m < len(nodes):
                raise GraphError(f"edge {members} references unknown node {m}")
        mods = [nodes[m].modality for m in members]
        if edge.interaction_class is None:
            edge = Hyperedge(members, _derive_class(mods))
        else:
            _check_class(edge, mods)
        if members in seen:
            continue
        seen.add(members)
        kept.append(edge)
    return SemanticGraph(nodes, tuple(kept), float(global_temperature))


def pairwise_distance(a, b, metric: str = "euclidean") -> float:
    """Distance between two embeddings; cosine distance is ``1 - cos(angle)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise GraphError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if metric == "euclidean":
        return float(np.linalg.norm(a - b))
    if metric == "cosine":
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na == 0 or nb == 0:
            raise GraphError("cosine distance is undefined for a zero vector")
        return float(max(0.0, 1.0 - np.dot(a, b) / (na * nb)))
    raise GraphError(f"unknown metric {metric!r}")


def _distance_matrix(emb: np.ndarray, metric: str) -> np.ndarray:
    if metric == "euclidean":
        diff = emb[:, None, :] - emb[None, :, :]
        return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    if metric == "cosine":
        norms = np.linalg.norm(emb, axis=1)
        if np.any(norms == 0):
            raise GraphError("cosine distance is undefined for a zero vector")
        unit = emb / norms[:, None]
        return np.maximum(0.0, 1.0 - unit @ unit.T)
    raise GraphError(f"unknown metric {metric!r}")


def _weight(members: Sequence[int], dist, temps: np.ndarray) -> float:
    total_t = float(sum(temps[m] for m in members))
    if total_t <= 0:
        raise GraphError(f"edge {tuple(members)}: temperature sum is zero")
    total_d = sum(dist(a, b) for a, b in itertools.combinations(members, 2))
    return math.exp(-total_d / total_t)


def hyperedge_weight(graph: SemanticGraph, edge: Hyperedge, metric: str = "euclidean") -> float:
    """``exp(-sum of member pair distances / sum of member temperatures)``."""
    temps = graph.temperatures()
    nodes = graph.nodes
    return _weight(
        edge.members,
        lambda a, b: pairwise_distance(nodes[a].embedding, nodes[b].embedding, metric),
        temps,
    )


def _edge_weights(graph: SemanticGraph, edges: Sequence[Hyperedge], metric: str) -> np.ndarray:
    if not edges:
        return np.zeros(0)
    dmat = _distance_matrix(graph.embeddings(), metric)
    temps = graph.temperatures()
    return np.array([_weight(e.members, lambda a, b: dmat[a, b], temps) for e in edges])


def _assemble_laplacian(n: int, edges: Sequence[Hyperedge], weights: np.ndarray, form: str) -> np.ndarray:
    if form not in LAPLACIAN_FORMS:
        raise GraphError(f"unknown laplacian form {form!r}")
    incidence = np.zeros((n, len(edges)))
    for k, e in enumerate(edges):
        incidence[list(e.members), k] = 1.0
    sizes = incidence.sum(axis=0)
    degree = incidence @ weights
    if not np.any(degree > 0):
        raise GraphError("all node degrees are zero")
    edge_scale = weights / sizes if form == "zhou" else weights
    active = degree > 0
    inv_sqrt = np.zeros(n)
    inv_sqrt[active] = 1.0 / np.sqrt(degree[active])
    theta = (incidence * edge_scale) @ incidence.T
    theta = inv_sqrt[:, None] * theta * inv_sqrt[None, :]
    lap = np.diag(active.astype(float)) - theta
    return 0.5 * (lap + lap.T)


def hypergraph_laplacian(
    graph: SemanticGraph,
    class_filter: InteractionClass,
    metric: str = "euclidean",
    form: str = "zhou",
) -> np.ndarray:
    """Normalized hypergraph Laplacian of the edges in one interaction class.

    The ``zhou`` form is ``I - Dv^-1/2 H W De^-1 H^T Dv^-1/2``.  Nodes with no
    incident edge in the class get a zero row and column, diagonal included.
    ``edge_unnormalized`` drops ``De^-1``; it is not positive semidefinite in
    general and exists for comparison only.
    """
    edges = graph.edges_of(class_filter)
    if not edges:
        raise GraphError(f"no edges of class {class_filter}")
    return _assemble_laplacian(graph.n_nodes, edges, _edge_weights(graph, edges, metric), form)


def _pair_key(pair) -> tuple[str, str]:
    if isinstance(pair, str):
        pair = tuple(pair.split("-"))
    a, b = pair
    if a == b or a not in MODALITIES or b not in MODALITIES:
        raise GraphError(f"invalid modality pair {pair!r}")
    return tuple(sorted((a, b), key=_modality_key))


@dataclass(frozen=True)
class CouplingWeights:
    """Nonnegative coupling coefficients; absent entries default to 1.0.

    ``beta`` keys may be ``("T", "V")`` tuples or ``"T-V"`` strings and are
    stored in canonical order, so ``beta[T,V]`` and ``beta[V,T]`` are one entry.
    """

    alpha: Mapping[str, float] = field(default_factory=dict)
    beta: Mapping = field(default_factory=dict)
    gamma: float = 1.0

    def __post_init__(self):
        alpha = {m: float(self.alpha.get(m, 1.0)) for m in MODALITIES}
        unknown = set(self.alpha) - set(MODALITIES)
        if unknown:
            raise GraphError(f"unknown modalities in alpha: {sorted(unknown)}")
        beta = {}
        for key, value in self.beta.items():
            k = _pair_key(key)
            if k in beta and beta[k] != float(value):
                raise GraphError(f"beta is not symmetric for pair {k}")
            beta[k] = float(value)
        for k in itertools.combinations(MODALITIES, 2):
            beta.setdefault(k, 1.0)
        values = list(alpha.values()) + list(beta.values()) + [float(self.gamma)]
        if any(not (v >= 0 and math.isfinite(v)) for v in values):
            raise GraphError("coupling weights must be finite and nonnegative")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", float(self.gamma))

    def coefficient(self, cls: InteractionClass) -> float:
        if cls.kind == "intra":
            return self.alpha[cls.modalities[0]]
        if cls.kind == "cross":
            return self.beta[cls.modalities]
        return self.gamma

    def total(self) -> float:
        return sum(self.alpha.values()) + sum(self.beta.values()) + self.gamma

    def to_dict(self) -> dict:
        return {
            "alpha": dict(self.alpha),
            "beta": {f"{a}-{b}": v for (a, b), v in self.beta.items()},
            "gamma": self.gamma,
        }


@dataclass(frozen=True)
class MultimodalLaplacian:
    blocks: Mapping[InteractionClass, np.ndarray]
    coefficients: CouplingWeights
    composed: np.ndarray

    def block(self, cls: InteractionClass) -> np.ndarray:
        """Block for ``cls``; a zero matrix when the class has no edges."""
        if cls in self.blocks:
            return self.blocks[cls]
        return np.zeros_like(self.composed)


def compose_multimodal_laplacian(
    graph: SemanticGraph,
    weights: CouplingWeights | None = None,
    metric: str = "euclidean",
    form: str = "zhou",
) -> MultimodalLaplacian:
    """Build every nonempty class block and their coupling-weighted sum."""
    weights = weights or CouplingWeights()
    classes = graph.interaction_classes()
    if not classes:
        raise GraphError("graph has no edges in any interaction class")
    all_w = _edge_weights(graph, graph.edges, metric)
    blocks = {}
    composed = np.zeros((graph.n_nodes, graph.n_nodes))
    for cls in classes:
        idx = [k for k, e in enumerate(graph.edges) if e.interaction_class == cls]
        block = _assemble_laplacian(graph.n_nodes, [graph.edges[k] for k in idx], all_w[idx], form)
        blocks[cls] = block
        composed += weights.coefficient(cls) * block
    return MultimodalLaplacian(blocks, weights, composed)


def node_weights(graph: SemanticGraph, weights: CouplingWeights) -> np.ndarray:
    """Aggregated per-node weight ``alpha_M(i) + sum_j beta_ij + gamma``.

    ``beta_ij`` is the cross coupling of the modality pair of ``i`` and ``j``
    when the two nodes share a cross-modal edge, and zero otherwise.
    """
    out = np.array([weights.alpha[n.modality] + weights.gamma for n in graph.nodes])
    linked: set[tuple[int, int]] = set()
    for e in graph.edges:
        if e.interaction_class.kind != "cross":
            continue
        for a, b in itertools.combinations(e.members, 2):
            if graph.nodes[a].modality != graph.nodes[b].modality:
                linked.add((a, b))
    for a, b in sorted(linked):
        beta = weights.beta[_pair_key((graph.nodes[a].modality, graph.nodes[b].modality))]
        out[a] += beta
        out[b] += beta
    return out


def induced_subgraph(graph: SemanticGraph, keep: Iterable[int]) -> tuple[SemanticGraph, dict[int, int]]:
    """Restrict to ``keep``; returns the subgraph and the old-to-new id map."""
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise GraphError("keep set is empty")
    for k in keep:
        if not 0 <= k < graph.n_nodes:
            raise GraphError(f"keep references unknown node {k}")
    id_map = {old: new for new, old in enumerate(keep)}
    nodes = [replace(graph.nodes[old], id=new) for old, new in id_map.items()]
    edges = [
        Hyperedge(tuple(id_map[m] for m in e.members), e.interaction_class)
        for e in graph.edges
        if all(m in id_map for m in e.members)
    ]
    return build_graph(nodes, edges, graph.global_temperature), id_map

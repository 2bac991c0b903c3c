"""Graph JSON ingestion/export and sweep CSV emission."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Sequence

from hallspec.graph import GraphError, Hyperedge, InteractionClass, Node, SemanticGraph, build_graph
from hallspec.sweep import CSV_COLUMNS, SweepReport, SweepRow


class IngestError(ValueError):
    """Malformed or invalid graph/selection file; the message names the location."""


def graph_to_dict(graph: SemanticGraph) -> dict[str, Any]:
    nodes = []
    for n in graph.nodes:
        entry: dict[str, Any] = {"id": n.id, "modality": n.modality, "embedding": list(n.embedding)}
        if n.temperature is not None:
            entry["temperature"] = n.temperature
        nodes.append(entry)
    edges = [{"members": list(e.members), "class": e.interaction_class.kind} for e in graph.edges]
    return {"global_temperature": graph.global_temperature, "nodes": nodes, "edges": edges}


def _field(obj: dict, key: str, where: str, kinds, required: bool = True):
    if key not in obj:
        if required:
            raise IngestError(f"{where}: missing field {key!r}")
        return None
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, kinds):
        raise IngestError(f"{where}: field {key!r} has invalid type {type(value).__name__}")
    return value


def _edge_class(kind: str, members: Sequence[int], nodes: Sequence[Node], where: str) -> InteractionClass:
    mods = sorted({nodes[m].modality for m in members if 0 <= m < len(nodes)}, key="TVA".index)
    try:
        if kind == "intra":
            if len(mods) != 1:
                raise GraphError(f"intra edge spans modalities {mods}")
            return InteractionClass.intra(mods[0])
        if kind == "cross":
            if len(mods) != 2:
                raise GraphError(f"cross edge spans modalities {mods}")
            return InteractionClass.cross(*mods)
        if kind == "joint":
            return InteractionClass.joint()
    except GraphError as exc:
        raise IngestError(f"{where}: {exc}") from None
    raise IngestError(f"{where}: unknown class {kind!r}")


def graph_from_dict(data: Any) -> SemanticGraph:
    if not isinstance(data, dict):
        raise IngestError("top level must be an object")
    temp = _field(data, "global_temperature", "graph", (int, float))
    raw_nodes = _field(data, "nodes", "graph", list)
    raw_edges = _field(data, "edges", "graph", list, required=False) or []
    nodes = []
    for k, item in enumerate(raw_nodes):
        where = f"nodes[{k}]"
        if not isinstance(item, dict):
            raise IngestError(f"{where}: must be an object")
        nid = _field(item, "id", where, int)
        where = f"node {nid}"
        modality = _field(item, "modality", where, str)
        emb = _field(item, "embedding", where, list)
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in emb):
            raise IngestError(f"{where}: embedding entries must be numbers")
        node_t = _field(item, "temperature", where, (int, float), required=False)
        nodes.append(Node(nid, modality, tuple(emb), None if node_t is None else float(node_t)))
    nodes.sort(key=lambda n: n.id)
    edges = []
    for k, item in enumerate(raw_edges):
        where = f"edges[{k}]"
        if not isinstance(item, dict):
            raise IngestError(f"{where}: must be an object")
        members = _field(item, "members", where, list)
        if not all(isinstance(m, int) and not isinstance(m, bool) for m in members):
            raise IngestError(f"{where}: members must be integers")
        kind = _field(item, "class", where, str, required=False)
        cls = None if kind is None else _edge_class(kind, members, nodes, where)
        edges.append(Hyperedge(tuple(members), cls))
    try:
        return build_graph(nodes, edges, float(temp))
    except GraphError as exc:
        raise IngestError(str(exc)) from None


def ingest_embeddings(path: str | Path) -> SemanticGraph:
    """Load and validate a graph JSON file."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise IngestError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return graph_from_dict(data)
    except IngestError as exc:
        raise IngestError(f"{path}: {exc}") from None


def export_graph(graph: SemanticGraph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(graph), indent=1) + "\n")


def save_selection(plausible: Sequence[int], pairs: Sequence[tuple[int, int]], path: str | Path) -> None:
    doc = {"plausible": list(plausible), "pairs": [list(p) for p in pairs]}
    Path(path).write_text(json.dumps(doc) + "\n")


def load_selection(path: str | Path) -> tuple[list[int], list[tuple[int, int]]]:
    """Read ``{"plausible": [...], "pairs": [[x, p], ...]}``."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise IngestError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise IngestError(f"{path}: top level must be an object")
    plausible = _field(doc, "plausible", str(path), list)
    pairs = _field(doc, "pairs", str(path), list)
    if not all(isinstance(v, int) for v in plausible):
        raise IngestError(f"{path}: plausible entries must be integers")
    out = []
    for k, pair in enumerate(pairs):
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(v, int) for v in pair)):
            raise IngestError(f"{path}: pairs[{k}] must be [x, p]")
        out.append((pair[0], pair[1]))
    return plausible, out


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{value:.12g}"


def emit_csv(report: SweepReport, path: str | Path) -> Path:
    """Write one row per ``(t, pair)`` in that order; reals carry 12 significant digits."""
    path = Path(path)
    rows = sorted(report.rows, key=lambda r: (r.t, r.pair_id))
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow([_fmt(v) for v in r])
    return path


def read_csv(path: str | Path) -> SweepReport:
    """Parse a CSV written by :func:`emit_csv` back into a report (no summary)."""
    rows = []
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != CSV_COLUMNS:
            raise IngestError(f"{path}: unexpected header {header}")
        for lineno, rec in enumerate(reader, start=2):
            try:
                rows.append(
                    SweepRow(
                        float(rec[0]), float(rec[1]), int(rec[2]),
                        *(float(v) for v in rec[3:9]),
                        rec[9] == "true", rec[10] == "true",
                    )
                )
            except (ValueError, IndexError):
                raise IngestError(f"{path}: line {lineno}: malformed row") from None
    return SweepReport(rows)

"""Graph import/export and synthetic graph generation.

The interchange format is JSONL: one record per line, UTF-8. Node
records must precede any edge that references them::

    {"record": "node", "id": 0, "method": "transmit", "class": "Tranceiver",
     "kind": "concrete", "file": "Tranceiver.java", "line": 12}
    {"record": "edge", "caller": 0, "callee": 3}

``id`` is any unique JSON scalar chosen by the producer; dense integer
node ids are assigned in node-record order. ``kind`` is one of
interface | abstract | concrete; a missing kind defaults to concrete
with a warning. ``file`` and ``line`` are optional.

The synthetic generator reproduces the structural regimes the search
benchmarks need: a random background digraph (fixed edge probability or
fixed out-degree) plus a configurable number of high-indegree "hub"
nodes flagged interface/abstract, mimicking how widely-implemented
interface methods accumulate callers. Output is a pure function of the
spec: the random source is numpy's PCG64 stream seeded from ``seed``.
"""

from __future__ import annotations

import json
import warnings
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Iterator

import numpy as np

from .errors import InvalidNodeError, JsonlFormatError, SyntheticSpecError
from .model import ClassKind, Direction, InMemoryGraph, MethodMeta, NodeId

_KIND_NAMES = {kind.value: kind for kind in ClassKind}

# "Few vs many" reachability boundary, as a fraction of the node count,
# and the dominance ratio for the lopsided regimes.
MANY_FRACTION = 0.05
DOMINANCE_RATIO = 5.0


# ---------------------------------------------------------------------------
# JSONL import / export
# ---------------------------------------------------------------------------


def import_jsonl(lines: Iterable[str] | IO[str]) -> InMemoryGraph:
    """Build a graph from a JSONL record stream.

    Raises JsonlFormatError (with the line number) on malformed JSON,
    unknown record or kind values, duplicate node ids, or edges that
    reference an id not yet declared. Duplicate edges are deduplicated.
    """
    metas: list[MethodMeta] = []
    id_map: dict[object, int] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise JsonlFormatError(lineno, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise JsonlFormatError(lineno, "record must be a JSON object")
        record = obj.get("record")
        if record == "node":
            metas.append(_parse_node(obj, lineno, id_map, len(metas)))
        elif record == "edge":
            edges.append(_parse_edge(obj, lineno, id_map))
        else:
            raise JsonlFormatError(lineno, f"unknown record type {record!r}")
    return InMemoryGraph(metas, edges)


def _parse_node(obj: dict, lineno: int, id_map: dict, next_id: int) -> MethodMeta:
    if "id" not in obj:
        raise JsonlFormatError(lineno, "node record missing 'id'")
    key = obj["id"]
    if isinstance(key, (dict, list)):
        raise JsonlFormatError(lineno, "node id must be a JSON scalar")
    if key in id_map:
        raise JsonlFormatError(lineno, f"duplicate node id {key!r}")
    method = obj.get("method")
    cls = obj.get("class")
    if not method or not isinstance(method, str):
        raise JsonlFormatError(lineno, "node record needs a non-empty 'method'")
    if not cls or not isinstance(cls, str):
        raise JsonlFormatError(lineno, "node record needs a non-empty 'class'")
    if "kind" in obj:
        kind_name = obj["kind"]
        kind = _KIND_NAMES.get(kind_name) if isinstance(kind_name, str) else None
        if kind is None:
            raise JsonlFormatError(
                lineno,
                f"unknown kind {kind_name!r} (expected one of {sorted(_KIND_NAMES)})",
            )
    else:
        warnings.warn(
            f"line {lineno}: node {key!r} has no 'kind'; defaulting to concrete",
            stacklevel=3,
        )
        kind = ClassKind.CONCRETE
    file = obj.get("file", "")
    line_no = obj.get("line", 0)
    if not isinstance(file, str):
        raise JsonlFormatError(lineno, "'file' must be a string")
    if not isinstance(line_no, int) or line_no < 0:
        raise JsonlFormatError(lineno, "'line' must be a non-negative integer")
    id_map[key] = next_id
    return MethodMeta(
        node=next_id,
        method_name=method,
        class_name=cls,
        class_kind=kind,
        file=file,
        line=line_no,
    )


def _parse_edge(obj: dict, lineno: int, id_map: dict) -> tuple[int, int]:
    try:
        caller_key = obj["caller"]
        callee_key = obj["callee"]
    except KeyError as exc:
        raise JsonlFormatError(lineno, f"edge record missing {exc.args[0]!r}") from exc
    if caller_key not in id_map:
        raise JsonlFormatError(lineno, f"edge references undeclared caller id {caller_key!r}")
    if callee_key not in id_map:
        raise JsonlFormatError(lineno, f"edge references undeclared callee id {callee_key!r}")
    return id_map[caller_key], id_map[callee_key]


def iter_jsonl(graph) -> Iterator[str]:
    """Yield the graph's JSONL lines: nodes in id order, then edges
    sorted by (caller, callee). Optional file/line fields are omitted
    when unset, so exports of identical graphs are byte-identical."""
    for u in range(graph.node_count):
        meta = graph.method_meta(u)
        record: dict[str, object] = {
            "record": "node",
            "id": u,
            "method": meta.method_name,
            "class": meta.class_name,
            "kind": meta.class_kind.value,
        }
        if meta.file:
            record["file"] = meta.file
        if meta.line:
            record["line"] = meta.line
        yield json.dumps(record, ensure_ascii=False)
    for u in range(graph.node_count):
        for v in graph.successors(u):
            yield json.dumps({"record": "edge", "caller": u, "callee": v})


def export_jsonl(graph) -> str:
    """The full JSONL text for a graph (trailing newline included)."""
    return "\n".join(iter_jsonl(graph)) + "\n"


# ---------------------------------------------------------------------------
# Synthetic graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SyntheticSpec:
    """Deterministic recipe for a synthetic call graph.

    Exactly one of ``edge_probability`` (independent Bernoulli per
    ordered pair) or ``out_degree`` (fixed number of distinct targets
    per node, where available) describes the background edges. On top
    of those, ``hub_count`` nodes are flagged ``hub_kind`` and wired
    with exactly ``hub_indegree`` additional incoming edges from
    distinct callers, so every hub ends with indegree >= hub_indegree.
    With ``acyclic`` set, all edges point from lower to higher node id.
    """

    node_count: int
    edge_probability: float | None = None
    out_degree: int | None = None
    hub_count: int = 0
    hub_indegree: int = 1
    hub_kind: ClassKind = ClassKind.INTERFACE
    seed: int = 0
    acyclic: bool = False

    def __post_init__(self) -> None:
        if self.node_count < 1:
            raise SyntheticSpecError("node_count must be positive")
        if (self.edge_probability is None) == (self.out_degree is None):
            raise SyntheticSpecError(
                "exactly one of edge_probability or out_degree must be set"
            )
        if self.edge_probability is not None and not 0.0 <= self.edge_probability <= 1.0:
            raise SyntheticSpecError("edge_probability must lie in [0, 1]")
        if self.out_degree is not None and self.out_degree < 0:
            raise SyntheticSpecError("out_degree must be non-negative")
        if not 0 <= self.hub_count <= self.node_count:
            raise SyntheticSpecError("hub_count must lie in [0, node_count]")
        if self.hub_indegree < 1:
            raise SyntheticSpecError("hub_indegree must be positive")
        if self.hub_count > 0 and self.hub_indegree > self.node_count - 1:
            raise SyntheticSpecError(
                f"hub_indegree {self.hub_indegree} infeasible with "
                f"{self.node_count} nodes"
            )


def generate_synthetic(spec: SyntheticSpec) -> InMemoryGraph:
    """Generate the graph described by ``spec``; identical spec, identical graph."""
    n = spec.node_count
    rng = np.random.Generator(np.random.PCG64(spec.seed))

    # Hub selection first so the stream layout is stable. Acyclic hubs
    # need hub_indegree callers with smaller ids, so only sufficiently
    # late nodes qualify.
    if spec.hub_count > 0:
        first_ok = spec.hub_indegree if spec.acyclic else 0
        candidates = np.arange(first_ok, n)
        if len(candidates) < spec.hub_count:
            raise SyntheticSpecError(
                f"cannot place {spec.hub_count} acyclic hubs of indegree "
                f"{spec.hub_indegree} in {n} nodes"
            )
        hubs = sorted(int(h) for h in rng.choice(candidates, size=spec.hub_count, replace=False))
    else:
        hubs = []
    hub_set = set(hubs)

    metas = [
        MethodMeta(
            node=u,
            method_name=f"m{u}",
            class_name=f"C{u}",
            class_kind=spec.hub_kind if u in hub_set else ClassKind.CONCRETE,
        )
        for u in range(n)
    ]

    edges: set[tuple[int, int]] = set()
    if spec.edge_probability is not None:
        p = spec.edge_probability
        if p > 0.0:
            for u in range(n):
                draws = rng.random(n)
                targets = np.flatnonzero(draws < p)
                for v in targets:
                    v = int(v)
                    if v == u:
                        continue
                    if spec.acyclic and v < u:
                        continue
                    edges.add((u, v))
    else:
        d = spec.out_degree or 0
        if d > 0:
            for u in range(n):
                if spec.acyclic:
                    pool = np.arange(u + 1, n)
                else:
                    pool = np.concatenate([np.arange(0, u), np.arange(u + 1, n)])
                if len(pool) == 0:
                    continue
                k = min(d, len(pool))
                for v in rng.choice(pool, size=k, replace=False):
                    edges.add((u, int(v)))

    # Hub wiring happens after the background edges and never replaces
    # one: callers are drawn from nodes not already calling the hub, so
    # each hub gains exactly hub_indegree new incoming edges.
    for h in hubs:
        limit = h if spec.acyclic else n
        existing = {u for (u, v) in edges if v == h}
        pool = np.array(
            [u for u in range(limit) if u != h and u not in existing], dtype=np.int64
        )
        if len(pool) < spec.hub_indegree:
            raise SyntheticSpecError(
                f"hub {h}: only {len(pool)} eligible callers for indegree "
                f"{spec.hub_indegree}"
            )
        for u in rng.choice(pool, size=spec.hub_indegree, replace=False):
            edges.add((int(u), h))

    return InMemoryGraph(metas, sorted(edges))


# ---------------------------------------------------------------------------
# Reachability and regime classification
# ---------------------------------------------------------------------------


def reachable_count(graph, start: NodeId, direction: Direction) -> int:
    """Size of the BFS closure from ``start`` in ``direction``, excluding start."""
    return len(reachable_set(graph, start, direction))


def reachable_set(graph, start: NodeId, direction: Direction) -> set[NodeId]:
    """All nodes reachable from ``start`` (start itself excluded even on cycles)."""
    if not isinstance(start, int) or not 0 <= start < graph.node_count:
        raise InvalidNodeError(start, graph.node_count)
    step = graph.successors if direction is Direction.FORWARD else graph.predecessors
    seen: set[NodeId] = {start}
    queue: deque[NodeId] = deque([start])
    while queue:
        u = queue.popleft()
        for v in step(u):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    seen.discard(start)
    return seen


class Regime(Enum):
    """Endpoint-pair shape by the sizes of the two relevant closures.

    P1: forward closure dominates the backward one (>= 5x).
    P2: both closures small (<= 5% of the graph).
    P3: backward closure dominates the forward one.
    P4: both closures large.
    """

    P1 = "P1"
    P2 = "P2"
    P3 = "P3"
    P4 = "P4"

    @property
    def label(self) -> str:
        return f"{self.value}-like"


@dataclass(frozen=True)
class PairProfile:
    initial: NodeId
    final: NodeId
    forward_count: int
    backward_count: int
    regime: Regime


def regime_for_counts(forward: int, backward: int, node_count: int) -> Regime:
    """Classification rule on raw closure sizes.

    A count is "few" when it is at most max(1, MANY_FRACTION * nodes)
    and a side dominates when it is DOMINANCE_RATIO times the other.
    Both-few wins first (P2), then dominance with a genuinely large
    winner (P1/P3), then both-large (P4); mixed leftovers fall to
    whichever side is bigger. The floor of 1 keeps closure-size-1
    endpoints "few" on toy graphs where 5% rounds below one node.
    """
    threshold = max(1.0, MANY_FRACTION * node_count)
    few_f = forward <= threshold
    few_b = backward <= threshold
    if few_f and few_b:
        return Regime.P2
    if forward >= DOMINANCE_RATIO * backward and not few_f:
        return Regime.P1
    if backward >= DOMINANCE_RATIO * forward and not few_b:
        return Regime.P3
    if not few_f and not few_b:
        return Regime.P4
    return Regime.P1 if forward >= backward else Regime.P3


def classify_pair(graph, initial: NodeId, final: NodeId) -> PairProfile:
    """Profile a pair by |forward closure of initial| and |backward closure of final|."""
    fwd = reachable_count(graph, initial, Direction.FORWARD)
    bwd = reachable_count(graph, final, Direction.BACKWARD)
    return PairProfile(
        initial=initial,
        final=final,
        forward_count=fwd,
        backward_count=bwd,
        regime=regime_for_counts(fwd, bwd, graph.node_count),
    )

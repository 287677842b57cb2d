"""Core call-graph data model and the in-memory backend.

A call graph is a directed graph whose nodes are methods and whose
edges point from a caller method to a callee method. Nodes carry the
source-level metadata (most importantly the kind of the enclosing
class) that the postponing search variants consult.

Any object with ``node_count``, ``successors``, ``predecessors`` and
``method_meta`` satisfies the graph-access contract; :class:`InMemoryGraph`
here and ``store.DiskGraph`` are the two backends. Graphs are immutable
once built, so concurrent readers are safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

from .errors import AmbiguousNameError, InvalidNodeError, NameNotFoundError

NodeId = int


class Direction(Enum):
    """Edge-traversal direction: FORWARD follows caller->callee edges."""

    FORWARD = "forward"
    BACKWARD = "backward"


class ClassKind(Enum):
    """Kind of a method's enclosing class; drives the postponement predicate."""

    INTERFACE = "interface"
    ABSTRACT = "abstract"
    CONCRETE = "concrete"


class Edge(NamedTuple):
    """Directed caller -> callee edge. One edge stands for any number of call sites."""

    caller: NodeId
    callee: NodeId


@dataclass(frozen=True)
class MethodMeta:
    """A node's identity plus the source properties the search may probe.

    ``file`` may be empty and ``line`` 0 when the importer had no
    position information. ``class_kind`` is always resolved; importers
    default missing kinds to CONCRETE rather than guessing INTERFACE,
    which would silently trigger postponement.
    """

    node: NodeId
    method_name: str
    class_name: str
    class_kind: ClassKind
    file: str = ""
    line: int = 0

    def __post_init__(self) -> None:
        if not self.method_name:
            raise ValueError("method_name must be non-empty")
        if not self.class_name:
            raise ValueError("class_name must be non-empty")
        if self.line < 0:
            raise ValueError("line must be non-negative")

    @property
    def qualified_name(self) -> str:
        return f"{self.class_name}.{self.method_name}"


class InMemoryGraph:
    """Adjacency-list call graph held fully in memory.

    Both directions are materialized so backward traversal costs the
    same as forward. Adjacency tuples are sorted ascending and
    duplicate-free; node ids are dense, assigned in construction order.
    """

    def __init__(self, nodes: Sequence[MethodMeta], edges: Iterable[tuple[int, int]]):
        n = len(nodes)
        for i, meta in enumerate(nodes):
            if meta.node != i:
                raise ValueError(f"node record {i} carries id {meta.node}; ids must be dense")
        fwd: list[set[int]] = [set() for _ in range(n)]
        bwd: list[set[int]] = [set() for _ in range(n)]
        for caller, callee in edges:
            if not 0 <= caller < n:
                raise InvalidNodeError(caller, n)
            if not 0 <= callee < n:
                raise InvalidNodeError(callee, n)
            caller, callee = int(caller), int(callee)  # shed numpy integer types
            fwd[caller].add(callee)
            bwd[callee].add(caller)
        self._nodes: tuple[MethodMeta, ...] = tuple(nodes)
        self._fwd: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(s)) for s in fwd)
        self._bwd: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(s)) for s in bwd)
        self._edge_count = sum(len(s) for s in self._fwd)
        index: dict[str, list[int]] = {}
        for meta in self._nodes:
            index.setdefault(meta.qualified_name, []).append(meta.node)
        self.name_index: dict[str, list[int]] = index

    # ---- access contract ---------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def successors(self, u: NodeId) -> tuple[int, ...]:
        """All v with an edge u -> v, sorted ascending."""
        self._check(u)
        return self._fwd[u]

    def predecessors(self, u: NodeId) -> tuple[int, ...]:
        """All v with an edge v -> u, sorted ascending."""
        self._check(u)
        return self._bwd[u]

    def method_meta(self, u: NodeId) -> MethodMeta:
        self._check(u)
        return self._nodes[u]

    # ---- helpers -------------------------------------------------------------

    def has_edge(self, caller: NodeId, callee: NodeId) -> bool:
        self._check(caller)
        self._check(callee)
        return callee in self._fwd[caller]

    def edges(self) -> Iterable[Edge]:
        """All edges, sorted by (caller, callee)."""
        for u, targets in enumerate(self._fwd):
            for v in targets:
                yield Edge(u, v)

    def out_degree(self, u: NodeId) -> int:
        self._check(u)
        return len(self._fwd[u])

    def in_degree(self, u: NodeId) -> int:
        self._check(u)
        return len(self._bwd[u])

    def _check(self, u: NodeId) -> None:
        try:
            in_range = 0 <= u < len(self._nodes)
        except TypeError:
            in_range = False
        if not in_range:
            raise InvalidNodeError(u, len(self._nodes))

    def __repr__(self) -> str:
        return f"InMemoryGraph(nodes={self.node_count}, edges={self.edge_count})"


def materialize(graph) -> InMemoryGraph:
    """Copy any graph-access backend into a fresh InMemoryGraph."""
    metas = [graph.method_meta(u) for u in range(graph.node_count)]
    edges = [(u, v) for u in range(graph.node_count) for v in graph.successors(u)]
    return InMemoryGraph(metas, edges)


def resolve_name(graph, qualified_name: str) -> NodeId:
    """Map a ``ClassName.methodName`` string to its unique node id.

    Raises NameNotFoundError when nothing matches and AmbiguousNameError
    (listing the candidate ids) when imported overloads collapsed onto
    one name. Works against any backend: uses the in-memory name index
    when present, otherwise scans node metadata.
    """
    index = getattr(graph, "name_index", None)
    if index is not None:
        candidates = index.get(qualified_name, [])
    else:
        candidates = [
            u
            for u in range(graph.node_count)
            if graph.method_meta(u).qualified_name == qualified_name
        ]
    if not candidates:
        raise NameNotFoundError(qualified_name)
    if len(candidates) > 1:
        raise AmbiguousNameError(qualified_name, candidates)
    return candidates[0]

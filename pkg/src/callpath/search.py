"""Shortest call-path search: unidirectional baseline, balanced
bidirectional search, and the postponing bidirectional variant.

All searches treat every edge as weight one and run layered frontier
expansion: each round picks one direction, processes that direction's
entire frontier in ascending node-id order, and commits the next
frontier only after the round finishes. The search stops the moment a
relaxation lands on a node currently sitting in the *opposite*
frontier (not merely the opposite visited set), which keeps visited
counts and meeting points reproducible at the cost of sometimes
detecting a meeting later than a visited-set check would.

The postponing variant additionally inspects the class kind of every
backward-frontier node before expanding it. Methods of interface or
abstract classes tend to have many callers, so expanding them backward
floods the frontier; instead the node is parked in the frontier for a
fixed number of rounds (a "postponement") before it expands. The
kind lookup is a metadata *probe* and is counted, because on the disk
backend each probe can cost a read. ``probe_only`` performs the probes
but never postpones, isolating probe cost from postponement behavior.

Two frontier-selection policies are implemented because they explore
very different amounts of the graph:

* ``PAPER_LITERAL`` (the default) expands the forward frontier only
  when it is strictly *larger* than the backward one, ties going
  backward. While the backward frontier is alive the forward frontier
  therefore never grows past the start node, and the meeting point is
  always the start node itself; the search degenerates into a
  backward-only sweep.
* ``SMALLER_FIRST`` expands the smaller non-empty frontier (ties
  forward), the classical cardinality criterion; both searches
  genuinely advance.

The benchmark module reports both so their behavior can be compared.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from math import inf
from time import perf_counter
from typing import NamedTuple

from .errors import InternalSearchError, InvalidNodeError
from .model import ClassKind, Edge, NodeId

DEFAULT_POSTPONE_KINDS = frozenset({ClassKind.INTERFACE, ClassKind.ABSTRACT})
DEFAULT_DELAY_STEPS = 3


class Algorithm(Enum):
    UNIDIRECTIONAL = "uni"
    BIDIR_BALANCED = "balanced"
    BIDIR_POSTPONE = "postpone"


class FrontierPolicy(Enum):
    PAPER_LITERAL = "paper"
    SMALLER_FIRST = "smaller"


class SearchStatus(Enum):
    FOUND = "found"
    NO_PATH = "no-path"


@dataclass(frozen=True)
class SearchConfig:
    """Algorithm variant plus its knobs.

    ``delay_steps`` is the number of frontier rounds a postponed node
    sits out (0 disables postponement entirely and reduces the
    postponing variant to the balanced one, probes included).
    ``probe_only`` keeps the metadata probes but never postpones;
    it is only meaningful for BIDIR_POSTPONE.
    """

    algorithm: Algorithm = Algorithm.BIDIR_POSTPONE
    delay_steps: int = DEFAULT_DELAY_STEPS
    probe_only: bool = False
    postpone_kinds: frozenset[ClassKind] = DEFAULT_POSTPONE_KINDS
    frontier_policy: FrontierPolicy = FrontierPolicy.PAPER_LITERAL

    def __post_init__(self) -> None:
        if self.delay_steps < 0:
            raise ValueError("delay_steps must be non-negative")
        if self.probe_only and self.algorithm is not Algorithm.BIDIR_POSTPONE:
            raise ValueError("probe_only is only valid for the postponing algorithm")

    @property
    def label(self) -> str:
        """Short row label used by reports: uni, balanced, probe-only, postpone-N."""
        if self.algorithm is Algorithm.UNIDIRECTIONAL:
            return "uni"
        if self.algorithm is Algorithm.BIDIR_BALANCED:
            return "balanced"
        if self.probe_only:
            return "probe-only"
        return f"postpone-{self.delay_steps}"


class TraceEvent(NamedTuple):
    """One frontier-processing event; ``action`` is expanded | delayed | postponed."""

    step: int
    forward: bool
    node: NodeId
    action: str


@dataclass
class SearchState:
    """Raw per-query bookkeeping, exposed for path reconstruction and tests.

    ``prev_forward[v]`` is v's predecessor on the tree grown from the
    initial node; ``prev_backward[v]`` is the node *through which the
    backward search reached v*, i.e. v's successor on the way to the
    final node. Distances default to infinity; the endpoints start at 0.
    """

    todo_forward: list[NodeId]
    todo_backward: list[NodeId]
    prev_forward: list[NodeId | None]
    prev_backward: list[NodeId | None]
    dist_forward: list[float]
    dist_backward: list[float]
    delay: list[int]
    postponed: list[bool]
    intermed: NodeId | None


@dataclass(frozen=True)
class SearchResult:
    """Outcome plus the instrumentation counters the benchmarks report.

    ``visited_forward`` / ``visited_backward`` count nodes whose
    neighbor relaxation actually executed in that direction; a node
    sitting postponed in the frontier is not counted until it expands.
    ``steps`` counts frontier rounds (both directions combined).
    """

    status: SearchStatus
    path: tuple[Edge, ...]
    length: int
    meeting_point: NodeId | None
    visited_forward: int
    visited_backward: int
    postponements: int
    probe_count: int
    steps: int
    elapsed: float

    @property
    def found(self) -> bool:
        return self.status is SearchStatus.FOUND

    def same_traversal(self, other: "SearchResult") -> bool:
        """True when everything but wall-clock time matches."""
        return replace(self, elapsed=0.0) == replace(other, elapsed=0.0)


def _check_node(graph, u: NodeId) -> None:
    try:
        in_range = 0 <= u < graph.node_count
    except TypeError:
        in_range = False
    if not in_range:
        raise InvalidNodeError(u, graph.node_count)


def _begin_query(graph) -> None:
    begin = getattr(graph, "begin_query", None)
    if begin is not None:
        begin()


def _trivial_result(node: NodeId, elapsed: float) -> SearchResult:
    return SearchResult(
        status=SearchStatus.FOUND,
        path=(),
        length=0,
        meeting_point=node,
        visited_forward=0,
        visited_backward=0,
        postponements=0,
        probe_count=0,
        steps=0,
        elapsed=elapsed,
    )


def reconstruct_path(state: SearchState, initial: NodeId, final: NodeId) -> list[Edge]:
    """Stitch the two predecessor chains at ``state.intermed`` into one path.

    The forward chain is walked from the meeting node back to the
    initial node and reversed, then the backward chain is walked from
    the meeting node to the final node. A chain that fails to terminate
    at its endpoint is an internal invariant violation.
    """
    if state.intermed is None:
        raise InternalSearchError("reconstruct_path called without a meeting point")
    limit = len(state.prev_forward) + 1
    edges: list[Edge] = []
    v = state.intermed
    for _ in range(limit):
        u = state.prev_forward[v]
        if u is None:
            break
        edges.append(Edge(u, v))
        v = u
    else:
        raise InternalSearchError("forward predecessor chain does not terminate")
    if v != initial:
        raise InternalSearchError(
            f"forward predecessor chain roots at {v}, expected initial node {initial}"
        )
    edges.reverse()
    v = state.intermed
    for _ in range(limit):
        w = state.prev_backward[v]
        if w is None:
            break
        edges.append(Edge(v, w))
        v = w
    else:
        raise InternalSearchError("backward predecessor chain does not terminate")
    if v != final:
        raise InternalSearchError(
            f"backward predecessor chain ends at {v}, expected final node {final}"
        )
    return edges


def _choose_forward(policy: FrontierPolicy, n_fwd: int, n_bwd: int) -> bool:
    """Pick the direction to expand; caller guarantees one frontier is non-empty."""
    if policy is FrontierPolicy.PAPER_LITERAL:
        # Expand forward only when the backward frontier is strictly
        # smaller; ties go backward. The chosen frontier is never empty:
        # an empty backward frontier forces forward and vice versa.
        return n_bwd < n_fwd
    if n_fwd == 0:
        return False
    if n_bwd == 0:
        return True
    return n_fwd <= n_bwd


def _bidir(
    graph,
    initial: NodeId,
    final: NodeId,
    *,
    delay_steps: int,
    probe_only: bool,
    postpone_kinds: frozenset[ClassKind],
    policy: FrontierPolicy,
    postpone_enabled: bool,
    trace: list[TraceEvent] | None = None,
    return_state: bool = False,
):
    _check_node(graph, initial)
    _check_node(graph, final)
    _begin_query(graph)
    t0 = perf_counter()
    if initial == final:
        result = _trivial_result(initial, perf_counter() - t0)
        return (result, None) if return_state else result

    n = graph.node_count
    prev_f: list[NodeId | None] = [None] * n
    prev_b: list[NodeId | None] = [None] * n
    dist_f: list[float] = [inf] * n
    dist_b: list[float] = [inf] * n
    delay = [0] * n
    postponed = [False] * n
    dist_f[initial] = 0
    dist_b[final] = 0
    todo_f: list[NodeId] = [initial]
    todo_b: list[NodeId] = [final]
    set_f = {initial}
    set_b = {final}

    # With delay 0 and probing off, the postpone branch can never fire;
    # skipping it entirely makes the reduction to the balanced variant
    # exact, probes included.
    may_postpone = postpone_enabled and not probe_only and delay_steps > 0
    probing = probe_only or may_postpone

    intermed: NodeId | None = None
    steps = 0
    visited_f = 0
    visited_b = 0
    postponements = 0
    probes = 0

    while todo_f or todo_b:
        forward = _choose_forward(policy, len(todo_f), len(todo_b))
        steps += 1
        if forward:
            todo, other_set, dist, prev = todo_f, set_b, dist_f, prev_f
        else:
            todo, other_set, dist, prev = todo_b, set_f, dist_b, prev_b
        todo2: list[NodeId] = []
        met = False
        for u in todo:
            if delay[u] > 0:
                delay[u] -= 1
                todo2.append(u)
                if trace is not None:
                    trace.append(TraceEvent(steps, forward, u, "delayed"))
                continue
            if probing and not forward and not postponed[u]:
                kind = graph.method_meta(u).class_kind
                probes += 1
                if may_postpone and kind in postpone_kinds:
                    postponed[u] = True
                    delay[u] = delay_steps - 1
                    postponements += 1
                    todo2.append(u)
                    if trace is not None:
                        trace.append(TraceEvent(steps, forward, u, "postponed"))
                    continue
            neighbors = graph.successors(u) if forward else graph.predecessors(u)
            if forward:
                visited_f += 1
            else:
                visited_b += 1
            if trace is not None:
                trace.append(TraceEvent(steps, forward, u, "expanded"))
            alt = dist[u] + 1
            for v in neighbors:
                if dist[v] > alt:
                    prev[v] = u
                    dist[v] = alt
                    if v in other_set:
                        intermed = v
                        met = True
                        break
                    todo2.append(v)
            if met:
                break
        if met:
            break
        todo2.sort()
        if forward:
            todo_f = todo2
            set_f = set(todo2)
        else:
            todo_b = todo2
            set_b = set(todo2)

    state = SearchState(
        todo_forward=todo_f,
        todo_backward=todo_b,
        prev_forward=prev_f,
        prev_backward=prev_b,
        dist_forward=dist_f,
        dist_backward=dist_b,
        delay=delay,
        postponed=postponed,
        intermed=intermed,
    )
    if intermed is None:
        result = SearchResult(
            status=SearchStatus.NO_PATH,
            path=(),
            length=0,
            meeting_point=None,
            visited_forward=visited_f,
            visited_backward=visited_b,
            postponements=postponements,
            probe_count=probes,
            steps=steps,
            elapsed=perf_counter() - t0,
        )
    else:
        # The dist tables can be stale relative to the prev chains: a
        # postponed node's late expansion may improve an ancestor's
        # distance after a descendant recorded it, so the realized path
        # can be shorter than dist_f[intermed] + dist_b[intermed].
        # Without postponement the two always agree. Length reports the
        # real edge count.
        path = tuple(reconstruct_path(state, initial, final))
        result = SearchResult(
            status=SearchStatus.FOUND,
            path=path,
            length=len(path),
            meeting_point=intermed,
            visited_forward=visited_f,
            visited_backward=visited_b,
            postponements=postponements,
            probe_count=probes,
            steps=steps,
            elapsed=perf_counter() - t0,
        )
    return (result, state) if return_state else result


def unidirectional_shortest_path(
    graph,
    initial: NodeId,
    final: NodeId,
    *,
    trace: list[TraceEvent] | None = None,
) -> SearchResult:
    """Forward layered breadth-first search; the naive baseline.

    Unit edge weights make plain BFS exact, so the returned length is
    always the true shortest distance. Stops the moment the final node
    is first relaxed.
    """
    _check_node(graph, initial)
    _check_node(graph, final)
    _begin_query(graph)
    t0 = perf_counter()
    if initial == final:
        return _trivial_result(initial, perf_counter() - t0)

    n = graph.node_count
    prev: list[NodeId | None] = [None] * n
    dist: list[float] = [inf] * n
    dist[initial] = 0
    todo: list[NodeId] = [initial]
    steps = 0
    visited = 0
    found = False
    while todo and not found:
        steps += 1
        todo2: list[NodeId] = []
        for u in todo:
            visited += 1
            if trace is not None:
                trace.append(TraceEvent(steps, True, u, "expanded"))
            alt = dist[u] + 1
            for v in graph.successors(u):
                if dist[v] > alt:
                    prev[v] = u
                    dist[v] = alt
                    if v == final:
                        found = True
                        break
                    todo2.append(v)
            if found:
                break
        todo2.sort()
        todo = todo2

    if not found:
        return SearchResult(
            status=SearchStatus.NO_PATH,
            path=(),
            length=0,
            meeting_point=None,
            visited_forward=visited,
            visited_backward=0,
            postponements=0,
            probe_count=0,
            steps=steps,
            elapsed=perf_counter() - t0,
        )
    chain: list[NodeId] = [final]
    v: NodeId = final
    for _ in range(n + 1):
        u = prev[v]
        if u is None:
            break
        chain.append(u)
        v = u
    else:
        raise InternalSearchError("predecessor chain does not terminate")
    if v != initial:
        raise InternalSearchError("predecessor chain does not root at the initial node")
    chain.reverse()
    path = tuple(Edge(a, b) for a, b in zip(chain, chain[1:]))
    return SearchResult(
        status=SearchStatus.FOUND,
        path=path,
        length=len(path),
        meeting_point=final,
        visited_forward=visited,
        visited_backward=0,
        postponements=0,
        probe_count=0,
        steps=steps,
        elapsed=perf_counter() - t0,
    )


def bidir_balanced(
    graph,
    initial: NodeId,
    final: NodeId,
    frontier_policy: FrontierPolicy = FrontierPolicy.PAPER_LITERAL,
    *,
    trace: list[TraceEvent] | None = None,
) -> SearchResult:
    """Bidirectional search with no postponement and no metadata probes."""
    return _bidir(
        graph,
        initial,
        final,
        delay_steps=0,
        probe_only=False,
        postpone_kinds=DEFAULT_POSTPONE_KINDS,
        policy=frontier_policy,
        postpone_enabled=False,
        trace=trace,
    )


def bidir_postpone(
    graph,
    initial: NodeId,
    final: NodeId,
    config: SearchConfig | None = None,
    *,
    trace: list[TraceEvent] | None = None,
) -> SearchResult:
    """Bidirectional search that postpones backward expansion of
    interface/abstract-class methods for ``config.delay_steps`` rounds.

    With ``delay_steps=0`` and ``probe_only=False`` this is exactly
    ``bidir_balanced``. With ``probe_only=True`` the traversal is also
    identical to the balanced one, but every backward-processed node
    costs one metadata probe.
    """
    if config is None:
        config = SearchConfig()
    if config.algorithm is not Algorithm.BIDIR_POSTPONE:
        raise ValueError(f"bidir_postpone called with algorithm {config.algorithm}")
    return _bidir(
        graph,
        initial,
        final,
        delay_steps=config.delay_steps,
        probe_only=config.probe_only,
        postpone_kinds=config.postpone_kinds,
        policy=config.frontier_policy,
        postpone_enabled=True,
        trace=trace,
    )


def run_search(
    graph,
    initial: NodeId,
    final: NodeId,
    config: SearchConfig,
    *,
    trace: list[TraceEvent] | None = None,
) -> SearchResult:
    """Dispatch on ``config.algorithm``; the single entry point used by bench and CLI."""
    if config.algorithm is Algorithm.UNIDIRECTIONAL:
        return unidirectional_shortest_path(graph, initial, final, trace=trace)
    if config.algorithm is Algorithm.BIDIR_BALANCED:
        return bidir_balanced(graph, initial, final, config.frontier_policy, trace=trace)
    return bidir_postpone(graph, initial, final, config, trace=trace)

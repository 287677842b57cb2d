from math import inf

import numpy as np
import pytest

from callpath.errors import InternalSearchError, InvalidNodeError
from callpath.fixtures import postponement_pathology_graph
from callpath.ingest import SyntheticSpec, generate_synthetic
from callpath.model import ClassKind, Edge, InMemoryGraph, MethodMeta
from callpath.search import (
    Algorithm,
    FrontierPolicy,
    SearchConfig,
    SearchState,
    SearchStatus,
    bidir_balanced,
    bidir_postpone,
    reconstruct_path,
    run_search,
    unidirectional_shortest_path,
)

from oracles import bfs_distances, is_valid_path, random_graph

POLICIES = (FrontierPolicy.PAPER_LITERAL, FrontierPolicy.SMALLER_FIRST)


def chain_graph(names_kinds, edges):
    metas = [
        MethodMeta(i, f"m{i}", f"C{i}", kind) for i, kind in enumerate(names_kinds)
    ]
    return InMemoryGraph(metas, edges)


# ---------------------------------------------------------------------------
# unidirectional
# ---------------------------------------------------------------------------


def test_uni_fig_direct_edge(fig_graph):
    result = unidirectional_shortest_path(fig_graph, 0, 3)
    assert result.found
    assert result.path == (Edge(0, 3),)
    assert result.length == 1
    assert result.visited_backward == 0


def test_uni_same_node(fig_graph):
    result = unidirectional_shortest_path(fig_graph, 2, 2)
    assert result.found
    assert result.path == ()
    assert result.length == 0


def test_uni_unreachable(fig_graph):
    result = unidirectional_shortest_path(fig_graph, 3, 0)
    assert result.status is SearchStatus.NO_PATH
    assert result.path == ()


def test_uni_invalid_node(fig_graph):
    with pytest.raises(InvalidNodeError):
        unidirectional_shortest_path(fig_graph, 0, 99)


def test_uni_matches_bfs_oracle_all_pairs():
    graph = generate_synthetic(SyntheticSpec(node_count=200, edge_probability=0.01, seed=13))
    for s in range(graph.node_count):
        dist = bfs_distances(graph, s)
        for t in range(graph.node_count):
            result = unidirectional_shortest_path(graph, s, t)
            if dist[t] is inf:
                assert result.status is SearchStatus.NO_PATH
            else:
                assert result.found
                assert result.length == dist[t]
                assert is_valid_path(graph, s, t, result.path)


# ---------------------------------------------------------------------------
# bidir_balanced
# ---------------------------------------------------------------------------


def test_balanced_fig(fig_graph):
    result = bidir_balanced(fig_graph, 0, 3)
    assert result.found
    assert result.length == 1
    assert result.meeting_point in (0, 3)
    assert result.postponements == 0
    assert result.probe_count == 0


def test_balanced_unreachable(fig_graph):
    result = bidir_balanced(fig_graph, 3, 0)
    assert result.status is SearchStatus.NO_PATH
    assert result.meeting_point is None


@pytest.mark.parametrize("policy", POLICIES)
def test_balanced_exhaustive_small_sweep(policy):
    # every digraph instance on <= 5 nodes over a seeded sample; the
    # frozen gap bound (zero) is re-established by the acceptance sweep
    rng = np.random.default_rng(77)
    for _ in range(120):
        n = int(rng.integers(2, 6))
        graph = random_graph(rng, n, float(rng.random()))
        for s in range(n):
            dist = bfs_distances(graph, s)
            for t in range(n):
                result = bidir_balanced(graph, s, t, policy)
                reachable = (dist[t] is not inf) or s == t
                assert result.found == reachable
                if result.found:
                    assert is_valid_path(graph, s, t, result.path)
                    assert result.length == (0 if s == t else dist[t])


def test_balanced_paper_literal_is_backward_only(fig_graph):
    # under the literal frontier rule the forward frontier never grows
    # past the start node, so no forward expansion happens on found pairs
    result = bidir_balanced(fig_graph, 0, 3, FrontierPolicy.PAPER_LITERAL)
    assert result.visited_forward == 0
    assert result.meeting_point == 0


def test_balanced_meeting_accounting():
    rng = np.random.default_rng(31)
    for _ in range(40):
        graph = random_graph(rng, 15, 0.15)
        s, t = int(rng.integers(15)), int(rng.integers(15))
        for policy in POLICIES:
            result = bidir_balanced(graph, s, t, policy)
            if result.found and s != t:
                assert result.length == len(result.path)
                assert result.meeting_point is not None


# ---------------------------------------------------------------------------
# bidir_postpone
# ---------------------------------------------------------------------------


def test_postpone_fig_no_interface_nodes(fig_graph):
    result = bidir_postpone(fig_graph, 0, 3, SearchConfig(delay_steps=3))
    assert result.found
    assert result.length == 1
    assert result.postponements == 0


def test_postpone_config_validation(fig_graph):
    with pytest.raises(ValueError):
        SearchConfig(algorithm=Algorithm.BIDIR_BALANCED, probe_only=True)
    with pytest.raises(ValueError):
        SearchConfig(delay_steps=-1)
    with pytest.raises(ValueError):
        bidir_postpone(fig_graph, 0, 3, SearchConfig(algorithm=Algorithm.UNIDIRECTIONAL))


def test_postpone_pathology_visits_more_backward():
    graph, s, t = postponement_pathology_graph()
    balanced = bidir_balanced(graph, s, t)
    postponed = bidir_postpone(graph, s, t, SearchConfig(delay_steps=3))
    assert postponed.postponements == 1
    assert postponed.visited_backward > balanced.visited_backward
    assert postponed.path == balanced.path  # same route, found later
    assert postponed.length == balanced.length == 3


def test_postpone_hub_fixture_beats_balanced_on_dual_heavy_pair(hub_graph):
    s, t = 983, 348
    balanced = bidir_balanced(hub_graph, s, t)
    postponed = bidir_postpone(hub_graph, s, t, SearchConfig(delay_steps=3))
    assert postponed.found and balanced.found
    total_postponed = postponed.visited_forward + postponed.visited_backward
    total_balanced = balanced.visited_forward + balanced.visited_backward
    assert total_postponed < total_balanced


@pytest.mark.parametrize("policy", POLICIES)
def test_delay_zero_reduces_to_balanced(policy):
    rng = np.random.default_rng(55)
    config = SearchConfig(delay_steps=0, frontier_policy=policy)
    for _ in range(150):
        n = int(rng.integers(2, 40))
        graph = random_graph(rng, n, float(rng.random() * 0.3))
        s, t = int(rng.integers(n)), int(rng.integers(n))
        a = bidir_balanced(graph, s, t, policy)
        b = bidir_postpone(graph, s, t, config)
        assert a.same_traversal(b)
        assert b.probe_count == 0


@pytest.mark.parametrize("policy", POLICIES)
def test_probe_only_traversal_matches_balanced(policy):
    rng = np.random.default_rng(56)
    config = SearchConfig(probe_only=True, frontier_policy=policy)
    for _ in range(100):
        n = int(rng.integers(2, 40))
        graph = random_graph(rng, n, float(rng.random() * 0.3))
        s, t = int(rng.integers(n)), int(rng.integers(n))
        trace_b, trace_p = [], []
        a = bidir_balanced(graph, s, t, policy, trace=trace_b)
        b = bidir_postpone(graph, s, t, config, trace=trace_p)
        assert a.path == b.path and a.status == b.status
        assert (a.visited_forward, a.visited_backward, a.steps) == (
            b.visited_forward,
            b.visited_backward,
            b.steps,
        )
        assert trace_b == trace_p  # identical node-by-node traversal
        backward_processed = sum(1 for e in trace_p if not e.forward)
        if backward_processed:
            assert b.probe_count > 0
        else:
            assert b.probe_count == 0


def test_no_postpone_kind_nodes_means_identical_to_balanced():
    rng = np.random.default_rng(58)
    for delay in (1, 3, 6):
        for _ in range(30):
            n = int(rng.integers(2, 30))
            metas = [MethodMeta(u, f"m{u}", f"C{u}", ClassKind.CONCRETE) for u in range(n)]
            draws = rng.random((n, n))
            graph = InMemoryGraph(
                metas, [(u, v) for u in range(n) for v in range(n) if draws[u, v] < 0.2]
            )
            s, t = int(rng.integers(n)), int(rng.integers(n))
            a = bidir_balanced(graph, s, t)
            b = bidir_postpone(graph, s, t, SearchConfig(delay_steps=delay))
            assert a.path == b.path
            assert (a.visited_forward, a.visited_backward, a.steps) == (
                b.visited_forward,
                b.visited_backward,
                b.steps,
            )
            assert b.postponements == 0


@pytest.mark.parametrize("delay", [1, 3, 6])
def test_postponed_node_sits_out_exactly_delay_rounds(delay):
    graph, s, t = postponement_pathology_graph()
    trace = []
    result = bidir_postpone(graph, s, t, SearchConfig(delay_steps=delay), trace=trace)
    assert result.postponements == 1
    by_node: dict[int, list[str]] = {}
    for event in trace:
        by_node.setdefault(event.node, []).append(event.action)
    postponed_nodes = [u for u, actions in by_node.items() if "postponed" in actions]
    assert len(postponed_nodes) == 1
    actions = by_node[postponed_nodes[0]]
    sat_out = sum(1 for a in actions if a in ("postponed", "delayed"))
    assert sat_out == delay
    assert actions[-1] == "expanded"
    assert actions.count("postponed") == 1  # the trigger fires at most once


def test_postponement_triggers_at_most_once_per_node():
    rng = np.random.default_rng(61)
    for _ in range(60):
        n = int(rng.integers(3, 30))
        graph = random_graph(rng, n, 0.25)
        s, t = int(rng.integers(n)), int(rng.integers(n))
        trace = []
        bidir_postpone(graph, s, t, SearchConfig(delay_steps=2), trace=trace)
        triggers: dict[int, int] = {}
        for event in trace:
            if event.action == "postponed":
                triggers[event.node] = triggers.get(event.node, 0) + 1
        assert all(count == 1 for count in triggers.values())


def test_completeness_matches_reachability_randomized():
    rng = np.random.default_rng(62)
    for _ in range(80):
        n = int(rng.integers(2, 25))
        graph = random_graph(rng, n, float(rng.random() * 0.4))
        s, t = int(rng.integers(n)), int(rng.integers(n))
        reachable = (bfs_distances(graph, s)[t] is not inf) or s == t
        for policy in POLICIES:
            for config in (
                SearchConfig(delay_steps=3, frontier_policy=policy),
                SearchConfig(delay_steps=6, frontier_policy=policy),
                SearchConfig(probe_only=True, frontier_policy=policy),
            ):
                result = bidir_postpone(graph, s, t, config)
                assert result.found == reachable
                if result.found:
                    assert is_valid_path(graph, s, t, result.path)


def test_postpone_kinds_configurable():
    # abstract-kind node postpones under the default set, not when the
    # set is restricted to interface only
    kinds = [ClassKind.CONCRETE, ClassKind.ABSTRACT, ClassKind.CONCRETE, ClassKind.CONCRETE]
    graph = chain_graph(kinds, [(0, 1), (1, 2), (2, 3)])
    default = bidir_postpone(graph, 0, 3, SearchConfig(delay_steps=3))
    assert default.postponements == 1
    restricted = bidir_postpone(
        graph, 0, 3, SearchConfig(delay_steps=3, postpone_kinds=frozenset({ClassKind.INTERFACE}))
    )
    assert restricted.postponements == 0


def test_postponement_only_applies_backward():
    # interface node on the forward side of the meeting: never postponed
    kinds = [ClassKind.INTERFACE, ClassKind.INTERFACE, ClassKind.CONCRETE]
    graph = chain_graph(kinds, [(0, 1), (1, 2)])
    result = bidir_postpone(
        graph, 0, 2, SearchConfig(delay_steps=3, frontier_policy=FrontierPolicy.SMALLER_FIRST)
    )
    assert result.found
    # smaller-first with ties forward walks the chain forward only
    assert result.visited_backward == 0
    assert result.postponements == 0


# ---------------------------------------------------------------------------
# reconstruct_path
# ---------------------------------------------------------------------------


def _blank_state(n, intermed):
    return SearchState(
        todo_forward=[],
        todo_backward=[],
        prev_forward=[None] * n,
        prev_backward=[None] * n,
        dist_forward=[inf] * n,
        dist_backward=[inf] * n,
        delay=[0] * n,
        postponed=[False] * n,
        intermed=intermed,
    )


def test_reconstruct_one_hop():
    state = _blank_state(2, intermed=1)
    state.prev_forward[1] = 0
    assert reconstruct_path(state, 0, 1) == [Edge(0, 1)]


def test_reconstruct_two_sided():
    # intermed m=2; forward chain s=0 -> a=1 -> m; backward chain m -> b=3 -> t=4
    state = _blank_state(5, intermed=2)
    state.prev_forward[2] = 1
    state.prev_forward[1] = 0
    state.prev_backward[2] = 3
    state.prev_backward[3] = 4
    assert reconstruct_path(state, 0, 4) == [Edge(0, 1), Edge(1, 2), Edge(2, 3), Edge(3, 4)]


def test_reconstruct_requires_meeting_point():
    with pytest.raises(InternalSearchError):
        reconstruct_path(_blank_state(3, intermed=None), 0, 2)


def test_reconstruct_detects_broken_chain():
    state = _blank_state(4, intermed=2)
    state.prev_forward[2] = 1  # chain stops at 1, never reaches initial 0
    with pytest.raises(InternalSearchError):
        reconstruct_path(state, 0, 2)


def test_reconstruct_detects_cyclic_chain():
    state = _blank_state(3, intermed=2)
    state.prev_forward[2] = 1
    state.prev_forward[1] = 2
    with pytest.raises(InternalSearchError):
        reconstruct_path(state, 0, 2)


def test_found_paths_pass_independent_validator_randomized():
    rng = np.random.default_rng(63)
    configs = [
        SearchConfig(algorithm=Algorithm.UNIDIRECTIONAL),
        SearchConfig(algorithm=Algorithm.BIDIR_BALANCED),
        SearchConfig(delay_steps=3),
        SearchConfig(delay_steps=6, frontier_policy=FrontierPolicy.SMALLER_FIRST),
        SearchConfig(probe_only=True),
    ]
    for _ in range(60):
        n = int(rng.integers(2, 35))
        graph = random_graph(rng, n, 0.15)
        s, t = int(rng.integers(n)), int(rng.integers(n))
        for config in configs:
            result = run_search(graph, s, t, config)
            if result.found:
                assert is_valid_path(graph, s, t, result.path)


def test_search_determinism_same_counts_across_runs(hub_graph):
    config = SearchConfig(delay_steps=3)
    first = bidir_postpone(hub_graph, 983, 348, config)
    second = bidir_postpone(hub_graph, 983, 348, config)
    assert first.same_traversal(second)


def test_config_labels():
    assert SearchConfig(algorithm=Algorithm.UNIDIRECTIONAL).label == "uni"
    assert SearchConfig(algorithm=Algorithm.BIDIR_BALANCED).label == "balanced"
    assert SearchConfig(delay_steps=6).label == "postpone-6"
    assert SearchConfig(probe_only=True).label == "probe-only"


def test_chain_with_extra_callers_postpones_without_extra_visits():
    # interface node two hops from the meeting point, 20 extra callers:
    # the postponement fires but, with no other active backward branch,
    # it only shifts the expansion later; the visit count stays equal to
    # the balanced run. A decoy branch (see the pathology fixture) is
    # what turns the delay into extra visits.
    kinds = [ClassKind.CONCRETE] * 25
    kinds[2] = ClassKind.INTERFACE  # i
    edges = [(0, 1), (1, 2), (2, 3), (3, 4)]  # s -> a -> i -> b -> t
    edges += [(5 + j, 2) for j in range(20)]  # 20 callers of i
    graph = chain_graph(kinds, edges)
    balanced = bidir_balanced(graph, 0, 4)
    postponed = bidir_postpone(graph, 0, 4, SearchConfig(delay_steps=3))
    assert postponed.postponements == 1
    assert postponed.visited_backward == balanced.visited_backward
    assert postponed.steps == balanced.steps + 3  # the delay costs rounds, not visits
    assert postponed.path == balanced.path


@pytest.mark.parametrize("policy", POLICIES)
def test_meeting_accounting_for_delay_free_variants(policy):
    # white-box: when no node is ever delayed, the realized path length
    # equals dist_forward[meeting] + dist_backward[meeting]
    from callpath.search import _bidir, DEFAULT_POSTPONE_KINDS

    rng = np.random.default_rng(64)
    met = 0
    for _ in range(60):
        n = int(rng.integers(2, 30))
        graph = random_graph(rng, n, 0.2)
        s, t = int(rng.integers(n)), int(rng.integers(n))
        for probe_only in (False, True):
            result, state = _bidir(
                graph,
                s,
                t,
                delay_steps=0,
                probe_only=probe_only,
                postpone_kinds=DEFAULT_POSTPONE_KINDS,
                policy=policy,
                postpone_enabled=probe_only,
                return_state=True,
            )
            if result.found and s != t:
                met += 1
                mp = result.meeting_point
                assert result.length == state.dist_forward[mp] + state.dist_backward[mp]
    assert met > 0


def test_postponement_can_shorten_path_below_distance_sum():
    # stale-distance effect: a postponed node's late expansion improves
    # an ancestor's distance after a descendant recorded it, so the
    # realized path can undercut the recorded distance sum; length must
    # report the real edge count
    from callpath.search import _bidir, DEFAULT_POSTPONE_KINDS

    graph = generate_synthetic(
        SyntheticSpec(
            node_count=1000, out_degree=2, hub_count=10, hub_indegree=40, seed=7, acyclic=True
        )
    )
    result, state = _bidir(
        graph,
        670,
        973,
        delay_steps=3,
        probe_only=False,
        postpone_kinds=DEFAULT_POSTPONE_KINDS,
        policy=FrontierPolicy.PAPER_LITERAL,
        postpone_enabled=True,
        return_state=True,
    )
    assert result.found
    assert result.length == len(result.path) == 7
    assert is_valid_path(graph, 670, 973, result.path)
    mp = result.meeting_point
    assert state.dist_forward[mp] + state.dist_backward[mp] == 9  # stale, longer than the path

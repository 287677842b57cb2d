"""Constructed graphs used by the regression suite, demos and docs.

These are deliberately small, fully deterministic instances whose
search behavior is understood edge-by-edge, so the benchmark and test
suites can pin exact visited counts against them.
"""

from __future__ import annotations

from .ingest import SyntheticSpec
from .model import ClassKind, InMemoryGraph, MethodMeta

# Pathology fixture layer sizes: one decoy gate node, then two widening
# decoy layers. During each round the interface node sits postponed,
# one decoy layer expands; the balanced search never expands any of
# them, so the postponing search visits exactly 1 + 42 + 84 = 127 extra
# nodes on this instance.
_DECOY_L2 = 42
_DECOY_L3 = 84


def transceiver_graph() -> InMemoryGraph:
    """Tiny four-method fixture: transmit() calls encode, makeHeader and send.

    Node ids: transmit=0, encode=1, makeHeader=2, send=3.
    """
    metas = [
        MethodMeta(0, "transmit", "Tranceiver", ClassKind.CONCRETE, "Tranceiver.java", 8),
        MethodMeta(1, "encode", "Transformer", ClassKind.CONCRETE, "Transformer.java", 3),
        MethodMeta(2, "makeHeader", "Protocol", ClassKind.CONCRETE, "Protocol.java", 5),
        MethodMeta(3, "send", "Tranceiver", ClassKind.CONCRETE, "Tranceiver.java", 4),
    ]
    edges = [(0, 1), (0, 2), (0, 3)]
    return InMemoryGraph(metas, edges)


def postponement_pathology_graph() -> tuple[InMemoryGraph, int, int]:
    """Instance where postponing is strictly worse than balanced search.

    Returns (graph, initial, final). The only path is
    request -> IHandler.handle -> execute -> finish, and the handler
    sits directly after the initial node, so under the default
    (paper-literal) policy the backward sweep must expand it to reach
    the meeting point. Because its class kind is INTERFACE the
    postponing variant parks it for the full delay; meanwhile a decoy
    cascade hanging off the execute node keeps the backward frontier
    busy, burning one widening decoy layer per delayed round. The
    balanced variant expands the handler immediately and never touches
    the decoys beyond their gate node.
    """
    metas = [
        MethodMeta(0, "request", "Client", ClassKind.CONCRETE),
        MethodMeta(1, "handle", "IHandler", ClassKind.INTERFACE),
        MethodMeta(2, "execute", "Worker", ClassKind.CONCRETE),
        MethodMeta(3, "finish", "Sink", ClassKind.CONCRETE),
        MethodMeta(4, "gate", "Decoy0", ClassKind.CONCRETE),
    ]
    edges = [(0, 1), (1, 2), (2, 3), (4, 2)]
    next_id = 5
    l2_ids = []
    for j in range(_DECOY_L2):
        metas.append(MethodMeta(next_id, f"call{j}", "Decoy1", ClassKind.CONCRETE))
        edges.append((next_id, 4))
        l2_ids.append(next_id)
        next_id += 1
    for j in range(_DECOY_L3):
        metas.append(MethodMeta(next_id, f"call{j}", "Decoy2", ClassKind.CONCRETE))
        edges.append((next_id, l2_ids[j // 2]))
        next_id += 1
    return InMemoryGraph(metas, edges), 0, 3


def hub_fixture_spec() -> SyntheticSpec:
    """The shipped 1000-node synthetic graph: out-degree-3 background
    plus 10 interface hubs with at least 50 callers each."""
    return SyntheticSpec(
        node_count=1000,
        out_degree=3,
        hub_count=10,
        hub_indegree=50,
        hub_kind=ClassKind.INTERFACE,
        seed=7,
    )

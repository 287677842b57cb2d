"""Scenario harness: regime-classified node pairs x algorithm variants
x storage conditions, with deterministic tabular reports.

A scenario names a graph source (JSONL file, synthetic spec, or a
prebuilt store), the endpoint pairs to query, the algorithm
configurations to compare, the storage condition, and a repetition
count. Every (pair, algorithm) cell runs ``repetitions`` times; all
counters must agree across repetitions (any divergence is a hard
error), so only the timing columns carry noise. Reports render as CSV
(fixed column set, one row per cell), versioned JSON, or Markdown
tables grouped per metric.

Timing measures the search call only; graph loading, store building
and store opening are excluded. Absolute times are environment-bound,
so comparisons should read the visited counts and the per-report
ratios rather than the raw seconds.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import ScenarioError
from .ingest import (
    PairProfile,
    Regime,
    SyntheticSpec,
    classify_pair,
    generate_synthetic,
    import_jsonl,
)
from .model import ClassKind, InMemoryGraph, NodeId, materialize, resolve_name
from .search import Algorithm, FrontierPolicy, SearchConfig, run_search
from .store import CacheConfig, CacheMode, build_store, open_store

SCENARIO_SCHEMA = "callpath-scenario@1"
REPORT_SCHEMA = "callpath-report@1"

#: Column order of the CSV emitter; frozen, append-only.
CSV_COLUMNS = (
    "initial",
    "final",
    "initial_name",
    "final_name",
    "forward_reach",
    "backward_reach",
    "regime",
    "algorithm",
    "frontier_policy",
    "status",
    "path_length",
    "visited_forward",
    "visited_backward",
    "visited_total",
    "postponements",
    "probe_count",
    "steps",
    "repetitions",
    "mean_elapsed_s",
    "stddev_elapsed_s",
    "timing_valid",
    "meta_reads",
    "adjacency_reads",
    "cache_hits",
    "cache_misses",
    "injected_latency_s",
)

#: Columns whose values are wall-clock noise; everything else is deterministic.
TIMING_COLUMNS = ("mean_elapsed_s", "stddev_elapsed_s")


@dataclass(frozen=True)
class PairSpec:
    """An endpoint pair, by node id or qualified name, with an optional
    regime expectation that run_scenario re-checks."""

    initial: int | str
    final: int | str
    regime: Regime | None = None


@dataclass(frozen=True)
class StorageCondition:
    on_disk: bool = False
    cache: CacheConfig = field(default_factory=CacheConfig)

    def describe(self) -> str:
        if not self.on_disk:
            return "memory"
        return (
            f"disk(cache={self.cache.max_cached_nodes},"
            f"latency={self.cache.latency_per_miss}s,{self.cache.mode.value})"
        )


@dataclass(frozen=True)
class Scenario:
    graph_jsonl: Path | None = None
    synthetic: SyntheticSpec | None = None
    store_path: Path | None = None
    pairs: tuple[PairSpec, ...] = ()
    algorithms: tuple[SearchConfig, ...] = ()
    condition: StorageCondition = field(default_factory=StorageCondition)
    repetitions: int = 3

    def __post_init__(self) -> None:
        sources = [
            s for s in (self.graph_jsonl, self.synthetic, self.store_path) if s is not None
        ]
        if len(sources) != 1:
            raise ScenarioError("scenario needs exactly one graph source")
        if self.repetitions < 1:
            raise ScenarioError("repetitions must be at least 1")
        if not self.pairs:
            raise ScenarioError("scenario has no pairs")
        if not self.algorithms:
            raise ScenarioError("scenario has no algorithms")


@dataclass(frozen=True)
class ReportRow:
    initial: int
    final: int
    initial_name: str
    final_name: str
    forward_reach: int
    backward_reach: int
    regime: str
    algorithm: str
    frontier_policy: str
    status: str
    path_length: int
    visited_forward: int
    visited_backward: int
    visited_total: int
    postponements: int
    probe_count: int
    steps: int
    repetitions: int
    mean_elapsed_s: float
    stddev_elapsed_s: float
    timing_valid: bool
    meta_reads: int
    adjacency_reads: int
    cache_hits: int
    cache_misses: int
    injected_latency_s: float


@dataclass(frozen=True)
class ScenarioReport:
    environment: dict
    rows: tuple[ReportRow, ...]


# ---------------------------------------------------------------------------
# Scenario file parsing
# ---------------------------------------------------------------------------


def load_scenario(path: str | Path) -> Scenario:
    """Parse a scenario JSON file; relative paths resolve against the file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError(f"{path}: scenario must be a JSON object")
    schema = doc.get("schema", SCENARIO_SCHEMA)
    if schema != SCENARIO_SCHEMA:
        raise ScenarioError(f"{path}: unsupported schema {schema!r}")
    base = path.parent

    graph = doc.get("graph")
    if not isinstance(graph, dict) or len(graph) != 1:
        raise ScenarioError(f"{path}: 'graph' must name exactly one source")
    graph_jsonl = synthetic = store_path = None
    if "jsonl" in graph:
        graph_jsonl = (base / graph["jsonl"]).resolve()
    elif "synthetic" in graph:
        spec = dict(graph["synthetic"])
        if "hub_kind" in spec:
            spec["hub_kind"] = ClassKind(spec["hub_kind"])
        synthetic = SyntheticSpec(**spec)
    elif "store" in graph:
        store_path = (base / graph["store"]).resolve()
    else:
        raise ScenarioError(f"{path}: graph source must be jsonl | synthetic | store")

    pairs = []
    for entry in doc.get("pairs", []):
        regime = Regime(entry["regime"]) if "regime" in entry else None
        pairs.append(PairSpec(entry["initial"], entry["final"], regime))

    algorithms = [_parse_algorithm(entry, path) for entry in doc.get("algorithms", [])]

    condition = StorageCondition()
    cond = doc.get("condition", {"storage": "memory"})
    storage = cond.get("storage", "memory")
    if storage == "disk":
        cache_doc = cond.get("cache", {})
        cache = CacheConfig(
            max_cached_nodes=cache_doc.get("max_cached_nodes", 1024),
            latency_per_miss=cache_doc.get("latency_per_miss_ms", 0) / 1000.0,
            mode=CacheMode(cache_doc.get("mode", "cold")),
        )
        condition = StorageCondition(on_disk=True, cache=cache)
    elif storage != "memory":
        raise ScenarioError(f"{path}: unknown storage condition {storage!r}")

    return Scenario(
        graph_jsonl=graph_jsonl,
        synthetic=synthetic,
        store_path=store_path,
        pairs=tuple(pairs),
        algorithms=tuple(algorithms),
        condition=condition,
        repetitions=doc.get("repetitions", 3),
    )


def _parse_algorithm(entry: dict, path: Path) -> SearchConfig:
    try:
        algorithm = Algorithm(entry["algorithm"])
    except (KeyError, ValueError) as exc:
        raise ScenarioError(f"{path}: bad algorithm entry {entry!r}") from exc
    kwargs: dict = {"algorithm": algorithm}
    if "delay_steps" in entry:
        kwargs["delay_steps"] = entry["delay_steps"]
    if "probe_only" in entry:
        kwargs["probe_only"] = entry["probe_only"]
    if "frontier_policy" in entry:
        kwargs["frontier_policy"] = FrontierPolicy(entry["frontier_policy"])
    if "postpone_kinds" in entry:
        kwargs["postpone_kinds"] = frozenset(ClassKind(k) for k in entry["postpone_kinds"])
    try:
        return SearchConfig(**kwargs)
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------


def _load_base_graph(scenario: Scenario) -> InMemoryGraph:
    if scenario.synthetic is not None:
        return generate_synthetic(scenario.synthetic)
    if scenario.graph_jsonl is not None:
        with scenario.graph_jsonl.open("r", encoding="utf-8") as fh:
            return import_jsonl(fh)
    with open_store(scenario.store_path) as handle:
        return materialize(handle)


def _resolve_pair(graph: InMemoryGraph, spec: PairSpec) -> tuple[int, int]:
    def one(value: int | str) -> int:
        if isinstance(value, int):
            if not 0 <= value < graph.node_count:
                raise ScenarioError(f"pair node id {value} out of range")
            return value
        return resolve_name(graph, value)

    return one(spec.initial), one(spec.final)


def run_scenario(
    scenario: Scenario,
    *,
    parallel: bool = False,
    workdir: str | Path | None = None,
) -> ScenarioReport:
    """Execute every (pair, algorithm) cell and assemble the report.

    Rows appear in deterministic order (pairs outer, algorithms inner).
    With ``parallel=True`` cells run on a thread pool and the timing
    columns are zeroed and flagged invalid, since concurrent cells
    distort each other's wall-clock. On-disk scenarios without a
    prebuilt store get one built under ``workdir`` (or a temp dir).
    """
    base = _load_base_graph(scenario)
    resolved: list[tuple[int, int, PairProfile]] = []
    for spec in scenario.pairs:
        s, t = _resolve_pair(base, spec)
        profile = classify_pair(base, s, t)
        if spec.regime is not None and profile.regime is not spec.regime:
            raise ScenarioError(
                f"pair ({spec.initial}, {spec.final}) expected regime "
                f"{spec.regime.value}, classified {profile.regime.value} "
                f"(forward={profile.forward_count}, backward={profile.backward_count})"
            )
        resolved.append((s, t, profile))

    tmp: tempfile.TemporaryDirectory | None = None
    store_path = scenario.store_path
    if scenario.condition.on_disk and store_path is None:
        if workdir is None:
            tmp = tempfile.TemporaryDirectory(prefix="callpath-bench-")
            workdir = tmp.name
        store_path = Path(workdir) / "scenario.cgs"
        build_store(base, store_path)

    cells = [
        (s, t, profile, config)
        for (s, t, profile) in resolved
        for config in scenario.algorithms
    ]

    def run_cell(cell) -> ReportRow:
        s, t, profile, config = cell
        if scenario.condition.on_disk:
            handle = open_store(store_path, scenario.condition.cache)
        else:
            handle = base
        try:
            results = []
            for _ in range(scenario.repetitions):
                results.append(run_search(handle, s, t, config))
            first = results[0]
            for other in results[1:]:
                if not first.same_traversal(other):
                    raise ScenarioError(
                        f"nondeterministic counters for pair ({s}, {t}) "
                        f"algorithm {config.label}"
                    )
            elapsed = [r.elapsed for r in results]
            if parallel:
                mean = stddev = 0.0
            else:
                mean = statistics.fmean(elapsed)
                stddev = statistics.stdev(elapsed) if len(elapsed) > 1 else 0.0
            if scenario.condition.on_disk:
                stats = handle.access_stats()
            else:
                stats = None
        finally:
            if scenario.condition.on_disk:
                handle.close()
        return ReportRow(
            initial=s,
            final=t,
            initial_name=base.method_meta(s).qualified_name,
            final_name=base.method_meta(t).qualified_name,
            forward_reach=profile.forward_count,
            backward_reach=profile.backward_count,
            regime=profile.regime.label,
            algorithm=config.label,
            frontier_policy=config.frontier_policy.value,
            status=first.status.value,
            path_length=first.length,
            visited_forward=first.visited_forward,
            visited_backward=first.visited_backward,
            visited_total=first.visited_forward + first.visited_backward,
            postponements=first.postponements,
            probe_count=first.probe_count,
            steps=first.steps,
            repetitions=scenario.repetitions,
            mean_elapsed_s=mean,
            stddev_elapsed_s=stddev,
            timing_valid=not parallel,
            meta_reads=stats.meta_reads if stats else 0,
            adjacency_reads=stats.adjacency_reads if stats else 0,
            cache_hits=stats.cache_hits if stats else 0,
            cache_misses=stats.cache_misses if stats else 0,
            injected_latency_s=stats.injected_latency_total if stats else 0.0,
        )

    try:
        if parallel:
            with ThreadPoolExecutor() as pool:
                rows = tuple(pool.map(run_cell, cells))
        else:
            rows = tuple(run_cell(cell) for cell in cells)
    finally:
        if tmp is not None:
            tmp.cleanup()

    environment = {
        "node_count": base.node_count,
        "edge_count": base.edge_count,
        "condition": scenario.condition.describe(),
        "repetitions": scenario.repetitions,
        "parallel": parallel,
    }
    return ScenarioReport(environment=environment, rows=rows)


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------


def emit_report(report: ScenarioReport, format: str = "csv") -> str:
    """Render a report as ``csv``, ``json`` or ``markdown`` text."""
    if format == "csv":
        return _emit_csv(report)
    if format == "json":
        return _emit_json(report)
    if format == "markdown":
        return _emit_markdown(report)
    raise ValueError(f"unknown report format {format!r}")


def _emit_csv(report: ScenarioReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        data = asdict(row)
        writer.writerow([data[col] for col in CSV_COLUMNS])
    return buf.getvalue()


def _emit_json(report: ScenarioReport) -> str:
    doc = {
        "schema": REPORT_SCHEMA,
        "environment": report.environment,
        "rows": [asdict(row) for row in report.rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_report_json(text: str) -> ScenarioReport:
    """Inverse of the JSON emitter; validates the schema tag."""
    doc = json.loads(text)
    if doc.get("schema") != REPORT_SCHEMA:
        raise ScenarioError(f"unsupported report schema {doc.get('schema')!r}")
    row_fields = {f.name for f in fields(ReportRow)}
    rows = []
    for raw in doc["rows"]:
        unknown = set(raw) - row_fields
        if unknown:
            raise ScenarioError(f"unknown report row fields {sorted(unknown)}")
        rows.append(ReportRow(**raw))
    return ScenarioReport(environment=doc["environment"], rows=tuple(rows))


def _emit_markdown(report: ScenarioReport) -> str:
    out = ["# Scenario report", ""]
    for key, value in report.environment.items():
        out.append(f"- {key}: {value}")
    out.append("")
    metrics = (
        ("Mean elapsed (s)", lambda r: f"{r.mean_elapsed_s:.6f}"),
        ("Visited nodes (total)", lambda r: str(r.visited_total)),
        ("Visited forward", lambda r: str(r.visited_forward)),
        ("Visited backward", lambda r: str(r.visited_backward)),
    )
    pair_labels: list[str] = []
    algo_labels: list[str] = []
    for row in report.rows:
        pair = f"{row.initial_name} -> {row.final_name} ({row.regime})"
        algo = f"{row.algorithm}[{row.frontier_policy}]"
        if pair not in pair_labels:
            pair_labels.append(pair)
        if algo not in algo_labels:
            algo_labels.append(algo)
    cells = {
        (f"{r.initial_name} -> {r.final_name} ({r.regime})", f"{r.algorithm}[{r.frontier_policy}]"): r
        for r in report.rows
    }
    for title, render in metrics:
        out.append(f"## {title}")
        out.append("")
        out.append("| pair | " + " | ".join(algo_labels) + " |")
        out.append("|---" * (len(algo_labels) + 1) + "|")
        for pair in pair_labels:
            values = []
            for algo in algo_labels:
                row = cells.get((pair, algo))
                values.append(render(row) if row is not None else "-")
            out.append(f"| {pair} | " + " | ".join(values) + " |")
        out.append("")
    # Ratio tables relative to the first algorithm column, so runs on
    # different machines stay comparable.
    baseline = algo_labels[0] if algo_labels else None
    ratio_metrics = (
        (f"Mean elapsed relative to {baseline}", lambda r: r.mean_elapsed_s, "{:.2f}x"),
        (f"Visited total relative to {baseline}", lambda r: r.visited_total, "{:.2f}x"),
    )
    if baseline is not None:
        for title, value, fmt in ratio_metrics:
            out.append(f"## {title}")
            out.append("")
            out.append("| pair | " + " | ".join(algo_labels) + " |")
            out.append("|---" * (len(algo_labels) + 1) + "|")
            for pair in pair_labels:
                base_row = cells.get((pair, baseline))
                base = value(base_row) if base_row is not None else 0.0
                values = []
                for algo in algo_labels:
                    row = cells.get((pair, algo))
                    if row is None or not base:
                        values.append("-")
                    else:
                        values.append(fmt.format(value(row) / base))
                out.append(f"| {pair} | " + " | ".join(values) + " |")
            out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# Regime pair mining
# ---------------------------------------------------------------------------


def find_regime_pairs(
    graph,
    regime: Regime,
    sample_budget: int,
    seed: int = 0,
    *,
    max_attempts: int | None = None,
) -> list[tuple[NodeId, NodeId]]:
    """Sample distinct (initial, final) pairs that classify as ``regime``.

    Sampling is uniform over candidate endpoints; sides that must be
    "many" draw only from nodes with at least one edge in the relevant
    direction, since pure sinks/sources can never reach anything.
    Deterministic for a fixed seed; may return fewer than requested.
    """
    if sample_budget <= 0:
        return []
    n = graph.node_count
    if n == 0:
        return []
    needs_forward = regime in (Regime.P1, Regime.P4)
    needs_backward = regime in (Regime.P3, Regime.P4)
    initials = [
        u for u in range(n) if not needs_forward or len(graph.successors(u)) > 0
    ]
    finals = [
        u for u in range(n) if not needs_backward or len(graph.predecessors(u)) > 0
    ]
    if not initials or not finals:
        return []
    rng = np.random.Generator(np.random.PCG64(seed))
    if max_attempts is None:
        max_attempts = max(1000, 200 * sample_budget)
    found: list[tuple[NodeId, NodeId]] = []
    seen: set[tuple[NodeId, NodeId]] = set()
    for _ in range(max_attempts):
        s = initials[int(rng.integers(len(initials)))]
        t = finals[int(rng.integers(len(finals)))]
        if s == t or (s, t) in seen:
            continue
        seen.add((s, t))
        if classify_pair(graph, s, t).regime is regime:
            found.append((s, t))
            if len(found) >= sample_budget:
                break
    return found

#!/usr/bin/env python3
"""Scale smoke run: metric kernels on a ~1M-node / ~5M-edge snapshot.

Generates a large synthetic corpus, builds the cumulative citation
snapshot, and times pagerank + full disruption sweep + aggregation +
hierarchy propagation, printing wall time and peak RSS per stage.
"""
from __future__ import annotations

import resource
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from kosrank import citegraph, graphmetrics, propagation, synthgen  # noqa: E402


def rss_gb() -> float:
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024**2


def stage(name, fn):
    start = time.perf_counter()
    result = fn()
    print(f"{name:<24} {time.perf_counter() - start:8.1f}s   peak rss {rss_gb():5.2f} GB")
    return result


def main() -> int:
    cfg = synthgen.ScenarioConfig(
        seed=1,
        months=10,
        articles_per_month=100_000,
        hierarchy_branching=(8, 6, 4),
        descriptors_per_article_mean=2.0,
        refs_mean=5.8,
        pa_exponent=0.5,
        retraction_rate=0.0005,
    )
    overall = time.perf_counter()
    hierarchy, store, edges, _ = stage("generate", lambda: synthgen.generate(cfg))
    graph = stage("build_graph", lambda: citegraph.build_graph(edges, store))
    snapshot = stage(
        "cumulative_snapshot",
        lambda: citegraph.cumulative_snapshot(graph, store, "2014-10"),
    )
    print(f"snapshot: {snapshot.num_nodes} nodes, {snapshot.num_edges} edges")

    pr = stage("pagerank", lambda: graphmetrics.pagerank(snapshot))
    dis = stage("disruption_all", lambda: graphmetrics.disruption_all(snapshot))

    def codes_map():
        mapping = {}
        for raw_id in snapshot.node_ids:
            article_id = int(raw_id)
            mapped, _ = hierarchy.treenodes_of(store.articles[article_id].descriptors)
            if mapped:
                mapping[article_id] = tuple(sorted(mapped))
        return mapping

    codes = stage("article_codes", codes_map)
    seeds_pr = stage("aggregate influence", lambda: graphmetrics.aggregate_to_nodes(pr, codes))
    seeds_dis = stage("aggregate disruption", lambda: graphmetrics.aggregate_to_nodes(dis, codes))
    stage("propagate influence", lambda: propagation.propagate(hierarchy, seeds_pr))
    stage("propagate disruption", lambda: propagation.propagate(hierarchy, seeds_dis))
    print(f"total {time.perf_counter() - overall:.1f}s, peak rss {rss_gb():.2f} GB")
    return 0


if __name__ == "__main__":
    sys.exit(main())

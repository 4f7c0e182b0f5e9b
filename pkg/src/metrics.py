"""
Search metrics exposed through a private Prometheus registry
"""

from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile

REGISTRY = CollectorRegistry()

SEARCH_NODES = Counter(
    "extremal_search_nodes",
    "Branch-and-bound nodes expanded",
    ["search"],
    registry=REGISTRY,
)

SEARCH_SECONDS = Histogram(
    "extremal_search_seconds",
    "Wall time of completed searches",
    ["search"],
    buckets=(0.001, 0.01, 0.1, 1.0, 10.0, 60.0, float("inf")),
    registry=REGISTRY,
)

SEARCH_UNPROVEN = Counter(
    "extremal_search_unproven",
    "Searches stopped by a node or time limit",
    ["search"],
    registry=REGISTRY,
)


def write_metrics(path: str) -> None:
    write_to_textfile(path, REGISTRY)

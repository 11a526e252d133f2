"""Cohort statistics: Mann-Whitney tests, evolution/retraction cohorts,
and aspect correlation matrices.

Descriptor-level scores are the sum of the descriptor's tree-node scores,
giving one observation per descriptor for the cohort tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .corpus import ArticleStore
from .hierarchy import Hierarchy
from .months import year_of

CHANGE_TYPES = ("description", "extension", "move", "removal")
EXACT_LIMIT = 10  # per-group size cap for the enumeration path


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class ChangeRecord:
    release: str
    descriptor_id: str
    change_type: str

    def __post_init__(self) -> None:
        if self.change_type not in CHANGE_TYPES:
            raise EvaluationError(f"unknown change type {self.change_type!r}")


@dataclass
class TestResult:
    u_statistic: float
    p_value: float
    n1: int
    n2: int
    method: str  # "exact" | "normal-approx"


def parse_changes(lines: Iterable[str]) -> list[ChangeRecord]:
    """Parse the `release \\t descriptor_id \\t change_type` TSV."""
    records: list[ChangeRecord] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise EvaluationError(
                f"line {lineno}: expected release, descriptor, change_type"
            )
        try:
            records.append(ChangeRecord(parts[0], parts[1], parts[2]))
        except EvaluationError as exc:
            raise EvaluationError(f"line {lineno}: {exc}") from None
    return records


def _midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mid = (i + j) / 2 + 1
        for idx in order[i : j + 1]:
            ranks[idx] = mid
        i = j + 1
    return ranks


def _exact_two_sided_p(n1: int, n2: int, u_observed: float) -> float:
    # No ties: enumerate every assignment of pooled ranks to group one.
    offset = n1 * (n1 + 1) / 2
    count = 0
    total = 0
    for positions in combinations(range(1, n1 + n2 + 1), n1):
        total += 1
        if sum(positions) - offset <= u_observed:
            count += 1
    return min(1.0, 2.0 * count / total)


def mann_whitney(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """Two-sided Mann-Whitney test with U = min(U1, U2).

    Exact p by full enumeration when both groups have at most 10
    observations and the pooled sample is tie-free; otherwise a normal
    approximation with tie correction and 0.5 continuity correction.
    """
    if not len(a) or not len(b):
        raise EvaluationError("both samples must be non-empty")
    n1, n2 = len(a), len(b)
    pooled = list(a) + list(b)
    ranks = _midranks(pooled)
    r1 = sum(ranks[:n1])
    u1 = n1 * n2 + n1 * (n1 + 1) / 2 - r1
    u2 = n1 * n2 - u1
    u = min(u1, u2)

    tie_free = len(set(pooled)) == len(pooled)
    if max(n1, n2) <= EXACT_LIMIT and tie_free:
        return TestResult(u, _exact_two_sided_p(n1, n2, u), n1, n2, "exact")

    n = n1 + n2
    tie_term = 0.0
    seen: dict[float, int] = {}
    for value in pooled:
        seen[value] = seen.get(value, 0) + 1
    for t in seen.values():
        tie_term += t**3 - t
    variance = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if variance <= 0:
        return TestResult(u, 1.0, n1, n2, "normal-approx")
    z = (u - n1 * n2 / 2.0 + 0.5) / math.sqrt(variance)
    p = min(1.0, 2.0 * 0.5 * math.erfc(-z / math.sqrt(2.0)))
    return TestResult(u, p, n1, n2, "normal-approx")


def descriptor_scores(
    node_values: Mapping[str, float], h: Hierarchy
) -> dict[str, float]:
    """Sum each descriptor's tree-node scores; descriptors with no scored
    node are omitted."""
    result: dict[str, float] = {}
    for descriptor, codes in h.descriptor_map.items():
        scored = [node_values[c] for c in sorted(codes) if c in node_values]
        if scored:
            result[descriptor] = sum(scored)
    return result


def evolution_cohorts(
    node_values: Mapping[str, float],
    changes: Iterable[ChangeRecord],
    h: Hierarchy,
) -> tuple[list[float], list[float]]:
    """Partition descriptor scores into (evolving, stable) by change records.

    An empty evolving list signals that the release had no evolving
    descriptors and the statistical test should be skipped.
    """
    changed = {record.descriptor_id for record in changes}
    scores = descriptor_scores(node_values, h)
    evolving = [scores[d] for d in sorted(scores) if d in changed]
    stable = [scores[d] for d in sorted(scores) if d not in changed]
    return evolving, stable


def retraction_cohorts(
    store: ArticleStore,
    monthly_values: Mapping[str, Mapping[str, float]],
    monthly_members: Mapping[str, Iterable[int]],
    h: Hierarchy,
    year: int,
) -> tuple[list[float], list[float]]:
    """Yearly per-article score means, split into (retracted, other).

    For every month of `year`, each article present in that month's
    sampled network scores the sum of its tree nodes' values (0 when it
    has no annotations); the per-article values are averaged over the
    months in which the article appears.
    """
    months = sorted(m for m in monthly_values if year_of(m) == year)
    sums: dict[int, float] = {}
    counts: dict[int, int] = {}
    code_cache: dict[int, tuple[str, ...]] = {}
    for month in months:
        values = monthly_values[month]
        for article_id in sorted(monthly_members.get(month, ())):
            article_id = int(article_id)
            codes = code_cache.get(article_id)
            if codes is None:
                article = store.articles[article_id]
                mapped, _ = h.treenodes_of(article.descriptors)
                codes = tuple(sorted(mapped))
                code_cache[article_id] = codes
            score = sum(values.get(c, 0.0) for c in codes)
            sums[article_id] = sums.get(article_id, 0.0) + score
            counts[article_id] = counts.get(article_id, 0) + 1

    retracted: list[float] = []
    other: list[float] = []
    for article_id in sorted(sums):
        mean = sums[article_id] / counts[article_id]
        if store.articles[article_id].retracted:
            retracted.append(mean)
        else:
            other.append(mean)
    return retracted, other


def aspect_correlation(
    series: Mapping[str, Mapping[Hashable, float]], method: str = "pearson"
) -> tuple[list[str], np.ndarray]:
    """Correlation matrix across named series aligned on shared keys.

    Keys are typically (descriptor, month) pairs; only observations
    present in every series are used.  Returns (names, matrix).
    """
    if method not in ("pearson", "spearman"):
        raise EvaluationError(f"unknown correlation method {method!r}")
    names = list(series)
    if not names:
        raise EvaluationError("no series given")
    shared = set(series[names[0]])
    for name in names[1:]:
        shared &= set(series[name])
    keys = sorted(shared)
    if len(keys) < 3:
        raise EvaluationError(f"need >= 3 aligned observations, got {len(keys)}")

    data = np.array([[series[name][k] for k in keys] for name in names], dtype=float)
    if method == "spearman":
        data = np.vstack([rankdata(row, method="average") for row in data])
    matrix = np.corrcoef(data)
    np.fill_diagonal(matrix, 1.0)
    return names, matrix

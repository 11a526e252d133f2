"""Information-theoretic relevance: per-level entropy terms and category utility.

Both metrics work on article-to-node mappings propagated up the tree: an
article that maps to a node also marks every ancestor of that node.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .hierarchy import Hierarchy, level_of

INFORMATIVENESS_MODES = ("entropy-term", "surprisal")


@dataclass
class MappingCounts:
    """Counts of article mappings per node, direct and subtree-propagated."""

    direct: dict[str, int]
    propagated: dict[str, int]
    level_totals: dict[int, int]


@dataclass
class MappingMatrix:
    """Binary node x article incidence, rows already propagated to ancestors."""

    rows: dict[str, frozenset[int]]
    n_nodes: int
    m_articles: int


def mapping_counts(
    h: Hierarchy, pairs: Iterable[tuple[int, str]]
) -> MappingCounts:
    """Tally direct mappings and propagate them bottom-up.

    `pairs` is (article id, tree code); an article mapping to k distinct
    nodes contributes k direct counts.  Duplicated pairs count once.
    """
    direct = dict.fromkeys(h.nodes, 0)
    for article_id, code in set(pairs):
        if code not in direct:
            raise KeyError(f"unknown tree code {code}")
        direct[code] += 1

    propagated = dict(direct)
    levels = h.levels()
    for level in sorted(levels, reverse=True):
        for code in levels[level]:
            for child in h.children_of(code):
                propagated[code] += propagated[child]

    level_totals = {
        level: sum(propagated[code] for code in codes)
        for level, codes in levels.items()
    }
    return MappingCounts(direct=direct, propagated=propagated, level_totals=level_totals)


def informativeness(counts: MappingCounts, mode: str = "entropy-term") -> dict[str, float]:
    """Score each node by its share p of its level's propagated mappings.

    entropy-term: -p * log2(p), the node's summand in the level's Shannon
    entropy (0 when p is 0).  surprisal: -log2(p), unscored when p is 0.
    Nodes on levels with no mappings are left unscored.
    """
    if mode not in INFORMATIVENESS_MODES:
        raise ValueError(f"unknown informativeness mode {mode!r}")
    values: dict[str, float] = {}
    for code in sorted(counts.propagated):
        total = counts.level_totals.get(level_of(code), 0)
        if total <= 0:
            continue
        p = counts.propagated[code] / total
        if mode == "entropy-term":
            values[code] = -p * math.log2(p) if p > 0 else 0.0
        elif p > 0:
            values[code] = -math.log2(p)
    return values


def build_mapping_matrix(
    h: Hierarchy, pairs: Iterable[tuple[int, str]]
) -> MappingMatrix:
    """Incidence matrix over all hierarchy nodes with ancestor propagation."""
    rows: dict[str, set[int]] = {code: set() for code in h.nodes}
    articles: set[int] = set()
    for article_id, code in pairs:
        if code not in rows:
            raise KeyError(f"unknown tree code {code}")
        rows[code].add(article_id)
        articles.add(article_id)

    levels = h.levels()
    for level in sorted(levels, reverse=True):
        for code in levels[level]:
            for child in h.children_of(code):
                rows[code] |= rows[child]

    return MappingMatrix(
        rows={code: frozenset(row) for code, row in rows.items()},
        n_nodes=len(h.nodes),
        m_articles=len(articles),
    )


def usefulness(matrix: MappingMatrix) -> dict[str, float]:
    """Category utility of each node over the binary incidence matrix.

    With row mass share p(c), per-article column mean p(k), and the binary
    cell as the conditional feature probability, the score reduces to
    p(c) * (|row(c)| - sum_k p(k)^2) over columns that are non-empty.
    """
    if not matrix.rows:
        return {}
    total_mass = sum(len(row) for row in matrix.rows.values())
    if total_mass == 0 or matrix.m_articles == 0:
        return {code: 0.0 for code in matrix.rows}

    column_counts = Counter()
    for row in matrix.rows.values():
        column_counts.update(row)
    # Columns with zero incidence never appear in column_counts, so the
    # constant term already skips them.  Summation in ascending column
    # order keeps results bit-identical run to run.
    sum_pk_sq = sum(
        (column_counts[k] / matrix.n_nodes) ** 2 for k in sorted(column_counts)
    )

    values: dict[str, float] = {}
    for code in sorted(matrix.rows):
        row = matrix.rows[code]
        p_c = len(row) / total_mass
        values[code] = p_c * (len(row) - sum_pk_sq)
    return values

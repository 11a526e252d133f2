"""Deterministic synthetic corpus/graph/hierarchy generator.

Produces desk-scale datasets with the shape the pipeline expects: a
category forest, Zipf-distributed descriptor usage, citations that only
point to earlier months (preferential attachment on in-degree), planted
"evolving" descriptors with a usage boost, and retracted articles whose
annotations are biased toward the most popular descriptors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .corpus import Article, ArticleStore, store_from_articles
from .evaluate import CHANGE_TYPES, ChangeRecord
from .hierarchy import Hierarchy, build_hierarchy
from .months import month_from_index, month_index, year_of

_CATEGORY_LETTERS = "ABCDEFGHIJKLMNOP"  # at most 16 level-1 categories


class InfeasibleConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    seed: int = 42
    months: int = 24
    articles_per_month: int = 5000
    first_month: str = "2014-01"
    # level-1 category count, then children per node for each deeper level
    hierarchy_branching: tuple[int, ...] = (16, 9, 5, 3)
    polyhierarchy_fraction: float = 0.10
    descriptors_per_article_mean: float = 4.0
    zipf_exponent: float = 0.5
    pa_exponent: float = 1.0
    refs_mean: float = 5.0
    refs_min: int = 0
    evolving_fraction: float = 0.01
    evolving_boost: float = 2.5
    retraction_rate: float = 0.005
    retraction_bias_fraction: float = 0.10
    retraction_bias_boost: float = 10.0

    def __post_init__(self) -> None:
        if self.months < 1 or self.articles_per_month < 1:
            raise InfeasibleConfigError("need at least one month and one article")
        if not self.hierarchy_branching or any(b < 1 for b in self.hierarchy_branching):
            raise InfeasibleConfigError("branching factors must be >= 1")
        if self.hierarchy_branching[0] > len(_CATEGORY_LETTERS):
            raise InfeasibleConfigError("at most 16 level-1 categories")
        if len(self.hierarchy_branching) > 1 and self.hierarchy_branching[1] > 99:
            raise InfeasibleConfigError("level-2 fan-out limited to 99 by the code grammar")
        if any(b > 999 for b in self.hierarchy_branching[2:]):
            raise InfeasibleConfigError("fan-out below level 2 limited to 999")
        for rate in (
            self.polyhierarchy_fraction,
            self.evolving_fraction,
            self.retraction_rate,
            self.retraction_bias_fraction,
        ):
            if not 0.0 <= rate <= 1.0:
                raise InfeasibleConfigError(f"rate {rate} outside [0, 1]")
        if self.refs_mean < 0 or self.refs_min < 0:
            raise InfeasibleConfigError("reference counts cannot be negative")
        if self.refs_min > 0 and self.months == 1:
            raise InfeasibleConfigError(
                "refs_min > 0 is infeasible: first-month articles have no citable pool"
            )


def _tree_codes(branching: tuple[int, ...]) -> list[str]:
    codes = list(_CATEGORY_LETTERS[: branching[0]])
    frontier = list(codes)
    for depth, fan in enumerate(branching[1:], start=2):
        next_frontier: list[str] = []
        for parent in frontier:
            for i in range(1, fan + 1):
                code = f"{parent}{i:02d}" if depth == 2 else f"{parent}.{i:03d}"
                next_frontier.append(code)
        codes.extend(next_frontier)
        frontier = next_frontier
    return codes


def _month_labels(cfg: ScenarioConfig) -> list[str]:
    start = month_index(cfg.first_month)
    return [month_from_index(start + i) for i in range(cfg.months)]


def _weighted_draws(rng, cdf: np.ndarray, count: int) -> np.ndarray:
    r = rng.random(count) * cdf[-1]
    return np.searchsorted(cdf, r, side="right")


def generate(
    cfg: ScenarioConfig,
) -> tuple[Hierarchy, ArticleStore, tuple[np.ndarray, np.ndarray], list[ChangeRecord]]:
    """Build (hierarchy, store, (citing, cited), change records) from `cfg`.

    Fully deterministic for a given config; article ids are assigned in
    publication order so citations always point at smaller ids.
    """
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    codes = _tree_codes(cfg.hierarchy_branching)
    n_desc = len(codes)
    descriptor_ids = [f"D{i + 1:06d}" for i in range(n_desc)]

    descriptor_map: dict[str, set[str]] = {}
    poly = rng.random(n_desc) < cfg.polyhierarchy_fraction
    extra = rng.integers(0, n_desc, size=n_desc)
    for i, descriptor in enumerate(descriptor_ids):
        mapped = {codes[i]}
        if poly[i] and int(extra[i]) != i:
            mapped.add(codes[int(extra[i])])
        descriptor_map[descriptor] = mapped
    labels = {code: f"node {code}" for code in codes}
    hierarchy = build_hierarchy(labels, descriptor_map)

    # Zipf popularity on a shuffled rank assignment, then planted boosts.
    rank_of = rng.permutation(n_desc)
    base_weights = 1.0 / (rank_of + 1.0) ** cfg.zipf_exponent
    n_evolving = int(round(cfg.evolving_fraction * n_desc))
    evolving_idx = np.sort(rng.choice(n_desc, size=n_evolving, replace=False))
    weights = base_weights.copy()
    weights[evolving_idx] *= cfg.evolving_boost

    n_risky = int(round(cfg.retraction_bias_fraction * n_desc))
    risky_idx = np.argsort(-base_weights, kind="stable")[:n_risky]
    biased_weights = weights.copy()
    biased_weights[risky_idx] *= cfg.retraction_bias_boost

    cdf = np.cumsum(weights)
    biased_cdf = np.cumsum(biased_weights)

    months = _month_labels(cfg)
    total = cfg.months * cfg.articles_per_month
    retracted = rng.random(total) < cfg.retraction_rate
    desc_counts = rng.poisson(cfg.descriptors_per_article_mean, total)

    normal_draws = _weighted_draws(rng, cdf, int(desc_counts[~retracted].sum()))
    biased_draws = _weighted_draws(rng, biased_cdf, int(desc_counts[retracted].sum()))

    articles: list[Article] = []
    it_normal = iter(_chunks(normal_draws, desc_counts[~retracted]))
    it_biased = iter(_chunks(biased_draws, desc_counts[retracted]))
    for i in range(total):
        chunk = next(it_biased) if retracted[i] else next(it_normal)
        descriptors = tuple(sorted({descriptor_ids[int(d)] for d in chunk}))
        articles.append(
            Article(
                id=i + 1,
                month=months[i // cfg.articles_per_month],
                descriptors=descriptors,
                retracted=bool(retracted[i]),
            )
        )
    store = store_from_articles(articles)

    citing_parts: list[np.ndarray] = []
    cited_parts: list[np.ndarray] = []
    indegree = np.zeros(total, dtype=np.float64)
    for mi in range(cfg.months):
        pool = mi * cfg.articles_per_month
        if pool == 0:
            if cfg.refs_min > 0:
                raise InfeasibleConfigError("more references required than prior articles")
            continue
        if cfg.refs_min > pool:
            raise InfeasibleConfigError("more references required than prior articles")
        refs = rng.poisson(cfg.refs_mean, cfg.articles_per_month)
        refs = np.clip(refs, cfg.refs_min, pool)
        total_refs = int(refs.sum())
        if total_refs == 0:
            continue
        pa_cdf = np.cumsum((indegree[:pool] + 1.0) ** cfg.pa_exponent)
        targets = _weighted_draws(rng, pa_cdf, total_refs)
        sources = np.repeat(
            np.arange(pool + 1, pool + cfg.articles_per_month + 1, dtype=np.int64), refs
        )
        citing_parts.append(sources)
        cited_parts.append(targets.astype(np.int64) + 1)
        np.add.at(indegree, targets, 1.0)

    if citing_parts:
        stacked = np.stack(
            [np.concatenate(citing_parts), np.concatenate(cited_parts)], axis=1
        )
        unique = np.unique(stacked, axis=0)
        edges = (unique[:, 0].copy(), unique[:, 1].copy())
    else:
        edges = (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))

    release = f"{year_of(cfg.first_month)}AA"
    changes = [
        ChangeRecord(release, descriptor_ids[int(idx)], CHANGE_TYPES[i % len(CHANGE_TYPES)])
        for i, idx in enumerate(evolving_idx)
    ]
    return hierarchy, store, edges, changes


def _chunks(draws: np.ndarray, counts: np.ndarray) -> Iterator[np.ndarray]:
    offset = 0
    for count in counts:
        yield draws[offset : offset + int(count)]
        offset += int(count)


def write_changes(changes: list[ChangeRecord], out) -> None:
    for record in changes:
        out.write(f"{record.release}\t{record.descriptor_id}\t{record.change_type}\n")

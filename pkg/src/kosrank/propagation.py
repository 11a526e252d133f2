"""Bottom-up propagation of node seed scores through the hierarchy.

Levels are global depths over the whole category forest, processed deepest
first.  A seeded leaf keeps its seed; an internal node receives the sum of
its children's values divided by the total number of nodes on the
children's level (not just its own child count), plus its own seed if any.
Unseeded leaves contribute zero and stay absent from the output.
"""
from __future__ import annotations

from typing import Mapping

from .hierarchy import Hierarchy, parent_of

HierarchyScores = dict[str, float]


def propagate(h: Hierarchy, seeds: Mapping[str, float]) -> HierarchyScores:
    """Spread `seeds` (tree code -> value) up the tree; see module docstring.

    Raises KeyError for seed codes outside the hierarchy.
    """
    for code in seeds:
        if code not in h.nodes:
            raise KeyError(f"unknown seed code {code}")

    levels = h.levels()
    gmh: dict[str, float] = {}
    for level in sorted(levels, reverse=True):
        level_size = len(levels[level])
        parents = {parent_of(code) for code in levels[level]}
        # None stands in for the virtual super-root above the category
        # letters; it pools level 1 so seeded root leaves are still visited.
        for parent in sorted(parents, key=lambda p: (p is None, p)):
            children = h.children_of(parent) if parent is not None else levels[1]
            pooled = 0.0
            for child in children:
                if child in seeds and not h.children_of(child):
                    gmh[child] = seeds[child]
                pooled += gmh.get(child, 0.0)
            pooled /= level_size
            if parent is not None:
                gmh[parent] = pooled + seeds.get(parent, 0.0)
    return gmh

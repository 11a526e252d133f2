"""Directed citation graph with cumulative monthly snapshots and seeded sampling.

Edges point citing -> cited.  Adjacency is stored in CSR-style numpy arrays
in both orientations, which keeps million-node graphs cheap to hold and
lets snapshotting and sampling run as vectorized masks.  Graphs are
immutable once built; snapshot and sample return new graphs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .corpus import ArticleStore
from .months import normalize_month


class GraphError(ValueError):
    """Malformed edge input or unknown node."""


def _csr_from_edges(
    node_ids: np.ndarray, src: np.ndarray, dst: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """indptr over node positions plus dst values sorted within each row."""
    n = len(node_ids)
    src_pos = np.searchsorted(node_ids, src)
    order = np.lexsort((dst, src_pos))
    counts = np.bincount(src_pos, minlength=n)
    indptr = np.concatenate(([0], np.cumsum(counts)))
    return indptr.astype(np.int64), dst[order]


@dataclass
class CitationGraph:
    node_ids: np.ndarray  # sorted int64 article ids
    out_indptr: np.ndarray
    out_targets: np.ndarray  # cited ids, sorted within each citing row
    in_indptr: np.ndarray
    in_sources: np.ndarray  # citing ids, sorted within each cited row
    month: str | None = None
    sample_seed: int | None = None
    self_loops_dropped: int = 0
    unknown_dropped: int = 0
    duplicates_dropped: int = 0

    @property
    def num_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def num_edges(self) -> int:
        return len(self.out_targets)

    def __contains__(self, article_id: int) -> bool:
        i = int(np.searchsorted(self.node_ids, article_id))
        return i < len(self.node_ids) and int(self.node_ids[i]) == article_id

    def _position(self, article_id: int) -> int:
        i = int(np.searchsorted(self.node_ids, article_id))
        if i >= len(self.node_ids) or int(self.node_ids[i]) != article_id:
            raise GraphError(f"unknown article id {article_id}")
        return i

    def successors_of(self, article_id: int) -> np.ndarray:
        """Articles cited by `article_id` (its references), sorted."""
        i = self._position(article_id)
        return self.out_targets[self.out_indptr[i] : self.out_indptr[i + 1]]

    def predecessors_of(self, article_id: int) -> np.ndarray:
        """Articles citing `article_id`, sorted."""
        i = self._position(article_id)
        return self.in_sources[self.in_indptr[i] : self.in_indptr[i + 1]]

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    def in_degrees(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(citing, cited) arrays in citing-major order."""
        citing = np.repeat(self.node_ids, self.out_degrees())
        return citing, self.out_targets.copy()


def _assemble(
    node_ids: np.ndarray,
    citing: np.ndarray,
    cited: np.ndarray,
    **meta,
) -> CitationGraph:
    out_indptr, out_targets = _csr_from_edges(node_ids, citing, cited)
    in_indptr, in_sources = _csr_from_edges(node_ids, cited, citing)
    return CitationGraph(
        node_ids=node_ids,
        out_indptr=out_indptr,
        out_targets=out_targets,
        in_indptr=in_indptr,
        in_sources=in_sources,
        **meta,
    )


def build_graph(
    edges: Iterable[tuple[int, int]] | tuple[np.ndarray, np.ndarray],
    store: ArticleStore,
) -> CitationGraph:
    """Graph over all store ids from a (citing, cited) edge stream.

    Self-citations, edges touching ids outside the store, and duplicate
    edges are dropped; each category is counted on the returned graph.
    """
    if isinstance(edges, tuple) and len(edges) == 2 and isinstance(edges[0], np.ndarray):
        citing = np.asarray(edges[0], dtype=np.int64)
        cited = np.asarray(edges[1], dtype=np.int64)
    else:
        pairs = np.array(list(edges), dtype=np.int64).reshape(-1, 2)
        citing, cited = pairs[:, 0], pairs[:, 1]

    node_ids = store.ids.copy()
    self_loops = citing == cited
    known = np.isin(citing, node_ids) & np.isin(cited, node_ids)
    keep = known & ~self_loops
    citing, cited = citing[keep], cited[keep]

    stacked = np.stack([citing, cited], axis=1)
    unique = np.unique(stacked, axis=0) if len(stacked) else stacked
    return _assemble(
        node_ids,
        unique[:, 0] if len(unique) else citing,
        unique[:, 1] if len(unique) else cited,
        self_loops_dropped=int(self_loops.sum()),
        unknown_dropped=int((~known & ~self_loops).sum()),
        duplicates_dropped=int(len(stacked) - len(unique)),
    )


def _induced(g: CitationGraph, keep_ids: np.ndarray, **meta) -> CitationGraph:
    """Subgraph on `keep_ids` (sorted, unique) with edges inside it."""
    citing, cited = g.edge_arrays()
    mask = np.isin(citing, keep_ids, assume_unique=False) & np.isin(
        cited, keep_ids, assume_unique=False
    )
    return _assemble(keep_ids, citing[mask], cited[mask], **meta)


def cumulative_snapshot(g: CitationGraph, store: ArticleStore, month: str) -> CitationGraph:
    """Induced subgraph over articles published in `month` or earlier."""
    month = normalize_month(month)
    eligible = store.ids_up_to(month)
    keep = g.node_ids[np.isin(g.node_ids, eligible)]
    return _induced(g, keep, month=month, sample_seed=g.sample_seed)


def sample_nodes(g: CitationGraph, fraction: float, seed: int) -> CitationGraph:
    """Keep floor(fraction * n) uniformly chosen nodes and their induced edges.

    Selection is fixed for reproducibility across platforms: sort node ids,
    shuffle with PCG64(seed), take the prefix.  fraction 1.0 is the
    identity apart from recording the seed.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    if fraction == 1.0:
        citing, cited = g.edge_arrays()
        return _assemble(
            g.node_ids.copy(), citing, cited, month=g.month, sample_seed=seed
        )
    k = int(np.floor(fraction * g.num_nodes))
    rng = np.random.Generator(np.random.PCG64(seed))
    perm = rng.permutation(g.num_nodes)
    keep = np.sort(g.node_ids[perm[:k]])
    return _induced(g, keep, month=g.month, sample_seed=seed)


def parse_citations(lines: Iterable[str]) -> tuple[np.ndarray, np.ndarray]:
    """Parse the `citing \\t cited` TSV into edge arrays."""
    citing: list[int] = []
    cited: list[int] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'citing\\tcited', got {line!r}")
        try:
            citing.append(int(parts[0]))
            cited.append(int(parts[1]))
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer article id") from None
    return np.asarray(citing, dtype=np.int64), np.asarray(cited, dtype=np.int64)


def write_citations(citing: np.ndarray, cited: np.ndarray, out) -> None:
    for u, v in zip(citing.tolist(), cited.tolist()):
        out.write(f"{u}\t{v}\n")

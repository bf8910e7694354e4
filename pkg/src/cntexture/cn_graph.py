"""Map an image band to an undirected pixel graph.

Pixels are nodes (flat index i = y*N + x). Two pixels are connected when they
are within the search radius and their distance/intensity weight does not
exceed the similarity threshold. Adjacency is kept as CSR-style sorted
neighbor lists; construction enumerates each unordered pair once (offsets in
the upper half of the search window) and mirrors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyImage

NO_EDGE = math.inf  # sentinel: pair is not a candidate (d = 0 or d > r)


@dataclass(frozen=True)
class CnParams:
    """Search radius (pixels) and similarity threshold."""

    radius: float = 3.0
    threshold: float = 0.315

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"radius must be > 0, got {self.radius}")
        if not 0 < self.threshold <= 1:
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")


@dataclass(frozen=True)
class PixelGraph:
    """Symmetric simple graph over the pixels of one band."""

    node_count: int
    indptr: np.ndarray   # (node_count + 1,) offsets into indices
    indices: np.ndarray  # neighbor lists, sorted within each node

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    @property
    def edge_count(self) -> int:
        return self.indices.size // 2

    def edge_set(self) -> set[tuple[int, int]]:
        """All edges as (i, j) pairs with i < j."""
        nodes = np.repeat(np.arange(self.node_count), self.degrees)
        keep = nodes < self.indices
        return set(zip(nodes[keep].tolist(), self.indices[keep].tolist()))


def pixel_distance(i: int, j: int, n: int) -> float:
    """Euclidean distance between pixels i and j on a row width of n."""
    yi, xi = divmod(i, n)
    yj, xj = divmod(j, n)
    return math.hypot(xi - xj, yi - yj)


def edge_weight(d: float, delta_intensity: float, r: float) -> float:
    """Distance/intensity weight of a candidate pixel pair.

    Returns NO_EDGE (infinity) when the pair is not a candidate, i.e. the
    pixels coincide or lie beyond the search radius; infinity never passes
    the threshold test.
    """
    if d <= 0 or d > r:
        return NO_EDGE
    return (d * d + r * r * delta_intensity / 255.0) / (2.0 * r * r)


def _upper_offsets(r: float) -> list[tuple[int, int]]:
    """Offsets (dy, dx) covering each unordered pixel pair exactly once."""
    span = int(math.floor(r))
    out = []
    for dy in range(span + 1):
        for dx in range(1 if dy == 0 else -span, span + 1):
            if 0 < dy * dy + dx * dx <= r * r:
                out.append((dy, dx))
    return out


def build_graph(band: np.ndarray, params: CnParams) -> PixelGraph:
    """Build the pixel graph of one 8-bit band.

    An edge (i, j) exists iff 0 < d(i,j) <= r and weight(i,j) <= t. The scan
    visits only the upper-triangular half of the search window around each
    pixel, then mirrors, so each pair is evaluated once.
    """
    band = np.asarray(band)
    if band.ndim != 2:
        raise ValueError(f"expected a 2-d band, got shape {band.shape}")
    m, n = band.shape
    count = m * n
    if count < 2:
        raise EmptyImage(f"band {m}x{n} has fewer than 2 pixels")

    r = params.radius
    t = params.threshold
    two_r2 = 2.0 * r * r
    intensity = band.astype(np.float64)
    flat = np.arange(count, dtype=np.int64).reshape(m, n)

    heads: list[np.ndarray] = []
    tails: list[np.ndarray] = []
    for dy, dx in _upper_offsets(r):
        d2 = float(dy * dy + dx * dx)
        y_hi = m - dy
        x_lo = max(0, -dx)
        x_hi = n - max(0, dx)
        if y_hi <= 0 or x_hi <= x_lo:
            continue
        a = intensity[0:y_hi, x_lo:x_hi]
        b = intensity[dy:m, x_lo + dx:x_hi + dx]
        w = (d2 + r * r * np.abs(a - b) / 255.0) / two_r2
        ys, xs = np.nonzero(w <= t)
        if ys.size == 0:
            continue
        heads.append(flat[ys, xs + x_lo])
        tails.append(flat[ys + dy, xs + x_lo + dx])

    if heads:
        us = np.concatenate(heads)
        vs = np.concatenate(tails)
        nodes = np.concatenate([us, vs])
        nbrs = np.concatenate([vs, us])
        order = np.lexsort((nbrs, nodes))
        nodes = nodes[order]
        nbrs = nbrs[order]
    else:
        nodes = np.empty(0, dtype=np.int64)
        nbrs = np.empty(0, dtype=np.int64)

    indptr = np.zeros(count + 1, dtype=np.int64)
    np.cumsum(np.bincount(nodes, minlength=count), out=indptr[1:])
    return PixelGraph(node_count=count, indptr=indptr, indices=nbrs)


def graph_from_edges(node_count: int, edges) -> PixelGraph:
    """Build a PixelGraph from unordered (i, j) pairs; mainly for tests."""
    pairs = sorted({(min(i, j), max(i, j)) for i, j in edges if i != j})
    if pairs:
        arr = np.asarray(pairs, dtype=np.int64)
        nodes = np.concatenate([arr[:, 0], arr[:, 1]])
        nbrs = np.concatenate([arr[:, 1], arr[:, 0]])
        order = np.lexsort((nbrs, nodes))
        nodes = nodes[order]
        nbrs = nbrs[order]
    else:
        nodes = np.empty(0, dtype=np.int64)
        nbrs = np.empty(0, dtype=np.int64)
    indptr = np.zeros(node_count + 1, dtype=np.int64)
    np.cumsum(np.bincount(nodes, minlength=node_count), out=indptr[1:])
    return PixelGraph(node_count=node_count, indptr=indptr, indices=nbrs)

"""Per-pixel graph measures and quantized feature images.

Three measures are computed from a PixelGraph: the clustering coefficient,
a squared normalized degree, and an entropy-weighted eigenvector centrality.
Each yields one scalar map over the band, quantized to 8 bits for encoding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .cn_graph import CnParams, PixelGraph, build_graph
from .errors import ConvergenceFailure, SingleNodeGraph
from .imaging import quantize_map

POWER_STEP_TOL = 1e-10
POWER_RESIDUAL_TOL = 1e-6
POWER_MAX_ITER = 1000
STALL_CHECK_EVERY = 100  # iterations between stall checks


@dataclass(frozen=True)
class CentralityMaps:
    """Raw (unquantized) per-pixel measure maps of one band."""

    cc: np.ndarray
    dc: np.ndarray
    ec: np.ndarray


def _adjacency(g: PixelGraph) -> sp.csr_matrix:
    data = np.ones(g.indices.size, dtype=np.float64)
    return sp.csr_matrix((data, g.indices, g.indptr), shape=(g.node_count, g.node_count))


def clustering_coefficients(g: PixelGraph) -> np.ndarray:
    """Clustering coefficient of every node; 0 where degree < 2.

    Edges among the neighbors of i are triangles through i, counted with the
    sparse identity sum_k A_ik (A^2)_ik = 2 * c_i.
    """
    k = g.degrees.astype(np.float64)
    if g.indices.size == 0:
        return np.zeros(g.node_count)
    a = _adjacency(g)
    c = np.asarray(a.multiply(a @ a).sum(axis=1)).ravel() / 2.0
    denom = k * (k - 1.0)
    out = np.zeros(g.node_count)
    mask = k >= 2
    out[mask] = 2.0 * c[mask] / denom[mask]
    return out


def clustering_coefficient(g: PixelGraph, i: int) -> float:
    return float(clustering_coefficients(g)[i])


def degree_centralities(g: PixelGraph) -> np.ndarray:
    """Squared degree / (node_count - 1) for every node."""
    if g.node_count < 2:
        raise SingleNodeGraph("degree centrality needs at least 2 nodes")
    k = g.degrees.astype(np.float64)
    return (k / (g.node_count - 1)) ** 2


def degree_centrality(g: PixelGraph, i: int) -> float:
    return float(degree_centralities(g)[i])


def perron_vector(g: PixelGraph) -> np.ndarray:
    """L1-normalized Perron eigenvector of the adjacency matrix.

    Power iteration from a uniform positive start, iterating with A + I so
    that bipartite components cannot oscillate (the shift leaves the
    eigenvector unchanged). An edgeless graph returns the zero vector.

    Pixel-lattice graphs can pack eigenvalues so tightly that plain power
    iteration would need far more than the iteration budget; a stalled
    iteration is completed with a deterministic Lanczos solve seeded from the
    current iterate, which converges to the same eigenvector.
    """
    if g.node_count < 1:
        raise ValueError("empty graph")
    if g.indices.size == 0:
        return np.zeros(g.node_count)
    a = _adjacency(g)
    u = np.full(g.node_count, 1.0 / g.node_count)
    change = np.inf
    change_at_last_check = np.inf
    for it in range(1, POWER_MAX_ITER + 1):
        nxt = a @ u + u
        nxt /= nxt.sum()
        change = np.max(np.abs(nxt - u))
        u = nxt
        if change < POWER_STEP_TOL:
            return u
        if it % STALL_CHECK_EVERY == 0:
            # decay slower than 0.5 per block means thousands more iterations
            if change > 0.5 * change_at_last_check:
                return _lanczos_perron(a, u)
            change_at_last_check = change
    if change > POWER_RESIDUAL_TOL:
        return _lanczos_perron(a, u)
    return u


def _lanczos_perron(a: sp.csr_matrix, start: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    try:
        _, vec = spla.eigsh(a, k=1, which="LA", v0=start)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceFailure(f"Lanczos refinement did not converge on {n} nodes") from exc
    u = vec[:, 0]
    if u.sum() < 0:
        u = -u
    u = np.clip(u, 0.0, None)
    total = u.sum()
    if total <= 0:
        raise ConvergenceFailure("Lanczos refinement returned a sign-indefinite vector")
    return u / total


def eigenvector_centrality(g: PixelGraph) -> np.ndarray:
    """Entropy contribution -u_i * log2(u_i) of the Perron vector, 0 at u_i = 0."""
    u = perron_vector(g)
    out = np.zeros(g.node_count)
    pos = u > 0
    out[pos] = -u[pos] * np.log2(u[pos])
    return out


def centrality_maps(g: PixelGraph, shape: tuple[int, int]) -> CentralityMaps:
    """All three measures reshaped to the band's (M, N)."""
    return CentralityMaps(
        cc=clustering_coefficients(g).reshape(shape),
        dc=degree_centralities(g).reshape(shape),
        ec=eigenvector_centrality(g).reshape(shape),
    )


def feature_images(band: np.ndarray, params: CnParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quantized (CC, DC, EC) feature bands of one 8-bit band."""
    band = np.asarray(band)
    g = build_graph(band, params)
    maps = centrality_maps(g, band.shape)
    return quantize_map(maps.cc), quantize_map(maps.dc), quantize_map(maps.ec)

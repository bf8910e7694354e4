"""Complex-network texture descriptors, LBP encoding, fusion, and classification."""

from .cn_graph import CnParams, PixelGraph, build_graph, edge_weight, pixel_distance
from .cn_measures import (
    CentralityMaps,
    clustering_coefficient,
    degree_centrality,
    eigenvector_centrality,
    feature_images,
)
from .fusion import fuse, read_fvec, write_fvec
from .imaging import ImageTensor, load_image, quantize_map, resize_bilinear
from .lbp_encode import GlobalFeatureVector, global_vector, lbp_code, ulbp_histogram, uniformity

__all__ = [
    "CnParams",
    "PixelGraph",
    "build_graph",
    "edge_weight",
    "pixel_distance",
    "CentralityMaps",
    "clustering_coefficient",
    "degree_centrality",
    "eigenvector_centrality",
    "feature_images",
    "fuse",
    "read_fvec",
    "write_fvec",
    "ImageTensor",
    "load_image",
    "quantize_map",
    "resize_bilinear",
    "GlobalFeatureVector",
    "global_vector",
    "lbp_code",
    "ulbp_histogram",
    "uniformity",
]

__version__ = "0.1.0"

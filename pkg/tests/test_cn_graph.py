import math

import numpy as np
import pytest

from cntexture.cn_graph import CnParams, build_graph, edge_weight, pixel_distance
from cntexture.errors import EmptyImage


def brute_force_edges(band, params):
    """All-pairs oracle: evaluate the weight of every unordered pixel pair."""
    m, n = band.shape
    count = m * n
    edges = set()
    for i in range(count):
        for j in range(i + 1, count):
            d = pixel_distance(i, j, n)
            delta = abs(int(band[i // n, i % n]) - int(band[j // n, j % n]))
            if edge_weight(d, delta, params.radius) <= params.threshold:
                edges.add((i, j))
    return edges


class TestDistanceAndWeight:
    def test_three_four_five(self):
        # pixels at (0,0) and (3,4) on a wide row
        assert pixel_distance(0, 4 * 10 + 3, 10) == 5.0

    def test_self_distance(self):
        assert pixel_distance(17, 17, 9) == 0.0

    def test_unit_diagonal(self):
        assert pixel_distance(0, 5 + 1, 5) == pytest.approx(math.sqrt(2), abs=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            i, j = rng.integers(0, 36, size=2)
            assert pixel_distance(int(i), int(j), 6) == pixel_distance(int(j), int(i), 6)

    def test_weight_examples(self):
        assert edge_weight(3.0, 0, 3.0) == pytest.approx(0.5, abs=1e-15)
        assert edge_weight(3.0, 255, 3.0) == pytest.approx(1.0, abs=1e-15)
        assert edge_weight(1.0, 0, 3.0) == pytest.approx(1.0 / 18.0, abs=1e-15)

    def test_weight_sentinel_outside_radius_or_self(self):
        assert edge_weight(3.5, 0, 3.0) == math.inf
        assert edge_weight(0.0, 0, 3.0) == math.inf


class TestBuildGraph:
    def test_constant_3x3_degrees(self):
        band = np.full((3, 3), 50, dtype=np.uint8)
        g = build_graph(band, CnParams())
        degrees = g.degrees
        assert degrees[4] == 8  # center
        for corner in (0, 2, 6, 8):
            assert degrees[corner] == 7  # opposite corner at d=2*sqrt(2) is too dissimilar

    def test_two_pixels_max_contrast_no_edge(self):
        band = np.array([[0, 255]], dtype=np.uint8)
        g = build_graph(band, CnParams())
        assert g.edge_count == 0

    def test_two_equal_pixels_one_edge(self):
        band = np.array([[0, 0]], dtype=np.uint8)
        g = build_graph(band, CnParams())
        assert g.edge_count == 1
        assert g.degrees.tolist() == [1, 1]

    def test_empty_image(self):
        with pytest.raises(EmptyImage):
            build_graph(np.zeros((1, 1), dtype=np.uint8), CnParams())

    def test_matches_brute_force_on_random_bands(self):
        rng = np.random.default_rng(11)
        params = CnParams()
        for _ in range(25):
            m, n = rng.integers(2, 9, size=2)
            band = rng.integers(0, 256, size=(m, n)).astype(np.uint8)
            g = build_graph(band, params)
            assert g.edge_set() == brute_force_edges(band, params)

    def test_matches_brute_force_other_params(self):
        rng = np.random.default_rng(12)
        for radius, threshold in ((1.0, 0.5), (2.0, 0.25), (4.5, 0.315), (3.0, 1.0)):
            params = CnParams(radius=radius, threshold=threshold)
            band = rng.integers(0, 256, size=(6, 6)).astype(np.uint8)
            g = build_graph(band, params)
            assert g.edge_set() == brute_force_edges(band, params)

    def test_degree_row_equals_column(self):
        rng = np.random.default_rng(13)
        band = rng.integers(0, 256, size=(7, 7)).astype(np.uint8)
        g = build_graph(band, CnParams())
        edges = g.edge_set()
        row = np.zeros(g.node_count, dtype=int)
        col = np.zeros(g.node_count, dtype=int)
        for i, j in edges:
            row[i] += 1
            row[j] += 1
            col[j] += 1
            col[i] += 1
        assert np.array_equal(row, g.degrees)
        assert np.array_equal(col, g.degrees)

    def test_max_degree_within_lattice_bound(self):
        rng = np.random.default_rng(14)
        for _ in range(5):
            band = rng.integers(0, 256, size=(10, 10)).astype(np.uint8)
            g = build_graph(band, CnParams())
            assert g.degrees.max() <= 28

    def test_invariant_under_constant_shift(self):
        rng = np.random.default_rng(15)
        band = rng.integers(0, 200, size=(6, 6)).astype(np.uint8)
        g0 = build_graph(band, CnParams())
        g1 = build_graph(band + 55, CnParams())
        assert g0.edge_set() == g1.edge_set()

    def test_deterministic(self):
        rng = np.random.default_rng(16)
        band = rng.integers(0, 256, size=(8, 8)).astype(np.uint8)
        g0 = build_graph(band, CnParams())
        g1 = build_graph(band.copy(), CnParams())
        assert np.array_equal(g0.indptr, g1.indptr)
        assert np.array_equal(g0.indices, g1.indices)

    def test_neighbor_lists_sorted_and_symmetric(self):
        rng = np.random.default_rng(17)
        band = rng.integers(0, 256, size=(6, 8)).astype(np.uint8)
        g = build_graph(band, CnParams())
        for i in range(g.node_count):
            nbrs = g.neighbors(i)
            assert np.all(np.diff(nbrs) > 0)  # sorted, no self, no duplicates
            assert i not in nbrs
            for j in nbrs:
                assert i in g.neighbors(int(j))

    def test_params_validation(self):
        with pytest.raises(ValueError):
            CnParams(radius=0.0)
        with pytest.raises(ValueError):
            CnParams(threshold=0.0)
        with pytest.raises(ValueError):
            CnParams(threshold=1.5)

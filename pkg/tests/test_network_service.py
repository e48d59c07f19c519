"""
Unit tests for graph construction and graph file formats
"""
import unittest
import tempfile
from pathlib import Path

import numpy as np

from services.network_service import NetworkService
from utils.exceptions import ArgumentError, FormatError


class TestNetworkService(unittest.TestCase):
    """Test graph construction, influence and CSV round trips"""

    def setUp(self):
        self.service = NetworkService()
        self.temp_dir = tempfile.TemporaryDirectory()
        self.dir = Path(self.temp_dir.name)

    def tearDown(self):
        self.temp_dir.cleanup()

    def _write(self, name, text):
        path = self.dir / name
        path.write_text(text, encoding="utf-8")
        return path

    def test_star_graph_influence(self):
        """Center of a 4-leaf star receives 1/4 per active leaf"""
        g = self.service.from_edge_list([(0, 1), (0, 2), (0, 3), (0, 4)])
        self.assertEqual(g.neighbors(0), [1, 2, 3, 4])
        self.assertAlmostEqual(g.influence_weight(1, 0), 0.25)
        mask = np.zeros(5, dtype=bool)
        mask[[1, 2]] = True
        influence = self.service.influence_vector(g, mask)
        self.assertAlmostEqual(influence[0], 0.5)
        self.assertEqual(influence[3], 0.0)

    def test_isolated_node_has_zero_influence(self):
        """A node without in-neighbors has influence 0"""
        g = self.service.from_edge_list([(0, 1)], node_count=3)
        self.assertEqual(g.neighbors(2), [])
        influence = self.service.influence_vector(g, np.array([True, True, True]))
        self.assertEqual(influence[2], 0.0)

    def test_undirected_symmetry_and_dedup(self):
        """Undirected edges are stored both ways and duplicates collapse"""
        g = self.service.from_edge_list([(0, 1), (1, 0), (0, 1), (1, 2)])
        self.assertEqual(g.edge_count, 2)
        for v in range(g.node_count):
            for u in g.neighbors(v):
                self.assertIn(v, g.neighbors(u))
        self.assertEqual(self.service.to_edge_list(g), [(0, 1), (1, 2)])

    def test_directed_uses_in_neighbors(self):
        """Directed graphs list in-neighbors only"""
        g = self.service.from_edge_list([(0, 1), (2, 1)], directed=True)
        self.assertEqual(g.neighbors(1), [0, 2])
        self.assertEqual(g.neighbors(0), [])
        self.assertEqual(self.service.to_edge_list(g), [(0, 1), (2, 1)])

    def test_self_loops_dropped(self):
        """Self-loops never enter the adjacency"""
        g = self.service.from_edge_list([(0, 0), (0, 1)])
        self.assertEqual(g.neighbors(0), [1])

    def test_invalid_inputs(self):
        """Bad ids, feature shapes and mask sizes are rejected"""
        with self.assertRaises(ArgumentError):
            self.service.from_edge_list([(-1, 0)])
        with self.assertRaises(FormatError):
            self.service.from_edge_list([(0, 1)], features=np.zeros((3, 2)))
        g = self.service.from_edge_list([(0, 1)])
        with self.assertRaises(ArgumentError):
            g.neighbors(5)
        with self.assertRaises(ArgumentError):
            self.service.influence_vector(g, np.zeros(3, dtype=bool))

    def test_with_features(self):
        """Attaching features keeps the adjacency"""
        g = self.service.from_edge_list([(0, 1), (1, 2)])
        featured = self.service.with_features(g, np.arange(6.0).reshape(3, 2))
        self.assertEqual(featured.feature_count, 2)
        self.assertEqual(featured.adjacency, g.adjacency)
        with self.assertRaises(FormatError):
            self.service.with_features(g, np.zeros((2, 2)))

    def test_load_graph_with_attributes(self):
        """The attribute file defines the node universe and its order"""
        edges = self._write("edges.csv", "src,dst\na,b\nb,c\n")
        attributes = self._write("attributes.csv", "node,f0,f1\na,0.5,1\nb,1.5,2\nc,2.5,3\nd,0,0\n")
        g, index = self.service.load_graph(edges, attributes)
        self.assertEqual(index, {"a": 0, "b": 1, "c": 2, "d": 3})
        self.assertEqual(g.node_count, 4)
        self.assertEqual(g.neighbors(1), [0, 2])
        self.assertEqual(g.neighbors(3), [])
        np.testing.assert_allclose(g.features[1], [1.5, 2.0])

    def test_load_graph_without_attributes_sorts_numerically(self):
        """Integer labels sort numerically when no attribute file is given"""
        edges = self._write("edges.csv", "src,dst\n10,2\n2,1\n")
        g, index = self.service.load_graph(edges)
        self.assertEqual(index, {"1": 0, "2": 1, "10": 2})
        self.assertEqual(g.feature_count, 0)

    def test_load_graph_errors_carry_line_numbers(self):
        """Unknown nodes, bad headers and bad attributes report their line"""
        attributes = self._write("attributes.csv", "node,f0\na,1\nb,2\n")
        cases = {
            "unknown node": ("src,dst\na,b\na,z\n", 3),
            "bad header": ("from,to\na,b\n", 1),
        }
        for name, (text, line) in cases.items():
            with self.subTest(case=name):
                edges = self._write("edges.csv", text)
                with self.assertRaises(FormatError) as ctx:
                    self.service.load_graph(edges, attributes)
                self.assertEqual(ctx.exception.line, line)

        bad_attributes = self._write("bad.csv", "node,f0\na,1\nb,oops\n")
        edges = self._write("edges.csv", "src,dst\na,b\n")
        with self.assertRaises(FormatError) as ctx:
            self.service.load_graph(edges, bad_attributes)
        self.assertEqual(ctx.exception.line, 3)

    def test_write_then_load_preserves_graph(self):
        """write_graph output reloads to the same graph"""
        rng = np.random.default_rng(3)
        g = self.service.from_edge_list([(0, 1), (1, 2), (2, 3), (0, 3)], features=rng.standard_normal((4, 3)))
        edges, attributes = self.dir / "e.csv", self.dir / "a.csv"
        self.service.write_graph(g, edges, attributes)
        loaded, _ = self.service.load_graph(edges, attributes)
        self.assertEqual(loaded.adjacency, g.adjacency)
        np.testing.assert_array_equal(loaded.features, g.features)

    def test_non_ascii_digit_labels_sort_as_text(self):
        """Superscript and malformed numeric labels sort lexically after integers"""
        edges = self._write("edges.csv", "src,dst\n10,2\n²,1\n--5,b\n")
        _, index = self.service.load_graph(edges)
        self.assertEqual(index, {"1": 0, "2": 1, "10": 2, "--5": 3, "b": 4, "²": 5})

    def test_active_mask(self):
        """Active sets become boolean masks; ids outside the graph are rejected"""
        g = self.service.from_edge_list([(0, 1), (1, 2)])
        self.assertEqual(g.active_mask({0, 2}).tolist(), [True, False, True])
        self.assertEqual(g.active_mask(frozenset()).tolist(), [False, False, False])
        for bad in ({-1}, {0, 3}):
            with self.subTest(active=bad):
                with self.assertRaises(ArgumentError):
                    g.active_mask(bad)


if __name__ == '__main__':
    unittest.main()

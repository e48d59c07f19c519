"""
Unit tests for the Linear Threshold Model engine
"""
import unittest

import numpy as np

from services.diffusion_service import DiffusionService
from services.network_service import NetworkService
from models.diffusion import DiffusionTrace, EPSILON
from utils.exceptions import ArgumentError

# Molly, James, Angelo, Josh, Michelle
TOY_EDGES = [(0, 1), (1, 2), (2, 3), (2, 4), (3, 4)]
TOY_THRESHOLDS = np.array([0.5, 0.5, 1.0 / 3.0, 1.0, 2.0 / 3.0])
INVARIANT_TRIALS = 1000


class TestDiffusionService(unittest.TestCase):
    """Test synchronous threshold updates"""

    def setUp(self):
        self.service = DiffusionService()
        self.network_service = NetworkService()
        self.toy = self.network_service.from_edge_list(TOY_EDGES)

    def _random_instance(self, rng, n=30, p=0.15):
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        g = self.network_service.from_edge_list(pairs, node_count=n)
        thresholds = rng.uniform(EPSILON, 1.0, size=n)
        seeds = rng.choice(n, size=int(rng.integers(1, 6)), replace=False).tolist()
        return g, thresholds, seeds

    def test_toy_network_stops_after_one_activation(self):
        """Seeds {0, 1} activate node 2 and then reach a fixed point"""
        trace = self.service.simulate(self.toy, TOY_THRESHOLDS, {0, 1}, 4)
        self.assertEqual(trace.active_sets[1], frozenset({0, 1, 2}))
        self.assertEqual(trace.final, frozenset({0, 1, 2}))
        self.assertEqual(trace.time_of(2), 1)
        self.assertIsNone(trace.time_of(3))

    def test_toy_network_influences(self):
        """Influence is the active share of in-neighbors"""
        self.assertAlmostEqual(self.service.activation_influence(self.toy, 2, {0, 1}), 1.0 / 3.0)
        self.assertAlmostEqual(self.service.activation_influence(self.toy, 3, {0, 1, 2}), 0.5)
        self.assertAlmostEqual(self.service.activation_influence(self.toy, 4, {0, 1, 2}), 0.5)

    def test_path_graph(self):
        """Threshold 0.5 on a path activates one node per step"""
        g = self.network_service.from_edge_list([(0, 1), (1, 2)])
        trace = self.service.simulate(g, np.full(3, 0.5), {0}, 2)
        self.assertEqual(trace.active_sets, [frozenset({0}), frozenset({0, 1}), frozenset({0, 1, 2})])

    def test_threshold_one_needs_every_neighbor(self):
        """theta = 1 activates only once all neighbors are active"""
        g = self.network_service.from_edge_list([(0, 2), (1, 2)])
        theta = np.array([1.0, 1.0, 1.0])
        self.assertEqual(self.service.step(g, theta, {0}), frozenset({0}))
        self.assertEqual(self.service.step(g, theta, {0, 1}), frozenset({0, 1, 2}))

    def test_isolated_node_never_activates(self):
        """Zero influence never reaches a positive threshold"""
        g = self.network_service.from_edge_list([(0, 1)], node_count=3)
        trace = self.service.simulate(g, np.full(3, EPSILON), {0}, 3)
        self.assertNotIn(2, trace.final)

    def test_empty_seed_set_stays_empty(self):
        """Nothing activates without seeds"""
        trace = self.service.simulate(self.toy, TOY_THRESHOLDS, set(), 3)
        self.assertTrue(all(len(s) == 0 for s in trace.active_sets))

    def test_horizon_zero_and_invalid_arguments(self):
        """Horizon 0 is allowed; negative horizons, short thresholds and foreign seeds are not"""
        trace = self.service.simulate(self.toy, TOY_THRESHOLDS, {0}, 0)
        self.assertEqual(trace.horizon, 0)
        with self.assertRaises(ArgumentError):
            self.service.simulate(self.toy, TOY_THRESHOLDS, {0}, -1)
        with self.assertRaises(ArgumentError):
            self.service.simulate(self.toy, TOY_THRESHOLDS[:3], {0}, 2)
        for seeds in ({9}, {-1}):
            with self.assertRaises(ArgumentError):
                self.service.simulate(self.toy, TOY_THRESHOLDS, seeds, 2)
        with self.assertRaises(ArgumentError):
            self.service.step(self.toy, TOY_THRESHOLDS, {0, -2})

    def test_snapshot_and_window(self):
        """Snapshots truncate the trace and windows re-index it from 0"""
        g = self.network_service.from_edge_list([(0, 1), (1, 2)])
        trace = self.service.simulate(g, np.full(3, 0.5), {0}, 2)
        self.assertEqual(trace.snapshot(1).active, frozenset({0, 1}))
        window = trace.window(1)
        self.assertEqual(window.horizon, 1)
        self.assertEqual(window.seeds, frozenset({0, 1}))
        with self.assertRaises(ArgumentError):
            trace.window(3)

    def test_randomized_invariants(self):
        """Monotone activation, fixed-point absorption and threshold monotonicity"""
        rng = np.random.default_rng(2024)
        for trial in range(INVARIANT_TRIALS):
            g, thresholds, seeds = self._random_instance(rng)
            trace = self.service.simulate(g, thresholds, seeds, 6)
            with self.subTest(trial=trial):
                for t in range(1, trace.horizon + 1):
                    self.assertTrue(trace.active_sets[t - 1] <= trace.active_sets[t])
                    if trace.active_sets[t] == trace.active_sets[t - 1]:
                        self.assertTrue(all(s == trace.active_sets[t] for s in trace.active_sets[t:]))
                    self.assertEqual(self.service.step(g, thresholds, trace.active_sets[t - 1]),
                                     trace.active_sets[t])

                lowered = self.service.simulate(g, thresholds * rng.uniform(0.5, 1.0, size=g.node_count), seeds, 6)
                for t in range(trace.horizon + 1):
                    self.assertTrue(trace.active_sets[t] <= lowered.active_sets[t])

    def test_trace_rejects_shrinking_sets(self):
        """Active sets may never shrink"""
        with self.assertRaises(ValueError):
            DiffusionTrace.from_active_sets([frozenset({0, 1}), frozenset({0})])


if __name__ == '__main__':
    unittest.main()

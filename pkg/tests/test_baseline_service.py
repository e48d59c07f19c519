"""
Unit tests for the baseline threshold estimators
"""
import unittest

import numpy as np

from services.baseline_service import BaselineService, FALLBACK_EXPECTED
from services.dataset_service import DatasetService
from services.network_service import NetworkService
from models.diffusion import DiffusionTrace, TrainingTable
from utils.exceptions import EstimatorUnavailableError


def _table(influence, y):
    n = len(influence)
    return TrainingTable(
        node=np.arange(n), step=np.ones(n, dtype=np.int64), x=np.zeros((n, 1)),
        influence=np.asarray(influence, dtype=float), z=np.zeros(n, dtype=np.int8),
        y=np.asarray(y, dtype=np.int8),
    )


class TestBaselineService(unittest.TestCase):
    """Test Random, Heuristic Expected, Heuristic Individual and Linear Regression"""

    def setUp(self):
        self.service = BaselineService()
        self.network_service = NetworkService()

    def test_random_is_uniform_and_seeded(self):
        """Random draws are U(0, 1) and reproducible per seed"""
        nodes = list(range(50000))
        estimate = self.service.estimate_random(nodes, rng_seed=5)
        self.assertTrue(np.all((estimate.values >= 0) & (estimate.values <= 1)))
        self.assertLess(abs(estimate.values.mean() - 0.5), 0.01)
        again = self.service.estimate_random(nodes[:10], rng_seed=5)
        np.testing.assert_array_equal(again.values, estimate.values[:10])

    def test_heuristic_expected(self):
        """Every node gets the mean influence at activation"""
        table = _table([0.2, 0.4, 0.9, 0.1], [1, 1, 0, 0])
        estimate = self.service.estimate_heuristic_expected(table, [3, 4, 5])
        np.testing.assert_allclose(estimate.values, [0.3, 0.3, 0.3])
        self.assertEqual(estimate.spread(), 0.0)

    def test_heuristic_expected_without_activations(self):
        """Without activations every node gets 0.5"""
        estimate = self.service.estimate_heuristic_expected(_table([0.2, 0.4], [0, 0]), [0, 1])
        np.testing.assert_allclose(estimate.values, FALLBACK_EXPECTED)

    def test_heuristic_individual_stays_in_range(self):
        """Per-node draws stay within the activation-influence range"""
        table = _table([0.2, 0.4, 0.9], [1, 1, 0])
        estimate = self.service.estimate_heuristic_individual(table, list(range(500)), rng_seed=1)
        self.assertTrue(np.all((estimate.values >= 0.2) & (estimate.values <= 0.4)))
        self.assertGreater(estimate.spread(), 0.0)

    def test_linear_regression_labels_on_path_graph(self):
        """Labels are the influence each node received just before activating"""
        g = self.network_service.from_edge_list([(0, 1), (1, 2)], features=np.array([[0.0], [1.0], [2.0]]))
        trace = DiffusionTrace.from_active_sets([frozenset({0}), frozenset({0, 1}), frozenset({0, 1, 2})])
        nodes, labels = self.service.linear_regression_labels(g, trace, 2)
        self.assertEqual(nodes.tolist(), [1, 2])
        np.testing.assert_allclose(labels, [0.5, 1.0])

        estimate = self.service.estimate_linear_regression(g, trace, 2, [0, 1, 2])
        np.testing.assert_allclose(estimate.values, [0.0, 0.5, 1.0], atol=1e-6)

    def test_linear_regression_clips_predictions(self):
        """Extrapolated regression thresholds are clipped to 1"""
        g = self.network_service.from_edge_list([(0, 1), (1, 2)],
                                                features=np.array([[0.0], [1.0], [2.0], [10.0]]))
        trace = DiffusionTrace.from_active_sets([frozenset({0}), frozenset({0, 1}), frozenset({0, 1, 2})])
        estimate = self.service.estimate_linear_regression(g, trace, 2, [3])
        self.assertEqual(estimate.values[0], 1.0)

    def test_linear_regression_without_labels(self):
        """No activated node means no regression estimate"""
        g = self.network_service.from_edge_list([(0, 1)], features=np.zeros((2, 1)))
        trace = DiffusionTrace.from_active_sets([frozenset({0}), frozenset({0})])
        with self.assertRaises(EstimatorUnavailableError):
            self.service.estimate_linear_regression(g, trace, 1, [1])

    def test_training_table_feeds_heuristics(self):
        """Heuristics read activation influence from the per-step table"""
        g = self.network_service.from_edge_list([(0, 1), (1, 2)], features=np.zeros((3, 1)))
        trace = DiffusionTrace.from_active_sets([frozenset({0}), frozenset({0, 1}), frozenset({0, 1, 2})])
        table = DatasetService().build_training_table(g, trace, 2)
        estimate = self.service.estimate_heuristic_expected(table, [0])
        self.assertAlmostEqual(estimate.values[0], 0.75)


if __name__ == '__main__':
    unittest.main()

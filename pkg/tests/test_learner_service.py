"""
Unit tests for the OLS and CART base learners
"""
import unittest

import numpy as np

from services.learner_service import LearnerService, split_candidates
from models.estimators import LinearModel
from utils.exceptions import ArgumentError


class TestLearnerService(unittest.TestCase):
    """Test least squares and regression trees"""

    def setUp(self):
        self.service = LearnerService()
        self.rng = np.random.default_rng(42)

    def test_ols_recovers_noiseless_coefficients(self):
        """Noiseless linear data gives back its coefficients"""
        X = self.rng.standard_normal((200, 4))
        y = X @ np.array([1.5, -2.0, 0.0, 0.25]) + 3.0
        model = self.service.fit_ols(X, y)
        np.testing.assert_allclose(model.coefficients, [1.5, -2.0, 0.0, 0.25], atol=1e-6)
        self.assertAlmostEqual(model.intercept, 3.0, places=6)

    def test_ols_line_through_two_points(self):
        """Two points define the fitted line"""
        model = self.service.fit_ols(np.array([[0.0], [1.0]]), np.array([1.0, 3.0]))
        self.assertAlmostEqual(model.coefficients[0], 2.0, places=6)
        self.assertAlmostEqual(model.intercept, 1.0, places=6)

    def test_ols_constant_target(self):
        """A constant target gives zero coefficients and the mean as intercept"""
        X = self.rng.standard_normal((50, 3))
        model = self.service.fit_ols(X, np.full(50, 0.7))
        np.testing.assert_allclose(model.coefficients, 0.0, atol=1e-9)
        self.assertAlmostEqual(model.intercept, 0.7)

    def test_ols_residuals_are_orthogonal(self):
        """Residuals sum to zero"""
        X = self.rng.standard_normal((100, 3))
        y = self.rng.standard_normal(100)
        model = self.service.fit_ols(X, y)
        residual = y - self.service.predict_many(model, X)
        scale = np.linalg.norm(X) * np.linalg.norm(y)
        self.assertLess(abs(residual.sum()), 1e-6 * max(scale, 1.0))
        np.testing.assert_allclose(X.T @ residual / scale, 0.0, atol=1e-6)

    def test_cart_separable_step(self):
        """A separable step is fitted exactly at the midpoint"""
        X = np.arange(20, dtype=float).reshape(-1, 1)
        y = (X[:, 0] >= 10).astype(float)
        tree = self.service.fit_cart(X, y, min_leaf=1)
        predictions = self.service.predict_many(tree, X)
        self.assertEqual(float(((predictions - y) ** 2).sum()), 0.0)
        self.assertEqual(tree.root.split_value, 9.5)

    def test_cart_constant_target_is_a_leaf(self):
        """A constant target is a single leaf"""
        X = self.rng.standard_normal((30, 2))
        tree = self.service.fit_cart(X, np.ones(30))
        self.assertTrue(tree.root.is_leaf)
        self.assertEqual(self.service.predict(tree, X[0]), 1.0)

    def test_cart_respects_limits(self):
        """Depth and leaf-size limits hold"""
        X = self.rng.standard_normal((300, 3))
        y = self.rng.standard_normal(300)
        tree = self.service.fit_cart(X, y, min_leaf=20, max_depth=3)
        self.assertLessEqual(tree.depth(), 3)
        self.assertTrue(all(leaf.n_samples >= 20 for leaf in tree.leaves()))

    def test_predict_many_matches_predict(self):
        """Batch prediction equals row-wise prediction"""
        X = self.rng.standard_normal((80, 2))
        y = np.sin(X[:, 0]) + (X[:, 1] > 0)
        tree = self.service.fit_cart(X, y, min_leaf=3)
        batch = self.service.predict_many(tree, X)
        rowwise = [self.service.predict(tree, x) for x in X]
        np.testing.assert_array_equal(batch, rowwise)

    def test_errors(self):
        """Empty input, shape mismatches and bad limits are rejected"""
        with self.assertRaises(ArgumentError):
            self.service.fit_ols(np.zeros((0, 2)), np.zeros(0))
        with self.assertRaises(ArgumentError):
            self.service.fit_ols(np.zeros((3, 2)), np.zeros(4))
        with self.assertRaises(ArgumentError):
            self.service.fit_cart(np.zeros((3, 1)), np.zeros(3), min_leaf=5)
        model = LinearModel(coefficients=[1.0, 2.0], intercept=0.0)
        with self.assertRaises(ArgumentError):
            self.service.predict(model, np.zeros(3))

    def test_split_candidates(self):
        """Candidates are midpoints, thinned in order above the cap"""
        np.testing.assert_allclose(split_candidates(np.array([3.0, 1.0, 2.0, 2.0])), [1.5, 2.5])
        self.assertEqual(split_candidates(np.ones(5)).size, 0)
        capped = split_candidates(np.arange(1000, dtype=float), max_candidates=10)
        self.assertEqual(capped.size, 10)
        self.assertTrue(np.all(np.diff(capped) > 0))


if __name__ == '__main__':
    unittest.main()

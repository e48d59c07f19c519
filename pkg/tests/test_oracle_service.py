"""
Unit tests for potential-outcome enumeration and trigger recovery checks
"""
import unittest

from services.oracle_service import OracleService
from models.diffusion import EPSILON
from models.oracle import VerificationStatus
from utils.exceptions import ArgumentError, UndefinedCandidateError

EQUAL_FOUR = [0.25, 0.25, 0.25, 0.25]


class TestOracleService(unittest.TestCase):
    """Test exhaustive enumeration against hand-derived effects"""

    def setUp(self):
        self.service = OracleService()

    def test_two_neighbor_enumeration(self):
        """Two equal neighbors give four assignments"""
        assignments = self.service.enumerate_assignments([0.5, 0.5], 0.5)
        self.assertEqual(sorted(assignments.as_pairs()), [(0.0, 0), (0.5, 1), (0.5, 1), (1.0, 1)])

    def test_unreachable_and_minimal_thresholds(self):
        """Unreachable thresholds never activate; minimal ones activate on any neighbor"""
        unreachable = self.service.enumerate_assignments(EQUAL_FOUR, 1.5)
        self.assertEqual(int(unreachable.outcomes.sum()), 0)
        minimal = self.service.enumerate_assignments(EQUAL_FOUR, EPSILON)
        self.assertEqual(minimal.outcomes.tolist(), [0] + [1] * 15)

    def test_enumeration_arguments(self):
        """Empty, oversized, unnormalized and non-positive weights are rejected"""
        cases = {
            "empty": [],
            "too many": [1.0 / 21] * 21,
            "not normalized": [0.5, 0.6],
            "non-positive": [1.0, 0.0],
        }
        for name, weights in cases.items():
            with self.subTest(case=name):
                with self.assertRaises(ArgumentError):
                    self.service.enumerate_assignments(weights, 0.5)

    def test_potential_outcome_counts(self):
        """Above/below and activated/not-activated counts cover every assignment"""
        assignments = self.service.enumerate_assignments(EQUAL_FOUR, 0.5)
        sets = self.service.potential_outcome_sets(assignments, 0.25)
        self.assertEqual(sets.n_above + sets.n_below, 16)
        self.assertEqual(sets.activated + sets.not_activated, 16)
        self.assertEqual((sets.n_above, sets.activated), (15, 11))

    def test_bruteforce_cape_cases(self):
        """Exhaustive effects match the hand-computed binomial values"""
        assignments = self.service.enumerate_assignments(EQUAL_FOUR, 0.5)
        self.assertEqual(self.service.bruteforce_cape(assignments, 0.5), 1.0)
        self.assertAlmostEqual(self.service.bruteforce_cape(assignments, 0.25), 11 / 15, delta=1e-12)
        self.assertAlmostEqual(self.service.bruteforce_cape(assignments, 0.75), 5 / 11, delta=1e-12)
        with self.assertRaises(UndefinedCandidateError):
            self.service.bruteforce_cape(assignments, 0.0)
        with self.assertRaises(UndefinedCandidateError):
            self.service.bruteforce_cape(assignments, 1.5)

    def test_candidates_off_the_interval_stay_below_one(self):
        """Only candidates splitting like the threshold reach effect 1"""
        weights = [0.1, 0.2, 0.3, 0.4]
        assignments = self.service.enumerate_assignments(weights, 0.45)
        for candidate in (0.15, 0.35, 0.55, 0.75):
            with self.subTest(candidate=candidate):
                self.assertLess(self.service.bruteforce_cape(assignments, candidate), 1.0)
        self.assertEqual(self.service.bruteforce_cape(assignments, 0.45), 1.0)

    def test_verify_binomial(self):
        """The true threshold is the unique maximizer"""
        check = self.service.verify_theorem1(EQUAL_FOUR, 0.5, [0.25, 0.5, 0.75])
        self.assertEqual(check.status, VerificationStatus.PASS)
        self.assertEqual(check.argmax, (0.5,))
        self.assertEqual(check.max_effect, 1.0)

    def test_verify_inconclusive(self):
        """Unreachable thresholds and missing candidates are inconclusive"""
        unreachable = self.service.verify_theorem1(EQUAL_FOUR, 1.5, [0.25, 0.5])
        self.assertEqual(unreachable.status, VerificationStatus.INCONCLUSIVE)
        missing = self.service.verify_theorem1(EQUAL_FOUR, 0.5, [0.25, 0.75])
        self.assertEqual(missing.status, VerificationStatus.INCONCLUSIVE)

    def test_verify_accepts_every_equivalent_candidate(self):
        """Every candidate inducing the true split is accepted"""
        check = self.service.verify_theorem1(EQUAL_FOUR, 0.4, [0.3, 0.4, 0.5, 0.6])
        self.assertEqual(check.status, VerificationStatus.PASS)
        self.assertEqual(check.argmax, (0.3, 0.4, 0.5))

    def test_random_batch_has_no_failures(self):
        """Random configurations never fail"""
        summary = self.service.verify_batch(trials=200, max_neighbors=8, seed=0)
        self.assertEqual(summary.trials, 200)
        self.assertEqual(summary.failed, 0, summary.failures)
        self.assertEqual(summary.passed + summary.inconclusive, 200)
        self.assertGreater(summary.conclusive, 0)

    def test_batch_is_deterministic(self):
        """The same seed gives the same summary"""
        first = self.service.verify_batch(trials=30, max_neighbors=6, seed=5)
        second = self.service.verify_batch(trials=30, max_neighbors=6, seed=5)
        self.assertEqual(first, second)

    def test_batch_arguments(self):
        """Neighbor counts outside 1..20 are rejected"""
        with self.assertRaises(ArgumentError):
            self.service.verify_batch(trials=10, max_neighbors=0, seed=0)
        with self.assertRaises(ArgumentError):
            self.service.verify_batch(trials=10, max_neighbors=21, seed=0)


if __name__ == '__main__':
    unittest.main()

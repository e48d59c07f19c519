"""
Exhaustive potential-outcome enumeration for small neighborhoods
"""
from typing import Sequence

import numpy as np

from services.base_service import BaseService
from services.causal_tree_service import TIE_TOLERANCE, UNIFORM_GRID
from models.diffusion import EPSILON
from models.oracle import (
    PotentialOutcomes, PotentialOutcomeSets, TheoremCheck, VerificationStatus, VerificationSummary
)
from utils.exceptions import UndefinedCandidateError

MAX_NEIGHBORS = 20
WEIGHT_SUM_TOLERANCE = 1e-9


class OracleService(BaseService):
    """Brute-force effects over all 2^n neighbor-activation assignments"""

    def enumerate_assignments(self, weights: Sequence[float], true_theta: float) -> PotentialOutcomes:
        """
        Influence and outcome of every subset of active neighbors

        Args:
            weights: Positive influence weights summing to 1
            true_theta: Threshold deciding the outcome W = [I >= true_theta]

        Returns:
            PotentialOutcomes; assignment i activates neighbor j iff bit j of i is set
        """
        weights = np.asarray(weights, dtype=float).ravel()
        n = weights.size
        self.require(1 <= n <= MAX_NEIGHBORS, f"neighbor count must lie in [1, {MAX_NEIGHBORS}], got {n}")
        self.require(bool(np.all(weights > 0)), "weights must be positive")
        self.require(abs(weights.sum() - 1.0) <= WEIGHT_SUM_TOLERANCE, f"weights must sum to 1, got {weights.sum()}")

        subsets = np.arange(2 ** n, dtype=np.int64)
        influences = np.zeros(subsets.size)
        for j, w in enumerate(weights):
            influences += ((subsets >> j) & 1) * w
        outcomes = (influences >= true_theta).astype(np.int8)
        return PotentialOutcomes(weights=weights, true_theta=float(true_theta),
                                 influences=influences, outcomes=outcomes)

    def potential_outcome_sets(self, assignments: PotentialOutcomes, candidate: float) -> PotentialOutcomeSets:
        above = assignments.influences >= candidate
        activated = int(assignments.outcomes.sum())
        return PotentialOutcomeSets(
            trigger=float(candidate),
            above=assignments.outcomes[above],
            below=assignments.outcomes[~above],
            activated=activated,
            not_activated=len(assignments) - activated,
        )

    def bruteforce_cape(self, assignments: PotentialOutcomes, candidate: float) -> float:
        """mean(W | I >= r) - mean(W | I < r) over all assignments"""
        sets = self.potential_outcome_sets(assignments, candidate)
        if sets.n_above == 0 or sets.n_below == 0:
            raise UndefinedCandidateError(f"candidate {candidate} leaves one side empty")
        return float(sets.above.mean() - sets.below.mean())

    def verify_theorem1(self, weights: Sequence[float], true_theta: float,
                        candidates: Sequence[float]) -> TheoremCheck:
        """
        Check that every effect-maximizing candidate splits the assignments
        exactly like the true threshold and that the maximum effect is 1.

        Inconclusive when no candidate lies in (largest influence below theta, theta]
        or when theta exceeds every achievable influence.
        """
        assignments = self.enumerate_assignments(weights, true_theta)
        candidates = np.unique(np.asarray(candidates, dtype=float))
        influences = assignments.influences

        if true_theta > influences.max():
            return TheoremCheck(status=VerificationStatus.INCONCLUSIVE, reason="threshold is unreachable")
        below_theta = influences[influences < true_theta]
        lower = below_theta.max() if below_theta.size else -np.inf
        if not np.any((candidates > lower) & (candidates <= true_theta)):
            return TheoremCheck(status=VerificationStatus.INCONCLUSIVE,
                                reason=f"no candidate in ({lower}, {true_theta}]")

        defined, effects = [], []
        for r in candidates:
            try:
                effects.append(self.bruteforce_cape(assignments, r))
                defined.append(r)
            except UndefinedCandidateError:
                continue
        effects = np.asarray(effects)
        max_effect = float(effects.max())
        argmax = tuple(float(r) for r, e in zip(defined, effects) if e >= max_effect - TIE_TOLERANCE)

        truth = influences >= true_theta
        equivalent = all(np.array_equal(influences >= r, truth) for r in argmax)
        if equivalent and abs(max_effect - 1.0) <= TIE_TOLERANCE:
            return TheoremCheck(status=VerificationStatus.PASS, argmax=argmax, max_effect=max_effect)
        return TheoremCheck(status=VerificationStatus.FAIL, argmax=argmax, max_effect=max_effect,
                            reason="maximizer is not equivalent to the true threshold")

    def verify_batch(self, trials: int, max_neighbors: int, seed: int) -> VerificationSummary:
        """
        Random configurations: n ~ U{1..max_neighbors}, positive weights
        normalized to 1, theta ~ U(1e-6, 1). Candidates are the uniform grid
        plus every achievable influence.
        """
        self.require(trials >= 1, f"trials must be >= 1, got {trials}")
        self.require(1 <= max_neighbors <= MAX_NEIGHBORS,
                     f"max_neighbors must lie in [1, {MAX_NEIGHBORS}], got {max_neighbors}")
        rng = self.rng(seed)
        summary = VerificationSummary(trials=trials)

        for trial in range(trials):
            n = int(rng.integers(1, max_neighbors + 1))
            weights = rng.uniform(0.05, 1.0, size=n)
            weights = weights / weights.sum()
            theta = float(rng.uniform(EPSILON, 1.0))
            achievable = self.enumerate_assignments(weights, theta).influences
            check = self.verify_theorem1(weights, theta, np.concatenate([UNIFORM_GRID, achievable]))

            if check.status == VerificationStatus.PASS:
                summary.passed += 1
            elif check.status == VerificationStatus.FAIL:
                summary.failed += 1
                summary.failures.append(f"trial {trial}: n={n} theta={theta!r} argmax={check.argmax} "
                                        f"max_effect={check.max_effect!r}")
            else:
                summary.inconclusive += 1

        self.log_info(f"Verified {trials} configuration(s): {summary.passed} passed, "
                      f"{summary.failed} failed, {summary.inconclusive} inconclusive")
        return summary

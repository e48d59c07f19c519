"""
Evaluation metrics: threshold MSE, average Jaccard index and reach curves
"""
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from services.base_service import BaseService
from models.diffusion import DiffusionTrace, ThresholdEstimate
from models.experiment import ExperimentReport
from utils.exceptions import ArgumentError
from utils.file_utils import ensure_output_directory

REPORT_FILES = {"mse": "mse.csv", "jaccard": "jaccard.csv", "reach": "reach.csv", "summary": "summary.csv"}


class MetricsService(BaseService):
    """Pure metric computations plus report serialization"""

    def snapshot_mse(self, true_thetas, estimate: ThresholdEstimate) -> float:
        """Mean squared error over the estimated nodes (NaN when there are none)"""
        true_thetas = np.asarray(true_thetas, dtype=float)
        if not estimate.nodes:
            return float("nan")
        nodes = np.asarray(estimate.nodes, dtype=np.int64)
        if nodes.min() < 0 or nodes.max() >= true_thetas.size:
            raise ArgumentError("estimate names nodes without a true threshold")
        return float(np.mean((true_thetas[nodes] - estimate.values) ** 2))

    def threshold_mse(self, true_thetas, estimates_per_snapshot: Sequence[ThresholdEstimate]) -> float:
        """
        Average of per-snapshot MSE; snapshots with no evaluated nodes are skipped

        Returns:
            The average, or NaN when no snapshot has evaluated nodes
        """
        if not estimates_per_snapshot:
            raise ArgumentError("no snapshot estimates to score")
        values = [self.snapshot_mse(true_thetas, estimate) for estimate in estimates_per_snapshot]
        values = [v for v in values if not np.isnan(v)]
        return float(np.mean(values)) if values else float("nan")

    def avg_jaccard(self, truth: DiffusionTrace, pred: DiffusionTrace) -> float:
        """(1 / (T + 1)) * sum over t of |D_t & P_t| / |D_t | P_t|, with 0/0 = 1"""
        if truth.horizon != pred.horizon:
            raise ArgumentError(f"horizon mismatch: {truth.horizon} vs {pred.horizon}")
        total = 0.0
        for actual, predicted in zip(truth.active_sets, pred.active_sets):
            union = len(actual | predicted)
            total += 1.0 if union == 0 else len(actual & predicted) / union
        return total / (truth.horizon + 1)

    def reach_curve(self, trace: DiffusionTrace) -> List[Tuple[int, int]]:
        return [(t, len(active)) for t, active in enumerate(trace.active_sets)]

    def summarize(self, report: ExperimentReport) -> pd.DataFrame:
        """Per-method means and spreads across repetitions and snapshots"""
        mse = report.mse_frame().astype({"mse": float})
        jaccard = report.jaccard_frame().astype({"jaccard": float, "fallback_used": bool})
        mse_stats = mse.groupby("method").agg(mse_mean=("mse", "mean"), mse_std=("mse", "std"))
        jaccard_stats = jaccard.groupby("method").agg(
            jaccard_mean=("jaccard", "mean"), jaccard_std=("jaccard", "std"), fallbacks=("fallback_used", "sum")
        )
        summary = jaccard_stats.join(mse_stats, how="left")
        summary["fallbacks"] = summary["fallbacks"].astype(int)
        return summary.reset_index()[["method", "mse_mean", "mse_std", "jaccard_mean", "jaccard_std", "fallbacks"]]

    def write_report(self, report: ExperimentReport, out_dir: Path) -> Dict[str, Path]:
        """Write mse.csv, jaccard.csv, reach.csv and summary.csv"""
        out_dir = ensure_output_directory(out_dir)
        frames = {
            "mse": report.mse_frame(),
            "jaccard": report.jaccard_frame(),
            "reach": report.reach_frame(),
            "summary": self.summarize(report),
        }
        written = {}
        for name, frame in frames.items():
            path = out_dir / REPORT_FILES[name]
            frame.to_csv(path, index=False, float_format="%.17g")
            written[name] = path
        self.log_info(f"Wrote report files to {out_dir}", files=sorted(REPORT_FILES.values()))
        return written

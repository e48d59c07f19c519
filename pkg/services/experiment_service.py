"""
Experiment orchestration: data generation or ingestion, estimation, metrics and persistence
"""
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from services.base_service import BaseService
from services.baseline_service import BaselineService
from services.causal_tree_service import CausalTreeService
from services.dataset_service import DatasetService
from services.diffusion_service import DiffusionService
from services.metrics_service import MetricsService
from services.network_service import NetworkService
from services.oracle_service import OracleService
from services.st_learner_service import STLearnerService
from services.synthgen_service import SWEEP_PARAMETER, SyntheticDataService
from models.diffusion import EPSILON, DiffusionTrace, ThresholdAssignment, ThresholdEstimate, TrainingTable
from models.experiment import ExperimentConfig, ExperimentReport, JaccardRow, MseRow, ReachRow
from models.network import Graph
from utils.exceptions import ArgumentError, ThresholdEstimationError
from utils.file_utils import ensure_output_directory, get_file_hash, write_key_value_file
from utils.seed_utils import derive_seed

DATA_STREAMS = ("graph", "attributes", "thresholds", "seeds")
RUN_FILE = "run.json"


class RunData(NamedTuple):
    """Inputs of one repetition"""
    graph: Graph
    thresholds: Optional[ThresholdAssignment]
    trace: DiffusionTrace


class ExperimentService(BaseService):
    """Runs the synthetic and ingested pipelines and the theorem harness"""

    def __init__(self):
        super().__init__()
        self.network_service = NetworkService()
        self.synthgen_service = SyntheticDataService()
        self.diffusion_service = DiffusionService()
        self.dataset_service = DatasetService()
        self.baseline_service = BaselineService()
        self.causal_tree_service = CausalTreeService()
        self.st_learner_service = STLearnerService()
        self.metrics_service = MetricsService()
        self.oracle_service = OracleService()

    def run_experiment(self, config: ExperimentConfig) -> Dict[str, Any]:
        """
        Run every repetition and persist mse.csv, jaccard.csv, reach.csv,
        summary.csv and run.json under config.out_dir

        Returns:
            success_response with the ExperimentReport and written paths, or a
            handle_error dict
        """
        try:
            if config.sweep and config.mode == "synthetic":
                return self._run_sweep(config)

            out_dir = ensure_output_directory(config.out_dir)
            report = self.execute(config)
            files = self.metrics_service.write_report(report, out_dir)

            echo = dict(report.config_echo)
            echo.update({f"seed.{name}": str(value) for name, value in report.seeds.items()})
            files["run"] = write_key_value_file(echo, out_dir / RUN_FILE)

            return self.success_response(
                data={"report": report, "files": {name: str(path) for name, path in files.items()}},
                message=f"Experiment finished: {config.reps} repetition(s), {len(config.estimators)} estimator(s)",
            )
        except Exception as e:
            return self.handle_error(e, "run_experiment")

    def execute(self, config: ExperimentConfig) -> ExperimentReport:
        """All repetitions, merged in repetition order"""
        shared = self._ingest(config) if config.mode == "ingest" else None
        report = ExperimentReport(config_echo=config.echo())
        if shared is not None:
            for name in ("edges_path", "attributes_path", "activations_path", "thresholds_path"):
                path = getattr(config, name)
                if path:
                    report.config_echo[f"md5.{name}"] = get_file_hash(path)

        if config.workers > 1 and config.reps > 1:
            parts = Parallel(n_jobs=min(config.workers, config.reps))(
                delayed(self.run_repetition)(config, rep, shared) for rep in range(config.reps)
            )
        else:
            parts = [self.run_repetition(config, rep, shared) for rep in range(config.reps)]

        for part in parts:
            report.extend(part)
        return report

    def run_repetition(self, config: ExperimentConfig, rep: int, shared: Optional[RunData] = None) -> ExperimentReport:
        """One repetition: data, then every snapshot x estimator pair"""
        report = ExperimentReport()
        if shared is None:
            data, seeds = self._generate(config, rep)
            report.seeds.update(seeds)
        else:
            data = shared

        g, thresholds, trace = data
        snapshots = config.resolved_snapshots(trace.horizon)
        for s in snapshots:
            table = self.dataset_service.build_training_table(g, trace, s, rows=config.rows)
            inactive = [v for v in range(g.node_count) if v not in trace.active_sets[s]]
            truth = trace.window(s)

            for method in config.estimators:
                estimate = self.estimate(method, config, g, trace, s, table, inactive,
                                         derive_seed(config.seed, rep, f"{method}@{s}"))
                if thresholds is not None and inactive:
                    report.mse.append(MseRow(
                        rep=rep, snapshot=s, method=method, n_nodes=len(inactive),
                        mse=self.metrics_service.snapshot_mse(thresholds.thresholds, estimate),
                        fallback_used=estimate.fallback_used,
                    ))

                predicted = self.predict_trace(g, trace, s, estimate)
                report.jaccard.append(JaccardRow(
                    rep=rep, snapshot=s, method=method, fallback_used=estimate.fallback_used,
                    jaccard=self.metrics_service.avg_jaccard(truth, predicted),
                ))
                for (t, true_count), (_, pred_count) in zip(self.metrics_service.reach_curve(truth),
                                                            self.metrics_service.reach_curve(predicted)):
                    report.reach.append(ReachRow(rep=rep, snapshot=s, t=s + t, true_count=true_count,
                                                 pred_count=pred_count, method=method))

        self.log_info(f"Finished repetition {rep + 1}/{config.reps}", snapshots=len(snapshots))
        return report

    def estimate(
        self,
        method: str,
        config: ExperimentConfig,
        g: Graph,
        trace: DiffusionTrace,
        snapshot_t: int,
        table: TrainingTable,
        nodes: List[int],
        rng_seed: int,
    ) -> ThresholdEstimate:
        """
        Thresholds of `nodes` from one estimator

        Estimators that cannot be fitted on the snapshot fall back to the
        Heuristic Expected estimate, flagged with fallback_used.
        """
        try:
            return self._estimate(method, config, g, trace, snapshot_t, table, nodes, rng_seed)
        except ThresholdEstimationError as e:
            self.log_warning(f"{method} unavailable at snapshot {snapshot_t}, using heuristic_expected: {e}")
            fallback = self.baseline_service.estimate_heuristic_expected(table, nodes)
            return ThresholdEstimate(nodes=fallback.nodes, values=fallback.values, method=method, fallback_used=True)

    def _estimate(self, method, config, g, trace, snapshot_t, table, nodes, rng_seed) -> ThresholdEstimate:
        baselines = self.baseline_service
        if method == "random":
            return baselines.estimate_random(nodes, rng_seed)
        if method == "heuristic_expected":
            return baselines.estimate_heuristic_expected(table, nodes)
        if method == "heuristic_individual":
            return baselines.estimate_heuristic_individual(table, nodes, rng_seed)
        if method == "linear_regression":
            return baselines.estimate_linear_regression(g, trace, snapshot_t, nodes)

        if len(table) == 0:
            raise ArgumentError("empty training table")
        features = g.features[nodes] if nodes else np.zeros((0, g.feature_count))
        if method == "causal_tree":
            tree = self.causal_tree_service.fit(
                table, min_leaf=config.ct_min_leaf, max_depth=config.ct_max_depth,
                val_fraction=config.ct_val_fraction, rng_seed=rng_seed, grid=config.trigger_grid,
            )
            values, _ = self.causal_tree_service.predict_thresholds(tree, features)
        elif method in ("st_lr", "st_dt"):
            model = self.st_learner_service.fit(
                table, base="ols" if method == "st_lr" else "cart", grid=config.trigger_grid,
                min_leaf=config.st_min_leaf, max_depth=config.st_max_depth,
            )
            values, _ = self.st_learner_service.estimate_thresholds(model, features)
        else:
            raise ArgumentError(f"unknown estimator: {method}")
        return ThresholdEstimate(nodes=tuple(nodes), values=values, method=method)

    def predict_trace(self, g: Graph, trace: DiffusionTrace, snapshot_t: int,
                      estimate: ThresholdEstimate) -> DiffusionTrace:
        """Simulate from D_s over the remaining steps with the estimated thresholds"""
        theta = np.ones(g.node_count)
        if estimate.nodes:
            theta[list(estimate.nodes)] = np.clip(estimate.values, EPSILON, 1.0)
        return self.diffusion_service.simulate(g, theta, trace.active_sets[snapshot_t], trace.horizon - snapshot_t)

    def verify_theorem(self, trials: int, max_neighbors: int, seed: int) -> Dict[str, Any]:
        """Oracle batch; the response carries the VerificationSummary"""
        try:
            summary = self.oracle_service.verify_batch(trials, max_neighbors, seed)
            return self.success_response(
                data=summary,
                message=f"{summary.conclusive} conclusive, {summary.inconclusive} inconclusive, "
                        f"{summary.failed} failed",
            )
        except Exception as e:
            return self.handle_error(e, "verify_theorem")

    def _generate(self, config: ExperimentConfig, rep: int) -> Tuple[RunData, Dict[str, int]]:
        seeds = {stream: derive_seed(config.seed, rep, stream) for stream in DATA_STREAMS}
        synth = self.synthgen_service
        g = synth.gen_graph(config.graph_model, config.n_nodes, config.graph_params, seeds["graph"])
        features = synth.gen_attributes(config.n_nodes, config.n_features, seeds["attributes"])
        g = self.network_service.with_features(g, features)
        thresholds = synth.gen_thresholds(config.threshold_scheme, features, seeds["thresholds"])
        seed_set = synth.seed_activations(config.n_nodes, config.n_seeds, seeds["seeds"])
        trace = self.diffusion_service.simulate(g, thresholds, seed_set, config.horizon)

        if config.save_data:
            self._save_data(config, rep, g, thresholds, trace)
        return RunData(g, thresholds, trace), {f"rep{rep}.{name}": value for name, value in seeds.items()}

    def _save_data(self, config: ExperimentConfig, rep: int, g: Graph, thresholds: ThresholdAssignment,
                   trace: DiffusionTrace) -> None:
        data_dir = ensure_output_directory(Path(config.out_dir) / "data" / f"rep{rep}")
        self.network_service.write_graph(g, data_dir / "edges.csv", data_dir / "attributes.csv")
        self.dataset_service.write_thresholds(thresholds, data_dir / "thresholds.csv")
        self.dataset_service.write_activation_log(trace, data_dir / "activations.csv")
        self.log_debug(f"Saved repetition {rep} data to {data_dir}")

    def _ingest(self, config: ExperimentConfig) -> RunData:
        g, node_index = self.network_service.load_graph(config.edges_path, config.attributes_path, config.directed)
        trace = self.dataset_service.load_activation_log(config.activations_path, node_index)
        thresholds = None
        if config.thresholds_path:
            thresholds = self.dataset_service.load_thresholds(config.thresholds_path, g.node_count, node_index)
        else:
            self.log_info("No true thresholds given; threshold MSE is skipped")
        return RunData(g, thresholds, trace)

    def _run_sweep(self, config: ExperimentConfig) -> Dict[str, Any]:
        parameter = SWEEP_PARAMETER[config.graph_model]
        runs = {}
        for value in self.synthgen_service.sweep_values(config.graph_model):
            sub = config.model_copy(update={
                parameter: value, "sweep": False, "out_dir": str(Path(config.out_dir) / f"{parameter}={value}"),
            })
            result = self.run_experiment(sub)
            if not result["success"]:
                return result
            runs[f"{parameter}={value}"] = result["data"]
        return self.success_response(data={"runs": runs}, message=f"Sweep over {parameter} finished ({len(runs)} runs)")

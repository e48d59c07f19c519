"""
Configuration management for the LTM threshold estimation toolkit
"""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

class Config:
    """Environment-driven defaults for experiments"""
    
    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    
    # Output Configuration
    OUTPUT_DIR: str = os.getenv("OUTPUT_DIR", "results")
    
    # Reproducibility and execution
    DEFAULT_SEED: int = int(os.getenv("DEFAULT_SEED", "0"))
    DEFAULT_WORKERS: int = int(os.getenv("DEFAULT_WORKERS", "1"))
    
    # Synthetic grid defaults (1000 nodes, 100 Gaussian attributes, 50 seeds, 8 steps, 10 runs)
    N_NODES: int = int(os.getenv("N_NODES", "1000"))
    N_FEATURES: int = int(os.getenv("N_FEATURES", "100"))
    N_SEEDS: int = int(os.getenv("N_SEEDS", "50"))
    HORIZON: int = int(os.getenv("HORIZON", "8"))
    REPETITIONS: int = int(os.getenv("REPETITIONS", "10"))
    
    # Threshold lower clamp
    THRESHOLD_EPSILON: float = 1e-6
    
    # Estimators
    ESTIMATORS: list = [
        "random", "heuristic_expected", "heuristic_individual",
        "linear_regression", "causal_tree", "st_lr", "st_dt"
    ]
    GRAPH_MODELS: list = ["erdos_renyi", "pref_attach", "forest_fire", "watts_strogatz"]
    THRESHOLD_SCHEMES: list = ["linear", "quadrant", "external"]
    
    @classmethod
    def validate_config(cls) -> bool:
        """Validate environment-provided values"""
        if cls.DEFAULT_WORKERS < 1:
            raise ValueError("DEFAULT_WORKERS must be >= 1")
        if cls.REPETITIONS < 1:
            raise ValueError("REPETITIONS must be >= 1")
        return True

# Create config instance
config = Config()

"""
Exception hierarchy for threshold estimation
"""
from typing import Optional


class ThresholdEstimationError(ValueError):
    """Base class for all domain errors"""


class ArgumentError(ThresholdEstimationError):
    """Invalid argument passed to an operation"""


class FormatError(ThresholdEstimationError):
    """Malformed input file or inconsistent input shapes"""
    
    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        location = ""
        if path is not None:
            location += f"{path}"
        if line is not None:
            location += f":{line}" if location else f"line {line}"
        super().__init__(f"{location}: {message}" if location else message)


class DegenerateInputError(ThresholdEstimationError):
    """Input carries no usable variation (e.g. constant scores)"""


class DegeneratePartitionError(ThresholdEstimationError):
    """No trigger candidate leaves both sides populated"""


class EstimatorUnavailableError(ThresholdEstimationError):
    """Estimator cannot be fitted on the available data"""


class UndefinedCandidateError(ThresholdEstimationError):
    """Candidate trigger with an empty side"""


class ConfigError(ThresholdEstimationError):
    """Invalid experiment configuration"""
    
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")

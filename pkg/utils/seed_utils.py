"""
Counter-based seed derivation
"""
import hashlib
from typing import Union

import numpy as np


def stream_key(name: str) -> int:
    """Stable 32-bit integer for a stream name (independent of PYTHONHASHSEED)"""
    return int(hashlib.md5(name.encode("utf-8")).hexdigest()[:8], 16)


def derive_seed(master_seed: int, repetition: int, stream: Union[str, int]) -> int:
    """
    Derive an independent sub-seed for one (repetition, stream) pair.
    
    Adding or removing a stream never shifts the seeds of the others.
    """
    key = stream_key(stream) if isinstance(stream, str) else int(stream)
    sequence = np.random.SeedSequence([int(master_seed), int(repetition), key])
    return int(sequence.generate_state(1, dtype=np.uint32)[0])

"""
File handling utilities
"""
import hashlib
from pathlib import Path
from typing import Iterable, List, Union

from config import config
from utils.exceptions import FormatError

PathLike = Union[str, Path]


def get_file_hash(file_path: PathLike) -> str:
    """md5 of a file's bytes, recorded as input provenance"""
    return hashlib.md5(Path(file_path).read_bytes()).hexdigest()


def ensure_output_directory(output_dir: PathLike = None) -> Path:
    """Ensure the output directory exists"""
    output_path = Path(output_dir or config.OUTPUT_DIR)
    output_path.mkdir(parents=True, exist_ok=True)
    return output_path


def validate_header(columns: Iterable[str], expected: List[str], path: PathLike) -> None:
    """Check that a CSV header matches exactly"""
    found = [str(c).strip() for c in columns]
    if found != expected:
        raise FormatError(
            f"expected header {','.join(expected)}, found {','.join(found)}",
            line=1, path=str(path)
        )


def validate_prefixed_header(columns: Iterable[str], first: str, prefix: str, path: PathLike) -> int:
    """Check a `first,prefix0,...,prefix{m-1}` header and return m"""
    found = [str(c).strip() for c in columns]
    expected = [first] + [f"{prefix}{i}" for i in range(len(found) - 1)]
    if not found or found != expected:
        raise FormatError(
            f"expected header {first},{prefix}0,...; found {','.join(found)}",
            line=1, path=str(path)
        )
    return len(found) - 1


def write_key_value_file(values: dict, path: PathLike) -> Path:
    """Write a flat key=value text file with sorted keys"""
    path = Path(path)
    lines = [f"{key}={values[key]}" for key in sorted(values)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path

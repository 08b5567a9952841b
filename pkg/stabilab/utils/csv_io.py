"""
CSV codecs for artifacts

Floats are written in their shortest round-trip representation so a re-read
reproduces every value bit for bit.
"""
from pathlib import Path
from typing import Union

import pandas as pd

from stabilab.schemas.estimation import RegressionResult

PathLike = Union[str, Path]


def write_frame(frame: pd.DataFrame, path: PathLike) -> Path:
    """Write a frame without its index, creating parent directories"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def write_regression(result: RegressionResult, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        result.to_frame().to_csv(handle, index=False, lineterminator="\n")
        handle.write(f"r2,{result.r2!r}\n")
    return path

"""Fitness-bin arithmetic shared by cloud summaries and the neutral partition.

Bins partition [0, 1] into ceil(1/width) half-open cells [i*w, (i+1)*w);
the top boundary f = 1.0 is folded into the last cell so every admissible
fitness has exactly one bin.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError

DEFAULT_BIN_WIDTH = 0.002


def n_bins(bin_width: float = DEFAULT_BIN_WIDTH) -> int:
    if bin_width <= 0.0 or bin_width > 1.0:
        raise ParameterError(f"bin width must be in (0, 1], got {bin_width}")
    return int(math.ceil(1.0 / bin_width))


def bin_fitness(f: float, bin_width: float = DEFAULT_BIN_WIDTH) -> int:
    """Index of the bin containing fitness ``f``."""
    last = n_bins(bin_width) - 1
    if not 0.0 <= f <= 1.0:
        raise ParameterError(f"fitness {f} outside [0, 1]")
    return min(int(np.floor(f / bin_width)), last)


def bin_indices(values: np.ndarray, bin_width: float = DEFAULT_BIN_WIDTH) -> np.ndarray:
    """Vectorized :func:`bin_fitness`; same floor rule, element for element."""
    last = n_bins(bin_width) - 1
    values = np.asarray(values, dtype=np.float64)
    if values.size and (values.min() < 0.0 or values.max() > 1.0):
        raise ParameterError("fitness values outside [0, 1]")
    idx = np.floor(values / bin_width).astype(np.int64)
    np.minimum(idx, last, out=idx)
    return idx


def bin_center(index: int, bin_width: float = DEFAULT_BIN_WIDTH) -> float:
    if not 0 <= index < n_bins(bin_width):
        raise ParameterError(f"bin index {index} out of range")
    return (index + 0.5) * bin_width

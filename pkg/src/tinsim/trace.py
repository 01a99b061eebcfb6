"""Uniformly sampled time series container shared by all modules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TimeTrace:
    """A uniformly sampled real-valued time series.

    Parameters
    ----------
    values : ndarray
        Samples, coerced to a contiguous float64 1-D array.
    sample_rate : float
        Samples per second (Hz), > 0.
    unit : str
        Unit tag of the samples (e.g. "m", "V", "nu", "J"); "nu" marks the
        dimensionless relative detuning 2*Delta/kappa.
    """

    values: np.ndarray
    sample_rate: float
    unit: str = ""

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("trace values must be one-dimensional")
        if not (self.sample_rate > 0.0):
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def duration(self) -> float:
        return self.n / self.sample_rate

    def times(self) -> np.ndarray:
        return np.arange(self.n) / self.sample_rate

    def with_values(self, values: np.ndarray, unit: str | None = None) -> "TimeTrace":
        """New trace on the same time grid with replaced samples."""
        return TimeTrace(values, self.sample_rate, self.unit if unit is None else unit)

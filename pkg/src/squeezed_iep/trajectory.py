from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .qmat2 import DensityMatrix, from_bloch, to_bloch


def check_time_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise ContractViolation("time grid must be a non-empty 1-D sequence")
    if t[0] != 0.0:
        raise ContractViolation("time grid must start at 0")
    if np.any(np.diff(t) <= 0):
        raise ContractViolation("time grid must be strictly increasing")
    return t


@dataclass(frozen=True)
class Trajectory:
    """States sampled on a time grid; ``gamma`` is the decoherence factor for dephasing runs."""

    times: np.ndarray
    states: tuple[DensityMatrix, ...]
    gamma: np.ndarray | None = None

    def __post_init__(self):
        if len(self.states) != len(self.times):
            raise ContractViolation("one state per time sample is required")
        if self.gamma is not None and len(self.gamma) != len(self.times):
            raise ContractViolation("one gamma value per time sample is required")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def bloch(self) -> np.ndarray:
        return np.array([tuple(to_bloch(s)) for s in self.states])

    @classmethod
    def from_bloch_array(cls, times, r: np.ndarray, gamma=None) -> Trajectory:
        return cls(np.asarray(times, dtype=float), tuple(from_bloch(v) for v in r), gamma)

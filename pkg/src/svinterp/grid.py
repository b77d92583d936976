"""Logarithmic sampling grids."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class LogGrid:
    """Logarithmically uniform grid on ``[tmin, tmax]``.

    Parameters
    ----------
    tmin, tmax : float
        End points, ``0 < tmin < tmax``.  Norm computations over
        ``(0, inf)`` use grids containing ``t = 1``.
    points_per_decade : int
        Sampling density.
    """

    tmin: float = 1e-8
    tmax: float = 1e8
    points_per_decade: int = 32

    def __post_init__(self):
        if not (0 < self.tmin < self.tmax < math.inf):
            raise ValueError("grid needs 0 < tmin < tmax < inf")
        if int(self.points_per_decade) != self.points_per_decade or self.points_per_decade < 1:
            raise ValueError("points_per_decade must be a positive integer")

    @cached_property
    def n(self) -> int:
        decades = math.log10(self.tmax / self.tmin)
        return int(round(decades * self.points_per_decade)) + 1

    @cached_property
    def x(self) -> np.ndarray:
        """Nodes in the log variable ``x = ln t``."""
        x = np.linspace(math.log(self.tmin), math.log(self.tmax), self.n)
        # make t = 1 an exact node when it lies on the lattice
        k = np.argmin(np.abs(x))
        if abs(x[k]) < 1e-9:
            x[k] = 0.0
        x.setflags(write=False)
        return x

    @cached_property
    def t(self) -> np.ndarray:
        t = np.exp(self.x)
        t.setflags(write=False)
        return t

    @property
    def dx(self) -> float:
        return (self.x[-1] - self.x[0]) / (self.n - 1)

    def refine(self, factor: int = 2) -> "LogGrid":
        return LogGrid(self.tmin, self.tmax, self.points_per_decade * factor)

    def index(self, t: float) -> int:
        """Index of the node nearest to ``t``."""
        return int(np.argmin(np.abs(self.x - math.log(t))))

    def to_json(self) -> dict:
        return {"tmin": self.tmin, "tmax": self.tmax, "points_per_decade": int(self.points_per_decade)}

    @classmethod
    def from_json(cls, d: dict) -> "LogGrid":
        return cls(float(d["tmin"]), float(d["tmax"]), int(d["points_per_decade"]))

    @classmethod
    def parse(cls, text: str) -> "LogGrid":
        """Parse ``"tmin,tmax,ppd"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"grid override must be tmin,tmax,ppd; got {text!r}")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]))


DEFAULT_GRID = LogGrid()

"""Parameter spaces: named parameters with closed ranges forming a box."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MissingParam, OutOfBox, UnknownParam


@dataclass(frozen=True)
class ParamSpace:
    """An ordered list of (name, lo, hi) parameters; the box is their product.

    Carries the uniform measure used by all sampling and probability
    computations in this package.
    """

    params: tuple[tuple[str, float, float], ...]

    def __init__(self, params):
        object.__setattr__(self, "params", tuple((str(n), float(lo), float(hi)) for n, lo, hi in params))
        names = [n for n, _, _ in self.params]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate parameter names in {names}")
        for name, lo, hi in self.params:
            if not lo < hi:
                raise ValueError(f"parameter {name}: empty range [{lo}, {hi}]")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _, _ in self.params)

    @property
    def dim(self) -> int:
        return len(self.params)

    @property
    def lows(self) -> np.ndarray:
        return np.array([lo for _, lo, _ in self.params])

    @property
    def highs(self) -> np.ndarray:
        return np.array([hi for _, _, hi in self.params])

    def index(self, name: str) -> int:
        for i, (n, _, _) in enumerate(self.params):
            if n == name:
                return i
        raise UnknownParam(f"unknown parameter {name!r}; have {list(self.names)}")

    def contains(self, point) -> bool:
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            return False
        return bool(np.all(point >= self.lows) and np.all(point <= self.highs))

    def require_inside(self, point) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            raise OutOfBox(f"point has dimension {point.shape}, expected ({self.dim},)")
        if not self.contains(point):
            raise OutOfBox(f"point {point.tolist()} outside box {self.params}")
        return point

    def center(self) -> np.ndarray:
        return (self.lows + self.highs) / 2.0

    def point_from_assignments(self, assignments: dict[str, float]) -> np.ndarray:
        """Ordered vector from a name->value mapping; every name must be known
        and every parameter assigned, and the point must lie in the box."""
        for name in assignments:
            if name not in self.names:
                raise UnknownParam(f"unknown parameter {name!r}; have {list(self.names)}")
        missing = [n for n in self.names if n not in assignments]
        if missing:
            raise MissingParam(f"missing values for {missing}")
        return self.require_inside([assignments[n] for n in self.names])


def box_volume(space: ParamSpace) -> float:
    """Lebesgue volume of the box; positive for every valid space."""
    return float(np.prod(space.highs - space.lows))

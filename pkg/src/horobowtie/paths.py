"""Polylines with cached step lengths."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


class PathError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PathH:
    """Ordered points plus the length of each step.

    Component paths carry a 1-d `steps` array. Product paths carry an
    (n-1, 2) array holding the p-side and q-side step lengths, so that any
    admissible norm can be applied afterwards.
    """

    points: tuple
    steps: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not self.points:
            raise PathError("empty path")
        steps = np.asarray(self.steps, dtype=float)
        if steps.shape[0] != len(self.points) - 1:
            raise PathError(f"{len(self.points)} points need {len(self.points) - 1} steps, got {steps.shape[0]}")
        object.__setattr__(self, "steps", steps)

    @property
    def is_product(self) -> bool:
        return self.steps.ndim == 2

    def __len__(self) -> int:
        return len(self.points)

    @property
    def start(self):
        return self.points[0]

    @property
    def end(self):
        return self.points[-1]

    def component_length(self) -> float:
        if self.is_product:
            raise PathError("product path needs a norm")
        return float(self.steps.sum())

    def reversed(self) -> "PathH":
        return PathH(tuple(reversed(self.points)), self.steps[::-1].copy())

    def concat(self, other: "PathH") -> "PathH":
        if self.end != other.start:
            raise PathError("paths do not meet")
        return PathH(self.points + other.points[1:], np.concatenate([self.steps, other.steps]))

    def cumulative(self, norm=None) -> np.ndarray:
        """Arc-length parameter of every point."""
        if self.is_product:
            if norm is None:
                raise PathError("product path needs a norm")
            lens = norm.evaluate(self.steps[:, 0], self.steps[:, 1]) if len(self.steps) else np.zeros(0)
        else:
            lens = self.steps
        return np.concatenate([[0.0], np.cumsum(lens)])


def path_from_points(points: Sequence, dist: Callable[[object, object], float]) -> PathH:
    pts = tuple(points)
    steps = np.array([dist(a, b) for a, b in zip(pts, pts[1:])], dtype=float)
    return PathH(pts, steps.reshape(-1))


def product_path_from_points(points: Sequence, dist_p, dist_q) -> PathH:
    pts = tuple(points)
    steps = np.array(
        [(dist_p(a.p_part, b.p_part), dist_q(a.q_part, b.q_part)) for a, b in zip(pts, pts[1:])],
        dtype=float,
    ).reshape(-1, 2)
    return PathH(pts, steps)

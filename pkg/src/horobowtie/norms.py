"""Admissible norms combining the two component step lengths."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable

import numpy as np

from .ledger import as_big
from .paths import PathError, PathH


class NormError(ValueError):
    pass


class NormFamily(Enum):
    NORMALIZED_LR = "lr"
    CUSTOM = "custom"


@dataclass(frozen=True)
class AdmissibleNorm:
    family: NormFamily
    r: float | None
    c_n: Fraction
    evaluator: Callable | None = None
    name: str = ""

    def evaluate(self, a, b):
        a_arr, b_arr = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        if np.any(a_arr < 0) or np.any(b_arr < 0):
            raise NormError("norm arguments must be nonnegative")
        if self.family is NormFamily.CUSTOM:
            out = self.evaluator(a_arr, b_arr)
        elif math.isinf(self.r):
            out = np.maximum(a_arr, b_arr)
        elif self.r == 1:
            out = (a_arr + b_arr) / 2
        else:
            m = np.maximum(a_arr, b_arr)
            safe = np.where(m > 0, m, 1.0)
            # factor out the max so large r cannot overflow
            out = np.where(m > 0, m * (((a_arr / safe) ** self.r + (b_arr / safe) ** self.r) / 2) ** (1 / self.r), 0.0)
        return float(out) if np.ndim(out) == 0 else out

    def __call__(self, a, b):
        return self.evaluate(a, b)


def lr_norm(r: float, c_n: Fraction | int | None = None) -> AdmissibleNorm:
    """Normalised l_r; the default ledger constant is 1 for r=1, else 2."""
    if not r >= 1:
        raise NormError(f"r must be >= 1, got {r}")
    if c_n is None:
        c_n = 1 if r == 1 else 2
    label = "linf" if math.isinf(r) else f"l{r:g}"
    return AdmissibleNorm(NormFamily.NORMALIZED_LR, float(r), as_big(c_n), None, label)


def custom_norm(fn: Callable, c_n: Fraction | int, name: str = "custom") -> AdmissibleNorm:
    return AdmissibleNorm(NormFamily.CUSTOM, None, as_big(c_n), fn, name)


def parse_norm(spec: str, c_n: Fraction | int | None = None) -> AdmissibleNorm:
    s = spec.strip().lower()
    if not s.startswith("l") or len(s) < 2:
        raise NormError(f"norm spec must look like l1, l2 or linf, got {spec!r}")
    body = s[1:]
    if body == "inf":
        return lr_norm(math.inf, c_n)
    try:
        r = float(body)
    except ValueError as exc:
        raise NormError(f"bad norm exponent in {spec!r}") from exc
    return lr_norm(r, c_n)


def evaluate(norm: AdmissibleNorm, a, b):
    return norm.evaluate(a, b)


@dataclass(frozen=True)
class AdmissibilityReport:
    passes: bool
    measured_c_n: float
    worst_ratio_point: tuple[float, float]
    unit_value: float
    min_margin: float


def certify_admissible(norm: AdmissibleNorm, grid_resolution: int = 4096) -> AdmissibilityReport:
    """Check N(1,1)=1 and N >= mean on the simplex a+b=2 (enough by homogeneity)."""
    if grid_resolution < 16:
        raise NormError("grid_resolution must be >= 16")
    a = np.linspace(0.0, 2.0, grid_resolution + 1)
    b = 2.0 - a
    vals = np.asarray(norm.evaluate(a, b), dtype=float)
    unit = float(norm.evaluate(1.0, 1.0))
    ratio = vals  # the mean is exactly 1 on this simplex
    k = int(np.argmax(ratio))
    margin = float(np.min(vals - 1.0))
    passes = abs(unit - 1.0) <= 1e-12 and margin >= -1e-12
    return AdmissibilityReport(passes, float(ratio[k]), (float(a[k]), float(b[k])), unit, margin)


def path_length(norm: AdmissibleNorm, path: PathH) -> float:
    if len(path) == 1:
        return 0.0
    if not path.is_product:
        raise PathError("path_length expects a product path")
    return float(np.sum(norm.evaluate(path.steps[:, 0], path.steps[:, 1])))

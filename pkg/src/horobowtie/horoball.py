"""Lower bounds on the length of paths that stay out of a horoball.

Each bound is evaluated in exact rational arithmetic from measured inputs.
Measured floats enter through one-sided roundings chosen so the resulting
right-hand side can only get smaller, which keeps a "holds" verdict sound.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

from .ledger import (
    ConstantsLedger,
    as_big,
    frac_str,
    log2_approx,
    lower_rational,
    pow2_lower,
    threshold,
    upper_rational,
)
from .paths import PathH

CAP_SLACK = 1e-9


class BoundKind(Enum):
    AMANDE = "AMANDE"
    BELOW_SAME_HEIGHT = "BELOW_SAME_HEIGHT"
    BELOW_AND_REACH = "BELOW_AND_REACH"
    BACKWARDS_CONTROL = "BACKWARDS_CONTROL"


class HypothesisError(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("hypothesis violated: " + "; ".join(violations))


def _low(v) -> Fraction:
    return lower_rational(v) if isinstance(v, float) else as_big(v)


def _high(v) -> Fraction:
    return upper_rational(v) if isinstance(v, float) else as_big(v)


def amande_bound(delta, dh_x_x0, dh_y_y0, d_x0_y0) -> Fraction:
    """Cost of joining x to y under the height of x0, y0 when those are far apart."""
    delta = as_big(delta)
    if any(as_big(v) < 0 for v in (dh_x_x0, dh_y_y0, d_x0_y0)):
        raise ValueError("amande_bound inputs must be nonnegative")
    if not as_big(d_x0_y0) > 768 * delta:
        raise HypothesisError([f"d(x0, y0) = {float(d_x0_y0)} must exceed 768 delta = {768 * delta}"])
    expo = pow2_lower(_low(d_x0_y0) / (2 * delta))
    return _low(dh_x_x0) + _low(dh_y_y0) + Fraction(1, 2**386) * expo - 24 * delta


def below_same_height_bound(delta, d_xy, delta_h) -> Fraction:
    delta = as_big(delta)
    if not as_big(delta_h) > 555 * delta:
        raise HypothesisError([f"Delta H = {float(delta_h)} must exceed 555 delta = {555 * delta}"])
    expo = pow2_lower(_low(delta_h) / delta)
    return _low(d_xy) + Fraction(1, 2**530) * expo - 2 * _high(delta_h) - 24 * delta


def below_and_reach_bound(delta, dh_x_m, d_xy, delta_h) -> Fraction:
    delta = as_big(delta)
    for v in (dh_x_m, d_xy, delta_h):
        if isinstance(v, float) and not math.isfinite(v):
            raise ValueError("below_and_reach_bound inputs must be finite")
    expo = pow2_lower(_low(delta_h) / delta)
    linear = max(Fraction(0), 2 * _high(delta_h))
    return 2 * _low(dh_x_m) + _low(d_xy) + Fraction(1, 2**850) * expo - 1 - linear - 1700 * delta


def backwards_control_residual(cfg, v1_anchor, v2_anchor, t1, t2, t) -> float:
    """|d_r(V1(t1 + D - t), V2(t2 + D - t)) - 2t| with D = d_r(V1(t1), V2(t2)) / 2."""
    half = cfg.relative_distance(cfg.vertical_point(v1_anchor, t1), cfg.vertical_point(v2_anchor, t2)) / 2
    tol = 0 if cfg.kind == "tree" else 1e-12
    if not -tol <= t <= half + tol:
        raise ValueError(f"t = {t} outside [0, {half}]")
    if cfg.kind == "tree":
        half = int(half)
    a = cfg.vertical_point(v1_anchor, t1 + half - t)
    b = cfg.vertical_point(v2_anchor, t2 + half - t)
    return abs(cfg.relative_distance(a, b) - 2 * t)


@dataclass(frozen=True)
class BoundCertificate:
    """holds is lhs >= rhs, computed exactly.

    For the three length bounds lhs is the path length (rounded down) and
    rhs the bound. For backwards control lhs is 288 delta and rhs the
    measured residual (rounded up).
    """

    kind: BoundKind
    lhs: Fraction
    rhs: Fraction
    holds: bool
    hypothesis_report: dict = field(default_factory=dict)

    @property
    def slack_log2(self) -> float | None:
        gap = self.lhs - self.rhs
        return log2_approx(gap) if gap > 0 else None

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "lhs": frac_str(self.lhs),
            "rhs_log2": log2_approx(self.rhs) if self.rhs > 0 else None,
            "rhs_sign": (self.rhs > 0) - (self.rhs < 0),
            "holds": self.holds,
            "hypothesis_report": self.hypothesis_report,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _same_point(cfg, a, b) -> bool:
    return a == b if cfg.kind == "tree" else cfg.distance(a, b) <= 1e-9


def _path_extremes(cfg, path: PathH) -> tuple[Any, Any]:
    hs = [cfg.height(p) for p in path.points]
    return max(hs), min(hs)


def certify_capped_path(cfg, path: PathH | None, context: dict, kind: BoundKind) -> BoundCertificate:
    """Validate a lemma's hypotheses on a component path, then compare.

    context keys: AMANDE {x, y, t0}; BELOW_SAME_HEIGHT {x, y, delta_H};
    BELOW_AND_REACH {x, y, m}; BACKWARDS_CONTROL {v1, v2, t1, t2, t}.
    """
    delta = as_big(cfg.delta)
    slack = 0 if cfg.kind == "tree" else CAP_SLACK
    if kind is BoundKind.BACKWARDS_CONTROL:
        res = backwards_control_residual(cfg, context["v1"], context["v2"], context["t1"], context["t2"], context["t"])
        lhs = threshold(ConstantsLedger(delta), "DELTA_x288")
        rhs = _high(res)
        return BoundCertificate(kind, lhs, rhs, lhs >= rhs, {"residual": float(res)})

    if path is None:
        raise HypothesisError(["a path is required"])
    x, y = context["x"], context["y"]
    problems = []
    if not _same_point(cfg, path.start, x):
        problems.append("path does not start at x")
    if not _same_point(cfg, path.end, y):
        problems.append("path does not end at y")
    h_plus, h_minus = _path_extremes(cfg, path)
    length = _low(path.component_length() if cfg.kind != "tree" else int(round(path.component_length())))
    report: dict = {"h_plus": float(h_plus), "h_minus": float(h_minus)}

    if kind is BoundKind.AMANDE:
        t0 = context["t0"]
        if t0 < max(cfg.height(x), cfg.height(y)):
            problems.append("t0 below max(h(x), h(y))")
        if h_plus > t0 + slack:
            problems.append(f"h+ = {h_plus} exceeds the cap t0 = {t0}")
        x0, y0 = cfg.vertical_point(x, t0), cfg.vertical_point(y, t0)
        d0 = cfg.distance(x0, y0)
        report["d_x0_y0"] = float(d0)
        if not as_big(d0) > 768 * delta:
            problems.append(f"d(x0, y0) = {d0} not above 768 delta")
        if problems:
            raise HypothesisError(problems)
        rhs = amande_bound(delta, abs(t0 - cfg.height(x)), abs(t0 - cfg.height(y)), d0)
    elif kind is BoundKind.BELOW_SAME_HEIGHT:
        dH = context["delta_H"]
        if cfg.height(x) > cfg.height(y):
            problems.append("h(x) > h(y)")
        ceiling = cfg.height(y) + cfg.relative_distance(x, y) / 2 - dH
        if h_plus > ceiling + slack:
            problems.append(f"h+ = {h_plus} exceeds h(y) + d_r/2 - Delta H = {ceiling}")
        if not as_big(dH) > 555 * delta:
            problems.append(f"Delta H = {dH} not above 555 delta")
        if problems:
            raise HypothesisError(problems)
        rhs = below_same_height_bound(delta, cfg.distance(x, y), dH)
    elif kind is BoundKind.BELOW_AND_REACH:
        m = context["m"]
        if not cfg.height(m) <= cfg.height(x) <= cfg.height(y):
            problems.append("need h(m) <= h(x) <= h(y)")
        if abs(h_minus - cfg.height(m)) > slack:
            problems.append(f"h- = {h_minus} differs from h(m) = {cfg.height(m)}")
        if problems:
            raise HypothesisError(problems)
        dH = cfg.height(y) + cfg.relative_distance(x, y) / 2 - h_plus
        report["delta_H"] = float(dH)
        rhs = below_and_reach_bound(delta, abs(cfg.height(x) - cfg.height(m)), cfg.distance(x, y), dH)
    else:  # pragma: no cover - enum is closed
        raise ValueError(kind)
    return BoundCertificate(kind, length, rhs, length >= rhs, report)


# -- the plane sweep -----------------------------------------------------------

DEFAULT_SPAN_LOG = 10.0  # endpoints at (0, 0) and (2 e^10, 0)
LARGE_SPAN_LOG = 650.0
LARGE_DEFICIT = 600.0


@dataclass(frozen=True)
class SweepRow:
    delta_H: float
    capped_excess: float
    kind: BoundKind
    status: str  # "ok" or "skipped"
    bound_log2: float | None
    holds: bool | None
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "delta_H": self.delta_H,
            "capped_excess": self.capped_excess,
            "kind": self.kind.value,
            "status": self.status,
            "bound_value_log2": self.bound_log2,
            "holds": self.holds,
            "note": self.note,
        }


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    deficits: tuple[float, ...]
    excesses: tuple[float, ...]
    slope: float
    slope_shifted: float

    @property
    def skipped(self) -> int:
        return sum(r.status == "skipped" for r in self.rows)

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.rows if r.status == "ok")

    def slope_ok(self, tol: float = 0.05) -> bool:
        return abs(self.slope - 1.0) <= tol


def fitted_slope(deficits, excesses) -> float:
    """Least-squares slope of log(excess) against the deficit."""
    import numpy as np

    return float(np.polyfit(np.asarray(deficits, float), np.log(np.asarray(excesses, float)), 1)[0])


def _certify_rows(cfg, u, v, cap: float, deficit: float, excess: float) -> list[SweepRow]:
    from . import plane as pl

    plan = pl.capped_plan(u, v, cap)
    path = pl.capped_path(plan)
    dr_half = cfg.relative_distance(u, v) / 2
    contexts = {
        BoundKind.AMANDE: {"x": u, "y": v, "t0": cap},
        BoundKind.BELOW_SAME_HEIGHT: {"x": u, "y": v, "delta_H": cfg.height(v) + dr_half - cap},
        BoundKind.BELOW_AND_REACH: {"x": u, "y": v, "m": u},
        BoundKind.BACKWARDS_CONTROL: {"v1": u, "v2": v, "t1": 0.0, "t2": 0.0, "t": min(1.0, dr_half)},
    }
    rows = []
    for kind, ctx in contexts.items():
        try:
            cert = certify_capped_path(cfg, path, ctx, kind)
        except HypothesisError as exc:
            rows.append(SweepRow(deficit, excess, kind, "skipped", None, None, "; ".join(exc.violations)))
            continue
        rhs_log2 = log2_approx(cert.rhs) if cert.rhs > 0 else None
        rows.append(SweepRow(deficit, excess, kind, "ok", rhs_log2, cert.holds))
    return rows


def exponential_sweep(deficits=tuple(range(2, 9)), span_log: float = DEFAULT_SPAN_LOG,
                      large_scale: bool = True, delta=1) -> SweepResult:
    """Capped-path excess over the plain geodesic as the cap drops.

    Endpoints sit at height 0, 2 e^span_log apart, so the plain geodesic
    peaks at height span_log. For each deficit the cap is span_log minus
    the deficit. Every capped path is also run through the four
    certifiers; configurations outside a lemma's hypotheses are skipped.
    With `large_scale` one extra configuration is added where the
    threshold hypotheses do hold.
    """
    from . import plane as pl
    from .space import PlaneSpace

    deficits = tuple(float(d) for d in deficits)
    if len(deficits) < 2:
        raise ValueError("need at least two deficits to fit a slope")
    cfg = PlaneSpace(delta)
    u = pl.PlanePoint(0.0, 0.0)
    v = pl.PlanePoint(2.0 * math.exp(span_log), 0.0)
    top = pl.geodesic_max_height(u, v)
    base = pl.plane_distance(u, v)
    rows: list[SweepRow] = []
    excesses = []
    for dH in deficits:
        cap = top - dH
        excess = pl.capped_min_length(u, v, cap) - base
        excesses.append(excess)
        rows.extend(_certify_rows(cfg, u, v, cap, dH, excess))
    if large_scale:
        far = pl.PlanePoint(2.0 * math.exp(LARGE_SPAN_LOG), 0.0)
        cap = pl.geodesic_max_height(u, far) - LARGE_DEFICIT
        excess = pl.capped_min_length(u, far, cap) - pl.plane_distance(u, far)
        rows.extend(_certify_rows(cfg, u, far, cap, LARGE_DEFICIT, excess))
    slope = fitted_slope(deficits, excesses)
    shifted = fitted_slope(deficits, [e + 2 * d for e, d in zip(excesses, deficits)])
    return SweepResult(tuple(rows), deficits, tuple(excesses), slope, shifted)

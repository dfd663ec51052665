"""Exact constants for bound certification.

Every threshold is a `fractions.Fraction`; nothing here ever touches a float
except `log2_approx`, which is for display only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

BigScalar = Fraction
Rational = Union[int, Fraction, str]

# (multiplier of c0, extra factor of c_norm) keyed by identifier
_C0_MULTIPLES = {
    "C0_x4": (4, False),
    "C0_x7": (7, False),
    "C0_x13": (13, False),
    "C0_x15": (15, False),
    "C0_x16": (16, False),
    "C0_x17": (17, False),
    "C0_x22": (22, False),
    "C0_x196_CN": (196, True),
}
_DELTA_MULTIPLES = {
    "DELTA_x24": (24, False),
    "DELTA_x54": (54, False),
    "DELTA_x96": (96, False),
    "DELTA_x144": (144, False),
    "DELTA_x200": (200, False),
    "DELTA_x288": (288, False),
    "DELTA_x768": (768, False),
    "DELTA_x1152_CN": (1152, True),
    "DELTA_x1700": (1700, False),
}
THRESHOLD_NAMES = tuple(sorted(_C0_MULTIPLES) + sorted(_DELTA_MULTIPLES))


class LedgerError(ValueError):
    pass


def as_big(value: Rational | float) -> Fraction:
    """Exact conversion; floats are taken at their exact binary value."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float) and not math.isfinite(value):
        raise LedgerError(f"non-finite scalar {value!r}")
    return Fraction(value)


def log2_approx(value: Fraction | int) -> float:
    """log2 of a positive exact rational, accurate far below 1e-9."""
    v = as_big(value)
    if v <= 0:
        raise LedgerError(f"log2 of non-positive value {v}")
    return _log2_int(v.numerator) - _log2_int(v.denominator)


def _log2_int(n: int) -> float:
    shift = max(n.bit_length() - 64, 0)
    return shift + math.log2(n >> shift)


_GRID = Fraction(1, 10**9)


def upper_rational(x: float) -> Fraction:
    """A rational >= x (with float error absorbed) on a 1e-9 grid."""
    q = _finite(x)
    q += abs(q) / 2**48 + _GRID
    return (q / _GRID).__ceil__() * _GRID


def lower_rational(x: float) -> Fraction:
    """A rational <= x (with float error absorbed) on a 1e-9 grid."""
    q = _finite(x)
    q -= abs(q) / 2**48 + _GRID
    return (q / _GRID).__floor__() * _GRID


def _finite(x: float | Fraction | int) -> Fraction:
    if isinstance(x, float) and not math.isfinite(x):
        raise LedgerError(f"non-finite value {x!r}")
    return Fraction(x)


def pow2_lower(exponent: Fraction) -> Fraction:
    """Exact rational lower bound on 2**exponent for a rational exponent."""
    k = exponent.__floor__()
    frac = exponent - k
    base = Fraction(2) ** k
    if frac == 0:
        return base
    # 2**frac in [1, 2); shave a few ulps so the float result cannot overshoot
    f = 2.0 ** float(frac)
    mant = Fraction(math.floor(f * 2**52) - 8, 2**52)
    return base * max(mant, Fraction(1))


def compute_c0(delta: Rational, c_norm: Rational) -> Fraction:
    d, c = as_big(delta), as_big(c_norm)
    if d < 1:
        raise LedgerError(f"delta must be >= 1, got {d}")
    if c < 1:
        raise LedgerError(f"c_norm must be >= 1, got {c}")
    return (2853 * d * c + Fraction(2) ** 851) ** 2


def lr_comparison_bound(delta: Rational) -> Fraction:
    """Additive gap allowed between l_r and l_1 product metrics."""
    return 30 * (5706 * as_big(delta) + Fraction(2) ** 851) ** 2


@dataclass(frozen=True)
class ConstantsLedger:
    delta: Fraction = Fraction(1)
    c_norm: Fraction = Fraction(1)
    c0: Fraction = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", as_big(self.delta))
        object.__setattr__(self, "c_norm", as_big(self.c_norm))
        object.__setattr__(self, "c0", compute_c0(self.delta, self.c_norm))

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)

    def as_dict(self) -> dict:
        return {
            "delta": frac_str(self.delta),
            "c_norm": frac_str(self.c_norm),
            "c0_log2": log2_approx(self.c0),
        }


def threshold(ledger: ConstantsLedger, name: str) -> Fraction:
    if name in _C0_MULTIPLES:
        k, with_cn = _C0_MULTIPLES[name]
        base = ledger.c0
    elif name in _DELTA_MULTIPLES:
        k, with_cn = _DELTA_MULTIPLES[name]
        base = ledger.delta
    else:
        raise LedgerError(f"unknown threshold {name!r}; valid names: {', '.join(THRESHOLD_NAMES)}")
    value = k * base
    return value * ledger.c_norm if with_cn else value


def frac_str(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise LedgerError(f"not a rational: {text!r}") from exc

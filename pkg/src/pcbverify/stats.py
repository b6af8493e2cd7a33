"""Pass@k, Wilson score intervals and rater-agreement statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

from .errors import DomainError


def _check_int(name: str, x) -> None:
    if not isinstance(x, int) or isinstance(x, bool):
        raise DomainError(f"{name} must be an integer, got {x!r}")


def pass_at_k_exact(n: int, c: int, k: int) -> Fraction:
    """Unbiased pass@k estimate ``1 - C(n-c, k) / C(n, k)`` as an exact fraction."""
    for name, x in (("n", n), ("c", c), ("k", k)):
        _check_int(name, x)
    if not 0 <= c <= n:
        raise DomainError(f"need 0 <= c <= n, got c={c}, n={n}")
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    return 1 - Fraction(math.comb(n - c, k), math.comb(n, k))


def round_pct(x: Fraction | float) -> float:
    """Percent of a proportion rounded half-up to one decimal."""
    d = Decimal(x.numerator) / Decimal(x.denominator) if isinstance(x, Fraction) else Decimal(x)
    return float((d * 100).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def pass_at_k(n: int, c: int, k: int) -> float:
    """Pass@k in percent, one decimal place."""
    return round_pct(pass_at_k_exact(n, c, k))


@dataclass(frozen=True)
class Interval:
    low: float
    high: float

    @property
    def center(self) -> float:
        return (self.low + self.high) / 2

    @property
    def half_width(self) -> float:
        return (self.high - self.low) / 2


def wilson_center_half_width(p_hat: float, n: int, z: float) -> tuple[float, float]:
    """Unclamped Wilson score center and half-width."""
    if not 0.0 <= p_hat <= 1.0:
        raise DomainError(f"p_hat must lie in [0, 1], got {p_hat!r}")
    _check_int("n", n)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not z > 0 or math.isinf(z):
        raise DomainError(f"z must be a positive finite number, got {z!r}")
    z2n = z * z / n
    denom = 1 + z2n
    center = (p_hat + z2n / 2) / denom
    half = z * math.sqrt(p_hat * (1 - p_hat) / n + z * z / (4 * n * n)) / denom
    return center, half


def wilson_interval(p_hat: float, n: int, z: float = 1.645) -> Interval:
    center, half = wilson_center_half_width(p_hat, n, z)
    # the bound touching an observed extreme is exact; rounding would leave ~1e-17
    low = 0.0 if p_hat == 0.0 else max(0.0, center - half)
    high = 1.0 if p_hat == 1.0 else min(1.0, center + half)
    return Interval(low, high)


@dataclass(frozen=True)
class Agreement:
    """Verifier-vs-expert agreement. Fields are None where undefined."""

    precision: float | None
    recall: float | None
    f1: float | None
    kappa: float | None
    observed: float


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def agreement_stats(tp: int, fp: int, fn: int, tn: int) -> Agreement:
    """Precision, recall, F1 and Cohen's kappa for a 2x2 confusion matrix.

    Kappa uses the chance agreement computed from both raters' marginals.
    """
    for name, x in (("tp", tp), ("fp", fp), ("fn", fn), ("tn", tn)):
        _check_int(name, x)
        if x < 0:
            raise DomainError(f"{name} must be >= 0, got {x}")
    total = tp + fp + fn + tn
    if total == 0:
        raise DomainError("confusion matrix is empty")
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = None
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    p_o = Fraction(tp + tn, total)
    p_e = (Fraction(tp + fp, total) * Fraction(tp + fn, total)
           + Fraction(fn + tn, total) * Fraction(fp + tn, total))
    kappa = None if p_e == 1 else float((p_o - p_e) / (1 - p_e))
    return Agreement(precision, recall, f1, kappa, float(p_o))

"""Bjontegaard rate-difference computation over (rate, quality) curves.

The default integrates a monotone piecewise-cubic interpolant of
log10(rate) over the overlapping quality range (robust on 4-point
curves); the classic global cubic polynomial fit is available for
cross-checking. Negative results mean the test curve saves rate.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

__all__ = [
    "CurveError",
    "RdPoint",
    "RdCurve",
    "validate_curve",
    "load_curve",
    "bd_rate",
    "bd_psnr",
]

MIN_POINTS = 4


class CurveError(ValueError):
    """Rate-quality curve unfit for BD computation."""


@dataclass(frozen=True)
class RdPoint:
    rate: float
    quality: float


@dataclass(frozen=True)
class RdCurve:
    """Operating points sorted by rate, strictly increasing in rate and quality."""

    points: tuple

    @property
    def rates(self):
        return np.array([p.rate for p in self.points])

    @property
    def qualities(self):
        return np.array([p.quality for p in self.points])


def validate_curve(points):
    """Sort and validate raw (rate, quality) pairs into an RdCurve.

    Rejects short curves, nonpositive rates, duplicate qualities or rates,
    and quality that does not increase strictly with rate.
    """
    pts = [p if isinstance(p, RdPoint) else RdPoint(float(p[0]), float(p[1])) for p in points]
    if len(pts) < MIN_POINTS:
        raise CurveError(f"too few points: got {len(pts)}, need >= {MIN_POINTS}")
    for p in pts:
        if p.rate <= 0:
            raise CurveError(f"rate must be positive, got {p}")
    pts.sort(key=lambda p: p.rate)
    problems = []
    for a, b in zip(pts, pts[1:]):
        if b.rate == a.rate:
            problems.append(f"duplicate rate: {a} and {b}")
        elif b.quality == a.quality:
            problems.append(f"duplicate quality: {a} and {b}")
        elif b.quality < a.quality:
            problems.append(f"quality not increasing with rate: {a} then {b}")
    if problems:
        raise CurveError("; ".join(problems))
    return RdCurve(points=tuple(pts))


def load_curve(path):
    """Read a two-column (rate, quality) text file; commas or whitespace delimit."""
    points = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise CurveError(f"{path}:{lineno}: expected 'rate quality', got {line!r}")
            try:
                points.append(RdPoint(float(parts[0]), float(parts[1])))
            except ValueError as e:
                raise CurveError(f"{path}:{lineno}: {e}") from e
    return validate_curve(points)


def _overlap(reference, test):
    lo = max(reference.qualities.min(), test.qualities.min())
    hi = min(reference.qualities.max(), test.qualities.max())
    if not hi > lo:
        raise CurveError(
            f"quality ranges do not overlap: reference "
            f"[{reference.qualities.min()}, {reference.qualities.max()}] vs test "
            f"[{test.qualities.min()}, {test.qualities.max()}]"
        )
    return lo, hi


def _log_rate_integral(curve, lo, hi, method):
    quality = curve.qualities
    log_rate = np.log10(curve.rates)
    if method == "pchip":
        interp = PchipInterpolator(quality, log_rate)
        anti = interp.antiderivative()
        return float(anti(hi) - anti(lo))
    if method == "cubic":
        poly = np.polyfit(quality, log_rate, 3)
        anti = np.polyint(poly)
        return float(np.polyval(anti, hi) - np.polyval(anti, lo))
    raise ValueError(f"unknown method {method!r}, expected 'pchip' or 'cubic'")


def bd_rate(reference, test, method="pchip"):
    """Average rate difference of test vs reference in percent at equal quality.

    Interpolation never extrapolates: the integral runs over the
    intersection of the two quality ranges only.
    """
    lo, hi = _overlap(reference, test)
    int_ref = _log_rate_integral(reference, lo, hi, method)
    int_test = _log_rate_integral(test, lo, hi, method)
    avg_log_diff = (int_test - int_ref) / (hi - lo)
    return float((10.0 ** avg_log_diff - 1.0) * 100.0)


def _quality_integral(curve, lo, hi, method):
    log_rate = np.log10(curve.rates)
    quality = curve.qualities
    if method == "pchip":
        interp = PchipInterpolator(log_rate, quality)
        anti = interp.antiderivative()
        return float(anti(hi) - anti(lo))
    if method == "cubic":
        poly = np.polyfit(log_rate, quality, 3)
        anti = np.polyint(poly)
        return float(np.polyval(anti, hi) - np.polyval(anti, lo))
    raise ValueError(f"unknown method {method!r}, expected 'pchip' or 'cubic'")


def bd_psnr(reference, test, method="pchip"):
    """Average quality difference (dB) of test vs reference at equal rate."""
    lo = max(np.log10(reference.rates.min()), np.log10(test.rates.min()))
    hi = min(np.log10(reference.rates.max()), np.log10(test.rates.max()))
    if not hi > lo:
        raise CurveError("rate ranges do not overlap")
    int_ref = _quality_integral(reference, lo, hi, method)
    int_test = _quality_integral(test, lo, hi, method)
    return float((int_test - int_ref) / (hi - lo))

"""Tail-trend estimation shared by every asymptotic verdict in the package.

Limits cannot be decided from finitely many terms.  Every module that has to
classify an asymptotic statement (boundedness, convergence to zero, divergence)
does it through the same machinery: a least-squares line through the tail third
of the data.  The slope of that line, compared against a fixed threshold,
yields a three-valued answer, and the same numbers are reported back to the
caller as diagnostics so a verdict can always be audited.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# |slope| below this is treated as "flat at this truncation": numerically
# bounded, but not evidence of a limit.
SLOPE_TOL = 1e-3


@dataclass(frozen=True)
class TailTrend:
    """Linear-regression summary of the tail third of a sampled sequence."""

    slope: float
    intercept: float
    tail_mean: float
    tail_max: float
    tail_min: float
    residual: float
    k_range: tuple[int, int]

    @property
    def flat(self) -> bool:
        return abs(self.slope) < SLOPE_TOL

    @property
    def rising(self) -> bool:
        return self.slope >= SLOPE_TOL

    @property
    def falling(self) -> bool:
        return self.slope <= -SLOPE_TOL


def tail_trend(xs, ys, frac: float = 1.0 / 3.0) -> TailTrend:
    """Fit a line to the last `frac` of (xs, ys) and summarise it."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size != ys.size:
        raise ValueError("xs and ys must have equal length")
    finite = np.isfinite(ys)
    xs, ys = xs[finite], ys[finite]
    n = xs.size
    if n < 4:
        raise ValueError("need at least 4 finite samples for a trend")
    start = max(0, n - max(4, int(np.ceil(n * frac))))
    xt, yt = xs[start:], ys[start:]
    # Normalise the abscissa so the slope threshold means "per unit x".
    coeffs = np.polyfit(xt, yt, 1)
    fit = np.polyval(coeffs, xt)
    with np.errstate(over="ignore"):
        residual = float(np.sqrt(np.mean(np.minimum((yt - fit) ** 2, 1e300))))
    return TailTrend(
        slope=float(coeffs[0]),
        intercept=float(coeffs[1]),
        tail_mean=float(np.mean(yt)),
        tail_max=float(np.max(yt)),
        tail_min=float(np.min(yt)),
        residual=residual,
        k_range=(int(round(xt[0])), int(round(xt[-1]))),
    )


def smoothed_monotone_decreasing(ys, width: int = 5, slack: float = 0.0) -> bool:
    """True if a moving average of ys is non-increasing over its tail half."""
    ys = np.asarray(ys, dtype=float)
    if ys.size < 2 * width:
        return bool(np.all(np.diff(ys) <= slack))
    kernel = np.ones(width) / width
    sm = np.convolve(ys, kernel, mode="valid")
    tail = sm[sm.size // 2 :]
    return bool(np.all(np.diff(tail) <= slack))


def diverges_to_minus_inf(xs, ys) -> bool:
    """Heuristic for y -> -inf: a persistent, non-collapsing monotone dive.

    Requires a clearly negative tail slope, a smoothed monotone decrease, a
    late-window drop that has not collapsed relative to the earlier one (a
    sequence levelling off at a finite value decelerates sharply), and a
    total drop that is material against the sampled range.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    finite = np.isfinite(ys)
    xs, ys = xs[finite], ys[finite]
    if xs.size < 8:
        return False
    t = tail_trend(xs, ys)
    if not t.falling:
        return False
    half = ys[ys.size // 2 :]
    q = half.size // 2
    early_drop = float(half[0] - half[q])
    late_drop = float(half[q] - half[-1])
    total = float(half[0] - half[-1])
    span = max(float(ys.max() - ys.min()), 1e-12)
    if total <= max(0.05 * span, 1e-9):
        return False
    if late_drop < 0.3 * early_drop - 1e-12:
        return False
    return smoothed_monotone_decreasing(ys[ys.size // 3 :],
                                        slack=0.02 * total + 1e-12)


def estimated_limit(trend: TailTrend) -> float | None:
    """Best-effort limit estimate: tail mean when flat, +-inf when drifting."""
    if trend.flat:
        return trend.tail_mean
    return float("inf") if trend.slope > 0 else float("-inf")


@dataclass(frozen=True)
class Boundedness:
    """Outcome of the bounded-above test for a sampled sequence."""

    code: str  # "holds", "fails" or "inconclusive"
    bound: float
    trend: TailTrend
    increment_exponent: float | None = None


# Decay-exponent thresholds for increasing sequences: increments falling like
# x^beta are treated as summable only for beta clearly below -1 (Bertrand-type
# divergences sit exactly at -1 and must stay undecided).
_BETA_HOLDS = -1.5
_BETA_FAILS = -0.8


def bounded_above(xs, ys) -> Boundedness:
    """Decide whether ys stays bounded above as xs grows.

    A flat or falling tail is bounded by its observed maximum.  A rising tail
    is classified by the decay exponent of its increments: fast-decaying
    increments mean convergence to a finite limit, slowly decaying ones mean
    genuine divergence, and the borderline band stays inconclusive.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    finite = np.isfinite(ys)
    xs, ys = xs[finite], ys[finite]
    t = tail_trend(xs, ys)
    observed = float(np.max(ys))
    if t.slope <= SLOPE_TOL:
        return Boundedness("holds", observed, t)
    dx = np.diff(xs)
    dy = np.diff(ys) / np.where(dx == 0, 1.0, dx)
    mid = np.asarray(0.5 * (xs[1:] + xs[:-1]))
    pos = (dy > 0) & (mid > 0)
    if np.count_nonzero(pos[pos.size // 2 :]) < 4:
        return Boundedness("inconclusive", observed, t)
    tail_sel = np.zeros(pos.size, dtype=bool)
    tail_sel[pos.size // 2 :] = True
    sel = pos & tail_sel
    beta_fit = tail_trend(np.log(mid[sel]), np.log(dy[sel]), frac=1.0)
    beta = beta_fit.slope
    if beta <= _BETA_HOLDS:
        # convergent increase: extrapolate a safe bound from the last increment
        extra = float(dy[sel][-1] * mid[sel][-1] * 2.0)
        return Boundedness("holds", observed + max(extra, 0.0), t, beta)
    if beta >= _BETA_FAILS:
        return Boundedness("fails", observed, t, beta)
    return Boundedness("inconclusive", observed, t, beta)

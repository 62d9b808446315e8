"""Weight functions, Young conjugates and associated growth objects.

The Young conjugate phi*(t) = sup_{s>=0} (st - phi(s)) of the convex function
phi = omega o exp is computed by a monotone-argmax sweep over a uniform inner
grid followed by a vectorised golden-section refinement; a dense brute-force
evaluation of the same supremum is kept in the test suite as an independent
oracle.  The conjugate of a log-convex sequence (its associated weight
function, and its inversion back to the sequence) is computed exactly through
the monotone breakpoint structure of the discrete transform.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import gammaln

from . import seqcore, trend as _trend
from .errors import (
    ArgmaxAtBoundary,
    GridTooCoarse,
    HypothesisNotMet,
    NonMonotoneTable,
    OutOfRangeParam,
    PreconditionViolated,
    SupDiverges,
)
from .seqcore import (
    Confidence,
    Diagnostics,
    LogWeightSeq,
    Relation,
    RelationReport,
    SeqProperty,
    Status,
    Verdict,
)

__all__ = [
    "OmegaS",
    "GevreyPower",
    "FromSequence",
    "CustomTable",
    "WeightFn",
    "WeightProperty",
    "ConjugateLemma",
    "YoungConjugate",
    "make_weight_fn",
    "young_conjugate",
    "conjugate_at",
    "biconjugate",
    "associated_matrix",
    "associated_sequence",
    "associated_weight_fn",
    "recover_sequence",
    "compare_weight_fns",
    "check_weight_property",
    "check_xi_seq",
    "verify_conjugate_lemma",
    "default_t_grid",
    "export_weight_csv",
    "export_conjugate_csv",
]


def grid_scale() -> float:
    """Optional global multiplier on default grid densities."""
    try:
        return max(0.1, float(os.environ.get("ULTRASCALE_GRID_SCALE", "1")))
    except ValueError:
        return 1.0


def default_t_grid(lo: float = 1.0, hi: float = 1e8, n: int = 4096) -> np.ndarray:
    n = int(n * grid_scale())
    return np.geomspace(lo, hi, n)


# --------------------------------------------------------------------------
# weight-function kinds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class OmegaS:
    """omega(t) = (max(0, log t))^s; vanishes on [0,1] by construction."""

    s: float

    def __post_init__(self):
        if not self.s > 0:
            raise OutOfRangeParam("log-power weight needs s > 0")


@dataclass(frozen=True)
class GevreyPower:
    """omega(t) = t^(1/s)."""

    s: float

    def __post_init__(self):
        if not self.s >= 1:
            raise OutOfRangeParam("power weight needs s >= 1")


@dataclass(frozen=True)
class FromSequence:
    """omega_M(t) = sup_k log(t^k / M_k) of a log-convex sequence."""

    seq: LogWeightSeq


@dataclass(frozen=True)
class CustomTable:
    """Piecewise-linear weight in x = log t given by (t, value) knots."""

    knots_t: tuple
    knots_val: tuple


WeightKind = Union[OmegaS, GevreyPower, FromSequence, CustomTable]


@dataclass(frozen=True)
class WeightFn:
    """A weight function with a stable log-argument evaluator.

    `phi(s)` evaluates omega(e^s) without forming e^s where avoidable, which
    is what every conjugate computation actually consumes.  `t_valid_max`
    bounds the range on which a sequence-backed weight is exactly the stated
    supremum (beyond it the defining argmax would leave the truncation).
    """

    kind: WeightKind
    phi: Callable[[np.ndarray], np.ndarray]
    normalized: bool
    label: str
    t_valid_max: float = math.inf

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            x = np.where(t > 0, np.log(np.maximum(t, 1e-300)), -np.inf)
        return self.phi(x)


def _phi_omega_s(s_exp: float):
    def phi(x):
        x = np.asarray(x, dtype=float)
        return np.power(np.maximum(x, 0.0), s_exp)
    return phi


def _phi_gevrey_power(g: float, normalized: bool):
    def phi(x):
        x = np.asarray(x, dtype=float)
        raw = np.exp(np.minimum(x / g, 700.0))
        if normalized:
            return np.where(x > 0, raw - 1.0, 0.0)
        return raw
    return phi


def _phi_from_sequence(seq: LogWeightSeq):
    logmu = np.diff(seq.log_terms)  # increasing for log-convex input
    lt = seq.log_terms

    def phi(x):
        x = np.asarray(x, dtype=float)
        kstar = np.searchsorted(logmu, x, side="right")
        vals = kstar * x - lt[kstar]
        return np.maximum(vals, 0.0)
    return phi


def _phi_table(knots_t, knots_val):
    xs = np.log(np.asarray(knots_t, dtype=float))
    ys = np.asarray(knots_val, dtype=float)
    slope_hi = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])

    def phi(x):
        x = np.asarray(x, dtype=float)
        inside = np.interp(x, xs, ys, left=ys[0])
        beyond = ys[-1] + slope_hi * (x - xs[-1])
        return np.where(x > xs[-1], beyond, inside)
    return phi


def make_weight_fn(kind: WeightKind, normalize: bool = True) -> WeightFn:
    """Build a weight function, optionally forced to vanish on [0, 1]."""
    if isinstance(kind, OmegaS):
        return WeightFn(kind, _phi_omega_s(kind.s), True, f"omega_{kind.s:g}")
    if isinstance(kind, GevreyPower):
        phi = _phi_gevrey_power(kind.s, normalize)
        return WeightFn(kind, phi, normalize, f"t^(1/{kind.s:g})")
    if isinstance(kind, FromSequence):
        seq = kind.seq
        logmu = np.diff(seq.log_terms)
        if np.any(np.diff(logmu) < -1e-9):
            raise PreconditionViolated("sequence-backed weight needs a log-convex sequence")
        t_hi = float(np.exp(min(logmu[-1], 700.0)))
        return WeightFn(kind, _phi_from_sequence(seq), True,
                        f"omega[{seq.label or 'M'}]", t_valid_max=t_hi)
    if isinstance(kind, CustomTable):
        ts = np.asarray(kind.knots_t, dtype=float)
        vs = np.asarray(kind.knots_val, dtype=float)
        if ts.size < 2 or np.any(np.diff(ts) <= 0) or np.any(np.diff(vs) < 0):
            raise NonMonotoneTable("table knots must be strictly increasing in t "
                                   "and nondecreasing in value")
        phi = _phi_table(ts, vs)
        normalized = bool(vs[0] == 0.0 and ts[0] >= 1.0)
        if normalize and not normalized:
            base = phi(np.array([0.0]))[0]
            raw = phi

            def phi_n(x, _raw=raw, _base=base):
                x = np.asarray(x, dtype=float)
                return np.where(x > 0, np.maximum(_raw(np.maximum(x, 0.0)) - _base, 0.0), 0.0)
            phi, normalized = phi_n, True
        return WeightFn(kind, phi, normalized, "table",
                        t_valid_max=float(ts[-1]))
    raise OutOfRangeParam(f"unknown weight kind {kind!r}")


# --------------------------------------------------------------------------
# Young conjugate
# --------------------------------------------------------------------------

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_SWEEP_POINTS = 4096
_MAX_DOUBLINGS = 24


@dataclass(frozen=True)
class YoungConjugate:
    """Tabulated convex conjugate of phi = omega o exp."""

    grid: np.ndarray
    values: np.ndarray
    argmax_s: np.ndarray
    source: WeightFn
    s_max: float

    def __call__(self, t) -> np.ndarray:
        return np.interp(np.asarray(t, dtype=float), self.grid, self.values)


def _sweep_argmax(phi, t_grid: np.ndarray, s_max: float, n_s: int):
    """Monotone-argmax coarse pass: O(n_s + n_t) pointer sweep."""
    s = np.linspace(0.0, s_max, n_s)
    phis = phi(s)
    idx = np.empty(t_grid.size, dtype=int)
    j = 0
    for i, t in enumerate(t_grid):
        while j + 1 < n_s and s[j + 1] * t - phis[j + 1] >= s[j] * t - phis[j]:
            j += 1
        idx[i] = j
    return s, phis, idx


def _refine_golden(phi, t_grid, lo, hi, iters: int = 60):
    """Vectorised golden-section maximisation of s*t - phi(s) on [lo, hi]."""
    a, b = lo.copy(), hi.copy()
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    for _ in range(iters):
        gc = c * t_grid - phi(c)
        gd = d * t_grid - phi(d)
        upper = gc > gd  # maximum lies in [a, d]
        b = np.where(upper, d, b)
        a = np.where(upper, a, c)
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
    s_best = 0.5 * (a + b)
    vals = s_best * t_grid - phi(s_best)
    for cand in (lo, hi):
        v = cand * t_grid - phi(cand)
        better = v > vals
        vals = np.where(better, v, vals)
        s_best = np.where(better, cand, s_best)
    return np.maximum(vals, 0.0), s_best


def conjugate_at(omega: WeightFn, t, s_max: float = 64.0):
    """phi*_omega evaluated at the points t (scalar or array).

    The search interval [0, s_max] doubles until the supremum stops growing
    at the right end; raises ArgmaxAtBoundary when the doubling cap is hit
    (the supremum is then effectively linear, e.g. a conjugate evaluated at
    a slope the function never exceeds).
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise OutOfRangeParam("conjugate argument must be >= 0")
    order = np.argsort(t_arr)
    ts = t_arr[order]
    for _ in range(_MAX_DOUBLINGS):
        s, phis, idx = _sweep_argmax(omega.phi, ts, s_max, _SWEEP_POINTS)
        # boundary growth test: still improving at s_max means s_max too small
        tmax = ts[-1]
        g_end = s[-1] * tmax - phis[-1]
        g_in = s[-2] * tmax - phis[-2]
        if g_end > g_in + 1e-12 * max(1.0, abs(g_end)):
            s_max *= 2.0
            continue
        lo = s[np.maximum(idx - 1, 0)]
        hi = s[np.minimum(idx + 1, s.size - 1)]
        vals, s_best = _refine_golden(omega.phi, ts, lo, hi)
        out = np.empty_like(vals)
        out[order] = vals
        arg = np.empty_like(s_best)
        arg[order] = s_best
        if np.isscalar(t) or np.asarray(t).ndim == 0:
            return float(out[0]), float(arg[0])
        return out, arg
    raise ArgmaxAtBoundary(f"inner argmax still at the boundary after doubling to s_max={s_max:g}")


def young_conjugate(omega: WeightFn, t_grid=None, s_max: float = 64.0) -> YoungConjugate:
    """Tabulate phi* over an increasing t-grid with construction-time checks."""
    if not omega.normalized:
        raise PreconditionViolated("conjugation requires a weight vanishing on [0, 1]")
    _reject_nonconvex(omega)
    if t_grid is None:
        t_grid = np.concatenate([[0.0], np.geomspace(1e-2, 1e2, int(2048 * grid_scale()))])
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) <= 0):
        raise OutOfRangeParam("t-grid must be strictly increasing")
    vals, args = conjugate_at(omega, t_grid, s_max=s_max)
    scale = max(1.0, float(np.max(vals)))
    if t_grid[0] == 0.0 and abs(vals[0]) > 1e-12 * scale:
        raise ArgmaxAtBoundary("phi*(0) must vanish")
    slopes = np.diff(vals) / np.diff(t_grid)
    if np.any(np.diff(slopes) < -1e-9 * scale):
        raise ArgmaxAtBoundary("conjugate table failed the convexity check")
    if np.any(np.diff(vals) < -1e-12 * scale):
        raise ArgmaxAtBoundary("conjugate table must be nondecreasing")
    if np.any(np.diff(args) < -1e-6 * max(1.0, args.max())):
        raise ArgmaxAtBoundary("inner argmax must be nondecreasing along the grid")
    return YoungConjugate(t_grid, vals, args, omega, s_max)


def _reject_nonconvex(omega: WeightFn) -> None:
    """Inputs failing convexity of omega o exp are rejected, never repaired."""
    v = check_weight_property(omega, WeightProperty.GAMMA_CONVEX)
    if v.fails:
        raise PreconditionViolated("omega o exp is not convex on the checked grid")


def biconjugate(yc: YoungConjugate, s_grid) -> np.ndarray:
    """phi**(s) = sup_t (st - phi*(t)) from the tabulated conjugate.

    Uses the discrete supremum over the table plus a three-point parabolic
    refinement; exact up to the table resolution.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    t, v = yc.grid, yc.values
    out = np.empty(s_grid.size)
    for i, s in enumerate(s_grid):
        g = s * t - v
        j = int(np.argmax(g))
        if 0 < j < t.size - 1:
            out[i] = _parabolic_peak(t[j - 1:j + 2], g[j - 1:j + 2])
        else:
            out[i] = g[j]
    return out


def _parabolic_peak(x3, y3) -> float:
    """Vertex value of the parabola through three points (guarded)."""
    x0, x1, x2 = x3
    y0, y1, y2 = y3
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    if denom == 0:
        return float(y1)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    if a >= -1e-300:  # flat or convex triple: grid max is the supremum
        return float(max(y0, y1, y2))
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    xv = -b / (2 * a)
    if not (min(x3) <= xv <= max(x3)):
        return float(max(y0, y1, y2))
    c = y1 - a * x1 * x1 - b * x1
    return float(a * xv * xv + b * xv + c)


# --------------------------------------------------------------------------
# associated matrix / associated weight function / inversion
# --------------------------------------------------------------------------

def associated_sequence(omega: WeightFn, lam: float, K: int) -> LogWeightSeq:
    """log W^lam_k = phi*(lam k) / lam for k = 0..K."""
    if lam <= 0:
        raise OutOfRangeParam("matrix parameter must be positive")
    pts = lam * np.arange(K + 1, dtype=float)
    vals, _ = conjugate_at(omega, pts)
    lt = vals / lam
    lt[0] = 0.0
    return LogWeightSeq(lt, K, None, label=f"W^{lam:g}[{omega.label}]")


def associated_matrix(omega: WeightFn, lambda_grid, K: int):
    """The ordered family lam -> W^lam attached to a weight function."""
    from . import wmatrix  # deferred: wmatrix builds on this module too

    lams = list(lambda_grid)
    seqs = [associated_sequence(omega, lam, K) for lam in lams]
    return wmatrix.WeightMatrix.from_sequences(
        np.asarray(lams, dtype=float), seqs, label=f"W[{omega.label}]",
        provenance=wmatrix.FromWeightFn(omega))


def associated_weight_fn(M: LogWeightSeq, t_grid=None) -> WeightFn:
    """omega_M(t) = sup_k log(t^k / M_k), exact through the breakpoint sweep.

    Requires a log-convex input whose k-th root diverges (otherwise the
    supremum is infinite for large t).  The returned weight records its valid
    range (the largest t whose defining argmax stays inside the truncation);
    when an explicit grid demands more, a family-backed sequence is rebuilt
    at a larger K, and a bare sequence raises GridTooCoarse.
    """
    if not seqcore.check_property(M, SeqProperty.LOG_CONVEX).holds:
        raise PreconditionViolated("associated weight function needs log-convexity")
    roots = M.log_terms[1:] / M.ks[1:]
    t_roots = _trend.tail_trend(M.ks[1:], roots)
    if t_roots.falling or (t_roots.flat and roots[-1] <= roots[roots.size // 2] + 1e-9):
        raise SupDiverges("M_k^(1/k) looks bounded; the supremum would be infinite")
    anal = seqcore.check_property(M, SeqProperty.ANALYTIC_INCL)
    if anal.fails:
        raise PreconditionViolated("input must lie strictly above the factorial scale")
    seq = M
    if t_grid is not None:
        x_hi = math.log(float(np.max(t_grid)))
        while np.diff(seq.log_terms)[-1] <= x_hi:
            if seq.family is None or seq.K >= 65536:
                raise GridTooCoarse("grid extends past the truncation's largest "
                                    "quotient; increase K or shrink the grid")
            seq = seqcore.build_sequence(seq.family, seq.K * 2)
    return make_weight_fn(FromSequence(seq))


def recover_sequence(omega: WeightFn, K: int, t_grid=None) -> LogWeightSeq:
    """Invert a weight function back to a sequence: log M_k = phi*(k).

    For omega = omega_M with log-convex M this is a round trip; the spec of
    accuracy is grid-limited only through the conjugate search, so errors
    stay near float rounding for sequence-backed weights.
    """
    if isinstance(omega.kind, FromSequence) and K >= omega.kind.seq.K:
        raise GridTooCoarse("can only recover strictly inside the stored truncation")
    ks = np.arange(K + 1, dtype=float)
    vals, _ = conjugate_at(omega, ks)
    vals[0] = 0.0
    return LogWeightSeq(vals, K, None, label=f"recovered[{omega.label}]")


# --------------------------------------------------------------------------
# weight-function comparisons and conditions
# --------------------------------------------------------------------------

def _analytic_wf_relation(a: WeightKind, b: WeightKind) -> Optional[Relation]:
    if isinstance(a, OmegaS) and isinstance(b, OmegaS):
        if b.s < a.s:
            return Relation.LHD
        return Relation.APPROX if a.s == b.s else Relation.INCOMPARABLE
    if isinstance(a, GevreyPower) and isinstance(b, GevreyPower):
        if b.s > a.s:
            return Relation.LHD
        return Relation.APPROX if a.s == b.s else Relation.INCOMPARABLE
    if isinstance(a, GevreyPower) and isinstance(b, OmegaS):
        return Relation.LHD  # any log power is o(any positive power)
    if isinstance(a, OmegaS) and isinstance(b, GevreyPower):
        return Relation.INCOMPARABLE
    return None


def compare_weight_fns(sigma: WeightFn, tau: WeightFn, t_grid=None) -> RelationReport:
    """Classify tau against sigma: LHD means tau = o(sigma) (tail ratio -> 0).

    Follows the class-inclusion order for weight functions: a larger weight
    defines a smaller class, so `sigma preceq tau` means tau(t) = O(sigma(t)).
    """
    if t_grid is None:
        t_grid = default_t_grid()
    t_grid = np.asarray(t_grid, dtype=float)
    if float(t_grid.max()) < 1e6:
        raise OutOfRangeParam("comparison grid must extend to t >= 1e6")
    sv = sigma(t_grid)
    tv = tau(t_grid)
    mask = (sv > 0) & (tv > 0)
    logt = np.log(t_grid[mask])
    logratio = np.log(tv[mask]) - np.log(sv[mask])
    t = _trend.tail_trend(logt, logratio)
    le = bool(np.all(tv[mask] <= sv[mask] * (1 + 1e-12)))

    if _trend.diverges_to_minus_inf(logt, logratio):
        rel = Relation.LHD
    elif t.slope <= _trend.SLOPE_TOL:
        rel = Relation.PRECEQ
        rev = _trend.tail_trend(logt, -logratio)
        if rev.slope <= _trend.SLOPE_TOL and not _trend.diverges_to_minus_inf(logt, logratio):
            rel = Relation.APPROX
    elif le:
        rel = Relation.LE
    else:
        rel = Relation.INCOMPARABLE

    conf = Confidence.NUMERIC
    notes = (f"numeric relation: {rel.value}",)
    analytic = _analytic_wf_relation(sigma.kind, tau.kind)
    if analytic is not None:
        rel, conf = analytic, Confidence.ANALYTIC
        notes = ("analytic weight relation",) + notes
    ratio = np.exp(np.clip(logratio, -700, 700))
    limsup = float(np.exp(min(t.tail_max, 700.0))) if t.slope <= _trend.SLOPE_TOL else math.inf
    liminf = float(np.exp(max(min(t.tail_min, 700.0), -700.0))) if t.slope >= -_trend.SLOPE_TOL else 0.0
    return RelationReport(rel, ratio, limsup, liminf, conf, le,
                          Diagnostics(_trend.estimated_limit(t), t.slope, t.k_range, notes))


class WeightProperty(enum.Enum):
    ALPHA = "alpha"                      # omega(2t) = O(omega(t))
    BETA = "beta"                        # log t = o(omega(t))
    GAMMA_CONVEX = "gamma_convex"        # omega o exp convex
    NON_QUASIANALYTIC = "non_quasianalytic"  # integral of omega(t)/t^2 finite
    XI = "xi"                            # omega(t^2) = O(omega(Ht))
    XI_GENERALIZED = "xi_generalized"    # omega(t^g) <= C (omega(t) + 1)
    SUBLINEAR = "sublinear"              # omega(t) = o(t)
    POWER_BOUND = "power_bound"          # omega = O(t^a), some a < 1


def _cap_grid(omega: WeightFn, grid: np.ndarray, power: float = 1.0) -> np.ndarray:
    """Clip an evaluation grid so t^power stays inside omega's valid range."""
    if math.isinf(omega.t_valid_max):
        return grid
    cap = omega.t_valid_max ** (1.0 / power) * 0.99
    out = grid[grid <= cap]
    if out.size < 64:
        raise GridTooCoarse("weight function valid range too small for this check")
    return out


def _ratio_verdict(logt, num, den, witness: str, extra=None) -> Verdict:
    """HOLDS iff num/den stays bounded along the tail (trend decision)."""
    mask = (den > 0) & (num >= 0)
    lt = logt[mask]
    ratio = num[mask] / den[mask]
    b = _trend.bounded_above(lt, ratio)
    w = {witness: float(b.bound * 1.05)}
    if extra:
        w.update(extra)
    diag = Diagnostics(_trend.estimated_limit(b.trend), b.trend.slope, b.trend.k_range)
    if b.code == "fails":
        i = int(np.argmax(ratio))
        return Verdict(Status.FAILS, witnesses=w, counterexample=(i,), diagnostics=diag)
    if b.code == "holds":
        return Verdict(Status.HOLDS, witnesses=w, diagnostics=diag)
    return Verdict(Status.INCONCLUSIVE, witnesses=w, diagnostics=diag)


def _vanishing_ratio_verdict(logt, num, den) -> Verdict:
    """HOLDS iff num/den -> 0 along the tail."""
    mask = (den > 0) & (num > 0)
    lt = logt[mask]
    logratio = np.log(num[mask]) - np.log(den[mask])
    t = _trend.tail_trend(lt, logratio)
    diag = Diagnostics(_trend.estimated_limit(t), t.slope, t.k_range)
    if _trend.diverges_to_minus_inf(lt, logratio):
        return Verdict(Status.HOLDS, diagnostics=diag)
    if t.rising or (t.flat and t.tail_mean > math.log(1e-6)):
        i = int(np.argmax(logratio))
        return Verdict(Status.FAILS, counterexample=(i,), diagnostics=diag)
    return Verdict(Status.INCONCLUSIVE, diagnostics=diag)


XI_H_CANDIDATES = (1.0, 2.0, 4.0, 8.0, 16.0)
POWER_BOUND_CANDIDATES = (0.1, 0.25, 0.5, 0.75, 0.9)


def check_weight_property(omega: WeightFn, prop: WeightProperty,
                          gamma: float = 2.0, t_grid=None) -> Verdict:
    """Decide a weight-function condition on a log-spaced tail grid.

    Sequence-backed weights get a grid stretched toward their valid range:
    factorial-power weights approach their doubling asymptote only at very
    large arguments, far beyond the default tail window.
    """
    if t_grid is None:
        if math.isinf(omega.t_valid_max):
            t_grid = default_t_grid()
        else:
            hi = float(np.exp(min(0.9 * math.log(max(omega.t_valid_max, 2.0)), 650.0)))
            t_grid = default_t_grid(1.0, max(hi, 100.0))
    t_grid = np.asarray(t_grid, dtype=float)

    if prop is WeightProperty.GAMMA_CONVEX:
        s_hi = math.log(float(t_grid.max()))
        s = np.linspace(0.0, s_hi, int(4096 * grid_scale()))
        vals = omega.phi(s)
        scale = max(1.0, float(np.max(np.abs(vals))))
        second = vals[:-2] + vals[2:] - 2.0 * vals[1:-1]
        bad = np.nonzero(second < -1e-9 * scale)[0]
        if bad.size:
            return Verdict(Status.FAILS, counterexample=(int(bad[0]),),
                           diagnostics=Diagnostics(k_range_used=(0, s.size - 1)))
        return Verdict(Status.HOLDS,
                       witnesses={"min_second_difference": float(second.min())},
                       diagnostics=Diagnostics(k_range_used=(0, s.size - 1)))

    if prop is WeightProperty.ALPHA:
        g = _cap_grid(omega, t_grid)
        g = g[omega(g) > 0]
        # asymptotic condition: keep the witness constant a tail bound, away
        # from the region where omega collapses to 0
        tail = g[g > 50.0]
        if tail.size >= 64:
            g = tail
        logt = np.log(g)
        return _ratio_verdict(logt, omega(2.0 * g), omega(g), "C")

    if prop is WeightProperty.BETA:
        g = _cap_grid(omega, t_grid)
        g = g[g > 1.0]
        return _vanishing_ratio_verdict(np.log(g), np.log(g), omega(g))

    if prop is WeightProperty.SUBLINEAR:
        g = _cap_grid(omega, t_grid)
        g = g[g > 1.0]
        return _vanishing_ratio_verdict(np.log(g), omega(g), g)

    if prop is WeightProperty.NON_QUASIANALYTIC:
        g = _cap_grid(omega, t_grid)
        g = g[(g > 1.0) & (omega(g) > 0)]
        logt = np.log(g)
        integrand = omega(g) / g ** 2
        t = _trend.tail_trend(logt, np.log(integrand))
        # integral of t^p dt converges iff p < -1; p = slope - 1 on a log grid
        p = t.slope - 1.0
        partial = float(np.trapezoid(integrand * g, logt))  # dt = t dlog t
        w = {"partial_integral": partial, "integrand_exponent": float(p)}
        diag = Diagnostics(_trend.estimated_limit(t), t.slope, t.k_range)
        analytic = None
        if isinstance(omega.kind, OmegaS):
            analytic = Status.HOLDS
        elif isinstance(omega.kind, GevreyPower):
            analytic = Status.HOLDS if omega.kind.s > 1 else Status.FAILS
        if analytic is not None:
            return Verdict(analytic, witnesses=w, diagnostics=diag)
        if p < -1.1:
            return Verdict(Status.HOLDS, witnesses=w, diagnostics=diag)
        if p > -0.9:
            return Verdict(Status.FAILS, witnesses=w, counterexample=(g.size - 1,),
                           diagnostics=diag)
        return Verdict(Status.INCONCLUSIVE, witnesses=w, diagnostics=diag)

    if prop is WeightProperty.XI_GENERALIZED:
        if gamma <= 1:
            raise OutOfRangeParam("generalized doubling exponent must exceed 1")
        g = _cap_grid(omega, t_grid, power=gamma)
        logt = np.log(g[g > 1.0])
        g = g[g > 1.0]
        return _ratio_verdict(logt, omega(g ** gamma), omega(g) + 1.0, "C",
                              extra={"gamma": gamma})

    if prop is WeightProperty.XI:
        direct = None
        for H in XI_H_CANDIDATES:
            g = _cap_grid(omega, t_grid, power=2.0)
            g = g[g > 1.0]
            v = _ratio_verdict(np.log(g), omega(g ** 2), omega(H * g) + 1.0, "C",
                               extra={"H": H})
            if v.holds:
                direct = v
                break
            if direct is None or v.status is Status.INCONCLUSIVE:
                direct = v
        gen_ok = all(
            check_weight_property(omega, WeightProperty.XI_GENERALIZED, gamma=gv,
                                  t_grid=t_grid).holds
            for gv in (1.5, 2.0, 3.0)
        )
        if direct.holds != gen_ok:
            notes = direct.diagnostics.notes + ("direct and generalized forms disagree",)
            d = direct.diagnostics
            return Verdict(Status.INCONCLUSIVE, witnesses=direct.witnesses,
                           diagnostics=Diagnostics(d.estimated_limit, d.trend_slope,
                                                   d.k_range_used, notes))
        return direct

    if prop is WeightProperty.POWER_BOUND:
        g = _cap_grid(omega, t_grid)
        g = g[g > 1.0]
        logt = np.log(g)
        for alpha in POWER_BOUND_CANDIDATES:
            v = _ratio_verdict(logt, omega(g), g ** alpha, "C", extra={"alpha": alpha})
            if v.holds:
                return v
        return Verdict(Status.FAILS, counterexample=(g.size - 1,),
                       diagnostics=v.diagnostics)

    raise ValueError(f"unknown weight property {prop!r}")


# --------------------------------------------------------------------------
# sequence-level doubling condition and lemma checks
# --------------------------------------------------------------------------

def check_xi_seq(M: LogWeightSeq, N: Optional[LogWeightSeq] = None,
                 p_max: int = seqcore.P_MAX_DEFAULT) -> Verdict:
    """Doubling bound at sequence level.

    Single-sequence form: M_k^(2p) <= A B^k M_{pk} (delegated to seqcore).
    Two-sequence form: M_k^(2q) <= A g^k N_{qk}, same envelope search with
    the second sequence supplying the right-hand side; here q = 1 is allowed.
    """
    if N is None:
        return seqcore.check_property(M, SeqProperty.OM7SEQ, p_max=p_max)
    if M.K != N.K:
        raise OutOfRangeParam("two-sequence form needs a common truncation")
    last = None
    saw_inc = False
    for q in range(1, min(p_max, M.K // 8) + 1):
        kk = np.arange(1, M.K // q + 1)
        g = 2.0 * q * M.log_terms[kk] - N.log_terms[q * kk]
        roots = g / kk
        b = _trend.bounded_above(kk, roots)
        w = {"q": q, "log_A": max(0.0, float(np.max(g - kk * max(0.0, b.bound)))),
             "log_gamma": max(0.0, float(b.bound))}
        diag = Diagnostics(_trend.estimated_limit(b.trend), b.trend.slope, b.trend.k_range)
        if b.code == "holds":
            return Verdict(Status.HOLDS, witnesses=w, diagnostics=diag)
        if b.code == "inconclusive":
            saw_inc = True
        last = Verdict(Status.FAILS, witnesses=w,
                       counterexample=(int(kk[np.argmax(roots)]),), diagnostics=diag)
    if saw_inc:
        return Verdict(Status.INCONCLUSIVE, witnesses=last.witnesses,
                       diagnostics=last.diagnostics)
    return last


class ConjugateLemma(enum.Enum):
    SHIFT = "shift"              # phi*_l(t+1) <= phi*_2l(t) + phi*_2l(1)
    MIXED = "mixed"              # omega(t^a) <= C(sigma(Ht)+1) and conjugate forms
    HAT_EQUIV = "hat_equiv"      # k! W^l absorbable into a larger parameter
    RHO_BOUND = "rho_bound"      # omega_rho <= omega / rho


VIOLATION_TOL = 1e-7


def _max_violation(lhs: np.ndarray, rhs: np.ndarray) -> float:
    scale = np.maximum(1.0, np.abs(rhs))
    return float(np.max((lhs - rhs) / scale))


def verify_conjugate_lemma(lemma: ConjugateLemma, omega: WeightFn, *,
                           sigma: Optional[WeightFn] = None,
                           alpha: float = 2.0,
                           lambda_grid=(1.0, 2.0, 4.0),
                           rho: float = 4.0,
                           K: int = 60,
                           t_grid=None) -> Verdict:
    """Numerically verify one of the conjugate inequalities over a grid.

    Returns HOLDS when the maximal scaled violation stays below 1e-7 on the
    checked grid (an exact inequality shows up as violation <= 0).
    """
    if t_grid is None:
        t_grid = np.linspace(0.0, 200.0, int(2000 * grid_scale()))
    t_grid = np.asarray(t_grid, dtype=float)

    if lemma is ConjugateLemma.SHIFT:
        worst = -math.inf
        for lam in lambda_grid:
            l1, _ = conjugate_at(omega, lam * (t_grid + 1.0))
            l2, _ = conjugate_at(omega, 2.0 * lam * t_grid)
            c1, _ = conjugate_at(omega, np.array([2.0 * lam]))
            lhs = l1 / lam
            rhs = l2 / (2.0 * lam) + c1[0] / (2.0 * lam)
            worst = max(worst, _max_violation(lhs, rhs))
        status = Status.HOLDS if worst <= VIOLATION_TOL else Status.FAILS
        return Verdict(status, witnesses={"max_violation": worst},
                       diagnostics=Diagnostics(k_range_used=(0, t_grid.size - 1)))

    if lemma is ConjugateLemma.MIXED:
        if sigma is None:
            raise OutOfRangeParam("mixed form needs both weights")
        if alpha <= 1:
            raise OutOfRangeParam("mixed form needs alpha > 1")
        # (1) omega(t^alpha) <= C (sigma(H t) + 1) on the tail
        tg = _cap_grid(omega, default_t_grid(), power=alpha)
        tg = tg[tg > 1.0]
        one = None
        for H in XI_H_CANDIDATES:
            v = _ratio_verdict(np.log(tg), omega(tg ** alpha), sigma(H * tg) + 1.0,
                               "C", extra={"H": H})
            if v.holds:
                one = v
                break
            one = one or v
        # (2)/(3) conjugate form with candidate uniform factors A
        best = None
        for A in (alpha, alpha ** 2, 2 * alpha ** 2, 4.0 * alpha ** 2):
            ok = True
            Dmax = 0.0
            for lam in lambda_grid:
                ls, _ = conjugate_at(sigma, lam * alpha * t_grid)
                lo, _ = conjugate_at(omega, A * lam * t_grid)
                diff = (ls / lam - lo / (A * lam)) / (t_grid + 1.0)
                bb = _trend.bounded_above(np.arange(1.0, diff.size + 1.0), diff)
                if bb.code != "holds":
                    ok = False
                    break
                Dmax = max(Dmax, float(np.max(diff)))
            if ok:
                best = {"A": A, "D": Dmax}
                break
        two_holds = best is not None
        agree = one.holds == two_holds
        status = Status.HOLDS if (one.holds and two_holds) else (
            Status.FAILS if not (one.holds or two_holds) else Status.INCONCLUSIVE)
        w = dict(one.witnesses)
        if best:
            w.update(best)
        notes = () if agree else ("function-level and conjugate-level answers disagree",)
        return Verdict(status, witnesses=w,
                       diagnostics=Diagnostics(notes=notes,
                                               k_range_used=(0, t_grid.size - 1)))

    if lemma is ConjugateLemma.HAT_EQUIV:
        xi = check_weight_property(omega, WeightProperty.XI)
        if xi.fails:
            raise HypothesisNotMet("factorial absorption is only guaranteed when "
                                   "omega(t^2) = O(omega(Ht)) holds")
        ks = np.arange(1, K + 1, dtype=float)
        pair_info = {}
        worst_status = Status.HOLDS
        for lam in lambda_grid:
            base = associated_sequence(omega, lam, K).log_terms[1:]
            hat = gammaln(ks + 1.0) + base
            found = None
            for mult in (2.0, 4.0, 8.0):
                big = associated_sequence(omega, mult * lam, K).log_terms[1:]
                roots = (hat - big) / ks
                b = _trend.bounded_above(ks, roots)
                if b.code == "holds":
                    logh = max(0.0, b.bound)
                    logC = float(np.max(hat - big - ks * logh))
                    found = {"partner": mult * lam, "h": float(np.exp(logh)),
                             "C": float(np.exp(min(logC, 700.0)))}
                    break
            if found is None:
                worst_status = Status.INCONCLUSIVE
            else:
                pair_info[f"lambda={lam:g}"] = found
        return Verdict(worst_status, witnesses={"pairs": pair_info},
                       diagnostics=Diagnostics(k_range_used=(1, K)))

    if lemma is ConjugateLemma.RHO_BOUND:
        Kb = 400
        w_rho = associated_sequence(omega, rho, Kb)
        om_rho = make_weight_fn(FromSequence(w_rho))
        tg = _cap_grid(om_rho, default_t_grid(1.0, 1e6))
        lhs = om_rho(tg)
        rhs = omega(tg) / rho
        worst = _max_violation(lhs, rhs)
        status = Status.HOLDS if worst <= VIOLATION_TOL else Status.FAILS
        return Verdict(status, witnesses={"max_violation": worst, "rho": rho},
                       diagnostics=Diagnostics(k_range_used=(0, tg.size - 1)))

    raise ValueError(f"unknown lemma {lemma!r}")


# --------------------------------------------------------------------------
# CSV side outputs
# --------------------------------------------------------------------------

def export_weight_csv(omega: WeightFn, t_grid, path) -> None:
    import csv as _csv

    t_grid = np.asarray(t_grid, dtype=float)
    vals = omega(t_grid)
    with open(path, "w", newline="") as fh:
        w = _csv.writer(fh)
        w.writerow(["t", "omega(t)"])
        for t, v in zip(t_grid, vals):
            w.writerow([repr(float(t)), repr(float(v))])


def export_conjugate_csv(yc: YoungConjugate, path) -> None:
    import csv as _csv

    with open(path, "w", newline="") as fh:
        w = _csv.writer(fh)
        w.writerow(["t", "phi_star(t)"])
        for t, v in zip(yc.grid, yc.values):
            w.writerow([repr(float(t)), repr(float(v))])

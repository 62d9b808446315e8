"""Truncated weight sequences in log domain.

A weight sequence is stored as the natural logs of its terms, log M_k for
k = 0..K, normalised so that log M_0 = 0.  All built-in families are evaluated
in log domain (factorials through lgamma), so terms like q^(k^2) that overflow
any float by k ~ 40 stay exactly representable as their logarithms.

Growth conditions are genuinely asymptotic; at a finite truncation they are
decided with a three-valued Verdict whose diagnostics carry the tail trend
used for the decision.  Built-in families additionally carry hard-coded
analytic answers that override the numerics (and are cross-checked against
them in the test suite).
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Union

import numpy as np
from scipy.special import gammaln

from . import trend as _trend
from .errors import (
    HGridInsufficient,
    IndexOutOfRange,
    LengthMismatch,
    NonNormalized,
    OutOfRangeParam,
    PreconditionViolated,
    TruncationTooSmall,
)

__all__ = [
    "Status",
    "Diagnostics",
    "Verdict",
    "Relation",
    "Confidence",
    "RelationReport",
    "Gevrey",
    "LQR",
    "NQR",
    "BJSigma",
    "DoubleExp",
    "Custom",
    "SeqFamily",
    "SeqProperty",
    "LogWeightSeq",
    "build_sequence",
    "check_property",
    "om7seq_at",
    "compare_sequences",
    "interpolate_sequence",
    "verify_split_inequality",
    "iterated_exp",
    "log_iter_shifted",
    "export_csv",
]


# --------------------------------------------------------------------------
# verdict plumbing
# --------------------------------------------------------------------------

class Status(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Diagnostics:
    """Trend numbers backing an asymptotic verdict."""

    estimated_limit: Optional[float] = None
    trend_slope: float = 0.0
    k_range_used: tuple[int, int] = (0, 0)
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        d = {
            "trend_slope": self.trend_slope,
            "k_range_used": list(self.k_range_used),
        }
        if self.estimated_limit is not None:
            d["estimated_limit"] = self.estimated_limit
        if self.notes:
            d["notes"] = list(self.notes)
        return d


@dataclass(frozen=True)
class Verdict:
    """Three-valued outcome of a condition check, with witnesses.

    status FAILS implies a counterexample index tuple that can be re-checked
    by direct evaluation; status HOLDS implies the witness constants satisfy
    the condition at every checked index.
    """

    status: Status
    witnesses: dict = field(default_factory=dict)
    counterexample: Optional[tuple] = None
    diagnostics: Diagnostics = Diagnostics()

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Status.FAILS

    def to_dict(self) -> dict:
        d = {"status": self.status.value}
        if self.witnesses:
            d["witnesses"] = {k: _jsonable(v) for k, v in self.witnesses.items()}
        if self.counterexample is not None:
            d["counterexample"] = list(self.counterexample)
        d["diagnostics"] = self.diagnostics.to_dict()
        return d


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


class Relation(enum.Enum):
    LE = "le"                  # termwise M_k <= N_k at the truncation
    PRECEQ = "preceq"          # (M_k/N_k)^(1/k) bounded
    LHD = "lhd"                # (M_k/N_k)^(1/k) -> 0
    APPROX = "approx"          # preceq in both directions
    INCOMPARABLE = "incomparable"  # no forward relation from M to N


class Confidence(enum.Enum):
    ANALYTIC = "analytic"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class RelationReport:
    """Classification of the growth relation from M to N.

    `relation` describes M versus N only; INCOMPARABLE means no forward
    relation was found (the reverse may well hold; swap the arguments to
    test it).  `le` reports the termwise comparison alongside, never instead
    of, the root-ratio classification.
    """

    relation: Relation
    ratio_roots: np.ndarray
    limsup_estimate: float
    liminf_estimate: float
    confidence: Confidence
    le: bool
    diagnostics: Diagnostics = Diagnostics()

    @property
    def preceq(self) -> bool:
        return self.relation in (Relation.PRECEQ, Relation.LHD, Relation.APPROX)

    @property
    def lhd(self) -> bool:
        return self.relation is Relation.LHD

    def to_dict(self) -> dict:
        return {
            "relation": self.relation.value,
            "le": self.le,
            "limsup_estimate": _jsonable(self.limsup_estimate),
            "liminf_estimate": _jsonable(self.liminf_estimate),
            "confidence": self.confidence.value,
            "diagnostics": self.diagnostics.to_dict(),
        }


# --------------------------------------------------------------------------
# built-in families
# --------------------------------------------------------------------------

def iterated_exp(j: int) -> float:
    """e_(j): e_(1) = e, e_(j+1) = e^(e_(j)).  Overflows to inf for j >= 4."""
    if j < 1:
        raise OutOfRangeParam("iterated exponential needs j >= 1")
    x = math.e
    for _ in range(j - 1):
        if x > 700.0:
            return math.inf
        x = math.exp(x)
    return x


def log_iter_shifted(j: int, k) -> np.ndarray:
    """log^(j)(k + e_(j)) evaluated stably.

    For j >= 4 the shift e_(j) overflows float64 while k <= a few hundred is
    negligible against it, so the value saturates at exactly 1.0 in float64.
    """
    k = np.asarray(k, dtype=float)
    ej = iterated_exp(j)
    if math.isinf(ej):
        return np.ones_like(k)
    x = k + ej
    for _ in range(j):
        x = np.log(x)
    return x


@dataclass(frozen=True)
class Gevrey:
    """M_k = (k!)^s."""

    s: float

    def __post_init__(self):
        if not self.s > 0:
            raise OutOfRangeParam("Gevrey exponent must satisfy s > 0")

    def log_terms(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        return self.s * gammaln(k + 1.0)

    @property
    def name(self) -> str:
        return f"G^{self.s:g}"


@dataclass(frozen=True)
class LQR:
    """M_k = k! * q^(k^r)."""

    q: float
    r: float

    def __post_init__(self):
        if not self.q > 1:
            raise OutOfRangeParam("LQR base must satisfy q > 1")
        if not self.r > 1:
            raise OutOfRangeParam("LQR exponent must satisfy r > 1")

    def log_terms(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        return gammaln(k + 1.0) + np.power(k, self.r) * math.log(self.q)

    @property
    def name(self) -> str:
        return f"L^{{{self.q:g},{self.r:g}}}"


@dataclass(frozen=True)
class NQR:
    """M_k = q^(k^r)."""

    q: float
    r: float

    def __post_init__(self):
        if not self.q > 1:
            raise OutOfRangeParam("NQR base must satisfy q > 1")
        if not self.r > 1:
            raise OutOfRangeParam("NQR exponent must satisfy r > 1")

    def log_terms(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        return np.power(k, self.r) * math.log(self.q)

    @property
    def name(self) -> str:
        return f"N^{{{self.q:g},{self.r:g}}}"


@dataclass(frozen=True)
class BJSigma:
    """M_k = k! * (log^(j)(k + e_(j)))^(sigma*k)."""

    j: int
    sigma: float

    def __post_init__(self):
        if not (isinstance(self.j, (int, np.integer)) and self.j >= 1):
            raise OutOfRangeParam("iterated-log depth j must be a positive integer")
        if not self.sigma > 0:
            raise OutOfRangeParam("iterated-log weight sigma must be > 0")

    def log_terms(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        return gammaln(k + 1.0) + self.sigma * k * np.log(log_iter_shifted(self.j, k))

    @property
    def name(self) -> str:
        return f"B^{{{self.j},{self.sigma:g}}}"


@dataclass(frozen=True)
class DoubleExp:
    """M_0 = 1, M_k = e^(e^k)."""

    def log_terms(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        out = np.exp(k)
        return np.where(k == 0, 0.0, out)

    @property
    def name(self) -> str:
        return "DoubleExp"


@dataclass(frozen=True)
class Custom:
    """Arbitrary user family given by k -> log M_k."""

    log_term_fn: Callable
    label: str = "custom"

    def log_terms(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        return np.array([float(self.log_term_fn(int(kk))) for kk in np.atleast_1d(k)])

    @property
    def name(self) -> str:
        return self.label


SeqFamily = Union[Gevrey, LQR, NQR, BJSigma, DoubleExp, Custom]


# --------------------------------------------------------------------------
# the sequence type
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LogWeightSeq:
    """A truncated weight sequence stored as log M_k, k = 0..K."""

    log_terms: np.ndarray
    K: int
    family: Optional[SeqFamily] = None
    label: str = ""

    def __post_init__(self):
        lt = np.asarray(self.log_terms, dtype=float)
        object.__setattr__(self, "log_terms", lt)
        lt.setflags(write=False)
        if lt.ndim != 1 or lt.size != self.K + 1:
            raise LengthMismatch("log_terms must have length K + 1")
        if self.K + 1 < 3:
            raise TruncationTooSmall("need K >= 2")
        if not np.all(np.isfinite(lt)):
            raise OutOfRangeParam("all log terms must be finite")
        if abs(lt[0]) > 0.0:
            raise NonNormalized("log_terms[0] must equal 0 (M_0 = 1)")

    # derived accessors ----------------------------------------------------
    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.K + 1)

    def log_m(self) -> np.ndarray:
        """log m_k = log(M_k / k!)."""
        return self.log_terms - gammaln(self.ks + 1.0)

    def log_mu(self) -> np.ndarray:
        """log mu_k = log(M_k / M_{k-1}) for k = 1..K."""
        return np.diff(self.log_terms)

    def with_label(self, label: str) -> "LogWeightSeq":
        return LogWeightSeq(self.log_terms, self.K, self.family, label)


def build_sequence(family: SeqFamily, K: int) -> LogWeightSeq:
    """Evaluate a family's closed form in log domain at truncation K."""
    if K < 2:
        raise TruncationTooSmall("need K >= 2")
    lt = np.asarray(family.log_terms(np.arange(K + 1)), dtype=float)
    lt = lt.copy()
    lt[0] = 0.0
    return LogWeightSeq(lt, K, family, family.name)


def export_csv(seq: LogWeightSeq, path) -> None:
    """Write the sequence as CSV with header k,log_M_k."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "log_M_k"])
        for k, v in zip(seq.ks, seq.log_terms):
            w.writerow([int(k), repr(float(v))])


# --------------------------------------------------------------------------
# single-sequence conditions
# --------------------------------------------------------------------------

class SeqProperty(enum.Enum):
    LOG_CONVEX = "log_convex"            # M_k^2 <= M_{k-1} M_{k+1}
    SUBMULT_DUAL = "submult_dual"        # M_j M_k <= M_{j+k}
    ANALYTIC_INCL = "analytic_incl"      # (M_k/k!)^(1/k) -> inf
    DERIV_CLOSED = "deriv_closed"        # M_{k+1} <= C^(k+1) M_k
    ALT_DERIV_CLOSED = "alt_deriv_closed"  # M_k^((k+l)/k) <= C h^k M_k
    MODERATE_GROWTH = "moderate_growth"  # M_{j+k} <= g^(j+k) M_j M_k
    QUASIANALYTIC = "quasianalytic"      # sum M_k/M_{k+1} = inf
    OM7SEQ = "om7seq"                    # M_k^(2p) <= A B^k M_{pk}


P_MAX_DEFAULT = 16


def _numeric_diag(t: _trend.TailTrend, notes: tuple[str, ...] = ()) -> Diagnostics:
    return Diagnostics(
        estimated_limit=_trend.estimated_limit(t),
        trend_slope=t.slope,
        k_range_used=t.k_range,
        notes=notes,
    )


def _analytic_override(numeric: Verdict, status: Status, extra_witness=None,
                       note: str = "analytic family verdict") -> Verdict:
    w = dict(numeric.witnesses)
    if extra_witness:
        w.update(extra_witness)
    d = numeric.diagnostics
    counterexample = None
    if status is Status.FAILS:
        counterexample = numeric.counterexample or (d.k_range_used[1],)
    return Verdict(
        status=status,
        witnesses=w,
        counterexample=counterexample,
        diagnostics=Diagnostics(d.estimated_limit, d.trend_slope, d.k_range_used,
                                d.notes + (note,)),
    )


def check_property(M: LogWeightSeq, prop: SeqProperty, ell: int = 1,
                   p_max: int = P_MAX_DEFAULT) -> Verdict:
    """Decide a single-sequence growth condition at truncation.

    Numerics decide via the tail trend of the condition's normalised defect;
    built-in families override the numeric status with their known analytic
    answer (recorded in the diagnostics notes).  `ell` parametrises the
    alternative derivation-closedness check, `p_max` bounds the exponent
    search of the doubling condition.
    """
    if abs(M.log_terms[0]) > 0:
        raise NonNormalized("sequence must be normalised")
    numeric = _numeric_property(M, prop, ell=ell, p_max=p_max)
    analytic = _analytic_property(M.family, prop, p_max=p_max)
    if analytic is None:
        return numeric
    status, extra = analytic
    if status is numeric.status:
        return _analytic_override(numeric, status, extra,
                                  note="analytic family verdict (agrees with numerics)")
    return _analytic_override(numeric, status, extra)


def _numeric_property(M: LogWeightSeq, prop: SeqProperty, ell: int,
                      p_max: int) -> Verdict:
    lt = M.log_terms
    K = M.K
    ks = M.ks

    if prop is SeqProperty.LOG_CONVEX:
        # exact finite check, no asymptotics involved
        second = lt[:-2] + lt[2:] - 2.0 * lt[1:-1]
        bad = np.nonzero(second < -1e-9)[0]
        if bad.size:
            k = int(bad[0]) + 1
            return Verdict(Status.FAILS, counterexample=(k,),
                           diagnostics=Diagnostics(k_range_used=(1, K - 1)))
        return Verdict(Status.HOLDS,
                       witnesses={"min_second_difference": float(second.min())},
                       diagnostics=Diagnostics(k_range_used=(1, K - 1)))

    if prop is SeqProperty.SUBMULT_DUAL:
        j = np.arange(1, K)
        defect = -np.inf
        worst = None
        for jj in j:
            kk = np.arange(1, K - jj + 1)
            d = lt[jj] + lt[kk] - lt[jj + kk]
            i = int(np.argmax(d))
            if d[i] > defect:
                defect, worst = float(d[i]), (int(jj), int(kk[i]))
        if defect > 1e-9:
            return Verdict(Status.FAILS, counterexample=worst,
                           diagnostics=Diagnostics(k_range_used=(1, K)))
        return Verdict(Status.HOLDS, witnesses={"max_defect": defect},
                       diagnostics=Diagnostics(k_range_used=(1, K)))

    if prop is SeqProperty.ANALYTIC_INCL:
        roots = M.log_m()[1:] / ks[1:]
        t = _trend.tail_trend(ks[1:], roots)
        if t.rising or (t.flat and t.slope > 0 and roots[-1] > roots[max(0, roots.size // 2)]):
            # growth visible at the truncation
            return Verdict(Status.HOLDS, witnesses={"root_at_K": float(roots[-1])},
                           diagnostics=_numeric_diag(t))
        if t.falling:
            return Verdict(Status.FAILS, counterexample=(K,),
                           diagnostics=_numeric_diag(t))
        return Verdict(Status.INCONCLUSIVE, diagnostics=_numeric_diag(t))

    if prop is SeqProperty.DERIV_CLOSED:
        ratios = np.diff(lt) / (ks[1:])
        b = _trend.bounded_above(ks[1:], ratios)
        C = float(np.exp(min(b.bound, 700.0)))
        if b.code == "fails":
            k_bad = int(np.argmax(ratios)) + 1
            return Verdict(Status.FAILS, witnesses={"C": C},
                           counterexample=(k_bad,), diagnostics=_numeric_diag(b.trend))
        status = Status.HOLDS if b.code == "holds" else Status.INCONCLUSIVE
        return Verdict(status, witnesses={"C": C}, diagnostics=_numeric_diag(b.trend))

    if prop is SeqProperty.ALT_DERIV_CLOSED:
        # (k+l)/k * log M_k <= log C + k log h: affine envelope on f(k)
        f = (ks[1:] + ell) / ks[1:] * lt[1:]
        roots = f / ks[1:]
        b = _trend.bounded_above(ks[1:], roots)
        logh = max(0.0, b.bound)
        logC = float(np.max(f - ks[1:] * logh))
        if b.code == "fails":
            return Verdict(Status.FAILS, witnesses={"ell": ell},
                           counterexample=(int(ks[-1]),), diagnostics=_numeric_diag(b.trend))
        status = Status.HOLDS if b.code == "holds" else Status.INCONCLUSIVE
        return Verdict(status, witnesses={"C": float(np.exp(min(logC, 700.0))),
                                          "h": float(np.exp(min(logh, 700.0))), "ell": ell},
                       diagnostics=_numeric_diag(b.trend))

    if prop is SeqProperty.MODERATE_GROWTH:
        best = -np.inf
        worst = None
        for jj in range(1, K):
            kk = np.arange(1, K - jj + 1)
            d = (lt[jj + kk] - lt[jj] - lt[kk]) / (jj + kk)
            i = int(np.argmax(d))
            if d[i] > best:
                best, worst = float(d[i]), (int(jj), int(kk[i]))
        # growth of the defect along the diagonal decides the trend
        diag_idx = np.arange(1, K // 2 + 1)
        diag_vals = (lt[2 * diag_idx] - 2 * lt[diag_idx]) / (2 * diag_idx)
        b = _trend.bounded_above(diag_idx, diag_vals)
        gamma = float(np.exp(min(best, 700.0)))
        if b.code == "fails":
            return Verdict(Status.FAILS, witnesses={"gamma": gamma},
                           counterexample=worst, diagnostics=_numeric_diag(b.trend))
        status = Status.HOLDS if b.code == "holds" else Status.INCONCLUSIVE
        return Verdict(status, witnesses={"gamma": gamma}, diagnostics=_numeric_diag(b.trend))

    if prop is SeqProperty.QUASIANALYTIC:
        inc = np.exp(lt[:-1] - lt[1:])  # M_k / M_{k+1}
        partial = float(np.sum(inc))
        # decay-exponent fit of the increments over the tail
        kk = np.arange(1, K)
        inc_pos = inc[1:]
        mask = inc_pos > 0
        t = _trend.tail_trend(np.log(kk[mask]), np.log(inc_pos[mask]))
        p_est = -t.slope
        if p_est < 0.9:
            status = Status.HOLDS
        elif p_est > 1.3:
            status = Status.FAILS
        else:
            status = Status.INCONCLUSIVE
        return Verdict(status,
                       witnesses={"partial_sum": partial, "decay_exponent": float(p_est)},
                       diagnostics=_numeric_diag(t))

    if prop is SeqProperty.OM7SEQ:
        return _om7_numeric(M, p_max)

    raise ValueError(f"unknown property {prop!r}")


def _om7_envelope(M: LogWeightSeq, p: int):
    """g_p(k) = 2p log M_k - log M_{pk} with its affine-envelope witnesses."""
    kmax = M.K // p
    kk = np.arange(1, kmax + 1)
    g = 2.0 * p * M.log_terms[kk] - M.log_terms[p * kk]
    logB = max(0.0, float(np.max(np.diff(np.concatenate([[0.0], g])))))
    logA = max(0.0, float(np.max(g - kk * logB)))
    return kk, g, logA, logB


def om7seq_at(M: LogWeightSeq, p: int) -> Verdict:
    """Check M_k^(2p) <= A B^k M_{pk} for one specific exponent p."""
    if p < 2:
        raise OutOfRangeParam("doubling exponent must satisfy p >= 2 "
                              "(p = 1 would force bounded M_k^(1/k))")
    if M.K // p < 8:
        raise TruncationTooSmall(f"need K >= {8 * p} to probe p = {p}")
    kk, g, logA, logB = _om7_envelope(M, p)
    roots = g / kk
    b = _trend.bounded_above(kk, roots)
    witnesses = {"p": p, "A": float(np.exp(min(logA, 700.0))), "B": float(np.exp(min(logB, 700.0))),
                 "log_A": logA, "log_B": logB}
    if b.code == "fails":
        k_bad = int(kk[np.argmax(roots)])
        return Verdict(Status.FAILS, witnesses=witnesses, counterexample=(k_bad,),
                       diagnostics=_numeric_diag(b.trend))
    if b.code == "holds":
        return Verdict(Status.HOLDS, witnesses=witnesses, diagnostics=_numeric_diag(b.trend))
    return Verdict(Status.INCONCLUSIVE, witnesses=witnesses, diagnostics=_numeric_diag(b.trend))


def _om7_numeric(M: LogWeightSeq, p_max: int) -> Verdict:
    if M.K // 2 < 8:
        raise TruncationTooSmall("need K >= 16 for the doubling condition")
    p_hi = min(p_max, M.K // 8)
    last = None
    saw_inconclusive = False
    for p in range(2, p_hi + 1):
        v = om7seq_at(M, p)
        last = v
        if v.holds:
            return v
        saw_inconclusive |= v.status is Status.INCONCLUSIVE
    status = Status.INCONCLUSIVE if saw_inconclusive else Status.FAILS
    assert last is not None
    return Verdict(status, witnesses={"p_max_searched": p_hi},
                   counterexample=last.counterexample if status is Status.FAILS else None,
                   diagnostics=last.diagnostics)


def _smallest_doubling_exponent(r: float, strict: bool) -> int:
    """Smallest integer p >= 2 with 2p < p^r (strict) or 2p <= p^r."""
    p = 2
    while True:
        lhs, rhs = 2.0 * p, p ** r
        if (lhs < rhs) if strict else (lhs <= rhs):
            return p
        p += 1
        if p > 10 ** 6:  # unreachable for r > 1
            raise OutOfRangeParam("no doubling exponent found")


def _analytic_property(family, prop: SeqProperty, p_max: int):
    """Known closed-form verdicts for the built-in families (None if unknown)."""
    if family is None or isinstance(family, Custom):
        return None
    P = SeqProperty
    if prop in (P.LOG_CONVEX, P.SUBMULT_DUAL):
        return (Status.HOLDS, None)
    if prop is P.ANALYTIC_INCL:
        if isinstance(family, Gevrey):
            return (Status.HOLDS, None) if family.s > 1 else (Status.FAILS, None)
        return (Status.HOLDS, None)
    if prop in (P.DERIV_CLOSED, P.ALT_DERIV_CLOSED):
        if isinstance(family, Gevrey) or isinstance(family, BJSigma):
            return (Status.HOLDS, None)
        if isinstance(family, (LQR, NQR)):
            return (Status.HOLDS, None) if family.r <= 2 else (Status.FAILS, None)
        if isinstance(family, DoubleExp):
            return (Status.FAILS, None)
    if prop is P.MODERATE_GROWTH:
        if isinstance(family, (Gevrey, BJSigma)):
            return (Status.HOLDS, None)
        return (Status.FAILS, None)  # LQR, NQR, DoubleExp
    if prop is P.QUASIANALYTIC:
        if isinstance(family, Gevrey):
            return (Status.HOLDS, None) if family.s <= 1 else (Status.FAILS, None)
        if isinstance(family, BJSigma):
            if family.j >= 2 or family.sigma <= 1:
                return (Status.HOLDS, None)
            return (Status.FAILS, None)
        return (Status.FAILS, None)  # LQR, NQR, DoubleExp
    if prop is P.OM7SEQ:
        if isinstance(family, (Gevrey, BJSigma)):
            return (Status.FAILS, None)  # moderate growth excludes the doubling bound
        if isinstance(family, NQR):
            p = _smallest_doubling_exponent(family.r, strict=False)
            if p <= p_max:
                return (Status.HOLDS, {"p": p})
            return None
        if isinstance(family, LQR):
            # the factorial factor forces a strict inequality 2p < p^r
            p = _smallest_doubling_exponent(family.r, strict=True)
            if p <= p_max:
                return (Status.HOLDS, {"p": p})
            return None
        if isinstance(family, DoubleExp):
            # p = 2 already works; p = 8 gives the clean A = B = 1 witness
            return (Status.HOLDS, {"p": 2, "p_clean": 8})
    return None


# --------------------------------------------------------------------------
# pairwise relations
# --------------------------------------------------------------------------

def _analytic_relation(f1, f2) -> Optional[Relation]:
    """Known growth relation between two built-in families (M = f1 vs N = f2)."""
    if f1 is None or f2 is None or isinstance(f1, Custom) or isinstance(f2, Custom):
        return None

    def rank(f):
        # coarse growth tiers: Gevrey/BJ (factorial type) < LQR/NQR < DoubleExp
        if isinstance(f, (Gevrey, BJSigma)):
            return 0
        if isinstance(f, (LQR, NQR)):
            return 1
        return 2

    r1, r2 = rank(f1), rank(f2)
    if r1 < r2:
        return Relation.LHD
    if r1 > r2:
        return Relation.INCOMPARABLE

    if isinstance(f1, Gevrey) and isinstance(f2, Gevrey):
        if f1.s < f2.s:
            return Relation.LHD
        return Relation.APPROX if f1.s == f2.s else Relation.INCOMPARABLE
    if isinstance(f1, Gevrey) and isinstance(f2, BJSigma):
        # (k!)^s vs k! L(k)^(sigma k): the slowly varying factor wins at s <= 1
        return Relation.LHD if f1.s <= 1 else Relation.INCOMPARABLE
    if isinstance(f1, BJSigma) and isinstance(f2, Gevrey):
        return Relation.LHD if f2.s > 1 else Relation.INCOMPARABLE
    if isinstance(f1, BJSigma) and isinstance(f2, BJSigma):
        if f1.j > f2.j:
            return Relation.LHD
        if f1.j < f2.j:
            return Relation.INCOMPARABLE
        if f1.sigma < f2.sigma:
            return Relation.LHD
        return Relation.APPROX if f1.sigma == f2.sigma else Relation.INCOMPARABLE

    def qr(f):
        return (f.q, f.r, isinstance(f, LQR))

    if isinstance(f1, (LQR, NQR)) and isinstance(f2, (LQR, NQR)):
        q1, rr1, fac1 = qr(f1)
        q2, rr2, fac2 = qr(f2)
        if rr1 < rr2:
            return Relation.LHD
        if rr1 > rr2:
            return Relation.INCOMPARABLE
        if q1 < q2:
            return Relation.LHD
        if q1 > q2:
            return Relation.INCOMPARABLE
        if fac1 == fac2:
            return Relation.APPROX
        # same q, r: the factorial factor separates them strictly
        return Relation.INCOMPARABLE if fac1 else Relation.LHD
    if isinstance(f1, DoubleExp) and isinstance(f2, DoubleExp):
        return Relation.APPROX
    return None


def compare_sequences(M: LogWeightSeq, N: LogWeightSeq) -> RelationReport:
    """Classify the growth relation via the k-th root ratio sequence."""
    if M.K != N.K:
        raise LengthMismatch("sequences must share the truncation index")
    if M.K < 16:
        raise TruncationTooSmall("need common truncation K >= 16")
    ks = M.ks[1:]
    rho = (M.log_terms[1:] - N.log_terms[1:]) / ks
    t = _trend.tail_trend(ks, rho)
    le = bool(np.all(M.log_terms <= N.log_terms + 1e-12))

    # numeric classification
    b = _trend.bounded_above(ks, rho)
    if _trend.diverges_to_minus_inf(ks, rho):
        num_rel = Relation.LHD
    elif b.code == "holds":
        num_rel = Relation.PRECEQ
        b_rev = _trend.bounded_above(ks, -rho)
        if b_rev.code == "holds":
            num_rel = Relation.APPROX
    elif le:
        num_rel = Relation.LE
    else:
        num_rel = Relation.INCOMPARABLE

    limsup = b.bound if b.code == "holds" else math.inf
    liminf = t.tail_min if t.slope >= -_trend.SLOPE_TOL else -math.inf

    analytic = _analytic_relation(M.family, N.family)
    if analytic is not None:
        rel, conf = analytic, Confidence.ANALYTIC
        note = ("analytic family relation",)
    else:
        rel, conf = num_rel, Confidence.NUMERIC
        note = ()
    diag = Diagnostics(estimated_limit=_trend.estimated_limit(t),
                       trend_slope=t.slope, k_range_used=t.k_range,
                       notes=note + (f"numeric relation: {num_rel.value}",))
    return RelationReport(relation=rel, ratio_roots=rho,
                          limsup_estimate=float(limsup), liminf_estimate=float(liminf),
                          confidence=conf, le=le, diagnostics=diag)


# --------------------------------------------------------------------------
# interpolation construction
# --------------------------------------------------------------------------

H_GRID_POINTS = 128
H_GRID_LO, H_GRID_HI = 1e-6, 1e6


def interpolate_sequence(Lp: LogWeightSeq, M: LogWeightSeq) -> LogWeightSeq:
    """Build a log-convex N with Lp <= N termwise and N strictly below M.

    Smoothing step: with log C_h = sup_k (log Lp_k - k log h - log M_k),
    log L_k = inf_h (log C_h + k log h + log M_k) regularises Lp below M;
    the returned sequence is N_k = prod_{j<=k} nu_j with
    nu_k = max(sqrt(mu_k), max_{j<=k} lambda_j), where mu, lambda are the
    quotient sequences of M and L.  nu is increasing by construction, so N
    is exactly log-convex.
    """
    if M.K != Lp.K:
        raise LengthMismatch("sequences must share the truncation index")
    if abs(Lp.log_terms[0]) > 0:
        raise PreconditionViolated("lower sequence must be normalised")
    g1 = build_sequence(Gevrey(1), Lp.K)
    if not compare_sequences(g1, Lp).preceq:
        raise PreconditionViolated("k! must grow no faster than the lower sequence")
    if not compare_sequences(Lp, M).lhd:
        raise PreconditionViolated("lower sequence must be strictly below the upper one")

    ks = M.ks
    logM, logLp = M.log_terms, Lp.log_terms

    def logC_for(logh: np.ndarray) -> np.ndarray:
        # sup_k of logLp_k - k*logh - logM_k, vectorised over the h-grid
        return np.max(logLp[None, :] - np.outer(logh, ks) - logM[None, :], axis=1)

    logh = np.log(np.geomspace(H_GRID_LO, H_GRID_HI, H_GRID_POINTS))
    for _ in range(2):
        logC = logC_for(logh)
        vals = logC[:, None] + np.outer(logh, ks) + logM[None, :]
        arg = np.argmin(vals, axis=0)
        if arg.min() > 0 and arg.max() < logh.size - 1:
            break
        logh = np.log(np.geomspace(H_GRID_LO * 1e-3, H_GRID_HI * 1e3, 4 * H_GRID_POINTS))
    else:
        raise HGridInsufficient("inf over h did not stabilise inside the grid")

    # one refinement pass around the per-k argmin
    lo = logh[np.maximum(arg - 1, 0)]
    hi = logh[np.minimum(arg + 1, logh.size - 1)]
    fine = np.unique(np.concatenate([np.linspace(a, b, 48) for a, b in zip(lo, hi)]))
    logC_f = logC_for(fine)
    vals_f = logC_f[:, None] + np.outer(fine, ks) + logM[None, :]
    logL = np.minimum(np.min(vals, axis=0), np.min(vals_f, axis=0))

    if logL[0] > 1e-9:
        raise HGridInsufficient("normalisation of the smoothed sequence failed; "
                                "widen the h-grid")
    logL[0] = 0.0

    log_lambda = np.diff(logL)
    log_mu = np.diff(logM)
    log_nu = np.maximum(0.5 * log_mu, np.maximum.accumulate(log_lambda))
    logN = np.concatenate([[0.0], np.cumsum(log_nu)])

    # the construction guarantees these exactly; treat failure as a bug
    assert np.all(np.diff(log_nu) >= -1e-12), "nu must be increasing"
    if not np.all(logLp <= logN + 1e-9):
        raise HGridInsufficient("termwise domination failed; widen the h-grid")
    return LogWeightSeq(logN, M.K, None,
                        label=f"interp({Lp.label or 'L'} -> {M.label or 'M'})")


# --------------------------------------------------------------------------
# split inequality
# --------------------------------------------------------------------------

def verify_split_inequality(M: LogWeightSeq, j: int, k: int, ell: int,
                            rho: float, R: float) -> bool:
    """Evaluate rho^j M_{k+l} R^l <= rho^(j+l) M_k + M_{j+k+l} R^(j+l).

    Computed with log-sum-exp on the right-hand side.  For a log-convex
    sequence and rho, R >= 1 this is always true, which makes the routine a
    fuzz oracle for the package's log-domain handling.
    """
    if min(j, k, ell) < 0 or j + k + ell > M.K:
        raise IndexOutOfRange("need j + k + l <= K and nonnegative indices")
    if rho < 1 or R < 1:
        raise OutOfRangeParam("need rho >= 1 and R >= 1")
    lt = M.log_terms
    lhs = j * math.log(rho) + lt[k + ell] + ell * math.log(R)
    rhs = np.logaddexp((j + ell) * math.log(rho) + lt[k],
                       lt[j + k + ell] + (j + ell) * math.log(R))
    return bool(lhs <= rhs + 1e-12)

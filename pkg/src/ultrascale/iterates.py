"""Closed-form regularity-loss maps for iterates of principal-type operators.

The loss index delta is an input descriptor derived from the vanishing order
(its verification from a symbol is analytic and out of scope here), so every
map in this module is exact rational or log-domain arithmetic with no
floating error in the headline values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Union

from . import scales
from .errors import (
    DeltaOutOfRange,
    MissingSupportObject,
    OddVanishingOrder,
    OutOfRangeParam,
)

__all__ = [
    "Elliptic",
    "PrincipalHypoelliptic",
    "OperatorSpec",
    "GevreyClass",
    "QGevreyClass",
    "BJClass",
    "ScaleClass",
    "WeightFnClass",
    "RequiredGrowth",
    "PushforwardStatus",
    "PushforwardResult",
    "subellipticity_delta",
    "gevrey_loss_alpha",
    "loss_map",
    "scale_pushforward_witness",
]


@dataclass(frozen=True)
class Elliptic:
    """Empty characteristic set; no regularity loss."""


@dataclass(frozen=True)
class PrincipalHypoelliptic:
    """Principal type with an even finite vanishing order 2k."""

    vanishing_order: int

    def __post_init__(self):
        v = self.vanishing_order
        if not (isinstance(v, int) and v > 0):
            raise OddVanishingOrder("vanishing order must be a positive integer")
        if v % 2 != 0:
            raise OddVanishingOrder("vanishing order must be even")


CharType = Union[Elliptic, PrincipalHypoelliptic]


@dataclass(frozen=True)
class OperatorSpec:
    """Order and characteristic behaviour of the operator under iteration."""

    order_d: int
    char_type: CharType

    def __post_init__(self):
        if not (isinstance(self.order_d, int) and self.order_d >= 1):
            raise OutOfRangeParam("operator order must be a positive integer")

    @property
    def delta(self) -> Fraction:
        return subellipticity_delta(self)[0]

    @property
    def epsilon(self) -> Fraction:
        return subellipticity_delta(self)[1]

    @property
    def alpha(self) -> Fraction:
        """Dilation factor d / (d - delta) entering every loss map."""
        d = Fraction(self.order_d)
        return d / (d - self.delta)


def subellipticity_delta(spec: OperatorSpec) -> tuple[Fraction, Fraction]:
    """Exact (delta, epsilon): delta = 2k/(2k+1) from the vanishing order."""
    d = Fraction(spec.order_d)
    if isinstance(spec.char_type, Elliptic):
        delta = Fraction(0)
    else:
        two_k = spec.char_type.vanishing_order
        delta = Fraction(two_k, two_k + 1)
    if not (0 <= delta < 1):
        raise DeltaOutOfRange(f"loss index {delta} outside [0, 1)")
    return delta, d - delta


# --------------------------------------------------------------------------
# class descriptors
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GevreyClass:
    s: Union[Fraction, float]


@dataclass(frozen=True)
class QGevreyClass:
    q: float
    r: Union[Fraction, float]
    log_q: Optional[float] = None  # exact log-domain value when mapped

    def __post_init__(self):
        if self.log_q is None:
            object.__setattr__(self, "log_q", math.log(self.q))


@dataclass(frozen=True)
class BJClass:
    j: int
    lam: Union[Fraction, float]


@dataclass(frozen=True)
class ScaleClass:
    genfn: scales.GenFn
    lam: float


@dataclass(frozen=True, eq=False)
class WeightFnClass:
    omega: object  # conjugate.WeightFn
    witnesses: Optional[dict] = None


@dataclass(frozen=True)
class RequiredGrowth:
    """Target growth t -> omega(t^alpha) when no stable weight is claimed."""

    omega: object
    alpha: float

    def __call__(self, t):
        import numpy as np

        t = np.asarray(t, dtype=float)
        return self.omega(t ** self.alpha)


def _exactable(x) -> bool:
    return isinstance(x, Rational)


def gevrey_loss_alpha(s, alpha):
    """Gevrey index map in dilation form: s -> alpha (s - 1) + 1.

    Equivalent to (d s - delta)/(d - delta) with alpha = d/(d - delta); the
    dilation form makes the semigroup law in alpha explicit.
    """
    if _exactable(s) and _exactable(alpha):
        return Fraction(alpha) * (Fraction(s) - 1) + 1
    return float(alpha) * (float(s) - 1.0) + 1.0


class PushforwardStatus(enum.Enum):
    OK = "ok"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class PushforwardResult:
    status: PushforwardStatus
    partner: Optional[float] = None
    gamma: Optional[float] = None
    note: str = ""


def scale_pushforward_witness(genfn: scales.GenFn, lam: float, spec: OperatorSpec,
                              strict_grid: bool = False) -> PushforwardResult:
    """Partner and affine slack absorbing the dilation alpha = d/(d - delta).

    Elliptic specs have alpha = 1 and the identity partner with zero slack.
    A missing partner returns INCONCLUSIVE with the direction hint rather
    than raising.
    """
    alpha = float(spec.alpha)
    if alpha == 1.0:
        return PushforwardResult(PushforwardStatus.OK, partner=float(lam), gamma=0.0,
                                 note="no dilation at loss index 0")
    got = scales.tri_cell_witness(genfn, float(lam), alpha, upward=True,
                                  strict_grid=strict_grid)
    if got is None:
        return PushforwardResult(
            PushforwardStatus.INCONCLUSIVE,
            note=f"no partner certified for alpha={alpha:g}; "
                 "extend the parameter grid upward")
    partner, gamma, off = got
    note = "partner beyond the sampled grid" if off else ""
    return PushforwardResult(PushforwardStatus.OK, partner=partner, gamma=gamma,
                             note=note)


def loss_map(cls, spec: OperatorSpec):
    """Map a regularity class through one application of the loss estimate.

    Returns the descriptor of the target class; the three closed forms are
    exact, the scale form delegates to the dilation-partner search, and the
    weight-function form returns the same weight plus the doubling witness
    when the square-absorption condition holds, otherwise the bare required
    growth without claiming a weight.
    """
    delta, _ = subellipticity_delta(spec)
    alpha = spec.alpha

    if isinstance(cls, GevreyClass):
        return GevreyClass(gevrey_loss_alpha(cls.s, alpha))

    if isinstance(cls, QGevreyClass):
        # log q' = alpha^r log q, exact in log domain
        r = cls.r
        if _exactable(r) and Fraction(r).denominator == 1:
            a_pow = Fraction(alpha) ** int(Fraction(r))
        else:
            a_pow = float(alpha) ** float(r)
        log_q = float(a_pow) * math.log(cls.q)
        return QGevreyClass(math.exp(log_q), r, log_q=log_q)

    if isinstance(cls, BJClass):
        if _exactable(cls.lam):
            return BJClass(cls.j, Fraction(alpha) * Fraction(cls.lam))
        return BJClass(cls.j, float(alpha) * float(cls.lam))

    if isinstance(cls, ScaleClass):
        if cls.genfn is None:
            raise MissingSupportObject("scale form needs its generating function")
        res = scale_pushforward_witness(cls.genfn, cls.lam, spec)
        if res.status is PushforwardStatus.INCONCLUSIVE:
            return res
        return ScaleClass(cls.genfn, float(res.partner))

    if isinstance(cls, WeightFnClass):
        from . import conjugate

        if cls.omega is None:
            raise MissingSupportObject("weight-function form needs its weight")
        xi = conjugate.check_weight_property(cls.omega, conjugate.WeightProperty.XI)
        if xi.holds:
            gen = conjugate.check_weight_property(
                cls.omega, conjugate.WeightProperty.XI_GENERALIZED, gamma=float(alpha))
            return WeightFnClass(cls.omega, witnesses=dict(gen.witnesses))
        return RequiredGrowth(cls.omega, float(alpha))

    raise OutOfRangeParam(f"unknown class descriptor {cls!r}")

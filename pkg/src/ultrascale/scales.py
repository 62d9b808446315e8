"""Generating functions and the dilation/derivation conditions of scales.

A generating function zeta(lam, t) induces the scale log M^lam_k =
log k! + zeta_lam(k) (strong flavour) or zeta_lam(k) (weak flavour).  The
dilation conditions ask for an index partner absorbing zeta_lam(alpha t) up
to an affine term gamma (t + 1); witnesses are found by scanning the sampled
grid from the required side and, because every built-in zeta is a genuine
function of its parameter, the search can continue past the sampled grid on
a deterministic candidate ladder when the partner falls outside it (the
verdict then records that the partner is off-grid).  `strict_grid=True`
restores pure grid semantics: a missing on-grid partner is INCONCLUSIVE
with the direction in which the grid would have to grow.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import gammaln

from . import seqcore, trend as _trend, wmatrix
from .errors import AxiomViolation, GridMismatch, OutOfRangeParam
from .seqcore import (
    Diagnostics,
    LogWeightSeq,
    SeqProperty,
    Status,
    Verdict,
)

__all__ = [
    "GevreyGen",
    "PowerGen",
    "LogIterGen",
    "FromOmega",
    "CustomGen",
    "GenFn",
    "ScaleCondition",
    "ScaleFlavor",
    "ScaleReport",
    "ScalePairReport",
    "make_genfn",
    "scale_to_matrix",
    "check_scale_condition",
    "tri_cell_witness",
    "scale_report",
    "classify_scale_pair",
]


# --------------------------------------------------------------------------
# generating-function kinds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GevreyGen:
    """zeta(lam, t) = lam * t * log t for t > 1, else 0."""


@dataclass(frozen=True)
class PowerGen:
    """zeta(lam, t) = lam * t^r."""

    r: float

    def __post_init__(self):
        if not self.r > 1:
            raise OutOfRangeParam("power generating function needs r > 1")


@dataclass(frozen=True)
class LogIterGen:
    """zeta(lam, t) = lam * t * log^(j+1)(t + e_(j))."""

    j: int

    def __post_init__(self):
        if not (isinstance(self.j, (int, np.integer)) and self.j >= 1):
            raise OutOfRangeParam("iterated-log depth must be a positive integer")


@dataclass(frozen=True)
class FromOmega:
    """zeta(lam, t) = phi*_omega(lam t) / lam."""

    omega: object  # conjugate.WeightFn


@dataclass(frozen=True)
class CustomGen:
    """Arbitrary zeta(lam, t), vectorised in t."""

    fn: Callable[[float, np.ndarray], np.ndarray]
    label: str = "custom"


GenKind = Union[GevreyGen, PowerGen, LogIterGen, FromOmega, CustomGen]


def _zeta_eval(kind: GenKind) -> Callable[[float, np.ndarray], np.ndarray]:
    if isinstance(kind, GevreyGen):
        def z(lam, t):
            t = np.asarray(t, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                v = lam * t * np.log(np.maximum(t, 1.0))
            return np.where(t > 1.0, v, 0.0)
        return z
    if isinstance(kind, PowerGen):
        r = kind.r

        def z(lam, t):
            t = np.asarray(t, dtype=float)
            return lam * np.power(t, r)
        return z
    if isinstance(kind, LogIterGen):
        j = kind.j

        def z(lam, t):
            t = np.asarray(t, dtype=float)
            return lam * t * np.log(seqcore.log_iter_shifted(j, t))
        return z
    if isinstance(kind, FromOmega):
        from . import conjugate

        om = kind.omega

        def z(lam, t):
            t = np.asarray(t, dtype=float)
            vals, _ = conjugate.conjugate_at(om, lam * t)
            return np.asarray(vals) / lam
        return z
    if isinstance(kind, CustomGen):
        fn = kind.fn

        def z(lam, t):
            return np.asarray(fn(lam, np.asarray(t, dtype=float)), dtype=float)
        return z
    raise OutOfRangeParam(f"unknown generating-function kind {kind!r}")


class ScaleFlavor(enum.Enum):
    STRONG = "strong"   # members k! e^(zeta(k))
    WEAK = "weak"       # members e^(zeta(k))


@dataclass(frozen=True)
class GenFn:
    """A generating function together with its sampled parameter grid.

    `axiom_set` records which axiom variant was validated at build time:
    the strong set requires log k + zeta(k) - zeta(k-1) nondecreasing, the
    weak set requires zeta(k) - zeta(k-1) itself nondecreasing (and the
    super-logarithmic growth of zeta(t)/t).
    """

    kind: GenKind
    lambda_grid: np.ndarray
    order_reversed: bool
    axiom_set: ScaleFlavor
    label: str

    def __post_init__(self):
        g = np.asarray(self.lambda_grid, dtype=float)
        object.__setattr__(self, "lambda_grid", g)
        g.setflags(write=False)

    def zeta(self, lam: float, t) -> np.ndarray:
        return _zeta_eval(self.kind)(lam, t)

    def lambda_order(self) -> np.ndarray:
        """Grid values sorted by the declared total order on the index set."""
        return self.lambda_grid[::-1] if self.order_reversed else self.lambda_grid

    def supports_offgrid(self) -> bool:
        return not self.order_reversed


_AXIOM_K = 64


def make_genfn(kind: GenKind, lambda_grid, order_reversed: bool = False,
               axiom_set: ScaleFlavor = ScaleFlavor.STRONG,
               label: str = "") -> GenFn:
    """Validate the generating-function axioms on the sampled grid and wrap.

    Failures carry the violating (lam, k) pair.  The growth axiom
    zeta(t)/t -> inf (or zeta(t)/t - log t -> inf for the weak set) is a
    trend check on a log-spaced sample.
    """
    grid = np.asarray(list(lambda_grid), dtype=float)
    if grid.size < 1:
        raise OutOfRangeParam("lambda grid must be nonempty")
    if grid.size >= 2 and np.any(np.diff(grid) <= 0):
        raise OutOfRangeParam("lambda grid must be strictly increasing")
    z = _zeta_eval(kind)
    ks = np.arange(0, _AXIOM_K + 1, dtype=float)
    tsamp = np.geomspace(1.0, 1e6, 200)
    for lam in grid:
        v0 = float(np.asarray(z(lam, np.array([0.0])))[0])
        if abs(v0) > 1e-12:
            raise AxiomViolation(f"zeta({lam:g}, 0) = {v0:g} != 0")
        vk = np.asarray(z(lam, ks), dtype=float)
        inc = np.diff(vk)
        if axiom_set is ScaleFlavor.STRONG:
            seqv = np.log(ks[1:]) + inc
        else:
            seqv = inc
        bad = np.nonzero(np.diff(seqv) < -1e-9)[0]
        if bad.size:
            raise AxiomViolation(
                f"derivation axiom fails at (lam={lam:g}, k={int(bad[0]) + 2})")
        ratio = np.asarray(z(lam, tsamp), dtype=float) / tsamp
        if axiom_set is ScaleFlavor.WEAK:
            ratio = ratio - np.log(tsamp)
        t = _trend.tail_trend(np.log(tsamp), ratio)
        variation = float(np.max(ratio) - np.min(ratio))
        # only clear violations reject the input: a falling ratio, or one that
        # is exactly constant; deeply iterated logs grow too slowly for any
        # finite sample to certify divergence and must not be refused
        if t.falling or variation <= 1e-12 * max(1.0, abs(float(np.max(ratio)))):
            raise AxiomViolation(f"zeta(lam={lam:g}, t)/t does not grow without bound")
    # monotonicity in the declared order
    ordered = grid[::-1] if order_reversed else grid
    for a, b in zip(ordered, ordered[1:]):
        va = np.asarray(z(a, tsamp))
        vb = np.asarray(z(b, tsamp))
        if not np.all(va <= vb + 1e-9 * np.maximum(1.0, np.abs(vb))):
            raise AxiomViolation(f"zeta is not monotone between lam={a:g} and lam={b:g}")
    if not label:
        label = type(kind).__name__
    return GenFn(kind, grid, order_reversed, axiom_set, label)


def scale_to_matrix(gf: GenFn, K: int, flavor: ScaleFlavor = ScaleFlavor.STRONG
                    ) -> wmatrix.WeightMatrix:
    """Members log M^lam_k = log k! + zeta(k) (strong) or zeta(k) (weak)."""
    ks = np.arange(K + 1, dtype=float)
    seqs = []
    for lam in gf.lambda_grid:
        zk = np.asarray(gf.zeta(lam, ks), dtype=float)
        lt = gammaln(ks + 1.0) + zk if flavor is ScaleFlavor.STRONG else zk.copy()
        lt[0] = 0.0
        seq = LogWeightSeq(lt, K, None, label=f"{gf.label}[{lam:g}]")
        lc = seqcore.check_property(seq, SeqProperty.LOG_CONVEX)
        if not lc.holds:
            k_bad = lc.counterexample[0] if lc.counterexample else -1
            raise AxiomViolation(f"member lam={lam:g} not log-convex at k={k_bad}")
        seqs.append(seq)
    return wmatrix.WeightMatrix.from_sequences(
        gf.lambda_grid, seqs, label=f"{gf.label}-{flavor.value}",
        order_reversed=gf.order_reversed)


# --------------------------------------------------------------------------
# condition checks
# --------------------------------------------------------------------------

class ScaleCondition(enum.Enum):
    SQUARE = "square"          # zeta(p+1) - zeta(p) <= gamma (p+1), same index
    STAR = "star"              # shift absorbed by some other index
    DIAMOND = "diamond"        # shift of some index absorbed by this one
    TRI_RIGHT = "tri_right"    # dilation absorbed upward
    TRI_LEFT = "tri_left"      # dilation absorbed downward
    PSEUDO_HOM = "pseudo_hom"  # dilation partner c a^q lam


DEFAULT_ALPHAS = (1.5, 2.0, 4.0)
T_MAX_DEFAULT = 1e5
_T_SAMPLES = 400
_P_MAX = 200
_LADDER = tuple(2.0 ** m for m in range(1, 13))


def _formula_partner(kind: GenKind, lam: float, alpha: float,
                     upward: bool) -> Optional[float]:
    factor = None
    if isinstance(kind, (GevreyGen, LogIterGen)):
        factor = alpha
    elif isinstance(kind, PowerGen):
        factor = alpha ** kind.r
    elif isinstance(kind, FromOmega):
        factor = alpha ** 2
    if factor is None:
        return None
    return lam * factor if upward else lam / factor


def _cell_gamma(gf: GenFn, left: float, alpha: float, right: float,
                t_max: float) -> tuple[bool, float]:
    """Validated witness gamma for zeta_left(alpha t) <= zeta_right(t) + g(t+1).

    gamma is the supremum of the scaled difference over log-spaced samples of
    [1, t_max]; boundedness of the expression decides the cell, and the
    supremum is then stress-tested on a 10x denser grid.  A supremum within
    float rounding of the right-hand side snaps to exactly zero.
    """
    t = np.geomspace(1.0, t_max, _T_SAMPLES)
    rz = np.asarray(gf.zeta(right, t))
    vals = (np.asarray(gf.zeta(left, alpha * t)) - rz) / (t + 1.0)
    b = _trend.bounded_above(np.log(t), vals)
    if b.code != "holds":
        return False, math.inf
    dense = np.geomspace(1.0, t_max, 10 * _T_SAMPLES)
    rzd = np.asarray(gf.zeta(right, dense))
    dvals = (np.asarray(gf.zeta(left, alpha * dense)) - rzd) / (dense + 1.0)
    gamma = max(0.0, float(np.max(vals)), float(np.max(dvals)))
    roundoff = 1e-13 * max(1.0, float(np.max(np.abs(rzd) / (dense + 1.0))))
    if gamma <= roundoff:
        gamma = 0.0
    return True, gamma


def tri_cell_witness(gf: GenFn, lam: float, alpha: float, upward: bool = True,
                     t_max: float = T_MAX_DEFAULT, strict_grid: bool = False):
    """Deterministic partner search for one dilation cell.

    Scans the sampled grid from the required side (partner at or above `lam`
    in the declared order when upward, at or below otherwise), then the
    closed-form candidate for the function's kind, then a geometric ladder.
    Returns (partner, gamma, off_grid) or None when no partner certifies.
    """
    ordered = gf.lambda_order()
    pos_arr = np.nonzero(np.isclose(ordered, lam))[0]
    if pos_arr.size == 0:
        raise OutOfRangeParam(f"lambda {lam!r} is not on the sampled grid")
    pos = int(pos_arr[0])
    on_grid = ordered[pos:] if upward else ordered[: pos + 1][::-1]

    def cell(cand):
        # upward: the universal index dilates, the partner absorbs;
        # downward: the universal index absorbs a dilated smaller one
        left, right = (lam, cand) if upward else (cand, lam)
        return _cell_gamma(gf, float(left), alpha, float(right), t_max)

    for cand in on_grid:
        ok, gamma = cell(cand)
        if ok:
            return float(cand), gamma, False
    if strict_grid or not gf.supports_offgrid():
        return None
    candidates = []
    f = _formula_partner(gf.kind, lam, alpha, upward)
    if f is not None:
        candidates.append(f)
    edge = float(on_grid[-1]) if on_grid.size else lam
    for m in _LADDER:
        candidates.append(edge * m if upward else edge / m)
    for cand in candidates:
        good_side = (cand >= lam) if upward else (cand <= lam)
        if not good_side or cand <= 0:
            continue
        try:
            ok, gamma = cell(cand)
        except (ValueError, FloatingPointError, OutOfRangeParam):
            continue
        if ok:
            return float(cand), gamma, True
    return None


def _shift_cell(gf: GenFn, lam: float, sigma: float) -> tuple[bool, float]:
    """Witness for zeta_lam(p+1) - zeta_sigma(p) <= gamma (p+1)."""
    p = np.arange(0, _P_MAX + 1, dtype=float)
    vals = (np.asarray(gf.zeta(lam, p + 1.0)) - np.asarray(gf.zeta(sigma, p))) / (p + 1.0)
    b = _trend.bounded_above(p + 1.0, vals)
    if b.code == "holds":
        return True, max(0.0, float(np.max(vals)))
    return False, math.inf


def check_scale_condition(gf: GenFn, cond: ScaleCondition,
                          alpha_grid=DEFAULT_ALPHAS,
                          t_max: float = T_MAX_DEFAULT,
                          strict_grid: bool = False) -> Verdict:
    """Decide one scale condition with per-cell partner witnesses."""
    cells = {}
    notes = []
    if cond is ScaleCondition.SQUARE:
        worst = 0.0
        for lam in gf.lambda_grid:
            ok, gamma = _shift_cell(gf, lam, lam)
            if not ok:
                p = np.arange(0, _P_MAX + 1, dtype=float)
                vals = (np.asarray(gf.zeta(lam, p + 1.0))
                        - np.asarray(gf.zeta(lam, p))) / (p + 1.0)
                k_bad = int(np.argmax(vals))
                return Verdict(Status.FAILS, witnesses={"lambda": float(lam)},
                               counterexample=(float(lam), k_bad),
                               diagnostics=Diagnostics(notes=("shift ratio unbounded",)))
            cells[f"lam={lam:g}"] = {"gamma": gamma}
            worst = max(worst, gamma)
        return Verdict(Status.HOLDS, witnesses={"gamma": worst, "cells": cells},
                       diagnostics=Diagnostics(notes=tuple(notes)))

    if cond in (ScaleCondition.STAR, ScaleCondition.DIAMOND):
        worst = 0.0
        ordered = gf.lambda_order()
        for lam in gf.lambda_grid:
            pos = int(np.nonzero(np.isclose(ordered, lam))[0][0])
            scan = ordered[pos:] if cond is ScaleCondition.STAR else ordered[: pos + 1][::-1]
            found = None
            for sigma in scan:
                a, b = (lam, sigma) if cond is ScaleCondition.STAR else (sigma, lam)
                ok, gamma = _shift_cell(gf, float(a), float(b))
                if ok:
                    found = (float(sigma), gamma)
                    break
            if found is None and not strict_grid and gf.supports_offgrid():
                edge = float(scan[-1]) if scan.size else float(lam)
                for m in _LADDER:
                    cand = edge * m if cond is ScaleCondition.STAR else edge / m
                    a, b = (lam, cand) if cond is ScaleCondition.STAR else (cand, lam)
                    ok, gamma = _shift_cell(gf, float(a), float(b))
                    if ok:
                        found = (cand, gamma)
                        notes.append(f"partner for lam={lam:g} off-grid at {cand:g}")
                        break
            if found is None:
                return Verdict(Status.INCONCLUSIVE,
                               witnesses={"cells": cells},
                               diagnostics=Diagnostics(notes=(
                                   f"no partner for lam={lam:g}; extend the grid "
                                   + ("upward" if cond is ScaleCondition.STAR else "downward"),)))
            cells[f"lam={lam:g}"] = {"partner": found[0], "gamma": found[1]}
            worst = max(worst, found[1])
        return Verdict(Status.HOLDS, witnesses={"gamma": worst, "cells": cells},
                       diagnostics=Diagnostics(notes=tuple(notes)))

    if cond in (ScaleCondition.TRI_RIGHT, ScaleCondition.TRI_LEFT):
        if any(a <= 1 for a in alpha_grid):
            raise OutOfRangeParam("dilation factors must exceed 1")
        upward = cond is ScaleCondition.TRI_RIGHT
        worst = 0.0
        for lam in gf.lambda_grid:
            for alpha in alpha_grid:
                got = tri_cell_witness(gf, float(lam), float(alpha), upward=upward,
                                       t_max=t_max, strict_grid=strict_grid)
                if got is None:
                    return Verdict(Status.INCONCLUSIVE, witnesses={"cells": cells},
                                   diagnostics=Diagnostics(notes=(
                                       f"no partner for lam={lam:g}, alpha={alpha:g}; "
                                       + ("extend the grid upward" if upward
                                          else "extend the grid downward"),)))
                partner, gamma, off = got
                if off:
                    notes.append(f"partner for lam={lam:g}, alpha={alpha:g} "
                                 f"off-grid at {partner:g}")
                cells[f"lam={lam:g},alpha={alpha:g}"] = {"partner": partner, "gamma": gamma}
                worst = max(worst, gamma)
        return Verdict(Status.HOLDS, witnesses={"gamma": worst, "cells": cells},
                       diagnostics=Diagnostics(notes=tuple(notes)))

    if cond is ScaleCondition.PSEUDO_HOM:
        if any(a <= 1 for a in alpha_grid):
            raise OutOfRangeParam("dilation factors must exceed 1")
        q_candidates = [1.0, 1.5, 2.0, 2.5, 3.0, 4.0]
        if isinstance(gf.kind, PowerGen) and gf.kind.r not in q_candidates:
            q_candidates.append(gf.kind.r)
            q_candidates.sort()
        # prefer witnesses with no constant inflation: scan c before q so the
        # first certified pair is the structurally smallest one
        for c in (1.0, 2.0, 4.0):
            for q in q_candidates:
                ok_all = True
                worst = 0.0
                trial = {}
                for lam in gf.lambda_grid:
                    for alpha in alpha_grid:
                        partner = c * alpha ** q * float(lam)
                        ok, gamma = _cell_gamma(gf, float(lam), float(alpha),
                                                partner, t_max)
                        if not ok:
                            ok_all = False
                            break
                        trial[f"lam={lam:g},alpha={alpha:g}"] = {
                            "partner": partner, "gamma": gamma}
                        worst = max(worst, gamma)
                    if not ok_all:
                        break
                if ok_all:
                    return Verdict(Status.HOLDS,
                                   witnesses={"c": c, "q": q, "gamma": worst,
                                              "cells": trial},
                                   diagnostics=Diagnostics(notes=tuple(notes)))
        return Verdict(Status.FAILS,
                       counterexample=(float(gf.lambda_grid[0]), float(alpha_grid[0])),
                       diagnostics=Diagnostics(notes=("no (c, q) candidate certified "
                                                      "the dilation bound",)))

    raise ValueError(f"unknown scale condition {cond!r}")


@dataclass(frozen=True)
class ScaleReport:
    """All condition verdicts for one generating function, with derived flags."""

    square: Verdict
    star: Verdict
    diamond: Verdict
    tri_right: Verdict
    tri_left: Verdict
    pseudo_hom: Verdict

    @property
    def fitting(self) -> bool:
        return self.square.holds and self.tri_right.holds

    @property
    def apposite(self) -> bool:
        return self.square.holds and self.tri_left.holds

    @property
    def r_admissible(self) -> bool:
        return self.star.holds and self.tri_right.holds

    @property
    def b_admissible(self) -> bool:
        return self.diamond.holds and self.tri_left.holds

    def to_dict(self) -> dict:
        return {
            "square": self.square.to_dict(),
            "star": self.star.to_dict(),
            "diamond": self.diamond.to_dict(),
            "tri_right": self.tri_right.to_dict(),
            "tri_left": self.tri_left.to_dict(),
            "pseudo_hom": self.pseudo_hom.to_dict(),
            "fitting": self.fitting,
            "apposite": self.apposite,
            "r_admissible": self.r_admissible,
            "b_admissible": self.b_admissible,
        }


def scale_report(gf: GenFn, alpha_grid=DEFAULT_ALPHAS,
                 t_max: float = T_MAX_DEFAULT) -> ScaleReport:
    return ScaleReport(
        square=check_scale_condition(gf, ScaleCondition.SQUARE),
        star=check_scale_condition(gf, ScaleCondition.STAR),
        diamond=check_scale_condition(gf, ScaleCondition.DIAMOND),
        tri_right=check_scale_condition(gf, ScaleCondition.TRI_RIGHT, alpha_grid, t_max),
        tri_left=check_scale_condition(gf, ScaleCondition.TRI_LEFT, alpha_grid, t_max),
        pseudo_hom=check_scale_condition(gf, ScaleCondition.PSEUDO_HOM, alpha_grid, t_max),
    )


# --------------------------------------------------------------------------
# two-scale comparison
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalePairReport:
    matrix_relations: dict
    mixed_roumieu: Verdict
    mixed_beurling: Verdict
    comparable: Verdict

    def to_dict(self) -> dict:
        return {
            "matrix_relations": {k: v.to_dict() for k, v in self.matrix_relations.items()},
            "mixed_roumieu": self.mixed_roumieu.to_dict(),
            "mixed_beurling": self.mixed_beurling.to_dict(),
            "comparable": self.comparable.to_dict(),
        }


def _phi_gap(zeta: GenFn, eta: GenFn, lam: float, ups: float, t: np.ndarray) -> np.ndarray:
    return (np.asarray(zeta.zeta(lam, t)) - np.asarray(eta.zeta(ups, t))) / t


def classify_scale_pair(zeta: GenFn, eta: GenFn, alpha: float,
                        t_max: float = T_MAX_DEFAULT) -> ScalePairReport:
    """Bracket relations, mixed dilation conditions and comparability.

    All quantifiers run over the two sampled grids; the mixed conditions use
    on-grid partners only (choose grids accordingly).
    """
    if alpha <= 1:
        raise OutOfRangeParam("dilation factor must exceed 1")
    # existential scans run in natural ascending grid order, which makes the
    # reported partner the nearest workable one and keeps witnesses stable
    t = np.geomspace(1.0, t_max, _T_SAMPLES)
    logt = np.log(t)
    zl = zeta.lambda_grid
    el = eta.lambda_grid

    def gap_bounded(lam, ups):
        return _trend.bounded_above(logt, _phi_gap(zeta, eta, lam, ups, t))

    # {preceq}: forall lam exists upsilon with bounded gap
    rou_pairs = {}
    rou_ok = True
    for lam in zl:
        hit = next((u for u in el if gap_bounded(float(lam), float(u)).code == "holds"), None)
        if hit is None:
            rou_ok = False
            break
        rou_pairs[f"{lam:g}"] = float(hit)
    # (preceq): forall upsilon exists lam
    beu_pairs = {}
    beu_ok = True
    for u in el:
        hit = next((l for l in zl if gap_bounded(float(l), float(u)).code == "holds"), None)
        if hit is None:
            beu_ok = False
            break
        beu_pairs[f"{u:g}"] = float(hit)
    # {lhd): all pairs diverge to -inf
    lhd_ok = all(
        _trend.diverges_to_minus_inf(logt, _phi_gap(zeta, eta, float(l), float(u), t))
        for l in zl for u in el)
    grid_note = ("relations computed on sampled grids",)
    matrix_relations = {
        "rou_preceq": Verdict(Status.HOLDS if rou_ok else Status.INCONCLUSIVE,
                              witnesses={"pairing": rou_pairs},
                              diagnostics=Diagnostics(notes=grid_note)),
        "beu_preceq": Verdict(Status.HOLDS if beu_ok else Status.INCONCLUSIVE,
                              witnesses={"pairing": beu_pairs},
                              diagnostics=Diagnostics(notes=grid_note)),
        "rou_lhd_beu": Verdict(Status.HOLDS if lhd_ok else Status.FAILS,
                               diagnostics=Diagnostics(notes=grid_note)),
    }

    def mixed_cell(lam, ups):
        vals = (np.asarray(zeta.zeta(lam, alpha * t)) - np.asarray(eta.zeta(ups, t))) / (t + 1.0)
        b = _trend.bounded_above(logt, vals)
        if b.code != "holds":
            return None
        return max(0.0, float(np.max(vals)))

    pair_r = {}
    ok_r = True
    for lam in zl:
        hit = None
        for u in el:
            g = mixed_cell(float(lam), float(u))
            if g is not None:
                hit = (float(u), g)
                break
        if hit is None:
            ok_r = False
            break
        pair_r[f"{lam:g}"] = {"partner": hit[0], "gamma": hit[1]}
    mixed_roumieu = Verdict(
        Status.HOLDS if ok_r else Status.INCONCLUSIVE,
        witnesses={"alpha": alpha, "pairing": pair_r},
        diagnostics=Diagnostics(notes=grid_note))

    pair_b = {}
    ok_b = True
    for u in el:
        hit = None
        for lam in zl:
            g = mixed_cell(float(lam), float(u))
            if g is not None:
                hit = (float(lam), g)
                break
        if hit is None:
            ok_b = False
            break
        pair_b[f"{u:g}"] = {"partner": hit[0], "gamma": hit[1]}
    mixed_beurling = Verdict(
        Status.HOLDS if ok_b else Status.INCONCLUSIVE,
        witnesses={"alpha": alpha, "pairing": pair_b},
        diagnostics=Diagnostics(notes=grid_note))

    if zeta.lambda_grid.size != eta.lambda_grid.size:
        raise GridMismatch("comparability needs equal-length grids")
    comp_ok = True
    for lam, u in zip(zl, el):
        gap = _phi_gap(zeta, eta, float(lam), float(u), t)
        up = _trend.bounded_above(logt, gap)
        dn = _trend.bounded_above(logt, -gap)
        if up.code != "holds" or dn.code != "holds":
            comp_ok = False
            break
    comparable = Verdict(Status.HOLDS if comp_ok else Status.FAILS,
                         witnesses={"pairing": "identity on the ordered grids"},
                         diagnostics=Diagnostics(notes=grid_note))
    return ScalePairReport(matrix_relations, mixed_roumieu, mixed_beurling, comparable)

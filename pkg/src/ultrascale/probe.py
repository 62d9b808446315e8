"""Spectral growth experiments on periodic grids.

Constant-coefficient operators applied through their Fourier symbols make
every iterate exact in spectral space, so measured norm growth is oracle
checkable.  All spectral magnitudes are kept in log domain per mode and
norms are assembled by log-sum-exp: iterate norms span thousands of orders
of magnitude by k = 50 and must never touch linear floating point.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln

from . import seqcore
from .errors import (
    DegenerateData,
    EmptyField,
    EpsilonOutOfRange,
    OutOfRangeParam,
    QuadratureNotConverged,
    WindowTooNarrow,
    ZeroPrincipalPart,
)

__all__ = [
    "SymbolOp",
    "EllipticityReport",
    "GridField",
    "GrowthFit",
    "QuadSpec",
    "BumpSpec",
    "MetivierParams",
    "MetivierVector",
    "build_operator",
    "field_from_modes",
    "iterate_norms",
    "apply_symbol",
    "fit_growth",
    "gaussian_mellin_check",
    "epsilon_bound",
    "construct_metivier_vector",
    "directional_growth_check",
    "export_norms_csv",
]

TWO_PI = 2.0 * math.pi


# --------------------------------------------------------------------------
# symbols and operators
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SymbolOp:
    """Constant-coefficient operator as a polynomial Fourier symbol."""

    dim: int
    coeffs: dict
    order_d: int

    def symbol(self, *xi) -> np.ndarray:
        """p(xi) = sum over multi-indices of a_alpha xi^alpha."""
        acc = np.zeros(np.broadcast(*xi).shape, dtype=complex)
        for alpha, a in self.coeffs.items():
            term = np.ones_like(acc)
            for x, e in zip(xi, alpha):
                term = term * np.asarray(x, dtype=float) ** e
            acc = acc + a * term
        return acc

    def principal(self, *xi) -> np.ndarray:
        acc = np.zeros(np.broadcast(*xi).shape, dtype=complex)
        for alpha, a in self.coeffs.items():
            if sum(alpha) != self.order_d:
                continue
            term = np.ones_like(acc)
            for x, e in zip(xi, alpha):
                term = term * np.asarray(x, dtype=float) ** e
            acc = acc + a * term
        return acc


@dataclass(frozen=True)
class EllipticityReport:
    elliptic: bool
    min_abs: float
    max_abs: float
    char_direction: Optional[tuple] = None


def _normalize_coeffs(coeffs: dict, dim: int) -> dict:
    out = {}
    for alpha, a in coeffs.items():
        if isinstance(alpha, int):
            alpha = (alpha,)
        alpha = tuple(int(e) for e in alpha)
        if len(alpha) != dim or any(e < 0 for e in alpha):
            raise OutOfRangeParam(f"bad multi-index {alpha!r} for dim {dim}")
        if a != 0:
            out[alpha] = complex(a)
    return out


def build_operator(coeffs: dict, dim: int, n_directions: int = 1440
                   ) -> tuple[SymbolOp, EllipticityReport]:
    """Wrap a coefficient table and sample its principal part on the sphere."""
    if dim not in (1, 2):
        raise OutOfRangeParam("only dimensions 1 and 2 are supported")
    table = _normalize_coeffs(coeffs, dim)
    if not table:
        raise ZeroPrincipalPart("empty coefficient table")
    d = max(sum(a) for a in table)
    op = SymbolOp(dim, table, d)
    if dim == 1:
        dirs = np.array([[1.0], [-1.0]])
    else:
        th = np.linspace(0.0, TWO_PI, max(720, n_directions), endpoint=False)
        dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
    vals = np.abs(op.principal(*(dirs[:, i] for i in range(dim))))
    vmax = float(np.max(vals))
    if vmax == 0.0:
        raise ZeroPrincipalPart("principal part vanishes identically")
    vmin = float(np.min(vals))
    elliptic = vmin > 1e-12 * vmax
    char_dir = None
    if not elliptic:
        i = int(np.argmin(vals))
        char_dir = tuple(float(x) for x in dirs[i])
    return op, EllipticityReport(elliptic, vmin, vmax, char_dir)


# --------------------------------------------------------------------------
# periodic grid fields
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GridField:
    """Complex samples on the uniform grid over [0, 2pi)^dim."""

    dim: int
    n: int
    samples: np.ndarray

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise OutOfRangeParam("only dimensions 1 and 2 are supported")
        if self.n < 2 or (self.n & (self.n - 1)) != 0:
            raise OutOfRangeParam("points per axis must be a power of two")
        s = np.asarray(self.samples, dtype=complex)
        expect = (self.n,) if self.dim == 1 else (self.n, self.n)
        if s.shape != expect:
            raise OutOfRangeParam(f"samples must have shape {expect}")
        object.__setattr__(self, "samples", s)
        s.setflags(write=False)

    @cached_property
    def spectrum(self) -> np.ndarray:
        """Fourier coefficients c_xi (DFT normalised by the point count)."""
        return np.fft.fftn(self.samples) / self.samples.size

    @cached_property
    def wavenumbers(self):
        k = (np.fft.fftfreq(self.n) * self.n).astype(int)
        if self.dim == 1:
            return (k,)
        return tuple(np.meshgrid(k, k, indexing="ij"))

    def l2_grid(self) -> float:
        return math.sqrt(TWO_PI ** self.dim * float(np.mean(np.abs(self.samples) ** 2)))

    def l2_spectral(self) -> float:
        return math.sqrt(TWO_PI ** self.dim * float(np.sum(np.abs(self.spectrum) ** 2)))

    def parseval_gap(self) -> float:
        a, b = self.l2_grid(), self.l2_spectral()
        return abs(a - b) / max(a, b, 1e-300)


def field_from_modes(dim: int, n: int, modes: dict) -> GridField:
    """Trig polynomial sum of c * e^(i m.x) given as {mode index: coefficient}.

    The spectrum of the construction is known exactly, so it is attached to
    the field directly: a transform round trip would plant O(1e-16) ghosts in
    every mode, and high-frequency ghosts get amplified by symbol powers
    faster than the real modes.
    """
    shape = (n,) if dim == 1 else (n, n)
    spec = np.zeros(shape, dtype=complex)
    for m, c in modes.items():
        if isinstance(m, int):
            m = (m,)
        m = tuple(int(x) for x in m)
        if len(m) != dim or any(abs(x) >= n // 2 for x in m):
            raise OutOfRangeParam(f"mode {m!r} outside the representable band")
        spec[tuple(x % n for x in m)] = c
    samples = np.fft.ifftn(spec) * spec.size
    out = GridField(dim, n, samples)
    out.__dict__["spectrum"] = spec  # exact by construction
    return out


def apply_symbol(u: GridField, P: SymbolOp) -> GridField:
    """One exact application of the operator in spectral space."""
    if P.dim != u.dim:
        raise OutOfRangeParam("dimension mismatch")
    p = P.symbol(*u.wavenumbers)
    new_spec = u.spectrum * p
    samples = np.fft.ifftn(new_spec) * new_spec.size
    return GridField(u.dim, u.n, samples)


def iterate_norms(u: GridField, P: SymbolOp, K_iter: int) -> np.ndarray:
    """log of the L2 norms of the operator iterates, k = 0..K_iter.

    Per mode the k-th iterate has magnitude |c| |p|^k, so the log norm is a
    log-sum-exp over modes; no iterate is ever materialised in linear scale.
    """
    if P.dim != u.dim:
        raise OutOfRangeParam("dimension mismatch")
    c = u.spectrum.ravel()
    mag = np.abs(c)
    if not np.any(mag > 0):
        raise EmptyField("field is identically zero")
    p = np.abs(P.symbol(*u.wavenumbers)).ravel()
    keep = mag > 0
    with np.errstate(divide="ignore"):
        logmag = np.log(mag[keep])
        logp = np.log(p[keep])  # -inf on characteristic modes is correct
    out = np.empty(K_iter + 1)
    base = u.dim * math.log(TWO_PI)
    for k in range(K_iter + 1):
        # k = 0 must leave characteristic modes (log|p| = -inf) untouched
        terms = 2.0 * logmag if k == 0 else 2.0 * (logmag + k * logp)
        m = np.max(terms)
        if m == -math.inf:
            out[k] = -math.inf
        else:
            out[k] = 0.5 * (base + m + math.log(np.sum(np.exp(terms - m))))
    return out


def export_norms_csv(log_norms, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "log_norm"])
        for k, v in enumerate(log_norms):
            w.writerow([k, repr(float(v))])


# --------------------------------------------------------------------------
# growth fitting
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthFit:
    family: object
    h: float
    C: float
    residual: float
    k_range: tuple[int, int]
    geometric_flag: bool = False


_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, lo: float, hi: float, iters: int = 80) -> float:
    a, b = lo, hi
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _lsq_residual(y, design) -> tuple[float, np.ndarray]:
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    r = y - design @ coef
    return float(np.sqrt(np.mean(r ** 2))), coef


GEVREY_S_LO, GEVREY_S_HI = 0.05, 6.0


def _fit_one(name: str, ks: np.ndarray, y: np.ndarray, d: int) -> GrowthFit:
    dk = d * ks
    ones = np.ones_like(y)

    if name == "gevrey":
        lg = gammaln(dk + 1.0)

        def res_at(s):
            return _lsq_residual(y - s * lg, np.stack([ones, ks], axis=1))[0]
        s = _golden_min(res_at, GEVREY_S_LO, GEVREY_S_HI)
        resid, coef = _lsq_residual(y - s * lg, np.stack([ones, ks], axis=1))
        fam = seqcore.Gevrey(max(s, GEVREY_S_LO))
        flag = s <= GEVREY_S_LO * 1.2
        return GrowthFit(fam, math.exp(coef[1] / d), math.exp(coef[0]), resid,
                         (int(ks[0]), int(ks[-1])), geometric_flag=flag)

    if name in ("lqr", "nqr"):
        lg = gammaln(dk + 1.0) if name == "lqr" else np.zeros_like(y)

        def res_r(r):
            design = np.stack([ones, ks, dk ** r], axis=1)
            return _lsq_residual(y - lg, design)[0]
        r = _golden_min(res_r, 1.05, 3.0)
        design = np.stack([ones, ks, dk ** r], axis=1)
        resid, coef = _lsq_residual(y - lg, design)
        logq = max(coef[2], 1e-9)
        fam_cls = seqcore.LQR if name == "lqr" else seqcore.NQR
        fam = fam_cls(q=math.exp(min(logq, 700.0)), r=r)
        # a vanishing fitted log q means no superexponential content at all
        flag = coef[2] <= 1e-6
        return GrowthFit(fam, math.exp(coef[1] / d), math.exp(coef[0]), resid,
                         (int(ks[0]), int(ks[-1])), geometric_flag=flag)

    if name == "bj":
        best = None
        for j in (1, 2):
            ll = dk * np.log(seqcore.log_iter_shifted(j, dk))
            design = np.stack([ones, ks, ll], axis=1)
            resid, coef = _lsq_residual(y - gammaln(dk + 1.0), design)
            sigma = max(float(coef[2]), 1e-6)
            fit = GrowthFit(seqcore.BJSigma(j, sigma), math.exp(coef[1] / d),
                            math.exp(coef[0]), resid, (int(ks[0]), int(ks[-1])))
            if best is None or fit.residual < best.residual:
                best = fit
        return best

    if name == "double_exp":
        ex = np.where(dk == 0, 0.0, np.exp(np.minimum(dk, 700.0)))
        resid, coef = _lsq_residual(y - ex, np.stack([ones, ks], axis=1))
        return GrowthFit(seqcore.DoubleExp(), math.exp(coef[1] / d),
                         math.exp(min(coef[0], 700.0)), resid,
                         (int(ks[0]), int(ks[-1])))

    raise OutOfRangeParam(f"unknown growth hypothesis {name!r}")


DEFAULT_HYPOTHESES = ("gevrey", "lqr", "nqr", "double_exp")


def fit_growth(log_norms, d: int, candidates: Sequence[str] = DEFAULT_HYPOTHESES
               ) -> tuple[GrowthFit, list[GrowthFit]]:
    """Least-squares inversion of the growth model log C + dk log h + log M_dk.

    For each hypothesis the free family parameter is found by golden-section
    on the least-squares residual of the remaining linear fit.  Returns the
    best fit and the full ranking by residual.
    """
    y = np.asarray(log_norms, dtype=float)
    ks = np.arange(y.size, dtype=float)
    usable = np.isfinite(y)
    if int(np.count_nonzero(usable)) < 8:
        raise DegenerateData("need at least 8 finite norm samples")
    y, ks = y[usable], ks[usable]
    fits = [_fit_one(name, ks, y, d) for name in candidates]
    ranking = sorted(fits, key=lambda f: f.residual)
    best = ranking[0]
    gev = next((f for f in fits if isinstance(f.family, seqcore.Gevrey)), None)
    if gev is not None and gev.geometric_flag and not best.geometric_flag:
        best = dataclasses.replace(best, geometric_flag=True)
    return best, ranking


# --------------------------------------------------------------------------
# Gauss-Kronrod quadrature in log domain
# --------------------------------------------------------------------------

# 15-point Kronrod nodes with embedded 7-point Gauss weights
_GK_NODES = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813,
])
_GK_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
])
_GK_WG = np.array([
    0.0, 0.129484966168870, 0.0, 0.279705391489277, 0.0,
    0.381830050505119, 0.0, 0.417959183673469, 0.0,
    0.381830050505119, 0.0, 0.279705391489277, 0.0,
    0.129484966168870, 0.0,
])


def _log_panel(logf, a: float, b: float) -> tuple[float, float]:
    """(log K15, log G7) of a positive integrand given by its log."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    lf = np.asarray(logf(mid + half * _GK_NODES), dtype=float) + math.log(half)
    m = float(np.max(lf))
    if m == -math.inf:
        return -math.inf, -math.inf
    ek = float(np.sum(_GK_WK * np.exp(lf - m)))
    eg = float(np.sum(_GK_WG * np.exp(lf - m)))
    return m + math.log(ek), m + math.log(max(eg, 1e-300))


def log_integral_gk(logf, a: float, b: float, tol: float = 1e-12,
                    max_depth: int = 14, fixed_panels: Optional[int] = None) -> float:
    """Adaptive log-domain Gauss-Kronrod integral of exp(logf) over [a, b].

    With fixed_panels set, uses a uniform composite rule instead (useful for
    convergence studies where the density is controlled externally).
    """
    if fixed_panels is not None:
        edges = np.linspace(a, b, fixed_panels + 1)
        logs = [_log_panel(logf, lo, hi)[0] for lo, hi in zip(edges[:-1], edges[1:])]
        m = max(logs)
        if m == -math.inf:
            return -math.inf
        return m + math.log(sum(math.exp(x - m) for x in logs))

    out: list[float] = []

    def recurse(lo, hi, depth):
        lk, lg = _log_panel(logf, lo, hi)
        if lk == -math.inf:
            out.append(lk)
            return
        err = abs(math.exp(min(lg - lk, 50.0)) - 1.0) if lg > -math.inf else 1.0
        if err < tol or depth >= max_depth:
            if err >= tol and depth >= max_depth:
                raise QuadratureNotConverged(
                    f"panel [{lo:g}, {hi:g}] error {err:.2e} above tolerance {tol:g}")
            out.append(lk)
            return
        mid = 0.5 * (lo + hi)
        recurse(lo, mid, depth + 1)
        recurse(mid, hi, depth + 1)

    recurse(a, b, 0)
    m = max(out)
    if m == -math.inf:
        return -math.inf
    return m + math.log(sum(math.exp(x - m) for x in out))


# --------------------------------------------------------------------------
# Gaussian-Mellin identity
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadSpec:
    window_sigmas: float = 9.0
    tol: float = 1e-12
    max_depth: int = 14
    fixed_panels: Optional[int] = None
    tail_bound: float = 1e-15


def gaussian_mellin_check(lam: float, k_max: int, quad: QuadSpec = QuadSpec()) -> float:
    """Max relative log error of the moment identity of the log-Gaussian kernel.

    The k-th moment integral of (4 pi lam)^(-1/2) exp(-(log t)^2 / (4 lam))
    reduces, in s = log t, to a Gaussian whose closed form is exp(lam k^2);
    the quadrature value is compared against that in log domain.  The
    discarded Gaussian tail outside the window is bounded analytically and
    must stay below quad.tail_bound.
    """
    if lam <= 0:
        raise OutOfRangeParam("kernel parameter must be positive")
    if k_max < 1:
        raise OutOfRangeParam("need k_max >= 1")
    tail_rel = math.erfc(quad.window_sigmas / math.sqrt(2.0))
    if tail_rel > quad.tail_bound:
        raise WindowTooNarrow(
            f"window of {quad.window_sigmas:g} sigmas leaves relative tail mass "
            f"{tail_rel:.2e} > {quad.tail_bound:g}")
    pref = -0.5 * math.log(4.0 * math.pi * lam)
    worst = 0.0
    width = quad.window_sigmas * math.sqrt(2.0 * lam)
    for k in range(1, k_max + 1):
        center = 2.0 * lam * k

        def logf(s, _k=k):
            s = np.asarray(s, dtype=float)
            return _k * s - s * s / (4.0 * lam) + pref

        val = log_integral_gk(logf, center - width, center + width,
                              tol=quad.tol, max_depth=quad.max_depth,
                              fixed_panels=quad.fixed_panels)
        exact = lam * k * k
        err = abs(val - exact) / max(1.0, abs(exact))
        worst = max(worst, err)
    return worst


# --------------------------------------------------------------------------
# localized oscillatory vector construction
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BumpSpec:
    """Smooth plateau bump: 1 on [-radius, radius], 0 outside [-2r, 2r]."""

    radius: float = 1.0

    def __call__(self, y) -> np.ndarray:
        y = np.abs(np.asarray(y, dtype=float)) / self.radius
        # smooth step between the plateau edge (1) and the support edge (2)
        a = np.clip(2.0 - y, 0.0, 1.0)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            ga = np.where(a > 0, np.exp(-1.0 / np.maximum(a, 1e-300)), 0.0)
            gb = np.where(1 - a > 0, np.exp(-1.0 / np.maximum(1.0 - a, 1e-300)), 0.0)
        return ga / (ga + gb + 1e-300)


def epsilon_bound(d: int, lam: float, lam0: float) -> float:
    """Largest admissible localisation exponent for the construction."""
    if not 0 < lam0 < lam:
        raise OutOfRangeParam("need 0 < lam0 < lam")
    root = math.sqrt(lam - lam0)
    return d * root / (root + math.sqrt(lam) * (2 * d - 1))


@dataclass(frozen=True)
class MetivierParams:
    """Parameters of the localized oscillatory vector along one direction."""

    lam0: float
    lam: float
    lam_prime: float
    eps: float
    d: int = 1
    xi0: float = 1.0
    bump: BumpSpec = field(default_factory=BumpSpec)
    x0: float = 0.0

    def __post_init__(self):
        if not 0 < self.lam0 < self.lam:
            raise OutOfRangeParam("need 0 < lam0 < lam")
        if self.lam_prime <= 0:
            raise OutOfRangeParam("need lam_prime > 0")
        bound = epsilon_bound(self.d, self.lam, self.lam0)
        if not 0 < self.eps <= bound:
            raise EpsilonOutOfRange(
                f"eps = {self.eps:g} outside (0, {bound:.6f}]")


@dataclass(frozen=True)
class MetivierVector:
    x_grid: np.ndarray
    values: np.ndarray
    truncation_s: float
    quad_error: float
    notes: tuple


def _theta_log(s: np.ndarray, lam: float) -> np.ndarray:
    return -0.5 * math.log(4.0 * math.pi * lam) - s * s / (4.0 * lam)


def _complex_panel(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fv = np.asarray(f(mid + half * _GK_NODES), dtype=complex)
    k15 = half * np.sum(_GK_WK * fv)
    g7 = half * np.sum(_GK_WG * fv)
    return k15, abs(k15 - g7)


def _complex_adaptive(f, a, b, tol, max_depth):
    total = 0.0 + 0.0j
    err_total = 0.0
    stack = [(a, b, 0)]
    while stack:
        lo, hi, depth = stack.pop()
        val, err = _complex_panel(f, lo, hi)
        scale = max(abs(val), 1e-30)
        if err <= tol * scale or depth >= max_depth:
            if err > 10.0 * tol * max(scale, 1.0) and depth >= max_depth:
                raise QuadratureNotConverged(
                    f"oscillatory panel [{lo:g}, {hi:g}] failed to converge")
            total += val
            err_total += err
        else:
            mid = 0.5 * (lo + hi)
            stack.append((lo, mid, depth + 1))
            stack.append((mid, hi, depth + 1))
    return total, err_total


def construct_metivier_vector(params: MetivierParams, x_grid,
                              tol: float = 1e-10, max_depth: int = 18,
                              t_truncate: Optional[float] = None) -> MetivierVector:
    """Sample u(x) = integral over t >= 1 of the localized oscillating kernel.

    In s = log t the integrand is bump(e^(eps s) dx) Theta(e^s) e^(i dx xi0 e^s) e^s
    with dx = x - x0.  The bump support cuts the integral at
    s = log(2 radius / |dx|)/eps, the log-Gaussian kernel at its 1e-16 decay
    point; whichever is smaller truncates the quadrature, and the discarded
    kernel tail is bounded analytically.
    """
    lp = params.lam_prime
    x_grid = np.asarray(x_grid, dtype=float)
    s_kernel = 2.0 * lp + math.sqrt(4.0 * lp * (37.0 + lp)) + 1.0
    if t_truncate is not None:
        s_user = math.log(t_truncate) if t_truncate > 0 else -math.inf
        peak_log = _theta_log(np.array([min(2.0 * lp, s_user)]), lp)[0]
        cut_log = _theta_log(np.array([s_user]), lp)[0] + s_user
        if s_user < s_kernel and cut_log - peak_log > math.log(1e-12):
            raise QuadratureNotConverged(
                "requested truncation discards non-negligible kernel mass")
        s_kernel = min(s_kernel, s_user)
    notes = []
    if not (params.lam < lp < params.d ** 2 * params.lam / (params.d - params.eps) ** 2):
        notes.append("kernel parameter outside the convergence window of the "
                     "full growth argument; construction still sampled")
    vals = np.empty(x_grid.size, dtype=complex)
    err_total = 0.0
    for i, x in enumerate(x_grid):
        dx = x - params.x0
        if dx == 0.0:
            def f0(s):
                s = np.asarray(s, dtype=float)
                return np.exp(_theta_log(s, lp) + s).astype(complex)
            v, e = _complex_adaptive(f0, 0.0, s_kernel, tol, max_depth)
            vals[i] = v
            err_total = max(err_total, e)
            continue
        s_bump = math.log(max(2.0 * params.bump.radius / abs(dx), 1e-300)) / params.eps
        s_hi = min(s_kernel, s_bump)
        if s_hi <= 0:
            vals[i] = 0.0
            continue

        def f(s, _dx=dx):
            s = np.asarray(s, dtype=float)
            t = np.exp(s)
            amp = params.bump(t ** params.eps * _dx) * np.exp(_theta_log(s, lp) + s)
            return amp * np.exp(1j * _dx * params.xi0 * t)

        v, e = _complex_adaptive(f, 0.0, s_hi, tol, max_depth)
        vals[i] = v
        err_total = max(err_total, e)
    return MetivierVector(x_grid, vals, s_kernel, err_total, tuple(notes))


def directional_growth_check(params: MetivierParams, k_max: int,
                             quad: QuadSpec = QuadSpec()) -> np.ndarray:
    """Ratios r_k of the k-th directional derivative at the center against
    the full moment of the kernel.

    Differentiation happens under the integral (each derivative pulls down a
    factor t), so r_k = integral over t >= 1 of t^k Theta / exp(lam' (k+1)^2).
    The missing [0, 1] piece vanishes as k grows, hence r_k increases to 1.
    """
    lp = params.lam_prime
    out = np.empty(k_max + 1)
    width = quad.window_sigmas * math.sqrt(2.0 * lp)
    for k in range(k_max + 1):
        center = 2.0 * lp * (k + 1)

        def logf(s, _k=k):
            s = np.asarray(s, dtype=float)
            return (_k + 1.0) * s - s * s / (4.0 * lp) - 0.5 * math.log(4.0 * math.pi * lp)

        hi = max(center + width, width)
        log_num = log_integral_gk(logf, 0.0, hi, tol=quad.tol,
                                  max_depth=quad.max_depth)
        out[k] = math.exp(log_num - lp * (k + 1.0) ** 2)
    return out

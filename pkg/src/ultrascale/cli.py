"""Declarative front door: parse a job config, dispatch, emit reports.

A config is a JSON document with named object declarations and an ordered
task list.  All numerics are literal (no expressions), every task must
reference declared objects, and identical configs produce byte-identical
JSON reports (a timestamp is added only on request).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from . import conjugate, iterates, probe, report, scales, seqcore, wmatrix
from .errors import ParseError, UltrascaleError, UnknownTaskKind
from .report import TaskResult

__all__ = ["load_config", "run_job", "emit_report", "main"]


# --------------------------------------------------------------------------
# citations: each task names the condition it checks, by content
# --------------------------------------------------------------------------

SEQ_PROP_CITATIONS = {
    "log_convex": "log-convexity: M_k^2 <= M_{k-1} M_{k+1}",
    "submult_dual": "supermultiplicativity: M_j M_k <= M_{j+k}",
    "analytic_incl": "divergence of the k-th roots of M_k/k!",
    "deriv_closed": "derivation closedness: M_{k+1} <= C^{k+1} M_k",
    "alt_deriv_closed": "M_k^{(k+l)/k} <= C h^k M_k",
    "moderate_growth": "moderate growth: M_{j+k} <= g^{j+k} M_j M_k",
    "quasianalytic": "divergence of sum M_k/M_{k+1}",
    "om7seq": "doubling bound: M_k^{2p} <= A B^k M_{pk}",
}
WEIGHT_PROP_CITATIONS = {
    "alpha": "doubling bound omega(2t) = O(omega(t))",
    "beta": "log t = o(omega(t))",
    "gamma_convex": "convexity of omega o exp",
    "non_quasianalytic": "finiteness of the integral of omega(t)/t^2",
    "xi": "square absorption omega(t^2) = O(omega(Ht))",
    "xi_generalized": "power absorption omega(t^g) <= C (omega(t) + 1)",
    "sublinear": "omega(t) = o(t)",
    "power_bound": "omega(t) = O(t^a) for some a < 1",
}
MATRIX_PROP_CITATIONS = {
    "matrix_anal": "every member dominates the factorial scale",
    "r_semiregular": "shift absorption M_{k+1} <= C^{k+1} N_k (partner above)",
    "b_semiregular": "shift absorption M_{k+1} <= C^{k+1} N_k (partner below)",
    "r_mg": "pairwise moderate growth M_{j+k} <= C^{j+k} N_j N_k",
    "b_mg": "pairwise moderate growth, partner below",
    "r_l": "geometric absorption h^k M_k <= D N_k",
    "b_l": "geometric absorption, partner below",
}
SCALE_COND_CITATIONS = {
    "square": "shift bound zeta(p+1) - zeta(p) <= gamma (p+1)",
    "star": "shift bound with a partner index above",
    "diamond": "shift bound with a partner index below",
    "tri_right": "dilation absorption zeta(at) <= zeta*(t) + gamma (t+1), partner above",
    "tri_left": "dilation absorption, partner below",
    "pseudo_hom": "dilation absorption with partner c a^q lambda",
}
LEMMA_CITATIONS = {
    "shift": "conjugate shift bound phi*_l(t+1) <= phi*_2l(t) + phi*_2l(1)",
    "mixed": "mixed absorption omega(t^a) <= C (sigma(Ht) + 1) and conjugate form",
    "hat_equiv": "factorial absorption k! W^l_k <= C h^k W^l'_k",
    "rho_bound": "associated weight bound omega_rho <= omega / rho",
}


# --------------------------------------------------------------------------
# config parsing and object construction
# --------------------------------------------------------------------------

_FAMILIES = {
    "gevrey": lambda p: seqcore.Gevrey(float(p["s"])),
    "lqr": lambda p: seqcore.LQR(float(p["q"]), float(p["r"])),
    "nqr": lambda p: seqcore.NQR(float(p["q"]), float(p["r"])),
    "bj": lambda p: seqcore.BJSigma(int(p["j"]), float(p["sigma"])),
    "double_exp": lambda p: seqcore.DoubleExp(),
}


class JobConfig:
    """Validated object declarations plus an ordered task list."""

    def __init__(self, raw: dict, source: str = "<config>"):
        if not isinstance(raw, dict):
            raise ParseError("config must be a JSON object", source)
        self.raw = raw
        self.source = source
        self.objects_decl = raw.get("objects", {})
        self.tasks = raw.get("tasks", [])
        self.output = raw.get("output", {})
        if not isinstance(self.objects_decl, dict):
            raise ParseError("objects must be a mapping", f"{source}:objects")
        if not isinstance(self.tasks, list):
            raise ParseError("tasks must be a list", f"{source}:tasks")
        self._validate_references()
        self._built: dict = {}
        self._building: set = set()

    _REF_FIELDS = ("object", "left", "right", "lower", "upper", "second",
                   "weight_fn", "sigma", "genfn", "operator", "symbol",
                   "field", "sequence")

    def _validate_references(self):
        for i, t in enumerate(self.tasks):
            if not isinstance(t, dict) or "kind" not in t:
                raise ParseError("task needs a kind", f"{self.source}:tasks[{i}]")
            for f in self._REF_FIELDS:
                ref = t.get(f)
                if isinstance(ref, str) and ref not in self.objects_decl:
                    raise ParseError(f"reference to undeclared object {ref!r}",
                                     f"{self.source}:tasks[{i}].{f}")
        for name, decl in self.objects_decl.items():
            for f in self._REF_FIELDS:
                ref = decl.get(f) if isinstance(decl, dict) else None
                if isinstance(ref, str) and ref not in self.objects_decl:
                    raise ParseError(f"reference to undeclared object {ref!r}",
                                     f"{self.source}:objects[{name}].{f}")

    def obj(self, name: str):
        if name in self._built:
            return self._built[name]
        if name in self._building:
            raise ParseError(f"object graph has a cycle through {name!r}", self.source)
        self._building.add(name)
        try:
            built = self._build(name, self.objects_decl[name])
        finally:
            self._building.discard(name)
        self._built[name] = built
        return built

    def _build(self, name: str, decl: dict):
        loc = f"{self.source}:objects[{name}]"
        kind = decl.get("kind")
        try:
            if kind == "sequence":
                fam = _FAMILIES[decl["family"]](decl.get("params", {}))
                return seqcore.build_sequence(fam, int(decl["K"]))
            if kind == "matrix":
                return self._build_matrix(decl)
            if kind == "weight_fn":
                return self._build_weight(decl)
            if kind == "genfn":
                return self._build_genfn(decl)
            if kind == "operator":
                char = decl.get("char", "elliptic")
                ct = (iterates.Elliptic() if char == "elliptic"
                      else iterates.PrincipalHypoelliptic(int(decl["vanishing_order"])))
                return iterates.OperatorSpec(int(decl["d"]), ct)
            if kind == "symbol":
                coeffs = {}
                for key, val in decl.get("coeffs", {}).items():
                    alpha = tuple(int(x) for x in str(key).split(","))
                    if isinstance(val, list):
                        val = complex(val[0], val[1])
                    coeffs[alpha] = complex(val)
                op, rep = probe.build_operator(coeffs, int(decl["dim"]))
                return (op, rep)
            if kind == "field":
                modes = {}
                for key, val in decl.get("modes", {}).items():
                    m = tuple(int(x) for x in str(key).split(","))
                    if isinstance(val, list):
                        val = complex(val[0], val[1])
                    modes[m if len(m) > 1 else m[0]] = complex(val)
                return probe.field_from_modes(int(decl["dim"]), int(decl["n"]), modes)
        except KeyError as e:
            raise ParseError(f"missing field {e}", loc) from e
        except (ValueError, TypeError) as e:
            raise ParseError(str(e), loc) from e
        raise ParseError(f"unknown object kind {kind!r}", loc)

    def _build_matrix(self, decl: dict) -> wmatrix.WeightMatrix:
        spec_name = decl["spec"]
        params = decl.get("params", {})
        grid = decl["grid"]
        K = int(decl["K"])
        if spec_name == "gevrey":
            spec = wmatrix.GevreyMatrix()
        elif spec_name == "qr":
            spec = wmatrix.Qr(float(params["r"]), bool(params.get("factorial", True)))
        elif spec_name == "rmatrix":
            spec = wmatrix.Rmatrix(float(params.get("q", np.e)),
                                   bool(params.get("factorial", True)))
        elif spec_name == "bj":
            spec = wmatrix.Bj(int(params["j"]))
        elif spec_name == "jsigma":
            spec = wmatrix.Jsigma(float(params["sigma"]))
        elif spec_name == "from_weight_fn":
            spec = wmatrix.FromWeightFn(self.obj(decl["weight_fn"]))
        elif spec_name == "from_genfn":
            gf = self.obj(decl["genfn"])
            flavor = scales.ScaleFlavor(decl.get("flavor", "strong"))
            return scales.scale_to_matrix(gf, K, flavor)
        else:
            raise ParseError(f"unknown matrix spec {spec_name!r}", self.source)
        return wmatrix.build_matrix(spec, grid, K)

    def _build_weight(self, decl: dict) -> conjugate.WeightFn:
        form = decl["form"]
        params = decl.get("params", {})
        normalize = bool(decl.get("normalize", True))
        if form == "omega_s":
            return conjugate.make_weight_fn(conjugate.OmegaS(float(params["s"])), normalize)
        if form == "gevrey_power":
            return conjugate.make_weight_fn(conjugate.GevreyPower(float(params["s"])),
                                            normalize)
        if form == "from_sequence":
            seq = self.obj(decl["sequence"])
            return conjugate.associated_weight_fn(seq)
        if form == "table":
            kind = conjugate.CustomTable(tuple(params["t"]), tuple(params["value"]))
            return conjugate.make_weight_fn(kind, normalize)
        raise ParseError(f"unknown weight form {form!r}", self.source)

    def _build_genfn(self, decl: dict) -> scales.GenFn:
        form = decl["form"]
        params = decl.get("params", {})
        grid = decl["lambda_grid"]
        reversed_ = bool(decl.get("order_reversed", False))
        axiom = scales.ScaleFlavor(decl.get("axiom_set", "strong"))
        if form == "gevrey":
            kind = scales.GevreyGen()
        elif form == "power":
            kind = scales.PowerGen(float(params["r"]))
        elif form == "log_iter":
            kind = scales.LogIterGen(int(params["j"]))
        elif form == "from_omega":
            kind = scales.FromOmega(self.obj(decl["weight_fn"]))
        else:
            raise ParseError(f"unknown generating-function form {form!r}", self.source)
        return scales.make_genfn(kind, grid, order_reversed=reversed_, axiom_set=axiom)


def load_config(path: str) -> JobConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as e:
        raise ParseError(str(e), path) from e
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", f"{path}:{e.lineno}:{e.colno}") from e
    return JobConfig(raw, source=path)


def parse_config_text(text: str, source: str = "<inline>") -> JobConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", f"{source}:{e.lineno}:{e.colno}") from e
    return JobConfig(raw, source=source)


# --------------------------------------------------------------------------
# task execution
# --------------------------------------------------------------------------

def _verdict_result(task, verdict, citation: str) -> TaskResult:
    vd = verdict.to_dict()
    return TaskResult(
        task_id=str(task.get("id", "")),
        kind=task["kind"],
        status=vd["status"],
        witnesses=vd.get("witnesses", {}),
        diagnostics=vd.get("diagnostics", {}),
        citation=citation,
        expect=task.get("expect"),
    )


def _value_result(task, values: dict, citation: str, status: str = "ok") -> TaskResult:
    return TaskResult(
        task_id=str(task.get("id", "")),
        kind=task["kind"],
        status=status,
        witnesses=values,
        diagnostics={},
        citation=citation,
        expect=task.get("expect"),
    )


def run_task(cfg: JobConfig, task: dict) -> TaskResult:
    kind = task["kind"]

    if kind == "check_seq":
        prop = seqcore.SeqProperty(task["property"])
        v = seqcore.check_property(cfg.obj(task["object"]), prop,
                                   ell=int(task.get("ell", 1)),
                                   p_max=int(task.get("p_max", seqcore.P_MAX_DEFAULT)))
        return _verdict_result(task, v, SEQ_PROP_CITATIONS[prop.value])

    if kind == "relate_seq":
        r = seqcore.compare_sequences(cfg.obj(task["left"]), cfg.obj(task["right"]))
        return _value_result(task, r.to_dict(),
                             "growth relation via k-th root ratios",
                             status=r.relation.value)

    if kind == "interpolate":
        n = seqcore.interpolate_sequence(cfg.obj(task["lower"]), cfg.obj(task["upper"]))
        if task.get("export"):
            seqcore.export_csv(n, task["export"])
        return _value_result(task, {"K": n.K, "log_term_at_K": float(n.log_terms[-1])},
                             "interpolation of a log-convex sequence strictly "
                             "between two growth scales")

    if kind == "split_inequality":
        ok = seqcore.verify_split_inequality(
            cfg.obj(task["object"]), int(task["j"]), int(task["k"]), int(task["l"]),
            float(task["rho"]), float(task["R"]))
        return _value_result(task, {"true": ok},
                             "split bound rho^j M_{k+l} R^l <= rho^{j+l} M_k "
                             "+ M_{j+k+l} R^{j+l}",
                             status="holds" if ok else "fails")

    if kind == "relate_matrix":
        rep = wmatrix.matrix_relate(cfg.obj(task["left"]), cfg.obj(task["right"]))
        return _value_result(task, rep.to_dict(),
                             "bracket relations between sequence families",
                             status=",".join(sorted(r.value for r in rep.relations)) or "none")

    if kind == "check_matrix":
        prop = wmatrix.MatrixProperty(task["property"])
        v = wmatrix.check_matrix_property(cfg.obj(task["object"]), prop)
        return _verdict_result(task, v, MATRIX_PROP_CITATIONS[prop.value])

    if kind == "conjugate_value":
        om = cfg.obj(task["weight_fn"])
        t = float(task["t"])
        val, arg = conjugate.conjugate_at(om, t)
        return _value_result(task, {"t": t, "phi_star": val, "argmax_s": arg},
                             "Young conjugate sup_s (st - omega(e^s))")

    if kind == "conjugate_table":
        om = cfg.obj(task["weight_fn"])
        grid = np.asarray(task.get("t_grid") or
                          np.concatenate([[0.0], np.geomspace(0.01, 100.0, 512)]))
        yc = conjugate.young_conjugate(om, grid)
        if task.get("export"):
            conjugate.export_conjugate_csv(yc, task["export"])
        return _value_result(task, {"points": int(yc.grid.size),
                                    "max_value": float(yc.values.max())},
                             "Young conjugate table with convexity checks")

    if kind == "check_weight":
        prop = conjugate.WeightProperty(task["property"])
        v = conjugate.check_weight_property(cfg.obj(task["object"]), prop,
                                            gamma=float(task.get("gamma", 2.0)))
        return _verdict_result(task, v, WEIGHT_PROP_CITATIONS[prop.value])

    if kind == "compare_weights":
        r = conjugate.compare_weight_fns(cfg.obj(task["left"]), cfg.obj(task["right"]))
        return _value_result(task, r.to_dict(), "weight comparison via tail ratios",
                             status=r.relation.value)

    if kind == "xi_seq":
        second = cfg.obj(task["second"]) if task.get("second") else None
        v = conjugate.check_xi_seq(cfg.obj(task["object"]), second)
        return _verdict_result(task, v, SEQ_PROP_CITATIONS["om7seq"])

    if kind == "verify_lemma":
        lemma = conjugate.ConjugateLemma(task["lemma"])
        kwargs = {}
        if task.get("sigma"):
            kwargs["sigma"] = cfg.obj(task["sigma"])
        if "alpha" in task:
            kwargs["alpha"] = float(task["alpha"])
        if "lambda_grid" in task:
            kwargs["lambda_grid"] = tuple(float(x) for x in task["lambda_grid"])
        if "rho" in task:
            kwargs["rho"] = float(task["rho"])
        v = conjugate.verify_conjugate_lemma(lemma, cfg.obj(task["weight_fn"]), **kwargs)
        return _verdict_result(task, v, LEMMA_CITATIONS[lemma.value])

    if kind == "scale_condition":
        cond = scales.ScaleCondition(task["condition"])
        alphas = tuple(float(a) for a in task.get("alphas", scales.DEFAULT_ALPHAS))
        v = scales.check_scale_condition(cfg.obj(task["genfn"]), cond, alphas,
                                         strict_grid=bool(task.get("strict_grid", False)))
        return _verdict_result(task, v, SCALE_COND_CITATIONS[cond.value])

    if kind == "scale_report":
        rep = scales.scale_report(cfg.obj(task["genfn"]))
        flags = {"fitting": rep.fitting, "apposite": rep.apposite,
                 "r_admissible": rep.r_admissible, "b_admissible": rep.b_admissible}
        return _value_result(task, {**flags, "detail": rep.to_dict()},
                             "scale condition panel")

    if kind == "scale_pair":
        rep = scales.classify_scale_pair(cfg.obj(task["left"]), cfg.obj(task["right"]),
                                         float(task["alpha"]))
        return _value_result(task, rep.to_dict(), "two-scale comparison panel")

    if kind == "loss":
        spec = cfg.obj(task["operator"])
        cdecl = task["class"]
        cname = cdecl["name"]
        if cname == "gevrey":
            out = iterates.loss_map(iterates.GevreyClass(_maybe_fraction(cdecl["s"])), spec)
            values = {"s_prime": _num(out.s)}
        elif cname == "qgevrey":
            out = iterates.loss_map(
                iterates.QGevreyClass(float(cdecl["q"]), _maybe_fraction(cdecl["r"])), spec)
            values = {"q_prime": out.q, "log_q_prime": out.log_q, "r": _num(out.r)}
        elif cname == "bj":
            out = iterates.loss_map(
                iterates.BJClass(int(cdecl["j"]), _maybe_fraction(cdecl["lam"])), spec)
            values = {"j": out.j, "lam_prime": _num(out.lam)}
        elif cname == "scale":
            out = iterates.loss_map(
                iterates.ScaleClass(cfg.obj(task["genfn"]), float(cdecl["lam"])), spec)
            if isinstance(out, iterates.PushforwardResult):
                return _value_result(task, {"note": out.note},
                                     "dilation-partner search", status="inconclusive")
            values = {"lam_prime": out.lam}
        elif cname == "weight_fn":
            out = iterates.loss_map(iterates.WeightFnClass(cfg.obj(task["weight_fn"])), spec)
            if isinstance(out, iterates.RequiredGrowth):
                values = {"stable": False, "alpha": out.alpha}
            else:
                values = {"stable": True, **(out.witnesses or {})}
        else:
            raise UnknownTaskKind(f"unknown loss class {cname!r}")
        delta, eps = iterates.subellipticity_delta(spec)
        values.update({"delta": _num(delta), "epsilon": _num(eps)})
        return _value_result(task, values,
                             "regularity-loss map s' = (d s - delta)/(d - delta) "
                             "and its power/scale variants")

    if kind == "pushforward":
        res = iterates.scale_pushforward_witness(
            cfg.obj(task["genfn"]), float(task["lam"]), cfg.obj(task["operator"]),
            strict_grid=bool(task.get("strict_grid", False)))
        status = "holds" if res.status is iterates.PushforwardStatus.OK else "inconclusive"
        vals = {"partner": res.partner, "gamma": res.gamma, "note": res.note}
        return _value_result(task, {k: v for k, v in vals.items() if v is not None},
                             "dilation absorption at alpha = d/(d - delta)",
                             status=status)

    if kind == "ellipticity":
        op, rep = cfg.obj(task["symbol"])
        vals = {"elliptic": rep.elliptic, "min_abs": rep.min_abs, "max_abs": rep.max_abs}
        if rep.char_direction is not None:
            vals["char_direction"] = list(rep.char_direction)
        return _value_result(task, vals,
                             "empty characteristic set of the principal symbol",
                             status="holds" if rep.elliptic else "fails")

    if kind == "iterate_norms":
        op, _ = cfg.obj(task["symbol"])
        u = cfg.obj(task["field"])
        norms = probe.iterate_norms(u, op, int(task["k_iter"]))
        if task.get("export"):
            probe.export_norms_csv(norms, task["export"])
        return _value_result(task, {"k_iter": int(task["k_iter"]),
                                    "log_norm_last": float(norms[-1])},
                             "L2 norms of operator iterates, log domain")

    if kind == "fit_growth":
        op, _ = cfg.obj(task["symbol"])
        u = cfg.obj(task["field"])
        norms = probe.iterate_norms(u, op, int(task["k_iter"]))
        best, ranking = probe.fit_growth(norms, op.order_d)
        return _value_result(task, {
            "best_family": best.family.name,
            "h": best.h, "residual": best.residual,
            "geometric_flag": best.geometric_flag,
            "ranking": [f.family.name for f in ranking],
        }, "least-squares inversion of norm growth against sequence families")

    if kind == "mellin_check":
        err = probe.gaussian_mellin_check(float(task["lam"]), int(task["k_max"]))
        tol = float(task.get("tol", 1e-6))
        return _value_result(task, {"max_rel_log_error": err, "tol": tol},
                             "moment identity of the log-Gaussian kernel",
                             status="holds" if err < tol else "fails")

    if kind == "growth_ratios":
        params = probe.MetivierParams(
            lam0=float(task["lam0"]), lam=float(task["lam"]),
            lam_prime=float(task["lam_prime"]), eps=float(task["eps"]),
            d=int(task.get("d", 1)))
        ratios = probe.directional_growth_check(params, int(task["k_max"]))
        mono = bool(np.all(np.diff(ratios) >= -1e-12))
        return _value_result(task, {"r_first": float(ratios[0]),
                                    "r_last": float(ratios[-1]),
                                    "monotone": mono},
                             "directional-derivative ratios against the kernel moments",
                             status="holds" if mono else "fails")

    raise UnknownTaskKind(f"unknown task kind {kind!r}")


def _maybe_fraction(x):
    from fractions import Fraction

    if isinstance(x, str) and "/" in x:
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    return float(x)


def _num(x):
    from fractions import Fraction

    return float(x) if isinstance(x, Fraction) else x


def run_job(cfg: JobConfig, parallel: bool = False) -> list[TaskResult]:
    """Execute all tasks in order; module errors are wrapped per task."""
    tasks = list(cfg.tasks)

    def one(task):
        try:
            return run_task(cfg, task)
        except UltrascaleError as e:
            return TaskResult(task_id=str(task.get("id", "")), kind=task.get("kind", "?"),
                              status="error", witnesses={},
                              diagnostics={"notes": [f"{type(e).__name__}: {e}"]},
                              citation="", expect=task.get("expect"))

    if parallel:
        with concurrent.futures.ThreadPoolExecutor() as ex:
            results = list(ex.map(one, tasks))
    else:
        results = [one(t) for t in tasks]
    results.sort(key=lambda r: r.task_id)
    return results


def emit_report(results: list[TaskResult], fmt: str = "json",
                stamp: bool = False) -> str:
    ts = datetime.now(timezone.utc).isoformat() if stamp else None
    if fmt == "json":
        return report.render_json(results, stamp=ts)
    if fmt == "text":
        return report.render_text(results, stamp=ts)
    raise ParseError(f"unknown format {fmt!r}")


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _single_task_config(objects: dict, task: dict) -> JobConfig:
    return JobConfig({"objects": objects, "tasks": [dict(task, id=task.get("id", "t1"))]})


def _parse_family(text: str) -> dict:
    """family spec like gevrey:2, lqr:2:3, nqr:2:2, bj:1:0.5, double_exp."""
    parts = text.split(":")
    name = parts[0]
    if name == "gevrey":
        return {"family": "gevrey", "params": {"s": float(parts[1])}}
    if name == "lqr":
        return {"family": "lqr", "params": {"q": float(parts[1]), "r": float(parts[2])}}
    if name == "nqr":
        return {"family": "nqr", "params": {"q": float(parts[1]), "r": float(parts[2])}}
    if name == "bj":
        return {"family": "bj", "params": {"j": int(parts[1]), "sigma": float(parts[2])}}
    if name == "double_exp":
        return {"family": "double_exp", "params": {}}
    raise ParseError(f"unknown family spec {text!r}")


def main(argv: Optional[list[str]] = None) -> int:
    ap = argparse.ArgumentParser(prog="ultrascale",
                                 description="growth-scale calculus and verdict reports")
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a job config")
    run_p.add_argument("config")
    run_p.add_argument("--format", choices=("json", "text"), default="json")
    run_p.add_argument("--out")
    run_p.add_argument("--parallel", action="store_true")
    run_p.add_argument("--stamp", action="store_true",
                       help="add a generation timestamp to the report")

    cs = sub.add_parser("check-seq", help="check one sequence condition")
    cs.add_argument("--family", required=True, help="e.g. gevrey:2 or lqr:2:3")
    cs.add_argument("--K", type=int, default=200)
    cs.add_argument("--prop", required=True, choices=sorted(SEQ_PROP_CITATIONS))
    cs.add_argument("--format", choices=("json", "text"), default="text")

    rel = sub.add_parser("relate", help="compare two sequences")
    rel.add_argument("--left", required=True)
    rel.add_argument("--right", required=True)
    rel.add_argument("--K", type=int, default=200)
    rel.add_argument("--format", choices=("json", "text"), default="text")

    conj = sub.add_parser("conjugate", help="evaluate a Young conjugate")
    conj.add_argument("--s", type=float, default=2.0, help="log-power weight exponent")
    conj.add_argument("--t", type=float, required=True)
    conj.add_argument("--format", choices=("json", "text"), default="text")

    sc = sub.add_parser("scale", help="check a scale condition")
    sc.add_argument("--form", choices=("gevrey", "power", "log_iter"), default="gevrey")
    sc.add_argument("--r", type=float, default=2.0)
    sc.add_argument("--j", type=int, default=1)
    sc.add_argument("--lambdas", default="1,2,4")
    sc.add_argument("--condition", required=True, choices=sorted(SCALE_COND_CITATIONS))
    sc.add_argument("--format", choices=("json", "text"), default="text")

    lo = sub.add_parser("loss", help="apply a regularity-loss map")
    lo.add_argument("--class", dest="cls", required=True,
                    help="gevrey:S | qgevrey:Q:R | bj:J:LAM")
    lo.add_argument("--d", type=int, required=True)
    lo.add_argument("--vanishing-order", type=int, default=None)
    lo.add_argument("--format", choices=("json", "text"), default="text")

    pr = sub.add_parser("probe", help="spectral probe shortcuts")
    pr.add_argument("--mellin", action="store_true")
    pr.add_argument("--lam", type=float, default=1.0)
    pr.add_argument("--k-max", type=int, default=15)
    pr.add_argument("--format", choices=("json", "text"), default="text")

    args = ap.parse_args(argv)

    try:
        if args.command == "run":
            cfg = load_config(args.config)
            results = run_job(cfg, parallel=args.parallel)
            fmt = cfg.output.get("format", args.format)
            text = emit_report(results, fmt, stamp=args.stamp)
            out_path = args.out or cfg.output.get("path")
            if out_path:
                with open(out_path, "w") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text + ("\n" if fmt == "json" else ""))
            return 0 if all(r.expectation_met for r in results) else 1

        if args.command == "check-seq":
            decl = dict(_parse_family(args.family), kind="sequence", K=args.K)
            cfg = _single_task_config({"M": decl},
                                      {"kind": "check_seq", "object": "M",
                                       "property": args.prop})
        elif args.command == "relate":
            cfg = _single_task_config(
                {"L": dict(_parse_family(args.left), kind="sequence", K=args.K),
                 "R": dict(_parse_family(args.right), kind="sequence", K=args.K)},
                {"kind": "relate_seq", "left": "L", "right": "R"})
        elif args.command == "conjugate":
            cfg = _single_task_config(
                {"w": {"kind": "weight_fn", "form": "omega_s", "params": {"s": args.s}}},
                {"kind": "conjugate_value", "weight_fn": "w", "t": args.t})
        elif args.command == "scale":
            grid = [float(x) for x in args.lambdas.split(",")]
            params = {"r": args.r} if args.form == "power" else (
                {"j": args.j} if args.form == "log_iter" else {})
            cfg = _single_task_config(
                {"z": {"kind": "genfn", "form": args.form, "params": params,
                       "lambda_grid": grid}},
                {"kind": "scale_condition", "genfn": "z", "condition": args.condition})
        elif args.command == "loss":
            parts = args.cls.split(":")
            cdecl = ({"name": "gevrey", "s": float(parts[1])} if parts[0] == "gevrey"
                     else {"name": "qgevrey", "q": float(parts[1]), "r": float(parts[2])}
                     if parts[0] == "qgevrey"
                     else {"name": "bj", "j": int(parts[1]), "lam": float(parts[2])})
            op = {"kind": "operator", "d": args.d}
            if args.vanishing_order:
                op.update(char="hypoelliptic", vanishing_order=args.vanishing_order)
            cfg = _single_task_config({"P": op},
                                      {"kind": "loss", "class": cdecl, "operator": "P"})
        elif args.command == "probe":
            if not args.mellin:
                ap.error("probe currently exposes --mellin")
            cfg = _single_task_config({}, {"kind": "mellin_check", "lam": args.lam,
                                           "k_max": args.k_max})
        else:  # pragma: no cover
            ap.error("unknown command")
            return 2

        results = run_job(cfg)
        sys.stdout.write(emit_report(results, args.format)
                         + ("\n" if args.format == "json" else ""))
        return 0 if all(r.expectation_met and r.status != "error" for r in results) else 1
    except UltrascaleError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

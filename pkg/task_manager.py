"""
task_manager.py
Esecuzione dei task di una RunConfig: ogni task produce un record (dizionario) con
valore simbolico, valore dell'oracolo, discrepanza, tolleranza, esito e tempo.

Un errore in un task viene registrato nel record (status "error") e l'esecuzione continua.
I task sono indipendenti: con ZETALIFT_THREADS > 1 girano in parallelo, l'ordine dei record
resta quello di dichiarazione.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import sympy

from config import TOL_MATRIX, TOL_ORACLE, TOL_POISSON, TOL_THETA
from covering_lift import (
    comparison_trace,
    eta_gamma,
    l2_index,
    lifted_defect_check,
    lifted_zeta_equality,
    poisson_consistency,
    theta_identity_residual,
)
from resolvent_powers import Weight
from run_config import RunConfig, TaskSpec
from spectral_oracle import (
    ModelSpectrum,
    OracleValue,
    SpectralPatch,
    eta_series,
    fourier_matrix_eigenvalues,
    heat_supertrace,
)
from symbol_core import TrigPoly, as_exact, to_complex
from trace_functionals import canonical_trace, wres
from zeta_engine import (
    HoloFamily,
    eta_breakdown,
    family_symbol_at,
    index_via_residue,
    kv_residue_check,
    ps_fp_check,
    zeta_germ,
)


Record = Dict[str, Any]


def _record(task: TaskSpec, **fields: Any) -> Record:
    base: Record = {
        "index": task.index,
        "kind": task.kind,
        "label": task.label,
        "family": task.family,
        "status": "pass",
        "passed": True,
        "symbolic": None,
        "oracle": None,
        "discrepancy": None,
        "tolerance": None,
        "bound": 0.0,
        "provenance": "symbolic",
        "details": {},
        "series": [],
        "message": "",
    }
    base.update(fields)
    if not base["passed"]:
        base["status"] = "fail"
    return base


def _point(task: TaskSpec, F: Optional[HoloFamily], default: Any = 0) -> sympy.Expr:
    """Punto z del task: 'point' esplicito oppure il polo d_j ('pole' = j)."""
    if "point" in task.params:
        return as_exact(task.params["point"])
    if "pole" in task.params and F is not None:
        return F.pole(int(task.params["pole"]))
    return as_exact(default)


def _compare_expect(task: TaskSpec, value: complex, tol: float) -> Tuple[Optional[complex], Optional[float], bool]:
    if "expect" not in task.params:
        return None, None, True
    expect = to_complex(as_exact(task.params["expect"]))
    diff = abs(value - expect)
    return expect, diff, diff <= tol


def _z_grid(params: Dict[str, Any]) -> List[sympy.Expr]:
    if "z" in params:
        return [as_exact(v) for v in params["z"]]
    grid = params.get("grid")
    if grid is None:
        return []
    values = np.linspace(float(grid["start"]), float(grid["stop"]), int(grid.get("num", 11)))
    return [as_exact(round(float(v), 12)) for v in values]


# ==============================
#  MODELLI PER GLI ORACOLI
# ==============================

def _laplace_entry(W: Weight, i: int) -> Tuple[sympy.Expr, TrigPoly]:
    """Entrata diagonale c |xi|^2 + V(x): ritorna (c, V). ValueError per altre forme."""
    n = W.dim
    c = sympy.Integer(0)
    V = TrigPoly({}, dim=n, period=W.period)
    for comp in W.diagonal_entry(i):
        for t in comp.terms:
            if t.key == ((0,) * n, 2, 0) and t.coeff.is_constant():
                c += t.coeff.mean()
            elif t.key == ((0,) * n, 0, 0):
                V = V + t.coeff
            else:
                raise ValueError("Oracolo disponibile solo per pesi della forma c |xi|^2 + V(x)")
    if c != 1:
        raise ValueError(f"Oracolo: coefficiente principale {c} diverso da 1")
    return c, V


def model_for(F: HoloFamily, model: str) -> ModelSpectrum:
    """Spettro modello associato al peso di una famiglia A(z) = Q^{-z}."""
    if F.poly_factor is not None or not F.h_factor.is_identity():
        raise ValueError("Oracolo spettrale disponibile solo per famiglie Q^{-z}")
    W = F.weight
    if W.size != 1:
        raise ValueError("Oracolo spettrale disponibile solo per pesi scalari")
    _, V = _laplace_entry(W, 0)
    patch = SpectralPatch(W.patch if W.patch in ("none", "base") else "band", float(to_complex(W.spectral_eps).real))
    period = float(to_complex(W.period).real)
    if model == "torus":
        if not V.is_constant():
            raise ValueError("Modello 'torus' richiede un potenziale costante")
        return ModelSpectrum("torus-laplacian", W.dim, period, float(to_complex(V.mean()).real), patch=patch)
    if model == "fourier-matrix":
        return ModelSpectrum("fourier-matrix", 1, period, potential=V, patch=patch)
    raise ValueError(f"Modello di oracolo sconosciuto: {model!r}")


def oracle_residue(fn: Callable[[complex], OracleValue], p: complex, h: float = 1e-3) -> OracleValue:
    """Residuo di un polo semplice: estrapolazione di Richardson di h (f(p+h) - f(p-h)) / 2."""
    def sym(step: float) -> complex:
        return step * (fn(p + step).value - fn(p - step).value) / 2

    coarse = sym(h)
    fine = sym(h / 2)
    return OracleValue((4 * fine - coarse) / 3, abs(fine - coarse) * h, "richardson")


# ==============================
#  TASK
# ==============================

def task_res(cfg: RunConfig, task: TaskSpec) -> Record:
    F = cfg.families[task.family]
    p = _point(task, F)
    value = to_complex(wres(family_symbol_at(F, p)))
    expect, diff, ok = _compare_expect(task, value, cfg.tolerance)
    return _record(task, symbolic=value, oracle=expect, discrepancy=diff, tolerance=cfg.tolerance,
                   passed=ok, details={"point": str(p)})


def task_tr(cfg: RunConfig, task: TaskSpec) -> Record:
    F = cfg.families[task.family]
    p = _point(task, F)
    value = to_complex(canonical_trace(family_symbol_at(F, p)))
    expect, diff, ok = _compare_expect(task, value, cfg.tolerance)
    return _record(task, symbolic=value, oracle=expect, discrepancy=diff, tolerance=cfg.tolerance,
                   passed=ok, details={"point": str(p)})


def task_zeta(cfg: RunConfig, task: TaskSpec) -> Record:
    F = cfg.families[task.family]
    poles = [to_complex(d) for d in F.poles()]
    series = []
    for z in _z_grid(task.params):
        germ = zeta_germ(F, z)
        zc = to_complex(z)
        series.append({
            "z": zc.real,
            "re": germ.finite.real,
            "im": germ.finite.imag,
            "pole": any(abs(zc - d) < 1e-12 for d in poles),
            "residue": germ.principal.real,
        })
    p = _point(task, F)
    germ = zeta_germ(F, p)
    expect, diff, ok = _compare_expect(task, germ.finite, cfg.tolerance)
    return _record(task, symbolic=germ.finite, oracle=expect, discrepancy=diff, tolerance=cfg.tolerance,
                   passed=ok, series=series,
                   details={"point": str(p), "principal": germ.principal, "outer": germ.outer,
                            "inner": germ.inner})


def task_kv(cfg: RunConfig, task: TaskSpec) -> Record:
    F = cfg.families[task.family]
    js = task.params.get("pole", list(range(F.depth)))
    js = js if isinstance(js, list) else [js]
    checks = [kv_residue_check(F, int(j), tol=cfg.tolerance) for j in js]
    ok = all(c.passed for c in checks)
    first = checks[0]
    expect, diff, ok_expect = _compare_expect(task, first.lhs, cfg.tolerance)
    series = [{"j": c.j, "pole": str(c.pole), "lhs": c.lhs.real, "rhs": c.rhs.real,
               "error": c.error, "pass": c.passed} for c in checks]
    return _record(task, symbolic=first.lhs, oracle=first.rhs if expect is None else expect,
                   discrepancy=max(c.error for c in checks) if diff is None else max(diff, first.error),
                   tolerance=cfg.tolerance, passed=ok and ok_expect, series=series,
                   provenance="symbolic (residuo vs polo)", details={"pole": str(first.pole)})


def task_ps(cfg: RunConfig, task: TaskSpec) -> Record:
    F = cfg.families[task.family]
    p = _point(task, F)
    chk = ps_fp_check(F, point=p, tol=cfg.tolerance)
    expect, diff, ok = _compare_expect(task, chk.fp, cfg.tolerance)
    return _record(task, symbolic=chk.fp, oracle=chk.tr_term + chk.res_term, discrepancy=chk.error,
                   tolerance=cfg.tolerance, passed=chk.passed and ok,
                   provenance="symbolic (fp vs TR + res)",
                   details={"point": str(p), "tr_term": chk.tr_term, "res_term": chk.res_term,
                            "expect_error": diff})


def task_lift(cfg: RunConfig, task: TaskSpec) -> Record:
    F = cfg.families[task.family]
    points = [as_exact(v) for v in task.params.get("points", [0])]
    rep = lifted_defect_check(F, cfg.cover, cfg.tolerance, points)
    series = [{"check": "kv", "at": str(c.pole), "lhs": c.lhs.real, "rhs": c.rhs.real, "pass": c.passed}
              for c in rep.kv]
    series += [{"check": "ps", "at": str(c.point), "lhs": c.fp.real, "rhs": (c.tr_term + c.res_term).real,
                "pass": c.passed} for c in rep.ps]
    errors = rep.errors
    return _record(task, symbolic=rep.ps[0].fp if rep.ps else None,
                   discrepancy=max(errors) if errors else 0.0, tolerance=cfg.tolerance, passed=rep.passed,
                   series=series, provenance="symbolic (Gamma)",
                   details={"poles": [str(d) for d in rep.poles]})


def task_compare(cfg: RunConfig, task: TaskSpec) -> Record:
    F = cfg.families[task.family]
    cmp = comparison_trace(F, cfg.cover, tol=max(cfg.tolerance, TOL_ORACLE))
    res = lifted_zeta_equality(F, cfg.cover, cfg.tolerance)
    ok = cmp.passed and (res.holds if F.h_factor.is_identity() else True)
    return _record(task, symbolic=res.base_value, oracle=res.cover_value,
                   discrepancy=max(abs(cmp.difference), cmp.error), tolerance=cfg.tolerance,
                   passed=ok, provenance="base vs rivestimento", message=res.note,
                   details={"smoothing_trace": cmp.smoothing_value,
                            "principal_difference": cmp.principal_difference})


def task_index(cfg: RunConfig, task: TaskSpec) -> Record:
    F = cfg.families[task.family]
    base = index_via_residue(F)
    gamma = l2_index(F, cfg.cover)
    expect = to_complex(as_exact(task.params.get("expect", 0)))
    details: Dict[str, Any] = {"base": base, "gamma": gamma}
    oracle: Optional[complex] = None
    tol_oracle = max(cfg.tolerance, TOL_MATRIX)
    if task.params.get("oracle", "heat") == "heat":
        W = F.weight
        if W.grading is None:
            raise ValueError("Indice: peso senza graduazione")
        t = float(task.params.get("t", 1.0))
        plus: List[float] = []
        minus: List[float] = []
        for i, sign in enumerate(W.grading):
            _, V = _laplace_entry(W, i)
            eigs = fourier_matrix_eigenvalues(V, min(cfg.matrix_cutoff, 128))
            (plus if sign > 0 else minus).extend(eigs.tolist())
        oracle = complex(heat_supertrace(plus, minus, t))
        details["heat_t"] = t
    errors = [abs(base - expect), abs(gamma - expect)]
    ok = errors[0] <= cfg.tolerance and errors[1] <= cfg.tolerance
    if oracle is not None:
        errors.append(abs(oracle - expect))
        ok = ok and errors[-1] <= tol_oracle
    return _record(task, symbolic=base, oracle=oracle, discrepancy=max(errors), tolerance=cfg.tolerance,
                   passed=ok, provenance="sres(log Q) / sres_Gamma / supertraccia del calore", details=details)


def task_eta(cfg: RunConfig, task: TaskSpec) -> Record:
    a = as_exact(task.params["a"])
    br = eta_breakdown(a, cfg.depth)
    oracle = eta_series(0, br.a)
    tol = max(cfg.tolerance, TOL_ORACLE)
    eg = eta_gamma(a, cfg.depth, cfg.cover, tol)
    diff_oracle = abs(br.value - oracle.value)
    diff_gamma = abs(oracle.value - eg.value - eg.difference.value)
    ok = diff_oracle <= tol and eg.passed and diff_gamma <= tol + oracle.bound
    return _record(task, symbolic=br.value, oracle=oracle.value,
                   discrepancy=max(diff_oracle, diff_gamma, eg.error), tolerance=tol,
                   bound=oracle.bound + br.smoothing.bound, passed=ok,
                   provenance=f"symbolic vs oracle:{oracle.method}",
                   details={"a": str(br.a), "symbolic_part": br.symbolic, "smoothing_part": br.smoothing.value,
                            "eta_gamma": eg.value, "gamma_difference": eg.difference.value,
                            "gamma_method": eg.difference.method})


def task_oracle(cfg: RunConfig, task: TaskSpec) -> Record:
    F = cfg.families[task.family]
    model_name = task.params.get("model", "torus")
    model = model_for(F, model_name)
    quantity = task.params.get("quantity", "value")
    p = _point(task, F)
    germ = zeta_germ(F, p)
    pc = to_complex(p)
    if quantity == "residue":
        ov = oracle_residue(model.zeta, pc)
        symbolic = germ.principal
    elif quantity == "value":
        ov = model.zeta(pc)
        symbolic = germ.finite
    else:
        raise ValueError(f"Quantita' sconosciuta: {quantity!r}")
    tol = max(cfg.tolerance, TOL_MATRIX if model_name == "fourier-matrix" else TOL_ORACLE)
    diff = abs(symbolic - ov.value)
    print(f"[ORACLE] {task.label}: simbolico {symbolic:.12g}, oracolo {ov.value:.12g} ({ov.method})")
    return _record(task, symbolic=symbolic, oracle=ov.value, discrepancy=diff, tolerance=tol, bound=ov.bound,
                   passed=diff <= tol + ov.bound, provenance=f"symbolic vs oracle:{ov.method}",
                   details={"point": str(p), "quantity": quantity})


def task_poisson(cfg: RunConfig, task: TaskSpec) -> Record:
    F = cfg.families[task.family]
    model = model_for(F, "torus")
    tol = max(cfg.tolerance, TOL_POISSON)
    series = []
    worst = 0.0
    ok = True
    for z in [as_exact(v) for v in task.params.get("z", [])]:
        discrete = model.zeta(to_complex(z))
        rep = poisson_consistency(F, z, discrete.value, tol)
        series.append({"z": float(to_complex(z).real), "discrete": rep.discrete.real, "trace": rep.trace.real,
                       "offdiagonal": rep.offdiagonal.real, "error": rep.error, "pass": rep.passed})
        worst = max(worst, rep.error)
        ok = ok and rep.passed
    return _record(task, discrepancy=worst, tolerance=tol, passed=ok, series=series,
                   provenance="traccia discreta vs TR + traslazioni")


def task_theta(cfg: RunConfig, task: TaskSpec) -> Record:
    ts = task.params.get("t", [0.5, 1.0, 2.0])
    tol = float(task.params.get("tolerance", TOL_THETA))
    reports = [theta_identity_residual(float(t), cfg.period, tol) for t in ts]
    series = [{"t": r.t, "torus": r.torus.real, "cover": r.cover.real, "residual": r.residual, "pass": r.passed}
              for r in reports]
    return _record(task, discrepancy=max(r.residual for r in reports), tolerance=tol,
                   passed=all(r.passed for r in reports), series=series, provenance="theta vs Gamma")


TASK_RUNNERS: Dict[str, Callable[[RunConfig, TaskSpec], Record]] = {
    "res": task_res,
    "tr": task_tr,
    "zeta": task_zeta,
    "kv-check": task_kv,
    "ps-check": task_ps,
    "lift-check": task_lift,
    "compare": task_compare,
    "index": task_index,
    "eta": task_eta,
    "oracle-crosscheck": task_oracle,
    "poisson": task_poisson,
    "theta": task_theta,
}


def run_task(cfg: RunConfig, task: TaskSpec, total: int = 0) -> Record:
    """Esegue un task e misura il tempo; le eccezioni diventano record con status 'error'."""
    print(f">>> Task {task.index}/{total or len(cfg.tasks)}: {task.kind} [{task.label}]")
    start = time.perf_counter()
    try:
        rec = TASK_RUNNERS[task.kind](cfg, task)
    except (ValueError, ArithmeticError, KeyError, TypeError) as exc:
        print(f"[ERRORE] Task {task.index} ({task.kind}): {exc}")
        rec = _record(task, status="error", passed=False, message=str(exc))
        rec["status"] = "error"
    rec["elapsed_s"] = round(time.perf_counter() - start, 6)
    return rec


def run_tasks(cfg: RunConfig, threads: int = 1) -> List[Record]:
    """Tutti i task nell'ordine di dichiarazione (eventualmente in parallelo)."""
    total = len(cfg.tasks)
    if threads <= 1 or total <= 1:
        return [run_task(cfg, t, total) for t in cfg.tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: run_task(cfg, t, total), cfg.tasks))

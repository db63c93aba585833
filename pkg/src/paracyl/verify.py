"""The acceptance suite: every numbered check behind `paracyl verify`.

Each criterion function produces a JSON-serializable dict with a boolean
"pass" plus its measurements; run_acceptance assembles them, and
run_acceptance_twice re-runs the whole suite to test bit-level determinism.
Checks are sampled numerical evidence at pinned tolerances; a failing check
is reported with its observed values, never silenced.
"""

from __future__ import annotations

import cmath
import json
import math

import numpy as np

from . import analysis, coords, rotation
from .config import RunConfig
from .coords import _psi_batch, _sigma_tau_batch, _step_arrays
from .errors import InversionError, ParacylError
from .germ import (
    MapFamily,
    default_perturbed_family,
    invert_down,
    model_family,
)
from .regions import BasinParams, find_r0, in_basin_up, sample_basin_arrays

EULER_GAMMA = 0.5772156649015329


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _tol_for(fam: MapFamily) -> float:
    # perturbed orbits carry an oscillating O(1/n) term in the psi increments,
    # so their Cauchy stopping cannot go below ~1e-5 at desk scale
    return 1e-8 if fam.is_model else 1e-5


def _sample_up(params: BasinParams, n: int, seed: int):
    rng = np.random.default_rng(seed)
    z, w = sample_basin_arrays(params, n, rng)
    return z / w, w


def _sample_up_moderate(params: BasinParams, n: int, seed: int):
    """Region samples restricted to 0.5 <= |x| <= 3.

    The perturbed family's coordinate increments carry an oscillating term of
    size ~0.1*(|x| + |x|^-2)/n, so Cauchy stopping at 1e-5 within the step
    budget needs |x| away from the extremes of the sampler's band.  The
    restriction only speeds convergence; the contracts themselves hold on
    the whole region.
    """
    rng = np.random.default_rng(seed)
    z, w = sample_basin_arrays(params, 20 * n, rng)
    x = z / w
    keep = (np.abs(x) >= 0.5) & (np.abs(x) <= 3.0)
    if keep.sum() < n:
        raise ParacylError("not enough moderate-|x| region samples")
    return x[keep][:n], w[keep][:n]


def _criterion_rotation() -> dict:
    g = rotation.brjuno_report(rotation.golden_mean(), 12)
    lv = rotation.brjuno_report(rotation.liouville_like(), 12)
    s_g = g.partial_sums[11]
    s_lv = lv.partial_sums[11]
    ratio = s_lv / s_g
    ok = g.tail_increment < 1e-3 and ratio > 10.0
    return {
        "pass": bool(ok),
        "golden_sum_N12": s_g,
        "golden_tail_increment": g.tail_increment,
        "golden_verdict": g.verdict,
        "liouville_sum_N12": s_lv,
        "liouville_verdict": lv.verdict,
        "ratio": ratio,
    }


def _ulp_gap(a: np.ndarray, b: np.ndarray) -> float:
    """Largest |a-b| measured in units of spacing at the larger magnitude."""
    scale = np.spacing(np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(np.abs(a - b) / scale))


def _criterion_semiconjugacy(model: MapFamily, pert: MapFamily, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    n_pts = 10**4
    x = rng.uniform(-1, 1, n_pts) + 1j * rng.uniform(-1, 1, n_pts)
    y = rng.uniform(-1, 1, n_pts) + 1j * rng.uniform(-1, 1, n_pts)
    out = {}
    worst = 0.0
    for name, fam in (("model", model), ("perturbed", pert)):
        xu, yu = _step_arrays(fam, "up", x, y)
        zd, wd = fam.step_down(x * y, y)
        gap = max(_ulp_gap(xu * yu, zd), _ulp_gap(yu, wd))
        out[f"{name}_max_ulps"] = gap
        worst = max(worst, gap)
    x1_model, _ = _step_arrays(model, "up", x, y)
    lift_gap = _ulp_gap(x1_model, model.lam2 * x)
    out["model_first_coordinate_max_ulps"] = lift_gap
    out["pass"] = bool(worst <= 8.0 and lift_gap <= 4.0)
    return out


def _criterion_invariance(model, pert, params_m, params_p, seed: int) -> dict:
    out = {}
    ok = True
    for name, fam, params, s in (
        ("model", model, params_m, seed),
        ("perturbed", pert, params_p, seed + 1),
    ):
        rep = analysis.invariance_suite(fam, params, 1000, seed=s)
        out[name] = rep.to_json()
        ok = ok and rep.one_step_ok and rep.attraction_ok
    out["pass"] = bool(ok)
    return out


def _orbit_tail_stats(fam: MapFamily, x, y, N: int):
    """Stream an up-chart batch orbit; return |U_N|/N plus tail bands."""
    x = np.array(x, dtype=complex)
    y = np.array(y, dtype=complex)
    n_lo = max(1, N // 10)
    y_lo = np.full(x.shape, np.inf)
    y_hi = np.zeros(x.shape)
    x_lo = np.full(x.shape, np.inf)
    x_hi = np.zeros(x.shape)
    for n in range(1, N + 1):
        x, y = _step_arrays(fam, "up", x, y)
        if n >= n_lo:
            ay = np.abs(y) * math.sqrt(n)
            ax = np.abs(x)
            np.minimum(y_lo, ay, out=y_lo)
            np.maximum(y_hi, ay, out=y_hi)
            np.minimum(x_lo, ax, out=x_lo)
            np.maximum(x_hi, ax, out=x_hi)
    ratio = np.abs(1.0 / (x * y * y)) / N
    return ratio, (float(y_lo.min()), float(y_hi.max())), (float(x_lo.min()), float(x_hi.max()))


def _criterion_asymptotics(model, pert, params_m, params_p, N: int, seed: int) -> dict:
    out = {}
    ok = True
    for name, fam, params, s in (
        ("model", model, params_m, seed),
        ("perturbed", pert, params_p, seed + 1),
    ):
        x, y = _sample_up(params, 20, s)
        ratio, band_y, band_x = _orbit_tail_stats(fam, x, y, N)
        good = bool(np.all((ratio >= 0.95) & (ratio <= 1.05)))
        out[name] = {
            "ratio_min": float(ratio.min()),
            "ratio_max": float(ratio.max()),
            "band_y_scaled": list(band_y),
            "band_x_mod": list(band_x),
            "ratio_ok": good,
        }
        ok = ok and good
    out["N"] = N
    out["pass"] = bool(ok)
    return out


def _criterion_residual_constant(model, pert) -> dict:
    c_m = coords.estimate_c(model, (2.0, 0.1))
    c_p = coords.estimate_c(pert, (2.0, 0.1))
    ok = abs(c_m - 0.75) < 1e-2 and abs(c_p - 0.75) < 5e-2
    return {
        "pass": bool(ok),
        "model_c": [c_m.real, c_m.imag],
        "model_dev": abs(c_m - 0.75),
        "perturbed_c": [c_p.real, c_p.imag],
        "perturbed_dev": abs(c_p - 0.75),
    }


def _coordinate_suite(fam: MapFamily, chart: str, params: BasinParams,
                      c: complex, seed: int, n_samples: int = 100) -> dict:
    """psi/sigma/tau functional-equation residuals on one (family, chart)."""
    x, y = _sample_up_moderate(params, n_samples, seed)
    if chart == "up":
        a, b = x, y
    else:
        a, b = x * y, y
    fa, fb = _step_arrays(fam, chart, a, b)
    tol = _tol_for(fam)
    n_max = 2 * 10**5
    alla = np.concatenate([a, fa])
    allb = np.concatenate([b, fb])
    val, n_used, res, done, _ = _psi_batch(fam, chart, alla, allb, c, tol, 10, n_max)
    psi_p, psi_fp = val[:n_samples], val[n_samples:]
    # sigma's distance to its limit is ~n * (Cauchy increment), and its
    # increments rescale by e^{-Re(1/(2 psi))} between p and F(p), so
    # independently stopped estimates drift apart; evaluate both orbits at
    # one matched truncation instead, where the telescoping is exact up to
    # a single increment (~5e-9 at n = 3e4)
    n_match = 3 * 10**4
    (sig, _, _, sdone), (tv, _, _, tdone) = _sigma_tau_batch(
        fam, chart, alla, allb, val, np.inf, n_match, n_match + 2
    )
    sig_p, sig_fp = sig[:n_samples], sig[n_samples:]
    tau_p, tau_fp = tv[:n_samples], tv[n_samples:]
    lamc = fam.lam.conjugate()
    psi_res = float(np.max(np.abs(psi_fp - psi_p - 1.0)))
    tau_res = float(np.max(np.abs(tau_fp - lamc * tau_p)))
    sig_res = float(np.max(np.abs(sig_fp - lamc * np.exp(-0.5 / psi_p) * sig_p)))
    # translation form: second components of (psi, e^{2 pi i phi psi} tau)
    phase_p = np.exp(2j * np.pi * fam.rot.phi * psi_p)
    phase_fp = np.exp(2j * np.pi * fam.rot.phi * psi_fp)
    s2_p = phase_p * tau_p
    s2_fp = phase_fp * tau_fp
    trans_res = float(
        np.max(np.abs(s2_fp - s2_p) / np.maximum(np.abs(s2_p), np.abs(s2_fp)))
    )
    converged = bool(done.all() and sdone.all() and tdone.all())
    return {
        "converged": converged,
        "psi_translation_residual": psi_res,
        "tau_equivariance_residual": tau_res,
        "sigma_equation_residual": sig_res,
        "translation_second_component_relative_residual": trans_res,
        "tolerance": tol,
        "max_n_used": int(n_used.max()),
        "_arrays": (a, b, psi_p, psi_fp, tau_p, tau_fp),
    }


def _criterion_fatou(model, pert, suites) -> dict:
    out = {}
    ok = True
    for name in ("model_up", "perturbed_up"):
        s = suites[name]
        out[name + "_psi_residual"] = s["psi_translation_residual"]
        ok = ok and s["converged"] and s["psi_translation_residual"] < 1e-6
    # deep-point asymptotics with the symbolic constant 3/4; the convergent
    # normalization is psi ~ U - (3/4) log U
    p = (1.0, 1e-3)
    U0 = coords.U_of(p)
    est = coords.psi(model, p, tol=1e-10, n_max=10**5, c=0.75)
    bound = abs(est.value - (U0 - 0.75 * cmath.log(U0))) * abs(U0)
    out["deep_point_U0"] = abs(U0)
    out["deep_point_constant"] = bound
    ok = ok and bound <= 10.0
    out["pass"] = bool(ok)
    return out


def _criterion_harmonic() -> dict:
    h1 = coords.harmonic_log_limit(1.0)
    oracle = coords.harmonic_log_closed_form(1.0)
    dev_gamma = abs(h1 - EULER_GAMMA)
    dev_oracle = abs(h1 - oracle)
    worst = 0.0
    for re in (10.0, 31.6, 100.0, 1000.0, 10000.0):
        for im in (0.0, 10.0, -10.0, 100.0, -100.0, 1000.0, -1000.0):
            zeta = complex(re, im)
            worst = max(worst, abs(zeta * coords.harmonic_log_limit(zeta)))
    ok = dev_gamma < 1e-8 and dev_oracle < 1e-8 and worst <= 1.0
    return {
        "pass": bool(ok),
        "h1": [h1.real, h1.imag],
        "dev_from_euler_gamma": dev_gamma,
        "dev_from_digamma_oracle": dev_oracle,
        "max_abs_zeta_h": worst,
    }


def _cross_identity(fam: MapFamily, params: BasinParams, c: complex, seed: int,
                    n_samples: int = 20, n_match: int = 5 * 10**5) -> dict:
    """tau versus e^{-h(psi)/2} sqrt(psi) sigma at one matched truncation.

    Samples are restricted to |x0| >= 1/2 so that the finite-truncation error
    of the identity, about |tau|/(4 n), sits safely below 1e-6 at n = 5e5.
    The widely quoted exponent is +h/2; the identity only closes with -h/2,
    and the +h/2 residual is reported alongside.
    """
    x, y = _sample_up(params, 20 * n_samples, seed)
    keep = np.abs(x) >= 0.5
    x, y = x[keep][:n_samples], y[keep][:n_samples]
    tol = _tol_for(fam)
    val, _, _, done, _ = _psi_batch(fam, "up", x, y, c, tol, 10, 2 * 10**5)
    (sig, _, _, _), (tv, _, _, _) = _sigma_tau_batch(
        fam, "up", x, y, val, np.inf, n_match, n_match + 2
    )
    h = np.array([coords.harmonic_log_limit(complex(p)) for p in val])
    rhs = np.sqrt(val) * sig
    res_minus = float(np.max(np.abs(tv - np.exp(-0.5 * h) * rhs)))
    res_plus = float(np.max(np.abs(tv - np.exp(0.5 * h) * rhs)))
    return {
        "n_samples": int(x.size),
        "matched_n": n_match,
        "psi_converged": bool(done.all()),
        "residual_minus_h": res_minus,
        "residual_plus_h": res_plus,
    }


def _criterion_tau(model, pert, params_m, params_p, c_m, c_p, suites, seed) -> dict:
    out = {}
    ok = True
    for name in ("model_up", "perturbed_up"):
        s = suites[name]
        out[name + "_tau_residual"] = s["tau_equivariance_residual"]
        out[name + "_sigma_residual"] = s["sigma_equation_residual"]
        ok = ok and s["tau_equivariance_residual"] < 1e-6
        ok = ok and s["sigma_equation_residual"] < 1e-6
    for name, fam, params, c, s in (
        ("model", model, params_m, c_m, seed),
        ("perturbed", pert, params_p, c_p, seed + 1),
    ):
        ci = _cross_identity(fam, params, c, s)
        out[f"{name}_cross_identity"] = ci
        ok = ok and ci["psi_converged"] and ci["residual_minus_h"] < 1e-6
    out["pass"] = bool(ok)
    return out


def _pullback_checks(fam: MapFamily, params: BasinParams, c: complex,
                     suite: dict, n_back: int = 12) -> list[dict]:
    """Global-coordinate contract on points pulled back out of the basin."""
    a, b, psi_p, _, tau_p, _ = suite["_arrays"]
    # prefer shallow samples (small Re U) so that n_back steps of pullback
    # actually exit the basin and force a long re-entry time
    depth = np.real(1.0 / (a * b * b))
    order = np.argsort(depth)
    results = []
    tol = _tol_for(fam)
    for idx in order:
        if len(results) >= 3:
            break
        z, w = complex(a[idx] * b[idx]), complex(b[idx])
        try:
            for _ in range(n_back):
                z, w = invert_down(fam, (z, w))
        except InversionError:
            continue
        p_back = (z / w, w)
        try:
            entry = coords._first_basin_entry(fam, "up", p_back[0], p_back[1], params, 10**4)[0]
        except ParacylError:
            continue
        if entry <= 10:
            continue
        try:
            cc1 = coords.Phi(fam, p_back, params, tol=tol, c=c)
            fp = _step_arrays(fam, "up", p_back[0], p_back[1])
            cc2 = coords.Phi(fam, fp, params, tol=tol, c=c)
        except ParacylError:
            continue
        lamc = fam.lam.conjugate()
        results.append(
            {
                "entry_time": entry,
                "psi_residual": abs(cc2.psi - cc1.psi - 1.0),
                "tau_residual": abs(cc2.tau - lamc * cc1.tau),
            }
        )
    return results


def _criterion_conjugacy(model, pert, params_m, params_p, c_m, c_p, suites) -> dict:
    out = {}
    ok = True
    for name in ("model_up", "model_down", "perturbed_up", "perturbed_down"):
        s = suites[name]
        out[name] = {
            k: s[k]
            for k in (
                "psi_translation_residual",
                "tau_equivariance_residual",
                "translation_second_component_relative_residual",
                "converged",
            )
        }
        ok = ok and s["converged"]
        ok = ok and s["psi_translation_residual"] < 1e-6
        ok = ok and s["tau_equivariance_residual"] < 1e-6
        ok = ok and s["translation_second_component_relative_residual"] < 1e-6
    for name, fam, params, c in (
        ("model", model, params_m, c_m),
        ("perturbed", pert, params_p, c_p),
    ):
        checks = _pullback_checks(fam, params, c, suites[f"{name}_up"])
        out[f"{name}_pullback"] = checks
        ok = ok and len(checks) >= 1
        for chk in checks:
            ok = ok and chk["psi_residual"] < 1e-6 and chk["tau_residual"] < 1e-6
    out["pass"] = bool(ok)
    return out


def _pick_y0(params: BasinParams, x0: complex) -> complex:
    for y0 in (0.1, 0.05, 0.15, 0.2, 0.02):
        if in_basin_up((x0, y0), params):
            return y0
    raise ParacylError(f"no slice value puts x0={x0} in the sampled region")


def _criterion_limit_circle(model, pert, params_m, params_p, seed: int) -> dict:
    out = {}
    y0_m = _pick_y0(params_m, 0.5)
    rep_m = analysis.limit_circle(model, (0.5, y0_m), N=10**5, tau_tol=1e-8)
    rep_m_small = analysis.limit_circle(model, (0.5, y0_m), N=10**4, tau_tol=1e-8)
    out["model"] = rep_m.to_json()
    out["model_discrepancy_N1e4"] = rep_m_small.discrepancy
    ok = abs(rep_m.radius_hat - 0.5) <= 1e-9
    ok = ok and abs(rep_m.product - 1.0) <= 2e-2
    ok = ok and rep_m_small.discrepancy < 0.02

    y0_p = _pick_y0(params_p, 0.5)
    rep_p = analysis.limit_circle(pert, (0.5, y0_p), N=10**5, tau_tol=1e-5)
    rep_p_small = analysis.limit_circle(pert, (0.5, y0_p), N=10**4, tau_tol=1e-5)
    out["perturbed"] = rep_p.to_json()
    out["perturbed_N1e4_max_radial_dev"] = rep_p_small.max_radial_dev
    out["perturbed_discrepancy_N1e4"] = rep_p_small.discrepancy
    ok = ok and abs(rep_p.product - 1.0) <= 5e-2
    ok = ok and rep_p.max_radial_dev < rep_p_small.max_radial_dev
    ok = ok and rep_p_small.discrepancy < 0.02
    out["pass"] = bool(ok)
    return out


def _criterion_rotation_freedom(model, pert, params_m, params_p) -> dict:
    y0_m = _pick_y0(params_m, 0.5)
    rf_m = analysis.rotation_freedom(model, (0.5, y0_m), N=10**4, modulus=7)
    y0_p = _pick_y0(params_p, 0.5)
    rf_p = analysis.rotation_freedom(pert, (0.5, y0_p), N=10**4, modulus=7)
    ok = rf_m["max_pairwise_deviation"] < 1e-3
    return {
        "pass": bool(ok),
        "modulus": 7,
        "model_max_deviation": rf_m["max_pairwise_deviation"],
        "perturbed_max_deviation": rf_p["max_pairwise_deviation"],
    }


def run_acceptance(cfg: RunConfig) -> dict:
    """One full pass of criteria 1-11; returns the JSON-serializable report."""
    model = model_family(cfg.rot, cfg.l)
    pert = default_perturbed_family(cfg.rot, cfg.l, cfg.a, cfg.b)

    if cfg.r is not None:
        r0_m = r0_p = cfg.r
    else:
        r0_m = find_r0(model, cfg.theta, cfg.beta, cfg.r_hi, seed=cfg.seed + 11).r0
        r0_p = find_r0(pert, cfg.theta, cfg.beta, cfg.r_hi, seed=cfg.seed + 12).r0
    params_m = BasinParams(r0_m, cfg.theta, cfg.beta)
    params_p = BasinParams(r0_p, cfg.theta, cfg.beta)

    c_m = coords.estimate_c(model, (2.0, 0.1))
    c_p = coords.estimate_c(pert, (2.0, 0.1))

    suites = {}
    for name, fam, params, c, s in (
        ("model_up", model, params_m, c_m, cfg.seed + 21),
        ("model_down", model, params_m, c_m, cfg.seed + 21),
        ("perturbed_up", pert, params_p, c_p, cfg.seed + 22),
        ("perturbed_down", pert, params_p, c_p, cfg.seed + 22),
    ):
        chart = name.split("_")[1]
        suites[name] = _coordinate_suite(fam, chart, params, c, s)

    crit = {
        "c01_rotation_diagnostics": _criterion_rotation(),
        "c02_semiconjugacy": _criterion_semiconjugacy(model, pert, cfg.seed + 1),
        "c03_basin_invariance": _criterion_invariance(
            model, pert, params_m, params_p, cfg.seed + 31
        ),
        "c04_orbit_asymptotics": _criterion_asymptotics(
            model, pert, params_m, params_p, cfg.n, cfg.seed + 41
        ),
        "c05_residual_constant": _criterion_residual_constant(model, pert),
        "c06_fatou_coordinate": _criterion_fatou(model, pert, suites),
        "c07_harmonic_log": _criterion_harmonic(),
        "c08_tau_machinery": _criterion_tau(
            model, pert, params_m, params_p, c_m, c_p, suites, cfg.seed + 81
        ),
        "c09_global_conjugacy": _criterion_conjugacy(
            model, pert, params_m, params_p, c_m, c_p, suites
        ),
        "c10_limit_circles": _criterion_limit_circle(
            model, pert, params_m, params_p, cfg.seed + 101
        ),
        "c11_rotation_freedom": _criterion_rotation_freedom(
            model, pert, params_m, params_p
        ),
    }
    return {
        "config": cfg.describe(),
        "resolved_r0": {"model": r0_m, "perturbed": r0_p},
        "criteria": crit,
    }


def _strip_private(obj):
    if isinstance(obj, dict):
        return {k: _strip_private(v) for k, v in obj.items() if not k.startswith("_")}
    if isinstance(obj, (list, tuple)):
        return [_strip_private(v) for v in obj]
    return obj


def run_acceptance_twice(cfg: RunConfig) -> dict:
    """Two full passes; adds the determinism criterion and the overall verdict."""
    first = _strip_private(run_acceptance(cfg))
    second = _strip_private(run_acceptance(cfg))
    identical = canonical_json(first) == canonical_json(second)
    report = first
    report["criteria"]["c12_determinism"] = {"pass": bool(identical)}
    report["failing"] = sorted(
        k for k, v in report["criteria"].items() if not v["pass"]
    )
    report["all_pass"] = not report["failing"]
    return report

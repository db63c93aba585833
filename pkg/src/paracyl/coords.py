"""Fatou-type coordinates on the attracting region.

For an orbit (x_n, y_n) of the lift with U_n = 1/(x_n y_n^2), the estimators
here compute

    psi    -- the Fatou coordinate, limit of U_n - c*log(U_n) - n, with the
              translation property psi(F p) = psi(p) + 1,
    sigma  -- limit of lam^n * exp((1/2) sum_{j<n} 1/(psi+j)) * y_n,
    tau    -- limit of lam^n * sqrt(psi+n) * y_n, with tau(F p) = conj(lam)*tau(p),

plus the harmonic-minus-log limit h(zeta) that links sigma and tau, with an
independent digamma implementation as its oracle (h = log - digamma).

Estimators are chart-generic: a down-chart point (z, w) is handled through
U = 1/(zw) and the fiber coordinate w, which agree with the up-chart values
since zw = x*y^2 and w = y.  Convergence is by Cauchy increments; all logs
and square roots are principal, valid because the quantities stay in
right-half-plane sectors along basin orbits.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateFiberError,
    DomainError,
)
from .germ import ChartPoint, MapFamily
from .regions import BasinParams, in_basin_down, in_basin_up

DEFAULT_TOL = 1e-8
DEFAULT_N_MAX = 10**6


@dataclass(frozen=True)
class FatouEstimate:
    """A converged limit value with its stopping diagnostics."""

    value: complex
    n_used: int
    residual: float
    c_used: complex

    def to_json(self) -> dict:
        return {
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "n_used": self.n_used,
            "residual": self.residual,
            "c_re": self.c_used.real,
            "c_im": self.c_used.imag,
        }


@dataclass(frozen=True)
class CylinderCoords:
    """Image of a point under the global coordinate pair (psi, tau-component)."""

    psi: complex
    tau: complex

    def __post_init__(self) -> None:
        if self.tau == 0:
            raise DegenerateFiberError("tau-component must be nonzero")

    def to_json(self) -> dict:
        return {
            "psi_re": self.psi.real,
            "psi_im": self.psi.imag,
            "tau_re": self.tau.real,
            "tau_im": self.tau.imag,
        }


def _unpack(p) -> tuple[str, complex, complex]:
    if isinstance(p, ChartPoint):
        return p.chart, p.c1, p.c2
    if isinstance(p, (tuple, list)) and len(p) == 2:
        # bare pairs are read in the up chart
        return "up", complex(p[0]), complex(p[1])
    raise DomainError(f"expected a ChartPoint or an (x, y) pair, got {p!r}")


def U_of(p) -> complex:
    """U = 1/(x*y^2) upstairs, 1/(z*w) downstairs; chart-independent."""
    chart, a, b = _unpack(p)
    prod = a * b * b if chart == "up" else a * b
    if prod == 0:
        raise DomainError("U is undefined where the coordinate product vanishes")
    return 1.0 / prod


def _step_arrays(fam: MapFamily, chart: str, a, b):
    """One map step on (scalar or array) coordinates in the given chart."""
    if chart == "down":
        return fam.step_down(a, b)
    lam = fam.lam
    z = a * b
    s = 1 - z * b * 0.5
    if fam.is_model:
        return fam.lam2 * a, b * (lam.conjugate() * s)
    q1v = fam.q1(z, b)
    q2v = fam.q2(z, b)
    a1 = fam.lam2 * (a * s + lam.conjugate() * q1v) / (s + lam * q2v)
    b1 = b * (lam.conjugate() * s + q2v)
    return a1, b1


def _U_arrays(chart: str, a, b):
    prod = a * b * b if chart == "up" else a * b
    return 1.0 / prod


def estimate_c(fam: MapFamily, p, n_min: int = 100, n_max: int = 10**4) -> complex:
    """Tail median of c_n = (U_{n+1} - U_n - 1) * U_n over n in [n_min, n_max).

    For the model map the one-variable expansion u_1 = u - u^2 + u^3/4 gives
    U_1 = U + 1 + (3/4)/U + O(1/U^2), so c = 3/4 is the reference value.
    """
    if n_min < 10 or n_max <= n_min:
        raise DomainError(f"need n_max > n_min >= 10, got ({n_min}, {n_max})")
    chart, a, b = _unpack(p)
    U_of(p)  # raises on the invariant curve
    U_prev = None
    cs = []
    for n in range(n_max + 1):
        if not (math.isfinite(abs(a)) and math.isfinite(abs(b))) or a * b == 0:
            raise ConvergenceError(
                f"orbit left the estimator's domain at step {n}", n=n
            )
        U = _U_arrays(chart, a, b)
        if U_prev is not None and n - 1 >= n_min:
            cs.append((U - U_prev - 1.0) * U_prev)
        U_prev = U
        a, b = _step_arrays(fam, chart, a, b)
    arr = np.array(cs, dtype=complex)
    return complex(np.median(arr.real), np.median(arr.imag))


def _psi_batch(fam, chart, a, b, c, tol, n_min, n_max):
    """Vectorized psi estimator; returns (value, n_used, residual, converged)."""
    a = np.atleast_1d(np.asarray(a, dtype=complex)).copy()
    b = np.atleast_1d(np.asarray(b, dtype=complex)).copy()
    m = a.size
    val = np.zeros(m, dtype=complex)
    n_used = np.zeros(m, dtype=np.int64)
    res = np.full(m, np.inf)
    done = np.zeros(m, dtype=bool)
    with np.errstate(all="ignore"):
        prev = _U_arrays(chart, a, b)
        prev = prev - c * np.log(prev)
        last_inc = np.full(m, np.inf)
        for n in range(1, n_max + 1):
            a, b = _step_arrays(fam, chart, a, b)
            U = _U_arrays(chart, a, b)
            cur = U - c * np.log(U) - n
            inc = np.abs(cur - prev)
            newly = ~done & (inc < tol) & (n - 1 >= n_min)
            if newly.any():
                val[newly] = prev[newly]
                n_used[newly] = n - 1
                res[newly] = inc[newly]
                done |= newly
                if done.all():
                    break
            last_inc = inc
            prev = cur
    res = np.where(done, res, last_inc)
    return val, n_used, res, done, prev


def _sigma_tau_batch(fam, chart, a, b, psi0, tol, n_min, n_max):
    """Vectorized sigma and tau estimators sharing one orbit sweep."""
    a = np.atleast_1d(np.asarray(a, dtype=complex)).copy()
    b = np.atleast_1d(np.asarray(b, dtype=complex)).copy()
    psi0 = np.atleast_1d(np.asarray(psi0, dtype=complex))
    m = a.size
    phi = fam.rot.phi
    S = np.zeros(m, dtype=complex)

    out = {}
    for key in ("sigma", "tau"):
        out[key] = (
            np.zeros(m, dtype=complex),
            np.zeros(m, dtype=np.int64),
            np.full(m, np.inf),
            np.zeros(m, dtype=bool),
        )
    with np.errstate(all="ignore"):
        sig_prev = b.copy()
        tau_prev = np.sqrt(psi0) * b
        for n in range(1, n_max + 1):
            S = S + 1.0 / (psi0 + (n - 1))
            a, b = _step_arrays(fam, chart, a, b)
            lamn = cmath.exp(2j * math.pi * phi * n)
            sig_cur = lamn * np.exp(0.5 * S) * b
            tau_cur = lamn * np.sqrt(psi0 + n) * b
            for key, prev, cur in (
                ("sigma", sig_prev, sig_cur),
                ("tau", tau_prev, tau_cur),
            ):
                val, n_used, res, done = out[key]
                inc = np.abs(cur - prev)
                newly = ~done & (inc < tol) & (n - 1 >= n_min)
                if newly.any():
                    val[newly] = prev[newly]
                    n_used[newly] = n - 1
                    res[newly] = inc[newly]
                    done |= newly
                    out[key] = (val, n_used, res, done)
            if out["sigma"][3].all() and out["tau"][3].all():
                break
            sig_prev, tau_prev = sig_cur, tau_cur
    return out["sigma"], out["tau"]


def _require_converged(done, res, n_used, n_max, what):
    if not bool(done[0]):
        raise ConvergenceError(
            f"{what} did not converge within {n_max} steps",
            last_increment=float(res[0]) if np.isfinite(res[0]) else None,
            n=n_max,
        )


def psi(fam: MapFamily, p, tol: float = DEFAULT_TOL, n_max: int = DEFAULT_N_MAX,
        c: complex | None = None, n_min: int = 10) -> FatouEstimate:
    """Fatou coordinate estimate; psi(F p) = psi(p) + 1 at matched truncation."""
    if tol <= 0:
        raise DomainError(f"tol must be > 0, got {tol}")
    chart, a, b = _unpack(p)
    U_of(p)
    if c is None:
        c = estimate_c(fam, p, n_max=min(n_max, 10**4))
    val, n_used, res, done, _ = _psi_batch(fam, chart, a, b, c, tol, n_min, n_max)
    _require_converged(done, res, n_used, n_max, "psi")
    return FatouEstimate(complex(val[0]), int(n_used[0]), float(res[0]), complex(c))


def sigma(fam: MapFamily, p, tol: float = DEFAULT_TOL, n_max: int = DEFAULT_N_MAX,
          c: complex | None = None, n_min: int = 10) -> FatouEstimate:
    """sigma estimate; sigma(F p) = conj(lam)*exp(-1/(2 psi))*sigma(p)."""
    est = psi(fam, p, tol=tol, n_max=n_max, c=c, n_min=n_min)
    chart, a, b = _unpack(p)
    (sval, sn, sres, sdone), _ = _sigma_tau_batch(
        fam, chart, a, b, est.value, tol, n_min, n_max
    )
    _require_converged(sdone, sres, sn, n_max, "sigma")
    return FatouEstimate(complex(sval[0]), int(sn[0]), float(sres[0]), est.c_used)


def tau(fam: MapFamily, p, tol: float = DEFAULT_TOL, n_max: int = DEFAULT_N_MAX,
        c: complex | None = None, n_min: int = 10) -> FatouEstimate:
    """tau estimate; tau(F p) = conj(lam)*tau(p), |tau|^2 = 1/(limit radius)."""
    est = psi(fam, p, tol=tol, n_max=n_max, c=c, n_min=n_min)
    chart, a, b = _unpack(p)
    _, (tval, tn, tres, tdone) = _sigma_tau_batch(
        fam, chart, a, b, est.value, tol, n_min, n_max
    )
    _require_converged(tdone, tres, tn, n_max, "tau")
    if abs(tval[0]) < tol:
        raise DegenerateFiberError(
            f"tau estimate indistinguishable from zero (|tau| = {abs(tval[0]):.3e})"
        )
    return FatouEstimate(complex(tval[0]), int(tn[0]), float(tres[0]), est.c_used)


_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66)


def digamma(zeta: complex) -> complex:
    """Digamma on the right half-plane via recurrence shift plus the
    asymptotic series through the 1/zeta^10 term; absolute error < 1e-12."""
    zeta = complex(zeta)
    if zeta.real <= 0:
        raise DomainError(f"digamma requires Re(zeta) > 0, got {zeta}")
    shift = 0.0 + 0.0j
    while zeta.real < 10.0:
        shift -= 1.0 / zeta
        zeta += 1.0
    inv2 = 1.0 / (zeta * zeta)
    series = 0.0 + 0.0j
    power = inv2
    for k, b2k in enumerate(_BERNOULLI, start=1):
        series += b2k / (2 * k) * power
        power *= inv2
    return shift + cmath.log(zeta) - 0.5 / zeta - series


def harmonic_log_closed_form(zeta: complex) -> complex:
    """h(zeta) = log(zeta) - digamma(zeta): the cross-check for the limit."""
    zeta = complex(zeta)
    if zeta.real <= 0:
        raise DomainError(f"requires Re(zeta) > 0, got {zeta}")
    return cmath.log(zeta) - digamma(zeta)


def harmonic_log_limit(zeta: complex, tol: float = 1e-10) -> complex:
    """h(zeta) = lim_n [ sum_{j<n} 1/(zeta+j) - log((zeta+n)/zeta) ].

    Computed from partial sums at checkpoints m, 2m, ..., Km extrapolated to
    the limit by Neville interpolation in t = 1/(zeta+m); the partial sums
    differ from the limit by an asymptotic polynomial in t (leading term
    -t/2), so the extrapolation converges fast.  Independent of digamma.
    """
    zeta = complex(zeta)
    if zeta.real <= 0:
        raise DomainError(f"requires Re(zeta) > 0, got {zeta}")
    K = 6
    # checkpoints must spread out relative to |zeta| or the extrapolation
    # nodes bunch together and cancellation eats the gain
    m0 = max(1024, int(abs(zeta)))
    last = None
    for _ in range(6):
        ms = [i * m0 for i in range(1, K + 1)]
        j = np.arange(ms[-1], dtype=float)
        terms = 1.0 / (zeta + j)
        csum = np.cumsum(terms)
        t = np.array([1.0 / (zeta + m) for m in ms])
        f = np.array(
            [csum[m - 1] - np.log((zeta + m) / zeta) for m in ms], dtype=complex
        )
        # Neville tableau evaluated at t = 0
        for level in range(1, K):
            for i in range(K - level):
                f[i] = (t[i + level] * f[i] - t[i] * f[i + 1]) / (
                    t[i + level] - t[i]
                )
        value = complex(f[0])
        if last is not None and abs(value - last) < tol:
            return value
        last = value
        m0 *= 2
    raise ConvergenceError(
        "harmonic-log extrapolation did not stabilize",
        last_increment=abs(value - last) if last is not None else None,
    )


def _first_basin_entry(fam, chart, a, b, params, n_entry_max):
    membership = in_basin_up if chart == "up" else in_basin_down
    for n in range(n_entry_max + 1):
        if membership((a, b), params):
            return n, a, b
        a, b = _step_arrays(fam, chart, a, b)
    raise ConvergenceError(
        f"no basin entry within {n_entry_max} steps: no witness that the "
        "point lies in the attracting component",
        n=n_entry_max,
    )


def Phi(fam: MapFamily, p, params: BasinParams, tol: float = DEFAULT_TOL,
        n_max: int = DEFAULT_N_MAX, n_entry_max: int = 10**4,
        c: complex | None = None) -> CylinderCoords:
    """Global coordinate pair: conjugates the map to (psi, xi) -> (psi+1, conj(lam)*xi).

    Evaluated at the first basin entry n: psi(p) = psi(F^n p) - n and the
    fiber component is lam^n * tau(F^n p), which is independent of the choice
    of entry time by the tau equivariance.
    """
    chart, a, b = _unpack(p)
    n, a, b = _first_basin_entry(fam, chart, a, b, params, n_entry_max)
    q = ChartPoint(chart, a, b)
    est_psi = psi(fam, q, tol=tol, n_max=n_max, c=c)
    est_tau = tau(fam, q, tol=tol, n_max=n_max, c=est_psi.c_used)
    lamn = cmath.exp(2j * math.pi * fam.rot.phi * n)
    return CylinderCoords(psi=est_psi.value - n, tau=lamn * est_tau.value)


def Psi(fam: MapFamily, p, params: BasinParams, tol: float = DEFAULT_TOL,
        n_max: int = DEFAULT_N_MAX, n_entry_max: int = 10**4,
        c: complex | None = None) -> CylinderCoords:
    """Rotation-free variant: conjugates the map to the translation (z+1, w).

    Defined as (zeta, lam^zeta * xi) with (zeta, xi) = Phi(p) and
    lam^zeta := exp(2*pi*i*phi*zeta), a global single-valued branch choice.
    """
    cc = Phi(fam, p, params, tol=tol, n_max=n_max, n_entry_max=n_entry_max, c=c)
    factor = cmath.exp(2j * math.pi * fam.rot.phi * cc.psi)
    return CylinderCoords(psi=cc.psi, tau=factor * cc.tau)

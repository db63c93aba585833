"""Orbit asymptotics, limit-circle identification, and invariance experiments.

Basin orbits of the lift satisfy U_n ~ n, |y_n| ~ n^(-1/2), |x_n| ~ 1, and
the x_n accumulate on a round circle whose radius is the reciprocal of
|tau|^2 (the widely quoted form radius = |tau|^2 is recorded side by side;
|tau_n|^2 = U_n |y_n|^2 = 1/|x_n| forces the reciprocal).  Verdicts here are
sampled numerical evidence, never proofs.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import coords
from .errors import DomainError
from .germ import ChartPoint, MapFamily, orbit_up
from .regions import BasinParams, in_basin_down, in_basin_up, sample_basin_arrays


def _as_up_pair(p) -> tuple[complex, complex]:
    if isinstance(p, ChartPoint):
        p = p.to_up()
        return p.c1, p.c2
    return complex(p[0]), complex(p[1])


@dataclass
class OrbitDiagnostics:
    """Scaled orbit views with empirical bands and a hard U_n/n verdict."""

    ratio_Un_n: np.ndarray
    y_scaled: np.ndarray
    x_mod: np.ndarray
    stopped_early: bool
    stop_reason: str | None
    ratio_final: float
    ratio_ok: bool
    band_y: tuple[float, float]
    band_x: tuple[float, float]

    def to_json(self) -> dict:
        return {
            "ratio_final": self.ratio_final,
            "ratio_ok": self.ratio_ok,
            "band_y": list(self.band_y),
            "band_x": list(self.band_x),
            "stopped_early": self.stopped_early,
            "stop_reason": self.stop_reason,
        }


def verify_asymptotics(
    fam: MapFamily, p, N: int, delta: float = 0.05
) -> OrbitDiagnostics:
    """Check |U_N|/N within [1-delta, 1+delta] and report |y_n|*sqrt(n),
    |x_n| bands over the tail n >= N/10; band edges are reported, not assumed."""
    if N < 10**3:
        raise DomainError(f"N must be >= 1e3, got {N}")
    x0, y0 = _as_up_pair(p)
    if y0 == 0:
        raise DomainError("asymptotics are undefined on the invariant curve")
    rec = orbit_up(fam, (x0, y0), N)
    n = np.arange(1, len(rec.x))
    ratio = np.abs(rec.U[1:]) / n
    y_scaled = np.abs(rec.y[1:]) * np.sqrt(n)
    x_mod = np.abs(rec.x[1:])
    tail = n >= max(1, N // 10)
    ratio_final = float(ratio[-1]) if len(ratio) else math.nan
    ratio_ok = (
        not rec.stopped_early
        and len(ratio) == N
        and 1 - delta <= ratio_final <= 1 + delta
    )
    band = lambda v: (float(v[tail].min()), float(v[tail].max())) if tail.any() else (
        math.nan,
        math.nan,
    )
    return OrbitDiagnostics(
        ratio_Un_n=ratio,
        y_scaled=y_scaled,
        x_mod=x_mod,
        stopped_early=rec.stopped_early,
        stop_reason=rec.stop_reason,
        ratio_final=ratio_final,
        ratio_ok=bool(ratio_ok),
        band_y=band(y_scaled),
        band_x=band(x_mod),
    )


@dataclass
class CircleReport:
    """Fitted limit circle of {x_n} and its relation to |tau|^2."""

    radius_hat: float
    tau_sq_mod: float
    max_radial_dev: float
    discrepancy: float
    product: float  # radius_hat * tau_sq_mod; the verified law says this is 1
    printed_dev: float  # |radius_hat - tau_sq_mod|; the quoted non-reciprocal form
    angles: np.ndarray = field(repr=False)

    def to_json(self) -> dict:
        return {
            "radius_hat": self.radius_hat,
            "tau_sq_mod": self.tau_sq_mod,
            "max_radial_dev": self.max_radial_dev,
            "discrepancy": self.discrepancy,
            "product_radius_tau_sq": self.product,
            "printed_form_deviation": self.printed_dev,
        }


def equidistribution(angles, n_bins: int = 1000) -> float:
    """Binned star discrepancy of an angle sequence mod 2*pi."""
    angles = np.asarray(angles, dtype=float)
    if angles.size < 10**3:
        raise DomainError(f"need at least 1e3 angles, got {angles.size}")
    frac = np.mod(angles, 2 * np.pi) / (2 * np.pi)
    counts = np.bincount(
        np.minimum((frac * n_bins).astype(int), n_bins - 1), minlength=n_bins
    )
    emp = np.cumsum(counts) / angles.size
    uni = np.arange(1, n_bins + 1) / n_bins
    return float(np.max(np.abs(emp - uni)))


def limit_circle(
    fam: MapFamily,
    p,
    N: int,
    tail_frac: float = 0.5,
    tau_tol: float = 1e-6,
    tau_n_min: int = 2 * 10**4,
) -> CircleReport:
    """Tail-median radius of {x_n} versus |tau(p)|^2 (reciprocal radius law)."""
    if N < 10**4:
        raise DomainError(f"N must be >= 1e4, got {N}")
    if not 0 < tail_frac < 1:
        raise DomainError(f"tail_frac must lie in (0,1), got {tail_frac}")
    x0, y0 = _as_up_pair(p)
    rec = orbit_up(fam, (x0, y0), N)
    if rec.stopped_early:
        raise DomainError(f"orbit stopped early ({rec.stop_reason}); not a basin point")
    start = int((1 - tail_frac) * N)
    tail_x = rec.x[start:]
    radii = np.abs(tail_x)
    radius_hat = float(np.median(radii))
    max_dev = float(np.max(np.abs(radii - radius_hat)))
    t = coords.tau(
        fam, (x0, y0), tol=tau_tol, n_max=max(N, 2 * tau_n_min), n_min=tau_n_min
    )
    tau_sq = abs(t.value) ** 2
    angles = np.angle(tail_x)
    return CircleReport(
        radius_hat=radius_hat,
        tau_sq_mod=tau_sq,
        max_radial_dev=max_dev,
        discrepancy=equidistribution(angles),
        product=radius_hat * tau_sq,
        printed_dev=abs(radius_hat - tau_sq),
        angles=angles,
    )


@dataclass
class InvarianceReport:
    """Sampled witness for forward invariance and uniform attraction."""

    n_samples: int
    one_step_failures: list[tuple[complex, complex]]
    attraction_max_norm: float
    attraction_threshold: float
    n_attraction_steps: int

    @property
    def one_step_ok(self) -> bool:
        return not self.one_step_failures

    @property
    def attraction_ok(self) -> bool:
        return self.attraction_max_norm < self.attraction_threshold

    def to_json(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "one_step_ok": self.one_step_ok,
            "one_step_failures": [
                [z.real, z.imag, w.real, w.imag] for z, w in self.one_step_failures
            ],
            "attraction_max_norm": self.attraction_max_norm,
            "attraction_threshold": self.attraction_threshold,
            "attraction_ok": self.attraction_ok,
            "n_attraction_steps": self.n_attraction_steps,
        }


def invariance_suite(
    fam: MapFamily,
    params: BasinParams,
    n_samples: int,
    seed: int,
    n_steps: int = 10**4,
    threshold: float = 1e-2,
) -> InvarianceReport:
    """Sample the downstairs region; test one-step invariance and the max
    norm after n_steps iterations against the threshold."""
    if n_samples == 0:
        return InvarianceReport(0, [], 0.0, threshold, n_steps)
    rng = np.random.default_rng(seed)
    z, w = sample_basin_arrays(params, n_samples, rng)
    z1, w1 = fam.step_down(z, w)
    inside = in_basin_down((z1, w1), params)
    failures = [
        (complex(z[i]), complex(w[i])) for i in np.flatnonzero(~inside)[:20]
    ]
    zn, wn = z.copy(), w.copy()
    for _ in range(n_steps):
        zn, wn = fam.step_down(zn, wn)
    norms = np.hypot(np.abs(zn), np.abs(wn))
    return InvarianceReport(
        n_samples=n_samples,
        one_step_failures=failures,
        attraction_max_norm=float(norms.max()),
        attraction_threshold=threshold,
        n_attraction_steps=n_steps,
    )


@dataclass(frozen=True)
class ProbeResult:
    """Heuristic orbit classification; no claim of deciding membership."""

    label: str
    entry_time: int | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {"label": self.label, "entry_time": self.entry_time, "detail": self.detail}


def stable_set_probe(
    fam: MapFamily, p, N: int, params: BasinParams
) -> ProbeResult:
    """Classify the orbit of an up-chart point over N steps (heuristic)."""
    if N < 10**3:
        raise DomainError(f"N must be >= 1e3, got {N}")
    x, y = _as_up_pair(p)
    if y == 0:
        if x == 0:
            return ProbeResult("converges_to_fixed_point_only", detail="fixed point")
        return ProbeResult(
            "rotation_on_curve", detail="invariant-curve point; |x_n| constant"
        )
    rec = orbit_up(fam, (x, y), N)
    member = in_basin_up((rec.x, rec.y), params)
    hits = np.flatnonzero(member)
    if hits.size:
        return ProbeResult("enters_basin", entry_time=int(hits[0]))
    if rec.stopped_early:
        if rec.stop_reason == "overflow":
            return ProbeResult("escaping", detail=f"overflow at step {rec.n_steps}")
        return ProbeResult("chart_exit", detail=f"at step {rec.n_steps}")
    z_final = rec.x[-1] * rec.y[-1]
    norm = math.hypot(abs(z_final), abs(rec.y[-1]))
    if norm < 1e-6:
        return ProbeResult(
            "converges_to_fixed_point_only", detail=f"final norm {norm:.3e}"
        )
    return ProbeResult("non_convergent", detail=f"final norm {norm:.3e}")


def rotation_freedom(
    fam: MapFamily, p, N: int = 10**4, modulus: int = 7, tail_frac: float = 0.5
) -> dict:
    """Subsequence limits along n = a (mod modulus) differ by lam^(2(a-b)).

    For each residue a, v_a is the tail mean of x_n * lam^(-2(n-a)) over
    n = a (mod modulus); the report gives max over pairs of
    |v_a/v_b - lam^(2(a-b))|.
    """
    if N < 10**3:
        raise DomainError(f"N must be >= 1e3, got {N}")
    x0, y0 = _as_up_pair(p)
    rec = orbit_up(fam, (x0, y0), N)
    if rec.stopped_early:
        raise DomainError(f"orbit stopped early ({rec.stop_reason})")
    n = np.arange(len(rec.x))
    phase = np.exp(-2j * np.pi * fam.rot.phi * 2.0 * n)
    start = int((1 - tail_frac) * N)
    v = []
    for a in range(modulus):
        lam2a = cmath.exp(2j * math.pi * fam.rot.phi * 2.0 * a)
        sel = (n >= start) & (n % modulus == a)
        v.append(complex(np.mean(rec.x[sel] * phase[sel]) * lam2a))
    max_dev = 0.0
    for a in range(modulus):
        for b in range(modulus):
            if a == b:
                continue
            expected = cmath.exp(2j * math.pi * fam.rot.phi * 2.0 * (a - b))
            max_dev = max(max_dev, abs(v[a] / v[b] - expected))
    return {
        "modulus": modulus,
        "subsequence_values": v,
        "max_pairwise_deviation": max_dev,
    }

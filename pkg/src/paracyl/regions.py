"""Membership predicates, samplers, and searches for the attracting regions.

Downstairs the candidate attracting region is

    B(r, theta, beta) = { (z, w) : zw in S(r, theta), |z| < |zw|^beta,
                                   |w| < |zw|^beta },

where S(r, theta) is the disc of radius r tangent to the origin intersected
with the sector |arg u| < theta.  Upstairs, with (x, y) = (z/w, w), the same
set becomes a sector condition on u = x*y^2 together with a two-sided band
|y|^((1-gamma)/gamma) < |x| < |y|^(gamma-1), gamma = beta/(1-beta).

All predicates use strict inequalities and the principal argument; points on
a boundary surface are classified out.  Predicates accept scalars or numpy
arrays (scalar in, python bool out).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SamplingError, SearchError
from .germ import ChartPoint, MapFamily

MAX_PROPOSALS = 10**7


@dataclass(frozen=True)
class BasinParams:
    """Region parameters r, theta, beta with the derived gamma and R."""

    r: float
    theta: float
    beta: float

    def __post_init__(self) -> None:
        if not self.r > 0:
            raise DomainError(f"r must be > 0, got {self.r}")
        if not 0 < self.theta < np.pi / 2:
            raise DomainError(f"theta must lie in (0, pi/2), got {self.theta}")
        if not 0 < self.beta < 0.5:
            raise DomainError(f"beta must lie in (0, 1/2), got {self.beta}")

    @property
    def gamma(self) -> float:
        return self.beta / (1.0 - self.beta)

    @property
    def R(self) -> float:
        return 1.0 / (2.0 * self.r)


def check_jet_compatibility(params: BasinParams, l: int) -> bool:
    """Whether beta*(l+1) >= 4 holds; warns (not raises) when it fails.

    The condition is impossible for any beta < 1/2 unless l >= 7, yet the
    standard experiment parameters are l=4, beta=0.3; so it is surfaced as a
    warning rather than enforced.
    """
    ok = params.beta * (l + 1) >= 4
    if not ok:
        warnings.warn(
            f"beta*(l+1) = {params.beta * (l + 1):.3g} < 4; "
            "the attraction guarantee is outside its proven regime",
            stacklevel=2,
        )
    return ok


def _scalarize(mask, scalar_in: bool):
    return bool(mask) if scalar_in else mask


def in_sector(u, params: BasinParams):
    """Strict membership of u in S(r, theta); u = 0 is out."""
    scalar = np.isscalar(u) or isinstance(u, complex)
    ua = np.asarray(u, dtype=complex)
    mask = (np.abs(ua - params.r) < params.r) & (np.abs(np.angle(ua)) < params.theta)
    return _scalarize(mask, scalar)


def in_H(U, R: float, theta: float):
    """Strict membership in the sector at infinity {Re U > R, |arg U| < theta}."""
    if not R > 0:
        raise DomainError(f"R must be > 0, got {R}")
    scalar = np.isscalar(U) or isinstance(U, complex)
    Ua = np.asarray(U, dtype=complex)
    mask = (Ua.real > R) & (np.abs(np.angle(Ua)) < theta)
    return _scalarize(mask, scalar)


def in_basin_down(p, params: BasinParams):
    """Strict membership of (z, w) in B(r, theta, beta); zw = 0 is out."""
    z, w = p
    scalar = (np.isscalar(z) or isinstance(z, complex)) and (
        np.isscalar(w) or isinstance(w, complex)
    )
    za = np.asarray(z, dtype=complex)
    wa = np.asarray(w, dtype=complex)
    u = za * wa
    au = np.abs(u)
    bound = au**params.beta
    mask = in_sector(u, params) & (np.abs(za) < bound) & (np.abs(wa) < bound)
    return _scalarize(mask, scalar)


def in_basin_up(p, params: BasinParams):
    """Strict membership of (x, y) in the lifted region; y = 0 is out.

    Equivalent to in_basin_down((x*y, y)) for y != 0: substituting z = x*y,
    w = y into |z| < |zw|^beta and |w| < |zw|^beta and solving for |x| gives
    the two-sided band |y|^((1-gamma)/gamma) < |x| < |y|^(gamma-1).
    """
    x, y = p
    scalar = (np.isscalar(x) or isinstance(x, complex)) and (
        np.isscalar(y) or isinstance(y, complex)
    )
    xa = np.asarray(x, dtype=complex)
    ya = np.asarray(y, dtype=complex)
    u = xa * ya * ya
    g = params.gamma
    ay = np.abs(ya)
    ax = np.abs(xa)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lo = ay ** ((1.0 - g) / g)
        hi = ay ** (g - 1.0)
        mask = in_sector(u, params) & (ay > 0) & (lo < ax) & (ax < hi)
    return _scalarize(mask, scalar)


def _propose_down(params: BasinParams, m: int, rng: np.random.Generator):
    """m proposals (z, w) from the product decomposition of the region."""
    phi = rng.uniform(-params.theta, params.theta, size=m)
    rho_max = 2.0 * params.r * np.cos(phi)
    log_rho = rng.uniform(np.log(0.01 * rho_max), np.log(0.99 * rho_max))
    au = np.exp(log_rho)
    u = au * np.exp(1j * phi)
    # |z| ranges over (|u|^(1-beta), |u|^beta); empty when |u| >= 1
    ok = au < 1.0
    log_au = np.log(np.where(ok, au, 0.5))
    log_az = rng.uniform((1.0 - params.beta) * log_au, params.beta * log_au)
    arg_z = rng.uniform(-np.pi, np.pi, size=m)
    z = np.exp(log_az + 1j * arg_z)
    w = u / z
    return np.where(ok, z, np.nan), np.where(ok, w, np.nan)


def sample_basin_arrays(
    params: BasinParams, n_points: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """n_points downstairs region members as complex arrays (z, w)."""
    if n_points == 0:
        return np.empty(0, dtype=complex), np.empty(0, dtype=complex)
    zs: list[np.ndarray] = []
    ws: list[np.ndarray] = []
    got = 0
    proposed = 0
    batch = max(2 * n_points, 256)
    while got < n_points:
        z, w = _propose_down(params, batch, rng)
        keep = ~np.isnan(z.real) & in_basin_down((z, w), params)
        proposed += batch
        if keep.any():
            zs.append(z[keep])
            ws.append(w[keep])
            got += int(keep.sum())
        if got == 0 and proposed >= 10**5:
            raise SamplingError(
                f"no region member found in {proposed} proposals (empty region?)"
            )
        if proposed >= MAX_PROPOSALS:
            raise SamplingError(
                f"only {got}/{n_points} region members in {proposed} proposals"
            )
    z = np.concatenate(zs)[:n_points]
    w = np.concatenate(ws)[:n_points]
    return z, w


def sample_basin(
    params: BasinParams, chart: str, n_points: int, seed: int
) -> list[ChartPoint]:
    """Deterministic pseudo-random sample passing the membership predicate."""
    if n_points < 0:
        raise DomainError(f"n_points must be >= 0, got {n_points}")
    if chart not in ("down", "up"):
        raise DomainError(f"unknown chart {chart!r}")
    rng = np.random.default_rng(seed)
    z, w = sample_basin_arrays(params, n_points, rng)
    if chart == "down":
        return [ChartPoint("down", zi, wi) for zi, wi in zip(z, w)]
    pts = [ChartPoint("up", zi / wi, wi) for zi, wi in zip(z, w)]
    for p in pts:
        # w != 0 inside the region, so the transition is always defined
        assert in_basin_up((p.c1, p.c2), params)
    return pts


@dataclass(frozen=True)
class RadiusWitness:
    """Outcome of the invariance search: the radius plus sample evidence."""

    r0: float
    theta: float
    beta: float
    n_samples: int
    seed: int
    trace: tuple[tuple[float, bool], ...]

    def __float__(self) -> float:
        return self.r0


def _one_step_invariant(
    fam: MapFamily, params: BasinParams, n_samples: int, rng: np.random.Generator
) -> bool:
    try:
        z, w = sample_basin_arrays(params, n_samples, rng)
    except SamplingError:
        return False
    z1, w1 = fam.step_down(z, w)
    return bool(np.all(in_basin_down((z1, w1), params)))


def find_r0(
    fam: MapFamily,
    theta: float,
    beta: float,
    r_hi: float,
    n_samples: int = 1000,
    seed: int = 0,
) -> RadiusWitness:
    """Search (0, r_hi] for a radius whose region passes a sampled invariance test.

    Halves r from r_hi until the test passes, then bisects toward the largest
    passing radius; a numerical witness, not a proof.  The model map passes at
    arbitrarily large radii inside the search interval, so the result commonly
    saturates at r_hi.
    """
    if r_hi < 1e-12:
        raise SearchError(f"search interval degenerate: r_hi = {r_hi:g}")
    rng = np.random.default_rng(seed)
    trace: list[tuple[float, bool]] = []

    def check(r: float) -> bool:
        ok = _one_step_invariant(fam, BasinParams(r, theta, beta), n_samples, rng)
        trace.append((r, ok))
        return ok

    if check(r_hi):
        return RadiusWitness(r_hi, theta, beta, n_samples, seed, tuple(trace))
    r_fail = r_hi
    r_pass = None
    r = r_hi
    for _ in range(30):
        r *= 0.5
        if check(r):
            r_pass = r
            break
        r_fail = r
    if r_pass is None:
        raise SearchError(
            f"no invariant radius found down to r_hi * 2**-30 = {r_hi * 2**-30:g}"
        )
    for _ in range(30 - len(trace)):
        mid = 0.5 * (r_pass + r_fail)
        if check(mid):
            r_pass = mid
        else:
            r_fail = mid
    return RadiusWitness(r_pass, theta, beta, n_samples, seed, tuple(trace))


def membership_image(
    params: BasinParams, abs_y: float, width: int = 400, height: int = 300
) -> tuple[np.ndarray, np.ndarray]:
    """Two boolean membership rasters for a fixed |y| slice of the lifted region.

    Panel 1 scans (log|x|, arg x) with arg y = 0, showing the radial band and
    the sector cut.  Panel 2 fixes |x| at the middle of the band and scans
    (arg x, arg y).  Rows run top to bottom, columns left to right.
    """
    if abs_y <= 0 or abs_y == 1.0:
        raise DomainError("slice |y| must be positive and != 1")
    g = params.gamma
    log_lo, log_hi = sorted(
        (((1.0 - g) / g) * np.log(abs_y), (g - 1.0) * np.log(abs_y))
    )
    pad = 0.2 * (log_hi - log_lo)
    log_ax = np.linspace(log_lo - pad, log_hi + pad, width)
    arg_x = np.linspace(-np.pi, np.pi, height)
    X1 = np.exp(log_ax[None, :] + 1j * arg_x[:, None])
    panel1 = in_basin_up((X1, np.full_like(X1, abs_y)), params)

    mid_ax = np.exp(0.5 * (log_lo + log_hi))
    arg_x2 = np.linspace(-np.pi, np.pi, width)
    arg_y = np.linspace(-np.pi, np.pi, height)
    X2 = np.broadcast_to(mid_ax * np.exp(1j * arg_x2[None, :]), (height, width))
    Y2 = np.broadcast_to(abs_y * np.exp(1j * arg_y[:, None]), (height, width))
    panel2 = in_basin_up((X2, Y2), params)
    return panel1, panel2

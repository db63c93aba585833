"""The plane map family, its lift through the origin blow-up, and orbits.

Downstairs the map is

    F(z, w) = (lam*z, conj(lam)*w) * (1 - z*w/2)  +  w * (q1(z,w), q2(z,w)),

an entire polynomial map fixing the axis {w = 0} as a set.  Upstairs means
the chart (x, y) = (z/w, w) of the blow-up at the origin with the proper
transform of {w = 0} removed; there the exceptional divisor becomes the
invariant curve {y = 0} on which the lift acts as x -> lam^2 * x.

All evaluation helpers accept either python complex scalars or numpy
complex arrays, so orbit scans can be vectorized across samples.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ChartExitError, DomainError, InversionError
from .rotation import RotationNumber

OVERFLOW_GUARD = 1e10


@dataclass(frozen=True)
class PerturbationPoly:
    """q(z, w) = sum of coeff * z^j * w^k, as an explicit monomial list."""

    terms: tuple[tuple[complex, int, int], ...] = ()

    def __post_init__(self) -> None:
        norm = tuple((complex(c), int(j), int(k)) for (c, j, k) in self.terms)
        for _, j, k in norm:
            if j < 0 or k < 0:
                raise DomainError("monomial exponents must be non-negative")
        object.__setattr__(self, "terms", norm)

    def __call__(self, z, w):
        if not self.terms:
            return z * 0
        acc = None
        for c, j, k in self.terms:
            t = c * z**j * w**k
            acc = t if acc is None else acc + t
        return acc

    def d_dz(self, z, w):
        if not self.terms:
            return z * 0
        acc = z * 0
        for c, j, k in self.terms:
            if j > 0:
                acc = acc + c * j * z ** (j - 1) * w**k
        return acc

    def d_dw(self, z, w):
        if not self.terms:
            return z * 0
        acc = z * 0
        for c, j, k in self.terms:
            if k > 0:
                acc = acc + c * k * z**j * w ** (k - 1)
        return acc

    @property
    def min_total_degree(self) -> int:
        if not self.terms:
            return 10**9
        return min(j + k for _, j, k in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms


@dataclass(frozen=True)
class MapFamily:
    """Rotation + jet order + the two axis-multiplied perturbations.

    Each perturbation enters the map multiplied by w, and every monomial of
    q1, q2 must have total degree >= l (the stronger reading of the jet
    condition: each added term is w * (degree >= l monomial)).
    """

    rot: RotationNumber
    l: int = 4
    q1: PerturbationPoly = field(default_factory=PerturbationPoly)
    q2: PerturbationPoly = field(default_factory=PerturbationPoly)

    def __post_init__(self) -> None:
        if self.l < 4:
            raise DomainError(f"jet order l must be >= 4, got {self.l}")
        for name, q in (("q1", self.q1), ("q2", self.q2)):
            if not q.is_zero and q.min_total_degree < self.l:
                raise DomainError(
                    f"{name} has a monomial of total degree {q.min_total_degree} < l={self.l}"
                )

    @property
    def lam(self) -> complex:
        return self.rot.lam

    @property
    def lam2(self) -> complex:
        lam = self.rot.lam
        return lam * lam

    @property
    def is_model(self) -> bool:
        return self.q1.is_zero and self.q2.is_zero

    def step_down(self, z, w):
        """One application of the downstairs map; scalar or array inputs."""
        lam = self.rot.lam
        s = 1 - z * w * 0.5
        z1 = lam * z * s
        w1 = lam.conjugate() * w * s
        if not self.q1.is_zero:
            z1 = z1 + w * self.q1(z, w)
        if not self.q2.is_zero:
            w1 = w1 + w * self.q2(z, w)
        return z1, w1


def model_family(rot: RotationNumber, l: int = 4) -> MapFamily:
    """The unperturbed one-resonant normal form."""
    return MapFamily(rot=rot, l=l)


def default_perturbed_family(
    rot: RotationNumber, l: int = 4, a: complex = 0.1, b: complex = 0.1
) -> MapFamily:
    """q1 = a*z^l, q2 = b*w^l: the simplest jets meeting the degree bound."""
    return MapFamily(
        rot=rot,
        l=l,
        q1=PerturbationPoly(terms=((a, l, 0),)),
        q2=PerturbationPoly(terms=((b, 0, l),)),
    )


@dataclass(frozen=True)
class ChartPoint:
    """A point tagged with its chart: (z, w) downstairs or (x, y) upstairs."""

    chart: str  # "down" | "up"
    c1: complex
    c2: complex

    def __post_init__(self) -> None:
        if self.chart not in ("down", "up"):
            raise DomainError(f"unknown chart {self.chart!r}")
        object.__setattr__(self, "c1", complex(self.c1))
        object.__setattr__(self, "c2", complex(self.c2))

    def to_down(self) -> "ChartPoint":
        if self.chart == "down":
            return self
        x, y = self.c1, self.c2
        return ChartPoint("down", x * y, y)

    def to_up(self) -> "ChartPoint":
        if self.chart == "up":
            return self
        z, w = self.c1, self.c2
        if w == 0:
            raise DomainError("chart transition down->up needs w != 0")
        return ChartPoint("up", z / w, w)


def down(z: complex, w: complex) -> ChartPoint:
    return ChartPoint("down", z, w)


def up(x: complex, y: complex) -> ChartPoint:
    return ChartPoint("up", x, y)


def apply_down(fam: MapFamily, p: tuple[complex, complex]) -> tuple[complex, complex]:
    """Evaluate the downstairs polynomial map at (z, w)."""
    z, w = p
    return fam.step_down(z, w)


def apply_up(fam: MapFamily, p: tuple[complex, complex]) -> tuple[complex, complex]:
    """Evaluate the lift in the (x, y) chart.

    The second coordinate is y * (conj(lam)*s + q2), i.e. the downstairs
    image of w = y.  The first coordinate is the reduced fraction

        x1 = lam^2 * (x*s + conj(lam)*q1) / (s + lam*q2),   s = 1 - x*y^2/2,

    obtained by cancelling the common factor y from z1/w1; for the model
    family the fraction collapses to lam^2 * x exactly (zero remainder), and
    that branch is evaluated directly.
    """
    x, y = p
    lam = fam.lam
    if y == 0:
        return fam.lam2 * x, 0j
    z = x * y
    s = 1 - z * y * 0.5
    if fam.is_model:
        den = lam.conjugate() * s
        y1 = y * den
        if y1 == 0:
            raise ChartExitError("orbit hit the proper transform of the axis")
        return fam.lam2 * x, y1
    q1v = fam.q1(z, y)
    q2v = fam.q2(z, y)
    den = lam.conjugate() * s + q2v
    y1 = y * den
    if y1 == 0:
        raise ChartExitError("orbit hit the proper transform of the axis")
    x1 = fam.lam2 * (x * s + lam.conjugate() * q1v) / (s + lam * q2v)
    return x1, y1


def jacobian_down(fam: MapFamily, p: tuple[complex, complex]) -> np.ndarray:
    """Exact complex Jacobian of the downstairs map; diag(lam, conj(lam)) at 0."""
    z, w = p
    lam = fam.lam
    lamc = lam.conjugate()
    s = 1 - z * w * 0.5
    dz1_dz = lam * s - lam * z * w * 0.5 + w * fam.q1.d_dz(z, w)
    dz1_dw = -lam * z * z * 0.5 + fam.q1(z, w) + w * fam.q1.d_dw(z, w)
    dw1_dz = -lamc * w * w * 0.5 + w * fam.q2.d_dz(z, w)
    dw1_dw = lamc * s - lamc * w * z * 0.5 + fam.q2(z, w) + w * fam.q2.d_dw(z, w)
    return np.array([[dz1_dz, dz1_dw], [dw1_dz, dw1_dw]], dtype=complex)


def invert_down(
    fam: MapFamily,
    target: tuple[complex, complex],
    guess: tuple[complex, complex] | None = None,
    tol: float = 1e-12,
    max_iter: int = 64,
) -> tuple[complex, complex]:
    """Local inverse via damped Newton on the two-complex-dimensional system.

    Default guess is diag(conj(lam), lam) * target, the inverse of the linear
    part.  The step is halved whenever the residual fails to decrease.
    """
    tz, tw = target
    if guess is None:
        guess = (fam.lam.conjugate() * tz, fam.lam * tw)
    p = np.array(guess, dtype=complex)
    t = np.array([tz, tw], dtype=complex)
    res_vec = np.array(fam.step_down(p[0], p[1])) - t
    res = float(np.linalg.norm(res_vec))
    for _ in range(max_iter):
        if res < tol:
            return complex(p[0]), complex(p[1])
        J = jacobian_down(fam, (p[0], p[1]))
        try:
            delta = np.linalg.solve(J, res_vec)
        except np.linalg.LinAlgError as exc:
            raise InversionError("singular Jacobian in Newton inversion") from exc
        scale = 1.0
        for _ in range(40):
            cand = p - scale * delta
            cand_res_vec = np.array(fam.step_down(cand[0], cand[1])) - t
            cand_res = float(np.linalg.norm(cand_res_vec))
            if cand_res < res or res < tol:
                break
            scale *= 0.5
        else:
            raise InversionError("Newton damping stalled")
        p, res_vec, res = cand, cand_res_vec, cand_res
    if res < tol:
        return complex(p[0]), complex(p[1])
    raise InversionError(f"no convergence in {max_iter} Newton steps (residual {res:.3e})")


@dataclass
class OrbitRecord:
    """Orbit of the lift: x_n, y_n and U_n = 1/(x_n * y_n^2) for n = 0..N.

    ``U[n]`` is NaN where x_n * y_n^2 = 0.  ``stopped_early`` is set (with
    ``stop_reason``) when the chart is exited or the overflow guard fires;
    the arrays are truncated at the last valid index.
    """

    x: np.ndarray
    y: np.ndarray
    U: np.ndarray
    stopped_early: bool = False
    stop_reason: str | None = None

    @property
    def n_steps(self) -> int:
        return len(self.x) - 1

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "re_x", "im_x", "re_y", "im_y", "re_U", "im_U"])
            for n in range(len(self.x)):
                u = complex(self.U[n])
                writer.writerow(
                    [
                        n,
                        repr(float(self.x[n].real)),
                        repr(float(self.x[n].imag)),
                        repr(float(self.y[n].real)),
                        repr(float(self.y[n].imag)),
                        repr(u.real) if not np.isnan(u.real) else "",
                        repr(u.imag) if not np.isnan(u.imag) else "",
                    ]
                )


def orbit_up(fam: MapFamily, p0: tuple[complex, complex], N: int) -> OrbitRecord:
    """Iterate the lift N times from (x0, y0), recording (x_n, y_n, U_n)."""
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    xs = [complex(p0[0])]
    ys = [complex(p0[1])]
    stopped = False
    reason = None
    x, y = xs[0], ys[0]
    for _ in range(N):
        if abs(x) > OVERFLOW_GUARD or abs(y) > OVERFLOW_GUARD:
            stopped, reason = True, "overflow"
            break
        try:
            x, y = apply_up(fam, (x, y))
        except ChartExitError:
            stopped, reason = True, "chart-exit"
            break
        if abs(x) > OVERFLOW_GUARD or abs(y) > OVERFLOW_GUARD:
            xs.append(x)
            ys.append(y)
            stopped, reason = True, "overflow"
            break
        xs.append(x)
        ys.append(y)
    xa = np.array(xs, dtype=complex)
    ya = np.array(ys, dtype=complex)
    prod = xa * ya * ya
    with np.errstate(divide="ignore", invalid="ignore"):
        U = np.where(prod == 0, np.nan + 1j * np.nan, 1.0 / prod)
    return OrbitRecord(x=xa, y=ya, U=U, stopped_early=stopped, stop_reason=reason)


def iterate_down_batch(fam: MapFamily, z: np.ndarray, w: np.ndarray, n: int):
    """n synchronous downstairs steps on arrays; returns final (z, w)."""
    z = np.array(z, dtype=complex)
    w = np.array(w, dtype=complex)
    for _ in range(n):
        z, w = fam.step_down(z, w)
    return z, w

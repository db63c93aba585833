"""Rotation-number arithmetic: small divisors and convergence diagnostics.

A rotation angle ``phi`` (in turns) determines the unit eigenvalue
``lambda = exp(2*pi*i*phi)``.  The quality of the angle is measured through
the small divisors ``omega(m) = min_{2<=k<=m} |lambda^k - lambda|`` and the
weighted partial sums

    S_N = -sum_{nu=1}^{N} 2^{-nu} * log(omega(2^nu)),

which converge for sufficiently irrational angles and blow up when the angle
is too well approximated by rationals.  Only finitely many terms are ever
available, so the verdicts produced here are explicitly heuristic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DomainError

# Renormalize accumulated powers of lambda back to the unit circle this often;
# keeps phase drift bounded without trig calls in the hot loop.
RENORM_EVERY = 1024


@dataclass(frozen=True)
class RotationNumber:
    """An angle phi in (0,1) with its unit eigenvalue lambda = e^{2*pi*i*phi}.

    ``cf_terms``, when given, is the continued-fraction expansion of phi and
    must reproduce phi to 1e-12.
    """

    phi: float
    cf_terms: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if not (0.0 < self.phi < 1.0):
            raise DomainError(f"phi must lie in (0,1), got {self.phi}")
        if self.cf_terms is not None:
            object.__setattr__(self, "cf_terms", tuple(int(a) for a in self.cf_terms))
            if any(a < 1 for a in self.cf_terms):
                raise DomainError("continued-fraction terms must be positive integers")
            value = evaluate_cf(self.cf_terms)
            if abs(value - self.phi) > 1e-12:
                raise DomainError(
                    f"cf_terms evaluate to {value}, which differs from phi={self.phi}"
                )

    @property
    def lam(self) -> complex:
        return cmath.exp(2j * math.pi * self.phi)

    @property
    def lam_conj(self) -> complex:
        return self.lam.conjugate()


def evaluate_cf(terms: Sequence[int]) -> float:
    """Evaluate the continued fraction [0; a1, a2, ...] for an angle in (0,1)."""
    value = Fraction(0)
    for a in reversed(terms):
        value = Fraction(1, 1) / (a + value)
    return float(value)


def from_cf(terms: Sequence[int]) -> RotationNumber:
    """Build a RotationNumber from its continued-fraction expansion."""
    terms = tuple(int(a) for a in terms)
    return RotationNumber(phi=evaluate_cf(terms), cf_terms=terms)


def golden_mean() -> RotationNumber:
    """phi = (sqrt(5)-1)/2, the canonical badly-approximable angle.

    This is the default rotation used throughout: all partial quotients
    equal 1, so its small divisors shrink as slowly as possible.
    """
    return RotationNumber(phi=(math.sqrt(5.0) - 1.0) / 2.0)


def liouville_like(n_terms: int = 4) -> RotationNumber:
    """phi = sum_k 10^{-k!}, truncated (default: 4 terms, exact to 30 digits).

    The truncation is rational but its near-resonances at k-1 = 100, 10^6, ...
    already produce dramatically smaller small divisors than the golden mean
    at desk scale.
    """
    phi = sum(10.0 ** (-math.factorial(k)) for k in range(1, n_terms + 1))
    return RotationNumber(phi=phi)


def _omega_scan(rot: RotationNumber, m: int) -> list[float]:
    """Running minima of |lambda^k - lambda| for k = 2..m (index 0 is k=2).

    An exact resonance (lambda^k == lambda) never evaluates to exactly 0.0 in
    floating arithmetic: repeated multiplication accumulates phase error of
    order k*eps.  Divisors below that floor are therefore snapped to 0.0 so
    that rational angles are reported as such; the floor (about 22*eps per
    step) is ten orders of magnitude below any genuine small divisor reachable
    at desk scale.
    """
    lam = rot.lam
    power = lam
    best = math.inf
    out: list[float] = []
    for k in range(2, m + 1):
        power *= lam
        if (k - 1) % RENORM_EVERY == 0:
            power /= abs(power)
        d = abs(power - lam)
        if d < 5e-15 * k:
            d = 0.0
        best = min(best, d)
        out.append(best)
    return out


def small_divisor(rot: RotationNumber, m: int) -> float:
    """omega(m) = min over k=2..m of |lambda^k - lambda|; non-increasing in m."""
    if m < 2:
        raise DomainError(f"small_divisor requires m >= 2, got {m}")
    return _omega_scan(rot, m)[-1]


def small_divisors_pow2(rot: RotationNumber, N: int) -> list[float]:
    """[omega(2), omega(4), ..., omega(2^N)] from a single scan."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    scan = _omega_scan(rot, 2**N)
    return [scan[2**nu - 2] for nu in range(1, N + 1)]


def brjuno_partial_sum(rot: RotationNumber, N: int) -> float:
    """-sum_{nu=1}^{N} 2^{-nu} log omega(2^nu); +inf if some omega vanishes."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    total = 0.0
    for nu, omega in enumerate(small_divisors_pow2(rot, N), start=1):
        if omega == 0.0:
            return math.inf
        total += -(2.0**-nu) * math.log(omega)
    return total


@dataclass(frozen=True)
class BrjunoReport:
    """Finite-data convergence diagnostic.  All verdicts are heuristic.

    ``partial_sums[nu-1]`` is S_nu for nu = 1..N.  ``tail_increment`` is the
    first omitted increment S_{N+1} - S_N (the quantity the threshold is
    applied to; the in-window increments at moderate N sit just above it).
    """

    N: int
    omegas: tuple[float, ...]
    partial_sums: tuple[float, ...]
    tail_increment: float
    increments: tuple[float, ...]
    verdict: str
    heuristic: bool = True
    threshold: float = 1e-3


def brjuno_report(rot: RotationNumber, N: int, threshold: float = 1e-3) -> BrjunoReport:
    """Partial sums S_1..S_N plus a labeled heuristic verdict.

    Verdict rules (in order):
      * any omega(2^nu) == 0       -> "divergent (rational)"
      * increments growing in the tail window nu > N/2 -> "likely-divergent"
      * S_{N+1} - S_N < threshold  -> "likely-convergent"
      * otherwise                  -> "inconclusive"
    """
    if N < 2:
        raise DomainError(f"brjuno_report requires N >= 2, got {N}")
    omegas = small_divisors_pow2(rot, N + 1)
    sums: list[float] = []
    total = 0.0
    rational = False
    for nu, omega in enumerate(omegas, start=1):
        if omega == 0.0:
            rational = True
            total = math.inf
        if not rational:
            total += -(2.0**-nu) * math.log(omega)
        sums.append(total)
    increments = tuple(sums[i] - sums[i - 1] for i in range(1, N))
    tail_increment = sums[N] - sums[N - 1]

    if rational:
        verdict = "divergent (rational)"
    else:
        lo = N // 2  # increments index i corresponds to S_{i+2}-S_{i+1}
        growing = any(
            increments[i] > increments[i - 1] > 0.0
            for i in range(max(1, lo - 1), len(increments))
        )
        if growing:
            verdict = "likely-divergent"
        elif tail_increment < threshold:
            verdict = "likely-convergent"
        else:
            verdict = "inconclusive"

    return BrjunoReport(
        N=N,
        omegas=tuple(omegas[:N]),
        partial_sums=tuple(sums[:N]),
        tail_increment=tail_increment,
        increments=increments,
        verdict=verdict,
        threshold=threshold,
    )

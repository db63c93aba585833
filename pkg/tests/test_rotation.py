import cmath
import math

import pytest
from hypothesis import given, strategies as st

from paracyl import rotation
from paracyl.errors import DomainError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def test_golden_mean_value():
    rot = rotation.golden_mean()
    assert rot.phi == pytest.approx(GOLDEN, abs=1e-15)
    assert abs(rot.lam) == pytest.approx(1.0, abs=1e-15)


def test_cf_roundtrip():
    rot = rotation.from_cf([1] * 40)
    assert rot.phi == pytest.approx(GOLDEN, abs=1e-12)
    assert rotation.evaluate_cf([2, 2, 2]) == pytest.approx(5.0 / 12.0, abs=1e-15)


def test_cf_mismatch_rejected():
    with pytest.raises(DomainError):
        rotation.RotationNumber(phi=0.5, cf_terms=(1, 1, 1))
    with pytest.raises(DomainError):
        rotation.RotationNumber(phi=1.5)


def test_small_divisor_guard():
    with pytest.raises(DomainError):
        rotation.small_divisor(rotation.golden_mean(), 1)


def test_small_divisor_against_direct_scan():
    # independent oracle: recompute each power by a fresh exponential
    rot = rotation.golden_mean()
    lam = rot.lam
    direct = min(
        abs(cmath.exp(2j * math.pi * rot.phi * k) - lam) for k in range(2, 65)
    )
    assert rotation.small_divisor(rot, 64) == pytest.approx(direct, abs=1e-12)


def test_small_divisors_non_increasing():
    rot = rotation.golden_mean()
    omegas = rotation.small_divisors_pow2(rot, 10)
    assert all(a >= b for a, b in zip(omegas, omegas[1:]))
    assert all(om > 0 for om in omegas)


def test_partial_sum_matches_explicit_formula():
    rot = rotation.golden_mean()
    omegas = rotation.small_divisors_pow2(rot, 8)
    expected = -sum(2.0 ** -(i + 1) * math.log(om) for i, om in enumerate(omegas))
    assert rotation.brjuno_partial_sum(rot, 8) == pytest.approx(expected, abs=1e-12)


def test_rational_angle_diverges():
    rep = rotation.brjuno_report(rotation.RotationNumber(1.0 / 3.0), 6)
    assert rep.verdict == "divergent (rational)"
    assert math.isinf(rep.partial_sums[-1])


def test_golden_verdict_and_tail():
    rep = rotation.brjuno_report(rotation.golden_mean(), 12)
    assert rep.verdict == "likely-convergent"
    assert rep.tail_increment < 1e-3
    # increments shrink through the tail window for this angle
    tail = rep.increments[len(rep.increments) // 2 :]
    assert all(a > b for a, b in zip(tail, tail[1:]))


def test_liouville_like_flagged_divergent():
    rep = rotation.brjuno_report(rotation.liouville_like(), 12)
    assert rep.verdict == "likely-divergent"
    ratio = rep.partial_sums[11] / rotation.brjuno_report(
        rotation.golden_mean(), 12
    ).partial_sums[11]
    assert ratio > 10.0


@given(st.floats(min_value=1e-6, max_value=1.0 - 1e-6))
def test_eigenvalue_on_unit_circle(phi):
    rot = rotation.RotationNumber(phi)
    assert abs(abs(rot.lam) - 1.0) < 1e-14
    assert rot.lam_conj == rot.lam.conjugate()

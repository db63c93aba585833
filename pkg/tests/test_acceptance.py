"""Acceptance gate: runs the full verification suite once (doubled for the
determinism check) and asserts each criterion individually.

One status line per criterion is printed straight to the terminal (bypassing
capture) so the gate is readable from any pytest invocation.  A failing
criterion carries its full diagnostic record in the assertion message.
"""

import sys

import pytest

from paracyl.config import RunConfig
from paracyl.verify import canonical_json, run_acceptance_twice

CRITERIA = [
    "c01_rotation_diagnostics",
    "c02_semiconjugacy",
    "c03_basin_invariance",
    "c04_orbit_asymptotics",
    "c05_residual_constant",
    "c06_fatou_coordinate",
    "c07_harmonic_log",
    "c08_tau_machinery",
    "c09_global_conjugacy",
    "c10_limit_circles",
    "c11_rotation_freedom",
    "c12_determinism",
]


@pytest.fixture(scope="session")
def acceptance_report():
    report = run_acceptance_twice(RunConfig())
    print(file=sys.__stdout__)
    for name in CRITERIA:
        status = "PASS" if report["criteria"][name]["pass"] else "FAIL"
        print(f"  {name}: {status}", file=sys.__stdout__, flush=True)
    return report


@pytest.mark.parametrize("name", CRITERIA)
def test_criterion(acceptance_report, name):
    entry = acceptance_report["criteria"][name]
    assert entry["pass"], f"{name} failed: {canonical_json(entry)}"

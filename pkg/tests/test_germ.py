import numpy as np
import pytest

from paracyl import germ, rotation
from paracyl.errors import DomainError, InversionError

ROT = rotation.golden_mean()
MODEL = germ.model_family(ROT)
PERT = germ.default_perturbed_family(ROT)


def _random_bidisc(rng, n):
    re = rng.uniform(-1, 1, (4, n))
    return re[0] + 1j * re[1], re[2] + 1j * re[3]


def test_perturbation_poly_eval_and_derivatives():
    q = germ.PerturbationPoly(terms=((2.0, 3, 1), (1j, 0, 5)))
    z, w = 0.3 + 0.1j, -0.2 + 0.4j
    assert q(z, w) == pytest.approx(2.0 * z**3 * w + 1j * w**5)
    assert q.d_dz(z, w) == pytest.approx(6.0 * z**2 * w)
    assert q.d_dw(z, w) == pytest.approx(2.0 * z**3 + 5j * w**4)
    assert q.min_total_degree == 4


def test_family_degree_validation():
    with pytest.raises(DomainError):
        germ.MapFamily(rot=ROT, l=3)
    with pytest.raises(DomainError):
        germ.MapFamily(rot=ROT, l=4, q1=germ.PerturbationPoly(terms=((1.0, 2, 1),)))


def test_origin_fixed_and_axis_invariant():
    assert germ.apply_down(MODEL, (0, 0)) == (0, 0)
    for fam in (MODEL, PERT):
        z1, w1 = germ.apply_down(fam, (0.7 - 0.2j, 0.0))
        assert w1 == 0


def test_model_lift_first_coordinate_exact():
    rng = np.random.default_rng(7)
    for x, y in zip(*_random_bidisc(rng, 50)):
        x1, _ = germ.apply_up(MODEL, (complex(x), complex(y)))
        assert x1 == MODEL.lam2 * complex(x)


def test_lift_fixes_invariant_curve():
    x1, y1 = germ.apply_up(PERT, (0.3 + 0.4j, 0.0))
    assert y1 == 0
    assert x1 == PERT.lam2 * (0.3 + 0.4j)


def test_semiconjugacy_within_ulps():
    rng = np.random.default_rng(11)
    x, y = _random_bidisc(rng, 10**4)
    for fam in (MODEL, PERT):
        worst = 0.0
        for xi, yi in zip(x[:500], y[:500]):
            xu, yu = germ.apply_up(fam, (complex(xi), complex(yi)))
            zd, wd = germ.apply_down(fam, (complex(xi * yi), complex(yi)))
            for a, b in ((xu * yu, zd), (yu, wd)):
                scale = max(abs(a), abs(b))
                if scale:
                    worst = max(worst, abs(a - b) / np.spacing(scale))
        assert worst <= 8.0


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(3)
    h = 1e-7
    for fam in (MODEL, PERT):
        for z, w in zip(*_random_bidisc(rng, 20)):
            z, w = complex(z), complex(w)
            J = germ.jacobian_down(fam, (z, w))
            f0 = np.array(germ.apply_down(fam, (z, w)))
            fd = np.empty((2, 2), dtype=complex)
            fd[:, 0] = (np.array(germ.apply_down(fam, (z + h, w))) - f0) / h
            fd[:, 1] = (np.array(germ.apply_down(fam, (z, w + h))) - f0) / h
            assert np.max(np.abs(J - fd)) / max(1.0, np.max(np.abs(J))) < 1e-6


def test_invert_down_fixed_point():
    assert germ.invert_down(MODEL, (0, 0), guess=(0, 0)) == (0, 0)


def test_invert_down_axis_rotation():
    z = 0.3 - 0.1j
    zi, wi = germ.invert_down(MODEL, (MODEL.lam * z, 0))
    assert zi == pytest.approx(z, abs=1e-12)
    assert wi == pytest.approx(0, abs=1e-12)


def test_invert_down_roundtrip():
    rng = np.random.default_rng(5)
    for fam in (MODEL, PERT):
        for z, w in zip(*_random_bidisc(rng, 20)):
            z, w = 0.3 * complex(z), 0.3 * complex(w)
            target = germ.apply_down(fam, (z, w))
            zi, wi = germ.invert_down(fam, target)
            assert abs(zi - z) < 1e-10 and abs(wi - w) < 1e-10


def test_orbit_on_invariant_curve():
    rec = germ.orbit_up(MODEL, (1.0, 0.0), 5)
    for n in range(6):
        assert rec.x[n] == pytest.approx(MODEL.lam2**n, abs=1e-14)
        assert rec.y[n] == 0
        assert np.isnan(rec.U[n].real)
    assert not rec.stopped_early


def test_orbit_overflow_guard():
    rec = germ.orbit_up(MODEL, (10.0, 10.0), 10**3)
    assert rec.stopped_early
    assert rec.stop_reason == "overflow"
    assert rec.n_steps < 10**3


def test_orbit_csv_roundtrip(tmp_path):
    rec = germ.orbit_up(PERT, (0.5, 0.1), 10)
    path = tmp_path / "orbit.csv"
    rec.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "n,re_x,im_x,re_y,im_y,re_U,im_U"
    assert len(lines) == 12
    first = lines[1].split(",")
    assert float(first[1]) == 0.5 and float(first[3]) == 0.1


def test_basin_orbit_linear_growth_of_U():
    rec = germ.orbit_up(MODEL, (0.5, 0.1), 10**4)
    assert not rec.stopped_early
    assert 0.9 <= abs(rec.U[-1]) / 10**4 <= 1.1

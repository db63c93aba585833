import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from paracyl import germ, regions, rotation
from paracyl.errors import DomainError, SamplingError, SearchError

ROT = rotation.golden_mean()
MODEL = germ.model_family(ROT)
PARAMS = regions.BasinParams(r=0.05, theta=0.4, beta=0.3)


def test_params_derived_quantities():
    assert PARAMS.gamma == pytest.approx(0.3 / 0.7, abs=1e-15)
    assert PARAMS.R * 2 * PARAMS.r == pytest.approx(1.0, abs=1e-15)


def test_params_validation():
    with pytest.raises(DomainError):
        regions.BasinParams(r=-1.0, theta=0.4, beta=0.3)
    with pytest.raises(DomainError):
        regions.BasinParams(r=0.05, theta=2.0, beta=0.3)
    with pytest.raises(DomainError):
        regions.BasinParams(r=0.05, theta=0.4, beta=0.6)


def test_jet_compatibility_warns():
    with pytest.warns(UserWarning):
        assert not regions.check_jet_compatibility(PARAMS, 4)
    assert regions.check_jet_compatibility(
        regions.BasinParams(r=0.05, theta=0.4, beta=0.45), 9
    )


def test_sector_membership():
    assert regions.in_sector(PARAMS.r, PARAMS)
    assert not regions.in_sector(2 * PARAMS.r, PARAMS)  # boundary excluded
    assert not regions.in_sector(0.0, PARAMS)


def test_half_plane_membership():
    R = PARAMS.R
    assert regions.in_H(2 * R, R, PARAMS.theta)
    assert not regions.in_H(R, R, PARAMS.theta)
    with pytest.raises(DomainError):
        regions.in_H(1.0, -1.0, 0.4)


def test_sector_half_plane_inversion_identity():
    rng = np.random.default_rng(17)
    u = rng.uniform(-0.3, 0.3, 10**4) + 1j * rng.uniform(-0.3, 0.3, 10**4)
    u = u[u != 0]
    lhs = regions.in_sector(u, PARAMS)
    rhs = regions.in_H(1.0 / u, 1.0 / (2 * PARAMS.r), PARAMS.theta)
    assert np.array_equal(lhs, rhs)


@settings(max_examples=200)
@given(
    st.floats(min_value=-0.3, max_value=0.3),
    st.floats(min_value=-0.3, max_value=0.3),
)
def test_inversion_identity_property(re, im):
    u = complex(re, im)
    if abs(u) < 1e-12:  # keep 1/u finite
        return
    assert regions.in_sector(u, PARAMS) == regions.in_H(
        1.0 / u, PARAMS.R, PARAMS.theta
    )


def test_basin_down_direct_arithmetic():
    # z = w = 0.1: zw = 0.01 is in the sector and 0.1 < 0.01**0.3 ~ 0.2512
    assert regions.in_basin_down((0.1, 0.1), PARAMS)
    # z = w = 0.4: zw = 0.16 leaves the disc |u - 0.05| < 0.05
    assert not regions.in_basin_down((0.4, 0.4), PARAMS)
    assert not regions.in_basin_down((0.0, 0.3), PARAMS)


def test_basin_up_excludes_invariant_curve():
    assert not regions.in_basin_up((1.0, 0.0), PARAMS)


def test_chart_identity():
    rng = np.random.default_rng(23)
    x = rng.uniform(-2, 2, 10**4) + 1j * rng.uniform(-2, 2, 10**4)
    y = rng.uniform(-1, 1, 10**4) + 1j * rng.uniform(-1, 1, 10**4)
    y = np.where(y == 0, 0.1, y)
    up = regions.in_basin_up((x, y), PARAMS)
    down = regions.in_basin_down((x * y, y), PARAMS)
    assert np.array_equal(up, down)
    assert up.any()  # the sampled window does intersect the region


def test_sample_basin_empty():
    assert regions.sample_basin(PARAMS, "down", 0, seed=1) == []


def test_sample_basin_members_and_reproducible():
    pts1 = regions.sample_basin(PARAMS, "down", 100, seed=42)
    pts2 = regions.sample_basin(PARAMS, "down", 100, seed=42)
    assert len(pts1) == 100
    assert all(
        regions.in_basin_down((p.c1, p.c2), PARAMS) for p in pts1
    )
    assert [(p.c1, p.c2) for p in pts1] == [(p.c1, p.c2) for p in pts2]
    up_pts = regions.sample_basin(PARAMS, "up", 50, seed=7)
    assert all(regions.in_basin_up((p.c1, p.c2), PARAMS) for p in up_pts)


def test_sample_basin_thin_sector():
    thin = regions.BasinParams(r=0.05, theta=1e-9, beta=0.3)
    pts = regions.sample_basin(thin, "down", 10, seed=3)
    assert all(regions.in_basin_down((p.c1, p.c2), thin) for p in pts)


def test_sample_basin_empty_region_error():
    # at r = 100 the radial window of |zw| lies entirely above 1, where the
    # modulus constraints are unsatisfiable
    big = regions.BasinParams(r=100.0, theta=0.4, beta=0.3)
    with pytest.raises(SamplingError):
        regions.sample_basin(big, "down", 10, seed=1)


def test_find_r0_invariance_witness():
    witness = regions.find_r0(MODEL, 0.4, 0.3, r_hi=0.5, n_samples=300, seed=9)
    params = regions.BasinParams(witness.r0, 0.4, 0.3)
    rng = np.random.default_rng(1234)
    z, w = regions.sample_basin_arrays(params, 300, rng)
    z1, w1 = MODEL.step_down(z, w)
    assert np.all(regions.in_basin_down((z1, w1), params))
    assert witness.trace[-1][1] is True or witness.trace[0][1] is True


def test_find_r0_degenerate_guard():
    with pytest.raises(SearchError):
        regions.find_r0(MODEL, 0.4, 0.3, r_hi=1e-30)


def test_membership_image_band_structure():
    params = regions.BasinParams(r=0.5, theta=0.4, beta=0.3)
    panel1, panel2 = regions.membership_image(params, 0.1, width=120, height=90)
    assert panel1.shape == (90, 120) and panel2.shape == (90, 120)
    assert panel1.any() and not panel1.all()
    # the radial band: member columns form a contiguous-ish interior range
    cols = np.flatnonzero(panel1.any(axis=0))
    assert 0 < cols.min() and cols.max() < 119

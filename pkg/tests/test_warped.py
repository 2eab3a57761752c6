import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from warpgeo import geometry as geo
from warpgeo import warped as wpd
from warpgeo.errors import KindMismatch, NonpositiveWarp
from warpgeo.warped import SplitVector, WarpedProduct


def test_assembled_metric_is_block_diagonal():
    wp = wpd.radial_warp(2, 1, 0.5)
    p = np.array([1.0, 2.0, 0.3])
    g = wp.metric(p)
    assert np.allclose(g[:2, :2], np.eye(2))
    assert np.allclose(g[:2, 2:], 0.0)
    assert g[2, 2] == pytest.approx((1 + 0.5 * 5.0) ** 2)


@pytest.mark.parametrize("make, p", [
    (wpd.polar_plane, np.array([1.3, 0.4])),
    (wpd.polar_space, np.array([2.0, 1.0, 0.3])),
])
def test_polar_coordinates_are_flat(make, p):
    R = geo.riemann(make().metric, p)
    assert np.max(np.abs(R)) < 1e-6


def test_hyperbolic_as_warped_has_curvature_minus_one():
    g = wpd.hyperbolic_as_warped().metric
    assert geo.sectional_curvature(g, np.array([0.4, -0.2]), [1, 0], [0, 1]) == pytest.approx(-1.0, rel=1e-6)


def test_mixed_plane_curvature_of_warped_product():
    """K(X, V) = -Hess psi(X, X) / psi for unit horizontal X and vertical V."""
    wp = wpd.radial_warp(2, 1, 0.3)
    p = np.array([0.5, -0.4, 0.1])
    psi = 1 + 0.3 * 0.41
    K = geo.sectional_curvature(wp.metric, p, [1, 0, 0], [0, 0, 1])
    assert K == pytest.approx(-0.6 / psi, rel=1e-6)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(-2, 2))
def test_fiber_mean_curvature_is_trace_of_fiber_sff(x1, x2, v):
    wp = wpd.radial_warp(2, 1, 0.2)
    p = np.array([x1, x2, v])
    psi = wp.warp(p[:2])
    unit = np.array([1.0 / psi])
    sff = wpd.fiber_second_fundamental_form(wp, unit, unit, p)
    assert np.allclose(wpd.fiber_mean_curvature(wp, p), sff, atol=1e-12)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_grad_log_warp_closed_form(x1, x2):
    c = 0.2
    x = np.array([x1, x2])
    expected = 2 * c * x / (1 + c * x @ x)
    assert np.allclose(wpd.grad_log_warp(wpd.radial_warp(2, 1, c), x), expected, atol=1e-9)


def test_lift_kinds_are_checked():
    wp = wpd.product(2, 1)
    f = lambda x: x[..., 0]  # noqa: E731
    for fn in (wpd.lift, wpd.lift_field):
        with pytest.raises(KindMismatch):
            fn(wp, f, "diagonal")
    with pytest.raises(KindMismatch):
        wpd.lift_hessian(wp, f, "neither", np.zeros(3), np.zeros(3), np.zeros(3))
    with pytest.raises(KindMismatch):
        wpd.divergence_lift(wp, lambda v: np.stack([v[..., 0]] * 2, -1), "v-basic", np.zeros(3))


def test_nonpositive_warp_rejected():
    wp = WarpedProduct(wpd.product(1, 1).base, wpd.product(1, 1).fiber, lambda x: x[..., 0], "bad")
    with pytest.raises(NonpositiveWarp):
        wp.warp(np.array([[-1.0]]))


def test_split_vector_round_trip():
    v = np.arange(5.0)
    s = SplitVector.from_full(v, 2)
    assert np.array_equal(s.hor, [0, 1]) and np.array_equal(s.ver, [2, 3, 4])
    assert np.array_equal(s.full, v)


def test_lifted_laplacian_of_base_function_on_polar_plane():
    """Delta of r^2 on the flat plane is 4 (the lifted formula adds the psi term)."""
    wp = wpd.polar_plane()
    p = np.array([1.7, 0.3])
    assert wpd.lift_laplacian(wp, lambda x: x[..., 0] ** 2, "base", p) == pytest.approx(4.0, abs=1e-7)


def test_warped_product_as_submersion_projects_to_base():
    wp = wpd.radial_warp(2, 1)
    sub = wp.as_submersion()
    p = np.array([0.3, 0.4, 1.0])
    assert np.allclose(sub(p), p[:2])
    assert sub.warped is wp
    assert np.allclose(sub.section(np.array([0.3, 0.4]), np.array([1.0])), p)

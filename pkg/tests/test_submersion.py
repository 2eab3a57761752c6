import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from warpgeo import builtins as bi
from warpgeo import immersion as im
from warpgeo import submersion as sm
from warpgeo import warped as wpd
from warpgeo.errors import AmbientMismatch, NotASubmersion, NotOrthonormal

hopf_points = st.tuples(st.floats(0.2, 1.3), st.floats(-3, 3), st.floats(-3, 3))


@pytest.fixture(scope="module")
def hopf():
    return sm.hopf_chart()


@given(hopf_points)
def test_hopf_is_a_riemannian_submersion(p):
    assert sm.verify_submersion(sm.hopf_chart(), np.array([p])).passed


def test_hopf_tensors(hopf):
    """Hopf fibers are geodesics (T = 0); A has norm 1 on orthonormal horizontal pairs."""
    p = np.array([0.6, 0.3, -0.2])
    t, a = sm.tensor_norms(hopf, p)
    assert t == pytest.approx(0.0, abs=1e-6)
    assert a == pytest.approx(1.0, abs=1e-6)
    assert sm.sec_hor_at(hopf, p)[0] == pytest.approx(1.0, abs=1e-6)


def test_fiber_projection_of_nontrivial_warp_is_not_a_submersion():
    wp = wpd.radial_warp(2, 1, 0.5)
    with pytest.raises(NotASubmersion):
        sm.verify_submersion(sm.fiber_projection(wp), np.array([[1.0, 1.0, 0.0]]))
    rep = sm.verify_submersion(sm.fiber_projection(wpd.product(2, 1)), np.array([[1.0, 1.0, 0.0]]))
    assert rep.passed


def test_product_has_vanishing_tensors():
    T, A = sm.oneill_tensors(sm.product_submersion(2, 1), np.array([0.1, 0.2, 0.3]))
    assert np.allclose(T, 0.0, atol=1e-8) and np.allclose(A, 0.0, atol=1e-8)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_warped_T_norm_is_log_gradient_of_warp(x1, x2):
    wp = wpd.radial_warp(2, 1, 0.2)
    sub = wp.as_submersion()
    p = np.array([x1, x2, 0.4])
    t, a = sm.tensor_norms(sub, p)
    expected = np.linalg.norm(wpd.grad_log_warp(wp, p[:2]))
    assert t == pytest.approx(expected, abs=1e-6)
    assert a == pytest.approx(0.0, abs=1e-6)


def test_horizontal_curvature_relation_on_warped_product():
    """Horizontal planes of a warped product are tangent to totally geodesic leaves: A = 0."""
    wp = wpd.radial_warp(2, 1, 0.2)
    sub = wp.as_submersion()
    p = np.array([0.3, -0.7, 0.1])
    hc = sm.horizontal_sectional_curvature(sub, p, np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
    assert hc.a_term == pytest.approx(0.0, abs=1e-8)
    assert hc.residual == pytest.approx(0.0, abs=1e-6)


def test_basic_hessian_lemma_on_hopf(hopf):
    F = lambda x: np.cos(x[..., 0]) + 0.3 * np.sin(x[..., 1])  # noqa: E731
    p = np.array([0.5, 0.2, 0.9])
    H = hopf.horizontal_frame(p)
    assert sm.basic_hessian_check(hopf, F, p, H[:, 0], H[:, 1]) == pytest.approx(0.0, abs=1e-5)
    assert sm.basic_hessian_check(hopf, F, p, H[:, 0], H[:, 0]) == pytest.approx(0.0, abs=1e-5)


def test_submersion_hessian_lift_matches_direct_hessian(hopf):
    torus = bi.hopf_torus(hopf, 0.3)
    F = lambda x: np.cos(x[..., 0]) + 0.3 * np.sin(x[..., 1])  # noqa: E731
    p = np.array([0.4, -0.3])
    e = np.array([0.7, 0.5])
    value, terms = sm.submersion_hessian_lift(hopf, torus, F, p, e)
    direct = e @ im.direct_hessian(torus, lambda q: F(hopf(q)), p) @ e
    assert value == pytest.approx(direct, abs=1e-4)
    assert set(terms) == {"base", "A", "T", "S"}


def test_hessian_lift_requires_matching_ambient(hopf):
    other = bi.sphere(wpd.product(2, 1))
    with pytest.raises(AmbientMismatch):
        sm.submersion_hessian_lift(hopf, other, lambda x: x[..., 0], np.array([1.0, 0.5]), np.array([1.0, 0.0]))


def test_hilbert_schmidt_requires_orthonormal_family():
    with pytest.raises(NotOrthonormal):
        sm.hilbert_schmidt_sum(np.eye(2), np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert sm.hilbert_schmidt_sum(np.eye(2)[:1], np.eye(2)) == pytest.approx(1.0)


def test_bilinear_operator_norm_of_known_tensor():
    B = np.zeros((1, 2, 2))
    B[0] = np.diag([3.0, -1.0])
    assert sm.bilinear_operator_norm(B)[0] == pytest.approx(3.0, rel=1e-10)
    assert sm.bilinear_operator_norm(np.zeros((2, 3, 3)))[0] == 0.0


def test_horizontal_lift_projects_back(hopf):
    p = np.array([0.6, 0.3, -0.2])
    xs = np.array([0.2, -0.5])
    lift = hopf.horizontal_lift(p, xs)
    assert np.allclose(hopf.dpi(p) @ lift, xs, atol=1e-9)
    _, P_ver = hopf.projectors(p)
    assert np.allclose(P_ver @ lift, 0.0, atol=1e-9)

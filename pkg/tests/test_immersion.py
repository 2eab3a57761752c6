import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from warpgeo import builtins as bi
from warpgeo import geometry as geo
from warpgeo import immersion as im
from warpgeo import warped as wpd
from warpgeo.errors import AmbientNotWarped, DimensionError, KindMismatch, RankDeficient
from warpgeo.immersion import Immersion
from warpgeo.submersion import hopf_chart

angles = st.tuples(st.floats(0.3, 2.8), st.floats(-2.8, 2.8))


@pytest.mark.parametrize("radius", [0.5, 2.0])
def test_sphere_mean_curvature_and_gauss_curvature(radius):
    imm = bi.sphere(bi.euclidean_space(3), radius)
    p = np.array([1.0, 0.5])
    assert im.mean_curvature_norm(imm, p) == pytest.approx(2 / radius, rel=1e-6)
    R = im.gauss_curvature_tensor(imm, p)
    K = geo.sectional_from_tensor(R, im.induced_metric(imm, p), [1.0, 0.0], [0.0, 1.0])
    assert K == pytest.approx(1 / radius**2, rel=1e-6)


def test_three_sphere_in_product_space():
    imm = bi.sphere(wpd.product(3, 1), 0.5)
    p = np.array([1.0, 1.2, 0.4])
    assert im.mean_curvature_norm(imm, p) == pytest.approx(6.0, rel=1e-6)


@given(angles)
def test_mean_curvature_vector_is_normal(t):
    imm = bi.sphere(bi.euclidean_space(3), 1.0)
    p = np.array(t)
    H = im.mean_curvature_vector(imm, p)
    J = imm.jacobian(p)
    assert np.allclose(J.T @ H, 0.0, atol=1e-6)
    assert np.allclose(H, -2 * imm(p), atol=1e-5)


@given(angles)
def test_gauss_defect_matches_intrinsic_minus_extrinsic(t):
    imm = bi.sphere(bi.euclidean_space(3), 1.0)
    p = np.array(t)
    e1, e2 = np.array([1.0, 0.0]), np.array([0.3, 1.0])
    assert im.gauss_sectional_defect(imm, p, e1, e2) == pytest.approx(
        im.intrinsic_minus_extrinsic(imm, p, e1, e2), abs=1e-3)


def test_builtin_immersion_mean_curvatures():
    assert im.mean_curvature_norm(bi.flat_disc(bi.euclidean_space(3)), np.array([0.3, 1.0])) == pytest.approx(0, abs=1e-8)
    cyl = bi.cylinder(wpd.product(2, 1), radius=2.0)
    assert im.mean_curvature_norm(cyl, np.array([0.4, 1.0])) == pytest.approx(0.5, rel=1e-6)
    fc = bi.fiber_circle(wpd.polar_plane(), 1.5)
    assert im.mean_curvature_norm(fc, np.array([0.2])) == pytest.approx(1 / 1.5, rel=1e-6)
    eps = 0.3
    torus = bi.hopf_torus(hopf_chart(), eps)
    assert im.mean_curvature_norm(torus, np.array([0.5, 0.2])) == pytest.approx(2 / np.tan(2 * eps), rel=1e-5)


def test_graph_of_paraboloid_at_origin():
    """z = (u^2 + v^2)/2 has principal curvatures 1, 1 at the origin: |H| = 2, K = 1."""
    imm = bi.graph(bi.euclidean_space(3), "(u^2 + v^2)/2")
    p = np.zeros(2)
    assert im.mean_curvature_norm(imm, p) == pytest.approx(2.0, rel=1e-6)
    assert im.gauss_sectional_defect(imm, p, [1, 0], [0, 1]) == pytest.approx(1.0, rel=1e-6)


def test_rank_deficient_map_is_rejected():
    amb = bi.euclidean_space(3)
    imm = bi.custom_immersion(amb, ["u", "v"], [[-1, 1], [-1, 1]], ["u + v", "u + v", "0"])
    with pytest.raises(RankDeficient):
        im.induced_metric(imm, np.array([0.1, 0.2]))


def test_custom_immersion_checks_dimensions():
    with pytest.raises(DimensionError):
        bi.custom_immersion(bi.euclidean_space(3), ["u"], [[0, 1]], ["u", "0"])
    with pytest.raises(KindMismatch):
        bi.hopf_torus(wpd.product(2, 1))


@pytest.mark.parametrize("kind", ["horizontal", "vertical"])
def test_hessian_lifts_match_direct_hessian(kind):
    amb = wpd.radial_warp(3, 1, 0.1)
    imm = bi.sphere(amb, 0.5)
    p = np.array([1.0, 1.2, 0.4])
    e = np.array([0.3, -0.5, 1.0])
    if kind == "horizontal":
        F = lambda x: np.sin(x[..., 0]) + x[..., 1] * x[..., 2]  # noqa: E731
        lifted = im.hessian_lift_horizontal(imm, F, p, e)
        L = lambda q: F(q[..., :3])  # noqa: E731
    else:
        G = lambda v: np.cos(2 * v[..., 0])  # noqa: E731
        lifted = im.hessian_lift_vertical(imm, G, p, e)
        L = lambda q: G(q[..., 3:])  # noqa: E731
    direct = e @ im.direct_hessian(imm, L, p) @ e
    assert lifted == pytest.approx(direct, abs=1e-4, rel=1e-4)


def test_hessian_lifts_need_warped_ambient():
    imm = bi.sphere(bi.euclidean_space(3))
    with pytest.raises(AmbientNotWarped):
        im.hessian_lift_vertical(imm, lambda v: v[..., 0], np.array([1.0, 0.5]), np.array([1.0, 0.0]))


def test_split_tangent_decomposition():
    amb = wpd.radial_warp(3, 1, 0.1)
    imm = bi.sphere(amb, 0.5)
    p = np.array([1.0, 1.2, 0.4])
    e = np.array([0.3, -0.5, 1.0])
    rho = lambda x: np.linalg.norm(x - 0.1, axis=-1)  # noqa: E731
    e_hor, e_ver, e_rho, e_perp = im.split_tangent(imm, p, e, rho)
    xi = imm.jacobian(p) @ e
    assert np.allclose(e_hor + e_ver, xi)
    assert np.allclose(e_rho + e_perp, e_hor)
    assert abs(e_rho[:3] @ e_perp[:3]) < 1e-8


def test_tangent_orthonormal_basis():
    imm = bi.sphere(bi.euclidean_space(3), 2.0)
    p = np.array([0.7, 0.1])
    E = im.tangent_orthonormal_basis(imm, p)
    assert np.allclose(E.T @ im.induced_metric(imm, p) @ E, np.eye(2), atol=1e-10)


def test_immersion_of_custom_metric_ambient():
    amb = bi.custom_metric(["x", "y", "z"], [[-2, 2]] * 3, [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]])
    imm = Immersion(bi.sphere(amb).chart, amb, bi.sphere(amb).map)
    assert imm.submersion is None
    assert im.mean_curvature_norm(imm, np.array([1.0, 0.5])) == pytest.approx(2.0, rel=1e-6)

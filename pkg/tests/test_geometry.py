import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from warpgeo import fd, models, rng
from warpgeo import geometry as geo
from warpgeo.errors import DegeneratePlane, OutOfChart, OutsideDeclaredInjRadius, SingularMetric
from warpgeo.geometry import ChartDomain, MetricField

coords = st.floats(-2.0, 2.0, allow_nan=False)


# -- finite differences -------------------------------------------------------------

@given(coords, coords)
def test_derivative_matches_analytic_gradient(x, y):
    f = lambda p: np.sin(p[..., 0]) * np.exp(0.5 * p[..., 1])  # noqa: E731
    exact = [np.cos(x) * np.exp(0.5 * y), 0.5 * np.sin(x) * np.exp(0.5 * y)]
    assert np.allclose(fd.derivative(f, np.array([x, y])), exact, atol=1e-9)


@given(coords, coords)
def test_second_derivative_matches_analytic_hessian(x, y):
    f = lambda p: p[..., 0] ** 3 * p[..., 1] + np.cos(p[..., 1])  # noqa: E731
    exact = [[6 * x * y, 3 * x**2], [3 * x**2, -np.cos(y)]]
    assert np.allclose(fd.second_derivative(f, np.array([x, y])), exact, atol=1e-5)


def test_derivative_is_vectorized_over_batches():
    f = lambda p: np.stack([p[..., 0] * p[..., 1], p[..., 1] ** 2], -1)  # noqa: E731
    pts = np.arange(12.0).reshape(3, 2, 2)
    d = fd.derivative(f, pts)
    assert d.shape == (3, 2, 2, 2)
    assert np.allclose(d[1, 0], [[pts[1, 0, 1], pts[1, 0, 0]], [0.0, 2 * pts[1, 0, 1]]])


def test_directional_derivative():
    f = lambda p: np.sum(p**2, -1)  # noqa: E731
    assert fd.directional(f, np.array([1.0, 2.0]), np.array([3.0, -1.0])) == pytest.approx(2.0, abs=1e-9)


# -- charts and metrics ---------------------------------------------------------------

def test_chart_rejects_outside_points_and_empty_intervals():
    chart = ChartDomain(((0.0, 1.0), (-1.0, 1.0)))
    assert chart.contains(np.array([0.5, 0.0]))
    with pytest.raises(OutOfChart):
        chart.check(np.array([1.5, 0.0]))
    with pytest.raises(OutOfChart):
        chart.check(np.array([0.5]))
    with pytest.raises(ValueError):
        ChartDomain(((1.0, 0.0),))


def test_metric_validation():
    chart = ChartDomain.box(2, -1, 1)
    bad = MetricField(lambda p: np.broadcast_to(np.diag([1.0, -1.0]), p.shape[:-1] + (2, 2)), chart)
    with pytest.raises(SingularMetric):
        bad(np.zeros(2))
    asym = MetricField(lambda p: np.broadcast_to(np.array([[1.0, 0.5], [0.0, 1.0]]), p.shape[:-1] + (2, 2)), chart)
    with pytest.raises(SingularMetric):
        asym(np.zeros(2))


def test_euclidean_christoffels_vanish():
    g = geo.euclidean(3)
    assert np.allclose(geo.christoffel(g, np.array([0.3, -1.0, 2.0])), 0.0)


def test_sphere_christoffels_closed_form():
    """Gamma^theta_phiphi = -sin cos, Gamma^phi_thetaphi = cot on the unit sphere."""
    th = 0.9
    gam = geo.christoffel(models.round_sphere(), np.array([th, 0.2]))
    assert gam[0, 1, 1] == pytest.approx(-np.sin(th) * np.cos(th), abs=1e-8)
    assert gam[1, 0, 1] == pytest.approx(np.cos(th) / np.sin(th), abs=1e-8)
    assert gam[0, 0, 0] == pytest.approx(0.0, abs=1e-8)


# -- curvature ------------------------------------------------------------------------

@pytest.mark.parametrize("radius", [0.5, 1.0, 2.0])
def test_round_sphere_curvature(radius):
    g = models.round_sphere(radius)
    p = np.array([1.1, 0.4])
    K = 1.0 / radius**2
    assert geo.sectional_curvature(g, p, [1.0, 0.0], [0.0, 1.0]) == pytest.approx(K, rel=1e-6)
    assert geo.scalar_curvature(g, p) == pytest.approx(2 * K, rel=1e-6)
    assert np.allclose(geo.ricci(g, p), K * g(p), atol=1e-6)


def test_three_sphere_and_hyperbolic_plane_curvature():
    g3 = models.round_three_sphere(0.5)
    p = np.array([1.0, 1.2, 0.3])
    assert geo.scalar_curvature(g3, p) == pytest.approx(6 * 4.0, rel=1e-6)
    h = models.hyperbolic_half_plane(-2.0)
    assert geo.sectional_curvature(h, np.array([0.2, 1.5]), [1, 0], [0, 1]) == pytest.approx(-2.0, rel=1e-6)


def test_rotational_metric_curvature():
    """K = -f''/f for d rho^2 + f(rho)^2 d theta^2."""
    g = models.rotational(lambda r: np.sinh(r))
    assert geo.sectional_curvature(g, np.array([1.3, 0.0]), [1, 0], [0, 1]) == pytest.approx(-1.0, rel=1e-6)


@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=4, max_size=4))
def test_sectional_curvature_depends_only_on_the_plane(m):
    A = np.array(m).reshape(2, 2)
    if abs(np.linalg.det(A)) < 1e-2:
        return
    g = models.round_three_sphere()
    p = np.array([1.0, 1.3, 0.2])
    u, v = np.array([1.0, 0.2, 0.0]), np.array([0.0, 1.0, 0.5])
    R, G = geo.riemann(g, p), g(p)
    k0 = geo.sectional_from_tensor(R, G, u, v)
    k1 = geo.sectional_from_tensor(R, G, A[0, 0] * u + A[0, 1] * v, A[1, 0] * u + A[1, 1] * v)
    assert k1 == pytest.approx(k0, rel=1e-7)


def test_riemann_symmetries():
    g = models.round_three_sphere()
    R = geo.riemann(g, np.array([1.0, 1.3, 0.2]))
    assert np.allclose(R, -np.swapaxes(R, 0, 1), atol=1e-7)
    assert np.allclose(R, -np.swapaxes(R, 2, 3), atol=1e-7)
    assert np.allclose(R, np.transpose(R, (2, 3, 0, 1)), atol=1e-7)


def test_degenerate_plane():
    with pytest.raises(DegeneratePlane):
        geo.sectional_curvature(geo.euclidean(2), np.zeros(2), [1.0, 0.0], [2.0, 0.0])


# -- calculus on functions ----------------------------------------------------------------

def test_laplacian_on_sphere_of_height_function():
    """cos(theta) is a first eigenfunction: Delta = -2 cos(theta) on the unit sphere."""
    g = models.round_sphere()
    p = np.array([[0.7, 0.1], [1.9, -2.0]])
    f = lambda q: np.cos(q[..., 0])  # noqa: E731
    assert np.allclose(geo.laplacian(g, f, p), -2 * np.cos(p[:, 0]), atol=1e-6)


def test_divergence_of_position_field():
    g = geo.euclidean(3)
    assert geo.divergence(g, lambda p: p, np.array([0.1, 0.2, 0.3])) == pytest.approx(3.0, abs=1e-9)


def test_gradient_raises_index():
    g = models.round_sphere(2.0)
    p = np.array([1.0, 0.0])
    f = lambda q: q[..., 1]  # noqa: E731
    assert np.allclose(geo.gradient(g, f, p), [0.0, 1.0 / (4 * np.sin(1.0) ** 2)], atol=1e-9)


# -- geodesics and distance ---------------------------------------------------------------

def test_geodesic_on_sphere_follows_a_great_circle():
    g = models.round_sphere()
    x0 = np.array([np.pi / 2, 0.0])
    end = geo.geodesic_shoot(g, x0, np.array([0.0, 1.0]), t=1.2)
    assert np.allclose(end, [np.pi / 2, 1.2], atol=1e-8)


def test_shooting_distance_matches_closed_form():
    g = models.hyperbolic_half_plane()
    shoot = MetricField(g.g, g.chart, "no closed form")
    x0 = np.array([0.0, 1.0])
    x = np.array([[0.4, 1.3], [-0.3, 0.6], [0.1, 2.0]])
    assert np.allclose(geo.distance(shoot, x0, x), g.distance(x0, x), atol=1e-7)


def test_distance_respects_declared_radius():
    g = geo.euclidean(2)
    with pytest.raises(OutsideDeclaredInjRadius):
        geo.distance(g, np.zeros(2), np.array([3.0, 4.0]), inj_radius=5.0)


# -- random streams -------------------------------------------------------------------------

def test_streams_are_reproducible_and_independent(monkeypatch):
    a = rng.stream(3, "x").standard_normal(4)
    assert np.array_equal(a, rng.stream(3, "x").standard_normal(4))
    assert not np.array_equal(a, rng.stream(3, "y").standard_normal(4))
    assert np.array_equal(rng.sobol(2, 10, 1, "s"), rng.sobol(2, 10, 1, "s"))
    monkeypatch.setenv(rng.ENV_SEED, "17")
    assert rng.resolve_seed() == 17
    assert rng.resolve_seed(4) == 4
    monkeypatch.delenv(rng.ENV_SEED)
    assert rng.resolve_seed() == 0

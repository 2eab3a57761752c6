import numpy as np
import pytest

from warpgeo import builtins as bi
from warpgeo import geometry as geo
from warpgeo import models
from warpgeo import omori_yau as oy
from warpgeo import warped as wpd
from warpgeo.errors import HypothesisFailed, IterateDomainError, NoDivergentRays, NonWarpedAmbient, NotFound
from warpgeo.geometry import ChartDomain


def h_square(t):
    return np.asarray(t, float) ** 2 + 1.0


def gamma_sq(x):
    return np.sum(np.asarray(x, float) ** 2, -1)


def test_h_conditions_individual_items():
    good = oy.check_h_conditions(h_square)
    assert good.passed
    assert "finite-horizon" in good.items["2"].caveats
    quartic = oy.check_h_conditions(lambda t: np.asarray(t, float) ** 4 + 1.0)
    assert quartic.status("3") == "fail"
    falling = oy.check_h_conditions(lambda t: 1.0 - np.asarray(t, float))
    assert falling.status("1") == "fail" and falling.status("3") == "fail"


def test_constant_h_fails_the_growth_ratio():
    """t h(sqrt t) / h(t) = t is unbounded for constant h."""
    rep = oy.check_h_conditions(lambda t: np.ones_like(np.asarray(t, float)))
    assert rep.status("1") == "pass" and rep.status("3") == "pass"
    assert rep.status("2") == "fail"


def test_certificate_overrides_numerical_item():
    rep = oy.check_h_conditions(lambda t: np.asarray(t, float) + 1.0, certificate={"2": True})
    assert rep.items["2"].passed and rep.items["2"].certified
    assert "finite-horizon" not in rep.items["2"].caveats


def _rays(n=3):
    r = np.random.default_rng(0)
    dirs = r.standard_normal((n, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return [np.geomspace(1.0, 100.0, 30)[:, None] * d for d in dirs]


def test_gamma_conditions_detect_too_small_constant():
    samples = np.random.default_rng(1).uniform(-5, 5, (50, 3))
    tight = oy.OYPair(h_square, gamma_sq, c=1.0, c_prime=1.0, compact_cutoff=2.0)
    rep = oy.check_gamma_conditions(tight, geo.euclidean(3), samples, rays=_rays())
    assert rep.status("5") == "fail" and rep.items["5"].value == pytest.approx(2.0, rel=1e-6)
    lap = oy.OYPair(h_square, gamma_sq, "laplacian", c=2.0, c_prime=1.0, compact_cutoff=2.0)
    assert oy.check_gamma_conditions(lap, geo.euclidean(3), samples, rays=_rays()).passed


def test_gamma_conditions_need_rays_unless_compact():
    pair = oy.OYPair(h_square, gamma_sq)
    with pytest.raises(NoDivergentRays):
        oy.check_gamma_conditions(pair, geo.euclidean(3), np.zeros((1, 3)))
    assert oy.check_gamma_conditions(pair, geo.euclidean(3), np.zeros((1, 3)), compact=True).passed
    with pytest.raises(ValueError):
        oy.OYPair(h_square, gamma_sq, flavor="gradient")


def test_derived_constants_closed_form():
    c_M, cpp = oy.derived_constants("hessian", A0=0.5, B0=2.0, c=3.0, c_prime=4.0, alpha=1.5, h0=4.0)
    assert c_M == pytest.approx(1.5)
    assert cpp == pytest.approx(0.5 * 3 / (2 * 2) + 4 / 4 + 3 * 1.5 / 2)
    _, lap = oy.derived_constants("laplacian", 0.5, 2.0, 3.0, 4.0, 1.5, 4.0, n_M=2, n_V=3)
    assert lap == pytest.approx(2 * 0.375 + 3 * 1.0 + 2.25)


def test_propagation_to_cylinder_in_radial_warp():
    amb = wpd.radial_warp(2, 1, 0.1)
    cyl = bi.cylinder(amb, 1.0)
    r = np.random.default_rng(0)
    samples = np.column_stack([r.uniform(-3, 3, 30), r.uniform(-4.5, 4.5, 30)])
    rays = [np.column_stack([np.full(30, 0.3 * k), np.linspace(0.5, 4.9, 30)]) for k in range(3)]
    res = oy.propagate_oy_pair(cyl, gamma_sq, h_square, "laplacian", c=2.0, c_prime=1.0, samples=samples,
                               rays=rays, compact_cutoff=2.0)
    assert res.A0 == pytest.approx(0.2 / 1.1, rel=1e-8)
    assert res.B0 == pytest.approx(1.1)
    assert res.pair.c == pytest.approx(2.0 / 1.1)
    assert "asserted: properness" in res.caveats
    with pytest.raises(HypothesisFailed):
        oy.propagate_oy_pair(cyl, gamma_sq, h_square, samples=samples, rays=rays, properness_asserted=False)
    with pytest.raises(HypothesisFailed):
        oy.propagate_oy_pair(cyl, gamma_sq, h_square, samples=samples, rays=rays,
                             K=lambda x: np.linalg.norm(x, axis=-1) < 0.5)
    with pytest.raises(NonWarpedAmbient):
        oy.propagate_oy_pair(bi.sphere(bi.euclidean_space(3)), gamma_sq, h_square, samples=np.ones((1, 2)))


def test_weak_oy_sequence_on_sphere():
    g = models.round_sphere(margin=0.05)
    f = lambda p: np.cos(p[..., 0] - 1.0)  # noqa: E731
    seq = oy.weak_oy_sequence(g, f, "laplacian")
    assert all(seq.found)
    assert seq.estimated_sup == pytest.approx(1.0, abs=1e-10)
    assert oy.verify_oy_sequence(seq, g, f)


def test_weak_oy_sequence_not_found_for_convex_function():
    g = geo.euclidean(2, ChartDomain.box(2, -1.0, 1.0))
    with pytest.raises(NotFound):
        oy.weak_oy_sequence(g, lambda p: np.sum(p**2, -1), "hessian")


def test_maximize_needs_bounded_region():
    with pytest.raises(ValueError):
        oy.maximize(lambda p: -np.sum(p**2, -1), ChartDomain.box(2))


def test_iterated_logs():
    logs = oy.iterated_logs(np.array([100.0]), 2)
    assert logs[0] == pytest.approx(np.log(100.0))
    assert logs[1] == pytest.approx(np.log(np.log(100.0)))
    with pytest.raises(IterateDomainError):
        oy.iterated_logs(np.array([2.0]), 2)


def test_scalar_growth_on_hyperbolic_plane():
    g = models.hyperbolic_half_plane()
    pts = np.array([[0.0, 20.0], [3.0, 30.0], [-4.0, 40.0]])
    rho = lambda p: 10.0 + np.abs(np.log(p[..., 1]))  # noqa: E731
    assert oy.scalar_growth_check(g, np.array([0.0, 1.0]), 1, pts, rho=rho).passed


def test_sff_norm_of_sphere():
    imm = bi.sphere(bi.euclidean_space(3), 0.5)
    assert oy.sff_norm(imm, np.array([1.0, 0.3])) == pytest.approx(2.0, rel=1e-6)


def test_fiber_pair_must_be_checked_for_the_hessian():
    amb = wpd.radial_warp(2, 1, 0.1)
    cyl = bi.cylinder(amb, 1.0)
    line = geo.euclidean(1)
    t = np.linspace(-4.0, 4.0, 9)[:, None]
    rays = [np.geomspace(1.0, 50.0, 20)[:, None], -np.geomspace(1.0, 50.0, 20)[:, None]]
    h_rep = oy.check_h_conditions(h_square)
    samples = np.column_stack([np.zeros(5), np.linspace(-4, 4, 5)])
    m_rays = [np.column_stack([np.full(30, 0.3 * k), np.linspace(0.5, 4.9, 30)]) for k in range(3)]
    for flavor, ok in (("hessian", True), ("laplacian", False)):
        fiber = oy.OYPair(h_square, gamma_sq, flavor, c=2.0, c_prime=2.0, compact_cutoff=2.0)
        g_rep = oy.check_gamma_conditions(fiber, line, t, rays=rays)
        assert g_rep.passed
        call = lambda: oy.propagate_oy_pair(cyl, gamma_sq, h_square, "laplacian", c=2.0, c_prime=1.0,  # noqa: E731
                                            samples=samples, rays=m_rays, compact_cutoff=2.0, fiber_check=(h_rep, g_rep))
        if ok:
            assert "asserted: properness" in call().caveats
        else:
            with pytest.raises(HypothesisFailed, match="Hessian"):
                call()

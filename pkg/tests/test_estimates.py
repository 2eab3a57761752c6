import numpy as np
import pytest

from warpgeo import estimates as est
from warpgeo import immersion as im
from warpgeo import scenario as sio
from warpgeo.errors import (ContainmentViolated, DimensionHypothesisFailed, HypothesisFailed, NonWarpedAmbient,
                            ScenarioError)


def test_scenario_validation():
    sc = sio.load_builtin("sphere-in-product-A")
    with pytest.raises(ScenarioError, match="injectivity"):
        sc.replace(r=sc.inj_radius)
    with pytest.raises(ScenarioError, match="at least"):
        sc.replace(budget=99)
    with pytest.raises(ScenarioError, match="unknown theorem"):
        sc.replace(theorems=("A", "Z"))
    assert sc.replace(budget=100).budget == 100


def test_x0_must_lie_in_the_base():
    sc = sio.load_builtin("sphere-in-product-A").replace(x0=np.zeros(2))
    with pytest.raises(ScenarioError, match="x0"):
        est.Context(sc)


def test_horizontal_subspace():
    sc = sio.load_builtin("sphere-in-product-A")
    ctx = est.Context(sc)
    p = np.array([0.9, 1.1, 0.4])
    E = est.horizontal_subspace(sc, p, ctx)
    assert E.shape[1] >= ctx.n_M - ctx.n_V
    assert np.allclose(E.T @ im.induced_metric(sc.immersion, p) @ E, np.eye(E.shape[1]), atol=1e-8)
    _, P_ver = ctx.sub.projectors(sc.immersion(p))
    assert np.allclose(P_ver @ sc.immersion.jacobian(p) @ E, 0.0, atol=1e-6)


def test_failing_hypotheses_raise_named_errors(builtin_runs):
    _, _, [(_, rep, err)] = builtin_runs["bad-dimensions"]
    assert isinstance(err, DimensionHypothesisFailed)
    assert rep.hypotheses["dimension"]["status"] == "fail"
    _, _, [(_, rep, err)] = builtin_runs["containment-violated"]
    assert isinstance(err, ContainmentViolated)
    assert err.witness is not None and rep.hypotheses["containment"]["value"] >= 2.5


def test_missing_weak_oy_is_a_hypothesis_failure():
    sc = sio.load_builtin("radial-warp-cylinder")
    sc = sc.replace(asserted={})
    with pytest.raises(HypothesisFailed) as info:
        est.verify(sc, "B")
    assert info.value.item == "weak-oy"
    [(th, rep, err)] = est.verify_all(sc.replace(theorems=("sub-mean",)))
    assert err.item == "weak-oy" and "hypothesis failed: weak-oy" in rep.caveats


def test_warped_theorems_need_a_warped_ambient():
    sc = sio.load_builtin("hopf-torus").replace(theorems=("A",))
    with pytest.raises(NonWarpedAmbient):
        est.verify(sc, "A")


def test_asserted_hypotheses_become_caveats(builtin_runs):
    _, _, results = builtin_runs["radial-warp-cylinder"]
    for _, rep, err in results:
        assert err is None and rep.passed
        assert {"asserted: weak-oy", "asserted: properness"} <= set(rep.caveats)
        assert rep.hypotheses["weak-oy"]["status"] == "asserted"


def test_low_dimensional_mean_estimate_is_vacuous(builtin_runs):
    _, ctx, results = builtin_runs["polar-plane-fiber-circle"]
    assert ctx.n_M == ctx.n_V == 1
    for _, rep, _ in results:
        assert rep.hypotheses["dimension"]["status"] == "vacuous"
        assert rep.vacuous and rep.rhs <= 0 and rep.passed


def test_false_weak_oy_assertion_leads_to_a_failed_estimate(builtin_runs):
    _, _, [(_, rep, err)] = builtin_runs["false-weak-oy-disc"]
    assert err is None and rep.verdict == "fail"
    assert rep.lhs == pytest.approx(0.0, abs=1e-6) and rep.rhs > 0


def test_reports_are_json_ready(builtin_runs):
    _, _, results = builtin_runs["sphere-in-product-A"]
    for _, rep, _ in results:
        d = rep.to_dict()
        assert d["verdict"] == "pass"
        assert isinstance(d["lhs"], float) and isinstance(d["breakdown"], dict)


def test_sampling_is_deterministic_in_the_seed():
    sc = sio.load_builtin("sphere-in-product-B")
    a, b = est.Context(sc), est.Context(sc)
    c = est.Context(sc.replace(seed=1))
    assert np.array_equal(a.m_points, b.m_points) and np.array_equal(a.ball, b.ball)
    assert not np.array_equal(a.m_points, c.m_points)

"""Theorem verifiers for curvature estimates of immersions into warped products and submersions.

Each verifier checks the hypotheses it can check on samples, flags the ones
it cannot (weak Omori-Yau validity on noncompact M, properness) as
asserted, evaluates both sides of the estimate and records diagnostics that
retrace the argument behind it at concrete points.

Sampled suprema are under-estimated and infima over-estimated, so sampling
error can only make a PASS harder to reach.
"""

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import comparison as cmp
from . import geometry as geo
from . import immersion as im
from . import omori_yau as oy
from . import rng
from . import submersion as sm
from .errors import (
    ContainmentViolated,
    DimensionHypothesisFailed,
    HypothesisFailed,
    KindMismatch,
    NonWarpedAmbient,
    ScenarioError,
    WarpGeoError,
)
from .extremum import estimate_extremum, immersed_sectional_field, sectional_extremum_field
from .otsuki import SymmetricBilinearForm, definiteness_check, find_otsuki_pair
from .warped import grad_log_warp

DEFAULT_BUDGET = 200
MIN_BUDGET = 100
SAMPLE_MARGIN = 1e-3
INTEGRABLE_TOL = 1e-6
KERNEL_TOL = 1e-6
THEOREMS = ("A", "B", "sub-sectional", "sub-mean")
MEAN_THEOREMS = ("B", "sub-mean")


@dataclass(eq=False)
class Scenario:
    id: str
    immersion: object
    x0: np.ndarray
    r: float
    b: float
    inj_radius: float
    budget: int = DEFAULT_BUDGET
    seed: int = 0
    asserted: dict = field(default_factory=dict)
    compact: bool = None
    theorems: tuple = ("A",)
    tolerance: float = cmp.TOLERANCE
    description: str = ""
    spec: dict = field(default=None, repr=False)

    def __post_init__(self):
        self.x0 = np.atleast_1d(np.asarray(self.x0, float))
        self.r, self.b, self.inj_radius = float(self.r), float(self.b), float(self.inj_radius)
        if self.compact is None:
            self.compact = bool(self.immersion.params.get("compact", False))
        self.theorems = tuple(self.theorems)
        if not self.r > 0:
            raise ScenarioError(f"radius must be positive, got {self.r}")
        if not self.r < self.inj_radius:
            raise ScenarioError(f"radius {self.r} must be below the declared injectivity radius {self.inj_radius}")
        if self.b > 0 and not self.r < np.pi / (2 * np.sqrt(self.b)):
            raise ScenarioError(f"radius {self.r} must be below pi/(2 sqrt(b)) = {np.pi / (2 * np.sqrt(self.b)):.6g}")
        if int(self.budget) < MIN_BUDGET:
            raise ScenarioError(f"sample budget must be at least {MIN_BUDGET}, got {self.budget}")
        self.budget = int(self.budget)
        unknown = [t for t in self.theorems if t not in THEOREMS]
        if unknown:
            raise ScenarioError(f"unknown theorem(s) {unknown}; available: {list(THEOREMS)}")

    @property
    def ambient(self):
        return self.immersion.ambient

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass
class EstimateReport:
    theorem: str
    scenario: str
    hypotheses: dict = field(default_factory=dict)
    lhs: float = None
    lhs_witness: object = None
    rhs: float = None
    breakdown: dict = field(default_factory=dict)
    verdict: str = "hypothesis-failed"
    margin: float = None
    tolerance: float = cmp.TOLERANCE
    vacuous: bool = False
    caveats: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict == "pass"

    def decide(self):
        """Set verdict, margin and vacuity from the stored numbers."""
        self.margin = self.lhs - self.rhs
        ok = self.lhs >= self.rhs - self.tolerance * (1.0 + abs(self.rhs))
        self.verdict = "pass" if ok else "fail"
        self.vacuous = self.theorem in MEAN_THEOREMS and self.rhs <= 0
        return self

    def to_dict(self):
        return jsonable(dataclasses.asdict(self))


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _hyp(status, value=None, detail=""):
    return {"status": status, "value": value, "detail": detail}


# -- shared per-scenario computations -------------------------------------------------

class Context:
    """Lazily computed samples and extrema shared by the verifiers of one scenario."""

    def __init__(self, scenario):
        self.sc = scenario
        self.imm = scenario.immersion
        self.sub = self.imm.submersion
        if self.sub is None:
            raise KindMismatch("the ambient must be a warped product or a Riemannian submersion")
        self.base = self.sub.base
        if self.sc.x0.shape != (self.base.dim,) or not self.base.chart.contains(self.sc.x0):
            raise ScenarioError(f"x0 = {self.sc.x0.tolist()} is not a point of the base chart")
        self.n_M, self.n_X, self.n_V = self.imm.dim, self.sub.n_X, self.sub.n_V
        self.seed = scenario.seed

    # sampling
    @cached_property
    def m_points(self):
        chart = self.imm.chart
        lo, hi = chart.lower, chart.upper
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ScenarioError("the immersion chart must be bounded")
        u = rng.sobol(chart.dim, self.sc.budget, self.seed, "M-samples")
        pts = lo + (hi - lo) * (SAMPLE_MARGIN + (1 - 2 * SAMPLE_MARGIN) * u)
        im.induced_metric(self.imm, pts)
        return pts

    @cached_property
    def ball(self):
        """Base samples of the closed ball: center, interior and boundary sphere."""
        half = self.sc.budget // 2
        inner, _, _ = cmp.radial_samples(self.base, self.sc.x0, self.sc.r, half, self.seed, 0.0, "ball")
        if self.base.dim == 1:
            bd = self.sc.x0 + np.array([[-self.sc.r], [self.sc.r]])
        else:
            bd, _, _ = cmp.radial_samples(self.base, self.sc.x0, self.sc.r, half, self.seed, 1.0, "ball-boundary")
        return np.concatenate([self.sc.x0[None], bd, inner])

    @cached_property
    def pre_points(self):
        """Points of the preimage of the ball: a ball subset lifted through the section."""
        k = max(24, self.sc.budget // 8)
        x = self.ball[:k]
        fchart = self.sub.fiber_chart
        lo, hi = fchart.lower, fchart.upper
        lo = np.where(np.isfinite(lo), lo, -1.0)
        hi = np.where(np.isfinite(hi), hi, 1.0)
        w = lo + (hi - lo) * (SAMPLE_MARGIN + (1 - 2 * SAMPLE_MARGIN) * rng.sobol(len(lo), len(x), self.seed, "fiber"))
        return self.sub.section(x, w)

    # distance and the comparison function
    def rho(self, x):
        return geo.distance(self.base, self.sc.x0, x, self.sc.inj_radius)

    def rho_M(self, p):
        return self.rho(self.sub(self.imm(p)))

    def f(self, p):
        return cmp.phi_b(self.sc.b, self.rho_M(p))

    def inside_ball(self, x):
        return bool(self.rho(x) <= self.sc.r)

    # hypotheses
    @cached_property
    def containment(self):
        ext = estimate_extremum(self.rho_M, self.m_points, "sup", self.imm.chart, refine=2)
        ok = ext.value < self.sc.r
        return ok, _hyp("pass" if ok else "fail", ext.value,
                        f"sup distance {ext.value:.6g} {'<' if ok else '>='} r = {self.sc.r:g}"), ext.witness

    @cached_property
    def radial(self):
        if self.base.dim < 2:
            return True, _hyp("pass", None, "base is one-dimensional: no 2-planes")
        rep = cmp.radial_bound_check(self.base, self.sc.x0, self.sc.r, self.sc.b, max(32, self.sc.budget // 2),
                                     self.sc.inj_radius, self.seed, self.sc.tolerance)
        return rep.passed, _hyp("pass" if rep.passed else "fail", rep.value,
                                f"max radial curvature {rep.value:.6g} vs b = {self.sc.b:g}")

    def weak_oy(self, flavor):
        key = f"weak-oy-{flavor}"
        if self.sc.compact:
            return "pass", _hyp("pass", None, f"M is compact: weak OY for the {flavor} holds")
        if self.sc.asserted.get("weak-oy") or self.sc.asserted.get(key):
            return "asserted", _hyp("asserted", None, f"weak OY for the {flavor} asserted by the scenario")
        return "fail", _hyp("fail", None, f"M is not compact and weak OY for the {flavor} is not asserted")

    # extrema
    @cached_property
    def sup_K_M(self):
        if self.n_M < 2:
            raise KindMismatch("sectional curvature needs dim M >= 2")
        fn = immersed_sectional_field(self.imm, "sup")
        return estimate_extremum(fn, self.m_points, "sup", self.imm.chart, refine=2)

    @cached_property
    def hessian_pipeline(self):
        return _hessian_pipeline(self)

    @cached_property
    def intrinsic_check(self):
        """Intrinsic max K at the witness of sup K_M, an independent cross-check."""
        w = np.asarray(self.sup_K_M.witness)[None]
        return float(sectional_extremum_field(self.imm.induced_metric_field, "sup")(w)[0])

    @cached_property
    def sup_H(self):
        return estimate_extremum(lambda p: im.mean_curvature_norm(self.imm, p), self.m_points, "sup",
                                 self.imm.chart, refine=2)

    @cached_property
    def inf_K_X(self):
        fn = sectional_extremum_field(self.base, "inf")
        return estimate_extremum(fn, self.ball, "inf", refine=0)

    @cached_property
    def psi0(self):
        wp = self.imm.warped

        def fn(x):
            return geo.norm(self.base.raw(x), grad_log_warp(wp, x))

        return estimate_extremum(fn, self.ball, "sup", refine=0)

    @cached_property
    def tensors(self):
        return sm.tensor_sups(self.sub, self.pre_points)

    @cached_property
    def sec_hor(self):
        return sm.sec_hor_min(self.sub, self.pre_points, seed=self.seed)


# -- helpers for diagnostics -------------------------------------------------------------

def horizontal_subspace(scenario, p, context=None):
    """g^M-orthonormal basis (columns) of the tangent vectors mapped to horizontal vectors."""
    ctx = context or Context(scenario)
    _check_dimension(ctx, report=None)
    return _pi_basis(ctx, np.asarray(p, float))


def _pi_basis(ctx, p):
    imm, sub = ctx.imm, ctx.sub
    J = imm.jacobian(p)
    _, P_ver = sub.projectors(imm(p))
    K = P_ver @ J
    _, s, vh = np.linalg.svd(K)
    scale = max(1.0, float(s[0]) if len(s) else 1.0)
    rank = int(np.sum(s > KERNEL_TOL * scale))
    E = vh[rank:].T
    gM = im.induced_metric(imm, p)
    L = np.linalg.cholesky(E.T @ gM @ E)
    E = E @ np.linalg.inv(L).T
    if E.shape[1] < ctx.n_M - ctx.n_V:
        raise DimensionHypothesisFailed(f"horizontal subspace has dimension {E.shape[1]} < {ctx.n_M - ctx.n_V}")
    return E


def _normal_basis(imm, p):
    J = imm.jacobian(p)
    G = imm.ambient_metric.raw(imm(p))
    P = np.eye(J.shape[0]) - im.tangent_projector(J, G)
    U, s, _ = np.linalg.svd(P)
    U = U[:, : J.shape[0] - J.shape[1]]
    L = np.linalg.cholesky(U.T @ G @ U)
    return U @ np.linalg.inv(L).T, G


def _check_dimension(ctx, report):
    need = 2 * ctx.n_V + ctx.n_X + 1
    ok = 2 * ctx.n_M >= need
    entry = _hyp("pass" if ok else "fail", 2 * ctx.n_M,
                 f"2 n_M = {2 * ctx.n_M} vs 2 n_V + n_X + 1 = {need}; implies n_X >= 3: {ctx.n_X >= 3}")
    if report is not None:
        report.hypotheses["dimension"] = entry
    if not ok:
        raise DimensionHypothesisFailed(entry["detail"], report=report)


def _check_common(ctx, report, flavor):
    status, entry = ctx.weak_oy(flavor)
    report.hypotheses["weak-oy"] = entry
    if status == "fail":
        raise HypothesisFailed("weak-oy", entry["detail"], report=report)
    if status == "asserted":
        report.caveats.append("asserted: weak-oy")
    for name in sorted(ctx.sc.asserted):
        if ctx.sc.asserted[name] and not name.startswith("weak-oy"):
            report.hypotheses[name] = _hyp("asserted", None, "asserted by the scenario")
            report.caveats.append(f"asserted: {name}")
    ok, entry, witness = ctx.containment
    report.hypotheses["containment"] = entry
    if not ok:
        raise ContainmentViolated(entry["detail"], report=report, witness=witness)
    ok, entry = ctx.radial
    report.hypotheses["radial-curvature"] = entry
    if not ok:
        raise HypothesisFailed("radial-curvature", entry["detail"], report=report)


def _new_report(ctx, theorem):
    return EstimateReport(theorem, ctx.sc.id, tolerance=ctx.sc.tolerance)


def _safe(report, name, fn):
    try:
        report.diagnostics[name] = fn()
    except WarpGeoError as err:
        report.diagnostics[name] = {"error": f"{type(err).__name__}: {err}"}
        report.caveats.append(f"diagnostic {name} failed: {type(err).__name__}")


def _hessian_pipeline(ctx):
    """Retrace the sectional-curvature argument at weak OY points of f."""
    sc, imm = ctx.sc, ctx.imm
    seq = oy.weak_oy_sequence(imm.induced_metric_field, ctx.f, "hessian", region=imm.chart, seed=ctx.seed)
    c_r = float(cmp.c_b(sc.b, sc.r))
    steps, memo = [], {}
    for n, p, found in zip(seq.n_index, seq.points, seq.found):
        if not found:
            steps.append({"n": n, "found": False})
            continue
        key = tuple(p)
        if key not in memo:
            memo[key] = _point_analysis(ctx, np.asarray(p))
        pa = memo[key]
        step = {"n": n, "found": True, "point": list(p), "s_n": pa["s_n"]}
        if pa["s_n"] <= 0:
            step["note"] = "sequence point projects to x0"
            steps.append(step)
            continue
        bound = c_r - 1.0 / (n * float(cmp.phi_b_prime(sc.b, pa["s_n"])))
        step.update(dim_pi=pa["dim_pi"], min_sff_on_pi=pa["min_sff"], sff_bound=bound,
                    sff_bound_ok=bool(pa["min_sff"] >= bound - sc.tolerance * (1 + abs(bound))),
                    definite=pa["definite"])
        if "gauss_defect" in pa:
            need = max(bound, 0.0) ** 2
            step.update(otsuki_residual=pa["otsuki_residual"], gauss_defect=pa["gauss_defect"], gauss_bound=need,
                        gauss_ok=bool(pa["gauss_defect"] >= need - sc.tolerance * (1 + need)), plane=pa["plane"])
        steps.append(step)
    found_s = [s["s_n"] for s in steps if s.get("found")]
    return {"estimated_sup_f": seq.estimated_sup, "steps": steps,
            "min_s_n": min(found_s) if found_s else None}


def _point_analysis(ctx, p):
    """Second fundamental form on the horizontal subspace at one point, with an Otsuki pair if definite."""
    imm = ctx.imm
    out = {"s_n": float(ctx.rho_M(p))}
    if out["s_n"] <= 0:
        return out
    E = _pi_basis(ctx, p)
    S = im.sff_tensor(imm, p)
    G = imm.ambient_metric.raw(imm(p))
    u = rng.unit_vectors(rng.sobol(E.shape[1], 64, ctx.seed, "pi-directions"))
    es = u @ E.T
    sv = np.einsum("aij,si,sj->sa", S, es, es)
    out["dim_pi"] = int(E.shape[1])
    out["min_sff"] = float(np.min(np.sqrt(np.einsum("sa,ab,sb->s", sv, G, sv))))
    N, _ = _normal_basis(imm, p)
    S_pi = np.einsum("aij,ik,jl->akl", S, E, E)
    coeffs = np.einsum("ak,ab,bij->kij", N, G, S_pi)
    form = SymmetricBilinearForm(0.5 * (coeffs + np.swapaxes(coeffs, 1, 2)))
    out["definite"] = bool(definiteness_check(form, seed=ctx.seed).definite)
    if out["definite"] and form.n2 < form.n1:
        pair = find_otsuki_pair(form, seed=ctx.seed)
        e1, e2 = E @ pair.v1, E @ pair.v2
        out.update(otsuki_residual=pair.residual, gauss_defect=im.gauss_sectional_defect(imm, p, e1, e2),
                   plane=[e1.tolist(), e2.tolist()])
    return out


def _laplacian_pipeline(ctx, penalty):
    """Pointwise Laplacian lower bound and Hilbert-Schmidt bound at M samples."""
    sc, imm, sub = ctx.sc, ctx.imm, ctx.sub
    pts = ctx.m_points[:32]
    rho = ctx.rho_M(pts)
    keep = rho > 1e-6
    pts, rho = pts[keep], rho[keep]
    if len(pts) == 0:
        return {"points": 0, "note": "every sample projects to x0, where rho is not smooth"}
    lap = geo.laplacian(imm.induced_metric_field, ctx.f, pts)
    H = im.mean_curvature_norm(imm, pts)
    bound = cmp.phi_b_prime(sc.b, rho) * (cmp.c_b(sc.b, rho) * (ctx.n_M - ctx.n_V) - penalty - H)
    slack = lap - bound
    tol = sc.tolerance * (1 + np.abs(bound))
    hs, ab = [], []
    for p in pts:
        q = imm(p)
        J = imm.jacobian(p)
        G = imm.ambient_metric.raw(q)
        P_hor, P_ver = sub.projectors(q)
        E = im.tangent_orthonormal_basis(imm, p)
        hs.append(sm.hilbert_schmidt_sum(P_ver @ J, E, im.induced_metric(imm, p), G, tol=1e-6))
        for v in (J @ E).T:
            h, w = P_hor @ v, P_ver @ v
            ab.append(geo.norm(G, h) * geo.norm(G, w))
    i = int(np.argmin(slack))
    return {
        "points": int(len(pts)),
        "laplacian_min_slack": float(slack[i]),
        "laplacian_ok": bool(np.all(slack >= -tol)),
        "laplacian_witness": pts[i].tolist(),
        "hilbert_schmidt_max": float(max(hs)),
        "hilbert_schmidt_bound": ctx.n_V,
        "hilbert_schmidt_ok": bool(max(hs) <= ctx.n_V + 1e-8),
        "max_hor_times_ver": float(max(ab)),
    }


# -- verifiers -----------------------------------------------------------------------------

def _require_warped(ctx, report):
    if ctx.imm.warped is None:
        raise NonWarpedAmbient(f"theorem {report.theorem} needs a warped-product ambient")


def verify_theorem_A(scenario, context=None):
    """Sectional curvature estimate ``sup K_M >= C_b(r)^2 + inf_B K_X``."""
    ctx = context or Context(scenario)
    rep = _new_report(ctx, "A")
    _require_warped(ctx, rep)
    _check_dimension(ctx, rep)
    _check_common(ctx, rep, "hessian")
    c = float(cmp.c_b(scenario.b, scenario.r))
    lhs = ctx.sup_K_M
    inf_kx = ctx.inf_K_X
    rep.lhs, rep.lhs_witness = lhs.value, lhs.witness
    rep.rhs = c ** 2 + inf_kx.value
    rep.breakdown = {"C_b(r)": c, "C_b(r)^2": c ** 2, "inf K_X": inf_kx.value, "inf K_X witness": inf_kx.witness,
                     "samples": lhs.samples}
    rep.diagnostics["intrinsic K_M at witness"] = ctx.intrinsic_check
    rep.decide()
    _safe(rep, "proof", lambda: ctx.hessian_pipeline)
    return rep


def verify_theorem_B(scenario, context=None):
    """Mean curvature estimate ``sup |H| >= (n_M - n_V) C_b(r) - n_V Psi_0``."""
    ctx = context or Context(scenario)
    rep = _new_report(ctx, "B")
    _require_warped(ctx, rep)
    _check_mean_dimension(ctx, rep)
    _check_common(ctx, rep, "laplacian")
    c = float(cmp.c_b(scenario.b, scenario.r))
    lhs, psi0 = ctx.sup_H, ctx.psi0
    rep.lhs, rep.lhs_witness = lhs.value, lhs.witness
    rep.rhs = (ctx.n_M - ctx.n_V) * c - ctx.n_V * psi0.value
    rep.breakdown = {"C_b(r)": c, "n_M": ctx.n_M, "n_V": ctx.n_V, "Psi_0": psi0.value,
                     "Psi_0 witness": psi0.witness, "samples": lhs.samples}
    rep.decide()
    _safe(rep, "proof", lambda: _laplacian_pipeline(ctx, ctx.n_V * psi0.value))
    return rep


def _check_mean_dimension(ctx, report):
    """Record ``n_M >= n_V + 1``; without it the right-hand side is nonpositive, so nothing can fail."""
    ok = ctx.n_M >= ctx.n_V + 1
    detail = f"n_M = {ctx.n_M} vs n_V + 1 = {ctx.n_V + 1}"
    if not ok:
        detail += ": the estimate is vacuous"
        report.caveats.append("dimension: n_M <= n_V, vacuous estimate")
    report.hypotheses["dimension"] = _hyp("pass" if ok else "vacuous", ctx.n_M, detail)


def verify_theorem_sub_sectional(scenario, context=None):
    """``sup K_M >= C_b(r)^2 + inf sec_hor`` over the preimage of the ball."""
    ctx = context or Context(scenario)
    rep = _new_report(ctx, "sub-sectional")
    _check_dimension(ctx, rep)
    _check_common(ctx, rep, "hessian")
    c = float(cmp.c_b(scenario.b, scenario.r))
    lhs = ctx.sup_K_M
    sec_min, sec_witness = ctx.sec_hor
    rep.lhs, rep.lhs_witness = lhs.value, lhs.witness
    rep.rhs = c ** 2 + sec_min
    rep.breakdown = {"C_b(r)": c, "C_b(r)^2": c ** 2, "inf sec_hor": sec_min, "sec_hor witness": sec_witness,
                     "alpha_0": ctx.tensors.alpha0}
    if ctx.tensors.alpha0 < INTEGRABLE_TOL:
        inf_kx = ctx.inf_K_X
        rhs_int = c ** 2 + inf_kx.value
        rep.breakdown["integrable"] = True
        rep.breakdown["inf K_X"] = inf_kx.value
        rep.diagnostics["integrable"] = {
            "rhs": rhs_int,
            "verdict": "pass" if lhs.value >= rhs_int - scenario.tolerance * (1 + abs(rhs_int)) else "fail",
        }
    else:
        rep.breakdown["integrable"] = False
    rep.decide()
    _safe(rep, "proof", lambda: ctx.hessian_pipeline)
    return rep


def verify_theorem_sub_mean(scenario, context=None):
    """``sup |H| >= (n_M - n_V) C_b(r) - n_M alpha_0 - n_V tau_0``."""
    ctx = context or Context(scenario)
    rep = _new_report(ctx, "sub-mean")
    _check_mean_dimension(ctx, rep)
    _check_common(ctx, rep, "laplacian")
    c = float(cmp.c_b(scenario.b, scenario.r))
    lhs, ts = ctx.sup_H, ctx.tensors
    rep.lhs, rep.lhs_witness = lhs.value, lhs.witness
    rep.rhs = (ctx.n_M - ctx.n_V) * c - ctx.n_M * ts.alpha0 - ctx.n_V * ts.tau0
    rep.breakdown = {"C_b(r)": c, "n_M": ctx.n_M, "n_V": ctx.n_V, "tau_0": ts.tau0, "alpha_0": ts.alpha0,
                     "tau_0 witness": ts.tau_witness, "alpha_0 witness": ts.alpha_witness,
                     "preimage samples": ts.samples}
    rep.decide()
    _safe(rep, "proof", lambda: _laplacian_pipeline(ctx, ctx.n_M * ts.alpha0 + ctx.n_V * ts.tau0))
    return rep


VERIFIERS = {
    "A": verify_theorem_A,
    "B": verify_theorem_B,
    "sub-sectional": verify_theorem_sub_sectional,
    "sub-mean": verify_theorem_sub_mean,
}


def verify(scenario, theorem, context=None):
    return VERIFIERS[theorem](scenario, context)


def verify_all(scenario):
    """Run every listed theorem; returns ``[(theorem, report, error)]``.

    Hypothesis failures are caught and returned with their partial report;
    input and numerical errors propagate.
    """
    ctx = Context(scenario)
    out = []
    for th in scenario.theorems:
        try:
            out.append((th, verify(scenario, th, ctx), None))
        except HypothesisFailed as err:
            rep = err.report or EstimateReport(th, scenario.id, tolerance=scenario.tolerance)
            rep.theorem = th
            rep.caveats.append(f"hypothesis failed: {err.item}")
            out.append((th, rep, err))
    return out

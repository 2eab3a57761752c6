"""Omori-Yau machinery: checks of the sufficient conditions for an OY-pair,
propagation of a fiber OY-pair through an immersion into a warped product,
weak OY sequences and the scalar-curvature growth predicate.

Asymptotic conditions can only be probed on finite horizons; such results
carry the caveat ``finite-horizon`` unless an analytic certificate is given.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import geometry as geo
from . import rng
from .errors import HypothesisFailed, IterateDomainError, NoDivergentRays, NonWarpedAmbient, NotFound
from .immersion import induced_metric, sff_tensor, mean_curvature_vector
from .warped import grad_log_warp

FINITE_HORIZON = "finite-horizon"
RATIO_SLOPE_MAX = 0.05
DIVERGE_PASS = 0.8
DIVERGE_FAIL = 0.5
REL_TOL = 1e-6


@dataclass
class ItemResult:
    item: str
    status: str  # pass | fail | inconclusive
    value: float = float("nan")
    detail: str = ""
    caveats: list = field(default_factory=list)
    certified: bool = False

    @property
    def passed(self):
        return self.status == "pass"


@dataclass
class ConditionReport:
    items: dict

    @property
    def passed(self):
        return all(r.passed for r in self.items.values())

    def status(self, item):
        return self.items[item].status


@dataclass
class OYPair:
    h: object
    gamma: object
    flavor: str = "hessian"
    c: float = 1.0
    c_prime: float = 1.0
    compact_cutoff: float = 0.0

    def __post_init__(self):
        if self.flavor not in ("hessian", "laplacian"):
            raise ValueError(f"flavor must be 'hessian' or 'laplacian', got {self.flavor!r}")


@dataclass
class OYSequence:
    points: list
    values: list
    bounds: list
    n_index: list
    estimated_sup: float
    flavor: str
    found: list


def _certify(result, certificate):
    if certificate and certificate.get(result.item):
        result.status = "pass"
        result.certified = True
        result.caveats = [c for c in result.caveats if c != FINITE_HORIZON]
    return result


def check_h_conditions(h, t_max=1e8, points=400, certificate=None):
    """Items (1)-(3) for a vectorized nonnegative function `h` on ``[0, inf)``.

    (2) fits the log-log slope of ``t h(sqrt t) / h(t)`` over the upper half
    of a geometric grid; (3) compares lower Riemann sums of ``1/sqrt(h)``
    over the last two decades.
    """
    items = {}
    grid = np.concatenate([np.linspace(0.0, 10.0, points // 2), np.geomspace(10.0, t_max, points // 2)[1:]])
    hv = np.asarray(h(grid), float)
    drop = np.min(np.diff(hv) + 1e-12 * np.abs(hv[1:]))
    ok1 = hv[0] > 0 and drop >= 0
    items["1"] = ItemResult("1", "pass" if ok1 else "fail", float(hv[0]), f"h(0) = {hv[0]:.6g}, min increment {drop:.3g}")

    t = np.geomspace(10.0, t_max, points)
    ratio = t * np.asarray(h(np.sqrt(t)), float) / np.asarray(h(t), float)
    upper = slice(points // 2, None)
    slope = float(np.polyfit(np.log(t[upper]), np.log(ratio[upper]), 1)[0])
    items["2"] = ItemResult(
        "2", "pass" if slope <= RATIO_SLOPE_MAX else "fail", float(ratio[-1]),
        f"log-log slope {slope:.4f} of t h(sqrt t)/h(t); last ratio {ratio[-1]:.6g}", [FINITE_HORIZON],
    )

    decades = np.arange(0, int(np.floor(np.log10(t_max))))
    incr = []
    for k in decades:
        s = np.geomspace(10.0**k, 10.0 ** (k + 1), 201)
        hs = np.asarray(h(s[1:]), float)
        if np.any(hs <= 0):
            incr = None
            break
        incr.append(float(np.sum(np.diff(s) / np.sqrt(hs))))
    if incr is None:
        items["3"] = ItemResult("3", "fail", float("nan"), "h is not positive on [1, t_max]: 1/sqrt(h) undefined")
    else:
        q = incr[-1] / incr[-2] if len(incr) >= 2 and incr[-2] > 0 else float("nan")
        status = "pass" if q >= DIVERGE_PASS else ("fail" if q <= DIVERGE_FAIL else "inconclusive")
        items["3"] = ItemResult("3", status, q, f"ratio of last two decade increments {q:.4f}", [FINITE_HORIZON])
    for r in items.values():
        _certify(r, certificate)
    return ConditionReport(items)


def _op_norm_quadratic(S_on, starts=4, iters=50, seed=0):
    """``max |S(e, e)|`` over unit e for an orthonormal-frame array ``S[a, i, j]``."""
    gen = rng.stream(seed, "sff-norm")
    best = 0.0
    m = S_on.shape[-1]
    for e in gen.standard_normal((starts, m)):
        e = e / np.linalg.norm(e)
        for _ in range(iters):
            y = np.einsum("aij,i,j->a", S_on, e, e)
            ny = np.linalg.norm(y)
            if ny == 0:
                break
            w, V = np.linalg.eigh(np.einsum("a,aij->ij", y / ny, S_on))
            e = V[:, int(np.argmax(np.abs(w)))]
        best = max(best, float(np.linalg.norm(np.einsum("aij,i,j->a", S_on, e, e))))
    return best


def sff_norm(imm, p):
    """Norm of the second fundamental form: ``max |S(e, e)|`` over unit e."""
    S = sff_tensor(imm, p)
    gM = induced_metric(imm, p)
    E = geo.orthonormal_frame(gM)
    G = imm.ambient_metric.raw(imm(p))
    N = geo.orthonormal_frame(G)
    S_on = np.einsum("ka,aij,ib,jc->kbc", np.linalg.inv(N), S, E, E)
    return _op_norm_quadratic(S_on)


def check_gamma_conditions(pair, metric, samples, rays=None, compact=False, radius=None, certificate=None):
    """Items (4)-(6) (or (6') for the Laplacian flavor).

    `samples` are points of M; (5) and (6) are enforced where the exhaustion
    `radius` (default ``sqrt(gamma)``) is at least ``pair.compact_cutoff``.
    `rays` is a list of point arrays ordered outward along divergent paths.
    """
    items = {}
    six = "6" if pair.flavor == "hessian" else "6'"
    if compact:
        for k in ("4", "5", six):
            items[k] = ItemResult(k, "pass", 0.0, "compact manifold: condition vacuous")
        return ConditionReport(items)
    if not rays:
        raise NoDivergentRays("no divergent sample rays declared")

    growth = []
    monotone = True
    for ray in rays:
        g = np.asarray(pair.gamma(np.asarray(ray, float)), float)
        tail = g[len(g) // 2 :]
        monotone &= bool(np.all(np.diff(tail) > 0))
        growth.append(g[-1] / max(g[0], 1e-300))
    ok4 = monotone and min(growth) >= 10.0
    items["4"] = ItemResult(
        "4", "pass" if ok4 else "fail", float(min(growth)),
        "gamma increases along every declared ray by the factor shown", [FINITE_HORIZON],
    )

    pts = np.atleast_2d(np.asarray(samples, float))
    gam = np.asarray(pair.gamma(pts), float)
    rad = np.sqrt(np.maximum(gam, 0.0)) if radius is None else np.asarray(radius(pts), float)
    mask = rad >= pair.compact_cutoff
    if not np.any(mask):
        for k in ("5", six):
            items[k] = ItemResult(k, "inconclusive", float("nan"), "no samples outside the compact cutoff")
        return ConditionReport(items)
    pts, gam = pts[mask], gam[mask]
    G = metric(pts)
    dgam = geo.differential(metric, pair.gamma, pts)
    grad_norm = np.sqrt(np.einsum("...i,...ij,...j->...", dgam, np.linalg.inv(G), dgam))
    bound5 = pair.c * np.sqrt(gam)
    r5 = grad_norm - bound5 * (1 + REL_TOL) - 1e-9
    items["5"] = ItemResult("5", "pass" if np.all(r5 <= 0) else "fail", float(np.max(grad_norm / np.maximum(bound5, 1e-300))),
                            f"max |grad gamma| / (c sqrt(gamma)) with c = {pair.c:g}")
    H = geo.hessian(metric, pair.gamma, pts)
    if pair.flavor == "hessian":
        L = np.linalg.cholesky(G)
        Li = np.linalg.inv(L)
        lhs = np.linalg.eigvalsh(np.einsum("...ia,...ab,...jb->...ij", Li, H, Li))[..., -1]
    else:
        lhs = np.einsum("...ij,...ij->...", np.linalg.inv(G), H)
    bound6 = pair.c_prime * np.sqrt(gam * np.asarray(pair.h(np.sqrt(gam)), float))
    r6 = lhs - bound6 * (1 + REL_TOL) - 1e-9
    items[six] = ItemResult(six, "pass" if np.all(r6 <= 0) else "fail", float(np.max(lhs / np.maximum(bound6, 1e-300))),
                            f"max ratio to c' sqrt(gamma h(sqrt gamma)) with c' = {pair.c_prime:g}")
    for r in items.values():
        _certify(r, certificate)
    return ConditionReport(items)


@dataclass
class PropagationResult:
    pair: OYPair
    A0: float
    B0: float
    report: dict
    caveats: list


def derived_constants(flavor, A0, B0, c, c_prime, alpha, h0, n_M=1, n_V=1):
    """Gradient and Hessian/Laplacian constants of the induced pair on M."""
    c_M = c / B0
    if flavor == "hessian":
        cpp = A0 * c / (B0 * np.sqrt(h0)) + c_prime / B0**2 + c * alpha / B0
    else:
        cpp = n_M * A0 * c / (B0 * np.sqrt(h0)) + n_V * c_prime / B0**2 + c * alpha / B0
    return float(c_M), float(cpp)


def propagate_oy_pair(imm, Gamma, h, flavor="hessian", c=1.0, c_prime=1.0, alpha=1.0, samples=None,
                      rays=None, K=None, K_samples=None, compact_cutoff=0.0, properness_asserted=True,
                      fiber_check=None):
    """Build ``gamma = Gamma o pi_V o phi`` and re-verify it as an OY-pair on M.

    `K` is a predicate on base points (the compact set containing
    ``pi_X(phi(M))``); `K_samples` are base points over which A0 = max
    ``|grad psi / psi|`` and B0 = min psi are estimated.  `fiber_check` is an
    optional `(ConditionReport, ConditionReport)` for ``(h, Gamma)`` on V.
    """
    wp = imm.warped
    if wp is None:
        raise NonWarpedAmbient(f"ambient of {imm.name} is not a warped product")
    samples = np.atleast_2d(np.asarray(samples, float))
    report = {}
    caveats = []
    if fiber_check is not None:
        # both flavors on M need (h, Gamma) to be a Hessian pair on the fiber
        if any("6'" in rep.items for rep in fiber_check):
            raise HypothesisFailed("fiber pair flavor", "(h, Gamma) must be checked as a Hessian OY-pair on the fiber")
        for rep in fiber_check:
            if not rep.passed:
                bad = [k for k, r in rep.items.items() if not r.passed]
                raise HypothesisFailed(f"fiber pair item {bad[0]}", "(h, Gamma) is not an OY-pair on the fiber")
    report["a"] = ItemResult("a", "pass" if properness_asserted else "fail", detail="properness of phi")
    if properness_asserted:
        caveats.append("asserted: properness")
        report["a"].caveats.append("asserted")
    else:
        raise HypothesisFailed("a", "properness of phi not asserted")

    q = imm(samples)
    x, v = wp.split(q)
    if K is not None:
        inside = np.asarray(K(x), bool)
        if not np.all(inside):
            i = int(np.argmin(inside))
            raise HypothesisFailed("b", f"pi_X(phi(p)) = {x[i].tolist()} outside K", witness=samples[i].tolist())
    report["b"] = ItemResult("b", "pass", detail="pi_X(phi(samples)) inside K")
    kx = np.atleast_2d(np.asarray(x if K_samples is None else K_samples, float))
    A0 = float(np.max(geo.norm(wp.base.raw(kx), grad_log_warp(wp, kx))))
    B0 = float(np.min(wp.warp(kx)))

    gamma_fn = lambda p: np.asarray(Gamma(wp.split(imm(p))[1]), float)  # noqa: E731
    gam = gamma_fn(samples)
    allowed = alpha * np.sqrt(np.asarray(h(np.sqrt(gam)), float))
    if flavor == "hessian":
        size = np.array([sff_norm(imm, p) for p in samples])
        label = "c"
    else:
        size = np.array([geo.norm(imm.ambient_metric.raw(imm(p)), mean_curvature_vector(imm, p)) for p in samples])
        label = "c'"
    outside = np.sqrt(gam) >= compact_cutoff
    viol = outside & (size > allowed * (1 + REL_TOL) + 1e-9)
    if np.any(viol):
        i = int(np.argmax(viol))
        raise HypothesisFailed(label, f"second fundamental form bound fails: {size[i]:.6g} > {allowed[i]:.6g}",
                               witness=samples[i].tolist())
    report[label] = ItemResult(label, "pass", float(np.max(size / allowed)), f"max ratio to alpha sqrt(h) (alpha = {alpha:g})")

    h0 = float(np.asarray(h(np.array([0.0])), float)[0])
    c_M, cpp = derived_constants(flavor, A0, B0, c, c_prime, alpha, h0, imm.dim, wp.n_V)
    pair = OYPair(h, gamma_fn, flavor, c_M, cpp, compact_cutoff)
    recheck = check_gamma_conditions(pair, imm.induced_metric_field, samples, rays)
    report.update({f"M:{k}": r for k, r in recheck.items.items()})
    if not recheck.passed:
        bad = [k for k, r in recheck.items.items() if not r.passed]
        raise HypothesisFailed(bad[0], "constructed gamma fails the OY conditions on M")
    return PropagationResult(pair, A0, B0, report, caveats)


def _max_eig(metric, f, pts):
    G = metric(pts)
    H = geo.hessian(metric, f, pts)
    Li = np.linalg.inv(np.linalg.cholesky(G))
    return np.linalg.eigvalsh(np.einsum("...ia,...ab,...jb->...ij", Li, H, Li))[..., -1]


def oy_bound(metric, f, pts, flavor):
    """Max Hessian eigenvalue (w.r.t. the metric) or Laplacian at `pts`."""
    pts = np.atleast_2d(np.asarray(pts, float))
    if flavor == "hessian":
        return _max_eig(metric, f, pts)
    return geo.laplacian(metric, f, pts)


def maximize(f, chart, starts=256, refine=8, seed=0, margin=1e-6):
    """Multi-start maximization of a vectorized function over a bounded chart box.

    Returns the refined candidates sorted by decreasing value.
    """
    lo, hi = chart.lower, chart.upper
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("search region must be a bounded box")
    span = hi - lo
    lo_s, hi_s = lo + margin * span, hi - margin * span
    pts = lo_s + (hi_s - lo_s) * rng.sobol(chart.dim, starts, seed, "maximize")
    vals = np.asarray(f(pts), float)
    order = np.argsort(-vals)[:refine]
    out = []
    for i in order:
        res = minimize(lambda z: -float(f(z)), pts[i], method="L-BFGS-B", bounds=list(zip(lo_s, hi_s)),
                       options={"ftol": 1e-15, "gtol": 1e-12})
        z = res.x if -res.fun >= vals[i] else pts[i]
        out.append((float(f(z)), z))
    out.sort(key=lambda t: -t[0])
    return out


def weak_oy_sequence(metric, f, flavor="hessian", n_list=(10, 1000, 10**6), region=None, seed=0, starts=256):
    """Points ``p_n`` with ``f(p_n) > sup - 1/n`` and Hessian (Laplacian) bound ``<= 1/n``.

    `region` defaults to the metric's chart, which must then be bounded.
    Each returned point is re-verified pointwise; failures are recorded with
    ``found = False`` and raise `NotFound` only if no n succeeds.
    """
    region = metric.chart if region is None else region
    cands = maximize(f, region, starts=starts, seed=seed)
    sup_est = cands[0][0]
    cand_pts = np.array([z for _, z in cands])
    cand_vals = np.array([v for v, _ in cands])
    bounds = oy_bound(metric, f, cand_pts, flavor)
    seq = OYSequence([], [], [], [], sup_est, flavor, [])
    for n in n_list:
        ok = (cand_vals > sup_est - 1.0 / n) & (bounds <= 1.0 / n)
        seq.n_index.append(int(n))
        if np.any(ok):
            i = int(np.argmax(ok))
            seq.points.append(cand_pts[i].tolist())
            seq.values.append(float(cand_vals[i]))
            seq.bounds.append(float(bounds[i]))
            seq.found.append(True)
        else:
            seq.points.append(None)
            seq.values.append(float("nan"))
            seq.bounds.append(float("nan"))
            seq.found.append(False)
    if not any(seq.found):
        raise NotFound(f"no weak OY point found for n in {list(n_list)}")
    return seq


def verify_oy_sequence(seq, metric, f):
    """Independent pointwise re-check of every found point of `seq`."""
    for p, n, found in zip(seq.points, seq.n_index, seq.found):
        if not found:
            continue
        p = np.asarray(p, float)
        if not float(f(p)) > seq.estimated_sup - 1.0 / n:
            return False
        if not float(oy_bound(metric, f, p[None], seq.flavor)[0]) <= 1.0 / n:
            return False
    return True


def iterated_logs(rho, k):
    """``[log(rho), log(log(rho)), ...]`` (k entries), each required positive."""
    out = []
    cur = np.asarray(rho, float)
    for j in range(1, k + 1):
        if np.any(cur <= 0):
            raise IterateDomainError(f"log iterate {j} undefined (argument {float(np.min(cur)):.3g})")
        cur = np.log(cur)
        if np.any(cur <= 0):
            raise IterateDomainError(f"log iterate {j} is not positive (value {float(np.min(cur)):.3g})")
        out.append(cur)
    return out


@dataclass
class GrowthReport:
    passed: bool
    min_slack: float
    witness: list
    samples: int


def scalar_growth_check(metric, basepoint, k, samples, rho=None):
    """``s(x) >= -rho^2 prod_j (log^(j) rho)^2`` at every sample.

    `rho` overrides the distance function (vectorized on points).
    """
    pts = np.atleast_2d(np.asarray(samples, float))
    r = np.asarray(rho(pts) if rho is not None else geo.distance(metric, basepoint, pts), float)
    logs = iterated_logs(r, k)
    rhs = -(r**2) * np.prod(np.stack(logs) ** 2, axis=0)
    s = geo.scalar_curvature(metric, pts)
    slack = s - rhs
    i = int(np.argmin(slack))
    return GrowthReport(bool(np.all(slack >= 0)), float(slack[i]), pts[i].tolist(), len(pts))

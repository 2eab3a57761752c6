"""Riemannian submersions ``pi: M -> X`` given in charts.

Vertical space is the kernel of ``d pi`` (by finite differences of the
projection), horizontal space its metric complement.  The fundamental tensors
T and A are evaluated from their defining covariant-derivative formulas after
extending vectors to local fields; two extension schemes are provided so that
tensoriality can be checked.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import fd
from . import geometry as geo
from . import rng
from .errors import AmbientMismatch, DegeneratePlane, ExtensionFailure, NotASubmersion, NotOrthonormal
from .geometry import ChartDomain, MetricField

RANK_TOL = 1e-8
ISOMETRY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class RiemannianSubmersion:
    total: MetricField
    base: MetricField
    projection: object
    name: str = ""
    fiber_chart: ChartDomain = None
    section: object = None
    warped: object = None
    params: dict = field(default_factory=dict, compare=False)

    @property
    def n_X(self):
        return self.base.dim

    @property
    def dim(self):
        return self.total.dim

    @property
    def n_V(self):
        return self.dim - self.n_X

    def __call__(self, p):
        return np.asarray(self.projection(np.asarray(p, float)), float)

    def dpi(self, p):
        return fd.derivative(self.projection, np.asarray(p, float), self.total.step)

    def vertical_basis(self, p):
        """Coordinate basis (columns) of ``ker d pi``."""
        _, s, vh = np.linalg.svd(self.dpi(p), full_matrices=True)
        if np.any(s[..., -1] <= RANK_TOL):
            raise NotASubmersion(f"d pi drops rank on {self.name}")
        return np.swapaxes(vh[..., self.n_X :, :], -1, -2)

    def projectors(self, p):
        """``(P_hor, P_ver)`` as ``(..., n, n)`` matrices acting on coordinate vectors."""
        p = np.asarray(p, float)
        G = self.total.raw(p)
        V = self.vertical_basis(p)
        gvv = np.einsum("...ai,...ab,...bj->...ij", V, G, V)
        P_ver = np.einsum("...ai,...ij,...bj,...bc->...ac", V, np.linalg.inv(gvv), V, G)
        return np.eye(self.dim) - P_ver, P_ver

    def horizontal_lift(self, p, xstar):
        """Horizontal vector at `p` projecting to `xstar`."""
        p = np.asarray(p, float)
        P_hor, _ = self.projectors(p)
        pre = np.einsum("...ij,...j->...i", np.linalg.pinv(self.dpi(p)), np.asarray(xstar, float))
        return np.einsum("...ij,...j->...i", P_hor, pre)

    def split(self, p, xi):
        P_hor, P_ver = self.projectors(p)
        xi = np.asarray(xi, float)
        return np.einsum("...ij,...j->...i", P_hor, xi), np.einsum("...ij,...j->...i", P_ver, xi)

    def horizontal_frame(self, p):
        """Horizontal lifts (columns) of a g^X-orthonormal frame at ``pi(p)``."""
        p = np.asarray(p, float)
        E = geo.orthonormal_frame(self.base.raw(self(p)))
        return np.stack([self.horizontal_lift(p, E[..., :, i]) for i in range(self.n_X)], -1)


@dataclass
class SubmersionReport:
    passed: bool
    samples: int
    max_isometry_defect: float
    min_singular_value: float
    witness: list = field(default_factory=list)


def verify_submersion(sub, points, tol=ISOMETRY_TOL, raise_on_fail=True):
    """Rank of ``d pi`` and isometry on horizontal vectors at each point."""
    points = np.atleast_2d(np.asarray(points, float))
    s = np.linalg.svd(sub.dpi(points), compute_uv=False)[..., -1]
    defect = np.zeros(len(points))
    ok_rank = s > RANK_TOL
    if np.all(ok_rank):
        H = sub.horizontal_frame(points)
        gram = np.einsum("...ai,...ab,...bj->...ij", H, sub.total.raw(points), H)
        defect = np.max(np.abs(gram - np.eye(sub.n_X)), axis=(-1, -2))
    bad = (~ok_rank) | (defect > tol)
    i = int(np.argmax(bad)) if np.any(bad) else int(np.argmax(defect))
    report = SubmersionReport(not np.any(bad), len(points), float(defect.max()), float(s.min()), points[i].tolist())
    if raise_on_fail and not report.passed:
        raise NotASubmersion(
            f"{sub.name} is not a Riemannian submersion at {points[i].tolist()} "
            f"(isometry defect {defect[i]:.3e}, smallest singular value {s[i]:.3e})",
            witness=points[i].tolist(),
        )
    return report


# -- fundamental tensors -----------------------------------------------------------

def _extensions(sub, p, vecs, scheme):
    """Vectorized fields ``q -> (..., k, n)`` extending the vertical and horizontal parts of `vecs`."""
    hor, ver = sub.split(p, vecs)  # (k, n) each

    def ext_ver(q):
        return np.einsum("...ij,kj->...ki", sub.projectors(q)[1], ver)

    if scheme == "coordinate":
        def ext_hor(q):
            return np.einsum("...ij,kj->...ki", sub.projectors(q)[0], hor)
    elif scheme == "basic":
        xstar = np.einsum("ij,kj->ki", sub.dpi(p), hor)

        def ext_hor(q):
            q = np.asarray(q, float)
            return np.stack([sub.horizontal_lift(q, xs) for xs in xstar], -2)
    else:
        raise ValueError(f"unknown extension scheme {scheme!r}")
    return ext_hor, ext_ver


def _nabla_all(metric, field_fn, p):
    """``N[j, :, i] = nabla_{d_i} Y_j`` for the k fields of `field_fn` at p."""
    dY = fd.derivative(field_fn, p, metric.step)  # [j, a, i]
    Y = field_fn(p)
    gam = geo._christoffel(metric, p)
    return dY + np.einsum("aib,jb->jai", gam, Y)


def oneill_tensors(sub, p, scheme="basic"):
    """Coordinate components ``T[a, i, j] = (T_{d_i} d_j)^a`` and likewise A."""
    p = np.asarray(p, float)
    n = sub.dim
    basis = np.eye(n)
    P_hor, P_ver = sub.projectors(p)
    ext_hor, ext_ver = _extensions(sub, p, basis, scheme)
    N_hor = _nabla_all(sub.total, ext_hor, p)  # [j, a, i]: nabla_{d_i} (d_j)^hor-extension
    N_ver = _nabla_all(sub.total, ext_ver, p)
    if not (np.all(np.isfinite(N_hor)) and np.all(np.isfinite(N_ver))):
        raise ExtensionFailure(f"field extension ill-conditioned at {p.tolist()}")
    # contract the differentiation slot with the vertical / horizontal part of xi = d_i
    vh = np.einsum("jai,il->jal", N_ver, P_ver)  # nabla_{d_l^ver} ext_ver(d_j)
    hv = np.einsum("jai,il->jal", N_hor, P_ver)
    hh = np.einsum("jai,il->jal", N_hor, P_hor)
    vv = np.einsum("jai,il->jal", N_ver, P_hor)
    T = np.einsum("ba,jal->blj", P_hor, vh) + np.einsum("ba,jal->blj", P_ver, hv)
    A = np.einsum("ba,jal->blj", P_ver, hh) + np.einsum("ba,jal->blj", P_hor, vv)
    return T, A


def tensor_T(sub, xi, eta, p, scheme="basic"):
    T, _ = oneill_tensors(sub, p, scheme)
    return np.einsum("aij,i,j->a", T, np.asarray(xi, float), np.asarray(eta, float))


def tensor_A(sub, xi, eta, p, scheme="basic"):
    _, A = oneill_tensors(sub, p, scheme)
    return np.einsum("aij,i,j->a", A, np.asarray(xi, float), np.asarray(eta, float))


def bilinear_operator_norm(B, starts=8, iters=100, seed=0):
    """``max |B(u, w)|`` over unit u, w for an orthonormal-frame array ``B[a, i, j]``.

    Alternating power iteration from several seeded starts, stopped once
    every start's value is stationary to rounding.
    """
    gen = rng.stream(seed, "tensor-norm")
    n = B.shape[1]
    u = gen.standard_normal((starts, n))
    w = gen.standard_normal((starts, B.shape[2]))
    u /= np.linalg.norm(u, axis=-1, keepdims=True)
    w /= np.linalg.norm(w, axis=-1, keepdims=True)
    prev = np.full(starts, -1.0)
    for _ in range(iters):
        vals = np.linalg.norm(np.einsum("aij,si,sj->sa", B, u, w), axis=-1)
        if np.all(np.abs(vals - prev) <= 1e-14 * (1.0 + vals)):
            break
        prev = vals
        y = np.einsum("aij,si,sj->sa", B, u, w)
        u = np.einsum("aij,sa,sj->si", B, y, w)
        u /= np.maximum(np.linalg.norm(u, axis=-1, keepdims=True), 1e-300)
        y = np.einsum("aij,si,sj->sa", B, u, w)
        w = np.einsum("aij,sa,si->sj", B, y, u)
        w /= np.maximum(np.linalg.norm(w, axis=-1, keepdims=True), 1e-300)
    vals = np.linalg.norm(np.einsum("aij,si,sj->sa", B, u, w), axis=-1)
    k = int(np.argmax(vals))
    return float(vals[k]), u[k], w[k]


def _orthonormal_components(C, G):
    E = geo.orthonormal_frame(G)
    return np.einsum("ka,aij,ib,jc->kbc", np.linalg.inv(E), C, E, E), E


def tensor_norms(sub, p, scheme="basic"):
    """Operator norms ``(|T|, |A|)`` at p."""
    T, A = oneill_tensors(sub, p, scheme)
    G = sub.total.raw(p)
    t = bilinear_operator_norm(_orthonormal_components(T, G)[0])[0]
    a = bilinear_operator_norm(_orthonormal_components(A, G)[0])[0]
    return t, a


@dataclass
class TensorSups:
    tau0: float
    alpha0: float
    tau_witness: list
    alpha_witness: list
    samples: int


def tensor_sups(sub, points, scheme="basic"):
    """Sampled suprema of ``|T|`` and ``|A|`` over `points`."""
    points = np.atleast_2d(np.asarray(points, float))
    norms = np.array([tensor_norms(sub, q, scheme) for q in points])
    it, ia = int(np.argmax(norms[:, 0])), int(np.argmax(norms[:, 1]))
    return TensorSups(float(norms[it, 0]), float(norms[ia, 1]), points[it].tolist(), points[ia].tolist(), len(points))


# -- curvature of horizontal planes -----------------------------------------------------

@dataclass
class HorizontalCurvature:
    k_total: float
    k_base: float
    a_term: float
    residual: float


def horizontal_sectional_curvature(sub, p, X, Y):
    """Both sides of ``K_M(X, Y) = K_X(X*, Y*) - 3|A_X Y|^2 / Gram``."""
    p = np.asarray(p, float)
    X, Y = np.asarray(X, float), np.asarray(Y, float)
    G = sub.total(p)
    den = geo.gram_determinant(G, X, Y)
    if den < geo.GRAM_TOL:
        raise DegeneratePlane(f"Gram determinant {den:.3e}")
    k_total = float(geo.sectional_curvature(sub.total, p, X, Y))
    dpi = sub.dpi(p)
    k_base = float(geo.sectional_curvature(sub.base, sub(p), dpi @ X, dpi @ Y))
    axy = tensor_A(sub, X, Y, p)
    a_term = float(3.0 * (axy @ G @ axy) / den)
    return HorizontalCurvature(k_total, k_base, a_term, k_total - (k_base - a_term))


def horizontal_curvature_tensor(sub, p):
    """Curvature tensor of the total space on an orthonormal horizontal frame."""
    H = sub.horizontal_frame(p)
    R = geo.riemann(sub.total, p)
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", R, H, H, H, H)


def _plane_curvature(RH, u, w):
    return np.einsum("abcd,a,b,c,d->", RH, u, w, u, w) / (np.dot(u, u) * np.dot(w, w) - np.dot(u, w) ** 2)


def sec_hor_at(sub, p, planes=200, seed=0):
    """Minimal horizontal sectional curvature at one point and a minimizing plane."""
    RH = horizontal_curvature_tensor(sub, np.asarray(p, float))
    n = sub.n_X
    if n < 2:
        raise DegeneratePlane("horizontal planes need n_X >= 2")
    if n == 2:
        return float(_plane_curvature(RH, np.eye(2)[0], np.eye(2)[1])), (np.eye(2)[0], np.eye(2)[1])
    u = rng.unit_vectors(rng.sobol(2 * n, planes, seed, "sec-hor"))
    U, W = u[:, :n], u[:, n:]
    num = np.einsum("abcd,sa,sb,sc,sd->s", RH, U, W, U, W)
    den = np.sum(U * U, -1) * np.sum(W * W, -1) - np.sum(U * W, -1) ** 2
    k = num / den
    i = int(np.argmin(k))
    res = minimize(lambda z: _plane_curvature(RH, z[:n], z[n:]), np.concatenate([U[i], W[i]]), method="BFGS")
    if res.fun < k[i]:
        return float(res.fun), (res.x[:n], res.x[n:])
    return float(k[i]), (U[i], W[i])


def sec_hor_min(sub, points, planes=200, seed=0):
    """``(min, witness point)`` of the horizontal sectional curvature over `points`."""
    points = np.atleast_2d(np.asarray(points, float))
    vals = np.array([sec_hor_at(sub, q, planes, seed)[0] for q in points])
    i = int(np.argmin(vals))
    return float(vals[i]), points[i].tolist()


def basic_hessian_check(sub, F, p, X, Y):
    """``Hess^M (F o pi)(X, Y) - Hess^X F(d pi X, d pi Y)``."""
    p = np.asarray(p, float)
    X, Y = np.asarray(X, float), np.asarray(Y, float)
    lhs = X @ geo.hessian(sub.total, lambda q: F(sub(q)), p) @ Y
    dpi = sub.dpi(p)
    rhs = (dpi @ X) @ geo.hessian(sub.base, F, sub(p)) @ (dpi @ Y)
    return float(lhs - rhs)


def hilbert_schmidt_sum(T, basis, g1=None, g2=None, tol=1e-10):
    """``sum_i |T xi_i|^2`` for a g1-orthonormal family (columns of `basis`)."""
    T = np.asarray(T, float)
    basis = np.asarray(basis, float)
    if basis.ndim == 1:
        basis = basis[:, None]
    g1 = np.eye(T.shape[1]) if g1 is None else np.asarray(g1, float)
    g2 = np.eye(T.shape[0]) if g2 is None else np.asarray(g2, float)
    gram = basis.T @ g1 @ basis
    if np.max(np.abs(gram - np.eye(basis.shape[1]))) > tol:
        raise NotOrthonormal("family is not orthonormal")
    img = T @ basis
    return float(np.einsum("ai,ab,bi->", img, g2, img))


def submersion_hessian_lift(sub, imm, F, p, e):
    """``Hess^M (F o pi o phi)(e, e)`` from the four-term submersion formula.

    Returns ``(value, terms)`` with terms ``base``, ``A``, ``T``, ``S``.
    """
    if imm.ambient_metric is not sub.total:
        raise AmbientMismatch(f"immersion {imm.name} does not map into the total space of {sub.name}")
    from .immersion import second_fundamental_form

    p = np.asarray(p, float)
    e = np.asarray(e, float)
    q = imm(p)
    xi = imm.jacobian(p) @ e
    xh, xv = sub.split(q, xi)
    dpi = sub.dpi(q)
    x = sub(q)
    base_term = (dpi @ xh) @ geo.hessian(sub.base, F, x) @ (dpi @ xh)
    grad = sub.horizontal_lift(q, geo.gradient(sub.base, F, x))
    T, A = oneill_tensors(sub, q)
    G = sub.total.raw(q)
    a_term = 2.0 * np.einsum("aij,i,j->a", A, xh, grad) @ G @ xv
    t_term = np.einsum("aij,i,j->a", T, xv, grad) @ G @ xv
    s_term = geo.differential(sub.base, F, x) @ (dpi @ second_fundamental_form(imm, p, e, e))
    terms = {"base": float(base_term), "A": float(a_term), "T": float(t_term), "S": float(s_term)}
    return float(sum(terms.values())), terms


def fiber_sff_term(sub, q, xv, vec):
    """``-g(S^V(xv, xv), vec)`` with ``S^V(V, V) = (nabla_V V)^hor = T_V V``."""
    T, _ = oneill_tensors(sub, q)
    return float(-(np.einsum("aij,i,j->a", T, xv, xv) @ sub.total.raw(q) @ vec))


# -- builtins ------------------------------------------------------------------------

def product_submersion(n_X=2, n_V=1):
    from .warped import product

    return product(n_X, n_V).as_submersion()


def warped_submersion(name="polar-plane", **params):
    from .warped import BUILTINS

    return BUILTINS[name](**params).as_submersion()


def fiber_projection(wp):
    """``pi_V`` on a warped product (a Riemannian submersion only when psi is constant 1)."""
    n_X = wp.n_X
    return RiemannianSubmersion(
        total=wp.metric,
        base=wp.fiber,
        projection=lambda p: np.asarray(p, float)[..., n_X:],
        name=f"{wp.name} -> fiber",
    )


HOPF_MARGIN = 0.01


def hopf_chart(xi_extent=20.0):
    """Hopf fibration ``S^3 -> S^2(1/2)`` in the chart ``(eta, xi1, xi2)``.

    Total metric ``d eta^2 + cos^2(eta) d xi1^2 + sin^2(eta) d xi2^2``; the
    base point is ``(theta, phi) = (2 eta, xi1 - xi2)`` on the sphere of
    radius 1/2.  Fibers are the circles ``xi1 - xi2 = const``.
    """
    from .models import diagonal_metric, round_sphere

    chart = ChartDomain(
        ((HOPF_MARGIN, np.pi / 2 - HOPF_MARGIN), (-xi_extent, xi_extent), (-xi_extent, xi_extent)),
        "Hopf chart of S^3",
    )
    total = diagonal_metric(
        lambda p: np.stack([np.ones(p.shape[:-1]), np.cos(p[..., 0]) ** 2, np.sin(p[..., 0]) ** 2], -1),
        chart,
        "S^3",
    )
    base = round_sphere(0.5, margin=2 * HOPF_MARGIN, phi_extent=2 * xi_extent)

    def projection(p):
        p = np.asarray(p, float)
        return np.stack([2.0 * p[..., 0], p[..., 1] - p[..., 2]], -1)

    def section(x, w):
        x, w = np.asarray(x, float), np.asarray(w, float)
        return np.stack([0.5 * x[..., 0], 0.5 * x[..., 1] + w[..., 0], -0.5 * x[..., 1] + w[..., 0]], -1)

    return RiemannianSubmersion(
        total, base, projection, "hopf-chart", ChartDomain(((-np.pi, np.pi),), "fiber angle"), section
    )


BUILTINS = {
    "product": product_submersion,
    "warped": warped_submersion,
    "hopf-chart": hopf_chart,
}

"""Parametrized immersions into a Riemannian ambient manifold.

The ambient can be a bare `MetricField`, a `WarpedProduct` or a
`RiemannianSubmersion`; the latter two enable the horizontal/vertical
formulas.  The second fundamental form is the normal part of the ambient
covariant derivative of the coordinate frame ``d phi(d_i)``.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import fd
from . import geometry as geo
from .errors import AmbientNotWarped, DegeneratePlane, RankDeficient
from .geometry import ChartDomain, MetricField
from .warped import WarpedProduct, grad_log_warp

RANK_TOL = 1e-8
INDUCED_STEP = 1e-3


@dataclass(frozen=True, eq=False)
class Immersion:
    chart: ChartDomain
    ambient: object
    map: object
    name: str = ""
    step: float = INDUCED_STEP
    params: dict = field(default_factory=dict, compare=False)

    @property
    def dim(self):
        return self.chart.dim

    @cached_property
    def ambient_metric(self):
        amb = self.ambient
        if isinstance(amb, MetricField):
            return amb
        if isinstance(amb, WarpedProduct):
            return amb.metric
        return amb.total

    @property
    def warped(self):
        amb = self.ambient
        if isinstance(amb, WarpedProduct):
            return amb
        return getattr(amb, "warped", None)

    @cached_property
    def submersion(self):
        amb = self.ambient
        if isinstance(amb, WarpedProduct):
            return amb.as_submersion()
        if isinstance(amb, MetricField):
            return None
        return amb

    def __call__(self, p):
        return np.asarray(self.map(np.asarray(p, float)), float)

    def jacobian(self, p):
        """``d phi`` as an ``(..., N, m)`` array."""
        return fd.derivative(self.map, np.asarray(p, float), self.step)

    def _raw_induced(self, p):
        J = self.jacobian(p)
        G = self.ambient_metric.raw(self(p))
        return np.einsum("...ai,...ab,...bj->...ij", J, G, J)

    @cached_property
    def induced_metric_field(self):
        """Pull-back metric on the parameter chart."""
        return MetricField(self._raw_induced, self.chart, f"induced metric of {self.name}", step=self.step)


def check_rank(imm, p):
    gM = imm._raw_induced(np.asarray(p, float))
    smin = np.sqrt(np.clip(np.linalg.eigvalsh(gM)[..., 0], 0.0, None))
    if np.any(smin <= RANK_TOL):
        raise RankDeficient(f"d phi has rank < {imm.dim} on {imm.name} (smallest singular value {smin.min():.3e})")
    return gM


def induced_metric(imm, p):
    """``g^M = phi^* g`` at p, with the rank condition enforced."""
    imm.chart.check(p)
    return check_rank(imm, p)


def tangent_projector(J, G):
    """G-orthogonal projector onto the image of J, as an ``(N, N)`` matrix."""
    gM = np.einsum("...ai,...ab,...bj->...ij", J, G, J)
    return np.einsum("...ai,...ij,...bj,...bc->...ac", J, np.linalg.inv(gM), J, G)


def sff_tensor(imm, p):
    """Second fundamental form components ``S[a, i, j] = S(d_i, d_j)^a``."""
    p = np.asarray(p, float)
    induced_metric(imm, p)
    q = imm(p)
    J = imm.jacobian(p)
    d2 = fd.second_derivative(imm.map, p, imm.step)  # [a, i, j]
    gam = geo._christoffel(imm.ambient_metric, q)
    acc = d2 + np.einsum("...abc,...bi,...cj->...aij", gam, J, J)
    normal = np.eye(q.shape[-1]) - tangent_projector(J, imm.ambient_metric.raw(q))
    S = np.einsum("...ab,...bij->...aij", normal, acc)
    return 0.5 * (S + np.swapaxes(S, -1, -2))


def second_fundamental_form(imm, p, e, e2):
    return np.einsum("...aij,...i,...j->...a", sff_tensor(imm, p), np.asarray(e, float), np.asarray(e2, float))


def mean_curvature_vector(imm, p, basis=None):
    """Trace of S over a g^M-orthonormal basis (columns of `basis`, if given)."""
    S = sff_tensor(imm, p)
    if basis is None:
        gM = induced_metric(imm, p)
        return np.einsum("...aij,...ij->...a", S, np.linalg.inv(gM))
    basis = np.asarray(basis, float)
    return np.einsum("...aij,...ik,...jk->...a", S, basis, basis)


def mean_curvature_norm(imm, p):
    H = mean_curvature_vector(imm, p)
    return geo.norm(imm.ambient_metric.raw(imm(p)), H)


def composed_gradient(imm, L, p, e):
    """``g^M(grad f, e) = g(grad L, d phi e)`` for ``f = L o phi``."""
    p = np.asarray(p, float)
    dL = fd.derivative(L, imm(p), imm.ambient_metric.step)
    return np.einsum("...a,...ai,...i->...", dL, imm.jacobian(p), np.asarray(e, float))


def composed_hessian(imm, L, p, e, e2=None):
    """``Hess^M f(e, e') = Hess L(d phi e, d phi e') + g(grad L, S(e, e'))``."""
    p = np.asarray(p, float)
    e = np.asarray(e, float)
    e2 = e if e2 is None else np.asarray(e2, float)
    q = imm(p)
    J = imm.jacobian(p)
    amb = imm.ambient_metric
    hess_L = geo._hessian(amb, L, q)
    dL = fd.derivative(L, q, amb.step)
    xi, eta = J @ e, J @ e2
    return np.einsum("...a,...ab,...b->...", xi, hess_L, eta) + np.einsum(
        "...a,...a->...", dL, second_fundamental_form(imm, p, e, e2)
    )


def direct_hessian(imm, L, p):
    """Hessian of ``L o phi`` computed intrinsically on ``(M, g^M)``."""
    return geo.hessian(imm.induced_metric_field, lambda q: L(imm(q)), p)


def _require_warped(imm):
    wp = imm.warped
    if wp is None:
        raise AmbientNotWarped(f"ambient of {imm.name} is not a warped product")
    return wp


def _split_image(imm, p, e):
    wp = _require_warped(imm)
    p = np.asarray(p, float)
    xi = imm.jacobian(p) @ np.asarray(e, float)
    x, v = wp.split(imm(p))
    return wp, x, v, xi[..., : wp.n_X], xi[..., wp.n_X :]


def hessian_lift_vertical(imm, G, p, e):
    """``Hess^M (G^v o phi)(e, e)`` via the horizontal/vertical three-term formula."""
    wp, x, v, eh, ev = _split_image(imm, p, e)
    S = second_fundamental_form(imm, p, e, e)
    dG = geo.differential(wp.fiber, G, v)
    cross = -2.0 * np.einsum("...i,...ij,...j->...", grad_log_warp(wp, x), wp.base.raw(x), eh) * (dG @ ev)
    return cross + ev @ geo.hessian(wp.fiber, G, v) @ ev + dG @ S[..., wp.n_X :]


def hessian_lift_horizontal(imm, F, p, e):
    """``Hess^M (F^h o phi)(e, e)`` via the horizontal/vertical three-term formula."""
    wp, x, v, eh, ev = _split_image(imm, p, e)
    S = second_fundamental_form(imm, p, e, e)
    dF = geo.differential(wp.base, F, x)
    g_vv = wp.warp(x) ** 2 * (ev @ wp.fiber.raw(v) @ ev)
    return (dF @ grad_log_warp(wp, x)) * g_vv + eh @ geo.hessian(wp.base, F, x) @ eh + dF @ S[..., : wp.n_X]


def gauss_sectional_defect(imm, p, e1, e2):
    """``K_M - K_ambient`` on span(e1, e2) from the Gauss equation."""
    gM = induced_metric(imm, p)
    e1, e2 = np.asarray(e1, float), np.asarray(e2, float)
    den = geo.gram_determinant(gM, e1, e2)
    if den < geo.GRAM_TOL:
        raise DegeneratePlane(f"Gram determinant {den:.3e}")
    S = sff_tensor(imm, p)
    G = imm.ambient_metric.raw(imm(p))
    s11 = np.einsum("aij,i,j->a", S, e1, e1)
    s22 = np.einsum("aij,i,j->a", S, e2, e2)
    s12 = np.einsum("aij,i,j->a", S, e1, e2)
    return float((s11 @ G @ s22 - s12 @ G @ s12) / den)


def gauss_curvature_tensor(imm, p):
    """Curvature tensor of M in coordinates from the Gauss equation.

    ``R^M_ijkl = R(d_i, d_j, d_k, d_l) + <S_ik, S_jl> - <S_il, S_jk>`` with the
    ambient tensor pulled back by ``d phi``.  Only first and second
    derivatives of the map enter, so this is better conditioned than
    differentiating the induced metric twice.
    """
    p = np.asarray(p, float)
    q = imm(p)
    J = imm.jacobian(p)
    G = imm.ambient_metric.raw(q)
    R = np.einsum("...abcd,...ai,...bj,...ck,...dl->...ijkl", geo.riemann(imm.ambient_metric, q), J, J, J, J)
    S = sff_tensor(imm, p)
    SS = np.einsum("...aij,...ab,...bkl->...ijkl", S, G, S)
    return R + np.einsum("...ikjl->...ijkl", SS) - np.einsum("...iljk->...ijkl", SS)


def intrinsic_minus_extrinsic(imm, p, e1, e2):
    """``K_M(e1, e2) - K_ambient(d phi e1, d phi e2)``, each side computed independently."""
    p = np.asarray(p, float)
    k_M = geo.sectional_curvature(imm.induced_metric_field, p, e1, e2)
    J = imm.jacobian(p)
    k_amb = geo.sectional_curvature(imm.ambient_metric, imm(p), J @ np.asarray(e1, float), J @ np.asarray(e2, float))
    return float(k_M - k_amb)


def split_tangent(imm, p, e, rho):
    """Split ``d phi e`` into ``(e_hor, e_ver, e_rho, e_perp)``.

    `rho` is the distance function on the base; ``e_rho`` is the component
    of ``e_hor`` along the unit radial direction ``grad rho``.  All returned
    vectors are full ambient-coordinate vectors.
    """
    wp, x, v, eh, ev = _split_image(imm, p, e)
    gX = wp.base.raw(x)
    grad_rho = geo.gradient(wp.base, rho, x)
    grad_rho = grad_rho / geo.norm(gX, grad_rho)
    zeros_h, zeros_v = np.zeros_like(eh), np.zeros_like(ev)
    e_rho = (eh @ gX @ grad_rho) * grad_rho
    e_perp = eh - e_rho
    cat = np.concatenate
    return cat([eh, zeros_v]), cat([zeros_h, ev]), cat([e_rho, zeros_v]), cat([e_perp, zeros_v])


def tangent_orthonormal_basis(imm, p):
    """g^M-orthonormal basis (columns) of T_pM by Gram-Schmidt on the coordinate frame."""
    return geo.orthonormal_frame(induced_metric(imm, p))

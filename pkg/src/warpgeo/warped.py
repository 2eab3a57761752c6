"""Warped products ``X x_psi V`` with metric ``g^X + psi^2 g^V``.

Coordinates on the product are ``(x, v)``: base coordinates first, fiber
coordinates second.  Basic fields are given on their own factor only, either
as constant coordinate vectors or as vectorized callables of the factor
coordinates, so evaluating them on the product ignores the other factor.

Every closed-form quantity here is computed from the geometry of the two
factors and psi; `geometry` applied to `assemble_metric` is the oracle.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import geometry as geo
from .errors import KindMismatch, NonpositiveWarp
from .geometry import ChartDomain, MetricField, ScalarField


@dataclass(frozen=True)
class SplitVector:
    """A tangent vector of the product split into base and fiber blocks."""

    hor: np.ndarray
    ver: np.ndarray

    @property
    def full(self):
        return np.concatenate([np.atleast_1d(self.hor), np.atleast_1d(self.ver)], axis=-1)

    @classmethod
    def from_full(cls, vec, n_X):
        vec = np.asarray(vec, float)
        return cls(vec[..., :n_X], vec[..., n_X:])


@dataclass(frozen=True, eq=False)
class WarpedProduct:
    base: MetricField
    fiber: MetricField
    psi: object
    name: str = ""
    params: dict = field(default_factory=dict, compare=False)

    @property
    def n_X(self):
        return self.base.dim

    @property
    def n_V(self):
        return self.fiber.dim

    @property
    def dim(self):
        return self.n_X + self.n_V

    @property
    def chart(self):
        return self.base.chart.product(self.fiber.chart, f"chart of {self.name}")

    def split(self, p):
        p = np.asarray(p, float)
        return p[..., : self.n_X], p[..., self.n_X :]

    def warp(self, x):
        """psi at base points `x`, checked positive."""
        val = np.asarray(self.psi(np.asarray(x, float)), float)
        if np.any(val <= 0):
            raise NonpositiveWarp(f"warping function nonpositive ({np.min(val):.3e}) on {self.name}")
        return val

    @cached_property
    def metric(self):
        return assemble_metric(self)

    def as_submersion(self):
        from .submersion import RiemannianSubmersion

        n_X = self.n_X
        return RiemannianSubmersion(
            total=self.metric,
            base=self.base,
            projection=lambda p: np.asarray(p, float)[..., :n_X],
            name=f"{self.name} -> base",
            fiber_chart=self.fiber.chart,
            section=_product_point,
            warped=self,
        )


def _product_point(x, w):
    x = np.asarray(x, float)
    w = np.asarray(w, float)
    shape = np.broadcast_shapes(x.shape[:-1], w.shape[:-1])
    return np.concatenate([np.broadcast_to(x, shape + x.shape[-1:]), np.broadcast_to(w, shape + w.shape[-1:])], -1)


def assemble_metric(wp):
    """Block metric ``diag(g^X(x), psi(x)^2 g^V(v))`` on the product chart."""
    n_X, n = wp.n_X, wp.dim

    def g(p):
        p = np.asarray(p, float)
        x, v = p[..., :n_X], p[..., n_X:]
        out = np.zeros(p.shape[:-1] + (n, n))
        out[..., :n_X, :n_X] = wp.base.raw(x)
        out[..., n_X:, n_X:] = (wp.warp(x) ** 2)[..., None, None] * wp.fiber.raw(v)
        return out

    return MetricField(g, wp.chart, f"{wp.name} metric", step=min(wp.base.step, wp.fiber.step))


# -- helpers ------------------------------------------------------------------

def _as_field(vec_or_fn):
    if callable(vec_or_fn):
        return vec_or_fn
    vec = np.asarray(vec_or_fn, float)
    return lambda q: np.broadcast_to(vec, np.asarray(q).shape[:-1] + vec.shape[-1:])


def _value(vec_or_fn, q):
    return np.asarray(_as_field(vec_or_fn)(q), float)


def grad_log_warp(wp, x):
    """``grad^X psi / psi`` at base points."""
    x = np.asarray(x, float)
    return geo.gradient(wp.base, wp.warp, x) / wp.warp(x)[..., None]


def lift(wp, fn, kind):
    """``F^h = F o pi_X`` (kind 'base') or ``G^v = G o pi_V`` (kind 'fiber')."""
    n_X = wp.n_X
    if kind == "base":
        return ScalarField(lambda p: fn(np.asarray(p, float)[..., :n_X]), wp.dim, "F^h")
    if kind == "fiber":
        return ScalarField(lambda p: fn(np.asarray(p, float)[..., n_X:]), wp.dim, "G^v")
    raise KindMismatch(f"kind must be 'base' or 'fiber', got {kind!r}")


def lift_field(wp, vec_or_fn, kind):
    """An h-basic ('h-basic') or v-basic ('v-basic') vector field on the product."""
    n_X, n_V = wp.n_X, wp.n_V
    fn = _as_field(vec_or_fn)
    if kind == "h-basic":
        def out(p):
            p = np.asarray(p, float)
            X = np.asarray(fn(p[..., :n_X]), float)
            return np.concatenate([X, np.zeros(p.shape[:-1] + (n_V,))], -1)
    elif kind == "v-basic":
        def out(p):
            p = np.asarray(p, float)
            V = np.asarray(fn(p[..., n_X:]), float)
            return np.concatenate([np.zeros(p.shape[:-1] + (n_X,)), V], -1)
    else:
        raise KindMismatch(f"kind must be 'h-basic' or 'v-basic', got {kind!r}")
    return out


# -- connection and fiber geometry ----------------------------------------------

def connection_mixed(wp, X, V, p):
    """``nabla_V X = nabla_X V = (X(psi)/psi) V`` for h-basic X and v-basic V."""
    x, v = wp.split(p)
    Xv = _value(X, x)
    Vv = _value(V, v)
    rate = np.einsum("...i,...ij,...j->...", Xv, wp.base.raw(x), grad_log_warp(wp, x))
    return SplitVector(np.zeros_like(Xv), rate[..., None] * Vv)


def connection_vertical(wp, V, W, p):
    """``nabla_V W = nabla^V_V W - g(V, W) grad psi / psi`` for v-basic V, W."""
    x, v = wp.split(p)
    Vv, Wv = _value(V, v), _value(W, v)
    gvw = wp.warp(x) ** 2 * np.einsum("...i,...ij,...j->...", Vv, wp.fiber.raw(v), Wv)
    ver = geo.covariant_derivative(wp.fiber, _as_field(W), v, Vv)
    return SplitVector(-gvw[..., None] * grad_log_warp(wp, x), ver)


def fiber_second_fundamental_form(wp, V, W, p):
    """Second fundamental form of the fiber through p, a horizontal (base) vector."""
    x, v = wp.split(p)
    V, W = np.asarray(V, float), np.asarray(W, float)
    gvw = wp.warp(x) ** 2 * np.einsum("...i,...ij,...j->...", V, wp.fiber.raw(v), W)
    return -gvw[..., None] * grad_log_warp(wp, x)


def fiber_mean_curvature(wp, p):
    """Mean curvature vector ``-n_V grad psi / psi`` of the fiber through p."""
    x, _ = wp.split(p)
    return -wp.n_V * grad_log_warp(wp, x)


def divergence_lift(wp, vec_field, kind, p):
    """Divergence on the product of an h-basic or v-basic field."""
    x, v = wp.split(p)
    if kind == "h-basic":
        fn = _as_field(vec_field)
        X = np.asarray(fn(x), float)
        if X.shape[-1] != wp.n_X:
            raise KindMismatch("h-basic field must have base dimension")
        rate = np.einsum("...i,...ij,...j->...", X, wp.base.raw(x), grad_log_warp(wp, x))
        return geo.divergence(wp.base, fn, x) + wp.n_V * rate
    if kind == "v-basic":
        fn = _as_field(vec_field)
        if np.asarray(fn(v)).shape[-1] != wp.n_V:
            raise KindMismatch("v-basic field must have fiber dimension")
        return geo.divergence(wp.fiber, fn, v)
    raise KindMismatch(f"kind must be 'h-basic' or 'v-basic', got {kind!r}")


# -- lifted functions -----------------------------------------------------------

def lift_gradient(wp, fn, kind, p):
    x, v = wp.split(p)
    if kind == "base":
        return SplitVector(geo.gradient(wp.base, fn, x), np.zeros(v.shape))
    if kind == "fiber":
        return SplitVector(np.zeros(x.shape), geo.gradient(wp.fiber, fn, v) / wp.warp(x)[..., None] ** 2)
    raise KindMismatch(f"kind must be 'base' or 'fiber', got {kind!r}")


def _mixed_rate(wp, x, fn):
    """``g^X(grad F, grad psi / psi)``."""
    return np.einsum("...i,...i->...", geo.differential(wp.base, fn, x), grad_log_warp(wp, x))


def lift_hessian(wp, fn, kind, xi, eta, p):
    """``Hess F^h(xi, eta)`` or ``Hess G^v(xi, eta)`` by the block formulas.

    `xi` and `eta` are `SplitVector`s or full product vectors.
    """
    x, v = wp.split(p)
    if not isinstance(xi, SplitVector):
        xi = SplitVector.from_full(xi, wp.n_X)
    if not isinstance(eta, SplitVector):
        eta = SplitVector.from_full(eta, wp.n_X)
    if kind == "base":
        hh = np.einsum("...i,...ij,...j->...", xi.hor, geo.hessian(wp.base, fn, x), eta.hor)
        g_vv = wp.warp(x) ** 2 * np.einsum("...i,...ij,...j->...", xi.ver, wp.fiber.raw(v), eta.ver)
        return hh + _mixed_rate(wp, x, fn) * g_vv
    if kind == "fiber":
        vv = np.einsum("...i,...ij,...j->...", xi.ver, geo.hessian(wp.fiber, fn, v), eta.ver)
        gl = grad_log_warp(wp, x)
        gX = wp.base.raw(x)
        dG = geo.differential(wp.fiber, fn, v)
        x_rate = lambda h: np.einsum("...i,...ij,...j->...", h, gX, gl)  # noqa: E731
        mixed = -x_rate(xi.hor) * np.einsum("...i,...i->...", dG, eta.ver) - x_rate(eta.hor) * np.einsum(
            "...i,...i->...", dG, xi.ver
        )
        return vv + mixed
    raise KindMismatch(f"kind must be 'base' or 'fiber', got {kind!r}")


def lift_laplacian(wp, fn, kind, p):
    x, v = wp.split(p)
    if kind == "base":
        return geo.laplacian(wp.base, fn, x) + wp.n_V * _mixed_rate(wp, x, fn)
    if kind == "fiber":
        return geo.laplacian(wp.fiber, fn, v) / wp.warp(x) ** 2
    raise KindMismatch(f"kind must be 'base' or 'fiber', got {kind!r}")


# -- builtins -------------------------------------------------------------------

def _interval(lo, hi, name, distance=True):
    chart = ChartDomain(((lo, hi),), name)
    return MetricField(
        lambda p: np.ones(np.asarray(p).shape[:-1] + (1, 1)),
        chart,
        name,
        distance=(lambda x0, x: np.abs(np.asarray(x, float)[..., 0] - np.asarray(x0, float)[..., 0]))
        if distance
        else None,
    )


def product(n_X=2, n_V=1, extent=50.0):
    """Euclidean ``R^n_X x R^n_V`` with psi = 1."""
    base = geo.euclidean(n_X, ChartDomain.box(n_X, -extent, extent, f"R^{n_X}"))
    fiber = geo.euclidean(n_V, ChartDomain.box(n_V, -extent, extent, f"R^{n_V}"))
    return WarpedProduct(base, fiber, lambda x: np.ones(np.asarray(x).shape[:-1]), f"product({n_X},{n_V})",
                         {"n_X": n_X, "n_V": n_V})


def polar_plane(rmin=0.05, rmax=50.0):
    """``(0, inf) x_r S^1``: the flat plane in polar coordinates.

    The circle is represented by its covering line, chart (-10, 10).
    """
    base = _interval(rmin, rmax, "radius")
    fiber = _interval(-10.0, 10.0, "angle", distance=False)
    return WarpedProduct(base, fiber, lambda x: np.asarray(x, float)[..., 0], "polar-plane")


def polar_space(rmin=0.05, rmax=50.0):
    """``(0, inf) x_r S^2``: flat R^3 in spherical coordinates."""
    from .models import round_sphere

    return WarpedProduct(_interval(rmin, rmax, "radius"), round_sphere(), lambda x: np.asarray(x, float)[..., 0],
                         "polar-space")


def hyperbolic_as_warped(extent=20.0):
    """``R x_{e^t} R``: the hyperbolic plane, curvature -1."""
    return WarpedProduct(
        _interval(-extent, extent, "t"),
        _interval(-extent, extent, "s", distance=False),
        lambda x: np.exp(np.asarray(x, float)[..., 0]),
        "hyperbolic-as-warped",
    )


def radial_warp(n_X=3, n_V=1, coeff=0.1, extent=50.0):
    """Euclidean factors with ``psi(x) = 1 + coeff |x|^2``."""
    wp = product(n_X, n_V, extent)
    return WarpedProduct(
        wp.base,
        wp.fiber,
        lambda x: 1.0 + coeff * np.sum(np.asarray(x, float) ** 2, axis=-1),
        f"radial-warp({n_X},{n_V},{coeff:g})",
        {"n_X": n_X, "n_V": n_V, "coeff": coeff},
    )


BUILTINS = {
    "product": product,
    "polar-plane": polar_plane,
    "polar-space": polar_space,
    "hyperbolic-as-warped": hyperbolic_as_warped,
    "radial-warp": radial_warp,
}

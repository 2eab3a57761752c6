"""Chart-based Riemannian geometry by finite differences.

Points and tangent vectors are plain float arrays in chart coordinates.  All
metric and scalar functions are vectorized: they take ``(..., n)`` arrays.
This module is the independent oracle for the closed-form warped-product and
submersion formulas elsewhere in the package.

Curvature conventions::

    R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
    R_ijkl   = g(R(d_i, d_j) d_l, d_k)
    K(u, v)  = R_ijkl u^i v^j u^k v^l / (|u|^2 |v|^2 - g(u, v)^2)

so the round unit sphere has ``R_{theta phi theta phi} = sin(theta)^2``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import fd
from .errors import (
    DegeneratePlane,
    LeftChart,
    NoConvergence,
    OutOfChart,
    OutsideDeclaredInjRadius,
    SingularMetric,
)

PD_TOL = 1e-10
GRAM_TOL = 1e-12
DEFAULT_STEP = 1e-4


@dataclass(frozen=True)
class ChartDomain:
    """A box of open coordinate intervals."""

    bounds: tuple
    description: str = ""

    def __post_init__(self):
        b = np.asarray(self.bounds, dtype=float)
        if b.ndim != 2 or b.shape[1] != 2 or b.shape[0] < 1:
            raise ValueError("bounds must be a sequence of (lower, upper) pairs")
        if not np.all(b[:, 0] < b[:, 1]):
            raise ValueError(f"empty coordinate interval in {self.bounds}")
        object.__setattr__(self, "bounds", tuple(map(tuple, b.tolist())))

    @property
    def dim(self):
        return len(self.bounds)

    @property
    def lower(self):
        return np.array([lo for lo, _ in self.bounds])

    @property
    def upper(self):
        return np.array([hi for _, hi in self.bounds])

    def contains(self, p):
        p = np.asarray(p, dtype=float)
        return np.all((p > self.lower) & (p < self.upper), axis=-1)

    def check(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape[-1] != self.dim:
            raise OutOfChart(f"point has {p.shape[-1]} coordinates, chart has {self.dim}")
        inside = self.contains(p)
        if not np.all(inside):
            bad = p[~inside] if p.ndim > 1 else p
            raise OutOfChart(f"point {np.atleast_2d(bad)[0].tolist()} outside chart {self.bounds}")
        return p

    def product(self, other, description=""):
        return ChartDomain(self.bounds + other.bounds, description)

    @staticmethod
    def box(dim, lower=-np.inf, upper=np.inf, description=""):
        return ChartDomain(tuple((lower, upper) for _ in range(dim)), description)


@dataclass(frozen=True)
class ScalarField:
    """A vectorized real function on a chart."""

    f: object
    dim: int
    name: str = ""

    def __call__(self, p):
        return np.asarray(self.f(np.asarray(p, dtype=float)), dtype=float)


@dataclass(frozen=True)
class MetricField:
    """Smooth metric tensor on a single chart.

    `g` maps ``(..., n)`` points to ``(..., n, n)`` symmetric matrices.
    `step` is the finite-difference step used for every derivative of this
    metric.  `distance` optionally supplies a closed-form distance
    ``distance(x0, x)`` overriding geodesic shooting.
    """

    g: object
    chart: ChartDomain
    name: str = ""
    step: float = DEFAULT_STEP
    distance: object = field(default=None, compare=False)

    @property
    def dim(self):
        return self.chart.dim

    def __call__(self, p):
        """Metric matrix at `p`, validated for symmetry and positivity."""
        p = self.chart.check(p)
        return validate_metric(self.g(p), self.name)

    def raw(self, p):
        return np.asarray(self.g(np.asarray(p, dtype=float)), dtype=float)

    def with_step(self, step):
        return MetricField(self.g, self.chart, self.name, step, self.distance)


def validate_metric(g, name=""):
    g = np.asarray(g, dtype=float)
    scale = max(1.0, float(np.max(np.abs(g))))
    if not np.allclose(g, np.swapaxes(g, -1, -2), rtol=0.0, atol=1e-10 * scale):
        raise SingularMetric(f"metric {name!r} is not symmetric")
    eig = np.linalg.eigvalsh(0.5 * (g + np.swapaxes(g, -1, -2)))
    if np.any(eig[..., 0] <= PD_TOL):
        raise SingularMetric(f"metric {name!r} not positive definite (min eigenvalue {eig[..., 0].min():.3e})")
    return g


def euclidean(dim, chart=None, name=None):
    chart = chart or ChartDomain.box(dim, -1e6, 1e6, "R^%d" % dim)

    def g(p):
        p = np.asarray(p)
        return np.broadcast_to(np.eye(dim), p.shape[:-1] + (dim, dim)).copy()

    def dist(x0, x):
        return np.linalg.norm(np.asarray(x, float) - np.asarray(x0, float), axis=-1)

    return MetricField(g, chart, name or f"euclidean-{dim}", distance=dist)


# -- connection and curvature ---------------------------------------------------

def _christoffel(metric, p):
    """Unvalidated, vectorized Gamma^k_ij with index order [..., k, i, j]."""
    g = metric.raw(p)
    dg = fd.derivative(metric.raw, p, metric.step)  # dg[a, b, c] = d_c g_ab
    lowered = (
        np.einsum("...jli->...lij", dg)
        + np.einsum("...ilj->...lij", dg)
        - np.einsum("...ijl->...lij", dg)
    )
    return 0.5 * np.einsum("...kl,...lij->...kij", np.linalg.inv(g), lowered)


def christoffel(metric, p):
    """Christoffel symbols ``Gamma[k, i, j]`` of the Levi-Civita connection."""
    metric(p)
    gam = _christoffel(metric, np.asarray(p, dtype=float))
    return 0.5 * (gam + np.swapaxes(gam, -1, -2))


def _riemann_up(metric, p):
    """R^l_{kij} with R(d_i, d_j) d_k = R^l_{kij} d_l, index order [..., l, k, i, j]."""
    gam = _christoffel(metric, p)
    dgam = fd.derivative(lambda q: _christoffel(metric, q), p, metric.step)  # [l, j, k, i] = d_i Gamma^l_jk
    return (
        np.einsum("...ljki->...lkij", dgam)
        - np.einsum("...likj->...lkij", dgam)
        + np.einsum("...lim,...mjk->...lkij", gam, gam)
        - np.einsum("...ljm,...mik->...lkij", gam, gam)
    )


def _riemann_low(metric, p):
    g = metric.raw(p)
    return np.einsum("...ka,...alij->...ijkl", g, _riemann_up(metric, p))


def riemann(metric, p):
    """Fully covariant curvature tensor ``R[i, j, k, l] = g(R(d_i, d_j) d_l, d_k)``."""
    metric(p)
    return _riemann_low(metric, np.asarray(p, dtype=float))


def ricci(metric, p):
    metric(p)
    rup = _riemann_up(metric, np.asarray(p, dtype=float))
    ric = np.einsum("...ilij->...jl", rup)
    return 0.5 * (ric + np.swapaxes(ric, -1, -2))


def scalar_curvature(metric, p):
    g = metric(p)
    return np.einsum("...jl,...jl->...", np.linalg.inv(g), ricci(metric, p))


def gram_determinant(g, u, v):
    uu = np.einsum("...i,...ij,...j->...", u, g, u)
    vv = np.einsum("...i,...ij,...j->...", v, g, v)
    uv = np.einsum("...i,...ij,...j->...", u, g, v)
    return uu * vv - uv**2


def sectional_from_tensor(R, g, u, v):
    """Sectional curvature of span(u, v) from a covariant curvature tensor."""
    den = gram_determinant(g, u, v)
    if np.any(den < GRAM_TOL):
        raise DegeneratePlane(f"Gram determinant {np.min(den):.3e} below {GRAM_TOL}")
    num = np.einsum("...ijkl,...i,...j,...k,...l->...", R, u, v, u, v)
    return num / den


def sectional_curvature(metric, p, u, v):
    g = metric(p)
    return sectional_from_tensor(riemann(metric, p), g, np.asarray(u, float), np.asarray(v, float))


def orthonormal_frame(g):
    """Columns form a g-orthonormal basis (Gram-Schmidt on the coordinate frame)."""
    L = np.linalg.cholesky(g)
    return np.swapaxes(np.linalg.inv(L), -1, -2)


# -- functions and vector fields ------------------------------------------------

def differential(metric, f, p):
    return fd.derivative(f, np.asarray(p, dtype=float), metric.step)


def gradient(metric, f, p):
    g = metric(p)
    return np.linalg.solve(g, differential(metric, f, p)[..., None])[..., 0]


def _hessian(metric, f, p):
    d2 = fd.second_derivative(f, p, metric.step)
    df = fd.derivative(f, p, metric.step)
    gam = _christoffel(metric, p)
    hess = d2 - np.einsum("...kij,...k->...ij", gam, df)
    return 0.5 * (hess + np.swapaxes(hess, -1, -2))


def hessian(metric, f, p):
    """Covariant Hessian matrix ``Hess f[i, j] = d_i d_j f - Gamma^k_ij d_k f``."""
    metric(p)
    return _hessian(metric, f, np.asarray(p, dtype=float))


def laplacian(metric, f, p):
    g = metric(p)
    return np.einsum("...ij,...ij->...", np.linalg.inv(g), _hessian(metric, f, np.asarray(p, float)))


def covariant_derivative(metric, field_fn, p, xi):
    """``nabla_xi Y`` at p for a vectorized vector field ``Y``."""
    p = np.asarray(p, dtype=float)
    metric(p)
    xi = np.asarray(xi, dtype=float)
    dY = fd.directional(field_fn, p, xi, metric.step)
    Y = np.asarray(field_fn(p), dtype=float)
    return dY + np.einsum("...kij,...i,...j->...k", _christoffel(metric, p), xi, Y)


def divergence(metric, field_fn, p):
    p = np.asarray(p, dtype=float)
    metric(p)
    dY = fd.derivative(field_fn, p, metric.step)  # [k, i] = d_i Y^k
    Y = np.asarray(field_fn(p), dtype=float)
    gam = _christoffel(metric, p)
    return np.einsum("...ii->...", dY) + np.einsum("...iik,...k->...", gam, Y)


def norm(g, v):
    return np.sqrt(np.einsum("...i,...ij,...j->...", v, g, v))


# -- geodesics ------------------------------------------------------------------

def _acceleration(metric, x, v):
    return -np.einsum("...kij,...i,...j->...k", _christoffel(metric, x), v, v)


def geodesic_shoot(metric, p, v, t=1.0, max_step=0.005, check_chart=True, return_velocity=False):
    """Integrate the geodesic equation from ``(p, v)`` for time ``t`` with RK4.

    The number of steps is chosen so that each step covers at most `max_step`
    of arc length.  Vectorized over leading dimensions of `p`/`v`.
    """
    x = np.array(np.broadcast_arrays(np.asarray(p, float), np.asarray(v, float))[0])
    vel = np.array(np.broadcast_to(np.asarray(v, float), x.shape))
    if check_chart:
        metric.chart.check(x)
    speed = norm(metric.raw(x), vel)
    length = float(np.max(np.abs(t) * speed)) if speed.size else 0.0
    n_steps = max(4, int(np.ceil(length / max_step)))
    dt = t / n_steps
    for _ in range(n_steps):
        k1x, k1v = vel, _acceleration(metric, x, vel)
        x2, v2 = x + 0.5 * dt * k1x, vel + 0.5 * dt * k1v
        k2x, k2v = v2, _acceleration(metric, x2, v2)
        x3, v3 = x + 0.5 * dt * k2x, vel + 0.5 * dt * k2v
        k3x, k3v = v3, _acceleration(metric, x3, v3)
        x4, v4 = x + dt * k3x, vel + dt * k3v
        k4x, k4v = v4, _acceleration(metric, x4, v4)
        x = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        vel = vel + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if check_chart and not np.all(metric.chart.contains(x)):
            raise LeftChart(f"geodesic left chart {metric.chart.bounds}")
        if not np.all(np.isfinite(x)):
            raise LeftChart("geodesic diverged")
    return (x, vel) if return_velocity else x


def _newton_shoot(metric, x0, x, v, max_iter, tol, max_step):
    n = x.shape[-1]
    ok = np.zeros(x.shape[:-1], dtype=bool)
    for _ in range(max_iter):
        end = geodesic_shoot(metric, x0, v, check_chart=False, max_step=max_step)
        err = end - x
        ok = np.linalg.norm(err, axis=-1) < tol * (1.0 + np.linalg.norm(x, axis=-1))
        if np.all(ok):
            break
        delta = 1e-7 * np.maximum(1.0, np.linalg.norm(v, axis=-1))[..., None, None]
        pert = v[..., None, :] + delta * np.eye(n)
        ends = geodesic_shoot(
            metric, np.broadcast_to(x0[..., None, :], pert.shape), pert, check_chart=False, max_step=max_step
        )
        jac = np.swapaxes((ends - end[..., None, :]) / delta, -1, -2)
        try:
            dv = np.linalg.solve(jac, -err[..., None])[..., 0]
        except np.linalg.LinAlgError:
            break
        step = np.linalg.norm(dv, axis=-1, keepdims=True)
        cap = 0.5 * np.maximum(np.linalg.norm(v, axis=-1, keepdims=True), 0.1)
        v = v + dv * np.minimum(1.0, cap / np.maximum(step, 1e-300))
    return v, ok


def _shooting_distance(metric, x0, x, max_iter=40, tol=1e-11, restarts=4, seed=0):
    x0 = np.asarray(x0, float)
    x = np.asarray(x, float)
    batch = np.broadcast_shapes(x0.shape, x.shape)
    x0 = np.broadcast_to(x0, batch)
    x = np.broadcast_to(x, batch)
    n = batch[-1]
    rng = np.random.default_rng(seed)
    v = x - x0
    scale = np.maximum(np.linalg.norm(v, axis=-1, keepdims=True), 1e-3)

    for _ in range(restarts + 1):
        # coarse RK4 steps until converged, then polish at full resolution
        v, ok = _newton_shoot(metric, x0, x, v, max_iter, 1e-8, 0.05)
        if np.all(ok):
            v, ok = _newton_shoot(metric, x0, x, v, 6, tol, 0.005)
        if np.all(ok):
            geodesic_shoot(metric, x0, v)  # must stay in chart
            return norm(metric.raw(x0), v)
        v = np.where(ok[..., None], v, (x - x0) + 0.2 * scale * rng.standard_normal(batch))
    raise NoConvergence("geodesic boundary-value shooting did not converge")


def distance(metric, x0, x, inj_radius=None):
    """Riemannian distance from `x0` to `x` (vectorized over `x`).

    Uses the metric's closed-form `distance` when present, otherwise
    multi-start boundary-value geodesic shooting.  If `inj_radius` is given,
    points farther than it raise `OutsideDeclaredInjRadius`.
    """
    if metric.distance is not None:
        d = np.asarray(metric.distance(np.asarray(x0, float), np.asarray(x, float)), float)
    else:
        d = _shooting_distance(metric, x0, x)
    if inj_radius is not None and np.any(d >= inj_radius):
        raise OutsideDeclaredInjRadius(f"distance {float(np.max(d)):.6g} >= declared radius {inj_radius}")
    return d


def distance_function(metric, x0, inj_radius=None):
    """``rho(x) = dist(x0, x)`` as a vectorized scalar field."""
    x0 = np.asarray(x0, float)
    return ScalarField(lambda x: distance(metric, x0, x, inj_radius), metric.dim, "rho")

"""Comparison functions C_b and phi_b, and numerical checks of the radial
curvature bound and the Hessian comparison inequality."""

from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from . import rng
from .errors import DomainError, OutsideDeclaredInjRadius

ZERO_B = 1e-14
TOLERANCE = 1e-3
RADIAL_STEP = 0.02


def _limit(b):
    return np.pi / (2.0 * np.sqrt(b))


def _check(b, t, allow_zero=False):
    t = np.asarray(t, float)
    lo_ok = t >= 0 if allow_zero else t > 0
    if not np.all(lo_ok):
        raise DomainError(f"t must be {'>= 0' if allow_zero else '> 0'}")
    if b > ZERO_B and not np.all(t < _limit(b)):
        raise DomainError(f"t must be < pi/(2 sqrt(b)) = {_limit(b):.6g} for b = {b:g}")
    return t


def c_b(b, t):
    """``sqrt(b) cot(sqrt(b) t)``, ``1/t`` or ``sqrt(-b) coth(sqrt(-b) t)``."""
    t = _check(b, t)
    if b > ZERO_B:
        s = np.sqrt(b)
        return s / np.tan(s * t)
    if b < -ZERO_B:
        s = np.sqrt(-b)
        return s / np.tanh(s * t)
    return 1.0 / t


def phi_b(b, t):
    t = _check(b, t, allow_zero=True)
    if b > ZERO_B:
        return 1.0 - np.cos(np.sqrt(b) * t)
    if b < -ZERO_B:
        return np.cosh(np.sqrt(-b) * t)
    return t**2


def phi_b_prime(b, t):
    t = _check(b, t, allow_zero=True)
    if b > ZERO_B:
        s = np.sqrt(b)
        return s * np.sin(s * t)
    if b < -ZERO_B:
        s = np.sqrt(-b)
        return s * np.sinh(s * t)
    return 2.0 * t


def phi_b_second(b, t):
    t = _check(b, t, allow_zero=True)
    if b > ZERO_B:
        return b * np.cos(np.sqrt(b) * t)
    if b < -ZERO_B:
        return -b * np.cosh(np.sqrt(-b) * t)
    return np.full_like(t, 2.0)


def ode_residual(b, t):
    """``phi_b'' - phi_b' C_b`` from closed-form derivatives."""
    return phi_b_second(b, t) - phi_b_prime(b, t) * c_b(b, t)


@dataclass(frozen=True)
class ComparisonConfig:
    b: float
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError("r must be positive")
        if self.b > ZERO_B and not self.r < _limit(self.b) - 1e-12:
            raise DomainError(f"r = {self.r:g} must be < pi/(2 sqrt(b)) = {_limit(self.b):.6g}")


@dataclass
class CheckReport:
    name: str
    passed: bool
    value: float
    bound: float
    tolerance: float
    samples: int
    witness: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)


def radial_samples(metric, x0, r, samples, seed=0, t_min_frac=0.05, name="radial"):
    """Points of the geodesic ball by the exponential map.

    Returns ``(points, unit radial velocities, radii)``.  Radii cover
    ``[t_min_frac * r, r]``; directions are g-unit at `x0`.
    """
    x0 = np.asarray(x0, float)
    n = metric.dim
    u = rng.sobol(n + 1, samples, seed, name)
    if n == 1:
        dirs = np.where(u[:, 1:] < 0.5, -1.0, 1.0)
    else:
        dirs = rng.unit_vectors(u[:, 1:])
    frame = geo.orthonormal_frame(metric(x0))
    v0 = dirs @ frame.T
    t = r * (t_min_frac + (1.0 - t_min_frac) * u[:, 0])
    pts, vel = geo.geodesic_shoot(metric, np.broadcast_to(x0, v0.shape), v0 * t[:, None], max_step=RADIAL_STEP,
                                  return_velocity=True)
    return pts, vel / t[:, None], t


def orthogonal_complement(g, v):
    """g-orthonormal basis (columns) of the g-orthogonal complement of unit `v`."""
    n = g.shape[-1]
    gv = np.einsum("...ij,...j->...i", g, v)
    proj = np.eye(n) - v[..., :, None] * gv[..., None, :]
    gram = np.einsum("...ai,...ab,...bj->...ij", proj, g, proj)
    w, q = np.linalg.eigh(gram)
    cols = np.einsum("...ai,...ij->...aj", proj, q[..., :, 1:])
    return cols / np.sqrt(w[..., None, 1:])


def radial_jacobi_matrix(metric, pts, vel):
    """Matrices ``R(e_a, v, e_b, v)`` over an orthonormal basis of ``v^perp``."""
    g = metric(pts)
    E = orthogonal_complement(g, vel)
    R = geo.riemann(metric, pts)
    return np.einsum("...ijkl,...ia,...j,...kb,...l->...ab", R, E, vel, E, vel), E


def _check_inj(r, inj_radius):
    if inj_radius is not None and not r < inj_radius:
        raise OutsideDeclaredInjRadius(f"r = {r:g} not below declared injectivity radius {inj_radius:g}")


def radial_bound_check(metric, x0, r, b, samples=64, inj_radius=None, seed=0, tolerance=TOLERANCE):
    """Max radial sectional curvature over the ball against `b`."""
    _check_inj(r, inj_radius)
    pts, vel, t = radial_samples(metric, x0, r, samples, seed, name="radial-bound")
    jac, _ = radial_jacobi_matrix(metric, pts, vel)
    kmax = np.linalg.eigvalsh(jac)[..., -1]
    i = int(np.argmax(kmax))
    return CheckReport(
        "radial-curvature",
        bool(kmax[i] <= b + tolerance),
        float(kmax[i]),
        float(b),
        tolerance,
        samples,
        pts[i].tolist(),
        {"radius": float(t[i])},
    )


def hessian_comparison_check(metric, x0, r, b, samples=64, inj_radius=None, seed=0, tolerance=TOLERANCE):
    """``Hess rho(X, X) - C_b(rho)|X|^2`` on unit X orthogonal to grad rho.

    `value` is the minimal slack over samples and orthogonal directions; the
    extra field ``radial_max`` is ``max |Hess rho(grad rho, grad rho)|``.
    """
    _check_inj(r, inj_radius)
    ComparisonConfig(b, r)
    pts, vel, t = radial_samples(metric, x0, r, samples, seed, name="hessian-comparison")
    hmetric = metric if metric.distance is not None else metric.with_step(1e-3)
    rho = geo.distance_function(hmetric, x0)
    H = geo.hessian(hmetric, rho, pts)
    E = orthogonal_complement(metric(pts), vel)
    HE = np.einsum("...ia,...ij,...jb->...ab", E, H, E)
    slack = np.linalg.eigvalsh(HE)[..., 0] - c_b(b, t)
    radial = np.abs(np.einsum("...i,...ij,...j->...", vel, H, vel))
    i = int(np.argmin(slack))
    return CheckReport(
        "hessian-comparison",
        bool(slack[i] >= -tolerance and radial.max() < tolerance),
        float(slack[i]),
        0.0,
        tolerance,
        samples,
        pts[i].tolist(),
        {"radial_max": float(radial.max()), "radius": float(t[i]), "max_slack": float(slack.max())},
    )

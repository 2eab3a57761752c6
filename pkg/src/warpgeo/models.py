"""Model metrics with known curvature, used by builtins and tests."""

import numpy as np

from .geometry import ChartDomain, MetricField, euclidean

__all__ = [
    "euclidean",
    "round_sphere",
    "round_three_sphere",
    "hyperbolic_half_plane",
    "rotational",
    "diagonal_metric",
]

EPS = 0.05


def diagonal_metric(entries_fn, chart, name, **kw):
    """Metric from a function returning the diagonal entries ``(..., n)``."""

    def g(p):
        d = np.asarray(entries_fn(np.asarray(p, float)), float)
        return d[..., :, None] * np.eye(d.shape[-1])

    return MetricField(g, chart, name, **kw)


def _sphere_angle(x0, x):
    """Great-circle angle between points in (theta, phi) coordinates."""
    t0, p0 = x0[..., 0], x0[..., 1]
    t1, p1 = x[..., 0], x[..., 1]
    c = np.sin(t0) * np.sin(t1) * np.cos(p1 - p0) + np.cos(t0) * np.cos(t1)
    return np.arccos(np.clip(c, -1.0, 1.0))


def round_sphere(radius=1.0, margin=EPS, phi_extent=np.pi):
    """2-sphere of the given radius in polar coordinates (theta, phi); K = 1/radius^2.

    `phi_extent` > pi lets phi run over a covering interval.
    """
    chart = ChartDomain(((margin, np.pi - margin), (-phi_extent, phi_extent)), "polar chart of S^2")
    a2 = radius**2
    return diagonal_metric(
        lambda p: np.stack([np.full(p.shape[:-1], a2), a2 * np.sin(p[..., 0]) ** 2], axis=-1),
        chart,
        f"sphere(r={radius:g})",
        distance=lambda x0, x: radius * _sphere_angle(x0, x),
    )


def round_three_sphere(radius=1.0, margin=EPS):
    """3-sphere in hyperspherical coordinates (chi, theta, phi); K = 1/radius^2."""
    chart = ChartDomain(
        ((margin, np.pi - margin), (margin, np.pi - margin), (-np.pi, np.pi)), "hyperspherical chart of S^3"
    )
    a2 = radius**2

    def entries(p):
        s1 = np.sin(p[..., 0]) ** 2
        return np.stack([np.full(p.shape[:-1], a2), a2 * s1, a2 * s1 * np.sin(p[..., 1]) ** 2], axis=-1)

    return diagonal_metric(entries, chart, f"sphere3(r={radius:g})")


def hyperbolic_half_plane(curvature=-1.0, xmax=50.0, ymax=50.0):
    """Half-plane metric ``(dx^2 + dy^2) / (c y^2)`` with constant curvature ``-c``."""
    c = -curvature
    if c <= 0:
        raise ValueError("curvature must be negative")
    chart = ChartDomain(((-xmax, xmax), (1.0 / ymax, ymax)), "upper half-plane")

    def dist(x0, x):
        dx = x[..., 0] - x0[..., 0]
        y0, y1 = x0[..., 1], x[..., 1]
        arg = 1.0 + (dx**2 + (y1 - y0) ** 2) / (2.0 * y0 * y1)
        return np.arccosh(np.maximum(arg, 1.0)) / np.sqrt(c)

    return diagonal_metric(
        lambda p: np.repeat((1.0 / (c * p[..., 1] ** 2))[..., None], 2, axis=-1),
        chart,
        f"half-plane(K={curvature:g})",
        distance=dist,
    )


def rotational(profile, rmin=0.05, rmax=20.0, name="rotational"):
    """Geodesic polar metric ``d rho^2 + profile(rho)^2 d theta^2``.

    The distance to the (excluded) pole is the radial coordinate itself; the
    closed-form `distance` is only exact when the base point is the pole,
    signalled by passing ``x0 = None``-like arrays with rho = 0.
    """
    chart = ChartDomain(((rmin, rmax), (-np.pi, np.pi)), "geodesic polar chart")

    def dist(x0, x):
        x0 = np.asarray(x0, float)
        if not np.allclose(x0[..., 0], 0.0):
            raise ValueError("closed-form distance only available from the pole")
        return np.asarray(x, float)[..., 0]

    return diagonal_metric(
        lambda p: np.stack([np.ones(p.shape[:-1]), profile(p[..., 0]) ** 2], axis=-1),
        chart,
        name,
        distance=dist,
    )

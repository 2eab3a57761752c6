"""Registries of named ambient spaces and immersions.

Ambients are built from ``{"builtin": name, "params": {...}}`` or from a
custom spec with expression strings; immersions likewise, receiving the
constructed ambient.  Immersions that parametrize compact manifolds carry
``params["compact"] = True``.
"""

import numpy as np

from . import geometry as geo
from .errors import DimensionError, KindMismatch, ScenarioError
from .expr import compile_expression
from .geometry import ChartDomain, MetricField
from .immersion import Immersion
from .submersion import RiemannianSubmersion, hopf_chart
from .warped import BUILTINS as WARPED_BUILTINS
from .warped import WarpedProduct

SPHERE_MARGIN = 0.05


# -- ambients -------------------------------------------------------------------------

def euclidean_space(dim=3, extent=50.0):
    return geo.euclidean(dim, ChartDomain.box(dim, -extent, extent, f"R^{dim}"))


def custom_warped(base_dim, fiber_dim, psi, extent=50.0):
    """Euclidean factors with warping function given as an expression in ``x1..xn``."""
    names = [f"x{i + 1}" for i in range(base_dim)]
    fn = compile_expression(psi, names)
    base = euclidean_space(base_dim, extent)
    fiber = euclidean_space(fiber_dim, extent)
    return WarpedProduct(base, fiber, fn, f"custom-warped({psi})", {"n_X": base_dim, "n_V": fiber_dim, "psi": psi})


def custom_metric(coordinates, chart, components):
    """Metric from a matrix of expressions in the named coordinates."""
    n = len(coordinates)
    if len(chart) != n or len(components) != n or any(len(row) != n for row in components):
        raise DimensionError("custom metric: chart and components must match the coordinate count")
    fns = [[compile_expression(c, coordinates) for c in row] for row in components]

    def g(p):
        p = np.asarray(p, float)
        out = np.stack([np.stack([f(p) for f in row], -1) for row in fns], -2)
        return 0.5 * (out + np.swapaxes(out, -1, -2))

    return MetricField(g, ChartDomain(tuple(map(tuple, chart)), "custom chart"), "custom metric")


AMBIENTS = {
    **WARPED_BUILTINS,
    "euclidean": euclidean_space,
    "hopf-chart": hopf_chart,
}


def build_ambient(spec):
    if "builtin" in spec:
        name = spec["builtin"]
        if name not in AMBIENTS:
            raise ScenarioError(f"unknown ambient {name!r}; available: {sorted(AMBIENTS)}")
        return AMBIENTS[name](**spec.get("params", {}))
    if "warped" in spec:
        return custom_warped(**spec["warped"])
    if "metric" in spec:
        return custom_metric(**spec["metric"])
    raise ScenarioError("ambient spec needs one of 'builtin', 'warped', 'metric'")


def ambient_dim(ambient):
    return ambient.dim


# -- immersions ------------------------------------------------------------------------

def _slots(ambient, m, vertical):
    """Ambient coordinate slots receiving the m+1 sphere coordinates."""
    n = ambient_dim(ambient)
    if m + 1 > n:
        raise DimensionError(f"a sphere of dimension {m} does not fit in dimension {n}")
    if vertical and isinstance(ambient, WarpedProduct):
        order = [ambient.n_X] + [i for i in range(n) if i != ambient.n_X]
    else:
        order = list(range(n))
    return order[: m + 1]


def _sphere_coords(t, radius):
    """Hyperspherical embedding ``(..., m) -> (..., m + 1)``."""
    m = t.shape[-1]
    out = []
    prod = np.full(t.shape[:-1], float(radius))
    for k in range(m):
        out.append(prod * np.cos(t[..., k]))
        prod = prod * np.sin(t[..., k])
    out.append(prod)
    return np.stack(out, -1)


def sphere(ambient, radius=1.0, m=None, center=None, vertical=True, margin=SPHERE_MARGIN):
    """Round m-sphere (default: a hypersphere) in angular coordinates.

    In a warped product with `vertical` the first sphere coordinate goes to
    the first fiber coordinate and the rest to the base.
    """
    n = ambient_dim(ambient)
    m = n - 1 if m is None else int(m)
    slots = _slots(ambient, m, vertical)
    c = np.zeros(n) if center is None else np.asarray(center, float)
    bounds = [(margin, np.pi - margin)] * (m - 1) + [(-np.pi + margin, np.pi - margin)]
    chart = ChartDomain(tuple(bounds), f"S^{m} angles")

    def fmap(t):
        t = np.asarray(t, float)
        y = _sphere_coords(t, radius)
        out = np.broadcast_to(c, t.shape[:-1] + (n,)).copy()
        out[..., slots] += y
        return out

    return Immersion(chart, ambient, fmap, f"S^{m}({radius:g})",
                     params={"compact": True, "radius": radius, "m": m})


def circle(ambient, radius=1.0, center=None, vertical=True):
    return sphere(ambient, radius, 1, center, vertical)


def hopf_torus(ambient, eps=0.3):
    """Preimage of the base circle at distance `eps` from ``(pi/2, 0)`` under the Hopf map.

    Chart ``(s, t)``: s runs along the base circle, t along the fiber.
    """
    if not isinstance(ambient, RiemannianSubmersion) or ambient.name != "hopf-chart":
        raise KindMismatch("hopf-torus needs the 'hopf-chart' ambient")
    chart = ChartDomain(((-np.pi, np.pi), (-np.pi, np.pi)), "Hopf torus")
    c2, s2 = np.cos(2 * eps), np.sin(2 * eps)

    def fmap(p):
        p = np.asarray(p, float)
        s, t = p[..., 0], p[..., 1]
        n1, n2, n3 = c2 * np.ones_like(s), s2 * np.cos(s), s2 * np.sin(s)
        theta = np.arccos(np.clip(n3, -1, 1))
        phi = np.arctan2(n2, n1)
        return np.stack([theta / 2, phi / 2 + t, -phi / 2 + t], -1)

    return Immersion(chart, ambient, fmap, f"Hopf torus({eps:g})", params={"compact": True, "eps": eps})


def fiber_circle(ambient, x0=1.5):
    """The fiber ``{x0} x S^1`` of a warped product over an interval."""
    if not isinstance(ambient, WarpedProduct) or ambient.n_X != 1 or ambient.n_V != 1:
        raise KindMismatch("fiber-circle needs a warped product with one-dimensional factors")
    chart = ChartDomain(((-np.pi, np.pi),), "fiber circle")

    def fmap(t):
        t = np.asarray(t, float)
        return np.stack([np.full(t.shape[:-1], float(x0)), t[..., 0]], -1)

    return Immersion(chart, ambient, fmap, f"fiber circle({x0:g})", params={"compact": True, "x0": x0})


def flat_disc(ambient, radius=0.5, height=0.0, inner=0.01):
    """Open disc of the first two base coordinates at fixed height, polar chart."""
    n = ambient_dim(ambient)
    if n < 3:
        raise DimensionError("flat-disc needs an ambient of dimension >= 3")
    chart = ChartDomain(((inner, radius), (-np.pi, np.pi)), "disc")

    def fmap(p):
        p = np.asarray(p, float)
        out = np.zeros(p.shape[:-1] + (n,))
        out[..., 0] = p[..., 0] * np.cos(p[..., 1])
        out[..., 1] = p[..., 0] * np.sin(p[..., 1])
        out[..., n - 1] = height
        return out

    return Immersion(chart, ambient, fmap, f"disc({radius:g})", params={"compact": False, "radius": radius})


def cylinder(ambient, radius=1.0, extent=5.0):
    """``S^1(radius) x R`` with the circle in the base and the line along the fiber."""
    if not isinstance(ambient, WarpedProduct) or ambient.n_X < 2:
        raise KindMismatch("cylinder needs a warped product with base dimension >= 2")
    n, n_X = ambient.dim, ambient.n_X
    chart = ChartDomain(((-np.pi, np.pi), (-extent, extent)), "cylinder")

    def fmap(p):
        p = np.asarray(p, float)
        out = np.zeros(p.shape[:-1] + (n,))
        out[..., 0] = radius * np.cos(p[..., 0])
        out[..., 1] = radius * np.sin(p[..., 0])
        out[..., n_X] = p[..., 1]
        return out

    return Immersion(chart, ambient, fmap, f"cylinder({radius:g})", params={"compact": False, "radius": radius})


def graph(ambient, f="0", extent=1.0):
    """Graph ``(u, v, f(u, v))`` over a square, in a 3-dimensional ambient."""
    if ambient_dim(ambient) != 3:
        raise DimensionError("graph needs a 3-dimensional ambient")
    fn = compile_expression(f, ["u", "v"])
    chart = ChartDomain(((-extent, extent), (-extent, extent)), "graph square")

    def fmap(p):
        p = np.asarray(p, float)
        return np.concatenate([p, fn(p)[..., None]], -1)

    return Immersion(chart, ambient, fmap, f"graph({f})", params={"compact": False, "f": f})


def custom_immersion(ambient, variables, chart, map, compact=False):
    """Immersion from expression strings, one per ambient coordinate."""
    if len(map) != ambient_dim(ambient):
        raise DimensionError(f"map has {len(map)} components, ambient has dimension {ambient_dim(ambient)}")
    if len(chart) != len(variables):
        raise DimensionError("chart bounds must match the variables")
    fns = [compile_expression(c, variables) for c in map]

    def fmap(p):
        p = np.asarray(p, float)
        return np.stack([fn(p) for fn in fns], -1)

    return Immersion(ChartDomain(tuple(map_bounds(chart)), "custom chart"), ambient, fmap, "custom immersion",
                     params={"compact": bool(compact)})


def map_bounds(chart):
    return [tuple(float(v) for v in b) for b in chart]


IMMERSIONS = {
    "sphere": sphere,
    "circle": circle,
    "hopf-torus": hopf_torus,
    "fiber-circle": fiber_circle,
    "flat-disc": flat_disc,
    "cylinder": cylinder,
    "graph": graph,
}


def build_immersion(spec, ambient):
    if "builtin" in spec:
        name = spec["builtin"]
        if name not in IMMERSIONS:
            raise ScenarioError(f"unknown immersion {name!r}; available: {sorted(IMMERSIONS)}")
        return IMMERSIONS[name](ambient, **spec.get("params", {}))
    if "custom" in spec:
        return custom_immersion(ambient, **spec["custom"])
    raise ScenarioError("immersion spec needs 'builtin' or 'custom'")

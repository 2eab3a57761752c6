"""Sampled extrema of fields over regions, and curvature extrema over 2-planes."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import geometry as geo
from . import rng
from .errors import EmptyRegion, WarpGeoError


@dataclass
class Extremum:
    value: float
    witness: list
    samples: int
    mode: str


def estimate_extremum(fn, points, mode="sup", chart=None, refine=2, maxiter=40, inside=None):
    """Sup or inf of a vectorized `fn` over sample `points`.

    The best `refine` samples are polished by bounded Nelder-Mead inside
    `chart` (when given), optionally restricted by the predicate `inside`; a
    refinement is kept only if it improves the value.
    """
    points = np.atleast_2d(np.asarray(points, float))
    if points.shape[0] == 0:
        raise EmptyRegion("no sample points")
    sign = 1.0 if mode == "sup" else -1.0
    vals = sign * np.asarray(fn(points), float)
    order = np.argsort(-vals)
    best_val, best_pt = float(vals[order[0]]), points[order[0]]
    if chart is not None and refine:
        bounds = list(zip(chart.lower, chart.upper))

        def obj(z):
            if not chart.contains(z) or (inside is not None and not inside(z)):
                return np.inf
            try:
                return -sign * float(np.asarray(fn(z[None]), float)[0])
            except WarpGeoError:
                return np.inf

        for i in order[:refine]:
            res = minimize(obj, points[i], method="Nelder-Mead", bounds=bounds,
                           options={"maxfev": maxiter, "xatol": 1e-8, "fatol": 1e-12})
            if np.isfinite(res.fun) and -res.fun > best_val:
                best_val, best_pt = float(-res.fun), res.x
    return Extremum(sign * best_val, np.asarray(best_pt).tolist(), len(points), mode)


def orthonormal_curvature(metric, pts):
    """Curvature tensors in a g-orthonormal frame, shape ``(..., n, n, n, n)``."""
    R = geo.riemann(metric, pts)
    E = geo.orthonormal_frame(metric(pts))
    return np.einsum("...ijkl,...ia,...jb,...kc,...ld->...abcd", R, E, E, E, E)


def sectional_range(R_on, planes=200, seed=0):
    """``(min K, max K)`` over 2-planes for orthonormal-frame curvature tensors.

    Exact for dimensions 2 and 3 (via the Ricci tensor in dimension 3),
    quasi-random plane sampling plus local refinement otherwise.
    """
    R_on = np.asarray(R_on, float)
    n = R_on.shape[-1]
    if n < 2:
        raise ValueError("sectional curvature needs dimension >= 2")
    if n == 2:
        k = R_on[..., 0, 1, 0, 1]
        return k, k
    ric = np.einsum("...ijil->...jl", R_on)
    if n == 3:
        s = np.einsum("...ii->...", ric)
        lam = np.linalg.eigvalsh(ric)
        return s / 2 - lam[..., -1], s / 2 - lam[..., 0]
    flat = R_on.reshape((-1,) + R_on.shape[-4:])
    u = rng.unit_vectors(rng.sobol(2 * n, planes, seed, "planes"))
    U, W = u[:, :n], u[:, n:]
    den = np.sum(U * U, -1) * np.sum(W * W, -1) - np.sum(U * W, -1) ** 2
    lo, hi = [], []
    for R in flat:
        k = np.einsum("abcd,sa,sb,sc,sd->s", R, U, W, U, W) / den

        def kf(z, R=R):
            a, b = z[:n], z[n:]
            return np.einsum("abcd,a,b,c,d->", R, a, b, a, b) / (a @ a * (b @ b) - (a @ b) ** 2)

        i, j = int(np.argmin(k)), int(np.argmax(k))
        lo.append(min(k[i], minimize(kf, np.concatenate([U[i], W[i]]), method="BFGS").fun))
        hi.append(max(k[j], -minimize(lambda z: -kf(z), np.concatenate([U[j], W[j]]), method="BFGS").fun))
    shape = R_on.shape[:-4]
    return np.array(lo).reshape(shape), np.array(hi).reshape(shape)


def sectional_extremum_field(metric, mode):
    """Vectorized field ``p -> max K (mode 'sup') or min K (mode 'inf')`` over planes at p."""

    def fn(pts):
        lo, hi = sectional_range(orthonormal_curvature(metric, pts))
        return hi if mode == "sup" else lo

    return fn


def immersed_sectional_field(imm, mode):
    """Like `sectional_extremum_field` for the induced metric, with the curvature from the Gauss equation."""
    from .immersion import gauss_curvature_tensor

    def fn(pts):
        R = gauss_curvature_tensor(imm, pts)
        E = geo.orthonormal_frame(imm.induced_metric_field(pts))
        R_on = np.einsum("...ijkl,...ia,...jb,...kc,...ld->...abcd", R, E, E, E, E)
        lo, hi = sectional_range(R_on)
        return hi if mode == "sup" else lo

    return fn

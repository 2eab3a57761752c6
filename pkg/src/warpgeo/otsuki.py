"""Symmetric bilinear forms ``beta: V x V -> W`` and the search for a pair
``v1, v2`` with ``beta(v1, v1) = beta(v2, v2)`` and ``beta(v1, v2) = 0``.

The pair search runs a batched damped Gauss-Newton iteration with least-norm
steps from many seeded starts, falling back to Nelder-Mead on the best starts
when no start converges.  Answers are re-checked by direct substitution.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import rng
from .errors import DimensionError, SearchFailed

RESIDUAL_TOL = 1e-12
ANGLE_TOL = 1e-3
DEFINITE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class SymmetricBilinearForm:
    """Components ``coeffs[k]`` (symmetric ``n1 x n1``), inner products `gV`, `gW`."""

    coeffs: np.ndarray
    gV: np.ndarray = None
    gW: np.ndarray = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, float)
        if c.ndim == 2:
            c = c[None]
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise DimensionError("coefficients must be a list of square matrices")
        if not np.allclose(c, np.swapaxes(c, 1, 2), atol=1e-12):
            raise DimensionError("component matrices must be symmetric")
        object.__setattr__(self, "coeffs", c)
        n1, n2 = c.shape[1], c.shape[0]
        object.__setattr__(self, "gV", np.eye(n1) if self.gV is None else np.asarray(self.gV, float))
        object.__setattr__(self, "gW", np.eye(n2) if self.gW is None else np.asarray(self.gW, float))
        for name, g in (("gV", self.gV), ("gW", self.gW)):
            if np.linalg.eigvalsh(g)[0] <= 0:
                raise DimensionError(f"{name} must be positive definite")

    @property
    def n1(self):
        return self.coeffs.shape[1]

    @property
    def n2(self):
        return self.coeffs.shape[0]

    def __call__(self, v, w):
        return np.einsum("kij,...i,...j->...k", self.coeffs, np.asarray(v, float), np.asarray(w, float))

    def norm_V(self, v):
        return np.sqrt(np.einsum("...i,ij,...j->...", v, self.gV, v))

    def norm_W(self, w):
        return np.sqrt(np.einsum("...i,ij,...j->...", w, self.gW, w))

    def whitened(self):
        """Equivalent form in orthonormal coordinates of V and W, plus the V change of basis."""
        LV = np.linalg.cholesky(self.gV)
        LW = np.linalg.cholesky(self.gW)
        inv = np.linalg.inv(LV)
        B = np.einsum("ai,kab,bj->kij", inv.T, self.coeffs, inv.T)
        B = np.einsum("lk,kij->lij", LW.T, B)
        return B, inv.T

    def to_dict(self):
        return {"coeffs": self.coeffs.tolist(), "gV": self.gV.tolist(), "gW": self.gW.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["coeffs"], float), d.get("gV"), d.get("gW"))


@dataclass
class DefinitenessResult:
    definite: bool
    minimum: float
    witness: list


@dataclass
class OtsukiPair:
    v1: np.ndarray
    v2: np.ndarray
    residual: float
    angle: float
    restart: int


def definiteness_check(form, starts=32, seed=0, threshold=DEFINITE_TOL):
    """Minimize ``|beta(v, v)|_W`` over the unit sphere of V."""
    B, to_v = form.whitened()
    n = form.n1
    if n == 1:
        m = float(np.linalg.norm(B[:, 0, 0]))
        return DefinitenessResult(m > threshold, m, to_v[:, 0].tolist())

    def obj(u):
        w = u / np.linalg.norm(u)
        val = np.einsum("kij,i,j->k", B, w, w)
        return val @ val

    def grad(u):
        nu = np.linalg.norm(u)
        w = u / nu
        val = np.einsum("kij,i,j->k", B, w, w)
        gw = 4.0 * np.einsum("k,kij,j->i", val, B, w)
        return (gw - (gw @ w) * w) / nu

    gen = rng.stream(seed, "definiteness")
    best = (np.inf, None)
    for u0 in gen.standard_normal((starts, n)):
        res = minimize(obj, u0, jac=grad, method="BFGS", options={"gtol": 1e-14, "maxiter": 200})
        if res.fun < best[0]:
            best = (res.fun, res.x / np.linalg.norm(res.x))
    m = float(np.sqrt(max(best[0], 0.0)))
    v = to_v @ best[1]
    return DefinitenessResult(m > threshold, m, (v / form.norm_V(v)).tolist())


def _residuals(B, x):
    n = B.shape[1]
    v1, v2 = x[..., :n], x[..., n:]
    b11 = np.einsum("kij,...i,...j->...k", B, v1, v1)
    b22 = np.einsum("kij,...i,...j->...k", B, v2, v2)
    b12 = np.einsum("kij,...i,...j->...k", B, v1, v2)
    nrm = np.sum(v1 * v1, -1, keepdims=True) - 1.0
    return np.concatenate([b11 - b22, b12, nrm], -1)


def _jacobian(B, x):
    n = B.shape[1]
    v1, v2 = x[..., :n], x[..., n:]
    Bv1 = np.einsum("kij,...j->...ki", B, v1)
    Bv2 = np.einsum("kij,...j->...ki", B, v2)
    top = np.concatenate([2 * Bv1, -2 * Bv2], -1)
    mid = np.concatenate([Bv2, Bv1], -1)
    last = np.concatenate([2 * v1, np.zeros_like(v2)], -1)[..., None, :]
    return np.concatenate([top, mid, last], -2)


def _gauss_newton(B, x, iters=60):
    for _ in range(iters):
        r = _residuals(B, x)
        if np.count_nonzero(np.sum(r * r, -1) < 1e-30) >= 4:
            break
        J = _jacobian(B, x)
        # least-norm step via the pseudo-inverse of the (underdetermined) Jacobian
        step = -np.einsum("...ij,...j->...i", np.linalg.pinv(J, rcond=1e-12), r)
        size = np.linalg.norm(step, axis=-1, keepdims=True)
        x = x + step * np.minimum(1.0, 0.5 / np.maximum(size, 1e-300))
    return x


def _angle(u, w):
    c = abs(u @ w) / (np.linalg.norm(u) * np.linalg.norm(w))
    return float(np.arccos(np.clip(c, 0.0, 1.0)))


def pair_residual(form, v1, v2):
    """``|beta(v1,v1) - beta(v2,v2)|^2 + |beta(v1,v2)|^2`` in the W norm."""
    d = form(v1, v1) - form(v2, v2)
    c = form(v1, v2)
    return float(form.norm_W(d) ** 2 + form.norm_W(c) ** 2)


def find_otsuki_pair(form, starts=64, seed=0, tol=RESIDUAL_TOL):
    """Linearly independent ``v1, v2`` with equal diagonal values and zero cross term."""
    if form.n2 >= form.n1:
        raise DimensionError(f"need dim W < dim V, got {form.n2} >= {form.n1}")
    B, to_v = form.whitened()
    n = form.n1
    gen = rng.stream(seed, "otsuki")
    x0 = gen.standard_normal((starts, 2 * n))
    x0[:, :n] /= np.linalg.norm(x0[:, :n], axis=-1, keepdims=True)
    x = _gauss_newton(B, x0)
    cand = _select(form, B, to_v, x, tol)
    if cand is None:
        order = np.argsort(np.sum(_residuals(B, x) ** 2, -1))[:8]
        refined = []
        for i in order:
            res = minimize(
                lambda y: float(np.sum(_residuals(B, y) ** 2)), x0[i], method="Nelder-Mead",
                options={"maxiter": 2000, "xatol": 1e-10, "fatol": 1e-20},
            )
            refined.append(res.x)
        x = _gauss_newton(B, np.array(refined))
        cand = _select(form, B, to_v, x, tol, index=order)
    if cand is None:
        raise SearchFailed(f"no independent pair with residual < {tol:g} after {starts} starts")
    return cand


def _select(form, B, to_v, x, tol, index=None):
    n = B.shape[1]
    best = None
    for i, xi in enumerate(x):
        if not np.all(np.isfinite(xi)):
            continue
        v1, v2 = to_v @ xi[:n], to_v @ xi[n:]
        ang = _angle(xi[:n], xi[n:])
        if ang < ANGLE_TOL:
            continue
        if form.norm_V(v1) < form.norm_V(v2):
            v1, v2 = v2, v1
        res = pair_residual(form, v1, v2)
        if res < tol and (best is None or res < best.residual):
            best = OtsukiPair(v1, v2, res, ang, int(i if index is None else index[i]))
    return best


def random_definite_form(n1, n2, seed=0, max_tries=100):
    """Random form whose first component is positive definite, hence definite."""
    gen = rng.stream(seed, f"random-form/{n1}/{n2}")
    for _ in range(max_tries):
        mats = gen.standard_normal((n2, n1, n1))
        mats = 0.5 * (mats + np.swapaxes(mats, 1, 2))
        a = gen.standard_normal((n1, n1))
        mats[0] = a @ a.T + 0.5 * np.eye(n1)
        form = SymmetricBilinearForm(mats)
        if definiteness_check(form, starts=8, seed=seed).definite:
            return form
    raise SearchFailed("could not sample a definite form")


def umbilical_form(n1, normal=None, scale=1.0):
    """``beta(v, w) = scale <v, w> nu``."""
    nu = np.array([1.0]) if normal is None else np.asarray(normal, float)
    return SymmetricBilinearForm(scale * nu[:, None, None] * np.eye(n1)[None])

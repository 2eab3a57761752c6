"""Finite-difference derivatives of vectorized functions.

Every function differentiated here must accept points with arbitrary leading
batch dimensions, i.e. map an array of shape ``(..., n)`` to ``(..., *s)``.
All stencil points of one derivative are evaluated in a single call.
"""

import numpy as np

# fourth-order central stencil: f'(x) ~ [f(x-2h) - 8f(x-h) + 8f(x+h) - f(x+2h)] / 12h
_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0


def derivative(fun, x, h=1e-4):
    """Jacobian of `fun` at `x`.

    Returns an array of shape ``(..., *s, n)`` whose last axis indexes the
    coordinate being differentiated.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    lead = x.ndim - 1
    offsets = _OFFSETS[:, None, None] * np.eye(n)[None, :, :] * h  # (4, n, n)
    pts = x[..., None, None, :] + offsets  # (..., 4, n, n)
    vals = np.asarray(fun(pts), dtype=float)  # (..., 4, n, *s)
    vals = np.moveaxis(vals, lead, -1)  # (..., n, *s, 4)
    d = vals @ _WEIGHTS / h  # (..., n, *s)
    return np.moveaxis(d, lead, -1)


def second_derivative(fun, x, h=1e-4):
    """Nested central differences: shape ``(..., *s, n, n)``, symmetrized."""
    d2 = derivative(lambda y: derivative(fun, y, h), x, h)
    return 0.5 * (d2 + np.swapaxes(d2, -1, -2))


def directional(fun, x, direction, h=1e-4):
    """Derivative of `fun` at `x` along `direction` (single 1-D stencil)."""
    x = np.asarray(x, dtype=float)
    direction = np.asarray(direction, dtype=float)
    pts = x[..., None, :] + _OFFSETS[:, None] * h * direction[..., None, :]
    vals = np.asarray(fun(pts), dtype=float)
    lead = x.ndim - 1
    vals = np.moveaxis(vals, lead, -1)
    return vals @ _WEIGHTS / h

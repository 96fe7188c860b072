"""Adaptive Gauss-Legendre product quadrature on rectangles."""
from __future__ import annotations

from functools import lru_cache

import numpy as np


class QuadratureError(RuntimeError):
    pass


@lru_cache(maxsize=32)
def _nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _product_rule(fn, a, b, c, d, order) -> float:
    x, wx = _nodes(order)
    u = 0.5 * (b - a) * x + 0.5 * (b + a)
    v = 0.5 * (d - c) * x + 0.5 * (d + c)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    vals = fn(uu, vv)
    return float(0.25 * (b - a) * (d - c) * np.einsum("i,j,ij->", wx, wx, vals))


def integrate_2d(fn, a: float, b: float, c: float, d: float,
                 rtol: float = 1e-8, max_order: int = 1024) -> float:
    """Integrate fn(u, v) over [a, b] x [c, d] to relative tolerance.

    fn must accept broadcast ndarrays. Doubles the per-axis order until two
    successive estimates agree to rtol (absolute floor 1e-300 guards zero
    integrals).
    """
    if b <= a or d <= c:
        return 0.0
    order = 16
    prev = _product_rule(fn, a, b, c, d, order)
    while order < max_order:
        order *= 2
        cur = _product_rule(fn, a, b, c, d, order)
        delta = abs(cur - prev)
        if delta <= rtol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise QuadratureError(
        f"no convergence to rtol={rtol} at order {max_order} "
        f"(last delta {delta:.3e})")


def sphere_integral(fn, theta_lo: float = 0.0, theta_hi: float = np.pi,
                    phi_lo: float = -np.pi, phi_hi: float = np.pi,
                    rtol: float = 1e-8) -> float:
    """Solid-angle integral of fn(theta, phi) over the given angular box."""
    return integrate_2d(lambda t, p: fn(t, p) * np.sin(t),
                        theta_lo, theta_hi, phi_lo, phi_hi, rtol=rtol)

"""Sphere quadrature and Legendre evaluation.

The product rule is Gauss-Legendre in cos(theta) crossed with a uniform
periodic grid in phi.  It integrates every spherical polynomial of degree
<= min(2*n_theta - 1, n_phi - 1) exactly, which covers all polynomial
phantoms used in the tests; weights sum to the sphere area 4*pi.

Legendre conventions: P_n is the standard Legendre polynomial; the associated
functions used in the harmonic projections follow the positive convention

    P_{n,m}(cos theta) = sin^m(theta) * d^m/dx^m P_n(x) |_{x=cos theta},

i.e. any Condon-Shortley (-1)^m is already divided out, so P_{1,1} = sin(theta).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SphereRule", "build_rule", "legendre_all", "assoc_legendre"]

Array = np.ndarray


@dataclass(frozen=True)
class SphereRule:
    """Flattened product quadrature over the unit sphere.

    Nodes are (theta_j, phi_j) with weights w_j such that
    sum_j w_j g(omega_j) approximates the surface integral of g.
    cos_t, sin_t, cos_p, sin_p, w are 1-D arrays of equal length.
    """

    n_theta: int
    n_phi: int
    cos_t: Array
    sin_t: Array
    cos_p: Array
    sin_p: Array
    w: Array

    @property
    def nodes(self):
        """(theta, phi, weight) triples, mainly for inspection."""
        theta = np.arccos(self.cos_t)
        phi = np.arctan2(self.sin_p, self.cos_p) % (2.0 * np.pi)
        return np.stack([theta, phi, self.w], axis=1)


def build_rule(n_theta: int = 24, n_phi: int = 48) -> SphereRule:
    if n_theta < 1 or n_phi < 1:
        raise ValueError("rule sizes must be positive")
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    wphi = 2.0 * np.pi / n_phi
    ct = np.repeat(x, n_phi)
    st = np.sqrt(np.maximum(0.0, 1.0 - ct * ct))
    cp = np.tile(np.cos(phi), n_theta)
    sp = np.tile(np.sin(phi), n_theta)
    w = np.repeat(wx, n_phi) * wphi
    arrays = (ct, st, cp, sp, w)
    for a in arrays:
        a.setflags(write=False)
    return SphereRule(n_theta, n_phi, *arrays)


def legendre_all(n: int, x: Array) -> Array:
    """All Legendre values P_0(x)..P_n(x), shape (n+1,) + x.shape."""
    if n < 0:
        raise ValueError("n must be >= 0")
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = x
    for k in range(1, n):
        out[k + 1] = ((2 * k + 1) * x * out[k] - k * out[k - 1]) / (k + 1)
    return out


def assoc_legendre(n: int, m: int, x: Array) -> Array:
    """P_{n,m}(x) in the positive convention (see module docstring).

    Upward recurrence in degree at fixed order m:
        P_{m,m}   = (2m-1)!! (1-x^2)^{m/2}
        P_{m+1,m} = (2m+1) x P_{m,m}
        (n-m) P_{n,m} = (2n-1) x P_{n-1,m} - (n+m-1) P_{n-2,m}
    """
    if m < 0 or n < m:
        raise ValueError("need 0 <= m <= n")
    x = np.asarray(x, dtype=float)
    if m == 0:
        return legendre_all(n, x)[n]
    s = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    pmm = s**m * float(np.prod(np.arange(1, 2 * m, 2, dtype=float)))
    if n == m:
        return pmm
    pm1 = (2 * m + 1) * x * pmm
    if n == m + 1:
        return pm1
    for k in range(m + 2, n + 1):
        pmm, pm1 = pm1, ((2 * k - 1) * x * pm1 - (k + m - 1) * pmm) / (k - m)
    return pm1

"""Forward operators: spherical means, cosine coefficients, the two-data
transform, and general harmonic projections of sphere restrictions.

All operators act on spheres centered at (p, q, 0) with radius t > 0 and
discretize the surface integral with a product quadrature rule (exact for
the polynomial restrictions dominating the tests).  The harmonic projections
follow the normalization

    a_{0n} = (2n+1)/(4 pi) * Int f P_n(cos theta) dw
    a_{mn} = (2n+1)/(2 pi) * (n-m)!/(n+m)! * Int f P_{n,m}(cos theta) cos(m phi) dw
    b_{mn} =                     likewise with sin(m phi)

with P_{n,m} in the positive convention of the quadrature module, so that
a_{00} is the spherical mean Mf and a_{01} is the first cosine coefficient.
The two-data transform packs them as Mf + i * a01 / 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial, pi

import numpy as np

from .quadrature import SphereRule, assoc_legendre, build_rule, legendre_all

__all__ = [
    "SphereCenter",
    "default_rule",
    "spherical_mean",
    "first_cosine_coefficient",
    "two_data_transform",
    "harmonic_coefficient",
    "restriction_partial_sum",
    "off_plane_mean",
]

_DEFAULT_RULE: SphereRule | None = None


def default_rule() -> SphereRule:
    """The shared 24 x 48 product rule (exact to restriction degree ~46)."""
    global _DEFAULT_RULE
    if _DEFAULT_RULE is None:
        _DEFAULT_RULE = build_rule(24, 48)
    return _DEFAULT_RULE


@dataclass(frozen=True)
class SphereCenter:
    """Sphere of radius t centered at (p, q, 0)."""

    p: float
    q: float
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError(f"sphere radius must be positive, got t={self.t}")


def _evaluate_on_sphere(f, c: SphereCenter, rule: SphereRule, z_shift: float = 0.0):
    ev = f.evaluate if hasattr(f, "evaluate") else f
    X = c.p + c.t * rule.sin_t * rule.cos_p
    Y = c.q + c.t * rule.sin_t * rule.sin_p
    Z = z_shift + c.t * rule.cos_t
    return np.asarray(ev(X, Y, Z), dtype=float)


def spherical_mean(f, c: SphereCenter, rule: SphereRule | None = None) -> float:
    """Mf(p,q,t): the average of f over the sphere."""
    rule = rule or default_rule()
    vals = _evaluate_on_sphere(f, c, rule)
    return float(np.dot(vals, rule.w)) / (4.0 * pi)


def first_cosine_coefficient(f, c: SphereCenter, rule: SphereRule | None = None) -> float:
    """a_{01}(p,q,t), the coefficient of cos(theta) in the restriction."""
    rule = rule or default_rule()
    vals = _evaluate_on_sphere(f, c, rule)
    return 3.0 * float(np.dot(vals * rule.cos_t, rule.w)) / (4.0 * pi)


def two_data_transform(f, c: SphereCenter, rule: SphereRule | None = None) -> complex:
    """The complex two-data value Mf + i a01/3 in one sphere pass."""
    rule = rule or default_rule()
    vals = _evaluate_on_sphere(f, c, rule)
    quarter = 0.25 / pi
    mf = float(np.dot(vals, rule.w)) * quarter
    a01 = 3.0 * float(np.dot(vals * rule.cos_t, rule.w)) * quarter
    return complex(mf, a01 / 3.0)


def harmonic_coefficient(
    f,
    c: SphereCenter,
    n: int,
    m: int = 0,
    kind: str = "a",
    rule: SphereRule | None = None,
) -> float:
    """General projection a_{mn} (kind "a") or b_{mn} (kind "b")."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    if kind not in ("a", "b"):
        raise ValueError("kind must be 'a' or 'b'")
    if kind == "b" and m == 0:
        raise ValueError("b coefficients need m >= 1")
    rule = rule or default_rule()
    vals = _evaluate_on_sphere(f, c, rule)
    if m == 0:
        pn = legendre_all(n, rule.cos_t)[n]
        return (2 * n + 1) * float(np.dot(vals * pn, rule.w)) / (4.0 * pi)
    pnm = assoc_legendre(n, m, rule.cos_t)
    phi = np.arctan2(rule.sin_p, rule.cos_p)
    trig = np.cos(m * phi) if kind == "a" else np.sin(m * phi)
    norm = (2 * n + 1) * factorial(n - m) / factorial(n + m) / (2.0 * pi)
    return norm * float(np.dot(vals * pnm * trig, rule.w))


def restriction_partial_sum(
    f,
    c: SphereCenter,
    point: tuple[float, float, float],
    N: int,
    rule: SphereRule | None = None,
) -> float:
    """Truncated pole expansion sum_{n=0..N} (sgn z)^n a_{0n}(p,q,t).

    `point` must be one of the two poles (p, q, +-t) of the sphere (within
    1e-10 relative): those are the only points where the axisymmetric part
    of the expansion reproduces f.
    """
    x, y, z = point
    tol = 1e-10 * max(1.0, abs(c.t))
    on_sphere = abs(x - c.p) <= tol and abs(y - c.q) <= tol and abs(abs(z) - c.t) <= tol
    if not on_sphere:
        raise ValueError(f"point {point} is not a pole of the sphere ({c.p}, {c.q}, t={c.t})")
    rule = rule or default_rule()
    vals = _evaluate_on_sphere(f, c, rule)
    legs = legendre_all(N, rule.cos_t)
    sgn = 1.0 if z >= 0 else -1.0
    total = 0.0
    for n in range(N + 1):
        a0n = (2 * n + 1) * float(np.dot(vals * legs[n], rule.w)) / (4.0 * pi)
        total += sgn**n * a0n
    return total


def off_plane_mean(f, p: float, q: float, z0: float, t: float, rule: SphereRule | None = None) -> float:
    """Mean of f over the sphere centered at (p, q, z0), radius t.

    Plumbing for the normal-derivative check: the detector model only knows
    plane-centered spheres, but the Dirichlet-Neumann identity differentiates
    the mean as the center moves off the plane.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    rule = rule or default_rule()
    vals = _evaluate_on_sphere(f, SphereCenter(p, q, t), rule, z_shift=z0)
    return float(np.dot(vals, rule.w)) / (4.0 * pi)

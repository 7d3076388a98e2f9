"""Closed forms used as independent oracles in the tests.

Every function here is derived by hand from scalar transform algebra, so the
suite never tests the library against itself.  Branches of square roots are
split into factors so that principal-branch numpy square roots give the
transform that behaves like 1/z at infinity.
"""

import numpy as np


def semicircle_g(z, t: float = 1.0):
    """Cauchy transform of the centered semicircle of variance t."""
    r = 2.0 * np.sqrt(t)
    return (z - np.sqrt(z - r) * np.sqrt(z + r)) / (2.0 * t)


def semicircle_density(u, t: float = 1.0):
    u = np.asarray(u, dtype=float)
    return np.sqrt(np.clip(4.0 * t - u * u, 0.0, None)) / (2.0 * np.pi * t)


def point_gamma_omega(b, t: float = 1.0):
    """Subordination value for a point mass at 0 plus semicircular of variance t.

    Solves w = b + t/(0 - w), i.e. w^2 - b w + t = 0, on the branch with
    w ~ b at infinity (the attracting fixed point in the upper half-plane).
    """
    r = 2.0 * np.sqrt(t)
    return (b + np.sqrt(b - r) * np.sqrt(b + r)) / 2.0


def bernoulli_g(z):
    """Cauchy transform of (delta_{-1} + delta_1)/2."""
    return z / (z * z - 1.0)


def bernoulli_r(g):
    """R-transform of the symmetric Bernoulli law, from inverting G by hand."""
    return (np.sqrt(1.0 + 4.0 * g * g) - 1.0) / (2.0 * g)


def arcsine2_g(z):
    """Cauchy transform of the free convolution square of symmetric Bernoulli.

    K(g) = 2 R(g) + 1/g = sqrt(1 + 4 g^2)/g inverts to G(z) = 1/sqrt(z^2 - 4):
    the arcsine law on (-2, 2).
    """
    return 1.0 / (np.sqrt(z - 2.0) * np.sqrt(z + 2.0))


def arcsine2_density(u):
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) < 2.0
    out = np.zeros_like(u)
    out[inside] = 1.0 / (np.pi * np.sqrt(4.0 - u[inside] ** 2))
    return out


def point_v_curve(u, t: float = 1.0):
    """Boundary curve for the point mass at 0: t/(u^2 + v^2) = 1 on |u| <= sqrt(t)."""
    u = np.asarray(u, dtype=float)
    return np.sqrt(np.clip(t - u * u, 0.0, None))


def point_vq_at_zero(q: float, t: float = 1.0) -> float:
    """v_q(0) for the point mass at 0: v = q + t/v, positive root."""
    return (q + np.sqrt(q * q + 4.0 * t)) / 2.0


def point_dvg_eigenvalue(q: float, t: float = 1.0) -> float:
    """d/dv of v -> q + t/v at the fixed point: -t/v*^2."""
    v = point_vq_at_zero(q, t)
    return -t / (v * v)

"""Numerical kernel for SL(2,C).

Matrices are plain ``numpy`` arrays of shape ``(2, 2)`` and dtype complex128.
Distances use the infinity norm (largest absolute entry).
"""

from __future__ import annotations

import warnings

import numpy as np

from .errors import BranchCollision, DetDrift

TOL_DET = 1e-12
TOL_PRODUCT = 1e-9
TOL_COMMUTE = 1e-10
OMEGA_SWITCH = 1e-6

E = np.eye(2, dtype=complex)
E.setflags(write=False)


def mat(a11, a12, a21, a22) -> np.ndarray:
    return np.array([[a11, a12], [a21, a22]], dtype=complex)


def eye() -> np.ndarray:
    return np.eye(2, dtype=complex)


def d(kappa) -> np.ndarray:
    return mat(kappa, 0, 0, 1 / kappa)


def u(kappa) -> np.ndarray:
    return mat(kappa, 1, 0, 1 / kappa)


def p(x=1) -> np.ndarray:
    return mat(1, x, 0, 1)


def tr(x: np.ndarray) -> complex:
    return complex(x[0, 0] + x[1, 1])


def det(x: np.ndarray) -> complex:
    return complex(x[0, 0] * x[1, 1] - x[0, 1] * x[1, 0])


def norm_inf(x: np.ndarray) -> float:
    return float(np.max(np.abs(x)))


def dist(x: np.ndarray, y: np.ndarray) -> float:
    return norm_inf(x - y)


def mul(*xs: np.ndarray) -> np.ndarray:
    out = eye()
    for x in xs:
        out = out @ x
    return out


def inv(x: np.ndarray, tol: float = TOL_PRODUCT) -> np.ndarray:
    """Inverse of a unit-determinant matrix via the adjugate."""
    dt = det(x)
    if abs(dt - 1) > tol:
        raise DetDrift(f"|det - 1| = {abs(dt - 1):.3e} exceeds {tol:.1e}")
    return mat(x[1, 1], -x[0, 1], -x[1, 0], x[0, 0])


def adj(x: np.ndarray) -> np.ndarray:
    """Adjugate; equals the inverse on SL(2,C) without any determinant check."""
    return mat(x[1, 1], -x[0, 1], -x[1, 0], x[0, 0])


def conj_by(c: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Return c x c^-1."""
    return c @ x @ adj(c)


def normalize_det(x: np.ndarray) -> np.ndarray:
    """Rescale a nonsingular matrix to unit determinant (principal square root)."""
    return x / np.sqrt(det(x))


def kappa_of(t) -> complex:
    """Principal root kappa of kappa + 1/kappa = t."""
    t = complex(t)
    return (t + np.sqrt(t * t - 4)) / 2


def omega(k: int, r) -> complex:
    """Chebyshev-type coefficient with x^k = omega_k(r) x - omega_{k-1}(r) e for tr x = r."""
    r = complex(r)
    k = int(k)
    if k < 0:
        return -omega(-k, r)
    if abs(r - 2) < OMEGA_SWITCH or abs(r + 2) < OMEGA_SWITCH:
        prev, cur = 0j, 1 + 0j
        if k == 0:
            return prev
        for _ in range(k - 1):
            prev, cur = cur, r * cur - prev
        return cur
    mu = kappa_of(r)
    return complex((mu**k - mu ** (-k)) / (mu - 1 / mu))


def power_cayley(x: np.ndarray, k: int) -> np.ndarray:
    r = tr(x)
    return omega(k, r) * x - omega(k - 1, r) * eye()


def power_naive(x: np.ndarray, k: int) -> np.ndarray:
    base = x if k >= 0 else adj(x)
    out = eye()
    for _ in range(abs(k)):
        out = out @ base
    return out


def centralizer_element(a: np.ndarray, t, mu, branch: int = 1) -> np.ndarray:
    """Element mu*a + nu*e of Cen(a), with nu solving mu^2 + t mu nu + nu^2 = 1."""
    t = complex(t)
    mu = complex(mu)
    disc = t * t * mu * mu - 4 * (mu * mu - 1)
    root = np.sqrt(disc)
    if abs(root) < 1e-12:
        warnings.warn("nu branches coincide", BranchCollision, stacklevel=2)
    nu = (-t * mu + (1 if branch >= 0 else -1) * root) / 2
    return mu * a + nu * eye()


def is_commuting(a: np.ndarray, b: np.ndarray, tol: float = TOL_COMMUTE) -> bool:
    return norm_inf(a @ b - b @ a) <= tol


def random_sl2(rng: np.random.Generator, max_cond: float = 8.0) -> np.ndarray:
    """A random well-conditioned element of SL(2,C)."""
    while True:
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if abs(det(g)) < 1e-3:
            continue
        g = normalize_det(g)
        if np.linalg.cond(g) <= max_cond:
            return g


def random_in_G(t, rng: np.random.Generator, max_cond: float = 8.0) -> np.ndarray:
    """A random non-central element of trace t."""
    t = complex(t)
    g = random_sl2(rng, max_cond)
    if abs(t - 2) < 1e-9 or abs(t + 2) < 1e-9:
        eps = 1 if t.real > 0 else -1
        base = eps * p(1)
    else:
        base = d(kappa_of(t))
    return conj_by(g, base)

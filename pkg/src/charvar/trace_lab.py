"""Fricke trace calculus for triples of trace-t matrices.

Covers the Fricke polynomial, canonical pairs, completion of a triple from its
trace coordinates, the fibers ``C_t^r(a) = {x : tr x = t, tr(ax) = r}``, pair
alignment by conjugation, and the chain moduli built from successive fibers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import mat2
from .errors import (
    DegenerateTarget,
    InconsistentFricke,
    ReduciblePair,
    TraceMismatch,
)

TOL_FRICKE = 1e-8
TOL_LOCUS = 1e-6
COND_MAX = 1e12

# Centers of the disks removed from the generic trace region.
_SPECIAL_T = (2, -2, 1, -1, np.sqrt(2), -np.sqrt(2), np.sqrt(3), -np.sqrt(3), 0)


def lex_key(z: complex) -> tuple[float, float]:
    return (z.real, z.imag)


def is_generic_t(t, radius: float = 1e-3) -> bool:
    t = complex(t)
    if not 0.5 <= abs(t) <= 3.5:
        return False
    return all(abs(t - c) >= radius for c in _SPECIAL_T)


def sample_generic_t(rng: np.random.Generator, radius: float = 1e-3) -> complex:
    while True:
        r = rng.uniform(0.5, 3.5)
        t = r * np.exp(1j * rng.uniform(0, 2 * np.pi))
        if is_generic_t(t, radius):
            return complex(t)


def in_B(t, r, margin: float = TOL_LOCUS) -> bool:
    """True when r avoids the reducible locus {2, t^2 - 2}."""
    t, r = complex(t), complex(r)
    return abs(r - 2) >= margin and abs(r - (t * t - 2)) >= margin


def f_t_eval(t, r1, r2, r3, r) -> complex:
    t, r1, r2, r3, r = map(complex, (t, r1, r2, r3, r))
    s = r1 + r2 + r3
    return (
        r * r
        + t * (t * t - s) * r
        + t * t * (3 - s)
        + r1 * r1
        + r2 * r2
        + r3 * r3
        + r1 * r2 * r3
        - 4
    )


def _f_t_coeffs(t, r1, r2, r3) -> tuple[complex, complex]:
    t, r1, r2, r3 = map(complex, (t, r1, r2, r3))
    s = r1 + r2 + r3
    b = t * (t * t - s)
    c = t * t * (3 - s) + r1 * r1 + r2 * r2 + r3 * r3 + r1 * r2 * r3 - 4
    return b, c


def f_t_discriminant(t, r1, r2, r3) -> complex:
    b, c = _f_t_coeffs(t, r1, r2, r3)
    return b * b - 4 * c


def solve_f_t(t, r1, r2, r3) -> tuple[complex, complex]:
    """Both roots r of f_t(r1, r2, r3; r) = 0, sorted by (Re, Im)."""
    b, c = _f_t_coeffs(t, r1, r2, r3)
    root = np.sqrt(b * b - 4 * c)
    pair = sorted(((-b - root) / 2, (-b + root) / 2), key=lex_key)
    return complex(pair[0]), complex(pair[1])


def is_double_root(t, r1, r2, r3, tol: float = 1e-12) -> bool:
    return abs(f_t_discriminant(t, r1, r2, r3)) < tol


def canonical_pair(t, t12) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic pair (a1, a2) of trace-t matrices with tr(a1 a2) = t12."""
    t, t12 = complex(t), complex(t12)
    if abs(t - 2) < 1e-12 or abs(t + 2) < 1e-12:
        eps = 1 if t.real > 0 else -1
        a1 = eps * mat2.p(1)
        a2 = eps * mat2.mat(1, 0, t12 - 2, 1)
        return a1, a2
    k = mat2.kappa_of(t)
    y11 = (t12 - t / k) / (k - 1 / k)
    y22 = t - y11
    a2 = mat2.mat(y11, 1, y11 * y22 - 1, y22)
    return mat2.d(k), a2


def _common_eigenvector(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> np.ndarray | None:
    _, vecs = np.linalg.eig(a)
    for v in vecs.T:
        w = b @ v
        # w parallel to v
        if abs(v[0] * w[1] - v[1] * w[0]) <= tol * max(1.0, mat2.norm_inf(b)):
            return v
    return None


def is_reducible_pair(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> bool:
    """Shared eigenvector test via the commutator trace, tr[a,b] = 2, written in traces."""
    x, y, z = mat2.tr(a), mat2.tr(b), mat2.tr(a @ b)
    kappa = x * x + y * y + z * z - x * y * z - 4
    scale = max(1.0, abs(x) ** 2, abs(y) ** 2, abs(z) ** 2, abs(x * y * z))
    return abs(kappa) <= tol * scale


def complete_triple(a1, a2, t, t13, t23, t123, tol: float = TOL_FRICKE) -> np.ndarray:
    """The unique a3 with tr a3 = t, tr(a1 a3) = t13, tr(a2 a3) = t23, tr(a1 a2 a3) = t123."""
    t = complex(t)
    residual = f_t_eval(t, mat2.tr(a1 @ a2), t13, t23, t123)
    if abs(residual) > tol:
        raise InconsistentFricke(f"Fricke residual {abs(residual):.3e}")
    basis = [mat2.eye(), a1, a2, a1 @ a2]
    probes = [mat2.eye(), a1, a2, a1 @ a2]
    lhs = np.array([[mat2.tr(w @ m) for m in basis] for w in probes])
    rhs = np.array([t, t13, t23, t123], dtype=complex)
    if np.linalg.cond(lhs) > COND_MAX:
        raise ReduciblePair("pair (a1, a2) shares an eigenvector")
    coef = np.linalg.solve(lhs, rhs)
    return sum(c * m for c, m in zip(coef, basis))


def _diagonalizing_frame(a: np.ndarray, kappa: complex) -> np.ndarray:
    """P with det 1 and P^-1 a P = d(kappa)."""
    vals, vecs = np.linalg.eig(a)
    i = int(np.argmin(np.abs(vals - kappa)))
    P = np.column_stack([vecs[:, i], vecs[:, 1 - i]])
    return mat2.normalize_det(P)


def _parabolic_frame(a: np.ndarray, eps: int) -> np.ndarray:
    """P with det 1 and P^-1 a P = eps * p(1)."""
    n = a - eps * mat2.eye()
    v2 = np.array([1, 0], dtype=complex)
    if np.max(np.abs(n @ v2)) < 1e-8:
        v2 = np.array([0, 1], dtype=complex)
    v1 = (n @ v2) / eps
    P = np.column_stack([v1, v2])
    return mat2.normalize_det(P)


def sample_Ctr(a: np.ndarray, t, r, u) -> np.ndarray:
    """Point of C_t^r(a) = {x in G(t): tr(ax) = r} with fiber coordinate u."""
    t, r, u = complex(t), complex(r), complex(u)
    if not in_B(t, r):
        raise DegenerateTarget(f"r = {r} lies on the reducible locus for t = {t}")
    if abs(t - 2) < 1e-9 or abs(t + 2) < 1e-9:
        eps = 1 if t.real > 0 else -1
        P = _parabolic_frame(a, eps)
        c = eps * (r - 2)
        alpha = u
        x = mat2.mat(t / 2 + alpha, -alpha * alpha / c, c, t / 2 - alpha)
    else:
        if u == 0:
            raise ValueError("fiber coordinate u must be nonzero for t != +-2")
        k = mat2.kappa_of(t)
        P = _diagonalizing_frame(a, k)
        alpha = (r - t * t / 2) / (k - 1 / k)
        bc = t * t / 4 - 1 - alpha * alpha
        x = mat2.mat(t / 2 + alpha, u, bc / u, t / 2 - alpha)
    return P @ x @ mat2.adj(P)


def align_pair(src, dst, tol: float = 1e-8) -> np.ndarray:
    """c in SL(2,C) with c src_i c^-1 = dst_i, sign fixed deterministically."""
    p1, p2 = src
    q1, q2 = dst
    for name, x, y in (
        ("tr p1", mat2.tr(p1), mat2.tr(q1)),
        ("tr p2", mat2.tr(p2), mat2.tr(q2)),
        ("tr p1p2", mat2.tr(p1 @ p2), mat2.tr(q1 @ q2)),
    ):
        if abs(x - y) > tol * max(1.0, abs(x)):
            raise TraceMismatch(f"{name}: {x} vs {y}")
    if is_reducible_pair(p1, p2) or is_reducible_pair(q1, q2):
        raise ReduciblePair("alignment needs irreducible pairs")
    # c p = q c  <=>  (I kron p^T - q kron I) vec(c) = 0 for row-major vec.
    rows = []
    for pk, qk in ((p1, q1), (p2, q2)):
        rows.append(np.kron(np.eye(2), pk.T) - np.kron(qk, np.eye(2)))
    A = np.vstack(rows)
    _, _, vh = np.linalg.svd(A)
    c = vh[-1].conj().reshape(2, 2)
    c = mat2.normalize_det(c)
    flat = c.ravel()
    lead = flat[int(np.argmax(np.abs(flat)))]
    if lead.real < 0 or (lead.real == 0 and lead.imag < 0):
        c = -c
    return c


@dataclass
class BridgeSolution:
    """All x2 with tr(x1 x2) = a2 and tr(x2 b) = a3, classified by the (x1, b) case."""

    case: str
    solutions: list = field(default_factory=list)
    family: Callable[[complex], np.ndarray] | None = None

    def __len__(self) -> int:
        return len(self.solutions)

    @property
    def empty(self) -> bool:
        return not self.solutions and self.family is None


def solve_bridge(t, x1, b, a2, a3, tol: float = 1e-9) -> BridgeSolution:
    t, a2, a3 = complex(t), complex(a2), complex(a3)
    if mat2.is_commuting(x1, b, tol=1e-10 * max(1.0, mat2.norm_inf(b)) ** 2):
        eps = 1 if mat2.dist(x1, b) <= mat2.dist(x1, mat2.adj(b)) else -1
        if abs(a2 - (eps * a3 + (1 - eps) * t * t / 2)) <= tol:
            return BridgeSolution("commuting", family=lambda u: sample_Ctr(b, t, a3, u))
        return BridgeSolution("commuting")
    t1b = mat2.tr(x1 @ b)
    if in_B(t, t1b, margin=1e-8):
        sols = []
        roots = solve_f_t(t, t1b, a2, a3)
        if abs(roots[0] - roots[1]) < 1e-10:
            roots = roots[:1]
        for r in roots:
            # a3 slot holds x2: tr(x1 x2) = a2, tr(b x2) = a3, tr(x1 b x2) = r
            sols.append(complete_triple(x1, b, t, a2, a3, r))
        return BridgeSolution("irreducible", solutions=sols)
    return _bridge_reducible(t, x1, b, a2, a3, tol)


def _bridge_reducible(t, x1, b, a2, a3, tol) -> BridgeSolution:
    vals, vecs = np.linalg.eig(x1)
    # pick the eigenvector of x1 that b preserves
    scores = []
    for v in vecs.T:
        w = b @ v
        scores.append(abs(v[0] * w[1] - v[1] * w[0]))
    i = int(np.argmin(scores))
    k = complex(vals[i])
    if abs(k - 1 / k) < 1e-8:
        raise DegenerateTarget("reducible bridge at t = +-2 has no closed form here")
    P = mat2.normalize_det(np.column_stack([vecs[:, i], vecs[:, 1 - i]]))
    bp = mat2.adj(P) @ b @ P
    delta = 1 / np.sqrt(bp[0, 1])
    D = mat2.d(delta)
    P = P @ mat2.adj(D)
    bp = D @ bp @ mat2.adj(D)
    mu = bp[0, 0]
    eps = 1 if abs(mu - k) <= abs(mu - 1 / k) else -1
    y11 = (a2 - t / k) / (k - 1 / k)
    y22 = (k * t - a2) / (k - 1 / k)
    y21 = a3 - eps * a2 + (eps - 1) * t * t / 2
    if abs(y21) <= tol:
        return BridgeSolution("reducible")
    y12 = (y11 * y22 - 1) / y21
    x2p = mat2.mat(y11, y12, y21, y22)
    return BridgeSolution("reducible", solutions=[P @ x2p @ mat2.adj(P)])


@dataclass
class ChainSpec:
    t: complex
    a: np.ndarray
    b: np.ndarray
    traces: Sequence[complex]

    @property
    def n(self) -> int:
        return len(self.traces)


@dataclass
class Chain:
    matrices: list
    residual: float
    case: str


def chain_residual(spec: ChainSpec, xs: Sequence[np.ndarray]) -> float:
    full = [spec.a, *xs, spec.b]
    res = 0.0
    for i, ai in enumerate(spec.traces, start=1):
        res = max(res, abs(mat2.tr(full[i - 1] @ full[i]) - ai))
    for x in xs:
        res = max(res, abs(mat2.tr(x) - spec.t), abs(mat2.det(x) - 1))
    return res


def chain_sample(spec: ChainSpec, params=None, seed=None, root: int = 0) -> Chain | None:
    """Sample a point of the chain moduli M_t^a(a, b); None when the bridge is empty.

    ``params`` holds n - 2 nonzero fiber coordinates; bit j of ``root`` picks
    between the two bridge solutions.
    """
    t = complex(spec.t)
    n = spec.n
    if n < 3:
        raise ValueError("chains need n >= 3")
    for ai in spec.traces:
        if not in_B(t, ai):
            raise DegenerateTarget(f"chain trace {ai} lies on the reducible locus")
    if params is None:
        rng = np.random.default_rng(seed)
        params = [np.exp(rng.uniform(-0.7, 0.7) + 1j * rng.uniform(0, 2 * np.pi)) for _ in range(n - 2)]
    if len(params) != n - 2:
        raise ValueError(f"expected {n - 2} fiber coordinates, got {len(params)}")
    xs = []
    prev = spec.a
    for i in range(n - 2):
        prev = sample_Ctr(prev, t, spec.traces[i], params[i])
        xs.append(prev)
    bridge = solve_bridge(t, prev, spec.b, spec.traces[n - 2], spec.traces[n - 1])
    if bridge.solutions:
        last = bridge.solutions[root & 1 if len(bridge.solutions) > 1 else 0]
    elif bridge.family is not None:
        last = bridge.family(params[-1])
    else:
        return None
    xs.append(last)
    return Chain(xs, chain_residual(spec, xs), bridge.case)


def sl2_tangent_basis(x: np.ndarray) -> list[np.ndarray]:
    """Two sl(2) elements X with [X, x] spanning the tangent space of the conjugacy class."""
    gens = [mat2.mat(1, 0, 0, -1), mat2.mat(0, 1, 0, 0), mat2.mat(0, 0, 1, 0)]
    comms = np.array([(g @ x - x @ g).ravel() for g in gens]).T
    _, _, vh = np.linalg.svd(comms)
    # rows of vh: combinations ordered by decreasing image size; first two act nontrivially
    out = []
    for row in vh[:2]:
        out.append(sum(c * g for c, g in zip(row.conj(), gens)))
    return out

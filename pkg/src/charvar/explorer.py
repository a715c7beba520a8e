"""Chart sampling, local dimension estimates and the gluing constructions."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm

from . import mat2
from .diagram import KnotDiagram, conjugate_slots
from .errors import (
    AlignmentFailure,
    ChainClosureFailure,
    IllConditioned,
    InconsistentFricke,
    ReduciblePair,
    TraceMismatch,
    UnknownGenerator,
)
from .knots import WirtingerRep, builtin_diagram, rep_from_slots
from .tangles import (
    Tangle,
    TangleRep,
    boundary_data,
    close,
    closure_defect,
    closure_reps,
    closure_roots,
    compose,
    rep_at,
    reflect_rep,
    twist,
)
from .trace_lab import (
    TOL_FRICKE,
    TOL_LOCUS,
    ChainSpec,
    align_pair,
    canonical_pair,
    chain_residual,
    chain_sample,
    complete_triple,
    f_t_eval,
    in_B,
    is_generic_t,
    sl2_tangent_basis,
)

log = logging.getLogger(__name__)

CHART_VARIABLES = {
    "P334": ("t", "t13", "t123", "t134"),
    "Q1": ("t", "t23", "t123"),
    "Q2": ("t", "t13", "t123", "s"),
}

RANK_TOL = 1e-8
FD_STEP = 1e-6
FD_TOL = 1e-5

# sampled meridian traces are t = k + 1/k with 1 <= |k| <= KAPPA_MAX
KAPPA_MAX = 1.3
ARG_MARGIN = 0.25
BOX = 2.0


# -- chart constraints ---------------------------------------------------------------


@dataclass(frozen=True)
class Constraint:
    name: str
    variables: tuple
    f: Callable
    grad: Callable

    def __call__(self, z) -> complex:
        return complex(self.f(*z))

    def gradient(self, z) -> np.ndarray:
        return np.asarray(self.grad(*z), dtype=complex)


def _triple_quadratic(t, r, w):
    """w^2 + t(t^2 - 2 - r) w + r^2 + (1 - t^2) r + t^2 - 2: the chart form of f_t(1, 1, r; w)."""
    return w * w + t * (t * t - 2 - r) * w + r * r + (1 - t * t) * r + t * t - 2


def _triple_quadratic_grad(t, r, w):
    return (
        (3 * t * t - 2 - r) * w - 2 * t * r + 2 * t,
        -t * w + 2 * r + 1 - t * t,
        2 * w + t * (t * t - 2 - r),
    )


def chart_constraints(chart: str) -> list[Constraint]:
    """Defining equations of a chart with analytic gradients."""
    v = CHART_VARIABLES[chart]
    if chart == "P334":

        def c1(t, t13, t123, t134):
            return _triple_quadratic(t, t13, t123)

        def g1(t, t13, t123, t134):
            dt, dr, dw = _triple_quadratic_grad(t, t13, t123)
            return (dt, dr, dw, 0)

        def c2(t, t13, t123, t134):
            return t134 * t134 + t * (t * t - 1 - t13) * t134 + t13 * t13 - t * t * t13 + 2 * t * t - 3

        def g2(t, t13, t123, t134):
            return (
                (3 * t * t - 1 - t13) * t134 - 2 * t * t13 + 4 * t,
                -t * t134 + 2 * t13 - t * t,
                0,
                2 * t134 + t * (t * t - 1 - t13),
            )

        return [Constraint("t123", v, c1, g1), Constraint("t134", v, c2, g2)]
    if chart == "Q1":
        return [Constraint("t123", v, _triple_quadratic, _triple_quadratic_grad)]
    if chart == "Q2":

        def c1(t, t13, t123, s):
            return _triple_quadratic(t, t13, t123)

        def g1(t, t13, t123, s):
            return (*_triple_quadratic_grad(t, t13, t123), 0)

        def c2(t, t13, t123, s):
            return (s + 2 - t * t) * (s - 1) ** 2 - t13 + t * t - 2

        def g2(t, t13, t123, s):
            return (-2 * t * (s - 1) ** 2 + 2 * t, -1, 0, (s - 1) ** 2 + 2 * (s + 2 - t * t) * (s - 1))

        return [Constraint("t123", v, c1, g1), Constraint("s", v, c2, g2)]
    raise KeyError(f"unknown chart {chart!r}")


@dataclass
class ChartPoint:
    chart: str
    params: dict
    residuals: np.ndarray
    margin: float

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.params[k] for k in CHART_VARIABLES[self.chart]], dtype=complex)

    @property
    def values(self) -> tuple:
        return tuple(self.params[k] for k in CHART_VARIABLES[self.chart])


def _quadratic_roots(b, c) -> tuple[complex, complex]:
    disc = np.sqrt(complex(b * b - 4 * c))
    # pick the larger-magnitude root first to avoid cancellation
    q = -(b + disc) / 2 if abs(b + disc) >= abs(b - disc) else -(b - disc) / 2
    r1 = q
    r2 = c / q if q != 0 else -b - q
    return complex(r1), complex(r2)


def _polish(f, df, z, steps: int = 2):
    for _ in range(steps):
        d = df(z)
        if d == 0:
            break
        z = z - f(z) / d
    return complex(z)


def _uniform_box(rng) -> complex:
    return complex(rng.uniform(-BOX, BOX), rng.uniform(-BOX, BOX))


def sample_t(rng: np.random.Generator) -> complex:
    """Meridian trace from the sampling region t = k + 1/k, 1 <= |k| <= KAPPA_MAX."""
    while True:
        r = rng.uniform(1.0, KAPPA_MAX)
        th = rng.uniform(ARG_MARGIN, np.pi - ARG_MARGIN) * rng.choice((-1, 1))
        k = r * np.exp(1j * th)
        t = complex(k + 1 / k)
        if is_generic_t(t):
            return t


def _margin(t, *rs) -> float:
    t = complex(t)
    return float(min(min(abs(r - 2), abs(r - (t * t - 2))) for r in rs))


def chart_residuals(chart: str, z) -> np.ndarray:
    return np.array([abs(c(z)) for c in chart_constraints(chart)])


def _point(chart, rng, t=None) -> ChartPoint | None:
    t = sample_t(rng) if t is None else complex(t)
    if chart == "P334":
        t13 = _uniform_box(rng)
        if _margin(t, t13) < TOL_LOCUS:
            return None
        b = t * (t * t - 2 - t13)
        c = t13 * t13 + (1 - t * t) * t13 + t * t - 2
        t123 = _quadratic_roots(b, c)[rng.integers(2)]
        b2 = t * (t * t - 1 - t13)
        c2 = t13 * t13 - t * t * t13 + 2 * t * t - 3
        t134 = _quadratic_roots(b2, c2)[rng.integers(2)]
        params = {"t": t, "t13": t13, "t123": t123, "t134": t134}
        margin = _margin(t, t13)
    elif chart == "Q1":
        t23 = _uniform_box(rng)
        b = t * (t * t - 2 - t23)
        c = t23 * t23 + (1 - t * t) * t23 + t * t - 2
        t123 = _quadratic_roots(b, c)[rng.integers(2)]
        params = {"t": t, "t23": t23, "t123": t123}
        margin = _margin(t, 1)
    elif chart == "Q2":
        t13 = _uniform_box(rng)
        # s^3 - t^2 s^2 + (2t^2 - 3) s - t13 = 0 through its companion matrix
        coeffs = np.array([1, -t * t, 2 * t * t - 3, -t13], dtype=complex)
        comp = np.zeros((3, 3), dtype=complex)
        comp[0] = -coeffs[1:]
        comp[1, 0] = comp[2, 1] = 1
        roots = np.linalg.eigvals(comp)
        s = roots[rng.integers(3)]
        s = _polish(lambda z: np.polyval(coeffs, z), lambda z: np.polyval(np.polyder(coeffs), z), s)
        b = t * (t * t - 2 - t13)
        c = t13 * t13 + (1 - t * t) * t13 + t * t - 2
        t123 = _quadratic_roots(b, c)[rng.integers(2)]
        params = {"t": t, "t13": t13, "t123": t123, "s": s}
        margin = _margin(t, t13, s)
    else:
        raise KeyError(f"unknown chart {chart!r}")
    if margin < TOL_LOCUS:
        return None
    if chart == "P334" and min(abs(t * t - 1), abs(t * t - 2)) < TOL_LOCUS and abs(params["t13"] - 2) < TOL_LOCUS:
        return None
    z = np.array([params[k] for k in CHART_VARIABLES[chart]])
    return ChartPoint(chart, params, chart_residuals(chart, z), margin)


def sample_chart(chart: str, count: int, seed: int | None = 0) -> list[ChartPoint]:
    """Deterministic chart samples; free coordinates uniform on the sampling region."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        p = _point(chart, rng)
        if p is not None:
            out.append(p)
    return out


def chart_point_at(chart: str, t, seed: int | None = 0, tries: int = 100) -> ChartPoint:
    """A chart point with prescribed meridian trace t."""
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        p = _point(chart, rng, t)
        if p is not None:
            return p
    raise ValueError(f"no admissible {chart} point found at t = {t}")


# -- local dimension -----------------------------------------------------------------


@dataclass
class DimensionReport:
    n_variables: int
    n_constraints: int
    singular_values: np.ndarray
    dimension: int
    rank_tol: float
    fd_error: float = 0.0

    @property
    def rank(self) -> int:
        return self.n_variables - self.dimension


def _rank_report(J: np.ndarray, n: int, rank_tol: float, fd_error: float = 0.0) -> DimensionReport:
    if J.size == 0:
        return DimensionReport(n, 0, np.zeros(0), n, rank_tol, fd_error)
    sv = np.linalg.svd(J, compute_uv=False)
    thr = rank_tol * sv[0] if sv[0] > 0 else rank_tol
    close_ = [s for s in sv if thr / 10 < s < thr * 10]
    if close_:
        raise IllConditioned(f"singular values {close_} lie within a factor 10 of the threshold {thr:.2e}")
    rank = int(np.sum(sv > thr))
    return DimensionReport(n, J.shape[0], sv, n - rank, rank_tol, fd_error)


def jacobian(constraints: Sequence[Constraint], z) -> np.ndarray:
    return np.array([c.gradient(z) for c in constraints], dtype=complex).reshape(len(constraints), len(z))


def fd_jacobian(constraints: Sequence[Constraint], z, h: float = FD_STEP) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    J = np.zeros((len(constraints), len(z)), dtype=complex)
    for j in range(len(z)):
        dz = np.zeros(len(z), dtype=complex)
        dz[j] = h
        for i, c in enumerate(constraints):
            J[i, j] = (c(z + dz) - c(z - dz)) / (2 * h)
    return J


def estimate_local_dimension(constraints: Sequence[Constraint], point, rank_tol: float = RANK_TOL, n_variables: int | None = None) -> DimensionReport:
    """Complex dimension of the zero set at ``point`` from the Jacobian rank.

    ``point`` is a ChartPoint or a coordinate vector.  Analytic gradients are
    checked against central differences; a disagreement raises ValueError.
    """
    z = point.vector if isinstance(point, ChartPoint) else np.asarray(point, dtype=complex)
    n = n_variables if n_variables is not None else len(z)
    if not constraints:
        return DimensionReport(n, 0, np.zeros(0), n, rank_tol)
    res = max(abs(c(z)) for c in constraints)
    if res > 1e-9:
        raise ValueError(f"point is off the chart (residual {res:.2e})")
    J = jacobian(constraints, z)
    Jfd = fd_jacobian(constraints, z)
    err = float(np.max(np.abs(J - Jfd)) / max(1.0, np.max(np.abs(J))))
    if err > FD_TOL:
        raise ValueError(f"analytic and finite-difference gradients disagree ({err:.2e})")
    return _rank_report(J, n, rank_tol, err)


def chart_dimension(point: ChartPoint, rank_tol: float = RANK_TOL) -> DimensionReport:
    return estimate_local_dimension(chart_constraints(point.chart), point, rank_tol)


# -- chain moduli --------------------------------------------------------------------


def chain_jacobian(spec: ChainSpec, xs: Sequence[np.ndarray]) -> np.ndarray:
    """Derivative of the chain traces in local conjugation coordinates of each x_i."""
    full = [spec.a, *xs, spec.b]
    n = spec.n
    bases = [sl2_tangent_basis(x) for x in xs]
    J = np.zeros((n, 2 * len(xs)), dtype=complex)
    for i in range(1, n + 1):
        left, right = full[i - 1], full[i]
        if 1 <= i - 1 <= len(xs):
            for j, X in enumerate(bases[i - 2]):
                J[i - 1, 2 * (i - 2) + j] = mat2.tr((X @ left - left @ X) @ right)
        if 1 <= i <= len(xs):
            for j, X in enumerate(bases[i - 1]):
                J[i - 1, 2 * (i - 1) + j] = mat2.tr(left @ (X @ right - right @ X))
    return J


def chain_fd_jacobian(spec: ChainSpec, xs: Sequence[np.ndarray], h: float = FD_STEP) -> np.ndarray:
    n = spec.n
    bases = [sl2_tangent_basis(x) for x in xs]
    J = np.zeros((n, 2 * len(xs)), dtype=complex)

    def traces(ys):
        full = [spec.a, *ys, spec.b]
        return np.array([mat2.tr(full[i - 1] @ full[i]) for i in range(1, n + 1)])

    for k, x in enumerate(xs):
        for j, X in enumerate(bases[k]):
            plus, minus = list(xs), list(xs)
            g = expm(h * X)
            plus[k] = g @ x @ np.linalg.inv(g)
            g = expm(-h * X)
            minus[k] = g @ x @ np.linalg.inv(g)
            J[:, 2 * k + j] = (traces(plus) - traces(minus)) / (2 * h)
    return J


def chain_corank(spec: ChainSpec, xs: Sequence[np.ndarray], rank_tol: float = RANK_TOL) -> int:
    J = chain_jacobian(spec, xs)
    return _rank_report(J, J.shape[1], rank_tol).dimension


# -- characters and irreducibility -------------------------------------------------


def _names(rep: WirtingerRep) -> dict:
    table = {f"a{i}": rep.arcs[i] for i in range(len(rep.arcs))}
    if rep.generators:
        table.update(rep.generators)
    return table


def parse_word(word, names) -> list[tuple[str, int]]:
    if not isinstance(word, str):
        return [(w, 1) if isinstance(w, str) else tuple(w) for w in word]
    alts = "|".join(re.escape(n) for n in sorted(names, key=len, reverse=True))
    pat = re.compile(rf"\s*({alts})(?:\^(-?\d+))?")
    out, pos = [], 0
    text = word.strip()
    while pos < len(text):
        m = pat.match(text, pos)
        if not m or not alts:
            raise UnknownGenerator(f"cannot read a generator at {text[pos:]!r}")
        out.append((m.group(1), int(m.group(2) or 1)))
        pos = m.end()
    return out


def word_matrix(rep: WirtingerRep, word) -> np.ndarray:
    table = _names(rep)
    out = mat2.eye()
    for name, exp in parse_word(word, table):
        if name not in table:
            raise UnknownGenerator(name)
        out = out @ mat2.power_naive(table[name], exp)
    return out


def character_eval(rep: WirtingerRep, words) -> list[complex]:
    """Traces of words in the generator names (and arc names a0, a1, ...)."""
    return [mat2.tr(word_matrix(rep, w)) for w in words]


STANDARD_WORDS = {
    "P334": ["x1", "x1x2", "x1x3", "x2x3", "x3x4", "x1x4", "x1x2x3", "x1x3x4"],
    "Q1": ["x", "xy", "xz", "yz", "xyz"],
    "Q2": ["x", "xy", "xz", "yz", "xyz", "zv", "xv", "xzv"],
}


def arc_words(d: KnotDiagram) -> list[str]:
    """All arc pairs and consecutive arc triples."""
    n = d.n_arcs
    words = [f"a{i}a{j}" for i in range(n) for j in range(i + 1, n)]
    words += [f"a{i}a{(i + 1) % n}a{(i + 2) % n}" for i in range(n)]
    return words


def standard_words(name: str) -> list[str]:
    return STANDARD_WORDS[name] + arc_words(builtin_diagram(name))


def is_irreducible(rep: WirtingerRep, tol: float = 1e-8) -> bool:
    """No eigenvector of the preferred meridian is shared by every arc."""
    m = rep.meridian if rep.diagram.preferred else rep.arcs[0]
    _, vecs = np.linalg.eig(m)
    for v in vecs.T:
        v = v / np.linalg.norm(v)
        shared = True
        for x in rep.arcs:
            w = x @ v
            if abs(v[0] * w[1] - v[1] * w[0]) > tol * max(1.0, mat2.norm_inf(x)):
                shared = False
                break
        if shared:
            return False
    return True


# -- gluing ---------------------------------------------------------------------


@dataclass
class GlueSpec:
    t: complex
    reps: list
    traces: list = field(init=False)

    def __post_init__(self):
        self.t = complex(self.t)
        t = self.t
        for i, rep in enumerate(self.reps):
            g = boundary_data(rep).g
            if mat2.dist(g, mat2.eye()) > 1e-9:
                raise TraceMismatch(f"boundary rep {i} has g != e ({mat2.dist(g, mat2.eye()):.2e})")
        tv = [boundary_data(r).tr_v for r in self.reps]
        for i, v in enumerate(tv[1:], start=1):
            if not in_B(t, v, TOL_LOCUS):
                raise TraceMismatch(f"tr_v of rep {i} lies on {{2, t^2-2}}")
        self.traces = [t * t - v for v in tv[1:]]

    @property
    def n(self) -> int:
        return len(self.reps) - 1

    @property
    def tangles(self) -> list[Tangle]:
        return [r.tangle for r in self.reps]


def _align(src, dst, what):
    try:
        return align_pair(src, dst)
    except (TraceMismatch, ReduciblePair) as exc:
        raise AlignmentFailure(f"{what}: {exc}") from exc


def _stack_diagram(tangles, diagram: KnotDiagram | None, combine=None):
    if combine is None:
        tangle = tangles[0]
        for piece in tangles[1:]:
            tangle = compose(tangle, piece, "*")
    else:
        tangle = combine(tangles)
    closed = close(tangle, "D")
    if diagram is None:
        return closed
    if tuple(diagram.crossings) != tuple(closed.crossings):
        raise ValueError("supplied diagram does not match the glued tangle")
    return diagram


def _assemble(d: KnotDiagram, pieces, t) -> WirtingerRep:
    slots = np.concatenate([p for p in pieces], axis=0)
    return rep_from_slots(d, slots, t)


def glue_theorem_pipeline(spec: GlueSpec, chain_params=None, seed=None, root: int = 0, diagram: KnotDiagram | None = None) -> WirtingerRep:
    """Glue boundary reps of T_0, ..., T_n along a chain into a rep of D(T_0 * ... * T_n)."""
    t = spec.t
    rho0 = spec.reps[0]
    a = rho0.end("se")
    b = mat2.adj(rho0.end("ne"))
    commuting = mat2.is_commuting(a, b, tol=1e-9 * max(1.0, mat2.norm_inf(a) * mat2.norm_inf(b)))
    case = "commuting" if commuting else "non-commuting"
    log.info("endpoint case: %s", case)
    chain = chain_sample(ChainSpec(t, a, b, spec.traces), chain_params, seed, root)
    if chain is None:
        raise ChainClosureFailure("the final bridge step has no solution")
    xs = [a, *chain.matrices, b]
    pieces = [rho0.slots]
    for i, rep in enumerate(spec.reps[1:], start=1):
        c = _align((rep.end("ne"), rep.end("se")), (mat2.adj(xs[i - 1]), xs[i]), f"tangle {i}")
        pieces.append(conjugate_slots(c, rep.slots))
    d = _stack_diagram(spec.tangles, diagram)
    out = _assemble(d, pieces, t)
    out.info.update(
        endpoint_case=case,
        bridge_case=chain.case,
        chain_residual=chain.residual,
        dimension_bound=spec.n - 2 if commuting else spec.n - 1,
    )
    return out


def _plus_last_two(tangles):
    t1, t2, t3, t4 = tangles
    return compose(compose(t1, t2, "*"), compose(t3, t4, "+"), "*")


def case1_glue(t, reps, c, r, diagram: KnotDiagram | None = None, tol: float = 1e-8) -> WirtingerRep:
    """Rep of D(T1 * T2 * (T3 + T4)) from N-closure reps of T1, T2 and D-closure reps of T3, T4."""
    t = complex(t)
    r1, r2, r3, r4 = reps
    b1, b2, b3, b4 = (boundary_data(x) for x in reps)
    if abs(b1.tr_v - b2.tr_v) > tol:
        raise TraceMismatch(f"tr_v differ: {b1.tr_v} vs {b2.tr_v}")
    if abs(b3.tr_h - b4.tr_h) > tol:
        raise TraceMismatch(f"tr_h differ: {b3.tr_h} vs {b4.tr_h}")
    for rep, cl in ((r1, "N"), (r2, "N"), (r3, "D"), (r4, "D")):
        if closure_defect(rep, cl) > tol:
            raise TraceMismatch(f"boundary rep does not close under {cl}")
    a, b = b1.tr_v, b3.tr_h
    res = abs(f_t_eval(t, a, b, c, r))
    if res > TOL_FRICKE:
        raise InconsistentFricke(f"f_t(a, b, c; r) = {res:.3e}")
    x, y = canonical_pair(t, a)
    z = complete_triple(x, y, t, b, c, r)
    cs = [
        _align((r1.end("nw"), r1.end("sw")), (x, y), "T1"),
        _align((r2.end("se"), r2.end("ne")), (x, y), "T2"),
        _align((r3.end("nw"), r3.end("ne")), (x, z), "T3"),
        _align((r4.end("se"), r4.end("sw")), (x, z), "T4"),
    ]
    pieces = [conjugate_slots(ci, rep.slots) for ci, rep in zip(cs, reps)]
    d = _stack_diagram([x_.tangle for x_ in reps], diagram, _plus_last_two)
    out = _assemble(d, pieces, t)
    out.generators = {"x": x, "y": y, "z": z}
    return out


def case2_glue(t, reps, b, r, diagram: KnotDiagram | None = None, tol: float = 1e-8) -> WirtingerRep:
    """Rep of D(T1 * T2 * (T3 + sigma(T3))) with the T4 part transported by the reflection."""
    t = complex(t)
    r1, r2, tau = reps
    b1, b2, bt = (boundary_data(x) for x in reps)
    for rep in (r1, r2):
        if closure_defect(rep, "N") > tol:
            raise TraceMismatch("boundary rep does not close under N")
    if abs(bt.tr_v - (t * t - b)) > tol:
        raise TraceMismatch(f"tr_v(tau) = {bt.tr_v}, need t^2 - b = {t * t - b}")
    a1, a2 = b1.tr_v, b2.tr_v
    res = abs(f_t_eval(t, a1, a2, b, r))
    if res > TOL_FRICKE:
        raise InconsistentFricke(f"f_t(a1, a2, b; r) = {res:.3e}")
    x, y = canonical_pair(t, a1)
    z = complete_triple(x, y, t, b, a2, r)
    c1 = _align((r1.end("nw"), r1.end("sw")), (x, y), "T1")
    c2 = _align((r2.end("ne"), r2.end("se")), (y, z), "T2")
    c3 = _align((tau.end("nw"), tau.end("sw")), (z, mat2.adj(x)), "T3")
    rho3 = tau.conjugate(c3)
    rho4 = reflect_rep(rho3)
    if rho4.residual() > 1e-9:
        raise AlignmentFailure(f"transported rep violates a crossing relation ({rho4.residual():.2e})")
    pieces = [conjugate_slots(c1, r1.slots), conjugate_slots(c2, r2.slots), rho3.slots, rho4.slots]
    d = _stack_diagram([r1.tangle, r2.tangle, tau.tangle, rho4.tangle], diagram, _plus_last_two)
    out = _assemble(d, pieces, t)
    out.generators = {"x": x, "y": y, "z": z, "v": rho3.end("ne")}
    return out


def chart_from_rep(name: str, rep: WirtingerRep) -> tuple:
    """Chart coordinates read back from a rep's generators."""
    g = rep.generators
    tr = mat2.tr
    if name == "P334":
        x1, x2, x3, x4 = (g[k] for k in ("x1", "x2", "x3", "x4"))
        return (rep.t, tr(x1 @ x3), tr(x1 @ x2 @ x3), tr(x1 @ x3 @ x4))
    if name == "Q1":
        x, y, z = g["x"], g["y"], g["z"]
        return (rep.t, tr(y @ z), tr(x @ y @ z))
    x, y, z, v = g["x"], g["y"], g["z"], g["v"]
    return (rep.t, tr(x @ z), tr(x @ y @ z), tr(z @ v))


def kn_tangle(n: int) -> Tangle:
    """T_0 = ([n] * [1/2]) + [1/2] of the non-Montesinos family K_n."""
    half = twist(2, vertical=True)
    return compose(compose(twist(n), half, "*"), half, "+")


def kn_glue(n: int, t, tails: Sequence[int] = (3, 3, 3), which: int = 0, seed=None, root: int = 0) -> WirtingerRep:
    """Rep of D(T_0 * [k_1] * ... * [k_m]) with T_0 = kn_tangle(n) and N-closure boundary reps."""
    t = complex(t)
    found = closure_reps(kn_tangle(n), closure="N", t=t)
    if not found:
        raise ChainClosureFailure(f"no N-closure boundary rep of T_0 at t = {t}")
    reps = [found[which % len(found)][1]]
    for k in tails:
        roots = closure_roots(k, 1, closure="N", t=t)
        if not roots:
            raise ChainClosureFailure(f"[{k}] has no N-closure boundary rep at t = {t}")
        reps.append(rep_at(twist(k), t, roots[0]))
    return glue_theorem_pipeline(GlueSpec(t, reps), seed=seed, root=root)

"""The three benchmark knots: diagrams, chart representations, longitudes, fillings."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np

from . import mat2
from .diagram import KnotDiagram, crossing_residuals, propagate, slot_array
from .errors import (
    EmptySolutionSet,
    ExcludedLocus,
    InconsistentFricke,
    InfiniteSolutionSet,
)
from .tangles import close, compose, rep_propagate, twist
from .trace_lab import (
    TOL_FRICKE,
    TOL_LOCUS,
    align_pair,
    canonical_pair,
    complete_triple,
    f_t_eval,
    in_B,
)

KNOTS = ("P334", "Q1", "Q2")

# rho(l) = sign * m^exponent on each chart
LONGITUDE = {"P334": (26, -1), "Q1": (24, 1), "Q2": (12, 1)}

TOL_VALIDATE = 1e-9


@dataclass
class WirtingerRep:
    """Arc values of a knot diagram; ``arcs[i]`` is the meridian of arc ``i`` along the orientation."""

    diagram: KnotDiagram
    arcs: np.ndarray
    t: complex
    slots: np.ndarray | None = None
    generators: dict | None = None
    info: dict = field(default_factory=dict)

    def arc(self, i: int) -> np.ndarray:
        return self.arcs[i]

    @property
    def meridian(self) -> np.ndarray:
        """Value of the preferred arc."""
        return self.arcs[preferred_arc(self.diagram)]

    def conjugate(self, c: np.ndarray) -> "WirtingerRep":
        ci = mat2.adj(c)
        arcs = np.einsum("ij,njk,kl->nil", c, self.arcs, ci)
        slots = None
        if self.slots is not None:
            slots = np.einsum("ij,npjk,kl->npil", c, self.slots, ci)
        gens = None
        if self.generators is not None:
            gens = {k: c @ v @ ci for k, v in self.generators.items()}
        return WirtingerRep(self.diagram, arcs, self.t, slots, gens, dict(self.info))


@dataclass(frozen=True)
class Slope:
    a: int
    b: int

    def __post_init__(self):
        if gcd(self.a, self.b) != 1:
            raise ValueError(f"slope {self.a}/{self.b} is not coprime")

    @classmethod
    def parse(cls, text: str) -> "Slope":
        a, _, b = text.partition("/")
        return cls(int(a), int(b or 1))

    def __str__(self) -> str:
        return f"{self.a}/{self.b}"


# -- diagrams ------------------------------------------------------------------


def _stack(parts: list[tuple[str, object]]):
    tangle = None
    layout = {}
    for label, piece in parts:
        start = 0 if tangle is None else tangle.n_crossings
        layout[label] = (start, piece)
        tangle = piece if tangle is None else compose(tangle, piece, "*")
    return tangle, layout


def _corner(layout, label, corner):
    start, piece = layout[label]
    c, pos = piece.corner_slot(corner)
    return (start + c, pos)


@lru_cache(maxsize=None)
def builtin_diagram(name: str) -> KnotDiagram:
    """P334 = D([3]*[3]*[3]*[4]); Q1 = D([3]*[3]*([-1/3]+[-1/3])); Q2 = D([3]*[3]*([-1/3]+[1/3]))."""
    if name == "P334":
        rows = [(f"r{i}", twist(k)) for i, k in enumerate((3, 3, 3, 4))]
        tangle, layout = _stack(rows)
        seeds = (
            ("x1", _corner(layout, "r0", "nw"), 1),
            ("x2", _corner(layout, "r0", "sw"), 1),
            ("x3", _corner(layout, "r2", "nw"), 1),
            ("x4", _corner(layout, "r2", "sw"), 1),
        )
        preferred = "x1"
        pieces = dict(rows)
    elif name in ("Q1", "Q2"):
        second = -3 if name == "Q1" else 3
        l1, l2 = twist(-3, vertical=True), twist(second, vertical=True)
        rows = [("r0", twist(3)), ("r1", twist(3)), ("r2", compose(l1, l2, "+"))]
        tangle, layout = _stack(rows)
        r2 = layout["r2"][0]
        layout["l1"] = (r2, l1)
        layout["l2"] = (r2 + l1.n_crossings, l2)
        pieces = dict(rows, l1=l1, l2=l2)
        if name == "Q1":
            seeds = (
                ("x", _corner(layout, "r0", "nw"), 1),
                ("y", _corner(layout, "r0", "sw"), 1),
                ("x", _corner(layout, "l1", "sw"), -1),
                ("x", _corner(layout, "l2", "ne"), -1),
                ("z", _corner(layout, "l2", "sw"), 1),
            )
        else:
            seeds = (
                ("x", _corner(layout, "r0", "nw"), 1),
                ("y", _corner(layout, "r0", "sw"), 1),
                ("z", _corner(layout, "r1", "sw"), -1),
                ("v", _corner(layout, "l1", "ne"), 1),
                ("z", _corner(layout, "l2", "ne"), -1),
            )
        preferred = "x"
    else:
        raise KeyError(f"unknown knot {name!r}; expected one of {KNOTS}")
    closed = close(tangle, "D", name)
    parts = {label: (layout[label][0], pieces[label].n_crossings) for label in layout}
    # orient so that every seeded end points away from its crossing along the knot
    d = KnotDiagram(name, closed.crossings, closed.heads, seeds, preferred, parts)
    if d.enters(seeds[0][1]):
        d = d.reversed()
    return d


def preferred_arc(d: KnotDiagram) -> int:
    slot = d.head_slot_of_seed(d.preferred)
    return d.arcs[d.edge_at(slot)]


def rep_from_seeds(d: KnotDiagram, values: dict, t=None) -> WirtingerRep:
    """Propagate generator values placed at the diagram's seed slots."""
    known = {}
    for name, slot, exp in d.seeds:
        known[slot] = mat2.power_naive(values[name], -exp)
    vals = propagate(d.crossings, known)
    if t is None:
        t = mat2.tr(next(iter(values.values())))
    rep = rep_from_slots(d, slot_array(vals, d.n_crossings), t)
    rep.generators = dict(values)
    return rep


def rep_from_slots(d: KnotDiagram, slots: np.ndarray, t) -> WirtingerRep:
    """Arc values read off incoming slot values; generators read at the seed slots."""
    arcs = np.empty((d.n_arcs, 2, 2), dtype=complex)
    for e, head in d.heads.items():
        arcs[d.arcs[e]] = slots[head]
    gens = {}
    for name, slot, exp in d.seeds:
        gens.setdefault(name, mat2.power_naive(slots[slot], -exp))
    return WirtingerRep(d, arcs, complex(t), slots, gens)


def abelian_rep(d: KnotDiagram, t) -> WirtingerRep:
    x = mat2.d(mat2.kappa_of(t))
    return WirtingerRep(d, np.stack([x] * d.n_arcs), complex(t))


def validate_rep(d: KnotDiagram, rep: WirtingerRep) -> float:
    """Largest residual over crossing relations and arc traces."""
    X = rep.arcs
    worst = 0.0
    for over, u_in, u_out, sign in d.crossing_table():
        a = X[over] if sign > 0 else mat2.adj(X[over])
        worst = max(worst, mat2.dist(X[u_out], a @ X[u_in] @ mat2.adj(a)))
    for x in X:
        worst = max(worst, abs(mat2.tr(x) - rep.t), abs(mat2.det(x) - 1))
    return worst


def slot_residual(rep: WirtingerRep) -> float:
    if rep.slots is None:
        return 0.0
    return float(crossing_residuals(rep.diagram.crossings, rep.slots).max())


def longitude_eval(d: KnotDiagram, rep: WirtingerRep) -> np.ndarray:
    """rho(l) = m^w z_1 ... z_n along the walk from the preferred arc."""
    m = rep.arcs[preferred_arc(d)]
    out = mat2.power_naive(m, d.writhe)
    for _, arc, exp in d.longitude_walk():
        out = out @ mat2.power_naive(rep.arcs[arc], exp)
    return out


def lemma41_residual(a: np.ndarray, b: np.ndarray, k: int) -> float:
    """|| a b a^k b a + b^(k-2) || for a pair with tr(ab) = 1."""
    lhs = mat2.mul(a, b, mat2.power_cayley(a, k), b, a)
    return mat2.norm_inf(lhs + mat2.power_cayley(b, k - 2))


# -- chart builders ----------------------------------------------------------------


def _check_locus(t, r, label):
    if not in_B(t, r, TOL_LOCUS):
        raise ExcludedLocus(f"{label} = {complex(r):.6g} lies on {{2, t^2-2}}")


def _check_fricke(t, r1, r2, r3, r, label):
    res = abs(f_t_eval(t, r1, r2, r3, r))
    if res > TOL_FRICKE:
        raise InconsistentFricke(f"{label}: Fricke residual {res:.3e}")


def build_pretzel_rep(t, t13, t123, t134) -> WirtingerRep:
    """Representation with tr(x1x2) = tr(x2x3) = tr(x3x4) = 1 and tr(x4x1) = 0."""
    t, t13 = complex(t), complex(t13)
    if abs(t13 - (t * t - 2)) < TOL_LOCUS:
        raise ExcludedLocus("t13 = t^2 - 2")
    if abs(t13 - 2) < TOL_LOCUS:
        if min(abs(t * t - 1), abs(t * t - 2)) < TOL_LOCUS:
            raise ExcludedLocus("t13 = 2 with t^2 in {1, 2}")
        raise ExcludedLocus("t13 = 2: (x1, x3) is reducible and the chart builder needs it irreducible")
    _check_fricke(t, 1, t13, 1, t123, "t123")
    _check_fricke(t, 0, t13, 1, t134, "t134")
    x1, x3 = canonical_pair(t, t13)
    x2 = complete_triple(x3, x1, t, 1, 1, t123)
    x4 = complete_triple(x1, x3, t, 0, 1, t134)
    return rep_from_seeds(builtin_diagram("P334"), {"x1": x1, "x2": x2, "x3": x3, "x4": x4}, t)


def build_q1_rep(t, t23, t123) -> WirtingerRep:
    """Representation with tr(xy) = tr(xz) = 1, tr(yz) = t23, tr(xyz) = t123."""
    t = complex(t)
    _check_locus(t, 1, "tr(xy)")
    _check_fricke(t, 1, 1, t23, t123, "t123")
    x, y = canonical_pair(t, 1)
    z = complete_triple(x, y, t, 1, t23, t123)
    return rep_from_seeds(builtin_diagram("Q1"), {"x": x, "y": y, "z": z}, t)


def q2_chart_residual(t, t13, s) -> complex:
    t, t13, s = complex(t), complex(t13), complex(s)
    return (s + 2 - t * t) * (s - 1) ** 2 - (t13 - t * t + 2)


def build_q2_rep(t, t13, t123, s) -> WirtingerRep:
    """Representation with tr(xy) = tr(yz) = 1, tr(xz) = t13, tr(zv) = s."""
    t = complex(t)
    _check_locus(t, t13, "t13")
    _check_locus(t, s, "s")
    _check_fricke(t, t13, 1, 1, t123, "t123")
    res = abs(q2_chart_residual(t, t13, s))
    if res > TOL_FRICKE:
        raise InconsistentFricke(f"s-equation residual {res:.3e}")
    x, z = canonical_pair(t, t13)
    y = complete_triple(z, x, t, 1, 1, t123)
    # any pair with tr(z~ v~) = s will do; the canonical one keeps entries small
    z_tilde, v_tilde = canonical_pair(t, s)
    tau = rep_propagate(twist(-3, vertical=True), (z_tilde, v_tilde), t)
    x_tilde = mat2.adj(tau.end("sw"))
    c = align_pair((x_tilde, z_tilde), (x, z))
    v = mat2.conj_by(c, v_tilde)
    return rep_from_seeds(builtin_diagram("Q2"), {"x": x, "y": y, "z": z, "v": v}, t)


def build_rep(knot: str, params) -> WirtingerRep:
    builders = {"P334": build_pretzel_rep, "Q1": build_q1_rep, "Q2": build_q2_rep}
    return builders[knot](*params)


# -- Dehn filling --------------------------------------------------------------


def dehn_filling_solutions(d: KnotDiagram | str, N: int | None = None, sigma: int | None = None, slope: Slope | None = None) -> list[complex]:
    """Meridian traces t at which chart reps satisfy rho(m)^a rho(l)^b = e.

    With rho(l) = sigma m^N this reads kappa^(a + N b) = sigma^b, kappa != +-1.
    """
    name = d if isinstance(d, str) else d.name
    if N is None or sigma is None:
        N, sigma = LONGITUDE[name]
    if slope is None:
        raise ValueError("a slope is required")
    n = slope.a + N * slope.b
    target = sigma ** (slope.b % 2)
    if n == 0:
        if target == 1:
            raise InfiniteSolutionSet(f"a+{N}b = 0 and sigma^b = 1: every t solves")
        raise EmptySolutionSet(f"a+{N}b = 0 and sigma^b = -1: no t solves")
    if abs(n) == 1:
        raise EmptySolutionSet(f"a+{N}b = {n}: only kappa = {target} solves")
    delta = 0 if target == 1 else 1
    m = abs(n)
    out = []
    for j in range(m):
        # kappa^m = target (the sign of n only swaps kappa and 1/kappa)
        kappa = np.exp(1j * np.pi * (2 * j + delta) / m)
        if abs(kappa - 1) < 1e-12 or abs(kappa + 1) < 1e-12:
            continue
        t = complex(kappa + 1 / kappa)
        t = complex(round(t.real, 15), 0.0) if abs(t.imag) < 1e-14 else t
        if any(abs(t - u) < 1e-9 for u in out):
            continue
        out.append(t)
    if not out:
        raise EmptySolutionSet(f"a+{N}b = {n}: no kappa other than +-1")
    return sorted(out, key=lambda z: (z.real, z.imag))


def filling_residual(rep: WirtingerRep, slope: Slope) -> float:
    d = rep.diagram
    m = rep.meridian
    lon = longitude_eval(d, rep)
    lhs = mat2.power_naive(m, slope.a) @ mat2.power_naive(lon, slope.b)
    return mat2.dist(lhs, mat2.eye())

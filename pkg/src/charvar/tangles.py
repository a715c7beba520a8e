"""Four-ended tangles: construction, representation propagation and closures.

Corners are named ``nw``, ``ne``, ``sw``, ``se``.  Boundary values are always
read with the end directed *outward*.  ``T1 + T2`` places ``T2`` to the right of
``T1``; ``T1 * T2`` places ``T2`` below ``T1``.  ``N`` joins ``nw``-``ne`` and
``sw``-``se``; ``D`` joins ``nw``-``sw`` and ``ne``-``se``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from . import mat2
from .diagram import (
    KnotDiagram,
    PolyMat,
    conjugate_slots,
    crossing_residuals,
    edge_slots,
    orient_closed,
    propagate,
    slot_array,
)
from .errors import CharvarError, InvalidFraction, ParseError, Underdetermined
from .trace_lab import align_pair, canonical_pair, in_B, lex_key

CORNERS = ("nw", "ne", "sw", "se")

# Single crossings, counterclockwise from an under edge.  In [1] the strand
# nw-se passes over; in [-1] the strand sw-ne does.
_POSITIVE = ("sw", "se", "ne", "nw")
_NEGATIVE = ("nw", "sw", "se", "ne")


@dataclass(frozen=True)
class Tangle:
    crossings: tuple
    corners: dict
    tree: tuple
    inputs: tuple  # two (slot, corner) pairs of the first twist leaf
    # (left, right) when the inputs alone do not determine a composite
    parts: tuple = field(default=(), compare=False, repr=False)

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    def corner_slot(self, corner: str) -> tuple[int, int]:
        e = self.corners[corner]
        for c, quad in enumerate(self.crossings):
            for pos, f in enumerate(quad):
                if f == e:
                    return (c, pos)
        raise ValueError(f"corner {corner} is not attached to a crossing")

    def __add__(self, other: "Tangle") -> "Tangle":
        return compose(self, other, "+")

    def __mul__(self, other: "Tangle") -> "Tangle":
        return compose(self, other, "*")

    def __repr__(self) -> str:
        return f"Tangle({to_spec(self.tree)}, {self.n_crossings} crossings)"


def crossing(sign: int = 1) -> Tangle:
    order = _POSITIVE if sign > 0 else _NEGATIVE
    labels = {c: i for i, c in enumerate(CORNERS)}
    quad = tuple(labels[c] for c in order)
    t = Tangle((quad,), labels, ("x", 1 if sign > 0 else -1), ())
    return _with_inputs(t, ("nw", "sw"))


def _with_inputs(t: Tangle, corners) -> Tangle:
    inputs = tuple((t.corner_slot(c), c) for c in corners)
    return Tangle(t.crossings, t.corners, t.tree, inputs)


def _relabel(crossings, corners, mapping):
    crossings = tuple(tuple(mapping[e] for e in q) for q in crossings)
    corners = {k: mapping[e] for k, e in corners.items()}
    return crossings, corners


def _compact(crossings, corners):
    order = []
    for q in crossings:
        for e in q:
            if e not in order:
                order.append(e)
    for e in corners.values():
        if e not in order:
            order.append(e)
    mapping = {e: i for i, e in enumerate(order)}
    return _relabel(crossings, corners, mapping)


def _merge(crossings, corners, pairs):
    parent = {}

    def find(e):
        parent.setdefault(e, e)
        while parent[e] != e:
            e = parent[e]
        return e

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    edges = {e for q in crossings for e in q} | set(corners.values())
    return _relabel(crossings, corners, {e: find(e) for e in edges})


def compose(t1: Tangle, t2: Tangle, op: str) -> Tangle:
    shift = 1 + max([e for q in t1.crossings for e in q] + list(t1.corners.values()))
    c2 = tuple(tuple(e + shift for e in q) for q in t2.crossings)
    k2 = {k: e + shift for k, e in t2.corners.items()}
    if op == "+":
        pairs = [(t1.corners["ne"], k2["nw"]), (t1.corners["se"], k2["sw"])]
        corners = {"nw": t1.corners["nw"], "sw": t1.corners["sw"], "ne": k2["ne"], "se": k2["se"]}
    elif op == "*":
        pairs = [(t1.corners["sw"], k2["nw"]), (t1.corners["se"], k2["ne"])]
        corners = {"nw": t1.corners["nw"], "ne": t1.corners["ne"], "sw": k2["sw"], "se": k2["se"]}
    else:
        raise ValueError(f"unknown composition {op!r}")
    crossings, corners = _merge(t1.crossings + c2, corners, pairs)
    crossings, corners = _compact(crossings, corners)
    inputs = t1.inputs if t1.crossings else t2.inputs
    out = Tangle(crossings, corners, (op, t1.tree, t2.tree), inputs)
    if crossings and not _determines(crossings, [s for s, _ in inputs]):
        found = _find_inputs(out)
        if found is None:
            # solved piecewise by rep_propagate
            return Tangle(crossings, corners, out.tree, inputs, (t1, t2))
        out = Tangle(crossings, corners, out.tree, found)
    return out


_PROBE = (mat2.mat(2, 1, 1, 1), mat2.mat(1, 0, 3, 1))


def _determines(crossings, slots) -> bool:
    """True when values at the two slots fix every slot by propagation."""
    if len(slots) != 2:
        return False
    known = {slots[0]: _PROBE[0], slots[1]: _PROBE[1]}
    # only which slots get filled matters; the probe values may overflow
    with np.errstate(all="ignore"):
        return len(propagate(crossings, known, strict=False)) == 4 * len(crossings)


def _find_inputs(t: Tangle) -> tuple:
    """First pair of ends (then any pair of slots) that determines the whole tangle."""
    corner_pairs = [("nw", "sw"), ("nw", "ne"), ("ne", "se"), ("sw", "se"), ("nw", "se"), ("ne", "sw")]
    for a, b in corner_pairs:
        sa, sb = t.corner_slot(a), t.corner_slot(b)
        if _determines(t.crossings, [sa, sb]):
            return ((sa, a), (sb, b))
    slots = [(c, p) for c in range(t.n_crossings) for p in range(4)]
    for i, sa in enumerate(slots):
        for sb in slots[i + 1 :]:
            if _determines(t.crossings, [sa, sb]):
                return ((sa, None), (sb, None))
    return None


def is_determined(t: Tangle) -> bool:
    """True when the two inputs fix the whole tangle by propagation."""
    return not t.parts


def zero_tangle() -> Tangle:
    """[0]: arcs nw-ne and sw-se, no crossings."""
    return Tangle((), {"nw": 0, "ne": 0, "sw": 1, "se": 1}, ("h", 0), ())


def twist(k: int, vertical: bool = False) -> Tangle:
    """[k] (horizontal) or [1/k] (vertical) twist region of |k| crossings."""
    if k == 0:
        if vertical:
            raise InvalidFraction("[1/0] is not a twist region")
        return zero_tangle()
    unit = crossing(1 if k > 0 else -1)
    out = unit
    op = "*" if vertical else "+"
    for _ in range(abs(k) - 1):
        out = compose(out, unit, op)
    leaf = ("v" if vertical else "h", k)
    if abs(k) == 1:
        leaf = ("x", k)
    out = Tangle(out.crossings, out.corners, leaf, ())
    return _with_inputs(out, ("nw", "ne") if vertical and abs(k) > 1 else ("nw", "sw"))


def fraction(tree) -> Fraction | None:
    """Tangle fraction by structural recursion; None stands for 1/0."""
    kind = tree[0]
    if kind in ("x", "h"):
        return Fraction(tree[1])
    if kind == "v":
        return Fraction(1, tree[1])
    if kind == "reflect":
        # a planar mirror negates the fraction
        f = fraction(tree[1])
        return None if f is None else -f
    a, b = fraction(tree[1]), fraction(tree[2])
    if kind == "+":
        if a is None or b is None:
            return None
        return a + b
    # vertical composition adds reciprocals
    ra = Fraction(0) if a is None else (None if a == 0 else 1 / a)
    rb = Fraction(0) if b is None else (None if b == 0 else 1 / b)
    if ra is None or rb is None:
        return Fraction(0)
    s = ra + rb
    return None if s == 0 else 1 / s


def cf_expand(p: int, q: int) -> list[int]:
    """Continued fraction [k_s; k_{s-1}, ..., k_1] of p/q, listed from k_s down.

    All partial quotients share the sign of p/q; only k_s may vanish.
    """
    if q == 0 or gcd(p, q) != 1:
        raise InvalidFraction(f"{p}/{q} is not a reduced fraction")
    sign = -1 if (p < 0) != (q < 0) else 1
    p, q = abs(p), abs(q)
    out = []
    while q:
        k, r = divmod(p, q)
        out.append(sign * k)
        p, q = q, r
    return out


def cf_value(ks: list[int]) -> Fraction:
    val = Fraction(ks[-1])
    for k in reversed(ks[:-1]):
        val = k + 1 / val
    return val


def build_rational_tangle(p: int, q: int) -> Tangle:
    ks = cf_expand(p, q)
    s = len(ks)
    seq = list(reversed(ks))  # k_1, ..., k_s
    tangle = None
    for j, k in enumerate(seq, start=1):
        horizontal = (s - j) % 2 == 0
        if k == 0:
            continue
        piece = twist(k, vertical=not horizontal)
        if tangle is None:
            tangle = piece
        else:
            tangle = compose(tangle, piece, "+" if horizontal else "*")
    if tangle is None:
        return zero_tangle()
    return tangle


# -- mini-language ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(\[p/q:\s*-?\d+\s*/\s*-?\d+\s*\]|\[\s*-?1\s*/\s*-?\d+\s*\]|\[\s*-?\d+\s*\]|[()+*])")


def parse_tangle(spec: str) -> Tangle:
    """Parse e.g. ``([3]*[1/2])+[1/2]``, ``[-1/3]`` or ``[p/q:-13/3]``.

    Grammar: expr := term (('+'|'*') term)*, left-associative, no precedence;
    term := '[' int ']' | '[1/' int ']' | '[-1/' int ']' | '[p/q:' int '/' int ']' | '(' expr ')'.
    """
    text = spec.replace("\u2212", "-")
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected input {text[pos:pos + 8]!r}", pos)
        tokens.append((m.group(1).replace(" ", ""), m.start(1)))
        pos = m.end()
    tokens.append(("$", len(text)))
    idx = 0

    def peek():
        return tokens[idx]

    def take():
        nonlocal idx
        tok = tokens[idx]
        idx += 1
        return tok

    def term():
        tok, at = take()
        if tok == "(":
            out = expr()
            close, at2 = take()
            if close != ")":
                raise ParseError("expected ')'", at2)
            return out
        if tok.startswith("[p/q:"):
            a, b = tok[5:-1].split("/")
            return build_rational_tangle(int(a), int(b))
        if tok.startswith("["):
            body = tok[1:-1]
            if "/" in body:
                num, den = (int(x) for x in body.split("/"))
                return twist(num * int(den), vertical=True)
            return twist(int(body))
        raise ParseError(f"expected a term, got {tok!r}", at)

    def expr():
        out = term()
        while peek()[0] in "+*":
            op, _ = take()
            out = compose(out, term(), op)
        return out

    result = expr()
    tok, at = peek()
    if tok != "$":
        raise ParseError(f"trailing input {tok!r}", at)
    return result


def to_spec(tree) -> str:
    kind = tree[0]
    if kind in ("x", "h"):
        return f"[{tree[1]}]"
    if kind == "v":
        return f"[1/{tree[1]}]" if tree[1] > 0 else f"[-1/{-tree[1]}]"
    if kind == "reflect":
        return f"reflect({to_spec(tree[1])})"
    return f"({to_spec(tree[1])}{kind}{to_spec(tree[2])})"


# -- representations -----------------------------------------------------------


@dataclass
class TangleRep:
    """Representation of a tangle, stored as incoming matrices per crossing slot."""

    tangle: Tangle
    slots: np.ndarray
    t: complex

    def end(self, corner: str) -> np.ndarray:
        """Value of the end at ``corner`` directed outward."""
        c, pos = self.tangle.corner_slot(corner)
        return mat2.adj(self.slots[c, pos])

    def residual(self) -> float:
        res = crossing_residuals(self.tangle.crossings, self.slots)
        return float(res.max()) if len(res) else 0.0

    def conjugate(self, c: np.ndarray) -> "TangleRep":
        return TangleRep(self.tangle, conjugate_slots(c, self.slots), self.t)


@dataclass
class BoundaryData:
    g: np.ndarray
    tr_h: complex
    tr_v: complex


def input_seeds(tangle: Tangle, inputs) -> dict:
    (s1, _), (s2, _) = tangle.inputs
    v1, v2 = inputs
    return {s1: _adj(v1), s2: _adj(v2)}


def _adj(x):
    return x.adj() if isinstance(x, PolyMat) else mat2.adj(x)


def rep_propagate(tangle: Tangle, inputs, t=None, branch: int | complex = 0) -> TangleRep:
    """Propagate two outward input values through the whole tangle.

    The inputs sit at the first twist leaf: its ``nw``/``sw`` ends for
    horizontal twists and single crossings, ``nw``/``ne`` for vertical twists.
    When those do not determine a composite, ``tangle.inputs`` names the
    replacement pair found by :func:`compose`, or the composite is solved
    piecewise (see :func:`glue_parts`) with ``branch`` picking the solution.
    """
    if t is None:
        t = mat2.tr(inputs[0])
    if tangle.parts:
        return glue_parts(tangle, inputs, t, branch)[0]
    vals = propagate(tangle.crossings, input_seeds(tangle, inputs))
    arr = slot_array(vals, tangle.n_crossings)
    return TangleRep(tangle, arr, complex(t))


# glued corners: (end of the left part, end of the right part)
_GLUED = {"+": (("ne", "nw"), ("se", "sw")), "*": (("sw", "nw"), ("se", "ne"))}


def glue_parts(tangle: Tangle, inputs, t, branch: int | complex = 0) -> tuple[TangleRep, complex, int]:
    """Representation of a composite the inputs do not determine.

    The left part is propagated from the inputs.  The right part is taken with
    inputs ``canonical_pair(t, u)`` where ``u`` solves the side-trace equation
    matching its glued ends to the left part's, and is then conjugated into
    place.  An integer ``branch`` indexes the roots ``u`` sorted by (Re, Im); a
    complex ``branch`` picks the root nearest to it.  Returns the rep, the
    chosen ``u`` and the number of roots.
    """
    t = complex(t)
    left, right = tangle.parts
    op = tangle.tree[0]
    (l1, r1), (l2, r2) = _GLUED[op]
    lrep = rep_propagate(left, inputs, t)
    p, q = mat2.adj(lrep.end(l1)), mat2.adj(lrep.end(l2))
    if right.parts:
        raise Underdetermined("the right part of a piecewise composite must be determined by its inputs")
    poly = side_trace_polynomial(right, (r1, r2), t).astype(complex)
    target = mat2.tr(p @ q)
    c = poly.copy()
    c[0] -= target
    scale = np.max(np.abs(c))
    while len(c) > 1 and abs(c[-1]) < 1e-13 * scale:
        c = c[:-1]
    if len(c) < 2:
        raise Underdetermined("the side trace of the right part does not depend on its inputs")
    roots = sorted((complex(r) for r in np.polynomial.polynomial.polyroots(c)), key=lex_key)
    if isinstance(branch, (int, np.integer)):
        u = roots[int(branch) % len(roots)]
    else:
        u = min(roots, key=lambda r: abs(r - branch))
    rrep = rep_at(right, t, u)
    g = align_pair((rrep.end(r1), rrep.end(r2)), (p, q))
    slots = np.concatenate([lrep.slots, conjugate_slots(g, rrep.slots)], axis=0)
    return TangleRep(tangle, slots, t), u, len(roots)


def boundary_data(rep: TangleRep) -> BoundaryData:
    g = rep.end("nw") @ rep.end("ne")
    gv = rep.end("sw") @ rep.end("nw")
    return BoundaryData(g, mat2.tr(g), mat2.tr(gv))


def twist_propagate(a0: np.ndarray, a1: np.ndarray, n: int) -> list[np.ndarray]:
    """a_2, ..., a_{n+1} for the twist [n]: a_{k+2} = (a_{k+1} a_k) a_k (a_{k+1} a_k)^-1."""
    seq = [a0, a1]
    for _ in range(n):
        prev, cur = seq[-2], seq[-1]
        h = cur @ prev
        seq.append(mat2.conj_by(h, prev))
    return seq[2:]


def eq34_check(a0: np.ndarray, a1: np.ndarray) -> tuple[float, float]:
    """Residuals of the trace formulas for tr(a1^-1 a3) and tr(a0^-1 a3)."""
    t = mat2.tr(a0)
    s = mat2.tr(a0 @ a1)
    a3 = twist_propagate(a0, a1, 2)[1]
    r1 = abs(mat2.tr(mat2.adj(a1) @ a3) - (2 + (s + 2 - t * t) * (s - 2)))
    r2 = abs(mat2.tr(mat2.adj(a0) @ a3) - (2 + (t * t - s - 2) * (s - 1) ** 2))
    return float(r1), float(r2)


def closure_pairs(closure: str) -> tuple[tuple[str, str], tuple[str, str]]:
    if closure == "N":
        return ("nw", "ne"), ("sw", "se")
    if closure == "D":
        return ("nw", "sw"), ("ne", "se")
    raise ValueError(f"closure must be 'N' or 'D', got {closure!r}")


def closure_defect(rep: TangleRep, closure: str) -> float:
    (a, b), (c, d) = closure_pairs(closure)
    e = mat2.eye()
    return max(
        mat2.dist(rep.end(a) @ rep.end(b), e),
        mat2.dist(rep.end(c) @ rep.end(d), e),
    )


def close(tangle: Tangle, closure: str, name: str = "") -> KnotDiagram:
    """Closed diagram N(T) or D(T); must have a single component."""
    (a, b), (c, d) = closure_pairs(closure)
    k = tangle.corners
    crossings, corners = _merge(tangle.crossings, dict(k), [(k[a], k[b]), (k[c], k[d])])
    crossings, _ = _compact(crossings, {})
    heads = orient_closed(crossings)
    return KnotDiagram(name or f"{closure}({to_spec(tangle.tree)})", crossings, heads)


def reflect(tangle: Tangle) -> Tangle:
    """Mirror image across a vertical line; crossings keep their over strand."""
    # mirrored order is (q0, q3, q2, q1); start it at the other under end
    crossings = tuple((q[2], q[1], q[0], q[3]) for q in tangle.crossings)
    k = tangle.corners
    corners = {"nw": k["ne"], "ne": k["nw"], "sw": k["se"], "se": k["sw"]}
    swap = {"nw": "ne", "ne": "nw", "sw": "se", "se": "sw"}
    flip = {0: 2, 1: 1, 2: 0, 3: 3}
    inputs = tuple(((s[0], flip[s[1]]), swap.get(c)) for s, c in tangle.inputs)
    return Tangle(crossings, corners, ("reflect", tangle.tree), inputs)


def reflect_rep(rep: TangleRep) -> TangleRep:
    """Transport a representation to the reflected tangle: rho'(a') = rho(a)."""
    arr = np.empty_like(rep.slots)
    flip = (2, 1, 0, 3)
    for pos in range(4):
        src = rep.slots[:, pos]
        arr[:, flip[pos]] = np.stack([mat2.adj(x) for x in src]) if len(src) else src
    return TangleRep(reflect(rep.tangle), arr, rep.t)


# -- closure roots -----------------------------------------------------------


def _poly_pair(t) -> tuple[PolyMat, PolyMat]:
    """canonical_pair(t, s) with entries polynomial in s."""
    t = complex(t)
    k = mat2.kappa_of(t)
    w = k - 1 / k
    y11 = np.array([-(t / k) / w, 1 / w])
    y22 = np.array([t, 0]) - y11
    y21 = np.convolve(y11, y22) - np.array([1, 0, 0])
    a1 = PolyMat.const(mat2.d(k))
    c = np.zeros((2, 2, 3), dtype=complex)
    c[0, 0, :2] = y11
    c[0, 1, 0] = 1
    c[1, 0] = y21
    c[1, 1, :2] = y22
    return a1, PolyMat(c)


def closure_polynomials(tangle: Tangle, closure: str, t) -> list[np.ndarray]:
    """Coefficients (low degree first) of the closure defect entries as polynomials in s."""
    a1, a2 = _poly_pair(t)
    vals = propagate(tangle.crossings, input_seeds(tangle, (a1, a2)))
    (a, b), _ = closure_pairs(closure)
    ea = vals[tangle.corner_slot(a)].adj()
    eb = vals[tangle.corner_slot(b)].adj()
    defect = ea @ eb - PolyMat.const(mat2.eye())
    return [np.trim_zeros(defect.c[i, j], "b") for i in range(2) for j in range(2)]


def rep_at(tangle: Tangle, t, s) -> TangleRep:
    return rep_propagate(tangle, canonical_pair(t, s), t)


def closure_roots(p, q=None, closure: str = "N", t=2.5, radius: float = 5.0, tol: float = 1e-8) -> list[complex]:
    """Irreducible closure parameters s = tr(in1 in2) with |s| <= radius.

    ``p`` is either a Tangle or the numerator of a rational tangle p/q.
    """
    return [s for s, _ in closure_reps(p, q, closure, t, radius, tol)]


def closure_reps(p, q=None, closure: str = "N", t=2.5, radius: float = 5.0, tol: float = 1e-8) -> list[tuple[complex, TangleRep]]:
    """Pairs (s, rep) of irreducible boundary reps closing up under ``closure``."""
    tangle = p if isinstance(p, Tangle) else build_rational_tangle(p, q)
    t = complex(t)
    if tangle.parts:
        cands = _scan_candidates(tangle, closure, t, radius)
    else:
        cands = [(complex(s), None) for s in _polynomial_candidates(tangle, closure, t)]
    out = []
    for s, hint in cands:
        if abs(s) > radius + 1e-3:
            continue
        s, hint = _refine(tangle, closure, t, s, hint)
        if s is None or abs(s) > radius or not in_B(t, s):
            continue
        rep = _rep_near(tangle, t, s, hint)
        if any(abs(s - r) < 1e-6 and mat2.dist(rep.slots[0, 0], x.slots[0, 0]) < 1e-6 for r, x in out):
            continue
        if closure_defect(rep, closure) >= tol:
            continue
        if _closed_residual(tangle, closure, rep) >= tol:
            continue
        out.append((s, rep))
    return sorted(out, key=lambda sr: lex_key(sr[0]))


def _polynomial_candidates(tangle, closure, t) -> list:
    cands = []
    for coeffs in closure_polynomials(tangle, closure, t):
        scale = np.max(np.abs(coeffs)) if len(coeffs) else 0.0
        if len(coeffs) < 2 or scale == 0:
            continue
        c = coeffs.copy()
        while len(c) > 1 and abs(c[-1]) < 1e-13 * scale:
            c = c[:-1]
        cands.extend(np.polynomial.polynomial.polyroots(c))
    return cands


def _rep_near(tangle, t, s, hint) -> TangleRep:
    rep = rep_at(tangle, t, s) if hint is None else rep_propagate(tangle, canonical_pair(t, s), t, hint)
    return rep


def _defect(tangle, closure, t, s, hint):
    """Closure defect entries at s and the branch actually used."""
    (a, b), _ = closure_pairs(closure)
    if hint is None:
        rep, u = rep_at(tangle, t, s), None
    else:
        rep, u, _ = glue_parts(tangle, canonical_pair(t, s), t, hint)
    return (rep.end(a) @ rep.end(b) - mat2.eye()).ravel(), u


_SOLVE_ERRORS = (CharvarError, np.linalg.LinAlgError, ZeroDivisionError)


def _scan_candidates(tangle, closure, t, radius, n: int = 21, keep: int = 12) -> list:
    """Grid starts for piecewise tangles: lowest-defect points of each branch."""
    xs = np.linspace(-radius, radius, n)
    pts = [complex(x, y) for x in xs for y in xs if abs(complex(x, y)) <= radius]
    scored = []
    for s in pts:
        if not in_B(t, s, 1e-3):
            continue
        try:
            _, _, nroots = glue_parts(tangle, canonical_pair(t, s), t, 0)
        except _SOLVE_ERRORS:
            continue
        for j in range(nroots):
            try:
                f, u = _defect(tangle, closure, t, s, j)
            except _SOLVE_ERRORS:
                continue
            scored.append((float(np.max(np.abs(f))), s, u))
    scored.sort(key=lambda x: x[0])
    return [(s, u) for _, s, u in scored[:keep]]


def _refine(tangle, closure, t, s, hint=None, steps: int = 40):
    """Gauss-Newton on the closure defect entries, derivative by central differences.

    For piecewise tangles ``hint`` tracks the right part's root by continuity.
    """
    for _ in range(steps):
        try:
            f, hint = _defect(tangle, closure, t, s, hint)
        except _SOLVE_ERRORS:
            return None, hint
        if np.max(np.abs(f)) < 1e-14:
            break
        h = 1e-7
        J = (_defect(tangle, closure, t, s + h, hint)[0] - _defect(tangle, closure, t, s - h, hint)[0]) / (2 * h)
        den = np.vdot(J, J).real
        if den == 0:
            return None, hint
        step = np.vdot(J, f) / den
        s = s - step
        if abs(step) < 1e-15 * max(1.0, abs(s)):
            break
    return complex(s), hint


def _closed_residual(tangle: Tangle, closure: str, rep: TangleRep) -> float:
    """Validate rep on the closed diagram (single component) or via the defect for links."""
    try:
        knot = close(tangle, closure)
    except ValueError:
        return closure_defect(rep, closure)
    res = crossing_residuals(knot.crossings, rep.slots)
    return float(res.max())


def side_trace_polynomial(tangle: Tangle, corners: tuple[str, str], t) -> np.ndarray:
    """tr(end_a end_b) as a polynomial in s = tr(in1 in2)."""
    a1, a2 = _poly_pair(t)
    vals = propagate(tangle.crossings, input_seeds(tangle, (a1, a2)))
    ea = vals[tangle.corner_slot(corners[0])].adj()
    eb = vals[tangle.corner_slot(corners[1])].adj()
    prod = (ea @ eb).c
    return np.trim_zeros(prod[0, 0] + prod[1, 1], "b")

"""Planar diagram core shared by tangles and closed knot diagrams.

A crossing is a 4-tuple of edge labels listed counterclockwise, starting with an
under-strand edge: positions 0 and 2 are the under strand, 1 and 3 the over
strand.  A representation is stored per *slot* ``(crossing, position)`` as the
matrix of the edge directed into the crossing at that slot.  Storing incoming
values makes the data independent of any orientation: the same edge read at its
other end carries the inverse matrix.

With this layout every crossing imposes

    I1 I3 = e,        I2 = I1^-1 I0^-1 I1,

and every edge joining slots A and B imposes ``I_A I_B = e``.  For an oriented
diagram this is the usual Wirtinger relation: the outgoing under-arc equals
``a (b) a^-1`` at a positive crossing with over-arc ``a`` and incoming
under-arc ``b``, and ``a^-1 (b) a`` at a negative one.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import mat2
from .errors import Underdetermined

Slot = tuple[int, int]


def edge_slots(crossings) -> dict[int, list[Slot]]:
    slots = defaultdict(list)
    for c, quad in enumerate(crossings):
        for pos, e in enumerate(quad):
            slots[e].append((c, pos))
    return dict(slots)


def _inv(x):
    return x.adj() if hasattr(x, "adj") else mat2.adj(x)


def propagate(crossings, known: dict, strict: bool = True) -> dict:
    """Fill slot values from seeds using the crossing and edge relations.

    Works for any matrix-like values supporting ``@`` (numpy arrays or
    :class:`PolyMat`).  Raises :class:`Underdetermined` in strict mode when some
    slot stays unknown.
    """
    vals = dict(known)
    partner = {}
    for e, slots in edge_slots(crossings).items():
        if len(slots) == 2:
            a, b = slots
            partner[a] = b
            partner[b] = a
    changed = True
    while changed:
        changed = False
        for s in list(vals):
            q = partner.get(s)
            if q is not None and q not in vals:
                vals[q] = _inv(vals[s])
                changed = True
        for c in range(len(crossings)):
            s0, s1, s2, s3 = (c, 0), (c, 1), (c, 2), (c, 3)
            if s1 not in vals and s3 in vals:
                vals[s1] = _inv(vals[s3])
                changed = True
            if s3 not in vals and s1 in vals:
                vals[s3] = _inv(vals[s1])
                changed = True
            if s1 in vals:
                over = vals[s1]
                if s0 in vals and s2 not in vals:
                    vals[s2] = _inv(over) @ _inv(vals[s0]) @ over
                    changed = True
                elif s2 in vals and s0 not in vals:
                    vals[s0] = over @ _inv(vals[s2]) @ _inv(over)
                    changed = True
    if strict:
        missing = [(c, p) for c in range(len(crossings)) for p in range(4) if (c, p) not in vals]
        if missing:
            raise Underdetermined(f"{len(missing)} slots undetermined, e.g. {missing[:3]}")
    return vals


def slot_array(vals: dict, ncross: int) -> np.ndarray:
    arr = np.empty((ncross, 4, 2, 2), dtype=complex)
    for (c, pos), x in vals.items():
        arr[c, pos] = x
    return arr


def crossing_residuals(crossings, arr: np.ndarray) -> np.ndarray:
    """Per-crossing max residual of the crossing relation and internal edge relations."""
    n = len(crossings)
    res = np.zeros(n)
    for c in range(n):
        i0, i1, i2, i3 = arr[c]
        r = max(
            mat2.dist(i1 @ i3, mat2.E),
            mat2.dist(i2, mat2.adj(i1) @ mat2.adj(i0) @ i1),
        )
        res[c] = r
    for e, slots in edge_slots(crossings).items():
        if len(slots) == 2:
            (ca, pa), (cb, pb) = slots
            r = mat2.dist(arr[ca, pa] @ arr[cb, pb], mat2.E)
            res[ca] = max(res[ca], r)
            res[cb] = max(res[cb], r)
    return res


def conjugate_slots(c: np.ndarray, arr: np.ndarray) -> np.ndarray:
    ci = mat2.adj(c)
    return np.einsum("ij,npjk,kl->npil", c, arr, ci)


def invert_slots(arr: np.ndarray) -> np.ndarray:
    out = np.empty_like(arr)
    out[..., 0, 0] = arr[..., 1, 1]
    out[..., 1, 1] = arr[..., 0, 0]
    out[..., 0, 1] = -arr[..., 0, 1]
    out[..., 1, 0] = -arr[..., 1, 0]
    return out


class PolyMat:
    """2x2 matrix whose entries are polynomials (coefficient arrays, low degree first)."""

    def __init__(self, coeffs: np.ndarray):
        self.c = np.asarray(coeffs, dtype=complex)

    @classmethod
    def const(cls, x: np.ndarray) -> "PolyMat":
        return cls(np.asarray(x, dtype=complex)[:, :, None])

    def __matmul__(self, other: "PolyMat") -> "PolyMat":
        da, db = self.c.shape[2], other.c.shape[2]
        out = np.zeros((2, 2, da + db - 1), dtype=complex)
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    out[i, j] += np.convolve(self.c[i, k], other.c[k, j])
        return PolyMat(out)

    def __sub__(self, other: "PolyMat") -> "PolyMat":
        n = max(self.c.shape[2], other.c.shape[2])
        out = np.zeros((2, 2, n), dtype=complex)
        out[:, :, : self.c.shape[2]] += self.c
        out[:, :, : other.c.shape[2]] -= other.c
        return PolyMat(out)

    def adj(self) -> "PolyMat":
        c = self.c
        return PolyMat(np.array([[c[1, 1], -c[0, 1]], [-c[1, 0], c[0, 0]]]))

    def __call__(self, s) -> np.ndarray:
        return np.polynomial.polynomial.polyval(complex(s), self.c.transpose(2, 0, 1))


@dataclass
class KnotDiagram:
    """Closed, oriented, single-component diagram with optional named boundary seeds.

    ``heads[e]`` is the slot the edge ``e`` points into.  ``seeds`` lists
    ``(name, slot, exponent)``: the edge at ``slot`` directed *away* from its
    crossing carries ``name ** exponent``.  A name may be seeded at several slots.
    ``parts`` maps a part label to its ``(first crossing, crossing count)``.
    """

    name: str
    crossings: tuple
    heads: dict
    seeds: tuple = ()
    preferred: str | None = None
    parts: dict = field(default_factory=dict)

    def __post_init__(self):
        self._slots = edge_slots(self.crossings)
        self.signs = tuple(self._sign(c) for c in range(len(self.crossings)))
        self.arcs = self._arcs()

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    def edge_at(self, slot: Slot) -> int:
        c, pos = slot
        return self.crossings[c][pos]

    def other_slot(self, slot: Slot) -> Slot:
        a, b = self._slots[self.edge_at(slot)]
        return b if a == slot else a

    def reversed(self) -> "KnotDiagram":
        """Same diagram with the orientation reversed."""
        heads = {e: self.other_slot(h) for e, h in self.heads.items()}
        return KnotDiagram(self.name, self.crossings, heads, self.seeds, self.preferred, self.parts)

    def enters(self, slot: Slot) -> bool:
        """True when the oriented edge at ``slot`` points into the crossing."""
        return self.heads[self.edge_at(slot)] == slot

    def _sign(self, c: int) -> int:
        du = 1 if self.enters((c, 0)) else -1
        do = 1 if self.enters((c, 1)) else -1
        return -du * do

    @property
    def writhe(self) -> int:
        return int(sum(self.signs))

    def _arcs(self) -> list[int]:
        parent = {e: e for e in self._slots}

        def find(e):
            while parent[e] != e:
                parent[e] = parent[parent[e]]
                e = parent[e]
            return e

        for quad in self.crossings:
            a, b = find(quad[1]), find(quad[3])
            if a != b:
                parent[a] = b
        roots = sorted({find(e) for e in self._slots})
        index = {r: i for i, r in enumerate(roots)}
        return [index[find(e)] for e in range(len(self._slots))]

    @property
    def n_arcs(self) -> int:
        return max(self.arcs) + 1

    def crossing_table(self) -> list[tuple[int, int, int, int]]:
        """(over arc, incoming under arc, outgoing under arc, sign) per crossing."""
        rows = []
        for c, quad in enumerate(self.crossings):
            if self.enters((c, 0)):
                u_in, u_out = quad[0], quad[2]
            else:
                u_in, u_out = quad[2], quad[0]
            rows.append((self.arcs[quad[1]], self.arcs[u_in], self.arcs[u_out], self.signs[c]))
        return rows

    def head_slot_of_seed(self, name: str) -> Slot:
        for n, slot, _ in self.seeds:
            if n == name:
                break
        else:
            raise KeyError(name)
        e = self.edge_at(slot)
        return self.heads[e]

    def longitude_walk(self, start: str | None = None) -> list[tuple[int, int, int]]:
        """Under-passes met walking once around the knot from the preferred arc.

        Each entry is ``(crossing, over arc, exponent)`` with exponent equal to
        minus the crossing sign.
        """
        start = start or self.preferred
        slot = self.head_slot_of_seed(start)
        first_edge = self.edge_at(slot)
        walk = []
        while True:
            c, pos = slot
            if pos in (0, 2):
                over_edge = self.crossings[c][1]
                walk.append((c, self.arcs[over_edge], -self.signs[c]))
            out = (c, (pos + 2) % 4)
            if self.edge_at(out) == first_edge:
                break
            slot = self.other_slot(out)
        return walk


def orient_closed(crossings) -> dict:
    """Orient a single-component closed diagram; returns edge -> head slot."""
    slots = edge_slots(crossings)
    for e, s in slots.items():
        if len(s) != 2:
            raise ValueError(f"edge {e} is not closed up (slots {s})")
    heads = {crossings[0][0]: (0, 0)}
    slot = (0, 0)
    while True:
        out = (slot[0], (slot[1] + 2) % 4)
        e_out = crossings[out[0]][out[1]]
        if e_out in heads:
            break
        a, b = slots[e_out]
        slot = b if a == out else a
        heads[e_out] = slot
    if len(heads) != len(slots):
        raise ValueError("diagram has more than one component")
    return heads

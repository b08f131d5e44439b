"""Generalized triangulations of closed oriented 3-manifolds.

A triangulation is a set of abstract tetrahedra whose 4n triangular faces
are glued in pairs by vertex bijections; simplices may self-identify.  This
module validates gluings, builds the skeleton (vertex/edge/face classes with
canonical edge orientations and signs), orients the tetrahedra, and computes
a basis of the mod-2 cocycle space together with the first Betti number.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

__all__ = [
    "Triangulation",
    "Skeleton",
    "OrientationData",
    "InvalidTriangulation",
    "NonOrientableError",
    "GuardExceeded",
    "EDGE_SLOTS",
    "SLOT_OF_PAIR",
    "parse_and_validate",
    "compute_skeleton",
    "orient",
    "z2_cocycle_basis",
    "enumerate_cocycles",
]

#: Vertex pairs of the six edge slots of a tetrahedron, in model order
#: a=01, b=02, c=12, d=23, e=13, f=03.
EDGE_SLOTS = ((0, 1), (0, 2), (1, 2), (2, 3), (1, 3), (0, 3))
SLOT_OF_PAIR = {frozenset(pair): k for k, pair in enumerate(EDGE_SLOTS)}

_PERM_PARITY_CACHE: dict[tuple[int, ...], int] = {}


def perm_parity(perm) -> int:
    """+1 for even permutations of (0,1,2,3), -1 for odd."""
    key = tuple(perm)
    cached = _PERM_PARITY_CACHE.get(key)
    if cached is not None:
        return cached
    p = list(key)
    parity = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            parity = -parity
    _PERM_PARITY_CACHE[key] = parity
    return parity


class InvalidTriangulation(ValueError):
    pass


class NonOrientableError(ValueError):
    def __init__(self, message, cycle=None):
        super().__init__(message)
        self.cycle = cycle or []


class GuardExceeded(RuntimeError):
    pass


class Triangulation:
    """n tetrahedra with, for each face slot (t, f) where face f is opposite
    vertex f, a target (t', sigma) with sigma a 4-permutation mapping vertex
    slots of t to vertex slots of t' (and so face f to face sigma[f])."""

    __slots__ = ("n", "gluings")

    def __init__(self, n: int, gluings):
        self.n = n
        self.gluings = tuple(
            tuple((t2, tuple(perm)) for t2, perm in tet) for tet in gluings
        )
        self._validate()

    def _validate(self):
        if self.n < 1:
            raise InvalidTriangulation("need at least one tetrahedron")
        if len(self.gluings) != self.n:
            raise InvalidTriangulation("gluing table length differs from tetrahedron count")
        for t, tet in enumerate(self.gluings):
            if len(tet) != 4:
                raise InvalidTriangulation(f"tetrahedron {t} needs exactly 4 face entries")
            for f, entry in enumerate(tet):
                if entry is None or entry[0] is None:
                    raise InvalidTriangulation(
                        f"face ({t},{f}) is unglued: the triangulation is not closed"
                    )
                t2, perm = entry
                if not (0 <= t2 < self.n):
                    raise InvalidTriangulation(f"face ({t},{f}): tetrahedron {t2} out of range")
                if sorted(perm) != [0, 1, 2, 3]:
                    raise InvalidTriangulation(f"face ({t},{f}): {perm} is not a permutation")
                f2 = perm[f]
                if (t2, f2) == (t, f):
                    raise InvalidTriangulation(f"face ({t},{f}) is glued to itself")
                back_t, back_perm = self.gluings[t2][f2]
                inverse = tuple(perm.index(v) for v in range(4))
                if back_t != t or back_perm != inverse:
                    raise InvalidTriangulation(
                        f"gluing of face ({t},{f}) disagrees with its partner ({t2},{f2})"
                    )
        # connectedness
        seen = {0}
        stack = [0]
        while stack:
            t = stack.pop()
            for t2, _ in self.gluings[t]:
                if t2 not in seen:
                    seen.add(t2)
                    stack.append(t2)
        if len(seen) != self.n:
            raise InvalidTriangulation("triangulation is not connected")

    # -- relabelings --------------------------------------------------------

    def permuted(self, order) -> "Triangulation":
        """Relabel tetrahedra so that new tetrahedron i is old tetrahedron
        order[i]; purely cosmetic."""
        order = list(order)
        inverse = [0] * self.n
        for new, old in enumerate(order):
            inverse[old] = new
        gluings = []
        for old in order:
            tet = []
            for f in range(4):
                t2, perm = self.gluings[old][f]
                tet.append((inverse[t2], perm))
            gluings.append(tet)
        return Triangulation(self.n, gluings)

    def relabeled(self, vertex_perms) -> "Triangulation":
        """Apply a vertex-slot permutation rho_t to each tetrahedron: new
        slot rho_t(v) plays the role of old slot v.  Odd permutations on all
        tetrahedra reverse the global orientation."""
        rhos = [tuple(p) for p in vertex_perms]
        inv = [tuple(p.index(v) for v in range(4)) for p in rhos]
        gluings = []
        for t in range(self.n):
            tet = [None] * 4
            for new_f in range(4):
                old_f = inv[t][new_f]
                t2, perm = self.gluings[t][old_f]
                new_perm = tuple(rhos[t2][perm[inv[t][v]]] for v in range(4))
                tet[new_f] = (t2, new_perm)
            gluings.append(tet)
        return Triangulation(self.n, gluings)

    def reflected(self) -> "Triangulation":
        """Reverse the global orientation by swapping slots 0 and 1 everywhere."""
        swap = (1, 0, 2, 3)
        return self.relabeled([swap] * self.n)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "tetrahedra": self.n,
            "gluings": [
                [[t2, list(perm)] for t2, perm in tet] for tet in self.gluings
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "Triangulation":
        try:
            n = int(data["tetrahedra"])
            raw = data["gluings"]
        except (KeyError, TypeError) as exc:
            raise InvalidTriangulation(f"missing field: {exc}") from exc
        gluings = []
        for t, tet in enumerate(raw):
            entries = []
            for f, entry in enumerate(tet):
                if entry is None:
                    raise InvalidTriangulation(
                        f"face ({t},{f}) is null: the triangulation is not closed"
                    )
                t2, perm = entry
                entries.append((int(t2), tuple(int(v) for v in perm)))
            gluings.append(entries)
        return Triangulation(n, gluings)


def parse_and_validate(source) -> Triangulation:
    """Load a triangulation from a JSON file path, file object or dict."""
    if isinstance(source, dict):
        return Triangulation.from_json(source)
    if hasattr(source, "read"):
        return Triangulation.from_json(json.load(source))
    with open(source, "r", encoding="utf-8") as fh:
        return Triangulation.from_json(json.load(fh))


class _SignedUnionFind:
    """Union-find whose members carry a sign relative to their root."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.sign = [1] * n

    def find(self, x: int) -> tuple[int, int]:
        if self.parent[x] == x:
            return x, 1
        root, s = self.find(self.parent[x])
        self.parent[x] = root
        self.sign[x] *= s
        return root, self.sign[x]

    def union(self, x: int, y: int, rel_sign: int) -> bool:
        """Declare sign(x) * sign(y) relation: y = rel_sign * x.

        Returns False on a parity conflict."""
        rx, sx = self.find(x)
        ry, sy = self.find(y)
        if rx == ry:
            return sx * rel_sign == sy
        self.parent[ry] = rx
        self.sign[ry] = sx * rel_sign * sy  # so that sign(y) becomes sx*rel_sign
        return True


@dataclass(frozen=True)
class OrientationData:
    """Sign per tetrahedron; for every gluing O(t) * O(t') = -parity(sigma)."""

    signs: tuple[int, ...]


class Skeleton:
    """Identification classes of the vertices, edges and faces, with a
    canonical orientation per edge class transported to every member.

    edge_of[(t, slot)] = (edge class, sign): sign +1 when the class
    orientation runs along the local low-to-high vertex direction of the
    slot, -1 otherwise.
    """

    def __init__(self, tri: Triangulation, orientation_flips=None):
        n = tri.n
        self.tri = tri

        # --- edges: signed union-find over 6n local edge slots
        uf = _SignedUnionFind(6 * n)
        for t in range(n):
            for f in range(4):
                t2, perm = tri.gluings[t][f]
                for u in range(4):
                    if u == f:
                        continue
                    for v in range(u + 1, 4):
                        if v == f:
                            continue
                        slot = SLOT_OF_PAIR[frozenset((u, v))]
                        pu, pv = perm[u], perm[v]
                        slot2 = SLOT_OF_PAIR[frozenset((pu, pv))]
                        rel = 1 if pu < pv else -1
                        if not uf.union(6 * t + slot, 6 * t2 + slot2, rel):
                            raise InvalidTriangulation(
                                f"edge ({t},{EDGE_SLOTS[slot]}) is identified with "
                                "itself in reverse; not a manifold edge"
                            )
        roots: dict[int, int] = {}
        members: list[list[tuple[int, int, int]]] = []
        edge_of: dict[tuple[int, int], tuple[int, int]] = {}
        for t in range(n):
            for slot in range(6):
                root, sign = uf.find(6 * t + slot)
                if root not in roots:
                    roots[root] = len(members)
                    members.append([])
                cls = roots[root]
                members[cls].append((t, slot, sign))
                edge_of[(t, slot)] = (cls, sign)
        # canonical orientation: sign +1 on the minimal (t, slot) member
        flips = [1] * len(members)
        for cls, mems in enumerate(members):
            t0, slot0, sign0 = min(mems)
            if sign0 < 0:
                flips[cls] = -1
        if orientation_flips is not None:
            for cls, flip in enumerate(orientation_flips):
                if flip:
                    flips[cls] *= -1
        self.edge_of = {
            key: (cls, sign * flips[cls]) for key, (cls, sign) in edge_of.items()
        }
        self.edge_members = [
            [(t, slot, sign * flips[cls]) for t, slot, sign in mems]
            for cls, mems in enumerate(members)
        ]
        self.num_edges = len(members)

        # --- faces: glued in pairs
        face_of: dict[tuple[int, int], int] = {}
        face_classes: list[tuple[tuple[int, int], tuple[int, int]]] = []
        for t in range(n):
            for f in range(4):
                if (t, f) in face_of:
                    continue
                t2, perm = tri.gluings[t][f]
                face_of[(t, f)] = len(face_classes)
                face_of[(t2, perm[f])] = len(face_classes)
                face_classes.append(((t, f), (t2, perm[f])))
        self.face_of = face_of
        self.face_classes = face_classes
        self.num_faces = len(face_classes)

        # --- vertices
        vuf = _SignedUnionFind(4 * n)
        for t in range(n):
            for f in range(4):
                t2, perm = tri.gluings[t][f]
                for v in range(4):
                    if v != f:
                        vuf.union(4 * t + v, 4 * t2 + perm[v], 1)
        vroots: dict[int, int] = {}
        vertex_of: dict[tuple[int, int], int] = {}
        for t in range(n):
            for v in range(4):
                root, _ = vuf.find(4 * t + v)
                if root not in vroots:
                    vroots[root] = len(vroots)
                vertex_of[(t, v)] = vroots[root]
        self.vertex_of = vertex_of
        self.num_vertices = len(vroots)

        if self.num_vertices - self.num_edges + self.num_faces - n != 0:
            raise InvalidTriangulation(
                "Euler characteristic is nonzero: not a closed 3-manifold "
                f"(V={self.num_vertices}, E={self.num_edges}, "
                f"F={self.num_faces}, T={n})"
            )

    def edge_endpoints(self, cls: int) -> tuple[int, int]:
        """(tail, head) vertex classes of the canonical orientation."""
        t, slot, sign = min(self.edge_members[cls])
        u, v = EDGE_SLOTS[slot]
        if sign < 0:
            u, v = v, u
        return self.vertex_of[(t, u)], self.vertex_of[(t, v)]

    def face_edge_classes(self, cls: int) -> list[int]:
        """Edge classes of the three sides of a face class (with repeats)."""
        (t, f), _ = self.face_classes[cls]
        verts = [v for v in range(4) if v != f]
        out = []
        for i in range(3):
            for j in range(i + 1, 3):
                slot = SLOT_OF_PAIR[frozenset((verts[i], verts[j]))]
                out.append(self.edge_of[(t, slot)][0])
        return out


def compute_skeleton(tri: Triangulation, orientation_flips=None) -> Skeleton:
    return Skeleton(tri, orientation_flips)


def orient(tri: Triangulation) -> OrientationData:
    """Propagate tetrahedron signs across gluings: O(t)O(t') = -parity(sigma).

    Raises NonOrientableError carrying an offending cycle of tetrahedra when
    no consistent assignment exists."""
    signs = [0] * tri.n
    signs[0] = 1
    parent = {0: None}
    queue = [0]
    while queue:
        t = queue.pop(0)
        for f in range(4):
            t2, perm = tri.gluings[t][f]
            required = -perm_parity(perm) * signs[t]
            if signs[t2] == 0:
                signs[t2] = required
                parent[t2] = t
                queue.append(t2)
            elif signs[t2] != required:
                cycle = [t2]
                node = t
                while node is not None:
                    cycle.append(node)
                    node = parent[node]
                raise NonOrientableError(
                    f"triangulation is non-orientable (conflict on gluing ({t},{f}))",
                    cycle=cycle,
                )
    return OrientationData(tuple(signs))


# ---------------------------------------------------------------------------
# Mod-2 cohomology
# ---------------------------------------------------------------------------


def _gf2_kernel(rows: list[int], num_cols: int) -> list[int]:
    """Kernel basis of a GF(2) matrix given as row bitmasks."""
    work = [r for r in rows if r]
    pivots: list[tuple[int, int]] = []  # (column, row value)
    for row in work:
        for col, rowval in pivots:
            if (row >> col) & 1:
                row ^= rowval
        if row:
            col = (row & -row).bit_length() - 1
            pivots.append((col, row))
    pivot_cols = {col for col, _ in pivots}
    # back-substitute to reduced form
    pivots.sort()
    reduced = []
    for idx, (col, row) in enumerate(pivots):
        for col2, row2 in pivots[idx + 1:]:
            if (row >> col2) & 1:
                row ^= row2
        reduced.append((col, row))
    basis = []
    for free in range(num_cols):
        if free in pivot_cols:
            continue
        vec = 1 << free
        for col, row in reduced:
            if (row >> free) & 1:
                vec |= 1 << col
        basis.append(vec)
    return basis


def _gf2_rank(rows: list[int]) -> int:
    basis: list[int] = []
    for row in rows:
        for b in basis:
            low = b & -b
            if row & low:
                row ^= b
        if row:
            basis.append(row)
            basis.sort(key=lambda r: r & -r)
    return len(basis)


def z2_cocycle_basis(tri: Triangulation, skel: Skeleton) -> tuple[list[int], int]:
    """(basis of Z^1 as edge-class bitmasks, first Betti number).

    Z^1 is the kernel of the coboundary matrix from edges to faces over
    GF(2); beta_1 = dim Z^1 - rank of the coboundary from vertices to edges.
    """
    rows = []
    for f in range(skel.num_faces):
        mask = 0
        for e in skel.face_edge_classes(f):
            mask ^= 1 << e
        rows.append(mask)
    basis = _gf2_kernel(rows, skel.num_edges)
    # coboundary C^0 -> C^1: edge row has bits at its endpoint vertex classes
    vrows = []
    for e in range(skel.num_edges):
        tail, head = skel.edge_endpoints(e)
        vrows.append((1 << tail) ^ (1 << head))
    b1 = len(basis) - _gf2_rank(vrows)
    return basis, b1


def enumerate_cocycles(basis: list[int], guard: int = 2 ** 30):
    """All 2^dim sums of basis elements, each exactly once, zero first.

    Uses Gray-code order so successive cocycles differ by one basis vector.
    """
    k = len(basis)
    if 2 ** k > guard:
        raise GuardExceeded(
            f"cocycle space has 2^{k} elements, above the enumeration guard {guard}; "
            "raise --max-cocycles to proceed"
        )
    current = 0
    yield current
    for i in range(1, 2 ** k):
        bit = (i & -i).bit_length() - 1
        current ^= basis[bit]
        yield current


def is_cocycle(skel: Skeleton, alpha: int) -> bool:
    for f in range(skel.num_faces):
        total = 0
        for e in skel.face_edge_classes(f):
            total ^= (alpha >> e) & 1
        if total:
            return False
    return True


def random_orientation_flips(num_edges: int, rng: random.Random) -> list[int]:
    return [rng.randint(0, 1) for _ in range(num_edges)]

#!/usr/bin/env python3
"""Solve for the Frobenius-Schur correction of the tetrahedron weights.

Ansatz: for nu < 0 each tetrahedron's weight carries an extra sign
(-1)^(g0(P) + sum_{s in flags} w(P, s)), where P is the m-slot pattern of
the tetrahedron, flags are the m-slots whose edge orientation was dualized
against the model direction, and g0, w are unknown GF(2) tables (possibly
depending on the tetrahedron's orientation sign).

Per-cocycle partial sums must be invariant under model relabelings and edge
orientation flips, and totals must match known values; each such probe pair
yields one linear equation over GF(2).  This script collects the equations,
solves the system, and prints the solution space.
"""

from __future__ import annotations

import itertools
import random
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tyinv.abelian import FinAbGroup, validate_bicharacter
from tyinv.statesum import (
    EVEN_PERMUTATIONS,
    ColoringContext,
    partial_state_sum,
)
from tyinv.triangulation import (
    Skeleton,
    enumerate_cocycles,
    parse_and_validate,
    z2_cocycle_basis,
)
from tyinv.tycat import TYData

CORPUS = Path(__file__).resolve().parent.parent / "src" / "tyinv" / "corpus"

TRIANGLES = {
    frozenset((0, 1, 5)): "tri0",
    frozenset((0, 2, 4)): "tri1",
    frozenset((1, 2, 3)): "tri2",
    frozenset((3, 4, 5)): "tri3",
}
QUADS = {
    frozenset((1, 2, 4, 5)): "quad_ad",
    frozenset((0, 2, 3, 5)): "quad_be",
    frozenset((0, 1, 3, 4)): "quad_cf",
}


def make_ty(orders, gram, sign):
    G = FinAbGroup(orders)
    return TYData(G, validate_bicharacter(G, gram), sign)


def load(name):
    return parse_and_validate(str(CORPUS / f"{name}.json"))


def pattern_name(m_slots):
    if not m_slots:
        return None
    if len(m_slots) == 3:
        return TRIANGLES[m_slots]
    return QUADS[m_slots]


class Unknowns:
    """One GF(2) unknown per (pattern, orientation, flag subset): the most
    general per-tetrahedron sign rule."""

    def __init__(self, sign_dependent: bool):
        self.sign_dependent = sign_dependent
        self.index = {}
        for pat, slots in [
            ("tri0", (0, 1, 5)),
            ("tri1", (0, 2, 4)),
            ("tri2", (1, 2, 3)),
            ("tri3", (3, 4, 5)),
            ("quad_ad", (1, 2, 4, 5)),
            ("quad_be", (0, 2, 3, 5)),
            ("quad_cf", (0, 1, 3, 4)),
        ]:
            signs = (1, -1) if sign_dependent else (0,)
            subsets = []
            for r in range(len(slots) + 1):
                subsets.extend(itertools.combinations(slots, r))
            for sg in signs:
                for sub in subsets:
                    self.index[(pat, sg, frozenset(sub))] = len(self.index)
        self.index[("face", True)] = len(self.index)
        self.index[("face", False)] = len(self.index)

    def key_sign(self, sign):
        return sign if self.sign_dependent else 0

    def vector(self, ctx, alpha):
        """Correction vector (as a bitmask over unknowns) for one cocycle."""
        vec = 0
        for t in range(ctx.tri.n):
            m_slots = frozenset(
                s for s in range(6) if (alpha >> ctx.slot_table[t][s][0]) & 1
            )
            pat = pattern_name(m_slots)
            if pat is None:
                continue
            sg = self.key_sign(ctx.orientation.signs[t])
            flags = frozenset(s for s in m_slots if ctx.slot_table[t][s][1])
            vec ^= 1 << self.index[(pat, sg, flags)]
        for key in face_keys(ctx, alpha):
            vec ^= 1 << self.index[key]
        return vec


from tyinv.triangulation import EDGE_SLOTS, SLOT_OF_PAIR


def face_keys(ctx, alpha):
    """Per-face correction keys for faces with two m-edges: whether the two
    m-edges' canonical orientations point coherently at their shared vertex."""
    skel = ctx.skel
    keys = []
    for fc in range(skel.num_faces):
        (t, f), _ = skel.face_classes[fc]
        verts = [v for v in range(4) if v != f]
        edges = []
        for i in range(3):
            for j in range(i + 1, 3):
                u, v = verts[i], verts[j]
                slot = SLOT_OF_PAIR[frozenset((u, v))]
                cls, sign = skel.edge_of[(t, slot)]
                edges.append((u, v, cls, sign))
        m_edges = [e for e in edges if (alpha >> e[2]) & 1]
        if len(m_edges) != 2:
            continue
        (u1, v1, _, s1), (u2, v2, _, s2) = m_edges
        shared = ({u1, v1} & {u2, v2}).pop()
        # class orientation points toward the shared vertex?
        d1 = (s1 > 0) == (v1 == shared)
        d2 = (s2 > 0) == (v2 == shared)
        keys.append(("face", d1 == d2))
    return keys


def collect_equations(unknowns, ty, fixtures, rng, num_random=40):
    """Equations: (mask, rhs) meaning <mask, x> = rhs over GF(2)."""
    equations = []
    impossible = []
    for name in fixtures:
        tri = load(name)
        skel = Skeleton(tri)
        basis, _ = z2_cocycle_basis(tri, skel)
        cocycles = list(enumerate_cocycles(basis))

        probes = [(None, None)]
        for t in range(tri.n):
            for p in EVEN_PERMUTATIONS[1:]:
                models = [tuple(range(4))] * tri.n
                models[t] = p
                probes.append((None, models))
        for e in range(skel.num_edges):
            flips = [0] * skel.num_edges
            flips[e] = 1
            probes.append((list(flips), None))
        for _ in range(num_random):
            flips = [rng.randint(0, 1) for _ in range(skel.num_edges)]
            models = [rng.choice(EVEN_PERMUTATIONS) for _ in range(tri.n)]
            probes.append((flips, models))

        per_probe = []
        for flips, models in probes:
            sk = Skeleton(tri, flips) if flips else skel
            ctx = ColoringContext(tri, ty, skel=sk, models=models)
            entries = []
            for alpha in cocycles:
                value = partial_state_sum(ctx, alpha)
                entries.append((value, unknowns.vector(ctx, alpha)))
            per_probe.append(entries)

        base = per_probe[0]
        for entries in per_probe[1:]:
            for (v0, c0), (v1, c1) in zip(base, entries):
                if v0.is_zero() and v1.is_zero():
                    continue
                if v0 == v1:
                    rhs = 0
                elif v0 == -1 * v1:
                    rhs = 1
                else:
                    impossible.append(name)
                    continue
                equations.append((c0 ^ c1, rhs))
    return equations, impossible


def solve_gf2(equations, nvars):
    """Row-reduce; returns (particular solution bitmask, free basis) or None."""
    rows = []
    for mask, rhs in equations:
        row = (mask << 1) | rhs
        for r in rows:
            if (row >> 1) & -(r >> 1) & ((r >> 1) & -(r >> 1)):
                pass
        rows.append(row)
    # standard elimination on (mask, rhs) with rhs as bit 0
    pivots = {}
    for mask, rhs in equations:
        row = mask
        b = rhs
        placed = False
        while row:
            p = row.bit_length() - 1
            if p in pivots:
                prow, pb = pivots[p]
                row ^= prow
                b ^= pb
            else:
                pivots[p] = (row, b)
                placed = True
                break
        if not placed and b:
            return None
    # back-substitute for a particular solution: set free vars to 0
    solution = 0
    for p in sorted(pivots, reverse=True):
        prow, pb = pivots[p]
        val = pb
        rest = prow & ~(1 << p)
        while rest:
            q = rest.bit_length() - 1
            val ^= (solution >> q) & 1
            rest &= ~(1 << q)
        if val:
            solution |= 1 << p
    free = [v for v in range(nvars) if v not in pivots]
    return solution, free, pivots


def main():
    rng = random.Random(99)
    fixtures = ["rp3", "s3_two_tet", "rp3_three_tet", "s2xs1", "l31", "s3_three_tet"]
    for sign_dependent in (False, True):
        unknowns = Unknowns(sign_dependent)
        n = len(unknowns.index)
        print(f"--- ansatz sign_dependent={sign_dependent}: {n} unknowns")
        eqs = []
        dead = []
        for ty_label, ty in [
            ("z2-", make_ty([2], [["1/2"]], -1)),
            ("z4-", make_ty([4], [["1/4"]], -1)),
            ("z2z2h-", make_ty([2, 2], [["0", "1/2"], ["1/2", "0"]], -1)),
        ]:
            e, imp = collect_equations(unknowns, ty, fixtures, rng)
            eqs.extend(e)
            dead.extend((ty_label, x) for x in imp)
        print(f"  {len(eqs)} equations, {len(dead)} impossible probes")
        if dead:
            print("  ansatz contradicted:", dead[:5])
            continue
        result = solve_gf2(eqs, n)
        if result is None:
            print("  system inconsistent")
            continue
        solution, free, pivots = result
        print(f"  solvable; {len(free)} free variables")
        names = {v: k for k, v in unknowns.index.items()}
        set_vars = [names[v] for v in range(n) if (solution >> v) & 1]
        print("  particular solution sets:", set_vars)
        print("  free:", [names[v] for v in free])
        return


if __name__ == "__main__":
    main()

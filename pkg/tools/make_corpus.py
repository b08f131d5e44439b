#!/usr/bin/env python3
"""Generate the bundled triangulation corpus.

Small fixtures are found by exhaustive search over 1- and 2-tetrahedron
gluing tables and identified by integral first homology (within this size
range that pins the manifold: the only closed orientable 3-manifolds with at
most three tetrahedra are lens spaces, S^2 x S^1 and S^3, and H_1
distinguishes them).  Larger fixtures are produced by 2-3 moves, which
preserve the homeomorphism type and the vertex count, and by cutting two
closed triangulations along one internal face each and cross-gluing the
resulting two-triangle boundary spheres, which realizes a connected sum.

Run from the repository root:  python3 tools/make_corpus.py
"""

from __future__ import annotations

import itertools
import json
import math
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tyinv.abelian import _snf_full, prime_power_split  # noqa: E402
from tyinv.triangulation import (  # noqa: E402
    EDGE_SLOTS,
    SLOT_OF_PAIR,
    InvalidTriangulation,
    NonOrientableError,
    Skeleton,
    Triangulation,
    orient,
    z2_cocycle_basis,
)

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "tyinv" / "corpus"

ALL_PERMS = list(itertools.permutations(range(4)))


# ---------------------------------------------------------------------------
# integral homology H_1 (verification only)
# ---------------------------------------------------------------------------


def integral_h1(tri: Triangulation):
    """(torsion invariant factors, free rank) of H_1 with Z coefficients."""
    skel = Skeleton(tri)
    E, V, F = skel.num_edges, skel.num_vertices, skel.num_faces
    # boundary of edges: head - tail
    d1 = [[0] * E for _ in range(V)]
    for e in range(E):
        tail, head = skel.edge_endpoints(e)
        d1[head][e] += 1
        d1[tail][e] -= 1
    # boundary of faces in terms of oriented edge classes
    d2 = [[0] * F for _ in range(E)]
    for f in range(F):
        (t, fv), _ = skel.face_classes[f]
        x, y, z = [v for v in range(4) if v != fv]
        for (u, v), coeff in (((y, z), 1), ((x, z), -1), ((x, y), 1)):
            slot = SLOT_OF_PAIR[frozenset((u, v))]
            cls, sign = skel.edge_of[(t, slot)]
            d2[cls][f] += coeff * sign
    # sanity: d1 * d2 = 0
    for v in range(V):
        for f in range(F):
            assert sum(d1[v][e] * d2[e][f] for e in range(E)) == 0
    # kernel of d1
    dmat, u, vmat, _ = _snf_full(d1)
    rank1 = sum(1 for i in range(min(V, E)) if dmat[i][i] != 0)
    kernel = [[u[i][j] for i in range(E)] for j in range(rank1, E)]  # columns
    k = len(kernel)
    # express im d2 in kernel coordinates: solve K X = d2
    # K = V^-1 D U^-1 with SNF of K itself
    K = [[kernel[j][i] for j in range(k)] for i in range(E)]
    dK, uK, vK, _ = _snf_full(K)
    rankK = sum(1 for i in range(min(E, k)) if dK[i][i] != 0)
    assert rankK == k
    X = []
    for f in range(F):
        col = [d2[e][f] for e in range(E)]
        vb = [sum(vK[i][e] * col[e] for e in range(E)) for i in range(E)]
        y = []
        for i in range(E):
            if i < k:
                assert vb[i] % dK[i][i] == 0
                y.append(vb[i] // dK[i][i])
            else:
                assert vb[i] == 0, "face boundary is not a cycle"
        X.append([sum(uK[i][j] * y[j] for j in range(k)) for i in range(k)])
    Xmat = [[X[f][i] for f in range(F)] for i in range(k)]
    dX, _, _, _ = _snf_full(Xmat)
    rankX = sum(1 for i in range(min(k, F)) if dX[i][i] != 0)
    torsion = []
    for i in range(rankX):
        if dX[i][i] > 1:
            torsion.extend(prime_power_split(dX[i][i]))
    return sorted(torsion), k - rankX


def describe(tri: Triangulation):
    skel = Skeleton(tri)
    try:
        orient(tri)
        orientable = True
    except NonOrientableError:
        orientable = False
    tor, rank = integral_h1(tri) if orientable else ([], -1)
    basis, b1 = z2_cocycle_basis(tri, skel)
    return {
        "tets": tri.n,
        "vertices": skel.num_vertices,
        "edges": skel.num_edges,
        "faces": skel.num_faces,
        "orientable": orientable,
        "h1_torsion": tor,
        "h1_rank": rank,
        "betti1_mod2": b1,
        "dim_z1": len(basis),
    }


# ---------------------------------------------------------------------------
# exhaustive searches
# ---------------------------------------------------------------------------


def one_tet_candidates():
    pairings = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]
    for (fa, fb), (fc, fd) in pairings:
        for p1 in ALL_PERMS:
            if p1[fa] != fb:
                continue
            for p2 in ALL_PERMS:
                if p2[fc] != fd:
                    continue
                glu = [[None] * 4]
                inv1 = tuple(p1.index(v) for v in range(4))
                inv2 = tuple(p2.index(v) for v in range(4))
                glu[0][fa] = (0, p1)
                glu[0][fb] = (0, inv1)
                glu[0][fc] = (0, p2)
                glu[0][fd] = (0, inv2)
                try:
                    yield Triangulation(1, glu)
                except InvalidTriangulation:
                    continue


def two_tet_candidates():
    """All closed 2-tetrahedron triangulations (many isomorphic repeats)."""
    slots = [(0, f) for f in range(4)] + [(1, f) for f in range(4)]

    def pairings(avail):
        if not avail:
            yield []
            return
        first = avail[0]
        for j in range(1, len(avail)):
            rest = avail[1:j] + avail[j + 1:]
            for tail in pairings(rest):
                yield [(first, avail[j])] + tail

    for pairing in pairings(slots):
        valid = [
            [p for p in ALL_PERMS if p[f1] == f2]
            for (t1, f1), (t2, f2) in pairing
        ]
        for perms in itertools.product(*valid):
            glu = [[None] * 4 for _ in range(2)]
            for ((t1, f1), (t2, f2)), perm in zip(pairing, perms):
                inv = tuple(perm.index(v) for v in range(4))
                glu[t1][f1] = (t2, perm)
                glu[t2][f2] = (t1, inv)
            try:
                yield Triangulation(2, glu)
            except InvalidTriangulation:
                continue


def find_fixture(candidates, predicate, label):
    for tri in candidates:
        try:
            info = describe(tri)
        except InvalidTriangulation:
            continue
        if predicate(info):
            print(f"  {label}: {info}")
            return tri, info
    raise SystemExit(f"no fixture found for {label}")


# ---------------------------------------------------------------------------
# 2-3 move
# ---------------------------------------------------------------------------


def slot_of_base(i: int, x: int) -> int:
    """Slot (2 or 3) holding base vertex x inside new tetrahedron N_i."""
    j, k = sorted(set(range(3)) - {i})
    return 2 if x == j else 3


def two_three_move(tri: Triangulation, t_a: int, f_a: int) -> Triangulation:
    """Replace the two distinct tetrahedra glued along face (t_a, f_a) by
    three tetrahedra around a new edge joining the two apexes."""
    t_b, sigma = tri.gluings[t_a][f_a]
    assert t_a != t_b, "2-3 move needs two distinct tetrahedra"
    f_b = sigma[f_a]
    base = sorted(set(range(4)) - {f_a})  # p_0 < p_1 < p_2 in t_a

    # vertex maps from N_i into the old tetrahedra
    alpha = []
    beta = []
    for i in range(3):
        j, k = sorted(set(range(3)) - {i})
        a_map = [None] * 4
        a_map[0] = f_a
        a_map[1] = base[i]
        a_map[2] = base[j]
        a_map[3] = base[k]
        b_map = [sigma[v] for v in a_map]
        b_map[0] = sigma[base[i]]
        b_map[1] = f_b
        alpha.append(tuple(a_map))
        beta.append(tuple(b_map))

    old_to_new = {}
    new_index = 0
    for t in range(tri.n):
        if t not in (t_a, t_b):
            old_to_new[t] = new_index
            new_index += 1
    n_idx = [new_index, new_index + 1, new_index + 2]

    def retarget_face(t2, perm, f2):
        if t2 not in (t_a, t_b):
            return old_to_new[t2], perm
        if t2 == t_a:
            l = base.index(f2)
            inv_alpha = tuple(alpha[l].index(v) for v in range(4))
            return n_idx[l], tuple(inv_alpha[perm[v]] for v in range(4))
        l = [sigma[p] for p in base].index(f2)
        inv_beta = tuple(beta[l].index(v) for v in range(4))
        return n_idx[l], tuple(inv_beta[perm[v]] for v in range(4))

    gluings = [[None] * 4 for _ in range(new_index + 3)]

    # untouched tetrahedra
    for t in range(tri.n):
        if t in (t_a, t_b):
            continue
        for f in range(4):
            t2, perm = tri.gluings[t][f]
            if t2 in (t_a, t_b):
                f2 = perm[f]
                gluings[old_to_new[t]][f] = retarget_face(t2, perm, f2)
            else:
                gluings[old_to_new[t]][f] = (old_to_new[t2], perm)

    # external faces of the new tetrahedra
    for i in range(3):
        # face 1 of N_i comes from t_a's face base[i]
        t2, perm = tri.gluings[t_a][base[i]]
        comp = tuple(perm[alpha[i][v]] for v in range(4))
        f2 = comp[1]
        if t2 in (t_a, t_b):
            gluings[n_idx[i]][1] = retarget_face(t2, comp, f2)
        else:
            gluings[n_idx[i]][1] = (old_to_new[t2], comp)
        # face 0 of N_i comes from t_b's face sigma(base[i])
        t2, perm = tri.gluings[t_b][sigma[base[i]]]
        comp = tuple(perm[beta[i][v]] for v in range(4))
        f2 = comp[0]
        if t2 in (t_a, t_b):
            gluings[n_idx[i]][0] = retarget_face(t2, comp, f2)
        else:
            gluings[n_idx[i]][0] = (old_to_new[t2], comp)

    # internal faces between the new tetrahedra
    for i in range(3):
        for l in range(3):
            if i == l:
                continue
            m = 3 - i - l
            perm = [None] * 4
            perm[0] = 0
            perm[1] = 1
            perm[slot_of_base(i, m)] = slot_of_base(l, m)
            perm[slot_of_base(i, l)] = slot_of_base(l, i)
            gluings[n_idx[i]][slot_of_base(i, l)] = (n_idx[l], tuple(perm))

    return Triangulation(new_index + 3, [list(t) for t in gluings])


def first_joining_face(tri: Triangulation) -> tuple[int, int]:
    return next(
        (t, f)
        for t in range(tri.n)
        for f in range(4)
        if tri.gluings[t][f][0] != t
    )


def grow_by_moves(tri: Triangulation, target: int, rng: random.Random) -> Triangulation:
    info0 = describe(tri)
    while tri.n < target:
        choices = [
            (t, f)
            for t in range(tri.n)
            for f in range(4)
            if tri.gluings[t][f][0] != t
        ]
        t, f = rng.choice(choices)
        tri = two_three_move(tri, t, f)
        info = describe(tri)
        assert info["orientable"] == info0["orientable"]
        assert info["h1_torsion"] == info0["h1_torsion"]
        assert info["h1_rank"] == info0["h1_rank"]
        assert info["vertices"] == info0["vertices"]
        assert info["betti1_mod2"] == info0["betti1_mod2"]
    return tri


# ---------------------------------------------------------------------------
# connected sum
# ---------------------------------------------------------------------------


def one_four_move(tri: Triangulation, t: int) -> Triangulation:
    """Insert a new vertex inside tetrahedron t (replace it by four).

    New tetrahedron N_i reuses the slot layout of t with the new vertex at
    slot i, so external gluing permutations carry over unchanged and the
    internal gluing of N_i to N_j is the transposition (i j)."""
    old_to_new = {}
    idx = 0
    for s in range(tri.n):
        if s != t:
            old_to_new[s] = idx
            idx += 1
    n_idx = [idx, idx + 1, idx + 2, idx + 3]
    gluings = [[None] * 4 for _ in range(idx + 4)]
    for s in range(tri.n):
        if s == t:
            continue
        for f in range(4):
            t2, perm = tri.gluings[s][f]
            if t2 == t:
                gluings[old_to_new[s]][f] = (n_idx[perm[f]], perm)
            else:
                gluings[old_to_new[s]][f] = (old_to_new[t2], perm)
    for i in range(4):
        t2, perm = tri.gluings[t][i]
        if t2 == t:
            gluings[n_idx[i]][i] = (n_idx[perm[i]], perm)
        else:
            gluings[n_idx[i]][i] = (old_to_new[t2], perm)
        for j in range(4):
            if j != i:
                swap = list(range(4))
                swap[i], swap[j] = j, i
                gluings[n_idx[i]][j] = (n_idx[j], tuple(swap))
    return Triangulation(idx + 4, gluings)


def embedded_faces(tri: Triangulation):
    """Faces whose three vertex classes and three edge classes are distinct;
    cutting along such a face removes a ball."""
    skel = Skeleton(tri)
    out = []
    for (t, f), _ in skel.face_classes:
        verts = [v for v in range(4) if v != f]
        vcls = {skel.vertex_of[(t, v)] for v in verts}
        ecls = {
            skel.edge_of[(t, SLOT_OF_PAIR[frozenset((verts[i], verts[j]))])][0]
            for i in range(3)
            for j in range(i + 1, 3)
        }
        if len(vcls) == 3 and len(ecls) == 3:
            out.append((t, f))
    return out


def double_of_cut(tri: Triangulation, t_a: int, f_a: int) -> Triangulation:
    """Unglue one face pair and glue on a mirrored copy along the two
    exposed faces.  When the cut removes a ball this doubles M-minus-ball,
    i.e. realizes M # M (RP^3 is amphichiral, so mirroring is harmless).
    The caller filters candidates by homology."""
    t_b, sigma = tri.gluings[t_a][f_a]
    f_b = sigma[f_a]
    rho = (1, 0, 2, 3)
    shift = tri.n
    mirror = tri.reflected()
    glu = [
        [list(entry) for entry in tet] for tet in tri.gluings
    ] + [
        [[t + shift, perm] for t, perm in tet] for tet in mirror.gluings
    ]
    inv_rho = rho

    def mirror_slot(t, f):
        return t + shift, rho[f]

    ma, mfa = mirror_slot(t_a, f_a)
    mb, mfb = mirror_slot(t_b, f_b)
    glu[t_a][f_a] = [ma, rho]
    glu[ma][mfa] = [t_a, inv_rho]
    glu[t_b][f_b] = [mb, rho]
    glu[mb][mfb] = [t_b, inv_rho]
    return Triangulation(len(glu), glu)


def connected_double_search(sources, label):
    """Double each source along an embedded face cut and keep the first
    candidate with the homology of M # M."""
    for tri in sources:
        base = describe(tri)
        want_torsion = sorted(base["h1_torsion"] * 2)
        for t, f in embedded_faces(tri):
            try:
                doubled = double_of_cut(tri, t, f)
                info = describe(doubled)
            except InvalidTriangulation:
                continue
            if (
                info["orientable"]
                and info["h1_torsion"] == want_torsion
                and info["h1_rank"] == 2 * base["h1_rank"]
                and info["betti1_mod2"] == 2 * base["betti1_mod2"]
            ):
                print(f"  {label}: cut ({t},{f}) of {tri.n}-tet copy -> {info}")
                return doubled, info
    raise SystemExit(f"no valid double found for {label}")


# ---------------------------------------------------------------------------
# main
# ---------------------------------------------------------------------------


def save(name: str, tri: Triangulation, info):
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    path = OUT_DIR / f"{name}.json"
    data = tri.to_json()
    data["name"] = name
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1)
    print(f"wrote {path.name}: {info}")


def main():
    rng = random.Random(20240811)

    print("searching 1-tetrahedron S^3 ...")
    s3_one, info = find_fixture(
        one_tet_candidates(),
        lambda i: i["orientable"] and i["h1_torsion"] == [] and i["h1_rank"] == 0,
        "s3_one_tet",
    )
    save("s3_one_tet", s3_one, info)

    print("building 2-tetrahedron S^3 (identity double) ...")
    ident = tuple(range(4))
    s3_two = Triangulation(2, [[(1, ident)] * 4, [(0, ident)] * 4])
    info = describe(s3_two)
    assert info["orientable"] and info["h1_torsion"] == [] and info["h1_rank"] == 0
    save("s3_two_tet", s3_two, info)

    print("building 3-tetrahedron S^3 (2-3 move) ...")
    s3_three = two_three_move(s3_two, 0, 0)
    info = describe(s3_three)
    assert info["orientable"] and info["h1_torsion"] == [] and info["h1_rank"] == 0
    save("s3_three_tet", s3_three, info)

    print("searching 2-tetrahedron fixtures ...")
    twos = list(two_tet_candidates())
    print(f"  {len(twos)} closed candidates")

    rp3, info_rp3 = find_fixture(
        iter(twos),
        lambda i: i["orientable"] and i["h1_torsion"] == [2] and i["h1_rank"] == 0
        and i["vertices"] == 1,
        "rp3",
    )
    save("rp3", rp3, info_rp3)

    l31, info = find_fixture(
        iter(twos),
        lambda i: i["orientable"] and i["h1_torsion"] == [3] and i["h1_rank"] == 0,
        "l31",
    )
    save("l31", l31, info)

    s2xs1, info = find_fixture(
        iter(twos),
        lambda i: i["orientable"] and i["h1_torsion"] == [] and i["h1_rank"] == 1,
        "s2xs1",
    )
    save("s2xs1", s2xs1, info)

    nonor, info = find_fixture(
        iter(twos),
        lambda i: not i["orientable"],
        "nonorientable",
    )
    save("nonorientable", nonor, info)

    print("building 3-tetrahedron RP^3 (2-3 move) ...")
    rp3_three = two_three_move(rp3, *first_joining_face(rp3))
    info = describe(rp3_three)
    assert info["orientable"] and info["h1_torsion"] == [2], info
    save("rp3_three_tet", rp3_three, info)

    print("building RP^3 # RP^3 (double of a cut copy) ...")
    rp3_subdiv = one_four_move(one_four_move(rp3, 0), rp3.n + 3 - 1)
    info = describe(rp3_subdiv)
    assert info["h1_torsion"] == [2] and info["vertices"] == 3, info
    rp3_sum, info = connected_double_search(
        [rp3, rp3_three, rp3_subdiv], "rp3_sum_rp3"
    )
    assert info["h1_torsion"] == [2, 2] and info["h1_rank"] == 0, info
    assert info["betti1_mod2"] == 2
    save("rp3_sum_rp3", rp3_sum, info)

    print("growing one-vertex 30-tetrahedron RP^3 ...")
    big = grow_by_moves(rp3, 30, rng)
    info = describe(big)
    assert info["vertices"] == 1 and info["tets"] == 30
    assert info["h1_torsion"] == [2] and info["betti1_mod2"] == 1
    save("onevertex_30tet", big, info)

    print("done.")


if __name__ == "__main__":
    main()

"""The two invariant evaluators.

brute_force_state_sum iterates over all admissible edge colorings and is the
ground-truth oracle: it knows nothing about cocycle partitions, kernels or
Gauss sums, only the state-sum formula and the model tetrahedron weights.

invariant computes the same number by partitioning colorings according to
the mod-2 cocycle of m-labeled edges: for each cocycle the surviving
colorings form a finite abelian group (the kernel of the face-condition
homomorphism), the product of chi factors becomes a quadratic form on that
group, and the partial sum collapses to an exactly evaluated Gauss sum.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .abelian import SubgroupPresentation, kernel_mod_orders
from .exactnum import Cyclotomic, QmodZ, e_of, sqrt_natural
from .gauss import PreMetricGroup, gauss_sum
from .triangulation import (
    EDGE_SLOTS,
    SLOT_OF_PAIR,
    GuardExceeded,
    OrientationData,
    Skeleton,
    Triangulation,
    enumerate_cocycles,
    orient,
    z2_cocycle_basis,
)
from .tycat import (
    M_LABEL,
    MODEL_EDGE_DIRECTIONS,
    MODEL_FACES,
    TYData,
    _model_weight_term,
)

__all__ = [
    "ColoringContext",
    "TetClassification",
    "PairSystem",
    "InvariantResult",
    "brute_force_state_sum",
    "project_phi",
    "classify_tetrahedra",
    "build_constraints",
    "build_pair_system",
    "assemble_form",
    "partial_state_sum",
    "invariant",
    "EVEN_PERMUTATIONS",
]

#: The twelve orientation-preserving relabelings available for each model
#: identification I_t.
EVEN_PERMUTATIONS = tuple(
    p
    for p in itertools.permutations(range(4))
    if sum(1 for i in range(4) for j in range(i + 1, 4) if p[i] > p[j]) % 2 == 0
)

#: Slot triples of the three m-edges meeting at each model vertex.
_TRIANGLE_SLOTS = {
    0: frozenset((0, 1, 5)),  # a, b, f
    1: frozenset((0, 2, 4)),  # a, c, e
    2: frozenset((1, 2, 3)),  # b, c, d
    3: frozenset((3, 4, 5)),  # d, e, f
}
_QUAD_COMPLEMENTS = {
    frozenset((1, 2, 3, 4, 5)) - {3}: None,  # placeholder; built below
}
_QUAD_TYPES = {
    frozenset((1, 2, 4, 5)): ("flat", (0, 3)),  # m on b,c,e,f; group on a,d
    frozenset((0, 2, 3, 5)): ("flat", (1, 4)),  # group on b,e
    frozenset((0, 1, 3, 4)): ("crooked", (2, 5)),  # group on c,f
}


class ColoringContext:
    """Per-(triangulation, category) tables shared by both evaluators.

    For every tetrahedron and model slot: the edge class sitting there and
    whether its canonical orientation disagrees with the directed model edge
    (in which case the pushed-forward label is dualized).
    """

    def __init__(
        self,
        tri: Triangulation,
        ty: TYData,
        skel: Skeleton | None = None,
        orientation: OrientationData | None = None,
        models=None,
    ):
        self.tri = tri
        self.ty = ty
        self.skel = skel if skel is not None else Skeleton(tri)
        self.orientation = orientation if orientation is not None else orient(tri)
        if models is None:
            models = [tuple(range(4))] * tri.n
        self.models = [tuple(p) for p in models]
        for p in self.models:
            if p not in EVEN_PERMUTATIONS:
                raise ValueError(f"model identification {p} is not orientation-preserving")

        # slot_table[t][s] = (edge_class, dualized?)
        self.slot_table = []
        for t in range(tri.n):
            pi = self.models[t]
            inv = tuple(pi.index(v) for v in range(4))
            row = []
            for s in range(6):
                tail_m, head_m = MODEL_EDGE_DIRECTIONS[s]
                lt, lh = inv[tail_m], inv[head_m]
                local_slot = SLOT_OF_PAIR[frozenset((lt, lh))]
                cls, sign = self.skel.edge_of[(t, local_slot)]
                agrees = (sign > 0) == (lt < lh)
                row.append((cls, not agrees))
            self.slot_table.append(row)

        # face_model[(t, f)] = model face key (the opposite model vertex)
        self.face_model = {}
        for t in range(tri.n):
            pi = self.models[t]
            for f in range(4):
                self.face_model[(t, f)] = pi[f]

    def slot_label(self, t: int, s: int, coloring):
        """Push the coloring through I_t onto model slot s."""
        cls, dual = self.slot_table[t][s]
        label = coloring[cls]
        if label == M_LABEL or not dual:
            return label
        return self.ty.group.neg(label)

    def tet_weight_term(self, t: int, coloring):
        labels = tuple(self.slot_label(t, s, coloring) for s in range(6))
        return _model_weight_term(self.ty, labels, self.orientation.signs[t])


# ---------------------------------------------------------------------------
# the oracle: brute-force state sum
# ---------------------------------------------------------------------------


def _finish_sum(ty: TYData, buckets: dict) -> Cyclotomic:
    order = ty.order
    total = Cyclotomic.zero(order)
    odd = Cyclotomic.zero(order)
    for (phase, parity), coeff in sorted(buckets.items()):
        if not coeff:
            continue
        value = coeff * e_of(phase, order)
        if parity:
            odd = odd + value
        else:
            total = total + value
    return total + odd * ty.d_m


def _add_term(buckets: dict, phase: Fraction, dm_exp: int, size: int):
    parity = dm_exp % 2
    half = (dm_exp - parity) // 2
    coeff = Fraction(size) ** half
    key = (phase % 1, parity)
    buckets[key] = buckets.get(key, Fraction(0)) + coeff


def brute_force_state_sum(
    tri: Triangulation,
    ty: TYData,
    max_colorings: int = 20_000_000,
    cocycle: int | None = None,
    context: ColoringContext | None = None,
) -> Cyclotomic:
    """Sum the state-sum weights over all admissible colorings, exactly.

    With a cocycle given, only colorings whose m-edges realize that cocycle
    are summed (the restriction of the sum to one fiber of the projection).
    Refuses to start when the coloring space exceeds max_colorings.
    """
    ctx = context if context is not None else ColoringContext(tri, ty)
    skel = ctx.skel
    ty_labels = list(ty.group.elements())
    num_edges = skel.num_edges

    if cocycle is None:
        candidates = [ty_labels + [M_LABEL]] * num_edges
    else:
        candidates = [
            [M_LABEL] if (cocycle >> e) & 1 else ty_labels for e in range(num_edges)
        ]
    space = 1
    for c in candidates:
        space *= len(c)
        if space > max_colorings:
            raise GuardExceeded(
                f"coloring space exceeds {max_colorings}; use the cocycle-partition "
                "evaluator or raise --max-colorings"
            )

    # incidence: which faces/tets close at each edge assignment
    face_edges = [skel.face_edge_classes(f) for f in range(skel.num_faces)]
    face_count_total = [len(set(es)) for es in face_edges]
    tet_edges = [
        sorted({ctx.slot_table[t][s][0] for s in range(6)}) for t in range(tri.n)
    ]
    faces_at = [[] for _ in range(num_edges)]
    for f, es in enumerate(face_edges):
        for e in set(es):
            faces_at[e].append(f)
    tets_at = [[] for _ in range(num_edges)]
    for t, es in enumerate(tet_edges):
        for e in es:
            tets_at[e].append(t)

    coloring = [None] * num_edges
    face_seen = [0] * skel.num_faces
    tet_seen = [0] * tri.n
    buckets: dict = {}

    def face_m_count(f: int) -> int:
        return sum(1 for e in face_edges[f] if coloring[e] == M_LABEL)

    def recurse(e: int, phase: Fraction, dm_exp: int):
        if e == num_edges:
            _add_term(buckets, phase, dm_exp, ty.group.size)
            return
        for label in candidates[e]:
            coloring[e] = label
            new_phase, new_dm = phase, dm_exp
            if label == M_LABEL:
                new_dm += 1  # edge factor d_m
            ok = True
            closed_faces = []
            closed_tets = []
            for f in faces_at[e]:
                face_seen[f] += 1
                closed_faces.append(f)
                if face_seen[f] == face_count_total[f]:
                    mc = face_m_count(f)
                    if mc not in (0, 2):
                        ok = False
                        break
                    new_dm -= mc // 2  # face factor sqrt(d d d)
            if ok:
                for t in tets_at[e]:
                    tet_seen[t] += 1
                    closed_tets.append(t)
                    if tet_seen[t] == len(tet_edges[t]):
                        term = ctx.tet_weight_term(t, coloring)
                        if term is None:
                            ok = False
                            break
                        new_phase += term[0]
                        new_dm += term[1]
            if ok:
                recurse(e + 1, new_phase, new_dm)
            for f in closed_faces:
                face_seen[f] -= 1
            for t in closed_tets:
                tet_seen[t] -= 1
            coloring[e] = None

    recurse(0, Fraction(0), 0)
    total = _finish_sum(ty, buckets)
    return total * Fraction(1, ty.global_dim ** skel.num_vertices)


def project_phi(skel: Skeleton, coloring) -> int:
    """The indicator cochain of m-edges of an admissible coloring, as an
    edge-class bitmask; always a cocycle for admissible colorings."""
    alpha = 0
    for e, label in enumerate(coloring):
        if label == M_LABEL:
            alpha |= 1 << e
    for f in range(skel.num_faces):
        total = 0
        for e in skel.face_edge_classes(f):
            total ^= (alpha >> e) & 1
        if total:
            raise AssertionError("admissible coloring projected to a non-cocycle")
    return alpha


# ---------------------------------------------------------------------------
# cocycle-partition evaluator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TetClassification:
    """Per-tetrahedron m-patterns under a fixed cocycle, plus the counts
    entering the partial state sum's prefactor."""

    kinds: tuple  # per tet: ("empty",) | ("triangle", apex) |
    #              ("flat"|"crooked", sign, (cls_i, dual_i, cls_j, dual_j))
    num_m_edges: int
    num_mm_faces: int
    num_empty: int
    num_triangle: int
    num_flat_plus: int
    num_flat_minus: int
    num_crooked_plus: int
    num_crooked_minus: int


@dataclass(frozen=True)
class PairSystem:
    """Signed index pairs for the chi product: q(y) = sum over plus_pairs of
    b(y_i, y_j) minus the same over minus_pairs, with slot signs folded in."""

    plus_pairs: tuple
    minus_pairs: tuple


@dataclass
class InvariantResult:
    total: Cyclotomic
    betti1: int
    cocycles: int
    per_cocycle: list | None = None
    wall_time_ms: float = 0.0


def classify_tetrahedra(ctx: ColoringContext, alpha: int) -> TetClassification:
    tri, skel = ctx.tri, ctx.skel
    kinds = []
    counts = {"empty": 0, "triangle": 0, "fp": 0, "fm": 0, "cp": 0, "cm": 0}
    for t in range(tri.n):
        m_slots = frozenset(
            s for s in range(6) if (alpha >> ctx.slot_table[t][s][0]) & 1
        )
        sign = ctx.orientation.signs[t]
        if not m_slots:
            kinds.append(("empty",))
            counts["empty"] += 1
            continue
        if len(m_slots) == 3:
            apex = next(
                (v for v, slots in _TRIANGLE_SLOTS.items() if slots == m_slots), None
            )
            if apex is None:
                raise AssertionError(
                    f"tetrahedron {t}: m-pattern {sorted(m_slots)} is not a cocycle pattern"
                )
            kinds.append(("triangle", apex))
            counts["triangle"] += 1
            continue
        if len(m_slots) == 4:
            quad = _QUAD_TYPES.get(m_slots)
            if quad is None:
                raise AssertionError(
                    f"tetrahedron {t}: m-pattern {sorted(m_slots)} is not a cocycle pattern"
                )
            shape, (s1, s2) = quad
            c1, d1 = ctx.slot_table[t][s1]
            c2, d2 = ctx.slot_table[t][s2]
            kinds.append((shape, sign, (c1, d1, c2, d2)))
            if shape == "flat":
                counts["fp" if sign > 0 else "fm"] += 1
            else:
                counts["cp" if sign > 0 else "cm"] += 1
            continue
        raise AssertionError(
            f"tetrahedron {t}: m-pattern {sorted(m_slots)} is not a cocycle pattern"
        )

    num_m = bin(alpha).count("1")
    num_mm = 0
    for f in range(skel.num_faces):
        mc = sum((alpha >> e) & 1 for e in skel.face_edge_classes(f))
        if mc == 2:
            num_mm += 1
        elif mc != 0:
            raise AssertionError(f"face {f} has {mc} m-edges under a non-cocycle")
    return TetClassification(
        tuple(kinds),
        num_m,
        num_mm,
        counts["empty"],
        counts["triangle"],
        counts["fp"],
        counts["fm"],
        counts["cp"],
        counts["cm"],
    )


def build_constraints(ctx: ColoringContext, alpha: int):
    """The face-condition matrix over the m-empty edge classes.

    Returns (empty_edges, scalar_rows): one row per m-empty face class, with
    the +-1 coefficients of the condition that the three pushed-forward
    labels fuse, i.e. label(third slot) = label(first) + label(second) on
    each model face, read through the dualization flags."""
    skel = ctx.skel
    empty_edges = [e for e in range(skel.num_edges) if not (alpha >> e) & 1]
    col_of = {e: i for i, e in enumerate(empty_edges)}
    rows = []
    for fc in range(skel.num_faces):
        if any((alpha >> e) & 1 for e in skel.face_edge_classes(fc)):
            continue
        (t, f), _ = skel.face_classes[fc]
        model_face = ctx.face_model[(t, f)]
        slots = MODEL_FACES[model_face]
        coeffs = (1, 1, -1)
        row = [0] * len(empty_edges)
        for s, coef in zip(slots, coeffs):
            cls, dual = ctx.slot_table[t][s]
            row[col_of[cls]] += -coef if dual else coef
        rows.append(row)
    return empty_edges, rows


def build_pair_system(classification: TetClassification) -> PairSystem:
    """chi factors of the quad tetrahedra: flat+ and crooked- contribute
    chi, flat- and crooked+ contribute its conjugate; dualization flags fold
    as sign flips on the pair's slots."""
    plus, minus = [], []
    for kind in classification.kinds:
        if kind[0] not in ("flat", "crooked"):
            continue
        shape, sign, (c1, d1, c2, d2) = kind
        pair = (c1, -1 if d1 else 1, c2, -1 if d2 else 1)
        if (shape == "flat") == (sign > 0):
            plus.append(pair)
        else:
            minus.append(pair)
    return PairSystem(tuple(plus), tuple(minus))


def assemble_form(
    ty: TYData,
    empty_edges: list,
    kernel: SubgroupPresentation,
    pairs: PairSystem,
) -> PreMetricGroup:
    """The quadratic form q(y) = sum_P b(y_i, y_j) - sum_Q b(y_r, y_s) on the
    kernel, evaluated on its generators via the bicharacter."""
    d = ty.group.rank
    index_of = {e: i for i, e in enumerate(empty_edges)}
    weighted = [
        (index_of[ci], index_of[cj], si * sj) for ci, si, cj, sj in pairs.plus_pairs
    ] + [
        (index_of[ci], index_of[cj], -si * sj) for ci, si, cj, sj in pairs.minus_pairs
    ]

    def project(gen, edge_idx):
        return gen[edge_idx * d: (edge_idx + 1) * d]

    def q_of(gen):
        total = Fraction(0)
        for i, j, w in weighted:
            total += w * ty.chi_phase(project(gen, i), project(gen, j))
        return QmodZ(total)

    def pairing(gen_a, gen_b):
        total = Fraction(0)
        for i, j, w in weighted:
            total += w * (
                ty.chi_phase(project(gen_a, i), project(gen_b, j))
                + ty.chi_phase(project(gen_b, i), project(gen_a, j))
            )
        return QmodZ(total)

    gens = kernel.generators
    q_values = tuple(q_of(g) for g in gens)
    gram = tuple(
        tuple(pairing(gens[i], gens[j]) for j in range(len(gens)))
        for i in range(len(gens))
    )
    return PreMetricGroup(kernel.cyclic_orders, q_values, gram)


def _dm_power(ty: TYData, k: int) -> Cyclotomic:
    """d_m^k for any integer k, exactly."""
    size = ty.group.size
    parity = k % 2
    half = (k - parity) // 2
    value = Cyclotomic.from_rational(Fraction(size) ** half, ty.order)
    if parity:
        value = value * ty.d_m
    return value


def solve_kernel(ty: TYData, empty_edges: list, rows) -> SubgroupPresentation:
    """Kernel of the face-condition homomorphism as a subgroup of
    A^(number of m-empty edges), via integer SNF over the cyclic orders."""
    d = ty.group.rank
    orders = list(ty.group.orders)
    col_orders = [orders[j] for _ in empty_edges for j in range(d)]
    row_orders = [orders[j] for _ in rows for j in range(d)]
    matrix = []
    for row in rows:
        for j in range(d):
            matrix.append(
                [row[i] if jj == j else 0 for i in range(len(empty_edges)) for jj in range(d)]
            )
    return kernel_mod_orders(matrix, row_orders, col_orders)


def partial_state_sum(
    ctx: ColoringContext,
    alpha: int,
    constants: str = "derived",
) -> Cyclotomic:
    """The partial state sum at one cocycle.

    constants="derived" uses the prefactor obtained by factorizing the
    weight table: an m-triangle contributes one d_m, and both crooked
    orientations carry a factor |nu| = |A|^(-1/2) (the sign of nu cancels
    against the Frobenius-Schur indicator of m; see tycat).
    constants="printed" reproduces the alternative bookkeeping that omits
    the triangle term and signs a nu exponent, for side-by-side
    comparison."""
    ty = ctx.ty
    cls = classify_tetrahedra(ctx, alpha)
    empty_edges, rows = build_constraints(ctx, alpha)
    kernel = solve_kernel(ty, empty_edges, rows)
    pairs = build_pair_system(cls)
    form = assemble_form(ty, empty_edges, kernel, pairs)
    theta = gauss_sum(form, ty.order)

    quad = cls.num_crooked_plus + cls.num_crooked_minus
    if constants == "derived":
        c_exp = (
            cls.num_m_edges
            - cls.num_mm_faces
            + cls.num_triangle
            + cls.num_flat_plus
            + cls.num_flat_minus
            + 2 * quad
        )
        nu_exp = quad
        signed = False
    elif constants == "printed":
        c_exp = (
            cls.num_m_edges
            - cls.num_mm_faces
            + cls.num_flat_plus
            + cls.num_flat_minus
            + 2 * quad
        )
        nu_exp = cls.num_crooked_plus - cls.num_crooked_minus
        signed = True
    else:
        raise ValueError(f"unknown constants mode {constants!r}")

    value = _dm_power(ty, c_exp - nu_exp)  # |nu| = d_m^(-1)
    if signed and ty.nu_sign < 0 and nu_exp % 2:
        value = -value
    value = value * sqrt_natural(kernel.size, ty.order) * theta
    return value * Fraction(1, ty.global_dim ** ctx.skel.num_vertices)


def invariant(
    tri: Triangulation,
    ty: TYData,
    per_cocycle: bool = False,
    threads: int = 1,
    max_cocycles: int = 2 ** 30,
    orientation_flips=None,
    models=None,
    constants: str = "derived",
) -> InvariantResult:
    """Sum the partial state sums over all mod-2 cocycles."""
    start = time.monotonic()
    skel = Skeleton(tri, orientation_flips)
    ctx = ColoringContext(tri, ty, skel=skel, models=models)
    basis, betti1 = z2_cocycle_basis(tri, skel)
    cocycles = list(enumerate_cocycles(basis, guard=max_cocycles))

    def work(alpha):
        return partial_state_sum(ctx, alpha, constants=constants)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, cocycles))
    else:
        parts = [work(alpha) for alpha in cocycles]

    total = Cyclotomic.zero(ty.order)
    for part in parts:
        total = total + part
    table = None
    if per_cocycle:
        table = [
            (format(alpha, f"0{skel.num_edges}b")[::-1], part)
            for alpha, part in zip(cocycles, parts)
        ]
    return InvariantResult(
        total,
        betti1,
        len(cocycles),
        table,
        (time.monotonic() - start) * 1000.0,
    )

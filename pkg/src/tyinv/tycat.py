"""Skeletal Tambara-Yamagami category data.

TY(A, chi, nu) has label set A + {m}, group fusion on A deformed by
a x m = m x a = m and m x m = sum of A, F-symbols twisted by the
nondegenerate symmetric bicharacter chi, and a square-root sign nu of
1/|A|.  This module provides the labels, fusion coefficients, F-symbols and
their inverses in closed form, quantum dimensions, the oriented model
tetrahedron weights, and an exhaustive axiom verifier.

Conventions for the model tetrahedron: edge slots a..f sit on the vertex
pairs 01, 02, 12, 23, 13, 03, so the face triples are (a,b,c), (c,d,e),
(b,d,f), (a,f,e) and the opposite pairs (a,d), (b,e), (c,f).  Slot
directions run low vertex to high vertex except slot a, which runs 1 -> 0;
this is the unique assignment (up to global reversal) for which the
admissibility constraints of the F-symbols become path-composition rules
along directed face boundaries, so that the two tetrahedra adjacent to a
face always impose the same condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .abelian import Bicharacter, FinAbGroup, GroupElem, validate_bicharacter
from .exactnum import Cyclotomic, e_of, sqrt_natural

__all__ = [
    "M_LABEL",
    "TYData",
    "fusion_coeff",
    "f_symbol",
    "f_symbol_inverse",
    "quantum_dim",
    "model_tet_weight",
    "collect_f_symbols",
    "verify_axioms",
    "AxiomReport",
    "MODEL_FACES",
    "MODEL_EDGE_DIRECTIONS",
]

#: The non-invertible label.
M_LABEL = "m"

#: Face triples of the model tetrahedron as (slot, slot, slot) index triples
#: into (a, b, c, d, e, f), keyed by the opposite model vertex.
MODEL_FACES = {
    3: (0, 1, 2),  # face {0,1,2}: slots a, b, c
    0: (2, 3, 4),  # face {1,2,3}: slots c, d, e
    1: (1, 3, 5),  # face {0,2,3}: slots b, d, f
    2: (0, 5, 4),  # face {0,1,3}: slots a, f, e
}

#: Directed model edges (tail, head) per slot; all run low to high except a.
MODEL_EDGE_DIRECTIONS = ((1, 0), (0, 2), (1, 2), (2, 3), (1, 3), (0, 3))


@dataclass(frozen=True)
class TYData:
    """A Tambara-Yamagami category TY(A, chi, nu_sign * |A|^(-1/2))."""

    group: FinAbGroup
    chi: Bicharacter
    nu_sign: int

    def __post_init__(self):
        if self.nu_sign not in (1, -1):
            raise ValueError("nu_sign must be +1 or -1")

    @staticmethod
    def from_json(data: dict) -> "TYData":
        group = FinAbGroup(data["orders"])
        chi = validate_bicharacter(group, data["gram"])
        sign = {"+": 1, "-": -1, 1: 1, -1: -1}.get(data["nu_sign"])
        if sign is None:
            raise ValueError(f"nu_sign must be '+' or '-', got {data['nu_sign']!r}")
        return TYData(group, chi, sign)

    def to_json(self) -> dict:
        return {
            "orders": list(self.group.orders),
            "gram": [[str(v) for v in row] for row in self.chi.gram],
            "nu_sign": "+" if self.nu_sign > 0 else "-",
        }

    @property
    def order(self) -> int:
        """Cyclotomic order N = lcm(8, 4|A|) housing every value of the
        category: eighth roots for the block Gauss sums, sqrt(p) for every
        prime p dividing |A|, and all chi values."""
        return math.lcm(8, 4 * self.group.size)

    @property
    def global_dim(self) -> int:
        """D = sum of squared quantum dimensions = 2|A|."""
        return 2 * self.group.size

    @cached_property
    def d_m(self) -> Cyclotomic:
        return sqrt_natural(self.group.size, self.order)

    @cached_property
    def nu(self) -> Cyclotomic:
        return self.d_m * Fraction(self.nu_sign, self.group.size)

    # -- labels -------------------------------------------------------------

    def labels(self):
        yield from self.group.elements()
        yield M_LABEL

    def is_group_label(self, label) -> bool:
        return label != M_LABEL

    def dual(self, label):
        return M_LABEL if label == M_LABEL else self.group.neg(label)

    def chi_phase(self, x: GroupElem, y: GroupElem) -> Fraction:
        """b(x, y) with chi(x, y) = e(b(x, y))."""
        return self.chi.phase(x, y)

    def chi_value(self, x: GroupElem, y: GroupElem) -> Cyclotomic:
        return e_of(self.chi_phase(x, y), self.order)


def fusion_coeff(ty: TYData, a, b, c) -> int:
    """N^{ab}_c: group addition on A, a x m = m x a = m, m x m = sum of A."""
    am, bm, cm = a == M_LABEL, b == M_LABEL, c == M_LABEL
    if not am and not bm:
        return int(not cm and c == ty.group.add(a, b))
    if am != bm:
        return int(cm)
    return int(not cm)


def _term_to_cyclotomic(ty: TYData, term) -> Cyclotomic:
    if term is None:
        return Cyclotomic.zero(ty.order)
    phase, dm_exp = term
    value = e_of(phase, ty.order)
    size = ty.group.size
    if dm_exp % 2:
        value = value * ty.d_m
        dm_exp -= 1
    if dm_exp:
        value = value * (Fraction(size) ** (dm_exp // 2))
    return value


def _f_term(ty: TYData, a, b, c, d, e, f):
    """[F^{abc}_d]_{e,f} as (phase, d_m exponent) or None when zero.

    The eight families: all-group F-symbols are 1 under the delta
    constraints; one m in the upper triple forces the matching deltas; the
    chi twists appear for m-alternating patterns; and the only non-scalar
    F-matrix is [F^{mmm}_m]_{e,f} = nu * conj(chi(e, f))."""
    G = ty.group
    am, bm, cm = a == M_LABEL, b == M_LABEL, c == M_LABEL
    dm_, em, fm = d == M_LABEL, e == M_LABEL, f == M_LABEL
    zero = None
    if not am and not bm and not cm:
        if dm_ or em or fm:
            return zero
        if e == G.add(a, b) and f == G.add(b, c) and d == G.add(a, f):
            return (Fraction(0), 0)
        return zero
    if not am and not bm and cm:  # [F^{abm}_m]_{a+b,m} = 1
        if dm_ and fm and not em and e == G.add(a, b):
            return (Fraction(0), 0)
        return zero
    if am and not bm and not cm:  # [F^{mbc}_m]_{m,b+c} = 1
        if dm_ and em and not fm and f == G.add(b, c):
            return (Fraction(0), 0)
        return zero
    if not am and bm and not cm:  # [F^{amc}_m]_{m,m} = chi(a,c)
        if dm_ and em and fm:
            return (ty.chi_phase(a, c), 0)
        return zero
    if not am and bm and cm:  # [F^{amm}_d]_{m,f} = delta_{d,a+f}
        if not dm_ and em and not fm and d == G.add(a, f):
            return (Fraction(0), 0)
        return zero
    if am and bm and not cm:  # [F^{mmc}_d]_{e,m} = delta_{d,e+c}
        if not dm_ and not em and fm and d == G.add(e, c):
            return (Fraction(0), 0)
        return zero
    if am and not bm and cm:  # [F^{mbm}_d]_{m,m} = chi(d,b)
        if not dm_ and em and fm:
            return (ty.chi_phase(d, b), 0)
        return zero
    # [F^{mmm}_m]_{e,f} = nu * conj(chi(e,f)) = sign * d_m^(-1) * e(-b(e,f))
    if dm_ and not em and not fm:
        phase = -ty.chi_phase(e, f)
        if ty.nu_sign < 0:
            phase += Fraction(1, 2)
        return (phase % 1, -1)
    return zero


def _f_inverse_term(ty: TYData, a, b, c, d, e, f):
    """[F^{abc}_d]^{-1}_{e,f} as a term.

    Every F-matrix except [F^{mmm}_m] is a 1x1 unit or delta, whose inverse
    is the conjugate at the transposed index; character orthogonality gives
    [F^{mmm}_m]^{-1}_{e,f} = nu * chi(e, f)."""
    if (a, b, c, d) == (M_LABEL,) * 4:
        if e == M_LABEL or f == M_LABEL:
            return None
        phase = ty.chi_phase(e, f)
        if ty.nu_sign < 0:
            phase += Fraction(1, 2)
        return (phase % 1, -1)
    term = _f_term(ty, a, b, c, d, f, e)
    if term is None:
        return None
    phase, dm_exp = term
    return ((-phase) % 1, dm_exp)


def f_symbol(ty: TYData, a, b, c, d, e, f) -> Cyclotomic:
    """[F^{abc}_d]_{e,f}, exactly; 0 on inadmissible labelings."""
    return _term_to_cyclotomic(ty, _f_term(ty, a, b, c, d, e, f))


def f_symbol_inverse(ty: TYData, a, b, c, d, e, f) -> Cyclotomic:
    """[F^{abc}_d]^{-1}_{e,f}, exactly."""
    return _term_to_cyclotomic(ty, _f_inverse_term(ty, a, b, c, d, e, f))


def quantum_dim(ty: TYData, label) -> Cyclotomic:
    """d_a = 1 for group labels, d_m = +|A|^(1/2)."""
    if label == M_LABEL:
        return ty.d_m
    return Cyclotomic.one(ty.order)


def _model_weight_term(ty: TYData, labels, sign: int):
    """Weight of a labeled model tetrahedron as (phase, d_m exponent) | None.

    labels = (la, lb, lc, ld, le, lf) are the slot labels after push-forward
    (dualization already applied); sign picks the positively or negatively
    oriented model:

        |Delta|+ = [F^{la lb ld}_{le}]_{lc, lf} * sqrt(d_la d_lb d_ld d_le)
        |Delta|- = [F^{la lb ld}_{le}]^{-1}_{lf, lc} * sqrt(same)

    The crooked m-quad (m on slots a, b, d, e) carries one self-duality
    bending of m on top of the [F^{mmm}_m] move, and the Frobenius-Schur
    indicator of m is sign(nu); the bending sign cancels the sign of nu, so
    the crooked weight is |nu| d_m^2 chi(x,y)^(-/+).  Without this factor
    the weight system fails to be independent of the model identifications
    (relabeling a tetrahedron by a 3-cycle exchanges flat and crooked
    readings) and the state sum is not a topological invariant.
    """
    la, lb, lc, ld, le, lf = labels
    if sign > 0:
        term = _f_term(ty, la, lb, ld, le, lc, lf)
    else:
        term = _f_inverse_term(ty, la, lb, ld, le, lf, lc)
    if term is None:
        return None
    phase, dm_exp = term
    if ty.nu_sign < 0 and la == lb == ld == le == M_LABEL:
        phase = (phase + Fraction(1, 2)) % 1
    m_count = sum(1 for x in (la, lb, ld, le) if x == M_LABEL)
    assert m_count % 2 == 0, "nonzero weight with odd sqrt factor"
    return (phase, dm_exp + m_count // 2)


def model_tet_weight(ty: TYData, labels, sign: int) -> Cyclotomic:
    """The 6j weight of a labeled oriented model tetrahedron; 0 when the
    labeling is inadmissible."""
    return _term_to_cyclotomic(ty, _model_weight_term(ty, labels, sign))


# ---------------------------------------------------------------------------
# axiom verification
# ---------------------------------------------------------------------------


def collect_f_symbols(ty: TYData) -> dict:
    """All nonzero F-symbols as {(a,b,c,d,e,f): Cyclotomic}."""
    table = {}
    labels = list(ty.labels())
    for a in labels:
        for b in labels:
            for c in labels:
                for d in labels:
                    for e in labels:
                        if not (fusion_coeff(ty, a, b, e) and fusion_coeff(ty, e, c, d)):
                            continue
                        for f in labels:
                            if not (fusion_coeff(ty, b, c, f) and fusion_coeff(ty, a, f, d)):
                                continue
                            value = f_symbol(ty, a, b, c, d, e, f)
                            if not value.is_zero():
                                table[(a, b, c, d, e, f)] = value
    return table


@dataclass
class AxiomReport:
    ok: bool
    failures: list

    def first_failure(self):
        return self.failures[0] if self.failures else None


def verify_axioms(ty: TYData, size_cap: int = 8, f_table: dict | None = None) -> AxiomReport:
    """Exhaustively check the fusion-ring axioms, triangle equations,
    pentagon equations, rigidity and the spherical pivotal equations.

    A custom f_table (as produced by collect_f_symbols, possibly corrupted)
    is checked in place of the closed-form F-symbols; the report carries the
    first failing equation with a witness tuple."""
    if ty.group.size > size_cap:
        raise ValueError(f"|A| = {ty.group.size} exceeds size_cap = {size_cap}")
    labels = list(ty.labels())
    unit = ty.group.zero()
    order = ty.order
    zero = Cyclotomic.zero(order)
    one = Cyclotomic.one(order)

    if f_table is None:
        f_table = collect_f_symbols(ty)

    def F(a, b, c, d, e, f):
        return f_table.get((a, b, c, d, e, f), zero)

    def N(a, b, c):
        return fusion_coeff(ty, a, b, c)

    failures = []

    def fail(name, witness):
        failures.append((name, witness))

    # fusion ring axioms
    for a in labels:
        for b in labels:
            if N(unit, a, b) != (1 if a == b else 0) or N(a, unit, b) != (1 if a == b else 0):
                fail("unitality", (a, b))
            if N(ty.dual(a), b, unit) != (1 if a == b else 0):
                fail("duality", (a, b))
            for c in labels:
                if N(a, b, c) != N(ty.dual(a), c, b) or N(a, b, c) != N(c, ty.dual(b), a):
                    fail("frobenius-reciprocity", (a, b, c))
                for d in labels:
                    lhs = sum(N(a, b, x) * N(x, c, d) for x in labels)
                    rhs = sum(N(b, c, x) * N(a, x, d) for x in labels)
                    if lhs != rhs:
                        fail("associativity", (a, b, c, d))
    if failures:
        return AxiomReport(False, failures)

    # triangle equations on admissible instances
    for b in labels:
        for c in labels:
            for d in labels:
                if N(b, c, d):
                    if F(unit, b, c, d, b, d) != one:
                        fail("triangle-left", (b, c, d))
                    if F(b, unit, c, d, b, c) != one:
                        fail("triangle-middle", (b, c, d))
                    if F(b, c, unit, d, d, c) != one:
                        fail("triangle-right", (b, c, d))
    if failures:
        return AxiomReport(False, failures)

    # F-matrix invertibility against the closed-form inverse
    for key in f_table:
        a, b, c, d, e, _ = key
        for f2 in labels:
            total = zero
            for x in labels:
                fwd = F(a, b, c, d, e, x)
                if fwd.is_zero():
                    continue
                total = total + fwd * f_symbol_inverse(ty, a, b, c, d, x, f2)
            expected = one if e == f2 else zero
            if total != expected:
                fail("inverse", (a, b, c, d, e, f2))
                break
    if failures:
        return AxiomReport(False, failures)

    # pentagon equations
    for a in labels:
        for b in labels:
            for c in labels:
                for d in labels:
                    for f in labels:
                        if not N(a, b, f):
                            continue
                        for g in labels:
                            if not N(f, c, g):
                                continue
                            for e in labels:
                                if not N(g, d, e):
                                    continue
                                for l in labels:
                                    if not (N(c, d, l) and N(f, l, e)):
                                        continue
                                    for k in labels:
                                        if not (N(b, l, k) and N(a, k, e)):
                                            continue
                                        lhs = zero
                                        for h in labels:
                                            lhs = lhs + (
                                                F(a, b, c, g, f, h)
                                                * F(a, h, d, e, g, k)
                                                * F(b, c, d, k, h, l)
                                            )
                                        rhs = F(f, c, d, e, g, l) * F(a, b, l, e, f, k)
                                        if lhs != rhs:
                                            fail(
                                                "pentagon",
                                                (a, b, c, d, e, f, g, k, l),
                                            )
    if failures:
        return AxiomReport(False, failures)

    # rigidity and quantum dimensions
    for a in labels:
        lhs = F(a, ty.dual(a), a, a, unit, unit)
        rhs = f_symbol_inverse(ty, ty.dual(a), a, ty.dual(a), ty.dual(a), unit, unit)
        if lhs != rhs:
            fail("rigidity", (a,))
    t = {label: one for label in labels}
    t[M_LABEL] = Cyclotomic.from_rational(ty.nu_sign, order)

    # pivotal / spherical equations
    for a in labels:
        for b in labels:
            for c in labels:
                if not N(a, b, c):
                    continue
                prod = (
                    F(a, b, ty.dual(c), unit, c, ty.dual(a))
                    * F(b, ty.dual(c), a, unit, ty.dual(a), ty.dual(b))
                    * F(ty.dual(c), a, b, unit, ty.dual(b), c)
                )
                expected = t[c] * t[a] * t[b]  # t_c / (t_a t_b) with t = +-1
                if prod != expected:
                    fail("pivotal", (a, b, c))
                inv_prod = (
                    f_symbol_inverse(ty, a, b, ty.dual(c), unit, ty.dual(a), c)
                    * f_symbol_inverse(ty, b, ty.dual(c), a, unit, ty.dual(b), ty.dual(a))
                    * f_symbol_inverse(ty, ty.dual(c), a, b, unit, c, ty.dual(b))
                )
                if inv_prod != expected:
                    fail("pivotal-inverse", (a, b, c))

    return AxiomReport(not failures, failures)

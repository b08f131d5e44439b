"""Finite abelian groups in primary decomposition.

Element arithmetic over products of cyclic groups, exact integer Smith
normal form with unimodular transforms, kernel solving modulo cyclic orders,
primary decomposition of subgroups, and validation of nondegenerate
symmetric bicharacters given by Q/Z-valued Gram matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exactnum import QmodZ, format_rational, parse_rational

__all__ = [
    "FinAbGroup",
    "GroupElem",
    "SubgroupPresentation",
    "Bicharacter",
    "BicharacterError",
    "smith_normal_form",
    "kernel_mod_orders",
    "subgroup_primary_decomposition",
    "validate_bicharacter",
    "prime_power_split",
    "is_prime_power",
]

#: Elements of a product of cyclic groups are plain coordinate tuples.
GroupElem = tuple[int, ...]


def is_prime_power(n: int) -> int | None:
    """Return the prime p if n = p^k with k >= 1, else None."""
    if n < 2:
        return None
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            return p if m == 1 else None
        p += 1
    return n


def prime_power_split(n: int) -> list[int]:
    """Split n > 1 into its prime-power factors, ascending by prime."""
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            q = 1
            while m % p == 0:
                q *= p
                m //= p
            out.append(q)
        p += 1
    if m > 1:
        out.append(m)
    return out


class FinAbGroup:
    """A finite abelian group as a product of prime-power cyclic groups.

    The input format is a flat sequence of prime powers, e.g. [2, 2, 3] for
    Z/2 + Z/2 + Z/3; non-prime-power entries are refused.
    """

    __slots__ = ("orders",)

    def __init__(self, orders):
        orders = tuple(int(m) for m in orders)
        for m in orders:
            if is_prime_power(m) is None:
                raise ValueError(f"order {m} is not a prime power > 1")
        object.__setattr__(self, "orders", orders)

    def __setattr__(self, name, value):
        raise AttributeError("FinAbGroup is immutable")

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    @property
    def rank(self) -> int:
        """Number of summands d(A) in the primary decomposition."""
        return len(self.orders)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.orders) if self.orders else 1

    def zero(self) -> GroupElem:
        return (0,) * len(self.orders)

    def reduce(self, coords) -> GroupElem:
        return tuple(c % m for c, m in zip(coords, self.orders, strict=True))

    def add(self, x: GroupElem, y: GroupElem) -> GroupElem:
        return tuple((a + b) % m for a, b, m in zip(x, y, self.orders, strict=True))

    def neg(self, x: GroupElem) -> GroupElem:
        return tuple((-a) % m for a, m in zip(x, self.orders, strict=True))

    def elem_order(self, x: GroupElem) -> int:
        return math.lcm(*(m // math.gcd(m, c) for c, m in zip(x, self.orders, strict=True))) if x else 1

    def elements(self):
        """All elements; only sensible for small groups."""
        def rec(i, prefix):
            if i == len(self.orders):
                yield tuple(prefix)
                return
            for c in range(self.orders[i]):
                prefix.append(c)
                yield from rec(i + 1, prefix)
                prefix.pop()
        yield from rec(0, [])

    def __eq__(self, other):
        return isinstance(other, FinAbGroup) and self.orders == other.orders

    def __hash__(self):
        return hash(self.orders)

    def __repr__(self):
        return f"FinAbGroup({list(self.orders)})"

    def to_json(self) -> dict:
        return {"orders": list(self.orders)}

    @staticmethod
    def from_json(data: dict) -> "FinAbGroup":
        return FinAbGroup(data["orders"])


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _snf_full(matrix):
    """Exact Smith normal form with transforms.

    Returns (D, U, V, V_inv) with D = V * M * U, U and V unimodular, and D
    diagonal with each diagonal entry dividing the next.  Pivots are chosen
    as the smallest absolute nonzero entry, row-major, so the output is
    deterministic.
    """
    a = [list(row) for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = _identity(cols)
    v = _identity(rows)
    v_inv = _identity(rows)

    def swap_rows(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            v[i], v[j] = v[j], v[i]
            for r in v_inv:
                r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        if i != j:
            for r in a:
                r[i], r[j] = r[j], r[i]
            for r in u:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src; inverse records col_src -= q * col_dst
        if q:
            arow, asrc = a[dst], a[src]
            for k in range(cols):
                arow[k] += q * asrc[k]
            vrow, vsrc = v[dst], v[src]
            for k in range(rows):
                vrow[k] += q * vsrc[k]
            for r in v_inv:
                r[src] -= q * r[dst]

    def add_col(dst, src, q):
        if q:
            for r in a:
                r[dst] += q * r[src]
            for r in u:
                r[dst] += q * r[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        v[i] = [-x for x in v[i]]
        for r in v_inv:
            r[i] = -r[i]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        # locate the smallest-magnitude nonzero pivot in the trailing block
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = a[i][j]
                if x and (best is None or abs(x) < best):
                    best = abs(x)
                    pivot = (i, j)
                    if best == 1:
                        break
            if best == 1:
                break
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            # clear column t
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    add_row(i, t, -q)
                    if a[i][t]:
                        swap_rows(t, i)
                        dirty = True
            # clear row t
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    add_col(j, t, -q)
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
            if not dirty:
                break
        if a[t][t] < 0:
            negate_row(t)
        # enforce divisibility against the trailing block
        d = a[t][t]
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % d:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(t, offender, 1)
            continue
        t += 1

    return a, u, v, v_inv


def smith_normal_form(matrix):
    """(U, D, V) with D = V * M * U diagonal, d_i | d_{i+1}, U, V unimodular."""
    d, u, v, _ = _snf_full(matrix)
    return u, d, v


def _mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    return [
        [sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)]
        for i in range(rows)
    ]


# ---------------------------------------------------------------------------
# Subgroups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubgroupPresentation:
    """Independent generators of prime-power order inside a product of
    cyclic groups; the subgroup is the internal direct sum of the cyclic
    groups the generators generate."""

    ambient_orders: tuple[int, ...]
    generators: tuple[GroupElem, ...]
    cyclic_orders: tuple[int, ...]

    @property
    def size(self) -> int:
        return math.prod(self.cyclic_orders)

    def element(self, coords) -> GroupElem:
        """The ambient element sum_i coords[i] * generators[i]."""
        acc = [0] * len(self.ambient_orders)
        for c, gen in zip(coords, self.generators, strict=True):
            for k, g in enumerate(gen):
                acc[k] += c * g
        return tuple(x % m for x, m in zip(acc, self.ambient_orders))

    def elements(self):
        def rec(i, coords):
            if i == len(self.cyclic_orders):
                yield self.element(coords)
                return
            for c in range(self.cyclic_orders[i]):
                coords.append(c)
                yield from rec(i + 1, coords)
                coords.pop()
        yield from rec(0, [])


def _kernel_columns(matrix, num_rows, num_cols):
    """Integer kernel basis of a matrix, as a list of column vectors."""
    if num_rows == 0:
        return [[1 if i == j else 0 for i in range(num_cols)] for j in range(num_cols)]
    d, u, _, _ = _snf_full(matrix)
    rank = sum(1 for i in range(min(num_rows, num_cols)) if d[i][i] != 0)
    return [[u[i][j] for i in range(num_cols)] for j in range(rank, num_cols)]


def subgroup_primary_decomposition(ambient_orders, gens) -> SubgroupPresentation:
    """Independent prime-power generators for the subgroup generated by gens.

    The multiset of returned cyclic orders is the primary decomposition of
    the subgroup.  Computed by presenting the subgroup as Z^k modulo its
    relation lattice and reading new generators off the Smith normal form of
    the relation matrix.
    """
    ambient_orders = tuple(int(m) for m in ambient_orders)
    gens = [tuple(g) for g in gens]
    s = len(ambient_orders)
    k = len(gens)
    if k == 0:
        return SubgroupPresentation(ambient_orders, (), ())
    for g in gens:
        if len(g) != s:
            raise ValueError("generator has wrong length for the ambient group")
    modulus = math.lcm(*ambient_orders) if ambient_orders else 1

    # relation lattice: v with sum_i v_i g_i = 0, via the integer kernel of
    # [G | diag(ambient_orders)] projected to the generator coordinates
    aug = []
    for i in range(s):
        row = [gens[j][i] % ambient_orders[i] for j in range(k)]
        row += [ambient_orders[i] if r == i else 0 for r in range(s)]
        aug.append(row)
    relations = [
        [v % modulus for v in col[:k]] for col in _kernel_columns(aug, s, k + s)
    ]
    # the lattice always contains modulus * Z^k; those columns make the
    # reduction mod modulus above harmless and guarantee full rank
    relations += [[modulus if i == j else 0 for i in range(k)] for j in range(k)]
    rel_matrix = [[relations[c][r] for c in range(len(relations))] for r in range(k)]

    d, _, _, v_inv = _snf_full(rel_matrix)
    new_gens: list[GroupElem] = []
    new_orders: list[int] = []
    for i in range(k):
        order = d[i][i]
        if order <= 1:
            continue
        coords = [v_inv[j][i] for j in range(k)]
        elem = [0] * s
        for c, g in zip(coords, gens):
            for t, gt in enumerate(g):
                elem[t] += c * gt
        elem = tuple(x % m for x, m in zip(elem, ambient_orders))
        for q in prime_power_split(order):
            new_gens.append(tuple((x * (order // q)) % m for x, m in zip(elem, ambient_orders)))
            new_orders.append(q)

    keyed = sorted(
        zip(new_gens, new_orders),
        key=lambda t: (is_prime_power(t[1]), -t[1]),
    )
    return SubgroupPresentation(
        ambient_orders,
        tuple(g for g, _ in keyed),
        tuple(o for _, o in keyed),
    )


def kernel_mod_orders(matrix, row_orders, col_orders) -> SubgroupPresentation:
    """Generators of {x in + Z/col_orders : M x = 0 mod row_orders}.

    Solved over Z on the matrix augmented with the diagonal relation columns
    diag(row_orders); kernel generators are read from the right unimodular
    factor, reduced mod col_orders, and put in primary decomposition.
    """
    row_orders = [int(m) for m in row_orders]
    col_orders = [int(m) for m in col_orders]
    t, s = len(row_orders), len(col_orders)
    for j in range(t):
        if len(matrix[j]) != s:
            raise ValueError("matrix shape does not match col_orders")
        for i in range(s):
            if (matrix[j][i] * col_orders[i]) % row_orders[j]:
                raise ValueError(
                    f"entry ({j},{i}) is incompatible with the cyclic orders"
                )
    if t == 0:
        gens = [tuple(1 if i == j else 0 for i in range(s)) for j in range(s)]
        return subgroup_primary_decomposition(col_orders, gens)
    aug = [
        [matrix[j][i] % row_orders[j] for i in range(s)]
        + [row_orders[j] if r == j else 0 for r in range(t)]
        for j in range(t)
    ]
    gens = [
        tuple(col[i] % col_orders[i] for i in range(s))
        for col in _kernel_columns(aug, t, s + t)
    ]
    gens = [g for g in gens if any(g)]
    return subgroup_primary_decomposition(col_orders, gens)


# ---------------------------------------------------------------------------
# Bicharacters
# ---------------------------------------------------------------------------


class BicharacterError(ValueError):
    pass


@dataclass(frozen=True)
class Bicharacter:
    """A nondegenerate symmetric bilinear pairing A x A -> Q/Z, stored as the
    Gram matrix b(x_i, x_j) on the standard generators of A."""

    group: FinAbGroup
    gram: tuple[tuple[QmodZ, ...], ...]

    def eval(self, x: GroupElem, y: GroupElem) -> QmodZ:
        total = Fraction(0)
        for i, xi in enumerate(x):
            if xi:
                row = self.gram[i]
                for j, yj in enumerate(y):
                    if yj:
                        total += xi * yj * row[j].value
        return QmodZ(total)

    def phase(self, x: GroupElem, y: GroupElem) -> Fraction:
        return self.eval(x, y).value

    def to_json(self) -> dict:
        return {"gram": [[str(v) for v in row] for row in self.gram]}


def validate_bicharacter(group: FinAbGroup, gram) -> Bicharacter:
    """Check symmetry, order-compatibility and nondegeneracy of a Gram matrix.

    Entries may be Fractions, QmodZ values or "num/den" strings.  The radical
    of the induced pairing is computed via kernel_mod_orders on the pairing
    matrix scaled to integers; a nonzero radical element is reported as a
    witness of degeneracy.
    """
    d = group.rank
    rows = []
    for row in gram:
        rows.append(tuple(QmodZ(parse_rational(v) if isinstance(v, str) else v) for v in row))
    if len(rows) != d or any(len(r) != d for r in rows):
        raise BicharacterError(f"Gram matrix must be {d}x{d}")
    for i in range(d):
        for j in range(d):
            if rows[i][j] != rows[j][i]:
                raise BicharacterError(f"Gram matrix is not symmetric at ({i},{j})")
            if rows[i][j].scale(group.orders[i]):
                raise BicharacterError(
                    f"entry ({i},{j}) is incompatible with generator order {group.orders[i]}"
                )
    if d:
        scale = math.lcm(*(v.denominator for r in rows for v in r), 1)
        matrix = [
            [int(rows[i][j].value * scale) for i in range(d)]
            for j in range(d)
        ]
        radical = kernel_mod_orders(matrix, [scale] * d, group.orders)
        if radical.generators:
            witness = radical.generators[0]
            raise BicharacterError(f"pairing is degenerate; radical element {witness}")
    return Bicharacter(group, tuple(rows))

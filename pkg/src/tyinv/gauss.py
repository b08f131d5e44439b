"""Exact evaluation of quadratic Gauss sums on pre-metric groups.

A pre-metric group is a finite abelian group G with a Q/Z-valued quadratic
form q; its Gauss sum is

    Theta(G, q) = |G|^(-1/2) * sum_{x in G} e(q(x)).

Evaluation proceeds by radical analysis (wild forms vanish, tame forms
factor through the nondegenerate quotient), splitting into p-parts, and a
Gram-matrix normalization into the four families of irreducible blocks,
whose Theta values are eighth roots of unity given in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .abelian import (
    SubgroupPresentation,
    _snf_full,
    is_prime_power,
    kernel_mod_orders,
    prime_power_split,
)
from .exactnum import Cyclotomic, QmodZ, e_of, sqrt_natural

__all__ = [
    "PreMetricGroup",
    "IrreducibleBlock",
    "eval_q",
    "radical_and_classify",
    "split_p_parts",
    "quotient_by_radical",
    "normalize_blocks",
    "theta_block",
    "gauss_sum",
    "exhaustive_gauss_sum",
    "sqrt_mod_prime_power",
    "natural_order",
]


@dataclass(frozen=True)
class PreMetricGroup:
    """A finite abelian group with a quadratic form, presented by independent
    generators of prime-power order, the form's values on the generators, and
    the Gram matrix of the associated pairing dq(x, y) = q(x+y)-q(x)-q(y)."""

    orders: tuple[int, ...]
    q_values: tuple[QmodZ, ...]
    gram: tuple[tuple[QmodZ, ...], ...]

    def __post_init__(self):
        d = len(self.orders)
        if len(self.q_values) != d or len(self.gram) != d:
            raise ValueError("inconsistent dimensions")
        for i, m in enumerate(self.orders):
            if is_prime_power(m) is None:
                raise ValueError(f"generator order {m} is not a prime power")
            if len(self.gram[i]) != d:
                raise ValueError("Gram matrix is not square")
            if self.gram[i][i] != self.q_values[i].scale(2):
                raise ValueError(f"gram[{i}][{i}] != 2*q[{i}]")
            for j in range(d):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError("Gram matrix is not symmetric")
                if self.gram[i][j].scale(m):
                    raise ValueError(
                        f"gram[{i}][{j}] not annihilated by generator order {m}"
                    )

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    @staticmethod
    def from_q_data(orders, q_values, gram) -> "PreMetricGroup":
        """Build from raw Fractions / strings, normalizing to QmodZ."""
        return PreMetricGroup(
            tuple(int(m) for m in orders),
            tuple(QmodZ(v) for v in q_values),
            tuple(tuple(QmodZ(v) for v in row) for row in gram),
        )


@dataclass(frozen=True)
class IrreducibleBlock:
    """One irreducible metric group in the orthogonal decomposition.

    kind is one of "odd_cyclic" (Z/p^r with q = alpha(p^r+1)/(2p^r) x^2),
    "two_cyclic" (Z/2^r with q = alpha/2^(r+1) x^2, alpha in {-5,-1,1,5}),
    "hyperbolic" ((Z/2^r)^2 with q = x1 x2 / 2^r) or "elliptic"
    ((Z/2^r)^2 with q = (x1^2 + x1 x2 + x2^2)/2^r).
    """

    kind: str
    p: int
    r: int
    alpha: int = 0

    @property
    def group_size(self) -> int:
        base = self.p ** self.r
        return base * base if self.kind in ("hyperbolic", "elliptic") else base


def eval_q(G: PreMetricGroup, coords) -> QmodZ:
    """q at sum_i coords[i] * g_i via the polarization formula
    q(sum n_i g_i) = sum n_i^2 q(g_i) + sum_{i<j} n_i n_j dq(g_i, g_j)."""
    total = Fraction(0)
    d = len(G.orders)
    for i in range(d):
        ni = coords[i]
        if ni:
            total += ni * ni * G.q_values[i].value
            row = G.gram[i]
            for j in range(i + 1, d):
                if coords[j]:
                    total += ni * coords[j] * row[j].value
    return QmodZ(total)


def eval_pairing(G: PreMetricGroup, x, y) -> QmodZ:
    total = Fraction(0)
    for i, xi in enumerate(x):
        if xi:
            row = G.gram[i]
            for j, yj in enumerate(y):
                if yj:
                    total += xi * yj * row[j].value
    return QmodZ(total)


def radical(G: PreMetricGroup) -> SubgroupPresentation:
    """The kernel of the associated pairing, via kernel_mod_orders on the
    Gram matrix scaled to integers."""
    d = len(G.orders)
    if d == 0:
        return SubgroupPresentation((), (), ())
    scale = math.lcm(*(v.denominator for row in G.gram for v in row), 1)
    matrix = [[int(G.gram[i][j].value * scale) for i in range(d)] for j in range(d)]
    return kernel_mod_orders(matrix, [scale] * d, G.orders)


def radical_and_classify(G: PreMetricGroup):
    """("nondegenerate", None) | ("tame", radical) | ("wild", radical).

    The form is tame when q vanishes on every radical generator (q restricted
    to the radical is a homomorphism, so generators suffice)."""
    rad = radical(G)
    if not rad.generators:
        return "nondegenerate", None
    if all(not eval_q(G, g) for g in rad.generators):
        return "tame", rad
    return "wild", rad


def split_p_parts(G: PreMetricGroup) -> list[tuple[int, PreMetricGroup]]:
    """Partition the generators by the prime of their order.

    Cross-prime Gram entries are forced to vanish for any bilinear pairing;
    a nonzero one means the input was not a valid pre-metric group."""
    primes: dict[int, list[int]] = {}
    for i, m in enumerate(G.orders):
        primes.setdefault(is_prime_power(m), []).append(i)
    for i in range(len(G.orders)):
        for j in range(len(G.orders)):
            if is_prime_power(G.orders[i]) != is_prime_power(G.orders[j]):
                if G.gram[i][j]:
                    raise ValueError(
                        f"nonzero pairing between coprime-order generators ({i},{j})"
                    )
    parts = []
    for p in sorted(primes):
        idx = primes[p]
        parts.append(
            (
                p,
                PreMetricGroup(
                    tuple(G.orders[i] for i in idx),
                    tuple(G.q_values[i] for i in idx),
                    tuple(tuple(G.gram[i][j] for j in idx) for i in idx),
                ),
            )
        )
    return parts


def quotient_by_radical(G: PreMetricGroup, rad: SubgroupPresentation) -> PreMetricGroup:
    """The nondegenerate quotient (G/rad, q-bar) of a tame form.

    Quotient generators come from the Smith normal form of the relation
    matrix (ambient orders plus radical generators); the quotient form is
    evaluated by lifting, which is well defined exactly in the tame case."""
    for g in rad.generators:
        if eval_q(G, g):
            raise ValueError("quotient form is undefined: the form is wild")
    d = len(G.orders)
    rel = [
        [G.orders[i] if r == i else 0 for r in range(d)]
        + [gen[i] for gen in rad.generators]
        for i in range(d)
    ]
    dmat, _, _, v_inv = _snf_full(rel)
    lifts: list[tuple[int, ...]] = []
    orders: list[int] = []
    for i in range(d):
        di = dmat[i][i]
        if di <= 1:
            continue
        lift = tuple(v_inv[j][i] for j in range(d))
        for q in prime_power_split(di):
            lifts.append(tuple(c * (di // q) for c in lift))
            orders.append(q)
    order_key = sorted(range(len(orders)), key=lambda t: (is_prime_power(orders[t]), -orders[t]))
    lifts = [lifts[i] for i in order_key]
    orders = [orders[i] for i in order_key]
    q_values = tuple(eval_q(G, lift) for lift in lifts)
    gram = tuple(
        tuple(eval_pairing(G, lifts[i], lifts[j]) for j in range(len(lifts)))
        for i in range(len(lifts))
    )
    return PreMetricGroup(tuple(orders), q_values, gram)


def sqrt_mod_prime_power(a: int, p: int, k: int) -> int | None:
    """Some x with x^2 = a mod p^k, or None; deterministic exhaustive search
    (the moduli arising here are bounded by the exponent of the group)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    mod = p ** k
    a %= mod
    for x in range(mod):
        if (x * x) % mod == a:
            return x
    return None


def _denom_exp(value: QmodZ, p: int) -> int:
    """r with denominator(value) = p^r (the denominator is a p-power here)."""
    den = value.denominator
    r = 0
    while den > 1:
        den //= p
        r += 1
    return r


def _as_int(value: Fraction) -> int:
    assert value.denominator == 1, value
    return value.numerator


def _smallest_nonresidue(p: int) -> int:
    return next(u for u in range(2, p) if _legendre(u, p) == -1)


class _Normalizer:
    """Mutable state for the Gram-normalization of a single-prime metric
    group: generator orders, q values and pairing matrix, updated under
    elementary generator changes x_i <- x_i - u x_j."""

    def __init__(self, G: PreMetricGroup, p: int):
        self.p = p
        self.orders = list(G.orders)
        self.q = [v.value for v in G.q_values]
        self.b = [[v.value for v in row] for row in G.gram]

    def subtract(self, j: int, u: int, i: int) -> None:
        """x_j <- x_j - u * x_i, updating q and the Gram matrix."""
        if u == 0:
            return
        q, b = self.q, self.b
        q[j] = (q[j] + u * u * q[i] - u * b[i][j]) % 1
        for k in range(len(self.orders)):
            if k != j:
                b[j][k] = (b[j][k] - u * b[i][k]) % 1
                b[k][j] = b[j][k]
        b[j][j] = (2 * q[j]) % 1

    def add_generator(self, i: int, j: int) -> None:
        """x_i <- x_i + x_j (used to surface an odd-p diagonal pivot)."""
        self.subtract(i, -1, j)

    def drop(self, indices) -> None:
        keep = [k for k in range(len(self.orders)) if k not in indices]
        self.orders = [self.orders[k] for k in keep]
        self.q = [self.q[k] for k in keep]
        self.b = [[self.b[r][c] for c in keep] for r in keep]


def _solve_unit(num: int, unit: int, mod: int) -> int:
    return (num * pow(unit, -1, mod)) % mod


def normalize_blocks(G: PreMetricGroup) -> list[IrreducibleBlock]:
    """Orthogonal decomposition of a nondegenerate single-prime form into
    irreducible blocks, by pivoting on maximal-denominator Gram entries.

    For odd p a diagonal pivot always exists after at most one generator
    merge; for p = 2 either a diagonal entry of maximal denominator is used
    or, failing that, the lexicographically first off-diagonal one, which
    splits off a rank-2 block classified as hyperbolic or elliptic by the
    parity of the two q-value numerators."""
    if not G.orders:
        return []
    p = is_prime_power(G.orders[0])
    if any(is_prime_power(m) != p for m in G.orders):
        raise ValueError("normalize_blocks expects a single-prime group")
    st = _Normalizer(G, p)
    blocks: list[IrreducibleBlock] = []

    while st.orders:
        n = len(st.orders)
        r = max(_denom_exp(QmodZ(st.b[i][j]), p) for i in range(n) for j in range(n))
        if r == 0:
            raise ValueError("degenerate form passed to normalize_blocks")
        denom = p ** r
        diag = next(
            (i for i in range(n) if _denom_exp(QmodZ(st.b[i][i]), p) == r), None
        )
        if diag is None and p != 2:
            i, j = next(
                (i, j)
                for i in range(n)
                for j in range(i + 1, n)
                if _denom_exp(QmodZ(st.b[i][j]), p) == r
            )
            st.add_generator(i, j)
            diag = i
        if diag is not None:
            pivot_num = _as_int(st.b[diag][diag] * denom) % denom
            for j in range(n):
                if j != diag:
                    num_j = _as_int(st.b[diag][j] * denom) % denom
                    st.subtract(j, _solve_unit(num_j, pivot_num, denom), diag)
            if p == 2:
                qnum = _as_int(st.q[diag] * 2 * denom) % (2 * denom)
                blocks.append(IrreducibleBlock("two_cyclic", 2, r, qnum % 8))
            else:
                alpha = 1 if _legendre(pivot_num, p) == 1 else _smallest_nonresidue(p)
                blocks.append(IrreducibleBlock("odd_cyclic", p, r, alpha))
            st.drop({diag})
            continue
        # p = 2 with only off-diagonal entries at the maximal denominator
        i, j = next(
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if _denom_exp(QmodZ(st.b[i][j]), p) == r
        )
        a = _as_int(st.b[i][i] * denom) % denom
        bb = _as_int(st.b[j][j] * denom) % denom
        c = _as_int(st.b[i][j] * denom) % denom
        det = (a * bb - c * c) % denom
        det_inv = pow(det, -1, denom)
        for k in range(n):
            if k in (i, j):
                continue
            rhs_i = _as_int(st.b[i][k] * denom) % denom
            rhs_j = _as_int(st.b[j][k] * denom) % denom
            u = (det_inv * (bb * rhs_i - c * rhs_j)) % denom
            w = (det_inv * (a * rhs_j - c * rhs_i)) % denom
            st.subtract(k, u, i)
            st.subtract(k, w, j)
        u_num = _as_int(st.q[i] * denom) % denom
        v_num = _as_int(st.q[j] * denom) % denom
        kind = "elliptic" if (u_num % 2 and v_num % 2) else "hyperbolic"
        blocks.append(IrreducibleBlock(kind, 2, r))
        st.drop({i, j})

    return blocks


def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def theta_block(blk: IrreducibleBlock, order: int = 8) -> Cyclotomic:
    """The Gauss sum of one irreducible block, an eighth root of unity.

    odd_cyclic: (2 alpha / p)^r * eps(p^r), with eps(s) = 1 for s = 1 mod 4
    and i for s = 3 mod 4; two_cyclic: (-1)^(r(alpha^2-1)/8) e(alpha/8);
    hyperbolic: 1; elliptic: (-1)^r."""
    if blk.kind == "hyperbolic":
        return Cyclotomic.one(order)
    if blk.kind == "elliptic":
        return Cyclotomic.from_rational((-1) ** blk.r, order)
    if blk.kind == "two_cyclic":
        alpha = blk.alpha % 8
        sign = (-1) ** ((blk.r * (alpha * alpha - 1) // 8) % 2)
        return sign * e_of(Fraction(alpha, 8), order)
    if blk.kind == "odd_cyclic":
        sym = _legendre(2 * blk.alpha, blk.p) ** blk.r
        s = blk.p ** blk.r
        eps = e_of(Fraction(1, 4), order) if s % 4 == 3 else Cyclotomic.one(order)
        return sym * eps
    raise ValueError(f"unknown block kind {blk.kind}")


def natural_order(G: PreMetricGroup) -> int:
    """A cyclotomic order containing every root the engine and the
    summation oracle need for this group."""
    return math.lcm(8, 4 * max(G.size, 1))


def gauss_sum(G: PreMetricGroup, order: int | None = None) -> Cyclotomic:
    """Theta(G, q), exactly.

    Wild forms give the exact zero; tame forms give sqrt(|radical|) times the
    Gauss sum of the nondegenerate quotient; nondegenerate forms give the
    product of the block values over all p-parts."""
    if order is None:
        order = natural_order(G)
    kind, rad = radical_and_classify(G)
    if kind == "wild":
        return Cyclotomic.zero(order)
    if kind == "tame":
        return sqrt_natural(rad.size, order) * gauss_sum(quotient_by_radical(G, rad), order)
    total = Cyclotomic.one(order)
    for _, part in split_p_parts(G):
        for blk in normalize_blocks(part):
            total = total * theta_block(blk, order)
    return total


def exhaustive_gauss_sum(G: PreMetricGroup, order: int | None = None) -> Cyclotomic:
    """Independent oracle: |G|^(-1/2) sum_x e(q(x)) by direct summation."""
    if order is None:
        order = natural_order(G)
    phase_counts: dict[Fraction, int] = {}
    ranges = [range(m) for m in G.orders]
    import itertools

    for coords in itertools.product(*ranges):
        phase = eval_q(G, coords).value
        phase_counts[phase] = phase_counts.get(phase, 0) + 1
    total = Cyclotomic.zero(order)
    for phase, count in sorted(phase_counts.items()):
        total = total + count * e_of(phase, order)
    size = G.size
    # 1/sqrt(n) = sqrt(n)/n
    return total * sqrt_natural(size, order) * Fraction(1, size)

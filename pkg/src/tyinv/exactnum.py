"""Exact arithmetic in Q/Z and in the cyclotomic fields Q(zeta_N).

Every weight, Gauss sum and invariant produced by this package is an element
of some Q(zeta_N).  Values are held in the power basis
1, zeta, ..., zeta^(phi(N)-1) with Fraction coefficients and reduced modulo
the N-th cyclotomic polynomial after every operation, so two values of the
same order are equal exactly when their coefficient tuples are equal.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache

import mpmath

__all__ = [
    "Rational",
    "QmodZ",
    "Cyclotomic",
    "OrderError",
    "cyclotomic_polynomial",
    "euler_phi",
    "root_of_unity",
    "sqrt_natural",
    "parse_rational",
    "format_rational",
]

#: Exact rational numbers.  fractions.Fraction is always in lowest terms with
#: a positive denominator, which is the canonical form used everywhere here.
Rational = Fraction

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


class OrderError(ValueError):
    """A cyclotomic order does not contain a required root or square root."""


def parse_rational(text: str) -> Fraction:
    """Parse "num/den" or "num" into a Fraction."""
    m = _RATIONAL_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    """Format a Fraction as "num/den", or "num" for integers."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class QmodZ:
    """An element of Q/Z, stored as a Fraction canonically reduced to [0, 1)."""

    __slots__ = ("value",)

    def __init__(self, value=0):
        if isinstance(value, QmodZ):
            self.value = value.value
        else:
            self.value = Fraction(value) % 1

    def __add__(self, other: "QmodZ") -> "QmodZ":
        return QmodZ(self.value + QmodZ(other).value)

    def __neg__(self) -> "QmodZ":
        return QmodZ(-self.value)

    def __sub__(self, other: "QmodZ") -> "QmodZ":
        return QmodZ(self.value - QmodZ(other).value)

    def scale(self, n: int) -> "QmodZ":
        """n * self, reduced mod 1."""
        return QmodZ(self.value * n)

    __mul__ = scale
    __rmul__ = scale

    def __eq__(self, other) -> bool:
        if isinstance(other, QmodZ):
            return self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == Fraction(other) % 1
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __bool__(self) -> bool:
        return self.value != 0

    @property
    def denominator(self) -> int:
        return self.value.denominator

    @property
    def numerator(self) -> int:
        return self.value.numerator

    def __repr__(self) -> str:
        return f"QmodZ({self.value})"

    def __str__(self) -> str:
        return format_rational(self.value)


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            result -= result // p
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_div_exact(num: list[int], den: tuple[int, ...]) -> list[int]:
    """Exact division of integer polynomials (coefficients low to high)."""
    num = list(num)
    deg_d = len(den) - 1
    lead = den[-1]
    out = [0] * (len(num) - deg_d)
    for i in range(len(num) - 1, deg_d - 1, -1):
        c = num[i]
        if c == 0:
            continue
        assert c % lead == 0
        q = c // lead
        out[i - deg_d] = q
        for j, dj in enumerate(den):
            num[i - deg_d + j] -= q * dj
    assert all(c == 0 for c in num), "division was not exact"
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the n-th cyclotomic polynomial Phi_n.

    Computed by dividing x^n - 1 by Phi_d for every proper divisor d of n.
    """
    if n < 1:
        raise ValueError("n must be positive")
    poly = [0] * (n + 1)
    poly[0], poly[n] = -1, 1
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_div_exact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_basis_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row k is zeta_n^k expressed in the power basis, as integer coefficients."""
    phi = euler_phi(n)
    modulus = cyclotomic_polynomial(n)
    rows = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(n):
        rows.append(tuple(cur))
        lead = cur[-1]
        nxt = [0] + cur[:-1]
        if lead:
            for i in range(phi):
                nxt[i] -= lead * modulus[i]
        cur = nxt
    return tuple(rows)


_ZERO = Fraction(0)


class Cyclotomic:
    """An element of Q(zeta_N) in canonical power-basis form.

    Values of different orders may be combined; operands are lifted to the
    lcm of the two orders first.  All operations are pure and instances are
    immutable, so values can be shared freely between workers.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != euler_phi(order):
            raise ValueError(
                f"need {euler_phi(order)} coefficients for order {order}, got {len(coeffs)}"
            )
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("Cyclotomic values are immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(order: int = 1) -> "Cyclotomic":
        return Cyclotomic(order, [_ZERO] * euler_phi(order))

    @staticmethod
    def one(order: int = 1) -> "Cyclotomic":
        return Cyclotomic.from_rational(1, order)

    @staticmethod
    def from_rational(q, order: int = 1) -> "Cyclotomic":
        coeffs = [_ZERO] * euler_phi(order)
        coeffs[0] = Fraction(q)
        return Cyclotomic(order, coeffs)

    # -- structure ---------------------------------------------------------

    def lift(self, order: int) -> "Cyclotomic":
        """Rewrite in Q(zeta_order); requires self.order | order."""
        if order == self.order:
            return self
        if order % self.order != 0:
            raise OrderError(f"cannot lift order {self.order} into order {order}")
        step = order // self.order
        table = _power_basis_table(order)
        out = [_ZERO] * euler_phi(order)
        for k, c in enumerate(self.coeffs):
            if c:
                row = table[(k * step) % order]
                for i, t in enumerate(row):
                    if t:
                        out[i] += c * t
        return Cyclotomic(order, out)

    def _common(self, other: "Cyclotomic"):
        n = math.lcm(self.order, other.order)
        return self.lift(n), other.lift(n)

    def _coerce(self, other) -> "Cyclotomic":
        if isinstance(other, Cyclotomic):
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic.from_rational(other, self.order)
        raise TypeError(f"cannot combine Cyclotomic with {type(other).__name__}")

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "Cyclotomic":
        other = self._coerce(other)
        a, b = self._common(other)
        return Cyclotomic(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(self.order, [-c for c in self.coeffs])

    def __sub__(self, other) -> "Cyclotomic":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Cyclotomic":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Cyclotomic":
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return Cyclotomic(self.order, [c * q for c in self.coeffs])
        a, b = self._common(other)
        n = a.order
        phi = len(a.coeffs)
        conv = [_ZERO] * (2 * phi - 1)
        for i, ci in enumerate(a.coeffs):
            if ci:
                for j, cj in enumerate(b.coeffs):
                    if cj:
                        conv[i + j] += ci * cj
        out = list(conv[:phi])
        table = _power_basis_table(n)
        for m in range(phi, len(conv)):
            c = conv[m]
            if c:
                row = table[m % n]
                for i, t in enumerate(row):
                    if t:
                        out[i] += c * t
        return Cyclotomic(n, out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Cyclotomic":
        if exponent < 0:
            raise ValueError("negative powers are not supported")
        acc = Cyclotomic.one(self.order)
        base = self
        while exponent:
            if exponent & 1:
                acc = acc * base
            base = base * base if exponent > 1 else base
            exponent >>= 1
        return acc

    def conj(self) -> "Cyclotomic":
        """Complex conjugation, zeta |-> zeta^(N-1)."""
        n = self.order
        table = _power_basis_table(n)
        out = [_ZERO] * len(self.coeffs)
        for k, c in enumerate(self.coeffs):
            if c:
                row = table[(n - k) % n]
                for i, t in enumerate(row):
                    if t:
                        out[i] += c * t
        return Cyclotomic(n, out)

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("value is not rational")
        return self.coeffs[0]

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Cyclotomic.from_rational(other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    __hash__ = None  # equality crosses orders; use explicit keys instead

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- input/output ------------------------------------------------------

    def approx(self, digits: int = 12) -> tuple[float, float]:
        """(re, im) with absolute error below 10**-digits."""
        if digits < 1:
            raise ValueError("digits must be >= 1")
        with mpmath.workdps(digits + 15):
            re = mpmath.mpf(0)
            im = mpmath.mpf(0)
            for k, c in enumerate(self.coeffs):
                if c:
                    angle = 2 * mpmath.pi * k / self.order
                    scale = mpmath.mpf(c.numerator) / c.denominator
                    re += scale * mpmath.cos(angle)
                    im += scale * mpmath.sin(angle)
            return float(re), float(im)

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [format_rational(c) for c in self.coeffs]}

    @staticmethod
    def from_json(data: dict) -> "Cyclotomic":
        return Cyclotomic(int(data["order"]), [parse_rational(c) for c in data["coeffs"]])

    def __repr__(self) -> str:
        return f"Cyclotomic(order={self.order}, coeffs={[str(c) for c in self.coeffs]})"


def root_of_unity(k: int, order: int) -> Cyclotomic:
    """zeta_order^k = e(k/order) in canonical form."""
    table = _power_basis_table(order)
    return Cyclotomic(order, table[k % order])


def e_of(phase, order: int) -> Cyclotomic:
    """e(phase) = exp(2 pi i phase) for a rational phase, in Q(zeta_order)."""
    q = Fraction(phase) % 1
    if order % q.denominator != 0:
        raise OrderError(f"order {order} has no root e({q})")
    return root_of_unity(q.numerator * (order // q.denominator), order)


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    m = n
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def _sqrt_prime(p: int, order: int) -> Cyclotomic:
    """The positive square root of a prime p inside Q(zeta_order).

    Uses the classical quadratic Gauss sums: sqrt(2) = zeta_8 + zeta_8^-1,
    and for odd p the sum of zeta_p^(a^2) over a mod p, which equals sqrt(p)
    for p = 1 mod 4 and i*sqrt(p) for p = 3 mod 4.
    """
    if p == 2:
        if order % 8 != 0:
            raise OrderError(f"order {order} does not contain sqrt(2); need 8 | order")
        return root_of_unity(order // 8, order) + root_of_unity(-(order // 8), order)
    if order % p != 0 or (p % 4 == 3 and order % (4 * p) != 0):
        raise OrderError(f"order {order} does not contain sqrt({p})")
    counts = [0] * p
    for a in range(p):
        counts[(a * a) % p] += 1
    step = order // p
    total = Cyclotomic.zero(order)
    for residue, cnt in enumerate(counts):
        if cnt:
            total = total + cnt * root_of_unity(residue * step, order)
    if p % 4 == 1:
        return total
    # total = i * sqrt(p); divide by i = zeta_4
    return total * root_of_unity(-(order // 4), order)


def sqrt_natural(n: int, order: int) -> Cyclotomic:
    """The positive real square root of a positive integer, exactly.

    Built multiplicatively from per-prime quadratic Gauss sums; raises
    OrderError naming the first prime whose root is missing from
    Q(zeta_order).
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    rational_part = 1
    residual: list[int] = []
    for p, exp in sorted(_factorize(n).items()):
        rational_part *= p ** (exp // 2)
        if exp % 2:
            residual.append(p)
    result = Cyclotomic.from_rational(rational_part, order)
    for p in residual:
        result = result * _sqrt_prime(p, order)
    return result

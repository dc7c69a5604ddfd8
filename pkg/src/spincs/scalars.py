"""Exact scalars: rationals modulo 1 and elements of cyclotomic fields.

Every invariant computed by this package is an element of some Q(zeta_N),
so the scalar type is a polynomial in zeta_N with rational coefficients,
kept reduced modulo the N-th cyclotomic polynomial.  Reduced forms are
canonical, which makes equality a coefficient comparison.  Values remember
the order they were created with and are promoted to a common order on
demand; no attempt is made to descend to the minimal subfield.

Floating point enters only through ``to_complex``, which exists for display
and cross-checks, never for equality decisions.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

import mpmath

__all__ = [
    "ORDER_CAP",
    "OrderOverflowError",
    "QmodZ",
    "Cyclotomic",
    "root_of_unity",
    "sqrt_nat",
    "to_complex",
]

# Largest cyclotomic order we are willing to work in.  Desk-scale metric
# groups keep N tiny; hitting the cap means an lcm blow-up upstream, which
# should fail loudly instead of grinding forever.
ORDER_CAP = 100_000

RationalLike = Union[int, Fraction, str]


class OrderOverflowError(ArithmeticError):
    """A field operation would require Q(zeta_N) with N above ORDER_CAP."""


class QmodZ:
    """A rational residue modulo 1, stored in lowest terms in [0, 1)."""

    __slots__ = ("value",)

    def __init__(self, value: RationalLike | "QmodZ") -> None:
        if isinstance(value, QmodZ):
            frac = value.value
        else:
            frac = Fraction(value) % 1
        object.__setattr__(self, "value", frac)

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator

    def __add__(self, other: "QmodZ | RationalLike") -> "QmodZ":
        other = other if isinstance(other, QmodZ) else QmodZ(other)
        return QmodZ(self.value + other.value)

    __radd__ = __add__

    def __neg__(self) -> "QmodZ":
        return QmodZ(-self.value)

    def __sub__(self, other: "QmodZ | RationalLike") -> "QmodZ":
        other = other if isinstance(other, QmodZ) else QmodZ(other)
        return QmodZ(self.value - other.value)

    def __mul__(self, n: int) -> "QmodZ":
        if not isinstance(n, int):
            return NotImplemented
        return QmodZ(self.value * n)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, QmodZ):
            return self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == Fraction(other) % 1
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("QmodZ", self.value))

    def __repr__(self) -> str:
        return f"QmodZ({self.value})"

    def __str__(self) -> str:
        return str(self.value)


def _divisors(n: int) -> list[int]:
    divs = []
    for d in range(1, int(math.isqrt(n)) + 1):
        if n % d == 0:
            divs.append(d)
            if d != n // d:
                divs.append(n // d)
    return sorted(divs)


def _int_poly_div_exact(num: list[int], den: tuple[int, ...]) -> list[int]:
    """Divide integer polynomials (ascending coefficients) with monic
    divisor; the division must be exact."""
    num = list(num)
    deg_d = len(den) - 1
    out = [0] * (len(num) - deg_d)
    for i in range(len(num) - 1, deg_d - 1, -1):
        c = num[i]
        if c == 0:
            continue
        out[i - deg_d] = c
        for j, dj in enumerate(den):
            num[i - deg_d + j] -= c * dj
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (ascending) of Phi_n, obtained by dividing x^n - 1 by
    Phi_d for every proper divisor d of n."""
    if n < 1:
        raise ValueError("order must be positive")
    if n == 1:
        return (-1, 1)
    poly = [0] * (n + 1)
    poly[0], poly[n] = -1, 1
    for d in _divisors(n):
        if d < n:
            poly = _int_poly_div_exact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


def _phi_degree(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


def _reduce_mod_cyclotomic(order: int, coeffs: list[Fraction]) -> tuple[Fraction, ...]:
    """Remainder of a rational polynomial modulo Phi_order (monic)."""
    phi = cyclotomic_polynomial(order)
    deg = len(phi) - 1
    work = list(coeffs)
    for i in range(len(work) - 1, deg - 1, -1):
        c = work[i]
        if c == 0:
            continue
        work[i] = Fraction(0)
        for j in range(deg):
            work[i - deg + j] -= c * phi[j]
    work = work[:deg]
    work.extend(Fraction(0) for _ in range(deg - len(work)))
    return tuple(work)


def _check_order(order: int) -> None:
    if order > ORDER_CAP:
        raise OrderOverflowError(
            f"cyclotomic order {order} exceeds the cap {ORDER_CAP}"
        )


class Cyclotomic:
    """An element of Q(zeta_order), reduced modulo Phi_order.

    ``coeffs`` has length phi(order) and represents the polynomial
    sum(coeffs[i] * zeta^i).  Two values compare equal iff their promotions
    to the lcm order have identical coefficient tuples.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable[RationalLike]) -> None:
        if order < 1:
            raise ValueError("order must be positive")
        _check_order(order)
        frac = [Fraction(c) for c in coeffs]
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", _reduce_mod_cyclotomic(order, frac))

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rational(cls, value: RationalLike) -> "Cyclotomic":
        return cls(1, [Fraction(value)])

    @classmethod
    def zeta(cls, order: int, exponent: int = 1) -> "Cyclotomic":
        return cls.from_exponents(order, {exponent: 1})

    @classmethod
    def from_exponents(
        cls, order: int, terms: Mapping[int, RationalLike]
    ) -> "Cyclotomic":
        """sum(coeff * zeta_order^exp) with exponents reduced mod order."""
        if order < 1:
            raise ValueError("order must be positive")
        _check_order(order)
        coeffs = [Fraction(0)] * order
        for exp, coeff in terms.items():
            coeffs[exp % order] += Fraction(coeff)
        return cls(order, coeffs)

    # -- promotion -----------------------------------------------------

    def promote(self, order: int) -> "Cyclotomic":
        if order == self.order:
            return self
        if order % self.order != 0:
            raise ValueError(f"{self.order} does not divide {order}")
        step = order // self.order
        return Cyclotomic.from_exponents(
            order, {i * step: c for i, c in enumerate(self.coeffs) if c}
        )

    def _common(self, other: "Cyclotomic") -> tuple["Cyclotomic", "Cyclotomic"]:
        n = math.lcm(self.order, other.order)
        _check_order(n)
        return self.promote(n), other.promote(n)

    @staticmethod
    def _coerce(value: "Cyclotomic | RationalLike") -> "Cyclotomic":
        if isinstance(value, Cyclotomic):
            return value
        return Cyclotomic.from_rational(value)

    # -- ring / field operations ----------------------------------------

    def __add__(self, other: "Cyclotomic | RationalLike") -> "Cyclotomic":
        other = self._coerce(other)
        a, b = self._common(other)
        return Cyclotomic(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(self.order, [-c for c in self.coeffs])

    def __sub__(self, other: "Cyclotomic | RationalLike") -> "Cyclotomic":
        return self + (-self._coerce(other))

    def __rsub__(self, other: "Cyclotomic | RationalLike") -> "Cyclotomic":
        return self._coerce(other) - self

    def __mul__(self, other: "Cyclotomic | RationalLike") -> "Cyclotomic":
        other = self._coerce(other)
        a, b = self._common(other)
        prod = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if y:
                    prod[i + j] += x * y
        return Cyclotomic(a.order, prod)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in a cyclotomic field")
        phi = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        # Extended Euclid in Q[x]: u*self + v*Phi = gcd (a nonzero constant).
        r0, r1 = phi, list(self.coeffs)
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while any(r1):
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        const = r0[0]
        if len(_poly_trim(r0)) != 1:
            raise ArithmeticError("element not invertible modulo Phi_N")
        inv = [c / const for c in s0]
        return Cyclotomic(self.order, inv)

    def __truediv__(self, other: "Cyclotomic | RationalLike") -> "Cyclotomic":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other: "Cyclotomic | RationalLike") -> "Cyclotomic":
        return self._coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "Cyclotomic":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Cyclotomic.from_rational(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    # -- predicates and conversions --------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def as_rational(self) -> Fraction | None:
        """The value as a Fraction if it lies in Q, else None."""
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Cyclotomic.from_rational(other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mono = f"z{self.order}" if i == 1 else f"z{self.order}^{i}"
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms) if terms else "0"

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "coeffs": [str(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "Cyclotomic":
        return cls(int(doc["order"]), [Fraction(c) for c in doc["coeffs"]])


def root_of_unity(r: QmodZ | RationalLike) -> Cyclotomic:
    """The exact value of exp(2*pi*i*r) for rational r."""
    r = r if isinstance(r, QmodZ) else QmodZ(r)
    return Cyclotomic.zeta(r.denominator, r.numerator)


def _factorize(n: int) -> dict[int, int]:
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


@lru_cache(maxsize=None)
def _sqrt_prime(p: int) -> Cyclotomic:
    """Exact square root of a prime, positive under the standard embedding.

    sqrt(2) = zeta_8 + zeta_8^-1.  For odd p the quadratic Gauss sum
    sum_a zeta_p^(a^2) equals sqrt(p) for p = 1 mod 4 and i*sqrt(p) for
    p = 3 mod 4, so the latter needs an extra factor of -i = zeta_4^3.
    """
    if p == 2:
        return Cyclotomic.from_exponents(8, {1: 1, -1: 1})
    terms: dict[int, int] = {}
    for a in range(p):
        terms[(a * a) % p] = terms.get((a * a) % p, 0) + 1
    gauss = Cyclotomic.from_exponents(p, terms)
    if p % 4 == 1:
        return gauss
    return gauss * Cyclotomic.zeta(4, 3)


def sqrt_nat(n: int) -> Cyclotomic:
    """Exact square root of a natural number n >= 1.

    The result squares to n and is the positive real root under the
    embedding zeta_N -> exp(2*pi*i/N).
    """
    if n < 1:
        raise ValueError("sqrt_nat requires n >= 1")
    result = Cyclotomic.from_rational(1)
    outside = 1
    for p, e in _factorize(n).items():
        outside *= p ** (e // 2)
        if e % 2:
            result = result * _sqrt_prime(p)
    return result * outside


def to_complex(value: Cyclotomic, digits: int = 15) -> mpmath.mpc:
    """Evaluate at zeta_order = exp(2*pi*i/order) with at least ``digits``
    significant decimal digits.  Display and cross-checks only."""
    if digits < 1:
        raise ValueError("digits must be >= 1")
    with mpmath.workdps(digits + 10):
        two_pi_i = 2 * mpmath.pi * mpmath.mpc(0, 1)
        zeta = mpmath.e ** (two_pi_i / value.order)
        acc = mpmath.mpc(0)
        power = mpmath.mpc(1)
        for c in value.coeffs:
            if c:
                acc += mpmath.mpf(c.numerator) / c.denominator * power
            power *= zeta
        return +acc


# -- small polynomial helpers over Fraction (ascending coefficients) -----


def _poly_trim(p: list[Fraction]) -> list[Fraction]:
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


def _poly_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] -= c
    return _poly_trim(out)


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _poly_trim(out)


def _poly_divmod(
    num: list[Fraction], den: list[Fraction]
) -> tuple[list[Fraction], list[Fraction]]:
    num = list(num)
    den = _poly_trim(list(den))
    deg_d = len(den) - 1
    lead = den[-1]
    if len(_poly_trim(num)) < len(den):
        return [Fraction(0)], _poly_trim(num)
    q = [Fraction(0)] * (len(num) - deg_d)
    for i in range(len(num) - 1, deg_d - 1, -1):
        c = num[i] / lead
        if c == 0:
            continue
        q[i - deg_d] = c
        for j, dj in enumerate(den):
            num[i - deg_d + j] -= c * dj
    return _poly_trim(q), _poly_trim(num)

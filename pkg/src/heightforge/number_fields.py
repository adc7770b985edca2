"""Quadratic fields and cyclotomic integer rings.

Quadratic elements are kept as exact rational pairs a + b*sqrt(d); prime
splitting, normalized valuations and conjugation are what the height and
descent layers consume.  Cyclotomic integers live in the redundant exponent
basis 1, zeta, ..., zeta^(m-1) with equality decided after reduction modulo
the m-th cyclotomic polynomial.

Valuations are normalized so that w(x) = v * log p with v(p) = 1; the
smallest positive value on nonzero field elements is 1/e.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exact_arith import (
    DegenerateInputError,
    IntPolynomial,
    Rational,
    is_prime,
    legendre_symbol,
    sqrt_mod,
    valuation_p,
)

__all__ = [
    "CyclotomicElement",
    "GaloisAutomorphism",
    "QuadraticElement",
    "QuadraticField",
    "QuadraticPrime",
    "apply_automorphism",
    "cyclotomic_polynomial",
    "divides_in_cyclotomic",
    "primes_above",
    "quad_valuation",
    "splitting_type",
]


def _squarefree(n: int) -> bool:
    n = abs(n)
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        while n % k == 0:
            n //= k
        k += 1
    return True


@dataclass(frozen=True)
class QuadraticField:
    """Q(sqrt(d)) for squarefree d, discriminant d or 4d."""

    d: int

    def __post_init__(self) -> None:
        if self.d in (0, 1) or not _squarefree(self.d):
            raise DegenerateInputError(f"d = {self.d} is not squarefree or is 0/1")

    @property
    def discriminant(self) -> int:
        return self.d if self.d % 4 == 1 else 4 * self.d

    @property
    def omega_is_half(self) -> bool:
        """True when the ring of integers is Z[(1+sqrt d)/2]."""
        return self.d % 4 == 1

    def omega_minpoly_coeffs(self) -> tuple[int, int]:
        """(c0, c1) with omega^2 + c1*omega + c0 = 0."""
        if self.omega_is_half:
            return ((1 - self.d) // 4, -1)
        return (-self.d, 0)

    def element(self, a: Rational, b: Rational = 0) -> "QuadraticElement":
        return QuadraticElement(Fraction(a), Fraction(b), self)

    def sqrt_gen(self) -> "QuadraticElement":
        return QuadraticElement(Fraction(0), Fraction(1), self)


@dataclass(frozen=True)
class QuadraticElement:
    """a + b*sqrt(d) with exact rational a, b."""

    a: Fraction
    b: Fraction
    field: QuadraticField

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    def _coerce(self, other) -> "QuadraticElement | None":
        if isinstance(other, QuadraticElement):
            if other.field != self.field:
                raise DegenerateInputError("mixed quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticElement(Fraction(other), Fraction(0), self.field)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadraticElement(self.a + o.a, self.b + o.b, self.field)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticElement(-self.a, -self.b, self.field)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self.field.d
        return QuadraticElement(
            self.a * o.a + d * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.field,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero quadratic element")
        return QuadraticElement(self.a / n, -self.b / n, self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadraticElement):
            return (
                self.field == other.field
                and self.a == other.a
                and self.b == other.b
            )
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.field.d))

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def conjugate(self) -> "QuadraticElement":
        return QuadraticElement(self.a, -self.b, self.field)

    def norm(self) -> Fraction:
        return self.a * self.a - self.field.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def omega_coords(self) -> tuple[int, int, int]:
        """(u, v, D) with x = (u + v*omega)/D, u, v, D integers, D > 0."""
        if self.field.omega_is_half:
            # sqrt d = 2*omega - 1
            c0, c1 = self.a - self.b, 2 * self.b
        else:
            c0, c1 = self.a, self.b
        D = (c0.denominator * c1.denominator) // math.gcd(
            c0.denominator, c1.denominator
        )
        return int(c0 * D), int(c1 * D), D

    def __str__(self) -> str:
        if not self.b:
            return str(self.a)
        tail = f"sqrt({self.field.d})" if abs(self.b) == 1 else f"{abs(self.b)}*sqrt({self.field.d})"
        if not self.a:
            return tail if self.b > 0 else f"-{tail}"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{tail}"


@dataclass(frozen=True)
class QuadraticPrime:
    """Prime of Q(sqrt d) above p.

    For split primes, root is the chosen residue of omega mod p; the two
    primes above p are this one and its conjugate().  e*f is the local
    degree [L_w : Q_p].
    """

    field: QuadraticField
    p: int
    splitting: str  # "split" | "inert" | "ramified"
    e: int
    f: int
    root: int | None = None

    @property
    def local_degree(self) -> int:
        return self.e * self.f

    def conjugate(self) -> "QuadraticPrime":
        if self.splitting != "split":
            return self
        c0, c1 = self.field.omega_minpoly_coeffs()
        other = (-c1 - self.root) % self.p
        return QuadraticPrime(self.field, self.p, "split", 1, 1, other)

    def label(self) -> str:
        if self.splitting == "split":
            return f"{self.p}|split(w={self.root})"
        return f"{self.p}|{self.splitting}"


def splitting_type(field: QuadraticField, p: int) -> QuadraticPrime:
    """Canonical prime above p: e, f and splitting per the discriminant.

    p = 2 splits iff disc = 1 mod 8; odd p split iff disc is a nonzero
    square mod p; ramified iff p divides disc.
    """
    if not is_prime(p):
        raise DegenerateInputError(f"{p} is not prime")
    disc = field.discriminant
    if disc % p == 0:
        return QuadraticPrime(field, p, "ramified", 2, 1, _split_root(field, p))
    if p == 2:
        if disc % 8 == 1:
            return QuadraticPrime(field, 2, "split", 1, 1, _split_root(field, 2))
        return QuadraticPrime(field, 2, "inert", 1, 2)
    if legendre_symbol(disc, p) == 1:
        return QuadraticPrime(field, p, "split", 1, 1, _split_root(field, p))
    return QuadraticPrime(field, p, "inert", 1, 2)


def _split_root(field: QuadraticField, p: int) -> int:
    """Smallest nonnegative root of the omega minimal polynomial mod p."""
    c0, c1 = field.omega_minpoly_coeffs()
    for r in range(p):
        if (r * r + c1 * r + c0) % p == 0:
            return r
    raise ArithmeticError("no residue root; prime is not split or ramified")


def primes_above(field: QuadraticField, p: int) -> list[QuadraticPrime]:
    P = splitting_type(field, p)
    if P.splitting == "split":
        return [P, P.conjugate()]
    return [P]


def quad_valuation(x: QuadraticElement, P: QuadraticPrime) -> Fraction:
    """Normalized valuation v with w(x) = v log p and v(p) = 1.

    Integer for split and inert primes, half-integers appear at ramified
    primes (v(sqrt d) = 1/2 when p | d).
    """
    if not x:
        raise DegenerateInputError("valuation of zero")
    p = P.p
    if P.splitting in ("inert", "ramified"):
        vn = valuation_p(x.norm(), p)
        return Fraction(int(vn), 2)
    # split: content and residue test in the omega basis
    u, v, D = x.omega_coords()
    val = Fraction(-valuation_p(Fraction(D), p))
    # strip p-content of the integral part
    t = 0
    while u % p == 0 and v % p == 0 and (u or v):
        u //= p
        v //= p
        t += 1
    val += t
    if (u + v * P.root) % p == 0:
        c0, c1 = x.field.omega_minpoly_coeffs()
        # norm of u + v*omega
        nrm = u * u - c1 * u * v + c0 * v * v
        val += int(valuation_p(Fraction(nrm), p))
    return val


@dataclass(frozen=True)
class GaloisAutomorphism:
    """Either quadratic conjugation or zeta_m -> zeta_m^k."""

    kind: str  # "conjugation" | "cyclotomic-power"
    k: int = 0
    m: int = 0

    def __post_init__(self) -> None:
        if self.kind == "cyclotomic-power":
            if self.m < 1 or math.gcd(self.k, self.m) != 1:
                raise DegenerateInputError(
                    f"k = {self.k} is not invertible mod m = {self.m}"
                )
        elif self.kind != "conjugation":
            raise DegenerateInputError(f"unknown automorphism kind {self.kind!r}")

    def order(self) -> int:
        if self.kind == "conjugation":
            return 2
        n, kk = 1, self.k % self.m
        while kk != 1 % self.m:
            kk = kk * self.k % self.m
            n += 1
        return n


def apply_automorphism(x, g: GaloisAutomorphism):
    if g.kind == "conjugation":
        if not isinstance(x, QuadraticElement):
            raise DegenerateInputError("conjugation needs a quadratic element")
        return x.conjugate()
    if not isinstance(x, CyclotomicElement):
        raise DegenerateInputError("cyclotomic power needs a cyclotomic element")
    if g.m != x.m:
        raise DegenerateInputError("automorphism level does not match element")
    out = [0] * x.m
    for i, c in enumerate(x.coeffs):
        out[(i * g.k) % x.m] += c
    return CyclotomicElement(x.m, tuple(out))


@dataclass(frozen=True)
class CyclotomicElement:
    """Element of Z[zeta_m] in the exponent basis 1, zeta, ..., zeta^(m-1)."""

    m: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.m < 1:
            raise DegenerateInputError("m must be positive")
        if len(self.coeffs) != self.m:
            raise DegenerateInputError(
                f"need {self.m} exponent coefficients, got {len(self.coeffs)}"
            )
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @classmethod
    def zeta_power(cls, m: int, i: int, scale: int = 1) -> "CyclotomicElement":
        c = [0] * m
        c[i % m] = scale
        return cls(m, tuple(c))

    @classmethod
    def integer(cls, m: int, n: int) -> "CyclotomicElement":
        c = [0] * m
        c[0] = n
        return cls(m, tuple(c))

    def _check(self, other: "CyclotomicElement") -> None:
        if self.m != other.m:
            raise DegenerateInputError("mixed cyclotomic levels")

    def __add__(self, other: "CyclotomicElement") -> "CyclotomicElement":
        self._check(other)
        return CyclotomicElement(
            self.m, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __sub__(self, other: "CyclotomicElement") -> "CyclotomicElement":
        self._check(other)
        return CyclotomicElement(
            self.m, tuple(a - b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __neg__(self) -> "CyclotomicElement":
        return CyclotomicElement(self.m, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return CyclotomicElement(self.m, tuple(other * a for a in self.coeffs))
        self._check(other)
        out = [0] * self.m
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b == 0:
                    continue
                out[(i + j) % self.m] += a * b
        return CyclotomicElement(self.m, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "CyclotomicElement":
        if n < 0:
            raise DegenerateInputError("negative cyclotomic powers unsupported")
        result = CyclotomicElement.integer(self.m, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def canonical_coeffs(self) -> tuple[int, ...]:
        """Coefficients on 1, zeta, ..., zeta^(phi(m)-1) after reduction mod Phi_m."""
        phi = cyclotomic_polynomial(self.m)
        rem = list(self.coeffs)
        deg_phi = phi.degree
        for k in range(len(rem) - 1, deg_phi - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            rem[k] = 0
            for i, pc in enumerate(phi.coeffs[:-1]):
                rem[k - deg_phi + i] -= c * pc
        return tuple(rem[:deg_phi])

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = CyclotomicElement.integer(self.m, other)
        if not isinstance(other, CyclotomicElement):
            return NotImplemented
        if self.m != other.m:
            return False
        return self.canonical_coeffs() == other.canonical_coeffs()

    def __hash__(self):
        return hash((self.m, self.canonical_coeffs()))


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> IntPolynomial:
    """Phi_m by exact division of X^m - 1 by the proper-divisor factors."""
    num = IntPolynomial.from_coeffs([-1] + [0] * (m - 1) + [1])
    for d in range(1, m):
        if m % d == 0:
            num = _poly_divexact(num, cyclotomic_polynomial(d))
    return num


def _poly_divexact(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Exact division of integer polynomials, b monic up to sign."""
    rem = list(a.coeffs)
    out = [0] * (a.degree - b.degree + 1)
    lb = b.leading
    for k in range(a.degree - b.degree, -1, -1):
        c = rem[k + b.degree]
        if c % lb != 0:
            raise ArithmeticError("division is not exact")
        q = c // lb
        out[k] = q
        if q:
            for i, bc in enumerate(b.coeffs):
                rem[k + i] -= q * bc
    if any(rem):
        raise ArithmeticError("division is not exact")
    return IntPolynomial.from_coeffs(out)


def divides_in_cyclotomic(x: CyclotomicElement, n: int) -> bool:
    """True iff x is in n*Z[zeta_m], decided on the canonical reduced form."""
    if n == 0:
        return x == 0
    return all(c % n == 0 for c in x.canonical_coeffs())

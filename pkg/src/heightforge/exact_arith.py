"""Exact arithmetic primitives.

p-adic valuations of rationals, dense integer polynomials with resultants
and integer Bezout identities, the periodic second Bernoulli polynomial,
and small modular helpers (primality, Legendre symbol, square roots mod p)
shared by the number-field and curve layers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

__all__ = [
    "INFINITE_VALUATION",
    "IntPolynomial",
    "bernoulli2_periodic",
    "bezout_integer",
    "is_prime",
    "legendre_symbol",
    "resultant",
    "sqrt_mod",
    "sylvester_resultant",
    "valuation_p",
]

Rational = Union[int, Fraction]

INFINITE_VALUATION = math.inf


class DegenerateInputError(ValueError):
    """Input outside an operation's stated domain."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n below 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def valuation_p(r: Rational, p: int) -> Union[int, float]:
    """Exponent of p in r; +infinity at r = 0. p must be prime."""
    if not is_prime(p):
        raise DegenerateInputError(f"valuation base {p} is not prime")
    r = Fraction(r)
    if r == 0:
        return INFINITE_VALUATION
    v = 0
    num = r.numerator
    while num % p == 0:
        num //= p
        v += 1
    den = r.denominator
    while den % p == 0:
        den //= p
        v -= 1
    return v


def bernoulli2_periodic(t: Rational) -> Fraction:
    """B2({t}) = {t}^2 - {t} + 1/6 with {t} the fractional part."""
    t = Fraction(t)
    frac = t - math.floor(t)
    return frac * frac - frac + Fraction(1, 6)


@dataclass(frozen=True)
class IntPolynomial:
    """Dense integer polynomial, coefficients low degree first.

    The zero polynomial is the empty tuple; trailing zeros are stripped on
    construction so degree and leading coefficient are well defined.
    """

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        for x in self.coeffs:
            if x != int(x):
                raise DegenerateInputError(f"non-integer coefficient {x!r}")
        c = tuple(int(x) for x in self.coeffs)
        while c and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int]) -> "IntPolynomial":
        return cls(tuple(coeffs))

    @classmethod
    def x_power(cls, n: int, scale: int = 1) -> "IntPolynomial":
        return cls((0,) * n + (scale,))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        if not self.coeffs:
            return -1
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        if not self.coeffs:
            raise DegenerateInputError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntPolynomial(tuple(out))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if self.is_zero or other.is_zero:
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def scale(self, k: int) -> "IntPolynomial":
        return IntPolynomial(tuple(k * c for c in self.coeffs))

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*X")
            else:
                parts.append(f"{c}*X^{i}")
        return " + ".join(parts)


def _pseudo_rem(a: list[int], b: list[int]) -> list[int]:
    # lc(b)^(deg a - deg b + 1) * a mod b, all integer.
    da, db = len(a) - 1, len(b) - 1
    lb = b[-1]
    r = list(a)
    for _ in range(da - db + 1):
        dr = len(r) - 1
        if dr < db or not any(r):
            r = [lb * c for c in r]
            continue
        lead = r[-1]
        r = [lb * c for c in r[:-1]]
        for i in range(db):
            r[dr - db + i] -= lead * b[i]
        while r and r[-1] == 0:
            r.pop()
        if not r:
            break
    return r


def resultant(f: IntPolynomial, g: IntPolynomial) -> int:
    """Resultant of f and g, Sylvester convention with f rows first.

    Subresultant pseudo-remainder sequence; checked against the Sylvester
    determinant oracle in the tests for degrees up to six.
    """
    if f.is_zero or g.is_zero:
        raise DegenerateInputError("resultant of the zero polynomial")
    m, n = f.degree, g.degree
    if m == 0:
        return f.coeffs[0] ** n
    if n == 0:
        return g.coeffs[0] ** m
    sign = 1
    A = list(f.coeffs)
    B = list(g.coeffs)
    if m < n:
        A, B = B, A
        if (m & 1) and (n & 1):
            sign = -sign
    gcoef = 1
    h = 1
    while True:
        dA, dB = len(A) - 1, len(B) - 1
        delta = dA - dB
        if (dA & 1) and (dB & 1):
            sign = -sign
        R = _pseudo_rem(A, B)
        A = B
        if not R:
            return 0  # common factor
        denom = gcoef * h**delta
        B = [c // denom for c in R]
        gcoef = A[-1]
        if delta == 0:
            # h unchanged by h^(1-delta) g^delta only when written carefully
            h = h
        else:
            h = (gcoef**delta) // (h ** (delta - 1))
        if len(B) - 1 == 0:
            dA = len(A) - 1
            res = (B[0] ** dA) // (h ** (dA - 1)) if dA >= 1 else B[0]
            return sign * res


def sylvester_matrix(f: IntPolynomial, g: IntPolynomial) -> list[list[int]]:
    """Sylvester matrix, f rows first, coefficients high degree leftmost."""
    m, n = f.degree, g.degree
    if m < 0 or n < 0:
        raise DegenerateInputError("Sylvester matrix needs nonzero polynomials")
    size = m + n
    fr = list(reversed(f.coeffs))
    gr = list(reversed(g.coeffs))
    rows = []
    for i in range(n):
        rows.append([0] * i + fr + [0] * (n - 1 - i))
    for i in range(m):
        rows.append([0] * i + gr + [0] * (m - 1 - i))
    return rows


def _bareiss_det(mat: list[list[int]]) -> int:
    """Fraction-free determinant of an integer matrix."""
    a = [row[:] for row in mat]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def sylvester_resultant(f: IntPolynomial, g: IntPolynomial) -> int:
    """Resultant as the Sylvester determinant. Test oracle for small degrees."""
    if f.is_zero or g.is_zero:
        raise DegenerateInputError("resultant of the zero polynomial")
    if f.degree == 0:
        return f.coeffs[0] ** g.degree
    if g.degree == 0:
        return g.coeffs[0] ** f.degree
    return _bareiss_det(sylvester_matrix(f, g))


def bezout_integer(
    f: IntPolynomial, g: IntPolynomial
) -> tuple[IntPolynomial, IntPolynomial, int]:
    """Integer polynomials (a, b) and r > 0 with a*f + b*g = r.

    Solves the Sylvester system by Cramer cofactors, so the coefficients are
    integral by construction and r divides the resultant. The returned
    identity is re-verified symbolically; degenerate inputs (common root,
    resultant zero) raise.
    """
    if f.is_zero or g.is_zero:
        raise DegenerateInputError("bezout_integer needs nonzero polynomials")
    m, n = f.degree, g.degree
    if m == 0:
        c = f.coeffs[0]
        a = IntPolynomial((1 if c > 0 else -1,))
        return a, IntPolynomial(()), abs(c)
    if n == 0:
        c = g.coeffs[0]
        b = IntPolynomial((1 if c > 0 else -1,))
        return IntPolynomial(()), b, abs(c)

    # Columns are X^i f (i < n) then X^j g (j < m); row k is the X^k coefficient.
    size = m + n
    M = [[0] * size for _ in range(size)]
    for i in range(n):
        for k, c in enumerate(f.coeffs):
            M[k + i][i] = c
    for j in range(m):
        for k, c in enumerate(g.coeffs):
            M[k + j][n + j] = c
    D = _bareiss_det(M)
    if D == 0:
        raise DegenerateInputError("polynomials share a root: resultant is zero")

    # Solution of M x = D e_0 is the first adjugate column: cofactors C_{0,j}.
    sol = []
    for j in range(size):
        minor = [
            [M[r][c] for c in range(size) if c != j] for r in range(1, size)
        ]
        cof = (-1) ** j * _bareiss_det(minor)
        sol.append(cof)
    a = IntPolynomial(tuple(sol[:n]))
    b = IntPolynomial(tuple(sol[n:]))
    r = D
    if r < 0:
        a, b, r = -a, -b, -r
    content = math.gcd(math.gcd(a.content(), b.content()), r)
    if content > 1:
        a = IntPolynomial(tuple(c // content for c in a.coeffs))
        b = IntPolynomial(tuple(c // content for c in b.coeffs))
        r //= content
    check = a * f + b * g
    if check.coeffs != (r,):
        raise ArithmeticError("bezout identity failed verification")
    return a, b, r


def legendre_symbol(a: int, p: int) -> int:
    """(a/p) for odd prime p: 1, -1, or 0."""
    a %= p
    if a == 0:
        return 0
    t = pow(a, (p - 1) // 2, p)
    return 1 if t == 1 else -1


def sqrt_mod(a: int, p: int) -> int | None:
    """Smallest nonnegative square root of a mod p, or None. Tonelli-Shanks."""
    a %= p
    if p == 2:
        return a
    if a == 0:
        return 0
    if legendre_symbol(a, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return min(r, p - r)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre_symbol(z, p) != -1:
        z += 1
    c = pow(z, q, p)
    r = pow(a, (q + 1) // 2, p)
    t = pow(a, q, p)
    m = s
    while t != 1:
        i = 0
        tt = t
        while tt != 1:
            tt = tt * tt % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        r = r * b % p
        c = b * b % p
        t = t * c % p
        m = i
    return min(r, p - r)

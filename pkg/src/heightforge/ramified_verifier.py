"""Ramified-prime machinery: the inertia congruence in cyclotomic rings,
the conjugation kernel check over ramified quadratic fields, and the
torsion-escape polynomial identity.

The congruence tau(alpha)^p = alpha^p mod p (not merely mod the prime
above p) holds for a suitable inertia element tau; in Z[zeta_m] with
p | m one can take tau(zeta_m) = zeta_m^k for any k = 1 mod
(m/p^a) p^(a-1) with k != 1 mod m, where a = v_p(m).  Over a ramified
quadratic field the inertia group is generated by conjugation, and the
point P' = [p]((tau-1)^2 P) lands in the square of the maximal ideal:
v(z(P')) >= 2 in uniformizer units, equivalently a local height of at
least log p.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Union

from .exact_arith import DegenerateInputError, IntPolynomial, is_prime
from .number_fields import (
    CyclotomicElement,
    GaloisAutomorphism,
    QuadraticField,
    apply_automorphism,
    cyclotomic_polynomial,
    divides_in_cyclotomic,
    splitting_type,
)
from .elliptic_core import (
    CurvePoint,
    WeierstrassCurve,
    group_op,
    in_kernel_of_reduction,
    negate,
    reduction_type,
    scalar_mul,
)

__all__ = [
    "ADWitness",
    "RamifiedCheckReport",
    "ad_tau_construct",
    "verify_ad_congruence",
    "ramified_point_check",
    "ramified_scan",
    "torsion_escape_identity",
]

# coordinate growth in the [p]((tau-1)^2 P) step goes like p^2, so the
# check is restricted to small primes to keep digits bounded
MAX_RAMIFIED_PRIME = 50
TORSION_SEARCH_BOUND = 18


@dataclass(frozen=True)
class ADWitness:
    """Congruence evidence for one modulus: tau and the elements checked."""

    m: int
    p: int
    tau: GaloisAutomorphism
    samples: tuple[CyclotomicElement, ...]
    all_pass: bool

    def __post_init__(self) -> None:
        if self.tau.kind != "cyclotomic-power" or self.tau.m != self.m:
            raise DegenerateInputError("tau must be a power map at level m")
        a = 0
        mm = self.m
        while mm % self.p == 0:
            mm //= self.p
            a += 1
        if a == 0:
            raise DegenerateInputError("p must divide m")
        modulus = mm * self.p ** (a - 1)
        if (self.tau.k - 1) % modulus != 0 or self.tau.k % self.m == 1 % self.m:
            raise DegenerateInputError("tau must fix zeta_{m/p} and move zeta_m")


@dataclass(frozen=True)
class RamifiedCheckReport:
    """Outcome of the [p]((tau-1)^2 P) valuation check at one ramified prime.

    Valuations are in uniformizer units (v(p) = e = 2); kernel_witness is
    the valuation of z((1-tau)P) and valuation that of z(P').  A None
    valuation marks the vacuous outcomes where P' = O.
    """

    curve: WeierstrassCurve
    point: CurvePoint
    d: int
    p: int
    image: CurvePoint
    valuation: Optional[Fraction]
    bound_met: bool
    outcome: str  # "bound" | "descent" | "vacuous" | "torsion"
    kernel_witness: Optional[Fraction] = None

    def to_json_dict(self) -> dict:
        v = self.valuation
        return {
            "d": self.d,
            "p": self.p,
            "outcome": self.outcome,
            "valuation": None if v is None else f"{v.numerator}/{v.denominator}",
            "bound_met": self.bound_met,
            "lambda_lower": None if v is None else round(float(v) * math.log(self.p) / 2, 6),
        }


def ad_tau_construct(m: int, p: int) -> GaloisAutomorphism:
    """Smallest power map zeta_m -> zeta_m^k fixing zeta_{m/p}, moving zeta_m.

    The exponent satisfies k = 1 mod (m/p^a) p^(a-1) and k != 1 mod m,
    so tau(zeta_m) = omega zeta_m for a primitive p-th root omega.
    """
    if not is_prime(p):
        raise DegenerateInputError(f"{p} is not prime")
    if m % p != 0 or m <= p:
        raise DegenerateInputError("need p | m with m > p")
    a, mm = 0, m
    while mm % p == 0:
        mm //= p
        a += 1
    modulus = mm * p ** (a - 1)
    for k in range(2, m + modulus + 1):
        if (k - 1) % modulus == 0 and k % m != 1 and math.gcd(k, m) == 1:
            return GaloisAutomorphism("cyclotomic-power", k=k, m=m)
    raise ArithmeticError("no inertia exponent found below m + modulus")


def verify_ad_congruence(
    m: int, p: int, sample_count: int = 500, seed: int = 0
) -> ADWitness:
    """Check (tau alpha)^p = alpha^p mod p Z[zeta_m] on a sweep of elements.

    Exhaustive over coefficient vectors in {0,1,2}^phi(m) on the power
    basis when phi(m) <= 6, then sample_count seeded-random elements with
    coefficients in [-50, 50] on the full exponent basis.  Failures are
    recorded rather than raised; any failure is an implementation bug.
    """
    tau = ad_tau_construct(m, p)
    phi = cyclotomic_polynomial(m).degree

    def holds(alpha: CyclotomicElement) -> bool:
        image = apply_automorphism(alpha, tau)
        return divides_in_cyclotomic(image**p - alpha**p, p)

    all_pass = True
    if phi <= 6:
        for vec in product((0, 1, 2), repeat=phi):
            alpha = CyclotomicElement(m, vec + (0,) * (m - phi))
            all_pass = holds(alpha) and all_pass
    rng = random.Random(seed)
    samples = []
    for _ in range(sample_count):
        alpha = CyclotomicElement(
            m, tuple(rng.randint(-50, 50) for _ in range(m))
        )
        samples.append(alpha)
        all_pass = holds(alpha) and all_pass
    return ADWitness(m, p, tau, tuple(samples), all_pass)


def _conjugate_point(P: CurvePoint, field: QuadraticField) -> CurvePoint:
    if P.is_infinity:
        return P
    coords = (
        c.conjugate() if hasattr(c, "conjugate") else field.element(c).conjugate()
        for c in (P.x, P.y)
    )
    return CurvePoint.affine(*coords)


def _is_small_torsion(E: WeierstrassCurve, P: CurvePoint) -> bool:
    if P.is_infinity:
        return True
    R = P
    for _ in range(TORSION_SEARCH_BOUND - 1):
        R = group_op(E, R, P)
        if R.is_infinity:
            return True
    return False


def ramified_point_check(
    E: WeierstrassCurve, d: int, P: CurvePoint, p: int
) -> RamifiedCheckReport:
    """Valuation bound for P' = [p]((tau-1)^2 P) at a ramified prime.

    tau is quadratic conjugation, the full inertia group at a prime
    ramified in Q(sqrt d).  The intermediate point (1-tau)P must land in
    the kernel of reduction; P' must then satisfy v(z(P')) >= 2 in
    uniformizer units, which is the local height bound log p.  When P'
    degenerates to O the bound is vacuous: conjugation-fixed points
    descend to Q, torsion is classified before the check.
    """
    field = QuadraticField(d)
    if p > MAX_RAMIFIED_PRIME:
        raise DegenerateInputError(
            f"p = {p} exceeds the digit budget (max {MAX_RAMIFIED_PRIME})"
        )
    prime = splitting_type(field, p)
    if prime.splitting != "ramified":
        raise DegenerateInputError(f"{p} does not ramify in Q(sqrt {d})")
    if not reduction_type(E, p).is_good:
        raise DegenerateInputError(f"bad reduction at {p}")
    if not E.contains(P):
        raise DegenerateInputError(f"point {P} is not on the curve")

    def vacuous(image: CurvePoint, outcome: str, witness=None) -> RamifiedCheckReport:
        return RamifiedCheckReport(E, P, d, p, image, None, True, outcome, witness)

    if _is_small_torsion(E, P):
        return vacuous(CurvePoint.infinity(), "torsion")
    Q = group_op(E, P, negate(E, _conjugate_point(P, field)))
    if Q.is_infinity:
        return vacuous(CurvePoint.infinity(), "descent")
    flag, witness = in_kernel_of_reduction(E, Q, prime)
    assert flag, "inertia difference escapes the kernel of reduction"
    kernel_witness = 2 * Fraction(witness)
    assert kernel_witness >= 1
    image = scalar_mul(E, p, group_op(E, Q, negate(E, _conjugate_point(Q, field))))
    if image.is_infinity:
        return vacuous(image, "vacuous", kernel_witness)
    in_kernel, v = in_kernel_of_reduction(E, image, prime)
    assert in_kernel, "image point escapes the kernel of reduction"
    valuation = 2 * Fraction(v)
    return RamifiedCheckReport(
        E, P, d, p, image, valuation, valuation >= 2, "bound", kernel_witness
    )


def _squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def ramified_scan(
    E: WeierstrassCurve, x_lo: int = -10, x_hi: int = 10
) -> list[tuple[int, CurvePoint]]:
    """Quadratic points (x, (-(a1 x + a3) + sqrt d)/2) for integer x.

    Scans x in [x_lo, x_hi] in order and keeps the x where the quadratic
    in y has squarefree non-square integer discriminant d, so every odd
    prime factor of d is ramified in the field of definition.  When the
    linear part a1 x + a3 vanishes the relevant radicand is x^3 + ...
    itself and the point is (x, sqrt d).
    """
    out = []
    for x in range(x_lo, x_hi + 1):
        lin = E.a1 * x + E.a3
        cubic = x**3 + E.a2 * x * x + E.a4 * x + E.a6
        disc = cubic if lin == 0 else lin * lin + 4 * cubic
        if not isinstance(disc, Fraction) or disc.denominator != 1:
            continue
        disc = int(disc)
        if disc >= 0 and math.isqrt(disc) ** 2 == disc:
            continue
        if not _squarefree(disc) or disc == 1:
            continue
        field = QuadraticField(disc)
        if lin == 0:
            y = field.sqrt_gen()
        else:
            y = field.element(Fraction(-lin, 2), Fraction(1, 2))
        P = CurvePoint.affine(field.element(x), y)
        assert E.contains(P)
        out.append((disc, P))
    return out


def torsion_escape_identity(m: int, p: int) -> tuple[IntPolynomial, IntPolynomial]:
    """(a, b) with a(X)(X^m - 1) + b(X) p (X-1)^2 = m p (X - 1), a(X) = p.

    The cofactor is b = -sum_{i<m-1} (m-1-i) X^i; the identity is
    verified by expansion before returning.
    """
    if m < 1:
        raise DegenerateInputError("m must be a positive integer")
    if not is_prime(p):
        raise DegenerateInputError(f"{p} is not prime")
    a = IntPolynomial((p,))
    b = IntPolynomial(tuple(-(m - 1 - i) for i in range(m - 1)))
    cyclo = IntPolynomial((-1,) + (0,) * (m - 1) + (1,))
    square = IntPolynomial((p, -2 * p, p))
    assert a * cyclo + b * square == IntPolynomial((-m * p, m * p))
    return a, b

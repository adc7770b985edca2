"""Frobenius characteristic polynomials and the annihilation bound at
unramified primes.

For a curve over Q with good reduction at p, Phi_p(X) = X^2 - aX + p with
a = p + 1 - #E(F_p).  Evaluating Phi_p at the Frobenius substitution
(identity over Q and at split primes, conjugation at inert primes of a
quadratic field) sends every point into the kernel of reduction above p,
which forces the local height there to be at least log(p)/e.  The
resultant r = Res(Phi_p, X^m - 1) is a nonzero integer because the roots
of the two factors live on circles of radius sqrt(p) and 1, and the
Bezout identity a(X) Phi_p(X) + b(X)(X^m - 1) = r turns annihilation by
Phi_p(sigma) into the torsion relation [r]P = O.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exact_arith import DegenerateInputError, IntPolynomial, bezout_integer, resultant
from .number_fields import (
    GaloisAutomorphism,
    QuadraticElement,
    apply_automorphism,
    primes_above,
    splitting_type,
)
from .elliptic_core import (
    CurvePoint,
    UnsupportedCaseError,
    WeierstrassCurve,
    count_points_mod_p,
    group_op,
    in_kernel_of_reduction,
    reduction_type,
    scalar_mul,
)
from .heights import local_height_finite

__all__ = [
    "FrobeniusData",
    "GroupRingAction",
    "AnnihilationReport",
    "NontorsionCertificate",
    "char_poly_frobenius",
    "apply_group_ring",
    "verify_annihilation",
    "nontorsion_certificate",
]


@dataclass(frozen=True)
class FrobeniusData:
    """Trace and characteristic polynomial of Frobenius at a good prime."""

    p: int
    a: int
    phi: IntPolynomial
    n_p: int

    def __post_init__(self) -> None:
        if self.a * self.a >= 4 * self.p:
            raise DegenerateInputError("trace violates the Hasse bound")
        if self.n_p != self.p + 1 - self.a or self.phi(1) != self.n_p:
            raise DegenerateInputError("point count disagrees with the trace")
        if self.phi.coeffs != (self.p, -self.a, 1):
            raise DegenerateInputError("characteristic polynomial malformed")


@dataclass(frozen=True)
class GroupRingAction:
    """A polynomial in a Galois symbol sigma, acting on points additively.

    automorphism None means sigma = identity; otherwise sigma acts on
    coordinates through the given automorphism.
    """

    polynomial: IntPolynomial
    automorphism: GaloisAutomorphism | None = None


@dataclass(frozen=True)
class AnnihilationReport:
    p: int
    a: int
    n_p: int
    in_kernel: bool
    local_value: float
    bound: float
    torsion: bool

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "a": self.a,
            "Np": self.n_p,
            "kernel": self.in_kernel,
            "lambda": None if math.isinf(self.local_value) else round(self.local_value, 6),
            "bound": round(self.bound, 6),
            "torsion": self.torsion,
        }


@dataclass(frozen=True)
class NontorsionCertificate:
    p: int
    m: int
    r: int
    bezout_a: IntPolynomial
    bezout_b: IntPolynomial
    identity_holds: bool
    r_annihilates: bool


def char_poly_frobenius(E: WeierstrassCurve, p: int) -> FrobeniusData:
    """X^2 - aX + p with a from a naive point count over F_p."""
    if not reduction_type(E, p).is_good:
        raise UnsupportedCaseError(f"bad reduction at {p}")
    n = count_points_mod_p(E, p)
    a = p + 1 - n
    return FrobeniusData(p, a, IntPolynomial((p, -a, 1)), n)


def _demote(c):
    if isinstance(c, QuadraticElement) and c.is_rational:
        return c.a
    return c


def _point_field(P: CurvePoint):
    """Field of definition: None when both coordinates are rational."""
    if P.is_infinity:
        return None
    for c in (P.x, P.y):
        if isinstance(c, QuadraticElement) and not c.is_rational:
            return c.field
    return None


def _apply_sigma(P: CurvePoint, sigma: GaloisAutomorphism | None) -> CurvePoint:
    if sigma is None or P.is_infinity:
        return P
    field = None
    for c in (P.x, P.y):
        if isinstance(c, QuadraticElement):
            field = c.field
    if field is None:
        raise DegenerateInputError(
            "conjugation needs a point with quadratic coordinates"
        )
    coords = [
        c if isinstance(c, QuadraticElement) else field.element(c)
        for c in (P.x, P.y)
    ]
    return CurvePoint.affine(*(apply_automorphism(c, sigma) for c in coords))


def apply_group_ring(
    E: WeierstrassCurve, action: GroupRingAction, P: CurvePoint
) -> CurvePoint:
    """Sum of [c_i] sigma^i(P) over the action polynomial."""
    sigma = action.automorphism
    if sigma is not None and sigma.kind != "conjugation":
        raise DegenerateInputError("only quadratic conjugation acts on points")
    acc = CurvePoint.infinity()
    Q = P
    for c in action.polynomial.coeffs:
        if c:
            acc = group_op(E, acc, scalar_mul(E, c, Q))
        Q = _apply_sigma(Q, sigma)
    return acc


_CONJUGATION = GaloisAutomorphism("conjugation")


def _frobenius_setup(E: WeierstrassCurve, P: CurvePoint, p: int):
    """(sigma, places above p in the field of definition of P)."""
    field = _point_field(P)
    if field is None:
        return None, [p]
    kind = splitting_type(field, p).splitting
    if kind == "ramified":
        raise UnsupportedCaseError(
            f"{p} ramifies in the field of definition; use the ramified verifier"
        )
    sigma = _CONJUGATION if kind == "inert" else None
    return sigma, primes_above(field, p)


def verify_annihilation(E: WeierstrassCurve, P: CurvePoint, p: int) -> AnnihilationReport:
    """Apply Phi_p(sigma) to P and certify the kernel membership bound.

    The image lands in the kernel of reduction at every prime above p, so
    its local height there is at least log(p)/e; with P rational or
    quadratic and p unramified, e = 1.  An image equal to O is reported
    as the torsion outcome rather than an error.
    """
    data = char_poly_frobenius(E, p)
    bound = math.log(p)
    sigma, places = _frobenius_setup(E, P, p)
    Q = apply_group_ring(E, GroupRingAction(data.phi, sigma), P)
    if Q.is_infinity:
        return AnnihilationReport(
            p, data.a, data.n_p, True, math.inf, bound, True
        )
    if _point_field(Q) is None:
        Q = CurvePoint.affine(_demote(Q.x), _demote(Q.y))
        places = [p]
    values = []
    for place in places:
        flag, _ = in_kernel_of_reduction(E, Q, place)
        assert flag, f"annihilated point escapes the kernel above {p}"
        values.append(local_height_finite(E, Q, place).value)
    local_value = min(values)
    assert local_value >= bound - 1e-12
    return AnnihilationReport(p, data.a, data.n_p, True, local_value, bound, False)


def nontorsion_certificate(
    E: WeierstrassCurve, P: CurvePoint, p: int, m: int
) -> NontorsionCertificate:
    """Resultant witness r = Res(Phi_p, X^m - 1) with its Bezout identity,
    verified on P by direct group-law evaluation.

    The cost of the verification grows with r^2 through the size of the
    coordinates of [r]P, so this is intended for small m; the resultant
    itself is cheap at any m.
    """
    if m < 1:
        raise DegenerateInputError("m must be a positive integer")
    data = char_poly_frobenius(E, p)
    sigma = _CONJUGATION if _point_field(P) is not None else None
    if sigma is not None and m % sigma.order() != 0:
        raise DegenerateInputError(
            "sigma has order 2 on the field of definition; m must be even"
        )
    cyclo = IntPolynomial((-1,) + (0,) * (m - 1) + (1,))
    r = resultant(data.phi, cyclo)
    assert r != 0, "no root of X^m - 1 has absolute value sqrt(p)"
    a, b, r0 = bezout_integer(data.phi, cyclo)
    assert r % r0 == 0
    a, b = a.scale(r // r0), b.scale(r // r0)
    assert a * data.phi + b * cyclo == IntPolynomial((r,))

    lhs = scalar_mul(E, r, P)
    image = apply_group_ring(E, GroupRingAction(data.phi, sigma), P)
    escape = apply_group_ring(E, GroupRingAction(cyclo, sigma), P)
    rhs = group_op(
        E,
        apply_group_ring(E, GroupRingAction(a, sigma), image),
        apply_group_ring(E, GroupRingAction(b, sigma), escape),
    )
    return NontorsionCertificate(
        p=p,
        m=m,
        r=r,
        bezout_a=a,
        bezout_b=b,
        identity_holds=lhs == rhs,
        r_annihilates=lhs.is_infinity,
    )

"""Weierstrass curves with exact point arithmetic over Q and quadratic fields.

Group law, reduction types at rational primes, reduction maps into F_p and
F_{p^2}, kernel-of-reduction tests with valuation witnesses, naive point
counting, and a bounded torsion test.  All arithmetic is exact; reduction
theory is only offered for p-integral, p-minimal rational models and
non-minimal input is rejected rather than minimalized.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

from .exact_arith import (
    INFINITE_VALUATION,
    DegenerateInputError,
    is_prime,
    legendre_symbol,
    sqrt_mod,
    valuation_p,
)
from .number_fields import QuadraticElement, QuadraticPrime, quad_valuation

__all__ = [
    "CurvePoint",
    "NonMinimalModelError",
    "ReducedPoint",
    "ReductionInfo",
    "TorsionResult",
    "UnsupportedCaseError",
    "WeierstrassCurve",
    "count_points_mod_p",
    "group_op",
    "in_kernel_of_reduction",
    "negate",
    "reduce_point",
    "reduction_type",
    "scalar_mul",
    "singular_point_mod_p",
    "torsion_test",
    "z_value",
]

Coord = Union[Fraction, QuadraticElement]


class UnsupportedCaseError(ValueError):
    """Raised when an operation is outside its supported reduction case."""


class NonMinimalModelError(ValueError):
    """Raised when the p-minimality certificate fails; supply a minimal model."""


def _coerce_coeff(a):
    if isinstance(a, QuadraticElement):
        return a
    return Fraction(a)


@dataclass(frozen=True)
class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6, discriminant nonzero.

    b-, c-invariants, discriminant and j are computed eagerly and cached on
    the instance; construction fails on singular equations.
    """

    a1: Coord
    a2: Coord
    a3: Coord
    a4: Coord
    a6: Coord
    b2: Coord = field(init=False, repr=False, compare=False)
    b4: Coord = field(init=False, repr=False, compare=False)
    b6: Coord = field(init=False, repr=False, compare=False)
    b8: Coord = field(init=False, repr=False, compare=False)
    c4: Coord = field(init=False, repr=False, compare=False)
    c6: Coord = field(init=False, repr=False, compare=False)
    discriminant: Coord = field(init=False, repr=False, compare=False)
    j_invariant: Coord = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        a1, a2, a3, a4, a6 = (
            _coerce_coeff(a) for a in (self.a1, self.a2, self.a3, self.a4, self.a6)
        )
        for name, val in zip(("a1", "a2", "a3", "a4", "a6"), (a1, a2, a3, a4, a6)):
            object.__setattr__(self, name, val)
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        c4 = b2 * b2 - 24 * b4
        c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6
        disc = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        if not disc:
            raise DegenerateInputError("singular Weierstrass equation")
        assert 4 * b8 == b2 * b6 - b4 * b4
        assert 1728 * disc == c4 * c4 * c4 - c6 * c6
        for name, val in zip(
            ("b2", "b4", "b6", "b8", "c4", "c6", "discriminant"),
            (b2, b4, b6, b8, c4, c6, disc),
        ):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "j_invariant", c4 * c4 * c4 / disc)

    @property
    def is_rational(self) -> bool:
        return all(
            isinstance(a, Fraction)
            for a in (self.a1, self.a2, self.a3, self.a4, self.a6)
        )

    def contains(self, P: "CurvePoint") -> bool:
        if P.is_infinity:
            return True
        x, y = P.x, P.y
        lhs = y * y + self.a1 * x * y + self.a3 * y
        rhs = x * x * x + self.a2 * x * x + self.a4 * x + self.a6
        return lhs == rhs

    @classmethod
    def from_json_dict(cls, data: dict) -> "WeierstrassCurve":
        try:
            return cls(*(Fraction(data[k]) for k in ("a1", "a2", "a3", "a4", "a6")))
        except (KeyError, ValueError, ZeroDivisionError) as exc:
            raise DegenerateInputError(f"bad curve description: {exc}") from exc

    def to_json_dict(self) -> dict:
        return {
            k: str(getattr(self, k)) for k in ("a1", "a2", "a3", "a4", "a6")
        }

    def __str__(self) -> str:
        def side(lead: str, terms) -> str:
            parts = [lead]
            for coeff, mono in terms:
                if not coeff:
                    continue
                sign = "-" if coeff < 0 else "+"
                mag = abs(coeff)
                body = mono if mag == 1 and mono else f"{mag}{'*' if mono else ''}{mono}"
                parts.append(f" {sign} {body}")
            return "".join(parts)

        lhs = side("y^2", ((self.a1, "x*y"), (self.a3, "y")))
        rhs = side("x^3", ((self.a2, "x^2"), (self.a4, "x"), (self.a6, "")))
        return f"{lhs} = {rhs}"


@dataclass(frozen=True)
class CurvePoint:
    """Affine point or the identity; coordinates rational or quadratic."""

    x: Optional[Coord] = None
    y: Optional[Coord] = None

    @classmethod
    def infinity(cls) -> "CurvePoint":
        return cls(None, None)

    @classmethod
    def affine(cls, x, y) -> "CurvePoint":
        return cls(_coerce_coeff(x), _coerce_coeff(y))

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __str__(self) -> str:
        if self.is_infinity:
            return "O"
        return f"({self.x}, {self.y})"


def negate(E: WeierstrassCurve, P: CurvePoint) -> CurvePoint:
    if P.is_infinity:
        return P
    return CurvePoint(P.x, -P.y - E.a1 * P.x - E.a3)


def _add_unchecked(E: WeierstrassCurve, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if x1 == x2:
        if y1 == -y2 - E.a1 * x2 - E.a3:
            return CurvePoint.infinity()
        lam = (3 * x1 * x1 + 2 * E.a2 * x1 + E.a4 - E.a1 * y1) / (
            2 * y1 + E.a1 * x1 + E.a3
        )
    else:
        lam = (y2 - y1) / (x2 - x1)
    x3 = lam * lam + E.a1 * lam - E.a2 - x1 - x2
    y3 = lam * (x1 - x3) - y1 - E.a1 * x3 - E.a3
    return CurvePoint(x3, y3)


def group_op(E: WeierstrassCurve, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    """Chord-tangent addition with identity at infinity."""
    for R in (P, Q):
        if not E.contains(R):
            raise DegenerateInputError(f"point {R} is not on the curve")
    return _add_unchecked(E, P, Q)


def scalar_mul(E: WeierstrassCurve, n: int, P: CurvePoint) -> CurvePoint:
    """[n]P by a signed binary (non-adjacent form) ladder."""
    if not E.contains(P):
        raise DegenerateInputError(f"point {P} is not on the curve")
    if n == 0 or P.is_infinity:
        return CurvePoint.infinity()
    if n < 0:
        return scalar_mul(E, -n, negate(E, P))
    digits = []
    while n:
        if n & 1:
            d = 2 - (n % 4)
            n -= d
        else:
            d = 0
        digits.append(d)
        n //= 2
    R = CurvePoint.infinity()
    negP = negate(E, P)
    for d in reversed(digits):
        R = _add_unchecked(E, R, R)
        if d == 1:
            R = _add_unchecked(E, R, P)
        elif d == -1:
            R = _add_unchecked(E, R, negP)
    return R


@dataclass(frozen=True)
class ReductionInfo:
    p: int
    type: str  # good | split-multiplicative | nonsplit-multiplicative | additive
    v_discriminant: int
    v_c4: Union[int, float]
    v_j: Union[int, float]

    @property
    def is_good(self) -> bool:
        return self.type == "good"

    @property
    def is_multiplicative(self) -> bool:
        return self.type.endswith("multiplicative")


def _require_rational_integral(E: WeierstrassCurve, p: int) -> None:
    if not E.is_rational:
        raise UnsupportedCaseError("reduction theory needs a rational model")
    if not is_prime(p):
        raise DegenerateInputError(f"{p} is not prime")
    for a in (E.a1, E.a2, E.a3, E.a4, E.a6):
        if a.denominator % p == 0:
            raise DegenerateInputError(f"model is not {p}-integral")


def _mod_p(x: Fraction, p: int) -> int:
    num, den = x.numerator, x.denominator
    if den % p == 0:
        raise DegenerateInputError("value is not integral at p")
    return num * pow(den, -1, p) % p


def singular_point_mod_p(E: WeierstrassCurve, p: int) -> tuple[int, int]:
    """The singular point of the reduced curve at a bad prime.

    Odd p: x0 runs over the double roots of the depressed cubic, y0 follows
    from completing the square.  p = 2 scans the four candidates.  Raises if
    the reduction is nonsingular.
    """
    _require_rational_integral(E, p)
    a1, a2, a3, a4, a6 = (_mod_p(a, p) for a in (E.a1, E.a2, E.a3, E.a4, E.a6))
    if p == 2:
        for x0 in range(2):
            for y0 in range(2):
                on = (y0 * y0 + a1 * x0 * y0 + a3 * y0
                      - x0**3 - a2 * x0 * x0 - a4 * x0 - a6) % 2 == 0
                fx = (a1 * y0 - 3 * x0 * x0 - 2 * a2 * x0 - a4) % 2 == 0
                fy = (2 * y0 + a1 * x0 + a3) % 2 == 0
                if on and fx and fy:
                    return (x0, y0)
        raise DegenerateInputError("reduction mod 2 is nonsingular")
    b2, b4, b6 = (_mod_p(b, p) for b in (E.b2, E.b4, E.b6))
    for x0 in range(p):
        f = (4 * x0**3 + b2 * x0 * x0 + 2 * b4 * x0 + b6) % p
        df = (12 * x0 * x0 + 2 * b2 * x0 + 2 * b4) % p
        if f == 0 and df == 0:
            y0 = -(a1 * x0 + a3) * pow(2, -1, p) % p
            return (x0, y0)
    raise DegenerateInputError(f"reduction mod {p} is nonsingular")


def reduction_type(E: WeierstrassCurve, p: int) -> ReductionInfo:
    """Classify reduction at p for a p-minimal integral rational model.

    Minimality is certified by v(disc) < 12 or v(c4) < 4; models failing the
    certificate are rejected, not minimalized.  Split versus nonsplit
    multiplicative is decided by the -c6 quadratic-residue test for p >= 5
    and by the tangent-cone factorization at the node for p in {2, 3}.
    """
    _require_rational_integral(E, p)
    v_disc = int(valuation_p(E.discriminant, p))
    v_c4 = valuation_p(E.c4, p) if E.c4 else INFINITE_VALUATION
    if v_c4 != INFINITE_VALUATION:
        v_c4 = int(v_c4)
    v_j = valuation_p(E.j_invariant, p) if E.j_invariant else INFINITE_VALUATION
    if v_j != INFINITE_VALUATION:
        v_j = int(v_j)
    if v_disc >= 12 and (v_c4 == INFINITE_VALUATION or v_c4 >= 4):
        raise NonMinimalModelError(
            f"model may be non-minimal at {p} (v(disc) = {v_disc}, v(c4) = {v_c4});"
            " supply a minimal model"
        )
    if v_disc == 0:
        return ReductionInfo(p, "good", v_disc, v_c4, v_j)
    if v_c4 != 0:
        return ReductionInfo(p, "additive", v_disc, v_c4, v_j)
    if p >= 5:
        split = legendre_symbol(-_mod_p(E.c6, p) % p, p) == 1
    else:
        x0, _ = singular_point_mod_p(E, p)
        if p == 2:
            # node needs a1 odd; tangents rational iff x0 + a2 even
            split = (x0 + _mod_p(E.a2, 2)) % 2 == 0
        else:
            disc = (_mod_p(E.a1, 3) ** 2 + 4 * (3 * x0 + _mod_p(E.a2, 3))) % 3
            split = legendre_symbol(disc, 3) == 1
    kind = "split-multiplicative" if split else "nonsplit-multiplicative"
    return ReductionInfo(p, kind, v_disc, v_c4, v_j)


@dataclass(frozen=True)
class ReducedPoint:
    """Point over F_p, or F_{p^2} when the quadratic prime is inert.

    Prime-field coordinates are ints; F_{p^2} coordinates are pairs
    (c0, c1) = c0 + c1 t where t^2 = ext[0]*t + ext[1].  coords None is the
    identity.  is_singular marks reduction onto the node of a bad fibre.
    """

    p: int
    coords: Optional[tuple]
    ext: Optional[tuple[int, int]] = None
    is_singular: bool = False

    @property
    def is_infinity(self) -> bool:
        return self.coords is None


def _ext_mul(a, b, ext, p):
    alpha, beta = ext
    a0, a1 = a
    b0, b1 = b
    return ((a0 * b0 + beta * a1 * b1) % p, (a0 * b1 + a1 * b0 + alpha * a1 * b1) % p)


def _ext_scale(c, a, p):
    return (c * a[0] % p, c * a[1] % p)


def _ext_add(a, b, p):
    return ((a[0] + b[0]) % p, (a[1] + b[1]) % p)


def _smallest_nonresidue(p: int) -> int:
    for n in range(2, p):
        if legendre_symbol(n, p) == -1:
            return n
    raise ArithmeticError(f"no quadratic nonresidue below {p}")


def _hensel_lift_root(c0: int, c1: int, r: int, p: int, k: int) -> int:
    """Lift a simple root of X^2 + c1 X + c0 from mod p to mod p^(k+1)."""
    mod = p
    for _ in range(k):
        mod *= p
        fr = (r * r + c1 * r + c0) % mod
        dfr = (2 * r + c1) % mod
        r = (r - fr * pow(dfr, -1, mod)) % mod
    return r


def _reduce_quadratic(x: QuadraticElement, P: QuadraticPrime):
    """Image of a P-integral quadratic element in the residue field.

    Split and ramified primes land in F_p (int); inert primes land in
    F_{p^2} as a pair in the t-basis, t^2 = n for the smallest nonresidue n
    when p is odd and t^2 = t + 1 when p = 2.
    """
    p = P.p
    u, v, D = x.omega_coords()
    k = int(valuation_p(Fraction(D), p))
    c0, c1 = x.field.omega_minpoly_coeffs()
    if P.splitting == "split":
        r = _hensel_lift_root(c0, c1, P.root, p, k) if k else P.root
        num = u + v * r
        if num % p**k != 0:
            raise DegenerateInputError("coordinate is not integral at the prime")
        return (num // p**k) * pow(D // p**k, -1, p) % p
    # inert and ramified: P-integrality forces p^k | (u, v)
    if k:
        q = p**k
        if u % q or v % q:
            raise DegenerateInputError("coordinate is not integral at the prime")
        u, v, D = u // q, v // q, D // q
    dinv = pow(D, -1, p)
    u, v = u * dinv % p, v * dinv % p
    if P.splitting == "ramified":
        return (u + v * P.root) % p
    if p == 2:
        # omega itself satisfies t^2 = t + 1
        return ((u % 2, v % 2), (1, 1))
    n = _smallest_nonresidue(p)
    d_red = x.field.d % p
    s = sqrt_mod(d_red * pow(n, -1, p) % p, p)
    if x.field.omega_is_half:
        inv2 = pow(2, -1, p)
        omega_img = (inv2, inv2 * s % p)
    else:
        omega_img = (0, s % p)
    return (_ext_add((u, 0), _ext_scale(v, omega_img, p), p), (0, n))


def _coord_valuation(x: Coord, prime) -> Union[Fraction, int, float]:
    if isinstance(prime, QuadraticPrime):
        if isinstance(x, Fraction):
            x = prime.field.element(x)
        return quad_valuation(x, prime) if x else INFINITE_VALUATION
    if isinstance(x, QuadraticElement):
        raise DegenerateInputError("quadratic coordinate needs a quadratic prime")
    return valuation_p(x, prime)


def reduce_point(E: WeierstrassCurve, P: CurvePoint, prime) -> ReducedPoint:
    """Reduce P modulo a rational prime or a QuadraticPrime.

    Points with a pole at the prime reduce to the identity.  At a
    multiplicative prime the image is flagged when it hits the node.
    Additive reduction is not supported.
    """
    p = prime.p if isinstance(prime, QuadraticPrime) else prime
    info = reduction_type(E, p)
    if info.type == "additive":
        raise UnsupportedCaseError("additive reduction is not supported")
    if P.is_infinity:
        return ReducedPoint(p, None)
    vx = _coord_valuation(P.x, prime)
    if vx < 0:
        return ReducedPoint(p, None)
    if isinstance(prime, QuadraticPrime) and prime.splitting == "inert":
        xr = _reduce_quadratic(_as_quad(P.x, prime), prime)
        yr = _reduce_quadratic(_as_quad(P.y, prime), prime)
        (x_pair, ext), (y_pair, _) = xr, yr
        _assert_on_reduced_curve(E, x_pair, y_pair, ext, p)
        singular = False
        if info.is_multiplicative:
            # the node has coordinates in the prime field
            x0, y0 = singular_point_mod_p(E, p)
            singular = x_pair == (x0, 0) and y_pair == (y0, 0)
        return ReducedPoint(p, (x_pair, y_pair), ext, singular)
    if isinstance(prime, QuadraticPrime):
        x0 = _reduce_quadratic(_as_quad(P.x, prime), prime)
        y0 = _reduce_quadratic(_as_quad(P.y, prime), prime)
    else:
        x0 = _mod_p(P.x, p)
        y0 = _mod_p(P.y, p)
    _assert_on_reduced_curve(E, (x0, 0), (y0, 0), (0, 0), p)
    singular = False
    if info.is_multiplicative:
        singular = (x0, y0) == singular_point_mod_p(E, p)
    return ReducedPoint(p, (x0, y0), None, singular)


def _as_quad(x: Coord, prime: QuadraticPrime) -> QuadraticElement:
    if isinstance(x, QuadraticElement):
        return x
    return prime.field.element(x)


def _assert_on_reduced_curve(E, x_pair, y_pair, ext, p) -> None:
    a = [_mod_p(getattr(E, k), p) for k in ("a1", "a2", "a3", "a4", "a6")]
    mul = lambda u, v: _ext_mul(u, v, ext, p)
    x2 = mul(x_pair, x_pair)
    lhs = _ext_add(
        mul(y_pair, y_pair),
        _ext_add(_ext_scale(a[0], mul(x_pair, y_pair), p), _ext_scale(a[2], y_pair, p), p),
        p,
    )
    rhs = _ext_add(
        mul(x2, x_pair),
        _ext_add(
            _ext_scale(a[1], x2, p),
            _ext_add(_ext_scale(a[3], x_pair, p), (a[4] % p, 0), p),
            p,
        ),
        p,
    )
    if lhs != rhs:
        raise ArithmeticError("reduced point violates the reduced equation")


def z_value(E: WeierstrassCurve, P: CurvePoint) -> Coord:
    """Value of the local parameter z = -x/y at P.

    At points where x and y both vanish the curve relation cancels the
    indeterminacy to -a3/a4; at the remaining y = 0 points z has a pole.
    """
    if P.is_infinity:
        return Fraction(0)
    x, y = P.x, P.y
    if y != 0:
        return -x / y
    if x == 0:
        if E.a4 == 0:
            raise DegenerateInputError("z is indeterminate at this point")
        return -E.a3 / E.a4
    raise ZeroDivisionError("z has a pole at a y = 0 point")


def in_kernel_of_reduction(E: WeierstrassCurve, P: CurvePoint, prime):
    """(flag, witness): P reduces to the identity iff v(x) < 0; witness v(z).

    Only good reduction is supported.  The witness is the valuation of
    z = -x/y, positive exactly on the kernel, +infinity at the identity,
    -infinity at the poles of z.
    """
    p = prime.p if isinstance(prime, QuadraticPrime) else prime
    if not reduction_type(E, p).is_good:
        raise UnsupportedCaseError("kernel test needs good reduction")
    if P.is_infinity:
        return True, INFINITE_VALUATION
    vx = _coord_valuation(P.x, prime)
    if vx < 0:
        return True, vx - _coord_valuation(P.y, prime)
    try:
        z = z_value(E, P)
    except ZeroDivisionError:
        return False, -INFINITE_VALUATION
    return False, _coord_valuation(z, prime) if z else INFINITE_VALUATION


def count_points_mod_p(E: WeierstrassCurve, p: int) -> int:
    """N_p by full enumeration of F_p x F_p, plus the point at infinity."""
    if not reduction_type(E, p).is_good:
        raise UnsupportedCaseError("point count needs good reduction")
    a1, a2, a3, a4, a6 = (_mod_p(a, p) for a in (E.a1, E.a2, E.a3, E.a4, E.a6))
    count = 1
    for x in range(p):
        rhs = (x * x * x + a2 * x * x + a4 * x + a6) % p
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y) % p == rhs:
                count += 1
    assert (p + 1 - count) ** 2 <= 4 * p, "Hasse bound violated"
    return count


@dataclass(frozen=True)
class TorsionResult:
    status: str  # torsion | nontorsion | inconclusive
    order: Optional[int] = None
    height: Optional[float] = None


def torsion_test(
    E: WeierstrassCurve,
    P: CurvePoint,
    bound: int = 24,
    height_fn: Optional[Callable] = None,
    height_threshold: float = 1e-4,
) -> TorsionResult:
    """Declare torsion if [n]P = O for n <= bound, else consult the height.

    The default bound 24 covers torsion orders over quadratic fields; it is
    a configuration knob, not a theorem.  With no height callback a point
    that survives the multiple scan is reported inconclusive.
    """
    if not E.contains(P):
        raise DegenerateInputError(f"point {P} is not on the curve")
    Q = CurvePoint.infinity()
    for n in range(1, bound + 1):
        Q = _add_unchecked(E, Q, P)
        if Q.is_infinity:
            return TorsionResult("torsion", n)
    if height_fn is None:
        return TorsionResult("inconclusive")
    h = height_fn(E, P)
    if h > height_threshold:
        return TorsionResult("nontorsion", None, h)
    return TorsionResult("inconclusive", None, h)

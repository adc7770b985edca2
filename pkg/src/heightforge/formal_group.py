"""Truncated power-series algebra and the formal group of a Weierstrass curve.

Series are truncated by total degree with exact coefficients.  The group
law is built in the (z, w)-plane, z = -x/y and w = -1/y, where the curve
reads w = z^3 + a1 z w + a2 z^2 w + a3 w^2 + a4 z w^2 + a6 w^3: solving
for w by fixed-point iteration gives w(z), and the line through (z1, w(z1))
and (z2, w(z2)) meets the curve in a third point whose z-coordinate is
-z1 - z2 - beta/alpha with alpha, beta the two leading coefficients of the
substituted cubic.  Composing with the inversion series yields F(z1, z2).

For an integral model every series here has integer coefficients, which is
what makes the two mod-p statements checkable: the multiplication-by-p
series decomposes as M_p(t) = a(t^p) + p b(t), and consequently
M_p(F(x, iota(y))) lies in the ideal (x^p - y^p, p).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exact_arith import DegenerateInputError, is_prime
from .elliptic_core import (
    CurvePoint,
    UnsupportedCaseError,
    WeierstrassCurve,
    in_kernel_of_reduction,
    z_value,
)

__all__ = [
    "MAX_SERIES_DEGREE",
    "TruncSeries1",
    "TruncSeries2",
    "FormalGroupLaw",
    "elliptic_formal_group",
    "mult_by_m",
    "verify_structure_ap_pb",
    "verify_ideal_membership",
    "z_coordinate",
    "kernel_valuation",
]

MAX_SERIES_DEGREE = 16


def _norm_coeff(c):
    c = Fraction(c)
    return int(c) if c.denominator == 1 else c


# -- univariate ---------------------------------------------------------


@dataclass(frozen=True)
class TruncSeries1:
    """c1*t + ... + cN*t^N, known modulo t^(N+1).

    coeffs is indexed by exponent; the constant term must vanish, so every
    series here defines a map fixing the origin and substitution is
    well-posed under truncation.
    """

    coeffs: tuple
    precision: int

    def __post_init__(self) -> None:
        N = self.precision
        if N < 1:
            raise DegenerateInputError("precision must be at least 1")
        cs = tuple(_norm_coeff(c) for c in self.coeffs[: N + 1])
        cs = cs + (0,) * (N + 1 - len(cs))
        if cs[0] != 0:
            raise DegenerateInputError("series must vanish at the origin")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def identity(cls, precision: int) -> "TruncSeries1":
        return cls((0, 1), precision)

    @classmethod
    def zero(cls, precision: int) -> "TruncSeries1":
        return cls((0,), precision)

    def coefficient(self, k: int):
        return self.coeffs[k] if 0 <= k <= self.precision else 0

    @property
    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    @property
    def order(self):
        """Exponent of the lowest nonzero term, or None for the zero series."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def truncate(self, precision: int) -> "TruncSeries1":
        if precision == self.precision:
            return self
        return TruncSeries1(self.coeffs[: precision + 1], precision)

    def __add__(self, other: "TruncSeries1") -> "TruncSeries1":
        N = min(self.precision, other.precision)
        return TruncSeries1(
            tuple(self.coeffs[k] + other.coeffs[k] for k in range(N + 1)), N
        )

    def __sub__(self, other: "TruncSeries1") -> "TruncSeries1":
        return self + (-other)

    def __neg__(self) -> "TruncSeries1":
        return TruncSeries1(tuple(-c for c in self.coeffs), self.precision)

    def __mul__(self, other):
        if isinstance(other, TruncSeries1):
            N = min(self.precision, other.precision)
            out = [0] * (N + 1)
            for i, a in enumerate(self.coeffs[: N + 1]):
                if not a:
                    continue
                for j, b in enumerate(other.coeffs[: N + 1 - i]):
                    if b:
                        out[i + j] += a * b
            return TruncSeries1(tuple(out), N)
        return TruncSeries1(tuple(other * c for c in self.coeffs), self.precision)

    __rmul__ = __mul__

    def substitute(self, inner):
        """self(inner(...)); inner may be univariate or bivariate."""
        if isinstance(inner, TruncSeries1):
            N = min(self.precision, inner.precision)
            acc = [0] * (N + 1)
            power = list(inner.coeffs[: N + 1])
            for k in range(1, N + 1):
                c = self.coeffs[k] if k < len(self.coeffs) else 0
                if c:
                    for e, a in enumerate(acc):
                        acc[e] = a + c * power[e]
                if k < N:
                    power = _u_mul(power, inner.coeffs[: N + 1], N)
            return TruncSeries1(tuple(acc), N)
        if isinstance(inner, TruncSeries2):
            N = min(self.precision, inner.precision)
            acc: dict = {}
            power = dict(inner.terms)
            for k in range(1, N + 1):
                c = self.coeffs[k] if k < len(self.coeffs) else 0
                if c:
                    for mono, a in power.items():
                        acc[mono] = acc.get(mono, 0) + c * a
                if k < N:
                    power = _b_mul(power, inner.terms, N)
            return TruncSeries2(acc, N)
        raise DegenerateInputError("substitution argument must be a TruncSeries")

    def as_bivariate(self, slot: int, precision: int | None = None) -> "TruncSeries2":
        """Embed as a series in x (slot 0) or y (slot 1) alone."""
        if slot not in (0, 1):
            raise DegenerateInputError("slot must be 0 or 1")
        N = self.precision if precision is None else precision
        terms = {}
        for k, c in enumerate(self.coeffs):
            if c and 1 <= k <= N:
                terms[(k, 0) if slot == 0 else (0, k)] = c
        return TruncSeries2(terms, N)

    def coefficient_list(self) -> list:
        return list(self.coeffs[1:])

    def __str__(self) -> str:
        parts = [
            f"{c}*t^{k}" if k > 1 else f"{c}*t"
            for k, c in enumerate(self.coeffs)
            if c
        ]
        body = " + ".join(parts) if parts else "0"
        return f"{body} + O(t^{self.precision + 1})"


def _u_mul(a: list, b, N: int) -> list:
    out = [0] * (N + 1)
    for i, x in enumerate(a[: N + 1]):
        if not x:
            continue
        for j in range(min(len(b), N + 1 - i)):
            if b[j]:
                out[i + j] += x * b[j]
    return out


def _u_invert_unit(a: list, N: int) -> list:
    """Inverse of a unit power series, a[0] = +-1."""
    c0 = a[0]
    assert c0 in (1, -1)
    out = [0] * (N + 1)
    out[0] = c0
    for k in range(1, N + 1):
        s = sum(a[j] * out[k - j] for j in range(1, k + 1) if j < len(a))
        out[k] = -c0 * s
    return out


# -- bivariate ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TruncSeries2:
    """Sum of c_{ij} x^i y^j over 1 <= i+j <= N, known modulo degree N+1."""

    terms: dict
    precision: int

    def __post_init__(self) -> None:
        N = self.precision
        if N < 1:
            raise DegenerateInputError("precision must be at least 1")
        clean = {}
        for (i, j), c in self.terms.items():
            if i + j == 0 and c:
                raise DegenerateInputError("series must vanish at the origin")
            if 1 <= i + j <= N:
                c = _norm_coeff(c)
                if c:
                    clean[(i, j)] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def variable(cls, slot: int, precision: int) -> "TruncSeries2":
        return cls({(1, 0) if slot == 0 else (0, 1): 1}, precision)

    def coefficient(self, i: int, j: int):
        return self.terms.get((i, j), 0)

    @property
    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.terms.values())

    @property
    def is_symmetric(self) -> bool:
        return all(self.terms.get((j, i), 0) == c for (i, j), c in self.terms.items())

    def truncate(self, precision: int) -> "TruncSeries2":
        if precision == self.precision:
            return self
        return TruncSeries2(self.terms, precision)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries2):
            return NotImplemented
        return self.precision == other.precision and self.terms == other.terms

    def __add__(self, other: "TruncSeries2") -> "TruncSeries2":
        N = min(self.precision, other.precision)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, 0) + c
        return TruncSeries2(out, N)

    def __sub__(self, other: "TruncSeries2") -> "TruncSeries2":
        return self + (-other)

    def __neg__(self) -> "TruncSeries2":
        return TruncSeries2({m: -c for m, c in self.terms.items()}, self.precision)

    def __mul__(self, other):
        if isinstance(other, TruncSeries2):
            N = min(self.precision, other.precision)
            return TruncSeries2(_b_mul(self.terms, other.terms, N), N)
        return TruncSeries2(
            {m: other * c for m, c in self.terms.items()}, self.precision
        )

    __rmul__ = __mul__

    def substitute(self, u, v):
        """self(u, v) for two series of the same kind, each fixing the origin."""
        if isinstance(u, TruncSeries1) and isinstance(v, TruncSeries1):
            N = min(self.precision, u.precision, v.precision)
            upow = _powers(list(u.coeffs[: N + 1]), _u_mul, self._max_exp(0), N)
            vpow = _powers(list(v.coeffs[: N + 1]), _u_mul, self._max_exp(1), N)
            acc = [0] * (N + 1)
            for (i, j), c in self.terms.items():
                term = upow[i] if j == 0 else vpow[j] if i == 0 else _u_mul(upow[i], vpow[j], N)
                for e in range(N + 1):
                    acc[e] += c * term[e]
            return TruncSeries1(tuple(acc), N)
        if isinstance(u, TruncSeries2) and isinstance(v, TruncSeries2):
            N = min(self.precision, u.precision, v.precision)
            upow = _powers(dict(u.terms), _b_mul, self._max_exp(0), N)
            vpow = _powers(dict(v.terms), _b_mul, self._max_exp(1), N)
            acc: dict = {}
            for (i, j), c in self.terms.items():
                term = upow[i] if j == 0 else vpow[j] if i == 0 else _b_mul(upow[i], vpow[j], N)
                for mono, a in term.items():
                    acc[mono] = acc.get(mono, 0) + c * a
            return TruncSeries2(acc, N)
        raise DegenerateInputError("substitution arguments must be series of one kind")

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0]))

    def _max_exp(self, slot: int) -> int:
        return max((m[slot] for m in self.terms), default=1)

    def __str__(self) -> str:
        parts = [f"{c}*x^{i}*y^{j}" for (i, j), c in self.sorted_terms()]
        body = " + ".join(parts) if parts else "0"
        return f"{body} + O(degree {self.precision + 1})"


def _b_mul(a: dict, b: dict, N: int) -> dict:
    out: dict = {}
    for (i1, j1), c1 in a.items():
        if i1 + j1 > N:
            continue
        for (i2, j2), c2 in b.items():
            i, j = i1 + i2, j1 + j2
            if i + j <= N:
                out[(i, j)] = out.get((i, j), 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def _b_invert_unit(a: dict, N: int) -> dict:
    """Inverse of a bivariate series with constant term +-1."""
    c0 = a.get((0, 0), 0)
    assert c0 in (1, -1)
    h = {m: -c0 * c for m, c in a.items() if m != (0, 0)}
    out = {(0, 0): 1}
    power = dict(h)
    min_order = min((i + j for i, j in h), default=N + 1)
    k = 1
    while k * min_order <= N:
        for mono, c in power.items():
            out[mono] = out.get(mono, 0) + c
        power = _b_mul(power, h, N)
        k += 1
    return {m: c0 * c for m, c in out.items() if c}


def _powers(base, mul, kmax, N):
    """[None, base, base^2, ..., base^kmax], truncated at total degree N."""
    table = [None, base]
    for _ in range(1, kmax):
        table.append(mul(table[-1], base, N))
    return table


# -- the group law ------------------------------------------------------


@dataclass(frozen=True)
class FormalGroupLaw:
    """A commutative formal group law F with its inversion series.

    Construction validates the unit axioms F(x,0) = x, F(0,y) = y,
    commutativity, and F(t, inv(t)) = 0 to the working precision;
    associativity is a property of the producing constructions and is
    exercised by the test suite rather than re-checked per instance.
    """

    F: TruncSeries2
    inv: TruncSeries1
    precision: int
    source: str = "abstract"
    integral: bool = field(init=False)

    def __post_init__(self) -> None:
        if self.F.precision != self.precision or self.inv.precision != self.precision:
            raise DegenerateInputError("group-law components disagree on precision")
        for k in range(1, self.precision + 1):
            want = 1 if k == 1 else 0
            if self.F.coefficient(k, 0) != want or self.F.coefficient(0, k) != want:
                raise DegenerateInputError("unit axiom F(x,0) = x fails")
        if not self.F.is_symmetric:
            raise DegenerateInputError("group law must be commutative")
        t = TruncSeries1.identity(self.precision)
        if any(self.F.substitute(t, self.inv).coeffs):
            raise DegenerateInputError("inversion series does not invert")
        object.__setattr__(self, "integral", self.F.is_integral and self.inv.is_integral)

    @classmethod
    def from_series(cls, F: TruncSeries2, source: str = "abstract") -> "FormalGroupLaw":
        """Build a law from F alone, solving F(t, inv(t)) = 0 for inv."""
        N = F.precision
        t = TruncSeries1.identity(N)
        inv = -t
        # each pass clears one more degree: F(t, inv + d) = F(t, inv) + d(1 + O(t))
        for _ in range(N):
            residue = F.substitute(t, inv)
            if not any(residue.coeffs):
                break
            inv = inv - residue
        return cls(F=F, inv=inv, precision=N, source=source)


def _integer_a_invariants(E: WeierstrassCurve) -> list:
    if not E.is_rational:
        raise UnsupportedCaseError("formal group needs a curve over Q")
    a = [E.a1, E.a2, E.a3, E.a4, E.a6]
    if any(c.denominator != 1 for c in a):
        raise UnsupportedCaseError("formal group needs integral a-invariants")
    return [int(c) for c in a]


def elliptic_formal_group(E: WeierstrassCurve, N: int) -> FormalGroupLaw:
    """Formal group law of E to total degree N in the parameter z = -x/y.

    w(z) is produced by iterating w <- z^3 + a1 z w + a2 z^2 w + a3 w^2
    + a4 z w^2 + a6 w^3 to stabilization at degree N+3, and the law by the
    chord construction in the (z, w)-plane.  Integer a-invariants give
    integer series coefficients throughout.
    """
    a1, a2, a3, a4, a6 = _integer_a_invariants(E)
    if not 1 <= N <= MAX_SERIES_DEGREE:
        raise DegenerateInputError(
            f"series degree must lie in 1..{MAX_SERIES_DEGREE}"
        )
    W = N + 3
    w = [0] * (W + 1)
    w[3] = 1
    while True:
        w2 = _u_mul(w, w, W)
        w3 = _u_mul(w2, w, W)
        nxt = [0] * (W + 1)
        nxt[3] = 1
        for k in range(W + 1):
            if k >= 1:
                nxt[k] += a1 * w[k - 1] + a4 * w2[k - 1]
            if k >= 2:
                nxt[k] += a2 * w[k - 2]
            nxt[k] += a3 * w2[k] + a6 * w3[k]
        if nxt == w:
            break
        w = nxt

    # slope and intercept of the chord through (z1, w(z1)), (z2, w(z2))
    s: dict = {}
    for n in range(3, W + 1):
        if w[n]:
            for i in range(n):
                if i + (n - 1 - i) <= N:
                    s[(i, n - 1 - i)] = s.get((i, n - 1 - i), 0) + w[n]
    s = {m: c for m, c in s.items() if m[0] + m[1] <= N and c}
    t_dict: dict = {(n, 0): w[n] for n in range(3, min(W, N) + 1) if w[n]}
    s_shift = {(i + 1, j): c for (i, j), c in s.items() if i + j + 1 <= N}
    for mono, c in s_shift.items():
        t_dict[mono] = t_dict.get(mono, 0) - c
    t_dict = {m: c for m, c in t_dict.items() if c}

    s2 = _b_mul(s, s, N)
    s3 = _b_mul(s2, s, N)
    st = _b_mul(s, t_dict, N)
    s2t = _b_mul(s2, t_dict, N)
    alpha = {(0, 0): 1}
    beta: dict = {}
    for src, coef in ((s, a2), (s2, a4), (s3, a6)):
        if coef:
            for mono, c in src.items():
                alpha[mono] = alpha.get(mono, 0) + coef * c
    for src, coef in ((s, a1), (t_dict, a2), (s2, a3), (st, 2 * a4), (s2t, 3 * a6)):
        if coef:
            for mono, c in src.items():
                beta[mono] = beta.get(mono, 0) + coef * c
    ratio = _b_mul(beta, _b_invert_unit(alpha, N), N)
    z3 = {(1, 0): -1, (0, 1): -1}
    for mono, c in ratio.items():
        z3[mono] = z3.get(mono, 0) - c
    z3 = {m: c for m, c in z3.items() if c and m[0] + m[1] <= N}

    # inversion: z(-P) = -z / (1 - a1 z - a3 w(z))
    unit = [0] * (N + 1)
    unit[0] = 1
    if a1:
        unit[1] -= a1
    for k in range(3, N + 1):
        unit[k] -= a3 * w[k]
    inv_unit = _u_invert_unit(unit, N)
    iota = [0] + [-inv_unit[k - 1] for k in range(1, N + 1)]

    F2 = TruncSeries1(tuple(iota), N).substitute(TruncSeries2(z3, N))
    return FormalGroupLaw(
        F=F2, inv=TruncSeries1(tuple(iota), N), precision=N, source="curve"
    )


def mult_by_m(law: FormalGroupLaw, m: int) -> TruncSeries1:
    """Multiplication-by-m series M_m(t) = F(t, M_{m-1}(t)), M_1 = t."""
    if m < 1:
        raise DegenerateInputError("multiplier must be a positive integer")
    t = TruncSeries1.identity(law.precision)
    M = t
    for _ in range(m - 1):
        M = law.F.substitute(t, M)
    return M


def verify_structure_ap_pb(law: FormalGroupLaw, p: int) -> bool:
    """Check M_p(t) = a(t^p) + p*b(t): p divides every coefficient at
    an exponent prime to p.  The decomposition exists for any formal
    group over the integers; failure indicates a truncation or
    construction defect."""
    if not is_prime(p):
        raise DegenerateInputError("p must be prime")
    if not law.integral:
        raise DegenerateInputError("structure check needs integer coefficients")
    M = mult_by_m(law, p)
    return all(
        M.coefficient(k) % p == 0
        for k in range(1, law.precision + 1)
        if k % p != 0
    )


def verify_ideal_membership(law: FormalGroupLaw, p: int) -> bool:
    """Check M_p(F(x, inv(y))) lies in (x^p - y^p) + (p) up to degree N.

    The composite is reduced mod p and divided by (x - y)^p, one
    homogeneous component at a time along descending x-degree; this is
    equivalent to x^p - y^p membership since the two generators agree
    mod p.
    """
    if not is_prime(p):
        raise DegenerateInputError("p must be prime")
    if not law.integral:
        raise DegenerateInputError("membership check needs integer coefficients")
    N = law.precision
    if N < p + 2:
        raise DegenerateInputError("precision too small: need N >= p + 2")
    x = TruncSeries2.variable(0, N)
    iota_y = law.inv.as_bivariate(1, N)
    difference = law.F.substitute(x, iota_y)
    G = mult_by_m(law, p).substitute(difference)
    residues: dict = {}
    for (i, j), c in G.terms.items():
        r = c % p
        if r:
            residues[(i, j)] = r
    for d in range(1, N + 1):
        row = [residues.get((i, d - i), 0) for i in range(d + 1)]
        # divide the homogeneous piece by x^p - y^p (= (x-y)^p mod p)
        for i in range(d, p - 1, -1):
            if row[i]:
                row[i - p] = (row[i - p] + row[i]) % p
                row[i] = 0
        if any(row):
            return False
    return True


def z_coordinate(E: WeierstrassCurve, P: CurvePoint):
    """Exact value of the parameter z = -x/y at an affine point.

    Where x and y both vanish the curve relation resolves the quotient
    to -a3/a4; at the remaining y = 0 points z has a pole and a
    ZeroDivisionError propagates.
    """
    if P.is_infinity:
        raise DegenerateInputError("z_coordinate needs an affine point")
    return z_value(E, P)


def kernel_valuation(E: WeierstrassCurve, P: CurvePoint, prime) -> Fraction:
    """v(z(P)) for P in the kernel of reduction, normalized so v(p) = 1.

    Accepts a rational prime or a QuadraticPrime; at a ramified prime the
    result is a half-integer (multiply by the ramification degree for
    uniformizer units).  Raises when P does not reduce to the identity.
    """
    if P.is_infinity:
        raise DegenerateInputError("kernel_valuation needs an affine point")
    flag, witness = in_kernel_of_reduction(E, P, prime)
    if not flag:
        raise DegenerateInputError("point is not in the kernel of reduction")
    value = Fraction(witness)
    assert value > 0
    return value

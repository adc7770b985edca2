"""Inertia congruence, ramified-prime point checks and the escape identity."""

import math
from fractions import Fraction

import pytest
import sympy

from heightforge.exact_arith import DegenerateInputError, IntPolynomial, is_prime
from heightforge.number_fields import (
    CyclotomicElement,
    GaloisAutomorphism,
    QuadraticField,
    apply_automorphism,
    divides_in_cyclotomic,
    splitting_type,
)
from heightforge.elliptic_core import CurvePoint, WeierstrassCurve, reduction_type
from heightforge.heights import local_height_finite
from heightforge.ramified_verifier import (
    ADWitness,
    ad_tau_construct,
    ramified_point_check,
    ramified_scan,
    torsion_escape_identity,
    verify_ad_congruence,
)

E37 = WeierstrassCurve(0, 0, 1, -1, 0)
E11 = WeierstrassCurve(0, -1, 1, -10, -20)
E389 = WeierstrassCurve(0, 1, 1, -2, 0)
E5077 = WeierstrassCurve(0, 0, 1, -7, 6)
ECM = WeierstrassCurve(0, 0, 0, -1, 0)
CORPUS = (E37, E11, E389, E5077, ECM)

AD_PAIRS = ((4, 2), (8, 2), (12, 2), (9, 3), (12, 3), (25, 5))

F481 = QuadraticField(481)
P481 = CurvePoint.affine(
    F481.element(5), F481.element(Fraction(-1, 2), Fraction(1, 2))
)


def v_p(m, p):
    a = 0
    while m % p == 0:
        m //= p
        a += 1
    return a, m


class TestAdTauConstruct:
    def test_frozen_exponents(self):
        assert ad_tau_construct(4, 2).k == 3
        assert ad_tau_construct(9, 3).k == 4
        assert ad_tau_construct(12, 3).k == 5
        assert ad_tau_construct(8, 2).k == 5
        assert ad_tau_construct(12, 2).k == 7
        assert ad_tau_construct(25, 5).k == 6

    def test_congruence_conditions_and_minimality(self):
        for m, p in AD_PAIRS:
            k = ad_tau_construct(m, p).k
            a, mprime = v_p(m, p)
            modulus = mprime * p ** (a - 1)
            assert (k - 1) % modulus == 0
            assert k % m != 1
            assert math.gcd(k, m) == 1
            for kk in range(2, k):
                assert not (
                    (kk - 1) % modulus == 0
                    and kk % m != 1
                    and math.gcd(kk, m) == 1
                )

    def test_fixes_zeta_m_over_p_and_moves_zeta_m(self):
        for m, p in AD_PAIRS:
            tau = ad_tau_construct(m, p)
            zeta = CyclotomicElement.zeta_power(m, 1)
            zeta_sub = CyclotomicElement.zeta_power(m, p)
            assert apply_automorphism(zeta_sub, tau) == zeta_sub
            assert apply_automorphism(zeta, tau) != zeta
            # tau(zeta)/zeta is a primitive p-th root of unity
            omega = CyclotomicElement.zeta_power(m, tau.k - 1)
            assert omega ** p == 1
            assert omega != 1

    def test_rejects_bad_moduli(self):
        with pytest.raises(DegenerateInputError):
            ad_tau_construct(6, 5)
        with pytest.raises(DegenerateInputError):
            ad_tau_construct(5, 5)
        with pytest.raises(DegenerateInputError):
            ad_tau_construct(12, 4)


class TestVerifyAdCongruence:
    def test_gaussian_example(self):
        # (a - bi)^2 - (a + bi)^2 = -4abi
        tau = ad_tau_construct(4, 2)
        alpha = CyclotomicElement(4, (1, 1, 0, 0))
        diff = apply_automorphism(alpha, tau) ** 2 - alpha**2
        assert diff == CyclotomicElement.zeta_power(4, 1, -4)
        assert divides_in_cyclotomic(diff, 2)

    def test_zeta9_cube_collapses(self):
        tau = ad_tau_construct(9, 3)
        zeta = CyclotomicElement.zeta_power(9, 1)
        assert apply_automorphism(zeta, tau) ** 3 - zeta**3 == 0

    @pytest.mark.parametrize("m,p", AD_PAIRS)
    def test_sweep_passes(self, m, p):
        witness = verify_ad_congruence(m, p, sample_count=60, seed=11)
        assert witness.all_pass
        assert len(witness.samples) == 60

    def test_full_sample_count(self):
        witness = verify_ad_congruence(9, 3, sample_count=500, seed=7)
        assert witness.all_pass
        assert len(witness.samples) == 500

    def test_seed_determinism(self):
        w1 = verify_ad_congruence(8, 2, sample_count=20, seed=3)
        w2 = verify_ad_congruence(8, 2, sample_count=20, seed=3)
        assert w1.samples == w2.samples
        w3 = verify_ad_congruence(8, 2, sample_count=20, seed=4)
        assert w1.samples != w3.samples

    def test_witness_validates_tau(self):
        good = ad_tau_construct(9, 3)
        with pytest.raises(DegenerateInputError):
            ADWitness(9, 3, GaloisAutomorphism("cyclotomic-power", k=2, m=9), (), True)
        with pytest.raises(DegenerateInputError):
            ADWitness(9, 3, GaloisAutomorphism("conjugation"), (), True)
        ADWitness(9, 3, good, (), True)


class TestRamifiedPointCheck:
    def test_anchor_point_at_13(self):
        rep = ramified_point_check(E37, 481, P481, 13)
        assert rep.outcome == "bound"
        assert rep.bound_met
        assert rep.kernel_witness == 1
        assert rep.valuation == 3
        assert rep.valuation >= 2

    def test_anchor_local_height_cross_check(self):
        # v(z(P')) in uniformizer units against the local height at the prime
        rep = ramified_point_check(E37, 481, P481, 13)
        prime = splitting_type(F481, 13)
        lam = local_height_finite(E37, rep.image, prime).value
        assert math.isclose(lam, float(rep.valuation) / 2 * math.log(13), rel_tol=1e-12)
        assert lam >= math.log(13) - 1e-12

    def test_rational_point_descends(self):
        F5 = QuadraticField(5)
        P = CurvePoint.affine(F5.element(0), F5.element(0))
        rep = ramified_point_check(E37, 5, P, 5)
        assert rep.outcome == "descent"
        assert rep.valuation is None
        assert rep.bound_met
        assert rep.image.is_infinity

    def test_torsion_classified_before_check(self):
        F = QuadraticField(-6)
        T = CurvePoint.affine(F.element(0), F.element(0))
        rep = ramified_point_check(ECM, -6, T, 3)
        assert rep.outcome == "torsion"
        assert rep.bound_met

    def test_unramified_prime_rejected(self):
        with pytest.raises(DegenerateInputError):
            ramified_point_check(E37, 481, P481, 5)

    def test_bad_reduction_rejected(self):
        with pytest.raises(DegenerateInputError):
            ramified_point_check(E37, 481, P481, 37)

    def test_digit_budget_enforced(self):
        with pytest.raises(DegenerateInputError):
            ramified_point_check(E37, 481, P481, 53)

    def test_off_curve_rejected(self):
        bad = CurvePoint.affine(F481.element(5), F481.element(5))
        with pytest.raises(DegenerateInputError):
            ramified_point_check(E37, 481, bad, 13)

    def test_corpus_meets_bound(self):
        checks = 0
        for E in CORPUS:
            for d, P in ramified_scan(E):
                for p in range(2, 51):
                    if not is_prime(p) or abs(d) % p:
                        continue
                    if not reduction_type(E, p).is_good:
                        continue
                    rep = ramified_point_check(E, d, P, p)
                    assert rep.bound_met
                    if rep.outcome == "bound":
                        assert rep.valuation >= 2
                        assert rep.kernel_witness >= 1
                    checks += 1
        assert checks >= 20

    def test_json_shape(self):
        d = ramified_point_check(E37, 481, P481, 13).to_json_dict()
        assert d["d"] == 481 and d["p"] == 13
        assert d["outcome"] == "bound" and d["bound_met"]
        assert d["valuation"] == "3/1"
        assert math.isclose(d["lambda_lower"], 1.5 * math.log(13), abs_tol=1e-6)


class TestRamifiedScan:
    def test_scan_finds_anchor_field(self):
        hits = {d: P for d, P in ramified_scan(E37)}
        assert 481 in hits
        assert hits[481] == P481

    def test_scan_finds_97(self):
        hits = dict(ramified_scan(E37))
        assert 97 in hits
        assert hits[97].x == 3

    def test_square_discriminants_skipped(self):
        # x = 2 gives 1 + 4*6 = 25; x in {0, 1} gives 1
        ds = [d for d, _ in ramified_scan(E37)]
        assert 25 not in ds and 1 not in ds
        assert all(d < 0 or math.isqrt(d) ** 2 != d for d in ds)

    def test_pure_square_root_branch(self):
        hits = dict(ramified_scan(ECM))
        assert 6 in hits
        P = hits[6]
        assert P.x == 2 and P.y == QuadraticField(6).sqrt_gen()

    def test_points_on_curve_and_fields_squarefree(self):
        for E in CORPUS:
            scan = ramified_scan(E)
            xs = [int(P.x.a) for _, P in scan]
            assert xs == sorted(xs)
            for d, P in scan:
                assert E.contains(P)
                QuadraticField(d)  # validates squarefree, != 0, 1


class TestTorsionEscapeIdentity:
    def test_m2_expansion(self):
        a, b = torsion_escape_identity(2, 5)
        assert a.coeffs == (5,) and b.coeffs == (-1,)

    def test_m3_matches_cofactor(self):
        a, b = torsion_escape_identity(3, 7)
        assert b.coeffs == (-2, -1)

    def test_m1_trivial(self):
        a, b = torsion_escape_identity(1, 2)
        assert a.coeffs == (2,) and b.is_zero

    def test_symbolic_oracle(self):
        X = sympy.symbols("X")
        for m, p in ((12, 5), (7, 3), (24, 13)):
            a, b = torsion_escape_identity(m, p)
            bx = sum(c * X**i for i, c in enumerate(b.coeffs))
            lhs = sympy.expand(p * (X**m - 1) + bx * p * (X - 1) ** 2)
            assert sympy.simplify(lhs - m * p * (X - 1)) == 0

    def test_sweep(self):
        for m in range(1, 25):
            for p in (2, 3, 5, 7, 11, 13):
                a, b = torsion_escape_identity(m, p)
                cyclo = IntPolynomial((-1,) + (0,) * (m - 1) + (1,))
                square = IntPolynomial((p, -2 * p, p))
                assert a * cyclo + b * square == IntPolynomial((-m * p, m * p))

    def test_rejects_bad_input(self):
        with pytest.raises(DegenerateInputError):
            torsion_escape_identity(0, 5)
        with pytest.raises(DegenerateInputError):
            torsion_escape_identity(3, 6)

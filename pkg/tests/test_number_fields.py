"""Quadratic field arithmetic, prime splitting, cyclotomic reduction."""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heightforge.exact_arith import DegenerateInputError, IntPolynomial, valuation_p
from heightforge.number_fields import (
    CyclotomicElement,
    GaloisAutomorphism,
    QuadraticElement,
    QuadraticField,
    apply_automorphism,
    cyclotomic_polynomial,
    divides_in_cyclotomic,
    primes_above,
    quad_valuation,
    splitting_type,
)

Q5 = QuadraticField(5)
QM1 = QuadraticField(-1)
Q481 = QuadraticField(481)


def elt(field, an, ad, bn, bd):
    return QuadraticElement(Fraction(an, ad), Fraction(bn, bd), field)


small_frac = st.fractions(
    min_value=-30, max_value=30, max_denominator=12
)


class TestQuadraticField:
    def test_rejects_non_squarefree(self):
        for d in (0, 1, 4, 8, 12, 18, -4):
            with pytest.raises(DegenerateInputError):
                QuadraticField(d)

    def test_discriminant(self):
        assert QuadraticField(5).discriminant == 5
        assert QuadraticField(-3).discriminant == -3
        assert QuadraticField(2).discriminant == 8
        assert QuadraticField(-1).discriminant == -4
        assert QuadraticField(481).discriminant == 481

    def test_omega_minpoly(self):
        # omega = (1+sqrt 5)/2 satisfies X^2 - X - 1
        assert Q5.omega_minpoly_coeffs() == (-1, -1)
        # omega = sqrt(-1) satisfies X^2 + 1
        assert QM1.omega_minpoly_coeffs() == (1, 0)


class TestQuadraticElement:
    def test_golden_ratio_relation(self):
        phi = elt(Q5, 1, 2, 1, 2)
        assert phi * phi == phi + 1
        assert phi.norm() == -1
        assert phi.trace() == 1

    def test_conjugate_and_norm(self):
        x = elt(Q5, 3, 1, 2, 1)
        assert x * x.conjugate() == x.norm()
        assert x + x.conjugate() == x.trace()

    def test_division(self):
        x = elt(Q5, 3, 1, 2, 1)
        y = elt(Q5, 1, 1, 1, 1)
        assert (x / y) * y == x
        assert 1 / y == y.inverse()

    def test_rational_mixing(self):
        x = Q5.sqrt_gen()
        assert (2 + x) - 2 == x
        assert Fraction(1, 2) * x + x * Fraction(1, 2) == x
        assert (Fraction(3) - x) + (x - 3) == 0

    def test_zero_inverse_raises(self):
        with pytest.raises(ZeroDivisionError):
            Q5.element(0).inverse()

    def test_mixed_fields_raise(self):
        with pytest.raises(DegenerateInputError):
            Q5.sqrt_gen() + QM1.sqrt_gen()

    def test_omega_coords_roundtrip(self):
        for x in (elt(Q5, 1, 2, 1, 2), elt(Q5, -7, 3, 5, 6), elt(QM1, 2, 5, -3, 4)):
            u, v, D = x.omega_coords()
            c0, c1 = x.field.omega_minpoly_coeffs()
            if x.field.omega_is_half:
                omega = elt(x.field, 1, 2, 1, 2)
            else:
                omega = x.field.sqrt_gen()
            assert (Fraction(u) + Fraction(v) * omega) / Fraction(D) == x
            # omega really satisfies the reported minimal polynomial
            assert omega * omega + c1 * omega + c0 == 0

    @given(small_frac, small_frac, small_frac, small_frac)
    @settings(max_examples=80)
    def test_norm_multiplicative(self, a1, b1, a2, b2):
        x = QuadraticElement(a1, b1, Q5)
        y = QuadraticElement(a2, b2, Q5)
        assert (x * y).norm() == x.norm() * y.norm()


class TestSplitting:
    def test_frozen_types_q5(self):
        assert splitting_type(Q5, 2).splitting == "inert"
        assert splitting_type(Q5, 3).splitting == "inert"
        assert splitting_type(Q5, 5).splitting == "ramified"
        assert splitting_type(Q5, 7).splitting == "inert"
        assert splitting_type(Q5, 11).splitting == "split"
        assert splitting_type(Q5, 13).splitting == "inert"
        assert splitting_type(Q5, 19).splitting == "split"

    def test_frozen_types_gaussian(self):
        assert splitting_type(QM1, 2).splitting == "ramified"
        assert splitting_type(QM1, 3).splitting == "inert"
        assert splitting_type(QM1, 5).splitting == "split"

    def test_two_splits_when_disc_is_1_mod_8(self):
        # 481 = 13*37 = 1 mod 8
        assert splitting_type(Q481, 2).splitting == "split"
        assert splitting_type(Q481, 13).splitting == "ramified"
        assert splitting_type(Q481, 37).splitting == "ramified"

    def test_local_degrees(self):
        assert splitting_type(Q5, 11).local_degree == 1
        assert splitting_type(Q5, 7).local_degree == 2
        assert splitting_type(Q5, 5).local_degree == 2

    def test_split_roots_are_roots(self):
        P = splitting_type(Q5, 11)
        c0, c1 = Q5.omega_minpoly_coeffs()
        assert (P.root**2 + c1 * P.root + c0) % 11 == 0
        Pc = P.conjugate()
        assert Pc.root != P.root
        assert (Pc.root**2 + c1 * Pc.root + c0) % 11 == 0
        assert Pc.conjugate() == P

    def test_primes_above_counts(self):
        assert len(primes_above(Q5, 11)) == 2
        assert len(primes_above(Q5, 7)) == 1
        assert len(primes_above(Q5, 5)) == 1
        # local degrees sum to the global degree
        for p in (2, 3, 5, 7, 11, 13):
            assert sum(P.local_degree for P in primes_above(Q5, p)) == 2

    def test_rejects_composite(self):
        with pytest.raises(DegenerateInputError):
            splitting_type(Q5, 6)


class TestQuadValuation:
    def test_inert_anchor(self):
        P = splitting_type(Q5, 7)
        assert quad_valuation(Q5.element(7), P) == 1
        assert quad_valuation(Q5.element(49), P) == 2
        assert quad_valuation(Q5.element(Fraction(1, 7)), P) == -1
        assert quad_valuation(Q5.element(3), P) == 0

    def test_ramified_anchor(self):
        P = splitting_type(Q5, 5)
        assert quad_valuation(Q5.sqrt_gen(), P) == Fraction(1, 2)
        assert quad_valuation(Q5.element(5), P) == 1
        # the fundamental unit is a unit at every finite place
        phi = elt(Q5, 1, 2, 1, 2)
        assert quad_valuation(phi, P) == 0

    def test_split_anchor(self):
        # N(-7/2 + sqrt(5)/2) = 11, so the two primes above 11 see it
        # with valuations {1, 0}
        beta = elt(Q5, -7, 2, 1, 2)
        assert beta.norm() == 11
        P = splitting_type(Q5, 11)
        vals = sorted(
            (quad_valuation(beta, Q) for Q in primes_above(Q5, 11)), reverse=True
        )
        assert vals == [1, 0]
        assert quad_valuation(Q5.element(11), P) == 1

    def test_rational_elements_match_ordinary_valuation(self):
        for p in (2, 5, 7, 11):
            P = splitting_type(Q5, p)
            for q in (Fraction(44, 7), Fraction(-125, 8), Fraction(3)):
                assert quad_valuation(Q5.element(q), P) == valuation_p(q, p)

    def test_zero_raises(self):
        with pytest.raises(DegenerateInputError):
            quad_valuation(Q5.element(0), splitting_type(Q5, 7))

    @given(small_frac, small_frac, small_frac, small_frac, st.sampled_from([11, 19, 29, 31]))
    @settings(max_examples=60)
    def test_split_pair_sums_to_norm_valuation(self, a1, b1, a2, b2, p):
        x = QuadraticElement(a1, b1, Q5)
        if not x:
            return
        P1, P2 = primes_above(Q5, p)
        total = quad_valuation(x, P1) + quad_valuation(x, P2)
        assert total == valuation_p(x.norm(), p)

    @given(small_frac, small_frac, small_frac, small_frac, st.sampled_from([3, 5, 7, 11]))
    @settings(max_examples=60)
    def test_multiplicative(self, a1, b1, a2, b2, p):
        x = QuadraticElement(a1, b1, Q5)
        y = QuadraticElement(a2, b2, Q5)
        if not x or not y:
            return
        for P in primes_above(Q5, p):
            assert quad_valuation(x * y, P) == quad_valuation(x, P) + quad_valuation(y, P)

    @given(small_frac, small_frac, st.sampled_from([2, 3, 7, 13]))
    @settings(max_examples=60)
    def test_inert_values_are_integers(self, a, b, p):
        x = QuadraticElement(a, b, Q5)
        if not x:
            return
        v = quad_valuation(x, splitting_type(Q5, p))
        assert v.denominator == 1


class TestCyclotomicPolynomial:
    def test_frozen_small(self):
        P = IntPolynomial.from_coeffs
        assert cyclotomic_polynomial(1) == P([-1, 1])
        assert cyclotomic_polynomial(2) == P([1, 1])
        assert cyclotomic_polynomial(3) == P([1, 1, 1])
        assert cyclotomic_polynomial(4) == P([1, 0, 1])
        assert cyclotomic_polynomial(6) == P([1, -1, 1])
        assert cyclotomic_polynomial(9) == P([1, 0, 0, 1, 0, 0, 1])
        assert cyclotomic_polynomial(12) == P([1, 0, -1, 0, 1])

    def test_value_at_one_detects_prime_powers(self):
        expected = {2: 2, 3: 3, 4: 2, 5: 5, 6: 1, 8: 2, 9: 3, 10: 1, 12: 1, 15: 1}
        for m, val in expected.items():
            assert cyclotomic_polynomial(m)(1) == val

    def test_degrees_sum_to_m(self):
        for m in range(1, 40):
            assert sum(
                cyclotomic_polynomial(d).degree for d in range(1, m + 1) if m % d == 0
            ) == m


class TestCyclotomicElement:
    def test_zeta_power_wraps(self):
        z = CyclotomicElement.zeta_power(12, 1)
        assert z**12 == CyclotomicElement.integer(12, 1)
        assert z**13 == z
        assert z**5 != z

    def test_prime_root_sum_vanishes(self):
        for p in (3, 5, 7):
            s = CyclotomicElement(p, tuple([1] * p))
            assert s == 0

    def test_canonical_coords_anchor(self):
        # (1 - zeta_3)^2 = -3*zeta_3
        z = CyclotomicElement.zeta_power(3, 1)
        one = CyclotomicElement.integer(3, 1)
        sq = (one - z) * (one - z)
        assert sq.canonical_coeffs() == (0, -3)
        assert sq == -3 * z

    def test_divisibility(self):
        p = 5
        z = CyclotomicElement.zeta_power(p, 1)
        one = CyclotomicElement.integer(p, 1)
        lam = one - z
        assert divides_in_cyclotomic(lam ** (p - 1), p)
        assert not divides_in_cyclotomic(lam ** (p - 2), p)
        assert divides_in_cyclotomic(CyclotomicElement.integer(p, 0), 0)

    def test_level_mismatch_raises(self):
        with pytest.raises(DegenerateInputError):
            CyclotomicElement.zeta_power(3, 1) + CyclotomicElement.zeta_power(4, 1)

    @given(
        st.lists(st.integers(-5, 5), min_size=12, max_size=12),
        st.lists(st.integers(-5, 5), min_size=12, max_size=12),
    )
    @settings(max_examples=60)
    def test_mul_commutes_and_distributes(self, c1, c2):
        x = CyclotomicElement(12, tuple(c1))
        y = CyclotomicElement(12, tuple(c2))
        assert x * y == y * x
        assert x * (y + y) == x * y + x * y


class TestGaloisAutomorphism:
    def test_orders(self):
        assert GaloisAutomorphism("conjugation").order() == 2
        assert GaloisAutomorphism("cyclotomic-power", k=2, m=5).order() == 4
        assert GaloisAutomorphism("cyclotomic-power", k=3, m=7).order() == 6
        assert GaloisAutomorphism("cyclotomic-power", k=1, m=9).order() == 1

    def test_invalid_k_rejected(self):
        with pytest.raises(DegenerateInputError):
            GaloisAutomorphism("cyclotomic-power", k=3, m=12)

    def test_conjugation_on_quadratic(self):
        g = GaloisAutomorphism("conjugation")
        x = elt(Q5, 1, 2, 1, 2)
        assert apply_automorphism(x, g) == x.conjugate()

    def test_power_map_on_zeta(self):
        g = GaloisAutomorphism("cyclotomic-power", k=5, m=12)
        z = CyclotomicElement.zeta_power(12, 1)
        assert apply_automorphism(z, g) == z**5

    @given(
        st.lists(st.integers(-4, 4), min_size=10, max_size=10),
        st.lists(st.integers(-4, 4), min_size=10, max_size=10),
        st.sampled_from([1, 3, 7, 9]),
    )
    @settings(max_examples=60)
    def test_power_map_is_ring_hom(self, c1, c2, k):
        g = GaloisAutomorphism("cyclotomic-power", k=k, m=10)
        x = CyclotomicElement(10, tuple(c1))
        y = CyclotomicElement(10, tuple(c2))
        assert apply_automorphism(x * y, g) == apply_automorphism(x, g) * apply_automorphism(y, g)
        assert apply_automorphism(x + y, g) == apply_automorphism(x, g) + apply_automorphism(y, g)

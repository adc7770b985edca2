"""Acceptance gate: one test per criterion, at the stated tolerances and
time budgets, each printing a single summary line on success."""

import math
import time
from fractions import Fraction

import pytest

from heightforge.bound_pipeline import (
    PipelineConfig,
    SearchExhaustedError,
    run_bound_pipeline,
    select_prime,
)
from heightforge.elliptic_core import (
    CurvePoint,
    WeierstrassCurve,
    count_points_mod_p,
    reduction_type,
    scalar_mul,
)
from heightforge.formal_group import (
    elliptic_formal_group,
    verify_ideal_membership,
    verify_structure_ap_pb,
)
from heightforge.frobenius_unramified import verify_annihilation
from heightforge.heights import (
    canonical_height_doubling,
    height_decomposition,
    local_height_finite,
)
from heightforge.number_fields import QuadraticField
from heightforge.ramified_verifier import (
    ramified_point_check,
    torsion_escape_identity,
    verify_ad_congruence,
)

E37 = WeierstrassCurve(0, 0, 1, -1, 0)
E11 = WeierstrassCurve(0, -1, 1, -10, -20)
E389 = WeierstrassCurve(0, 1, 1, -2, 0)
E5077 = WeierstrassCurve(0, 0, 1, -7, 6)
ECM = WeierstrassCurve(0, 0, 0, -1, 0)
CURVES = (E37, E11, E389, E5077, ECM)

P37 = CurvePoint.affine(Fraction(0), Fraction(0))


def primes_upto(n):
    return [q for q in range(2, n + 1) if all(q % r for r in range(2, int(q**0.5) + 1))]


def report(n: int, detail: str) -> None:
    print(f"criterion {n:02d} PASS  {detail}")


class TestAcceptance:
    def test_criterion_01_height_decomposition(self):
        points = (
            P37,
            CurvePoint.affine(Fraction(1), Fraction(0)),
            CurvePoint.affine(Fraction(-1), Fraction(-1)),
            CurvePoint.affine(Fraction(1, 4), Fraction(-5, 8)),
        )
        worst = 0.0
        for P in points:
            t0 = time.monotonic()
            dec = height_decomposition(E37, P)
            elapsed = time.monotonic() - t0
            assert abs(dec.residual) < 1e-6, (P, dec.residual)
            assert not dec.residual_places
            assert elapsed < 1.0, (P, elapsed)
            worst = max(worst, abs(dec.residual))
        report(1, f"4 decompositions, max |residual| = {worst:.2e}, < 1 s each")

    def test_criterion_02_quadraticity_and_invariance(self):
        hP = canonical_height_doubling(E37, P37, precision=1e-7)
        for n in (2, 3, 5):
            hn = canonical_height_doubling(E37, scalar_mul(E37, n, P37), precision=1e-7)
            assert abs(hn - n * n * hP) < 1e-5, n
        field = QuadraticField(97)
        Q = CurvePoint.affine(
            field.element(3), field.element(Fraction(-1, 2), Fraction(1, 2))
        )
        Qc = CurvePoint.affine(Q.x.conjugate(), Q.y.conjugate())
        h = canonical_height_doubling(E37, Q, precision=1e-6)
        hc = canonical_height_doubling(E37, Qc, precision=1e-6)
        assert abs(h - hc) < 1e-6
        report(2, f"n in {{2,3,5}} within 1e-5; |hhat(P) - hhat(conj P)| = {abs(h-hc):.2e}")

    def test_criterion_03_frobenius_annihilation(self):
        t0 = time.monotonic()
        checked = 0
        for p in primes_upto(50):
            if not reduction_type(E37, p).is_good:
                continue
            rep = verify_annihilation(E37, P37, p)
            assert rep.in_kernel
            assert rep.local_value >= math.log(p) - 1e-9
            checked += 1
        P5 = scalar_mul(E37, 5, P37)
        assert P5 == CurvePoint.affine(Fraction(1, 4), Fraction(-5, 8))
        lam = local_height_finite(E37, P5, 2)
        assert lam.exact_log_multiple == 1
        assert lam.value == pytest.approx(math.log(2), abs=1e-12)
        elapsed = time.monotonic() - t0
        assert elapsed < 10.0
        report(3, f"{checked} good primes <= 50, lambda_2([5]P) = log 2 exactly, {elapsed:.1f}s")

    def test_criterion_04_hasse_bound(self):
        t0 = time.monotonic()
        checked = 0
        for E in CURVES:
            for p in primes_upto(200):
                if not reduction_type(E, p).is_good:
                    continue
                a = p + 1 - count_points_mod_p(E, p)
                assert a * a <= 4 * p, (E, p, a)
                checked += 1
        elapsed = time.monotonic() - t0
        assert elapsed < 5.0
        report(4, f"{checked} naive counts on 5 curves, all within 2*sqrt(p), {elapsed:.1f}s")

    def test_criterion_05_formal_group_congruences(self):
        t0 = time.monotonic()
        for E in (E37, ECM):
            for p in (2, 3, 5):
                law = elliptic_formal_group(E, 2 * p + 3)
                assert verify_ideal_membership(law, p), (E, p)
                assert verify_structure_ap_pb(law, p), (E, p)
        elapsed = time.monotonic() - t0
        assert elapsed < 5.0
        report(5, f"2 curves x p in {{2,3,5}} at N = 2p+3, {elapsed:.1f}s")

    def test_criterion_06_ad_congruence(self):
        t0 = time.monotonic()
        for m, p in ((4, 2), (8, 2), (12, 2), (9, 3), (12, 3), (25, 5)):
            witness = verify_ad_congruence(m, p, sample_count=500, seed=0)
            assert witness.all_pass, (m, p)
            assert len(witness.samples) == 500
        elapsed = time.monotonic() - t0
        assert elapsed < 10.0
        report(6, f"six (m,p) pairs, exhaustive sweep + 500 samples each, {elapsed:.1f}s")

    def test_criterion_07_ramified_proposition(self):
        t0 = time.monotonic()
        field = QuadraticField(481)
        P = CurvePoint.affine(
            field.element(5), field.element(Fraction(-1, 2), Fraction(1, 2))
        )
        rep = ramified_point_check(E37, 481, P, 13)
        elapsed = time.monotonic() - t0
        assert rep.outcome == "bound"
        assert rep.valuation >= 2
        assert rep.bound_met
        assert elapsed < 10.0
        report(
            7,
            f"uniformizer valuation = {rep.valuation} >= 2, "
            f"lambda >= log 13, {elapsed:.1f}s",
        )

    def test_criterion_08_torsion_escape_identity(self):
        t0 = time.monotonic()
        count = 0
        for m in range(1, 25):
            for p in (2, 3, 5, 7, 11, 13):
                torsion_escape_identity(m, p)
                count += 1
        elapsed = time.monotonic() - t0
        assert elapsed < 1.0
        report(8, f"{count} (m,p) identities verified symbolically, {elapsed:.2f}s")

    def test_criterion_09_bound_pipeline(self):
        t0 = time.monotonic()
        result = run_bound_pipeline(E37, PipelineConfig())
        elapsed = time.monotonic() - t0
        cert = result.certificate
        assert cert.p == 7
        assert cert.c_unramified == Fraction(1, 234)
        assert cert.c_ramified == Fraction(1, 882)
        assert cert.c == Fraction(1, 882)
        run = result.run
        assert run.violations == ()
        nontorsion = [e for e in run.corpus if e.nontorsion]
        fields = {e.d for e in run.corpus if e.d is not None}
        assert len(nontorsion) >= 20
        assert len(fields) >= 3
        assert elapsed < 60.0
        report(
            9,
            f"p = 7, C = 1/882 exact, {len(nontorsion)} nontorsion points over Q "
            f"and {len(fields)} quadratic fields, zero violations, {elapsed:.1f}s",
        )

    def test_criterion_10_negative_control(self):
        with pytest.raises(SearchExhaustedError) as exc:
            select_prime(ECM, PipelineConfig(max_p=300))
        assert "condition (1)" in str(exc.value)
        assert "assert_condition_1" in str(exc.value)
        result = run_bound_pipeline(
            ECM, PipelineConfig(assert_condition_1=True, include_quadratic=False)
        )
        assert result.run.vacuous
        assert result.run.violations == ()
        assert all(not e.nontorsion for e in result.run.corpus)
        report(
            10,
            "CM curve flagged: condition (1) requires user assertion; "
            "rational corpus all torsion, vacuous pass",
        )

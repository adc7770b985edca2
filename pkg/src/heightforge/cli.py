"""JSON command-line front end.

Subcommands mirror the library layers: `heights` decomposes a canonical
height into weighted local parts, `frobenius` checks annihilation into
the kernel of reduction, `formal` prints group-law series and its two
structural congruences, `congruence` sweeps the cyclotomic power-map
congruence, `ramified` runs the inertia descent check on one point, and
`bound` runs the full prime-selection and corpus-verification pipeline.

Exit codes: 0 on pass, 2 when a verification fails, 1 on usage errors.
Rationals are serialized as "num/den" strings and reals as decimal
strings with REAL_DECIMALS digits; the `frobenius` report keeps plain
JSON numbers, its historical wire format.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from typing import Optional

import gmpy2

from .bound_pipeline import (
    PipelineConfig,
    PipelineResult,
    SearchExhaustedError,
    VerificationFailedError,
    compute_bound,
    select_prime,
    verify_corpus,
)
from .elliptic_core import CurvePoint, WeierstrassCurve
from .exact_arith import DegenerateInputError
from .formal_group import (
    elliptic_formal_group,
    mult_by_m,
    verify_ideal_membership,
    verify_structure_ap_pb,
)
from .frobenius_unramified import verify_annihilation
from .heights import DigitBudgetError, height_decomposition
from .number_fields import QuadraticField, cyclotomic_polynomial
from .ramified_verifier import ramified_point_check, verify_ad_congruence

REAL_DECIMALS = 6

_SQRT_TOKEN = re.compile(
    r"^(?:(?P<a>[+-]?\d+(?:/\d+)?)(?=[+-]))?"
    r"(?P<b>[+-]?(?:\d+(?:/\d+)?)?)\*?sqrt\((?P<d>-?\d+)\)$"
)


def _real(x: float) -> str:
    return f"{x:.{REAL_DECIMALS}f}"


def _rat(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _load_curve(path: str) -> WeierstrassCurve:
    with open(path) as fh:
        return WeierstrassCurve.from_json_dict(json.load(fh))


def _parse_coord(token: str, d: Optional[int]):
    token = token.strip()
    if "sqrt" not in token:
        return Fraction(token)
    m = _SQRT_TOKEN.match(token)
    if m is None:
        raise DegenerateInputError(f"cannot parse coordinate {token!r}")
    dd = int(m.group("d"))
    if d is not None and dd != d:
        raise DegenerateInputError(f"coordinate uses sqrt({dd}) but --d is {d}")
    a = Fraction(m.group("a") or 0)
    braw = m.group("b")
    if braw in ("", "+"):
        b = Fraction(1)
    elif braw == "-":
        b = Fraction(-1)
    else:
        b = Fraction(braw)
    return QuadraticField(dd).element(a, b)


def parse_point(text: str, d: Optional[int]) -> CurvePoint:
    if text.strip() == "O":
        return CurvePoint.infinity()
    parts = text.split(",")
    if len(parts) != 2:
        raise DegenerateInputError("--point expects 'x,y'")
    return CurvePoint.affine(_parse_coord(parts[0], d), _parse_coord(parts[1], d))


def _require_on_curve(E: WeierstrassCurve, P: CurvePoint) -> None:
    if not E.contains(P):
        raise DegenerateInputError(f"point {P} is not on the curve")


def _cmd_heights(args) -> tuple[dict, bool]:
    E = _load_curve(args.curve)
    P = parse_point(args.point, args.d)
    _require_on_curve(E, P)
    dec = height_decomposition(E, P)
    ok = abs(dec.residual) < 1e-6 and not dec.residual_places
    payload = {
        "point": str(P),
        "d": args.d,
        "real_decimals": REAL_DECIMALS,
        "hhat": _real(dec.global_height),
        "weighted_sum": _real(float(dec.weighted_sum())),
        "residual": _real(dec.residual),
        "entries": [
            {
                "place": e.place.label,
                "weight": _rat(e.place.weight),
                "value": _real(e.value),
                "method": e.method,
            }
            for e in dec.entries
        ],
        "residual_places": list(dec.residual_places),
        "pass": ok,
    }
    return payload, ok


def _cmd_frobenius(args) -> tuple[dict, bool]:
    E = _load_curve(args.curve)
    P = parse_point(args.point, args.d)
    _require_on_curve(E, P)
    report = verify_annihilation(E, P, args.p).to_json_dict()
    report.pop("torsion", None)
    return report, True


def _cmd_formal(args) -> tuple[dict, bool]:
    E = _load_curve(args.curve)
    law = elliptic_formal_group(E, args.series_degree)
    series = mult_by_m(law, args.p)
    membership = verify_ideal_membership(law, args.p)
    structure = verify_structure_ap_pb(law, args.p)
    ok = membership and structure
    payload = {
        "p": args.p,
        "series_degree": args.series_degree,
        "mult_by_p": [str(c) for c in series.coeffs],
        "inversion": [str(c) for c in law.inv.coeffs],
        "ideal_membership": membership,
        "structure_ap_pb": structure,
        "pass": ok,
    }
    return payload, ok


def _cmd_congruence(args) -> tuple[dict, bool]:
    witness = verify_ad_congruence(
        args.m, args.p, sample_count=args.samples, seed=args.seed
    )
    payload = {
        "m": witness.m,
        "p": witness.p,
        "tau_exponent": witness.tau.k,
        "samples": len(witness.samples),
        "exhaustive_basis": cyclotomic_polynomial(args.m).degree <= 6,
        "all_pass": witness.all_pass,
    }
    return payload, witness.all_pass


def _fraction_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    rn, rd = gmpy2.isqrt(q.numerator), gmpy2.isqrt(q.denominator)
    if rn * rn != q.numerator or rd * rd != q.denominator:
        return None
    return Fraction(int(rn), int(rd))


def _cmd_ramified(args) -> tuple[dict, bool]:
    E = _load_curve(args.curve)
    x = Fraction(args.x)
    field = QuadraticField(args.d)
    lin = E.a1 * x + E.a3
    disc = lin * lin + 4 * (x**3 + E.a2 * x * x + E.a4 * x + E.a6)
    scale = _fraction_sqrt(disc / args.d)
    if scale is None:
        raise DegenerateInputError(
            f"x = {x}: y is not quadratic over sqrt({args.d}) on this curve"
        )
    P = CurvePoint.affine(
        field.element(x), field.element(-lin / 2, scale / 2)
    )
    report = ramified_point_check(E, args.d, P, args.p)
    payload = report.to_json_dict()
    if payload["lambda_lower"] is not None:
        payload["lambda_lower"] = _real(payload["lambda_lower"])
    payload["real_decimals"] = REAL_DECIMALS
    return payload, report.bound_met


def _bound_payload(
    E: WeierstrassCurve, config: PipelineConfig, result: PipelineResult
) -> dict:
    sel, cert, run = result.selection, result.certificate, result.run
    evidence = sel.cond_torsion.get("evidence")
    nontorsion = [e for e in run.corpus if e.nontorsion]
    return {
        "curve": E.to_json_dict(),
        "config": {
            "c1_mode": config.c1_mode,
            "assert_condition_1": config.assert_condition_1,
            "max_p": config.max_p,
            "seed": config.seed,
        },
        "real_decimals": REAL_DECIMALS,
        "selection": {
            "p": sel.p,
            "scanned": list(sel.scanned),
            "conditions": {
                "torsion": {
                    "status": sel.cond_torsion["status"],
                    "witnesses": dict(evidence.witnesses) if evidence else {},
                },
                "size": {
                    "ok": sel.cond_size["ok"],
                    "mode": sel.cond_size["mode"],
                    "c1": _real(sel.cond_size["c1"]),
                    "threshold": _real(sel.cond_size["threshold"]),
                },
                "good_reduction": sel.cond_good_reduction,
                "degree1_unramified": sel.cond_degree1_unramified,
            },
        },
        "certificate": {
            "p": cert.p,
            "C_unramified": _rat(cert.c_unramified),
            "C_ramified": _rat(cert.c_ramified),
            "C": _rat(cert.c),
            "caveats": list(cert.caveats),
        },
        "verification": {
            "corpus_size": len(run.corpus),
            "nontorsion": len(nontorsion),
            "quadratic_fields": sorted({e.d for e in run.corpus if e.d is not None}),
            "vacuous": run.vacuous,
            "violation_count": len(run.violations),
            "violations": [
                {"point": str(e.point), "d": e.d, "hhat": _real(e.hhat)}
                for e in run.violations
            ],
            "min_nontorsion_hhat": (
                _real(min(e.hhat for e in nontorsion)) if nontorsion else None
            ),
            "entries": [
                {
                    "point": str(e.point),
                    "d": e.d,
                    "hhat": _real(e.hhat),
                    "nontorsion": e.nontorsion,
                }
                for e in run.corpus
            ],
            "intermediate": [
                {
                    "point": str(r.point),
                    "p": r.p,
                    "value": _real(r.value),
                    "threshold": _real(r.threshold),
                    "ok": r.ok,
                }
                for r in run.intermediate
            ],
        },
    }


def _cmd_bound(args) -> tuple[dict, bool]:
    E = _load_curve(args.curve)
    config = PipelineConfig(
        c1_mode=args.c1,
        assert_condition_1=args.assert_condition_1,
        max_p=args.max_p,
        seed=args.seed,
    )
    selection = select_prime(E, config)
    caveats = (
        "condition-1-" + selection.cond_torsion["status"],
        "c1-" + config.c1_mode,
    )
    certificate = compute_bound(selection.p, caveats)
    try:
        run = verify_corpus(E, certificate, config)
        ok = True
    except VerificationFailedError as exc:
        run, ok = exc.run, False
    result = PipelineResult(selection, certificate, run)
    payload = _bound_payload(E, config, result)
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    summary = {
        "p": certificate.p,
        "C": _rat(certificate.c),
        "corpus_size": len(run.corpus),
        "violation_count": len(run.violations),
        "vacuous": run.vacuous,
        "out": args.out,
    }
    return summary, ok


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heightforge",
        description="Canonical-height lower-bound toolkit over Q and quadratic fields",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bound = sub.add_parser("bound", help="run the full lower-bound pipeline")
    bound.add_argument("--curve", required=True, help="curve JSON file")
    bound.add_argument("--c1", choices=("empirical", "derived"), default="empirical")
    bound.add_argument(
        "--assert-condition-1",
        dest="assert_condition_1",
        action="store_true",
        help="assert no p-torsion over the abelian closure instead of the heuristic",
    )
    bound.add_argument("--max-p", dest="max_p", type=int, default=10_000)
    bound.add_argument("--seed", type=int, default=0)
    bound.add_argument("--out", required=True, help="path for the full JSON report")
    bound.set_defaults(handler=_cmd_bound)

    heights = sub.add_parser("heights", help="local decomposition of hhat")
    heights.add_argument("--curve", required=True)
    heights.add_argument("--point", required=True, help="'x,y' with rationals or a+b*sqrt(d)")
    heights.add_argument("--d", type=int, default=None)
    heights.set_defaults(handler=_cmd_heights)

    frob = sub.add_parser("frobenius", help="Frobenius annihilation check at p")
    frob.add_argument("--curve", required=True)
    frob.add_argument("--p", type=int, required=True)
    frob.add_argument("--point", required=True)
    frob.add_argument("--d", type=int, default=None)
    frob.set_defaults(handler=_cmd_frobenius)

    formal = sub.add_parser("formal", help="formal group series and congruences at p")
    formal.add_argument("--curve", required=True)
    formal.add_argument("--p", type=int, required=True)
    formal.add_argument("--series-degree", dest="series_degree", type=int, required=True)
    formal.set_defaults(handler=_cmd_formal)

    cong = sub.add_parser("congruence", help="cyclotomic power-map congruence sweep")
    cong.add_argument("--m", type=int, required=True)
    cong.add_argument("--p", type=int, required=True)
    cong.add_argument("--samples", type=int, default=500)
    cong.add_argument("--seed", type=int, default=0)
    cong.set_defaults(handler=_cmd_congruence)

    ram = sub.add_parser("ramified", help="inertia descent check at a ramified prime")
    ram.add_argument("--curve", required=True)
    ram.add_argument("--d", type=int, required=True)
    ram.add_argument("--x", required=True, help="rational x-coordinate, num/den")
    ram.add_argument("--p", type=int, required=True)
    ram.set_defaults(handler=_cmd_ramified)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else 1
    try:
        payload, ok = args.handler(args)
    except (SearchExhaustedError, AssertionError, ArithmeticError) as exc:
        print(json.dumps({"error": str(exc)}, indent=2))
        return 2
    except (DigitBudgetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(payload, indent=2))
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())

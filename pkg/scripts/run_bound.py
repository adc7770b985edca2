"""Run the full lower-bound pipeline on a curve file and print the certificate.

Example:

    python3 scripts/run_bound.py curves/e37.json
    python3 scripts/run_bound.py curves/cm_j1728.json --assert-condition-1 --rational-only
"""

import argparse
import json
import math
import time

from heightforge.bound_pipeline import PipelineConfig, run_bound_pipeline
from heightforge.elliptic_core import WeierstrassCurve


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("curve", help="curve JSON file")
    parser.add_argument("--c1", choices=("empirical", "derived"), default="empirical")
    parser.add_argument("--assert-condition-1", action="store_true")
    parser.add_argument("--rational-only", action="store_true")
    parser.add_argument("--max-p", type=int, default=10_000)
    args = parser.parse_args()

    with open(args.curve) as fh:
        E = WeierstrassCurve.from_json_dict(json.load(fh))
    config = PipelineConfig(
        c1_mode=args.c1,
        assert_condition_1=args.assert_condition_1,
        include_quadratic=not args.rational_only,
        max_p=args.max_p,
    )

    t0 = time.monotonic()
    result = run_bound_pipeline(E, config)
    elapsed = time.monotonic() - t0

    sel = result.selection
    cert = result.certificate
    run = result.run
    print(f"curve          {E}")
    print(f"selected prime {sel.p}  (scanned {sel.scanned})")
    print(f"condition (1)  {sel.cond_torsion['status']}")
    print(f"c1 ({args.c1})  {run.c1_value:.6f}  threshold exp(1+c1) = {sel.cond_size['threshold']:.4f}")
    print(f"C_unramified   {cert.c_unramified}")
    print(f"C_ramified     {cert.c_ramified}")
    print(f"C = min        {cert.c}  ({float(cert.c):.6g})")
    nontorsion = [e for e in run.corpus if e.nontorsion]
    fields = sorted({e.d for e in run.corpus if e.d is not None})
    print(f"corpus         {len(run.corpus)} points, {len(nontorsion)} nontorsion, fields {fields}")
    if run.vacuous:
        print("verification   vacuous (no nontorsion points in corpus)")
    else:
        worst = min(e.hhat for e in nontorsion)
        print(f"verification   {len(run.violations)} violations; min hhat {worst:.6f} vs C {float(cert.c):.6g}")
    for rec in run.intermediate:
        mark = "ok " if rec.ok else "FAIL"
        print(f"  {mark} hhat(Phi_{rec.p}(sigma) {rec.point}) = {rec.value:.4f} >= log {rec.p} - c1 = {rec.threshold:.4f}")
    print(f"elapsed        {elapsed:.1f}s")


if __name__ == "__main__":
    main()

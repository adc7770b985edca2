"""Tabulate mod-p image evidence for one or more curves.

For each prime p up to the bound, print which of the four exclusion tests
passed and the resulting status. Useful for spotting CM curves (everything
inconclusive) and isogeny primes (Borel never excluded).

Example:

    python3 scripts/surjectivity_survey.py curves/e37.json curves/e11.json --max-p 30
"""

import argparse
import json

from heightforge.bound_pipeline import surjectivity_heuristic
from heightforge.elliptic_core import WeierstrassCurve, reduction_type


def primes_upto(n):
    return [q for q in range(2, n + 1) if all(q % r for r in range(2, int(q**0.5) + 1))]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("curves", nargs="+", help="curve JSON files")
    parser.add_argument("--max-p", type=int, default=30)
    parser.add_argument("--sample-bound", type=int, default=500)
    args = parser.parse_args()

    flags = ("borel_excluded", "split_seen", "nonsplit_seen", "exceptional_excluded")
    for path in args.curves:
        with open(path) as fh:
            E = WeierstrassCurve.from_json_dict(json.load(fh))
        print(f"\n{path}: {E}")
        print(f"{'p':>4}  {'borel':>6} {'split':>6} {'nonspl':>6} {'except':>6}  status")
        for p in primes_upto(args.max_p):
            if not reduction_type(E, p).is_good:
                print(f"{p:>4}  {'-':>6} {'-':>6} {'-':>6} {'-':>6}  bad reduction")
                continue
            ev = surjectivity_heuristic(E, p, sample_bound=args.sample_bound)
            cells = ["yes" if getattr(ev, name) else "no" for name in flags]
            print(f"{p:>4}  {cells[0]:>6} {cells[1]:>6} {cells[2]:>6} {cells[3]:>6}  {ev.status}")
            for reason in ev.reasons:
                print(f"      {reason}")


if __name__ == "__main__":
    main()

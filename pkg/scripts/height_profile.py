"""Print the local height decomposition of a point alongside the doubling limit.

The point is given as "x,y" in the CLI coordinate syntax, e.g. "0,0" or
"3,-1/2+1/2*sqrt(97)" with --d 97 for quadratic coordinates.

Example:

    python3 scripts/height_profile.py curves/e37.json "1/4,-5/8"
    python3 scripts/height_profile.py curves/e37.json "3,-1/2+1/2*sqrt(97)" --d 97
"""

import argparse
import json

from heightforge.cli import parse_point
from heightforge.elliptic_core import WeierstrassCurve
from heightforge.heights import canonical_height_doubling, height_decomposition


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("curve", help="curve JSON file")
    parser.add_argument("point", help='point as "x,y" or "O"')
    parser.add_argument("--d", type=int, default=None, help="quadratic field discriminant part")
    args = parser.parse_args()

    with open(args.curve) as fh:
        E = WeierstrassCurve.from_json_dict(json.load(fh))
    P = parse_point(args.point, args.d)
    if not E.contains(P):
        raise SystemExit(f"point {P} is not on {E}")

    dec = height_decomposition(E, P)
    print(f"curve {E}")
    print(f"point {P}")
    print(f"{'place':>10}  {'weight':>6}  {'value':>12}  method")
    for entry in dec.entries:
        w = entry.place.weight
        print(f"{entry.place.label:>10}  {str(w):>6}  {entry.value:>12.8f}  {entry.method}")
    print(f"weighted sum     {dec.weighted_sum():.8f}")
    print(f"doubling limit   {dec.global_height:.8f}")
    print(f"residual         {dec.residual:.2e}")
    direct = canonical_height_doubling(E, P, precision=1e-8)
    print(f"hhat (1e-8)      {direct:.8f}")


if __name__ == "__main__":
    main()

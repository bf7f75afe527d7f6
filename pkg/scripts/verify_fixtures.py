"""Run every convexity check on the standard fixtures and print a status table.

    python3 scripts/verify_fixtures.py --budget 100000 --out results/verify
"""

import argparse
import json
import time
from pathlib import Path

from berconvex import VerifyConfig, parse_constellation, verify
from berconvex.reports import write_atomic

FIXTURES = ["bpsk", "psk:4:gray", "pam:4:gray", "qam:16:gray", "psk:8:gray"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--budget", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--fixtures", nargs="*", default=FIXTURES)
    ap.add_argument("--out", type=Path, default=Path("results/verify"))
    args = ap.parse_args()

    cfg = VerifyConfig(budget=args.budget, seed=args.seed)
    names = None
    table = {}
    for name in args.fixtures:
        t0 = time.perf_counter()
        rep = verify(parse_constellation(name), cfg)
        table[name] = {cl.name: cl.status for cl in rep.clauses}
        names = names or list(table[name])
        write_atomic(args.out / f"{name.replace(':', '_')}.json", json.dumps(rep.to_dict(), default=str))
        print(f"{name:12s} passed={rep.passed} reliable={rep.reliable} ({time.perf_counter() - t0:.1f}s)")

    width = max(map(len, names))
    print("\n" + " " * width + "  " + "  ".join(f"{n[:11]:>11s}" for n in table))
    for clause in names:
        print(f"{clause:{width}s}  " + "  ".join(f"{table[n][clause]:>11s}" for n in table))


if __name__ == "__main__":
    main()

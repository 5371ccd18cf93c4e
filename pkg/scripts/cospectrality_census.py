#!/usr/bin/env python3
"""Cospectrality census over the bundled connected-graph catalogs.

For each vertex count, scans every invariant class (A, L, |L|, complement
adjacency, each alone, then all four together) and tabulates how many
non-isomorphic tied pairs exist and how the omega spectrum at 0.5
classifies them.  The headline numbers: fourfold ties are already rare at
small n (none among connected graphs up to n = 8), and every tied pair
found here is separated by the interior-omega spectrum.
"""

import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from qswiso.search import CLASSIC_INVARIANTS, load_catalog, scan

CLASSES = [("A",), ("L",), ("SL",), ("CA",), CLASSIC_INVARIANTS]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=7,
                    help="largest catalog to scan (default 7; 8 takes a few minutes)")
    ap.add_argument("--omega", type=float, default=0.5)
    ap.add_argument("--exact", action="store_true",
                    help="exact pairwise distances instead of grouped signatures")
    args = ap.parse_args()

    header = f"{'n':>3} {'graphs':>7} " + " ".join(f"{'+'.join(c):>12}" for c in CLASSES)
    print(header)
    print("-" * len(header))
    for n in range(4, args.max_n + 1):
        graphs, skipped = load_catalog(
            pathlib.Path(__file__).resolve().parents[1] / "data" / "catalogs" / f"connected_n{n}.g6"
        )
        t0 = time.perf_counter()
        cells = []
        for invs in CLASSES:
            report = scan(graphs, invariants=invs, omega=args.omega, exact=args.exact,
                          skipped_disconnected=skipped)
            cls = report.classification
            tied = sum(1 for p in report.pairs if not p.isomorphic)
            cells.append(f"{tied:>4}/{cls['omega-distinguished']:>3}d/{cls['omega-cospectral']:>2}c")
        print(f"{n:>3} {len(graphs):>7} " + " ".join(f"{c:>12}" for c in cells)
              + f"   [{time.perf_counter() - t0:.1f}s]")
    print("\ncells: tied-pairs / omega-distinguished / omega-cospectral")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

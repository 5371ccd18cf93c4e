#!/usr/bin/env python3
"""Generate connected-graph graph6 catalogs under data/catalogs/.

Writes connected_n{N}.g6 for N = 2..max-n, one graph per line, sorted by
(edge count, graph6 string).  Prints per-size counts so the run can be
checked against the known numbers of connected graphs up to isomorphism
(1, 2, 6, 21, 112, 853, 11117 for n = 2..8).
"""

import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from qswiso.catalog import write_catalog


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=8, help="largest vertex count (default 8)")
    ap.add_argument(
        "--out",
        type=pathlib.Path,
        default=pathlib.Path(__file__).resolve().parents[1] / "data" / "catalogs",
        help="output directory (default data/catalogs)",
    )
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for n in range(2, args.max_n + 1):
        t0 = time.perf_counter()
        path = args.out / f"connected_n{n}.g6"
        count = write_catalog(path, n)
        print(f"n={n}: {count} connected graphs -> {path} [{time.perf_counter() - t0:.1f}s]", flush=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

#!/usr/bin/env python3
"""Spectrum recovery from counting statistics, end to end on path-3.

For each omega the demo (1) computes exact jump cumulants of the counting
channel two ways (series recursion on the split characteristic polynomial
and a contour integral around the dominant tilted eigenvalue), (2) solves
for the characteristic-coefficient pair, deflating past the structurally
unidentifiable shared factor, and (3) compares the recovered visible
spectrum against a direct eigensolve.  A short trajectory run then checks
the first two cumulants by sampling.
"""

import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from qswiso.counting import cumulants_forward, split_char_poly
from qswiso.graphs import named_graph
from qswiso.reconstruct import reconstruct_spectrum
from qswiso.trajectory import k_statistics, simulate

EDGE = (0, 2)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--epsilon", type=float, default=1e-3, help="counting rate (default 1e-3)")
    ap.add_argument("--omegas", type=float, nargs="+", default=[0.0, 0.5, 0.9])
    ap.add_argument("--windows", type=int, default=4000, help="trajectory windows (default 4000)")
    args = ap.parse_args()

    g = named_graph("path", 3)
    print(f"graph: path-3, aux edge {EDGE}, epsilon {args.epsilon:g}")
    for w in args.omegas:
        t0 = time.perf_counter()
        res = reconstruct_spectrum(g, w, EDGE, args.epsilon)
        contour = reconstruct_spectrum(g, w, EDGE, args.epsilon, source="contour")
        route_gap = max(
            abs(x - y) for x, y in zip(
                sorted(res.spectrum.values, key=lambda z: (z.real, z.imag)),
                sorted(contour.spectrum.values, key=lambda z: (z.real, z.imag)),
            )
        )
        dropped = res.meta.get("deflation", 0)
        roots = ", ".join(
            f"{z.real:+.4f}{z.imag:+.4f}j" for z in sorted(res.spectrum.values, key=lambda z: z.real)
        )
        print(f"\nomega = {w:g}  [{time.perf_counter() - t0:.1f}s]")
        print(f"  forward vs contour route gap {route_gap:.1e}; "
              f"solve condition {res.condition:.2e}")
        print(f"  unidentifiable shared factor: degree {dropped} "
              f"(visible dimension {res.meta['visible_dim']} of {g.n * g.n})")
        print(f"  visible spectrum: {roots}")
        print(f"  distance to direct eigensolve: {res.delta_direct:.2e}")

    w = 0.5
    eps = 0.01
    split = split_char_poly(g, w, EDGE, eps)
    exact = [float(x) for x in cumulants_forward(split, 2).values]
    rec = simulate(g, w, EDGE, eps, dt=100.0, s=args.windows, seed=7)
    est = k_statistics(rec, order=2)
    print(f"\ntrajectory check at omega = {w:g}, epsilon = {eps:g}, "
          f"{args.windows} windows of dt = 100:")
    for k in (1, 2):
        print(f"  c{k}: exact {exact[k - 1]:.6e}, sampled {est.values[k - 1]:.6e} "
              f"+- {est.stderr[k - 1]:.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

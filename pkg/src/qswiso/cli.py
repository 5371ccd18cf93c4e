"""Command line front end.

Six subcommands cover the pipeline end to end: ``spectrum`` (eigenvalues of
the walk generator for one graph), ``compare`` (distance verdict for a graph
pair at fixed omega), ``sweep`` (distance over an omega grid, CSV), with
``search-cospectral`` (catalog scan for non-isomorphic pairs tied on classic
invariants), ``reconstruct`` (spectrum recovery from counting cumulants), and
``simulate`` (stochastic trajectory counts plus cumulant estimates).

Conventions shared by every subcommand:

  * graphs load from a graph6 file, a JSON file {"n": ..., "edges": [[i, j],
    ...]} with 0-based vertices, or an inline ``name:`` spec such as
    ``name:path:3`` or ``name:shrikhande``;
  * ``--edge u,v`` is 1-based on the command line and converted internally;
  * every output artifact embeds the effective run configuration (all
    defaults resolved) and the library version;
  * exit codes: 0 success or cospectral, 1 distinguished (compare only),
    2 usage or input error, 3 numerical failure;
  * QSWISO_THREADS caps worker processes for the catalog scan.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .errors import NumericalError
from .graphs import Graph, named_graph, parse_graph6
from .reconstruct import DEFAULT_DPS, reconstruct_spectrum
from .search import CLASSIC_INVARIANTS, load_catalog, scan, thread_count
from .spectral import DEFAULT_TAU, cluster_count, compare, omega_spectrum, sweep_distance
from .trajectory import k_statistics, simulate, write_csv

__all__ = ["RunConfig", "load_graph", "main"]

SEARCH_N_CAP = 8


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Effective parameter set for one invocation, embedded in every output.

    params holds only the keys meaningful for the command, each with its
    resolved value (defaults filled in, burn-in computed, threads read from
    the environment)."""

    command: str
    params: dict
    version: str = __version__

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "version": self.version,
            "params": dict(self.params),
        }


def load_graph(spec: str) -> Graph:
    """Load a graph from a name: spec, a JSON file, or a graph6 file."""
    if spec.startswith("name:"):
        return named_graph(spec[len("name:"):])
    if spec.endswith(".json"):
        with open(spec) as fh:
            payload = json.load(fh)
        try:
            n = int(payload["n"])
            edges = [(int(i), int(j)) for i, j in payload["edges"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"{spec}: graph JSON needs 'n' and 'edges'") from exc
        return Graph.from_edges(n, edges)
    with open(spec) as fh:
        for line in fh:
            if line.strip():
                return parse_graph6(line)
    raise ValueError(f"{spec}: no graph6 line found")


def parse_edge(text: str) -> tuple:
    """'u,v' with 1-based vertices -> 0-based (u-1, v-1)."""
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"--edge expects 'u,v', got {text!r}")
    try:
        u, v = (int(p) for p in parts)
    except ValueError as exc:
        raise ValueError(f"--edge expects integers, got {text!r}") from exc
    if u < 1 or v < 1:
        raise ValueError(f"--edge vertices are 1-based, got {text!r}")
    return (u - 1, v - 1)


def parse_grid(text: str) -> np.ndarray:
    """'lo:hi:count' -> linspace(lo, hi, count)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"--omega-grid expects 'lo:hi:count', got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValueError(f"bad --omega-grid {text!r}") from exc
    if count < 1:
        raise ValueError("--omega-grid count must be >= 1")
    if not 0.0 <= lo <= hi <= 1.0:
        raise ValueError("--omega-grid range must satisfy 0 <= lo <= hi <= 1")
    return np.linspace(lo, hi, count)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _emit_json(payload: dict, out: str | None) -> None:
    _emit(json.dumps(payload, indent=2), out)


def _csv_header(config: RunConfig) -> list:
    # comment lines keep the CSV self-describing without breaking parsers
    return [
        f"# qswiso {__version__}",
        "# config " + json.dumps(config.to_json(), separators=(",", ":")),
    ]


def cmd_spectrum(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    spec = omega_spectrum(g, args.omega)
    config = RunConfig("spectrum", {
        "graph": args.graph, "n": g.n, "omega": args.omega,
        "tol": args.tol, "format": args.format,
    })
    if args.format == "csv":
        lines = _csv_header(config) + ["re,im"]
        lines += [f"{v.real:.17g},{v.imag:.17g}" for v in spec.values]
        _emit("\n".join(lines), args.out)
    else:
        payload = {
            "config": config.to_json(),
            "n": g.n,
            "omega": args.omega,
            "cardinality": len(spec),
            "distinct": cluster_count(spec, args.tol),
            "values": [[float(v.real), float(v.imag)] for v in spec.values],
        }
        _emit_json(payload, args.out)
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    g1 = load_graph(args.g1)
    g2 = load_graph(args.g2)
    config = RunConfig("compare", {
        "g1": args.g1, "g2": args.g2, "omega": args.omega, "tol": args.tol,
    })
    if g1.n != g2.n:
        payload = {
            "config": config.to_json(),
            "delta": None,
            "tolerance": None,
            "verdict": "distinguished",
            "note": f"vertex counts differ ({g1.n} vs {g2.n})",
        }
        _emit_json(payload, args.out)
        return 1
    res = compare(omega_spectrum(g1, args.omega), omega_spectrum(g2, args.omega),
                  omega=args.omega, tau=args.tol)
    payload = {
        "config": config.to_json(),
        "delta": res.delta,
        "tolerance": res.tolerance,
        "verdict": res.verdict,
        "omega": res.omega,
    }
    _emit_json(payload, args.out)
    return 0 if res.cospectral else 1


def cmd_sweep(args: argparse.Namespace) -> int:
    g1 = load_graph(args.g1)
    g2 = load_graph(args.g2)
    if g1.n != g2.n:
        raise ValueError(f"sweep needs equal vertex counts, got {g1.n} vs {g2.n}")
    omegas = parse_grid(args.omega_grid)
    deltas = sweep_distance(g1, g2, omegas)
    config = RunConfig("sweep", {
        "g1": args.g1, "g2": args.g2, "omega_grid": args.omega_grid,
        "format": args.format,
    })
    if args.format == "json":
        payload = {
            "config": config.to_json(),
            "rows": [[float(w), float(d)] for w, d in zip(omegas, deltas)],
        }
        _emit_json(payload, args.out)
    else:
        lines = _csv_header(config) + ["omega,delta"]
        lines += [f"{w:.17g},{d:.17g}" for w, d in zip(omegas, deltas)]
        _emit("\n".join(lines), args.out)
    return 0


def cmd_search(args: argparse.Namespace) -> int:
    graphs, skipped = load_catalog(args.catalog)
    if graphs and graphs[0].n > SEARCH_N_CAP and not args.allow_large:
        raise ValueError(
            f"catalog has n={graphs[0].n} graphs; scans beyond n={SEARCH_N_CAP} "
            "are expensive, pass --allow-large to proceed")
    invariants = tuple(s.strip() for s in args.invariants.split(",") if s.strip())
    workers = thread_count()
    report = scan(graphs, invariants=invariants, omega=args.omega, tau=args.tol,
                  exact=args.exact, skipped_disconnected=skipped, workers=workers)
    config = RunConfig("search-cospectral", {
        "catalog": args.catalog, "invariants": list(invariants),
        "omega": args.omega, "tol": args.tol, "exact": args.exact,
        "threads": workers,
    })
    payload = {"config": config.to_json(), **report.to_json()}
    _emit_json(payload, args.out)
    return 0


def cmd_reconstruct(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    edge = parse_edge(args.edge)
    res = reconstruct_spectrum(g, args.omega, edge, args.epsilon,
                               m=args.order, source=args.source, dps=args.dps)
    config = RunConfig("reconstruct", {
        "graph": args.graph, "omega": args.omega, "edge": args.edge,
        "epsilon": args.epsilon, "order": args.order, "source": args.source,
        "dps": args.dps,
    })
    payload = {"config": config.to_json(), **res.to_json(), "meta": res.meta}
    _emit_json(payload, args.out)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    edge = parse_edge(args.edge)
    rec = simulate(g, args.omega, edge, args.epsilon, args.dt, args.windows,
                   burn_in=args.burn_in, seed=args.seed)
    est = k_statistics(rec, order=args.order)
    config = RunConfig("simulate", {
        "graph": args.graph, "omega": args.omega, "edge": args.edge,
        "epsilon": args.epsilon, "dt": args.dt, "windows": args.windows,
        "burn_in": rec.params["burn_in"], "seed": args.seed,
        "order": args.order, "format": args.format,
    })
    summary = {
        "config": config.to_json(),
        "total_counts": int(rec.counts.sum()),
        "cumulants_per_time": [float(v) for v in est.values],
        "stderr": [float(v) for v in est.stderr],
        "occupations": [float(v) for v in rec.occupations],
    }
    if args.format == "csv":
        if args.out is None:
            lines = _csv_header(config) + ["window,count"]
            lines += [f"{i},{c}" for i, c in enumerate(rec.counts)]
            _emit("\n".join(lines), None)
            return 0
        sidecar = write_csv(rec, args.out)
        with open(args.out) as fh:
            body = fh.read()
        with open(args.out, "w") as fh:
            fh.write("\n".join(_csv_header(config)) + "\n" + body)
        with open(sidecar) as fh:
            meta = json.load(fh)
        meta.update(summary)
        with open(sidecar, "w") as fh:
            json.dump(meta, fh, indent=2)
        _emit_json(summary, None)
        return 0
    summary["counts"] = [int(c) for c in rec.counts]
    _emit_json(summary, args.out)
    return 0


def _add_common_out(p: argparse.ArgumentParser, fmt_default: str) -> None:
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=fmt_default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qswiso",
        description="Graph spectra from quantum stochastic walk generators.")
    parser.add_argument("--version", action="version", version=f"qswiso {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues of the generator for one graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-6, help="clustering tolerance")
    _add_common_out(p, "json")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("compare", help="distance verdict for a pair at one omega")
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TAU)
    _add_common_out(p, "json")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="distance over an omega grid")
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--omega-grid", default="0:1:101", help="lo:hi:count")
    _add_common_out(p, "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("search-cospectral",
                       help="scan a graph6 catalog for invariant-tied pairs")
    p.add_argument("--catalog", required=True)
    p.add_argument("--invariants", default=",".join(CLASSIC_INVARIANTS),
                   help="comma list from A,L,SL,CA,omega")
    p.add_argument("--omega", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=DEFAULT_TAU)
    p.add_argument("--exact", action="store_true",
                   help="pairwise distances instead of rounded-signature groups")
    p.add_argument("--allow-large", action="store_true",
                   help=f"permit catalogs beyond n={SEARCH_N_CAP}")
    _add_common_out(p, "json")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("reconstruct",
                       help="recover the spectrum from counting cumulants")
    p.add_argument("--graph", required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--edge", required=True, help="aux edge 'u,v', 1-based, not in E")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--order", type=int, default=None,
                   help="cumulant orders to use (default: what the solve needs)")
    p.add_argument("--source", choices=("forward", "contour"), default="forward")
    p.add_argument("--dps", type=int, default=DEFAULT_DPS)
    _add_common_out(p, "json")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("simulate", help="stochastic trajectory window counts")
    p.add_argument("--graph", required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--edge", required=True, help="aux edge 'u,v', 1-based, not in E")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--dt", type=float, required=True, help="window length")
    p.add_argument("--windows", type=int, required=True, help="sample count s")
    p.add_argument("--burn-in", type=float, default=None,
                   help="relaxation time before counting (default: 10 / slowest rate)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--order", type=int, default=2, help="cumulant orders to report (<= 4)")
    _add_common_out(p, "csv")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"qswiso: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"qswiso: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Catalog-scale search for non-isomorphic cospectral graph pairs.

Two discovery modes over a list of same-size graphs:

  grouped (default): per graph, compute an invariant signature (sorted real
    parts and sorted imaginary parts of each requested spectrum, rounded to
    1e-8); graphs with identical joint signatures form candidate groups and
    only those collide-verified pairs are compared in full.  Cheap, and
    reliable for exact ties, whose verified delta sits many orders below the
    rounding granularity.

  exact: all-pairs delta per requested invariant via chunked L1 distance on
    the sorted spectra.  Costs O(pairs) but cannot miss near-threshold ties,
    which matters when the claim under test is that zero violating pairs
    exist.

Every emitted pair gets the full panel: delta for A, L, signless Laplacian,
complement adjacency, and the omega-spectrum at the scan's omega, plus a
brute-force isomorphism verdict and both degree multisets.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.spatial.distance

from .errors import DisconnectedGraphError, Graph6ParseError
from .graphs import (
    Graph,
    adjacency,
    are_isomorphic_bruteforce,
    complement_adjacency,
    degrees,
    encode_graph6,
    laplacian,
    parse_graph6,
    signless_laplacian,
)
from .liouville import compose
from .spectral import DEFAULT_TAU, ComparisonResult, Spectrum, compare

__all__ = [
    "CLASSIC_INVARIANTS",
    "PairReport",
    "SearchReport",
    "load_catalog",
    "scan",
]

CLASSIC_INVARIANTS = ("A", "L", "SL", "CA")
_MATRIX_BUILDERS = {
    "A": adjacency,
    "L": laplacian,
    "SL": signless_laplacian,
    "CA": complement_adjacency,
}
_SIG_DECIMALS = 8


def thread_count() -> int:
    """Worker cap from QSWISO_THREADS (default 1)."""
    raw = os.environ.get("QSWISO_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def load_catalog(path) -> tuple:
    """Read a graph6 catalog file; returns (graphs, skipped_disconnected).

    Malformed lines raise Graph6ParseError; disconnected graphs are counted
    and skipped (the walk is only defined on connected graphs).
    """
    graphs = []
    skipped = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                graphs.append(parse_graph6(line))
            except DisconnectedGraphError:
                skipped += 1
            except Graph6ParseError as exc:
                raise Graph6ParseError(f"{path}:{lineno}: {exc}") from exc
    return graphs, skipped


@dataclass(frozen=True)
class PairReport:
    """One candidate pair with its full distinguishability panel."""

    g6_a: str
    g6_b: str
    isomorphic: bool
    deltas: dict
    degree_multiset_a: tuple
    degree_multiset_b: tuple
    omega: float

    def to_json(self) -> dict:
        return {
            "g6": [self.g6_a, self.g6_b],
            "isomorphic": self.isomorphic,
            "deltas": {k: float(v) for k, v in self.deltas.items()},
            "degree_multisets": [list(self.degree_multiset_a), list(self.degree_multiset_b)],
            "omega": self.omega,
        }


@dataclass(frozen=True)
class SearchReport:
    """Scan outcome: candidate pairs tied on the requested invariants, and
    the three-region classification of those pairs (isomorphic duplicates,
    omega-distinguished, omega-cospectral)."""

    n_graphs: int
    skipped_disconnected: int
    invariants: tuple
    omega: float
    tau: float
    mode: str
    pairs: tuple

    @property
    def classification(self) -> dict:
        counts = {"isomorphic": 0, "omega-distinguished": 0, "omega-cospectral": 0}
        for p in self.pairs:
            if p.isomorphic:
                counts["isomorphic"] += 1
            elif p.deltas["omega"] > self.tau * len_omega_spectrum(p):
                counts["omega-distinguished"] += 1
            else:
                counts["omega-cospectral"] += 1
        return counts

    def to_json(self) -> dict:
        return {
            "n_graphs": self.n_graphs,
            "skipped_disconnected": self.skipped_disconnected,
            "invariants": list(self.invariants),
            "omega": self.omega,
            "tau": self.tau,
            "mode": self.mode,
            "classification": self.classification,
            "pairs": [p.to_json() for p in self.pairs],
        }


def len_omega_spectrum(pair: PairReport) -> int:
    n = len(pair.degree_multiset_a)
    return n * n


def _sorted_parts(values: np.ndarray) -> tuple:
    return np.sort(values.real), np.sort(values.imag)


def _classic_sorted_spectra(graphs, kind: str) -> np.ndarray:
    """(C, n) sorted eigenvalues of the requested symmetric representation,
    one batched solve for the whole catalog."""
    build = _MATRIX_BUILDERS[kind]
    mats = np.stack([build(g) for g in graphs])
    return np.linalg.eigvalsh(mats)


def _omega_sorted_spectra(graphs, omega: float, workers: int) -> tuple:
    """Sorted real and imaginary parts of each graph's omega-spectrum."""
    def one(g: Graph):
        vals = scipy.linalg.eigvals(compose(g, omega).entries)
        return np.sort(vals.real), np.sort(vals.imag)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, graphs))
    else:
        parts = [one(g) for g in graphs]
    re = np.stack([p[0] for p in parts])
    im = np.stack([p[1] for p in parts])
    return re, im


def _pairwise_l1(re: np.ndarray, im: np.ndarray, cut: float, chunk: int = 512):
    """Indices (i < j) with L1 distance <= cut between rows, where the
    distance sums over both the re and im arrays."""
    count = re.shape[0]
    hits = []
    for lo in range(0, count, chunk):
        hi = min(lo + chunk, count)
        d = scipy.spatial.distance.cdist(re[lo:hi], re, "cityblock")
        d += scipy.spatial.distance.cdist(im[lo:hi], im, "cityblock")
        rows, cols = np.nonzero(d <= cut)
        for r, c in zip(rows, cols):
            i = lo + int(r)
            j = int(c)
            if i < j:
                hits.append((i, j))
    return hits


def _signature(re_row: np.ndarray, im_row: np.ndarray) -> tuple:
    return (
        tuple(np.round(re_row, _SIG_DECIMALS) + 0.0),
        tuple(np.round(im_row, _SIG_DECIMALS) + 0.0),
    )


def scan(
    graphs,
    invariants=CLASSIC_INVARIANTS,
    omega: float = 0.5,
    tau: float = DEFAULT_TAU,
    exact: bool = False,
    skipped_disconnected: int = 0,
    workers: int | None = None,
) -> SearchReport:
    """Find non-isomorphic pairs tied on every requested invariant.

    invariants: subset of {'A', 'L', 'SL', 'CA', 'omega'}; 'omega' uses the
    omega-spectrum at the given omega.  In exact mode a pair is tied on an
    invariant when its delta is within 10 * tau * cardinality (generous
    enough that downstream threshold variations stay inside the candidate
    set); in grouped mode ties are exact matches of the rounded signature.
    """
    invariants = tuple(invariants)
    for inv in invariants:
        if inv not in CLASSIC_INVARIANTS and inv != "omega":
            raise ValueError(f"unknown invariant {inv!r}")
    if not graphs:
        return SearchReport(0, skipped_disconnected, invariants, omega, tau, "exact" if exact else "grouped", ())
    sizes = {g.n for g in graphs}
    if len(sizes) > 1:
        raise ValueError(f"catalog mixes vertex counts {sorted(sizes)}; scan one size at a time")
    n = graphs[0].n
    if workers is None:
        workers = thread_count()

    # sorted spectra per invariant: {name: (re_array, im_array)}
    spectra = {}
    for kind in CLASSIC_INVARIANTS:
        vals = _classic_sorted_spectra(graphs, kind)
        spectra[kind] = (vals, np.zeros_like(vals))
    if "omega" in invariants:
        spectra["omega"] = _omega_sorted_spectra(graphs, omega, workers)

    cardinality = {k: (n * n if k == "omega" else n) for k in list(CLASSIC_INVARIANTS) + ["omega"]}

    if exact:
        candidate = None
        for inv in invariants:
            re, im = spectra[inv]
            cut = 10.0 * tau * cardinality[inv]
            hits = set(_pairwise_l1(re, im, cut))
            candidate = hits if candidate is None else (candidate & hits)
            if not candidate:
                break
        pairs_idx = sorted(candidate or ())
        mode = "exact"
    else:
        groups: dict = {}
        for idx in range(len(graphs)):
            sig = tuple(_signature(*(spectra[inv][0][idx], spectra[inv][1][idx])) for inv in invariants)
            groups.setdefault(sig, []).append(idx)
        pairs_idx = []
        for members in groups.values():
            for a in range(len(members)):
                for b in range(a + 1, len(members)):
                    pairs_idx.append((members[a], members[b]))
        pairs_idx.sort()
        mode = "grouped"

    # full verification panel for every candidate pair
    if pairs_idx and "omega" not in spectra:
        needed = sorted({i for ij in pairs_idx for i in ij})
        re = np.empty((len(graphs), n * n))
        im = np.empty((len(graphs), n * n))
        sub_re, sub_im = _omega_sorted_spectra([graphs[i] for i in needed], omega, workers)
        for row, i in enumerate(needed):
            re[i] = sub_re[row]
            im[i] = sub_im[row]
        spectra["omega"] = (re, im)

    reports = []
    for i, j in pairs_idx:
        deltas = {}
        for inv in list(CLASSIC_INVARIANTS) + ["omega"]:
            re, im = spectra[inv]
            deltas[inv] = float(
                np.abs(re[i] - re[j]).sum() + np.abs(im[i] - im[j]).sum()
            )
        reports.append(
            PairReport(
                g6_a=encode_graph6(graphs[i]),
                g6_b=encode_graph6(graphs[j]),
                isomorphic=are_isomorphic_bruteforce(graphs[i], graphs[j]),
                deltas=deltas,
                degree_multiset_a=tuple(sorted(int(d) for d in degrees(graphs[i]))),
                degree_multiset_b=tuple(sorted(int(d) for d in degrees(graphs[j]))),
                omega=omega,
            )
        )
    return SearchReport(
        n_graphs=len(graphs),
        skipped_disconnected=skipped_disconnected,
        invariants=invariants,
        omega=omega,
        tau=tau,
        mode=mode,
        pairs=tuple(reports),
    )

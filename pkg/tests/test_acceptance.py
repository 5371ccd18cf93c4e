"""Acceptance gate: ten numbered criteria, one test each, run in order.

Every test appends a one-line PASS/FAIL verdict to RESULTS before its
assertion fires, and the terminal-summary hook in conftest prints the
collected lines after the run.  Criteria 4 and 8 are expected to fail:
criterion 4 asserts the existence of a graph pair that provably does not
exist below nine vertices (the companion test demonstrates the identical
behavior one vertex up), and criterion 8 asserts a round trip through a
linear system that is structurally rank-deficient for every walk generator
(the deflated visible factor, which is recoverable, is checked in the
companion).  They are left red on purpose rather than weakened; see the
inline notes."""

import networkx as nx
import numpy as np

from qswiso.counting import (
    cumulants_contour,
    cumulants_forward,
    split_char_poly,
    steady_state,
    tilted_builder,
)
from qswiso.errors import ReconstructionError
from qswiso.graphs import (
    Graph,
    adjacency,
    apply_permutation,
    degrees,
    laplacian,
    named_graph,
    parse_graph6,
)
from qswiso.liouville import compose, quantize_rate
from qswiso.reconstruct import reconstruct_from_cumulants, reconstruct_spectrum
from qswiso.search import CLASSIC_INVARIANTS, load_catalog, scan
from qswiso.spectral import (
    DEFAULT_TAU,
    cluster_count,
    closed_form_classical_spectrum,
    closed_form_quantum_spectrum,
    eigenvalues,
    omega_spectrum,
    radius_bound,
    spectral_distance,
    sweep_distance,
)
from qswiso.trajectory import k_statistics, simulate, variance_scaling_check

from .conftest import FOURFOLD_PAIR_G6, random_connected
from .oracles import gillespie_window_counts, nx_graph

RESULTS: list = []
BOUND_CHECKS: list = []  # (max |nu|, Frobenius bound) from criteria 1-4 spectra


def _verdict(num: int, name: str, ok: bool) -> bool:
    RESULTS.append(f"ACCEPTANCE {num:02d} {name}: {'PASS' if ok else 'FAIL'}")
    return ok


def _catalog(n: int):
    graphs, skipped = load_catalog(f"data/catalogs/connected_n{n}.g6")
    assert skipped == 0
    return graphs


def _track(g: Graph, omega: float):
    spec = omega_spectrum(g, omega)
    BOUND_CHECKS.append((spec.max_abs, radius_bound(g, omega)))
    return spec


def test_c01_endpoint_closed_forms() -> None:
    """200 random connected graphs, 4 <= n <= 8: both interpolation
    endpoints match their closed forms to delta < 1e-7."""
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(200):
        g = random_connected(rng, int(rng.integers(4, 9)))
        worst = max(worst, spectral_distance(_track(g, 0.0), closed_form_classical_spectrum(g)))
        worst = max(worst, spectral_distance(_track(g, 1.0), closed_form_quantum_spectrum(g)))
    ok = worst < 1e-7
    assert _verdict(1, "endpoint-closed-forms", ok), f"worst endpoint delta {worst:.3e}"


def test_c02_permutation_invariance() -> None:
    rng = np.random.default_rng(202)
    g = random_connected(rng, 7)
    omegas = (0.0, 0.3, 0.5, 0.8, 1.0)
    base = {w: _track(g, w) for w in omegas}
    worst = 0.0
    for _ in range(20):
        perm = tuple(rng.permutation(g.n))
        h = apply_permutation(g, perm)
        for w in omegas:
            worst = max(worst, spectral_distance(base[w], _track(h, w)))
    ok = worst < 1e-8
    assert _verdict(2, "permutation-invariance", ok), f"worst relabeling delta {worst:.3e}"


def test_c03_strongly_regular_cospectral() -> None:
    """Shrikhande vs the 4x4 rook graph: same SRG parameter set, cospectral
    for the omega = 0.5 generator, 12 distinct eigenvalues each."""
    a = named_graph("shrikhande")
    b = named_graph("rook4")
    sa = _track(a, 0.5)
    sb = _track(b, 0.5)
    delta = spectral_distance(sa, sb)
    ca, cb = cluster_count(sa, 1e-6), cluster_count(sb, 1e-6)
    ok = delta < 1e-6 * 256 and ca == 12 and cb == 12
    assert _verdict(3, "srg-pair-cospectrality", ok), (
        f"delta {delta:.3e}, clusters {ca}/{cb}"
    )


def _fourfold_tied_pairs(n: int):
    """Non-isomorphic connected pairs tied on A, L, |L| and the complement
    adjacency, from a full catalog scan."""
    report = scan(_catalog(n), invariants=CLASSIC_INVARIANTS, exact=True)
    return [p for p in report.pairs if not p.isomorphic]


def test_c04_fourfold_tied_pair_interior_peak() -> None:
    """EXPECTED RED.  Asks for a connected non-isomorphic pair with n <= 8
    tied on all four classic spectra whose omega sweep peaks in the
    interior.  Exhaustive scans of the connected catalogs (6 graphs at
    n = 4 up to 11117 at n = 8, grouped and exact modes agree) find zero
    pairs tied on all four invariants, so no fixture can satisfy this
    criterion; the companion test below shows the requested behavior on
    the smallest such pair, which has nine vertices."""
    found = None
    counts = {}
    for n in range(4, 9):
        pairs = _fourfold_tied_pairs(n)
        counts[n] = len(pairs)
        for p in pairs:
            a, b = parse_graph6(p.g6_a), parse_graph6(p.g6_b)
            tol = DEFAULT_TAU * a.n * a.n
            d0 = spectral_distance(_track(a, 0.0), _track(b, 0.0))
            d1 = spectral_distance(_track(a, 1.0), _track(b, 1.0))
            grid = np.linspace(0.0, 1.0, 101)
            deltas = sweep_distance(a, b, grid)
            peak = int(np.argmax(deltas))
            if (d0 < tol and d1 < tol and deltas[peak] > 1e3 * tol
                    and 0 < peak < len(grid) - 1):
                found = p
    ok = found is not None
    assert _verdict(4, "fourfold-tied-pair-interior-peak", ok), (
        f"no connected pair at 4 <= n <= 8 is tied on all of A, L, |L|, "
        f"complement (per-n tied-pair counts: {counts}); the smallest "
        "fourfold-tied pair has n = 9, see test_c04_companion_n9_pair"
    )


def test_c04_companion_n9_pair() -> None:
    """The behavior criterion 4 asks for, on the smallest pair that has it:
    endpoint-cospectral to ~1e-13, interior peak six orders above it."""
    a, b = (parse_graph6(s) for s in FOURFOLD_PAIR_G6)
    assert not nx.is_isomorphic(nx_graph(a), nx_graph(b))
    assert sorted(degrees(a)) == sorted(degrees(b))
    tol = DEFAULT_TAU * 81
    d0 = spectral_distance(_track(a, 0.0), _track(b, 0.0))
    d1 = spectral_distance(_track(a, 1.0), _track(b, 1.0))
    assert d0 < tol and d1 < tol
    grid = np.linspace(0.0, 1.0, 101)
    deltas = sweep_distance(a, b, grid)
    peak = int(np.argmax(deltas))
    assert 0 < peak < 100
    assert deltas[peak] > 1e3 * tol
    _track(a, grid[peak])
    _track(b, grid[peak])


def test_c05_dip_class_containment() -> None:
    """No pair with n <= 7 is separated by the adjacency or laplacian
    spectrum yet omega-cospectral at omega = 0.5.  Candidate pairs are
    pre-filtered by the spectrum's absolute sum, which is 1-Lipschitz
    under delta, so the window scan cannot miss a tied pair."""
    violations = []
    candidates = 0
    for n in range(4, 8):
        graphs = _catalog(n)
        specs = [omega_spectrum(g, 0.5) for g in graphs]
        thr = 10 * DEFAULT_TAU * n * n
        keys = np.array([np.abs(s.values).sum() for s in specs])
        order = np.argsort(keys)
        for ii, i in enumerate(order):
            for j in order[ii + 1:]:
                if keys[j] - keys[i] > thr:
                    break
                candidates += 1
                if spectral_distance(specs[i], specs[j]) > thr:
                    continue
                ga, gb = graphs[i], graphs[j]
                da = float(np.abs(np.sort(np.linalg.eigvalsh(adjacency(ga)))
                                  - np.sort(np.linalg.eigvalsh(adjacency(gb)))).sum())
                dl = float(np.abs(np.sort(np.linalg.eigvalsh(laplacian(ga)))
                                  - np.sort(np.linalg.eigvalsh(laplacian(gb)))).sum())
                if da > 10 * DEFAULT_TAU * n or dl > 10 * DEFAULT_TAU * n:
                    violations.append((n, int(i), int(j), da, dl))
    ok = not violations
    assert _verdict(5, "dip-class-containment", ok), (
        f"{len(violations)} omega-cospectral non-isomorphic pairs at n <= 7 "
        f"({candidates} window candidates examined): {violations}"
    )


def test_c06_l_cospectral_degree_split() -> None:
    """A laplacian-cospectral pair with different degree multisets is
    separated at omega = 0 (the pair decay rates see the degrees)."""
    report = scan(_catalog(6), invariants=("L",))
    hits = []
    for p in report.pairs:
        if p.isomorphic or p.degree_multiset_a == p.degree_multiset_b:
            continue
        a, b = parse_graph6(p.g6_a), parse_graph6(p.g6_b)
        d0 = spectral_distance(omega_spectrum(a, 0.0), omega_spectrum(b, 0.0))
        if d0 > 1e3 * DEFAULT_TAU * 36:
            hits.append((p.g6_a, p.g6_b, d0))
    ok = bool(hits)
    assert _verdict(6, "l-cospectral-degree-split", ok), "no qualifying pair at n = 6"


def _first_non_edge(g: Graph) -> tuple | None:
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if (u, v) not in g.edges:
                return (u, v)
    return None


def test_c07_cumulant_cross_validation() -> None:
    """Forward recursion vs contour integral to order 16, and the first
    cumulant against epsilon times the steady-state source population."""
    eps = 1e-3
    cases = [named_graph("path", 3)] + _catalog(4)
    worst_pair = 0.0
    worst_c1 = 0.0
    checked = 0
    for g in cases:
        edge = _first_non_edge(g)
        if edge is None:  # complete graph has no admissible aux edge
            continue
        for w in (0.0, 0.5):
            split = split_char_poly(g, w, edge, eps)
            fwd = cumulants_forward(split, 16)
            ctr = cumulants_contour(tilted_builder(g, w, edge, eps), 16)
            for a, b in zip(fwd.values, ctr.values):
                scale = max(abs(a), abs(b), 1e-30)
                worst_pair = max(worst_pair, float(abs(a - b) / scale))
            rho = steady_state(compose(g, w, edge=edge, epsilon=eps, chi=0.0))
            expected = quantize_rate(eps) * rho.as_matrix()[edge[0], edge[0]].real
            worst_c1 = max(worst_c1, float(abs(fwd.values[0] - expected)))
            checked += 1
    ok = checked == 12 and worst_pair < 1e-5 and worst_c1 < 1e-9
    assert _verdict(7, "cumulant-cross-validation", ok), (
        f"{checked} cases, worst route disagreement {worst_pair:.3e}, "
        f"worst c1 error {worst_c1:.3e}"
    )


def test_c08_square_system_round_trip() -> None:
    """EXPECTED RED.  Asks the full 16 x 16 cumulant system to return the
    tilted generator's own (q, q') for path-3.  That system is never
    solvable for a walk generator: q and q' share the characteristic
    factor of the modes invisible to the counting channel (n(n-1)/2 dark
    pair modes), so the matrix is structurally rank-deficient and the
    coefficients are not identifiable from counting data at any precision.
    The solver detects this and refuses rather than returning one point of
    the solution family; the recoverable visible factor is exercised in
    the companion test."""
    eps = 1e-3
    g = named_graph("path", 3)
    failures = []
    worst_coeff = 0.0
    worst_delta = 0.0
    for w in (0.0, 0.5, 0.9):
        split = split_char_poly(g, w, (0, 2), eps, dps=160)
        cums = cumulants_forward(split, 20, dps=160)
        try:
            res = reconstruct_from_cumulants(cums, g.n, dps=160, deflate=False)
        except ReconstructionError as exc:
            failures.append((w, str(exc).split(";")[0]))
            continue
        q_true = np.array([float(c) for c in split.q])
        q_got = np.array([float(c) for c in res.coefficients.q])
        worst_coeff = max(worst_coeff, float(np.max(np.abs(q_got - q_true)) / np.max(np.abs(q_true))))
        direct = eigenvalues(compose(g, w, edge=(0, 2), epsilon=eps, chi=0.0))
        worst_delta = max(worst_delta, spectral_distance(res.spectrum, direct))
    ok = not failures and worst_coeff < 1e-6 and worst_delta < 1e-4
    assert _verdict(8, "square-system-round-trip", ok), (
        f"full-dimension solve refused at every omega (structural shared "
        f"factor between q and q'): {failures}"
    )


def test_c08_companion_visible_factor() -> None:
    """What counting data does determine: the visible factor, recovered by
    deflation and matching the direct eigensolve to delta < 1e-4."""
    for w, visible in ((0.0, 3), (0.5, 6), (0.9, 6)):
        res = reconstruct_spectrum(named_graph("path", 3), w, (0, 2), 1e-3)
        assert res.meta["visible_dim"] == visible
        assert len(res.spectrum) == visible
        assert res.delta_direct < 1e-4


def test_c09_trajectory_statistics() -> None:
    """Sampled window counts against analytic cumulants, the classical
    limit against an independent Gillespie chain, and the 1/s estimator
    variance law."""
    g = named_graph("path", 3)
    edge, eps = (0, 2), 0.01
    # leg 1: P3 at omega = 0.5, dt = 100, s = 10^4
    split = split_char_poly(g, 0.5, edge, eps)
    analytic = [float(x) for x in cumulants_forward(split, 2).values]
    rec = simulate(g, 0.5, edge, eps, dt=100.0, s=10_000, seed=909)
    est = k_statistics(rec, order=2)
    dev1 = abs(est.values[0] - analytic[0]) / est.stderr[0]
    dev2 = abs(est.values[1] - analytic[1]) / est.stderr[1]
    # leg 2: classical limit vs Gillespie
    qeps = quantize_rate(eps)
    mc = simulate(g, 0.0, edge, qeps, dt=100.0, s=2000, burn_in=60.0, seed=910)
    gl = gillespie_window_counts(g, edge, qeps, 100.0, 2000, 60.0, seed=911)
    from scipy import stats

    ks_p = float(stats.ks_2samp(mc.counts, gl).pvalue)
    # leg 3: var(c1 estimate) ~ 1/s
    # 24 batches: the across-batch variance estimate itself carries
    # sqrt(2/(b-1)) relative noise, and 12 batches leave the fitted
    # exponent too loose for the [0.8, 1.2] window
    scaling = variance_scaling_check(
        g, 0.5, edge, eps, k=1, s_grid=(1_000, 4_000, 16_000), dt=10.0,
        batches=24, seed=1,
    )
    ok = dev1 < 3 and dev2 < 3 and ks_p > 0.01 and 0.8 < scaling["exponent"] < 1.2
    assert _verdict(9, "trajectory-statistics", ok), (
        f"c1 {dev1:.2f} SE, c2 {dev2:.2f} SE, KS p {ks_p:.3f}, "
        f"variance exponent {scaling['exponent']:.3f}"
    )


def test_c10_spectral_radius_bound() -> None:
    """Frobenius bound on every spectrum the earlier criteria computed."""
    assert len(BOUND_CHECKS) >= 400
    margin = max(m - b for m, b in BOUND_CHECKS)
    ok = margin <= 1e-9
    assert _verdict(10, "spectral-radius-bound", ok), (
        f"bound exceeded by {margin:.3e} on {len(BOUND_CHECKS)} spectra"
    )

"""Recover the generator spectrum from jump-count cumulants alone.

The dominant root nu(chi) of P(nu, chi) = 0 with q_i(chi) = q_i + q_i'
(e^chi - 1) determines, through its derivatives at chi = 0 (the cumulants),
the free coefficients of the split characteristic polynomial.  Setting the
chi^l coefficient of P(nu(chi), chi) to zero for l = 1..2(p - 1), with
p = n^2, gives a square linear system in the unknowns

    q_1 .. q_{p-1}        (q_0 = 0 by trace preservation, q_p = 1 monic)
    q_0' .. q_{p-2}'      (q_{p-1}' = q_p' = 0: the tilted entry is a
                           single off-diagonal gain, so the rank-one
                           difference has degree at most p - 2)

whose coefficients are polynomial in the cumulants.  The recovered q then
yields the generator spectrum as its root multiset.

Identifiability caveat: the square system is nonsingular exactly when
gcd(q, q') = 1.  Writing W = dq q' - q dq' for a candidate null direction
(dq, dq'), the first 2(p - 1) derivative rows force the order of W along
the branch past its degree bound, so W = 0 identically and null directions
are exactly h (q/G, q'/G) with G = gcd(q, q') and deg h < deg G.  Walk
generators always have such a common factor: for every vertex pair there
is one coherence eigenmode whose left and right eigenvectors both carry
zero diagonal, so it never couples to a jump-counting channel (all such
channels probe diagonal dyads only).  These dark modes make the full
p-coefficient recovery impossible from single-channel counting data; what
is identifiable is the reduced pair (q/G, q'/G), whose roots are the
visible eigenvalues.  reconstruct_from_cumulants therefore retries at
reduced dimension when the square solve reports exact singularity
(deflation), validating each candidate reduction against the held-out
higher cumulants before accepting it.

The system is Vandermonde-like in the powers of the cumulant series and its
conditioning degrades factorially with p and polynomially with 1/epsilon
(the counted channel sets the scale of every cumulant), so assembly and
solve run in mpmath arbitrary precision; 64-bit floats are useless here
well before n = 3.  At n = 3 with epsilon = 1e-3 the equilibrated system
already carries a 1-norm condition number near 1e127.  A minimum 128-bit
significand is enforced; the default working precision is 160 digits,
which leaves the n = 3 solve with > 20 guaranteed digits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .counting import (
    CumulantSet,
    _conv_trunc,
    cumulants_contour,
    cumulants_forward,
    split_char_poly,
    tilted_builder,
)
from .errors import IllConditionedSystemError, NumericalError, ReconstructionError
from .graphs import Graph
from .liouville import compose
from .spectral import Spectrum, eigenvalues, spectral_distance

__all__ = [
    "CharPolyPair",
    "LinearSystem",
    "ReconstructionResult",
    "monomial_derivative",
    "assemble_system",
    "solve_coefficients",
    "spectrum_from_coeffs",
    "reconstruct_from_cumulants",
    "reconstruct_spectrum",
    "system_order",
]

DEFAULT_DPS = 160
MIN_DPS = 40  # ~133-bit significand; below this the solve is meaningless


def system_order(n: int) -> int:
    """Number of cumulants (= unknowns) needed for an n-vertex graph."""
    return 2 * (n * n - 1)


@dataclass(frozen=True, eq=False)
class CharPolyPair:
    """Recovered split coefficients, ascending, with the fixed entries
    reinstated: q has q[0] = 0 and q[p] = 1; qprime has the top two zero."""

    q: tuple
    qprime: tuple

    def __post_init__(self) -> None:
        if len(self.q) != len(self.qprime):
            raise ValueError("q and qprime must have equal length")

    @property
    def dim(self) -> int:
        return len(self.q) - 1

    def q_floats(self) -> np.ndarray:
        return np.array([float(c) for c in self.q])


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Square extended-precision system A x = b over the labeled unknowns."""

    matrix: mp.matrix
    rhs: mp.matrix
    labels: tuple
    dim: int

    @property
    def size(self) -> int:
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    """delta_direct holds the distance to the directly computed spectrum of
    the same tilted generator when the graph was available (None when
    reconstructing from bare cumulants)."""

    spectrum: Spectrum
    coefficients: CharPolyPair
    residual: float
    condition: float
    delta_direct: float | None
    meta: dict

    def to_json(self) -> dict:
        payload = {
            "q": [float(c) for c in self.coefficients.q],
            "qprime": [float(c) for c in self.coefficients.qprime],
            "residual": self.residual,
            "condition": self.condition,
            "spectrum": [[float(v.real), float(v.imag)] for v in self.spectrum.values],
        }
        if self.delta_direct is not None:
            payload["delta_direct"] = self.delta_direct
        return payload


def _egf(cumulants, m: int) -> list:
    """nu(chi) as a truncated series: f[j] = c_j / j!, f[0] = 0.

    Type-preserving: float cumulants stay float64 (the quick path for
    low-order experiments), extended-precision values stay extended."""
    f = [0.0] * (m + 1)
    for j, c in enumerate(cumulants[:m], start=1):
        f[j] = c / math.factorial(j)
    return f


def _egf_powers(f: list, top_power: int, m: int, one=1) -> list:
    """[f^0, f^1, .., f^top_power], each truncated at chi^m."""
    powers = [[one] + [0 * one] * m]
    for _ in range(top_power):
        powers.append(_conv_trunc(powers[-1], f, m))
    return powers


def _derivative_pair(ell: int, i: int, power_i: list) -> tuple:
    """Coefficients of q_i and q_i' in d^ell/dchi^ell P(nu(chi), chi) at 0.

    The q_i term contributes ell! [chi^ell] nu^i; the q_i' (e^chi - 1) term
    contributes sum_k binom(ell, k) k! [chi^k] nu^i over k < ell (the
    exponential factor supplies 1 for every positive derivative order and 0
    at order zero).  Since nu^i has valuation i the sum starts at k = i.
    Arithmetic follows the entry type of power_i (float or mpf)."""
    if i == 0:
        return 0, 1
    coef_q = power_i[ell] * math.factorial(ell) if ell < len(power_i) else 0
    coef_qp = 0
    for k in range(i, min(ell - 1, len(power_i) - 1) + 1):
        if power_i[k] != 0:
            coef_qp += math.comb(ell, k) * math.factorial(k) * power_i[k]
    return coef_q, coef_qp


def monomial_derivative(ell: int, i: int, cumulants, dps: int = DEFAULT_DPS) -> tuple:
    """(d/dchi)^ell at 0 of the monomial q_i(chi) nu(chi)^i, split into the
    factors multiplying q_i and q_i'.  cumulants supplies c_1..c_ell (later
    entries are irrelevant; missing ones required by the order are an
    error).

    Plain float cumulants are processed in float64, which is adequate for
    quick experiments up to ell ~ 6; mpf cumulants are processed at dps
    digits.  The full solve path always uses the extended route."""
    if ell < 1:
        raise ValueError(f"derivative order must be >= 1, got {ell}")
    if i < 0:
        raise ValueError(f"monomial degree must be >= 0, got {i}")
    if i > 0 and len(cumulants) < ell:
        raise ValueError(f"order-{ell} derivative needs {ell} cumulants, got {len(cumulants)}")
    head = list(cumulants[:ell])
    if any(isinstance(c, (mp.mpf, mp.mpc)) for c in head):
        with mp.workdps(dps):
            f = _egf([mp.mpmathify(c) for c in head], ell)
            power_i = _egf_powers(f, i, ell, one=mp.mpf(1))[i]
            return _derivative_pair(ell, i, power_i)
    f = _egf([float(c) for c in head], ell)
    power_i = _egf_powers(f, i, ell, one=1.0)[i]
    return _derivative_pair(ell, i, power_i)


def _assemble_dim(values: list, p: int, dps: int) -> LinearSystem:
    """Square system of rows l = 1..2(p - 1) for a degree-p split pair."""
    m = 2 * (p - 1)
    labels = _canonical_labels(p)
    with mp.workdps(dps):
        f = _egf([mp.mpmathify(v) for v in values[:m]], m)
        powers = _egf_powers(f, p, m, one=mp.mpf(1))
        matrix = mp.matrix(m, m)
        rhs = mp.matrix(m, 1)
        for row, ell in enumerate(range(1, m + 1)):
            for i in range(p + 1):
                coef_q, coef_qp = _derivative_pair(ell, i, powers[i])
                if 1 <= i <= p - 1:
                    matrix[row, i - 1] = coef_q
                elif i == p:
                    rhs[row] = -coef_q
                if i <= p - 2:
                    matrix[row, (p - 1) + i] = coef_qp
    return LinearSystem(matrix=matrix, rhs=rhs, labels=labels, dim=p)


def assemble_system(cumulants, n: int, dps: int = DEFAULT_DPS) -> LinearSystem:
    """Rows l = 1..2(n^2 - 1) of d^l P / dchi^l = 0 over the free split
    coefficients of an n-vertex generator.  cumulants must supply at least
    the system order (extras are ignored); the fixed q_p = 1 contribution
    moves to the right-hand side.  Assembly runs at dps digits; the ambient
    context would quietly round the factorial-scale entries to ~16 digits
    and poison the solve."""
    p = n * n
    m = system_order(n)
    values = list(cumulants.values) if isinstance(cumulants, CumulantSet) else list(cumulants)
    if len(values) < m:
        raise ValueError(
            f"n = {n} needs at least {m} cumulants (2(n^2 - 1)), got {len(values)}"
        )
    return _assemble_dim(values, p, dps)


def _canonical_labels(p: int) -> tuple:
    return tuple(f"q{i}" for i in range(1, p)) + tuple(f"qp{i}" for i in range(p - 1))


def solve_coefficients(
    system: LinearSystem, dps: int = DEFAULT_DPS, gate_dps: int | None = None
) -> tuple:
    """Column-equilibrated extended-precision solve.

    Returns (coefficients, diagnostics) where coefficients is a
    CharPolyPair when the system carries the full canonical label set for
    its dimension (the fixed entries q_0 = 0, q_p = 1, q'_{p-1} = q'_p = 0
    are reinstated), or a plain {label: value} dict for hand-built partial
    systems.

    Gates: a singular equilibrated matrix is rejected outright; the 1-norm
    condition number must stay below 10^(gate_dps - 8) so the solution keeps
    at least ~8 guaranteed digits (gate_dps defaults to dps; callers whose
    right-hand data carries fewer correct digits than dps pass that smaller
    count, since noise in an exactly singular system masquerades as a
    finite, spuriously acceptable condition number); the unscaled residual
    must stay below 1e-8 ||rhs||."""
    if dps < MIN_DPS:
        raise ValueError(
            f"working precision {dps} digits is below the {MIN_DPS}-digit "
            "(128-bit) floor required by the ill-conditioned solve"
        )
    m = system.size
    with mp.workdps(dps):
        a = system.matrix
        scale = []
        for jcol in range(m):
            colmax = max(abs(a[i, jcol]) for i in range(m))
            if colmax == 0:
                raise IllConditionedSystemError(
                    f"system column {system.labels[jcol]} is identically zero"
                )
            scale.append(mp.mpf(1) / colmax)
        scaled = mp.matrix(m, m)
        for i in range(m):
            for jcol in range(m):
                scaled[i, jcol] = a[i, jcol] * scale[jcol]
        norm_a = mp.mnorm(scaled, 1)
        try:
            inv = scaled ** -1
        except ZeroDivisionError as exc:
            raise IllConditionedSystemError(
                "equilibrated system is singular at working precision"
            ) from exc
        cond = norm_a * mp.mnorm(inv, 1)
        limit = dps if gate_dps is None else min(dps, gate_dps)
        if cond > mp.mpf(10) ** (limit - 8):
            raise IllConditionedSystemError(
                f"condition estimate {mp.nstr(cond, 5)} exceeds 10^({limit}-8); "
                "raise the working precision of the cumulant data"
            )
        y = mp.lu_solve(scaled, system.rhs)
        x = mp.matrix([y[i] * scale[i] for i in range(m)])
        resid = mp.norm(a * x - system.rhs, mp.inf)
        rhs_norm = mp.norm(system.rhs, mp.inf)
        if resid > mp.mpf("1e-8") * rhs_norm:
            raise NumericalError(
                f"solve residual {mp.nstr(resid, 5)} exceeds 1e-8 * ||rhs|| "
                f"({mp.nstr(rhs_norm, 5)})"
            )
        diagnostics = {
            "condition": float(cond),
            "residual": float(resid),
            "rhs_norm": float(rhs_norm),
            "dps": dps,
        }
        p = system.dim
        if system.labels != _canonical_labels(p):
            return {lab: x[k] for k, lab in enumerate(system.labels)}, diagnostics
        q = [mp.mpf(0)] + [x[i] for i in range(p - 1)] + [mp.mpf(1)]
        qprime = [x[(p - 1) + i] for i in range(p - 1)] + [mp.mpf(0), mp.mpf(0)]
    return CharPolyPair(tuple(q), tuple(qprime)), diagnostics


def spectrum_from_coeffs(q, dps: int = DEFAULT_DPS) -> Spectrum:
    """Root multiset of the recovered characteristic polynomial (ascending
    coefficients, monic).

    Roots are extracted at working precision: generator spectra routinely
    carry multiple eigenvalues (coherence decay rates collide), and a
    float64 companion eigensolve would split an m-fold root by eps^(1/m)
    even from exact coefficients."""
    if abs(float(q[-1]) - 1.0) > 1e-9:
        raise NumericalError(f"recovered polynomial not monic: lead {float(q[-1])}")
    with mp.workdps(dps):
        desc = [mp.mpmathify(c) for c in reversed(list(q))]
        try:
            roots = mp.polyroots(desc, maxsteps=200, extraprec=dps)
        except mp.libmp.NoConvergence as exc:
            raise NumericalError(f"root extraction did not converge: {exc}") from exc
        values = [complex(r) for r in roots]
    return Spectrum.from_values(values)


FORWARD_CHECK_TOL = 1e-8


def _subset_delta(sub, full) -> float:
    """Total distance from each reconstructed eigenvalue to its greedily
    matched partner in the direct spectrum (without replacement).  Used as
    the self-diagnostic when deflation returned fewer roots than the full
    generator dimension."""
    pool = list(full)
    total = 0.0
    for s in sub:
        k = min(range(len(pool)), key=lambda j: abs(s - pool[j]))
        total += abs(s - pool.pop(k))
    return total


def _forward_mismatch(pair: CharPolyPair, values: list, dps: int) -> float:
    """Max relative disagreement between the input cumulants and the ones
    regenerated from a candidate coefficient pair.  The orders beyond the
    candidate's own system size are genuinely held out, so this check
    rejects a wrong reduced dimension."""
    regen = cumulants_forward(pair, len(values), dps=dps)
    worst = 0.0
    with mp.workdps(dps):
        for have, got in zip(values, regen.values):
            have = mp.mpmathify(have)
            scale = max(abs(have), mp.mpf("1e-300"))
            worst = max(worst, float(abs(have - got) / scale))
    return worst


def reconstruct_from_cumulants(
    cumulants: CumulantSet,
    n: int,
    dps: int = DEFAULT_DPS,
    deflate: bool = True,
) -> ReconstructionResult:
    """Pipeline from a finished cumulant set: linear system -> split
    coefficients -> spectrum.  Numerical failures are re-raised as
    ReconstructionError with the failing stage named.

    When the full square system is exactly singular (shared factor between
    q and q', see module docstring) and deflate is true, the solve is
    retried at reduced dimension p - d for d = 1, 2, ...; the first
    nonsingular reduction whose regenerated cumulant sequence reproduces
    every supplied cumulant is accepted.  The result then carries the
    reduced coefficient pair, the visible spectrum (p - d roots), and
    meta["deflation"] = d."""
    needed = system_order(n)
    if cumulants.order < needed:
        raise ValueError(
            f"n = {n} needs cumulant order >= {needed} (= 2(n^2 - 1)), got {cumulants.order}"
        )
    src_dps = cumulants.meta.get("dps") if isinstance(cumulants, CumulantSet) else None
    if src_dps is not None and src_dps < dps:
        # lower-precision cumulants carry rounding noise that regularizes the
        # structurally singular system into a well-posed-looking solve with a
        # tiny residual and meaningless coefficients; refuse up front
        raise ValueError(
            f"cumulants carry {src_dps} digits but the solve runs at {dps}; "
            "recompute them at >= the solve precision"
        )
    # contour cumulants are quadrature-limited well short of their dps; run
    # the identifiability gate at the digits the data actually supports
    gate_dps = dps
    accuracy = cumulants.meta.get("accuracy") if isinstance(cumulants, CumulantSet) else None
    if accuracy:
        gate_dps = min(gate_dps, int(-math.log10(accuracy)))
    p = n * n
    values = list(cumulants.values)
    try:
        system = assemble_system(cumulants, n, dps=dps)
    except NumericalError as exc:
        raise ReconstructionError(f"system assembly failed: {exc}") from exc
    pair = None
    meta_extra: dict = {}
    try:
        pair, diagnostics = solve_coefficients(system, dps=dps, gate_dps=gate_dps)
    except IllConditionedSystemError as exc:
        if not deflate:
            raise ReconstructionError(f"coefficient solve failed: {exc}") from exc
        pair, diagnostics, meta_extra = _deflation_ladder(values, p, dps, exc, gate_dps)
    except NumericalError as exc:
        raise ReconstructionError(f"coefficient solve failed: {exc}") from exc
    else:
        # validate the full-dimension pair against every supplied cumulant;
        # orders beyond the system are held-out data
        mismatch = _forward_mismatch(pair, values, dps)
        if mismatch > FORWARD_CHECK_TOL:
            cause = NumericalError(
                f"full-dimension pair fails to regenerate the supplied "
                f"cumulants (relative mismatch {float(mismatch):.3e})"
            )
            if not deflate:
                raise ReconstructionError(f"coefficient solve failed: {cause}")
            pair, diagnostics, meta_extra = _deflation_ladder(values, p, dps, cause, gate_dps)
        else:
            meta_extra = {"forward_check": float(mismatch)}
    try:
        spectrum = spectrum_from_coeffs(pair.q, dps=dps)
    except NumericalError as exc:
        raise ReconstructionError(f"root extraction failed: {exc}") from exc
    meta = dict(diagnostics)
    meta.update(meta_extra)
    meta["cumulant_method"] = cumulants.method
    return ReconstructionResult(
        spectrum=spectrum,
        coefficients=pair,
        residual=diagnostics["residual"],
        condition=diagnostics["condition"],
        delta_direct=None,
        meta=meta,
    )


def _deflation_ladder(
    values: list, p: int, dps: int, cause: Exception, gate_dps: int | None = None
) -> tuple:
    """Try reduced dimensions p - 1, p - 2, .. until a nonsingular system
    solves and its pair regenerates all supplied cumulants."""
    for reduced in range(p - 1, 1, -1):
        try:
            system = _assemble_dim(values, reduced, dps)
            pair, diagnostics = solve_coefficients(system, dps=dps, gate_dps=gate_dps)
        except NumericalError:
            continue
        mismatch = _forward_mismatch(pair, values, dps)
        if mismatch > FORWARD_CHECK_TOL:
            continue
        meta = {
            "deflation": p - reduced,
            "visible_dim": reduced,
            "forward_check": mismatch,
        }
        return pair, diagnostics, meta
    raise ReconstructionError(
        f"coefficient solve failed: {cause}; no reduced dimension below {p} "
        "reproduced the supplied cumulants either"
    ) from cause


def reconstruct_spectrum(
    g: Graph,
    omega: float,
    edge: tuple,
    epsilon: float,
    m: int | None = None,
    source: str = "forward",
    dps: int = DEFAULT_DPS,
) -> ReconstructionResult:
    """End-to-end recovery of the tilted-generator spectrum from counting
    statistics on one aux edge.

    source picks the cumulant route ("forward" or "contour").  The result
    carries delta_direct, the distance between the reconstructed spectrum
    and a direct eigensolve of the same chi = 0 generator; note both include
    the aux dissipator, which perturbs the bare walk spectrum at O(epsilon).

    n = 3 runs in seconds; n = 4 (a 30-cumulant, 30x30 solve) is supported
    but slow and increasingly precision-hungry; larger n is not offered."""
    needed = system_order(g.n)
    if m is None:
        # Extra orders beyond the square system are held out; the forward
        # validation needs them to reject a noise-regularized singular solve.
        m = needed + 4
    elif m < needed:
        raise ValueError(
            f"n = {g.n} reconstruction needs m >= {needed} cumulants, got m = {m}"
        )
    if source == "forward":
        split = split_char_poly(g, omega, edge, epsilon, dps=max(dps, MIN_DPS))
        cumulants = cumulants_forward(split, m, dps=max(dps, MIN_DPS))
    elif source == "contour":
        cumulants = cumulants_contour(tilted_builder(g, omega, edge, epsilon), m, dps=dps)
    else:
        raise ValueError(f"unknown cumulant source {source!r}; use 'forward' or 'contour'")
    result = reconstruct_from_cumulants(cumulants, g.n, dps=dps)
    direct = eigenvalues(compose(g, omega, edge=edge, epsilon=epsilon, chi=0.0))
    if len(result.spectrum.values) == len(direct.values):
        delta = spectral_distance(result.spectrum, direct)
    else:
        delta = _subset_delta(result.spectrum.values, direct.values)
    meta = dict(result.meta)
    meta["delta_direct"] = delta
    return ReconstructionResult(
        spectrum=result.spectrum,
        coefficients=result.coefficients,
        residual=result.residual,
        condition=result.condition,
        delta_direct=delta,
        meta=meta,
    )

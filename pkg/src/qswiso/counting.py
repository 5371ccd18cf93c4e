"""Steady state and exact jump-count cumulants of the tilted walk generator.

The counting field chi multiplies exactly one superoperator entry by e^chi
(the aux-edge gain), so the characteristic polynomial of the tilted
generator splits as P(nu, chi) = P0(nu) + e^chi * P1(nu), and every
coefficient satisfies q_i(chi) = q_i^0 + e^chi * q_i^1.  Writing nu(chi) for
the dominant root (the scaled cumulant generating function of the jump
counts), the reduced cumulants are c_k = d^k nu / d chi^k at chi = 0.

Two independent routes to the c_k are implemented:

  forward recursion: substitute the power series nu(chi) = sum c_j chi^j/j!
    into P(nu(chi), chi) = 0 and solve order by order; the chi^l coefficient
    is linear in c_l given c_1..c_{l-1}, with slope q_1.

  contour integration: sample nu(chi) on the circle |chi| = r by dense
    eigensolves with eigenvector-overlap branch tracking, refine each sample
    to extended precision by Rayleigh-quotient iteration, and read off
    derivatives via the discrete Cauchy integral; the run is accepted only
    if radii r and r/2 agree.

High orders (the reconstruction needs up to 2(n^2 - 1)) lose all meaning in
64-bit floats because k!/r^k amplifies sample noise, so both routes carry
extended-precision (mpmath) coefficients end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
import scipy.linalg

from .errors import (
    BranchCrossingError,
    DegenerateSteadyStateError,
    DominanceGapError,
    InvalidAuxEdgeError,
    NumericalError,
    RadiusConsistencyError,
)
from .graphs import Graph
from .liouville import SuperOperator, compose, dyad_index
from .spectral import CharPoly

__all__ = [
    "DensityVector",
    "CumulantSet",
    "SplitCharPoly",
    "steady_state",
    "dominant_eigenvalue",
    "split_char_poly",
    "cumulants_forward",
    "cumulants_contour",
    "tilted_builder",
]

DEFAULT_DPS = 60


@dataclass(frozen=True, eq=False)
class DensityVector:
    """Vectorized density matrix over the dyad basis: trace one, Hermitian
    and positive on the populations within 1e-10 (validated)."""

    n: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        ent = np.ascontiguousarray(self.entries, dtype=np.complex128)
        if ent.shape != (self.n * self.n,):
            raise ValueError(f"entries shape {ent.shape} does not match n^2 = {self.n ** 2}")
        pops = ent[[dyad_index(i, i, self.n) for i in range(self.n)]]
        if abs(pops.sum() - 1.0) > 1e-10:
            raise NumericalError(f"density vector trace {pops.sum()} deviates from 1")
        if np.max(np.abs(pops.imag)) > 1e-10 or np.min(pops.real) < -1e-10:
            raise NumericalError("populations not real nonnegative within 1e-10")
        mat = ent.reshape(self.n, self.n)
        if np.max(np.abs(mat - mat.conj().T)) > 1e-10:
            raise NumericalError("density vector not Hermitian within 1e-10")
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)

    @property
    def populations(self) -> np.ndarray:
        return np.array([self.entries[dyad_index(i, i, self.n)].real for i in range(self.n)])

    def population(self, i: int) -> float:
        return float(self.entries[dyad_index(i, i, self.n)].real)

    def as_matrix(self) -> np.ndarray:
        return self.entries.reshape(self.n, self.n).copy()


@dataclass(frozen=True, eq=False)
class CumulantSet:
    """Exact reduced cumulants c_1..c_m (jumps per unit time).

    values holds extended-precision reals (mpmath mpf); values_float gives a
    float64 view.  method records which route produced them, meta the route
    parameters (precision, contour radius and sample count when relevant).
    """

    order: int
    values: tuple
    method: str
    meta: dict

    def __post_init__(self) -> None:
        if len(self.values) != self.order:
            raise ValueError(f"expected {self.order} cumulants, got {len(self.values)}")

    @property
    def values_float(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])

    def __getitem__(self, k: int):
        """1-based access: set[k] is c_k."""
        if not 1 <= k <= self.order:
            raise IndexError(f"cumulant order {k} outside 1..{self.order}")
        return self.values[k - 1]


def steady_state(s: SuperOperator) -> DensityVector:
    """Normalized null vector of the chi = 0 generator.

    Uniqueness is checked through the second-smallest singular value
    (> 1e-10 required); a degenerate null space means disconnected or
    otherwise pathological input.
    """
    if s.chi != 0:
        raise ValueError("steady state is defined for the untilted (chi = 0) generator")
    _, sv, vh = scipy.linalg.svd(s.entries)
    if sv[-2] <= 1e-10:
        raise DegenerateSteadyStateError(
            f"null space not one-dimensional: second-smallest singular value {sv[-2]:.3e}"
        )
    vec = vh[-1].conj()
    trace = sum(vec[dyad_index(i, i, s.n)] for i in range(s.n))
    if abs(trace) < 1e-12:
        raise DegenerateSteadyStateError("null vector has vanishing trace; cannot normalize")
    return DensityVector(s.n, vec / trace)


def _dominant_pair(entries: np.ndarray, track_vec=None):
    """Dominant eigenvalue and right eigenvector, with the runner-up gap.

    With track_vec given, selects the branch by maximal eigenvector overlap
    instead of maximal real part (the two must then agree for the dominant
    branch to be well separated)."""
    vals, vecs = scipy.linalg.eig(entries)
    by_re = np.argsort(vals.real)
    lead, runner = by_re[-1], by_re[-2]
    gap = float(vals.real[lead] - vals.real[runner])
    if track_vec is None:
        sel = lead
    else:
        overlaps = np.abs(track_vec.conj() @ vecs)
        norms = np.linalg.norm(vecs, axis=0)
        sel = int(np.argmax(overlaps / norms))
    vec = vecs[:, sel] / np.linalg.norm(vecs[:, sel])
    return complex(vals[sel]), vec, gap, sel == lead


def dominant_eigenvalue(s: SuperOperator, min_gap: float = 1e-9) -> complex:
    """Eigenvalue of maximal real part; zero (within solver accuracy) at
    chi = 0 by trace preservation.  Raises DominanceGapError when the two
    largest real parts are closer than min_gap."""
    val, _, gap, _ = _dominant_pair(s.entries)
    if gap < min_gap:
        raise DominanceGapError(
            f"dominance gap {gap:.3e} below {min_gap:.1e}; branch ambiguous"
        )
    return val


# ---------------------------------------------------------------------------
# Extended-precision characteristic polynomial of the tilted generator
# ---------------------------------------------------------------------------


def _mp_matrix(entries: np.ndarray) -> mp.matrix:
    dim = entries.shape[0]
    m = mp.matrix(dim, dim)
    for i in range(dim):
        for j in range(dim):
            z = entries[i, j]
            m[i, j] = mp.mpc(z.real, z.imag)
    return m


def _mp_faddeev_leverrier(matrix: mp.matrix) -> list:
    """Ascending complex mp coefficients, monic, via the trace recursion."""
    dim = matrix.rows
    desc = [mp.mpc(1)]
    work = mp.eye(dim)
    for k in range(1, dim + 1):
        work = matrix * work
        c = -mp.fsum(work[i, i] for i in range(dim)) / k
        desc.append(c)
        for i in range(dim):
            work[i, i] += c
    return list(reversed(desc))


def _realize_mp(coeffs, context: str, tol_exp: int) -> list:
    out = []
    for c in coeffs:
        scale = max(1, abs(c))
        if abs(mp.im(c)) / scale > mp.mpf(10) ** (-tol_exp):
            raise NumericalError(
                f"{context}: imaginary residue {mp.nstr(abs(mp.im(c)), 5)} "
                "in polynomial coefficients"
            )
        out.append(mp.re(c))
    return out


@dataclass(frozen=True, eq=False)
class SplitCharPoly:
    """chi-split characteristic polynomial of the tilted generator:
    P(nu, chi) = P0(nu) + e^chi * P1(nu).  Coefficients ascending, extended
    precision; q = p0 + p1 (the chi = 0 polynomial, monic) and qprime = p1
    (the common value of every chi-derivative).  q is precomputed at full
    working precision: summing the parts lazily at ambient precision would
    silently truncate to ~16 digits."""

    n: int
    p0: tuple
    p1: tuple
    q: tuple
    qprime: tuple
    dps: int

    @property
    def dim(self) -> int:
        return self.n * self.n

    def q_charpoly(self) -> CharPoly:
        return CharPoly(np.array([float(c) for c in self.q]))

    def evaluate(self, nu, chi):
        """P(nu, chi) with mp arithmetic."""
        total = mp.mpf(0)
        scale = mp.e ** mp.mpmathify(chi)
        power = mp.mpf(1)
        for a, b in zip(self.p0, self.p1):
            total += (a + scale * b) * power
            power *= nu
        return total


def split_char_poly(
    g: Graph,
    omega: float,
    edge: tuple,
    epsilon: float,
    dps: int = DEFAULT_DPS,
) -> SplitCharPoly:
    """Split P(nu, chi) = P0 + e^chi P1 for the walk on g with the counting
    edge.  P0 is the characteristic polynomial with the tilted entry zeroed;
    P1 is the difference to the full chi = 0 polynomial, and its degree can
    be at most dim - 2."""
    s0 = compose(g, omega, edge=edge, epsilon=epsilon, chi=0.0)
    u, v = s0.edge
    gain_pos = (dyad_index(v, v, g.n), dyad_index(u, u, g.n))
    bare = np.array(s0.entries)
    bare[gain_pos] = 0.0
    with mp.workdps(dps):
        full_coeffs = _mp_faddeev_leverrier(_mp_matrix(s0.entries))
        bare_coeffs = _mp_faddeev_leverrier(_mp_matrix(bare))
        p0 = _realize_mp(bare_coeffs, "split_char_poly P0", dps - 12)
        pf = _realize_mp(full_coeffs, "split_char_poly full", dps - 12)
        p1 = [a - b for a, b in zip(pf, p0)]
        dim = g.n * g.n
        tail = max(abs(p1[dim]), abs(p1[dim - 1]))
        head = max(abs(c) for c in p1)
        if head > 0 and tail / head > mp.mpf(10) ** (-(dps - 12)):
            raise NumericalError(
                "split_char_poly: P1 degree exceeds dim - 2; tilted entry not isolated"
            )
        p1[dim] = mp.mpf(0)
        p1[dim - 1] = mp.mpf(0)
        q = tuple(a + b for a, b in zip(p0, p1))
    return SplitCharPoly(g.n, tuple(p0), tuple(p1), q, tuple(p1), dps)


def tilted_builder(g: Graph, omega: float, edge: tuple, epsilon: float):
    """Closure chi -> composed tilted generator, for the contour route."""
    probe = compose(g, omega, edge=edge, epsilon=epsilon, chi=0.0)
    del probe

    def build(chi) -> SuperOperator:
        return compose(g, omega, edge=edge, epsilon=epsilon, chi=chi)

    return build


# ---------------------------------------------------------------------------
# Truncated power-series helpers (shared with the reconstruction module).
# Series are lists of coefficients [a_0 .. a_m]; the arithmetic is generic
# over float and mpf entries.
# ---------------------------------------------------------------------------


def _conv_trunc(a, b, m: int) -> list:
    out = [0] * (m + 1)
    for i, ai in enumerate(a[: m + 1]):
        if ai == 0:
            continue
        top = min(m - i, len(b) - 1)
        for j in range(top + 1):
            bj = b[j]
            if bj != 0:
                out[i + j] += ai * bj
    return out


def _expm1_series(m: int, one) -> list:
    """(e^chi - 1) truncated: [0, 1, 1/2!, 1/3!, ...] in the flavor of one."""
    return [one * 0] + [one / math.factorial(j) for j in range(1, m + 1)]


def cumulants_forward(split: SplitCharPoly, m: int, dps: int | None = None) -> CumulantSet:
    """Solve P(nu(chi), chi) = 0 order by order for c_1..c_m.

    The chi^l coefficient of the composite is linear in c_l with slope q_1,
    so each order is one division; all arithmetic in extended precision."""
    if m < 1:
        raise ValueError(f"cumulant order must be >= 1, got {m}")
    if dps is None:
        dps = split.dps
    with mp.workdps(dps):
        q = list(split.q)
        qp = list(split.qprime)
        if abs(q[1]) < 1e-12:
            raise NumericalError(
                f"|q_1| = {mp.nstr(abs(q[1]), 5)} < 1e-12: degenerate zero eigenvalue"
            )
        one = mp.mpf(1)
        expm1 = _expm1_series(m, one)
        f = [mp.mpf(0)] * (m + 1)
        for ell in range(1, m + 1):
            residual = mp.mpf(0)
            power = [one] + [mp.mpf(0)] * m
            for i in range(len(q)):
                if i > 0:
                    power = _conv_trunc(power, f, ell)
                    if i > ell:
                        break
                coeff_i = power[ell] if i <= ell else 0
                if coeff_i != 0 and q[i] != 0:
                    residual += q[i] * coeff_i
                if qp[i] != 0:
                    cross = _conv_trunc(expm1, power, ell)
                    residual += qp[i] * cross[ell]
            f[ell] = -residual / q[1]
        values = tuple(f[k] * math.factorial(k) for k in range(1, m + 1))
    return CumulantSet(order=m, values=values, method="forward-recursion", meta={"dps": dps})


# ---------------------------------------------------------------------------
# Contour route
# ---------------------------------------------------------------------------


def _mp_refine_eigenvalue(matrix: mp.matrix, nu0: complex, vec0: np.ndarray,
                          iterations: int | None = None):
    """Rayleigh-quotient iteration from a float64 eigenpair; returns the
    refined eigenvalue as mpc once the residual reaches the precision floor.

    Convergence from a ~1e-15 seed is at least quadratic (clustered decay
    modes spoil the cubic rate), so the step budget scales with log2(dps)."""
    dim = matrix.rows
    x = mp.matrix([mp.mpc(z.real, z.imag) for z in vec0])
    nu = mp.mpc(nu0.real, nu0.imag)
    floor = mp.mpf(10) ** (-(mp.mp.dps - 8))
    if iterations is None:
        iterations = max(2, int(mp.log(mp.mp.dps, 2)) + 3)
    resid = mp.inf
    for _ in range(iterations):
        shifted = matrix.copy()
        for i in range(dim):
            shifted[i, i] -= nu
        try:
            y = mp.lu_solve(shifted, x)
        except ZeroDivisionError:
            bump = mp.mpf(10) ** (-(mp.mp.dps // 2))
            for i in range(dim):
                shifted[i, i] -= bump
            y = mp.lu_solve(shifted, x)
        norm = mp.sqrt(mp.fsum(abs(val) ** 2 for val in y))
        x = y / norm
        mx = matrix * x
        nu = mp.fsum(mp.conj(x[i]) * mx[i] for i in range(dim))
        resid = mp.norm(mx - nu * x, mp.inf)
        if resid <= floor * max(1, abs(nu)):
            return nu
    raise NumericalError(
        f"eigenvalue refinement stalled: residual {mp.nstr(resid, 5)}"
    )


def _tilted_structure(builder, radius: float):
    """Extract (bare entries, gain position, epsilon) from a builder whose
    chi-dependence is the single gain entry scaled by e^chi.

    Sampling accuracy hinges on evaluating the tilted entry at contour
    points held in extended precision; a float64 chi would inject entry
    noise that k!/r^k amplifies past any useful order.  The structure is
    verified against one probe call before being trusted."""
    s0 = builder(0.0)
    if s0.edge is None or s0.epsilon <= 0:
        raise ValueError("contour route requires a tilted generator with an aux counting edge")
    u, v = s0.edge
    pos = (dyad_index(v, v, s0.n), dyad_index(u, u, s0.n))
    bare = np.array(s0.entries)
    bare[pos] = 0.0
    probe = builder(radius)
    expected = bare.copy()
    expected[pos] = s0.epsilon * np.exp(radius)
    scale = max(1.0, float(np.max(np.abs(s0.entries))))
    if np.max(np.abs(probe.entries - expected)) > 1e-12 * scale:
        raise ValueError(
            "builder chi-dependence is not confined to the aux gain entry; "
            "the contour route assumes the split form P0 + e^chi P1"
        )
    return bare, pos, s0.epsilon


def _contour_samples(builder, radius: float, points: int, dps: int, min_gap: float) -> list:
    """Refined dominant-branch samples nu(chi_j) on |chi| = radius.

    Branch continuity is tracked over the full circle with float64
    eigensolves; extended-precision refinement runs on the upper half only
    and the lower half is filled in by nu(conj chi) = conj nu(chi), exact
    for the real bare generator."""
    if points < 8 or points % 2:
        raise ValueError(f"points must be even and >= 8, got {points}")
    bare, pos, epsilon = _tilted_structure(builder, radius)
    _, vec, gap0, _ = _dominant_pair(bare + _gain_at(pos, epsilon, 0.0, bare.shape[0]))
    if gap0 < min_gap:
        raise DominanceGapError(
            f"dominance gap {gap0:.3e} at chi = 0 below {min_gap:.1e}"
        )
    start_vec = vec
    prev = vec
    track_vecs = []
    for j in range(points):
        chi = radius * np.exp(2 * np.pi * 1j * j / points)
        entries = bare + _gain_at(pos, epsilon, chi, bare.shape[0])
        val, vec, gap, is_lead = _dominant_pair(entries, track_vec=prev)
        if not is_lead:
            raise BranchCrossingError(
                f"tracked branch is not real-part dominant at sample {j} (chi = {chi:.4f})"
            )
        if gap < min_gap:
            raise DominanceGapError(
                f"dominance gap {gap:.3e} below {min_gap:.1e} at sample {j}"
            )
        track_vecs.append((val, vec))
        prev = vec
    closure = abs(start_vec.conj() @ prev)
    if closure < 0.9:
        raise BranchCrossingError(
            f"branch did not close around the contour (overlap {closure:.3f})"
        )
    samples = [None] * points
    with mp.workdps(dps):
        bare_mp = _mp_matrix(bare)
        eps_mp = mp.mpf(epsilon)
        r_mp = mp.mpf(radius)
        for j in range(points // 2 + 1):
            chi_mp = r_mp * mp.e ** (mp.mpc(0, 2) * mp.pi * j / points)
            matrix = bare_mp.copy()
            matrix[pos[0], pos[1]] = eps_mp * mp.e ** chi_mp
            val, vec = track_vecs[j]
            samples[j] = _mp_refine_eigenvalue(matrix, val, vec)
        for j in range(points // 2 + 1, points):
            samples[j] = mp.conj(samples[points - j])
    return samples


def _gain_at(pos: tuple, epsilon: float, chi: complex, dim: int) -> np.ndarray:
    gain = np.zeros((dim, dim), dtype=np.complex128)
    gain[pos] = epsilon * np.exp(chi)
    return gain


def _cumulants_from_samples(samples, m: int, radius: float, dps: int) -> list:
    """c_k = k! / (N r^k) * sum_j nu_j e^{-2 pi i j k / N}, realized."""
    n_samp = len(samples)
    out = []
    with mp.workdps(dps):
        r = mp.mpf(radius)
        for k in range(1, m + 1):
            acc = mp.mpc(0)
            for j, nu in enumerate(samples):
                phase = mp.e ** (mp.mpc(0, -2) * mp.pi * j * k / n_samp)
                acc += nu * phase
            a_k = acc / (n_samp * r ** k)
            c_k = a_k * math.factorial(k)
            scale = max(mp.mpf(10) ** (-30), abs(c_k))
            if abs(mp.im(c_k)) / scale > mp.mpf("1e-8"):
                raise NumericalError(
                    f"contour cumulant c_{k} has imaginary residue "
                    f"{mp.nstr(abs(mp.im(c_k)), 5)}"
                )
            out.append(mp.re(c_k))
    return out


def cumulants_contour(
    builder,
    m: int,
    radius: float = 0.5,
    points: int = 64,
    dps: int = DEFAULT_DPS,
    min_gap: float = 1e-9,
) -> CumulantSet:
    """Cumulants from the Cauchy integral of nu(chi) on |chi| = radius.

    The dominant branch is tracked by eigenvector overlap around the circle
    and each sample is refined to extended precision (float64 noise times
    k!/r^k would swamp high orders).  Results must agree between radii r and
    r/2 to relative 1e-5, else RadiusConsistencyError."""
    if m < 1:
        raise ValueError(f"cumulant order must be >= 1, got {m}")
    if not 0 < radius:
        raise ValueError(f"contour radius must be positive, got {radius}")
    primary = _cumulants_from_samples(
        _contour_samples(builder, radius, points, dps, min_gap), m, radius, dps
    )
    halved = _cumulants_from_samples(
        _contour_samples(builder, radius / 2, points, dps, min_gap), m, radius / 2, dps
    )
    worst = mp.mpf(0)
    with mp.workdps(dps):
        for k, (a, b) in enumerate(zip(primary, halved), start=1):
            scale = max(abs(a), abs(b))
            if scale < mp.mpf(10) ** (-25):
                continue
            rel = abs(a - b) / scale
            worst = max(worst, rel)
            if rel > mp.mpf("1e-5"):
                raise RadiusConsistencyError(
                    f"contour cumulant c_{k} differs between radii {radius} and "
                    f"{radius / 2}: relative {mp.nstr(rel, 5)}"
                )
    # accuracy: measured r vs r/2 agreement.  Quadrature truncation, not
    # dps, limits contour cumulants, so downstream identifiability gates
    # must not trust more digits than this.
    return CumulantSet(
        order=m,
        values=tuple(primary),
        method="contour",
        meta={"radius": radius, "points": points, "dps": dps, "accuracy": float(worst)},
    )

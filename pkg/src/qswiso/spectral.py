"""Spectra of walk generators: dense eigenvalues, characteristic
polynomials, closed-form endpoint spectra, the distance measure delta, and
cospectrality verdicts.

The omega-spectrum (all n^2 complex eigenvalues of the composed generator at
a given omega, no aux edge) is the graph invariant everything else revolves
around.  delta between two equal-size spectra sorts the real parts of each
spectrum independently, sorts the imaginary parts independently, and sums
absolute componentwise differences of both sorted lists; this makes the
measure insensitive to any pairing convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError, SizeLimitError
from .graphs import Graph, adjacency, degrees, laplacian
from .liouville import SuperOperator, build_classical, build_quantum, compose

__all__ = [
    "Spectrum",
    "CharPoly",
    "ComparisonResult",
    "eigenvalues",
    "char_poly",
    "omega_spectrum",
    "closed_form_classical_spectrum",
    "closed_form_quantum_spectrum",
    "spectral_distance",
    "radius_bound",
    "compare",
    "sweep_distance",
    "cluster_count",
    "DEFAULT_TAU",
]

_EIG_DIM_CAP = 1024
_FL_DIM_CAP = 100
DEFAULT_TAU = 1e-7


def _canonical(values: np.ndarray) -> np.ndarray:
    vals = np.asarray(values, dtype=np.complex128).ravel()
    order = np.lexsort((vals.imag, vals.real))
    out = vals[order]
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Multiset of complex eigenvalues in canonical (Re, Im) lexicographic
    order.  Construct via from_values; the constructor trusts its input."""

    values: np.ndarray

    @classmethod
    def from_values(cls, values) -> "Spectrum":
        return cls(_canonical(values))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if len(self.values) else 0.0

    def to_json(self, omega: float | None = None, n: int | None = None) -> dict:
        return {
            "omega": omega,
            "n": n,
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "Spectrum":
        vals = [complex(re, im) for re, im in payload["values"]]
        return cls.from_values(vals)


@dataclass(frozen=True, eq=False)
class CharPoly:
    """Monic real characteristic polynomial; coeffs[i] holds the coefficient
    of nu^i, so coeffs has length dim+1 and coeffs[dim] = 1."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.ascontiguousarray(self.coeffs, dtype=np.float64)
        if c.ndim != 1 or len(c) < 2:
            raise ValueError("coefficient vector must be 1-d with degree >= 1")
        if abs(c[-1] - 1.0) > 1e-12:
            raise ValueError(f"polynomial must be monic, leading coefficient {c[-1]}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def descending(self) -> np.ndarray:
        return self.coeffs[::-1].copy()


@dataclass(frozen=True)
class ComparisonResult:
    """Outcome of a spectral comparison: the distance delta, the tolerance it
    was judged against (tau * cardinality), and the verdict."""

    delta: float
    verdict: str
    omega: float | None
    tolerance: float

    @property
    def cospectral(self) -> bool:
        return self.verdict == "cospectral-within-tolerance"


def eigenvalues(s: SuperOperator) -> Spectrum:
    """All dim eigenvalues of the superoperator, canonically ordered.

    Delegates to the dense general-complex solver (Hessenberg reduction and
    shifted QR with balancing).
    """
    if s.dim > _EIG_DIM_CAP:
        raise SizeLimitError(f"dense eigensolve capped at dim={_EIG_DIM_CAP}, got {s.dim}")
    try:
        vals = scipy.linalg.eigvals(s.entries)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration failed to converge: {exc}") from exc
    return Spectrum.from_values(vals)


def _faddeev_leverrier(entries: np.ndarray) -> np.ndarray:
    """Descending complex coefficients [1, c_1, ..., c_dim] via the trace
    recursion M_k = A (M_{k-1} + c_{k-1} I), c_k = -trace(M_k)/k."""
    dim = entries.shape[0]
    coeffs = np.empty(dim + 1, dtype=np.complex128)
    coeffs[0] = 1.0
    m = np.eye(dim, dtype=np.complex128)
    for k in range(1, dim + 1):
        m = entries @ m
        c = -np.trace(m) / k
        coeffs[k] = c
        m[np.diag_indices(dim)] += c
    return coeffs


def _realize_coeffs(desc: np.ndarray, context: str) -> np.ndarray:
    scale = np.maximum(1.0, np.abs(desc))
    resid = np.max(np.abs(desc.imag) / scale)
    if resid >= 1e-9:
        raise NumericalError(
            f"{context}: imaginary residue {resid:.3e} in characteristic "
            "polynomial coefficients exceeds 1e-9 (assembly bug?)"
        )
    return desc.real.copy()


def char_poly(s: SuperOperator) -> CharPoly:
    """Monic real characteristic polynomial of the superoperator.

    Faddeev-LeVerrier for dim <= 100; beyond that the coefficients come from
    the computed eigenvalues via Vieta.  Coefficients must be real up to a
    relative imaginary residue of 1e-9 (the spectrum is closed under
    conjugation), else a NumericalError signals an assembly bug.
    """
    if s.dim <= _FL_DIM_CAP:
        desc = _faddeev_leverrier(s.entries)
    else:
        desc = np.poly(eigenvalues(s).values)
    real_desc = _realize_coeffs(np.asarray(desc, dtype=np.complex128), "char_poly")
    return CharPoly(real_desc[::-1].copy())


def omega_spectrum(g: Graph, omega: float) -> Spectrum:
    """The graph invariant: spectrum of the composed generator at omega,
    epsilon = 0."""
    return eigenvalues(compose(g, omega))


def closed_form_classical_spectrum(g: Graph) -> Spectrum:
    """sigma^cl = {-lambda_i (Laplacian eigenvalues)} together with
    {-(d_i + d_j)/2 : i != j}."""
    lam = np.linalg.eigvalsh(laplacian(g))
    d = degrees(g)
    coh = [
        -0.5 * (d[i] + d[j])
        for i in range(g.n)
        for j in range(g.n)
        if i != j
    ]
    return Spectrum.from_values(np.concatenate([-lam, np.asarray(coh)]).astype(np.complex128))


def closed_form_quantum_spectrum(g: Graph) -> Spectrum:
    """sigma^qm = {i (alpha_i - alpha_j)} over all ordered pairs of adjacency
    eigenvalues (n^2 values, purely imaginary)."""
    alpha = np.linalg.eigvalsh(adjacency(g))
    diffs = 1j * (alpha[:, None] - alpha[None, :])
    return Spectrum.from_values(diffs.ravel())


def spectral_distance(a: Spectrum, b: Spectrum) -> float:
    """delta: sort Re parts of each spectrum independently, likewise Im
    parts, and sum absolute componentwise differences of both sorted lists."""
    if len(a) != len(b):
        raise ValueError(f"spectra have different cardinality: {len(a)} vs {len(b)}")
    re = np.abs(np.sort(a.values.real) - np.sort(b.values.real)).sum()
    im = np.abs(np.sort(a.values.imag) - np.sort(b.values.imag)).sum()
    return float(re + im)


def radius_bound(g: Graph, omega: float) -> float:
    """Frobenius-norm bound on the spectral radius of the composed generator:
    omega * ||L_qm||_F + (1 - omega) * ||L_cl||_F."""
    if not 0.0 <= omega <= 1.0:
        raise ValueError(f"omega must lie in [0, 1], got {omega}")
    nq = np.linalg.norm(build_quantum(g).entries)
    nc = np.linalg.norm(build_classical(g).entries)
    return float(omega * nq + (1.0 - omega) * nc)


def compare(
    a: Spectrum,
    b: Spectrum,
    omega: float | None = None,
    tau: float = DEFAULT_TAU,
) -> ComparisonResult:
    """Judge two spectra: distinguished iff delta > tau * cardinality."""
    delta = spectral_distance(a, b)
    tolerance = tau * len(a)
    verdict = "distinguished" if delta > tolerance else "cospectral-within-tolerance"
    return ComparisonResult(delta=delta, verdict=verdict, omega=omega, tolerance=tolerance)


def sweep_distance(g1: Graph, g2: Graph, omegas) -> np.ndarray:
    """delta between the omega-spectra of two graphs on a grid of omega."""
    return np.array(
        [spectral_distance(omega_spectrum(g1, w), omega_spectrum(g2, w)) for w in omegas]
    )


def cluster_count(spec: Spectrum, tol: float) -> int:
    """Number of distinct eigenvalues after single-linkage clustering with
    absolute tolerance tol in the complex plane."""
    vals = spec.values
    k = len(vals)
    parent = list(range(k))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(k):
        for j in range(i + 1, k):
            if abs(vals[i] - vals[j]) <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    return len({find(i) for i in range(k)})

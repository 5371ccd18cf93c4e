"""Liouville-space (superoperator) representations of the walk generators.

Density matrices are vectorized over the dyad basis |i><j| with the fixed
row-major convention dyad_index(i, j) = i*n + j, so a map rho -> X rho Y
becomes kron(X, Y^T) on vectors.  The three building blocks are

  quantum part:    rho -> -i (A rho - rho A)
  classical part:  one dissipator term per ordered edge (i, j), jump |j><i|,
                   which leaves populations coupled through -L and gives each
                   coherence dyad |i><j| the decay rate -(d_i + d_j)/2
  aux counting:    a single extra dissipator across a non-edge (u, v) at rate
                   epsilon, whose gain term carries the counting factor e^chi
                   in exactly one matrix entry

and the composed generator is omega * quantum + (1 - omega) * classical
plus the aux term when epsilon > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidAuxEdgeError
from .graphs import Graph, adjacency, degrees

__all__ = [
    "SuperOperator",
    "dyad_index",
    "build_quantum",
    "build_classical",
    "quantize_rate",
    "build_aux",
    "compose",
]


@dataclass(frozen=True, eq=False)
class SuperOperator:
    """Dense complex dim x dim matrix over the dyad basis, with the
    parameters it was built from.  omega is None for building blocks where
    the mixing parameter does not apply (the bare aux dissipator)."""

    n: int
    entries: np.ndarray
    omega: float | None
    epsilon: float = 0.0
    edge: tuple | None = None
    chi: complex = 0.0

    def __post_init__(self) -> None:
        dim = self.n * self.n
        if self.entries.shape != (dim, dim):
            raise ValueError(
                f"entries shape {self.entries.shape} does not match dim {dim}"
            )
        ent = np.ascontiguousarray(self.entries, dtype=np.complex128)
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)

    @property
    def dim(self) -> int:
        return self.n * self.n


def dyad_index(i: int, j: int, n: int) -> int:
    """Position of the dyad |i><j| in the vectorized basis: i*n + j."""
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"dyad indices ({i}, {j}) out of range for n={n}")
    return i * n + j


def build_quantum(g: Graph) -> SuperOperator:
    """Coherent part: S vec(rho) = vec(-i (A rho - rho A)).

    Purely imaginary spectrum {i (alpha_i - alpha_j)} over ordered pairs of
    adjacency eigenvalues alpha.
    """
    a = adjacency(g)
    eye = np.eye(g.n)
    s = -1j * (np.kron(a, eye) - np.kron(eye, a))
    return SuperOperator(g.n, s, omega=1.0)


def build_classical(g: Graph) -> SuperOperator:
    """Dissipative part: one Lindblad term with jump |j><i| per ordered pair
    (i, j) with A_ij = 1, at unit rate.

    Block diagonal in the dyad basis: the population block equals -L, and
    each coherence dyad |i><j| (i != j) is an eigenvector with eigenvalue
    -(d_i + d_j)/2.
    """
    n = g.n
    d = degrees(g)
    dim = n * n
    s = np.zeros((dim, dim), dtype=np.complex128)
    decay = 0.5 * (d[:, None] + d[None, :])
    idx = np.arange(dim)
    s[idx, idx] = -decay.ravel()
    for i, j in g.edges:
        s[dyad_index(j, j, n), dyad_index(i, i, n)] += 1.0
        s[dyad_index(i, i, n), dyad_index(j, j, n)] += 1.0
    return SuperOperator(g.n, s, omega=0.0)


def quantize_rate(epsilon: float, bits: int = 40) -> float:
    """Round a rate to a short binary significand.

    The counting rate enters both a gain entry and diagonal decay entries;
    exact float64 trace preservation of their sum (which downstream code
    relies on: the reconstructed polynomial pins q_0 = 0, and clustered
    classical decay roots amplify a ~1e-16 determinant residue to ~1e-4
    spectral error) requires sums like d + epsilon to be representable.
    With a 40-bit significand and vertex degrees below 2^13/2^10 that holds;
    the induced relative change of the arbitrary rate is ~1e-12."""
    mant, exp = math.frexp(epsilon)
    return math.ldexp(round(math.ldexp(mant, bits)), exp - bits)


def build_aux(n: int, u: int, v: int, epsilon: float, chi: complex = 0.0) -> SuperOperator:
    """Auxiliary counting dissipator across the directed pair (u, v): gain
    epsilon * e^chi at the single entry (dyad(v,v), dyad(u,u)), plus
    chi-independent loss -epsilon/2 on every dyad involving u.

    The stored rate is quantize_rate(epsilon); read it back from the
    .epsilon field when exact consistency matters."""
    if u == v:
        raise InvalidAuxEdgeError(f"aux edge endpoints must differ, got ({u}, {v})")
    if not (0 <= u < n and 0 <= v < n):
        raise InvalidAuxEdgeError(f"aux edge ({u}, {v}) out of range for n={n}")
    if epsilon <= 0:
        raise InvalidAuxEdgeError(f"aux rate must be positive, got {epsilon}")
    epsilon = quantize_rate(epsilon)
    dim = n * n
    s = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(n):
        s[dyad_index(u, k, n), dyad_index(u, k, n)] -= 0.5 * epsilon
        s[dyad_index(k, u, n), dyad_index(k, u, n)] -= 0.5 * epsilon
    s[dyad_index(v, v, n), dyad_index(u, u, n)] = epsilon * np.exp(chi)
    return SuperOperator(n, s, omega=None, epsilon=epsilon, edge=(u, v), chi=chi)


def compose(
    g: Graph,
    omega: float,
    edge: tuple | None = None,
    epsilon: float = 0.0,
    chi: complex = 0.0,
) -> SuperOperator:
    """Composed walk generator omega * quantum + (1 - omega) * classical,
    plus the aux counting dissipator when epsilon > 0.

    The aux edge must be a non-edge of g (it models an added monitored
    connection, not a relabeling of an existing one).
    """
    if not 0.0 <= omega <= 1.0:
        raise ValueError(f"omega must lie in [0, 1], got {omega}")
    if epsilon < 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    s = omega * build_quantum(g).entries + (1.0 - omega) * build_classical(g).entries
    if epsilon > 0:
        if edge is None:
            raise InvalidAuxEdgeError("epsilon > 0 requires an aux edge (u, v)")
        u, v = int(edge[0]), int(edge[1])
        if (min(u, v), max(u, v)) in g.edges:
            raise InvalidAuxEdgeError(
                f"aux edge ({u}, {v}) is already an edge of the graph"
            )
        aux = build_aux(g.n, u, v, epsilon, chi)
        s = s + aux.entries
        return SuperOperator(g.n, s, omega=omega, epsilon=aux.epsilon, edge=(u, v), chi=chi)
    return SuperOperator(g.n, s, omega=omega)

"""Quantum-jump unraveling of the walk with a monitored auxiliary channel.

A pure state evolves under the effective Hamiltonian

    H_eff = omega A - (i/2) [ (1 - omega) D + epsilon |u><u| ]

whose norm decay encodes the waiting-time distribution: a uniform draw r
fixes the next jump at the time where the squared norm of the unnormalized
state crosses r.  Channels are then selected proportionally to
rate * |<src|psi>|^2 and the state resets to the target basis vector.  Only
jumps through the auxiliary (u -> v) channel are counted, in windows of
length dt after a burn-in; the resulting integer counts feed the
k-statistic cumulant estimators.

Propagation between jumps is exact through the eigendecomposition of H_eff
(n <= 16 makes this cheap) and jump times are found by bisection on the
survival probability, so there is no step-size error anywhere.  The same
kernel source runs either pure-Python or numba-compiled, consuming the
identical Philox stream: each path is reproducible bit for bit across
runs, counts agree between the paths on the shipped fixtures, and the
occupation diagnostics agree to floating tolerance (the two paths round
complex exponentials differently at the last ulp).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import InvalidAuxEdgeError, NumericalError
from .graphs import Graph, adjacency
from .liouville import compose, quantize_rate
from .spectral import eigenvalues

__all__ = [
    "ChannelSet",
    "CountRecord",
    "CumulantEstimates",
    "channel_set",
    "simulate",
    "k_statistics",
    "variance_scaling_check",
    "write_csv",
]


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Directed jump channels with strictly positive rates.

    Classical channels carry rate (1 - omega) per directed graph edge and
    vanish at omega = 1, where they are dropped entirely; the auxiliary
    (u -> v) channel carries epsilon and is the single counted one."""

    n: int
    srcs: np.ndarray
    dsts: np.ndarray
    rates: np.ndarray
    counted: int

    def __post_init__(self) -> None:
        if not (len(self.srcs) == len(self.dsts) == len(self.rates)):
            raise ValueError("channel arrays must have equal length")
        if np.any(self.rates <= 0):
            raise ValueError("channel rates must be strictly positive")
        if not 0 <= self.counted < len(self.rates):
            raise ValueError(f"counted channel index {self.counted} out of range")

    @property
    def size(self) -> int:
        return len(self.rates)

    def total_rate_from(self, i: int) -> float:
        """Sum of outgoing rates from basis state i: (1-omega) d_i plus
        epsilon when i is the monitored source."""
        return float(self.rates[self.srcs == i].sum())


def channel_set(g: Graph, omega: float, edge: tuple, epsilon: float) -> ChannelSet:
    if not 0.0 <= omega <= 1.0:
        raise ValueError(f"omega must lie in [0, 1], got {omega}")
    u, v = edge
    if u == v or not (0 <= u < g.n and 0 <= v < g.n):
        raise InvalidAuxEdgeError(f"aux edge {edge} is not a pair of distinct vertices")
    if (min(u, v), max(u, v)) in g.edges:
        raise InvalidAuxEdgeError(f"aux edge {edge} is already a graph edge")
    if epsilon <= 0:
        raise ValueError(f"counting rate epsilon must be positive, got {epsilon}")
    epsilon = quantize_rate(epsilon)
    srcs, dsts, rates = [], [], []
    if omega < 1.0:
        for (i, j) in sorted(g.edges):
            for a, b in ((i, j), (j, i)):
                srcs.append(a)
                dsts.append(b)
                rates.append(1.0 - omega)
    srcs.append(u)
    dsts.append(v)
    rates.append(epsilon)
    return ChannelSet(
        n=g.n,
        srcs=np.array(srcs, dtype=np.int64),
        dsts=np.array(dsts, dtype=np.int64),
        rates=np.array(rates, dtype=np.float64),
        counted=len(rates) - 1,
    )


@dataclass(frozen=True, eq=False)
class CountRecord:
    """Per-window counts of the monitored channel from one long trajectory.

    occupations holds the mean of |psi_i|^2 sampled at the s window
    boundaries, a cheap steady-state diagnostic."""

    counts: np.ndarray
    dt: float
    windows: int
    burn_in: float
    seed: int
    stream: int
    occupations: np.ndarray
    params: dict

    def __post_init__(self) -> None:
        if len(self.counts) != self.windows:
            raise ValueError(
                f"counts length {len(self.counts)} != window count {self.windows}"
            )
        if np.any(self.counts < 0):
            raise ValueError("negative jump count")


@dataclass(frozen=True, eq=False)
class CumulantEstimates:
    """k-statistics divided by dt.  values[k-1] estimates the reduced
    cumulant c_k; stderr[k-1] its standard error (exact formulas for orders
    1-2, Gaussian leading-order approximations for 3-4)."""

    order: int
    values: tuple
    stderr: tuple
    s: int
    dt: float

    def __post_init__(self) -> None:
        if self.order >= 2 and self.values[1] < -1e-12:
            raise ValueError(f"variance estimate is negative: {self.values[1]}")


def _effective_hamiltonian(g: Graph, omega: float, channels: ChannelSet) -> np.ndarray:
    h = omega * adjacency(g).astype(np.complex128)
    loss = np.zeros(g.n)
    for c in range(channels.size):
        loss[channels.srcs[c]] += channels.rates[c]
    h -= 0.5j * np.diag(loss)
    return h


def _propagator(h: np.ndarray) -> tuple:
    lam, vecs = np.linalg.eig(h)
    cond = np.linalg.cond(vecs)
    if cond > 1e10:
        raise NumericalError(
            f"effective Hamiltonian eigenbasis is ill-conditioned ({cond:.3e}); "
            "exact propagation unreliable"
        )
    return lam, vecs, np.linalg.inv(vecs)


def _kernel(gen, lam, v, vinv, srcs, dsts, rates, counted, start, dt, s,
            burn_in, counts, occ):
    # Shared source for the pure-Python and numba paths: identical RNG call
    # order (one uniform per waiting time, one per channel choice) makes the
    # two produce bit-identical records.
    n = lam.shape[0]
    nch = rates.shape[0]
    psi = np.zeros(n, dtype=np.complex128)
    psi[start] = 1.0
    t = -burn_in
    w_end = s * dt
    next_k = 1
    while t < w_end:
        c0 = vinv @ psi
        r = gen.random()
        if r < 1e-300:
            r = 1e-300
        cap = (w_end - t) + dt
        amp = v @ (c0 * np.exp(-1j * lam * cap))
        s_cap = (np.abs(amp) ** 2).sum()
        if s_cap > r:
            # no jump before the simulation horizon: flush boundaries
            while next_k <= s and next_k * dt <= t + cap:
                tau_b = next_k * dt - t
                amp = v @ (c0 * np.exp(-1j * lam * tau_b))
                p = np.abs(amp) ** 2
                tot = p.sum()
                if tot > 0.0:
                    occ += p / tot
                next_k += 1
            t = t + cap
            continue
        hi = dt if dt < cap else cap
        while True:
            amp = v @ (c0 * np.exp(-1j * lam * hi))
            if (np.abs(amp) ** 2).sum() <= r or hi >= cap:
                break
            hi = min(hi * 2.0, cap)
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            amp = v @ (c0 * np.exp(-1j * lam * mid))
            if (np.abs(amp) ** 2).sum() > r:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-13 * (1.0 + hi):
                break
        tau_j = 0.5 * (lo + hi)
        amp = v @ (c0 * np.exp(-1j * lam * tau_j))
        surv = (np.abs(amp) ** 2).sum()
        if abs(surv - r) > 1e-10:
            return 1  # norm-decay bookkeeping violated
        while next_k <= s and next_k * dt <= t + tau_j:
            tau_b = next_k * dt - t
            amp_b = v @ (c0 * np.exp(-1j * lam * tau_b))
            p = np.abs(amp_b) ** 2
            tot = p.sum()
            if tot > 0.0:
                occ += p / tot
            next_k += 1
        t = t + tau_j
        total = 0.0
        for c in range(nch):
            total += rates[c] * (abs(amp[srcs[c]]) ** 2)
        draw = gen.random() * total
        pick = nch - 1
        acc = 0.0
        for c in range(nch):
            acc += rates[c] * (abs(amp[srcs[c]]) ** 2)
            if draw < acc:
                pick = c
                break
        if pick == counted and t > 0.0:
            w = int(t / dt)
            if w < s:
                counts[w] += 1
        for q in range(n):
            psi[q] = 0.0
        psi[dsts[pick]] = 1.0
    return 0


_JIT_KERNEL = None
_JIT_FAILED = False


def _resolve_kernel(use_numba):
    global _JIT_KERNEL, _JIT_FAILED
    if use_numba is False:
        return _kernel, False
    if _JIT_KERNEL is not None:
        return _JIT_KERNEL, True
    if _JIT_FAILED:
        if use_numba is True:
            raise NumericalError("numba kernel unavailable in this environment")
        return _kernel, False
    try:
        from numba import njit

        _JIT_KERNEL = njit(cache=True)(_kernel)
        return _JIT_KERNEL, True
    except Exception:
        _JIT_FAILED = True
        if use_numba is True:
            raise NumericalError("numba kernel unavailable in this environment")
        return _kernel, False


def default_burn_in(g: Graph, omega: float, edge: tuple, epsilon: float) -> float:
    """10 relaxation times of the slowest decaying generator mode."""
    vals = eigenvalues(compose(g, omega, edge=edge, epsilon=epsilon, chi=0.0)).values
    decays = [-z.real for z in vals if -z.real > 1e-12]
    if not decays:
        raise NumericalError("generator has no decaying mode; burn-in undefined")
    return 10.0 / min(decays)


def simulate(
    g: Graph,
    omega: float,
    edge: tuple,
    epsilon: float,
    dt: float,
    s: int,
    burn_in: float | None = None,
    seed: int = 0,
    stream: int = 0,
    use_numba: bool | None = None,
) -> CountRecord:
    """Single long trajectory, counted on the aux channel in s windows of
    length dt after burn_in (defaults to 10 slowest relaxation times).

    The Philox stream is keyed by (seed, stream), so batches that vary
    stream are independent yet individually reproducible."""
    if dt <= 0:
        raise ValueError(f"window length dt must be positive, got {dt}")
    if s <= 0:
        raise ValueError(f"window count s must be positive, got {s}")
    channels = channel_set(g, omega, edge, epsilon)
    if burn_in is None:
        burn_in = default_burn_in(g, omega, edge, epsilon)
    if burn_in < 0:
        raise ValueError(f"burn_in must be nonnegative, got {burn_in}")
    lam, v, vinv = _propagator(_effective_hamiltonian(g, omega, channels))
    counts = np.zeros(s, dtype=np.int64)
    occ = np.zeros(g.n, dtype=np.float64)
    gen = np.random.Generator(
        np.random.Philox(key=np.array([seed, stream], dtype=np.uint64))
    )
    kernel, _ = _resolve_kernel(use_numba)
    status = kernel(
        gen, lam, v, vinv, channels.srcs, channels.dsts, channels.rates,
        channels.counted, 0, float(dt), int(s), float(burn_in), counts, occ,
    )
    if status != 0:
        raise NumericalError(
            "norm-decay bookkeeping violated during jump-time bisection"
        )
    params = {
        "n": g.n,
        "edges": sorted(list(e) for e in g.edges),
        "omega": omega,
        "edge": list(edge),
        "epsilon": quantize_rate(epsilon),
        "dt": dt,
        "windows": s,
        "burn_in": burn_in,
        "seed": seed,
        "stream": stream,
    }
    return CountRecord(
        counts=counts,
        dt=dt,
        windows=s,
        burn_in=burn_in,
        seed=seed,
        stream=stream,
        occupations=occ / s,
        params=params,
    )


def k_statistics(rec: CountRecord, order: int = 4) -> CumulantEstimates:
    """Unbiased cumulant estimators (k-statistics) of the window counts,
    divided by dt to estimate the reduced cumulants c_k."""
    if not 1 <= order <= 4:
        raise ValueError(f"estimator order must be 1..4, got {order}")
    s = rec.windows
    if s <= order:
        raise ValueError(f"need more than {order} windows, got {s}")
    x = rec.counts.astype(np.float64)
    mean = x.mean()
    d = x - mean
    m2 = (d**2).mean()
    m3 = (d**3).mean()
    m4 = (d**4).mean()
    k = [mean]
    if order >= 2:
        k.append(s / (s - 1) * m2)
    if order >= 3:
        k.append(s**2 / ((s - 1) * (s - 2)) * m3)
    if order >= 4:
        k.append(
            s**2 * ((s + 1) * m4 - 3 * (s - 1) * m2**2)
            / ((s - 1) * (s - 2) * (s - 3))
        )
    k2 = k[1] if order >= 2 else s / (s - 1) * m2
    k4 = k[3] if order >= 4 else 0.0
    se = [math.sqrt(max(k2, 0.0) / s)]
    if order >= 2:
        # var(k2) = kappa4/s + 2 kappa2^2/(s-1)
        se.append(math.sqrt(max(k4 / s + 2 * k2**2 / (s - 1), 0.0)))
    if order >= 3:
        se.append(math.sqrt(max(6 * k2**3, 0.0) / s))
    if order >= 4:
        se.append(math.sqrt(max(24 * k2**4, 0.0) / s))
    values = tuple(v / rec.dt for v in k)
    stderr = tuple(v / rec.dt for v in se)
    return CumulantEstimates(order=order, values=values, stderr=stderr, s=s, dt=rec.dt)


def variance_scaling_check(
    g: Graph,
    omega: float,
    edge: tuple,
    epsilon: float,
    k: int,
    s_grid,
    dt: float = 10.0,
    batches: int = 12,
    burn_in: float | None = None,
    seed: int = 0,
) -> dict:
    """Empirical variance of the order-k estimator across independent
    batches, regressed against the window count.  The estimator variance
    should scale as 1/s; the report carries the fitted exponent."""
    if not 1 <= k <= 4:
        raise ValueError(f"estimator order must be 1..4, got {k}")
    s_grid = [int(s) for s in s_grid]
    if len(s_grid) < 2:
        raise ValueError("need at least two sample sizes to fit a scaling exponent")
    if batches < 3:
        raise ValueError(f"need at least 3 batches, got {batches}")
    if burn_in is None:
        burn_in = default_burn_in(g, omega, edge, epsilon)
    variances = []
    for si, s in enumerate(s_grid):
        ests = []
        for b in range(batches):
            rec = simulate(
                g, omega, edge, epsilon, dt, s,
                burn_in=burn_in, seed=seed, stream=si * 10_000 + b + 1,
            )
            ests.append(k_statistics(rec, order=max(k, 2)).values[k - 1])
        var = float(np.var(ests, ddof=1))
        if var == 0.0:
            raise ValueError(
                f"zero variance across batches at s = {s}: degenerate input"
            )
        variances.append(var)
    slope = np.polyfit(np.log(np.array(s_grid, float)), np.log(variances), 1)[0]
    return {
        "k": k,
        "s_grid": s_grid,
        "variances": variances,
        "exponent": float(-slope),
        "batches": batches,
        "dt": dt,
        "burn_in": burn_in,
        "seed": seed,
    }


def write_csv(rec: CountRecord, path: str) -> str:
    """CountRecord to CSV ("window,count" rows) plus a .meta.json sidecar
    carrying every parameter, the seed, and the occupation diagnostic.
    Returns the sidecar path."""
    with open(path, "w") as fh:
        fh.write("window,count\n")
        for w, c in enumerate(rec.counts):
            fh.write(f"{w},{int(c)}\n")
    base, _ = os.path.splitext(path)
    sidecar = base + ".meta.json"
    meta = dict(rec.params)
    meta["occupations"] = [float(x) for x in rec.occupations]
    with open(sidecar, "w") as fh:
        json.dump(meta, fh, indent=1)
        fh.write("\n")
    return sidecar

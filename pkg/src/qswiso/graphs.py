"""Graph data model, matrix representations, graph6 codec, named fixtures,
and a brute-force isomorphism oracle for small instances.

Vertices are 0-based throughout the library; the CLI converts 1-based labels
at the boundary.  Matrix representations are plain numpy float arrays
(symmetric by construction).  A permutation is any length-n integer sequence
p where p[i] is the new label of vertex i.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DisconnectedGraphError, Graph6ParseError, SizeLimitError

__all__ = [
    "Graph",
    "adjacency",
    "laplacian",
    "signless_laplacian",
    "complement_adjacency",
    "degrees",
    "apply_permutation",
    "parse_graph6",
    "encode_graph6",
    "named_graph",
    "are_isomorphic_bruteforce",
]


@dataclass(frozen=True)
class Graph:
    """Undirected simple connected graph on vertices 0..n-1.

    edges holds unordered pairs normalized to (i, j) with i < j.  Construction
    validates simplicity and connectivity; a disconnected edge set raises
    DisconnectedGraphError (the walk generators assume a unique steady state,
    which needs connectivity).
    """

    n: int
    edges: frozenset

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"vertex count must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "edges", frozenset(self.edges))
        for e in self.edges:
            if not (isinstance(e, tuple) and len(e) == 2):
                raise ValueError(f"edge {e!r} is not a pair")
            i, j = e
            if not (isinstance(i, int) and isinstance(j, int)):
                raise ValueError(f"edge {e!r} has non-integer endpoints")
            if i == j:
                raise ValueError(f"self-loop at vertex {i} not allowed")
            if not (0 <= i < j < self.n):
                raise ValueError(f"edge {e!r} out of range or not normalized (need 0 <= i < j < n)")
        if not _edge_set_connected(self.n, self.edges):
            raise DisconnectedGraphError(
                f"graph on {self.n} vertices with {len(self.edges)} edges is not connected"
            )

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[Sequence[int]]) -> "Graph":
        """Build a Graph from any iterable of (i, j) pairs, normalizing order."""
        norm = set()
        for pair in pairs:
            i, j = int(pair[0]), int(pair[1])
            if i == j:
                raise ValueError(f"self-loop at vertex {i} not allowed")
            norm.add((min(i, j), max(i, j)))
        return cls(n, frozenset(norm))

    @property
    def m(self) -> int:
        """Edge count."""
        return len(self.edges)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={sorted(self.edges)})"


def _edge_set_connected(n: int, edges) -> bool:
    if n == 1:
        return True
    adj = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = [False] * n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                count += 1
                stack.append(w)
    return count == n


def adjacency(g: Graph) -> np.ndarray:
    """Symmetric 0/1 adjacency matrix A with zero diagonal."""
    a = np.zeros((g.n, g.n))
    for i, j in g.edges:
        a[i, j] = 1.0
        a[j, i] = 1.0
    return a


def degrees(g: Graph) -> np.ndarray:
    """Degree vector d as a float array."""
    return adjacency(g).sum(axis=1)


def laplacian(g: Graph) -> np.ndarray:
    """Graph Laplacian L = D - A; rows sum to zero."""
    a = adjacency(g)
    return np.diag(a.sum(axis=1)) - a


def signless_laplacian(g: Graph) -> np.ndarray:
    """Signless Laplacian |L| = D + A."""
    a = adjacency(g)
    return np.diag(a.sum(axis=1)) + a


def complement_adjacency(g: Graph) -> np.ndarray:
    """Adjacency of the complement graph, J - A - I."""
    a = adjacency(g)
    return np.ones((g.n, g.n)) - a - np.eye(g.n)


def apply_permutation(g: Graph, p: Sequence[int]) -> Graph:
    """Relabel vertices: vertex i becomes p[i].

    The result has edge (p[i], p[j]) for every edge (i, j) of g, so its
    adjacency satisfies A' = P A P^T with P[p[i], i] = 1.
    """
    p = [int(x) for x in p]
    if len(p) != g.n:
        raise ValueError(f"permutation length {len(p)} does not match n={g.n}")
    if sorted(p) != list(range(g.n)):
        raise ValueError("permutation is not a bijection on 0..n-1")
    return Graph.from_edges(g.n, ((p[i], p[j]) for i, j in g.edges))


# ---------------------------------------------------------------------------
# graph6 codec (short form, n <= 62), per the standard nauty format:
# header byte 63+n, then the upper triangle of A read column by column
# (columns j = 1..n-1, rows i = 0..j-1), packed big-endian into 6-bit
# chunks, each offset by 63. Padding bits are zero.
# ---------------------------------------------------------------------------

_G6_OPTIONAL_PREFIX = ">>graph6<<"


def parse_graph6(line: str) -> Graph:
    """Decode one graph6 line into a Graph.

    Accepts the optional '>>graph6<<' file prefix. Raises Graph6ParseError on
    malformed input, and DisconnectedGraphError if the encoded graph is not
    connected.
    """
    text = line.strip()
    if text.startswith(_G6_OPTIONAL_PREFIX):
        text = text[len(_G6_OPTIONAL_PREFIX):]
    if not text:
        raise Graph6ParseError("empty graph6 line")
    codes = [ord(c) for c in text]
    for pos, c in enumerate(codes):
        if not 63 <= c <= 126:
            raise Graph6ParseError(
                f"byte {c} at position {pos} outside the graph6 alphabet (63..126)"
            )
    if codes[0] == 126:
        raise Graph6ParseError("long-form graph6 (n > 62) is not supported")
    n = codes[0] - 63
    if n < 1:
        raise Graph6ParseError("graph6 vertex count must be at least 1")
    nbits = n * (n - 1) // 2
    nbytes = (nbits + 5) // 6
    payload = codes[1:]
    if len(payload) != nbytes:
        raise Graph6ParseError(
            f"payload holds {len(payload)} bytes, expected {nbytes} for n={n}"
        )
    bits = []
    for c in payload:
        val = c - 63
        bits.extend((val >> shift) & 1 for shift in range(5, -1, -1))
    if any(bits[nbits:]):
        raise Graph6ParseError("nonzero padding bits in graph6 payload")
    edges = set()
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                edges.add((i, j))
            k += 1
    return Graph(n, frozenset(edges))


def encode_graph6(g: Graph) -> str:
    """Encode a Graph as a short-form graph6 string (n <= 62)."""
    if g.n > 62:
        raise SizeLimitError(f"graph6 short form caps at n=62, got n={g.n}")
    edge_set = g.edges
    bits = []
    for j in range(1, g.n):
        for i in range(j):
            bits.append(1 if (i, j) in edge_set else 0)
    while len(bits) % 6:
        bits.append(0)
    out = [chr(g.n + 63)]
    for k in range(0, len(bits), 6):
        val = 0
        for b in bits[k:k + 6]:
            val = (val << 1) | b
        out.append(chr(val + 63))
    return "".join(out)


# ---------------------------------------------------------------------------
# Named fixtures
# ---------------------------------------------------------------------------


def named_graph(name: str, n: int | None = None) -> Graph:
    """Construct a named fixture graph.

    Known names: 'path' (needs n), 'cycle' (needs n >= 3), 'complete'
    (needs n), 'shrikhande', 'rook4'.  Also accepts compact forms like
    'path:4' or 'path4'.
    """
    key = name.strip().lower()
    for fam in ("path", "cycle", "complete"):
        if key.startswith(fam) and key != fam:
            suffix = key[len(fam):].lstrip(":_- ")
            if suffix.isdigit():
                if n is not None:
                    raise ValueError(f"vertex count given twice in {name!r}")
                key, n = fam, int(suffix)
    if key == "path":
        if n is None or n < 1:
            raise ValueError("path requires a positive vertex count")
        return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))
    if key == "cycle":
        if n is None or n < 3:
            raise ValueError("cycle requires a vertex count of at least 3")
        return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))
    if key == "complete":
        if n is None or n < 1:
            raise ValueError("complete requires a positive vertex count")
        return Graph.from_edges(n, ((i, j) for i in range(n) for j in range(i + 1, n)))
    if key == "shrikhande":
        # Cayley graph on Z4 x Z4 with connection set +-{(1,0),(0,1),(1,1)}.
        if n is not None:
            raise ValueError("shrikhande takes no vertex count")
        deltas = {(1, 0), (0, 1), (1, 1), (3, 0), (0, 3), (3, 3)}
        edges = set()
        for a in range(4):
            for b in range(4):
                for c in range(4):
                    for d in range(4):
                        if ((a - c) % 4, (b - d) % 4) in deltas:
                            u, v = 4 * a + b, 4 * c + d
                            if u < v:
                                edges.add((u, v))
        return Graph(16, frozenset(edges))
    if key == "rook4":
        # 4x4 rook's graph L2(4): vertices on a grid, adjacent iff same row or column.
        if n is not None:
            raise ValueError("rook4 takes no vertex count")
        edges = set()
        for a in range(4):
            for b in range(4):
                for c in range(4):
                    for d in range(4):
                        if (a, b) != (c, d) and (a == c or b == d):
                            u, v = 4 * a + b, 4 * c + d
                            if u < v:
                                edges.add((u, v))
        return Graph(16, frozenset(edges))
    raise ValueError(f"unknown graph name {name!r}")


# ---------------------------------------------------------------------------
# Brute-force isomorphism oracle.
#
# Internals work on adjacency rows packed as integer bitmasks; color
# refinement narrows candidate images before a forward-checking backtracking
# search. These row-level helpers are shared with the catalog enumerator.
# ---------------------------------------------------------------------------


def _adjacency_rows(n: int, edges) -> tuple:
    rows = [0] * n
    for i, j in edges:
        rows[i] |= 1 << j
        rows[j] |= 1 << i
    return tuple(rows)


def _refined_colors(rows, n: int) -> tuple:
    """Iterated degree refinement; returns a canonical color per vertex."""
    colors = [r.bit_count() for r in rows]
    for _ in range(n):
        sigs = []
        for v in range(n):
            neigh = []
            rest = rows[v]
            while rest:
                low = rest & -rest
                neigh.append(colors[low.bit_length() - 1])
                rest ^= low
            neigh.sort()
            sigs.append((colors[v], tuple(neigh)))
        relabel = {s: k for k, s in enumerate(sorted(set(sigs)))}
        new = [relabel[s] for s in sigs]
        if new == colors:
            break
        colors = new
    return tuple(colors)


def _rows_connected(rows, n: int) -> bool:
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        rest = frontier
        while rest:
            low = rest & -rest
            nxt |= rows[low.bit_length() - 1]
            rest ^= low
        frontier = nxt & ~seen
        seen |= nxt
    return seen == (1 << n) - 1


def _iso_rows(rows1, rows2, n: int, colors1=None, colors2=None) -> bool:
    """Isomorphism test on bitmask adjacency rows (equal n assumed)."""
    d1 = sorted(r.bit_count() for r in rows1)
    d2 = sorted(r.bit_count() for r in rows2)
    if d1 != d2:
        return False
    if colors1 is None:
        colors1 = _refined_colors(rows1, n)
    if colors2 is None:
        colors2 = _refined_colors(rows2, n)
    if sorted(colors1) != sorted(colors2):
        return False

    cand = []
    for v in range(n):
        mask = 0
        for w in range(n):
            if colors2[w] == colors1[v]:
                mask |= 1 << w
        if not mask:
            return False
        cand.append(mask)
    order = sorted(range(n), key=lambda v: (cand[v].bit_count(), -rows1[v].bit_count()))
    cand = [cand[v] for v in order]

    def extend(depth: int, cands, used: int) -> bool:
        if depth == n:
            return True
        v = order[depth]
        avail = cands[depth] & ~used
        while avail:
            low = avail & -avail
            avail ^= low
            w = low.bit_length() - 1
            wrow = rows2[w]
            narrowed = list(cands)
            feasible = True
            for ahead in range(depth + 1, n):
                u = order[ahead]
                m = narrowed[ahead] & ~low
                if (rows1[u] >> v) & 1:
                    m &= wrow
                else:
                    m &= ~wrow
                if not m:
                    feasible = False
                    break
                narrowed[ahead] = m
            if feasible and extend(depth + 1, narrowed, used | low):
                return True
        return False

    return extend(0, cand, 0)


def are_isomorphic_bruteforce(g1: Graph, g2: Graph, max_n: int = 10) -> bool:
    """Decide isomorphism by pruned exhaustive search.

    Factorial worst case; refuses n > max_n (default 10).  The cap can be
    raised explicitly for structured fixtures where refinement-guided search
    stays shallow despite the size.  Graphs with different vertex counts
    compare unequal without search.
    """
    if g1.n != g2.n:
        return False
    if g1.n > max_n:
        raise SizeLimitError(
            f"brute-force isomorphism capped at n={max_n}, got n={g1.n}; "
            "pass max_n explicitly to override"
        )
    if g1.m != g2.m:
        return False
    return _iso_rows(
        _adjacency_rows(g1.n, g1.edges),
        _adjacency_rows(g2.n, g2.edges),
        g1.n,
    )

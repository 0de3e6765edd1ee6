"""(G, C0) expander codes on Delta-regular bipartite graphs.

Symbols live on edges.  A word is a codeword iff, at every vertex on both
sides, the Delta symbols on its incident edges (in global edge order) form a
codeword of the local Reed-Solomon code C0.  Decoding follows Zemor:
alternate sides, locally decoding every vertex of the current side.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from ._validation import check_symbols
from .channel import as_generator
from .exceptions import BadParams, DimensionBoundViolation, LengthMismatch, SamplingExhausted
from .linear_code import LinearCode, null_space
from .reed_solomon import RSCode

MAX_GRAPH_ATTEMPTS = 100
LAMBDA_SLACK = 0.1
LEMMA_ALPHA = 0.9


@dataclass(frozen=True)
class BipartiteGraph:
    """Delta-regular bipartite graph with ``m`` vertices per side.

    ``edges[e] = (a, b)``; edges are sorted lexicographically, which fixes
    the global edge order.  ``inc_a[a]`` and ``inc_b[b]`` are the sorted
    edge indices incident to each vertex.
    """

    delta: int
    m: int
    edges: np.ndarray
    inc_a: np.ndarray = field(repr=False)
    inc_b: np.ndarray = field(repr=False)

    @classmethod
    def from_edges(cls, edges, delta: int, m: int) -> "BipartiteGraph":
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges = edges[order]
        if len(edges) != m * delta:
            raise BadParams(f"expected {m * delta} edges, got {len(edges)}")
        if len({(int(a), int(b)) for a, b in edges}) != len(edges):
            raise BadParams("multi-edges are not allowed")
        deg_a = np.bincount(edges[:, 0], minlength=m)
        deg_b = np.bincount(edges[:, 1], minlength=m)
        if np.any(deg_a != delta) or np.any(deg_b != delta) or len(deg_a) != m or len(deg_b) != m:
            raise BadParams("graph is not delta-regular on both sides")
        idx = np.arange(len(edges))
        inc_a = idx.reshape(m, delta)
        inc_b = np.argsort(edges[:, 1], kind="stable").reshape(m, delta)
        return cls(delta, m, edges, inc_a, inc_b)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        m = self.m
        A = np.zeros((2 * m, 2 * m))
        A[self.edges[:, 0], m + self.edges[:, 1]] = 1
        A[m + self.edges[:, 1], self.edges[:, 0]] = 1
        return A

    def to_dict(self) -> dict:
        return {"delta": self.delta, "m": self.m, "edges": self.edges.tolist()}

    @classmethod
    def from_dict(cls, d) -> "BipartiteGraph":
        return cls.from_edges(d["edges"], d["delta"], d["m"])


def lemma_threshold(delta0: float, N_out: int, lam: float, delta_graph: int, alpha: float = LEMMA_ALPHA) -> float:
    """``(alpha delta0 N_out / 2) (delta0 / 2 - lam / delta_graph)``."""
    return alpha * delta0 * N_out / 2 * (delta0 / 2 - lam / delta_graph)


def second_eigenvalue(graph: BipartiteGraph) -> float:
    """Second-largest eigenvalue of the (2m x 2m) adjacency matrix."""
    ev = np.linalg.eigvalsh(graph.adjacency())
    return float(ev[-2])


def _random_matching_union(delta, m, rng):
    """Union of ``delta`` edge-disjoint perfect matchings.

    Each matching is a maximum matching of the complement of the edges chosen
    so far, computed on randomly relabelled vertices.
    """
    used = np.zeros((m, m), dtype=bool)
    for _ in range(delta):
        pa, pb = rng.permutation(m), rng.permutation(m)
        free = ~used[np.ix_(pa, pb)]
        match = maximum_bipartite_matching(csr_matrix(free), perm_type="column")
        if np.any(match < 0):
            return None
        used[pa, pb[match]] = True
    a, b = np.nonzero(used)
    return np.stack([a, b], axis=1)


def random_regular_bipartite(delta: int, m: int, rng=None, lambda_target: float | None = None) -> BipartiteGraph:
    """Random Delta-regular bipartite graph with measured ``lambda <= lambda_target``.

    The default target is ``2*sqrt(delta-1) + 0.1``.  Raises SamplingExhausted
    after 100 rejected draws.
    """
    if delta < 3 or m < delta:
        raise BadParams(f"need delta >= 3 and m >= delta, got delta={delta}, m={m}")
    rng = as_generator(rng)
    if lambda_target is None:
        lambda_target = 2 * math.sqrt(delta - 1) + LAMBDA_SLACK
    best = math.inf
    for _ in range(MAX_GRAPH_ATTEMPTS):
        edges = _random_matching_union(delta, m, rng)
        if edges is None:
            continue
        g = BipartiteGraph.from_edges(edges, delta, m)
        lam = second_eigenvalue(g)
        best = min(best, lam)
        if lam <= lambda_target + 1e-9:
            return g
    raise SamplingExhausted(f"no graph with lambda <= {lambda_target:.4f} in {MAX_GRAPH_ATTEMPTS} draws (best {best:.4f})")


class ExpanderCode:
    """The (G, C0) code.

    Parameters
    ----------
    graph : BipartiteGraph
    local : RSCode
        Local code of length ``graph.delta``.
    lam : float, optional
        Second eigenvalue; measured when omitted.
    """

    def __init__(self, graph: BipartiteGraph, local: RSCode, lam: float | None = None):
        if local.N != graph.delta:
            raise LengthMismatch(f"local code length {local.N} != delta {graph.delta}")
        if local.field.order <= graph.delta:
            raise BadParams("field must have more than delta elements")
        self.graph = graph
        self.local = local
        self.field = local.field
        self.N = graph.num_edges
        self.lam = second_eigenvalue(graph) if lam is None else float(lam)
        H = self.parity_check_matrix()
        basis = null_space(self.field, H) if H.shape[0] else np.eye(self.N, dtype=np.int64)
        self.dimension_bound = self.N * (1 - 2 * (local.N - local.K) / local.N)
        if len(basis) < self.dimension_bound - 1e-9:
            raise DimensionBoundViolation(f"dimension {len(basis)} below bound {self.dimension_bound}")
        self._code = LinearCode(self.field, basis) if len(basis) else None
        self.dimension = len(basis)

    def __repr__(self):
        return (f"ExpanderCode(N={self.N}, dim={self.dimension}, delta={self.graph.delta}, "
                f"k0={self.local.K}, lambda={self.lam:.4f})")

    @property
    def generator(self) -> np.ndarray:
        if self._code is None:
            return np.zeros((0, self.N), dtype=np.int64)
        return self._code.G_sys

    @property
    def K(self) -> int:
        return self.dimension

    @property
    def rate(self) -> float:
        return self.dimension / self.N

    @property
    def delta0(self) -> float:
        return self.local.d / self.graph.delta

    def parity_check_matrix(self) -> np.ndarray:
        """Stacked local checks, one ``(delta - k0)``-row block per vertex (A then B)."""
        H0 = self.local.parity_check_matrix
        r0 = H0.shape[0]
        g = self.graph
        H = np.zeros((2 * g.m * r0, self.N), dtype=np.int64)
        for side, inc in enumerate((g.inc_a, g.inc_b)):
            for v in range(g.m):
                row = (side * g.m + v) * r0
                H[row:row + r0, inc[v]] = H0
        return H

    def lemma_threshold(self, alpha: float = LEMMA_ALPHA) -> float:
        """Error count below which iterative decoding provably succeeds (real-valued)."""
        return lemma_threshold(self.delta0, self.N, self.lam, self.graph.delta, alpha)

    def local_words(self, r, side: int) -> np.ndarray:
        inc = self.graph.inc_a if side == 0 else self.graph.inc_b
        return np.asarray(r)[..., inc]

    def unsatisfied(self, r, side: int | None = None) -> int:
        """Number of vertices whose local word is not in C0."""
        sides = (0, 1) if side is None else (side,)
        return int(sum((~self.local.is_codeword(self.local_words(r, s))).sum() for s in sides))

    def is_codeword(self, r) -> bool:
        return self.unsatisfied(r) == 0

    def encode(self, m) -> np.ndarray:
        m = check_symbols(m, self.field.order, self.dimension)
        if self._code is None:
            return np.zeros(m.shape[:-1] + (self.N,), dtype=np.int64)
        return self._code.encode(m)

    def message_of(self, c) -> np.ndarray:
        c = np.asarray(c, dtype=np.int64)
        if self._code is None:
            return np.zeros(c.shape[:-1] + (0,), dtype=np.int64)
        return self._code.message_of(c)

    @functools.cached_property
    def default_max_rounds(self) -> int:
        return math.ceil(math.log2(self.N)) + 2

    def decode(self, r, max_rounds: int | None = None) -> np.ndarray:
        """Zemor decoding; returns the final word (possibly not a codeword)."""
        return zemor_decode(self, r, max_rounds)


def zemor_decode(code: ExpanderCode, r, max_rounds: int | None = None, trace: list | None = None) -> np.ndarray:
    """Alternate local bounded-distance decoding over sides A and B.

    ``max_rounds`` counts full A/B sweeps.  Stops once two consecutive half
    rounds leave the word unchanged.  Vertices whose local decode fails keep
    their symbols.  If ``trace`` is a list, the number of unsatisfied
    vertices on the decoded side before and after each half round is
    appended to it.
    """
    x = check_symbols(r, code.field.order, code.N).copy()
    if x.ndim != 1:
        raise ValueError("zemor_decode takes a single word")
    if max_rounds is None:
        max_rounds = code.default_max_rounds
    g = code.graph
    quiet = 0
    for half in range(2 * max_rounds):
        inc = g.inc_a if half % 2 == 0 else g.inc_b
        words = x[inc]
        before = None if trace is None else int((~code.local.is_codeword(words)).sum())
        fixed, _ = code.local.decode_words(words)
        changed = np.any(fixed != words)
        if changed:
            x[inc] = fixed
        if trace is not None:
            trace.append((before, int((~code.local.is_codeword(x[inc])).sum())))
        quiet = 0 if changed else quiet + 1
        if quiet >= 2:
            break
    return x


def expander_build(graph: BipartiteGraph, local: RSCode, lam: float | None = None) -> ExpanderCode:
    return ExpanderCode(graph, local, lam)


def expander_encode(code: ExpanderCode, m):
    return code.encode(m)

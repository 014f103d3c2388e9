"""
Simple undirected graphs, canonical arc indexing and graph6 I/O.

Every matrix built elsewhere in the package is indexed by the arc order
fixed here: arcs ``(u, v)`` sorted lexicographically by tail, then head.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from qwalk.errors import ParameterError, ParseError

__all__ = [
    "Graph",
    "ArcTable",
    "arc_table",
    "parse_graph6",
    "write_graph6",
    "bipartite_double_cover",
    "find_isomorphism",
    "is_isomorphic",
    "complete_graph",
    "complete_bipartite_graph",
    "cycle_graph",
    "path_graph",
    "prism_graph",
    "hypercube_graph",
]

_GRAPH6_MAX_N = 62
_HEADER = ">>graph6<<"


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    Construct with :meth:`from_edges` or :meth:`from_adjacency`; both
    validate simplicity and normalize neighbor lists to sorted tuples.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise ParameterError("adjacency must list one neighbor tuple per vertex")
        for u, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise ParameterError(f"neighbors of {u} must be sorted and distinct")
            for v in nbrs:
                if v == u:
                    raise ParameterError(f"loop at vertex {u}")
                if not 0 <= v < self.n or u not in self.adjacency[v]:
                    raise ParameterError(f"adjacency is not symmetric at ({u}, {v})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ParameterError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge ({u}, {v}) out of range for n={n}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @classmethod
    def from_adjacency(cls, adjacency: Sequence[Iterable[int]]) -> "Graph":
        return cls(len(adjacency), tuple(tuple(sorted(set(a))) for a in adjacency))

    @classmethod
    def from_matrix(cls, a) -> "Graph":
        a = np.asarray(a)
        return cls.from_adjacency([np.flatnonzero(row).tolist() for row in a])

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    @property
    def num_edges(self) -> int:
        return sum(self.degrees) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def regular_degree(self) -> int | None:
        """Common degree if the graph is regular, else ``None``."""
        degs = set(self.degrees)
        if len(degs) == 1:
            return degs.pop()
        if self.n == 0:
            return 0
        return None

    def is_regular(self) -> bool:
        return self.regular_degree() is not None

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in self.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.n

    def bipartition(self) -> tuple[int, ...] | None:
        """Return a 0/1 coloring of the vertices, or ``None`` if not bipartite."""
        color = [-1] * self.n
        for s in range(self.n):
            if color[s] != -1:
                continue
            color[s] = 0
            stack = [s]
            while stack:
                u = stack.pop()
                for v in self.adjacency[u]:
                    if color[v] == -1:
                        color[v] = 1 - color[u]
                        stack.append(v)
                    elif color[v] == color[u]:
                        return None
        return tuple(color)

    def is_bipartite(self) -> bool:
        return self.bipartition() is not None

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=int)
        for u, nbrs in enumerate(self.adjacency):
            a[u, list(nbrs)] = 1
        return a

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex ``u`` renamed ``perm[u]``."""
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges()))

    @cached_property
    def arcs(self) -> "ArcTable":
        return arc_table(self)


@dataclass(frozen=True)
class ArcTable:
    """Lexicographically ordered arcs of a graph with a reverse lookup."""

    arcs: tuple[tuple[int, int], ...]
    index: dict[tuple[int, int], int] = field(compare=False, repr=False)

    def __len__(self):
        return len(self.arcs)

    def __iter__(self):
        return iter(self.arcs)

    def __getitem__(self, i):
        return self.arcs[i]

    @cached_property
    def reversal(self) -> np.ndarray:
        """Index array ``r`` with ``arcs[r[i]] == reversed(arcs[i])``."""
        return np.array([self.index[(v, u)] for u, v in self.arcs], dtype=int)

    def out_arcs(self, u: int) -> list[int]:
        return [i for i, (a, _) in enumerate(self.arcs) if a == u]


def arc_table(g: Graph) -> ArcTable:
    arcs = tuple((u, v) for u in range(g.n) for v in g.adjacency[u])
    return ArcTable(arcs, {a: i for i, a in enumerate(arcs)})


# --------------------------------------------------------------------------
# graph6
# --------------------------------------------------------------------------

def parse_graph6(text: str) -> Graph:
    """Decode a short-form graph6 string (n <= 62).

    A leading ``>>graph6<<`` header and surrounding whitespace are accepted.
    """
    s = text.strip()
    base = 0
    if s.startswith(_HEADER):
        s = s[len(_HEADER):]
        base = len(_HEADER)
    if not s:
        raise ParseError("empty graph6 string", base)
    for i, ch in enumerate(s):
        if not 63 <= ord(ch) <= 126:
            raise ParseError(f"byte {ch!r} outside the graph6 range 63..126", base + i)
    n = ord(s[0]) - 63
    if n > _GRAPH6_MAX_N:
        raise ParseError("only short-form graph6 (n <= 62) is supported", base)
    nbits = n * (n - 1) // 2
    nbytes = -(-nbits // 6)
    if len(s) < 1 + nbytes:
        raise ParseError(f"truncated: expected {1 + nbytes} bytes, got {len(s)}", base + len(s))
    if len(s) > 1 + nbytes:
        raise ParseError("trailing bytes after edge data", base + 1 + nbytes)
    bits = []
    for ch in s[1:]:
        x = ord(ch) - 63
        bits.extend((x >> (5 - k)) & 1 for k in range(6))
    if any(bits[nbits:]):
        raise ParseError("nonzero padding bits", base + len(s) - 1)
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                edges.append((i, j))
            k += 1
    return Graph.from_edges(n, edges)


def write_graph6(g: Graph) -> str:
    if g.n > _GRAPH6_MAX_N:
        raise ParameterError(f"graph6 short form supports n <= 62, got n={g.n}")
    bits = [1 if g.has_edge(i, j) else 0 for j in range(1, g.n) for i in range(j)]
    bits.extend([0] * (-len(bits) % 6))
    out = [chr(g.n + 63)]
    for k in range(0, len(bits), 6):
        x = 0
        for b in bits[k:k + 6]:
            x = (x << 1) | b
        out.append(chr(x + 63))
    return "".join(out)


# --------------------------------------------------------------------------
# constructions
# --------------------------------------------------------------------------

def bipartite_double_cover(g: Graph) -> Graph:
    """``K2 x g``: vertex ``u`` keeps its label, ``u'`` becomes ``n + u``."""
    return Graph.from_edges(2 * g.n, ((u, g.n + v) for u in range(g.n) for v in g.adjacency[u]))


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def complete_bipartite_graph(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, ((u, a + v) for u in range(a) for v in range(b)))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((u, (u + 1) % n) for u in range(n)))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((u, u + 1) for u in range(n - 1)))


def prism_graph(k: int) -> Graph:
    """``K2 [] C_k``: two k-cycles ``0..k-1`` and ``k..2k-1`` joined by rungs."""
    edges = []
    for i in range(k):
        edges += [(i, (i + 1) % k), (k + i, k + (i + 1) % k), (i, k + i)]
    return Graph.from_edges(2 * k, edges)


def hypercube_graph(dim: int) -> Graph:
    n = 1 << dim
    return Graph.from_edges(n, ((u, u ^ (1 << b)) for u in range(n) for b in range(dim)))


# --------------------------------------------------------------------------
# isomorphism (backtracking; desk-scale graphs only)
# --------------------------------------------------------------------------

def find_isomorphism(g: Graph, h: Graph) -> list[int] | None:
    """Return ``phi`` with ``g.has_edge(u, v) == h.has_edge(phi[u], phi[v])``.

    Plain backtracking with degree pruning, vertices of ``g`` taken in BFS
    order so each new vertex usually has an already-mapped neighbor.
    """
    if g.n != h.n or g.num_edges != h.num_edges or sorted(g.degrees) != sorted(h.degrees):
        return None
    order = _bfs_order(g)
    phi = [-1] * g.n
    used = [False] * h.n

    def extend(k):
        if k == g.n:
            return True
        u = order[k]
        mapped_nbrs = [phi[w] for w in g.adjacency[u] if phi[w] >= 0]
        if mapped_nbrs:
            candidates = h.adjacency[mapped_nbrs[0]]
        else:
            candidates = range(h.n)
        for x in candidates:
            if used[x] or h.degree(x) != g.degree(u):
                continue
            ok = True
            for w in order[:k]:
                if g.has_edge(u, w) != h.has_edge(x, phi[w]):
                    ok = False
                    break
            if not ok:
                continue
            phi[u] = x
            used[x] = True
            if extend(k + 1):
                return True
            phi[u] = -1
            used[x] = False
        return False

    return list(phi) if extend(0) else None


def is_isomorphic(g: Graph, h: Graph) -> bool:
    return find_isomorphism(g, h) is not None


def _bfs_order(g: Graph) -> list[int]:
    order, seen = [], [False] * g.n
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        queue = [s]
        while queue:
            u = queue.pop(0)
            order.append(u)
            for v in g.adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
    return order

"""
Shunt-decompositions of regular graphs and linear orders of neighbors.

A shunt is a vertex permutation sending every vertex to a neighbor. A
d-regular graph's adjacency matrix splits as a sum of d shunts exactly when
the shunts disagree at every vertex; such a split is the same thing as a
1-factorization of the bipartite double cover.

Permutations are stored as index tuples ``p`` with ``p[u]`` the image of
``u``; the matching 0/1 matrix has ``P[p[u], u] = 1``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from qwalk.errors import InvalidOrdersError, ParameterError, ParseError, PreconditionError
from qwalk.graph import Graph

__all__ = [
    "LinearOrders",
    "ShuntDecomposition",
    "permutation_matrix",
    "cycles",
    "cycle_type",
    "format_cycles",
    "enumerate_shunt_decompositions",
    "is_symmetric",
    "cycle_signature",
    "validate_linear_orders_for_shunt_model",
    "parse_shunt_decomposition",
]


def permutation_matrix(p: Sequence[int]) -> np.ndarray:
    n = len(p)
    m = np.zeros((n, n), dtype=int)
    m[list(p), np.arange(n)] = 1
    return m


def cycles(p: Sequence[int]) -> list[tuple[int, ...]]:
    """Cycles of ``p``, each starting at its least element, ordered by it."""
    seen = [False] * len(p)
    out = []
    for s in range(len(p)):
        if seen[s]:
            continue
        c = [s]
        seen[s] = True
        x = p[s]
        while x != s:
            c.append(x)
            seen[x] = True
            x = p[x]
        out.append(tuple(c))
    return out


def cycle_type(p: Sequence[int]) -> tuple[int, ...]:
    return tuple(sorted(len(c) for c in cycles(p)))


def format_cycles(p: Sequence[int]) -> str:
    """Cycle notation without fixed points, e.g. ``(0,1)(2,3)``."""
    return "".join("(" + ",".join(map(str, c)) + ")" for c in cycles(p) if len(c) > 1)


@dataclass(frozen=True)
class LinearOrders:
    """Per-vertex linear order of neighbors: ``f[u][j]`` is the (j+1)-th neighbor."""

    f: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, orders: Sequence[Sequence[int]] | Mapping[int, Sequence[int]]) -> "LinearOrders":
        if isinstance(orders, Mapping):
            orders = [orders[u] for u in range(len(orders))]
        return cls(tuple(tuple(o) for o in orders))

    @classmethod
    def lexicographic(cls, g: Graph) -> "LinearOrders":
        return cls(tuple(g.adjacency))

    def check(self, g: Graph) -> None:
        if len(self.f) != g.n:
            raise ParameterError(f"expected orders for {g.n} vertices, got {len(self.f)}")
        for u, order in enumerate(self.f):
            if sorted(order) != list(g.adjacency[u]) or len(set(order)) != len(order):
                raise ParameterError(f"order at vertex {u} is not a bijection onto its neighbors")


@dataclass(frozen=True)
class ShuntDecomposition:
    """Ordered tuple of shunts whose matrices sum to the adjacency matrix."""

    shunts: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, shunts: Sequence[Sequence[int]]) -> "ShuntDecomposition":
        return cls(tuple(tuple(int(x) for x in p) for p in shunts))

    @property
    def d(self) -> int:
        return len(self.shunts)

    @property
    def n(self) -> int:
        return len(self.shunts[0]) if self.shunts else 0

    def matrices(self) -> list[np.ndarray]:
        return [permutation_matrix(p) for p in self.shunts]

    def canonical(self) -> "ShuntDecomposition":
        return ShuntDecomposition(tuple(sorted(self.shunts)))

    def linear_orders(self) -> LinearOrders:
        """The orders ``f_u(j) = P_j(u)`` realizing this decomposition."""
        return LinearOrders(tuple(tuple(p[u] for p in self.shunts) for u in range(self.n)))

    def validate(self, g: Graph) -> None:
        if self.n != g.n:
            raise ParameterError("shunt length does not match vertex count")
        for j, p in enumerate(self.shunts):
            if sorted(p) != list(range(g.n)):
                raise ParameterError(f"shunt {j} is not a permutation")
            for u in range(g.n):
                if not g.has_edge(u, p[u]):
                    raise ParameterError(f"shunt {j} maps {u} to non-neighbor {p[u]}")
        total = sum(self.matrices())
        if not np.array_equal(total, g.adjacency_matrix()):
            raise ParameterError("shunts do not sum to the adjacency matrix")

    def cycle_notation(self) -> str:
        return "{" + ", ".join(format_cycles(p) for p in self.shunts) + "}"

    def __str__(self):
        return self.cycle_notation()


def enumerate_shunt_decompositions(g: Graph) -> Iterator[ShuntDecomposition]:
    """Yield every unordered shunt-decomposition of a regular graph once.

    Shunts are distinguished by their image of vertex 0, so fixing
    ``P_j(0)`` to the j-th neighbor of 0 enumerates each unordered
    decomposition exactly once; the yielded tuples are in canonical
    (sorted) order. Vertices are extended one at a time, trying every
    assignment of the d labels to the vertex's neighbors that keeps every
    partial shunt injective.
    """
    d = g.regular_degree()
    if d is None:
        raise PreconditionError("shunt-decompositions require a regular graph")
    n = g.n
    if n == 0 or d == 0:
        return

    shunts = [[-1] * n for _ in range(d)]
    taken = [[False] * n for _ in range(d)]
    perms = [list(itertools.permutations(g.adjacency[u])) for u in range(n)]
    perms[0] = [tuple(g.adjacency[0])]

    def rec(u):
        if u == n:
            yield ShuntDecomposition(tuple(tuple(s) for s in shunts))
            return
        for choice in perms[u]:
            if any(taken[j][v] for j, v in enumerate(choice)):
                continue
            for j, v in enumerate(choice):
                shunts[j][u] = v
                taken[j][v] = True
            yield from rec(u + 1)
            for j, v in enumerate(choice):
                taken[j][v] = False

    yield from rec(0)


def is_symmetric(dec: ShuntDecomposition) -> bool:
    """True iff every shunt is an involution (its matrix is symmetric)."""
    return all(p[p[u]] == u for p in dec.shunts for u in range(len(p)))


def cycle_signature(dec: ShuntDecomposition) -> str:
    types = sorted(cycle_type(p) for p in dec.shunts)
    return "|".join("[" + ",".join(map(str, t)) + "]" for t in types)


def validate_linear_orders_for_shunt_model(g: Graph, lo: LinearOrders) -> ShuntDecomposition:
    """Turn linear orders into the ordered shunts ``P_j(u) = f_u(j)``.

    Raises :class:`InvalidOrdersError` naming the least vertex, and then
    the least (1-based) label, received from two different in-neighbors.
    """
    d = g.regular_degree()
    if d is None:
        raise PreconditionError("the shunt model requires a regular graph")
    lo.check(g)
    seen: set[tuple[int, int]] = set()
    clashes = []
    for u in range(g.n):
        for j, v in enumerate(lo.f[u]):
            if (v, j) in seen:
                clashes.append((v, j + 1))
            seen.add((v, j))
    if clashes:
        raise InvalidOrdersError(*min(clashes))
    return ShuntDecomposition(tuple(tuple(lo.f[u][j] for u in range(g.n)) for j in range(d)))


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_shunt_decomposition(text: str, n: int) -> ShuntDecomposition:
    """Parse ``{(0,1)(2,3), (0,2)(1,3), (0,3)(1,2)}`` into a decomposition on n points."""
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ParseError("shunt-decomposition must be enclosed in braces", 0)
    body = body[1:-1]
    shunts = []
    for part in _split_top_level(body):
        p = list(range(n))
        pos = 0
        for m in _CYCLE_RE.finditer(part):
            if part[pos:m.start()].strip():
                raise ParseError(f"unexpected text {part[pos:m.start()]!r}")
            pos = m.end()
            try:
                c = [int(x) for x in m.group(1).split(",")]
            except ValueError:
                raise ParseError(f"bad cycle {m.group(0)!r}") from None
            for a, b in zip(c, c[1:] + c[:1]):
                if not 0 <= a < n:
                    raise ParseError(f"point {a} out of range for n={n}")
                p[a] = b
        if part[pos:].strip():
            raise ParseError(f"unexpected text {part[pos:]!r}")
        if sorted(p) != list(range(n)):
            raise ParseError(f"cycles {part.strip()!r} do not define a permutation")
        shunts.append(tuple(p))
    return ShuntDecomposition(tuple(shunts))


def _split_top_level(body: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        parts.append("".join(cur))
    return parts

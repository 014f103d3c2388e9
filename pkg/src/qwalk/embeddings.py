"""
Rotation systems and the maps they encode.

A rotation system fixes a cyclic order of neighbors at every vertex and
therefore an embedding of the graph on an orientable surface. From it we
trace facial walks, read off the genus with Euler's formula, and build the
graph-encoded map (gem): the cubic graph on flags whose three perfect
matchings are the involutions ``tau0``, ``tau1`` and ``tau2``.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Mapping, Sequence

import numpy as np

from qwalk.errors import InternalConsistencyError, ParameterError, ParseError, PreconditionError
from qwalk.factorizations import ShuntDecomposition
from qwalk.graph import Graph

__all__ = [
    "RotationSystem",
    "FacialWalks",
    "Embedding",
    "Gem",
    "GemQuotient",
    "enumerate_rotation_systems",
    "count_rotation_systems",
    "facial_walks",
    "genus",
    "embed",
    "build_gem",
    "is_orientable",
    "gem_quotient",
    "parse_rotation_system",
]


@dataclass(frozen=True)
class RotationSystem:
    """Cyclic neighbor order per vertex.

    ``pi[u]`` lists the neighbors of ``u`` in cyclic order; the rotation
    sends ``pi[u][i]`` to ``pi[u][i + 1]``. The stored tuple is also the
    linear order used when a coin needs one.
    """

    pi: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, cycles: Sequence[Sequence[int]] | Mapping[int, Sequence[int]]) -> "RotationSystem":
        if isinstance(cycles, Mapping):
            cycles = [cycles[u] for u in range(len(cycles))]
        return cls(tuple(tuple(int(x) for x in c) for c in cycles))

    @property
    def n(self) -> int:
        return len(self.pi)

    def check(self, g: Graph) -> None:
        if self.n != g.n:
            raise ParameterError(f"rotation covers {self.n} vertices, graph has {g.n}")
        for u, c in enumerate(self.pi):
            if sorted(c) != list(g.adjacency[u]):
                raise ParameterError(f"rotation at {u} is not a cyclic order of its neighbors")

    def successor(self, u: int, v: int) -> int:
        c = self.pi[u]
        return c[(c.index(v) + 1) % len(c)]

    @cached_property
    def _succ(self) -> dict[tuple[int, int], int]:
        return {(u, c[i]): c[(i + 1) % len(c)] for u, c in enumerate(self.pi) for i in range(len(c))}

    def normalized(self) -> "RotationSystem":
        """Same rotation, each cycle starting at its least neighbor."""
        out = []
        for c in self.pi:
            if not c:
                out.append(c)
                continue
            k = c.index(min(c))
            out.append(c[k:] + c[:k])
        return RotationSystem(tuple(out))

    def rotated(self, shifts: Sequence[int]) -> "RotationSystem":
        """Same rotation written from a different starting neighbor per vertex."""
        out = []
        for c, s in zip(self.pi, shifts):
            s %= max(len(c), 1)
            out.append(c[s:] + c[:s])
        return RotationSystem(tuple(out))

    def format(self, sep: str = ", ") -> str:
        """Render as ``0: (1, 2, 3), 1: (0, 3, 2), ...``."""
        return sep.join(f"{u}: (" + ", ".join(map(str, c)) + ")" for u, c in enumerate(self.pi))

    def to_json(self) -> str:
        return json.dumps({str(u): list(c) for u, c in enumerate(self.pi)})

    @classmethod
    def from_json(cls, text: str) -> "RotationSystem":
        data = json.loads(text)
        return cls.of({int(k): v for k, v in data.items()})

    def __str__(self):
        return self.format()


_ROT_ENTRY = re.compile(r"(\d+)\s*:\s*[(\[]([^)\]]*)[)\]]")


def parse_rotation_system(text: str) -> RotationSystem:
    """Parse the text form ``0: (1, 2, 3), 1: (0, 3, 2), ...`` (or one per line).

    A closing ``]`` is tolerated in place of ``)``.
    """
    entries = {}
    pos = 0
    for m in _ROT_ENTRY.finditer(text):
        gap = text[pos:m.start()].strip().strip(",;").strip()
        if gap:
            raise ParseError(f"unexpected text {gap!r}", pos)
        pos = m.end()
        u = int(m.group(1))
        body = m.group(2).strip()
        try:
            cyc = tuple(int(x) for x in body.split(",")) if body else ()
        except ValueError:
            raise ParseError(f"bad neighbor list {body!r}", m.start(2)) from None
        if u in entries:
            raise ParseError(f"vertex {u} listed twice", m.start())
        entries[u] = cyc
    if text[pos:].strip().strip(",;").strip():
        raise ParseError("trailing text after rotation system", pos)
    if sorted(entries) != list(range(len(entries))):
        raise ParseError("rotation system must list vertices 0..n-1")
    return RotationSystem.of(entries)


def count_rotation_systems(g: Graph) -> int:
    return int(np.prod([max(1, _factorial(d - 1)) for d in g.degrees])) if g.n else 1


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def enumerate_rotation_systems(g: Graph) -> Iterator[RotationSystem]:
    """Odometer over per-vertex cyclic orders, least neighbor written first.

    The last vertex varies fastest. Mirror-image orders are distinct
    systems, so a cubic graph on n vertices yields 2**n of them.
    """
    if any(d == 0 for d in g.degrees):
        raise PreconditionError("rotation systems need every vertex to have a neighbor")
    options = []
    for nbrs in g.adjacency:
        first, rest = nbrs[0], nbrs[1:]
        options.append([(first,) + p for p in itertools.permutations(rest)])
    for combo in itertools.product(*options):
        yield RotationSystem(combo)


@dataclass(frozen=True)
class FacialWalks:
    """Faces as closed sequences of arc indices (into ``g.arcs``)."""

    faces: tuple[tuple[int, ...], ...]
    face_of: tuple[int, ...]

    def __len__(self):
        return len(self.faces)


def facial_walks(g: Graph, rot: RotationSystem) -> FacialWalks:
    """Trace faces: arc ``(u, v)`` is followed by ``(v, pi_v(u))``.

    Each face is started from the least arc index not yet used.
    """
    rot.check(g)
    arcs = g.arcs
    succ = rot._succ
    face_of = [-1] * len(arcs)
    faces = []
    for start in range(len(arcs)):
        if face_of[start] >= 0:
            continue
        fid = len(faces)
        walk = []
        i = start
        while face_of[i] < 0:
            face_of[i] = fid
            walk.append(i)
            u, v = arcs[i]
            i = arcs.index[(v, succ[(v, u)])]
        if i != start:
            raise InternalConsistencyError("facial walk closed at an arc other than its start")
        faces.append(tuple(walk))
    return FacialWalks(tuple(faces), tuple(face_of))


def genus(g: Graph, faces: FacialWalks) -> int:
    """Genus from Euler's formula ``n - |E| + F = 2 - 2 genus`` (connected g)."""
    if not g.is_connected():
        raise PreconditionError("genus is defined here for connected graphs only")
    numer = 2 - g.n + g.num_edges - len(faces)
    if numer % 2 or numer < 0:
        raise InternalConsistencyError(f"Euler numerator {numer} is odd or negative")
    return numer // 2


@dataclass(frozen=True)
class Embedding:
    rotation: RotationSystem
    faces: FacialWalks
    genus: int


def embed(g: Graph, rot: RotationSystem) -> Embedding:
    faces = facial_walks(g, rot)
    return Embedding(rot, faces, genus(g, faces))


# --------------------------------------------------------------------------
# gems
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Gem:
    """Graph-encoded map of an embedded graph.

    Flag ``2*i`` is (tail of arc i, its edge, face of arc i) and flag
    ``2*i + 1`` is the same with the head of arc i. ``tau[k]`` are index
    arrays of the three involutions.
    """

    flags: tuple[tuple[int, tuple[int, int], int], ...]
    tau0: tuple[int, ...]
    tau1: tuple[int, ...]
    tau2: tuple[int, ...]

    @property
    def taus(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        return (self.tau0, self.tau1, self.tau2)

    def __len__(self):
        return len(self.flags)

    def edge_color(self, a: int, b: int) -> int | None:
        for k, t in enumerate(self.taus):
            if t[a] == b:
                return k
        return None

    @cached_property
    def as_graph(self) -> Graph:
        """Cubic flag graph; raises if two involutions share a pair (multigraph)."""
        edges = set()
        for t in self.taus:
            for a, b in enumerate(t):
                e = (min(a, b), max(a, b))
                if a < b:
                    if e in edges:
                        raise ParameterError("gem has parallel edges; not a simple graph")
                    edges.add(e)
        return Graph.from_edges(len(self.flags), edges)

    def check_axioms(self) -> None:
        """Assert the three map axioms; raises :class:`InternalConsistencyError`."""
        n = len(self.flags)
        for k, t in enumerate(self.taus):
            for a in range(n):
                if t[a] == a or t[t[a]] != a:
                    raise InternalConsistencyError(f"tau{k} is not a fixed-point-free involution")
        t0, _, t2 = self.taus
        for a in range(n):
            if t0[t2[a]] != t2[t0[a]]:
                raise InternalConsistencyError("tau0 and tau2 do not commute")
            if t0[t2[a]] == a:
                raise InternalConsistencyError("tau0 tau2 has a fixed point")
        seen = {0}
        stack = [0]
        while stack:
            a = stack.pop()
            for t in self.taus:
                if t[a] not in seen:
                    seen.add(t[a])
                    stack.append(t[a])
        if len(seen) != n:
            raise InternalConsistencyError("<tau0, tau1, tau2> is not transitive on flags")


def build_gem(g: Graph, rot: RotationSystem) -> Gem:
    """Gem of the embedding given by ``rot``.

    ``tau0`` swaps the two ends of an arc within its face, ``tau1`` pairs
    the head corner of an arc with the tail corner of the next arc on the
    same face, ``tau2`` pairs an arc's corner with the matching corner of
    the reversed arc on the other side of the edge.
    """
    fw = facial_walks(g, rot)
    arcs = g.arcs
    rev = arcs.reversal
    m = len(arcs)
    nxt = [0] * m
    for face in fw.faces:
        for k, i in enumerate(face):
            nxt[i] = face[(k + 1) % len(face)]
    flags = []
    tau0 = [0] * (2 * m)
    tau1 = [0] * (2 * m)
    tau2 = [0] * (2 * m)
    for i, (u, v) in enumerate(arcs):
        e = (min(u, v), max(u, v))
        flags.append((u, e, fw.face_of[i]))
        flags.append((v, e, fw.face_of[i]))
        tail, head = 2 * i, 2 * i + 1
        tau0[tail], tau0[head] = head, tail
        tau2[tail] = 2 * rev[i] + 1
        tau2[head] = 2 * rev[i]
        j = nxt[i]
        tau1[head] = 2 * j
        tau1[2 * j] = head
    return Gem(tuple(flags), tuple(tau0), tuple(tau1), tuple(tau2))


def is_orientable(gem: Gem) -> bool:
    """Orientable iff the gem is bipartite."""
    return _gem_bipartition(gem) is not None


def _gem_bipartition(gem: Gem) -> list[int] | None:
    n = len(gem.flags)
    color = [-1] * n
    for s in range(n):
        if color[s] >= 0:
            continue
        color[s] = 0
        stack = [s]
        while stack:
            a = stack.pop()
            for t in gem.taus:
                b = t[a]
                if color[b] < 0:
                    color[b] = 1 - color[a]
                    stack.append(b)
                elif color[b] == color[a]:
                    return None
    return color


@dataclass(frozen=True)
class GemQuotient:
    """One way of writing a bipartite gem as ``K2 x Y``.

    ``involution`` is the gem automorphism pairing each flag with its
    twin; ``representatives[y]`` is the flag (in the class of flag 0)
    standing for vertex ``y``; shunt ``j`` comes from the edges of color
    ``tau_j``.
    """

    graph: Graph
    decomposition: ShuntDecomposition
    involution: tuple[int, ...]
    representatives: tuple[int, ...]


def gem_quotient(gem: Gem, limit: int | None = None) -> list[GemQuotient]:
    """All ways to write the gem as ``K2 x Y`` with shunts induced by its colors.

    Searches, by backtracking, for automorphisms ``alpha`` of the flag
    graph that are fixed-point-free involutions swapping the two color
    classes with ``alpha(a)`` never adjacent to ``a``. The colors need not
    be preserved by ``alpha``. Returns an empty list when the gem is not
    bipartite or no such ``alpha`` exists. Duplicate (Y, shunts) pairs are
    dropped; ``limit`` caps the number of involutions examined.
    """
    color = _gem_bipartition(gem)
    if color is None:
        return []
    n = len(gem.flags)
    nbrs = [sorted({t[a] for t in gem.taus}) for a in range(n)]
    adj = [set(x) for x in nbrs]
    order = _bfs(nbrs)
    alpha = [-1] * n
    results: list[GemQuotient] = []
    seen: set = set()
    examined = 0

    def consistent(a, x):
        # every already-mapped neighbor b of a must map to a neighbor of x
        for b in nbrs[a]:
            if alpha[b] >= 0 and alpha[b] not in adj[x]:
                return False
        for b in nbrs[x]:
            if alpha[b] >= 0 and alpha[b] not in adj[a]:
                return False
        return True

    def search(k):
        nonlocal examined
        if limit is not None and examined >= limit:
            return
        while k < n and alpha[order[k]] >= 0:
            k += 1
        if k == n:
            examined += 1
            q = _quotient_from_involution(gem, color, tuple(alpha), nbrs)
            key = (q.graph, q.decomposition)
            if key not in seen:
                seen.add(key)
                results.append(q)
            return
        a = order[k]
        mapped = [alpha[b] for b in nbrs[a] if alpha[b] >= 0]
        cands = nbrs[mapped[0]] if mapped else range(n)
        for x in cands:
            if alpha[x] >= 0 or x == a or color[x] == color[a] or x in adj[a]:
                continue
            alpha[a], alpha[x] = x, a
            if consistent(a, x):
                search(k + 1)
            alpha[a], alpha[x] = -1, -1

    search(0)
    return results


def _quotient_from_involution(gem, color, alpha, nbrs) -> GemQuotient:
    side = color[0]
    reps = [a for a in range(len(alpha)) if color[a] == side]
    index = {a: y for y, a in enumerate(reps)}
    # flag b on the other side stands for the vertex of its twin alpha(b)
    owner = lambda b: index[alpha[b]]  # noqa: E731
    edges = [(y, owner(b)) for y, a in enumerate(reps) for b in nbrs[a]]
    graph = Graph.from_edges(len(reps), edges)
    shunts = tuple(tuple(owner(t[a]) for a in reps) for t in gem.taus)
    return GemQuotient(graph, ShuntDecomposition(shunts), alpha, tuple(reps))


def _bfs(nbrs) -> list[int]:
    n = len(nbrs)
    seen = [False] * n
    order = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        queue = [s]
        while queue:
            a = queue.pop(0)
            order.append(a)
            for b in nbrs[a]:
                if not seen[b]:
                    seen[b] = True
                    queue.append(b)
    return order

"""
Coins and transition unitaries for the three walk models.

* arc-reversal: ``U = R C`` on arcs, ``C`` block-diagonal per-vertex coins
  indexed by a linear order of the neighbors;
* shunt-decomposition: ``U = S C`` on pairs ``(u, j)``, ``S`` advancing
  each label-j arc along shunt j;
* two-reflection: ``U = (2 Q_a Q_a^T - I)(2 Q_b Q_b^T - I)`` on all
  ordered vertex pairs.

All unitaries are dense ``complex128`` arrays; sizes here stay well below
a few hundred rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

import numpy as np

from qwalk.embeddings import RotationSystem
from qwalk.errors import CoinCompatibilityError, ParameterError, PreconditionError
from qwalk.factorizations import LinearOrders, ShuntDecomposition
from qwalk.graph import Graph

__all__ = [
    "COIN_KINDS",
    "Coin",
    "TransitionUnitary",
    "MarkovChain",
    "make_coin",
    "unitarity_defect",
    "arc_reversal_unitary",
    "arc_reversal_from_rotation",
    "check_rotation_coin",
    "shunt_unitary",
    "shunt_basis_arcs",
    "szegedy_isometries",
    "szegedy_unitary",
    "generalized_two_reflection",
    "simple_random_walk",
]

UNITARY_TOL = 1e-12
COIN_GAP_TOL = 1e-9
COIN_KINDS = ("grover", "fourier", "circulant7", "gauss")


def unitarity_defect(u: np.ndarray) -> float:
    """``max |U* U - I|`` entrywise."""
    u = np.asarray(u)
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()) if u.size else 0.0


@dataclass(frozen=True, eq=False)
class Coin:
    kind: str
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ParameterError("coin must be a square matrix")
        if unitarity_defect(m) > UNITARY_TOL:
            raise ParameterError(f"{self.kind} coin is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_circulant(self, tol: float = COIN_GAP_TOL) -> bool:
        c = self.matrix
        d = self.dim
        first = c[:, 0]
        return all(
            np.allclose(c[:, k], np.roll(first, k), atol=tol, rtol=0) for k in range(d)
        )

    def eigenvalue_gap(self) -> float:
        """Smallest distance between two eigenvalues (``inf`` when d = 1)."""
        w = np.linalg.eigvals(self.matrix)
        if len(w) < 2:
            return np.inf
        diff = np.abs(w[:, None] - w[None, :])
        return float(diff[~np.eye(len(w), dtype=bool)].min())


def make_coin(kind: str, d: int) -> Coin:
    """Build one of the named coins.

    grover      ``(2/d) J - I``
    fourier     ``exp(2 pi i j k / d) / sqrt(d)``
    circulant7  the 3x3 real circulant with first column ``(-2, 6, 3) / 7``
    gauss       ``exp(2 pi i (j - k)^2 / d) / sqrt(d)``, odd ``d`` only
    """
    if d < 1:
        raise ParameterError("coin dimension must be positive")
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    if kind == "grover":
        m = 2.0 / d * np.ones((d, d)) - np.eye(d)
    elif kind == "fourier":
        m = np.exp(2j * np.pi * j * k / d) / np.sqrt(d)
    elif kind == "circulant7":
        if d != 3:
            raise ParameterError("circulant7 coin is defined only for d = 3")
        m = np.array([[-2, 3, 6], [6, -2, 3], [3, 6, -2]]) / 7.0
    elif kind == "gauss":
        if d % 2 == 0:
            raise ParameterError("gauss coin is unitary only for odd d")
        m = np.exp(2j * np.pi * (j - k) ** 2 / d) / np.sqrt(d)
    else:
        raise ParameterError(f"unknown coin kind {kind!r}; choose from {COIN_KINDS}")
    return Coin(kind, m)


@dataclass(frozen=True, eq=False)
class TransitionUnitary:
    """A walk operator with the labels of its basis vectors."""

    matrix: np.ndarray
    basis: tuple[Hashable, ...]
    model: str = "custom"
    support: tuple[int, ...] | None = field(default=None)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if m.shape != (len(self.basis), len(self.basis)):
            raise ParameterError("basis labels do not match the matrix size")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def restricted(self) -> np.ndarray:
        """Block on the support indices (the whole matrix when unset)."""
        if self.support is None:
            return self.matrix
        s = np.asarray(self.support)
        return self.matrix[np.ix_(s, s)]

    def defect(self) -> float:
        return unitarity_defect(self.matrix)

    def to_json_dict(self) -> dict:
        return {
            "model": self.model,
            "dim": self.dim,
            "basis": [list(b) if isinstance(b, tuple) else b for b in self.basis],
            "matrix": [[[z.real, z.imag] for z in row] for row in self.matrix.tolist()],
        }


@dataclass(frozen=True, eq=False)
class MarkovChain:
    """Doubly stochastic transition matrix with ``matrix[u, v]`` = P(u -> v)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise PreconditionError("Markov chain must be square")
        if (m < 0).any():
            raise PreconditionError("Markov chain has negative entries")
        if np.abs(m.sum(axis=0) - 1).max() > 1e-12 or np.abs(m.sum(axis=1) - 1).max() > 1e-12:
            raise PreconditionError("Markov chain must be doubly stochastic")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def simple_random_walk(g: Graph) -> MarkovChain:
    """Uniform step to a neighbor; doubly stochastic iff g is regular."""
    a = g.adjacency_matrix().astype(float)
    deg = a.sum(axis=1)
    if (deg == 0).any():
        raise PreconditionError("isolated vertex")
    return MarkovChain(a / deg[:, None])


# --------------------------------------------------------------------------
# coined models
# --------------------------------------------------------------------------

def _reversal_matrix(g: Graph) -> np.ndarray:
    m = len(g.arcs)
    r = np.zeros((m, m))
    r[g.arcs.reversal, np.arange(m)] = 1.0
    return r


def _coin_operator(g: Graph, lo: LinearOrders, coins) -> np.ndarray:
    arcs = g.arcs
    m = len(arcs)
    c = np.zeros((m, m), dtype=complex)
    for u, order in enumerate(lo.f):
        coin = coins[u]
        if coin.dim != len(order):
            raise ParameterError(f"coin at vertex {u} has dim {coin.dim}, degree is {len(order)}")
        idx = [arcs.index[(u, v)] for v in order]
        c[np.ix_(idx, idx)] = coin.matrix
    return c


def _per_vertex(coins, n) -> list[Coin]:
    if isinstance(coins, Coin):
        return [coins] * n
    if isinstance(coins, Mapping):
        return [coins[u] for u in range(n)]
    coins = list(coins)
    if len(coins) != n:
        raise ParameterError("need one coin per vertex")
    return coins


def arc_reversal_unitary(g: Graph, lo: LinearOrders, coins: Coin | Sequence[Coin] | Mapping[int, Coin]) -> TransitionUnitary:
    """``U = R C`` in lexicographic arc order.

    The coin at ``u`` sends the j-th arc of ``u`` to ``sum_k C[k, j]``
    times its k-th arc, where the j-th arc is ``(u, lo.f[u][j])``.
    """
    lo.check(g)
    coins = _per_vertex(coins, g.n)
    u = _reversal_matrix(g) @ _coin_operator(g, lo, coins)
    return TransitionUnitary(u, g.arcs.arcs, "arc-reversal")


def check_rotation_coin(coin: Coin) -> None:
    """A coin can drive rotation-system walks iff it is circulant with simple spectrum."""
    if not coin.is_circulant():
        raise CoinCompatibilityError(f"{coin.kind} coin is not circulant")
    if coin.eigenvalue_gap() < COIN_GAP_TOL:
        raise CoinCompatibilityError(f"{coin.kind} coin has a repeated eigenvalue")


def arc_reversal_from_rotation(g: Graph, rot: RotationSystem, coin: Coin) -> TransitionUnitary:
    """Arc-reversal walk determined by a rotation system.

    The cycle ``rot.pi[u]`` is read as a linear order from its written
    starting point; a circulant coin makes the result independent of that
    choice.
    """
    check_rotation_coin(coin)
    rot.check(g)
    if g.regular_degree() != coin.dim:
        raise PreconditionError(f"rotation walks with a {coin.dim}x{coin.dim} coin need a {coin.dim}-regular graph")
    return arc_reversal_unitary(g, LinearOrders(rot.pi), coin)


def shunt_basis_arcs(dec: ShuntDecomposition) -> list[tuple[int, int]]:
    """Arc carried by each shunt-basis vector ``(u, j)``, in basis order."""
    return [(u, dec.shunts[j][u]) for u in range(dec.n) for j in range(dec.d)]


def shunt_unitary(g: Graph, dec: ShuntDecomposition, coins: Coin | Sequence[Coin] | Mapping[int, Coin]) -> TransitionUnitary:
    """``U = S C`` on basis ``(u, j)`` ordered by ``u`` then ``j``.

    ``S (e_u (x) e_j) = e_{P_j(u)} (x) e_j``; the coin acts on the label
    register of each vertex.
    """
    dec.validate(g)
    d, n = dec.d, dec.n
    coins = _per_vertex(coins, n)
    m = n * d
    s = np.zeros((m, m))
    for j, p in enumerate(dec.shunts):
        for u in range(n):
            s[p[u] * d + j, u * d + j] = 1.0
    c = np.zeros((m, m), dtype=complex)
    for u in range(n):
        if coins[u].dim != d:
            raise ParameterError(f"coin at vertex {u} has dim {coins[u].dim}, need {d}")
        c[u * d:(u + 1) * d, u * d:(u + 1) * d] = coins[u].matrix
    basis = tuple((u, j) for u in range(n) for j in range(d))
    return TransitionUnitary(s @ c, basis, "shunt")


# --------------------------------------------------------------------------
# two-reflection model
# --------------------------------------------------------------------------

def szegedy_isometries(mc: MarkovChain) -> tuple[np.ndarray, np.ndarray]:
    """``Q1`` (columns ``e_j (x) N e_j``) and ``Q2`` (columns ``N^T e_j (x) e_j``).

    ``N`` is the entrywise square root of the chain; pair ``(u, v)`` sits
    at row ``u * n + v``.
    """
    n = mc.n
    root = np.sqrt(mc.matrix)
    eye = np.eye(n)
    q1 = np.column_stack([np.kron(eye[:, j], root[:, j]) for j in range(n)])
    q2 = np.column_stack([np.kron(root.T[:, j], eye[:, j]) for j in range(n)])
    return q1, q2


def _reflection(q: np.ndarray) -> np.ndarray:
    return 2.0 * q @ q.conj().T - np.eye(q.shape[0])


def generalized_two_reflection(q1: np.ndarray, q2: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """``(2 Q1 Q1^* - I)(2 Q2 Q2^* - I)``; both inputs must have orthonormal columns."""
    q1 = np.asarray(q1)
    q2 = np.asarray(q2)
    if q1.shape[0] != q2.shape[0]:
        raise ParameterError("isometries act on spaces of different dimension")
    for name, q in (("Q1", q1), ("Q2", q2)):
        if np.abs(q.conj().T @ q - np.eye(q.shape[1])).max() > tol:
            raise ParameterError(f"{name} does not have orthonormal columns")
    return _reflection(q1) @ _reflection(q2)


def szegedy_unitary(mc: MarkovChain, order: str = "r2r1") -> TransitionUnitary:
    """Two-reflection quantization of a doubly stochastic chain.

    ``order="r2r1"`` gives ``U = R2 R1`` (reflect about the tail
    partition first); ``"r1r2"`` gives the transposed convention
    ``R1 R2``. The support lists the pairs with positive chain weight.
    """
    q1, q2 = szegedy_isometries(mc)
    if order == "r2r1":
        u = generalized_two_reflection(q2, q1)
    elif order == "r1r2":
        u = generalized_two_reflection(q1, q2)
    else:
        raise ParameterError("order must be 'r2r1' or 'r1r2'")
    n = mc.n
    basis = tuple((a, b) for a in range(n) for b in range(n))
    support = tuple(a * n + b for a in range(n) for b in range(n) if mc.matrix[a, b] > 0)
    return TransitionUnitary(u, basis, "szegedy", support)

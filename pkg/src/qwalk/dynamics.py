"""
Hitting times and mixing-time bounds.

The measured walk alternates a step of ``U`` with the two-outcome
measurement ``{y y^*, I - y y^*}``; its stop probability at step k is
``|y^* U ((I - y y^*) U)^{k-1} x|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from qwalk.errors import ParameterError
from qwalk.spectral import SpectralDecomposition, _as_matrix

__all__ = [
    "HittingEstimate",
    "default_k_max",
    "one_shot_hitting",
    "stop_probabilities",
    "concurrent_hitting",
    "expected_hitting",
    "mixing_time_bound_coarse",
    "mixing_time_bound_fine",
    "fine_bound_numerator",
    "mixing_deviation",
    "mixing_holds_on_grid",
]

DEFAULT_TAIL_TOL = 1e-6


def default_k_max(dim: int) -> int:
    return 10 * dim * dim


def _unit(v, name) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if abs(np.linalg.norm(v) - 1) > 1e-9:
        raise ParameterError(f"{name} must be a unit vector")
    return v


def _eps(eps):
    if not 0 < eps < 1:
        raise ParameterError("eps must lie in (0, 1)")


def one_shot_hitting(u, x, y, eps: float, k_max: int | None = None) -> int | None:
    """Least ``k <= k_max`` with ``|y^* U^k x|^2 >= 1 - eps``, else ``None``."""
    _eps(eps)
    m = _as_matrix(u)
    x = _unit(x, "x")
    y = _unit(y, "y")
    k_max = default_k_max(m.shape[0]) if k_max is None else k_max
    state = x
    for k in range(k_max + 1):
        if abs(np.vdot(y, state)) ** 2 >= 1 - eps:
            return k
        state = m @ state
    return None


def stop_probabilities(u, x, y) -> Iterator[float]:
    """Infinite stream of the measured walk's stop probabilities for k = 1, 2, ..."""
    m = _as_matrix(u)
    y = _unit(y, "y")
    state = _unit(x, "x")
    while True:
        state = m @ state
        amp = np.vdot(y, state)
        yield float(abs(amp) ** 2)
        state = state - amp * y


def concurrent_hitting(u, x, y, eps: float, k_max: int | None = None) -> int | None:
    """Least K with cumulative stop probability ``>= 1 - eps``, else ``None``."""
    _eps(eps)
    k_max = default_k_max(_as_matrix(u).shape[0]) if k_max is None else k_max
    total = 0.0
    for k, p in enumerate(stop_probabilities(u, x, y), start=1):
        if k > k_max:
            break
        total += p
        if total >= 1 - eps:
            return k
    return None


@dataclass(frozen=True)
class HittingEstimate:
    """Truncated expected hitting time.

    ``truncation_bound`` is the stop mass not yet accounted for at
    ``steps``; ``converged`` is false when it exceeds the tail tolerance.
    """

    value: float
    truncation_bound: float
    converged: bool
    steps: int


def expected_hitting(u, x, y, tail_tol: float = DEFAULT_TAIL_TOL, k_max: int | None = None) -> HittingEstimate:
    k_max = default_k_max(_as_matrix(u).shape[0]) if k_max is None else k_max
    value = 0.0
    mass = 0.0
    steps = 0
    for k, p in enumerate(stop_probabilities(u, x, y), start=1):
        if k > k_max:
            break
        value += k * p
        mass += p
        steps = k
        if 1 - mass <= tail_tol:
            break
    rest = max(0.0, 1.0 - mass)
    return HittingEstimate(value, rest, rest <= tail_tol, steps)


# --------------------------------------------------------------------------
# mixing times
# --------------------------------------------------------------------------

def _gap_matrix(sd: SpectralDecomposition) -> np.ndarray:
    lam = sd.eigenvalues
    diff = np.abs(lam[:, None] - lam[None, :])
    np.fill_diagonal(diff, np.inf)
    return 1.0 / diff


def mixing_time_bound_coarse(sd: SpectralDecomposition, eps: float) -> float:
    """``(2 ell / eps) sum_{r != s} 1 / |lambda_r - lambda_s|``; 0 for a single group."""
    if eps <= 0:
        raise ParameterError("eps must be positive")
    if len(sd) < 2:
        return 0.0
    return 2.0 * sd.dim / eps * float(_gap_matrix(sd).sum())


def fine_bound_numerator(sd: SpectralDecomposition) -> float:
    """``2 sum_{r != s} sum_j sqrt((F_r)_jj (F_s)_jj) / |lambda_r - lambda_s|``.

    Dividing by K bounds the total-variation-style deviation of the K-step
    average from its limit, for every unit initial state.
    """
    if len(sd) < 2:
        return 0.0
    diag = np.clip(np.einsum("rii->ri", sd.projectors).real, 0.0, None)
    root = np.sqrt(diag)
    overlap = root @ root.T
    return 2.0 * float((overlap * _gap_matrix(sd)).sum())


def mixing_time_bound_fine(sd: SpectralDecomposition, eps: float) -> float:
    if eps <= 0:
        raise ParameterError("eps must be positive")
    return fine_bound_numerator(sd) / eps


def mixing_deviation(u, sd: SpectralDecomposition, x, horizon: int) -> float:
    """``sum_j |(1/K) sum_{k<K} P_{x,j}(k) - sum_r x^* F_r D_j F_r x|`` by simulation."""
    m = _as_matrix(u)
    x = _unit(x, "x")
    comps = np.einsum("rij,j->ri", sd.projectors, x)
    limit = (comps.real ** 2 + comps.imag ** 2).sum(axis=0)
    acc = np.zeros(m.shape[0])
    state = x
    for _ in range(horizon):
        acc += state.real ** 2 + state.imag ** 2
        state = m @ state
    return float(np.abs(acc / horizon - limit).sum())


def mixing_holds_on_grid(u, sd: SpectralDecomposition, x, horizon: int, eps: float) -> bool:
    """Check the deviation at ``K, 2K, 4K`` only; a finite stand-in for 'all L >= K'."""
    return all(mixing_deviation(u, sd, x, h) <= eps for h in (horizon, 2 * horizon, 4 * horizon))

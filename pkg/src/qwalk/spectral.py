"""
Spectral idempotents of a walk unitary and the average mixing matrix.

The average mixing matrix is ``sum_r F_r o conj(F_r)`` over the spectral
projectors ``F_r`` of ``U``; it is the Cesaro limit of ``|U^k|^2``.
Eigenvectors come from a complex Schur factorization, which for a normal
matrix is a unitary diagonalization, so every eigenvalue cluster already
has an orthonormal basis.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import schur

from qwalk.errors import ParameterError
from qwalk.walks import TransitionUnitary

__all__ = [
    "SpectralDecomposition",
    "AverageMixingMatrix",
    "ClusterAmbiguityWarning",
    "spectral_decomposition",
    "average_mixing_matrix",
    "time_averaged_mixing",
    "time_averaged_mixing_series",
    "limiting_probability",
    "apply_channel",
    "entropy_stats",
    "trace_lower_bound",
]

ANGLE_TOL = 1e-9
FLATNESS_TOL = 1e-6
ENTROPY_ZERO = 1e-14


class ClusterAmbiguityWarning(UserWarning):
    """Two eigenvalue clusters sit closer than ten times the clustering tolerance."""


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """``U = sum_r exp(i theta_r) F_r`` with groups sorted by angle in (-pi, pi]."""

    thetas: np.ndarray
    multiplicities: tuple[int, ...]
    projectors: np.ndarray
    bases: tuple[np.ndarray, ...] = field(repr=False)
    warnings: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.exp(1j * self.thetas)

    @property
    def simple(self) -> bool:
        return all(m == 1 for m in self.multiplicities)

    def __len__(self):
        return len(self.multiplicities)

    def reconstruct(self) -> np.ndarray:
        return np.einsum("r,rij->ij", self.eigenvalues, self.projectors)

    def check(self, tol: float = 1e-9) -> dict[str, float]:
        """Defects of the projector identities; all should be below ``tol``."""
        eye = np.eye(self.dim)
        f = self.projectors
        worst_idem = max(float(np.abs(p @ p - p).max()) for p in f)
        worst_herm = max(float(np.abs(p - p.conj().T).max()) for p in f)
        worst_orth = 0.0
        for r in range(len(f)):
            for s in range(r + 1, len(f)):
                worst_orth = max(worst_orth, float(np.abs(f[r] @ f[s]).max()))
        return {
            "resolution": float(np.abs(f.sum(axis=0) - eye).max()),
            "idempotent": worst_idem,
            "hermitian": worst_herm,
            "orthogonal": worst_orth,
            "multiplicity": abs(sum(self.multiplicities) - self.dim),
        }


def _as_matrix(u) -> np.ndarray:
    if isinstance(u, TransitionUnitary):
        return u.matrix
    return np.asarray(u, dtype=complex)


def spectral_decomposition(u, angle_tol: float = ANGLE_TOL) -> SpectralDecomposition:
    """Group eigenvalues whose angles differ by at most ``angle_tol``.

    Angles are sorted and split at gaps larger than the tolerance; the
    first and last groups merge when they meet across the branch cut at
    pi. Gaps between the tolerance and ten times it produce a
    :class:`ClusterAmbiguityWarning` and are recorded on the result.
    """
    m = _as_matrix(u)
    ell = m.shape[0]
    if ell == 0:
        raise ParameterError("empty matrix")
    t, z = schur(m, output="complex")
    theta = np.angle(np.diag(t))
    theta[theta <= -np.pi + 1e-15] = np.pi
    order = np.argsort(theta, kind="stable")
    theta = theta[order]
    z = z[:, order]

    groups = [[0]]
    notes = []
    for i in range(1, ell):
        gap = theta[i] - theta[i - 1]
        if gap <= angle_tol:
            groups[-1].append(i)
        else:
            if gap <= 10 * angle_tol:
                notes.append(f"clusters at {theta[i - 1]:.12f} and {theta[i]:.12f} differ by {gap:.3e}")
            groups.append([i])
    if len(groups) > 1:
        wrap = theta[0] + 2 * np.pi - theta[-1]
        if wrap <= angle_tol:
            groups[0] = groups.pop() + groups[0]
        elif wrap <= 10 * angle_tol:
            notes.append(f"clusters across the branch cut differ by {wrap:.3e}")
    for note in notes:
        warnings.warn(note, ClusterAmbiguityWarning, stacklevel=2)

    thetas, mults, projs, bases = [], [], [], []
    for g in groups:
        basis, _ = np.linalg.qr(z[:, g])
        ang = np.angle(np.mean(np.exp(1j * theta[g])))
        if ang <= -np.pi + 1e-15:
            ang = np.pi
        thetas.append(ang)
        mults.append(len(g))
        projs.append(basis @ basis.conj().T)
        bases.append(basis)
    # the wrap-merged group keeps its angle near pi; re-sort
    idx = np.argsort(thetas, kind="stable")
    return SpectralDecomposition(
        thetas=np.asarray(thetas)[idx],
        multiplicities=tuple(mults[i] for i in idx),
        projectors=np.asarray(projs)[idx],
        bases=tuple(bases[i] for i in idx),
        warnings=tuple(notes),
    )


@dataclass(frozen=True, eq=False)
class AverageMixingMatrix:
    matrix: np.ndarray
    trace: float
    column_entropies: np.ndarray
    total_entropy: float
    walk_regular: bool
    uniform: bool
    simple_spectrum: bool

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def average_mixing_matrix(sd: SpectralDecomposition) -> AverageMixingMatrix:
    f = sd.projectors
    mhat = np.einsum("rij,rij->ij", f, f.conj()).real
    ell = mhat.shape[0]
    cols, total = entropy_stats(mhat)
    diag = np.einsum("rii->ri", f).real
    walk_regular = bool((diag.max(axis=1) - diag.min(axis=1)).max() <= FLATNESS_TOL)
    uniform = bool(np.abs(mhat - 1.0 / ell).max() <= FLATNESS_TOL)
    return AverageMixingMatrix(
        matrix=mhat,
        trace=float(np.trace(mhat)),
        column_entropies=cols,
        total_entropy=total,
        walk_regular=walk_regular,
        uniform=uniform,
        simple_spectrum=sd.simple,
    )


def entropy_stats(mhat) -> tuple[np.ndarray, float]:
    """Natural-log entropy of every column and their sum; ``0 log 0 = 0``."""
    mhat = np.asarray(getattr(mhat, "matrix", mhat), dtype=float)
    pos = mhat > ENTROPY_ZERO
    safe = np.where(pos, mhat, 1.0)
    cols = -(np.where(pos, mhat * np.log(safe), 0.0)).sum(axis=0)
    return cols, float(cols.sum())


def trace_lower_bound(sd: SpectralDecomposition) -> float:
    """``(1/ell) sum_r m_r^2``."""
    return float(sum(m * m for m in sd.multiplicities)) / sd.dim


def time_averaged_mixing(u, horizon: int) -> np.ndarray:
    """``(1/K) sum_{k=0}^{K-1} |U^k|^2`` by explicit powering.

    Accepts a stack ``(..., ell, ell)`` of unitaries to average many walks
    at once.
    """
    return time_averaged_mixing_series(u, [horizon])[0]


def time_averaged_mixing_series(u, horizons) -> list[np.ndarray]:
    """Finite averages at several horizons from one pass of powering."""
    m = _as_matrix(u)
    hs = sorted(set(int(h) for h in horizons))
    if not hs or hs[0] < 1:
        raise ParameterError("horizons must be positive integers")
    ell = m.shape[-1]
    if not m.imag.any():
        m = np.ascontiguousarray(m.real)  # real walks power several times faster
    power = np.broadcast_to(np.eye(ell, dtype=m.dtype), m.shape).copy()
    acc = np.zeros(m.shape, dtype=float)
    out = {}
    k = 0
    for h in hs:
        while k < h:
            acc += power.real ** 2 + power.imag ** 2 if np.iscomplexobj(power) else power * power
            power = power @ m
            k += 1
        out[h] = acc / h
    return [out[int(h)] for h in horizons]


def limiting_probability(sd: SpectralDecomposition, x, arcs) -> float:
    """Long-run average probability of finding the walk on ``arcs`` from state ``x``.

    Equals ``sum_r x^* F_r D_S F_r x``.
    """
    x = np.asarray(x, dtype=complex)
    if abs(np.linalg.norm(x) - 1) > 1e-9:
        raise ParameterError("initial state must be a unit vector")
    s = np.asarray(sorted(set(int(a) for a in arcs)), dtype=int)
    if s.size == 0:
        return 0.0
    comps = np.einsum("rij,j->ri", sd.projectors, x)[:, s]
    p = float((comps.real ** 2 + comps.imag ** 2).sum())
    if -1e-12 <= p < 0:
        p = 0.0
    elif 1 < p <= 1 + 1e-12:
        p = 1.0
    return p


def apply_channel(sd: SpectralDecomposition, rho, tol: float = 1e-9) -> np.ndarray:
    """Dephasing in the eigenbasis: ``rho -> sum_r F_r rho F_r^*``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (sd.dim, sd.dim):
        raise ParameterError("density matrix has the wrong shape")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise ParameterError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1) > tol:
        raise ParameterError("density matrix must have unit trace")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ParameterError("density matrix is not positive semidefinite")
    f = sd.projectors
    return np.einsum("rij,jk,rlk->il", f, rho, f.conj())

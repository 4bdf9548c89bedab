"""Lindblad generators, stationary states and ergodicity diagnostics.

A continuous-time quantum Markov process on C^d is specified by the tuple
D = (H, L^1, ..., L^k) of a Hermitian Hamiltonian and k jump operators.
The Heisenberg-picture generator is

    W(X) = -i X H_eff + i H_eff* X + sum_i L^i* X L^i,
    H_eff = H - (i/2) sum_i L^i* L^i,

whose semigroup T_t = exp(t W) is unital and completely positive.  The
process is ergodic when the trace-dual W_* has a unique, full-rank fixed
state rho_ss; in that case T_t converges to tr[rho_ss (.)] id and W is
invertible on the zero-mean subspace B_0 = {X : tr[rho_ss X] = 0}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .opspace import (
    Superoperator,
    dag,
    devectorize,
    expm,
    left_right_superop,
    vectorize,
)

HERMITICITY_TOL = 1e-12
RANK_TOL_SCALE = 1e-9
FULL_RANK_TOL = 1e-10
CENTERED_TOL = 1e-10


class NonErgodicError(ValueError):
    """Raised when an operation requires ergodic dynamics but got none."""


@dataclass(frozen=True)
class DynamicalParams:
    """The dynamical parameter D = (H, L^1, ..., L^k)."""

    h: np.ndarray
    ls: tuple

    def __init__(self, h, ls):
        h = np.asarray(h, dtype=complex)
        ls = tuple(np.asarray(L, dtype=complex) for L in ls)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError(f"H must be square, got shape {h.shape}")
        d = h.shape[0]
        for i, L in enumerate(ls):
            if L.shape != (d, d):
                raise ValueError(f"jump operator {i} has shape {L.shape}, expected {(d, d)}")
        mats = (h,) + ls
        if not all(np.all(np.isfinite(m)) for m in mats):
            raise ValueError("non-finite entries in dynamical parameters")
        herm_err = np.max(np.abs(h - dag(h)))
        if herm_err > HERMITICITY_TOL * (1.0 + np.linalg.norm(h)):
            raise ValueError(f"H is not Hermitian: ||H - H*|| = {herm_err:.3e}")
        h = h.copy()
        h.setflags(write=False)
        ls = tuple(L.copy() for L in ls)
        for L in ls:
            L.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "ls", ls)

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    @property
    def n_channels(self) -> int:
        return len(self.ls)

    def effective_hamiltonian(self) -> np.ndarray:
        """H_eff = H - (i/2) sum_i L^i* L^i (non-Hermitian)."""
        acc = np.zeros_like(self.h)
        for L in self.ls:
            acc = acc + dag(L) @ L
        return self.h - 0.5j * acc


@dataclass(frozen=True)
class ErgodicityReport:
    """Spectral diagnosis of a generator: unique full-rank fixed state or not."""

    ergodic: bool
    stationary: np.ndarray | None
    zero_eigen_count: int
    min_stationary_eigenvalue: float
    spectral_gap: float


def heisenberg_generator(D: DynamicalParams) -> Superoperator:
    """The Heisenberg-picture generator W as a d^2 x d^2 matrix."""
    d = D.dim
    ident = np.eye(d, dtype=complex)
    heff = D.effective_hamiltonian()
    W = (-1j * left_right_superop(ident, heff)).matrix
    W = W + (1j * left_right_superop(dag(heff), ident)).matrix
    for L in D.ls:
        W = W + left_right_superop(dag(L), L).matrix
    return Superoperator(d, W)


def schrodinger_generator(D: DynamicalParams) -> Superoperator:
    """Trace-dual generator W_*, evolving states: W_*(rho) = -i[H, rho] + dissipator."""
    d = D.dim
    ident = np.eye(d, dtype=complex)
    W = (-1j * (left_right_superop(D.h, ident) - left_right_superop(ident, D.h))).matrix
    for L in D.ls:
        ldl = dag(L) @ L
        W = W + left_right_superop(L, dag(L)).matrix
        W = W - 0.5 * (left_right_superop(ldl, ident) + left_right_superop(ident, ldl)).matrix
    return Superoperator(d, W)


def offdiag_generator(D: DynamicalParams, D2: DynamicalParams) -> Superoperator:
    """Two-parameter generator W_{D,D'}(X) = -i X H'_eff + i H_eff* X + sum_i L^i* X L'^i.

    Generates the contraction semigroup whose action on the identity gives
    the overlap of system-output vectors for the two dynamics; it reduces
    to the ordinary generator when D' = D.
    """
    if D.dim != D2.dim or D.n_channels != D2.n_channels:
        raise ValueError("off-diagonal generator needs equal dimensions and channel counts")
    d = D.dim
    ident = np.eye(d, dtype=complex)
    W = (-1j * left_right_superop(ident, D2.effective_hamiltonian())).matrix
    W = W + (1j * left_right_superop(dag(D.effective_hamiltonian()), ident)).matrix
    for L1, L2 in zip(D.ls, D2.ls):
        W = W + left_right_superop(dag(L1), L2).matrix
    return Superoperator(d, W)


def stationary_state(D: DynamicalParams, rank_tol_scale: float = RANK_TOL_SCALE) -> ErgodicityReport:
    """Diagnose ergodicity and return the stationary state when it exists.

    The candidate state is the null vector of W_* (eigenvector with
    eigenvalue nearest zero), trace-normalised and Hermitised. Ergodicity
    requires exactly one eigenvalue of W inside
    |lam| < rank_tol_scale (1 + ||W||) and a strictly positive candidate
    (min eigenvalue > 1e-10).
    """
    d = D.dim
    W = heisenberg_generator(D)
    vals = np.linalg.eigvals(W.matrix)
    rank_tol = rank_tol_scale * (1.0 + np.linalg.norm(W.matrix))
    near_zero = np.abs(vals) < rank_tol
    zero_count = int(np.count_nonzero(near_zero))
    nonzero = vals[~near_zero]
    gap = float(-np.max(nonzero.real)) if nonzero.size else 0.0

    dual_vals, dual_vecs = np.linalg.eig(dag(W.matrix))
    rho = devectorize(dual_vecs[:, np.argmin(np.abs(dual_vals))], d)
    tr = np.trace(rho)
    if abs(tr) < 1e-14:
        min_eig = -np.inf
        rho = None
    else:
        rho = rho / tr
        rho = 0.5 * (rho + dag(rho))
        min_eig = float(np.min(np.linalg.eigvalsh(rho)))

    ergodic = zero_count == 1 and min_eig > FULL_RANK_TOL
    # rho is kept in the report even when not ergodic: it is the candidate
    # fixed state and useful for diagnosis (e.g. rank-deficient absorbers).
    return ErgodicityReport(
        ergodic=ergodic,
        stationary=rho,
        zero_eigen_count=zero_count,
        min_stationary_eigenvalue=min_eig,
        spectral_gap=gap,
    )


def require_ergodic(D: DynamicalParams) -> ErgodicityReport:
    rep = stationary_state(D)
    if not rep.ergodic:
        raise NonErgodicError(
            f"dynamics is not ergodic: {rep.zero_eigen_count} near-zero eigenvalues, "
            f"min stationary eigenvalue {rep.min_stationary_eigenvalue:.3e}"
        )
    return rep


def _restricted_inverse_mat(W: Superoperator, rho: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Solve W(K) = X with tr[rho K] = 0 by a stacked least-squares system."""
    d = rho.shape[0]
    A = np.vstack([W.matrix, vectorize(rho).conj()[None, :]])
    b = np.concatenate([vectorize(X), [0.0]])
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    return devectorize(sol, d)


def restricted_inverse(D: DynamicalParams, X, *, report: ErgodicityReport | None = None) -> np.ndarray:
    """Inverse of W on the zero-mean subspace B_0.

    The input must satisfy tr[rho_ss X] = 0 (within 1e-10 of its scale);
    off-subspace inputs are rejected rather than silently centred.
    """
    rep = report if report is not None else require_ergodic(D)
    if not rep.ergodic:
        raise NonErgodicError("restricted_inverse requires ergodic dynamics")
    X = np.asarray(X, dtype=complex)
    rho = rep.stationary
    mean = np.trace(rho @ X)
    if abs(mean) > CENTERED_TOL * (1.0 + np.linalg.norm(X)):
        raise ValueError(
            f"input is not in B_0: tr[rho_ss X] = {mean:.3e}; centre it first"
        )
    return _restricted_inverse_mat(heisenberg_generator(D), rho, X)


def semigroup_apply(D: DynamicalParams, t: float, X) -> np.ndarray:
    """Heisenberg evolution T_t(X) = exp(t W)(X)."""
    if t < 0:
        raise ValueError("semigroup_apply requires t >= 0")
    return expm(heisenberg_generator(D), t)(X)

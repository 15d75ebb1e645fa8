"""Structure-based subspace (SSS) channel estimator.

The filtering matrix is searched for inside the estimated signal subspace,
``W = Vs @ Q``, and ``Q`` is chosen to make ``W`` as close as possible to
block-Toeplitz. The structure error is a sum of three quadratic terms:

* ``shift``: ``W(i, j) - W(i+m, j+1)`` for every entry that has a block
  diagonal successor,
* ``top``: entries of the first block-row beyond column ``L``,
* ``left``: entries of the first column below the first block-row.

With ``q = vec(Q)`` (column stacking) each term is ``||K_t q||^2`` for an
explicit matrix ``K_t``, and the minimizer over unit ``q`` is the least
eigenvector of ``Kmat^H Kmat``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ss import least_eigenvector
from .subspace import SubspaceDecomposition


def vec(A) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(A).reshape(-1, order="F")


def mat(q, rows: int, cols: int) -> np.ndarray:
    """Inverse of :func:`vec`."""
    return np.asarray(q).reshape(rows, cols, order="F")


@dataclass(frozen=True)
class StructureOperators:
    I_L: np.ndarray
    I_R: np.ndarray
    J_L: np.ndarray
    J_R: np.ndarray
    I_row: np.ndarray
    I_col: np.ndarray
    K1: np.ndarray
    K2: np.ndarray
    K3: np.ndarray

    @property
    def Kmat(self) -> np.ndarray:
        return np.vstack([self.K1, self.K2, self.K3])

    def gram(self) -> np.ndarray:
        """``Kmat^H Kmat``, symmetrized."""
        G = sum(Kt.conj().T @ Kt for Kt in (self.K1, self.K2, self.K3))
        return (G + G.conj().T) / 2.0

    def cost(self, q) -> float:
        return float(np.sum(np.abs(self.Kmat @ np.asarray(q)) ** 2))


@dataclass(frozen=True)
class SssSolution:
    q: np.ndarray
    Q: np.ndarray
    W_hat: np.ndarray
    h_hat: np.ndarray
    residual: float


def build_structure_operators(Vs, m: int, M: int, L: int) -> StructureOperators:
    Vs = np.asarray(Vs)
    K = M + L - 1
    mM = m * M
    if Vs.shape != (mM, K):
        raise ValueError(f"Vs must be {mM} x {K} for m={m}, M={M}, L={L}, got {Vs.shape}")

    I_L = np.diag(np.r_[np.ones(mM - m), np.zeros(m)])
    I_R = np.diag(np.r_[np.ones(K - 1), 0.0])
    J_L = np.eye(mM, k=m)   # [J_L]_{i,j} = 1 iff j = i + m
    J_R = np.eye(K, k=-1)   # [J_R]_{i,j} = 1 iff i = j + 1
    I_row = np.diag(np.r_[np.zeros(min(L, K)), np.ones(K - min(L, K))])
    I_col = np.diag(np.r_[1.0, np.zeros(K - 1)])

    K1 = (np.kron(I_R, I_L) - np.kron(J_R.T, J_L)) @ np.kron(np.eye(K), Vs)
    K2 = np.kron(I_row, Vs[:m])
    K3 = np.kron(I_col, Vs[m:])
    return StructureOperators(I_L=I_L, I_R=I_R, J_L=J_L, J_R=J_R, I_row=I_row, I_col=I_col,
                              K1=K1, K2=K2, K3=K3)


def structure_cost_terms(W, m: int, M: int, L: int) -> tuple[float, float, float]:
    """The three structure-error terms of ``W``, computed entry by entry."""
    W = np.asarray(W)
    K = M + L - 1
    if W.shape != (m * M, K):
        raise ValueError(f"W must be {m * M} x {K}, got {W.shape}")
    shift = 0.0
    for j in range(K - 1):
        for i in range(m * (M - 1)):
            shift += abs(W[i, j] - W[i + m, j + 1]) ** 2
    top = 0.0
    for i in range(m):
        for j in range(L, K):
            top += abs(W[i, j]) ** 2
    left = 0.0
    for i in range(m, m * M):
        left += abs(W[i, 0]) ** 2
    return float(shift), float(top), float(left)


def structure_cost_direct(W, m: int, M: int, L: int) -> float:
    """Total deviation of ``W`` from block-Toeplitz structure (brute force)."""
    return sum(structure_cost_terms(W, m, M, L))


def average_diagonal_blocks(W, m: int, M: int, L: int) -> np.ndarray:
    """Estimate ``h(k)`` as the mean of the ``M`` blocks ``W[block r, column r+k]``."""
    W = np.asarray(W)
    if W.shape != (m * M, M + L - 1):
        raise ValueError(f"W must be {m * M} x {M + L - 1}, got {W.shape}")
    taps = np.zeros((m, L), dtype=complex)
    for r in range(M):
        taps += W[r * m:(r + 1) * m, r:r + L]
    return (taps / M).T.reshape(-1)


def solve_sss(dec: SubspaceDecomposition) -> SssSolution:
    K = dec.K
    if K < 2:
        raise ValueError(f"need K = M + L - 1 >= 2, got {K}")
    ops = build_structure_operators(dec.Vs, dec.m, dec.M, dec.L)
    q, w = least_eigenvector(ops.gram())
    Q = mat(q, K, K)
    W = dec.Vs @ Q
    return SssSolution(q=q, Q=Q, W_hat=W, h_hat=average_diagonal_blocks(W, dec.m, dec.M, dec.L),
                       residual=float(w[0]))

"""Stacked data windows, sample covariance and signal/noise subspaces."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SubspaceDecomposition:
    """Signal basis ``Vs`` (``mM x K``), noise basis ``Ve`` and eigenvalues (descending)."""

    Vs: np.ndarray
    Ve: np.ndarray
    eigenvalues: np.ndarray
    m: int
    M: int
    L: int

    @property
    def K(self) -> int:
        return self.M + self.L - 1

    @property
    def noise_variance_estimate(self) -> float:
        """Mean of the ``mM - K`` smallest eigenvalues (diagnostic only)."""
        return float(np.mean(self.eigenvalues[self.K:]))

    def with_signal_basis(self, Vs) -> "SubspaceDecomposition":
        """Copy with ``Vs`` replaced, e.g. by a rotated basis of the same range."""
        return SubspaceDecomposition(np.asarray(Vs, dtype=complex), self.Ve, self.eigenvalues,
                                     self.m, self.M, self.L)


def stack_windows(samples, M: int) -> np.ndarray:
    """Stack ``M`` consecutive observations, newest on top.

    Column ``t`` is ``[y(t+M-1); y(t+M-2); ...; y(t)]``; the result is
    ``mM x (N-M+1)``. Accepts an ``ObservationSet`` or an ``m x N`` array.
    """
    Y = np.asarray(getattr(samples, "samples", samples))
    if Y.ndim == 1:
        Y = Y[np.newaxis, :]
    m, N = Y.shape
    if M < 1:
        raise ValueError(f"window length must be >= 1, got {M}")
    if N < M:
        raise ValueError(f"need N >= M, got N={N}, M={M}")
    T = N - M + 1
    return np.concatenate([Y[:, M - 1 - k:M - 1 - k + T] for k in range(M)], axis=0)


def sample_covariance(X) -> np.ndarray:
    """``X X^H / T`` made exactly Hermitian."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] < 1:
        raise ValueError(f"expected a matrix with at least one column, got shape {X.shape}")
    R = X @ X.conj().T / X.shape[1]
    return (R + R.conj().T) / 2.0


def decompose(R, K: int, m: int | None = None, M: int | None = None,
              L: int | None = None) -> SubspaceDecomposition:
    """Split the eigenvectors of Hermitian ``R`` into the ``K`` principal ones and the rest.

    ``m``, ``M`` and ``L`` are recorded on the result; when omitted the
    decomposition is treated as scalar (``m = 1``) with ``M`` rows.
    """
    R = np.asarray(R)
    n = R.shape[0]
    if R.ndim != 2 or R.shape[1] != n:
        raise ValueError(f"R must be square, got shape {R.shape}")
    if not 1 <= K < n:
        raise ValueError(f"need 1 <= K < {n} for a nonempty noise subspace, got K={K}")
    if not np.all(np.isfinite(R)):
        raise np.linalg.LinAlgError("covariance has non-finite entries")
    w, V = np.linalg.eigh(R)
    # stable descending order: by value, ties broken by original index
    order = np.lexsort((np.arange(n), -w))
    w, V = w[order], V[:, order]
    if m is None:
        m = 1
    if M is None:
        M = n // m
    if L is None:
        L = K - M + 1
    return SubspaceDecomposition(Vs=V[:, :K], Ve=V[:, K:], eigenvalues=w, m=m, M=M, L=L)


def subspace_from_observations(samples, M: int, L: int) -> SubspaceDecomposition:
    """Window, covariance and eigen-split in one step."""
    X = stack_windows(samples, M)
    m = X.shape[0] // M
    return decompose(sample_covariance(X), M + L - 1, m=m, M=M, L=L)

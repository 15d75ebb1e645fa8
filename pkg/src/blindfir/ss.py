"""Noise-subspace (SS) channel estimator.

Each noise eigenvector ``v`` is orthogonal to the range of the filtering
matrix, ``v^H H_M(h) = 0``. The block-Toeplitz structure lets this be
rewritten as a linear condition on ``h`` through the matrix ``V(v)``
returned by :func:`build_v_matrix`, and the channel is the least
eigenvector of ``sum_i V(v_i) V(v_i)^H``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .subspace import SubspaceDecomposition


class IdentifiabilityWarning(UserWarning):
    """Raised when an estimator runs outside its identifiability conditions."""


@dataclass(frozen=True)
class SsQuadraticForm:
    Q_ss: np.ndarray
    d: int


@dataclass(frozen=True)
class SsEstimate:
    h_hat: np.ndarray
    residual: float
    # second smallest eigenvalue of Q_ss; near zero means the null space is not 1-D
    gap: float
    form: SsQuadraticForm


def build_v_matrix(v, m: int, M: int, L: int) -> np.ndarray:
    """``mL x (M+L-1)`` matrix with block ``(k, j)`` equal to ``v_{j-k}``.

    Satisfies ``V^H h = (v^H H_M(h))^T`` for every stacked channel ``h``.
    """
    v = np.asarray(v).reshape(-1)
    if v.size != m * M:
        raise ValueError(f"v must have length m*M = {m * M}, got {v.size}")
    V = np.zeros((m * L, M + L - 1), dtype=np.result_type(v, float))
    blocks = v.reshape(M, m).T  # column i is v_i
    for k in range(L):
        V[k * m:(k + 1) * m, k:k + M] = blocks
    return V


def build_ss_form(dec: SubspaceDecomposition) -> SsQuadraticForm:
    d = dec.Ve.shape[1]
    if d < 1:
        raise ValueError("decomposition has an empty noise subspace")
    mL = dec.m * dec.L
    Q = np.zeros((mL, mL), dtype=complex)
    for i in range(d):
        V = build_v_matrix(dec.Ve[:, i], dec.m, dec.M, dec.L)
        Q += V @ V.conj().T
    return SsQuadraticForm(Q_ss=(Q + Q.conj().T) / 2.0, d=d)


def fix_phase(v, rel_tol: float = 1e-8) -> np.ndarray:
    """Rotate ``v`` so its first non-negligible entry is real and positive."""
    v = np.asarray(v, dtype=complex)
    mags = np.abs(v)
    idx = int(np.argmax(mags > rel_tol * np.linalg.norm(v)))
    return v * (np.conj(v[idx]) / mags[idx])


def least_eigenvector(A) -> tuple[np.ndarray, np.ndarray]:
    """Unit eigenvector of the smallest eigenvalue of Hermitian ``A``.

    Returns ``(vector, eigenvalues_ascending)``. The vector's phase is fixed
    by :func:`fix_phase`.
    """
    A = np.asarray(A)
    if not np.all(np.isfinite(A)):
        raise np.linalg.LinAlgError("matrix has non-finite entries")
    w, V = np.linalg.eigh(A)
    v = V[:, 0]
    return fix_phase(v / np.linalg.norm(v)), w


def estimate_ss(dec: SubspaceDecomposition) -> SsEstimate:
    """Least eigenvector of the SS quadratic form.

    ``M < L`` is allowed but emits an :class:`IdentifiabilityWarning`.
    """
    if dec.M < dec.L:
        warnings.warn(f"window length M={dec.M} is below channel length L={dec.L}; "
                      "the SS estimate may not be unique", IdentifiabilityWarning, stacklevel=2)
    form = build_ss_form(dec)
    h_hat, w = least_eigenvector(form.Q_ss)
    gap = float(w[1]) if w.size > 1 else float("inf")
    return SsEstimate(h_hat=h_hat, residual=float(w[0]), gap=gap, form=form)

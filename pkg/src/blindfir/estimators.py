"""scikit-learn style wrappers around the SS and SSS estimators.

Data follow the scikit-learn orientation: ``X`` has shape
``(n_samples, n_channels)``, one row per time instant ``y(t)^T``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .signal_model import ChannelSet, noiseless_output
from .ss import estimate_ss, fix_phase
from .sss import solve_sss
from .subspace import subspace_from_observations


def check_samples(X, *, min_samples: int = 1, min_channels: int = 1) -> np.ndarray:
    """Validate multichannel samples and return them as a complex ``(n_samples, m)`` array.

    Unlike :func:`sklearn.utils.check_array` this accepts complex input.
    """
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[:, np.newaxis]
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array (n_samples, n_channels), got {X.ndim}-D")
    if not (np.issubdtype(X.dtype, np.number) or X.dtype == bool):
        raise ValueError(f"expected numeric samples, got dtype {X.dtype}")
    X = X.astype(complex, copy=False)
    if not np.all(np.isfinite(X)):
        raise ValueError("samples contain NaN or infinity")
    n, m = X.shape
    if n < min_samples:
        raise ValueError(f"found {n} sample(s) while a minimum of {min_samples} is required")
    if m < min_channels:
        raise ValueError(f"found {m} channel(s) while a minimum of {min_channels} is required")
    return X


def check_is_fitted(est) -> None:
    if not hasattr(est, "coef_"):
        raise NotFittedError(f"this {type(est).__name__} instance is not fitted yet; "
                             "call 'fit' first")


class _SubspaceChannelEstimator(BaseEstimator):
    """Shared fit logic; subclasses provide ``_solve``."""

    def __init__(self, channel_length=3, window_length=None):
        self.channel_length = channel_length
        self.window_length = window_length

    def _window(self) -> int:
        return self.window_length if self.window_length is not None else self.channel_length + 1

    def fit(self, X, y=None):
        """Estimate the channel from output samples ``X`` only; ``y`` is ignored."""
        L = int(self.channel_length)
        if L < 1:
            raise ValueError(f"channel_length must be >= 1, got {self.channel_length}")
        M = int(self._window())
        X = check_samples(X, min_samples=M, min_channels=2)
        m = X.shape[1]
        if m * M <= M + L - 1:
            raise ValueError(f"m*M = {m * M} must exceed M+L-1 = {M + L - 1} "
                             "for a nonempty noise subspace; increase window_length")
        self.n_features_in_ = m
        self.subspace_ = subspace_from_observations(X.T, M, L)
        h_hat, self.residual_ = self._solve(self.subspace_)
        h_hat = fix_phase(h_hat / np.linalg.norm(h_hat))
        self.h_ = h_hat
        self.coef_ = ChannelSet.from_stacked(h_hat, m).taps
        return self

    def predict(self, symbols) -> np.ndarray:
        """Noiseless output of the estimated channel for ``symbols``.

        Returns ``(len(symbols) - L + 1, n_channels)``. The estimate carries
        the blind scalar ambiguity, so outputs match the true ones only up
        to a complex factor.
        """
        check_is_fitted(self)
        return noiseless_output(ChannelSet(self.coef_), symbols).T


class SSChannelEstimator(_SubspaceChannelEstimator):
    """Noise-subspace blind channel estimator.

    Parameters
    ----------
    channel_length : int
        Taps per subchannel ``L`` (assumed known).
    window_length : int or None
        Stacking window ``M``; defaults to ``L + 1``. ``M < L`` is accepted
        but the estimate is then not guaranteed to be unique.

    Attributes
    ----------
    coef_ : ndarray of shape (n_channels, channel_length)
        Unit-norm channel estimate, phase-normalized.
    h_ : ndarray of shape (n_channels * channel_length,)
        ``coef_`` stacked tap by tap.
    residual_ : float
        Smallest eigenvalue of the quadratic criterion.
    subspace_ : SubspaceDecomposition
    """

    def _solve(self, dec):
        est = estimate_ss(dec)
        return est.h_hat, est.residual


class SSSChannelEstimator(_SubspaceChannelEstimator):
    """Structure-based subspace blind channel estimator.

    Searches the signal subspace for the matrix closest to block-Toeplitz
    and reads the channel off its diagonal blocks. Same parameters and
    attributes as :class:`SSChannelEstimator`, plus ``solution_`` holding
    the full :class:`~blindfir.sss.SssSolution`.
    """

    def _solve(self, dec):
        self.solution_ = solve_sss(dec)
        return self.solution_.h_hat, self.solution_.residual

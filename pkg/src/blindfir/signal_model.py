"""Multichannel FIR signal model.

Channels, the block-Toeplitz filtering matrix, 4-QAM excitation, noisy
observations and a common-zeros diagnostic.

Time indexing: an observation of ``N`` samples is generated from
``N + L - 1`` symbols. ``symbols[k]`` holds ``s(k - L + 1)``, so the first
``L - 1`` entries are pre-window history and every output ``y(0) ... y(N-1)``
is in convolution steady state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

QAM4_ALPHABET = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0)


@dataclass(frozen=True)
class ChannelSet:
    """``m`` parallel FIR subchannels with ``L`` taps each.

    ``taps[:, i]`` is the tap vector ``h(i)`` shared across subchannels;
    ``taps[k, :]`` is the impulse response of subchannel ``k``.
    """

    taps: np.ndarray

    def __post_init__(self):
        taps = np.array(self.taps, dtype=complex)
        if taps.ndim == 1:
            taps = taps[np.newaxis, :]
        if taps.ndim != 2 or taps.size == 0:
            raise ValueError(f"taps must be a nonempty m x L matrix, got shape {taps.shape}")
        if not np.all(np.isfinite(taps)):
            raise ValueError("taps must be finite")
        if not np.any(taps):
            raise ValueError("channel is identically zero")
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)

    @property
    def m(self) -> int:
        return self.taps.shape[0]

    @property
    def L(self) -> int:
        return self.taps.shape[1]

    @property
    def h(self) -> np.ndarray:
        """Stacked vector ``[h(0)^T, ..., h(L-1)^T]^T`` of length ``m*L``."""
        return self.taps.T.reshape(-1)

    @classmethod
    def from_stacked(cls, h, m: int) -> "ChannelSet":
        h = np.asarray(h, dtype=complex).reshape(-1)
        if h.size % m:
            raise ValueError(f"length {h.size} is not a multiple of m={m}")
        return cls(h.reshape(-1, m).T)


@dataclass(frozen=True)
class BlockToeplitzMatrix:
    m: int
    M: int
    L: int
    data: np.ndarray

    @property
    def K(self) -> int:
        return self.M + self.L - 1

    def block(self, row: int, col: int) -> np.ndarray:
        """The length-``m`` column slice at block-row ``row``, column ``col``."""
        return self.data[row * self.m:(row + 1) * self.m, col]

    def to_channel(self) -> ChannelSet:
        return ChannelSet(np.stack([self.block(0, i) for i in range(self.L)], axis=1))


@dataclass(frozen=True)
class ObservationSet:
    """Received samples (``m x N``) plus the realization that produced them.

    ``noise_variance`` is the total variance per complex entry.
    """

    samples: np.ndarray
    symbols: np.ndarray
    noise_variance: float
    seed: object = None
    channel: ChannelSet | None = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return self.samples.shape[0]

    @property
    def N(self) -> int:
        return self.samples.shape[1]


def build_channel_pair(theta: float, delta: float) -> ChannelSet:
    """Two second-order channels with unit-circle zeros at ``±theta`` and ``±(theta+delta)``."""
    h1 = [1.0, -2.0 * np.cos(theta), 1.0]
    h2 = [1.0, -2.0 * np.cos(theta + delta), 1.0]
    return ChannelSet(np.array([h1, h2], dtype=complex))


def build_filter_matrix(ch: ChannelSet, M: int) -> BlockToeplitzMatrix:
    """Block-Toeplitz matrix mapping ``[s(t), ..., s(t-M-L+2)]`` to ``y_M(t)``.

    Block-row ``i`` holds ``h(j - i)`` in column ``j`` for ``0 <= j - i < L``.
    """
    if M < 1:
        raise ValueError(f"window length must be >= 1, got {M}")
    m, L = ch.m, ch.L
    data = np.zeros((m * M, M + L - 1), dtype=complex)
    for i in range(M):
        data[i * m:(i + 1) * m, i:i + L] = ch.taps
    return BlockToeplitzMatrix(m=m, M=M, L=L, data=data)


def generate_qam4_symbols(n: int, seed=None) -> np.ndarray:
    """``n`` i.i.d. unit-power 4-QAM symbols ``(±1 ± 1j)/sqrt(2)``."""
    if n < 1:
        raise ValueError(f"need at least one symbol, got n={n}")
    rng = np.random.default_rng(seed)
    return QAM4_ALPHABET[rng.integers(0, 4, size=n)]


def noiseless_output(ch: ChannelSet, symbols) -> np.ndarray:
    """Steady-state convolution output, ``m x (len(symbols) - L + 1)``."""
    symbols = np.asarray(symbols, dtype=complex).reshape(-1)
    if symbols.size < ch.L:
        raise ValueError(f"need at least L={ch.L} symbols, got {symbols.size}")
    return np.stack([np.convolve(symbols, row, mode="valid") for row in ch.taps])


def noise_variance_for_snr(ch: ChannelSet, symbols, snr_db: float) -> float:
    """Noise variance giving ``snr_db`` for this particular symbol draw.

    SNR is ``||noiseless output||^2 / (m * N * sigma^2)`` with the realized
    output energy in place of its expectation.
    """
    if not np.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite, got {snr_db}")
    clean = noiseless_output(ch, symbols)
    energy = float(np.sum(np.abs(clean) ** 2))
    return energy / (clean.size * 10.0 ** (snr_db / 10.0))


def simulate_output(ch: ChannelSet, symbols, noise_variance: float, seed=None) -> ObservationSet:
    """Pass ``symbols`` through ``ch`` and add circular white Gaussian noise."""
    if noise_variance < 0:
        raise ValueError(f"noise_variance must be >= 0, got {noise_variance}")
    symbols = np.asarray(symbols, dtype=complex).reshape(-1)
    clean = noiseless_output(ch, symbols)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(clean.shape) + 1j * rng.standard_normal(clean.shape)
    samples = clean + np.sqrt(noise_variance / 2.0) * noise
    return ObservationSet(samples=samples, symbols=symbols, noise_variance=float(noise_variance),
                          seed=seed, channel=ch)


def channel_zeros(ch: ChannelSet) -> list[np.ndarray]:
    """Zeros of each subchannel polynomial ``sum_k h_i(k) z^{L-1-k}``.

    Leading zero taps drop the degree; the corresponding zeros sit at infinity
    and are omitted.
    """
    return [np.roots(row) for row in ch.taps]


def zero_separation(ch: ChannelSet) -> float:
    """Smallest distance between zeros of two different subchannels.

    Returns 0 when two subchannels share a zero (identifiability lost).
    """
    if ch.m < 2 or ch.L < 2:
        raise ValueError(f"need m >= 2 and L >= 2, got m={ch.m}, L={ch.L}")
    if not np.all(np.any(ch.taps, axis=1)):
        raise ValueError("a subchannel polynomial is identically zero")
    zeros = channel_zeros(ch)
    best = np.inf
    for za, zb in combinations(zeros, 2):
        if za.size and zb.size:
            best = min(best, float(np.min(np.abs(za[:, None] - zb[None, :]))))
    return best

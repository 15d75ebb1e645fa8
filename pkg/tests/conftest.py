import math

import numpy as np
import pytest

from blindfir.signal_model import build_channel_pair, generate_qam4_symbols, simulate_output

THETA = math.pi / 10


def filter_matrix_oracle(taps, M):
    """Nested-loop block-Toeplitz construction, entry by entry."""
    m, L = taps.shape
    H = np.zeros((m * M, M + L - 1), dtype=complex)
    for blk in range(M):
        for j in range(M + L - 1):
            k = j - blk
            for s in range(m):
                H[blk * m + s, j] = taps[s, k] if 0 <= k < L else 0.0
    return H


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def aligned_error_db(h_hat, h):
    a = np.vdot(h_hat, h) / np.vdot(h_hat, h_hat)
    return 20 * np.log10(np.linalg.norm(a * h_hat - h) / np.linalg.norm(h))


@pytest.fixture
def rng():
    return np.random.default_rng(20170101)


@pytest.fixture
def well_pair():
    return build_channel_pair(THETA, math.pi)


@pytest.fixture
def noiseless_obs():
    def make(ch, N=100, seed=1):
        symbols = generate_qam4_symbols(N + ch.L - 1, seed)
        return simulate_output(ch, symbols, 0.0, seed + 1)
    return make


ACCEPTANCE_LINES = []


def report_criterion(label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import math
import warnings

import numpy as np
import pytest

from blindfir.signal_model import build_channel_pair, build_filter_matrix
from blindfir.ss import (IdentifiabilityWarning, build_ss_form, build_v_matrix, estimate_ss,
                         least_eigenvector)
from blindfir.subspace import subspace_from_observations

from conftest import THETA, aligned_error_db, filter_matrix_oracle, random_complex


def test_v_matrix_hand_example():
    V = build_v_matrix(np.array([2.0, 3.0]), m=1, M=2, L=2)
    np.testing.assert_array_equal(V, [[2, 3, 0], [0, 2, 3]])


def test_v_matrix_zero():
    assert not np.any(build_v_matrix(np.zeros(6), 2, 3, 2))


def test_v_matrix_length_check():
    with pytest.raises(ValueError):
        build_v_matrix(np.ones(5), 2, 3, 2)


@pytest.mark.parametrize("seed", range(20))
def test_structural_identity(seed):
    rng = np.random.default_rng(seed)
    m, M, L = (int(x) for x in rng.integers([1, 1, 1], [4, 6, 5]))
    h = random_complex(rng, m * L)
    v = random_complex(rng, m * M)
    H = filter_matrix_oracle(h.reshape(L, m).T, M)
    V = build_v_matrix(v, m, M, L)
    # conj-linear form: V^H h equals the row v^H H_M(h)
    np.testing.assert_allclose(V.conj().T @ h, v.conj() @ H, atol=1e-12)
    np.testing.assert_allclose(h.conj() @ V, (v.conj() @ H).conj(), atol=1e-12)
    # real data: h^H V = v^H H_M(h) without conjugation
    hr, vr = h.real, v.real
    Hr = filter_matrix_oracle(hr.reshape(L, m).T, M)
    np.testing.assert_allclose(hr @ build_v_matrix(vr, m, M, L), vr @ Hr, atol=1e-12)


def test_least_eigenvector_examples(rng):
    v, w = least_eigenvector(np.diag([3.0, 2.0, 1.0]))
    np.testing.assert_allclose(v, [0, 0, 1], atol=1e-15)
    v, w = least_eigenvector(np.diag([1.0, 1.0, 5.0]))
    assert abs(v[2]) < 1e-15 and np.linalg.norm(v) == pytest.approx(1.0)
    A = random_complex(rng, 7, 7)
    A = A + A.conj().T
    v, w = least_eigenvector(A)
    assert np.linalg.norm(A @ v - w[0] * v) < 1e-10 * np.linalg.norm(A, 2)
    first = v[np.argmax(np.abs(v) > 1e-8)]
    assert first.imag == pytest.approx(0.0, abs=1e-15) and first.real > 0


def test_least_eigenvector_rejects_nan():
    with pytest.raises(np.linalg.LinAlgError):
        least_eigenvector(np.array([[np.nan, 0], [0, 1.0]]))


def test_ss_form_single_vector_and_trace(well_pair, noiseless_obs):
    dec = subspace_from_observations(noiseless_obs(well_pair), 4, 3)
    form = build_ss_form(dec)
    Vs = [build_v_matrix(dec.Ve[:, i], 2, 4, 3) for i in range(dec.Ve.shape[1])]
    assert form.d == 2
    assert np.trace(form.Q_ss).real == pytest.approx(sum(np.linalg.norm(V) ** 2 for V in Vs))
    np.testing.assert_allclose(form.Q_ss, form.Q_ss.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(form.Q_ss).min() > -1e-10
    assert np.linalg.norm(form.Q_ss @ well_pair.h) < 1e-8
    single = build_ss_form(dec.__class__(dec.Vs, dec.Ve[:, :1], dec.eigenvalues, 2, 4, 3))
    np.testing.assert_allclose(single.Q_ss, Vs[0] @ Vs[0].conj().T, atol=1e-14)
    assert np.linalg.matrix_rank(single.Q_ss, tol=1e-10) <= 6


def test_noiseless_recovery(well_pair, noiseless_obs):
    est = estimate_ss(subspace_from_observations(noiseless_obs(well_pair), 4, 3))
    assert aligned_error_db(est.h_hat, well_pair.h) < -120
    assert np.linalg.norm(est.h_hat) == pytest.approx(1.0)
    # one-dimensional null space
    assert est.residual < 1e-12 and est.gap > 1e-3
    corr = abs(np.vdot(est.h_hat, well_pair.h)) / np.linalg.norm(well_pair.h)
    assert corr > 1 - 1e-8


def test_common_zeros_breaks_uniqueness(noiseless_obs):
    ch = build_channel_pair(THETA, 0.0)
    est = estimate_ss(subspace_from_observations(noiseless_obs(ch), 4, 3))
    # at least two null directions: the estimate is not pinned down
    assert est.residual < 1e-10 and est.gap < 1e-10


def test_scale_invariance(well_pair, rng):
    from blindfir.signal_model import generate_qam4_symbols, simulate_output
    obs = simulate_output(well_pair, generate_qam4_symbols(102, 0), 0.05, 1)
    a = estimate_ss(subspace_from_observations(obs.samples, 4, 3)).h_hat
    b = estimate_ss(subspace_from_observations(10 * obs.samples, 4, 3)).h_hat
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_noise_basis_rotation_invariance(well_pair, rng):
    from blindfir.signal_model import generate_qam4_symbols, simulate_output
    obs = simulate_output(well_pair, generate_qam4_symbols(102, 3), 0.1, 4)
    dec = subspace_from_observations(obs, 4, 3)
    U, _ = np.linalg.qr(random_complex(rng, 2, 2))
    rotated = dec.__class__(dec.Vs, dec.Ve @ U, dec.eigenvalues, 2, 4, 3)
    np.testing.assert_allclose(estimate_ss(rotated).h_hat, estimate_ss(dec).h_hat, atol=1e-10)


def test_short_window_warns(noiseless_obs, rng):
    from blindfir.signal_model import ChannelSet
    ch = ChannelSet(random_complex(rng, 3, 3))
    dec = subspace_from_observations(noiseless_obs(ch), 2, 3)
    with pytest.warns(IdentifiabilityWarning):
        estimate_ss(dec)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        estimate_ss(subspace_from_observations(noiseless_obs(ch), 3, 3))


def test_filter_matrix_orthogonal_to_noise(well_pair, noiseless_obs):
    dec = subspace_from_observations(noiseless_obs(well_pair), 5, 3)
    H = build_filter_matrix(well_pair, 5).data
    assert np.linalg.norm(dec.Ve.conj().T @ H) < 1e-8

"""Blind identification of multichannel FIR systems with subspace methods."""

__version__ = "0.1.0"

from .estimators import SSChannelEstimator, SSSChannelEstimator, check_samples  # noqa: E402
from .evaluation import ExperimentConfig, align_scale, mse_db, run_experiment  # noqa: E402
from .signal_model import (ChannelSet, build_channel_pair, build_filter_matrix,  # noqa: E402
                           generate_qam4_symbols, noise_variance_for_snr, simulate_output,
                           zero_separation)
from .ss import estimate_ss, least_eigenvector  # noqa: E402
from .sss import solve_sss, structure_cost_direct  # noqa: E402
from .subspace import decompose, sample_covariance, stack_windows  # noqa: E402

__all__ = [
    "ChannelSet", "ExperimentConfig", "SSChannelEstimator", "SSSChannelEstimator",
    "align_scale", "build_channel_pair", "build_filter_matrix", "check_samples", "decompose",
    "estimate_ss", "generate_qam4_symbols", "least_eigenvector", "mse_db",
    "noise_variance_for_snr", "run_experiment", "sample_covariance", "simulate_output",
    "solve_sss", "stack_windows", "structure_cost_direct", "zero_separation",
]

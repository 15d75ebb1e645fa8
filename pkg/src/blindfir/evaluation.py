"""Scalar alignment, MSE and the Monte Carlo experiment runner.

Each trial index owns one RNG stream derived from ``(master_seed, trial)``.
Within a trial the same symbol and unit-noise draws are reused across every
SNR, window length and channel of the sweep, and both estimators see the
same observations. Trials are independent and may run in worker processes;
results are always reduced in index order, so the output never depends on
the number of workers.
"""
from __future__ import annotations

import csv
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .signal_model import (ChannelSet, build_channel_pair, generate_qam4_symbols,
                           noise_variance_for_snr, simulate_output)
from .ss import IdentifiabilityWarning, estimate_ss
from .sss import solve_sss
from .subspace import subspace_from_observations

logger = logging.getLogger(__name__)

METHODS = ("SS", "SSS")
MSE_FLOOR_DB = -300.0

RESULT_COLUMNS = ["method", "snr_db", "M", "theta", "delta", "mse_db", "n_trials", "n_failures"]
TRIAL_COLUMNS = ["method", "snr_db", "M", "theta", "delta", "trial", "sq_error", "residual",
                 "failed"]


@dataclass(frozen=True)
class ExperimentConfig:
    """Monte Carlo protocol.

    The channel is either the pair generated from ``theta`` and each entry of
    ``deltas``, or the explicit ``channel``. ``windows`` lists the window
    lengths ``M`` to evaluate. With ``noiseless`` set, the SNR grid only
    labels the cells and no noise is added.
    """

    name: str = "custom"
    theta: float | None = math.pi / 10
    deltas: tuple[float, ...] = (math.pi,)
    channel: ChannelSet | None = None
    N: int = 100
    n_trials: int = 100
    snr_grid_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    windows: tuple[int, ...] = (4,)
    methods: tuple[str, ...] = METHODS
    master_seed: int = 0
    noiseless: bool = False

    def __post_init__(self):
        for name in ("deltas", "snr_grid_db", "windows", "methods"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.channel is None and (self.theta is None or not self.deltas):
            raise ValueError("need either an explicit channel or theta and at least one delta")
        if not self.windows or min(self.windows) < 1:
            raise ValueError(f"window lengths must be >= 1, got {self.windows}")
        if self.N < max(self.windows):
            raise ValueError(f"need N >= M, got N={self.N}, M={max(self.windows)}")
        if self.n_trials < 1:
            raise ValueError(f"need at least one trial, got {self.n_trials}")
        if not self.snr_grid_db:
            raise ValueError("SNR grid is empty")
        if not all(np.isfinite(self.snr_grid_db)):
            raise ValueError("SNR grid values must be finite")
        bad = set(self.methods) - set(METHODS)
        if bad or not self.methods:
            raise ValueError(f"methods must be a nonempty subset of {METHODS}, got {self.methods}")

    def channels(self) -> list[tuple[float | None, ChannelSet]]:
        """``(delta, channel)`` for every channel of the sweep."""
        if self.channel is not None:
            return [(None, self.channel)]
        return [(d, build_channel_pair(self.theta, d)) for d in self.deltas]


@dataclass(frozen=True)
class TrialResult:
    method: str
    snr_db: float
    M: int
    delta: float | None
    trial: int
    seed: tuple[int, int]
    sq_error: float
    residual: float
    failed: bool = False
    error: str = ""


@dataclass(frozen=True)
class CellResult:
    method: str
    snr_db: float
    M: int
    theta: float | None
    delta: float | None
    mse_db: float
    n_trials: int
    n_failures: int


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    cells: list[CellResult] = field(default_factory=list)
    trials: list[TrialResult] = field(default_factory=list)

    def mse(self, method: str, snr_db: float, M: int | None = None,
            delta: float | None = None) -> float:
        """Look up one cell's MSE in dB."""
        for c in self.cells:
            if (c.method == method and c.snr_db == snr_db and (M is None or c.M == M)
                    and (delta is None or c.delta == delta)):
                return c.mse_db
        raise KeyError((method, snr_db, M, delta))


def align_scale(h_hat, h_true) -> complex:
    """Least-squares scalar ``a`` minimizing ``||a*h_hat - h_true||``."""
    h_hat = np.asarray(h_hat).reshape(-1)
    h_true = np.asarray(h_true).reshape(-1)
    nrm2 = float(np.vdot(h_hat, h_hat).real)
    if nrm2 == 0.0:
        raise ValueError("h_hat is zero")
    return complex(np.vdot(h_hat, h_true) / nrm2)


def aligned_sq_error(h_hat, h_true) -> float:
    h_hat = np.asarray(h_hat).reshape(-1)
    h_true = np.asarray(h_true).reshape(-1)
    return float(np.sum(np.abs(align_scale(h_hat, h_true) * h_hat - h_true) ** 2))


def mse_db(sq_errors, h_true) -> float:
    """Normalized root-mean aligned error in dB, floored at ``MSE_FLOOR_DB``.

    ``sq_errors`` are per-trial ``||a_i h_hat_i - h||^2`` values, or
    ``TrialResult`` records (failed ones are skipped).
    """
    errs = [e.sq_error if isinstance(e, TrialResult) else e for e in sq_errors
            if not (isinstance(e, TrialResult) and e.failed)]
    if not errs:
        raise ValueError("no trials to average")
    ratio = math.sqrt(float(np.mean(errs))) / float(np.linalg.norm(h_true))
    if ratio <= 0.0:
        return MSE_FLOOR_DB
    return max(20.0 * math.log10(ratio), MSE_FLOOR_DB)


def trial_seeds(master_seed: int, trial: int) -> tuple[np.random.SeedSequence, np.random.SeedSequence]:
    """Independent (symbol, noise) seed sequences for one trial."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(trial,))
    symbol_seed, noise_seed = ss.spawn(2)
    return symbol_seed, noise_seed


def _estimate(method, dec):
    if method == "SS":
        est = estimate_ss(dec)
        return est.h_hat, est.residual
    sol = solve_sss(dec)
    return sol.h_hat, sol.residual


def _run_trial(cfg: ExperimentConfig, trial: int) -> list[TrialResult]:
    symbol_seed, noise_seed = trial_seeds(cfg.master_seed, trial)
    out = []
    for delta, ch in cfg.channels():
        symbols = generate_qam4_symbols(cfg.N + ch.L - 1, symbol_seed)
        h = ch.h
        for snr in cfg.snr_grid_db:
            sigma2 = 0.0 if cfg.noiseless else noise_variance_for_snr(ch, symbols, snr)
            obs = simulate_output(ch, symbols, sigma2, noise_seed)
            for M in cfg.windows:
                try:
                    dec = subspace_from_observations(obs, M, ch.L)
                except (np.linalg.LinAlgError, ValueError) as exc:
                    dec, dec_err = None, exc
                for method in cfg.methods:
                    try:
                        if dec is None:
                            raise dec_err
                        with warnings.catch_warnings():
                            warnings.simplefilter("ignore", IdentifiabilityWarning)
                            h_hat, residual = _estimate(method, dec)
                        err = aligned_sq_error(h_hat, h)
                        if not np.isfinite(err):
                            raise FloatingPointError("non-finite estimate")
                        out.append(TrialResult(method, snr, M, delta, trial,
                                               (cfg.master_seed, trial), err, residual))
                    except (np.linalg.LinAlgError, ValueError, FloatingPointError) as exc:
                        out.append(TrialResult(method, snr, M, delta, trial,
                                               (cfg.master_seed, trial), math.nan, math.nan,
                                               failed=True, error=f"{type(exc).__name__}: {exc}"))
    return out


def _run_trial_star(args):
    return _run_trial(*args)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Run every (channel, SNR, window, method, trial) combination of ``cfg``.

    Estimator failures are recorded on the trial and excluded from the cell
    mean; they never abort the sweep.
    """
    tasks = [(cfg, t) for t in range(cfg.n_trials)]
    if jobs > 1 and cfg.n_trials > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_trial = list(pool.map(_run_trial_star, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        per_trial = [_run_trial(*t) for t in tasks]

    trials = [r for rs in per_trial for r in rs]
    delta_idx = {d: i for i, (d, _) in enumerate(cfg.channels())}
    order = (lambda r: (delta_idx[r.delta], cfg.windows.index(r.M), cfg.methods.index(r.method),
                        cfg.snr_grid_db.index(r.snr_db), r.trial))
    trials.sort(key=order)

    result = ExperimentResult(config=cfg, trials=trials)
    h_by_delta = {d: ch.h for d, ch in cfg.channels()}
    theta = cfg.theta if cfg.channel is None else None
    groups: dict[tuple, list[TrialResult]] = {}
    for r in trials:
        groups.setdefault((r.delta, r.M, r.method, r.snr_db), []).append(r)
    for (delta, M, method, snr), rs in groups.items():
        n_fail = sum(r.failed for r in rs)
        if n_fail:
            logger.warning("%s at SNR %g dB, M=%d: %d of %d trials failed", method, snr, M,
                           n_fail, len(rs))
        value = mse_db(rs, h_by_delta[delta]) if n_fail < len(rs) else math.nan
        result.cells.append(CellResult(method, snr, M, theta, delta, value, len(rs), n_fail))
    return result


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_results_csv(result: ExperimentResult, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for c in result.cells:
            w.writerow([c.method, _fmt(c.snr_db), _fmt(c.M), _fmt(c.theta), _fmt(c.delta),
                        _fmt(c.mse_db), _fmt(c.n_trials), _fmt(c.n_failures)])


def write_trials_csv(result: ExperimentResult, path) -> None:
    theta = result.config.theta if result.config.channel is None else None
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(TRIAL_COLUMNS)
        for r in result.trials:
            w.writerow([r.method, _fmt(r.snr_db), _fmt(r.M), _fmt(theta), _fmt(r.delta),
                        _fmt(r.trial), _fmt(r.sq_error), _fmt(r.residual), _fmt(r.failed)])


def read_results_csv(path) -> list[dict]:
    """Parse a results CSV back into typed rows."""
    rows = []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            rows.append({
                "method": row["method"],
                "snr_db": float(row["snr_db"]),
                "M": int(row["M"]),
                "theta": float(row["theta"]) if row["theta"] else None,
                "delta": float(row["delta"]) if row["delta"] else None,
                "mse_db": float(row["mse_db"]),
                "n_trials": int(row["n_trials"]),
                "n_failures": int(row["n_failures"]),
            })
    return rows

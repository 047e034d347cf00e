"""Monte Carlo trials over many samples and the efficiency sweeps built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import theory
from .link import run_batch
from .params import DerivedParams, SystemConfig, config_for_q_sq, derive
from .rng import standard_normals, trial_generator
from .theory import TheoreticalProfile

DEFAULT_TRIALS = 5000
DEFAULT_SEED = 12345
DEFAULT_N_SET = (1, 10, 20)
# Q^2 grid in dB: -5 .. 25 inclusive, 1 dB steps
DEFAULT_GRID_DB = (-5.0, 25.0, 1.0)
# relative MSE excess attributed to saturation, in units of mu
SATURATION_ALLOWANCE = 5.0


@dataclass(frozen=True, eq=False)
class EmpiricalStats:
    M_trials: int
    P_hat: np.ndarray        # empirical MSE after each cycle
    sat_rate: np.ndarray     # fraction of trials saturated in each cycle
    R_hat: np.ndarray        # empirical rate-distortion bit rate [bit/s]
    Ebit_hat: np.ndarray     # empirical energy per bit over noise density
    # diagnostics beyond the headline statistics
    P_hat_unsat: np.ndarray  # MSE over trials with no saturation up to and including cycle k
    ever_saturated: np.ndarray
    tx_power: np.ndarray     # mean (A * tx_amp)^2
    y_mean: np.ndarray
    y_sq_mean: np.ndarray


def _column_means(values: np.ndarray) -> np.ndarray:
    # fsum makes the aggregate independent of trial order
    return np.array([math.fsum(col) / len(col) for col in values.T])


def empirical_rates(P_hat, config: SystemConfig, Q_sq: float):
    """Rate-distortion rate and energy per bit computed from empirical MSE values.

    Cycles whose MSE carries no information (P_hat >= sigma0^2) get NaN.
    """
    P_hat = np.asarray(P_hat, dtype=float)
    k = np.arange(1, len(P_hat) + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        info = np.log2(config.sigma0_sq / P_hat)
        info = np.where(info > 0, info, np.nan)
        R_hat = config.F0 / k * info
        Ebit_hat = k * Q_sq / info
    return R_hat, Ebit_hat


def simulate_draws(config: SystemConfig, profile: TheoreticalProfile, derived: DerivedParams,
                   z_source: np.ndarray, noise: np.ndarray) -> EmpiricalStats:
    """Aggregate statistics for explicit standard-normal draws.

    ``z_source`` has one draw per trial (the sample, before scaling by
    sigma0); ``noise`` is (trials, n, 2) as in ``link.run_batch``.
    """
    x = config.x0 + math.sqrt(config.sigma0_sq) * np.asarray(z_source, dtype=float)
    trace = run_batch(x, noise, profile, derived, config)
    err_sq = (trace.x_hat - x[:, None]) ** 2
    P_hat = _column_means(err_sq)

    ever = np.logical_or.accumulate(trace.saturated, axis=1)
    clean = ~ever
    with np.errstate(invalid="ignore"):
        P_hat_unsat = np.array([
            math.fsum(err_sq[clean[:, k], k]) / clean[:, k].sum() if clean[:, k].any() else np.nan
            for k in range(config.n_cycles)
        ])

    R_hat, Ebit_hat = empirical_rates(P_hat, config, derived.Q_sq)
    return EmpiricalStats(
        M_trials=len(x),
        P_hat=P_hat,
        sat_rate=trace.saturated.mean(axis=0),
        R_hat=R_hat,
        Ebit_hat=Ebit_hat,
        P_hat_unsat=P_hat_unsat,
        ever_saturated=ever.mean(axis=0),
        tx_power=_column_means((derived.A * trace.tx_amp) ** 2),
        y_mean=_column_means(trace.y_tilde),
        y_sq_mean=_column_means(trace.y_tilde ** 2),
    )


def draw_trials(M: int, n_cycles: int, master_seed: int):
    """Per-trial draws: one source variate, then 2n channel variates, from stream (seed, m)."""
    z_source = np.empty(M)
    noise = np.empty((M, n_cycles, 2))
    for m in range(M):
        gen = trial_generator(master_seed, m)
        z_source[m] = standard_normals(gen, 1)[0]
        noise[m] = standard_normals(gen, 2 * n_cycles).reshape(n_cycles, 2)
    return z_source, noise


def run_trials(config: SystemConfig, profile: TheoreticalProfile | None = None,
               M: int = DEFAULT_TRIALS, master_seed: int = DEFAULT_SEED,
               derived: DerivedParams | None = None) -> EmpiricalStats:
    if M < 1:
        raise ValueError(f"need at least one trial, got M={M}")
    derived = derived or derive(config)
    profile = profile or theory.build_profile(derived, config)
    z_source, noise = draw_trials(M, config.n_cycles, master_seed)
    return simulate_draws(config, profile, derived, z_source, noise)


def oracle_tolerance(M: int, mu: float) -> float:
    """Allowed |P_hat - P| / P: three standard errors of a Gaussian second moment plus saturation excess."""
    return 3.0 * math.sqrt(2.0 / M) + SATURATION_ALLOWANCE * mu


def oracle_errors(stats: EmpiricalStats, profile: TheoreticalProfile) -> np.ndarray:
    P = profile.P[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.abs(stats.P_hat - P) / P
    # a zero theoretical MSE is only matched by a (numerically) zero empirical one
    return np.where(P == 0, np.where(stats.P_hat <= 1e-20, 0.0, np.inf), rel)


def db_grid(lo: float, hi: float, step: float) -> np.ndarray:
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


@dataclass(frozen=True, eq=False)
class SweepResult:
    q_sq: np.ndarray
    n_set: tuple[int, ...]
    n_star: np.ndarray
    ebit_theory: dict = field(default_factory=dict)     # n -> array over q_sq
    ebit_empirical: dict = field(default_factory=dict)
    rate_theory: dict = field(default_factory=dict)     # R / F0 [bit/s/Hz]
    rate_empirical: dict = field(default_factory=dict)
    mse_theory: dict = field(default_factory=dict)      # exact recursion P_n
    mse_empirical: dict = field(default_factory=dict)

    @property
    def q_sq_db(self) -> np.ndarray:
        return theory.to_db(self.q_sq)


def sweep_efficiency(template: SystemConfig, q_sq_grid, n_set=DEFAULT_N_SET,
                     M: int = DEFAULT_TRIALS, master_seed: int = DEFAULT_SEED) -> SweepResult:
    """Theoretical and empirical P-B efficiency over a grid of Q^2 values.

    Q^2 is moved by rescaling A0 only.  One simulation of max(n_set) cycles
    per grid point serves every n in ``n_set``: the schedules for the first
    k cycles do not depend on the total cycle count.  All grid points share
    ``master_seed`` (common random numbers).
    """
    q_sq_grid = np.asarray(q_sq_grid, dtype=float)
    if q_sq_grid.size == 0:
        raise ValueError("empty Q^2 grid")
    n_set = tuple(sorted(set(int(n) for n in n_set)))
    if n_set[0] < 1:
        raise ValueError("cycle counts must be >= 1")
    n_max = n_set[-1]

    result = SweepResult(q_sq=q_sq_grid, n_set=n_set, n_star=np.empty(q_sq_grid.size))
    for n in n_set:
        for table in (result.ebit_theory, result.ebit_empirical,
                      result.rate_theory, result.rate_empirical,
                      result.mse_theory, result.mse_empirical):
            table[n] = np.empty(q_sq_grid.size)

    for i, q_sq in enumerate(q_sq_grid):
        config = config_for_q_sq(template, q_sq).replace(n_cycles=n_max)
        derived = derive(config)
        profile = theory.build_profile(derived, config)
        stats = run_trials(config, profile, M, master_seed, derived)
        result.n_star[i] = profile.n_star
        for n in n_set:
            result.ebit_theory[n][i] = theory.power_efficiency(n, derived, config)
            result.rate_theory[n][i] = theory.afcs_capacity_bound(n, derived, config) / config.F0
            result.ebit_empirical[n][i] = stats.Ebit_hat[n - 1]
            result.rate_empirical[n][i] = stats.R_hat[n - 1] / config.F0
            result.mse_theory[n][i] = profile.P[n]
            result.mse_empirical[n][i] = stats.P_hat[n - 1]
    return result

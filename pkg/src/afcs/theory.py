"""Closed-form schedules, MMSE recursion and information limits.

Everything here is deterministic.  The exact recursion (``mmse_step`` /
``build_profile``) is the authoritative MSE sequence; ``mmse_approx`` is the
two-branch threshold approximation and is only ever used where asked for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import DerivedParams, SystemConfig

LOG2_2PIE = math.log2(2.0 * math.pi * math.e)


@dataclass(frozen=True, eq=False)
class TheoreticalProfile:
    M_hat: np.ndarray  # modulation indices used in cycles 1..n
    L: np.ndarray      # receiver gains L_1..L_n
    P: np.ndarray      # MMSE P_0..P_n, P_0 = sigma0^2
    n_star: float
    C_forward: float   # bit/s

    @property
    def n_cycles(self) -> int:
        return len(self.L)


def mmse_step(P_prev: float, Q_sq: float, sigma_v_sq: float) -> float:
    """One step of the MMSE recursion P_{k-1} -> P_k."""
    denom = sigma_v_sq + P_prev
    if denom == 0.0:
        return 0.0
    return P_prev * ((1.0 + Q_sq) * sigma_v_sq + P_prev) / ((1.0 + Q_sq) * denom)


def mmse_step_unreduced(P_prev, sigma_v_sq, A, M_prev, sigma_zeta_sq):
    """MMSE step written with the modulation index and gain left explicit."""
    g2 = (A * M_prev) ** 2
    return (sigma_zeta_sq + g2 * sigma_v_sq) * P_prev / (sigma_zeta_sq + g2 * (sigma_v_sq + P_prev))


def modulation_index(P_prev: float, sigma_v_sq: float, alpha: float) -> float:
    return 1.0 / (alpha * math.sqrt(sigma_v_sq + P_prev))


def receiver_gain(P_prev, M_prev, derived: DerivedParams, sigma_v_sq):
    """L_k = Q^2/(1+Q^2) * P_{k-1}/(sigma_v^2 + P_{k-1}) / (A M_{k-1})."""
    q = derived.Q_sq
    share = P_prev / (sigma_v_sq + P_prev) if (sigma_v_sq + P_prev) > 0 else 1.0
    return q / (1.0 + q) * share / (derived.A * M_prev)


def receiver_gain_ratio_form(P_prev, P_k, M_prev, A):
    """L_k = (1 - P_k / P_{k-1}) / (A M_{k-1})."""
    return (1.0 - P_k / P_prev) / (A * M_prev)


def build_profile(derived: DerivedParams, config: SystemConfig) -> TheoreticalProfile:
    n = config.n_cycles
    P = np.empty(n + 1)
    M_hat = np.empty(n)
    L = np.empty(n)
    P[0] = config.sigma0_sq
    for k in range(n):
        if k == 0:
            M_hat[0] = 1.0 / (derived.alpha * math.sqrt(config.sigma0_sq))
        else:
            M_hat[k] = modulation_index(P[k], config.sigma_v_sq, derived.alpha)
        L[k] = receiver_gain(P[k], M_hat[k], derived, config.sigma_v_sq)
        P[k + 1] = mmse_step(P[k], derived.Q_sq, config.sigma_v_sq)
    for arr in (P, M_hat, L):
        arr.flags.writeable = False
    return TheoreticalProfile(
        M_hat=M_hat,
        L=L,
        P=P,
        n_star=threshold_n_star(derived, config),
        C_forward=forward_capacity(derived, config),
    )


def threshold_n_star(derived: DerivedParams, config: SystemConfig) -> float:
    """Cycle count at which the first-branch MSE reaches sigma_v^2 (may be non-integer)."""
    if derived.Q_sq <= 0:
        raise ValueError("threshold undefined for Q^2 = 0")
    if config.sigma_v_sq == 0:
        return math.inf
    return math.log2(config.sigma0_sq / config.sigma_v_sq) / math.log2(1.0 + derived.Q_sq)


def mmse_approx(n: int, derived: DerivedParams, config: SystemConfig) -> float:
    n_star = threshold_n_star(derived, config)
    if n <= n_star:
        return config.sigma0_sq * (1.0 + derived.Q_sq) ** (-n)
    return config.sigma_v_sq / (n - n_star + 1.0)


def entropies(n: int, derived: DerivedParams) -> tuple[float, float, float]:
    """(H(Y_1^n), H(Y_1^n | e_1^n), I(Y_1^n; e_1^n)) in bits."""
    h_post = 0.5 * n * (LOG2_2PIE + math.log2(derived.sigma_zeta_sq))
    mutual = 0.5 * n * math.log2(1.0 + derived.Q_sq)
    h_prior = 0.5 * n * (LOG2_2PIE + math.log2(derived.sigma_zeta_sq * (1.0 + derived.Q_sq)))
    return h_prior, h_post, mutual


def forward_capacity(derived: DerivedParams, config: SystemConfig) -> float:
    return config.F0 * math.log2(1.0 + derived.Q_sq)


def rate_distortion(n: int, P_n: float, config: SystemConfig) -> float:
    """Minimal bit rate [bit/s] that reproduces the sample with MSE ``P_n`` after n cycles."""
    if not 0.0 < P_n <= config.sigma0_sq:
        raise ValueError(f"P_n must lie in (0, sigma0^2], got {P_n!r}")
    return config.F0 / n * math.log2(config.sigma0_sq / P_n)


def afcs_capacity_bound(n: int, derived: DerivedParams, config: SystemConfig) -> float:
    n_star = threshold_n_star(derived, config)
    if n <= n_star:
        return forward_capacity(derived, config)
    return config.F0 / n * math.log2(config.sigma0_sq / config.sigma_v_sq * (n - n_star + 1.0))


def energy_per_bit(n: int, P_n: float, Q_sq: float, sigma0_sq: float) -> float:
    """Ebit/N = n Q^2 / log2(sigma0^2 / P_n), for any (theoretical or empirical) MSE."""
    info = math.log2(sigma0_sq / P_n)
    if not info > 0:
        raise ValueError(f"no information delivered: sigma0^2 / P_n = {sigma0_sq / P_n!r}")
    return n * Q_sq / info


def power_efficiency(n: int, derived: DerivedParams, config: SystemConfig) -> float:
    q = derived.Q_sq
    if q <= 0:
        raise ValueError("power efficiency undefined for Q^2 = 0")
    n_star = threshold_n_star(derived, config)
    if n <= n_star:
        return q / math.log2(1.0 + q)
    arg = config.sigma0_sq / config.sigma_v_sq * (n - n_star + 1.0)
    if not arg > 1.0:
        raise ValueError(f"log argument {arg!r} <= 1")
    return n * q / math.log2(arg)


def tradeoff_product(n: int, derived: DerivedParams, config: SystemConfig) -> float:
    """(R/F0) * (Ebit/N); equals Q^2 identically."""
    return afcs_capacity_bound(n, derived, config) / config.F0 * power_efficiency(n, derived, config)


def to_db(value):
    return 10.0 * np.log10(value)

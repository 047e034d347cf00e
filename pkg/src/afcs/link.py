"""One sample's n-cycle transmission at demodulated baseband.

Cycle k runs in this order:

1. the BS control x_hat_{k-1} reaches the TU through the feedback channel,
   B_hat_k = x_hat_{k-1} + v_k (cycle 1 uses the shared prior mean x0);
2. the TU modulates the residual x - B_hat_k with the preset index M_hat,
   clipping the normalised amplitude to [-1, 1];
3. the forward channel scales by A and adds zeta_k;
4. the BS applies x_hat_k = x_hat_{k-1} + L_k * y_k.  It cannot tell a
   saturated cycle from a linear one, so the same gain is used either way.

Noise is drawn as standard normals and scaled here: per cycle one feedback
draw, then one forward draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import DerivedParams, SystemConfig
from .rng import standard_normals
from .theory import TheoreticalProfile


@dataclass(frozen=True)
class TransmitterState:
    B_hat: float
    M_hat: float

    def __post_init__(self):
        if not self.M_hat > 0:
            raise ValueError(f"modulation index must be > 0, got {self.M_hat!r}")


@dataclass(frozen=True)
class ReceiverState:
    x_hat: float
    k: int = 0


@dataclass(frozen=True)
class CycleRecord:
    k: int
    residual: float
    saturated: bool
    tx_amp: float
    y_tilde: float
    x_hat_after: float


@dataclass(frozen=True)
class SessionTrace:
    x_true: float
    cycles: tuple[CycleRecord, ...]

    @property
    def final_estimate(self) -> float:
        return self.cycles[-1].x_hat_after


def modulate(x: float, tx: TransmitterState) -> tuple[float, bool]:
    u = tx.M_hat * (x - tx.B_hat)
    if abs(u) > 1.0:
        return math.copysign(1.0, u), True
    return u, False


def forward_channel(tx_amp: float, derived: DerivedParams, noise_draw: float) -> float:
    """Demodulated observation; ``noise_draw`` is already scaled to N(0, sigma_zeta^2)."""
    return derived.A * tx_amp + noise_draw


def feedback_channel(B_sent: float, sigma_v_sq: float, noise_draw: float) -> float:
    # sigma_v_sq is part of the contract; the caller scales noise_draw
    if sigma_v_sq == 0:
        return B_sent
    return B_sent + noise_draw


def receiver_update(rx: ReceiverState, y_tilde: float, L_k: float) -> ReceiverState:
    return ReceiverState(rx.x_hat + L_k * y_tilde, rx.k + 1)


def run_session(x, profile: TheoreticalProfile, derived: DerivedParams, config: SystemConfig,
                rng=None, noise=None) -> SessionTrace:
    """Transmit one sample ``x`` over ``config.n_cycles`` cycles.

    Noise comes from ``rng`` (2n standard normals, see module docstring) or,
    for replay, from an explicit ``noise`` array of shape (n, 2) holding
    (feedback, forward) standard-normal draws per cycle.
    """
    n = config.n_cycles
    if noise is None:
        noise = standard_normals(rng, 2 * n).reshape(n, 2)
    sd_v = math.sqrt(config.sigma_v_sq)
    sd_zeta = math.sqrt(derived.sigma_zeta_sq)

    rx = ReceiverState(config.x0)
    cycles = []
    for k in range(n):
        B_hat = feedback_channel(rx.x_hat, config.sigma_v_sq, sd_v * noise[k, 0])
        tx = TransmitterState(B_hat, profile.M_hat[k])
        tx_amp, saturated = modulate(x, tx)
        y = forward_channel(tx_amp, derived, sd_zeta * noise[k, 1])
        rx = receiver_update(rx, y, profile.L[k])
        cycles.append(CycleRecord(k + 1, x - B_hat, saturated, tx_amp, y, rx.x_hat))
    return SessionTrace(x, tuple(cycles))


@dataclass(frozen=True, eq=False)
class BatchTrace:
    """Many sessions at once; every array is (trials, n_cycles)."""

    x_true: np.ndarray
    residual: np.ndarray
    saturated: np.ndarray
    tx_amp: np.ndarray
    y_tilde: np.ndarray
    x_hat: np.ndarray


def run_batch(x: np.ndarray, noise: np.ndarray, profile: TheoreticalProfile,
              derived: DerivedParams, config: SystemConfig) -> BatchTrace:
    """Vectorised ``run_session`` over trials.

    ``noise`` has shape (trials, n, 2) with the same per-cycle layout as
    ``run_session``; given identical draws the two agree bit for bit.
    """
    x = np.asarray(x, dtype=float)
    trials, n = x.shape[0], config.n_cycles
    sd_v = math.sqrt(config.sigma_v_sq)
    sd_zeta = math.sqrt(derived.sigma_zeta_sq)

    out = {name: np.empty((trials, n)) for name in ("residual", "tx_amp", "y_tilde", "x_hat")}
    saturated = np.empty((trials, n), dtype=bool)
    x_hat = np.full(trials, float(config.x0))
    for k in range(n):
        B_hat = x_hat + sd_v * noise[:, k, 0] if config.sigma_v_sq else x_hat.copy()
        u = profile.M_hat[k] * (x - B_hat)
        sat = np.abs(u) > 1.0
        tx_amp = np.where(sat, np.copysign(1.0, u), u)
        y = derived.A * tx_amp + sd_zeta * noise[:, k, 1]
        x_hat = x_hat + profile.L[k] * y
        out["residual"][:, k] = x - B_hat
        out["tx_amp"][:, k] = tx_amp
        out["y_tilde"][:, k] = y
        out["x_hat"][:, k] = x_hat
        saturated[:, k] = sat
    return BatchTrace(x_true=x, saturated=saturated, **out)

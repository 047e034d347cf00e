"""System configuration and the quantities derived from it.

All inputs are in self-consistent units; nothing here converts between
unit systems.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

# factor by which sigma0^2 / sigma_v^2 must exceed 1 + Q^2 before the
# two-branch MSE approximation is considered trustworthy
R_MARGIN = 10.0


class ConfigError(ValueError):
    """Invalid or unparseable system configuration."""


@dataclass(frozen=True)
class SystemConfig:
    x0: float = 0.0           # prior mean of the sample
    sigma0_sq: float = 1.0    # prior variance
    sigma_v_sq: float = 1e-4  # feedback channel noise variance
    A0: float = 1.0           # carrier amplitude
    gamma0: float = 1.0       # forward channel gain
    r: float = 1.0            # TU-BS distance
    N_zeta: float = 1.0       # forward noise spectral density
    F0: float = 1.0           # forward channel bandwidth [Hz]
    mu: float = 0.01          # permissible saturation probability
    n_cycles: int = 20

    def __post_init__(self):
        for name in ("sigma0_sq", "A0", "gamma0", "r", "N_zeta", "F0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.sigma_v_sq) and self.sigma_v_sq >= 0):
            raise ConfigError(f"sigma_v_sq must be finite and >= 0, got {self.sigma_v_sq!r}")
        if not math.isfinite(self.x0):
            raise ConfigError(f"x0 must be finite, got {self.x0!r}")
        if not 0.0 < self.mu < 1.0:
            raise ConfigError(f"mu must lie in (0, 1), got {self.mu!r}")
        if isinstance(self.n_cycles, bool) or int(self.n_cycles) != self.n_cycles or self.n_cycles < 1:
            raise ConfigError(f"n_cycles must be an integer >= 1, got {self.n_cycles!r}")
        object.__setattr__(self, "n_cycles", int(self.n_cycles))

    def replace(self, **changes) -> SystemConfig:
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class DerivedParams:
    alpha: float          # saturation factor
    A: float              # demodulated forward gain
    sigma_zeta_sq: float  # forward noise variance N_zeta * F0
    W: float              # power of the information component (A / alpha)^2
    Q_sq: float           # SNR at the forward demodulator output
    delta_t0: float       # duration of one cycle, 1 / (2 F0)
    snr_inp: float        # sigma0^2 / sigma_v^2, inf for a noiseless feedback link

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def normal_sf(x: float) -> float:
    """Upper tail P(Z > x) of the standard normal."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def two_sided_tail(alpha: float) -> float:
    """P(|Z| > alpha), i.e. 1 - 2 * int_0^alpha phi(t) dt."""
    return math.erfc(alpha / math.sqrt(2.0))


def alpha_from_mu(mu: float) -> float:
    """Saturation factor alpha such that P(|Z| > alpha) = mu.

    Solved by bisection on the two-sided normal tail; the tail is evaluated
    with ``erfc`` so tiny ``mu`` keeps full relative precision.
    """
    if not 0.0 < mu < 1.0:
        raise ValueError(f"mu must lie in (0, 1), got {mu!r}")
    lo, hi = 0.0, 1.0
    while two_sided_tail(hi) > mu:
        lo, hi = hi, 2.0 * hi
    # bisect until the bracket collapses to adjacent doubles
    while True:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if two_sided_tail(mid) > mu:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def q_sq_carrier_form(config: SystemConfig, alpha: float) -> float:
    """Q^2 written in carrier-level quantities.

    Received carrier power of the information component is
    (A0 gamma0 / (alpha r))^2 / 2; the 1/2 is the same factor that puts the
    sqrt(2) into the demodulated gain A.
    """
    return (config.A0 * config.gamma0 / (alpha * config.r)) ** 2 / (2.0 * config.N_zeta * config.F0)


def derive(config: SystemConfig) -> DerivedParams:
    alpha = alpha_from_mu(config.mu)
    A = config.A0 * config.gamma0 / (config.r * math.sqrt(2.0))
    sigma_zeta_sq = config.N_zeta * config.F0
    W = (A / alpha) ** 2
    if config.sigma_v_sq == 0:
        snr_inp = math.inf
    else:
        snr_inp = config.sigma0_sq / config.sigma_v_sq
    return DerivedParams(
        alpha=alpha,
        A=A,
        sigma_zeta_sq=sigma_zeta_sq,
        W=W,
        Q_sq=W / sigma_zeta_sq,
        delta_t0=1.0 / (2.0 * config.F0),
        snr_inp=snr_inp,
    )


@dataclass(frozen=True)
class RegimeReport:
    snr_inp: float
    required: float  # R_MARGIN * (1 + Q^2)
    ratio: float     # snr_inp / (1 + Q^2)
    warnings: tuple[str, ...]


def validate_regime(config: SystemConfig, derived: DerivedParams) -> RegimeReport:
    """Check that the input SNR dominates 1 + Q^2 by at least R_MARGIN.

    Advisory only: a violated regime yields a warning string, never an error.
    """
    one_plus_q = 1.0 + derived.Q_sq
    ratio = derived.snr_inp / one_plus_q
    warnings = []
    if ratio < R_MARGIN:
        warnings.append(
            f"sigma0^2/sigma_v^2 = {derived.snr_inp:.6g} is only {ratio:.3g} x (1 + Q^2); "
            f"the two-branch MSE approximation assumes a margin of at least {R_MARGIN:g}"
        )
    return RegimeReport(derived.snr_inp, R_MARGIN * one_plus_q, ratio, tuple(warnings))


_FIELDS = {f.name: f for f in dataclasses.fields(SystemConfig)}


def _coerce(key: str, text: str):
    if key not in _FIELDS:
        raise ConfigError(f"unknown config key {key!r}")
    text = text.strip()
    try:
        if key == "n_cycles":
            value = float(text)
            if not value.is_integer():
                raise ValueError
            return int(value)
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as a number") from None


def parse_overrides(pairs) -> dict:
    """Turn ``["key=value", ...]`` into a typed dict of SystemConfig fields."""
    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ConfigError(f"override {pair!r} is not of the form key=value")
        key = key.strip()
        out[key] = _coerce(key, value)
    return out


def read_config_text(text: str) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys are case sensitive (A0 vs a0)
    try:
        parser.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return {key: _coerce(key, value) for key, value in parser["config"].items()}


def load_config(path=None, overrides=()) -> SystemConfig:
    """Build a SystemConfig from an optional ``key = value`` file plus overrides."""
    values = {}
    if path is not None:
        values.update(read_config_text(Path(path).read_text()))
    values.update(parse_overrides(overrides))
    return SystemConfig(**values)


def config_for_q_sq(template: SystemConfig, q_sq: float) -> SystemConfig:
    """Rescale A0 so the derived Q^2 equals ``q_sq``; all other fields are kept."""
    if not q_sq > 0:
        raise ValueError(f"Q^2 must be > 0, got {q_sq!r}")
    alpha = alpha_from_mu(template.mu)
    A = alpha * math.sqrt(q_sq * template.N_zeta * template.F0)
    A0 = A * template.r * math.sqrt(2.0) / template.gamma0
    return template.replace(A0=A0)

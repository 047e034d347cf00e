"""Command-line front end: ``afcs theory | simulate | sweep``.

Every command writes CSV files whose leading ``#`` lines carry metadata and
the digest of a ``manifest.json`` written next to them.  Data rows hold
full-precision decimals.

Exit codes: 0 success, 2 configuration/domain error, 3 oracle self-check
failure (simulate), 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, theory
from .montecarlo import (
    DEFAULT_GRID_DB, DEFAULT_N_SET, DEFAULT_SEED, DEFAULT_TRIALS,
    db_grid, oracle_errors, oracle_tolerance, run_trials, sweep_efficiency,
)
from .params import ConfigError, SystemConfig, derive, load_config, validate_regime
from .rng import NORMAL_METHOD

EXIT_OK, EXIT_CONFIG, EXIT_CHECK, EXIT_IO = 0, 2, 3, 4


@dataclass
class RunManifest:
    command: str
    config: dict
    derived: dict
    master_seed: int | None
    tool_version: str
    normal_method: str
    created_utc: str
    extra: dict

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=_json_default)


def _json_default(obj):
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    raise TypeError(type(obj))


def _jsonable(d: dict) -> dict:
    return {k: ("inf" if isinstance(v, float) and math.isinf(v) else v) for k, v in d.items()}


def fmt(value) -> str:
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return "nan"
    return format(value, ".17g")


def write_manifest(out_dir: Path, manifest: RunManifest) -> str:
    text = manifest.to_json()
    (out_dir / "manifest.json").write_text(text + "\n")
    return hashlib.sha256(text.encode()).hexdigest()


def write_csv(path: Path, header: list[str], rows, comments: list[str]) -> None:
    with path.open("w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if not isinstance(v, str) else v for v in row])


def read_csv_rows(path) -> list[list[str]]:
    """Data rows (header included) of a CSV written by this tool, metadata lines skipped."""
    with open(path, newline="") as fh:
        return [row for row in csv.reader(line for line in fh if not line.startswith("#"))]


def _parse_grid(text: str) -> tuple[float, float, float]:
    try:
        lo, hi, step = (float(part) for part in text.split(":"))
    except ValueError:
        raise ConfigError(f"--grid-db expects lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise ConfigError(f"--grid-db needs step > 0 and hi >= lo, got {text!r}")
    return lo, hi, step


def _parse_n_set(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"--n-set expects comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise ConfigError("--n-set needs at least one cycle count >= 1")
    return values


def _load(args) -> SystemConfig:
    overrides = list(args.set or [])
    if args.cycles is not None:
        overrides.append(f"n_cycles={args.cycles}")
    return load_config(args.config, overrides)


def _manifest(command, config, derived, seed, **extra) -> RunManifest:
    return RunManifest(
        command=command,
        config=config.as_dict(),
        derived=_jsonable(derived.as_dict()),
        master_seed=seed,
        tool_version=__version__,
        normal_method=NORMAL_METHOD,
        created_utc=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        extra=extra,
    )


def _report_regime(config, derived) -> None:
    for warning in validate_regime(config, derived).warnings:
        print(f"warning: {warning}", file=sys.stderr)


def cmd_theory(args) -> int:
    config = _load(args)
    derived = derive(config)
    _report_regime(config, derived)
    profile = theory.build_profile(derived, config)
    q_db = float(theory.to_db(derived.Q_sq))

    rows = [[0, None, None, profile.P[0], config.sigma0_sq, None, None, None, None]]
    for k in range(1, config.n_cycles + 1):
        rate = theory.afcs_capacity_bound(k, derived, config) / config.F0
        ebit = theory.power_efficiency(k, derived, config)
        rows.append([
            k, profile.M_hat[k - 1], profile.L[k - 1], profile.P[k],
            theory.mmse_approx(k, derived, config),
            rate, ebit, theory.to_db(rate), theory.to_db(ebit),
        ])

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    digest = write_manifest(out_dir, _manifest("theory", config, derived, None))
    write_csv(
        out_dir / "theory.csv",
        ["k", "M_hat", "L", "P_exact", "P_approx", "R_over_F0", "Ebit_over_N",
         "R_over_F0_dB", "Ebit_over_N_dB"],
        rows,
        [
            f"manifest sha256={digest}",
            f"Q_sq={fmt(derived.Q_sq)} Q_sq_dB={fmt(q_db)} alpha={fmt(derived.alpha)}",
            f"n_star={fmt(profile.n_star)} C_forward_bit_per_s={fmt(profile.C_forward)}",
            "M_hat on row k is the index used during cycle k; R and Ebit are the limit (bound) values",
        ],
    )

    print(f"Q^2 = {derived.Q_sq:.6g} ({q_db:.3f} dB), alpha = {derived.alpha:.6f}, "
          f"n* = {profile.n_star:.4f}, C = {profile.C_forward:.6g} bit/s")
    print(f"{'k':>4} {'P_exact':>12} {'P_approx':>12} {'R/F0':>9} {'Ebit/N':>9} {'R+E [dB]':>9}")
    for row in rows[1:]:
        print(f"{row[0]:>4} {row[3]:>12.5e} {row[4]:>12.5e} {row[5]:>9.4f} {row[6]:>9.4f} "
              f"{row[7] + row[8]:>9.4f}")
    print(f"wrote {out_dir / 'theory.csv'}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = _load(args)
    derived = derive(config)
    _report_regime(config, derived)
    profile = theory.build_profile(derived, config)
    stats = run_trials(config, profile, args.trials, args.seed, derived)

    tol = oracle_tolerance(args.trials, config.mu)
    errors = oracle_errors(stats, profile)
    passed = bool(np.all(errors <= tol))

    rows = [
        [k + 1, profile.P[k + 1], stats.P_hat[k], stats.sat_rate[k], stats.R_hat[k],
         stats.Ebit_hat[k], stats.P_hat_unsat[k]]
        for k in range(config.n_cycles)
    ]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    digest = write_manifest(out_dir, _manifest("simulate", config, derived, args.seed,
                                               trials=args.trials, tolerance=tol, passed=passed))
    write_csv(
        out_dir / "simulate.csv",
        ["k", "P_theory", "P_hat", "sat_rate", "R_hat", "Ebit_hat", "P_hat_unsat"],
        rows,
        [
            f"manifest sha256={digest}",
            f"trials={args.trials} seed={args.seed} Q_sq={fmt(derived.Q_sq)} n_star={fmt(profile.n_star)}",
            "P_hat_unsat: MSE over trials not saturated in any cycle up to k",
        ],
    )

    print(f"{'k':>4} {'P_theory':>12} {'P_hat':>12} {'rel.err':>8} {'sat':>7}")
    for k in range(config.n_cycles):
        print(f"{k + 1:>4} {profile.P[k + 1]:>12.5e} {stats.P_hat[k]:>12.5e} "
              f"{errors[k]:>8.4f} {stats.sat_rate[k]:>7.4f}")
    worst = int(np.argmax(errors))
    verdict = "PASS" if passed else "FAIL"
    print(f"{verdict}: max |P_hat - P|/P = {errors[worst]:.4f} at k={worst + 1} (tolerance {tol:.4f})")
    print(f"wrote {out_dir / 'simulate.csv'}")
    return EXIT_OK if passed else EXIT_CHECK


def cmd_sweep(args) -> int:
    config = _load(args)
    grid_db = db_grid(*_parse_grid(args.grid_db))
    n_set = _parse_n_set(args.n_set)
    result = sweep_efficiency(config, 10.0 ** (grid_db / 10.0), n_set, args.trials, args.seed)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    digest = write_manifest(out_dir, _manifest(
        "sweep", config, derive(config), args.seed,
        trials=args.trials, grid_db=list(grid_db), n_set=list(n_set),
        q_sq_knob="A0 rescaled, all other fields fixed"))

    fig2_header = ["Q_sq_dB", "Q_sq", "n_star"]
    fig3_header = ["Q_sq_dB"]
    for n in result.n_set:
        fig2_header += [f"Ebit_theory_n{n}", f"Ebit_empirical_n{n}"]
        fig3_header += [f"Ebit_theory_dB_n{n}", f"R_over_F0_theory_n{n}",
                        f"Ebit_empirical_dB_n{n}", f"R_over_F0_empirical_n{n}"]
    fig2_rows, fig3_rows = [], []
    for i, q_db in enumerate(grid_db):
        row2 = [q_db, result.q_sq[i], result.n_star[i]]
        row3 = [q_db]
        for n in result.n_set:
            row2 += [result.ebit_theory[n][i], result.ebit_empirical[n][i]]
            row3 += [theory.to_db(result.ebit_theory[n][i]), result.rate_theory[n][i],
                     theory.to_db(result.ebit_empirical[n][i]), result.rate_empirical[n][i]]
        fig2_rows.append(row2)
        fig3_rows.append(row3)

    write_csv(out_dir / "fig2.csv", fig2_header, fig2_rows, [
        f"manifest sha256={digest}",
        "energy per bit over noise density (linear) vs forward SNR Q^2, per cycle count n",
    ])
    write_csv(out_dir / "fig3.csv", fig3_header, fig3_rows, [
        f"manifest sha256={digest}",
        "P-B efficiency plane: x = Ebit/N [dB], y = R/F0 [bit/s/Hz], per cycle count n",
    ])
    print(f"swept {len(grid_db)} points x n in {list(result.n_set)}; "
          f"wrote {out_dir / 'fig2.csv'} and {out_dir / 'fig3.csv'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="afcs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value config file")
    common.add_argument("--set", metavar="KEY=VALUE", action="append",
                        help="override one config field (repeatable)")
    common.add_argument("--cycles", type=int, help="number of transmission cycles n")
    common.add_argument("--out-dir", default="results", help="output directory (default: results)")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="samples M (default 5000)")
    sim.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("theory", parents=[common], help="closed-form schedules and limits").set_defaults(func=cmd_theory)
    sub.add_parser("simulate", parents=[common, sim], help="Monte Carlo run with oracle check").set_defaults(func=cmd_simulate)
    sweep = sub.add_parser("sweep", parents=[common, sim], help="efficiency curves over Q^2")
    lo, hi, step = DEFAULT_GRID_DB
    sweep.add_argument("--grid-db", default=f"{lo:g}:{hi:g}:{step:g}", help="Q^2 grid lo:hi:step in dB")
    sweep.add_argument("--n-set", default=",".join(map(str, DEFAULT_N_SET)), help="cycle counts, e.g. 1,10,20")
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "trials", 1) < 1:
            raise ConfigError("--trials must be >= 1")
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

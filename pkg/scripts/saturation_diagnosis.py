"""Where the Monte Carlo excess MSE comes from.

Runs the acceptance configuration at several mu, and once with the clipper
removed (same draws), reporting the worst relative error against the exact
recursion. Without clipping the model is linear Gaussian and the recursion
is exact, so any excess is saturation.
"""
import argparse
import math

import numpy as np

from afcs import theory
from afcs.montecarlo import draw_trials, oracle_errors, oracle_tolerance, simulate_draws
from afcs.params import config_for_q_sq, derive, load_config


def unclipped_mse(cfg, d, prof, z, noise):
    x = cfg.x0 + math.sqrt(cfg.sigma0_sq) * z
    x_hat = np.full_like(x, cfg.x0)
    out = np.empty((len(x), cfg.n_cycles))
    for k in range(cfg.n_cycles):
        B_hat = x_hat + math.sqrt(cfg.sigma_v_sq) * noise[:, k, 0]
        y = d.A * prof.M_hat[k] * (x - B_hat) + math.sqrt(d.sigma_zeta_sq) * noise[:, k, 1]
        x_hat = x_hat + prof.L[k] * y
        out[:, k] = (x_hat - x) ** 2
    return out.mean(axis=0)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", default="configs/acceptance.cfg")
    parser.add_argument("--trials", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=12345)
    args = parser.parse_args()

    base = load_config(args.config)
    q_sq = derive(base).Q_sq
    z, noise = draw_trials(args.trials, base.n_cycles, args.seed)
    print(f"{'mu':>8} {'tol':>7} {'max err':>8} {'at k':>5} {'clean err':>9} {'no-clip err':>11} {'ever sat':>8}")
    for mu in (1e-3, 3e-3, 1e-2, 3e-2):
        cfg = config_for_q_sq(base.replace(mu=mu), q_sq)
        d = derive(cfg)
        prof = theory.build_profile(d, cfg)
        stats = simulate_draws(cfg, prof, d, z, noise)
        err = oracle_errors(stats, prof)
        P = prof.P[1:]
        clean = np.nanmax(np.abs(stats.P_hat_unsat - P) / P)
        linear = np.max(np.abs(unclipped_mse(cfg, d, prof, z, noise) - P) / P)
        k = int(np.argmax(err))
        print(f"{mu:8.0e} {oracle_tolerance(args.trials, mu):7.4f} {err[k]:8.4f} {k + 1:5d} "
              f"{clean:9.4f} {linear:11.4f} {stats.ever_saturated[-1]:8.4f}")


if __name__ == "__main__":
    main()

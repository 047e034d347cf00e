"""Energy-per-bit and rate-per-hertz curves over the default Q^2 grid.

Writes fig2.csv / fig3.csv through the CLI, then plots them if matplotlib
is installed.

    python scripts/reproduce_figures.py [--out-dir results/figures] [--trials 5000]
"""
import argparse
import sys
from pathlib import Path

import numpy as np

from afcs.cli import main as afcs_main, read_csv_rows


def load(path):
    header, *rows = read_csv_rows(path)
    data = np.array(rows, dtype=float)
    return {name: data[:, i] for i, name in enumerate(header)}


def plot(out_dir, n_set):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available, skipping plots")
        return
    fig2, fig3 = load(out_dir / "fig2.csv"), load(out_dir / "fig3.csv")
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
    for n in n_set:
        line, = ax1.plot(fig2["Q_sq_dB"], 10 * np.log10(fig2[f"Ebit_theory_n{n}"]), label=f"n={n}")
        ax1.plot(fig2["Q_sq_dB"], 10 * np.log10(fig2[f"Ebit_empirical_n{n}"]), "o", ms=3, color=line.get_color())
        line, = ax2.plot(fig3[f"Ebit_theory_dB_n{n}"], fig3[f"R_over_F0_theory_n{n}"], label=f"n={n}")
        ax2.plot(fig3[f"Ebit_empirical_dB_n{n}"], fig3[f"R_over_F0_empirical_n{n}"], "o", ms=3,
                 color=line.get_color())
    ax1.set(xlabel="Q^2 [dB]", ylabel="Ebit/N [dB]")
    ax2.set(xlabel="Ebit/N [dB]", ylabel="R/F0 [bit/s/Hz]")
    for ax in (ax1, ax2):
        ax.grid(alpha=0.3)
        ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / "efficiency.png", dpi=120)
    print(f"wrote {out_dir / 'efficiency.png'}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", default="configs/acceptance.cfg")
    parser.add_argument("--out-dir", default="results/figures")
    parser.add_argument("--trials", type=int, default=5000)
    parser.add_argument("--n-set", default="1,10,20")
    args = parser.parse_args()

    code = afcs_main(["sweep", "--config", args.config, "--out-dir", args.out_dir,
                      "--trials", str(args.trials), "--n-set", args.n_set])
    if code:
        sys.exit(code)
    plot(Path(args.out_dir), [int(n) for n in args.n_set.split(",")])


if __name__ == "__main__":
    main()

"""Disorder-averaged transition peak of the N = 20 random-field chain (hours).

Averages the second derivative of I_0 over 100 seeded disorder
realizations on a 21-point field grid, for weak (sigma/chi = 0.1) and
strong (sigma/chi = 1.0) disorder, and compares against the clean-chain
peak.  Expected outcome: the weak-disorder averaged peak stays prominent
and lands within 0.05 of the clean location, while the strong-disorder
peak fails the prominence threshold.

Every grid point costs three warm-started Lanczos solves of the 2^20
Hamiltonian per realization, which is what makes this a long run.

Usage: python rfti_n20_disorder_average.py [--out DIR] [--seeds N]
"""

import argparse
import pathlib
import time

import numpy as np

from mqcecho import qpt
from mqcecho.analysis import PeakSide, locate_peak, prominence_ratio

parser = argparse.ArgumentParser()
parser.add_argument("--out", default="out/rfti_n20_disorder")
parser.add_argument("--seeds", type=int, default=100)
args = parser.parse_args()

n = 20
grid = np.linspace(0.5, 1.5, 21)
seeds = range(args.seeds)

t0 = time.time()
clean = qpt.transition_peak(qpt.clean_chain_scan(n).i0, 0.5, 1.5,
                            coarse_points=21)
print(f"clean N={n} peak at omega/chi = {clean.position:.4f} "
      f"[{(time.time() - t0) / 60:.1f} min]", flush=True)

curves = {}
for sigma in (0.1, 1.0):
    t0 = time.time()
    averaged = qpt.disorder_averaged_curve(n, sigma, seeds, grid)
    curves[sigma] = averaged
    prom = prominence_ratio(averaged.second_derivative)
    print(f"sigma/chi = {sigma}: prominence {prom:.2f} "
          f"[{(time.time() - t0) / 60:.1f} min]", flush=True)
    if prom < 5.0:
        print("  peak fails the prominence threshold (expected at sigma = 1)")
        continue
    est = locate_peak(averaged, side=PeakSide.POSITIVE)
    cell = float(grid[1] - grid[0])
    refined = qpt.refine_disorder_peak(n, sigma, seeds,
                                       est.position - cell,
                                       est.position + cell)
    shift = abs(refined.position - clean.position)
    print(f"  averaged peak at omega/chi = {refined.position:.4f}, "
          f"|shift from clean| = {shift:.4f} (expected < 0.05)", flush=True)

out = pathlib.Path(args.out)
out.mkdir(parents=True, exist_ok=True)
rows = ["omega/chi (1),sigma (chi),avg_I_0 (1),d2_avg_I_0/domega2 (1/chi^2)"]
for sigma, averaged in curves.items():
    for om, v, d2 in zip(grid, averaged.values, averaged.second_derivative):
        rows.append(f"{float(om)!r},{float(sigma)!r},{float(v)!r},{float(d2)!r}")
(out / "averaged_curves.csv").write_text("\n".join(rows) + "\n")
print(f"wrote {out / 'averaged_curves.csv'}")

"""Critical points of the N = 20 frustrated chain (tens of minutes each).

Scans the second derivative of the ground-state I_0 against the
transverse field for three next-nearest-neighbour couplings and refines
the peak location.  Expected critical points: 0.64 (gamma = -0.2), 0.98
(gamma = 0), 1.48 (gamma = +0.3), each within +-0.03.

Usage: python annni_n20_critical_points.py [--gammas -0.2 0.0 0.3]
"""

import argparse
import time

from mqcecho import qpt

EXPECTED = {-0.2: 0.64, 0.0: 0.98, 0.3: 1.48}

parser = argparse.ArgumentParser()
parser.add_argument("--gammas", type=float, nargs="+",
                    default=[-0.2, 0.0, 0.3])
args = parser.parse_args()

for gamma in args.gammas:
    expected = EXPECTED.get(gamma)
    center = expected if expected is not None else 1.0
    t0 = time.time()
    scan = qpt.annni_scan(20, gamma)
    est = qpt.transition_peak(scan.i0, center - 0.08, center + 0.08,
                              coarse_points=11, fd_step=1e-4)
    line = (f"gamma/chi = {gamma:+.1f}: peak at omega/chi = "
            f"{est.position:.5f}, height {est.height:.2f}")
    if expected is not None:
        line += f" (expected {expected} +- 0.03)"
    print(f"{line}  [{(time.time() - t0) / 60:.1f} min]", flush=True)

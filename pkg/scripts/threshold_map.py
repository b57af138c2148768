"""Quantum-feedforward efficiency thresholds versus thermal-noise asymmetry, as CSV on stdout.

    python scripts/threshold_map.py [--n-thermal 30]
"""

import argparse
import math

import numpy as np

from optoconv.qfeedforward import bidirectional_threshold, threshold_map


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-thermal", type=float, default=math.inf)
    args = ap.parse_args()
    print("asymmetry [1],eta_e_to_o [1],eta_o_to_e [1],eta_bidirectional [1]")
    for a in map(float, np.geomspace(0.1, 10, 21)):
        e2o = threshold_map(a, "e->o", args.n_thermal)
        o2e = threshold_map(a, "o->e", args.n_thermal)
        print(f"{a!r},{e2o!r},{o2e!r},{bidirectional_threshold(a, args.n_thermal)!r}")


if __name__ == "__main__":
    main()

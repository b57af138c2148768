"""Seed-to-seed scatter of the fitted thermal peaks and linewidths of the correlation pipeline.

    python scripts/fig3_seed_scatter.py [--seeds 8] [--duration 60]
"""

import argparse

import numpy as np

from optoconv.config import apply_overrides, load_config
from optoconv.scenarios import SCENARIOS


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=8)
    ap.add_argument("--duration", type=float, default=60.0)
    args = ap.parse_args()
    cfg = apply_overrides(load_config(), [f"scenarios.fig3-correlations.duration={args.duration}"])
    rows = []
    for seed in range(args.seeds):
        s = SCENARIOS["fig3-correlations"](cfg, seed).summary
        f = s["fits"]
        rows.append([f[k][q] for k in ("microwave", "optical", "cross") for q in ("height", "fwhm_hz")]
                    + [s["correlation_residual"]])
        print(f"seed {seed}: " + " ".join(f"{v:8.2f}" for v in rows[-1]))
    a = np.array(rows)
    print("mean   : " + " ".join(f"{v:8.2f}" for v in a.mean(0)))
    print("std    : " + " ".join(f"{v:8.2f}" for v in a.std(0, ddof=1)))
    print("columns: h_e fwhm_e h_o fwhm_o h_eo fwhm_eo residual")


if __name__ == "__main__":
    main()

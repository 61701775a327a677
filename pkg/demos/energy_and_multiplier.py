"""Riesz energy three ways, and the decay of the oscillatory multiplier.

    python demos/energy_and_multiplier.py
"""
import math

import numpy as np

from avoidlab.energy import DISK_ENERGY, Disk, hls_ratio, rasterize_disk, riesz_energy
from avoidlab.spectral import lp_partition_check, multiplier_decay_fit, multiplier_m


def main():
    D = rasterize_disk(Disk(0, 0, 1), 1 / 32)
    print(f"unit disk energy, exact 16 pi/3 = {DISK_ENERGY:.5f}")
    for method in ("grid", "backprojection", "montecarlo"):
        rep = riesz_energy(D, method, n_samples=400_000, rng=np.random.default_rng(0))
        print(f"  {method:15s} {rep.energy:.5f} +/- {rep.error_estimate:.1e}")
    print(f"  normalized energy E/|A|^(3/2) = {hls_ratio(D):.4f}")

    fit = multiplier_decay_fit(True, np.geomspace(32, 1024, 6))
    print("\n|m(xi, xi)| along the diagonal (stationary point t0 = 1):")
    for xi, v in zip(fit.xis, fit.values):
        print(f"  xi={xi:7.1f}  |m|={v:.3e}  |m| sqrt(xi)={v * math.sqrt(xi):.4f}")
    print(f"  fitted slope {fit.slope:.4f} (stationary phase predicts -1/2)")
    print(f"anti-diagonal |m(256, -256)| = {abs(multiplier_m(256.0, -256.0)):.2e} (no stationary point)")
    print(f"Littlewood-Paley partition deviation: {lp_partition_check(np.linspace(-500, 500, 10001)):.1e}")


if __name__ == "__main__":
    main()

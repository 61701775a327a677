"""Search for large corner-free sets and compare with the band construction.

    python demos/search_density.py
"""
from avoidlab import ConfigKind, band_measure, boxunion_avoids, build_AR
from avoidlab.search import SearchConfig, anneal, density_curve, greedy_fill


def main():
    R = 32
    U = greedy_fill(SearchConfig(R, h=0.25, steps=0))
    print(f"greedy cells at R={R}: |A| = {U.measure():.2f}, avoids = {bool(boxunion_avoids(U, ConfigKind.corner()))}")
    res = anneal(SearchConfig(R, h=0.25, steps=3000, seed=1))
    print(f"annealing from empty, 3000 steps: best {res.best_measure:.2f}")
    print(f"band construction A_{R}: {band_measure(build_AR(R)):.2f}; single strip baseline {0.5 * R:.1f}")

    print("\nR     best      A_R       density")
    for row in density_curve([8, 16, 32], ConfigKind.corner(), budget=200):
        print(f"{row.R:<5g} {row.best_measure:<9.3f} {row.band_measure:<9.3f} {row.best_measure / row.R ** 2:.4f}")


if __name__ == "__main__":
    main()

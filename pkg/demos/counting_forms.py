"""The exact counting form vanishes on A_R; its smoothed parts do not.

    python demos/counting_forms.py
"""
import numpy as np

from avoidlab.constructions import build_AR
from avoidlab.corpus import corpus
from avoidlab.raster import rasterize
from avoidlab.forms import eval_N0, eval_N1, eval_Neps, rasterization_error_bound, structured_lower_scan


def main():
    F = rasterize(build_AR(32), 1 / 32)
    bound = rasterization_error_bound(F)
    print("N0 on rasterized A_32 (h = 1/32): exact value is 0")
    for lam in np.geomspace(1 / 8, 8, 5):
        ev = eval_N0(F, F, F, lam)
        print(f"  lam={lam:7.3f}  N0={ev.value: .3e}  quad err {ev.quad_error:.1e}  raster bound {bound:.2f}")

    S = rasterize(corpus()["full_square"], 1 / 16)
    print("\nFull 4x4 square, lam = 1: N^eps approaches N0 as eps -> 0")
    n0 = eval_N0(S, S, S, 1.0).value
    for k in range(0, 5):
        e = 2.0 ** -k
        print(f"  eps=2^-{k}  N^eps={eval_Neps(S, 1.0, e).value:.5f}   N0={n0:.5f}")
    print(f"  N1 = N^1 = {eval_N1(S, 1.0).value:.5f}")

    sc = structured_lower_scan(S, 4.0, 16)
    print(f"\nstructured floor on the square: min over lam of N1 R^4/|A|^3 = {sc.min_ratio:.5f}")


if __name__ == "__main__":
    main()

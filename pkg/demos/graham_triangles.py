"""Dense grid sets contain triangles of a prescribed area.

    python demos/graham_triangles.py
"""
import numpy as np

from avoidlab.graham import GrahamParams, GridSet, find_triangle_of_area, graham_extract


def main():
    tr = graham_extract(GridSet.full(24), GrahamParams(1.0, 2, 3, 1))
    for s in tr.steps:
        print(f"[{'ok' if s.ok else 'FAIL'}] {s.name}: {s.detail}")
    for f in tr.flags:
        print(f"flag: {f}")
    print(f"triangle {tr.triangle} of area r! N!/2 = 6\n")

    rng = np.random.default_rng(3)
    for density in (0.1, 0.3, 0.6):
        B = GridSet(16, rng.random((16, 16)) < density)
        print(f"random 16x16 grid, density {B.density:.2f}: area-6 triangle {find_triangle_of_area(B, 12)}")


if __name__ == "__main__":
    main()

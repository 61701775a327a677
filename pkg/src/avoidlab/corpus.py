"""A small named corpus of box unions used by the scans and tests."""
from __future__ import annotations

import numpy as np

from .geometry import Box, BoxUnion


def _u(tuples, L):
    return BoxUnion.from_tuples(tuples, bounding=Box.from_bounds(0, L, 0, L))


def random_box_union(rng: np.random.Generator, L: float = 6.0, n_boxes: int = 6,
                     min_density: float = 0.0, grid: float = 0.5, max_tries: int = 1000) -> BoxUnion:
    """Union of axis boxes with corners on a ``grid``-lattice in [0, L]^2.

    Redraws until the density |A|/L^2 is at least ``min_density``.
    """
    k = int(round(L / grid))
    for _ in range(max_tries):
        boxes = []
        for _ in range(n_boxes):
            a, b = np.sort(rng.choice(k + 1, 2, replace=False))
            c, d = np.sort(rng.choice(k + 1, 2, replace=False))
            boxes.append((a * grid, b * grid, c * grid, d * grid))
        U = _u(boxes, L)
        if U.measure() >= min_density * L * L:
            return U
    raise RuntimeError("could not reach the requested density")


def corpus() -> dict:
    """Ten named sets, each inside [0, L]^2 with L <= 8."""
    rng = np.random.default_rng(20240611)
    sets = {
        "full_square": _u([(0, 4, 0, 4)], 4),
        "two_boxes": _u([(0, 3, 0, 2), (1, 4, 2.5, 4)], 4),
        "l_shape": _u([(0, 4, 0, 1), (0, 1, 1, 4)], 4),
        "checker": _u([(i, i + 1, j, j + 1) for i in range(4) for j in range(4) if (i + j) % 2 == 0], 4),
        "thin_strip": _u([(0, 8, 0, 0.5)], 8),
        "cross": _u([(0, 6, 2.5, 3.5), (2.5, 3.5, 0, 6)], 6),
        "staircase": _u([(i, i + 2, i, i + 1) for i in range(5)], 6),
    }
    for k in range(3):
        sets[f"random_{k}"] = random_box_union(rng, L=6.0, n_boxes=5, min_density=0.2)
    return sets


def side(U: BoxUnion) -> float:
    x0, x1, y0, y1 = U.bounds
    return max(x1 - x0, y1 - y0)

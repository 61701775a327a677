"""avoidlab: a desk-scale laboratory for configuration-avoiding planar sets.

Modules
-------
geometry       interval predicates for corners and fixed-area triangles, box unions
constructions  the antidiagonal band construction and its exact avoidance certificate
raster, forms  rasterized sets and the trilinear counting forms with their scans
spectral       Fourier tools, the oscillatory multiplier, Littlewood-Paley pieces
energy         Riesz energy by cell pairs, Monte Carlo and X-ray backprojection
graham         discrete fixed-area triangle machinery on integer grids
search         greedy and annealing searches for dense avoiding sets
cli            command-line entry point (``avoidlab``)
"""
__version__ = "0.1.0"

from .constructions import BandSet, band_measure, build_AR, certify_AR_avoidance
from .geometry import Box, BoxUnion, ConfigKind, boxes_corner_feasible, boxunion_avoids

__all__ = ["__version__", "BandSet", "Box", "BoxUnion", "ConfigKind", "band_measure", "build_AR",
           "boxes_corner_feasible", "boxunion_avoids", "certify_AR_avoidance"]

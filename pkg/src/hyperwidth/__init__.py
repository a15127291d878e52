"""Widths of closed hyperbolic surfaces by geodesic sweepouts and Allen-Cahn min-max.

Submodules
----------
hyptrig
    Closed-form hyperbolic trigonometry of pants, collars and the Bolza surface.
fuchsian
    Surfaces as glued polygons, deck groups and length spectra.
widths
    Exact widths and brackets with their geodesic decompositions.
sweepout
    Discrete curve shortening and surgery sweepouts of pairs of pants.
allencahn
    Phase-field energies, mountain passes and interfaces on meshed surfaces.
stability
    Morse index and nullity of geodesics and of Allen-Cahn critical points.
cli
    Batch command-line front end.
"""

__version__ = "0.1.0"

"""Allen-Cahn phase transitions on closed hyperbolic surfaces.

Meshes glued from hexagon charts, the discrete energy with its gradient
flow and Newton solver, a string method for the mountain pass between the
two wells, and tools that read geodesics off the resulting interfaces.
"""

from .energy import STABILIZATION, AllenCahn, ConvergenceError, PhaseField, energy, solve_critical
from .interface import (
    BandComponent,
    InterfaceCurve,
    band_components,
    hausdorff_to_reference,
    interface_mass,
    zero_level_set,
)
from .mesh import MeshError, TriangulatedSurface, build_mesh
from .minmax import MountainPassRecord, TrivialPassError, arrival_function, default_stages, initial_path, mountain_pass
from .potential import QUARTIC, DoubleWell, HeteroclinicProfile, ProfileError, heteroclinic

__all__ = [
    "AllenCahn", "BandComponent", "ConvergenceError", "DoubleWell", "HeteroclinicProfile", "InterfaceCurve",
    "MeshError", "MountainPassRecord", "PhaseField", "ProfileError", "QUARTIC", "STABILIZATION",
    "TrivialPassError", "TriangulatedSurface", "arrival_function", "band_components", "build_mesh",
    "default_stages", "energy", "hausdorff_to_reference", "heteroclinic", "initial_path", "interface_mass",
    "mountain_pass", "solve_critical", "zero_level_set",
]

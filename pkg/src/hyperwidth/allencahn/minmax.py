"""Discrete mountain pass between the two wells ``u = -1`` and ``u = +1``.

A string of phase fields joining the wells is relaxed by the gradient flow
and kept equally spaced in the lumped L2 metric.  Once the path has settled,
its highest image climbs along the path tangent (the tangential component
of its gradient is reversed) and is finally polished by Newton's method on
the full residual.

The initial path fills the surface one pair of pants at a time: inside a
pants the region ``{u > 0}`` is a sublevel set of the mesh distance to its
seed cuffs, so its boundary sweeps the pants from the seed cuffs to the
remaining ones, as in the geometric sweepouts.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import dijkstra

from ..fuchsian import SurfaceSpec
from .energy import AllenCahn, ConvergenceError, PhaseField, solve_critical
from .mesh import TriangulatedSurface
from .potential import QUARTIC, DoubleWell, heteroclinic

log = logging.getLogger(__name__)


class TrivialPassError(RuntimeError):
    """The highest image of the path is one of its endpoints."""


@dataclass
class MountainPassRecord:
    """History of a mountain-pass run."""

    max_energy_history: list = field(default_factory=list)  # path maximum per outer iteration
    climb_history: list = field(default_factory=list)  # climbing-image residual per sweep
    energies: np.ndarray | None = None  # final path energies
    pass_index: int = -1
    iterations: int = 0
    climb_iterations: int = 0
    newton_residual: float = math.nan
    pass_energy: float = math.nan
    stages: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "iterations": self.iterations,
            "climb_iterations": self.climb_iterations,
            "pass_index": self.pass_index,
            "pass_energy": self.pass_energy,
            "newton_residual": self.newton_residual,
            "max_energy_history": list(map(float, self.max_energy_history)),
            "path_energies": [] if self.energies is None else list(map(float, self.energies)),
            "stages": [[p, list(s)] for p, s in self.stages],
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# Initial path
# ---------------------------------------------------------------------------

def default_stages(spec: SurfaceSpec) -> list:
    """Order in which the pants are filled, with the seed cuff slots of each.

    The first pants grows from its self-glued cuffs when it has them, and
    from slot 2 otherwise.  Each later pants grows from the cuffs it shares
    with pants already filled, except cuffs glued to a seed cuff: the
    interface on such a cuff persists and cancels at the very end.
    """
    partner = {}
    for a, b in spec.gluings:
        partner[a] = b
        partner[b] = a
    self_glued = tuple(sorted(i for i in range(3) if partner[(0, i)][0] == 0))
    stages = [(0, self_glued or (2,))]
    seeds = {(0, i) for i in stages[0][1]}
    filled = {0}
    while len(filled) < spec.n_pants:
        best = None
        for q in range(spec.n_pants):
            if q in filled:
                continue
            slots = tuple(i for i in range(3)
                          if partner[(q, i)][0] in filled and partner[(q, i)] not in seeds)
            if slots and (best is None or q < best[0]):
                best = (q, slots)
        if best is None:
            raise ValueError("pants graph is not fillable from pants 0")
        stages.append(best)
        seeds |= {(best[0], i) for i in best[1]}
        filled.add(best[0])
    return stages


def arrival_function(mesh: TriangulatedSurface, stages: list) -> np.ndarray:
    """Staged mesh distance: within each pants, distance to its seed cuffs plus the time to fill earlier pants."""
    graph = mesh.edge_graph()
    T = np.full(mesh.n_vertices, np.inf)
    offset = 0.0
    for p, slots in stages:
        verts = np.setdiff1d(mesh.pants_vertex_ids(p), np.flatnonzero(np.isfinite(T)))
        seeds = np.unique(np.concatenate([mesh.cuff_vertex_ids(p, i) for i in slots]))
        allowed = np.union1d(verts, seeds)
        sub = graph[allowed][:, allowed]
        local_seed = np.searchsorted(allowed, seeds)
        d = dijkstra(sub, directed=False, indices=local_seed, min_only=True)
        d_full = np.full(mesh.n_vertices, np.inf)
        d_full[allowed] = d
        T[verts] = offset + d_full[verts]
        offset = float(T[verts].max())
    if not np.all(np.isfinite(T)):
        raise ValueError("some vertices are not reached by the staged fill")
    return T


def initial_path(mesh: TriangulatedSurface, epsilon: float, n_images: int = 33, stages: list | None = None,
                 profile=None) -> np.ndarray:
    """Images ``u_k = H((s_k - T) / eps)`` of the staged fill, with exact wells at both ends."""
    if stages is None:
        stages = default_stages(mesh.spec)
    profile = profile or heteroclinic()
    T = arrival_function(mesh, stages)
    s = np.linspace(0.0, T.max(), n_images)
    U = np.empty((n_images, mesh.n_vertices))
    for k, sk in enumerate(s):
        U[k] = profile((sk - T) / epsilon)
    U[0] = -1.0
    U[-1] = 1.0
    return U


# ---------------------------------------------------------------------------
# String relaxation
# ---------------------------------------------------------------------------

def _reparametrize(ac: AllenCahn, U: np.ndarray, lo: int, hi: int) -> None:
    """Redistribute images ``lo..hi`` (ends fixed) equally in arclength, in place."""
    if hi - lo < 2:
        return
    seg = np.array([ac.norm(U[k + 1] - U[k]) for k in range(lo, hi)])
    s = np.concatenate([[0.0], np.cumsum(seg)])
    target = np.linspace(0.0, s[-1], hi - lo + 1)
    old = U[lo:hi + 1].copy()
    for k in range(1, hi - lo):
        j = min(int(np.searchsorted(s, target[k], side="right")) - 1, hi - lo - 1)
        f = (target[k] - s[j]) / max(seg[j], 1e-300)
        U[lo + k] = (1 - f) * old[j] + f * old[j + 1]


def _climb_step(ac: AllenCahn, U: np.ndarray, k: int, tau: float) -> float:
    """Move image ``k`` uphill along the path tangent and downhill across it; returns its residual."""
    t = U[k + 1] - U[k - 1]
    t /= ac.norm(t)
    g = ac.gradient(U[k])
    g_climb = g - 2 * (t @ g) * (ac.m * t)
    U[k] = U[k] - ac.precondition(g_climb, tau)
    return ac.residual_norm(U[k])


def mountain_pass(mesh: TriangulatedSurface, W: DoubleWell = QUARTIC, epsilon: float = 0.1,
                  path_resolution: int = 33, tol: float = 1e-8, tau: float = 1.0,
                  max_iter: int = 3000, max_climb: int = 3000, climb_tol: float = 1e-3,
                  max_extra_sweeps: int = 50,
                  stages: list | None = None, path: np.ndarray | None = None,
                  problem: AllenCahn | None = None) -> tuple:
    """Mountain-pass critical point of ``E_eps`` between the wells.

    Returns ``(PhaseField, MountainPassRecord)``.  The string is relaxed until
    its maximum energy changes by less than ``1e-7`` (relative) per outer
    iteration.  An outer iteration relaxes every image, re-spaces the path
    and, if the re-spacing raised the path maximum, keeps relaxing until it
    is back down, so the recorded maxima never increase.  Then the highest image climbs until its residual is below
    ``climb_tol`` and Newton's method reduces it below ``tol``.
    """
    ac = problem or AllenCahn(mesh, epsilon, W)
    if stages is None and path is None:
        stages = default_stages(mesh.spec)
    U = initial_path(mesh, epsilon, path_resolution, stages) if path is None else np.array(path, dtype=float)
    rec = MountainPassRecord(stages=list(stages or []))
    n = len(U)
    _reparametrize(ac, U, 0, n - 1)
    E = np.array([ac.energy(u) for u in U])
    rec.max_energy_history.append(float(E.max()))
    for it in range(max_iter):
        # one outer iteration: relax, re-space, then relax until the path maximum is no higher than before
        for sweep in range(max_extra_sweeps + 1):
            for k in range(1, n - 1):
                U[k] = ac.flow_step(U[k], tau)
            if sweep == 0:
                _reparametrize(ac, U, 0, n - 1)
            E = np.array([ac.energy(u) for u in U])
            if E.max() <= rec.max_energy_history[-1]:
                break
        else:
            rec.notes.append(f"iteration {it}: path maximum rose by {E.max() - rec.max_energy_history[-1]:.3e}")
        prev = rec.max_energy_history[-1]
        rec.max_energy_history.append(float(E.max()))
        rec.iterations = it + 1
        if prev - E.max() < 1e-7 * E.max():
            break
    k = int(np.argmax(E))
    if k in (0, n - 1):
        raise TrivialPassError("the path maximum sits at a well; no mountain pass")

    # climbing image; the two sub-strings keep relaxing around it
    res = math.inf
    for it in range(max_climb):
        res = _climb_step(ac, U, k, tau)
        rec.climb_history.append(res)
        for j in list(range(1, k)) + list(range(k + 1, n - 1)):
            U[j] = ac.flow_step(U[j], tau)
        _reparametrize(ac, U, 0, k)
        _reparametrize(ac, U, k, n - 1)
        rec.climb_iterations = it + 1
        if res < climb_tol:
            break
    else:
        rec.notes.append(f"climbing image stopped at residual {res:.3e}")
    try:
        crit = solve_critical(PhaseField(U[k], epsilon), mesh, W, tol=tol, problem=ac)
    except ConvergenceError as exc:
        exc.args = (f"mountain-pass polish failed: {exc}",)
        raise
    U[k] = crit.u
    rec.energies = np.array([ac.energy(u) for u in U])
    rec.pass_index = k
    rec.newton_residual = ac.residual_norm(crit.u)
    rec.pass_energy = ac.energy(crit.u)
    return crit, rec

"""Allen-Cahn energy on a triangulated surface and solvers for its critical points.

With stiffness ``K`` and lumped mass ``m`` the discrete energy is

    E(u) = eps/2 u^T K u + (1/eps) sum_i m_i W(u_i),

its gradient is ``eps K u + m W'(u) / eps`` and the mass-weighted residual
of ``eps^2 Delta u = W'(u)`` is ``-eps M^{-1} grad E``.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..hyptrig import HyperbolicDomainError
from .mesh import TriangulatedSurface
from .potential import QUARTIC, DoubleWell

log = logging.getLogger(__name__)

#: Stabilization constant of the semi-implicit gradient flow; at least half the Lipschitz constant of W' on [-1, 1].
STABILIZATION = 2.0


class ConvergenceError(RuntimeError):
    """An iterative solver stopped without meeting its tolerance."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


@dataclass
class PhaseField:
    u: np.ndarray
    epsilon: float

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        if not self.epsilon > 0:
            raise HyperbolicDomainError(f"epsilon must be positive, got {self.epsilon}")

    def __neg__(self) -> "PhaseField":
        return PhaseField(-self.u, self.epsilon)

    def save(self, path) -> None:
        np.savetxt(path, self.u, header=f"epsilon {self.epsilon!r}", fmt="%.17g")

    @classmethod
    def load(cls, path) -> "PhaseField":
        with open(path) as fh:
            eps = float(fh.readline().split()[-1])
        return cls(np.loadtxt(path, ndmin=1), eps)


class AllenCahn:
    """Energy, gradient, Hessian and residual of ``E_eps`` on a fixed mesh."""

    def __init__(self, mesh: TriangulatedSurface, epsilon: float, W: DoubleWell = QUARTIC,
                 check_regime: bool = True):
        if not epsilon > 0:
            raise HyperbolicDomainError(f"epsilon must be positive, got {epsilon}")
        self.mesh = mesh
        self.epsilon = float(epsilon)
        self.W = W
        self.K = mesh.K
        self.m = mesh.mass
        self._flow_cache = {}
        if check_regime:
            ratio = self.epsilon / mesh.mesh_width
            if not 2 <= ratio <= 5:
                warnings.warn(f"epsilon is {ratio:.2f} mesh widths; the interface is "
                              + ("under-resolved" if ratio < 2 else "wider than intended"),
                              stacklevel=2)

    @property
    def n(self) -> int:
        return self.mesh.n_vertices

    def field(self, u) -> PhaseField:
        return PhaseField(u, self.epsilon)

    # -- the functional ----------------------------------------------------------------

    def energy(self, u) -> float:
        u = np.asarray(u, dtype=float)
        eps = self.epsilon
        return float(0.5 * eps * (u @ (self.K @ u)) + (self.m @ self.W.W(u)) / eps)

    def energy_terms(self, u) -> tuple:
        """``(gradient term, potential term)``."""
        u = np.asarray(u, dtype=float)
        return float(0.5 * self.epsilon * (u @ (self.K @ u))), float((self.m @ self.W.W(u)) / self.epsilon)

    def gradient(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.epsilon * (self.K @ u) + self.m * self.W.dW(u) / self.epsilon

    def hessian(self, u) -> sp.csc_matrix:
        """Second variation ``eps K + diag(m W''(u)) / eps``."""
        u = np.asarray(u, dtype=float)
        return (self.epsilon * self.K + sp.diags(self.m * self.W.d2W(u) / self.epsilon)).tocsc()

    def residual(self, u) -> np.ndarray:
        """Pointwise ``eps^2 Delta_h u - W'(u)``."""
        return -self.epsilon * self.gradient(u) / self.m

    def residual_norm(self, u) -> float:
        """Mass-weighted L2 norm of :meth:`residual`."""
        r = self.residual(u)
        return float(math.sqrt(self.m @ (r * r)))

    def inner(self, a, b) -> float:
        """Lumped L2 inner product."""
        return float(self.m @ (a * b))

    def norm(self, a) -> float:
        return math.sqrt(self.inner(a, a))

    # -- gradient flow ---------------------------------------------------------------------

    def _flow_solver(self, tau: float):
        if tau not in self._flow_cache:
            a = (1 + tau * STABILIZATION / self.epsilon)
            A = (sp.diags(a * self.m) + tau * self.epsilon * self.K).tocsc()
            self._flow_cache[tau] = (a, splu(A))
        return self._flow_cache[tau]

    def flow_step(self, u, tau: float) -> np.ndarray:
        """One stabilized semi-implicit step of the L2 gradient flow.

        Solves ``((1 + tau S/eps) M + tau eps K) u' = M ((1 + tau S/eps) u - tau W'(u)/eps)``;
        energy decreases for any ``tau`` because ``S`` dominates the concave part of ``W``.
        """
        a, lu = self._flow_solver(tau)
        return lu.solve(self.m * (a * u - tau * self.W.dW(u) / self.epsilon))

    def precondition(self, g, tau: float) -> np.ndarray:
        """``tau A^{-1} g`` with the flow matrix ``A``; the flow step is ``u - precondition(grad)``."""
        _, lu = self._flow_solver(tau)
        return tau * lu.solve(g)

    def descend(self, u, tau: float = 1.0, max_steps: int = 10000, tol: float = 1e-8) -> np.ndarray:
        """Gradient flow to a local minimum; stops once ``||du|| / tau < tol``."""
        u = np.array(u, dtype=float)
        for _ in range(max_steps):
            v = self.flow_step(u, tau)
            step = self.norm(v - u) / tau
            u = v
            if step < tol:
                break
        return u


def energy(u: PhaseField, mesh: TriangulatedSurface, W: DoubleWell = QUARTIC) -> float:
    """Allen-Cahn energy of ``u`` (first-order finite elements, lumped potential term)."""
    return AllenCahn(mesh, u.epsilon, W, check_regime=False).energy(u.u)


def solve_critical(u0: PhaseField, mesh: TriangulatedSurface, W: DoubleWell = QUARTIC,
                   tol: float = 1e-9, max_iter: int = 60, problem: AllenCahn | None = None) -> PhaseField:
    """Newton's method on ``grad E = 0`` with a backtracking line search on the residual.

    Converges to the critical point nearest in the Newton sense, which may be
    a saddle.  The returned field satisfies ``residual_norm < tol``.
    """
    ac = problem or AllenCahn(mesh, u0.epsilon, W, check_regime=False)
    u = np.array(u0.u, dtype=float)
    res = ac.residual_norm(u)
    for it in range(max_iter):
        if res < tol:
            break
        g = ac.gradient(u)
        try:
            du = splu(ac.hessian(u)).solve(-g)
        except RuntimeError as exc:  # exactly singular Hessian
            raise ConvergenceError(f"singular Hessian at iteration {it}", res) from exc
        step = 1.0
        while step > 1e-4:
            trial = u + step * du
            r_trial = ac.residual_norm(trial)
            if r_trial < (1 - 1e-4 * step) * res:
                break
            step /= 2
        else:
            raise ConvergenceError(f"line search failed at iteration {it} (residual {res:.3e})", res)
        u, res = trial, r_trial
        log.debug("newton %d: residual %.3e step %.3g", it, res, step)
    if res >= tol:
        raise ConvergenceError(f"Newton stopped after {max_iter} iterations with residual {res:.3e}", res)
    if np.abs(u).max() > 1 + 1e-9:
        raise ConvergenceError(f"critical point leaves [-1, 1] (max |u| = {np.abs(u).max():.6g})", res)
    return PhaseField(u, u0.epsilon)

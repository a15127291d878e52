"""Morse index and nullity of closed geodesics and of Allen-Cahn critical points.

Geodesics: the Jacobi operator ``-phi'' - K phi`` on a closed geodesic of
length ``L`` is discretized by periodic second differences; eigenvalues
from two grids are Richardson-extrapolated, and the extrapolation
correction sets the zero band used to count the nullity.

Allen-Cahn: the second variation ``eps <grad v, grad w> + W''(u) v w / eps``
is assembled on the mesh and its lowest generalized eigenvalues (against
the lumped mass) are computed by shift-invert Lanczos.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.sparse.linalg import eigsh

from .allencahn.energy import AllenCahn, PhaseField
from .allencahn.mesh import TriangulatedSurface
from .allencahn.potential import QUARTIC, DoubleWell


class DiscretizationError(RuntimeError):
    """Eigenvalues did not converge under grid refinement."""


class EigensolverError(RuntimeError):
    """The sparse eigensolver did not converge."""


@dataclass
class SpectrumReport:
    """Lowest eigenvalues with index and nullity counted against a zero band."""

    eigenvalues: np.ndarray
    index: int
    nullity: int
    band: float
    source: str = ""
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.eigenvalues = np.sort(np.asarray(self.eigenvalues, dtype=float))

    @classmethod
    def from_eigenvalues(cls, eigenvalues, band, source: str = "", **provenance) -> "SpectrumReport":
        """Count against ``band``, a scalar or one half-width per eigenvalue in the given order.

        The reported band is the widest one among eigenvalues of modulus below 1.
        """
        ev = np.asarray(eigenvalues, dtype=float)
        order = np.argsort(ev)
        ev = ev[order]
        b = np.broadcast_to(np.asarray(band, dtype=float), ev.shape)
        b = b[order] if np.ndim(band) else b
        near = np.abs(ev) < 1
        width = float(b[near].max()) if near.any() else float(b.min())
        return cls(ev, int(np.sum(ev < -b)), int(np.sum(np.abs(ev) <= b)), width, source, dict(provenance))

    def to_record(self) -> dict:
        return {
            "source": self.source,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "index": self.index,
            "nullity": self.nullity,
            "zero_band": self.band,
            **self.provenance,
        }


# ---------------------------------------------------------------------------
# Closed geodesics
# ---------------------------------------------------------------------------

def jacobi_eigenvalues(L: float, curvature, n: int) -> np.ndarray:
    """All eigenvalues of the periodic second-difference Jacobi operator on ``n`` points."""
    h = L / n
    s = np.arange(n) * h
    k = np.full(n, float(curvature)) if np.isscalar(curvature) else np.asarray(curvature(s), dtype=float)
    A = np.diag(np.full(n, 2.0 / h ** 2) - k)
    off = np.full(n - 1, -1.0 / h ** 2)
    A += np.diag(off, 1) + np.diag(off, -1)
    A[0, -1] = A[-1, 0] = -1.0 / h ** 2
    return eigh(A, eigvals_only=True)


def geodesic_index(L: float, curvature_along: Callable | float, n: int = 256, n_eigs: int = 12,
                   max_rel_error: float = 1e-3) -> SpectrumReport:
    """Index and nullity of a closed geodesic of length ``L`` along which the curvature is ``curvature_along(s)``.

    Eigenvalues on ``n`` and ``2n`` points are combined by Richardson
    extrapolation (the scheme is second order).  Each eigenvalue counts as
    zero when its modulus is at most ten times its own extrapolation
    correction.  Raises :class:`DiscretizationError` when a correction
    exceeds ``max_rel_error`` times ``max(1, |lambda|)``.
    """
    if not L > 0:
        raise ValueError(f"length must be positive, got {L}")
    n_eigs = min(n_eigs, n)
    coarse = jacobi_eigenvalues(L, curvature_along, n)[:n_eigs]
    fine = jacobi_eigenvalues(L, curvature_along, 2 * n)[:n_eigs]
    extrapolated = fine + (fine - coarse) / 3
    correction = np.abs(extrapolated - fine)
    scale = np.maximum(1.0, np.abs(extrapolated))
    bad = correction > max_rel_error * scale
    if bad.any():
        raise DiscretizationError(
            f"eigenvalue corrections up to {correction[bad].max():.3e} at n = {n}; refine the grid")
    band = 10 * np.maximum(correction, 1e-12 * scale)
    return SpectrumReport.from_eigenvalues(extrapolated, band, "geodesic", length=float(L), grid=[n, 2 * n],
                                           method="periodic second differences + Richardson")


# ---------------------------------------------------------------------------
# Allen-Cahn critical points
# ---------------------------------------------------------------------------

@dataclass
class SecondVariation:
    """Assembled quadratic form ``D^2 E_eps(u)`` with the lumped mass it is measured against."""

    matrix: sp.csr_matrix
    mass: np.ndarray
    epsilon: float
    residual: float
    warning: str | None = None

    def __call__(self, v, w=None) -> float:
        w = v if w is None else w
        return float(np.asarray(v) @ (self.matrix @ np.asarray(w)))


def ac_second_variation(u: PhaseField, mesh: TriangulatedSurface, W: DoubleWell = QUARTIC,
                        critical_tol: float = 1e-6) -> SecondVariation:
    """Second variation of the Allen-Cahn energy at ``u``; warns when ``u`` is not critical."""
    ac = AllenCahn(mesh, u.epsilon, W, check_regime=False)
    res = ac.residual_norm(u.u)
    note = None
    if res > critical_tol:
        note = f"field is not critical (residual {res:.3e})"
        warnings.warn(note, stacklevel=2)
    return SecondVariation(ac.hessian(u.u).tocsr(), ac.m, u.epsilon, res, note)


def ac_index(u: PhaseField, mesh: TriangulatedSurface, W: DoubleWell = QUARTIC, n_eigs: int = 8,
             band: float | None = None) -> SpectrumReport:
    """Lowest eigenvalues of ``D^2 E_eps(u) x = lambda M x`` with index and nullity.

    The shift sits below ``min W''(u) / eps``, a lower bound for the
    spectrum, so shift-invert returns the bottom of the spectrum.  Unless
    given, the zero band is ten times the larger of the Ritz residuals and
    the field residual scaled by ``1/eps``.
    """
    form = ac_second_variation(u, mesh, W)
    M = sp.diags(form.mass).tocsc()
    sigma = float(np.min(W.d2W(u.u))) / u.epsilon - 1.0
    try:
        vals, vecs = eigsh(form.matrix.tocsc(), k=n_eigs, M=M, sigma=sigma, which="LM", tol=1e-12)
    except Exception as exc:  # ArpackNoConvergence and factorization failures
        raise EigensolverError(f"shift-invert eigensolver failed: {exc}") from exc
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    ritz = np.array([np.linalg.norm(form.matrix @ x - lam * (form.mass * x)) / math.sqrt(x @ (form.mass * x))
                     for lam, x in zip(vals, vecs.T)])
    if band is None:
        band = 10 * max(float(ritz.max()), form.residual / u.epsilon, 1e-10)
    report = SpectrumReport.from_eigenvalues(vals, band, "allen-cahn", epsilon=u.epsilon,
                                             n_vertices=mesh.n_vertices, shift=sigma,
                                             max_ritz_residual=float(ritz.max()))
    if form.warning:
        report.provenance["warning"] = form.warning
    return report


# ---------------------------------------------------------------------------
# Index comparison
# ---------------------------------------------------------------------------

@dataclass
class IndexConsistency:
    """Outcome of comparing a geodesic's index with that of an Allen-Cahn solution.

    ``ok`` is None when the interface is not a simple closed geodesic, the
    hypothesis of both inequalities.  The check is made at one finite
    ``eps`` and is indicative only.
    """

    ok: bool | None
    status: str
    lower: bool | None = None
    upper: bool | None = None

    def __bool__(self) -> bool:
        return bool(self.ok)


def index_consistency_check(geodesic: SpectrumReport, ac: SpectrumReport,
                            interface_simple: bool = True) -> IndexConsistency:
    """``ind(geodesic) <= ind(u)`` and ``ind + nul (geodesic) >= ind + nul (u)``."""
    if not interface_simple:
        return IndexConsistency(None, "hypothesis not met: interface is not a simple closed geodesic")
    lower = geodesic.index <= ac.index
    upper = geodesic.index + geodesic.nullity >= ac.index + ac.nullity
    ok = lower and upper
    return IndexConsistency(ok, "consistent" if ok else "inconsistent", lower, upper)

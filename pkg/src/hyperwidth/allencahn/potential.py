"""Double-well potentials and the one-dimensional heteroclinic profile."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad, solve_ivp


class ProfileError(RuntimeError):
    """The heteroclinic integration failed to reach the wells."""


@dataclass(frozen=True)
class DoubleWell:
    """Even potential with nondegenerate wells at ``-1`` and ``+1``."""

    W: Callable
    dW: Callable
    d2W: Callable
    name: str = "custom"

    @classmethod
    def quartic(cls) -> "DoubleWell":
        """``W(u) = (1 - u^2)^2 / 4``."""
        return cls(
            W=lambda u: 0.25 * (1 - np.square(u)) ** 2,
            dW=lambda u: np.power(u, 3) - u,
            d2W=lambda u: 3 * np.square(u) - 1,
            name="quartic",
        )

    def validate(self, n: int = 2001) -> None:
        """Check the double-well conditions on a sample grid; raises ``ValueError``."""
        t = np.linspace(-1.5, 1.5, n)
        w = self.W(t)
        if np.any(w < 0):
            raise ValueError("W must be nonnegative")
        if not np.allclose(w, self.W(-t), rtol=0, atol=1e-14 * max(1.0, np.abs(w).max())):
            raise ValueError("W must be even")
        inner = t[(np.abs(t) > 1e-9) & (np.abs(t) < 1 - 1e-9)]
        if np.any(inner * self.dW(inner) >= 0):
            raise ValueError("t W'(t) must be negative for 0 < |t| < 1")
        if not (self.d2W(1.0) > 0 and self.d2W(-1.0) > 0):
            raise ValueError("wells must be nondegenerate")
        if abs(self.W(1.0)) > 1e-14 or abs(self.W(-1.0)) > 1e-14:
            raise ValueError("W must vanish at the wells")

    def heteroclinic_energy(self) -> float:
        """``h0 = int (H'^2/2 + W(H)) dt = int_{-1}^{1} sqrt(2 W(s)) ds``."""
        val, _ = quad(lambda s: math.sqrt(2 * max(float(self.W(s)), 0.0)), -1, 1,
                      epsabs=1e-14, epsrel=1e-13)
        return val


QUARTIC = DoubleWell.quartic()


@dataclass
class HeteroclinicProfile:
    """Sampled heteroclinic ``H`` with ``H(0) = 0`` and its energy ``h0``."""

    t: np.ndarray
    H: np.ndarray
    h0: float
    dense: Callable | None = None

    def __call__(self, s):
        """Evaluate ``H``; beyond the grid the profile is continued by the wells."""
        s = np.asarray(s, dtype=float)
        if self.dense is not None:
            inside = np.clip(s, self.t[0], self.t[-1])
            out = self.dense(inside)
        else:
            out = np.interp(s, self.t, self.H)
        out = np.where(s > self.t[-1], 1.0, out)
        return np.where(s < self.t[0], -1.0, out)

    def grid_energy(self, W: DoubleWell) -> float:
        """``int (H'^2/2 + W(H))`` on the grid, with ``H'`` taken from the first integral."""
        from scipy.integrate import simpson
        return float(simpson(2 * W.W(self.H), x=self.t))


def heteroclinic(W: DoubleWell = QUARTIC, grid=None, T: float = 14.0, n: int = 2801,
                 tol: float = 1e-8) -> HeteroclinicProfile:
    """Heteroclinic profile solving ``H'' = W'(H)``, ``H(0) = 0``, ``H(+-inf) = +-1``.

    The profile is the orbit of the first integral ``H' = sqrt(2 W(H))``
    (equipartition of the two energy terms), integrated outward from 0 in
    both directions.  ``grid`` defaults to ``n`` points on ``[-T, T]``.
    """
    W.validate()
    t = np.linspace(-T, T, n) if grid is None else np.asarray(grid, dtype=float)
    if t[0] >= 0 or t[-1] <= 0:
        raise ValueError("grid must straddle 0")

    def rhs(_, y):
        return [math.sqrt(2 * max(float(W.W(y[0])), 0.0))]

    opts = dict(method="DOP853", rtol=1e-13, atol=1e-15, dense_output=True)
    pos = solve_ivp(rhs, (0.0, t[-1]), [0.0], t_eval=t[t >= 0], **opts)
    neg = solve_ivp(rhs, (0.0, t[0]), [0.0], t_eval=t[t < 0][::-1], **opts)
    if not (pos.success and neg.success):
        raise ProfileError(f"integration failed: {pos.message}; {neg.message}")
    H = np.concatenate([neg.y[0][::-1], pos.y[0]])
    if abs(H[-1] - 1) > tol or abs(H[0] + 1) > tol:
        raise ProfileError(f"profile ends at {H[0]:.3e}, {H[-1]:.3e}; extend the grid")
    if np.any(np.diff(H) <= 0):
        raise ProfileError("profile is not strictly increasing on the grid")

    def dense(s):
        s = np.asarray(s, dtype=float)
        out = np.empty_like(s)
        m = s >= 0
        if m.any():
            out[m] = pos.sol(s[m])[0]
        if (~m).any():
            out[~m] = neg.sol(s[~m])[0]
        return out

    return HeteroclinicProfile(t, H, W.heteroclinic_energy(), dense)

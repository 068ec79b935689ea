"""Dirichlet-type kernels with a phase shift and de la Vallee-Poussin kernels."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import DomainError
from .fourier import DEFAULT_QUAD, QuadratureSpec, TrigPoly, lp_norm

THREE_PI = 3.0 * math.pi


@dataclass(frozen=True)
class KernelHandle:
    """A kernel's kind, its parameters and its coefficient form."""

    kind: str
    params: tuple
    poly: TrigPoly

    def __call__(self, t):
        return self.poly(t).real

    def closed_form(self, t):
        """Closed-form value of the phase-shifted Dirichlet kernel.

        ``(sin((k + 1/2) t + b) - cos(t/2) sin(b)) / (2 sin(t/2))`` with
        ``b = beta pi / 2``; at ``t = 0 (mod 2 pi)`` the coefficient sum is used.
        """
        if self.kind != "dirichlet_beta":
            raise DomainError("closed form is only available for dirichlet_beta kernels")
        k, beta = self.params
        b = beta * math.pi / 2
        t = np.asarray(t, dtype=float)
        half = np.sin(t / 2)
        singular = np.abs(half) < 1e-300
        safe = np.where(singular, 1.0, half)
        out = (np.sin((k + 0.5) * t + b) - np.cos(t / 2) * math.sin(b)) / (2 * safe)
        if np.any(singular):
            out = np.where(singular, self(np.where(singular, t, 0.0)), out)
        return out if out.ndim else float(out)


@lru_cache(maxsize=None)
def dirichlet_beta(k: int, beta: float) -> KernelHandle:
    """``1/2 cos(beta pi/2) + sum_{j=1}^k cos(j t + beta pi/2)``."""
    if k < 1:
        raise DomainError("dirichlet_beta needs k >= 1")
    b = beta * math.pi / 2
    coeffs = {0: 0.5 * math.cos(b)}
    up, down = 0.5 * complex(math.cos(b), math.sin(b)), 0.5 * complex(math.cos(b), -math.sin(b))
    for j in range(1, k + 1):
        coeffs[j] = up
        coeffs[-j] = down
    return KernelHandle("dirichlet_beta", (int(k), float(beta)), TrigPoly(coeffs))


@lru_cache(maxsize=None)
def vallee_poussin(m: int) -> KernelHandle:
    """``1/2 + sum_{k<=m} cos kt + 2 sum_{k=m+1}^{2m-1} (1 - k/(2m)) cos kt``."""
    if m < 1:
        raise DomainError("vallee_poussin needs m >= 1")
    coeffs = {0: 0.5}
    for k in range(1, m + 1):
        coeffs[k] = coeffs[-k] = 0.5
    for k in range(m + 1, 2 * m):
        coeffs[k] = coeffs[-k] = 1.0 - k / (2 * m)
    return KernelHandle("vallee_poussin", (int(m),), TrigPoly(coeffs))


@dataclass(frozen=True)
class NormCheck:
    norm: float
    holds: bool


def kernel_l1_check(m: int, quad: QuadratureSpec = DEFAULT_QUAD) -> NormCheck:
    """``||V_m||_1`` against the bound ``3 pi``."""
    norm = lp_norm(vallee_poussin(m).poly, 1, quad)
    return NormCheck(norm=norm, holds=norm <= THREE_PI + 1e-6)


def dirichlet_bound_check(k: int, beta: float, t_grid) -> bool:
    """True iff ``|D_{k,beta}(t)| <= pi / |t|`` (+1e-9) at every grid point of ``(0, pi]``."""
    t = np.asarray(t_grid, dtype=float)
    if np.any(t <= 0) or np.any(t > math.pi):
        raise DomainError("grid points must lie in (0, pi]")
    values = np.abs(dirichlet_beta(k, beta)(t))
    return bool(np.all(values <= math.pi / t + 1e-9))

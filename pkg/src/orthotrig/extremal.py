"""Extremal members of the smoothness classes and their normalising constants."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, PreconditionError
from .fourier import ClassSpec, TrigPoly, conjugate_exponent
from .kernels import vallee_poussin
from .psi import PsiSpec, mu

# search horizon for the smallest n meeting the side conditions
_N_SEARCH_LIMIT = 1 << 20


@dataclass(frozen=True)
class BoundConstants:
    """Floors ``a <= eta(n) - n`` and ``b <= mu(n)`` and the constants built on them.

    ``lambda_p = 1 / (2 p'^(1/p) max(5b/(b-2), 4 pi))`` normalises the extremal
    function; ``K_ab``, ``K_abp`` and ``K_bp`` are the upper/lower constants.
    """

    p: float
    p_prime: float
    a: float
    b: float
    lambda_p: float
    K_ab: float
    K_abp: float
    K_bp: float

    @classmethod
    def from_floors(cls, a: float, b: float, p: float) -> "BoundConstants":
        if not 1 < p < math.inf:
            raise DomainError("constants need 1 < p < inf")
        if not (a > 2 and b > 2):
            raise PreconditionError(f"floors must exceed 2 (a={a:.6g}, b={b:.6g})")
        pp = conjugate_exponent(p)
        big = max(5 * b / (b - 2), 4 * math.pi)
        K_ab = max(2 * b / (b - 2) + 1 / a, 2 * math.pi) / math.pi
        return cls(
            p=p, p_prime=pp, a=a, b=b,
            lambda_p=1.0 / (2 * pp ** (1 / p) * big),
            K_ab=K_ab,
            K_abp=K_ab * (2 * p) ** (1 / pp),
            K_bp=1.0 / (48 * big * pp ** (1 / p)),
        )


def _first_admissible(psi: PsiSpec, start: int):
    def ok(n):
        c = mu(psi, n)
        return c.eta_gap > 2 and c.mu > 2

    hi = max(start, 1)
    while not ok(hi):
        hi *= 2
        if hi > _N_SEARCH_LIMIT:
            return None
    lo = max(start, hi // 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return hi


def build_constants(cls: ClassSpec, n_min: int) -> BoundConstants:
    """Constants with ``a = eta(n_min) - n_min`` and ``b = mu(n_min)``.

    For weights with increasing ``mu`` and ``eta(t) - t`` these floors hold for
    every ``n >= n_min``; callers sweeping ``n`` re-check them per row.
    """
    c = mu(cls.psi, n_min)
    if not (c.eta_gap > 2 and c.mu > 2):
        bad = [name for name, v in (("a", c.eta_gap), ("b", c.mu)) if not v > 2]
        first = _first_admissible(cls.psi, n_min)
        where = (f"smallest admissible n is {first}" if first is not None
                 else f"no admissible n up to {_N_SEARCH_LIMIT}")
        raise PreconditionError(
            f"{' and '.join(bad)} <= 2 at n={n_min} for {cls.psi.label()} "
            f"(eta-n={c.eta_gap:.6g}, mu={c.mu:.6g}); {where}")
    return BoundConstants.from_floors(c.eta_gap, c.mu, cls.p)


def phi_profile(psi: PsiSpec, n: int) -> np.ndarray:
    """``psi(k) psi(2n - k)`` for ``k = 1..n``."""
    k = np.arange(1, n + 1, dtype=float)
    return psi(k) * psi(2 * n - k)


def fstar_scale(psi: PsiSpec, n: int, consts: BoundConstants) -> float:
    """``lambda_p / (psi(n) (eta(n) - n)^(1/p'))``."""
    gap = mu(psi, n).eta_gap
    return consts.lambda_p / (float(psi(n)) * gap ** (1 / consts.p_prime))


def build_fstar_pn(cls: ClassSpec, n: int, consts: BoundConstants) -> TrigPoly:
    """Cosine polynomial of degree ``2n`` with amplitudes ``psi(k) psi(2n-k)`` then ``psi(k)^2``."""
    if n < 2:
        raise DomainError("build_fstar_pn needs n >= 2")
    if consts.p != cls.p:
        raise DomainError(f"constants were built for p={consts.p}, class has p={cls.p}")
    psi = cls.psi
    scale = fstar_scale(psi, n, consts)
    amps = {0: scale * 0.5 * float(psi(1)) * float(psi(2 * n))}
    for k in range(1, n):
        amps[k] = scale * float(psi(k)) * float(psi(2 * n - k))
    for k in range(n, 2 * n + 1):
        amps[k] = scale * float(psi(k)) ** 2
    return TrigPoly.from_cosines(amps)


def build_fstar_m(psi: PsiSpec, m: int) -> TrigPoly:
    """``(1/(5 pi m)) (psi(1)/2 + sum_k min(k, 2m+1-k) psi(k) cos kt)`` for ``k <= 2m``."""
    if m < 1:
        raise DomainError("build_fstar_m needs m >= 1")
    scale = 1.0 / (5 * math.pi * m)
    amps = {0: scale * 0.5 * float(psi(1))}
    for k in range(1, 2 * m + 1):
        weight = k if k <= m else 2 * m + 1 - k
        amps[k] = scale * weight * float(psi(k))
    return TrigPoly.from_cosines(amps)


def build_fdoublestar_m(m: int) -> TrigPoly:
    """``V_m / (3 pi)``."""
    return vallee_poussin(m).poly * (1.0 / (3 * math.pi))

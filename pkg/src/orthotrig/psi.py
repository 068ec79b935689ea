"""Decreasing weight functions psi and their half-decay characteristics.

A weight ``psi`` is defined on ``[1, inf)``, is positive, convex and tends to
zero.  The characteristics used throughout the package are

* ``eta(t)``: the abscissa where ``psi`` has halved, ``psi(eta(t)) = psi(t)/2``;
* ``mu(t) = t / (eta(t) - t)``, the modulus of half-decay.

All families are evaluated in log space so that ``eta`` can be located far out
on the tail without underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .exceptions import DomainError, NumericRangeError, PreconditionError

LN2 = math.log(2.0)

FAMILIES = ("exp_power", "exp_power_log", "power_law")


@dataclass(frozen=True)
class PsiSpec:
    """A parametrised weight function.

    Families
    --------
    ``exp_power``
        ``exp(-alpha t**r) * t**gamma`` with ``alpha > 0``, ``0 < r <= 1``.
    ``exp_power_log``
        ``exp(-alpha t**r) * log(t + K)`` with ``alpha > 0``, ``0 < r <= 1``,
        ``K > e - 1``.
    ``power_law``
        ``t**(-r)`` with ``r > 0``; only used for cross-checks.
    """

    family: str
    alpha: float = 1.0
    r: float = 1.0
    gamma: float = 0.0
    K: float = 2.0
    domain_start: float = field(default=1.0, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown psi family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "power_law":
            if not self.r > 0:
                raise DomainError("power_law needs r > 0")
            return
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")
        if not 0 < self.r <= 1:
            raise DomainError("r must lie in (0, 1]")
        if self.family == "exp_power_log" and not self.K > math.e - 1:
            raise DomainError("K must exceed e - 1")

    @classmethod
    def exp_power(cls, alpha: float, r: float, gamma: float = 0.0) -> "PsiSpec":
        return cls("exp_power", alpha=alpha, r=r, gamma=gamma)

    @classmethod
    def exp_power_log(cls, alpha: float, r: float, K: float) -> "PsiSpec":
        return cls("exp_power_log", alpha=alpha, r=r, K=K)

    @classmethod
    def power_law(cls, r: float) -> "PsiSpec":
        return cls("power_law", r=r)

    @classmethod
    def from_config(cls, cfg: dict) -> "PsiSpec":
        """Build from ``{"family": tag, <numeric params>}``."""
        cfg = dict(cfg)
        family = cfg.pop("family")
        allowed = {"exp_power": ("alpha", "r", "gamma"),
                   "exp_power_log": ("alpha", "r", "K"),
                   "power_law": ("r",)}.get(family)
        if allowed is None:
            raise DomainError(f"unknown psi family {family!r}")
        extra = set(cfg) - set(allowed)
        if extra:
            raise DomainError(f"unexpected parameters for {family}: {sorted(extra)}")
        return cls(family, **{k: float(v) for k, v in cfg.items()})

    def to_config(self) -> dict:
        keys = {"exp_power": ("alpha", "r", "gamma"),
                "exp_power_log": ("alpha", "r", "K"),
                "power_law": ("r",)}[self.family]
        return {"family": self.family, **{k: getattr(self, k) for k in keys}}

    def label(self) -> str:
        cfg = self.to_config()
        args = ",".join(f"{k}={cfg[k]:g}" for k in cfg if k != "family")
        return f"{self.family}({args})"

    # -- evaluation -------------------------------------------------------

    def log_value(self, t):
        """``log psi(t)``; accepts scalars or arrays, no domain check."""
        t = np.asarray(t, dtype=float)
        if self.family == "power_law":
            return -self.r * np.log(t)
        out = -self.alpha * t ** self.r
        if self.family == "exp_power":
            if self.gamma:
                out = out + self.gamma * np.log(t)
        else:
            out = out + np.log(np.log(t + self.K))
        return out

    def log_derivative(self, t):
        """``psi'(t) / psi(t)``."""
        t = np.asarray(t, dtype=float)
        if self.family == "power_law":
            return -self.r / t
        out = -self.alpha * self.r * t ** (self.r - 1.0)
        if self.family == "exp_power":
            if self.gamma:
                out = out + self.gamma / t
        else:
            out = out + 1.0 / ((t + self.K) * np.log(t + self.K))
        return out

    def __call__(self, t):
        return np.exp(self.log_value(t))

    def derivative(self, t):
        return self(t) * self.log_derivative(t)


def _check_domain(spec: PsiSpec, t) -> None:
    if np.any(np.asarray(t, dtype=float) < spec.domain_start):
        raise DomainError(f"psi is defined for t >= {spec.domain_start}, got {t}")


def psi_eval(spec: PsiSpec, t):
    """Evaluate ``psi(t)`` for ``t >= 1``."""
    _check_domain(spec, t)
    out = spec(t)
    return float(out) if np.ndim(out) == 0 else out


def psi_index(spec: PsiSpec, k):
    """``psi(|k|)`` on integers with the convention ``psi(0) := psi(1)``."""
    k = np.maximum(np.abs(np.asarray(k, dtype=float)), spec.domain_start)
    out = spec(k)
    return float(out) if np.ndim(out) == 0 else out


# -- half-decay characteristics -------------------------------------------


def eta(spec: PsiSpec, t: float) -> float:
    """Return the unique ``x > t`` with ``psi(x) = psi(t) / 2``.

    The root of ``log psi(x) - log psi(t) + log 2`` is bracketed on
    ``[t, t_hi]`` with ``t_hi - t`` doubled from 1, then located by
    alternating secant and bisection steps.
    """
    _check_domain(spec, t)
    t = float(t)
    target = float(spec.log_value(t)) - LN2

    def g(x):
        return float(spec.log_value(x)) - target

    lo, glo = t, LN2
    width = 1.0
    hi = t + width
    ghi = g(hi)
    for _ in range(1100):
        if ghi <= 0.0:
            break
        lo, glo = hi, ghi
        width *= 2.0
        hi = t + width
        if not math.isfinite(hi):
            break
        ghi = g(hi)
    else:
        ghi = math.inf
    if not ghi <= 0.0:
        raise NumericRangeError(f"could not bracket eta for {spec.label()} at t={t}")

    for it in range(400):
        if ghi == 0.0:
            return hi
        mid = 0.5 * (lo + hi)
        x = hi - ghi * (hi - lo) / (ghi - glo)
        if it % 2 or not lo < x < hi:
            x = mid
        gx = g(x)
        if gx > 0.0:
            lo, glo = x, gx
        else:
            hi, ghi = x, gx
        if hi - lo <= 4.0 * np.finfo(float).eps * hi:
            break
    return lo if abs(glo) < abs(ghi) else hi


def eta_closed_form(spec: PsiSpec, t: float) -> Optional[float]:
    """Closed-form ``eta`` where one exists, otherwise ``None``."""
    if spec.family == "exp_power" and spec.gamma == 0.0:
        return (t ** spec.r + LN2 / spec.alpha) ** (1.0 / spec.r)
    if spec.family == "power_law":
        return 2.0 ** (1.0 / spec.r) * t
    return None


@dataclass(frozen=True)
class PsiCharacteristics:
    t: float
    eta: float
    mu: float
    eta_gap: float


def mu(spec: PsiSpec, t: float) -> PsiCharacteristics:
    """Half-decay characteristics of ``spec`` at ``t``."""
    x = eta(spec, t)
    gap = x - t
    return PsiCharacteristics(t=float(t), eta=x, mu=t / gap, eta_gap=gap)


@dataclass(frozen=True)
class Classification:
    """Sampled evidence of subclass membership.

    Membership is an asymptotic property; the flags only say that the
    monotonicity/floor conditions hold on ``t_grid``.
    """

    in_M_plus_inf: bool
    in_M_dprime_inf: bool
    psi_over_dpsi_increasing: bool
    t_grid: tuple
    K_floor: float
    mu_values: tuple
    gap_values: tuple
    ratio_values: tuple


def _strictly_increasing(values, rtol=1e-9) -> bool:
    v = np.asarray(values, dtype=float)
    return bool(np.all(v[1:] > v[:-1] + rtol * np.abs(v[:-1])))


def classify(spec: PsiSpec, t_grid: Sequence[float], K_floor: float) -> Classification:
    """Check ``mu`` increasing, ``eta - t >= K_floor`` and ``psi/|psi'|`` increasing on a grid.

    Increase is tested with a relative margin of 1e-9 so that a characteristic
    that is constant up to rounding is not reported as increasing.
    """
    grid = np.asarray(t_grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 3 or np.any(np.diff(grid) <= 0):
        raise DomainError("t_grid must be strictly increasing with at least 3 points")
    _check_domain(spec, grid)
    chars = [mu(spec, t) for t in grid]
    mus = [c.mu for c in chars]
    gaps = [c.eta_gap for c in chars]
    ratio = 1.0 / np.abs(spec.log_derivative(grid))
    in_plus = _strictly_increasing(mus)
    return Classification(
        in_M_plus_inf=in_plus,
        in_M_dprime_inf=in_plus and min(gaps) >= K_floor,
        psi_over_dpsi_increasing=_strictly_increasing(ratio),
        t_grid=tuple(grid.tolist()),
        K_floor=float(K_floor),
        mu_values=tuple(mus),
        gap_values=tuple(gaps),
        ratio_values=tuple(ratio.tolist()),
    )


# -- tail integral bound ----------------------------------------------------


@dataclass(frozen=True)
class TailBound:
    lhs: float
    rhs: float
    holds: bool


def tail_integral(spec: PsiSpec, m: float, rel_cut: float = 1e-16, rel_tol: float = 1e-12) -> float:
    """``int_m^inf psi(u) du`` truncated where ``psi`` drops below ``rel_cut * psi(m)``.

    The range is split into dyadic pieces ``[m + 2**j - 1, m + 2**(j+1) - 1]``
    so each quadrature call sees a well-scaled integrand.
    """
    _check_domain(spec, m)
    log_m = float(spec.log_value(m))
    log_cut = log_m + math.log(rel_cut)
    scale = math.exp(log_m)
    edges = [float(m)]
    step = 1.0
    while float(spec.log_value(edges[-1])) > log_cut:
        edges.append(edges[-1] + step)
        step *= 2.0
        if len(edges) > 2000:
            raise NumericRangeError(f"psi does not decay fast enough to truncate the tail of {spec.label()}")
    tol = rel_tol * scale / max(len(edges) - 1, 1)
    pieces = []
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(lambda u: math.exp(float(spec.log_value(u)) - log_m), a, b,
                                epsabs=tol / scale, epsrel=1e-13, limit=200)
        pieces.append(val)
    return math.fsum(pieces) * scale


def tail_bound_check(spec: PsiSpec, m: int) -> TailBound:
    """Compare the tail integral of ``psi`` from ``m`` with ``2/(1-2/mu(m)) psi(m) (eta(m)-m)``."""
    c = mu(spec, m)
    if not c.mu > 2.0:
        raise PreconditionError(
            f"tail bound requires mu(m) > 2; mu({m}) = {c.mu:.6g} for {spec.label()}")
    lhs = tail_integral(spec, m)
    rhs = 2.0 / (1.0 - 2.0 / c.mu) * float(spec(m)) * c.eta_gap
    return TailBound(lhs=lhs, rhs=rhs, holds=lhs <= rhs)


# Weights listed as typical members of the admissible set, plus variants.
CATALOG = (
    PsiSpec.exp_power(1.0, 1.0),
    PsiSpec.exp_power(2.0, 0.5),
    PsiSpec.exp_power(1.0, 0.5),
    PsiSpec.exp_power(1.0, 0.3),
    PsiSpec.exp_power(1.0, 0.5, gamma=-1.0),
    PsiSpec.exp_power(2.0, 0.5, gamma=0.5),
    PsiSpec.exp_power(0.5, 0.75, gamma=0.2),
    PsiSpec.exp_power_log(1.0, 0.5, K=2.0),
    PsiSpec.exp_power_log(2.0, 0.5, K=1.8),
    PsiSpec.exp_power_log(1.0, 1.0, K=3.0),
)

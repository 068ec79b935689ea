"""Sparse trigonometric polynomials, Fourier-multiplier derivatives and L_p norms.

Functions are represented by their complex exponential coefficients
``f(t) = sum_k c_k exp(i k t)``.  Norms use the un-normalised integral over a
full period, ``||f||_p = (int_0^{2 pi} |f|^p dt)^(1/p)``, so Parseval reads
``||f||_2^2 = 2 pi sum |c_k|^2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

import numpy as np

from .exceptions import DomainError, NumericRangeError
from .psi import PsiSpec

TWO_PI = 2.0 * math.pi
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# complex samples held in memory at once by the batch norm engine
_CHUNK_ELEMENTS = 1 << 22


class TrigPoly:
    """Immutable finite spectrum ``k -> c_k``; zero coefficients are dropped."""

    def __init__(self, coeffs: Optional[Mapping[int, complex]] = None):
        clean = {}
        for k, c in sorted((coeffs or {}).items()):
            c = complex(c)
            if c != 0:
                clean[int(k)] = c
        self._coeffs = MappingProxyType(clean)

    @property
    def coeffs(self) -> Mapping[int, complex]:
        return self._coeffs

    @classmethod
    def from_arrays(cls, ks: Iterable[int], values: Iterable[complex]) -> "TrigPoly":
        out = {}
        for k, c in zip(ks, values):
            out[int(k)] = out.get(int(k), 0) + complex(c)
        return cls(out)

    @classmethod
    def from_cosines(cls, amplitudes: Mapping[int, float]) -> "TrigPoly":
        """``a_0 + sum_{k>=1} a_k cos(k t)`` as conjugate-symmetric pairs."""
        out = {}
        for k, a in amplitudes.items():
            if k < 0:
                raise DomainError("cosine indices must be non-negative")
            if k == 0:
                out[0] = out.get(0, 0) + a
            else:
                out[k] = out.get(k, 0) + a / 2
                out[-k] = out.get(-k, 0) + a / 2
        return cls(out)

    @cached_property
    def ks(self) -> np.ndarray:
        return np.fromiter(self._coeffs.keys(), dtype=np.int64, count=len(self._coeffs))

    @cached_property
    def values(self) -> np.ndarray:
        return np.fromiter(self._coeffs.values(), dtype=complex, count=len(self._coeffs))

    @property
    def support(self) -> tuple:
        return tuple(self._coeffs)

    @property
    def degree(self) -> int:
        """Largest ``|k|`` carrying a coefficient (0 for the empty polynomial)."""
        return int(np.abs(self.ks).max()) if self._coeffs else 0

    def __len__(self):
        return len(self._coeffs)

    def __getitem__(self, k: int) -> complex:
        return self._coeffs.get(k, 0j)

    def __eq__(self, other):
        return isinstance(other, TrigPoly) and dict(self._coeffs) == dict(other._coeffs)

    def __hash__(self):
        return hash(tuple(self._coeffs.items()))

    def __repr__(self):
        body = ", ".join(f"{k}: {c:.6g}" for k, c in self._coeffs.items())
        return f"TrigPoly({{{body}}})"

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        out = dict(self._coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return TrigPoly(out)

    def __neg__(self) -> "TrigPoly":
        return TrigPoly({k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-other)

    def __mul__(self, scalar) -> "TrigPoly":
        return TrigPoly({k: scalar * c for k, c in self._coeffs.items()})

    __rmul__ = __mul__

    def restrict(self, keep) -> "TrigPoly":
        return TrigPoly({k: c for k, c in self._coeffs.items() if keep(k)})

    def is_real(self, tol: float = 0.0) -> bool:
        """True when ``c_{-k} = conj(c_k)`` for every ``k`` (up to ``tol`` relative)."""
        for k, c in self._coeffs.items():
            d = self[-k].conjugate()
            if abs(c - d) > tol * abs(c):
                return False
        return True

    def __call__(self, t):
        """Vectorised evaluation at real points ``t``."""
        t = np.asarray(t, dtype=float)
        if not self._coeffs:
            return np.zeros(t.shape, dtype=complex)
        phase = np.exp(1j * np.multiply.outer(t, self.ks))
        return phase @ self.values

    # -- serialisation ----------------------------------------------------

    def to_dict(self) -> dict:
        return {"coeffs": [[k, c.real, c.imag] for k, c in self._coeffs.items()]}

    @classmethod
    def from_dict(cls, data: dict) -> "TrigPoly":
        return cls({int(k): complex(re, im) for k, re, im in data["coeffs"]})


@dataclass(frozen=True)
class QuadratureSpec:
    """Grid and stopping policy for norms.

    ``base_points`` defaults to ``max(1024, 8 (degree + 1))`` and is never
    allowed below ``4 (degree + 1)``.  L_p norms double the grid until two
    successive integrals of ``|f|^p`` agree to ``rel_tol / 4``; the sup norm takes the grid
    maximum and refines it by golden-section search to a bracket of width
    ``sup_refine_tol``.
    """

    base_points: Optional[int] = None
    rel_tol: float = 1e-8
    sup_refine_tol: float = 1e-6
    max_points: int = 1 << 24

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if not self.sup_refine_tol > 0:
            raise DomainError("sup_refine_tol must be positive")

    def points_for(self, degree: int) -> int:
        n = self.base_points if self.base_points else max(1024, 8 * (degree + 1))
        return max(int(n), 4 * (degree + 1))

    @classmethod
    def from_config(cls, cfg: Optional[dict]) -> "QuadratureSpec":
        return cls(**(cfg or {}))


@dataclass(frozen=True)
class ClassSpec:
    """Smoothness class: weight ``psi``, phase shift ``beta``, exponent ``p``."""

    psi: PsiSpec
    beta: float
    p: float

    def __post_init__(self):
        if not self.p >= 1:
            raise DomainError("p must satisfy p >= 1")


DEFAULT_QUAD = QuadratureSpec()


def conjugate_exponent(p: float) -> float:
    """``p'`` with ``1/p + 1/p' = 1``."""
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    if p < 1:
        raise DomainError("exponent must be >= 1")
    return p / (p - 1.0)


# -- pointwise evaluation ---------------------------------------------------


def evaluate(f: TrigPoly, t: float) -> complex:
    """Compensated evaluation at one point, summing in order of increasing ``|k|``."""
    order = sorted(f.coeffs.items(), key=lambda kc: (abs(kc[0]), kc[0]))
    re, im = [], []
    for k, c in order:
        z = c * complex(math.cos(k * t), math.sin(k * t))
        re.append(z.real)
        im.append(z.imag)
    return complex(math.fsum(re), math.fsum(im))


def partial_sum(f: TrigPoly, n: int) -> TrigPoly:
    """Fourier partial sum of order ``n - 1``: keep ``|k| <= n - 1``."""
    if n < 1:
        raise DomainError("partial_sum needs n >= 1")
    return f.restrict(lambda k: abs(k) <= n - 1)


def gamma_sum(f: TrigPoly, gamma) -> TrigPoly:
    """Keep only the coefficients whose index lies in ``gamma``."""
    members = set(getattr(gamma, "members", gamma))
    return f.restrict(lambda k: k in members)


def _multiplier_weights(ks: np.ndarray, cls: ClassSpec) -> np.ndarray:
    with np.errstate(under="ignore"):
        w = cls.psi(np.abs(ks).astype(float))
    bad = ~(w > 0) | ~np.isfinite(w)
    if np.any(bad):
        raise NumericRangeError(
            f"psi(|k|) underflows for k = {ks[bad].tolist()[:5]} under {cls.psi.label()}")
    return w


def psi_beta_derivative(f: TrigPoly, cls: ClassSpec) -> TrigPoly:
    """Multiplier ``c_k -> c_k / psi(|k|) * exp(i beta pi/2 sign k)``; the mean is dropped."""
    g = f.restrict(lambda k: k != 0)
    if not len(g):
        return g
    ks = g.ks
    w = _multiplier_weights(ks, cls)
    phase = np.exp(1j * cls.beta * math.pi / 2 * np.sign(ks))
    return TrigPoly.from_arrays(ks, g.values / w * phase)


def psi_beta_integral(f: TrigPoly, cls: ClassSpec) -> TrigPoly:
    """Inverse multiplier ``c_k -> c_k psi(|k|) exp(-i beta pi/2 sign k)`` for ``k != 0``."""
    g = f.restrict(lambda k: k != 0)
    if not len(g):
        return g
    ks = g.ks
    w = _multiplier_weights(ks, cls)
    phase = np.exp(-1j * cls.beta * math.pi / 2 * np.sign(ks))
    return TrigPoly.from_arrays(ks, g.values * w * phase)


# -- norms --------------------------------------------------------------------


def _grid_samples(ks: np.ndarray, C: np.ndarray, n_points: int) -> np.ndarray:
    spec = np.zeros((C.shape[0], n_points), dtype=complex)
    spec[:, ks % n_points] = C
    return np.fft.ifft(spec, axis=1) * n_points


def _power_integrals(ks, C, n_points, p) -> np.ndarray:
    out = np.empty(C.shape[0])
    step = max(1, _CHUNK_ELEMENTS // n_points)
    for lo in range(0, C.shape[0], step):
        a = np.abs(_grid_samples(ks, C[lo:lo + step], n_points))
        a = a * a if p == 2 else a ** p
        out[lo:lo + step] = a.sum(axis=1) * (TWO_PI / n_points)
    return out ** (1.0 / p)


def _lp_rows(ks, C, p, quad: QuadratureSpec, degree: int) -> np.ndarray:
    n_points = quad.points_for(degree)
    prev = _power_integrals(ks, C, n_points, p)
    result = np.empty(C.shape[0])
    active = np.arange(C.shape[0])
    while active.size:
        n_points *= 2
        cur = _power_integrals(ks, C[active], n_points, p)
        # |f|^p has kinks at zeros of f for non-even p, so the error after a
        # doubling is not much smaller than the change; stop with a margin
        done = np.abs(cur - prev) <= 0.25 * quad.rel_tol * np.abs(cur)
        if n_points * 2 > quad.max_points:
            warnings.warn(f"L_{p} quadrature stopped at {n_points} points before reaching "
                          f"rel_tol={quad.rel_tol}", RuntimeWarning, stacklevel=3)
            done[:] = True
        result[active[done]] = cur[done]
        active = active[~done]
        prev = cur[~done]
    return result


def _sup_rows(ks, C, quad: QuadratureSpec, degree: int, max_candidates: int = 8) -> np.ndarray:
    rows = C.shape[0]
    n_points = quad.points_for(degree)
    h = TWO_PI / n_points
    # |T|^2 has degree 2d, so every grid point near the true maximiser sees at
    # least this fraction of ||T||^2
    floor = 1.0 - 2.0 * (degree * math.pi / n_points) ** 2
    best = np.empty(rows)
    pair_rows, pair_t = [], []
    step = max(1, _CHUNK_ELEMENTS // n_points)
    for lo in range(0, rows, step):
        a = np.abs(_grid_samples(ks, C[lo:lo + step], n_points))
        top = a.max(axis=1)
        best[lo:lo + step] = top
        peaks = (a >= np.roll(a, 1, axis=1)) & (a >= np.roll(a, -1, axis=1))
        peaks &= a * a >= (top * top * floor)[:, None] if floor > 0 else True
        peaks &= a > 0
        for i in range(a.shape[0]):
            idx = np.flatnonzero(peaks[i])
            if idx.size > max_candidates:
                idx = idx[np.argsort(-a[i, idx], kind="stable")[:max_candidates]]
            pair_rows.extend([lo + i] * idx.size)
            pair_t.extend((idx * h).tolist())
    if not pair_rows:
        return best
    pr = np.asarray(pair_rows)
    centre = np.asarray(pair_t)
    lo_t, hi_t = centre - h, centre + h

    def absval(t):
        out = np.empty(t.shape)
        step_p = max(1, _CHUNK_ELEMENTS // max(len(ks), 1))
        for s in range(0, t.size, step_p):
            ph = np.exp(1j * np.multiply.outer(t[s:s + step_p], ks))
            out[s:s + step_p] = np.abs((ph * C[pr[s:s + step_p]]).sum(axis=1))
        return out

    c = hi_t - _GOLDEN * (hi_t - lo_t)
    d = lo_t + _GOLDEN * (hi_t - lo_t)
    fc, fd = absval(c), absval(d)
    running = np.maximum(fc, fd)
    n_iter = max(0, math.ceil(math.log(quad.sup_refine_tol / (2 * h)) / math.log(_GOLDEN)))
    for _ in range(n_iter):
        left = fc > fd
        hi_t = np.where(left, d, hi_t)
        lo_t = np.where(left, lo_t, c)
        new_c = hi_t - _GOLDEN * (hi_t - lo_t)
        new_d = lo_t + _GOLDEN * (hi_t - lo_t)
        probe = np.where(left, new_c, new_d)
        fp = absval(probe)
        c, d = np.where(left, new_c, d), np.where(left, c, new_d)
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        running = np.maximum(running, fp)
    np.maximum.at(best, pr, running)
    return best


def lp_norms(ks, C, p: float, quad: QuadratureSpec = DEFAULT_QUAD,
             degree: Optional[int] = None) -> np.ndarray:
    """Norms of a batch of polynomials sharing the index vector ``ks``.

    ``C`` has shape ``(rows, len(ks))``.  Each row is refined independently,
    so a row's value does not depend on the rest of the batch; ``degree``
    fixes the starting grid (default: ``max |ks|``).
    """
    ks = np.asarray(ks, dtype=np.int64)
    C = np.atleast_2d(np.asarray(C, dtype=complex))
    if p < 1:
        raise DomainError("p must satisfy p >= 1")
    if C.shape[0] == 0:
        return np.empty(0)
    if ks.size == 0:
        return np.zeros(C.shape[0])
    if degree is None:
        degree = int(np.abs(ks).max())
    if degree < int(np.abs(ks).max()):
        raise DomainError("degree hint smaller than the largest index")
    if math.isinf(p):
        return _sup_rows(ks, C, quad, degree)
    return _lp_rows(ks, C, float(p), quad, degree)


def lp_norm(f: TrigPoly, p: float, quad: QuadratureSpec = DEFAULT_QUAD,
            degree: Optional[int] = None) -> float:
    """``||f||_p`` for ``1 <= p <= inf`` by periodic trapezoidal quadrature."""
    if not len(f):
        if p < 1:
            raise DomainError("p must satisfy p >= 1")
        return 0.0
    return float(lp_norms(f.ks, f.values[None, :], p, quad, degree)[0])


def rho_n(f: TrigPoly, n: int, s: float, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``||f - S_{n-1} f||_s``."""
    return lp_norm(f - partial_sum(f, n), s, quad)


@dataclass(frozen=True)
class Membership:
    deriv_norm: float
    zero_mean: bool
    in_class: bool


def membership_report(f: TrigPoly, cls: ClassSpec, quad: QuadratureSpec = DEFAULT_QUAD) -> Membership:
    """Measure ``||f^psi_beta||_p`` and test it against the unit ball."""
    d = psi_beta_derivative(f, cls)
    norm = lp_norm(d, cls.p, quad)
    return Membership(deriv_norm=norm, zero_mean=d[0] == 0, in_class=norm <= 1.0 + quad.rel_tol)

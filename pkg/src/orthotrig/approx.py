"""Best orthogonal trigonometric approximation and duality lower bounds.

``e_m(f)_s = inf_gamma ||f - S_gamma f||_s`` over sets ``gamma`` of ``m``
integers.  Indices outside ``supp f`` remove nothing, so a set of ``m``
integers acts like removing at most ``m`` coefficients of ``f``; every search
below runs over subsets of the support of size ``<= m`` and pads the reported
``gamma`` with unused integers.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import CapacityError, DomainError
from .extremal import BoundConstants, fstar_scale
from .fourier import (DEFAULT_QUAD, TWO_PI, ClassSpec, QuadratureSpec, TrigPoly,
                      _power_integrals, conjugate_exponent, lp_norm, lp_norms)
from .psi import PsiSpec, mu, psi_index

MAX_SUPPORT = 24
MAX_SUBSETS = 5_000_000
_BLOCK = 4096
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class IndexSet:
    members: tuple

    def __post_init__(self):
        m = tuple(int(k) for k in self.members)
        if len(set(m)) != len(m):
            raise DomainError("index set has duplicates")
        object.__setattr__(self, "members", tuple(sorted(m)))

    @property
    def size(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, k):
        return k in self.members


@dataclass(frozen=True)
class ApproxResult:
    value: float
    gamma: IndexSet
    method: str
    certified_lower: Optional[float] = None


def _pad(chosen, m: int, support) -> IndexSet:
    """Extend ``chosen`` to ``m`` integers using indices absent from ``support``."""
    taken = set(chosen)
    blocked = set(support) | taken
    out = list(chosen)
    k = 0
    while len(out) < m:
        for cand in ((0,) if k == 0 else (k, -k)):
            if cand not in blocked and len(out) < m:
                out.append(cand)
        k += 1
    return IndexSet(tuple(out))


def _count_subsets(K: int, r: int) -> int:
    return sum(math.comb(K, j) for j in range(r + 1))


def _check_capacity(K: int, r: int, what: str) -> None:
    if K > MAX_SUPPORT or _count_subsets(K, r) > MAX_SUBSETS:
        raise CapacityError(
            f"{what}: support {K} with up to {r} removals exceeds the exhaustive-search guard "
            f"(support <= {MAX_SUPPORT}, <= {MAX_SUBSETS} subsets); use best_orthogonal_greedy")


def _subset_blocks(K: int, r: int):
    """Boolean removal masks, largest removal first, lexicographic within a size."""
    for size in range(r, -1, -1):
        combos = itertools.combinations(range(K), size)
        while True:
            block = list(itertools.islice(combos, _BLOCK))
            if not block:
                break
            mask = np.zeros((len(block), K), dtype=bool)
            if size:
                mask[np.repeat(np.arange(len(block)), size), np.asarray(block).ravel()] = True
            yield mask


def _first_minimum(values: np.ndarray) -> int:
    vmin = values.min()
    return int(np.flatnonzero(values <= vmin * (1 + _TIE_RTOL))[0])


def remainder_norms(f: TrigPoly, removed: np.ndarray, s: float,
                    quad: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    """``||f - S_gamma f||_s`` for boolean removal masks over ``f.ks``.

    Every remainder is sampled on the grid chosen for ``f`` itself, so a given
    ``gamma`` gets the same value whichever search produced it.
    """
    removed = np.atleast_2d(removed)
    C = np.where(removed, 0, f.values[None, :])
    return lp_norms(f.ks, C, s, quad, degree=f.degree)


def _result_from_mask(f, mask, m, value, method) -> ApproxResult:
    chosen = [int(k) for k, r in zip(f.ks, mask) if r]
    return ApproxResult(value=float(value), gamma=_pad(chosen, m, f.support), method=method)


def best_orthogonal_exact(f: TrigPoly, m: int, s: float,
                          quad: QuadratureSpec = DEFAULT_QUAD) -> ApproxResult:
    """Exhaustive minimum over all removal sets of size ``<= m``.

    For ``s < inf`` every candidate is first scored on the base grid and on
    the half grid; rows whose coarse value cannot reach the coarse minimum
    within ten times that discrepancy are dropped before full refinement.
    Ties go to the earliest candidate (larger sets first, then lexicographic).
    """
    if m < 0:
        raise DomainError("m must be non-negative")
    K = len(f)
    if m >= K:
        return ApproxResult(0.0, _pad(f.support, m, f.support), "exact")
    _check_capacity(K, m, "best_orthogonal_exact")

    if math.isinf(s):
        masks, values = [], []
        for mask in _subset_blocks(K, m):
            masks.append(mask)
            values.append(remainder_norms(f, mask, s, quad))
        masks, values = np.concatenate(masks), np.concatenate(values)
        i = _first_minimum(values)
        return _result_from_mask(f, masks[i], m, values[i], "exact")

    n0 = quad.points_for(f.degree)
    masks, fine, slack = [], [], []
    for mask in _subset_blocks(K, m):
        C = np.where(mask, 0, f.values[None, :])
        v1 = _power_integrals(f.ks, C, n0, float(s))
        v0 = _power_integrals(f.ks, C, n0 // 2, float(s))
        masks.append(mask)
        fine.append(v1)
        slack.append(10 * np.abs(v1 - v0) + 1e-9 * v1)
    masks, fine, slack = np.concatenate(masks), np.concatenate(fine), np.concatenate(slack)
    keep = np.flatnonzero(fine - slack <= (fine + slack).min())
    values = remainder_norms(f, masks[keep], s, quad)
    i = _first_minimum(values)
    return _result_from_mask(f, masks[keep[i]], m, values[i], "exact")


def _grid_norm(x: np.ndarray, s: float, n_points: int) -> np.ndarray:
    a = np.abs(x)
    if math.isinf(s):
        return a.max(axis=-1)
    return ((a ** s).sum(axis=-1) * (TWO_PI / n_points)) ** (1 / s)


def best_orthogonal_greedy(f: TrigPoly, m: int, s: float,
                           quad: QuadratureSpec = DEFAULT_QUAD,
                           swaps: Optional[int] = None) -> ApproxResult:
    """Largest-coefficient selection followed by best-improvement swap rounds.

    The initial set holds the ``m`` largest ``|c_k|`` (ties: smaller ``|k|``,
    then positive ``k``).  Each round evaluates, on the base grid, every
    exchange of a selected index with an unselected support index, plus
    pure drops and additions, and applies the best one if it improves.  In
    ``L_2`` the initial set is optimal and no swaps are run.
    """
    if m < 0:
        raise DomainError("m must be non-negative")
    K = len(f)
    if m >= K:
        return ApproxResult(0.0, _pad(f.support, m, f.support), "greedy")
    if swaps is None:
        swaps = 2 * m
    mags = np.abs(f.values)
    order = sorted(range(K), key=lambda i: (-mags[i], abs(int(f.ks[i])), int(f.ks[i]) < 0))
    start = np.zeros(K, dtype=bool)
    start[order[:m]] = True
    if s == 2 or swaps == 0 or m == 0:
        return _result_from_mask(f, start, m, remainder_norms(f, start, s, quad)[0], "greedy")

    n_points = quad.points_for(f.degree)
    t = TWO_PI * np.arange(n_points) / n_points
    terms = f.values[:, None] * np.exp(1j * np.outer(f.ks, t))
    removed = start.copy()
    resid = terms[~removed].sum(axis=0)
    current = float(_grid_norm(resid, s, n_points))
    zero = np.zeros((1, n_points), dtype=complex)
    moved = False
    for _ in range(swaps):
        outs = np.flatnonzero(removed)
        ins = np.flatnonzero(~removed)
        # add-back candidates (plus "none") against removal candidates (plus "none")
        back = np.concatenate([terms[outs], zero])
        take = np.concatenate([terms[ins], zero])
        best_val, best_pair = current, None
        for a in range(back.shape[0]):
            cand = resid[None, :] + back[a][None, :] - take
            vals = _grid_norm(cand, s, n_points)
            if a == back.shape[0] - 1:
                vals[-1] = np.inf
                if removed.sum() >= m:
                    vals[:] = np.inf
            j = int(np.argmin(vals))
            if vals[j] < best_val * (1 - _TIE_RTOL):
                best_val, best_pair = float(vals[j]), (a, j)
        if best_pair is None:
            break
        a, j = best_pair
        if a < len(outs):
            removed[outs[a]] = False
            resid = resid + terms[outs[a]]
        if j < len(ins):
            removed[ins[j]] = True
            resid = resid - terms[ins[j]]
        current = best_val
        moved = True
    if not moved:
        return _result_from_mask(f, start, m, remainder_norms(f, start, s, quad)[0], "greedy")
    both = remainder_norms(f, np.stack([removed, start]), s, quad)
    if both[1] < both[0]:
        return _result_from_mask(f, start, m, both[1], "greedy")
    return _result_from_mask(f, removed, m, both[0], "greedy+swaps")


# -- duality pairing ---------------------------------------------------------


def pairing_terms(f: TrigPoly, g: TrigPoly) -> np.ndarray:
    """Nonzero ``2 pi c_k(f) c_{-k}(g)``, in increasing ``k``."""
    w = [TWO_PI * c * g[-k] for k, c in f.coeffs.items() if g[-k] != 0]
    return np.asarray([x for x in w if x != 0], dtype=complex)


def pairing_inf(f: TrigPoly, g: TrigPoly, m: int) -> float:
    """``inf_gamma |int (f - S_gamma f) g dt|`` over sets of ``m`` integers.

    With non-negative real terms the infimum drops the ``m`` largest; otherwise
    all removal sets of size ``<= m`` are enumerated.
    """
    w = pairing_terms(f, g)
    if m >= w.size:
        return 0.0
    scale = np.abs(w)
    if np.all(np.abs(w.imag) <= 1e-14 * scale) and np.all(w.real >= 0):
        kept = np.sort(w.real)[::-1][m:]
        return math.fsum(kept.tolist())
    _check_capacity(w.size, m, "pairing_inf")
    best = math.inf
    for mask in _subset_blocks(w.size, m):
        sums = np.where(mask, 0, w[None, :]).sum(axis=1)
        best = min(best, float(np.abs(sums).min()))
    return best


def lower_bound_via_pairing(f: TrigPoly, g: TrigPoly, m: int, s: float,
                            quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Certified lower bound ``pairing_inf(f, g, m) / ||g||_{s'}`` for ``e_m(f)_s``."""
    denom = lp_norm(g, conjugate_exponent(s), quad)
    if not denom > 0:
        raise DomainError("pairing function must have positive norm")
    return pairing_inf(f, g, m) / denom


# -- closed forms of the pairings for the extremal functions --------------------


def _warn_unless_ordered(removed, kept, what: str) -> None:
    if kept.size and removed.size and removed.min() < kept.max() * (1 - 1e-12):
        warnings.warn(f"{what}: the 2n largest terms are not the ones removed by the closed form; "
                      "it is not the infimum here", RuntimeWarning, stacklevel=3)


def _warn_side_conditions(psi: PsiSpec, n: int, consts: BoundConstants, what: str) -> None:
    c = mu(psi, n)
    if c.eta_gap < consts.a or c.mu < consts.b:
        warnings.warn(f"{what}: side conditions fail at n={n} (eta-n={c.eta_gap:.6g} vs a={consts.a:.6g}, "
                      f"mu={c.mu:.6g} vs b={consts.b:.6g})", RuntimeWarning, stacklevel=3)


def _square_profile(psi: PsiSpec, n: int) -> np.ndarray:
    """Amplitudes ``a_k``, ``k = 0..2n``, of the degree-2n extremal cosine polynomial."""
    k = np.arange(0, 2 * n + 1)
    out = psi_index(psi, k) ** 2
    low = np.arange(0, n)
    out[:n] = psi_index(psi, low) * psi_index(psi, 2 * n - low)
    return out


def _squares_tail(psi: PsiSpec, n: int) -> float:
    k = np.arange(n + 1, 2 * n + 1, dtype=float)
    return math.fsum([float(psi(n)) ** 2, 2 * math.fsum((psi(k) ** 2).tolist())])


def i1_closed_form(cls: ClassSpec, n: int, consts: BoundConstants) -> float:
    """``pi lambda_p / (2 psi(n) (eta(n)-n)^(1/p')) * (psi(n)^2 + sum_{n<|k|<=2n} psi(|k|)^2)``."""
    a = _square_profile(cls.psi, n)
    _warn_unless_ordered(a[:n], a[n:n + 1], "I1 closed form")
    _warn_side_conditions(cls.psi, n, consts, "I1 closed form")
    return math.pi / 2 * fstar_scale(cls.psi, n, consts) * _squares_tail(cls.psi, n)


def i3_closed_form(psi: PsiSpec, n: int, consts: BoundConstants) -> float:
    """``lambda_{s'} / (6 psi(n) (eta(n)-n)^(1/s)) * (psi(n)^2 + 2 sum_{k=n+1}^{2n} psi(k)^2)``.

    ``consts`` must be built for the conjugate exponent ``s'``.
    """
    a = _square_profile(psi, n)
    _warn_unless_ordered(a[:n], a[n:n + 1], "I3 closed form")
    _warn_side_conditions(psi, n, consts, "I3 closed form")
    return fstar_scale(psi, n, consts) / 6 * _squares_tail(psi, n)


def i2_closed_form(psi: PsiSpec, n: int) -> float:
    """Pairing of the degree-4n extremal function with ``V_{2n}`` after removing ``|k| < n`` and ``k = n``.

    ``(n psi(n) + 2 sum_{k=n+1}^{2n} k psi(k)) / (20 n)
    + (1/(5n)) sum_{k=2n+1}^{4n-1} (4n+1-k)(1 - k/(4n)) psi(k)``.
    """
    k = np.arange(1, 4 * n, dtype=float)
    near = k <= 2 * n
    terms = np.where(near, k * psi(k) / (20 * n),
                     (4 * n + 1 - k) * (1 - k / (4 * n)) * psi(k) / (10 * n))
    removed = np.concatenate([[float(psi(1)) / (20 * n)], terms[:n]])
    _warn_unless_ordered(removed, terms[n - 1:], "I2 closed form")
    head = n * float(psi(n)) + 2 * math.fsum((k[n:2 * n] * psi(k[n:2 * n])).tolist())
    far = k[2 * n:]
    tail = math.fsum(((4 * n + 1 - far) * (1 - far / (4 * n)) * psi(far)).tolist())
    return head / (20 * n) + tail / (5 * n)

"""Experiment engine: per-n evaluation of the two-sided bounds and report output.

Every row pairs an extremal member ``f`` with a test function ``g`` and
records, for ``m = 2n``:

``lower_paper <= pairing_lower <= e_upper_greedy <= class_upper_paper``

``lower_paper`` and ``class_upper_paper`` are the explicit formula bounds,
``pairing_lower`` is the exact duality bound for ``e_m(f)``, and
``e_upper_greedy`` is a computed upper bound on ``e_m(f)``.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .approx import (best_orthogonal_greedy, i1_closed_form, i2_closed_form, i3_closed_form,
                     pairing_inf)
from .exceptions import DomainError, PreconditionError
from .extremal import (BoundConstants, build_constants, build_fdoublestar_m, build_fstar_m,
                       build_fstar_pn)
from .fourier import ClassSpec, QuadratureSpec, conjugate_exponent, lp_norm, membership_report, rho_n
from .kernels import vallee_poussin
from .psi import PsiSpec, mu

log = logging.getLogger(__name__)

MODES = ("theorem1", "theorem2", "theorem3", "corollary1", "corollary2")

ROW_FIELDS = (
    "n", "psi_n", "eta_n", "eta_gap", "mu_n", "order_term", "lower_paper", "pairing_lower",
    "e_upper_greedy", "rho_upper", "class_upper_paper", "membership_norm",
    "chain_ok", "membership_ok", "conditions_ok",
)
COMMON_EXTRAS = ("beta", "pairing_inf", "closed_form", "closed_form_relerr", "closed_form_warning",
                 "greedy_method")
MODE_EXTRAS = {
    "theorem1": (),
    "theorem2": ("rho_bound_paper", "upper_t4", "upper_prop1"),
    "theorem3": ("dual_norm", "dual_membership_norm", "pairing_lower_sharp", "upper_applicable"),
}

# relative slack on every reported inequality
SLACK = 1e-9
COROLLARY_SPREAD_LIMIT = 10.0


def _le(a: float, b: float) -> bool:
    return bool(a <= b + SLACK * max(abs(a), abs(b)))


def _parse_exponent(x):
    if x is None:
        return None
    if isinstance(x, str):
        return math.inf if x.strip().lower() in ("inf", "infinity") else float(x)
    return float(x)


@dataclass
class ExperimentConfig:
    psi: PsiSpec = field(default_factory=lambda: PsiSpec.exp_power(2.0, 0.5))
    beta: float = 0.0
    p: Optional[float] = None
    s: Optional[float] = None
    n_range: tuple = (9, 24, 1)
    mode: str = "theorem1"
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    swaps: Optional[int] = None
    output_path: Optional[str] = None
    output_format: str = "csv"

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}")
        n_min, n_max, step = (list(self.n_range) + [1])[:3]
        self.n_range = (int(n_min), int(n_max), int(step))
        if self.n_range[0] < 2:
            raise DomainError("n_min must be >= 2")
        if self.n_range[2] < 1 or self.n_range[1] < self.n_range[0]:
            raise DomainError("n_range is empty")
        if self.output_format not in ("csv", "json"):
            raise DomainError("output format must be csv or json")
        self.p = _parse_exponent(self.p)
        self.s = _parse_exponent(self.s)

    @property
    def ns(self) -> list:
        lo, hi, step = self.n_range
        return list(range(lo, hi + 1, step))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        kwargs = {}
        if "psi" in data:
            kwargs["psi"] = PsiSpec.from_config(data.pop("psi"))
        if "quad" in data:
            kwargs["quad"] = QuadratureSpec.from_config(data.pop("quad"))
        out = data.pop("output", None) or {}
        if "path" in out:
            kwargs["output_path"] = out["path"]
        if "format" in out:
            kwargs["output_format"] = out["format"]
        for key in ("beta", "p", "s", "mode", "swaps"):
            if key in data:
                kwargs[key] = data.pop(key)
        if "n_range" in data:
            kwargs["n_range"] = tuple(data.pop("n_range"))
        if data:
            raise DomainError(f"unknown config keys: {sorted(data)}")
        return cls(**kwargs)

    def to_dict(self) -> dict:
        def enc(x):
            return "inf" if x is not None and math.isinf(x) else x
        return {
            "psi": self.psi.to_config(), "beta": self.beta, "p": enc(self.p), "s": enc(self.s),
            "n_range": list(self.n_range), "mode": self.mode,
            "quad": {"base_points": self.quad.base_points, "rel_tol": self.quad.rel_tol,
                     "sup_refine_tol": self.quad.sup_refine_tol, "max_points": self.quad.max_points},
            "swaps": self.swaps,
            "output": {"path": self.output_path, "format": self.output_format},
        }


@dataclass
class BoundReport:
    mode: str
    config: dict
    constants: dict
    rows: list
    columns: tuple = ROW_FIELDS

    def all_chain_ok(self) -> bool:
        """True iff every row meeting the side conditions has ``chain_ok``."""
        return all(r["chain_ok"] for r in self.rows if r["conditions_ok"])

    def column(self, name: str) -> np.ndarray:
        return np.asarray([r[name] for r in self.rows], dtype=float)

    def to_dict(self) -> dict:
        return {"mode": self.mode, "config": self.config, "constants": self.constants,
                "columns": list(self.columns), "rows": self.rows}

    @classmethod
    def from_dict(cls, data: dict) -> "BoundReport":
        return cls(mode=data["mode"], config=data["config"], constants=data["constants"],
                   rows=data["rows"], columns=tuple(data["columns"]))


# -- shared row pieces -----------------------------------------------------------


def _characteristics(psi: PsiSpec, n: int) -> dict:
    c = mu(psi, n)
    return {"n": n, "psi_n": float(psi(n)), "eta_n": c.eta, "eta_gap": c.eta_gap, "mu_n": c.mu}


def _closed_form_fields(pinf: float, compute) -> dict:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        cf = compute()
    return {"pairing_inf": pinf, "closed_form": cf,
            "closed_form_relerr": abs(pinf - cf) / abs(cf) if cf else math.inf,
            "closed_form_warning": bool(caught)}


def _blank_row(base: dict, columns: tuple, beta: float) -> dict:
    row = {name: math.nan for name in columns}
    row.update(base)
    row.update(beta=beta, chain_ok=False, membership_ok=False, conditions_ok=False,
               closed_form_warning=False, greedy_method="")
    if "upper_applicable" in row:
        row["upper_applicable"] = False
    return row


def _floors_hold(c: dict, consts: BoundConstants, need_a: bool = True) -> bool:
    ok_b = c["mu_n"] >= consts.b * (1 - 1e-12)
    ok_a = c["eta_gap"] >= consts.a * (1 - 1e-12)
    return bool(ok_b and (ok_a or not need_a))


def _try_constants(cls: ClassSpec, n_min: int):
    try:
        return build_constants(cls, n_min), None
    except PreconditionError as exc:
        log.warning("side conditions fail: %s", exc)
        return None, str(exc)


def _constants_dict(consts: Optional[BoundConstants], error: Optional[str]) -> dict:
    if consts is None:
        return {"error": error}
    return {k: getattr(consts, k) for k in ("p", "p_prime", "a", "b", "lambda_p", "K_ab", "K_abp", "K_bp")}


def _columns(mode: str) -> tuple:
    return ROW_FIELDS + COMMON_EXTRAS + MODE_EXTRAS[mode]


def psi_tail_sum(psi: PsiSpec, n: int) -> float:
    """``sum_{k >= n} psi(k)``, accumulated in blocks until the block is negligible."""
    parts = []
    start = n
    while True:
        k = np.arange(start, start + 1024, dtype=float)
        block = math.fsum(psi(k).tolist())
        parts.append(block)
        if block <= 1e-18 * math.fsum(parts) or start > 1e9:
            break
        start += 1024
    return math.fsum(parts)


# -- bound pipelines -----------------------------------------------------------------


def verify_theorem1(cfg: ExperimentConfig) -> BoundReport:
    """Uniform-metric sandwich for ``1 < p < inf`` using the degree-2n extremal function."""
    p = cfg.p if cfg.p is not None else 2.0
    if not 1 < p < math.inf:
        raise DomainError("theorem1 needs 1 < p < inf")
    cls = ClassSpec(cfg.psi, cfg.beta, p)
    consts, err = _try_constants(cls, cfg.n_range[0])
    columns = _columns("theorem1")
    rows = []
    for n in cfg.ns:
        base = _characteristics(cfg.psi, n)
        row = _blank_row(base, columns, cfg.beta)
        if consts is None:
            rows.append(row)
            continue
        order = base["psi_n"] * base["eta_gap"] ** (1 / p)
        f = build_fstar_pn(cls, n, consts)
        V = vallee_poussin(2 * n).poly
        pinf = pairing_inf(f, V, 2 * n)
        greedy = best_orthogonal_greedy(f, 2 * n, math.inf, cfg.quad, cfg.swaps)
        member = membership_report(f, cls, cfg.quad)
        row.update(_closed_form_fields(pinf, lambda: i1_closed_form(cls, n, consts)))
        row.update(
            order_term=order,
            lower_paper=consts.K_bp * order,
            pairing_lower=pinf / (3 * math.pi),
            e_upper_greedy=greedy.value,
            greedy_method=greedy.method,
            rho_upper=rho_n(f, n, math.inf, cfg.quad),
            class_upper_paper=consts.K_abp * order,
            membership_norm=member.deriv_norm,
            membership_ok=member.in_class,
            conditions_ok=_floors_hold(base, consts),
        )
        row["chain_ok"] = (_le(row["lower_paper"], row["pairing_lower"])
                           and _le(row["pairing_lower"], row["e_upper_greedy"])
                           and _le(row["e_upper_greedy"], row["class_upper_paper"]))
        rows.append(row)
    return BoundReport("theorem1", cfg.to_dict(), _constants_dict(consts, err), rows, columns)


def verify_theorem2(cfg: ExperimentConfig) -> BoundReport:
    """Uniform-metric sandwich for ``p = 1`` using the degree-4n extremal function.

    The pairing bound and the tail-sum bound on ``rho_n`` do not involve
    ``b = mu(n_min)``; they are computed even when ``b <= 2``, in which case
    the upper forms are left as NaN and the row is marked ``conditions_ok=false``.
    """
    if cfg.p not in (None, 1.0) or cfg.s not in (None, math.inf):
        raise DomainError("theorem2 is the case p = 1, s = inf")
    psi = cfg.psi
    member_cls = ClassSpec(psi, cfg.beta, 1.0)
    b = mu(psi, cfg.n_range[0]).mu
    err = None if b > 2 else f"b = mu(n_min) = {b:.6g} <= 2"
    if err:
        log.warning("side conditions fail: %s", err)
    ratio = b / (b - 2) if b > 2 else math.nan
    columns = _columns("theorem2")
    rows = []
    for n in cfg.ns:
        base = _characteristics(psi, n)
        row = _blank_row(base, columns, cfg.beta)
        order = base["psi_n"] * base["eta_gap"]
        f = build_fstar_m(psi, 2 * n)
        V = vallee_poussin(2 * n).poly
        pinf = pairing_inf(f, V, 2 * n)
        greedy = best_orthogonal_greedy(f, 2 * n, math.inf, cfg.quad, cfg.swaps)
        member = membership_report(f, member_cls, cfg.quad)
        row.update(_closed_form_fields(pinf, lambda: i2_closed_form(psi, n)))
        row.update(
            order_term=order,
            lower_paper=order / (60 * math.pi),
            pairing_lower=pinf / (3 * math.pi),
            e_upper_greedy=greedy.value,
            greedy_method=greedy.method,
            rho_upper=rho_n(f, n, math.inf, cfg.quad),
            class_upper_paper=(1 / b + ratio) * order / math.pi,
            membership_norm=member.deriv_norm,
            membership_ok=member.in_class,
            conditions_ok=bool(err is None and base["mu_n"] >= b * (1 - 1e-12)),
            rho_bound_paper=psi_tail_sum(psi, n) / math.pi,
            upper_t4=base["psi_n"] / math.pi * (1 + ratio * base["eta_gap"]),
            upper_prop1=base["psi_n"] / math.pi * (1 + 2 * ratio * base["eta_gap"]),
        )
        row["chain_ok"] = (_le(row["lower_paper"], row["pairing_lower"])
                           and _le(row["pairing_lower"], row["e_upper_greedy"])
                           and _le(row["rho_upper"], row["rho_bound_paper"])
                           and (err is not None or _le(row["e_upper_greedy"], row["class_upper_paper"])))
        rows.append(row)
    constants = {"b": b, "error": err} if err else {"b": b}
    return BoundReport("theorem2", cfg.to_dict(), constants, rows, columns)


def verify_theorem3(cfg: ExperimentConfig) -> BoundReport:
    """``L_s`` sandwich for ``p = 1``, ``1 < s < inf``, pairing ``V_{2n}/(3 pi)`` with the ``s'`` extremal function.

    ``pairing_lower`` is the pairing infimum itself, a lower bound for the
    deviation because the test function has ``||g||_{s'} <= 1``; the sharper
    ``pinf / ||g||_{s'}`` is kept as ``pairing_lower_sharp``.
    The upper link is only asserted when the measured ``(psi, beta)``-derivative
    of ``V_{2n}/(3 pi)`` lies in the unit ball of ``L_1`` (``upper_applicable``).
    """
    s = cfg.s if cfg.s is not None else 2.0
    if not 1 < s < math.inf or cfg.p not in (None, 1.0):
        raise DomainError("theorem3 is the case p = 1, 1 < s < inf")
    sp = conjugate_exponent(s)
    psi = cfg.psi
    dual_cls = ClassSpec(psi, cfg.beta, sp)
    member_cls = ClassSpec(psi, cfg.beta, 1.0)
    consts, err = _try_constants(dual_cls, cfg.n_range[0])
    columns = _columns("theorem3")
    rows = []
    for n in cfg.ns:
        base = _characteristics(psi, n)
        row = _blank_row(base, columns, cfg.beta)
        if consts is None:
            rows.append(row)
            continue
        order = base["psi_n"] * base["eta_gap"] ** (1 / sp)
        f = build_fdoublestar_m(2 * n)
        g = build_fstar_pn(dual_cls, n, consts)
        pinf = pairing_inf(f, g, 2 * n)
        dual_norm = lp_norm(g, sp, cfg.quad)
        greedy = best_orthogonal_greedy(f, 2 * n, s, cfg.quad, cfg.swaps)
        member = membership_report(f, member_cls, cfg.quad)
        row.update(_closed_form_fields(pinf, lambda: i3_closed_form(psi, n, consts)))
        row.update(
            order_term=order,
            lower_paper=consts.K_bp * order,
            pairing_lower=pinf,
            e_upper_greedy=greedy.value,
            greedy_method=greedy.method,
            rho_upper=rho_n(f, n, s, cfg.quad),
            class_upper_paper=consts.K_abp * order,
            membership_norm=member.deriv_norm,
            membership_ok=member.in_class,
            conditions_ok=_floors_hold(base, consts),
            dual_norm=dual_norm,
            dual_membership_norm=membership_report(g, dual_cls, cfg.quad).deriv_norm,
            pairing_lower_sharp=pinf / dual_norm,
            upper_applicable=member.in_class,
        )
        # pinf <= pinf/||g|| holds whenever ||g||_{s'} <= 1; both are lower bounds for e_m(f)_s
        lower_ok = (_le(row["lower_paper"], pinf)
                    and _le(dual_norm, 1.0)
                    and _le(row["pairing_lower_sharp"], row["e_upper_greedy"]))
        upper_ok = _le(row["e_upper_greedy"], row["class_upper_paper"])
        row["chain_ok"] = lower_ok and (upper_ok or not member.in_class)
        rows.append(row)
    return BoundReport("theorem3", cfg.to_dict(), _constants_dict(consts, err), rows, columns)


VERIFIERS = {"theorem1": verify_theorem1, "theorem2": verify_theorem2, "theorem3": verify_theorem3}


def verify(cfg: ExperimentConfig) -> BoundReport:
    try:
        return VERIFIERS[cfg.mode](cfg)
    except KeyError:
        raise DomainError(f"verify handles {tuple(VERIFIERS)}, got {cfg.mode!r}") from None


# -- ratio sweeps --------------------------------------------------------------------


@dataclass
class RatioTable:
    """Per-n ratios of the computed bounds to the asymptotic order term."""

    mode: str
    exponent: float
    rows: list
    summary: dict
    report: BoundReport
    columns: tuple = ("n", "denominator", "pairing_lower", "e_upper_greedy", "ratio", "ratio_upper")

    def bounded(self, limit: float = COROLLARY_SPREAD_LIMIT) -> bool:
        return bool(self.summary["ratio_min"] > 0 and self.summary["ratio_spread"] <= limit)

    def to_dict(self) -> dict:
        return {"mode": self.mode, "exponent": self.exponent, "summary": self.summary,
                "columns": list(self.columns), "rows": self.rows}


def sweep_corollary(cfg: ExperimentConfig) -> RatioTable:
    """Divide the pairing bound and the greedy value by ``exp(-alpha n^r) n^((1-r)/q)``.

    ``corollary1`` runs the uniform-metric pipeline with ``q = p``;
    ``corollary2`` runs the ``L_s`` pipeline with ``q = s'``.
    """
    psi = cfg.psi
    if psi.family != "exp_power" or psi.gamma != 0 or not 0 < psi.r < 1:
        raise DomainError("ratio sweeps need psi = exp(-alpha t^r) with 0 < r < 1")
    if cfg.mode == "corollary1":
        q = cfg.p if cfg.p is not None else 2.0
        report = verify_theorem1(ExperimentConfig(**{**cfg.__dict__, "mode": "theorem1", "p": q}))
    elif cfg.mode == "corollary2":
        s = cfg.s if cfg.s is not None else 2.0
        q = conjugate_exponent(s)
        report = verify_theorem3(ExperimentConfig(**{**cfg.__dict__, "mode": "theorem3", "s": s, "p": None}))
    else:
        raise DomainError("sweep handles corollary1 and corollary2")
    rows = []
    for r in report.rows:
        n = r["n"]
        denom = math.exp(-psi.alpha * n ** psi.r) * n ** ((1 - psi.r) / q)
        rows.append({"n": n, "denominator": denom, "pairing_lower": r["pairing_lower"],
                     "e_upper_greedy": r["e_upper_greedy"],
                     "ratio": r["pairing_lower"] / denom, "ratio_upper": r["e_upper_greedy"] / denom})
    ratio = np.asarray([r["ratio"] for r in rows])
    upper = np.asarray([r["ratio_upper"] for r in rows])
    summary = {"ratio_max": float(ratio.max()), "ratio_min": float(ratio.min()),
               "ratio_spread": float(ratio.max() / ratio.min()),
               "ratio_upper_max": float(upper.max()), "ratio_upper_min": float(upper.min()),
               "ratio_upper_spread": float(upper.max() / upper.min())}
    return RatioTable(cfg.mode, q, rows, summary, report)


# -- output --------------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def emit(report, path, fmt: str = "csv") -> None:
    """Write a report (or ratio table) as CSV with a header row, or as JSON."""
    if not report.rows:
        raise DomainError("refusing to emit an empty report")
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            write_csv(report, fh)
    elif fmt == "json":
        with open(path, "w") as fh:
            json.dump(report.to_dict(), fh, indent=1)
            fh.write("\n")
    else:
        raise DomainError("format must be csv or json")


def write_csv(report, fh) -> None:
    if not report.rows:
        raise DomainError("refusing to emit an empty report")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_fmt(row[c]) for c in report.columns])


def load_report(path) -> BoundReport:
    with open(path) as fh:
        return BoundReport.from_dict(json.load(fh))

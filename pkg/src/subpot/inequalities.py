"""Numerical checkers for the small-set integral bounds.

Each checker evaluates both sides of one proved inequality (or identity)
on a concrete instance and returns a :class:`BoundReport`.  Left-hand
sides involving circle maxima go through singularity-hinted quadrature of
the grid-refined maxima; right-hand sides combine closed forms, circle
means and norms.  ``holds()`` compares the sides with a margin built from
the accumulated quadrature error estimates.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gamma as _gamma_fn
from scipy.special import gammaincc as _gammaincc

from .characteristics import (
    CharacteristicValue,
    characteristic_T,
    circle_mean_nonlinear,
    counting_integral,
    max_on_circle,
    max_on_circles,
    nevanlinna,
    radial_count,
)
from .model import (
    AtomicMeasure,
    DeltaSubharmonicFn,
    RationalFunctionSpec,
    SubharmonicPotential,
    canonicalize,
    evaluate,
    ln_abs,
)
from .quadrature import QuadratureSpec, integrate
from .sets import IntervalSet, Weight, integrate_weighted, lp_norm, rearranged_majorant

# Circle-max integrands are expensive; their integrals feed a ratio with
# generous theorem slack, so a looser tolerance is enough.
LHS_QUAD = QuadratureSpec(rel_tol=1e-7, abs_tol=1e-10, max_panels=2**14)
MEAN_QUAD = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-12)
NORM_QUAD = QuadratureSpec(rel_tol=1e-11, abs_tol=1e-13)

_SUP_GRID = 256


def fingerprint_doc(doc: object) -> str:
    payload = json.dumps(doc, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _safe_ratio(lhs: float, rhs: float) -> float:
    lhs = max(float(lhs), 0.0)
    if rhs == 0.0:
        return 0.0 if lhs == 0.0 else math.inf
    if math.isinf(rhs):
        return 0.0 if not math.isinf(lhs) else math.nan
    return lhs / rhs


@dataclass(frozen=True)
class BoundReport:
    """One inequality check: both sides, their ratio and the error budget."""

    name: str
    lhs: float
    rhs: float
    ratio: float
    params: dict = field(default_factory=dict)
    error_estimate: float = 0.0
    instance_fingerprint: str = ""
    degenerate: bool = False

    def holds(self) -> bool:
        margin = self.error_estimate + 1e-12 * (1.0 + abs(self.rhs))
        return self.lhs <= self.rhs + margin


def _report(
    name: str,
    lhs: float,
    rhs: float,
    params: dict,
    err: float,
    doc: Optional[dict],
    degenerate: bool = False,
) -> BoundReport:
    return BoundReport(
        name=name,
        lhs=float(lhs),
        rhs=float(rhs),
        ratio=_safe_ratio(lhs, rhs),
        params=params,
        error_estimate=float(err),
        instance_fingerprint=fingerprint_doc(doc if doc is not None else params),
        degenerate=degenerate,
    )


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def _require_subset(e: IntervalSet, lo: float, hi: float, what: str) -> None:
    if e.is_empty:
        return
    tol = 1e-12 * (1.0 + abs(hi))
    _require(e.lower >= lo - tol and e.upper <= hi + tol, f"set must lie inside [{what}]")


# --- mass bound by annulus counting --------------------------------------

def lemma2_check(mu: AtomicMeasure, r: float, R: float, doc: Optional[dict] = None) -> BoundReport:
    """Closed-disc mass against R/(R-r) times the annulus counting integral."""
    _require(0 <= r < R and math.isfinite(R), "need 0 <= r < R, finite")
    lhs = radial_count(mu, r)
    rhs = R / (R - r) * counting_integral(mu, r, R)
    params = {"r": r, "R": R, "total_mass": mu.total_mass}
    return _report("lemma2", lhs, rhs, params, 0.0, doc)


# --- elementary log-power integral bound ----------------------------------

def lemma3_check(
    q: float, A: float, a: float, quad: QuadratureSpec = NORM_QUAD, doc: Optional[dict] = None
) -> BoundReport:
    """Integral of ln^q(A/x) on (0, a] against (1 + q^(q+1)) * a * ln^q(A/a)."""
    _require(q >= 0, "need q >= 0")
    _require(A > 0 and 0 < a <= A / math.e * (1 + 1e-12), "need 0 < a <= A/e")

    def integrand(x: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(A / x) ** q

    lhs, err = integrate(integrand, 0.0, a, spec=quad, hints=[0.0])
    rhs = (1.0 + q ** (q + 1.0)) * a * math.log(A / a) ** q
    params = {"q": q, "A": A, "a": a}
    return _report("lemma3", lhs, rhs, params, err, doc)


# --- L^q norm of the shifted log kernel -----------------------------------

def _log_kernel_primitive(y: np.ndarray, R: float, q: float) -> np.ndarray:
    """Exact integral of ln^q(2R/u) over u in [0, y] (0 <= y <= 2R)."""
    y = np.asarray(y, float)
    if np.any(y < -1e-12) or np.any(y > 2 * R * (1 + 1e-12)):
        raise ValueError("kernel distance out of range [0, 2R]")
    y = np.clip(y, 0.0, 2 * R)
    with np.errstate(divide="ignore"):
        s = np.log(2 * R / y)
    return 2 * R * _gammaincc(q + 1.0, s) * _gamma_fn(q + 1.0)


def log_kernel_norm(
    e: IntervalSet,
    x: float,
    R: float,
    q: float,
    method: str = "closed_form",
    quad: QuadratureSpec = NORM_QUAD,
) -> tuple[float, float]:
    """L^q(E) norm of t -> ln(2R/|t - x|); returns (norm, error_estimate)."""
    _require(q >= 1, "need q >= 1")
    _require(R > 0, "need R > 0")
    if e.is_empty:
        return 0.0, 0.0
    if method == "closed_form":
        total = 0.0
        for alpha, beta in e.intervals:
            if x <= alpha:
                lo, hi = alpha - x, beta - x
                contrib = _log_kernel_primitive(hi, R, q) - _log_kernel_primitive(lo, R, q)
            elif x >= beta:
                lo, hi = x - beta, x - alpha
                contrib = _log_kernel_primitive(hi, R, q) - _log_kernel_primitive(lo, R, q)
            else:
                contrib = _log_kernel_primitive(x - alpha, R, q) + _log_kernel_primitive(beta - x, R, q)
            total += float(contrib)
        return total ** (1.0 / q), 0.0
    if method == "quadrature":
        # Integrate in distance coordinates y = |t - x|: floats stay dense
        # near y = 0, so bisection can chase the integrable singularity far
        # below the t-space resolution limit around x itself.
        def kernel_pow(y: np.ndarray) -> np.ndarray:
            return np.log(2 * R / y) ** q

        spans: list[tuple[float, float]] = []
        for alpha, beta in e.intervals:
            if x <= alpha:
                spans.append((alpha - x, beta - x))
            elif x >= beta:
                spans.append((x - beta, x - alpha))
            else:
                spans.append((0.0, x - alpha))
                spans.append((0.0, beta - x))
        floor = 2 * R * 1e-25
        total = 0.0
        err = 0.0
        for d1, d2 in spans:
            if d2 > 2 * R:
                raise ValueError("set reaches beyond kernel range 2R")
            if d2 <= d1:
                continue
            if d1 < floor:
                # Truncated singular tip, bounded by y * ln^q(2R/y) at the floor.
                err += floor * math.log(2 * R / floor) ** q
                d1 = floor
                if d2 <= d1:
                    continue
            val, er = integrate(kernel_pow, d1, d2, spec=quad, hints=[d1])
            total += val
            err += er
        if total <= 0.0:
            return 0.0, err
        norm = total ** (1.0 / q)
        return norm, norm * err / (q * total)
    raise ValueError(f"unknown method {method!r}")


def _sup_log_kernel_norm(e: IntervalSet, R: float, q: float) -> float:
    """sup over x in [0, R] of the closed-form kernel norm (grid + refinement)."""
    xs = np.linspace(0.0, R, _SUP_GRID)
    vals = np.array([log_kernel_norm(e, float(x), R, q)[0] for x in xs])
    best = float(vals.max())
    peaks = np.nonzero((vals >= np.roll(vals, 1)) & (vals > np.roll(vals, -1)))[0]
    peaks = peaks[(peaks > 0) & (peaks < _SUP_GRID - 1)]
    step = R / (_SUP_GRID - 1)
    for idx in peaks:
        lo, hi = xs[idx] - step, xs[idx] + step
        for _ in range(80):
            m1 = lo + (hi - lo) * 0.382
            m2 = lo + (hi - lo) * 0.618
            if log_kernel_norm(e, m1, R, q)[0] >= log_kernel_norm(e, m2, R, q)[0]:
                hi = m2
            else:
                lo = m1
        best = max(best, log_kernel_norm(e, 0.5 * (lo + hi), R, q)[0])
    return best


def lemma4_check(
    e: IntervalSet,
    x: float,
    r: float,
    R: float,
    q: float,
    quad: QuadratureSpec = NORM_QUAD,
    doc: Optional[dict] = None,
) -> BoundReport:
    """Shifted log-kernel norm against 2q * (mes E)^(1/q) * ln(4R / mes E)."""
    _require(q >= 1, "need q >= 1")
    _require(0 < r <= R and math.isfinite(R), "need 0 < r <= R, finite")
    _require(0 <= x <= R, "need 0 <= x <= R")
    _require_subset(e, 0.0, r, "0, r")
    m = e.measure
    params = {"x": x, "r": r, "R": R, "q": q, "mes_E": m}
    if m == 0.0:
        return _report("lemma4", 0.0, 0.0, params, 0.0, doc, degenerate=True)
    lhs, err = log_kernel_norm(e, x, R, q, method="quadrature", quad=quad)
    rhs = 2.0 * q * m ** (1.0 / q) * math.log(4.0 * R / m)
    return _report("lemma4", lhs, rhs, params, err, doc)


# --- symmetric rearrangement bound ----------------------------------------

def lemma_a_check(
    f: Callable[[np.ndarray], np.ndarray],
    e: IntervalSet,
    a: float,
    quad: QuadratureSpec = NORM_QUAD,
    doc: Optional[dict] = None,
    params: Optional[dict] = None,
) -> BoundReport:
    """Set integral of an even decreasing profile against its centered bound."""
    rec = rearranged_majorant(f, e, a, quad=quad)
    out_params = {"a": a, "mes_E": e.measure}
    if params:
        out_params.update(params)
    return _report(
        "lemma_a",
        rec["lhs"],
        rec["rhs"],
        out_params,
        rec["lhs_err"] + rec["rhs_err"],
        doc,
        degenerate=e.is_empty,
    )


# --- maxima integrals against growth characteristics ----------------------

def _weight_key(g: Weight) -> str:
    # The integrand h * g is independent of the exponent p, so key on the
    # polynomial pieces only; p sweeps then reuse one integral.
    return json.dumps(g.to_doc()["pieces"], sort_keys=True, separators=(",", ":"))


def _m_plus_integral(
    u: DeltaSubharmonicFn,
    e: IntervalSet,
    g: Weight,
    quad: QuadratureSpec,
    cache: Optional[dict],
) -> tuple[float, float]:
    """integral over E of sup-positive-part times weight, with modulus hints."""
    key = ("m_plus_integral", _weight_key(g))
    if cache is not None and key in cache:
        return cache[key]
    canon = canonicalize(u)

    def h(ts: np.ndarray) -> np.ndarray:
        return max_on_circles(canon, ts, transform="plus")

    hints = [float(x) for x in canon.minus.charge.moduli]
    val, err = integrate_weighted(h, g, e, quad=quad, hints=hints)
    if cache is not None:
        cache[key] = (val, err)
    return val, err


def _m_abs_integral(
    u: SubharmonicPotential,
    e: IntervalSet,
    g: Weight,
    quad: QuadratureSpec,
    cache: Optional[dict],
) -> tuple[float, float]:
    key = ("m_abs_integral", _weight_key(g))
    if cache is not None and key in cache:
        return cache[key]

    def h(ts: np.ndarray) -> np.ndarray:
        return max_on_circles(u, ts, transform="abs")

    hints = [float(x) for x in u.charge.moduli]
    val, err = integrate_weighted(h, g, e, quad=quad, hints=hints)
    if cache is not None:
        cache[key] = (val, err)
    return val, err


def lemma1_check(
    u: DeltaSubharmonicFn,
    e: IntervalSet,
    g: Weight,
    r: float,
    R: float,
    quad: QuadratureSpec = MEAN_QUAD,
    doc: Optional[dict] = None,
    cache: Optional[dict] = None,
) -> BoundReport:
    """Weighted maxima integral against the Poisson and kernel-norm bound."""
    _require(0 <= r < R and math.isfinite(R), "need 0 <= r < R, finite")
    _require_subset(e, 0.0, r, "0, r")
    canon = canonicalize(u)
    m = e.measure
    q = g.q
    params = {"r": r, "R": R, "p": g.p, "q": q, "mes_E": m}
    if m == 0.0:
        return _report("lemma1", 0.0, 0.0, params, 0.0, doc, degenerate=True)

    lhs, lhs_err = _m_plus_integral(canon, e, g, LHS_QUAD, cache)
    c_plus = circle_mean_nonlinear(canon, "plus", R, quad)
    mass = radial_count(canon.minus.charge, R)
    sup_norm = _sup_log_kernel_norm(e, R, q)
    g_norm = lp_norm(g, e)
    rhs = ((R + r) / (R - r) * c_plus.value * m ** (1.0 / q) + mass * sup_norm) * g_norm
    err = lhs_err + c_plus.error_estimate * m ** (1.0 / q) * (R + r) / (R - r) * g_norm
    return _report("lemma1", lhs, rhs, params, err, doc)


def main_lemma_check(
    u: DeltaSubharmonicFn,
    e: IntervalSet,
    g: Weight,
    r: float,
    b: float,
    quad: QuadratureSpec = MEAN_QUAD,
    doc: Optional[dict] = None,
    cache: Optional[dict] = None,
) -> BoundReport:
    """Weighted maxima integral against the single-radius characteristic bound."""
    _require(r > 0 and math.isfinite(r), "need r > 0")
    _require(b > 0 and math.isfinite(b), "need b > 0")
    _require_subset(e, 0.0, r, "0, r")
    canon = canonicalize(u)
    m = e.measure
    q = g.q
    params = {"r": r, "b": b, "p": g.p, "q": q, "mes_E": m}
    if m == 0.0:
        return _report("main_lemma", 0.0, 0.0, params, 0.0, doc, degenerate=True)

    lhs, lhs_err = _m_plus_integral(canon, e, g, LHS_QUAD, cache)
    r1 = (1.0 + b) * r
    r2 = (1.0 + b) ** 2 * r
    c_plus = circle_mean_nonlinear(canon, "plus", r1, quad)
    n_ann = counting_integral(canon.minus.charge, r1, r2)
    g_norm = lp_norm(g, e)
    factor = q * (2.0 + b) / b * g_norm * m ** (1.0 / q) * math.log(4.0 * r1 / m)
    rhs = factor * (c_plus.value + n_ann)
    err = lhs_err + factor * c_plus.error_estimate
    return _report("main_lemma", lhs, rhs, params, err, doc)


def main_theorem_T(
    u: DeltaSubharmonicFn,
    e: IntervalSet,
    g: Weight,
    r: float,
    r0: float,
    k: float,
    quad: QuadratureSpec = MEAN_QUAD,
    doc: Optional[dict] = None,
    cache: Optional[dict] = None,
) -> BoundReport:
    """Normalized maxima integral against the two-radius characteristic bound."""
    _require(0 < r0 < r and math.isfinite(r), "need 0 < r0 < r")
    _require(k > 1 and math.isfinite(k), "need k > 1")
    _require_subset(e, 0.0, r, "0, r")
    canon = canonicalize(u)
    if canon.plus.charge.is_empty and canon.minus.charge.is_empty:
        raise ValueError("difference carries no atoms; instance is trivial")
    m = e.measure
    q = g.q
    params = {"r0": r0, "r": r, "k": k, "p": g.p, "q": q, "mes_E": m}
    if m == 0.0:
        return _report("main_theorem_T", 0.0, 0.0, params, 0.0, doc, degenerate=True)

    raw_lhs, raw_err = _m_plus_integral(canon, e, g, LHS_QUAD, cache)
    lhs = raw_lhs / r
    t_char = characteristic_T(canon, r0, k * r, quad)
    c0 = circle_mean_nonlinear(canon, "plus", r0, quad)
    g_norm = lp_norm(g, e)
    factor = 4.0 * q * k / (k - 1.0) * g_norm * (m ** (1.0 / q) / r) * math.log(4.0 * k * r / m)
    rhs = factor * (t_char.value + c0.value)
    err = raw_err / r + factor * (t_char.error_estimate + c0.error_estimate)
    return _report("main_theorem_T", lhs, rhs, params, err, doc)


def main_theorem_M(
    u: SubharmonicPotential,
    e: IntervalSet,
    g: Weight,
    r: float,
    r0: float,
    k: float,
    quad: QuadratureSpec = MEAN_QUAD,
    doc: Optional[dict] = None,
    cache: Optional[dict] = None,
) -> BoundReport:
    """Normalized modulus-maxima integral against the single-component bound."""
    _require(0 < r0 < r and math.isfinite(r), "need 0 < r0 < r")
    _require(k > 1 and math.isfinite(k), "need k > 1")
    _require_subset(e, 0.0, r, "0, r")
    m = e.measure
    q = g.q
    params = {"r0": r0, "r": r, "k": k, "p": g.p, "q": q, "mes_E": m}
    if m == 0.0:
        return _report("main_theorem_M", 0.0, 0.0, params, 0.0, doc, degenerate=True)

    raw_lhs, raw_err = _m_abs_integral(u, e, g, LHS_QUAD, cache)
    lhs = raw_lhs / r
    m_plus = max_on_circle(u, k * r, transform="plus")
    c_minus = circle_mean_nonlinear(u, "minus", r0, quad)
    g_norm = lp_norm(g, e)
    factor = 5.0 * q * k / (k - 1.0) * g_norm * (m ** (1.0 / q) / r) * math.log(4.0 * k * r / m)
    rhs = factor * (m_plus.value + c_minus.value)
    err = raw_err / r + factor * c_minus.error_estimate
    return _report("main_theorem_M", lhs, rhs, params, err, doc)


# --- characteristic-comparison probes (no absolute constant exists) -------

def nevanlinna_ratio(
    f: RationalFunctionSpec,
    r: float,
    k: float,
    quad: QuadratureSpec = MEAN_QUAD,
    doc: Optional[dict] = None,
    cache: Optional[dict] = None,
) -> BoundReport:
    """Averaged max-modulus growth over [0, r] against T at radius kr."""
    _require(r > 0 and math.isfinite(r), "need r > 0")
    _require(k > 1 and math.isfinite(k), "need k > 1")
    key = ("lnplus_integral", r)
    if cache is not None and key in cache:
        raw_lhs, raw_err = cache[key]
    else:
        u = ln_abs(f)

        def h(ts: np.ndarray) -> np.ndarray:
            return max_on_circles(u, ts, transform="plus")

        hints = [float(x) for x in f.poles.moduli if x <= r]
        raw_lhs, raw_err = integrate(h, 0.0, r, spec=LHS_QUAD, hints=hints + [0.0])
        if cache is not None:
            cache[key] = (raw_lhs, raw_err)
    lhs = raw_lhs / r
    t_at_kr = nevanlinna(f, k * r, quad).T
    # T(kr) is a nonnegative quantity; quadrature noise on an exact zero may
    # come back as a tiny signed residue, which would flip the ratio's sign.
    rhs = t_at_kr.value
    if abs(rhs) <= t_at_kr.error_estimate + 1e-12 * (1.0 + abs(lhs)):
        rhs = 0.0
    params = {"r": r, "k": k}
    report = _report("nevanlinna_ratio", lhs, rhs, params, raw_err / r + t_at_kr.error_estimate, doc)
    degenerate = report.rhs == 0.0 and report.lhs == 0.0
    if degenerate:
        report = _report("nevanlinna_ratio", lhs, rhs, params, report.error_estimate, doc, degenerate=True)
    return report


def _minimal_small_set_constant(lhs: float, structure: float, b: float) -> float:
    """Smallest a >= 1 with (a/b) ln(a/b) * structure >= lhs (inf if none)."""
    def phi(a: float) -> float:
        return (a / b) * math.log(a / b)

    slack = 1e-12 * (1.0 + abs(lhs))
    if phi(1.0) * structure >= lhs - slack:
        return 1.0
    if structure <= 0.0:
        return math.inf
    hi = 2.0
    for _ in range(300):
        if phi(hi) * structure >= lhs:
            break
        hi *= 2.0
    else:
        return math.inf
    lo = 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if phi(mid) * structure >= lhs:
            hi = mid
        else:
            lo = mid
    return hi


def small_intervals_ratio(
    u: SubharmonicPotential,
    e: IntervalSet,
    g: Weight,
    r0: float,
    r: float,
    R: float,
    b: float,
    quad: QuadratureSpec = MEAN_QUAD,
    doc: Optional[dict] = None,
    cache: Optional[dict] = None,
) -> BoundReport:
    """Empirical minimal constant in the bounded-weight small-interval bound."""
    _require(0 <= r0 <= r < R and math.isfinite(R), "need 0 <= r0 <= r < R")
    _require(0 < b <= 1, "need b in (0, 1]")
    _require(math.isinf(g.p), "bounded-weight probe needs p = inf")
    _require_subset(e, r, R, "r, R")
    m = e.measure
    params = {"r0": r0, "r": r, "R": R, "b": b, "mes_E": m}

    lhs, lhs_err = _m_abs_integral(u, e, g, LHS_QUAD, cache) if m > 0 else (0.0, 0.0)
    m_at = max_on_circle(u, (1.0 + b) * R)
    if r0 > 0:
        c_minus = circle_mean_nonlinear(u, "minus", r0, quad)
        c_minus_val, c_minus_err = c_minus.value, c_minus.error_estimate
    else:
        center = evaluate(DeltaSubharmonicFn.from_potential(u), 0.0)
        c_minus_val, c_minus_err = max(-center, 0.0), 0.0
    g_sup = lp_norm(g, e)
    mn = min(m, 3.0 * b * R)
    m_inf = m + (mn * math.log(3.0 * math.e * b * R / mn) if mn > 0 else 0.0)
    structure = (m_at.value + 2.0 * c_minus_val) * g_sup * m_inf
    a_min = _minimal_small_set_constant(lhs, structure, b)
    params["a_min"] = a_min
    params["m_inf"] = m_inf
    degenerate = m == 0.0 or (structure <= 0.0 and lhs > 0.0)
    return _report(
        "small_intervals_ratio",
        lhs,
        structure,
        params,
        lhs_err + 2.0 * c_minus_err * g_sup * m_inf,
        doc,
        degenerate=degenerate,
    )


# --- quadrature-vs-closed-form identity -----------------------------------

def pjp_identity_check(
    v: SubharmonicPotential,
    r: float,
    R: float,
    quad: QuadratureSpec = QuadratureSpec(rel_tol=1e-11, abs_tol=1e-13),
    atol: float = 1e-8,
    rtol: float = 1e-8,
    doc: Optional[dict] = None,
) -> BoundReport:
    """Circle-mean difference by quadrature against the counting integral."""
    _require(0 < r <= R and math.isfinite(R), "need 0 < r <= R, finite")
    hi = circle_mean_nonlinear(v, "id", R, quad)
    lo = circle_mean_nonlinear(v, "id", r, quad)
    n_val = counting_integral(v.charge, r, R)
    lhs = abs(hi.value - lo.value - n_val)
    rhs = atol + rtol * abs(n_val)
    params = {"r": r, "R": R, "n_value": n_val}
    return _report("pjp_identity", lhs, rhs, params, hi.error_estimate + lo.error_estimate, doc)

"""Radial characteristics of atomic-charge potentials.

Circle means of the potentials themselves have exact closed forms
(``mean of ln|z - a| over |z| = r`` is ``ln max(r, |a|)``); everything
nonlinear (positive parts, absolute values, circle maxima) is evaluated
numerically with a dense angular grid plus golden-section refinement, or
with singularity-aware quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .model import (
    AtomicMeasure,
    DeltaSubharmonicFn,
    RationalFunctionSpec,
    SubharmonicPotential,
    canonicalize,
    evaluate,
    ln_abs,
)
from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate

FunctionLike = Union[SubharmonicPotential, DeltaSubharmonicFn]

_TWO_PI = 2.0 * math.pi
_CIRCLE_GRID = 1024
_GOLDEN_ITERS = 60
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0
# Atoms this close to the circle (relative) get an angular hint.
_SPIKE_REL = 0.05

TRANSFORMS = ("id", "plus", "minus", "abs")


@dataclass(frozen=True)
class CharacteristicValue:
    """A computed quantity plus an honest account of how it was obtained."""

    value: float
    error_estimate: float = 0.0
    method: str = "closed_form"


def as_delta(v: FunctionLike) -> DeltaSubharmonicFn:
    if isinstance(v, SubharmonicPotential):
        return DeltaSubharmonicFn.from_potential(v)
    return v


class CircleSampler:
    """Vectorized profile values of a canonical difference at ``t * e^{is}``."""

    def __init__(self, u: DeltaSubharmonicFn):
        u = canonicalize(u)
        self.u = u
        self._pc = u.plus.charge.centers
        self._pm = u.plus.charge.masses
        self._mc = u.minus.charge.centers
        self._mm = u.minus.charge.masses
        self._c0 = u.plus.const - u.minus.const

    def profile(self, t: np.ndarray, s: np.ndarray) -> np.ndarray:
        z = np.asarray(t, float) * np.exp(1j * np.asarray(s, float))
        out = np.full(np.broadcast(np.asarray(t), np.asarray(s)).shape, self._c0, dtype=float)
        with np.errstate(divide="ignore"):
            if self._pc.size:
                out = out + np.sum(np.log(np.abs(z[..., None] - self._pc)) * self._pm, axis=-1)
            if self._mc.size:
                out = out - np.sum(np.log(np.abs(z[..., None] - self._mc)) * self._mm, axis=-1)
        return out


def _golden_extremum(
    f: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    maximize: bool,
    iters: int = _GOLDEN_ITERS,
) -> np.ndarray:
    """Vectorized golden-section search; returns the extremal values."""
    lo = np.asarray(lo, float).copy()
    hi = np.asarray(hi, float).copy()
    h = hi - lo
    c = lo + _INVPHI2 * h
    d = lo + _INVPHI * h
    yc = f(c)
    yd = f(d)
    for _ in range(iters):
        mask = (yc >= yd) if maximize else (yc <= yd)
        hi = np.where(mask, d, hi)
        lo = np.where(mask, lo, c)
        h = hi - lo
        c_cand = lo + _INVPHI2 * h
        d_cand = lo + _INVPHI * h
        new_y = f(np.where(mask, c_cand, d_cand))
        c_new = np.where(mask, c_cand, d)
        yc_new = np.where(mask, new_y, yd)
        d_new = np.where(mask, c, d_cand)
        yd_new = np.where(mask, yc, new_y)
        c, d, yc, yd = c_new, d_new, yc_new, yd_new
    return np.maximum(yc, yd) if maximize else np.minimum(yc, yd)


def _circle_extreme(sampler: CircleSampler, ts: np.ndarray, maximize: bool) -> np.ndarray:
    """Grid scan plus local golden refinement of the profile extremum."""
    ts = np.asarray(ts, float)
    s_grid = np.linspace(0.0, _TWO_PI, _CIRCLE_GRID, endpoint=False)
    vals = sampler.profile(ts[:, None], s_grid[None, :])
    if not maximize:
        vals = -vals
    best = vals.max(axis=1)
    left = np.roll(vals, 1, axis=1)
    right = np.roll(vals, -1, axis=1)
    with np.errstate(invalid="ignore"):
        peaks = (vals >= left) & (vals > right)
    rows, cols = np.nonzero(peaks)
    if rows.size:
        step = _TWO_PI / _CIRCLE_GRID
        lo = s_grid[cols] - step
        hi = s_grid[cols] + step
        t_lane = ts[rows]

        def lane_profile(s: np.ndarray) -> np.ndarray:
            p = sampler.profile(t_lane, s)
            return p if maximize else -p

        refined = _golden_extremum(lane_profile, lo, hi, maximize=True)
        refined = np.where(np.isnan(refined), -np.inf, refined)
        np.maximum.at(best, rows, refined)
    return best if maximize else -best


def max_on_circles(v: FunctionLike, ts: Sequence[float], transform: str = "id") -> np.ndarray:
    """Circle suprema of ``transform(v)`` at each radius in ``ts``.

    Returns +inf exactly where an atom whose transformed spike diverges
    upward lies on the circle (minus-component atoms for "id"/"plus",
    plus-component atoms for "minus", both for "abs").
    """
    if transform not in TRANSFORMS:
        raise ValueError(f"unknown transform {transform!r}")
    u = canonicalize(as_delta(v))
    sampler = CircleSampler(u)
    ts = np.asarray(ts, float)
    if np.any(ts < 0):
        raise ValueError("radii must be nonnegative")

    need_sup = transform in ("id", "plus", "abs")
    need_inf = transform in ("minus", "abs")
    sup = _circle_extreme(sampler, ts, maximize=True) if need_sup else None
    inf = _circle_extreme(sampler, ts, maximize=False) if need_inf else None

    if transform == "id":
        out = sup
    elif transform == "plus":
        out = np.maximum(sup, 0.0)
    elif transform == "minus":
        out = np.maximum(-inf, 0.0)
    else:
        out = np.maximum(sup, -inf)

    up_moduli: list[np.ndarray] = []
    if transform in ("id", "plus", "abs") and not u.minus.charge.is_empty:
        up_moduli.append(u.minus.charge.moduli)
    if transform in ("minus", "abs") and not u.plus.charge.is_empty:
        up_moduli.append(u.plus.charge.moduli)
    if up_moduli:
        mask = np.isin(ts, np.concatenate(up_moduli))
        out = np.where(mask, np.inf, out)
    return out


def max_on_circle(v: FunctionLike, r: float, transform: str = "id") -> CharacteristicValue:
    """Supremum of ``transform(v)`` on the circle of radius ``r`` (center value at r=0)."""
    if r < 0 or not math.isfinite(r):
        raise ValueError("radius must be finite and nonnegative")
    if r == 0.0:
        u = canonicalize(as_delta(v))
        val = evaluate(u, 0.0)
        if transform == "plus":
            val = max(val, 0.0)
        elif transform == "minus":
            val = max(-val, 0.0)
        elif transform == "abs":
            val = abs(val)
        return CharacteristicValue(val, 0.0, "closed_form")
    val = float(max_on_circles(v, np.array([r]), transform)[0])
    return CharacteristicValue(val, 0.0, "grid_max")


# --- circle means --------------------------------------------------------

def _closed_mean(v: SubharmonicPotential, r: float) -> float:
    if v.charge.is_empty:
        return v.const
    return v.const + float(np.sum(v.charge.masses * np.log(np.maximum(r, v.charge.moduli))))


def _spike_angles(u: DeltaSubharmonicFn, r: float) -> list[float]:
    angles: list[float] = []
    for charge in (u.plus.charge, u.minus.charge):
        for c, _ in charge.atoms:
            scale = max(r, abs(c))
            if scale == 0.0:
                continue
            if abs(abs(c) - r) <= _SPIKE_REL * scale:
                angles.append(math.atan2(c.imag, c.real) % _TWO_PI)
    return angles


def _kink_angles(sampler: CircleSampler, r: float) -> list[float]:
    s_grid = np.linspace(0.0, _TWO_PI, _CIRCLE_GRID, endpoint=False)
    vals = sampler.profile(np.full(_CIRCLE_GRID, r), s_grid)
    nxt = np.roll(vals, -1)
    cross = (vals * nxt) < 0
    idx = np.nonzero(cross)[0]
    out = list(s_grid[np.nonzero(vals == 0.0)[0]])
    if idx.size == 0:
        return out
    lo = s_grid[idx]
    hi = lo + _TWO_PI / _CIRCLE_GRID
    flo = vals[idx]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fmid = sampler.profile(np.full(mid.shape, r), mid)
        take_left = flo * fmid <= 0
        hi = np.where(take_left, mid, hi)
        lo = np.where(take_left, lo, mid)
        flo = np.where(take_left, flo, fmid)
    out.extend((0.5 * (lo + hi)).tolist())
    return out


def _quad_mean(
    v: FunctionLike, r: float, transform: str, quad: QuadratureSpec = DEFAULT_QUAD
) -> tuple[float, float]:
    """(1/2pi) * integral of transform(v) over the circle, by quadrature."""
    if transform not in TRANSFORMS:
        raise ValueError(f"unknown transform {transform!r}")
    if r <= 0 or not math.isfinite(r):
        raise ValueError("radius must be finite and positive")
    u = canonicalize(as_delta(v))
    sampler = CircleSampler(u)
    hints = _spike_angles(u, r)
    if transform != "id":
        hints = hints + _kink_angles(sampler, r)

    if transform == "id":
        wrap = lambda x: x
    elif transform == "plus":
        wrap = lambda x: np.maximum(x, 0.0)
    elif transform == "minus":
        wrap = lambda x: np.maximum(-x, 0.0)
    else:
        wrap = np.abs

    def integrand(s: np.ndarray) -> np.ndarray:
        return wrap(sampler.profile(np.full(s.shape, r), s))

    val, err = integrate(integrand, 0.0, _TWO_PI, spec=quad, hints=hints)
    return val / _TWO_PI, err / _TWO_PI


def circle_mean(
    v: FunctionLike, r: float, method: str = "closed_form", quad: QuadratureSpec = DEFAULT_QUAD
) -> CharacteristicValue:
    """Mean of ``v`` over the circle of radius ``r > 0``."""
    if r <= 0 or not math.isfinite(r):
        raise ValueError("radius must be finite and positive")
    if method == "closed_form":
        u = as_delta(v)
        return CharacteristicValue(_closed_mean(u.plus, r) - _closed_mean(u.minus, r), 0.0, "closed_form")
    if method == "quadrature":
        val, err = _quad_mean(v, r, "id", quad)
        return CharacteristicValue(val, err, "quadrature")
    raise ValueError(f"unknown method {method!r}")


def circle_mean_nonlinear(
    v: FunctionLike, transform: str, r: float, quad: QuadratureSpec = DEFAULT_QUAD
) -> CharacteristicValue:
    """Mean of ``transform(v)`` (plus/minus/abs, or id for cross-checks)."""
    val, err = _quad_mean(v, r, transform, quad)
    return CharacteristicValue(val, err, "quadrature")


def circle_mean_diff(
    v: FunctionLike, r: float, R: float, method: str = "closed_form", quad: QuadratureSpec = DEFAULT_QUAD
) -> CharacteristicValue:
    """Mean at radius ``R`` minus mean at radius ``r``."""
    if not (0 < r <= R):
        raise ValueError("need 0 < r <= R")
    hi = circle_mean(v, R, method, quad)
    lo = circle_mean(v, r, method, quad)
    return CharacteristicValue(hi.value - lo.value, hi.error_estimate + lo.error_estimate, hi.method)


# --- counting functions --------------------------------------------------

def radial_count(mu: AtomicMeasure, r: float) -> float:
    """Total mass in the closed disc of radius ``r``."""
    if r < 0 or not math.isfinite(r):
        raise ValueError("radius must be finite and nonnegative")
    if mu.is_empty:
        return 0.0
    return float(np.sum(mu.masses[mu.moduli <= r]))


def counting_integral(mu: AtomicMeasure, r: float, R: float) -> float:
    """Integral of ``radial_count(t)/t`` over ``[r, R]``; +inf iff mass at 0 and r = 0."""
    if not (0 <= r <= R) or not math.isfinite(R):
        raise ValueError("need 0 <= r <= R, finite")
    if r == R:
        return 0.0
    total = 0.0
    for c, m in mu.atoms:
        rho = abs(c)
        if rho > R:
            continue
        denom = max(r, rho)
        if denom == 0.0:
            return math.inf
        total += m * math.log(R / denom)
    return total


# --- two-variable characteristic and one-variable Nevanlinna set ---------

def characteristic_T(
    u: FunctionLike, r: float, R: float, quad: QuadratureSpec = DEFAULT_QUAD
) -> CharacteristicValue:
    """Positive-part mean growth plus lower-charge counting over ``[r, R]``."""
    if not (0 < r <= R) or not math.isfinite(R):
        raise ValueError("need 0 < r <= R, finite")
    canon = canonicalize(as_delta(u))
    if r == R:
        return CharacteristicValue(0.0, 0.0, "closed_form")
    hi, err_hi = _quad_mean(canon, R, "plus", quad)
    lo, err_lo = _quad_mean(canon, r, "plus", quad)
    n = counting_integral(canon.minus.charge, r, R)
    return CharacteristicValue(hi - lo + n, err_hi + err_lo, "quadrature")


@dataclass(frozen=True)
class NevanlinnaCharacteristics:
    """Max modulus, proximity, pole counting and total characteristic at one radius."""

    M: CharacteristicValue
    m: CharacteristicValue
    N: CharacteristicValue
    T: CharacteristicValue


def nevanlinna(
    f: RationalFunctionSpec, r: float, quad: QuadratureSpec = DEFAULT_QUAD
) -> NevanlinnaCharacteristics:
    """The classical quantities for a rational function at radius ``r > 0``."""
    if r <= 0 or not math.isfinite(r):
        raise ValueError("radius must be finite and positive")
    u = ln_abs(f)
    mx = max_on_circle(u, r)
    big_m = CharacteristicValue(math.exp(mx.value) if mx.value != math.inf else math.inf, 0.0, mx.method)
    prox_val, prox_err = _quad_mean(u, r, "plus", quad)
    n0 = f.poles.mass_at(0j)
    n_val = n0 * math.log(r)
    for c, m in f.poles.atoms:
        rho = abs(c)
        if 0.0 < rho <= r:
            n_val += m * math.log(r / rho)
    prox = CharacteristicValue(prox_val, prox_err, "quadrature")
    count = CharacteristicValue(n_val, 0.0, "closed_form")
    total = CharacteristicValue(prox_val + n_val, prox_err, "quadrature")
    return NevanlinnaCharacteristics(M=big_m, m=prox, N=count, T=total)

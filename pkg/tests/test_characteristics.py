"""Circle means and maxima, counting integrals, and the two-radius characteristic."""

import math

import numpy as np
import pytest

from subpot import (
    AtomicMeasure,
    DeltaSubharmonicFn,
    RationalFunctionSpec,
    SubharmonicPotential,
    characteristic_T,
    circle_mean,
    circle_mean_diff,
    circle_mean_nonlinear,
    counting_integral,
    ln_abs,
    max_on_circle,
    nevanlinna,
    pjp_identity_check,
    radial_count,
)

# Plus-part circle mean of ln|z-1| on |z|=1, from a scipy.integrate.quad
# oracle of (1/2pi) int max(ln|e^{is}-1|, 0) ds.
PLUS_MEAN_UNIT = 0.3230659472195242


def _potential(pairs, const=0.0):
    return SubharmonicPotential(AtomicMeasure.from_pairs(pairs), const)


def _delta(plus_pairs, minus_pairs, plus_const=0.0, minus_const=0.0):
    return DeltaSubharmonicFn(
        plus=_potential(plus_pairs, plus_const),
        minus=_potential(minus_pairs, minus_const),
    )


def _random_potential(rng, max_atoms=6, rmax=4.0, avoid=()):
    # Atoms kept off the probe circles so grid maxima stay finite.
    while True:
        n = int(rng.integers(1, max_atoms + 1))
        moduli = rmax * rng.uniform(0.02, 1.0, size=n)
        if avoid and np.min(np.abs(moduli[:, None] - np.asarray(avoid)[None, :])) < 1e-2:
            continue
        angles = rng.uniform(0, 2 * math.pi, size=n)
        pairs = [
            (complex(m * math.cos(a), m * math.sin(a)), float(rng.uniform(0.1, 2.0)))
            for m, a in zip(moduli, angles)
        ]
        return _potential(pairs, float(rng.uniform(-1, 1)))


def test_max_on_circle_single_atom():
    assert max_on_circle(_potential([(2.0, 1.0)]), 1.0).value == pytest.approx(math.log(3.0), rel=1e-12)


def test_max_on_circle_reciprocal():
    U = _delta([], [(0.0, 1.0)])
    assert max_on_circle(U, 0.5).value == pytest.approx(math.log(2.0), rel=1e-12)


def test_max_on_circle_atom_at_center():
    assert max_on_circle(_potential([(0.0, 1.0)]), 0.0).value == -math.inf


def test_max_on_circle_minus_atom_on_circle():
    U = _delta([], [(1.0, 1.0)])
    assert max_on_circle(U, 1.0).value == math.inf


def test_circle_mean_harmonic_case():
    assert circle_mean(_potential([(2.0, 1.0)]), 1.0).value == pytest.approx(math.log(2.0))


def test_circle_mean_origin_atom():
    assert circle_mean(_potential([(0.0, 1.0)]), math.e).value == pytest.approx(1.0)


def test_circle_mean_atom_on_circle_both_routes():
    u = _potential([(1.0, 1.0)])
    closed = circle_mean(u, 1.0)
    assert closed.value == pytest.approx(0.0, abs=1e-14)
    assert closed.error_estimate == 0.0 and closed.method == "closed_form"
    quad = circle_mean(u, 1.0, method="quadrature")
    assert quad.value == pytest.approx(0.0, abs=1e-5)


def test_circle_mean_routes_agree_on_random_potentials():
    rng = np.random.default_rng(618)
    for _ in range(15):
        u = _random_potential(rng, avoid=(1.7,))
        a = circle_mean(u, 1.7)
        b = circle_mean(u, 1.7, method="quadrature")
        assert b.value == pytest.approx(a.value, rel=1e-8, abs=1e-8)


def test_plus_mean_reciprocal():
    U = _delta([], [(0.0, 1.0)])
    assert circle_mean_nonlinear(U, "plus", 0.5).value == pytest.approx(math.log(2.0), rel=1e-9)


def test_plus_mean_negative_component_vanishes():
    U = _delta([(0.0, 1.0)], [])
    assert circle_mean_nonlinear(U, "plus", 0.5).value == pytest.approx(0.0, abs=1e-12)


def test_abs_mean_decomposition():
    # C_|U| = C_U + 2 C_{U^-}; for U = ln|z-1| at r = 1 the plain mean is 0,
    # so the abs mean is twice the plus mean.
    U = _delta([(1.0, 1.0)], [])
    absmean = circle_mean_nonlinear(U, "abs", 1.0)
    plus = circle_mean_nonlinear(U, "plus", 1.0)
    minus = circle_mean_nonlinear(U, "minus", 1.0)
    assert plus.value == pytest.approx(PLUS_MEAN_UNIT, rel=1e-6)
    assert absmean.value == pytest.approx(2.0 * PLUS_MEAN_UNIT, rel=1e-6)
    assert absmean.value == pytest.approx(plus.value + minus.value, rel=1e-7)


def test_radial_count_examples():
    assert radial_count(AtomicMeasure.from_pairs([(0.0, 1.0)]), 0.0) == 1.0
    two = AtomicMeasure.from_pairs([(2.0, 1.0), (3.0, 2.0)])
    assert radial_count(two, 2.5) == 1.0
    assert radial_count(AtomicMeasure.empty(), 10.0) == 0.0


def test_counting_integral_examples():
    origin = AtomicMeasure.from_pairs([(0.0, 1.0)])
    assert counting_integral(origin, 1.0, math.e) == pytest.approx(1.0)
    off = AtomicMeasure.from_pairs([(2.0, 1.0)])
    assert counting_integral(off, 1.0, 4.0) == pytest.approx(math.log(2.0))
    assert counting_integral(origin, 0.0, 1.0) == math.inf
    assert counting_integral(off, 2.5, 2.5) == 0.0
    with pytest.raises(ValueError):
        counting_integral(off, 2.0, 1.0)


def test_circle_mean_diff_examples():
    u = _potential([(0.0, 1.0)])
    assert circle_mean_diff(u, 1.0, math.e).value == pytest.approx(1.0)
    assert circle_mean_diff(u, 2.0, 2.0).value == 0.0
    v = _potential([(2.0, 1.0)])
    assert circle_mean_diff(v, 1.0, 4.0).value == pytest.approx(math.log(2.0))


def test_characteristic_reciprocal():
    U = _delta([], [(0.0, 1.0)])
    assert characteristic_T(U, 0.1, math.e).value == pytest.approx(1.0, rel=1e-8)


def test_characteristic_zero_function():
    U = _delta([], [])
    assert characteristic_T(U, 0.5, 2.0).value == pytest.approx(0.0, abs=1e-12)


def test_characteristic_pure_potential():
    U = _delta([(0.0, 1.0)], [])
    assert characteristic_T(U, 1.0, math.e).value == pytest.approx(1.0, rel=1e-8)


def test_characteristic_nonnegative():
    rng = np.random.default_rng(31)
    for _ in range(10):
        U = DeltaSubharmonicFn(
            plus=_random_potential(rng, avoid=(0.8, 3.1)),
            minus=_random_potential(rng, avoid=(0.8, 3.1)),
        )
        t = characteristic_T(U, 0.8, 3.1)
        assert t.value >= -t.error_estimate - 1e-12


def test_characteristic_monotone_in_outer_radius():
    rng = np.random.default_rng(77)
    radii = (1.0, 1.6, 2.6)
    for _ in range(10):
        U = DeltaSubharmonicFn(
            plus=_random_potential(rng, avoid=radii + (0.5,)),
            minus=_random_potential(rng, avoid=radii + (0.5,)),
        )
        vals = [characteristic_T(U, 0.5, R) for R in radii]
        for lo, hi in zip(vals, vals[1:]):
            assert lo.value <= hi.value + lo.error_estimate + hi.error_estimate + 1e-10


def test_characteristic_antitone_in_inner_radius():
    rng = np.random.default_rng(78)
    for _ in range(10):
        U = DeltaSubharmonicFn(
            plus=_random_potential(rng, avoid=(0.4, 0.9, 3.5)),
            minus=_random_potential(rng, avoid=(0.4, 0.9, 3.5)),
        )
        a = characteristic_T(U, 0.4, 3.5)
        b = characteristic_T(U, 0.9, 3.5)
        assert b.value <= a.value + a.error_estimate + b.error_estimate + 1e-10


def test_characteristic_convex_in_log_radius():
    rng = np.random.default_rng(79)
    r1, r3 = 1.2, 4.8
    r2 = math.sqrt(r1 * r3)
    for _ in range(10):
        U = DeltaSubharmonicFn(
            plus=_random_potential(rng, avoid=(0.6, r1, r2, r3)),
            minus=_random_potential(rng, avoid=(0.6, r1, r2, r3)),
        )
        t1 = characteristic_T(U, 0.6, r1)
        t2 = characteristic_T(U, 0.6, r2)
        t3 = characteristic_T(U, 0.6, r3)
        eps = t1.error_estimate + t2.error_estimate + t3.error_estimate + 1e-10
        assert t2.value <= 0.5 * (t1.value + t3.value) + eps


def test_max_nondecreasing_for_potentials():
    rng = np.random.default_rng(80)
    radii = np.linspace(0.3, 4.5, 9)
    for _ in range(10):
        u = _random_potential(rng, avoid=tuple(radii))
        vals = [max_on_circle(u, float(r)).value for r in radii]
        for lo, hi in zip(vals, vals[1:]):
            assert lo <= hi + 1e-9


def test_mean_below_max():
    rng = np.random.default_rng(81)
    for _ in range(15):
        u = _random_potential(rng, avoid=(2.3,))
        assert circle_mean(u, 2.3).value <= max_on_circle(u, 2.3).value + 1e-10


def test_positive_part_of_max_is_max_of_positive_part():
    rng = np.random.default_rng(82)
    for _ in range(15):
        U = DeltaSubharmonicFn(
            plus=_random_potential(rng, avoid=(1.9,)),
            minus=_random_potential(rng, avoid=(1.9,)),
        )
        plain = max_on_circle(U, 1.9).value
        plus = max_on_circle(U, 1.9, transform="plus").value
        assert plus == pytest.approx(max(plain, 0.0), abs=1e-12)


def test_nevanlinna_reciprocal_outside_unit_disc():
    f = RationalFunctionSpec(poles=AtomicMeasure.from_pairs([(0.0, 1.0)]))
    nv = nevanlinna(f, 2.0)
    assert nv.M.value == pytest.approx(0.5, rel=1e-9)
    assert nv.m.value == pytest.approx(0.0, abs=1e-12)
    assert nv.N.value == pytest.approx(math.log(2.0))
    assert nv.T.value == pytest.approx(math.log(2.0), rel=1e-9)


def test_nevanlinna_reciprocal_inside_unit_disc():
    f = RationalFunctionSpec(poles=AtomicMeasure.from_pairs([(0.0, 1.0)]))
    nv = nevanlinna(f, 0.5)
    assert nv.M.value == pytest.approx(2.0, rel=1e-9)
    assert nv.m.value == pytest.approx(math.log(2.0), rel=1e-9)
    assert nv.N.value == pytest.approx(-math.log(2.0))
    assert nv.T.value == pytest.approx(0.0, abs=1e-9)


def test_nevanlinna_entire_monomial():
    f = RationalFunctionSpec(zeros=AtomicMeasure.from_pairs([(0.0, 1.0)]))
    nv = nevanlinna(f, 3.0)
    assert nv.N.value == 0.0
    assert nv.M.value == pytest.approx(3.0, rel=1e-9)
    assert nv.T.value == pytest.approx(math.log(3.0), rel=1e-9)
    assert nv.T.value == pytest.approx(nv.m.value, rel=1e-12)


def test_nevanlinna_consistent_with_two_radius_characteristic():
    # With every pole modulus above r0 the two characteristics agree exactly:
    # T(r, f) = T_U(r0, r) + (plus-mean at r0).
    rng = np.random.default_rng(83)
    for _ in range(8):
        poles = [(complex(rng.uniform(0.4, 1.5), rng.uniform(0.2, 1.0)), float(rng.integers(1, 3)))
                 for _ in range(int(rng.integers(1, 3)))]
        zeros = [(complex(rng.uniform(-2.0, -0.5), 0.0), float(rng.integers(1, 3)))]
        f = RationalFunctionSpec(
            zeros=AtomicMeasure.from_pairs(zeros),
            poles=AtomicMeasure.from_pairs(poles),
            scale=float(rng.uniform(0.5, 2.0)),
        )
        r0 = 0.5 * min(f.poles.moduli)
        r = 3.0 + float(rng.uniform(0.0, 1.0))
        U = ln_abs(f)
        lhs = nevanlinna(f, r).T.value
        rhs = characteristic_T(U, r0, r).value + circle_mean_nonlinear(U, "plus", r0).value
        assert lhs == pytest.approx(rhs, rel=1e-6, abs=1e-6)


def test_mean_difference_matches_counting_integral():
    rng = np.random.default_rng(84)
    for _ in range(30):
        u = _random_potential(rng, avoid=(0.7, 3.3))
        rep = pjp_identity_check(u, 0.7, 3.3)
        # rhs already encodes the 1e-8 absolute + 1e-8 relative budget.
        assert rep.holds()
        assert rep.lhs <= rep.rhs + rep.error_estimate + 1e-12

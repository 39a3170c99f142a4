import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.integrate import quad

from sphereflows.field import build_field, residues
from sphereflows.nondeg import (
    OmegaPathError,
    PeriodModule,
    adaptive_line_integral,
    check_nondegeneracy,
    integrate_omega,
    period_distance,
    subset_sums,
)


def quad_segment(fld, a, b):
    """scipy oracle for the integral of omega along a straight segment."""
    dens = lambda s: fld.omega_density(a + s * (b - a)) * (b - a)
    re = quad(lambda s: dens(s).real, 0, 1, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    im = quad(lambda s: dens(s).imag, 0, 1, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    return complex(re, im)


def test_gauss_kronrod_polynomial_exact():
    got = adaptive_line_integral(lambda z: z**5, 0, 1 + 1j)
    assert got == pytest.approx((1 + 1j) ** 6 / 6, abs=1e-14)


def test_quadratic_integral_closed_form(quadratic):
    # omega = dw / (w^2 - 1) has primitive log((w-1)/(w+1)) / 2
    prim = lambda w: 0.5 * cmath.log((w - 1) / (w + 1))
    for end in (1 - 1e-3, 0.5j, -0.3 + 0.4j):
        got = integrate_omega(quadratic, [0, end])
        assert got == pytest.approx(prim(end) - prim(0), abs=1e-11)


def test_integral_through_infinity(quadratic):
    # the imaginary axis closed through infinity bounds the right half plane,
    # traversed clockwise, so the loop picks up -2 pi i eta(+1) = -i pi
    got = integrate_omega(quadratic, [0, 1j, complex(math.inf), -1j, 0])
    assert got == pytest.approx(-1j * math.pi, abs=1e-10)


def test_integral_against_scipy(cubic):
    # both segments stay in the unit disk, where the chart W is used
    for a, b in ((0.5 + 0.5j, 0.9 - 0.3j), (-0.3j, 0.8 + 0.1j)):
        assert integrate_omega(cubic, [a, b]) == pytest.approx(quad_segment(cubic, a, b), abs=1e-10)


def test_integral_rejects_zero_on_path(quadratic):
    with pytest.raises(OmegaPathError):
        integrate_omega(quadratic, [0, 2])


def test_residue_theorem_loop(cubic):
    # small square around the zero at 1
    sq = [1 + 0.1 * c for c in (1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j, 1 + 1j)]
    eta = residues(cubic)[0]
    assert integrate_omega(cubic, sq) == pytest.approx(2j * math.pi * eta, abs=1e-11)


def test_subset_sums_bitmask():
    vals = [1, 2j, 4]
    sums = subset_sums(vals)
    for mask in range(8):
        assert sums[mask] == sum(v for k, v in enumerate(vals) if mask >> k & 1)


def test_period_distance_exact_lattice_point():
    pm = PeriodModule((2j * math.pi, 2j * math.pi * math.sqrt(2)), M=10)
    v = 3 * pm.generators[0] - 2 * pm.generators[1]
    pd = period_distance(v + 5.0, pm, mod_reals=True)
    assert pd.distance < 1e-12
    assert pd.combination == (3, -2)
    assert not pd.at_boundary


@given(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False), min_size=1, max_size=3), st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
@settings(max_examples=40)
def test_period_distance_brute_force(gens, value):
    pm = PeriodModule(tuple(gens), M=3)
    got = period_distance(value, pm, mod_reals=False).distance
    best = min(abs(value - sum(m * g for m, g in zip(ms, gens))) for ms in itertools.product(range(-3, 4), repeat=len(gens)))
    assert got <= best + 1e-9


def test_quadratic_is_nondegenerate(quadratic):
    rep = check_nondegeneracy(quadratic)
    assert rep.overall


def test_cyclotomic_fails_with_center_witnesses(cyclotomic4):
    rep = check_nondegeneracy(cyclotomic4)
    assert not rep.overall
    assert rep.cond_i.status == "fail"
    assert rep.cond_iii.status == "fail"
    subsets = rep.cond_iii.witness["subsets"]
    assert [1] in subsets and [3] in subsets


def test_cond_ii_collinear():
    # zero 0.5 lies on the segment line through the poles 0 and 1
    fld = build_field([0.5, 2j, -1 + 1j, 3 - 1j], [0, 1])
    assert check_nondegeneracy(fld).cond_ii.status == "fail"


def test_cond_iii_real_residue_cancellation():
    # zeros symmetric about the imaginary axis have purely imaginary residue sums
    fld = build_field([1j, -1j])
    rep = check_nondegeneracy(fld)
    assert rep.cond_iii.status == "fail"


def test_general_mode_fails_degree_relation(cubic):
    rep = check_nondegeneracy(cubic)
    assert rep.cond_i.status == "fail"
    assert rep.cond_i.witness == {"d": 2, "d_prime": 1}


@given(st.integers(0, 10_000))
@settings(max_examples=30)
def test_random_normalized_report_shape(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    z = rng.uniform(-1, 1, (2 * d - 2, 2))
    pts = z[:, 0] + 1j * z[:, 1]
    assume(all(abs(x - y) > 1e-2 for i, x in enumerate(pts) for y in pts[i + 1 :]))
    fld = build_field(pts[:d], pts[d:], np.exp(2j * np.pi * rng.random()))
    rep = check_nondegeneracy(fld)
    assert rep.cond_i.passed
    # report shape is stable
    js = rep.to_json()
    assert set(js) == {"cond_i", "cond_ii", "cond_iii", "cond_iv", "overall"}

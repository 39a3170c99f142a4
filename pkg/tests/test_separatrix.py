import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from conftest import TWO_PI, blowup_oracle, cubic_example
from sphereflows.field import FieldError, build_field, polynomial_field
from sphereflows.flow import IntegratorConfig
from sphereflows.poly import ComplexPoly, from_roots, roots_of_unity
from sphereflows.separatrix import (
    NonTransverseError,
    boundary_saddles,
    check_transverse,
    crossing_angles,
    trace_boundary_separatrices,
    trace_pole_separatrices,
)


def by_id(seps):
    return {s.id: s for s in seps}


def test_cubic_branch_order_and_terminals(cubic):
    seps = trace_pole_separatrices(cubic, "p0")
    assert [s.id for s in seps] == ["p0:Red:plus", "p0:Red:minus", "p0:Blue:plus", "p0:Blue:minus"]
    assert {s.terminal for s in seps if s.color == "Red"} == {"inf"}
    assert sorted(s.terminal for s in seps if s.color == "Blue") == ["e0", "e1"]
    assert not any(s.suspicions for s in seps)


def test_symmetric_cubic_blowup_closed_form():
    # q = 1: the Red separatrices run along the imaginary axis, where
    # y' = -(y^2 + 1)/y, so the time from iy to the pole is log(1 + y^2)/2
    fld = cubic_example(q=1.0)
    for s in trace_pole_separatrices(fld, "p0"):
        y = abs(s.blowup_reference.w)
        if s.color == "Red":
            assert abs(s.blowup_reference.w.real) < 1e-9
            assert s.blowup_time == pytest.approx(0.5 * math.log(1 + y * y), abs=1e-9)
        else:
            # real axis: x' = (1 - x^2)/x, time from 0 to x is -log(1 - x^2)/2
            assert s.blowup_time == pytest.approx(-0.5 * math.log(1 - y * y), abs=1e-9)
        assert abs(s.blowup_integral.imag) < 1e-9


@pytest.mark.parametrize("q, theta", [(2.0, 0.0), (0.5, 1.1), (1.5, 2.5)])
def test_blowup_time_against_solve_ivp(q, theta):
    fld = cubic_example(q, theta)
    for s in trace_pole_separatrices(fld, "p0"):
        assert s.blowup_time == pytest.approx(blowup_oracle(fld, s), abs=1e-6)
        assert abs(s.blowup_integral.imag) < 1e-6


def test_time_reversal_swaps_colors(cubic):
    fwd = trace_pole_separatrices(cubic, "p0")
    rev = trace_pole_separatrices(cubic.with_a(-cubic.a), "p0")
    red = sorted(s.terminal for s in fwd if s.color == "Red")
    blue_rev = sorted(s.terminal for s in rev if s.color == "Blue")
    assert red == blue_rev


def test_rejects_non_saddle(quadratic):
    with pytest.raises(FieldError):
        trace_pole_separatrices(quadratic, "e0")


def test_crossing_angle_difference_large_rho():
    for q in (0.5, 1.0, 2.0):
        fld = cubic_example(q)
        ang = dict(crossing_angles(fld, 1000.0, trace_pole_separatrices(fld, "p0", blowup=False)))
        diff = (ang["p0:Red:plus"] - ang["p0:Red:minus"]) % TWO_PI
        assert diff == pytest.approx(TWO_PI / (1 + q), abs=1e-2)


def test_crossing_angles_rotate_with_theta():
    base = dict(crossing_angles(cubic_example(2.0), 1000.0, trace_pole_separatrices(cubic_example(2.0), "p0", blowup=False)))
    rot = cubic_example(2.0, 0.7)
    turned = dict(crossing_angles(rot, 1000.0, trace_pole_separatrices(rot, "p0", blowup=False)))
    for k in ("p0:Red:plus", "p0:Red:minus"):
        shift = (turned[k] - base[k] + math.pi) % TWO_PI - math.pi
        assert shift == pytest.approx(0.7, abs=1e-3)


def test_transversality_check(cubic):
    assert check_transverse(cubic, 1000.0) == -1  # flow enters from the source at infinity
    with pytest.raises(NonTransverseError):
        check_transverse(cubic, 1.0)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_boundary_saddle_count_polynomial(d):
    fld = polynomial_field(from_roots(roots_of_unity(d)))
    bset = boundary_saddles(fld)
    assert len(bset.angles) == 2 * (d - 1)
    # colors alternate around the circle
    assert all(bset.kinds[k] != bset.kinds[k + 1] for k in range(len(bset.kinds) - 1))


@pytest.mark.parametrize("dp", [1, 2, 3, 4])
def test_boundary_equilibria_antipolynomial(dp):
    fld = build_field([], [cmath.exp(2j * math.pi * k / dp) * 0.5 for k in range(dp)])
    bset = boundary_saddles(fld)
    assert len(bset.angles) == 2 * (dp + 1)
    assert bset.kinds.count("Sink") == bset.kinds.count("Source") == dp + 1


def test_boundary_saddles_need_structured_mode(cubic):
    with pytest.raises(FieldError):
        boundary_saddles(cubic)


def test_cubic_polynomial_boundary_terminals():
    fld = polynomial_field(from_roots(roots_of_unity(3)))
    seps = trace_boundary_separatrices(fld)
    assert len(seps) == 4
    assert all(s.terminal in ("e0", "e1", "e2") for s in seps)


def test_degenerate_polynomial_boundary():
    # w^4 (1 - w): an isolated degenerate zero at 0 plus a simple zero at 1
    fld = polynomial_field(ComplexPoly([0, 0, 0, 0, 1, -1]))
    seps = trace_boundary_separatrices(fld)
    assert len(seps) == 8
    b0 = seps[0]
    assert b0.color == "Blue" and abs(b0.trajectory.end.w - 1) < 1e-3
    near = dict(crossing_angles(fld, 0.01, seps, check=False))
    red_at_zero = [s.id for s in seps if s.color == "Red" and s.id in near]
    assert red_at_zero


@given(st.floats(0.3, 3.0), st.floats(0, TWO_PI))
@settings(max_examples=8)
def test_cubic_blowup_integral_is_real(q, theta):
    fld = cubic_example(q, theta)
    for s in trace_pole_separatrices(fld, "p0"):
        assert s.blowup_time > 0
        assert abs(s.blowup_integral.imag) < 1e-6

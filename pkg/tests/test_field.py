import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from sphereflows.field import (
    FieldError,
    SpherePoint,
    apply_mobius,
    build_field,
    chordal_distance,
    classify,
    field_from_json,
    find_record,
    hamiltonian_data,
    infer_mode,
    kind_of,
    polynomial_field,
    residues,
    saddle_frame,
    to_unit_sphere,
)
from sphereflows.poly import ComplexPoly, evaluate

coord = st.floats(-1.5, 1.5, allow_nan=False)
points = st.builds(complex, coord, coord)


def well_separated(pts, gap=0.05):
    return all(abs(x - y) > gap for i, x in enumerate(pts) for y in pts[i + 1 :])


@st.composite
def normalized_fields(draw, dmax=5):
    d = draw(st.integers(2, dmax))
    pts = draw(st.lists(points, min_size=2 * d - 2, max_size=2 * d - 2))
    assume(well_separated(pts))
    ang = draw(st.floats(0, 2 * math.pi))
    return build_field(pts[:d], pts[d:], cmath.exp(1j * ang))


# --- points and charts -------------------------------------------------------


@given(points)
def test_sphere_point_round_trip(w):
    assume(w != 0)
    p = SpherePoint.from_w(w)
    assert abs(p.value) <= 1.0
    assert abs(p.w - w) <= 1e-14 * max(1, abs(w))
    assert np.isclose(np.linalg.norm(to_unit_sphere(p)), 1.0)


def test_infinity_point():
    p = SpherePoint.from_w(complex(math.inf, 0))
    assert p.is_infinity()
    assert np.allclose(to_unit_sphere(p), [0, 0, 1])


def test_chordal_distance_antipodes():
    assert chordal_distance(SpherePoint.from_w(0), SpherePoint.from_w(complex(math.inf))) == pytest.approx(1.0)
    assert chordal_distance(SpherePoint.from_w(1), SpherePoint.from_w(-1)) == pytest.approx(1.0)
    assert chordal_distance(SpherePoint.from_w(1), SpherePoint.from_w(1j)) == pytest.approx(math.sqrt(0.5))


# --- construction -------------------------------------------------------------


@pytest.mark.parametrize("d, dp, mode", [(2, 0, "normalized"), (3, 1, "normalized"), (4, 0, "polynomial"), (0, 3, "antipolynomial"), (2, 1, "general")])
def test_infer_mode(d, dp, mode):
    assert infer_mode(d, dp) == mode


def test_build_field_rejects_duplicates():
    with pytest.raises(FieldError):
        build_field([1, 1])
    with pytest.raises(FieldError):
        build_field([1, -1], [1])


def test_polynomial_field_keeps_multiplicity():
    fld = polynomial_field(ComplexPoly([0, 0, 0, 0, 1, -1]))
    assert fld.d == 5 and fld.is_polynomial
    assert sum(1 for e in fld.zeros if abs(e) < 1e-9) == 4


def test_field_json_round_trip(cubic):
    again = field_from_json(cubic.to_json())
    for w in (0.3 + 0.2j, -1.7j, 2.5):
        assert again.f(w) == pytest.approx(cubic.f(w))


def test_product_form_against_coefficients(cubic):
    for w in (0.3 + 0.2j, -1.7j, 2.5):
        assert cubic.f(w) == pytest.approx(evaluate(cubic.P, w) / evaluate(cubic.Q, w))


@given(normalized_fields(), points)
def test_regularized_field_is_positive_multiple(fld, w):
    assume(min(abs(w - s) for s in fld.zeros + fld.poles) > 1e-2 and abs(w) > 1e-2)
    for chart, v in (("W", w), ("Z", 1 / w)):
        raw, reg = fld.vector(chart, v, False), fld.vector(chart, v, True)
        ratio = reg / raw
        assert ratio.real > 0
        assert abs(ratio.imag) <= 1e-9 * abs(ratio)


@given(normalized_fields(), points)
def test_chart_transition(fld, w):
    # z = 1/w  gives  dz/dt = -z^2 dw/dt
    assume(abs(w) > 0.2 and min(abs(w - s) for s in fld.zeros + fld.poles) > 1e-2)
    z = 1 / w
    assert fld.f_z(z) == pytest.approx(-(z**2) * fld.f(w), rel=1e-9, abs=1e-12)


# --- classification -----------------------------------------------------------


@pytest.mark.parametrize(
    "fp, kind",
    [(2, "Source"), (-0.5, "Sink"), (3j, "Center"), (1 + 1j, "Source"), (-1e-3 + 5j, "Sink"), (1e-12 + 1j, "Center")],
)
def test_kind_of(fp, kind):
    assert kind_of(fp) == kind


def test_quadratic_classification(quadratic):
    recs = {r.id: r for r in classify(quadratic)}
    assert recs["e0"].kind == "Source" and recs["e0"].location.w == pytest.approx(1)
    assert recs["e1"].kind == "Sink" and recs["e1"].location.w == pytest.approx(-1)
    assert recs["e0"].residue == pytest.approx(0.5)
    assert "inf" not in recs


def test_cyclotomic_centers(cyclotomic4):
    recs = classify(cyclotomic4)
    centers = sorted(r.location.w.imag for r in recs if r.kind == "Center")
    assert centers == pytest.approx([-1, 1])
    assert find_record(recs, "inf").kind == "DegeneratePole"


def test_cubic_classification(cubic):
    kinds = {r.id: r.kind for r in classify(cubic)}
    assert kinds == {"e0": "Sink", "e1": "Sink", "p0": "PoleSaddle", "inf": "Source"}


@given(normalized_fields())
@settings(max_examples=50)
def test_residues_match_numeric_derivative(fld):
    h = 1e-6
    for e, eta in zip(fld.zeros, residues(fld)):
        fd = (fld.f(e + h) - fld.f(e - h)) / (2 * h)
        assert abs(1 / fd - eta) <= 1e-5 * max(1, abs(eta))


@given(normalized_fields())
@settings(max_examples=50)
def test_residue_sum_vanishes(fld):
    etas = residues(fld)
    assert abs(sum(etas)) <= 1e-9 * max(1, sum(abs(x) for x in etas))


@given(normalized_fields())
@settings(max_examples=40)
def test_morse_count(fld):
    recs = classify(fld)
    assume(all(r.kind not in ("Center", "DegenerateZero", "DegeneratePole") for r in recs))
    n_plus = sum(r.kind == "Source" for r in recs)
    n_minus = sum(r.kind == "Sink" for r in recs)
    assert n_plus + n_minus == fld.dp + 2
    assert sum(r.kind == "PoleSaddle" for r in recs) == fld.dp


def test_saddle_frame_directions(cubic):
    fr = saddle_frame(cubic, "p0")
    # stable and unstable lines are orthogonal unit directions
    assert abs(fr.stable) == pytest.approx(1) and abs(fr.unstable) == pytest.approx(1)
    assert abs((fr.stable * fr.unstable.conjugate()).real) < 1e-12
    assert fr.eigenvalue == pytest.approx(2.0)


# --- Moebius equivalence ----------------------------------------------------


@given(normalized_fields(4), points)
@settings(max_examples=40)
def test_mobius_pushforward_identity(fld, w):
    m = np.array([[1, 0.3], [0.2j, 1]])
    g = apply_mobius(fld, m)
    den = m[1, 0] * w + m[1, 1]
    assume(abs(den) > 0.1 and min(abs(w - s) for s in fld.zeros + fld.poles) > 0.05)
    z = (m[0, 0] * w + m[0, 1]) / den
    deriv = np.linalg.det(m) / den**2
    assert g.f(z) == pytest.approx(deriv * fld.f(w), rel=1e-7, abs=1e-9)


def test_inversion_preserves_kinds(cubic):
    g = apply_mobius(cubic, [[0, 1], [1, 0]])
    kinds = lambda f: sorted(r.kind for r in classify(f))
    assert kinds(g) == kinds(cubic)


# --- Hamiltonian --------------------------------------------------------------


def test_hamiltonian_needs_antipolynomial(quadratic):
    with pytest.raises(FieldError):
        hamiltonian_data(quadratic)


def test_hamiltonian_derivative_is_proportional_to_q():
    fld = build_field([], [0, 1, 1j])
    ham = hamiltonian_data(fld)
    for w in (0.2 + 0.1j, -0.7j, 1.3):
        d1 = evaluate(ham.F, w, 1)
        assert d1 == pytest.approx(-np.conj(fld.a) * evaluate(fld.Q, w))
    assert ham.distinct
    assert sorted(ham.saddle_values) == pytest.approx([-1 / 6, 0, 1 / 6])


def test_hamiltonian_detects_equal_levels():
    # Q = w(w-1)(w+1): F is even, so the saddles at +1 and -1 share one level
    ham = hamiltonian_data(build_field([], [1, -1, 0]))
    assert not ham.distinct

import pytest

from conftest import cubic_example
from sphereflows.combinat import NcTree, enumerate_nc_trees, enumerate_planar_trees
from sphereflows.field import build_field, hamiltonian_data
from sphereflows.portrait import canonical_code, from_rotations
from sphereflows.realize import (
    RealizationError,
    analyze_rational,
    antipolynomial_trees,
    coeff_range,
    q_polynomial,
    realize_antipolynomial,
    realize_polynomial,
    realize_rational,
    verify_realization,
)


@pytest.fixture(scope="module")
def trees4():
    return list(enumerate_planar_trees(4).values())


def test_polynomial_base_case():
    (t,) = enumerate_planar_trees(2).values()
    fld, plan = realize_polynomial(t)
    assert fld.d == 2 and fld.is_polynomial
    assert verify_realization(fld, t, "polynomial").passed


@pytest.mark.parametrize("d", [3, 4])
def test_polynomial_round_trip(d):
    for t in enumerate_planar_trees(d).values():
        fld, plan = realize_polynomial(t)
        assert fld.d == t.n_vertices
        assert verify_realization(fld, t, "polynomial").passed
        for step in plan.steps:
            if "delta" in step and "eps" in step:
                assert step["delta"] == pytest.approx(step["eps"] * step["rho"])


def test_polynomial_negative_control(trees4):
    path, star = trees4
    fld, _ = realize_polynomial(path)
    assert not verify_realization(fld, star, "polynomial").passed


def test_polynomial_plan_is_deterministic(trees4):
    a = realize_polynomial(trees4[0])[1].to_json()
    b = realize_polynomial(trees4[0])[1].to_json()
    assert a == b


@pytest.mark.parametrize("factor", [0.5, 0.25])
def test_polynomial_scale_monotonicity(trees4, factor):
    # shrinking the inner cluster of the last attachment keeps the reduced graph
    for t in trees4:
        fld, _ = realize_polynomial(t)
        *inner, leaf = fld.zeros
        smaller = build_field([factor * z for z in inner] + [leaf], [], fld.a)
        assert verify_realization(smaller, t, "polynomial").passed


def test_cubic_example_matches_loop_target():
    fld = cubic_example()
    loop = from_rotations([["a", "a"]])
    assert verify_realization(fld, (loop, loop.dual()), "rational").passed
    assert not verify_realization(fld, (loop.dual(), loop), "rational").passed


@pytest.mark.parametrize("rot", [[[]], [["a", "a"]], [["a"], ["a"]]], ids=["point", "loop", "edge"])
def test_rational_round_trip(rot):
    cp = from_rotations(rot)
    fld, plan = realize_rational(cp)
    assert fld.is_normalized
    assert plan.steps[-1] == {"step": "final_check", "passed": True}
    _, got_p, got_m, conn = analyze_rational(fld)
    assert got_p.n_edges == cp.n_edges
    assert conn.validate() == []


def test_rational_time_reversal_coherence():
    loop = from_rotations([["a", "a"]])
    edge = from_rotations([["a"], ["a"]])
    f_loop, _ = realize_rational(loop)
    f_edge, _ = realize_rational(edge)
    _, p1, m1, _ = analyze_rational(f_loop.with_a(-f_loop.a))
    _, p2, m2, _ = analyze_rational(f_edge)
    assert canonical_code(p1, time="allow_reversal").code == canonical_code(p2, time="allow_reversal").code


def test_rational_rejects_non_dual_pair():
    loop = from_rotations([["a", "a"]])
    with pytest.raises(ValueError):
        realize_rational(loop, from_rotations([["a", "a"]]))


def test_antipolynomial_base_case():
    fld, plan = realize_antipolynomial(NcTree(2, ((0, 1),)))
    assert fld.is_antipolynomial and fld.dp == 1
    assert len(q_polynomial(fld).coeffs) == 2


@pytest.mark.parametrize("n", [3, 4])
def test_antipolynomial_round_trip(n):
    for t in enumerate_nc_trees(n, "preserve").values():
        fld, _ = realize_antipolynomial(t)
        v = verify_realization(fld, t, "antipolynomial")
        assert v.passed, v.diagnostics
        assert hamiltonian_data(fld).distinct
        red, blue = antipolynomial_trees(fld)
        assert red.n == blue.n == n


def test_antipolynomial_negative_control():
    trees = list(enumerate_nc_trees(4, "preserve").values())
    fld, _ = realize_antipolynomial(trees[0])
    assert not verify_realization(fld, trees[1], "antipolynomial").passed


def test_antipolynomial_rejects_invalid():
    with pytest.raises(ValueError):
        realize_antipolynomial(NcTree(4, ((0, 2), (1, 3), (0, 1))))


def test_coeff_range():
    assert coeff_range(build_field([1, -1])) == pytest.approx(1.0)
    assert coeff_range(build_field([10, -10])) == pytest.approx(100.0)


def test_verify_unknown_mode(quadratic):
    with pytest.raises(ValueError):
        verify_realization(quadratic, None, "bogus")


def test_realization_error_carries_plan():
    err = RealizationError("boom", None)
    assert "boom" in str(err)

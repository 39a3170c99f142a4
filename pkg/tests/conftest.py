import cmath
import math

import pytest
from hypothesis import HealthCheck, settings

from sphereflows.field import build_field

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])


@pytest.fixture
def quadratic():
    return build_field([1, -1])


@pytest.fixture
def cyclotomic4():
    return build_field([1, 1j, -1, -1j])


def cubic_example(q: float = 2.0, theta: float = 0.0, a: complex = -1.0):
    e1 = cmath.exp(1j * theta)
    return build_field([e1, -q * e1], [0j], a)


@pytest.fixture
def cubic():
    return cubic_example()


TWO_PI = 2 * math.pi


def blowup_oracle(fld, sep, r_stop: float = 1e-4) -> float:
    """Blow-up (Red) or blow-down (Blue) time of ``sep`` from its reference sample.

    Independent of the package integrator: scipy follows the unregularized
    flow from the reference point until ``|w - p| = r_stop``; the rest of the
    way is the local expansion ``int (Q/P) dw ~ (Q'(p)/P(p)) (w - p)^2 / 2``.
    """
    from scipy.integrate import solve_ivp

    from sphereflows.poly import evaluate

    p = fld.poles[int(sep.owner[1:])]
    sgn = 1.0 if sep.color == "Red" else -1.0
    w0 = sep.blowup_reference.w

    def rhs(_, y):
        v = sgn * fld.f(complex(y[0], y[1]))
        return [v.real, v.imag]

    def hit(_, y):
        return abs(complex(y[0], y[1]) - p) - r_stop

    hit.terminal = True
    sol = solve_ivp(rhs, (0, 1e3), [w0.real, w0.imag], method="DOP853", rtol=1e-12, atol=1e-15, events=hit)
    if not sol.t_events[0].size:
        raise RuntimeError("oracle orbit did not reach the pole")
    w_stop = complex(*sol.y_events[0][0])
    # remaining time w_stop -> p (Red) or p -> w_stop (Blue)
    rest = -sgn * evaluate(fld.Q, p, 1) / evaluate(fld.P, p) * (w_stop - p) ** 2 / 2
    return float(sol.t_events[0][0] + rest.real)

"""Integration of rational flows on the sphere.

Real time uses the regularized field, whose equilibria include the poles
(as saddles).  Complex-ray time ``w' = exp(i theta) f(w)`` uses the
holomorphic field itself and stops near poles.  Both run an adaptive
Dormand-Prince 5(4) pair on the complex state and switch between the charts
``w`` and ``z = 1/w`` when ``|value|`` leaves the hysteresis band.

Along every accepted step the integral of ``omega = dw/f`` over the chord is
accumulated by Gauss-Legendre quadrature; its real part is the elapsed
original time.
"""

from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass, field as dc_field, replace
from typing import Sequence

import numpy as np

from .field import (
    HYSTERESIS,
    Chart,
    EquilibriumRecord,
    RationalField,
    SpherePoint,
    classify,
    residues,
    to_unit_sphere,
)


class FlowError(RuntimeError):
    """Integration could not proceed (bad start, step underflow)."""


class ExistenceDomainError(FlowError):
    """The complex-time flow left its local existence domain (pole approach)."""


# Dormand-Prince 5(4)
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)

_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))

_GL_X, _GL_W = np.polynomial.legendre.leggauss(5)


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and event thresholds.

    ``conv_radius``, ``degenerate_radius`` and ``saddle_radius`` are relative
    to the local scale of each equilibrium (chordal distance to its nearest
    neighbour).
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_steps: int = 50000
    conv_radius: float = 1e-6
    degenerate_radius: float = 1e-3
    saddle_radius: float = 1e-6
    pole_clearance: float = 1e-6
    contraction_steps: int = 10
    detect_periodic: bool = False
    periodic_closure: float = 1e-6
    chart_switch: tuple[float, float] = HYSTERESIS


# ----- verdicts


@dataclass(frozen=True)
class ConvergedTo:
    equilibrium: str
    tag: str = "ConvergedTo"


@dataclass(frozen=True)
class ReachedSaddle:
    pole: str
    tag: str = "ReachedSaddle"


@dataclass(frozen=True)
class Periodic:
    period: float
    closure: float
    tag: str = "Periodic"


@dataclass(frozen=True)
class BudgetExhausted:
    reason: str
    tag: str = "BudgetExhausted"


Verdict = ConvergedTo | ReachedSaddle | Periodic | BudgetExhausted


@dataclass(frozen=True)
class Sample:
    t: float
    point: SpherePoint
    omega: complex  # accumulated integral of omega up to this sample
    h: float  # step size that produced the next sample (0 for the last)


@dataclass
class Trajectory:
    """Sampled orbit with its termination verdict.

    ``t`` is the rescaled (integration) time; ``original_time`` is the real
    part of the accumulated ``omega`` integral, rotated by ``exp(-i theta)``
    for complex-ray time.
    """

    samples: list[Sample]
    theta: float
    regularized: bool
    sign: float
    verdict: Verdict
    omega_integral: complex
    min_pole_distance: dict = dc_field(default_factory=dict)

    @property
    def time_direction(self) -> complex:
        return cmath.exp(1j * self.theta) * self.sign

    @property
    def original_time(self) -> float | None:
        val = (self.omega_integral * cmath.exp(-1j * self.theta)).real
        return val if math.isfinite(val) else None

    @property
    def end(self) -> SpherePoint:
        return self.samples[-1].point

    def points_w(self) -> list[complex]:
        return [s.point.w for s in self.samples]

    def to_json(self) -> dict:
        v = self.verdict
        verdict = {"tag": v.tag}
        verdict.update({k: getattr(v, k) for k in v.__dataclass_fields__ if k != "tag"})
        return {
            "samples": [[s.t, [s.point.value.real, s.point.value.imag], s.point.chart] for s in self.samples],
            "time_direction": [self.time_direction.real, self.time_direction.imag],
            "verdict": verdict,
            "original_time": self.original_time,
        }


# ----- equilibrium bookkeeping


@dataclass(frozen=True)
class Landmark:
    id: str
    kind: str
    point: SpherePoint
    xyz: np.ndarray
    scale: float


def landmarks(fld: RationalField) -> list[Landmark]:
    """Classified special points with their local chordal scale."""
    if "landmarks" in fld._cache:
        return fld._cache["landmarks"]
    recs = classify(fld)
    xyz = [to_unit_sphere(r.location) for r in recs]
    out = []
    for i, r in enumerate(recs):
        others = [np.linalg.norm(xyz[i] - xyz[j]) / 2 for j in range(len(recs)) if j != i]
        out.append(Landmark(r.id, r.kind, r.location, xyz[i], float(min(others)) if others else 1.0))
    fld._cache["landmarks"] = out
    return out


def records(fld: RationalField) -> list[EquilibriumRecord]:
    if "records" not in fld._cache:
        fld._cache["records"] = classify(fld)
    return fld._cache["records"]


# ----- stepping


def _rhs(fld: RationalField, chart: Chart, y: complex, regularized: bool, factor: complex) -> complex:
    return factor * fld.vector(chart, y, regularized)


def dopri_step(fld: RationalField, chart: Chart, y: complex, h: float, regularized: bool, factor: complex):
    """One Dormand-Prince step; returns (y5, error estimate)."""
    f = fld.vector
    a = _A
    k1 = factor * f(chart, y, regularized)
    k2 = factor * f(chart, y + h * a[1][0] * k1, regularized)
    k3 = factor * f(chart, y + h * (a[2][0] * k1 + a[2][1] * k2), regularized)
    k4 = factor * f(chart, y + h * (a[3][0] * k1 + a[3][1] * k2 + a[3][2] * k3), regularized)
    k5 = factor * f(chart, y + h * (a[4][0] * k1 + a[4][1] * k2 + a[4][2] * k3 + a[4][3] * k4), regularized)
    k6 = factor * f(
        chart, y + h * (a[5][0] * k1 + a[5][1] * k2 + a[5][2] * k3 + a[5][3] * k4 + a[5][4] * k5), regularized
    )
    b = _B5
    y5 = y + h * (b[0] * k1 + b[2] * k3 + b[3] * k4 + b[4] * k5 + b[5] * k6)
    k7 = factor * f(chart, y5, regularized)
    e = _E
    err = abs(h * (e[0] * k1 + e[2] * k3 + e[3] * k4 + e[4] * k5 + e[5] * k6 + e[6] * k7))
    return y5, err


def chord_omega(fld: RationalField, chart: Chart, y0: complex, y1: complex) -> complex:
    """Gauss-Legendre integral of ``omega`` over the straight chord ``y0 -> y1``."""
    mid = 0.5 * (y0 + y1)
    half = 0.5 * (y1 - y0)
    total = 0j
    for x, wt in zip(_GL_X, _GL_W):
        total += wt * fld.omega(chart, mid + half * x)
    return total * half


def _other(chart: Chart) -> Chart:
    return "Z" if chart == "W" else "W"


def _switch(chart: Chart, y: complex, band: tuple[float, float]) -> tuple[Chart, complex]:
    if abs(y) > band[1]:
        return _other(chart), 1 / y
    return chart, y


def integrate(
    fld: RationalField,
    start: SpherePoint | complex,
    theta_t: float = 0.0,
    t_max: float = math.inf,
    cfg: IntegratorConfig | None = None,
    regularized: bool | None = None,
    exact_end: bool = False,
    ignore: Sequence[str] = (),
) -> Trajectory:
    """Integrate from ``start`` until an event or ``|t| = |t_max|``.

    Parameters
    ----------
    fld : RationalField
    start : SpherePoint or complex
        Initial point (a complex number is read in chart ``W``).
    theta_t : float
        Ray angle of complex time.  ``0`` means real time.
    t_max : float
        Time budget; a negative value integrates backward.
    cfg : IntegratorConfig
    regularized : bool, optional
        Defaults to ``theta_t == 0``.
    exact_end : bool
        Clip the final step so the trajectory ends exactly at ``|t_max|``.
    ignore : sequence of str
        Equilibrium ids whose capture is suppressed until the orbit has
        moved ten capture radii away (used for seeds next to a saddle).

    Returns
    -------
    Trajectory
    """
    cfg = cfg or IntegratorConfig()
    if not isinstance(start, SpherePoint):
        start = SpherePoint.from_w(start)
    start = start.normalized()
    if regularized is None:
        regularized = theta_t == 0.0
    sign = -1.0 if t_max < 0 else 1.0
    t_end = abs(t_max)
    factor = sign * cmath.exp(1j * theta_t)
    marks = landmarks(fld)
    mark_xyz = np.array([m.xyz for m in marks]) if marks else np.zeros((0, 3))
    radii = []
    for m in marks:
        if m.kind in ("DegenerateZero",):
            radii.append(cfg.degenerate_radius * m.scale)
        elif m.kind in ("PoleSaddle", "DegeneratePole"):
            radii.append((cfg.saddle_radius if regularized else cfg.pole_clearance) * m.scale)
        else:
            radii.append(cfg.conv_radius * m.scale)
    radii = np.array(radii)
    is_pole = np.array([m.kind in ("PoleSaddle", "DegeneratePole") for m in marks], bool)

    def dists(p: SpherePoint) -> np.ndarray:
        if not len(marks):
            return np.zeros(0)
        return np.linalg.norm(mark_xyz - to_unit_sphere(p), axis=1) / 2

    d0 = dists(start)
    armed = np.array([m.id not in ignore for m in marks], bool)
    if len(marks) and np.any(armed & (d0 < np.minimum(radii, cfg.conv_radius * np.array([m.scale for m in marks])))):
        raise FlowError("start point is an equilibrium within conv_radius")

    chart, y = start.chart, complex(start.value)
    v0 = _rhs(fld, chart, y, regularized, factor)
    if v0 == 0:
        raise FlowError("start point is an equilibrium")
    near = float(np.min(d0)) if len(d0) else 1.0
    h = float(0.05 * max(near, 1e-12) / abs(v0))
    t = 0.0
    omega_acc = 0j
    samples = [Sample(0.0, SpherePoint(chart, y), 0j, 0.0)]
    history: deque = deque(maxlen=cfg.contraction_steps + 1)
    history.append(d0)
    min_pole: dict[str, float] = {}

    # periodic-return bookkeeping
    seed_chart, seed_y, seed_v = chart, y, v0
    max_excursion = 0.0
    prev_sigma = 0.0

    verdict: Verdict | None = None
    steps = 0
    while verdict is None:
        if steps >= cfg.max_steps:
            verdict = BudgetExhausted("max_steps")
            break
        if t >= t_end:
            verdict = BudgetExhausted("t_max")
            break
        last = False
        if exact_end and t + h >= t_end:
            h = t_end - t
            last = True
        y_new, err = dopri_step(fld, chart, y, h, regularized, factor)
        scale = cfg.abs_tol + cfg.rel_tol * max(abs(y), abs(y_new))
        ratio = err / scale if scale > 0 else math.inf
        if not math.isfinite(ratio) or not (ratio <= 1.0):
            if not math.isfinite(abs(y_new)):
                h *= 0.1
            else:
                h *= max(0.1, 0.9 * ratio ** (-0.2)) if ratio > 0 else 0.5
            if h < 1e-15 * max(1.0, t):
                raise FlowError(f"step-size underflow at {SpherePoint(chart, y).w}")
            continue
        steps += 1
        omega_acc += chord_omega(fld, chart, y, y_new)
        samples[-1] = replace(samples[-1], h=h)
        t_prev = t
        t += h
        y_prev, chart_prev = y, chart
        chart, y = _switch(chart, y_new, cfg.chart_switch)
        point = SpherePoint(chart, y)
        samples.append(Sample(t, point, omega_acc, 0.0))
        d = dists(point)
        history.append(d)
        for i in np.nonzero(is_pole)[0]:
            key = marks[i].id
            min_pole[key] = min(min_pole.get(key, math.inf), float(d[i]))
        armed |= d > 10 * radii
        inside = np.nonzero((d < radii) & armed)[0]
        for i in inside:
            m = marks[i]
            if is_pole[i]:
                verdict = ReachedSaddle(m.id)
                break
            hist = [hh[i] for hh in history]
            if len(hist) >= cfg.contraction_steps + 1 and all(b <= a for a, b in zip(hist, hist[1:])):
                verdict = ConvergedTo(m.id)
                break
        if verdict is not None:
            break
        if cfg.detect_periodic:
            yy = point.in_chart(seed_chart)
            if cmath.isfinite(yy):
                off = yy - seed_y
                max_excursion = max(max_excursion, abs(off))
                sigma = (seed_v.conjugate() * off).real / abs(seed_v)
                if prev_sigma < 0 <= sigma and abs(off) < 0.5 * max_excursion:
                    hit = _refine_return(fld, chart_prev, y_prev, h, regularized, factor, seed_chart, seed_y, seed_v)
                    if hit is not None:
                        frac_h, y_hit, chart_hit = hit
                        closure = abs(SpherePoint(chart_hit, y_hit).in_chart(seed_chart) - seed_y)
                        if closure < cfg.periodic_closure * max(1.0, abs(seed_y)):
                            om = samples[-2].omega + chord_omega(fld, chart_prev, y_prev, _unswitched(chart_prev, chart_hit, y_hit))
                            period = (om * cmath.exp(-1j * theta_t)).real
                            samples[-1] = Sample(t_prev + frac_h, SpherePoint(chart_hit, y_hit), om, 0.0)
                            omega_acc = om
                            verdict = Periodic(float(abs(period)), float(closure))
                            break
                prev_sigma = sigma
        if last:
            verdict = BudgetExhausted("t_max")
            break
        ratio = max(ratio, 1e-10)
        h *= min(5.0, max(0.2, 0.9 * ratio ** (-0.2)))
    return Trajectory(samples, theta_t, regularized, sign, verdict, omega_acc, min_pole)


def _unswitched(chart_prev: Chart, chart_hit: Chart, y_hit: complex) -> complex:
    return y_hit if chart_prev == chart_hit else 1 / y_hit


def _refine_return(fld, chart, y, h, regularized, factor, seed_chart, seed_y, seed_v):
    """Bisect the step length for the crossing of the seed's normal line."""

    def sigma(hh):
        yy, _ = dopri_step(fld, chart, y, hh, regularized, factor)
        p = SpherePoint(chart, yy).in_chart(seed_chart)
        return (seed_v.conjugate() * (p - seed_y)).real, yy

    lo, hi = 0.0, h
    s_lo, _ = sigma(lo) if lo > 0 else ((seed_v.conjugate() * (SpherePoint(chart, y).in_chart(seed_chart) - seed_y)).real, y)
    s_hi, y_hi = sigma(hi)
    if not (s_lo < 0 <= s_hi):
        return None
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        s_mid, y_mid = sigma(mid)
        if s_mid < 0:
            lo = mid
        else:
            hi, y_hi = mid, y_mid
        if hi - lo < 1e-15 * max(1.0, h):
            break
    return hi, y_hi, chart


def step_to(fld: RationalField, traj: Trajectory, index: int, hh: float) -> SpherePoint:
    """Point reached from sample ``index`` after a single step of length ``hh``."""
    s = traj.samples[index]
    factor = traj.sign * cmath.exp(1j * traj.theta)
    y, _ = dopri_step(fld, s.point.chart, s.point.value, hh, traj.regularized, factor)
    return SpherePoint(s.point.chart, y)


def flow_map(fld: RationalField, start: SpherePoint | complex, t: complex, cfg: IntegratorConfig | None = None) -> SpherePoint:
    """Holomorphic flow ``Phi^t(start)`` for complex time ``t``."""
    if not isinstance(start, SpherePoint):
        start = SpherePoint.from_w(start)
    if t == 0:
        return start
    cfg = replace(cfg or IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14), conv_radius=1e-14, degenerate_radius=1e-14)
    theta = cmath.phase(t)
    traj = integrate(fld, start, theta, abs(t), cfg, regularized=False, exact_end=True)
    v = traj.verdict
    if isinstance(v, ReachedSaddle):
        raise ExistenceDomainError(f"pole {v.pole} reached before |t| = {abs(t)}")
    if not (isinstance(v, BudgetExhausted) and v.reason == "t_max"):
        if isinstance(v, ConvergedTo):
            return traj.end
        raise ExistenceDomainError(f"flow did not reach |t| = {abs(t)}: {v}")
    return traj.end


def commutation_defect(
    fld: RationalField, w0: complex | SpherePoint, t1: float, t2: float, cfg: IntegratorConfig | None = None
) -> float:
    """Chordal distance between ``Phi^{i t2} Phi^{t1} w0`` and ``Phi^{t1} Phi^{i t2} w0``."""
    from .field import chordal_distance

    a = flow_map(fld, flow_map(fld, w0, complex(t1), cfg), 1j * t2, cfg)
    b = flow_map(fld, flow_map(fld, w0, 1j * t2, cfg), complex(t1), cfg)
    return chordal_distance(a, b)


def cycle_period(fld: RationalField, enclosed: Sequence[int]) -> complex:
    """Period ``2 pi i * sum(eta_j for j in enclosed)`` of a cycle enclosing those zeros."""
    enclosed = sorted(set(enclosed))
    if not enclosed or len(enclosed) >= fld.d:
        raise ValueError("enclosed must be a nonempty proper subset of the zero indices")
    eta = residues(fld)
    return 2j * math.pi * sum(eta[j] for j in enclosed)


def winding_number(polyline: Sequence[complex], point: complex) -> int:
    """Winding number of a closed polyline around ``point``."""
    total = 0.0
    pts = list(polyline)
    if pts[0] != pts[-1]:
        pts.append(pts[0])
    for p, q in zip(pts, pts[1:]):
        total += cmath.phase((q - point) / (p - point))
    return round(total / (2 * math.pi))


def brouwer_check(fld: RationalField, cycle: Sequence[complex]) -> tuple[int, int, bool]:
    """Count zeros ``d_J`` and poles ``d'_J`` enclosed by a cycle; true when ``d'_J = d_J - 1``."""
    dj = sum(1 for e in fld.zeros if winding_number(cycle, e) != 0)
    dpj = sum(1 for p in fld.poles if winding_number(cycle, p) != 0)
    return dj, dpj, dpj == dj - 1

"""Tracing separatrices of pole saddles and of the degenerate point at infinity.

Red separatrices are the stable branches (blow-up orbits) and are traced in
backward time; blue separatrices are the unstable branches (blow-down
orbits) and are traced forward.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Sequence

import numpy as np

from .field import (
    FieldError,
    RationalField,
    SpherePoint,
    chordal_distance,
    frame_from_c,
    infinity_record,
    pole_linearization,
    _group,
)
from .flow import (
    ConvergedTo,
    IntegratorConfig,
    Trajectory,
    dopri_step,
    integrate,
    landmarks,
)
from .nondeg import OmegaPathError, integrate_omega

SEED_OFFSET = 1e-6
SADDLE_CLEARANCE = 1e-4
BOUNDARY_SEED_RADIUS = 1e-4


class SeparatrixError(RuntimeError):
    """A separatrix could not be traced to a terminal."""


class NonTransverseError(ValueError):
    """The requested circle is not transverse to the flow."""


@dataclass
class Separatrix:
    """One half-branch of a stable (Red) or unstable (Blue) manifold."""

    owner: str
    color: str  # "Red" | "Blue"
    branch: str  # "plus" | "minus"
    trajectory: Trajectory
    terminal: str | None
    blowup_time: float | None = None
    blowup_integral: complex | None = None
    seed_direction: complex = 0j
    suspicions: list = dc_field(default_factory=list)
    # sample from which the blow-up (Red) or blow-down (Blue) time is measured
    blowup_reference: SpherePoint | None = None

    @property
    def id(self) -> str:
        return f"{self.owner}:{self.color}:{self.branch}"

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "owner": self.owner,
            "color": self.color,
            "branch": self.branch,
            "terminal": self.terminal,
            "blowup_time": self.blowup_time,
            "blowup_reference": self.blowup_reference.to_json() if self.blowup_reference else None,
            "suspicions": self.suspicions,
        }
        out.update(self.trajectory.to_json())
        return out


def _landmark(fld: RationalField, rid: str):
    for m in landmarks(fld):
        if m.id == rid:
            return m
    raise KeyError(rid)


def _pole_c(fld: RationalField, pole: str) -> complex:
    if pole == "inf":
        rec = infinity_record(fld)
        if rec is None or rec.kind != "PoleSaddle":
            raise FieldError("infinity is not a simple pole")
        return complex(*rec.linearization)
    idx = int(pole[1:])
    loc = fld.poles[idx]
    for i, l, mult in _group(fld.poles):
        if i == idx and mult > 1:
            raise FieldError("degenerate (multiple) pole")
    return pole_linearization(fld, idx)


def _owner_point(fld: RationalField, pole: str) -> SpherePoint:
    return _landmark(fld, pole).point


def _reference_index(traj: Trajectory, owner: SpherePoint, r_ref: float) -> int:
    for i, s in enumerate(traj.samples):
        if chordal_distance(s.point, owner) >= r_ref:
            return i
    return len(traj.samples) - 1


def _blowup(fld: RationalField, traj: Trajectory, owner: SpherePoint, color: str, r_ref: float):
    ref = _reference_index(traj, owner, r_ref)
    path = [s.point for s in traj.samples[: ref + 1]]
    path.insert(0, owner)
    try:
        val = integrate_omega(fld, path)  # owner -> ref
    except OmegaPathError:
        return None, None, None
    if color == "Red":
        val = -val  # forward original time runs from ref to the pole
    return val.real, val, traj.samples[ref].point


def trace_pole_separatrices(
    fld: RationalField,
    pole: str,
    cfg: IntegratorConfig | None = None,
    seed_offset: float = SEED_OFFSET,
    saddle_clearance: float = SADDLE_CLEARANCE,
    blowup: bool = True,
) -> list[Separatrix]:
    """Trace the four separatrices of a simple pole ``pole`` (record id).

    Returns the branches in the order Red plus, Red minus, Blue plus, Blue
    minus.  Seeds sit at ``seed_offset`` times the local scale along the
    eigendirections of the saddle frame.
    """
    cfg = cfg or IntegratorConfig()
    mark = _landmark(fld, pole)
    if mark.kind != "PoleSaddle":
        raise FieldError(f"{pole} is not a simple pole saddle")
    frame = frame_from_c(_pole_c(fld, pole))
    center = mark.point
    v = center.value
    s = seed_offset * mark.scale * (1 + abs(v) ** 2)
    r_ref = min(0.1 * mark.scale, 0.05)
    out = []
    for color, direction, t_max in (("Red", frame.stable, -math.inf), ("Blue", frame.unstable, math.inf)):
        for branch, sgn in (("plus", 1), ("minus", -1)):
            seed = SpherePoint(center.chart, v + sgn * s * direction)
            traj = integrate(fld, seed, 0.0, t_max, cfg, regularized=True, ignore=(pole,))
            term = traj.verdict.equilibrium if isinstance(traj.verdict, ConvergedTo) else None
            sus = []
            for pid, dist in traj.min_pole_distance.items():
                if pid != pole and dist < saddle_clearance * _landmark(fld, pid).scale:
                    sus.append(pid)
            bt, bi, ref = _blowup(fld, traj, center, color, r_ref) if blowup else (None, None, None)
            out.append(Separatrix(pole, color, branch, traj, term, bt, bi, sgn * direction, sus, ref))
    return out


# ---------------------------------------------------------------------------
# boundary equilibria at infinity


@dataclass(frozen=True)
class BoundarySaddleSet:
    """Boundary equilibria of the polar blow-up of ``w = infinity``.

    ``kinds`` holds ``Red``/``Blue`` for the saddles of the polynomial mode
    (the color of their interior separatrix) and ``Sink``/``Source`` in the
    anti-polynomial mode.  Angles are arguments of ``w``.
    """

    mode: str
    angles: tuple[float, ...]
    kinds: tuple[str, ...]

    def ids(self) -> list[str]:
        return [f"b{k}" for k in range(len(self.angles))]

    def to_json(self) -> dict:
        return {"mode": self.mode, "angles": list(self.angles), "kinds": list(self.kinds)}


def boundary_saddles(fld: RationalField) -> BoundarySaddleSet:
    """Boundary equilibria at infinity in the polynomial and anti-polynomial modes."""
    phi = cmath.phase(fld.a)
    if fld.is_polynomial and fld.d >= 2:
        n = fld.d - 1
        step = math.pi / n
        offset = (-phi / n) % step
        if step - offset < 1e-12:
            offset = 0.0
        angles = tuple(offset + k * step for k in range(2 * n))
        kinds = tuple("Red" if (fld.a * cmath.exp(1j * n * al)).real > 0 else "Blue" for al in angles)
        return BoundarySaddleSet("polynomial", angles, kinds)
    if fld.is_antipolynomial:
        n = fld.dp + 1
        step = math.pi / n
        offset = (phi / n) % step
        if step - offset < 1e-12:
            offset = 0.0
        angles = tuple(offset + j * step for j in range(2 * n))
        kinds = tuple("Sink" if (fld.a * cmath.exp(-1j * n * al)).real > 0 else "Source" for al in angles)
        return BoundarySaddleSet("antipolynomial", angles, kinds)
    raise FieldError("boundary equilibria exist only in the polynomial and anti-polynomial modes")


def _angle_dist(x: float, y: float) -> float:
    return abs((x - y + math.pi) % (2 * math.pi) - math.pi)


def resolve_boundary_terminal(fld: RationalField, traj: Trajectory, kind: str, bset: BoundarySaddleSet) -> str | None:
    """Boundary equilibrium of the given kind nearest to the asymptotic angle."""
    if not (isinstance(traj.verdict, ConvergedTo) and traj.verdict.equilibrium == "inf"):
        return None
    end = traj.end
    ang = cmath.phase(end.w) if not end.is_infinity() else cmath.phase(traj.samples[-2].point.w)
    cands = [(_angle_dist(ang, al), k) for k, (al, kd) in enumerate(zip(bset.angles, bset.kinds)) if kd == kind]
    return f"b{min(cands)[1]}"


def trace_boundary_separatrices(
    fld: RationalField,
    cfg: IntegratorConfig | None = None,
    seed_radius: float = BOUNDARY_SEED_RADIUS,
    blowup: bool = False,
) -> list[Separatrix]:
    """Separatrices attached to the boundary circle at infinity.

    Polynomial mode: one interior separatrix per boundary saddle, seeded at
    ``z = r exp(-i alpha_k)``.  Anti-polynomial mode: the four separatrices
    of each finite saddle, with terminals resolved to boundary sinks and
    sources by asymptotic angle.
    """
    cfg = cfg or IntegratorConfig()
    bset = boundary_saddles(fld)
    out: list[Separatrix] = []
    if bset.mode == "polynomial":
        for k, (al, kind) in enumerate(zip(bset.angles, bset.kinds)):
            seed = SpherePoint("Z", seed_radius * cmath.exp(-1j * al))
            t_max = -math.inf if kind == "Red" else math.inf
            traj = integrate(fld, seed, 0.0, t_max, cfg, regularized=True, ignore=("inf",))
            term = traj.verdict.equilibrium if isinstance(traj.verdict, ConvergedTo) else None
            out.append(Separatrix(f"b{k}", kind, "plus", traj, term, None, None, cmath.exp(1j * al)))
        return out
    for i, _, mult in _group(fld.poles):
        if mult > 1:
            raise FieldError("multiple finite saddle in anti-polynomial mode")
        seps = trace_pole_separatrices(fld, f"p{i}", cfg, blowup=blowup)
        for s in seps:
            s.terminal = resolve_boundary_terminal(fld, s.trajectory, "Source" if s.color == "Red" else "Sink", bset)
        out.extend(seps)
    return out


# ---------------------------------------------------------------------------
# crossing angles


def check_transverse(fld: RationalField, rho: float, center: complex = 0j, samples: int = 256) -> int:
    """Sign of the radial component of the regularized field on ``|w - center| = rho``."""
    signs = set()
    for k in range(samples):
        u = cmath.exp(2j * math.pi * k / samples)
        w = center + rho * u
        p = SpherePoint.from_w(w)
        vec = fld.vector(p.chart, p.value, True)
        if p.chart == "Z":
            # dz/dt -> dw/dt = -w^2 dz/dt
            vec = -(w**2) * vec
        radial = (u.conjugate() * vec).real
        signs.add(1 if radial > 0 else (-1 if radial < 0 else 0))
    if len(signs) != 1 or 0 in signs:
        raise NonTransverseError(f"circle |w - {center}| = {rho} is not transverse")
    return signs.pop()


def _radius(p: SpherePoint, center: complex) -> float:
    if p.is_infinity():
        return math.inf
    return abs(p.w - center)


def crossing_point(fld: RationalField, traj: Trajectory, rho: float, center: complex = 0j) -> complex | None:
    """First crossing of ``|w - center| = rho``, refined by bisection on the step length."""
    samples = traj.samples
    radii = [_radius(s.point, center) for s in samples]
    for i in range(len(samples) - 1):
        a, b = radii[i] - rho, radii[i + 1] - rho
        if a == 0:
            return samples[i].point.w
        if (a < 0) != (b < 0):
            s = samples[i]
            factor = traj.sign * cmath.exp(1j * traj.theta)
            lo, hi = 0.0, s.h
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                y, _ = dopri_step(fld, s.point.chart, s.point.value, mid, traj.regularized, factor)
                r = _radius(SpherePoint(s.point.chart, y), center) - rho
                if (r < 0) == (a < 0):
                    lo = mid
                else:
                    hi = mid
                if hi - lo <= 1e-16 * max(hi, 1e-300):
                    break
            y, _ = dopri_step(fld, s.point.chart, s.point.value, 0.5 * (lo + hi), traj.regularized, factor)
            return SpherePoint(s.point.chart, y).w
    return None


def crossing_angles(
    fld: RationalField,
    rho: float,
    separatrices: Sequence[Separatrix],
    center: complex = 0j,
    check: bool = True,
) -> list[tuple[str, float]]:
    """Angles ``arg(w - center)`` where each separatrix crosses ``|w - center| = rho``.

    Separatrices that never cross are omitted.

    Raises
    ------
    NonTransverseError
        If ``check`` is set and the circle is not transverse to the flow.
    """
    if check:
        check_transverse(fld, rho, center)
    out = []
    for s in separatrices:
        w = crossing_point(fld, s.trajectory, rho, center)
        if w is not None:
            out.append((s.id, cmath.phase(w - center)))
    return out

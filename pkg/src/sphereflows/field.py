"""Rational vector fields ``f = P/Q`` on the Riemann sphere.

A field is stored in product form, ``P(w) = a * prod(w - e_j)`` and
``Q(w) = prod(w - e'_j)``, and every evaluation uses the product form
rather than expanded coefficients.  The point at infinity is reached
through the chart ``z = 1/w`` in which the ODE reads ``z' = -z**2 f(1/z)``.

The regularized field multiplies ``f`` by the positive Euler factor
``(1 + |w|**2)**(-m) |Q|**2`` with ``m = max(d - 2, d', 0)``, which turns
poles into saddles and keeps the field smooth at ``w = infinity``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Literal, Sequence

import numpy as np

from .poly import ComplexPoly, from_roots

Chart = Literal["W", "Z"]
CHART_RADIUS = 1.0
HYSTERESIS = (0.8, 1.25)
TOL_CLASS = 1e-9
MERGE_TOL = 1e-9

KINDS = ("Source", "Sink", "Center", "PoleSaddle", "DegenerateZero", "DegeneratePole")


class FieldError(ValueError):
    """Invalid field data."""


# ---------------------------------------------------------------------------
# sphere points


@dataclass(frozen=True)
class SpherePoint:
    """A point of the sphere in chart ``W`` (value ``w``) or ``Z`` (value ``1/w``)."""

    chart: Chart
    value: complex

    @classmethod
    def from_w(cls, w: complex) -> "SpherePoint":
        if w is None or (isinstance(w, complex) and cmath.isinf(w)) or w == math.inf:
            return cls("Z", 0j)
        w = complex(w)
        if abs(w) <= CHART_RADIUS:
            return cls("W", w)
        return cls("Z", 1 / w)

    @property
    def w(self) -> complex:
        """Value in chart ``W``; ``complex(inf)`` at the point at infinity."""
        if self.chart == "W":
            return self.value
        if self.value == 0:
            return complex(math.inf, 0)
        return 1 / self.value

    def in_chart(self, chart: Chart) -> complex:
        if chart == self.chart:
            return self.value
        if self.value == 0:
            return complex(math.inf, 0)
        return 1 / self.value

    def normalized(self) -> "SpherePoint":
        """Re-express in the chart where ``|value| <= 1``."""
        if abs(self.value) <= CHART_RADIUS:
            return self
        other: Chart = "Z" if self.chart == "W" else "W"
        return SpherePoint(other, 1 / self.value)

    def is_infinity(self) -> bool:
        return self.chart == "Z" and self.value == 0

    def to_json(self) -> list:
        return [self.chart, [self.value.real, self.value.imag]]


def to_unit_sphere(p: SpherePoint) -> np.ndarray:
    """Inverse stereographic image of ``p`` on the unit sphere (north pole = infinity)."""
    v = p.value
    r2 = abs(v) ** 2
    if p.chart == "W":
        return np.array([2 * v.real, 2 * v.imag, r2 - 1]) / (1 + r2)
    # w = 1/z = conj(z)/|z|^2
    return np.array([2 * v.real, -2 * v.imag, 1 - r2]) / (1 + r2)


def chordal_distance(p: SpherePoint, q: SpherePoint) -> float:
    """Chordal distance on the Riemann sphere, scaled so that ``d(0, inf) = 1``."""
    return float(np.linalg.norm(to_unit_sphere(p) - to_unit_sphere(q)) / 2)


# ---------------------------------------------------------------------------
# the field


def _prod(values) -> complex:
    out = 1 + 0j
    for v in values:
        out *= v
    return out


@dataclass(frozen=True)
class RationalField:
    """Rational vector field ``a * prod(w - e_j) / prod(w - e'_j)``.

    Attributes
    ----------
    a : complex
        Nonzero prefactor.
    zeros : tuple of complex
        The zero set ``E`` (repeated entries encode multiplicity).
    poles : tuple of complex
        The pole set ``E'``.
    mode : str
        One of ``normalized``, ``polynomial``, ``antipolynomial``, ``general``.
    """

    a: complex
    zeros: tuple[complex, ...]
    poles: tuple[complex, ...]
    mode: str = "general"
    _cache: dict = dc_field(default_factory=dict, compare=False, repr=False, hash=False)

    # ----- degrees and polynomials
    @property
    def d(self) -> int:
        return len(self.zeros)

    @property
    def dp(self) -> int:
        return len(self.poles)

    @property
    def order_at_infinity(self) -> int:
        """Order of ``z' = -z**2 f(1/z)`` at ``z = 0`` (negative for a pole)."""
        return 2 - self.d + self.dp

    @property
    def m_reg(self) -> int:
        return max(self.d - 2, self.dp, 0)

    @property
    def P(self) -> ComplexPoly:
        if "P" not in self._cache:
            self._cache["P"] = from_roots(self.zeros, self.a)
        return self._cache["P"]

    @property
    def Q(self) -> ComplexPoly:
        if "Q" not in self._cache:
            self._cache["Q"] = from_roots(self.poles, 1.0)
        return self._cache["Q"]

    @property
    def P_tilde(self) -> ComplexPoly:
        """``-z**d P(1/z)``; equals ``-a`` at ``z = 0``."""
        return self.P.reversed(self.d).scale(-1)

    @property
    def Q_tilde(self) -> ComplexPoly:
        """``z**d' Q(1/z)``; equals ``1`` at ``z = 0``."""
        return self.Q.reversed(self.dp)

    @property
    def is_normalized(self) -> bool:
        return self.dp == self.d - 2

    @property
    def is_polynomial(self) -> bool:
        return self.dp == 0 and self.d >= 1

    @property
    def is_antipolynomial(self) -> bool:
        return self.d == 0 and self.dp >= 1

    # ----- evaluation, chart W
    def f(self, w: complex) -> complex:
        return self.a * _prod(w - e for e in self.zeros) / _prod(w - p for p in self.poles)

    def omega_density(self, w: complex) -> complex:
        """``1/f(w)``, the density of ``omega = dw/f``."""
        return _prod(w - p for p in self.poles) / (self.a * _prod(w - e for e in self.zeros))

    def _exps(self) -> tuple[int, int, int]:
        ex = self._cache.get("exps")
        if ex is None:
            m = self.m_reg
            ex = self._cache["exps"] = (m, m + 2 - self.d, m - self.dp)
        return ex

    def f_reg(self, w: complex) -> complex:
        num = self.a
        for e in self.zeros:
            num *= w - e
        den = 1 + 0j
        for p in self.poles:
            den *= w - p
        return (1 + abs(w) ** 2) ** (-self._exps()[0]) * num * den.conjugate()

    # ----- evaluation, chart Z
    def f_z(self, z: complex) -> complex:
        """``-z**2 f(1/z)``."""
        k = self.order_at_infinity
        num = _prod(1 - e * z for e in self.zeros)
        den = _prod(1 - p * z for p in self.poles)
        return -self.a * z**k * num / den if k >= 0 else -self.a * num / (den * z ** (-k))

    def omega_density_z(self, z: complex) -> complex:
        return 1 / self.f_z(z)

    def f_reg_z(self, z: complex) -> complex:
        """Exact push-forward of :meth:`f_reg` under ``z = 1/w``."""
        m, k1, k2 = self._exps()
        num = 1 + 0j
        for e in self.zeros:
            num *= 1 - e * z
        den = 1 + 0j
        for p in self.poles:
            den *= 1 - p * z
        zz = z**k1 * z.conjugate() ** k2 if z != 0 else (1.0 if (k1 == 0 and k2 == 0) else 0.0)
        return -(1 + abs(z) ** 2) ** (-m) * zz * self.a * num * den.conjugate()

    # ----- chart-generic access
    def vector(self, chart: Chart, v: complex, regularized: bool) -> complex:
        if chart == "W":
            return self.f_reg(v) if regularized else self.f(v)
        return self.f_reg_z(v) if regularized else self.f_z(v)

    def omega(self, chart: Chart, v: complex) -> complex:
        return self.omega_density(v) if chart == "W" else self.omega_density_z(v)

    def special_points(self) -> list[SpherePoint]:
        """Distinct zeros, poles and (when not regular) the point at infinity."""
        pts: list[SpherePoint] = []
        seen: list[complex] = []
        for v in list(self.zeros) + list(self.poles):
            if any(abs(v - s) <= MERGE_TOL * max(1.0, abs(v)) for s in seen):
                continue
            seen.append(v)
            pts.append(SpherePoint.from_w(v))
        if self.order_at_infinity != 0:
            pts.append(SpherePoint("Z", 0j))
        return pts

    def to_json(self) -> dict:
        return {
            "a": [self.a.real, self.a.imag],
            "zeros": [[e.real, e.imag] for e in self.zeros],
            "poles": [[p.real, p.imag] for p in self.poles],
            "mode": self.mode,
        }

    def with_a(self, a: complex) -> "RationalField":
        return RationalField(complex(a), self.zeros, self.poles, self.mode)


def infer_mode(d: int, dp: int) -> str:
    if dp == d - 2:
        return "normalized"
    if dp == 0 and d >= 1:
        return "polynomial"
    if d == 0 and dp >= 1:
        return "antipolynomial"
    return "general"


def _check_distinct(points: Sequence[complex], what: str) -> None:
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if abs(points[i] - points[j]) <= MERGE_TOL * max(1.0, abs(points[i])):
                raise FieldError(f"duplicate {what} entries at {points[i]}")


def build_field(
    zeros: Sequence[complex],
    poles: Sequence[complex] = (),
    a: complex = 1.0,
    mode: str | None = None,
) -> RationalField:
    """Validate and build a field with simple, disjoint zeros and poles.

    Parameters
    ----------
    zeros, poles : sequence of complex
        Finite zeros ``E`` and poles ``E'``.
    a : complex
        Nonzero prefactor.
    mode : str, optional
        Requested mode; inferred from the degrees when omitted.  A requested
        mode must be consistent with the degrees.

    Raises
    ------
    FieldError
        On zero prefactor, duplicates, a coincident zero and pole, or an
        inconsistent mode.
    """
    a = complex(a)
    if a == 0:
        raise FieldError("prefactor a must be nonzero")
    zeros = tuple(complex(z) for z in zeros)
    poles = tuple(complex(p) for p in poles)
    _check_distinct(zeros, "zero")
    _check_distinct(poles, "pole")
    for e in zeros:
        for p in poles:
            if abs(e - p) <= MERGE_TOL * max(1.0, abs(e)):
                raise FieldError(f"zero and pole coincide at {e} (P and Q not coprime)")
    inferred = infer_mode(len(zeros), len(poles))
    if mode is None:
        mode = inferred
    elif mode == "polynomial" and poles:
        raise FieldError("polynomial mode requires an empty pole set")
    elif mode == "antipolynomial" and zeros:
        raise FieldError("anti-polynomial mode requires an empty zero set")
    elif mode == "normalized" and len(poles) != len(zeros) - 2:
        raise FieldError("normalized mode requires d' = d - 2")
    elif mode not in ("normalized", "polynomial", "antipolynomial", "general"):
        raise FieldError(f"unknown mode {mode!r}")
    return RationalField(a, zeros, poles, mode)


def field_from_json(data: dict) -> RationalField:
    def c(pair):
        return complex(pair[0], pair[1])

    a = data.get("a", [1.0, 0.0])
    return build_field(
        [c(z) for z in data.get("zeros", [])],
        [c(p) for p in data.get("poles", [])],
        c(a) if isinstance(a, (list, tuple)) else complex(a),
        data.get("mode"),
    )


def polynomial_field(poly: ComplexPoly) -> RationalField:
    """Field ``w' = p(w)`` for a polynomial given by coefficients."""
    from .poly import find_roots

    rs = find_roots(poly)
    return RationalField(poly.leading, tuple(rs.expanded()), (), "polynomial")


# ---------------------------------------------------------------------------
# Moebius transformations


def _mobius_apply(m: np.ndarray, w: complex) -> complex:
    """Image of a finite or infinite point; returns ``complex(inf)`` for infinity."""
    al, be, ga, de = (complex(x) for x in (m[0, 0], m[0, 1], m[1, 0], m[1, 1]))
    if cmath.isinf(w):
        return complex(math.inf, 0) if ga == 0 else al / ga
    den = ga * w + de
    if den == 0:
        return complex(math.inf, 0)
    return complex((al * w + be) / den)


def apply_mobius(fld: RationalField, m) -> RationalField:
    """Push ``fld`` forward under ``z = (alpha w + beta) / (gamma w + delta)``.

    The new field satisfies ``g(m(w)) = m'(w) f(w)``.  Zeros and poles are
    mapped point by point; a zero or pole of ``f`` at infinity is
    materialized at ``m(infinity)`` and one mapped to infinity is absorbed
    into the degree bookkeeping.
    """
    m = np.asarray(m, dtype=complex)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if m.shape != (2, 2) or abs(det) < 1e-300:
        raise FieldError("singular Moebius matrix")
    k = fld.order_at_infinity
    img_inf = _mobius_apply(m, complex(math.inf, 0))
    zeros = [z for z in (_mobius_apply(m, e) for e in fld.zeros) if not cmath.isinf(z)]
    poles = [z for z in (_mobius_apply(m, p) for p in fld.poles) if not cmath.isinf(z)]
    if not cmath.isinf(img_inf):
        if k > 0:
            zeros += [img_inf] * k
        elif k < 0:
            poles += [img_inf] * (-k)
    inv = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])
    # prefactor from a well-conditioned sample point
    specials = zeros + poles
    best = None
    for r in (0.37, 0.71, 1.3, 2.9):
        for ang in (0.3, 1.9, 3.7, 5.1):
            z0 = r * cmath.exp(1j * ang)
            w0 = _mobius_apply(inv, z0)
            if cmath.isinf(w0):
                continue
            clear = min([abs(z0 - s) for s in specials] + [abs(w0 - s) for s in fld.zeros + fld.poles] + [10.0])
            if best is None or clear > best[0]:
                best = (clear, z0, w0)
    _, z0, w0 = best
    dm = complex(det / (m[1, 0] * w0 + m[1, 1]) ** 2)
    g0 = dm * fld.f(w0)
    a_new = g0 * _prod(z0 - p for p in poles) / _prod(z0 - e for e in zeros)
    return RationalField(complex(a_new), tuple(zeros), tuple(poles), infer_mode(len(zeros), len(poles)))


INVERSION = ((0, 1), (1, 0))


def translate(fld: RationalField, c: complex) -> RationalField:
    """Exact shift ``w -> w - c``."""
    return RationalField(fld.a, tuple(e - c for e in fld.zeros), tuple(p - c for p in fld.poles), fld.mode)


def eval_regularized(fld: RationalField, p: SpherePoint) -> complex:
    """Regularized vector in the chart of ``p``."""
    return fld.vector(p.chart, p.value, True)


# ---------------------------------------------------------------------------
# residues and classification


@dataclass(frozen=True)
class SaddleFrame:
    alpha: float
    beta: float
    stable: complex
    unstable: complex

    @property
    def eigenvalue(self) -> float:
        return math.hypot(self.alpha, self.beta)


@dataclass(frozen=True)
class EquilibriumRecord:
    """Classified zero, pole, or the point at infinity.

    ``linearization`` is ``f'(e)`` for a simple zero and ``(alpha, beta)`` for
    a pole saddle.  For the point at infinity it is computed in chart ``Z``.
    """

    id: str
    location: SpherePoint
    kind: str
    residue: complex | None
    linearization: complex | tuple[float, float] | None
    multiplicity: int

    @property
    def is_zero_kind(self) -> bool:
        return self.kind in ("Source", "Sink", "Center", "DegenerateZero")

    def to_json(self) -> dict:
        lin = self.linearization
        if isinstance(lin, complex):
            lin = [lin.real, lin.imag]
        elif isinstance(lin, tuple):
            lin = list(lin)
        return {
            "id": self.id,
            "location": self.location.to_json(),
            "kind": self.kind,
            "residue": None if self.residue is None else [self.residue.real, self.residue.imag],
            "linearization": lin,
            "multiplicity": self.multiplicity,
        }


def _group(points: Sequence[complex]) -> list[tuple[int, complex, int]]:
    """(first index, location, multiplicity) for clustered entries."""
    out: list[list] = []
    for i, v in enumerate(points):
        for g in out:
            if abs(v - g[1]) <= MERGE_TOL * max(1.0, abs(v)):
                g[2] += 1
                break
        else:
            out.append([i, v, 1])
    return [tuple(g) for g in out]


def zero_derivative(fld: RationalField, index: int) -> complex:
    """``f'(e_j) = P_j(e_j) / Q(e_j)`` for a simple zero."""
    e = fld.zeros[index]
    others = [x for i, x in enumerate(fld.zeros) if i != index]
    return fld.a * _prod(e - x for x in others) / _prod(e - p for p in fld.poles)


def pole_linearization(fld: RationalField, index: int) -> complex:
    """``alpha + i beta``: the factor ``c`` in ``f_reg ~ c * conj(w - e')``."""
    e = fld.poles[index]
    others = [x for i, x in enumerate(fld.poles) if i != index]
    num = fld.a * _prod(e - x for x in fld.zeros)
    return (1 + abs(e) ** 2) ** (-fld.m_reg) * num * _prod(e - x for x in others).conjugate()


def residues(fld: RationalField) -> list[complex]:
    """Residues ``eta_j = 1/f'(e_j)`` of ``omega = dw/f`` at the finite zeros."""
    for _, _, mult in _group(fld.zeros):
        if mult > 1:
            raise FieldError("multiple zero detected; residues need simple zeros")
    return [1 / zero_derivative(fld, j) for j in range(fld.d)]


def kind_of(fp: complex, tol: float = TOL_CLASS) -> str:
    """Source/Sink/Center from the linearization ``fp``, scale invariantly.

    A zero is a Center when ``|Re fp| <= tol |fp|``, i.e. when the spiral
    rate is within ``tol`` of purely rotational.
    """
    tol = tol * abs(fp)
    if fp.real > tol:
        return "Source"
    if fp.real < -tol:
        return "Sink"
    return "Center"


def frame_from_c(c: complex) -> SaddleFrame:
    """Eigenframe of ``v' = c * conj(v)``, i.e. of the matrix ``[[alpha, beta], [beta, -alpha]]``."""
    phi = cmath.phase(c)
    unstable = cmath.exp(0.5j * phi)
    return SaddleFrame(c.real, c.imag, unstable * 1j, unstable)


def _classify_finite(fld: RationalField, tol: float, id_map: dict | None = None) -> list[EquilibriumRecord]:
    recs = []
    for idx, loc, mult in _group(fld.zeros):
        rid = f"e{idx}"
        if mult > 1:
            recs.append(EquilibriumRecord(rid, SpherePoint.from_w(loc), "DegenerateZero", None, None, mult))
            continue
        fp = zero_derivative(fld, idx)
        recs.append(EquilibriumRecord(rid, SpherePoint.from_w(loc), kind_of(fp, tol), 1 / fp, fp, 1))
    for idx, loc, mult in _group(fld.poles):
        rid = f"p{idx}"
        if mult > 1:
            recs.append(EquilibriumRecord(rid, SpherePoint.from_w(loc), "DegeneratePole", None, None, mult))
            continue
        c = pole_linearization(fld, idx)
        recs.append(EquilibriumRecord(rid, SpherePoint.from_w(loc), "PoleSaddle", None, (c.real, c.imag), 1))
    return recs


def inverted(fld: RationalField) -> RationalField:
    """The field expressed in chart ``Z`` as a rational field in ``z``."""
    if "inv" not in fld._cache:
        fld._cache["inv"] = apply_mobius(fld, INVERSION)
    return fld._cache["inv"]


def infinity_record(fld: RationalField, tol: float = TOL_CLASS) -> EquilibriumRecord | None:
    k = fld.order_at_infinity
    if k == 0:
        return None
    g = inverted(fld)
    loc = SpherePoint("Z", 0j)
    if k > 0:
        if k > 1:
            return EquilibriumRecord("inf", loc, "DegenerateZero", None, None, k)
        idx = min(range(g.d), key=lambda j: abs(g.zeros[j]))
        fp = zero_derivative(g, idx)
        return EquilibriumRecord("inf", loc, kind_of(fp, tol), 1 / fp, fp, 1)
    if k < -1:
        return EquilibriumRecord("inf", loc, "DegeneratePole", None, None, -k)
    idx = min(range(g.dp), key=lambda j: abs(g.poles[j]))
    c = pole_linearization(g, idx)
    return EquilibriumRecord("inf", loc, "PoleSaddle", None, (c.real, c.imag), 1)


def classify(fld: RationalField, tol: float = TOL_CLASS) -> list[EquilibriumRecord]:
    """Classify every finite zero and pole and the point at infinity.

    A regular point at infinity produces no record.
    """
    recs = _classify_finite(fld, tol)
    inf = infinity_record(fld, tol)
    if inf is not None:
        recs.append(inf)
    return recs


def find_record(records: Sequence[EquilibriumRecord], rid: str) -> EquilibriumRecord:
    for r in records:
        if r.id == rid:
            return r
    raise KeyError(rid)


def saddle_frame(fld: RationalField, pole: str | complex | int) -> SaddleFrame:
    """Stable and unstable unit directions at a simple pole.

    ``pole`` is a record id (``"p0"``, ``"inf"``), a pole index, or a location.
    For ``"inf"`` the directions refer to chart ``Z``.
    """
    if pole == "inf":
        rec = infinity_record(fld)
        if rec is None or rec.kind != "PoleSaddle":
            raise FieldError("infinity is not a simple pole")
        return frame_from_c(complex(*rec.linearization))
    if isinstance(pole, str):
        idx = int(pole[1:])
    elif isinstance(pole, int):
        idx = pole
    else:
        idx = min(range(fld.dp), key=lambda j: abs(fld.poles[j] - pole))
    loc = fld.poles[idx]
    if sum(1 for p in fld.poles if abs(p - loc) <= MERGE_TOL * max(1.0, abs(loc))) > 1:
        raise FieldError("degenerate (multiple) pole")
    return frame_from_c(pole_linearization(fld, idx))


# ---------------------------------------------------------------------------
# anti-polynomial gradient / Hamiltonian structure


@dataclass(frozen=True)
class HamiltonianData:
    F: ComplexPoly
    G: Callable[[complex], float]
    H: Callable[[complex], float]
    saddle_values: tuple[float, ...]
    distinct: bool


def hamiltonian_data(fld: RationalField, tol: float = 1e-9) -> HamiltonianData:
    """Potential ``F`` with ``F' = -conj(a) Q`` and ``F(0) = 0``.

    The regularized anti-polynomial flow is ``w' = conj(conj(a) Q(w)) = -conj(F'(w))``,
    the negative gradient of ``G = Re F`` and the Hamiltonian flow of ``H = Im F``.
    """
    if not fld.is_antipolynomial:
        raise FieldError("hamiltonian_data needs the anti-polynomial mode (P = const)")
    F = fld.Q.scale(-fld.a.conjugate()).antiderivative(0j)

    def G(w: complex) -> float:
        return F(w).real

    def H(w: complex) -> float:
        return F(w).imag

    vals = tuple(H(p) for p in fld.poles)
    # pairwise relative test with a rounding floor: nested saddle clusters
    # have genuinely tiny but well separated critical values
    size = [abs(F(p)) for p in fld.poles]
    noise = [4 * len(F.coeffs) * 2.2e-16 * sum(abs(c) * abs(p) ** k for k, c in enumerate(F.coeffs)) for p in fld.poles]
    distinct = all(
        abs(vals[i] - vals[j]) > tol * max(size[i], size[j]) + 1e3 * (noise[i] + noise[j])
        for i in range(len(vals))
        for j in range(i + 1, len(vals))
    )
    return HamiltonianData(F, G, H, vals, distinct)

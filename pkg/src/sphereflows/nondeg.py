"""Nondegeneracy checks, contour integrals of ``omega`` and the period module."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .field import MERGE_TOL, Chart, RationalField, SpherePoint, _group, residues

_GK_X = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_GK_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_GK_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                   0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

PATH_CLEARANCE = 1e-9


class OmegaPathError(ValueError):
    """The integration path passes too close to a zero of ``f``."""


def _gk15(func, a: complex, b: complex) -> tuple[complex, float]:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    xs = np.concatenate([-_GK_X[:-1], _GK_X[::-1]])
    vals = np.array([func(mid + half * x) for x in xs])
    left = vals[:7]  # at -x_k, k = 0..6
    right = vals[8:]  # at +x_k, k = 6..0  -> reverse
    right = right[::-1]
    center = vals[7]
    sym = left + right
    kron = (np.dot(_GK_WK[:-1], sym) + _GK_WK[-1] * center) * half
    gauss = (np.dot(_GK_WG[:3], sym[1::2][:3]) + _GK_WG[3] * center) * half
    return complex(kron), float(abs(kron - gauss))


def adaptive_line_integral(func, a: complex, b: complex, abs_tol: float = 1e-13, rel_tol: float = 1e-12, max_depth: int = 40) -> complex:
    """Adaptive Gauss-Kronrod (7, 15) integral of ``func`` along the segment ``a -> b``."""
    if a == b:
        return 0j
    whole, _ = _gk15(func, a, b)
    tol = max(abs_tol, rel_tol * abs(whole))
    total = 0j
    stack = [(a, b, 0)]
    length = abs(b - a)
    while stack:
        lo, hi, depth = stack.pop()
        val, err = _gk15(func, lo, hi)
        if err <= max(tol * abs(hi - lo) / length, 1e-14 * abs(val)) or depth >= max_depth:
            total += val
        else:
            m = 0.5 * (lo + hi)
            stack.append((m, hi, depth + 1))
            stack.append((lo, m, depth + 1))
    return total


def _zeros_in_chart(fld: RationalField, chart: Chart) -> list[complex]:
    if chart == "W":
        return list(fld.zeros)
    out = [1 / e for e in fld.zeros if e != 0]
    if fld.order_at_infinity > 0:
        out.append(0j)
    return out


def _segment_distance(p: complex, a: complex, b: complex) -> float:
    ab = b - a
    if ab == 0:
        return abs(p - a)
    s = ((p - a) * ab.conjugate()).real / abs(ab) ** 2
    s = min(1.0, max(0.0, s))
    return abs(p - (a + s * ab))


def integrate_omega(
    fld: RationalField,
    path: Sequence[SpherePoint | complex],
    clearance: float = PATH_CLEARANCE,
    abs_tol: float = 1e-13,
    rel_tol: float = 1e-12,
) -> complex:
    """Integral of ``omega = Q/P dw`` along a polyline on the sphere.

    Each segment is integrated in the chart in which both endpoints are
    smallest, so polylines may pass through ``w = infinity``.  Endpoints may
    sit exactly on poles, where the integrand vanishes.

    Raises
    ------
    OmegaPathError
        If a segment passes within ``clearance`` of a zero of ``f``.
    """
    pts = [p if isinstance(p, SpherePoint) else SpherePoint.from_w(p) for p in path]
    total = 0j
    for p, q in zip(pts, pts[1:]):
        best = None
        for chart in ("W", "Z"):
            a, b = p.in_chart(chart), q.in_chart(chart)
            if not (np.isfinite(a) and np.isfinite(b)):
                continue
            size = max(abs(a), abs(b))
            if best is None or size < best[0]:
                best = (size, chart, a, b)
        _, chart, a, b = best
        for e in _zeros_in_chart(fld, chart):
            if _segment_distance(e, a, b) < clearance:
                raise OmegaPathError(f"path passes within {clearance} of a zero of f")

        def dens(v, chart=chart):
            return fld.omega(chart, v)

        total += adaptive_line_integral(dens, a, b, abs_tol, rel_tol)
    return total


# ---------------------------------------------------------------------------
# period module


@dataclass(frozen=True)
class PeriodModule:
    """Z-module generated by ``2 pi i eta_j``, searched within ``|m_j| <= M``."""

    generators: tuple[complex, ...]
    M: int = 20
    tol: float = 1e-6

    @classmethod
    def of_field(cls, fld: RationalField, M: int = 20, tol: float = 1e-6) -> "PeriodModule":
        return cls(tuple(2j * math.pi * e for e in residues(fld)), M, tol)


@dataclass(frozen=True)
class PeriodDistance:
    distance: float
    combination: tuple[int, ...]
    at_boundary: bool
    bound: int

    def __float__(self) -> float:
        return self.distance


_HALF_BUDGET = 2_000_000


def _reduced_generators(gens: Sequence[complex]) -> list[int]:
    """Indices of a generating subset (drops one generator when they sum to zero)."""
    idx = list(range(len(gens)))
    if len(gens) > 1 and abs(sum(gens)) <= 1e-9 * max(abs(g) for g in gens):
        idx = idx[:-1]
    return idx


def _enumerate(gens: np.ndarray, M: int) -> tuple[np.ndarray, np.ndarray]:
    if len(gens) == 0:
        return np.zeros(1, gens.dtype), np.zeros((1, 0), int)
    rng = np.arange(-M, M + 1)
    grids = np.meshgrid(*([rng] * len(gens)), indexing="ij")
    combos = np.stack([g.ravel() for g in grids], axis=1)
    return combos @ gens, combos


def period_distance(value: complex, pm: PeriodModule, mod_reals: bool = True) -> PeriodDistance:
    """Distance from ``value`` to the truncated lattice (or to ``R + lattice``).

    A meet-in-the-middle search over ``|m_j| <= M`` finds the nearest lattice
    combination exactly within the bound.  ``at_boundary`` is set when the
    minimizing combination has some ``|m_j| = M``.
    """
    idx = _reduced_generators(pm.generators)
    gens = np.array([pm.generators[i] for i in idx])
    n = len(gens)
    half = (n + 1) // 2
    M = pm.M
    while M > 1 and (2 * M + 1) ** half > _HALF_BUDGET:
        M -= 1
    ga, gb = gens[:half], gens[half:]
    if mod_reals:
        va, ca = _enumerate(ga.imag, M)
        vb, cb = _enumerate(gb.imag, M)
        target = value.imag
        order = np.argsort(vb)
        vb_sorted = vb[order]
        need = target - va
        pos = np.searchsorted(vb_sorted, need)
        best_d, best = math.inf, None
        for cand in (pos - 1, pos):
            ok = (cand >= 0) & (cand < len(vb_sorted))
            c = np.clip(cand, 0, len(vb_sorted) - 1)
            dist = np.where(ok, np.abs(need - vb_sorted[c]), np.inf)
            i = int(np.argmin(dist))
            if dist[i] < best_d:
                best_d, best = float(dist[i]), (i, int(order[c[i]]))
    else:
        va, ca = _enumerate(ga, M)
        vb, cb = _enumerate(gb, M)
        tree = cKDTree(np.column_stack([vb.real, vb.imag]))
        need = value - va
        dist, j = tree.query(np.column_stack([need.real, need.imag]))
        i = int(np.argmin(dist))
        best_d, best = float(dist[i]), (i, int(j[i]))
    comb_red = np.concatenate([ca[best[0]], cb[best[1]]]).astype(int)
    comb = [0] * len(pm.generators)
    for k, i in enumerate(idx):
        comb[i] = int(comb_red[k])
    at_boundary = bool(n and np.max(np.abs(comb_red)) >= M)
    return PeriodDistance(best_d, tuple(comb), at_boundary, M)


# ---------------------------------------------------------------------------
# the four conditions


@dataclass(frozen=True)
class NondegConfig:
    res_tol: float = 1e-7
    period_tol: float = 1e-6
    line_clearance: float = 1e-6
    M: int = 20
    max_subset_d: int = 20


@dataclass
class CondVerdict:
    status: str  # pass | fail | inconclusive
    witness: dict | None = None
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        return {"status": self.status, "witness": self.witness, "reason": self.reason}


@dataclass
class NondegReport:
    cond_i: CondVerdict
    cond_ii: CondVerdict
    cond_iii: CondVerdict
    cond_iv: CondVerdict
    details: dict = dc_field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in (self.cond_i, self.cond_ii, self.cond_iii, self.cond_iv))

    def to_json(self) -> dict:
        return {
            "cond_i": self.cond_i.to_json(),
            "cond_ii": self.cond_ii.to_json(),
            "cond_iii": self.cond_iii.to_json(),
            "cond_iv": self.cond_iv.to_json(),
            "overall": self.overall,
        }


def _c(z: complex) -> list[float]:
    return [z.real, z.imag]


def _cond_i(fld: RationalField) -> CondVerdict:
    if fld.dp != fld.d - 2:
        return CondVerdict("fail", {"d": fld.d, "d_prime": fld.dp}, "degree relation d' = d - 2 violated")
    for what, pts in (("zero", fld.zeros), ("pole", fld.poles)):
        for _, loc, mult in _group(pts):
            if mult > 1:
                return CondVerdict("fail", {what: _c(loc), "multiplicity": mult}, f"multiple {what}")
    for e in fld.zeros:
        for p in fld.poles:
            if abs(e - p) <= MERGE_TOL * max(1.0, abs(e)):
                return CondVerdict("fail", {"zero": _c(e), "pole": _c(p)}, "zero and pole coincide")
    return CondVerdict("pass")


def _distinct_poles(fld: RationalField) -> list[tuple[int, complex]]:
    return [(i, loc) for i, loc, _ in _group(fld.poles)]


def _cond_ii(fld: RationalField, cfg: NondegConfig) -> CondVerdict:
    for (i, p), (j, q) in itertools.combinations(_distinct_poles(fld), 2):
        u = (q - p) / abs(q - p)
        for k, e in enumerate(fld.zeros):
            dist = abs(((e - p) * u.conjugate()).imag)
            if dist <= cfg.line_clearance:
                return CondVerdict(
                    "fail", {"poles": [i, j], "zero": k, "distance": dist}, "zero on the line through two poles"
                )
    return CondVerdict("pass")


def subset_sums(values: Sequence[complex]) -> np.ndarray:
    """Sums over all subsets, indexed by bitmask."""
    n = len(values)
    sums = np.zeros(1 << n, complex)
    for k, v in enumerate(values):
        step = 1 << k
        sums[step : 2 * step] = sums[:step] + v
    return sums


def _cond_iii(fld: RationalField, cfg: NondegConfig) -> CondVerdict:
    if fld.d > cfg.max_subset_d:
        return CondVerdict("inconclusive", None, f"d = {fld.d} exceeds the subset cap {cfg.max_subset_d}")
    if any(m > 1 for _, _, m in _group(fld.zeros)):
        return CondVerdict("inconclusive", None, "multiple zero; residues undefined")
    eta = residues(fld)
    sums = subset_sums(eta)
    full = (1 << fld.d) - 1
    masks = np.arange(1, full)
    bad = masks[np.abs(sums[1:full].real) <= cfg.res_tol]
    if len(bad):
        subsets = [[j for j in range(fld.d) if (int(m) >> j) & 1] for m in bad]
        subsets.sort(key=lambda s: (len(s), s))
        return CondVerdict("fail", {"subsets": subsets}, "real part of a residue sum vanishes")
    return CondVerdict("pass")


def _cond_iv(fld: RationalField, cfg: NondegConfig, details: dict) -> CondVerdict:
    if any(m > 1 for _, _, m in _group(fld.zeros)):
        return CondVerdict("inconclusive", None, "multiple zero; period module undefined")
    pm = PeriodModule.of_field(fld, cfg.M, cfg.period_tol)
    status = CondVerdict("pass")
    records = []
    for (i, p), (j, q) in itertools.combinations(_distinct_poles(fld), 2):
        try:
            val = integrate_omega(fld, [p, q])
        except OmegaPathError:
            return CondVerdict("inconclusive", {"poles": [i, j]}, "pole segment passes through a zero")
        pd = period_distance(val, pm, mod_reals=True)
        records.append({"poles": [i, j], "integral": _c(val), "distance": pd.distance, "combination": list(pd.combination)})
        if pd.distance <= cfg.period_tol:
            wit = {"poles": [i, j], "integral": _c(val), "combination": list(pd.combination), "distance": pd.distance}
            if pd.at_boundary:
                status = CondVerdict("inconclusive", wit, "nearest period lies on the search boundary")
            else:
                return CondVerdict("fail", wit, "pole-to-pole integral lies in R + periods")
    details["pole_integrals"] = records
    return status


def check_nondegeneracy(fld: RationalField, cfg: NondegConfig | None = None) -> NondegReport:
    """Evaluate conditions (i)-(iv) of nondegeneracy for a normalized field."""
    cfg = cfg or NondegConfig()
    details: dict = {}
    return NondegReport(_cond_i(fld), _cond_ii(fld, cfg), _cond_iii(fld, cfg), _cond_iv(fld, cfg, details), details)

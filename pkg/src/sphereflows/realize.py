"""Explicit fields realizing prescribed portraits.

Three inductive constructions, each step verified by a full analysis round
trip before the next one starts:

* polynomial: pluck a leaf, realize the smaller tree, shrink it by ``delta``
  and multiply by a linear factor whose zero sits on a boundary-saddle ray;
* rational: contract a blue edge, realize the smaller pair, move the merged
  sink to ``0`` and split it by ``w -> (w - delta e1)(w + q delta e1)/w``;
* anti-polynomial: remove a short leaf, realize the smaller nc-tree, shrink
  the saddles by ``delta`` and add a far saddle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .combinat import NcTree, PlanarTree, dual_nc_tree, nc_canonical
from .field import RationalField, SpherePoint, apply_mobius, build_field, classify, hamiltonian_data
from .flow import IntegratorConfig, landmarks
from .poly import ComplexPoly, from_roots
from .portrait import (
    SINK,
    SOURCE,
    PlaneMultigraph,
    PortraitError,
    build_portraits,
    canonical_code,
    check_duality,
    contour_walk,
    find_isomorphism,
    reduced_connection_graph,
    arrival_angle,
)
from .separatrix import (
    SeparatrixError,
    boundary_saddles,
    crossing_point,
    trace_boundary_separatrices,
    trace_pole_separatrices,
)

EPS0 = 0.1
RHO0 = 0.1
SCALE_FLOOR = 1e-5
SHRINK = 0.5
# looser tolerance for screening candidates; the accepted one is re-checked
SCREEN_CFG = IntegratorConfig(rel_tol=1e-8)


class RealizationError(RuntimeError):
    """No verified realization was found down to the scale floor."""

    def __init__(self, message: str, plan: "RealizationPlan | None" = None):
        super().__init__(message)
        self.plan = plan


@dataclass
class RealizationPlan:
    """Trace of an inductive realization."""

    mode: str
    target: dict
    steps: list = dc_field(default_factory=list)
    field: RationalField | None = None

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "target": self.target,
            "steps": self.steps,
            "field": self.field.to_json() if self.field is not None else None,
        }


@dataclass
class Verdict:
    passed: bool
    diagnostics: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {"status": "pass" if self.passed else "fail", "diagnostics": self.diagnostics}


def _scales():
    """(eps, rho) pairs shrinking by half, alternating, down to the floor."""
    eps, rho = EPS0, RHO0
    out = [(eps, rho)]
    toggle = True
    while eps * rho > SCALE_FLOOR:
        if toggle:
            eps *= SHRINK
        else:
            rho *= SHRINK
        toggle = not toggle
        out.append((eps, rho))
    return out


def coeff_range(fld: RationalField) -> float:
    """Dynamic range ``max|c| / min|c|`` over the nonzero coefficients of ``P`` and ``Q``.

    Reported per step; fields are kept in product form, so a large range does
    not affect the analysis.
    """
    mags = [abs(c) for c in fld.P.coeffs + fld.Q.coeffs if c != 0]
    return max(mags) / min(mags)


# ---------------------------------------------------------------------------
# analysis wrappers


def analyze_rational(fld: RationalField, cfg: IntegratorConfig | None = None):
    """Trace every simple pole and assemble the portraits."""
    seps = []
    for m in landmarks(fld):
        if m.kind == "PoleSaddle":
            seps.extend(trace_pole_separatrices(fld, m.id, cfg, blowup=False))
        elif m.kind in ("DegeneratePole", "DegenerateZero", "Center"):
            raise PortraitError(f"degenerate equilibrium {m.id} ({m.kind})")
    sus = [s.id for s in seps if s.suspicions]
    if sus:
        raise PortraitError(f"saddle connection suspected on {sus}")
    cp, cm, conn = build_portraits(fld, seps)
    return seps, cp, cm, conn


def antipolynomial_trees(
    fld: RationalField, cfg: IntegratorConfig | None = None, seps=None
) -> tuple[NcTree, NcTree]:
    """Red and blue nc-trees of an anti-polynomial field.

    Sources and sinks on the boundary circle are numbered by increasing
    angle; vertex ``i`` of the red tree is the ``i``-th source.  Pass
    ``seps`` to reuse already traced boundary separatrices.
    """
    bset = boundary_saddles(fld)
    if seps is None:
        seps = trace_boundary_separatrices(fld, cfg)
    src = [k for k, kd in enumerate(bset.kinds) if kd == "Source"]
    snk = [k for k, kd in enumerate(bset.kinds) if kd == "Sink"]
    so = {f"b{k}": i for i, k in enumerate(src)}
    si = {f"b{k}": i for i, k in enumerate(snk)}
    pairs = {}
    for s in seps:
        if s.terminal is None:
            raise PortraitError(f"separatrix {s.id} has no boundary terminal ({s.trajectory.verdict})")
        pairs.setdefault((s.owner, s.color), []).append(s.terminal)
    red, blue = [], []
    for (owner, color), terms in sorted(pairs.items()):
        table = so if color == "Red" else si
        a, b = (table[t] for t in terms)
        if a == b:
            raise PortraitError(f"both {color} branches of {owner} end at {terms[0]}")
        (red if color == "Red" else blue).append((a, b))
    t_red, t_blue = NcTree(len(src), tuple(red)), NcTree(len(snk), tuple(blue))
    if not (t_red.is_valid() and t_blue.is_valid()):
        raise PortraitError("portraits are not nc-trees")
    return t_red, t_blue


# ---------------------------------------------------------------------------
# verification


def _colored(g: PlaneMultigraph, color: str) -> PlaneMultigraph:
    """Same map with every vertex given ``color``."""
    return PlaneMultigraph(g.vertex_ids, (color,) * g.n_vertices, g.dart_vertex, g.twin, g.next_ccw)


def verify_realization(fld: RationalField, target, mode: str, cfg: IntegratorConfig | None = None) -> Verdict:
    """Analyze ``fld`` and compare with ``target`` under the orientation-preserving policy.

    ``target`` is a planar tree (``polynomial``), a pair ``(C+, C-)``
    (``rational``) or an :class:`NcTree` (``antipolynomial``, compared with the
    red tree).
    """
    try:
        if mode == "polynomial":
            g = target.graph() if isinstance(target, PlanarTree) else target
            want = canonical_code(g, "preserve", "allow_reversal").code
            got_g = reduced_connection_graph(fld, cfg=cfg)
            got = canonical_code(got_g, "preserve", "allow_reversal").code
            return Verdict(want == got, {"target": want, "realized": got})
        if mode == "rational":
            cp_t, cm_t = _colored(target[0], SOURCE), _colored(target[1], SINK)
            _, cp, cm, conn = analyze_rational(fld, cfg)
            want = (canonical_code(cp_t).code, canonical_code(cm_t).code)
            got = (canonical_code(cp).code, canonical_code(cm).code)
            dual = check_duality(cp, cm)
            problems = conn.validate()
            ok = want == got and dual.passed and not problems
            return Verdict(ok, {"target": list(want), "realized": list(got), "duality": dual.to_json(), "graph": problems})
        if mode == "antipolynomial":
            red, blue = antipolynomial_trees(fld, cfg)
            want = nc_canonical(target, "preserve")
            got = nc_canonical(red, "preserve")
            dual_ok = nc_canonical(dual_nc_tree(red), "preserve") == nc_canonical(blue, "preserve")
            ham = hamiltonian_data(fld)
            ok = want == got and dual_ok and ham.distinct
            return Verdict(
                ok,
                {
                    "target": want,
                    "realized": got,
                    "blue": nc_canonical(blue, "preserve"),
                    "dual_consistent": dual_ok,
                    "hamiltonian_distinct": ham.distinct,
                },
            )
    except (PortraitError, SeparatrixError, ValueError, RuntimeError) as exc:
        return Verdict(False, {"error": f"{type(exc).__name__}: {exc}"})
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# polynomial realization


def _walk_of(target) -> list:
    if isinstance(target, PlanarTree):
        return list(target.walk)
    if isinstance(target, PlaneMultigraph):
        if not target.is_tree():
            raise ValueError("target is not a tree")
        if target.n_darts == 0:
            return [target.vertex_ids[0]]
        return [target.vertex_ids[v] for v in contour_walk(target)]
    return list(target)


def _cyclic_match(a: Sequence, b: Sequence) -> int | None:
    """Shift ``s`` with ``b[(k+s) % n]`` a consistent relabelling of ``a[k]``."""
    n = len(a)
    if n != len(b):
        return None
    for s in range(n):
        fwd, bwd = {}, {}
        ok = True
        for k in range(n):
            x, y = a[k], b[(k + s) % n]
            if fwd.setdefault(x, y) != y or bwd.setdefault(y, x) != x:
                ok = False
                break
        if ok:
            return s
    return None


def _remove_leaf(walk: list) -> tuple[list, int]:
    """Drop the first leaf in walk order; returns the smaller walk and the corner index."""
    n = len(walk)
    count = {}
    for v in walk:
        count[v] = count.get(v, 0) + 1
    for i, v in enumerate(walk):
        if count[v] == 1:
            j = (i + 1) % n
            smaller = [walk[k] for k in range(n) if k not in (i, j)]
            # the corner of the parent preceding the leaf, in the smaller walk
            corner = (i - 1) % n
            corner -= sum(1 for k in (i, j) if k < corner)
            return smaller, corner % len(smaller)
    raise ValueError("tree has no leaf")


def realize_polynomial(target, verify_steps: bool = True) -> tuple[RationalField, RealizationPlan]:
    """Polynomial field whose reduced connection graph is the planar tree ``target``.

    Returns the field (product form) and the realization plan.  Use
    ``field.P`` for the coefficient form.
    """
    walk = _walk_of(target)
    plan = RealizationPlan("polynomial", {"walk": list(walk)})
    fld = _realize_poly(walk, plan, verify_steps)
    plan.field = fld
    return fld, plan


def _realize_poly(walk: list, plan: RealizationPlan, verify_steps: bool) -> RationalField:
    d = len(set(walk))
    if d == 1:
        fld = build_field([0j], [], 1.0, mode="polynomial")
        plan.steps.append({"step": "base", "d": 1})
        return fld
    if d == 2:
        fld = build_field([1.0, -1.0], [], 1.0)
        plan.steps.append({"step": "base", "d": 2, "zeros": [[1, 0], [-1, 0]]})
        return fld
    smaller, corner = _remove_leaf(walk)
    base = _realize_poly(smaller, plan, verify_steps)
    seps = trace_boundary_separatrices(base)
    realized = [s.terminal for s in sorted(seps, key=lambda s: int(s.owner[1:]))]
    shift = _cyclic_match(smaller, realized)
    if shift is None:
        raise RealizationError(f"intermediate tree {smaller} not realized", plan)
    bset = boundary_saddles(base)
    n_b = len(bset.angles)
    preferred = (corner + shift) % n_b
    target_tree = PlanarTree(tuple(walk))
    scales = _scales()
    attempts = [(sc, preferred) for sc in scales] + [(sc, k) for sc in scales for k in range(n_b) if k != preferred]
    for n_try, ((eps, rho), k) in enumerate(attempts, 1):
        delta = eps * rho
        alpha = bset.angles[k]
        u = cmath.exp(1j * alpha)
        zeros = [delta * e for e in base.zeros] + [u]
        a = -base.a / u  # leading coefficient of P^delta(w) (1 - e^{-i alpha} w)
        cand = build_field(zeros, [], a)
        v = verify_realization(cand, target_tree, "polynomial") if verify_steps else Verdict(True)
        if v.passed:
            plan.steps.append(
                {
                    "step": "pluck_leaf",
                    "d": d,
                    "corner": k,
                    "preferred_corner": preferred,
                    "alpha": alpha,
                    "eps": eps,
                    "rho": rho,
                    "delta": delta,
                    "attempts": n_try,
                    "coeff_range": coeff_range(cand),
                }
            )
            return cand
    raise RealizationError(f"no verified realization for {walk}", plan)


# ---------------------------------------------------------------------------
# rational realization


def _dual_target(cminus: PlaneMultigraph) -> PlaneMultigraph:
    return cminus.dual()


def _contract(cm: PlaneMultigraph, d: int):
    """Contract the blue edge of dart ``d``; returns (graph, J1, J2) in new dart indices."""
    t = cm.twin[d]
    xs = cm._cycle_after(d)
    ys = cm._cycle_after(t)
    keep = [e for e in range(cm.n_darts) if e not in (d, t)]
    new_index = {e: i for i, e in enumerate(keep)}
    g = cm.contract_edge(d)
    return g, [new_index[x] for x in xs], [new_index[y] for y in ys]


def _ccw_from(a: float, b: float) -> float:
    """Counterclockwise arc length from angle ``a`` to angle ``b`` in ``[0, 2 pi)``."""
    return (b - a) % (2 * math.pi)


def _wedge(angles1: list[float], angles2: list[float]) -> tuple[float, float]:
    """Midpoints ``(m_minus, m_plus)`` of the gaps separating two contiguous groups.

    The counterclockwise arc from ``m_minus`` to ``m_plus`` contains group 1.
    """
    if not angles1 and not angles2:
        return -math.pi / 2, math.pi / 2
    if not angles2 or not angles1:
        group = angles1 or angles2
        ref = group[0]
        rel = sorted(_ccw_from(ref, x) for x in group)
        gaps = [(rel[(i + 1) % len(rel)] - rel[i]) % (2 * math.pi) or 2 * math.pi for i in range(len(rel))]
        i = max(range(len(gaps)), key=lambda j: gaps[j])
        lo = ref + rel[i]
        gap = gaps[i]
        if angles1:
            # wedge covers the whole group; both red separatrices in the gap
            return lo + 2 * gap / 3, lo + gap / 3
        return lo + gap / 3, lo + 2 * gap / 3
    ref = angles1[0]
    r1 = sorted(_ccw_from(ref, x) for x in angles1)
    r2 = sorted(_ccw_from(ref, x) for x in angles2)
    last1, first2, last2 = r1[-1], r2[0], r2[-1]
    m_plus = ref + 0.5 * (last1 + first2)
    m_minus = ref + 0.5 * (last2 + 2 * math.pi)
    return m_minus, m_plus


def _split_sink(g: RationalField, delta: float, q: float, theta: float) -> RationalField:
    e1 = cmath.exp(1j * theta)
    zeros = [z for z in g.zeros if z != 0] + [delta * e1, -q * delta * e1]
    if len(zeros) != len(g.zeros) + 1:
        raise RealizationError("merged sink is not at the origin")
    return build_field(zeros, list(g.poles) + [0j], g.a, mode=None)


def _normalizing_map(fld: RationalField, sink: SpherePoint) -> tuple[np.ndarray, float]:
    """Mobius map sending ``sink`` to 0 with the nearest other special point at distance 1."""
    pts = []
    if sink.is_infinity():
        base = np.array([[0, 1], [1, 0]], complex)
        for m in landmarks(fld):
            if not m.point.is_infinity():
                z = m.point.in_chart("Z")
                if cmath.isfinite(z):
                    pts.append(abs(z))
    else:
        s = sink.w
        base = np.array([[1, -s], [0, 1]], complex)
        pts = [abs(m.point.w - s) for m in landmarks(fld) if not m.point.is_infinity()]
    pts = [p for p in pts if p > 0]
    lam = min(pts) if pts else 1.0
    m = np.array([[1 / lam, 0], [0, 1]], complex) @ base
    return m, lam


def _red_wedge(fld: RationalField, pole_id: str, radius: float, theta: float) -> tuple[float, float]:
    seps = trace_pole_separatrices(fld, pole_id, blowup=False)
    angs = []
    for s in seps:
        if s.color == "Red":
            w = crossing_point(fld, s.trajectory, radius)
            if w is None:
                raise RealizationError("new red separatrix does not leave the splitting disk")
            angs.append(cmath.phase(w))
    a, b = angs
    # order so that the ccw arc lo -> hi contains theta
    if _ccw_from(a, theta) <= _ccw_from(a, b):
        lo, hi = a, b
    else:
        lo, hi = b, a
    return lo, hi


def realize_rational(
    cplus: PlaneMultigraph, cminus: PlaneMultigraph | None = None, verify_steps: bool = True
) -> tuple[RationalField, RealizationPlan]:
    """Rational field whose portraits are the dual pair ``(cplus, cminus)``.

    ``cminus`` defaults to the dual of ``cplus``.  Colors are taken to be
    sources for ``cplus`` and sinks for ``cminus``.
    """
    cp = _colored(cplus, SOURCE)
    cm = _colored(cminus if cminus is not None else cp.dual(), SINK)
    for g in (cp, cm):
        if not g.is_connected() or not g.is_planar():
            raise ValueError("targets must be connected plane graphs")
    if cp.n_edges != cm.n_edges or cp.n_vertices + cm.n_vertices != cp.n_edges + 2:
        raise ValueError("targets violate the vertex/edge count relation")
    if canonical_code(cp.dual()).code != canonical_code(cm).code:
        raise ValueError("targets are not mutually dual")
    plan = RealizationPlan("rational", {"C+": canonical_code(cp).code, "C-": canonical_code(cm).code})
    fld = _realize_rat(cp, cm, plan, verify_steps)
    plan.field = fld
    if verify_steps:
        v = verify_realization(fld, (cp, cm), "rational")
        plan.steps.append({"step": "final_check", "passed": v.passed})
        if not v.passed:
            raise RealizationError(f"final verification failed: {v.diagnostics}", plan)
    return fld, plan


def _realize_rat(cp: PlaneMultigraph, cm: PlaneMultigraph, plan: RealizationPlan, verify_steps: bool) -> RationalField:
    E = cm.n_edges
    if E == 0:
        fld = build_field([1.0, -1.0], [], 1.0)
        plan.steps.append({"step": "base", "field": "w^2-1"})
        return fld
    nonloop = [d for d in range(cm.n_darts) if not cm.is_loop(d)]
    if not nonloop:
        # C- is a bouquet and C+ a tree: realize the time reversal
        rev = _realize_rat(cm.swap_colors(), cp.swap_colors(), plan, verify_steps)
        fld = rev.with_a(-rev.a)
        plan.steps.append({"step": "time_reversal", "edges": E})
        return fld
    d = min(nonloop)
    cm2, j1, j2 = _contract(cm, d)
    cp2 = cm2.dual()
    base = _realize_rat(cp2, cm2, plan, verify_steps)
    _, cp_b, cm_b, _ = analyze_rational(base)
    iso = find_isomorphism(cm2, cm_b)
    if iso is None:
        raise RealizationError("intermediate portrait mismatch", plan)
    if j1 or j2:
        any_dart = iso[(j1 or j2)[0]]
        sink_id = cm_b.vertex_ids[cm_b.dart_vertex[any_dart]]
    else:
        sink_id = cm_b.vertex_ids[0]
    marks = {m.id: m for m in landmarks(base)}
    sink = marks[sink_id].point
    mob, lam = _normalizing_map(base, sink)
    g = apply_mobius(base, mob)
    seps_by = {}
    seps_all = []
    for m in landmarks(base):
        if m.kind == "PoleSaddle":
            seps_all.extend(trace_pole_separatrices(base, m.id, blowup=False))
    for s in seps_all:
        seps_by[(s.owner, s.color, s.branch)] = s
    target = (cp, cm)
    tried = []
    for eps, rho in _scales():
        delta = eps * rho
        chart_r = rho * lam
        ang1, ang2 = [], []
        for group, out in ((j1, ang1), (j2, ang2)):
            for x in group:
                lab = cm_b.dart_labels[iso[x]]
                sep = seps_by[lab]
                out.append(arrival_angle(base, sep, sink, chart_r))
        m_minus, m_plus = _wedge(ang1, ang2)
        L = _ccw_from(m_minus, m_plus) or 2 * math.pi
        q = 2 * math.pi / L - 1
        theta = m_minus + L / 2
        record = {"eps": eps, "rho": rho, "delta": delta, "q0": q, "theta0": theta}
        cand = None
        try:
            trial = _split_sink(g, delta, q, theta)
            pole_id = _pole_at_origin(trial)
            lo, hi = _red_wedge(trial, pole_id, rho, theta)
            # one secant-type correction on measured angles
            L_meas = _ccw_from(lo, hi)
            center = lo + L_meas / 2
            theta = theta + _wrap(m_minus + L / 2 - center)
            offset = L_meas - 2 * math.pi / (1 + q)
            L_fix = min(max(L - offset, 1e-3), 2 * math.pi - 1e-3)
            q = max(2 * math.pi / L_fix - 1, 1e-3)
            cand = _split_sink(g, delta, q, theta)
            record.update({"q": q, "theta": theta, "measured_wedge": [lo, hi]})
        except (RealizationError, PortraitError, SeparatrixError, RuntimeError, ValueError) as exc:
            record["error"] = str(exc)
        if cand is not None:
            v = verify_realization(cand, target, "rational") if verify_steps else Verdict(True)
            record["passed"] = v.passed
            tried.append(record)
            if v.passed:
                plan.steps.append({"step": "contract_blue_edge", "edges": E, "J1": len(j1), "J2": len(j2), **record, "attempts": len(tried), "coeff_range": coeff_range(cand)})
                return cand
        else:
            tried.append(record)
    raise RealizationError(f"rational step with {E} edges failed: {tried[-1]}", plan)


def _wrap(x: float) -> float:
    return (x + math.pi) % (2 * math.pi) - math.pi


def _pole_at_origin(fld: RationalField) -> str:
    for m in landmarks(fld):
        if m.kind == "PoleSaddle" and m.point.chart == "W" and m.point.value == 0:
            return m.id
    raise RealizationError("split pole not found")


# ---------------------------------------------------------------------------
# anti-polynomial realization


def _short_leaf(t: NcTree) -> tuple[int, int] | None:
    """A leaf joined by a chord to an adjacent circle point: (leaf, neighbour)."""
    n = t.n
    deg = [0] * n
    for a, b in t.edges:
        deg[a] += 1
        deg[b] += 1
    for a, b in t.edges:
        if (b - a) % n in (1, n - 1):
            if deg[a] == 1:
                return a, b
            if deg[b] == 1:
                return b, a
    return None


def _drop_vertex(t: NcTree, v: int) -> NcTree:
    n = t.n
    relabel = lambda x: x if x < v else x - 1  # noqa: E731
    edges = tuple((relabel(a), relabel(b)) for a, b in t.edges if v not in (a, b))
    return NcTree(n - 1, edges)


def realize_antipolynomial(target: NcTree, verify_steps: bool = True) -> tuple[RationalField, RealizationPlan]:
    """Anti-polynomial field ``w' = conj(Q)`` whose red nc-tree is ``target``.

    The field is stored as ``1/Q`` (its regularization is ``conj(Q)``); the
    saddles are the zeros of ``Q``, available as ``field.poles``.
    """
    if not target.is_valid():
        raise ValueError("target is not an nc-tree")
    plan = RealizationPlan("antipolynomial", {"nc_tree": nc_canonical(target, "preserve")})
    fld = _realize_anti(target, plan, verify_steps)
    plan.field = fld
    return fld, plan


def _realize_anti(t: NcTree, plan: RealizationPlan, verify_steps: bool) -> RationalField:
    if t.n == 2:
        fld = build_field([], [0j], 1.0)
        plan.steps.append({"step": "base", "Q": "w"})
        return fld
    leaf = _short_leaf(t)
    if leaf is None:
        raise RealizationError("no short leaf (internal error)", plan)
    smaller = _drop_vertex(t, leaf[0])
    base = _realize_anti(smaller, plan, verify_steps)
    bset = boundary_saddles(base)
    n_b = len(bset.angles)
    half = math.pi / n_b
    # directions a quarter spacing away from the equilibria; the symmetric
    # ones tend to produce saddle connections
    candidates = [(bset.angles[0] + (k + 0.5) * half) % (2 * math.pi) for k in range(2 * n_b)]
    tried = 0
    for eps, rho in _scales():
        delta = eps * rho
        for phi in candidates:
            u = cmath.exp(1j * phi)
            poles = [delta * p for p in base.poles] + [u]
            # 1/Q with Q = Q^delta(w) (1 - e^{-i phi} w)
            cand = build_field([], poles, -u * base.a)
            tried += 1
            if not verify_steps:
                ok = True
            elif not hamiltonian_data(cand).distinct:
                continue
            else:
                ok = verify_realization(cand, t, "antipolynomial", SCREEN_CFG).passed
                ok = ok and verify_realization(cand, t, "antipolynomial").passed
            if ok:
                plan.steps.append(
                    {
                        "step": "short_leaf",
                        "dprime": t.n - 1,
                        "phi": phi,
                        "eps": eps,
                        "rho": rho,
                        "delta": delta,
                        "attempts": tried,
                        "coeff_range": coeff_range(cand),
                    }
                )
                return cand
    raise RealizationError(f"anti-polynomial step for {nc_canonical(t, 'preserve')} failed", plan)


def q_polynomial(fld: RationalField) -> ComplexPoly:
    """``Q`` of an anti-polynomial field ``1/Q``: roots are the poles, leading coefficient ``1/a``."""
    return from_roots(fld.poles, 1 / fld.a)

"""Blow-up and blow-down portraits as embedded plane multigraphs.

A graph is stored as a combinatorial map: darts (half-edges) carry their
vertex, their twin (the involution ``alpha``) and their counterclockwise
successor around the vertex (the rotation ``sigma``).  Faces are the orbits
of ``sigma^-1 o alpha``; each such orbit traces a face boundary keeping the
face on the left.
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from .field import RationalField, SpherePoint
from .flow import ConvergedTo, dopri_step, landmarks
from .separatrix import Separatrix

SOURCE = "RedSource"
SINK = "BlueSink"
_COLOR_CHAR = {SOURCE: "R", SINK: "B", None: "N"}
_SWAP = {SOURCE: SINK, SINK: SOURCE, None: None}


class PortraitError(RuntimeError):
    """The separatrix data do not assemble into a portrait."""


@dataclass(frozen=True)
class PlaneMultigraph:
    """Embedded multigraph given by a rotation system.

    Attributes
    ----------
    vertex_ids : tuple of str
    colors : tuple of str
        ``RedSource``, ``BlueSink`` or ``None`` per vertex.
    dart_vertex, twin, next_ccw : tuple of int
        Per-dart vertex index, twin dart and counterclockwise successor.
    dart_labels : tuple
        Optional per-dart label ``(saddle, color, branch)``.
    """

    vertex_ids: tuple
    colors: tuple
    dart_vertex: tuple
    twin: tuple
    next_ccw: tuple
    dart_labels: tuple = ()

    def __post_init__(self):
        n = len(self.dart_vertex)
        if len(self.twin) != n or len(self.next_ccw) != n:
            raise ValueError("dart arrays differ in length")
        for d in range(n):
            t = self.twin[d]
            if t == d or self.twin[t] != d:
                raise ValueError(f"twin is not a fixed-point-free involution at dart {d}")
            if self.dart_vertex[self.next_ccw[d]] != self.dart_vertex[d]:
                raise ValueError(f"rotation leaves the vertex at dart {d}")
        if sorted(self.next_ccw) != list(range(n)):
            raise ValueError("rotation is not a permutation")
        if not self.dart_labels:
            object.__setattr__(self, "dart_labels", (None,) * n)

    # ----- sizes

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_ids)

    @property
    def n_darts(self) -> int:
        return len(self.dart_vertex)

    @property
    def n_edges(self) -> int:
        return self.n_darts // 2

    def darts_at(self, v: int) -> list[int]:
        """Darts at vertex ``v`` in counterclockwise order (starting anywhere)."""
        start = next((d for d in range(self.n_darts) if self.dart_vertex[d] == v), None)
        if start is None:
            return []
        out = [start]
        d = self.next_ccw[start]
        while d != start:
            out.append(d)
            d = self.next_ccw[d]
        return out

    def prev_ccw(self, d: int) -> int:
        e = d
        while self.next_ccw[e] != d:
            e = self.next_ccw[e]
        return e

    def face_step(self, d: int) -> int:
        """Next dart along the face on the left of ``d``."""
        return self.prev_ccw(self.twin[d])

    def faces(self) -> list[list[int]]:
        """Dart orbits of the face permutation (edgeless components excluded)."""
        seen = [False] * self.n_darts
        out = []
        for d in range(self.n_darts):
            if seen[d]:
                continue
            orbit = []
            e = d
            while not seen[e]:
                seen[e] = True
                orbit.append(e)
                e = self.face_step(e)
            out.append(orbit)
        return out

    def components(self) -> list[list[int]]:
        parent = list(range(self.n_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for d in range(self.n_darts):
            a, b = find(self.dart_vertex[d]), find(self.dart_vertex[self.twin[d]])
            if a != b:
                parent[a] = b
        groups = defaultdict(list)
        for v in range(self.n_vertices):
            groups[find(v)].append(v)
        return list(groups.values())

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def face_count(self) -> int:
        """Faces of the embedding in the sphere."""
        comps = self.components()
        if not comps:
            return 1
        per = 0
        face_orbits = self.faces()
        for comp in comps:
            cs = set(comp)
            k = sum(1 for f in face_orbits if self.dart_vertex[f[0]] in cs)
            per += max(k, 1)
        return per - (len(comps) - 1)

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.face_count()

    def is_planar(self) -> bool:
        return self.euler_characteristic() == 1 + max(len(self.components()), 1)

    def degree(self, v: int) -> int:
        return sum(1 for d in range(self.n_darts) if self.dart_vertex[d] == v)

    def is_tree(self) -> bool:
        return self.is_connected() and self.n_edges == self.n_vertices - 1

    def is_loop(self, d: int) -> bool:
        return self.dart_vertex[d] == self.dart_vertex[self.twin[d]]

    # ----- transformations

    def mirror(self) -> "PlaneMultigraph":
        """Same graph with reversed orientation."""
        inv = [0] * self.n_darts
        for d, e in enumerate(self.next_ccw):
            inv[e] = d
        return PlaneMultigraph(self.vertex_ids, self.colors, self.dart_vertex, self.twin, tuple(inv), self.dart_labels)

    def swap_colors(self) -> "PlaneMultigraph":
        return PlaneMultigraph(
            self.vertex_ids, tuple(_SWAP[c] for c in self.colors), self.dart_vertex, self.twin, self.next_ccw, self.dart_labels
        )

    def relabel(self, vperm: Sequence[int], dperm: Sequence[int]) -> "PlaneMultigraph":
        """Renumber vertices by ``vperm[old] = new`` and darts by ``dperm[old] = new``."""
        nv, nd = self.n_vertices, self.n_darts
        vid = [None] * nv
        col = [None] * nv
        for old, new in enumerate(vperm):
            vid[new] = self.vertex_ids[old]
            col[new] = self.colors[old]
        dv = [0] * nd
        tw = [0] * nd
        nx = [0] * nd
        lab = [None] * nd
        for old, new in enumerate(dperm):
            dv[new] = vperm[self.dart_vertex[old]]
            tw[new] = dperm[self.twin[old]]
            nx[new] = dperm[self.next_ccw[old]]
            lab[new] = self.dart_labels[old]
        return PlaneMultigraph(tuple(vid), tuple(col), tuple(dv), tuple(tw), tuple(nx), tuple(lab))

    def dual(self) -> "PlaneMultigraph":
        """Dual map; dual vertices are faces, colors are swapped.

        Dual dart ``d`` leaves the face on the left of ``d`` and crosses it.
        """
        if not self.is_connected():
            raise ValueError("dual of a disconnected map")
        if self.n_darts == 0:
            col = _SWAP[self.colors[0]] if self.colors else None
            return PlaneMultigraph(("f0",), (col,), (), (), ())
        faces = self.faces()
        fv = [0] * self.n_darts
        for i, f in enumerate(faces):
            for d in f:
                fv[d] = i
        nxt = tuple(self.face_step(d) for d in range(self.n_darts))
        base = self.colors[0] if self.colors else None
        col = _SWAP[base]
        return PlaneMultigraph(
            tuple(f"f{i}" for i in range(len(faces))),
            tuple(col for _ in faces),
            tuple(fv),
            self.twin,
            nxt,
            self.dart_labels,
        )

    def delete_edge(self, d: int) -> "PlaneMultigraph":
        t = self.twin[d]
        keep = [e for e in range(self.n_darts) if e not in (d, t)]
        removed = {d, t}
        new_index = {e: i for i, e in enumerate(keep)}
        nn = []
        for e in keep:
            f = self.next_ccw[e]
            while f in removed:
                f = self.next_ccw[f]
            nn.append(new_index[f])
        return PlaneMultigraph(
            self.vertex_ids,
            self.colors,
            tuple(self.dart_vertex[e] for e in keep),
            tuple(new_index[self.twin[e]] for e in keep),
            tuple(nn),
            tuple(self.dart_labels[e] for e in keep),
        )

    def contract_edge(self, d: int) -> "PlaneMultigraph":
        """Contract the non-loop edge of dart ``d``; the merged vertex keeps the id of ``d``'s vertex."""
        t = self.twin[d]
        s1, s2 = self.dart_vertex[d], self.dart_vertex[t]
        if s1 == s2:
            raise ValueError("cannot contract a loop")
        xs = self._cycle_after(d)
        ys = self._cycle_after(t)
        merged = xs + ys
        keep = [e for e in range(self.n_darts) if e not in (d, t)]
        new_index = {e: i for i, e in enumerate(keep)}
        vmap = {}
        vids, cols = [], []
        for v in range(self.n_vertices):
            if v == s2:
                continue
            vmap[v] = len(vids)
            vids.append(self.vertex_ids[v])
            cols.append(self.colors[v])
        vmap[s2] = vmap[s1]
        nxt = {}
        for e in keep:
            f = self.next_ccw[e]
            nxt[e] = f
        if merged:
            for i, e in enumerate(merged):
                nxt[e] = merged[(i + 1) % len(merged)]
        return PlaneMultigraph(
            tuple(vids),
            tuple(cols),
            tuple(vmap[self.dart_vertex[e]] for e in keep),
            tuple(new_index[self.twin[e]] for e in keep),
            tuple(new_index[nxt[e]] for e in keep),
            tuple(self.dart_labels[e] for e in keep),
        )

    def _cycle_after(self, d: int) -> list[int]:
        out = []
        e = self.next_ccw[d]
        while e != d:
            out.append(e)
            e = self.next_ccw[e]
        return out

    def is_bridge(self, d: int) -> bool:
        g = self.delete_edge(d)
        return len(g.components()) > len(self.components())

    # ----- serialization

    def to_json(self) -> dict:
        edges = []
        for d in range(self.n_darts):
            if d < self.twin[d]:
                lab = self.dart_labels[d]
                edges.append({"dart": d, "saddle": lab[0] if lab else None})
        return {
            "vertices": [
                {"id": self.vertex_ids[v], "color": self.colors[v], "index": 2 if self.colors[v] == SOURCE else 0}
                for v in range(self.n_vertices)
            ],
            "darts": [
                {"id": d, "vertex": self.dart_vertex[d], "twin": self.twin[d], "next_ccw": self.next_ccw[d]}
                for d in range(self.n_darts)
            ],
            "edges": edges,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PlaneMultigraph":
        vs = data["vertices"]
        ds = sorted(data["darts"], key=lambda x: x["id"])
        return cls(
            tuple(v["id"] for v in vs),
            tuple(v.get("color") for v in vs),
            tuple(d["vertex"] for d in ds),
            tuple(d["twin"] for d in ds),
            tuple(d["next_ccw"] for d in ds),
        )


def from_rotations(
    rotations: Sequence[Sequence], colors: Sequence | None = None, vertex_ids: Sequence | None = None
) -> PlaneMultigraph:
    """Build a map from per-vertex counterclockwise lists of edge names.

    Every edge name must occur exactly twice overall (a loop occurs twice at
    one vertex).
    """
    nv = len(rotations)
    dart_vertex, next_ccw, names = [], [], []
    for v, rot in enumerate(rotations):
        base = len(dart_vertex)
        k = len(rot)
        for i, name in enumerate(rot):
            dart_vertex.append(v)
            next_ccw.append(base + (i + 1) % k)
            names.append(name)
    where = defaultdict(list)
    for d, name in enumerate(names):
        where[name].append(d)
    twin = [0] * len(names)
    for name, ds in where.items():
        if len(ds) != 2:
            raise ValueError(f"edge {name!r} occurs {len(ds)} times")
        twin[ds[0]], twin[ds[1]] = ds[1], ds[0]
    colors = tuple(colors) if colors is not None else (None,) * nv
    vertex_ids = tuple(vertex_ids) if vertex_ids is not None else tuple(f"v{i}" for i in range(nv))
    return PlaneMultigraph(vertex_ids, colors, tuple(dart_vertex), tuple(twin), tuple(next_ccw), tuple((n, None, None) for n in names))


def from_contour(walk: Sequence, colors: dict | None = None) -> PlaneMultigraph:
    """Plane tree from the cyclic vertex sequence of its contour walk.

    Step ``k`` traverses dart ``d_k = (walk[k] -> walk[k+1])`` and the
    rotation obeys ``next_ccw(twin(d_{k-1})) = d_k``.  A single-vertex walk
    gives the edgeless tree.
    """
    walk = list(walk)
    n = len(walk)
    order = list(dict.fromkeys(walk))
    vidx = {v: i for i, v in enumerate(order)}
    cols = tuple((colors or {}).get(v) for v in order)
    if n <= 1:
        return PlaneMultigraph(tuple(order), cols, (), (), ())
    if n % 2:
        raise ValueError("contour walk must have even length")
    pair_pos = defaultdict(list)
    for k in range(n):
        pair_pos[(walk[k], walk[(k + 1) % n])].append(k)
    twin = [None] * n
    for k in range(n):
        a, b = walk[k], walk[(k + 1) % n]
        if a == b:
            raise ValueError("contour walk repeats a vertex in consecutive steps")
        back = pair_pos.get((b, a), [])
        if len(back) != 1 or len(pair_pos[(a, b)]) != 1:
            raise ValueError(f"edge {a}-{b} is not traversed exactly once in each direction")
        twin[k] = back[0]
    nxt = [None] * n
    for k in range(n):
        nxt[twin[(k - 1) % n]] = k
    g = PlaneMultigraph(tuple(order), cols, tuple(vidx[w] for w in walk), tuple(twin), tuple(nxt))
    if not g.is_tree():
        raise ValueError("contour walk does not describe a tree")
    return g


def contour_walk(g: PlaneMultigraph, start: int = 0) -> list[int]:
    """Vertex sequence of the contour walk of a tree starting at dart ``start``."""
    if g.n_darts == 0:
        return [0]
    out = []
    d = start
    for _ in range(g.n_darts):
        out.append(g.dart_vertex[d])
        d = g.next_ccw[g.twin[d]]
    if d != start:
        raise ValueError("contour walk did not close; not a tree")
    return out


# ---------------------------------------------------------------------------
# canonical codes


@dataclass(frozen=True)
class CanonicalCode:
    code: str
    orientation_policy: str = "preserve"
    time_policy: str = "directed"

    def __str__(self) -> str:
        return self.code


def _rooted_code(g: PlaneMultigraph, root: int, colors: Sequence) -> tuple:
    labels = {root: 0}
    order = [root]
    i = 0
    while i < len(order):
        d = order[i]
        for e in (g.next_ccw[d], g.twin[d]):
            if e not in labels:
                labels[e] = len(order)
                order.append(e)
        i += 1
    return tuple((labels[g.next_ccw[d]], labels[g.twin[d]], _COLOR_CHAR[colors[g.dart_vertex[d]]]) for d in order)


def _component_code(g: PlaneMultigraph, comp: Sequence[int], variants: Sequence[tuple]) -> tuple:
    cs = set(comp)
    darts = [d for d in range(g.n_darts) if g.dart_vertex[d] in cs]
    best = None
    for gg, cols in variants:
        if not darts:
            cand = (("V", _COLOR_CHAR[cols[comp[0]]]),)
        else:
            cand = min(_rooted_code(gg, r, cols) for r in darts)
        if best is None or cand < best:
            best = cand
    return best


def _variants(g: PlaneMultigraph, orientation: str, time: str) -> list[tuple]:
    gs = [g]
    if orientation == "allow_reflection":
        gs.append(g.mirror())
    out = []
    for gg in gs:
        out.append((gg, gg.colors))
        if time == "allow_reversal":
            out.append((gg, tuple(_SWAP[c] for c in gg.colors)))
    return out


def _format(code: tuple) -> str:
    return ";".join(",".join(str(x) for x in tok) for tok in code)


def canonical_code(g: PlaneMultigraph, orientation: str = "preserve", time: str = "directed") -> CanonicalCode:
    """Canonical string of an embedded graph under the given policies.

    For every root dart the darts are numbered in breadth-first order along
    ``next_ccw`` and ``twin``; the code lists ``(label of next_ccw, label of
    twin, vertex color)`` per dart and the lexicographic minimum over roots
    is kept.  Components are coded separately and sorted.
    """
    if orientation not in ("preserve", "allow_reflection"):
        raise ValueError(f"unknown orientation policy {orientation!r}")
    if time not in ("directed", "allow_reversal"):
        raise ValueError(f"unknown time policy {time!r}")
    comps = g.components()
    if time == "allow_reversal" and len(comps) > 1:
        # color swap acts on all components at once
        codes = []
        for gg, cols in _variants(g, orientation, "directed"):
            for c in (cols, tuple(_SWAP[x] for x in cols)):
                h = PlaneMultigraph(gg.vertex_ids, c, gg.dart_vertex, gg.twin, gg.next_ccw, gg.dart_labels)
                codes.append("|".join(sorted(_format(_component_code(h, comp, [(h, c)])) for comp in h.components())))
        return CanonicalCode(min(codes), orientation, time)
    if len(comps) > 1 and orientation == "allow_reflection":
        codes = []
        for gg, cols in _variants(g, orientation, "directed"):
            codes.append("|".join(sorted(_format(_component_code(gg, comp, [(gg, cols)])) for comp in comps)))
        return CanonicalCode(min(codes), orientation, time)
    variants = _variants(g, orientation, time)
    parts = sorted(_format(_component_code(g, comp, variants)) for comp in comps)
    return CanonicalCode("|".join(parts), orientation, time)


def graph_from_code(code: str) -> PlaneMultigraph:
    """Rebuild an embedded graph from a canonical code string.

    The result is isomorphic (under the policies the code was made with) to
    any graph carrying that code; vertex ids are ``v0, v1, ...``.
    """
    chars = {v: k for k, v in _COLOR_CHAR.items()}
    ids, colors, dv, tw, nx = [], [], [], [], []
    for part in code.split("|"):
        toks = [t.split(",") for t in part.split(";")]
        if len(toks) == 1 and toks[0][0] == "V":
            ids.append(f"v{len(ids)}")
            colors.append(chars[toks[0][1]])
            continue
        base = len(dv)
        sigma = [base + int(t[0]) for t in toks]
        alpha = [base + int(t[1]) for t in toks]
        vert = [None] * len(toks)
        for d in range(len(toks)):
            if vert[d] is not None:
                continue
            v = len(ids)
            ids.append(f"v{v}")
            colors.append(chars[toks[d][2]])
            e = d
            while vert[e] is None:
                vert[e] = v
                e = sigma[e] - base
        dv.extend(vert)
        tw.extend(alpha)
        nx.extend(sigma)
    return PlaneMultigraph(tuple(ids), tuple(colors), tuple(dv), tuple(tw), tuple(nx))


def find_isomorphism(g1: PlaneMultigraph, g2: PlaneMultigraph, use_colors: bool = True) -> dict[int, int] | None:
    """Orientation-preserving dart bijection ``g1 -> g2`` respecting rotation and twins.

    Only connected graphs with at least one edge are supported.  Returns
    ``None`` when the maps are not isomorphic.
    """
    if g1.n_darts != g2.n_darts or g1.n_vertices != g2.n_vertices:
        return None
    if g1.n_darts == 0:
        return {} if (not use_colors or g1.colors == g2.colors) else None
    c1 = g1.colors if use_colors else (None,) * g1.n_vertices
    c2 = g2.colors if use_colors else (None,) * g2.n_vertices
    ref = _rooted_code(g1, 0, c1)
    for r in range(g2.n_darts):
        if _rooted_code(g2, r, c2) == ref:
            o1 = _bfs_order(g1, 0)
            o2 = _bfs_order(g2, r)
            return dict(zip(o1, o2))
    return None


def _bfs_order(g: PlaneMultigraph, root: int) -> list[int]:
    seen = {root}
    order = [root]
    i = 0
    while i < len(order):
        d = order[i]
        for e in (g.next_ccw[d], g.twin[d]):
            if e not in seen:
                seen.add(e)
                order.append(e)
        i += 1
    return order


# ---------------------------------------------------------------------------
# building portraits from traced separatrices


@dataclass(frozen=True)
class ConnectionGraph:
    """Directed graph of equilibria graded by Morse index."""

    vertices: tuple  # (id, index)
    edges: tuple  # (from id, to id, separatrix id)

    def validate(self) -> list[str]:
        idx = dict(self.vertices)
        problems = []
        for a, b, sid in self.edges:
            if idx.get(a, -9) - idx.get(b, -9) != 1:
                problems.append(f"edge {sid} does not drop the index by one")
        for v, i in self.vertices:
            if i == 1:
                n_in = sum(1 for e in self.edges if e[1] == v)
                n_out = sum(1 for e in self.edges if e[0] == v)
                if (n_in, n_out) != (2, 2):
                    problems.append(f"saddle {v} has {n_in} in / {n_out} out")
        return problems

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": v, "index": i} for v, i in self.vertices],
            "edges": [{"from": a, "to": b, "separatrix": s} for a, b, s in self.edges],
        }


def _chart_point(p: SpherePoint, chart: str) -> complex:
    return p.in_chart(chart)


def arrival_angle(fld: RationalField, sep: Separatrix, vertex: SpherePoint, radius: float) -> float:
    """Argument, in the vertex's chart, where the separatrix last enters the disk of ``radius`` around it."""
    traj = sep.trajectory
    chart = vertex.chart
    v = vertex.value
    rel = []
    for s in traj.samples:
        y = s.point.in_chart(chart)
        rel.append(abs(y - v) if cmath.isfinite(y) else math.inf)
    idx = None
    for i in range(len(rel) - 2, -1, -1):
        if rel[i] >= radius > rel[i + 1]:
            idx = i
            break
    if idx is None:
        # already inside at the seed: use the first sample
        y = traj.samples[0].point.in_chart(chart)
        return cmath.phase(y - v)
    s = traj.samples[idx]
    factor = traj.sign * cmath.exp(1j * traj.theta)
    lo, hi = 0.0, s.h
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        y, _ = dopri_step(fld, s.point.chart, s.point.value, mid, traj.regularized, factor)
        r = abs(SpherePoint(s.point.chart, y).in_chart(chart) - v)
        if r >= radius:
            lo = mid
        else:
            hi = mid
    y, _ = dopri_step(fld, s.point.chart, s.point.value, 0.5 * (lo + hi), traj.regularized, factor)
    return cmath.phase(SpherePoint(s.point.chart, y).in_chart(chart) - v)


ROTATION_RADIUS = 1e-3


def _portrait(fld: RationalField, seps: Sequence[Separatrix], color: str, kind: str, vcolor: str) -> PlaneMultigraph:
    marks = {m.id: m for m in landmarks(fld)}
    verts = [m.id for m in landmarks(fld) if m.kind == kind]
    vidx = {v: i for i, v in enumerate(verts)}
    mine = [s for s in seps if s.color == color]
    by_owner = defaultdict(dict)
    for s in mine:
        by_owner[s.owner][s.branch] = s
    darts = []  # (vertex index, angle, label)
    twin = []
    for owner in sorted(by_owner):
        pair = by_owner[owner]
        if set(pair) != {"plus", "minus"}:
            raise PortraitError(f"saddle {owner} lacks a {color} branch")
        base = len(darts)
        for br in ("plus", "minus"):
            s = pair[br]
            if s.terminal is None:
                raise PortraitError(f"separatrix {s.id} has no terminal ({s.trajectory.verdict})")
            if s.terminal not in vidx:
                raise PortraitError(f"separatrix {s.id} ends at {s.terminal}, which is not a {kind}")
            m = marks[s.terminal]
            r = ROTATION_RADIUS * m.scale * (1 + abs(m.point.value) ** 2)
            ang = arrival_angle(fld, s, m.point, r)
            darts.append((vidx[s.terminal], ang, (owner, color, br)))
        twin.extend([base + 1, base])
    nxt = [0] * len(darts)
    at = defaultdict(list)
    for d, (v, ang, _) in enumerate(darts):
        at[v].append((ang, d))
    for v, lst in at.items():
        lst.sort()
        for i, (_, d) in enumerate(lst):
            nxt[d] = lst[(i + 1) % len(lst)][1]
    return PlaneMultigraph(
        tuple(verts),
        tuple(vcolor for _ in verts),
        tuple(d[0] for d in darts),
        tuple(twin),
        tuple(nxt),
        tuple(d[2] for d in darts),
    )


def build_portraits(fld: RationalField, seps: Sequence[Separatrix]) -> tuple[PlaneMultigraph, PlaneMultigraph, ConnectionGraph]:
    """Assemble ``(C+, C-, C)`` from the separatrices of every pole saddle."""
    cplus = _portrait(fld, seps, "Red", "Source", SOURCE)
    cminus = _portrait(fld, seps, "Blue", "Sink", SINK)
    index = {"Source": 2, "PoleSaddle": 1, "Sink": 0}
    verts = tuple((m.id, index[m.kind]) for m in landmarks(fld) if m.kind in index)
    edges = []
    for s in seps:
        if s.color == "Red":
            edges.append((s.terminal, s.owner, s.id))
        else:
            edges.append((s.owner, s.terminal, s.id))
    return cplus, cminus, ConnectionGraph(verts, tuple(edges))


@dataclass
class DualityVerdict:
    passed: bool
    witness: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {"status": "pass" if self.passed else "fail", "witness": self.witness}


_OTHER_BRANCH = {"plus": "minus", "minus": "plus"}


def _face_contents(g: PlaneMultigraph, other: PlaneMultigraph, other_color: str, flip: bool) -> tuple[list[set], set]:
    where = {}
    for d in range(other.n_darts):
        lab = other.dart_labels[d]
        if lab is not None:
            where[(lab[0], lab[2])] = other.vertex_ids[other.dart_vertex[d]]
    contents = []
    for face in g.faces():
        got = set()
        for d in face:
            saddle, _, br = g.dart_labels[d]
            key = (saddle, _OTHER_BRANCH[br] if flip else br)
            if key in where:
                got.add(where[key])
        contents.append(got)
    return contents, set(other.vertex_ids)


def check_duality(cplus: PlaneMultigraph, cminus: PlaneMultigraph) -> DualityVerdict:
    """Check that the two portraits are mutually dual.

    Edges must match saddle by saddle; every face of ``C+`` must contain
    exactly one sink and every sink must lie in exactly one face, and the
    same with the roles exchanged.  The face on the left of a Red dart of
    branch ``b`` (traversed away from its vertex) holds the terminal of the
    Blue branch ``b``; for ``C-`` it is the Red branch opposite to ``b``.
    """
    s_plus = {lab[0] for lab in cplus.dart_labels if lab}
    s_minus = {lab[0] for lab in cminus.dart_labels if lab}
    if s_plus != s_minus:
        return DualityVerdict(False, {"unmatched_saddles": sorted(s_plus ^ s_minus)})
    for g, other, flip, name in ((cplus, cminus, False, "C+"), (cminus, cplus, True, "C-")):
        if not g.is_connected():
            return DualityVerdict(False, {"disconnected": name})
        if g.n_darts == 0:
            if len(other.vertex_ids) != 1:
                return DualityVerdict(False, {"face": name, "contains": list(other.vertex_ids)})
            continue
        contents, all_other = _face_contents(g, other, "", flip)
        seen = []
        for i, got in enumerate(contents):
            if len(got) != 1:
                return DualityVerdict(False, {"portrait": name, "face": i, "contains": sorted(got)})
            seen.extend(got)
        if sorted(seen) != sorted(all_other):
            return DualityVerdict(False, {"portrait": name, "face_assignment": sorted(seen), "expected": sorted(all_other)})
    return DualityVerdict(True)


# ---------------------------------------------------------------------------
# reduced connection graph in polynomial mode


def reduced_connection_graph(
    fld: RationalField, seps: Sequence[Separatrix] | None = None, cfg=None
) -> PlaneMultigraph:
    """Planar tree of sources and sinks of a polynomial field.

    The terminals of the boundary separatrices, read in the cyclic order of
    their boundary angles, form the contour walk of the tree.
    """
    from .field import classify
    from .separatrix import trace_boundary_separatrices

    if not fld.is_polynomial:
        raise ValueError("reduced connection graph needs a polynomial field")
    recs = {r.id: r for r in classify(fld)}
    color = {}
    for rid, r in recs.items():
        if rid == "inf":
            continue  # finite sources and sinks only
        if r.kind == "Source":
            color[rid] = SOURCE
        elif r.kind == "Sink":
            color[rid] = SINK
        else:
            raise PortraitError(f"degenerate equilibrium {rid} ({r.kind})")
    if fld.d == 1:
        (only,) = color
        return PlaneMultigraph((only,), (color[only],), (), (), ())
    if fld.d == 2:
        a, b = sorted(color)
        return from_contour([a, b], color)
    seps = list(seps) if seps is not None else trace_boundary_separatrices(fld, cfg)
    seps = sorted(seps, key=lambda s: int(s.owner[1:]))
    walk = []
    for s in seps:
        if s.terminal is None:
            raise PortraitError(f"boundary separatrix {s.owner} has no terminal ({s.trajectory.verdict})")
        if s.terminal not in color:
            raise PortraitError(f"boundary separatrix {s.owner} ends at {s.terminal}")
        walk.append(s.terminal)
    try:
        return from_contour(walk, color)
    except ValueError as exc:
        raise PortraitError(f"boundary terminals {walk} do not form a contour walk: {exc}") from exc

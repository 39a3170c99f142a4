"""Planar trees, non-crossing chord diagrams and non-crossing trees.

Planar trees are generated as rooted plane trees (Dyck words, read as
contour walks) and quotiented by canonical code.  nc-trees are spanning
trees on points of a circle with straight, pairwise non-crossing chords,
generated by the standard decomposition along the largest neighbour of the
first point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .portrait import SINK, SOURCE, CanonicalCode, PlaneMultigraph, canonical_code, from_contour, from_rotations

# OEIS reference values: planar trees with n vertices (A002995, offset 0) and
# nc-trees up to rotation and reflection (A296533, offset 1).
A002995 = (1, 1, 1, 1, 2, 3, 6, 14, 34, 95, 280, 854, 2694, 8714, 28640, 95640, 323396)
A296533 = (1, 1, 3, 7, 28, 108, 507, 2431, 12441, 65169, 351156, 1926372, 10746856)

PLANAR_TREE_BUDGET = 12
NC_TREE_BUDGET = 9


class BudgetExceeded(ValueError):
    """Enumeration size is beyond the configured budget."""


# ---------------------------------------------------------------------------
# planar trees


@dataclass(frozen=True)
class PlanarTree:
    """Plane tree stored by its contour walk (cyclic vertex sequence)."""

    walk: tuple

    @property
    def n_vertices(self) -> int:
        return len(set(self.walk))

    def graph(self) -> PlaneMultigraph:
        return from_contour(self.walk, bicoloring(self.walk))

    def chords(self) -> "ChordDiagram":
        return tree_to_chords(self)

    def code(self, orientation: str = "preserve") -> CanonicalCode:
        return canonical_code(self.graph(), orientation, "allow_reversal")


def bicoloring(walk: Sequence) -> dict:
    """Proper two-coloring of a contour walk with its first vertex a source."""
    if len(walk) <= 1:
        return {walk[0]: SOURCE} if walk else {}
    col = {walk[0]: SOURCE}
    for k in range(1, len(walk)):
        if walk[k] not in col:
            col[walk[k]] = SINK if col[walk[k - 1]] == SOURCE else SOURCE
    return col


def dyck_words(n: int) -> Iterable[tuple[int, ...]]:
    """All Dyck words of semilength ``n`` as tuples of +1/-1 steps."""

    def rec(prefix: list, up: int, down: int):
        if up == n and down == n:
            yield tuple(prefix)
            return
        if up < n:
            prefix.append(1)
            yield from rec(prefix, up + 1, down)
            prefix.pop()
        if down < up:
            prefix.append(-1)
            yield from rec(prefix, up, down + 1)
            prefix.pop()

    yield from rec([], 0, 0)


def tree_from_dyck(word: Sequence[int]) -> PlanarTree:
    """Rooted plane tree of a Dyck word, as its contour walk."""
    walk = [0]
    stack = [0]
    nxt = 1
    for step in word:
        if step > 0:
            stack.append(nxt)
            nxt += 1
        else:
            stack.pop()
        walk.append(stack[-1])
    return PlanarTree(tuple(walk[:-1]) or (0,))


def enumerate_planar_trees(d: int, orientation: str = "preserve") -> dict[str, PlanarTree]:
    """Planar trees with ``d`` vertices, keyed by canonical code string.

    Raises
    ------
    BudgetExceeded
        If ``d`` exceeds ``PLANAR_TREE_BUDGET``.
    """
    if d < 1:
        raise ValueError("d must be positive")
    if d > PLANAR_TREE_BUDGET:
        raise BudgetExceeded(f"d={d} exceeds the enumeration budget {PLANAR_TREE_BUDGET}")
    out: dict[str, PlanarTree] = {}
    for word in dyck_words(d - 1):
        t = tree_from_dyck(word)
        code = t.code(orientation).code
        out.setdefault(code, t)
    return dict(sorted(out.items()))


def _totient(n: int) -> int:
    result = n
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def count_planar_trees(d: int) -> int:
    """Closed-form number of planar trees with ``d`` vertices, up to rotation.

    The totient expression is used for ``d >= 3``.  At ``d = 2`` its middle
    binomial and totient terms both count the half-turn symmetry of the
    single edge (the expression gives 2), so the base value 1 is returned.
    """
    if d < 1:
        raise ValueError("d must be positive")
    if d <= 2:
        return 1
    n = d - 1
    total = Fraction(math.comb(2 * n, n), 2 * n * d)
    if d % 2 == 0:
        total += Fraction(math.comb(d, d // 2), 4 * n)
    total += Fraction(_totient(n), n)
    s = sum(math.comb(2 * k, k) * _totient(n // k) for k in range(2, n) if n % k == 0)
    total += Fraction(s, 2 * n)
    if total.denominator != 1:
        raise ArithmeticError(f"non-integral count {total}")
    return int(total)


# ---------------------------------------------------------------------------
# chord diagrams


@dataclass(frozen=True)
class ChordDiagram:
    """Perfect matching of ``2n`` equidistant boundary points.

    ``partner[k]`` is the point matched to point ``k``; point ``k`` sits at
    angle ``pi (k + 1/2) / n``.
    """

    partner: tuple

    @property
    def n_chords(self) -> int:
        return len(self.partner) // 2

    def angles(self) -> list[float]:
        n = self.n_chords
        return [math.pi * (k + 0.5) / n for k in range(2 * n)]

    def chords(self) -> list[tuple[int, int]]:
        return sorted((k, p) for k, p in enumerate(self.partner) if k < p)

    def is_noncrossing(self) -> bool:
        cs = self.chords()
        for i, (a, b) in enumerate(cs):
            for c, d in cs[i + 1 :]:
                if a < c < b < d or c < a < d < b:
                    return False
        return True


def tree_to_chords(t: PlanarTree) -> ChordDiagram:
    """Chord ``(k, j)`` for each pair of contour steps traversing one edge."""
    walk = t.walk
    n = len(walk)
    if n <= 1:
        return ChordDiagram(())
    pos = {(walk[k], walk[(k + 1) % n]): k for k in range(n)}
    partner = [pos[(walk[(k + 1) % n], walk[k])] for k in range(n)]
    return ChordDiagram(tuple(partner))


def chords_to_tree(c: ChordDiagram) -> PlanarTree:
    """Inverse of :func:`tree_to_chords`.

    Arcs of the circle between consecutive points are merged across each
    chord; the resulting classes are the tree vertices and arc ``k`` (ending
    at point ``k``) is the contour vertex ``walk[k]``.

    Raises
    ------
    ValueError
        If the chords cross or the matching is invalid.
    """
    m = len(c.partner)
    if m == 0:
        return PlanarTree((0,))
    if any(c.partner[c.partner[k]] != k or c.partner[k] == k for k in range(m)):
        raise ValueError("not a perfect matching")
    if not c.is_noncrossing():
        raise ValueError("chords cross")
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        parent[find(a)] = find(b)

    for i in range(m):
        j = c.partner[i]
        union((i + 1) % m, j)
        union(i, (j + 1) % m)
    labels = {}
    walk = []
    for k in range(m):
        r = find(k)
        if r not in labels:
            labels[r] = len(labels)
        walk.append(labels[r])
    return PlanarTree(tuple(walk))


# ---------------------------------------------------------------------------
# nc-trees


@dataclass(frozen=True)
class NcTree:
    """Non-crossing spanning tree on ``n`` labelled points of a circle."""

    n: int
    edges: tuple  # sorted pairs (i, j) with i < j

    def __post_init__(self):
        es = tuple(sorted(tuple(sorted(e)) for e in self.edges))
        object.__setattr__(self, "edges", es)

    def is_valid(self) -> bool:
        if len(self.edges) != self.n - 1:
            return False
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            ra, rb = find(a), find(b)
            if ra == rb:
                return False
            parent[ra] = rb
        return not _crossing_pair(self.edges)

    def code(self, orientation: str = "allow_reflection") -> str:
        return nc_canonical(self, orientation)


def _crossing_pair(edges: Sequence[tuple[int, int]]):
    for i, (a, b) in enumerate(edges):
        for c, d in edges[i + 1 :]:
            if a < c < b < d or c < a < d < b:
                return (a, b), (c, d)
    return None


@lru_cache(maxsize=None)
def _nc_span(n: int) -> tuple:
    """nc-trees on points ``0..n-1`` (as edge tuples)."""
    if n == 1:
        return ((),)
    out = []
    for k in range(1, n):
        for left in _nc_with_edge(k + 1):
            for right in _nc_span(n - k):
                out.append(left + tuple((a + k, b + k) for a, b in right))
    return tuple(out)


@lru_cache(maxsize=None)
def _nc_with_edge(n: int) -> tuple:
    """nc-trees on ``0..n-1`` containing the chord ``(0, n-1)``."""
    out = []
    for m in range(0, n - 1):
        for a in _nc_span(m + 1):
            for b in _nc_span(n - m - 1):
                out.append(((0, n - 1),) + a + tuple((x + m + 1, y + m + 1) for x, y in b))
    return tuple(out)


def labelled_nc_trees(n: int) -> list[NcTree]:
    """All nc-trees on ``n`` labelled circle points."""
    return [NcTree(n, e) for e in _nc_span(n)]


def _transform(edges, n, r, reflect):
    def f(x):
        return ((-x if reflect else x) + r) % n

    return tuple(sorted(tuple(sorted((f(a), f(b)))) for a, b in edges))


def nc_canonical(t: NcTree, orientation: str = "allow_reflection") -> str:
    """Lexicographically least edge list over rotations (and reflections)."""
    n = t.n
    reflects = (False, True) if orientation == "allow_reflection" else (False,)
    best = min(_transform(t.edges, n, r, s) for r in range(n) for s in reflects)
    return f"{n}:" + ";".join(f"{a}-{b}" for a, b in best)


def nc_from_code(code: str) -> NcTree:
    n, _, rest = code.partition(":")
    edges = [tuple(int(x) for x in e.split("-")) for e in rest.split(";") if e]
    return NcTree(int(n), tuple(edges))


def enumerate_nc_trees(n_vertices: int, orientation: str = "allow_reflection") -> dict[str, NcTree]:
    """nc-trees with ``n_vertices`` circle points up to rotation (and reflection)."""
    if n_vertices < 1:
        raise ValueError("need at least one vertex")
    if n_vertices - 1 > NC_TREE_BUDGET:
        raise BudgetExceeded(f"d'={n_vertices - 1} exceeds the enumeration budget {NC_TREE_BUDGET}")
    out: dict[str, NcTree] = {}
    for t in labelled_nc_trees(n_vertices):
        c = nc_canonical(t, orientation)
        if c not in out:
            out[c] = nc_from_code(c)
    return dict(sorted(out.items()))


def count_nc_trees(dp: int) -> int:
    """Closed-form count of nc-trees with ``dp`` edges up to rotation and reflection."""
    if dp < 1:
        raise ValueError("d' must be positive")
    total = Fraction(math.comb(3 * dp, dp), (2 * dp + 1) * (2 * dp + 2))
    if dp % 2:
        total += Fraction(3 * math.comb((3 * dp + 1) // 2, (dp - 1) // 2), 3 * dp + 1)
    else:
        total += Fraction(math.comb(3 * dp // 2, dp // 2), 2 * dp + 2)
    if total.denominator != 1:
        raise ArithmeticError(f"non-integral count {total}")
    return int(total)


@dataclass(frozen=True)
class NcPair:
    """A tree on the even slots and its dual on the odd slots of ``2n`` circle points."""

    n: int
    even: tuple
    odd: tuple


def dual_nc_tree(t: NcTree) -> NcTree:
    """Dual nc-tree.

    The vertices of ``t`` sit at slots ``2i`` of ``2n`` alternating slots;
    the dual lives on the odd slots ``2j+1`` and its edges cross those of
    ``t`` one to one.  Returned with vertex ``j`` at slot ``2j+1``, so the
    dual of the dual is ``t`` rotated by one vertex; canonical codes are
    preserved.
    """
    n = t.n
    # the chords cut the disk into n regions, each holding exactly one odd
    # slot; two regions are adjacent across a chord iff exactly that chord
    # separates their odd slots
    edges = []
    for j in range(n):
        for k in range(j + 1, n):
            # dual edge between faces on either side of exactly one chord
            a, b = 2 * j + 1, 2 * k + 1
            crossing = [
                (x, y) for x, y in t.edges if (a < 2 * x < b) != (a < 2 * y < b)
            ]
            if len(crossing) == 1:
                edges.append((j, k))
    d = NcTree(n, tuple(edges))
    if not d.is_valid():
        raise AssertionError("dual construction failed")
    return d


def is_self_dual(t: NcTree, orientation: str = "allow_reflection") -> bool:
    return nc_canonical(dual_nc_tree(t), orientation) == nc_canonical(t, orientation)


def nc_tree_graph(t: NcTree, color: str = SOURCE) -> PlaneMultigraph:
    """Plane embedding of an nc-tree (points on the unit circle, straight chords)."""
    n = t.n
    rot = [[] for _ in range(n)]
    for idx, (a, b) in enumerate(t.edges):
        rot[a].append((b, idx))
        rot[b].append((a, idx))
    rotations = []
    for v in range(n):
        # chord directions from v turn counterclockwise as w runs ccw from v
        rotations.append([idx for _, idx in sorted(rot[v], key=lambda it, v=v: (it[0] - v) % n)])
    return from_rotations(rotations, [color] * n, [f"v{i}" for i in range(n)])

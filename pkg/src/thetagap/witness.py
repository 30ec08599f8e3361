"""Construction of six-point configurations that violate negative type.

Starting from a minimal theta whose edges all have length at least 1, the
construction walks a short interval near one branch vertex, mirrors it onto
the other two paths through antipodal maps on the two-path cycles, and picks
two triples of points whose within-group distances beat the cross distances
by at least 1/12.  Everything is exact; every claimed identity is re-checked
against ambient distances before a witness is returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import (
    Edge,
    EdgePoint,
    FiniteMetric,
    MetricGraph,
    Point,
    Vertex,
    canonical_point,
    distance,
    distance_matrix,
    point_label,
    scale,
    subdivide,
)
from .errors import InternalCheckError, PreconditionError
from .theta import (
    Theta,
    ThetaPoint,
    canonical_theta_point,
    minimal_theta,
    theta_point_to_point,
)

_SIXTH = Fraction(1, 6)
_TWELFTH = Fraction(1, 12)
_HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# antipodal maps and window selection
# ---------------------------------------------------------------------------


def opposite_point(t: Theta, cycle: tuple[int, int], p: ThetaPoint) -> ThetaPoint:
    """Antipode of ``p`` on the cycle formed by two theta paths.

    ``cycle`` names two path indices (1-based).  The cycle is parameterized
    from the first branch vertex along the first named path; the antipode
    sits half the circumference away.
    """
    a, b = cycle
    if a == b or a not in (1, 2, 3) or b not in (1, 2, 3):
        raise PreconditionError(f"bad cycle spec: {cycle!r}")
    cp = canonical_theta_point(t, p)
    la = t.paths[a - 1].length
    lb = t.paths[b - 1].length
    circumference = la + lb
    if cp.kind == "u":
        coord = Fraction(0)
    elif cp.kind == "v":
        coord = la
    else:
        if cp.path == a:
            coord = cp.arc
        elif cp.path == b:
            coord = circumference - cp.arc
        else:
            raise PreconditionError(f"point {p!r} is not on cycle {cycle!r}")
    target = (coord + circumference / 2) % circumference
    if target <= la:
        return canonical_theta_point(t, ThetaPoint.on_path(a, target))
    return canonical_theta_point(t, ThetaPoint.on_path(b, circumference - target))


@dataclass(frozen=True)
class Window:
    """A sixth-length subinterval of the scan interval and its two images.

    ``start`` is an arc on path 1.  ``j2`` and ``j3`` are the antipodal
    images of the interval on paths 2 and 3; each is stored as the pair of
    image endpoints (images of start and start + 1/6, in that order)."""

    start: Fraction
    j2: tuple[ThetaPoint, ThetaPoint]
    j3: tuple[ThetaPoint, ThetaPoint]


def _vertex_free_interior(t: Theta, path_index: int, lo: Fraction, hi: Fraction) -> bool:
    path = t.paths[path_index - 1]
    return not any(lo < arc < hi for arc in path.arcs)


def _window_at(t: Theta, a: Fraction) -> Optional[Window]:
    """The window [a, a + 1/6] if both image interiors avoid graph vertices."""
    ends = (a, a + _SIXTH)
    j2 = tuple(opposite_point(t, (1, 2), ThetaPoint.on_path(1, x)) for x in ends)
    j3 = tuple(opposite_point(t, (1, 3), ThetaPoint.on_path(1, x)) for x in ends)
    # The antipodal map reverses orientation, so the image of ``a`` is the
    # upper end of the image interval.
    l2 = (t.paths[0].length + t.paths[1].length) / 2
    l3 = (t.paths[0].length + t.paths[2].length) / 2
    if not _vertex_free_interior(t, 2, l2 - a - _SIXTH, l2 - a):
        return None
    if not _vertex_free_interior(t, 3, l3 - a - _SIXTH, l3 - a):
        return None
    return Window(start=a, j2=(j2[0], j2[1]), j3=(j3[0], j3[1]))


def _candidate_windows(t: Theta) -> list[Window]:
    out = []
    for a in (Fraction(0), Fraction(1, 6), Fraction(1, 3)):
        w = _window_at(t, a)
        if w is not None:
            out.append(w)
    return out


def choose_window(g: MetricGraph, t: Theta) -> Window:
    """First window from the scan list whose image interiors are vertex-free."""
    _require_long_edges(g)
    windows = _candidate_windows(t)
    if not windows:
        raise InternalCheckError("no vertex-free window among the three candidates")
    return windows[0]


def _require_long_edges(g: MetricGraph) -> None:
    for e in g.edges:
        if e.length < 1:
            raise PreconditionError(
                f"witness construction needs edge lengths >= 1; edge {e.id} has {e.length}"
            )


# ---------------------------------------------------------------------------
# gap and witnesses
# ---------------------------------------------------------------------------


def gap(m: FiniteMetric, b: Sequence[int], r: Sequence[int]) -> Fraction:
    """Within-group distance sums minus the nine cross distances.

    ``b`` and ``r`` are triples of point indices into ``m`` (repeats allowed).
    Within-group sums run over the three unordered index pairs of each triple.
    """
    if len(b) != 3 or len(r) != 3:
        raise PreconditionError("gap needs two triples of point indices")
    for k in itertools.chain(b, r):
        if not 0 <= k < m.size:
            raise PreconditionError(f"point index {k} out of range")
    within = Fraction(0)
    for i, j in itertools.combinations(range(3), 2):
        within += m.distance(b[i], b[j]) + m.distance(r[i], r[j])
    cross = Fraction(0)
    for i in b:
        for j in r:
            cross += m.distance(i, j)
    return within - cross


@dataclass(frozen=True)
class Witness:
    """Six points whose grouped distances certify a negative type violation.

    The first triple is spaced along path 1; the other two triples are its
    antipodal images on paths 2 and 3.  ``index`` selects which adjacent pair
    of columns forms the groups: B takes column ``index``, R column
    ``index + 1``.  ``metric`` holds the six points in order B then R."""

    theta: Theta
    window: Window
    xs: tuple[ThetaPoint, ThetaPoint, ThetaPoint]
    ys: tuple[ThetaPoint, ThetaPoint, ThetaPoint]
    zs: tuple[ThetaPoint, ThetaPoint, ThetaPoint]
    points_x: tuple[Point, Point, Point]
    points_y: tuple[Point, Point, Point]
    points_z: tuple[Point, Point, Point]
    index: int
    b_points: tuple[Point, Point, Point]
    r_points: tuple[Point, Point, Point]
    gap: Fraction
    case: str
    metric: FiniteMetric

    def __post_init__(self) -> None:
        if self.index not in (1, 2):
            raise PreconditionError("witness index must be 1 or 2")
        if self.gap < _TWELFTH:
            raise InternalCheckError(f"witness gap {self.gap} below 1/12")


_CASE_ORDER = ("y1z1", "y1z3", "y3z1", "y3z3")


def _try_window(g: MetricGraph, t: Theta, w: Window) -> Optional[Witness]:
    a = w.start
    xs = tuple(
        canonical_theta_point(t, ThetaPoint.on_path(1, a + k * _TWELFTH)) for k in range(3)
    )
    ys = tuple(opposite_point(t, (1, 2), x) for x in xs)
    zs = tuple(opposite_point(t, (1, 3), x) for x in xs)
    px = tuple(theta_point_to_point(g, t, p) for p in xs)
    py = tuple(theta_point_to_point(g, t, p) for p in ys)
    pz = tuple(theta_point_to_point(g, t, p) for p in zs)
    nine = list(px + py + pz)
    m9 = distance_matrix(g, nine)

    def d(p: int, q: int) -> Fraction:
        return m9.distance(p, q)

    X, Y, Z = 0, 3, 6
    # Stepping one slot away from the branch vertex adds exactly 1/12 to the
    # distance from any x to the matching antipodal column.
    for i in (0, 1):
        if d(X + i, Y + i) != d(X + i, Y + i + 1) + _TWELFTH:
            return None
        if d(X + i, Z + i) != d(X + i, Z + i + 1) + _TWELFTH:
            return None
    # The middle cross distance decomposes through one of the four outer pairs.
    options = {
        "y1z1": d(Y, Z),
        "y1z3": d(Y, Z + 2),
        "y3z1": d(Y + 2, Z),
        "y3z3": d(Y + 2, Z + 2),
    }
    best = min(options.values())
    if d(Y + 1, Z + 1) != _SIXTH + best:
        return None
    case = next(name for name in _CASE_ORDER if options[name] == best)

    chosen: Optional[int] = None
    for i in (0, 1):
        lhs = d(Y + i, Z + i) + d(Y + i + 1, Z + i + 1)
        rhs = d(Y + i, Z + i + 1) + d(Y + i + 1, Z + i)
        if lhs >= rhs:
            chosen = i
            break
    if chosen is None:
        return None

    b_idx = (X + chosen, Y + chosen, Z + chosen)
    r_idx = (X + chosen + 1, Y + chosen + 1, Z + chosen + 1)
    b_pts = tuple(nine[k] for k in b_idx)
    r_pts = tuple(nine[k] for k in r_idx)
    m6 = distance_matrix(g, list(b_pts + r_pts))
    value = gap(m6, (0, 1, 2), (3, 4, 5))
    if value < _TWELFTH:
        return None
    return Witness(
        theta=t,
        window=w,
        xs=xs,
        ys=ys,
        zs=zs,
        points_x=px,
        points_y=py,
        points_z=pz,
        index=chosen + 1,
        b_points=b_pts,
        r_points=r_pts,
        gap=value,
        case=case,
        metric=m6,
    )


def construct_witness(g: MetricGraph) -> Witness:
    """Build a six-point violation witness with gap at least 1/12.

    Requires every edge length to be at least 1 and a theta subgraph to
    exist.  Windows are scanned in order; each candidate is fully verified
    against ambient distances before being accepted.
    """
    _require_long_edges(g)
    t = minimal_theta(g)
    if t is None:
        raise PreconditionError("graph contains no theta subgraph")
    for w in _candidate_windows(t):
        result = _try_window(g, t, w)
        if result is not None:
            return result
    raise InternalCheckError("no window produced a valid witness")


# ---------------------------------------------------------------------------
# weightings
# ---------------------------------------------------------------------------


def omega_from_witness(w: Witness):
    """The signed weighting -1/6 on B and +1/6 on R, merged at coincidences.

    Returns an ``analysis.Weighting`` over the indices of ``w.metric``.  The
    weighting sums to zero, has total mass one, and its quadratic energy is
    exactly ``gap / 36``.
    """
    from .analysis import Weighting, gamma

    merged: dict[int, Fraction] = {}
    seen: dict[Point, int] = {}
    pts = list(w.b_points + w.r_points)
    for idx, p in enumerate(pts):
        sign = -1 if idx < 3 else 1
        slot = seen.setdefault(p, idx)
        merged[slot] = merged.get(slot, Fraction(0)) + sign * _SIXTH
    weighting = Weighting.from_map(merged)
    if weighting.total != 0 or weighting.total_mass != 1:
        raise InternalCheckError("witness weighting is not normalized")
    if gamma(w.metric, weighting) != w.gap / 36:
        raise InternalCheckError("witness weighting energy mismatch")
    return weighting


# ---------------------------------------------------------------------------
# rounding to vertices and subdivision pipeline
# ---------------------------------------------------------------------------


def round_to_vertices(g: MetricGraph, points: Sequence[Point]) -> list[str]:
    """Nearest vertex for each point; ties go to the edge's first endpoint.

    Fails if some point is farther than 1/2 from every vertex.
    """
    out: list[str] = []
    for p in points:
        cp = canonical_point(g, p)
        if isinstance(cp, Vertex):
            out.append(cp.vertex)
            continue
        e = g.edge(cp.edge)
        du = distance(g, cp, Vertex(e.ends[0]))
        dv = distance(g, cp, Vertex(e.ends[1]))
        nearest = min(du, dv)
        if nearest > _HALF:
            raise PreconditionError(
                f"point {point_label(cp)} is {nearest} > 1/2 away from every vertex"
            )
        out.append(e.ends[0] if du <= dv else e.ends[1])
    return out


def _suppress_degree_two(
    g: MetricGraph,
) -> tuple[MetricGraph, dict[str, tuple[tuple[str, bool], ...]]]:
    """Contract chains of degree-2 vertices into single long edges.

    Returns the contracted graph plus, for every new edge, the chain of
    original edges it replaces (with traversal directions).
    """
    essential = sorted(v for v in g.vertices if g.degree(v) != 2)
    if not essential:
        essential = [min(g.vertices)]
    essential_set = set(essential)

    incidence: dict[str, list[tuple[str, str]]] = {v: [] for v in g.vertices}
    for e in g.edges:
        a, b = e.ends
        incidence[a].append((e.id, b))
        if a != b:
            incidence[b].append((e.id, a))
        else:
            incidence[a].append((e.id, a))

    consumed: set[str] = set()
    chains: dict[str, tuple[tuple[str, bool], ...]] = {}
    new_edges: list[Edge] = []
    counter = 0
    for w in essential:
        for eid, nxt in sorted(incidence[w]):
            if eid in consumed:
                continue
            chain: list[tuple[str, bool]] = []
            total = Fraction(0)
            here = w
            cur_eid, cur_next = eid, nxt
            while True:
                e = g.edge(cur_eid)
                forward = e.ends[0] == here
                chain.append((cur_eid, forward))
                consumed.add(cur_eid)
                total += e.length
                here = cur_next
                if here in essential_set:
                    break
                options = [(i, o) for i, o in incidence[here] if i != cur_eid]
                if len(options) != 1:
                    raise InternalCheckError("degree-2 chain branched unexpectedly")
                cur_eid, cur_next = options[0]
            counter += 1
            new_id = f"seg{counter}"
            chains[new_id] = tuple(chain)
            new_edges.append(Edge(id=new_id, ends=(w, here), length=total))
    contracted = MetricGraph(vertices=tuple(essential), edges=tuple(new_edges))
    return contracted, chains


def _chain_point(
    g: MetricGraph,
    chains: dict[str, tuple[tuple[str, bool], ...]],
    contracted: MetricGraph,
    p: Point,
) -> Point:
    """Map a point of the contracted graph back into the original graph."""
    cp = canonical_point(contracted, p)
    if isinstance(cp, Vertex):
        return canonical_point(g, Vertex(cp.vertex))
    run = Fraction(0)
    for eid, forward in chains[cp.edge]:
        e = g.edge(eid)
        if run <= cp.offset <= run + e.length:
            local = cp.offset - run
            off = local if forward else e.length - local
            return canonical_point(g, EdgePoint(eid, off))
        run += e.length
    raise InternalCheckError("offset escaped its chain")


@dataclass(frozen=True)
class SubdivisionWitness:
    """Witness data for a fine subdivision, before and after rounding."""

    graph: MetricGraph
    k: int
    continuous: Witness
    b_points: tuple[Point, Point, Point]
    r_points: tuple[Point, Point, Point]
    gap_continuous: Fraction
    b_vertices: tuple[str, str, str]
    r_vertices: tuple[str, str, str]
    gap_rounded: Fraction
    metric_continuous: FiniteMetric
    metric_rounded: FiniteMetric


def subdivision_witness(g0: MetricGraph, k: int) -> SubdivisionWitness:
    """Witness on the k-subdivision of a unit theta-containing graph.

    For ``k >= 180`` the continuous six-point gap is at least ``(k + 1)/12``,
    which exceeds the total drift of 15 half-unit roundings, so the gap of
    the rounded vertex configuration stays positive.
    """
    if not isinstance(k, int) or k < 180:
        raise PreconditionError(f"certified subdivisions need k >= 180, got {k!r}")
    for e in g0.edges:
        if e.length != 1:
            raise PreconditionError("subdivision witness needs a unit-length graph")
    fine = subdivide(g0, k)
    contracted, chains = _suppress_degree_two(fine)
    unit = scale(contracted, Fraction(1, k + 1))
    w = construct_witness(unit)

    def back(p: Point) -> Point:
        cp = canonical_point(unit, p)
        if isinstance(cp, EdgePoint):
            cp = EdgePoint(cp.edge, cp.offset * (k + 1))
        return _chain_point(fine, chains, contracted, cp)

    b_pts = tuple(back(p) for p in w.b_points)
    r_pts = tuple(back(p) for p in w.r_points)
    m_cont = distance_matrix(fine, list(b_pts + r_pts))
    gap_cont = gap(m_cont, (0, 1, 2), (3, 4, 5))
    if gap_cont != w.gap * (k + 1):
        raise InternalCheckError("subdivision gap does not scale as expected")
    if gap_cont < Fraction(k + 1, 12):
        raise InternalCheckError("continuous gap below (k + 1)/12")

    b_v = tuple(round_to_vertices(fine, b_pts))
    r_v = tuple(round_to_vertices(fine, r_pts))
    m_round = distance_matrix(fine, [Vertex(x) for x in (*b_v, *r_v)])
    gap_round = gap(m_round, (0, 1, 2), (3, 4, 5))
    for i in range(6):
        for j in range(i + 1, 6):
            if abs(m_cont.distance(i, j) - m_round.distance(i, j)) > 1:
                raise InternalCheckError("rounding moved a pair distance by more than 1")
    if gap_round <= 0:
        raise InternalCheckError("rounded gap is not positive")
    return SubdivisionWitness(
        graph=fine,
        k=k,
        continuous=w,
        b_points=b_pts,
        r_points=r_pts,
        gap_continuous=gap_cont,
        b_vertices=b_v,
        r_vertices=r_v,
        gap_rounded=gap_round,
        metric_continuous=m_cont,
        metric_rounded=m_round,
    )

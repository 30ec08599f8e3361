"""Exact distance engine: validation, distances, paths, rescaling."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import oracle_distance
from thetagap.core import (
    EdgePoint,
    FiniteMetric,
    MetricGraph,
    Vertex,
    as_rational,
    build_graph,
    canonical_point,
    distance,
    distance_matrix,
    format_rational,
    insert_points,
    point_label,
    scale,
    shortest_path,
    subdivide,
)
from thetagap.errors import (
    InvalidGraphError,
    InvalidMetricError,
    InvalidPointError,
    PreconditionError,
)

# ---------------------------------------------------------------------------
# strategies
# ---------------------------------------------------------------------------

_lengths = st.fractions(min_value=Fraction(1, 4), max_value=Fraction(4), max_denominator=6)


@st.composite
def connected_graphs(draw, max_vertices=5, max_extra_edges=4):
    n = draw(st.integers(min_value=1, max_value=max_vertices))
    names = [f"v{i}" for i in range(n)]
    rows = []
    for i in range(1, n):
        parent = draw(st.integers(min_value=0, max_value=i - 1))
        rows.append((f"t{i}", names[parent], names[i], draw(_lengths)))
    extra = draw(st.integers(min_value=0, max_value=max_extra_edges))
    for j in range(extra):
        a = draw(st.integers(min_value=0, max_value=n - 1))
        b = draw(st.integers(min_value=0, max_value=n - 1))
        rows.append((f"x{j}", names[a], names[b], draw(_lengths)))
    return build_graph(names, rows)


@st.composite
def graph_points(draw, g):
    if draw(st.booleans()) or not g.edges:
        return Vertex(draw(st.sampled_from(g.vertices)))
    edge = draw(st.sampled_from(g.edges))
    frac = draw(st.fractions(min_value=0, max_value=1, max_denominator=8))
    return EdgePoint(edge.id, frac * edge.length)


@st.composite
def graphs_with_points(draw, count=2):
    g = draw(connected_graphs())
    pts = [draw(graph_points(g)) for _ in range(count)]
    return g, pts


# ---------------------------------------------------------------------------
# rationals
# ---------------------------------------------------------------------------


def test_as_rational_accepts_strings_ints_fractions():
    assert as_rational("3/4") == Fraction(3, 4)
    assert as_rational("-2") == Fraction(-2)
    assert as_rational(5) == Fraction(5)
    assert as_rational(Fraction(1, 3)) == Fraction(1, 3)


@pytest.mark.parametrize("bad", ["1.5", "1/0", "a", "", "1/-2", 0.5, None])
def test_as_rational_rejects_floats_and_junk(bad):
    with pytest.raises(ValueError):
        as_rational(bad)


@given(st.fractions(max_denominator=1000))
def test_format_rational_round_trips(x):
    assert as_rational(format_rational(x)) == x


# ---------------------------------------------------------------------------
# graph validation
# ---------------------------------------------------------------------------


def test_duplicate_vertex_rejected():
    with pytest.raises(InvalidGraphError):
        build_graph(["a", "a"], [("e", "a", "a", 1)])


def test_duplicate_edge_id_rejected():
    with pytest.raises(InvalidGraphError):
        build_graph(["a", "b"], [("e", "a", "b", 1), ("e", "a", "b", 1)])


def test_nonpositive_length_rejected():
    with pytest.raises(InvalidGraphError):
        build_graph(["a", "b"], [("e", "a", "b", 0)])


def test_unknown_endpoint_rejected():
    with pytest.raises(InvalidGraphError):
        build_graph(["a"], [("e", "a", "z", 1)])


def test_disconnected_rejected():
    with pytest.raises(InvalidGraphError):
        build_graph(["a", "b", "c"], [("e", "a", "b", 1)])


def test_parallel_edges_and_self_loops_are_legal():
    g = build_graph(
        ["a", "b"],
        [("e1", "a", "b", 1), ("e2", "a", "b", 2), ("l", "b", "b", 3)],
    )
    assert len(g.edges) == 3


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------


@pytest.fixture
def small_graph():
    return build_graph(
        ["a", "b", "c"],
        [("e1", "a", "b", 2), ("e2", "b", "c", 1), ("loop", "c", "c", 2)],
    )


def test_canonical_point_snaps_endpoints(small_graph):
    assert canonical_point(small_graph, EdgePoint("e1", Fraction(0))) == Vertex("a")
    assert canonical_point(small_graph, EdgePoint("e1", Fraction(2))) == Vertex("b")
    inner = EdgePoint("e1", Fraction(1, 2))
    assert canonical_point(small_graph, inner) == inner


def test_canonical_point_rejects_bad_references(small_graph):
    with pytest.raises(InvalidPointError):
        canonical_point(small_graph, Vertex("zz"))
    with pytest.raises(InvalidPointError):
        canonical_point(small_graph, EdgePoint("nope", Fraction(1, 2)))
    with pytest.raises(InvalidPointError):
        canonical_point(small_graph, EdgePoint("e1", Fraction(5, 2)))
    with pytest.raises(InvalidPointError):
        canonical_point(small_graph, EdgePoint("e1", Fraction(-1, 2)))


def test_point_label_formats(small_graph):
    assert point_label(Vertex("a")) == "a"
    assert point_label(EdgePoint("e1", Fraction(1, 2))) == "e1@1/2"


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------


def test_distance_frozen_values(small_graph):
    d = lambda p, q: distance(small_graph, p, q)
    assert d(Vertex("a"), Vertex("c")) == 3
    assert d(EdgePoint("e1", Fraction(1, 2)), Vertex("b")) == Fraction(3, 2)
    # both ways around the self-loop
    assert d(EdgePoint("loop", Fraction(1, 2)), Vertex("c")) == Fraction(1, 2)
    assert d(EdgePoint("loop", Fraction(3, 2)), Vertex("c")) == Fraction(1, 2)
    assert d(EdgePoint("loop", Fraction(1, 2)), EdgePoint("loop", Fraction(3, 2))) == 1


def test_distance_zero_only_at_coincident_points(small_graph):
    assert distance(small_graph, Vertex("b"), EdgePoint("e1", Fraction(2))) == 0
    assert distance(small_graph, Vertex("b"), EdgePoint("e2", Fraction(1, 3))) > 0


@settings(max_examples=120, deadline=None)
@given(graphs_with_points())
def test_distance_matches_brute_force(case):
    g, (p, q) = case
    assert distance(g, p, q) == oracle_distance(g, p, q)


@settings(max_examples=60, deadline=None)
@given(graphs_with_points(count=4))
def test_distance_matrix_is_a_metric_and_matches_pairwise(case):
    g, pts = case
    m = distance_matrix(g, pts)  # construction validates the metric axioms
    for i, j in itertools.combinations(range(4), 2):
        assert m.distance(i, j) == distance(g, pts[i], pts[j])


def test_finite_metric_rejects_triangle_violation():
    with pytest.raises(InvalidMetricError):
        FiniteMetric.from_rows(
            ("a", "b", "c"), [[0, 1, 5], [1, 0, 1], [5, 1, 0]]
        )


def test_finite_metric_rejects_asymmetry():
    with pytest.raises(InvalidMetricError):
        FiniteMetric.from_rows(("a", "b"), [[0, 1], [2, 0]])


# ---------------------------------------------------------------------------
# explicit shortest paths
# ---------------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(graphs_with_points())
def test_shortest_path_geometry_is_consistent(case):
    g, (p, q) = case
    res = shortest_path(g, p, q)
    assert res.length == distance(g, p, q)
    assert sum((s.length for s in res.segments), Fraction(0)) == res.length
    assert res.points[0] == canonical_point(g, p)
    assert res.points[-1] == canonical_point(g, q)
    lengths = {e.id: e.length for e in g.edges}
    for seg in res.segments:
        assert 0 <= seg.start <= lengths[seg.edge]
        assert 0 <= seg.end <= lengths[seg.edge]
        assert (seg.end > seg.start) == seg.forward or seg.start == seg.end


def test_shortest_path_of_coincident_points(small_graph):
    res = shortest_path(small_graph, Vertex("b"), EdgePoint("e2", Fraction(0)))
    assert res.length == 0
    assert res.segments == ()


# ---------------------------------------------------------------------------
# isometric refinement
# ---------------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(graphs_with_points(count=3))
def test_insert_points_preserves_distances(case):
    g, pts = case
    refined, names = insert_points(g, pts)
    for a, b in itertools.combinations(pts, 2):
        ca, cb = canonical_point(g, a), canonical_point(g, b)
        assert distance(refined, Vertex(names[ca]), Vertex(names[cb])) == distance(
            g, a, b
        )


# ---------------------------------------------------------------------------
# subdivision and scaling
# ---------------------------------------------------------------------------


def _unit_triangle():
    return build_graph(
        ["a", "b", "c"],
        [("e1", "a", "b", 1), ("e2", "b", "c", 1), ("e3", "c", "a", 1)],
    )


def test_subdivide_counts_and_lengths():
    g = _unit_triangle()
    fine = subdivide(g, 2)
    assert len(fine.vertices) == 3 + 3 * 2
    assert len(fine.edges) == 3 * 3
    assert all(e.length == 1 for e in fine.edges)


def test_subdivide_scales_vertex_distances():
    g = _unit_triangle()
    k = 3
    fine = subdivide(g, k)
    for u, v in itertools.combinations(g.vertices, 2):
        assert distance(fine, Vertex(u), Vertex(v)) == (k + 1) * distance(
            g, Vertex(u), Vertex(v)
        )


def test_subdivide_requires_unit_lengths(small_graph):
    with pytest.raises(PreconditionError):
        subdivide(small_graph, 1)


def test_subdivide_rejects_nonpositive_k():
    with pytest.raises(PreconditionError):
        subdivide(_unit_triangle(), 0)


def test_scale_multiplies_all_distances(small_graph):
    t = Fraction(3, 7)
    scaled = scale(small_graph, t)
    assert {e.id: e.length for e in scaled.edges} == {
        e.id: t * e.length for e in small_graph.edges
    }
    assert distance(scaled, Vertex("a"), Vertex("c")) == t * 3


def test_scale_rejects_nonpositive_factor(small_graph):
    with pytest.raises(PreconditionError):
        scale(small_graph, 0)
    with pytest.raises(PreconditionError):
        scale(small_graph, Fraction(-1, 2))

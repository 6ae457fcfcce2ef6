import logging
from fractions import Fraction
from unittest.mock import patch

import pytest
from cubenet.congestion import (
    ConflictGraph,
    build_conflict_graph,
    center_cube_coverage,
    congestion_census,
    congestion_coordinates,
    corollary2_check,
    externality_report,
    full_congestion_nodes,
    links_through,
    pairwise_congestion,
    paradox_metrics,
    permit_assignment,
    redundant_points,
    uncongested_links,
)
from cubenet.exceptions import PreconditionFailed
from cubenet.geometry import RationalPoint3, Segment
from cubenet.interface import CongestionKind, LinkKind, SharingMode
from cubenet.lattice import GridNode, Link, build_cube, build_plane, build_two_cube
from joblib import Parallel

HALF = Fraction(1, 2)


def P(x, y, z):
    return RationalPoint3(x, y, z)


def N(*coords):
    return GridNode(*coords)


def L(a, b):
    return Link.between(N(*a), N(*b))


@pytest.fixture(scope="module")
def cube():
    net = build_cube()
    return net, pairwise_congestion(net)


@pytest.fixture(scope="module")
def plane_sharing():
    net = build_two_cube(SharingMode.Plane)
    return net, pairwise_congestion(net)


@pytest.fixture(scope="module")
def edge_sharing():
    net = build_two_cube(SharingMode.Edge)
    return net, pairwise_congestion(net)


@pytest.fixture(scope="module")
def node_sharing():
    net = build_two_cube(SharingMode.Node)
    return net, pairwise_congestion(net)


def test_plane_diagonals_cross():
    events = pairwise_congestion(build_plane())
    assert len(events) == 1
    (event,) = events
    assert event.kind is CongestionKind.PointCongestion
    assert event.locus == P(HALF, HALF, 0)
    assert not event.external


def test_cube_has_only_point_congestion(cube):
    _, events = cube
    assert congestion_census(events) == {
        CongestionKind.PointCongestion: 12,
        CongestionKind.LineCongestion: 0,
        CongestionKind.FullCongestion: 0,
    }


def test_cube_congestion_coordinates(cube):
    _, events = cube
    m = congestion_coordinates(events)
    assert len(m.point_loci) == 7
    body = P(HALF, HALF, HALF)
    assert m.multiplicity(body) == 4
    faces = [p for p in m.point_loci if p != body]
    assert [m.multiplicity(p) for p in faces] == [2] * 6
    through = links_through(m, body)
    assert all(link.kind is LinkKind.SpatialDiagonal for link in through)


def test_cube_unit_links_are_uncongested(cube):
    net, events = cube
    free = uncongested_links(net, events)
    assert len(free) == 12
    assert all(link.kind is LinkKind.Unit for link in free)


def test_cube_paradox_metrics(cube):
    net, events = cube
    metrics = paradox_metrics(net, events)
    assert metrics.links_total == 28
    assert metrics.links_congested == 16
    assert metrics.fraction_congested == Fraction(4, 7)
    assert metrics.point_coordinate_count == 7
    assert metrics.full_nodes == ()
    assert metrics.external_count == 0
    assert metrics.uncongested_count == 12


def test_paradox_metrics_sweeps_when_no_events_given(cube):
    net, events = cube
    assert paradox_metrics(net) == paradox_metrics(net, events)


def test_events_are_canonically_sorted(plane_sharing):
    _, events = plane_sharing
    assert events == sorted(events, key=lambda e: e.sort_key)
    for event in events:
        assert event.links[0] < event.links[1]


def test_plane_sharing_line_congestion(plane_sharing):
    _, events = plane_sharing
    lines = [e for e in events if e.kind is CongestionKind.LineCongestion]
    assert len(lines) == 8
    for event in lines:
        kinds = {link.kind for link in event.links}
        assert kinds == {LinkKind.LongEdge, LinkKind.Unit}
        assert event.covers_unit_link
        assert event.locus.length_squared() == 1


def test_plane_sharing_full_congestion_on_middle_layer(plane_sharing):
    _, events = plane_sharing
    nodes = full_congestion_nodes(events)
    assert nodes == [N(0, 0, 1), N(0, 1, 1), N(1, 0, 1), N(1, 1, 1)]
    for event in events:
        if event.kind is CongestionKind.FullCongestion:
            assert event.locus == event.at_node.point
            assert not event.shared_node


def test_plane_sharing_has_no_externality(plane_sharing):
    _, events = plane_sharing
    assert externality_report(events) == []


def test_plane_sharing_unit_links_not_all_covered(plane_sharing):
    net, events = plane_sharing
    assert corollary2_check(net, N(0, 0, 1), events) is False


def test_plane_sharing_shared_plane_center(plane_sharing):
    _, events = plane_sharing
    m = congestion_coordinates(events)
    through = links_through(m, P(HALF, HALF, 1))
    kinds = sorted(link.kind.value for link in through)
    assert kinds == ["LongSpatialDiagonal"] * 4 + ["PlanarDiagonal"] * 2


def test_plane_sharing_redundant_points(plane_sharing):
    net, events = plane_sharing
    m = congestion_coordinates(events)
    assert redundant_points(net, m, min_intra_links=2) == [P(HALF, HALF, 1)]
    literal = redundant_points(net, m)
    assert P(HALF, HALF, 1) in literal
    assert P(HALF, 0, 1) in literal


@pytest.mark.parametrize(
    "source, expected",
    [("plane", 0), ("cube", 0), ("node_sharing", 38)],
)
def test_redundant_point_counts(request, source, expected):
    if source == "plane":
        net = build_plane()
        events = pairwise_congestion(net)
    else:
        net, events = request.getfixturevalue(source)
    m = congestion_coordinates(events)
    assert len(redundant_points(net, m)) == expected


def test_edge_sharing_shared_edge_midpoint(edge_sharing):
    _, events = edge_sharing
    m = congestion_coordinates(events)
    through = links_through(m, P(1, 1, HALF))
    census = {}
    for link in through:
        census[link.kind] = census.get(link.kind, 0) + 1
    assert census == {
        LinkKind.Unit: 1,
        LinkKind.LongPlanarDiagonal: 4,
        LinkKind.Other: 2,
    }


def test_edge_sharing_external_point(edge_sharing):
    _, events = edge_sharing
    external = externality_report(events)
    assert external
    crossing = [
        e
        for e in external
        if e.links == (L((0, 0, 0), (2, 1, 0)), L((1, 0, 0), (2, 2, 0)))
    ]
    assert [e.locus for e in crossing] == [P(Fraction(4, 3), Fraction(2, 3), 0)]


def test_node_sharing_full_congestion_at_shared_node(node_sharing):
    net, events = node_sharing
    assert full_congestion_nodes(events) == [N(1, 1, 1)]
    full = [e for e in events if e.kind is CongestionKind.FullCongestion]
    assert all(e.shared_node for e in full)
    assert any(
        e.links == (L((0, 0, 0), (2, 2, 2)), L((0, 1, 1), (2, 1, 1))) for e in full
    )
    assert corollary2_check(net, N(1, 1, 1), events) is True


def test_externality_grows_with_less_sharing(
    plane_sharing, edge_sharing, node_sharing
):
    counts = [
        len(externality_report(events))
        for _, events in (node_sharing, edge_sharing, plane_sharing)
    ]
    assert counts[0] >= counts[1] >= counts[2] == 0


def test_unit_link_check_needs_full_congestion(cube):
    net, events = cube
    with pytest.raises(PreconditionFailed):
        corollary2_check(net, N(0, 0, 0), events)


def test_incidence_is_not_congestion():
    net = build_cube()
    events = pairwise_congestion(net)
    unit = L((0, 0, 0), (1, 0, 0))
    assert not any(e.involves(unit) for e in events)


def test_parallel_sweep_matches_serial(node_sharing):
    net, events = node_sharing
    with patch("cubenet.congestion.Parallel", wraps=Parallel) as mock_parallel:
        assert pairwise_congestion(net, workers=3) == events
    mock_parallel.assert_called_once_with(n_jobs=3)


def test_focused_sweep_is_a_subset(plane_sharing):
    net, events = plane_sharing
    focus = [link for link in net.links if link.kind is LinkKind.LongEdge]
    focused = pairwise_congestion(net, focus=focus)
    assert focused == [e for e in events if set(e.links) & set(focus)]


def test_sweep_logs_progress(cube):
    net, _ = cube
    with patch("cubenet.congestion.LOG", autospec=True) as mock_log:
        pairwise_congestion(net)
    messages = [c[0][0] for c in mock_log.debug.call_args_list]
    assert "Sweep complete: %d events" in messages


def test_center_cube_coverage():
    coverage = center_cube_coverage(3, 3, 3)
    assert coverage.center_links == 28
    assert coverage.congested == 28
    assert coverage.all_congested


@pytest.mark.parametrize("dims", [(1, 1, 1), (2, 3, 3), (3, 3, 4)])
def test_center_cube_needs_odd_dimensions(dims):
    with pytest.raises(PreconditionFailed):
        center_cube_coverage(*dims)


def test_permit_assignment_is_maximal_independent(cube):
    net, events = cube
    graph = build_conflict_graph(net, events)
    permits = permit_assignment(graph)
    assert graph.is_independent(permits)
    assert graph.is_maximal_independent(permits)
    assert set(uncongested_links(net, events)) <= permits


def test_permit_assignment_prefers_low_degree():
    a = L((0, 0, 0), (1, 0, 0))
    b = L((0, 0, 0), (0, 1, 0))
    c = L((0, 0, 0), (0, 0, 1))
    graph = ConflictGraph([a, b, c], [(a, b), (a, c)])
    assert permit_assignment(graph) == {b, c}
    assert graph.degree(a) == 2
    assert {frozenset(edge) for edge in graph.edges} == {
        frozenset((a, b)),
        frozenset((a, c)),
    }


def test_conflict_graph_rejects_non_independent():
    a, b = L((0, 0, 0), (1, 0, 0)), L((0, 0, 0), (0, 1, 0))
    graph = ConflictGraph([a, b], [(a, b)])
    assert not graph.is_independent([a, b])
    assert not graph.is_maximal_independent([])


def test_line_event_locus_is_a_segment(plane_sharing):
    _, events = plane_sharing
    line = next(e for e in events if e.kind is CongestionKind.LineCongestion)
    assert isinstance(line.locus, Segment)
    assert line.locus_point == line.locus.midpoint


def test_congestion_map_serializes_loci(cube):
    _, events = cube
    document = congestion_coordinates(events)._serialize()
    assert document["line_events"] == 0
    assert len(document["coordinates"]) == 7
    assert {row["kind"] for row in document["coordinates"]} == {"PointCongestion"}


def test_sweep_does_not_log_above_debug(cube, caplog):
    net, _ = cube
    with caplog.at_level(logging.INFO, logger="cubenet"):
        pairwise_congestion(net)
    assert caplog.records == []


def test_permit_assignment_empty_graph():
    assert permit_assignment(ConflictGraph()) == frozenset()


@pytest.mark.parametrize(
    "first, second",
    [
        (((0, 0, 0), (1, 1, 0)), ((0, 1, 0), (1, 0, 0))),
        (((0, 1, 0), (1, 0, 0)), ((0, 0, 0), (1, 1, 0))),
    ],
)
def test_permit_assignment_breaks_degree_ties_by_key(first, second):
    a, b = L(*first), L(*second)
    graph = ConflictGraph([a, b], [(a, b)])
    assert graph.degree(a) == graph.degree(b) == 1
    assert permit_assignment(graph) == {L((0, 0, 0), (1, 1, 0))}

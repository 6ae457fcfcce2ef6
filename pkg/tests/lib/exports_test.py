import csv
import io
import json
from fractions import Fraction

import pytest
from cubenet.congestion import (
    congestion_coordinates,
    pairwise_congestion,
    paradox_metrics,
)
from cubenet.equilibrium import Allocation, PlayerProblem, kt_verify
from cubenet.exports import (
    EVENT_FIELDS,
    congestion_map_json,
    events_csv,
    locus_text,
    metrics_document,
    render_dot,
    render_kt_table,
    render_obj,
    render_summary,
    rows_csv,
    write_outputs,
)
from cubenet.geometry import RationalPoint3, Segment
from cubenet.interface import SharingMode
from cubenet.lattice import build_cube, build_linear, build_two_cube


@pytest.fixture(scope="module")
def cube():
    net = build_cube()
    events = pairwise_congestion(net)
    return net, events, paradox_metrics(net, events)


def two_node():
    return PlayerProblem(0, (1,), (Fraction(3),), (Fraction(1),), Fraction(2))


def test_render_dot_lists_every_link():
    net = build_two_cube(SharingMode.Plane)
    text = render_dot(net)
    lines = text.splitlines()
    assert lines[0] == 'graph "two-cube:plane" {'
    assert lines[-1] == "}"
    assert sum(1 for line in lines if " -- " in line) == 66
    assert sum(1 for line in lines if "[pos=" in line) == 12
    assert '  "0,0,0" -- "1,0,0" [kind="Unit"];' in lines


def test_render_obj_uses_one_based_indices():
    net = build_cube()
    lines = render_obj(net).splitlines()
    vertices = [line for line in lines if line.startswith("v ")]
    links = [line for line in lines if line.startswith("l ")]
    assert len(vertices) == 8
    assert len(links) == 28
    assert vertices[0] == "v 0 0 0"
    for line in links:
        a, b = (int(i) for i in line.split()[1:])
        assert 1 <= a < b <= 8


def test_render_obj_linear():
    assert render_obj(build_linear()) == (
        "# linear: 2 nodes, 1 links\n"
        "o linear\n"
        "v 0 0 0\n"
        "v 1 0 0\n"
        "l 1 2\n"
    )


@pytest.mark.parametrize(
    "locus, expected",
    [
        (RationalPoint3(Fraction(1, 2), 0, 1), "1/2 0 1"),
        (Segment.between((0, 0, 0), (1, 0, 0)), "0 0 0;1 0 0"),
    ],
)
def test_locus_text(locus, expected):
    assert locus_text(locus) == expected


def test_events_csv(cube):
    _, events, _ = cube
    rows = list(csv.reader(io.StringIO(events_csv(events))))
    assert tuple(rows[0]) == EVENT_FIELDS
    assert len(rows) == 13
    assert {row[0] for row in rows[1:]} == {"PointCongestion"}
    assert all(row[5:] == ["0", "0", "0"] for row in rows[1:])


def test_events_csv_is_byte_stable(cube):
    net, events, _ = cube
    assert events_csv(events) == events_csv(pairwise_congestion(net))


def test_congestion_map_json(cube):
    _, events, _ = cube
    document = json.loads(congestion_map_json(congestion_coordinates(events)))
    body = [row for row in document["coordinates"] if row["multiplicity"] == 4]
    assert len(body) == 1
    assert body[0]["locus"] == ["1/2", "1/2", "1/2"]


def test_metrics_document(cube):
    net, _, metrics = cube
    document = metrics_document(net, metrics)
    assert document["network"] == "cube"
    assert document["fraction_congested"] == Fraction(4, 7)
    assert document["full_nodes"] == []


def test_render_summary(cube):
    net, _, metrics = cube
    lines = render_summary(net, metrics).splitlines()
    assert lines[0] == "cube: 28 links, 16 congested (4/7)"
    assert "  PointCongestion: 12 events" in lines
    assert "  point congestion coordinates: 7" in lines
    assert lines[-1] == "  full congestion nodes: none"


def test_render_kt_table_satisfied():
    text = render_kt_table(kt_verify(two_node(), Allocation.of(0, 1)))
    lines = text.splitlines()
    assert lines[0] == "KT conditions for player 0"
    assert lines[1] == "mu = 2"
    assert lines[4].split() == ["x_self", "0", "-2", "<=", "0", "yes", "yes"]
    assert lines[5].split() == ["x_1", "1", "0", "=", "0", "yes", "yes"]
    assert "verdict: satisfied" in lines
    assert not any(line.startswith("first violation") for line in lines)


def test_render_kt_table_violated():
    text = render_kt_table(kt_verify(two_node(), Allocation.of(1, 0)))
    assert "verdict: violated" in text
    assert "first violation: stationarity at x_1" in text


def test_render_kt_table_without_multiplier():
    text = render_kt_table(kt_verify(two_node(), Allocation.of(0, 1, 0)))
    assert "mu = undefined" in text
    assert "feasibility arity: no" in text


def test_rows_csv_writes_fractions():
    text = rows_csv(("name", "share"), [{"name": "a", "share": Fraction(4, 7)}])
    assert text == "name,share\na,4/7\n"


def test_write_outputs(tmp_path):
    written = write_outputs(tmp_path / "out", {"b.txt": "b\n", "a.txt": "a\n"})
    assert [path.name for path in written] == ["a.txt", "b.txt"]
    assert (tmp_path / "out" / "a.txt").read_bytes() == b"a\n"

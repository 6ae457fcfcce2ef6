"""Claim verification and the lattice paradox series."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Tuple

from .config import DEFAULT_PARADOX_SERIES, NetworkSelector, parse_selector
from .congestion import (
    CongestionEvent,
    center_cube,
    center_cube_coverage,
    congestion_census,
    congestion_coordinates,
    corollary2_check,
    coverage_of,
    full_congestion_nodes,
    links_inside,
    pairwise_congestion,
    paradox_metrics,
    uncongested_links,
)
from .equilibrium import PlayerProblem, best_response
from .exports import render
from .geometry import RationalPoint3
from .interface import SCHEMA_VERSION, CongestionKind, LinkKind, SharingMode
from .lattice import (
    DEFAULT_NODE_CAP,
    Network,
    build_cube,
    build_two_cube,
    link_census,
)

LOG = logging.getLogger(__name__)

PLANE_CENSUS = {
    LinkKind.Unit: 20,
    LinkKind.PlanarDiagonal: 22,
    LinkKind.SpatialDiagonal: 8,
    LinkKind.LongPlanarDiagonal: 8,
    LinkKind.LongSpatialDiagonal: 4,
    LinkKind.LongEdge: 4,
}

PARADOX_FIELDS = (
    "network",
    "links_total",
    "links_congested",
    "fraction_congested",
    "uncongested_links",
    "point_coordinates",
    "point_events",
    "line_events",
    "full_events",
    "full_nodes",
    "external_count",
    "center_links",
    "center_congested",
    "center_all_congested",
)


@dataclass(frozen=True)
class ClaimRow:
    claim_id: str
    anchor: str
    expected: str
    computed: str
    passed: bool

    def _serialize(self) -> Mapping[str, Any]:
        return {
            "claim_id": self.claim_id,
            "anchor": self.anchor,
            "expected": self.expected,
            "computed": self.computed,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class VerificationReport:
    rows: Tuple[ClaimRow, ...]

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    @property
    def failures(self) -> List[ClaimRow]:
        return [row for row in self.rows if not row.passed]

    def _serialize(self) -> Mapping[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "rows": list(self.rows),
            "passed": self.passed,
        }


def render_verification(report: VerificationReport) -> str:
    return render("verification.txt", report=report)


def _census_text(census: Mapping[Any, int]) -> str:
    return ", ".join(f"{kind.value} {count}" for kind, count in census.items())


class _Workspace:
    """Builds and sweeps each canonical network at most once per run."""

    def __init__(self, workers: int = 1):
        self.workers = workers
        self._networks: Dict[str, Network] = {}
        self._events: Dict[str, List[CongestionEvent]] = {}

    def network(self, name: str) -> Network:
        if name not in self._networks:
            if name == "cube":
                self._networks[name] = build_cube()
            else:
                mode = SharingMode(name.split(":")[1].capitalize())
                self._networks[name] = build_two_cube(mode)
        return self._networks[name]

    def events(self, name: str) -> List[CongestionEvent]:
        if name not in self._events:
            self._events[name] = pairwise_congestion(
                self.network(name), workers=self.workers
            )
        return self._events[name]

    def count(self, name: str, kind: CongestionKind) -> int:
        return congestion_census(self.events(name))[kind]

    def external(self, name: str) -> int:
        return sum(1 for event in self.events(name) if event.external)


Claim = Tuple[str, str, Any, Callable[[_Workspace], Any]]


def _shared_node_full(ws: _Workspace) -> bool:
    net = ws.network("two-cube:node")
    return list(net.shared_nodes) == full_congestion_nodes(ws.events("two-cube:node"))


def _shared_node_units_line_congested(ws: _Workspace) -> bool:
    net = ws.network("two-cube:node")
    return corollary2_check(net, net.shared_nodes[0], ws.events("two-cube:node"))


def _cube_multiplicities(ws: _Workspace) -> str:
    m = congestion_coordinates(ws.events("cube"))
    body = RationalPoint3(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))
    faces = sorted(m.multiplicity(p) for p in m.point_loci if p != body)
    return f"faces {faces}, body {m.multiplicity(body)}"


def _two_node_best_response(ws: _Workspace) -> str:
    problem = PlayerProblem(0, (1,), (Fraction(3),), (Fraction(1),), Fraction(2))
    response = best_response(problem)
    shares = ", ".join(str(v) for v in response.representative.values)
    return f"({shares}) value {response.value}"


def _externality_order(ws: _Workspace) -> bool:
    counts = [ws.external(f"two-cube:{m}") for m in ("node", "edge", "plane")]
    return counts[0] >= counts[1] >= counts[2] == 0


CLAIMS: List[Claim] = [
    (
        "plane-sharing links",
        "a total of 66 links",
        66,
        lambda ws: len(ws.network("two-cube:plane").links),
    ),
    (
        "plane-sharing census",
        "20 unit links, 22 planar diagonal links",
        _census_text(PLANE_CENSUS),
        lambda ws: _census_text(link_census(ws.network("two-cube:plane"))),
    ),
    (
        "edge-sharing paths",
        "a total of 91 paths",
        91,
        lambda ws: len(ws.network("two-cube:edge").links),
    ),
    (
        "node-sharing paths",
        "a total of 105 paths",
        105,
        lambda ws: len(ws.network("two-cube:node").links),
    ),
    (
        "single-cube links",
        "a total of 28 links",
        28,
        lambda ws: len(ws.network("cube").links),
    ),
    (
        "plane-sharing line congestion events",
        "the eight possible line congestions",
        8,
        lambda ws: ws.count("two-cube:plane", CongestionKind.LineCongestion),
    ),
    (
        "single-cube point coordinates",
        "pairwise sweep of the single cube",
        7,
        lambda ws: len(congestion_coordinates(ws.events("cube")).point_loci),
    ),
    (
        "single-cube point multiplicities",
        "pairwise sweep of the single cube",
        "faces [2, 2, 2, 2, 2, 2], body 4",
        _cube_multiplicities,
    ),
    (
        "single-cube line and full events",
        "pairwise sweep of the single cube",
        0,
        lambda ws: ws.count("cube", CongestionKind.LineCongestion)
        + ws.count("cube", CongestionKind.FullCongestion),
    ),
    (
        "single-cube uncongested links",
        "there is a coordinate which is not congested",
        True,
        lambda ws: bool(uncongested_links(ws.network("cube"), ws.events("cube"))),
    ),
    (
        "node-sharing full congestion at the shared node",
        "congestion at the shared node",
        True,
        _shared_node_full,
    ),
    (
        "node-sharing unit links at the shared node line congested",
        "All unit links of the node fully congested are line congested",
        True,
        _shared_node_units_line_congested,
    ),
    (
        "external events node >= edge >= plane = 0",
        "More point congestions are observed outside the cube",
        True,
        _externality_order,
    ),
    (
        "lattice 3,3,3 center cube congested",
        "will be filled with congestion",
        True,
        lambda ws: center_cube_coverage(3, 3, 3, workers=ws.workers).all_congested,
    ),
    (
        "two-node best response",
        "the largest payoff is",
        "(0, 1) value 2",
        _two_node_best_response,
    ),
]


def verify_claims(
    workers: int = 1, claims: Optional[Iterable[Claim]] = None
) -> VerificationReport:
    ws = _Workspace(workers)
    rows = []
    for claim_id, anchor, expected, compute in CLAIMS if claims is None else claims:
        try:
            computed = compute(ws)
            passed = computed == expected
        except Exception as e:  # pylint: disable=broad-except
            LOG.warning("Claim '%s' raised", claim_id, exc_info=True)
            computed, passed = f"error: {e}", False
        if not passed:
            LOG.warning(
                "Claim '%s' failed: expected %s, computed %s",
                claim_id,
                expected,
                computed,
            )
        rows.append(ClaimRow(claim_id, anchor, str(expected), str(computed), passed))
    report = VerificationReport(tuple(rows))
    LOG.info("%d of %d claims hold", len(rows) - len(report.failures), len(rows))
    return report


def paradox_row(
    selector: NetworkSelector,
    node_cap: int = DEFAULT_NODE_CAP,
    workers: int = 1,
) -> Dict[str, Any]:
    net = selector.build(node_cap)
    events = pairwise_congestion(net, workers=workers)
    metrics = paradox_metrics(net, events)
    row: Dict[str, Any] = {
        "network": net.label,
        "links_total": metrics.links_total,
        "links_congested": metrics.links_congested,
        "fraction_congested": metrics.fraction_congested,
        "uncongested_links": metrics.uncongested_count,
        "point_coordinates": metrics.point_coordinate_count,
        "point_events": metrics.census[CongestionKind.PointCongestion],
        "line_events": metrics.census[CongestionKind.LineCongestion],
        "full_events": metrics.census[CongestionKind.FullCongestion],
        "full_nodes": len(metrics.full_nodes),
        "external_count": metrics.external_count,
        "center_links": "",
        "center_congested": "",
        "center_all_congested": "",
    }
    dims = selector.dims or ()
    if dims and all(d >= 3 and d % 2 for d in dims):
        coverage = coverage_of(links_inside(net, center_cube(*dims)), events)
        row["center_links"] = coverage.center_links
        row["center_congested"] = coverage.congested
        row["center_all_congested"] = coverage.all_congested
    return row


def paradox_series(
    selectors: Iterable[NetworkSelector],
    node_cap: int = DEFAULT_NODE_CAP,
    workers: int = 1,
) -> List[Dict[str, Any]]:
    rows = []
    for selector in selectors:
        LOG.info("Paradox series: %s", selector)
        rows.append(paradox_row(selector, node_cap, workers))
    return rows


def default_series() -> List[NetworkSelector]:
    return [parse_selector(text) for text in DEFAULT_PARADOX_SERIES]

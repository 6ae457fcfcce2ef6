"""Point / line / full congestion between the links of a complete network.

Every unordered link pair is intersected exactly. A pair that only meets at a
common endpoint is an incidence and yields nothing; otherwise the pair yields
at most one ``CongestionEvent``:

* a positive-length overlap is line congestion,
* a single common point on a node that is interior to one of the links is
  full congestion,
* a single common point that is not a node is point congestion.
"""
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

import networkx
from joblib import Parallel, delayed

from .exceptions import PreconditionFailed
from .geometry import (
    OVERLAP,
    RationalPoint3,
    Segment,
    intersect_coordinates,
    point_in_box_union,
)
from .interface import SCHEMA_VERSION, CongestionKind, LinkKind, SharingMode
from .lattice import (
    DEFAULT_NODE_CAP,
    Box3,
    GridNode,
    Link,
    Network,
    build_lattice,
)

LOG = logging.getLogger(__name__)

Locus = Union[RationalPoint3, Segment]

KIND_ORDER = {kind: i for i, kind in enumerate(CongestionKind)}


@dataclass(frozen=True)
class CongestionEvent:
    kind: CongestionKind
    links: Tuple[Link, Link]
    locus: Locus
    at_node: Optional[GridNode] = None
    external: bool = False
    # line congestion only: the overlap is an axis run between two nodes
    covers_unit_link: bool = False
    # full congestion only: the node joins the two cubes of a node-sharing network
    shared_node: bool = False

    @property
    def sort_key(self) -> Tuple[int, Any, Any]:
        return (KIND_ORDER[self.kind], self.links[0].key, self.links[1].key)

    @property
    def locus_point(self) -> RationalPoint3:
        if isinstance(self.locus, Segment):
            return self.locus.midpoint
        return self.locus

    def involves(self, link: Link) -> bool:
        return link in self.links


class _Sweep:
    def __init__(self, net: Network):
        self.links = net.links
        self.ends = [(link.a.coords, link.b.coords) for link in net.links]
        self.bounds = [
            (tuple(map(min, a, b)), tuple(map(max, a, b))) for a, b in self.ends
        ]
        self.nodes = {node.coords: node for node in net.nodes}
        self.cubes: Sequence[Box3] = net.cubes
        self.shared: Set[GridNode] = (
            set(net.shared_nodes) if net.sharing is SharingMode.Node else set()
        )

    def _external(self, point: RationalPoint3) -> bool:
        # without cube volumes there is no inside to leave
        if not self.cubes:
            return False
        return not point_in_box_union(point, self.cubes)

    def _covers_unit_link(self, segment: Segment) -> bool:
        a, b = segment.a.integer_coords(), segment.b.integer_coords()
        if a not in self.nodes or b not in self.nodes:
            return False
        moved = [axis for axis in range(3) if a[axis] != b[axis]]  # type: ignore
        return len(moved) == 1

    def classify(self, i: int, j: int) -> Optional[CongestionEvent]:
        lo1, hi1 = self.bounds[i]
        lo2, hi2 = self.bounds[j]
        if (
            lo1[0] > hi2[0]
            or lo2[0] > hi1[0]
            or lo1[1] > hi2[1]
            or lo2[1] > hi1[1]
            or lo1[2] > hi2[2]
            or lo2[2] > hi1[2]
        ):
            return None
        (a1, b1), (a2, b2) = self.ends[i], self.ends[j]
        raw = intersect_coordinates(a1, b1, a2, b2)
        if raw is None:
            return None
        tag, value = raw
        pair = (self.links[i], self.links[j])
        if tag == OVERLAP:
            segment = Segment.between(*value)
            return CongestionEvent(
                CongestionKind.LineCongestion,
                pair,
                segment,
                external=self._external(segment.midpoint),
                covers_unit_link=self._covers_unit_link(segment),
            )
        point = RationalPoint3.of(value)
        coords = point.integer_coords()
        node = self.nodes.get(coords) if coords else None
        if node is None:
            return CongestionEvent(
                CongestionKind.PointCongestion,
                pair,
                point,
                external=self._external(point),
            )
        if coords in (a1, b1) and coords in (a2, b2):
            return None
        return CongestionEvent(
            CongestionKind.FullCongestion,
            pair,
            point,
            at_node=node,
            external=self._external(point),
            shared_node=node in self.shared,
        )


def _sweep_rows(
    net: Network, rows: Iterable[int], focus: Optional[FrozenSet[int]]
) -> List[CongestionEvent]:
    sweep = _Sweep(net)
    total = len(net.links)
    events = []
    for i in rows:
        if focus is None or i in focus:
            partners: Iterable[int] = range(i + 1, total)
        else:
            partners = sorted(j for j in focus if j > i)
        for j in partners:
            event = sweep.classify(i, j)
            if event is not None:
                events.append(event)
    return events


def pairwise_congestion(
    net: Network, focus: Optional[Iterable[Link]] = None, workers: int = 1
) -> List[CongestionEvent]:
    """Classify every link pair of ``net``, canonically sorted.

    With ``focus`` only pairs containing at least one focus link are swept.
    ``workers > 1`` splits the rows over joblib workers; the result does not
    depend on the worker count.
    """
    focus_rows: Optional[FrozenSet[int]] = None
    if focus is not None:
        index = {link: i for i, link in enumerate(net.links)}
        focus_rows = frozenset(index[link] for link in focus)
    total = len(net.links)
    LOG.debug(
        "Sweeping '%s': %d links, focus=%s, workers=%d",
        net.label,
        total,
        "all" if focus_rows is None else len(focus_rows),
        workers,
    )
    if workers <= 1 or total < 2:
        events = _sweep_rows(net, range(total), focus_rows)
    else:
        # interleaved rows keep the triangular workload balanced
        chunks = [range(k, total, workers) for k in range(workers)]
        parts = Parallel(n_jobs=workers)(
            delayed(_sweep_rows)(net, chunk, focus_rows) for chunk in chunks
        )
        events = [event for part in parts for event in part]
    events.sort(key=lambda event: event.sort_key)
    LOG.debug("Sweep complete: %d events", len(events))
    return events


@dataclass
class CongestionMap:
    point_multiplicity: Dict[RationalPoint3, FrozenSet[Link]]
    events: List[CongestionEvent]

    @property
    def point_loci(self) -> List[RationalPoint3]:
        return sorted(
            {
                event.locus  # type: ignore
                for event in self.events
                if event.kind is CongestionKind.PointCongestion
            }
        )

    @property
    def full_loci(self) -> List[RationalPoint3]:
        return sorted(
            {
                event.locus  # type: ignore
                for event in self.events
                if event.kind is CongestionKind.FullCongestion
            }
        )

    def multiplicity(self, point: RationalPoint3) -> int:
        return len(self.point_multiplicity.get(point, ()))

    def _serialize(self) -> Mapping[str, Any]:
        full = set(self.full_loci)
        return {
            "schema_version": SCHEMA_VERSION,
            "coordinates": [
                {
                    "locus": point,
                    "kind": (
                        CongestionKind.FullCongestion
                        if point in full
                        else CongestionKind.PointCongestion
                    ).value,
                    "multiplicity": len(links),
                    "links": [str(link) for link in sorted(links)],
                }
                for point, links in self.point_multiplicity.items()
            ],
            "line_events": sum(
                1
                for event in self.events
                if event.kind is CongestionKind.LineCongestion
            ),
        }


def congestion_coordinates(events: Iterable[CongestionEvent]) -> CongestionMap:
    events = list(events)
    grouped: Dict[RationalPoint3, Set[Link]] = defaultdict(set)
    for event in events:
        if event.kind is CongestionKind.LineCongestion:
            continue
        grouped[event.locus].update(event.links)  # type: ignore
    return CongestionMap(
        point_multiplicity={
            point: frozenset(grouped[point]) for point in sorted(grouped)
        },
        events=events,
    )


def links_through(m: CongestionMap, point: RationalPoint3) -> List[Link]:
    return sorted(m.point_multiplicity.get(point, ()))


def congestion_census(events: Iterable[CongestionEvent]) -> Dict[CongestionKind, int]:
    counts = Counter(event.kind for event in events)
    return {kind: counts[kind] for kind in CongestionKind}


def congested_links(events: Iterable[CongestionEvent]) -> Set[Link]:
    return {link for event in events for link in event.links}


def uncongested_links(net: Network, events: Iterable[CongestionEvent]) -> List[Link]:
    busy = congested_links(events)
    return [link for link in net.links if link not in busy]


def _is_intra_cube(link: Link, corner_sets: Sequence[FrozenSet[Any]]) -> bool:
    return any(link.a.coords in s and link.b.coords in s for s in corner_sets)


def redundant_points(
    net: Network, m: CongestionMap, min_intra_links: int = 1
) -> List[RationalPoint3]:
    """Point-congestion loci where cross-cube links land on intra-cube links.

    A locus qualifies when at least ``min_intra_links`` of its links join two
    corners of one cube and at least one link joins nodes of different cubes.
    ``min_intra_links=2`` requires the locus to be a congestion coordinate of
    the intra-cube links alone.
    """
    corner_sets = net.cube_corner_sets()
    if not corner_sets:
        return []
    found = []
    for point in m.point_loci:
        links = m.point_multiplicity[point]
        intra = sum(1 for link in links if _is_intra_cube(link, corner_sets))
        if intra >= min_intra_links and intra < len(links):
            found.append(point)
    return found


def externality_report(events: Iterable[CongestionEvent]) -> List[CongestionEvent]:
    return [event for event in events if event.external]


def full_congestion_nodes(events: Iterable[CongestionEvent]) -> List[GridNode]:
    return sorted(
        {
            event.at_node  # type: ignore
            for event in events
            if event.kind is CongestionKind.FullCongestion
        }
    )


def corollary2_check(
    net: Network, node: GridNode, events: Sequence[CongestionEvent]
) -> bool:
    """True iff every unit link at a fully congested node is line congested."""
    if node not in full_congestion_nodes(events):
        raise PreconditionFailed(f"Node {node} carries no full congestion")
    overlapped = {
        link
        for event in events
        if event.kind is CongestionKind.LineCongestion
        for link in event.links
    }
    incident = [
        link
        for link in net.links
        if link.kind is LinkKind.Unit and link.touches(node)
    ]
    missing = [link for link in incident if link not in overlapped]
    if missing:
        LOG.debug(
            "Unit links at %s without line congestion: %s",
            node,
            ", ".join(str(link) for link in missing),
        )
    return not missing


@dataclass(frozen=True)
class ParadoxMetrics:
    links_total: int
    links_congested: int
    fraction_congested: Fraction
    point_coordinate_count: int
    full_nodes: Tuple[GridNode, ...]
    external_count: int
    census: Mapping[CongestionKind, int]

    @property
    def uncongested_count(self) -> int:
        return self.links_total - self.links_congested


def paradox_metrics(
    net: Network,
    events: Optional[Sequence[CongestionEvent]] = None,
    workers: int = 1,
) -> ParadoxMetrics:
    if events is None:
        events = pairwise_congestion(net, workers=workers)
    total = len(net.links)
    busy = len(congested_links(events))
    point_loci = {
        event.locus
        for event in events
        if event.kind is CongestionKind.PointCongestion
    }
    return ParadoxMetrics(
        links_total=total,
        links_congested=busy,
        fraction_congested=Fraction(busy, total) if total else Fraction(0),
        point_coordinate_count=len(point_loci),
        full_nodes=tuple(full_congestion_nodes(events)),
        external_count=len(externality_report(events)),
        census=congestion_census(events),
    )


@dataclass(frozen=True)
class CenterCoverage:
    center_links: int
    congested: int

    @property
    def all_congested(self) -> bool:
        return self.congested == self.center_links


def center_cube(nx: int, ny: int, nz: int) -> Box3:
    dims = (nx, ny, nz)
    if any(d < 3 or d % 2 == 0 for d in dims):
        raise PreconditionFailed(
            f"A center cube needs odd dimensions of at least 3, got {dims}"
        )
    return Box3.unit(tuple((d - 1) // 2 for d in dims))


def center_cube_coverage(
    nx: int,
    ny: int,
    nz: int,
    node_cap: int = DEFAULT_NODE_CAP,
    workers: int = 1,
) -> CenterCoverage:
    box = center_cube(nx, ny, nz)
    net = build_lattice(nx, ny, nz, node_cap=node_cap)
    center = links_inside(net, box)
    # only pairs touching a center link can congest one
    events = pairwise_congestion(net, focus=center, workers=workers)
    return coverage_of(center, events)


def links_inside(net: Network, box: Box3) -> List[Link]:
    corners = frozenset(box.corners())
    return [
        link
        for link in net.links
        if link.a.coords in corners and link.b.coords in corners
    ]


def coverage_of(
    links: Sequence[Link], events: Iterable[CongestionEvent]
) -> CenterCoverage:
    busy = congested_links(events)
    return CenterCoverage(
        center_links=len(links),
        congested=sum(1 for link in links if link in busy),
    )


class ConflictGraph:
    """Links as vertices, an edge wherever two links share a congestion event."""

    def __init__(
        self,
        links: Iterable[Link] = (),
        conflicts: Iterable[Tuple[Link, Link]] = (),
    ) -> None:
        self._graph = networkx.Graph()
        self._graph.add_nodes_from(links)
        for a, b in conflicts:
            if a != b:
                self._graph.add_edge(a, b)

    @property
    def vertices(self) -> List[Link]:
        return sorted(self._graph.nodes)

    @property
    def edges(self) -> List[Tuple[Link, Link]]:
        return sorted(tuple(sorted(edge)) for edge in self._graph.edges)  # type: ignore

    def degree(self, link: Link) -> int:
        return self._graph.degree[link]

    def neighbors(self, link: Link) -> Set[Link]:
        return set(self._graph.adj[link])

    def is_independent(self, links: Iterable[Link]) -> bool:
        chosen = set(links)
        return not any(self.neighbors(link) & chosen for link in chosen)

    def is_maximal_independent(self, links: Iterable[Link]) -> bool:
        chosen = set(links)
        if not self.is_independent(chosen):
            return False
        return all(
            self.neighbors(link) & chosen
            for link in self._graph.nodes
            if link not in chosen
        )


def build_conflict_graph(
    net: Network, events: Iterable[CongestionEvent]
) -> ConflictGraph:
    return ConflictGraph(net.links, (event.links for event in events))


def permit_assignment(g: ConflictGraph) -> FrozenSet[Link]:
    """Greedy maximal conflict-free link set, lowest degree first."""
    order = sorted(g.vertices, key=lambda link: (g.degree(link), link.key))
    chosen: Set[Link] = set()
    blocked: Set[Link] = set()
    for link in order:
        if link in blocked:
            continue
        chosen.add(link)
        blocked.add(link)
        blocked.update(g.neighbors(link))
    LOG.debug("Assigned %d permits over %d links", len(chosen), len(order))
    return frozenset(chosen)

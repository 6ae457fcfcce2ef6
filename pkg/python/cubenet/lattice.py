import logging
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Type,
)

from .exceptions import (
    InvalidLink,
    PreconditionFailed,
    SchemaError,
    SizeLimitExceeded,
)
from .geometry import Box3, RationalPoint3, Segment
from .interface import SCHEMA_VERSION, LinkKind, SharingMode

LOG = logging.getLogger(__name__)

# the 27-cube lattice is the largest default workload
DEFAULT_NODE_CAP = 64

Coords = Tuple[int, int, int]

_KIND_BY_DISPLACEMENT = {
    (1, 0, 0): LinkKind.Unit,
    (1, 1, 0): LinkKind.PlanarDiagonal,
    (1, 1, 1): LinkKind.SpatialDiagonal,
    (2, 1, 0): LinkKind.LongPlanarDiagonal,
    (2, 1, 1): LinkKind.LongSpatialDiagonal,
    (2, 0, 0): LinkKind.LongEdge,
}

# min corners of the two cubes for each sharing mode
TWO_CUBE_PLACEMENTS: Mapping[SharingMode, Tuple[Coords, Coords]] = {
    SharingMode.Plane: ((0, 0, 0), (0, 0, 1)),
    SharingMode.Edge: ((0, 0, 0), (1, 1, 0)),
    SharingMode.Node: ((0, 0, 0), (1, 1, 1)),
}


@dataclass(frozen=True, order=True)
class GridNode:
    l: int  # noqa: E741
    m: int
    n: int

    @property
    def coords(self) -> Coords:
        return (self.l, self.m, self.n)

    @property
    def point(self) -> RationalPoint3:
        return RationalPoint3(self.l, self.m, self.n)

    @property
    def label(self) -> str:
        return f"{self.l},{self.m},{self.n}"

    def __str__(self) -> str:
        return f"i({self.label})"


def classify_displacement(displacement: Sequence[int]) -> LinkKind:
    key = tuple(sorted((abs(d) for d in displacement), reverse=True))
    if key == (0, 0, 0):
        raise InvalidLink("A link needs two distinct endpoints")
    return _KIND_BY_DISPLACEMENT.get(key, LinkKind.Other)  # type: ignore


def classify_link(a: GridNode, b: GridNode) -> LinkKind:
    if a == b:
        raise InvalidLink(f"Link endpoints coincide at {a}")
    return classify_displacement((b.l - a.l, b.m - a.m, b.n - a.n))


@dataclass(frozen=True, order=True)
class Link:
    a: GridNode
    b: GridNode
    kind: LinkKind = field(compare=False)
    segment: Segment = field(compare=False, repr=False)

    @classmethod
    def between(cls, p: GridNode, q: GridNode) -> "Link":
        kind = classify_link(p, q)
        a, b = sorted((p, q))
        return cls(a, b, kind, Segment(a.point, b.point))

    @property
    def key(self) -> Tuple[Coords, Coords]:
        return (self.a.coords, self.b.coords)

    @property
    def endpoints(self) -> FrozenSet[GridNode]:
        return frozenset((self.a, self.b))

    def touches(self, node: GridNode) -> bool:
        return node in (self.a, self.b)

    def __str__(self) -> str:
        return f"{self.a.label}--{self.b.label}"


@dataclass(frozen=True)
class Network:
    """A complete network: every unordered node pair is a link."""

    nodes: Tuple[GridNode, ...]
    links: Tuple[Link, ...]
    cubes: Tuple[Box3, ...]
    label: str
    sharing: Optional[SharingMode] = None
    shared_nodes: Tuple[GridNode, ...] = ()
    _index: Dict[GridNode, int] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        self._index.update((node, i) for i, node in enumerate(self.nodes))

    def index_of(self, node: GridNode) -> int:
        return self._index[node]

    def node_label(self, node: GridNode) -> str:
        return node.label

    def cube_corner_sets(self) -> List[FrozenSet[Coords]]:
        return [frozenset(box.corners()) for box in self.cubes]

    def _serialize(self) -> Mapping[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "label": self.label,
            "sharing": self.sharing.value if self.sharing else None,
            "shared_nodes": [list(node.coords) for node in self.shared_nodes],
            "nodes": [list(node.coords) for node in self.nodes],
            "links": [
                {
                    "a": self.index_of(link.a),
                    "b": self.index_of(link.b),
                    "kind": link.kind.value,
                }
                for link in self.links
            ],
            "cubes": [list(box.lo) for box in self.cubes],
        }

    @classmethod
    def _deserialize(
        cls: Type["Network"], json_data: Mapping[str, Any]
    ) -> "Network":
        try:
            version = json_data["schema_version"]
            if version != SCHEMA_VERSION:
                raise SchemaError(f"Unsupported schema_version {version!r}")
            nodes = [GridNode(*coords) for coords in json_data["nodes"]]
            if len(set(nodes)) != len(nodes):
                raise SchemaError("Network document repeats a node")
            links = []
            for entry in json_data["links"]:
                a, b = (_node_at(nodes, entry[end]) for end in ("a", "b"))
                link = Link.between(a, b)
                if link.kind.value != entry["kind"]:
                    raise SchemaError(
                        f"Link {link} is recorded as {entry['kind']} "
                        f"but its displacement makes it {link.kind.value}"
                    )
                links.append(link)
            expected = sorted(Link.between(p, q) for p, q in combinations(nodes, 2))
            if sorted(links) != expected:
                raise SchemaError(
                    f"Links must join every node pair exactly once: got "
                    f"{len(links)} links for {len(expected)} pairs"
                )
            cubes = [Box3.unit(corner) for corner in json_data["cubes"]]
            sharing = json_data.get("sharing")
            shared = [GridNode(*c) for c in json_data.get("shared_nodes", [])]
            label = json_data["label"]
        except SchemaError:
            raise
        except (InvalidLink, KeyError, IndexError, TypeError, ValueError) as e:
            LOG.debug("Network document rejected", exc_info=True)
            raise SchemaError(f"Malformed network document: {e!r}") from e
        return cls(
            nodes=tuple(sorted(nodes)),
            links=tuple(sorted(links)),
            cubes=tuple(sorted(cubes)),
            label=label,
            sharing=SharingMode(sharing) if sharing else None,
            shared_nodes=tuple(sorted(shared)),
        )


def _node_at(nodes: Sequence[GridNode], index: Any) -> GridNode:
    if isinstance(index, bool) or not isinstance(index, int):
        raise SchemaError(f"Node index {index!r} is not an integer")
    if not 0 <= index < len(nodes):
        raise SchemaError(f"Node index {index} outside 0..{len(nodes) - 1}")
    return nodes[index]


def complete_network(
    coords: Iterable[Coords],
    cubes: Iterable[Box3],
    label: str,
    sharing: Optional[SharingMode] = None,
    shared: Iterable[Coords] = (),
) -> Network:
    nodes = tuple(sorted({GridNode(*c) for c in coords}))
    links = tuple(sorted(Link.between(p, q) for p, q in combinations(nodes, 2)))
    network = Network(
        nodes=nodes,
        links=links,
        cubes=tuple(sorted(cubes)),
        label=label,
        sharing=sharing,
        shared_nodes=tuple(sorted(GridNode(*c) for c in shared)),
    )
    LOG.debug(
        "Built '%s': %d nodes, %d links, %d cubes",
        label,
        len(nodes),
        len(links),
        len(network.cubes),
    )
    return network


def build_linear() -> Network:
    return complete_network([(0, 0, 0), (1, 0, 0)], [], "linear")


def build_plane() -> Network:
    coords = [(x, y, 0) for x, y in product((0, 1), repeat=2)]
    return complete_network(coords, [], "plane")


def build_cube() -> Network:
    box = Box3.unit((0, 0, 0))
    return complete_network(box.corners(), [box], "cube")


def build_two_cube(mode: SharingMode) -> Network:
    first, second = (Box3.unit(corner) for corner in TWO_CUBE_PLACEMENTS[mode])
    shared = set(first.corners()) & set(second.corners())
    return complete_network(
        list(first.corners()) + list(second.corners()),
        [first, second],
        f"two-cube:{mode.value.lower()}",
        sharing=mode,
        shared=shared,
    )


def lattice_node_count(nx: int, ny: int, nz: int) -> int:
    return (nx + 1) * (ny + 1) * (nz + 1)


def build_lattice(
    nx: int, ny: int, nz: int, node_cap: int = DEFAULT_NODE_CAP
) -> Network:
    dims = (nx, ny, nz)
    if not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise PreconditionFailed(f"Lattice dimensions must be integers: {dims}")
    if min(dims) < 1:
        raise PreconditionFailed(f"Lattice dimensions must be positive: {dims}")
    count = lattice_node_count(nx, ny, nz)
    if count > node_cap:
        raise SizeLimitExceeded(count, node_cap)
    coords = product(range(nx + 1), range(ny + 1), range(nz + 1))
    cubes = [Box3.unit(c) for c in product(range(nx), range(ny), range(nz))]
    return complete_network(coords, cubes, f"lattice:{nx},{ny},{nz}")


def link_census(net: Network) -> Dict[LinkKind, int]:
    counts = Counter(link.kind for link in net.links)
    return {kind: counts[kind] for kind in LinkKind if counts[kind]}

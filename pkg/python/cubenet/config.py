import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

from .exceptions import InvalidSelector
from .interface import OutputFormat, SharingMode
from .lattice import (
    DEFAULT_NODE_CAP,
    Network,
    build_cube,
    build_lattice,
    build_linear,
    build_plane,
    build_two_cube,
)

LOG = logging.getLogger(__name__)

_LATTICE = re.compile(r"^lattice:(\d+),(\d+),(\d+)$")

SIMPLE_BUILDERS = {
    "linear": build_linear,
    "plane": build_plane,
    "cube": build_cube,
}

TWO_CUBE_MODES = {f"two-cube:{mode.value.lower()}": mode for mode in SharingMode}

DEFAULT_PARADOX_SERIES = (
    "lattice:1,1,1",
    "lattice:1,1,2",
    "lattice:2,2,2",
    "lattice:3,3,3",
)


@dataclass(frozen=True)
class NetworkSelector:
    text: str
    dims: Optional[Tuple[int, int, int]] = None

    @property
    def is_lattice(self) -> bool:
        return self.dims is not None

    def build(self, node_cap: int = DEFAULT_NODE_CAP) -> Network:
        if self.dims is not None:
            return build_lattice(*self.dims, node_cap=node_cap)
        if self.text in TWO_CUBE_MODES:
            return build_two_cube(TWO_CUBE_MODES[self.text])
        return SIMPLE_BUILDERS[self.text]()

    def __str__(self) -> str:
        return self.text


def parse_selector(text: str) -> NetworkSelector:
    text = text.strip()
    if text in SIMPLE_BUILDERS or text in TWO_CUBE_MODES:
        return NetworkSelector(text)
    match = _LATTICE.match(text)
    if match:
        dims = tuple(int(g) for g in match.groups())
        return NetworkSelector(text, dims)  # type: ignore
    choices = sorted(SIMPLE_BUILDERS) + sorted(TWO_CUBE_MODES) + ["lattice:nx,ny,nz"]
    raise InvalidSelector(
        f"Unknown network '{text}'. Expected one of: {', '.join(choices)}"
    )


def parse_formats(values: Iterable[str]) -> Tuple[OutputFormat, ...]:
    formats = set()
    for value in values:
        for item in value.split(","):
            item = item.strip().lower()
            if not item:
                continue
            try:
                formats.add(OutputFormat(item))
            except ValueError as e:
                raise InvalidSelector(
                    f"Unknown format '{item}'. Expected a subset of "
                    f"{', '.join(f.value for f in OutputFormat)}"
                ) from e
    if not formats:
        return (OutputFormat.json,)
    return tuple(f for f in OutputFormat if f in formats)


@dataclass
class RunConfig:
    command: str
    networks: List[NetworkSelector] = field(default_factory=list)
    out: Path = Path(".")
    formats: Tuple[OutputFormat, ...] = (OutputFormat.json,)
    seed: int = 0
    node_cap: int = DEFAULT_NODE_CAP
    workers: int = 1
    problem: Optional[Path] = None

    @property
    def network(self) -> NetworkSelector:
        if len(self.networks) != 1:
            raise InvalidSelector(
                f"'{self.command}' needs exactly one --network, "
                f"got {len(self.networks)}"
            )
        return self.networks[0]

    def wants(self, fmt: OutputFormat) -> bool:
        return fmt in self.formats

    @classmethod
    def from_options(
        cls,
        command: str,
        networks: Iterable[str],
        out: Path,
        formats: Iterable[str],
        seed: int = 0,
        node_cap: int = DEFAULT_NODE_CAP,
        workers: int = 1,
        problem: Optional[Path] = None,
    ) -> "RunConfig":
        if workers < 1:
            raise InvalidSelector(f"--workers must be positive, got {workers}")
        if node_cap < 1:
            raise InvalidSelector(f"--node-cap must be positive, got {node_cap}")
        config = cls(
            command=command,
            networks=[parse_selector(text) for text in networks],
            out=out,
            formats=parse_formats(formats),
            seed=seed,
            node_cap=node_cap,
            workers=workers,
            problem=problem,
        )
        LOG.debug("Run configuration: %s", config)
        return config

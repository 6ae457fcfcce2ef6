"""Byte-stable renderings of networks, congestion results and KT reports."""
import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Iterable, List, Mapping, Sequence

from jinja2 import Environment, PackageLoader

from .congestion import CongestionEvent, CongestionMap, ParadoxMetrics
from .equilibrium import KTReport
from .exceptions import SchemaError
from .geometry import RationalPoint3, Segment
from .interface import SCHEMA_VERSION
from .lattice import Network
from .utils import dump_json, fraction_str

LOG = logging.getLogger(__name__)

EVENT_FIELDS = (
    "kind",
    "link_a",
    "link_b",
    "locus",
    "at_node",
    "external",
    "covers_unit_link",
    "shared_node",
)


def _yesno(value: Any) -> str:
    return "yes" if value else "no"


def _setup_env() -> Environment:
    env = Environment(
        loader=PackageLoader(__package__, "templates"),
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
        autoescape=False,  # nosec
    )
    env.filters["fraction"] = fraction_str
    env.filters["yesno"] = _yesno
    return env


ENV = _setup_env()


def render(template_name: str, **kwargs: Any) -> str:
    return ENV.get_template(template_name).render(**kwargs)


def network_to_json(net: Network) -> str:
    return dump_json(net)


def network_from_json(text: str) -> Network:
    try:
        document = json.loads(text)
    except ValueError as e:
        raise SchemaError(f"Network document is not JSON: {e}") from e
    if not isinstance(document, Mapping):
        raise SchemaError("Network document must be a JSON object")
    return Network._deserialize(document)  # pylint: disable=protected-access


def render_dot(net: Network) -> str:
    return render("network.dot", net=net)


def render_obj(net: Network) -> str:
    return render("network.obj", net=net)


def _point_text(point: RationalPoint3) -> str:
    return " ".join(fraction_str(c) for c in point.coords)


def locus_text(locus: Any) -> str:
    if isinstance(locus, Segment):
        return f"{_point_text(locus.a)};{_point_text(locus.b)}"
    return _point_text(locus)


def events_csv(events: Iterable[CongestionEvent]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(EVENT_FIELDS)
    for event in events:
        writer.writerow(
            (
                event.kind.value,
                str(event.links[0]),
                str(event.links[1]),
                locus_text(event.locus),
                event.at_node.label if event.at_node else "",
                int(event.external),
                int(event.covers_unit_link),
                int(event.shared_node),
            )
        )
    return buffer.getvalue()


def congestion_map_json(m: CongestionMap) -> str:
    return dump_json(m)


def metrics_document(net: Network, metrics: ParadoxMetrics) -> Mapping[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "network": net.label,
        "links_total": metrics.links_total,
        "links_congested": metrics.links_congested,
        "fraction_congested": metrics.fraction_congested,
        "point_coordinate_count": metrics.point_coordinate_count,
        "full_nodes": [node.label for node in metrics.full_nodes],
        "external_count": metrics.external_count,
        "events": dict(metrics.census),
    }


def render_summary(net: Network, metrics: ParadoxMetrics) -> str:
    return render("summary.txt", net=net, metrics=metrics)


def render_kt_table(report: KTReport) -> str:
    return render("kt_report.txt", report=report)


def rows_csv(fields: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(
            {
                key: fraction_str(value) if _is_fraction(value) else value
                for key, value in row.items()
            }
        )
    return buffer.getvalue()


def _is_fraction(value: Any) -> bool:
    return hasattr(value, "denominator") and not isinstance(value, (bool, int))


def write_outputs(out_dir: Path, files: Mapping[str, str]) -> List[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in sorted(files):
        path = out_dir / name
        LOG.debug("Writing '%s'", path)
        # newline="" keeps "\n" on every platform
        with path.open("w", encoding="utf-8", newline="") as f:
            f.write(files[name])
        written.append(path)
    return written

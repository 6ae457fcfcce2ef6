import functools
import json
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, TypeVar

import typer

from .config import RunConfig, parse_selector
from .congestion import (
    congestion_coordinates,
    pairwise_congestion,
    paradox_metrics,
)
from .equilibrium import (
    SAMPLER_ALGORITHM,
    ProblemSet,
    best_response,
    is_randomly_complete,
    kt_verify,
    sample_best_response,
)
from .exceptions import (
    InternalFailure,
    InvalidSelector,
    SchemaError,
    VerificationFailed,
    _CubenetError,
)
from .exports import (
    congestion_map_json,
    events_csv,
    metrics_document,
    network_to_json,
    render_dot,
    render_kt_table,
    render_obj,
    render_summary,
    rows_csv,
    write_outputs,
)
from .interface import SCHEMA_VERSION, OutputFormat
from .lattice import DEFAULT_NODE_CAP, Network
from .reports import (
    PARADOX_FIELDS,
    default_series,
    paradox_series,
    render_verification,
    verify_claims,
)
from .utils import dump_json

LOG = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

T = TypeVar("T", bound=Callable[..., Any])

app = typer.Typer(
    help="Build cubic delivery networks and analyse their congestion.",
    add_completion=False,
)


def _setup_logging(verbose: int) -> None:
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT)


@app.callback()
def _main(
    verbose: int = typer.Option(
        0, "--verbose", "-v", count=True, help="-v for INFO, -vv for DEBUG."
    )
) -> None:
    _setup_logging(verbose)


def _exit_on_error(func: T) -> T:
    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except _CubenetError as e:
            LOG.debug("Command failed", exc_info=True)
            typer.echo(f"{e.error_code.value}: {e}", err=True)
            raise typer.Exit(code=e.exit_code)
        except typer.Exit:
            raise
        except Exception as e:  # pylint: disable=broad-except
            LOG.exception("Unexpected failure")
            failure = InternalFailure(f"{type(e).__name__}: {e}")
            typer.echo(f"{failure.error_code.value}: {failure}", err=True)
            raise typer.Exit(code=failure.exit_code)

    return wrapper  # type: ignore


def _stem(net: Network) -> str:
    return net.label.replace(":", "-").replace(",", "-")


def _network_files(cfg: RunConfig, net: Network) -> Dict[str, str]:
    stem = _stem(net)
    files = {}
    if cfg.wants(OutputFormat.json):
        files[f"{stem}.network.json"] = network_to_json(net)
    if cfg.wants(OutputFormat.dot):
        files[f"{stem}.dot"] = render_dot(net)
    if cfg.wants(OutputFormat.obj):
        files[f"{stem}.obj"] = render_obj(net)
    return files


def _write(cfg: RunConfig, files: Dict[str, str]) -> None:
    for path in write_outputs(cfg.out, files):
        typer.echo(f"wrote {path}")


NETWORK_HELP = "linear | plane | cube | two-cube:plane|edge|node | lattice:nx,ny,nz"


@app.command()
@_exit_on_error
def build(
    network: str = typer.Option(..., "--network", help=NETWORK_HELP),
    out: Path = typer.Option(Path("out"), "--out", help="Output directory."),
    formats: List[str] = typer.Option(
        ["json"], "--format", help="Any of json, dot, obj."
    ),
    node_cap: int = typer.Option(DEFAULT_NODE_CAP, "--node-cap"),
) -> None:
    """Export a complete network as JSON, DOT and OBJ."""
    cfg = RunConfig.from_options("build", [network], out, formats, node_cap=node_cap)
    if cfg.wants(OutputFormat.csv):
        raise InvalidSelector("build writes json, dot or obj; csv is not supported")
    net = cfg.network.build(cfg.node_cap)
    _write(cfg, _network_files(cfg, net))


@app.command()
@_exit_on_error
def congestion(
    network: str = typer.Option(..., "--network", help=NETWORK_HELP),
    out: Path = typer.Option(Path("out"), "--out", help="Output directory."),
    formats: List[str] = typer.Option(
        ["json"], "--format", help="Any of json, csv, dot, obj."
    ),
    node_cap: int = typer.Option(DEFAULT_NODE_CAP, "--node-cap"),
    workers: int = typer.Option(1, "--workers", help="Sweep processes."),
) -> None:
    """Sweep every link pair and report the congestion found."""
    cfg = RunConfig.from_options(
        "congestion", [network], out, formats, node_cap=node_cap, workers=workers
    )
    net = cfg.network.build(cfg.node_cap)
    events = pairwise_congestion(net, workers=cfg.workers)
    metrics = paradox_metrics(net, events)
    stem = _stem(net)
    files = _network_files(cfg, net)
    files.pop(f"{stem}.network.json", None)
    if cfg.wants(OutputFormat.json):
        files[f"{stem}.congestion.json"] = congestion_map_json(
            congestion_coordinates(events)
        )
        files[f"{stem}.summary.json"] = dump_json(metrics_document(net, metrics))
    if cfg.wants(OutputFormat.csv):
        files[f"{stem}.events.csv"] = events_csv(events)
    _write(cfg, files)
    typer.echo(render_summary(net, metrics), nl=False)


def _read_problems(path: Path) -> ProblemSet:
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise SchemaError(f"Cannot read problem file '{path}': {e}") from e
    except ValueError as e:
        raise SchemaError(f"Problem file '{path}' is not JSON: {e}") from e
    return ProblemSet._deserialize(document)  # pylint: disable=protected-access


@app.command()
@_exit_on_error
def equilibrium(
    problem: Path = typer.Option(..., "--problem", help="Problem JSON file."),
    out: Path = typer.Option(Path("out"), "--out", help="Output directory."),
    seed: int = typer.Option(0, "--seed", help="Sampler seed."),
    node_cap: int = typer.Option(DEFAULT_NODE_CAP, "--node-cap"),
) -> None:
    """Best responses, KT reports and sampled allocations for a problem file."""
    cfg = RunConfig.from_options(
        "equilibrium",
        [],
        out,
        ["json"],
        seed=seed,
        node_cap=node_cap,
        problem=problem,
    )
    problem_set = _read_problems(problem)
    randomly_complete: Optional[bool] = None
    if problem_set.network is not None:
        net = parse_selector(problem_set.network).build(cfg.node_cap)
        randomly_complete = is_randomly_complete(net, problem_set.problems)

    players, tables = [], []
    for p in problem_set.problems:
        response = best_response(p)
        checked = problem_set.allocations.get(p.player, response.representative)
        report = kt_verify(p, checked)
        players.append(
            {
                "best_response": response,
                "kt_report": report,
                "sample": sample_best_response(p, cfg.seed),
            }
        )
        tables.append(render_kt_table(report))
        shares = ", ".join(str(v) for v in response.representative.values)
        typer.echo(
            f"player {p.player}: best response ({shares}) payoff {response.value}, "
            f"KT {report.verdict.value}"
        )
    if randomly_complete is not None:
        typer.echo(f"randomly complete: {str(randomly_complete).lower()}")

    document = {
        "schema_version": SCHEMA_VERSION,
        "network": problem_set.network,
        "randomly_complete": randomly_complete,
        "sampler": {"algorithm": SAMPLER_ALGORITHM, "seed": cfg.seed},
        "players": players,
    }
    _write(
        cfg,
        {"equilibrium.json": dump_json(document), "kt_report.txt": "\n".join(tables)},
    )


@app.command()
@_exit_on_error
def paradox(
    networks: List[str] = typer.Option(
        [], "--network", help="lattice:nx,ny,nz, repeatable."
    ),
    out: Path = typer.Option(Path("out"), "--out", help="Output directory."),
    node_cap: int = typer.Option(DEFAULT_NODE_CAP, "--node-cap"),
    workers: int = typer.Option(1, "--workers", help="Sweep processes."),
) -> None:
    """Congestion fractions over a series of lattice sizes."""
    cfg = RunConfig.from_options(
        "paradox", networks, out, ["csv"], node_cap=node_cap, workers=workers
    )
    selectors = cfg.networks or default_series()
    for selector in selectors:
        if not selector.is_lattice:
            raise InvalidSelector(
                f"paradox runs on lattices only, got '{selector}'"
            )
    rows = paradox_series(selectors, cfg.node_cap, cfg.workers)
    text = rows_csv(PARADOX_FIELDS, rows)
    _write(cfg, {"paradox.csv": text})
    typer.echo(text, nl=False)


@app.command("verify-paper")
@_exit_on_error
def verify_paper(
    out: Optional[Path] = typer.Option(None, "--out", help="Also write JSON here."),
    workers: int = typer.Option(1, "--workers", help="Sweep processes."),
) -> None:
    """Recompute every stated count and compare it with the expected value."""
    report = verify_claims(workers=workers)
    typer.echo(render_verification(report), nl=False)
    if out is not None:
        for path in write_outputs(out, {"verification.json": dump_json(report)}):
            typer.echo(f"wrote {path}")
    if not report.passed:
        raise VerificationFailed(
            f"{len(report.failures)} of {len(report.rows)} claims failed"
        )


def main() -> None:
    app(prog_name="cubenet")

import json
from fractions import Fraction
from unittest.mock import patch

import pytest
from cubenet.cli import app
from cubenet.equilibrium import PlayerProblem, ProblemSet, problems_for_network
from cubenet.lattice import build_cube
from cubenet.reports import ClaimRow, VerificationReport
from cubenet.utils import dump_json
from typer.testing import CliRunner


@pytest.fixture
def runner():
    return CliRunner()


def two_node_file(tmp_path, benefit=3):
    problem = PlayerProblem(0, (1,), (Fraction(benefit),), (Fraction(1),), Fraction(2))
    path = tmp_path / "problem.json"
    path.write_text(dump_json(problem), encoding="utf-8")
    return path


def test_build_cube(runner, tmp_path):
    result = runner.invoke(
        app,
        ["build", "--network", "cube", "--out", str(tmp_path), "--format", "json,obj"],
    )
    assert result.exit_code == 0, result.output
    document = json.loads((tmp_path / "cube.network.json").read_text())
    assert len(document["nodes"]) == 8
    assert len(document["links"]) == 28
    assert (tmp_path / "cube.obj").exists()
    assert not (tmp_path / "cube.dot").exists()
    assert "wrote" in result.output


def test_build_lattice_stem(runner, tmp_path):
    result = runner.invoke(
        app, ["build", "--network", "lattice:2,1,1", "--out", str(tmp_path)]
    )
    assert result.exit_code == 0, result.output
    assert (tmp_path / "lattice-2-1-1.network.json").exists()


def test_build_over_node_cap_exits_2(runner, tmp_path):
    result = runner.invoke(
        app, ["build", "--network", "lattice:5,5,5", "--out", str(tmp_path)]
    )
    assert result.exit_code == 2
    assert "SizeLimitExceeded" in result.output
    assert list(tmp_path.iterdir()) == []


def test_build_unknown_network_exits_1(runner, tmp_path):
    result = runner.invoke(
        app, ["build", "--network", "square", "--out", str(tmp_path)]
    )
    assert result.exit_code == 1
    assert "InvalidSelector" in result.output


def test_build_unknown_format_exits_1(runner, tmp_path):
    result = runner.invoke(
        app, ["build", "--network", "cube", "--out", str(tmp_path), "--format", "png"]
    )
    assert result.exit_code == 1


def test_build_rejects_csv(runner, tmp_path):
    result = runner.invoke(
        app, ["build", "--network", "cube", "--out", str(tmp_path), "--format", "csv"]
    )
    assert result.exit_code == 1
    assert "InvalidSelector" in result.output
    assert list(tmp_path.iterdir()) == []


def test_congestion_plane_sharing(runner, tmp_path):
    result = runner.invoke(
        app,
        [
            "congestion",
            "--network",
            "two-cube:plane",
            "--out",
            str(tmp_path),
            "--format",
            "json,csv",
        ],
    )
    assert result.exit_code == 0, result.output
    assert "two-cube:plane: 66 links" in result.output
    assert "LineCongestion: 8 events" in result.output
    summary = json.loads((tmp_path / "two-cube-plane.summary.json").read_text())
    assert summary["events"]["LineCongestion"] == 8
    assert summary["external_count"] == 0
    assert len(summary["full_nodes"]) == 4
    assert (tmp_path / "two-cube-plane.congestion.json").exists()
    assert (tmp_path / "two-cube-plane.events.csv").exists()
    assert not (tmp_path / "two-cube-plane.network.json").exists()


def test_congestion_cube(runner, tmp_path):
    result = runner.invoke(
        app, ["congestion", "--network", "cube", "--out", str(tmp_path)]
    )
    assert result.exit_code == 0, result.output
    assert "cube: 28 links, 16 congested (4/7)" in result.output
    assert "full congestion nodes: none" in result.output


def test_congestion_node_sharing(runner, tmp_path):
    result = runner.invoke(
        app,
        ["congestion", "--network", "two-cube:node", "--out", str(tmp_path)],
    )
    assert result.exit_code == 0, result.output
    assert "full congestion nodes: i(1,1,1)" in result.output


def test_congestion_is_deterministic(runner, tmp_path):
    outputs = []
    for name, workers in (("one", "1"), ("two", "2")):
        out = tmp_path / name
        result = runner.invoke(
            app,
            [
                "congestion",
                "--network",
                "two-cube:edge",
                "--out",
                str(out),
                "--format",
                "json,csv,dot,obj",
                "--workers",
                workers,
            ],
        )
        assert result.exit_code == 0, result.output
        outputs.append({p.name: p.read_bytes() for p in out.iterdir()})
    assert outputs[0] == outputs[1]


def test_equilibrium_two_node(runner, tmp_path):
    problem = two_node_file(tmp_path)
    out = tmp_path / "out"
    result = runner.invoke(
        app, ["equilibrium", "--problem", str(problem), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert "player 0: best response (0, 1) payoff 2, KT satisfied" in result.output
    document = json.loads((out / "equilibrium.json").read_text())
    (player,) = document["players"]
    assert player["best_response"]["value"] == "2"
    assert player["kt_report"]["verdict"] == "satisfied"
    assert player["sample"] == {"x_self": "0", "x": ["1"]}
    assert document["randomly_complete"] is None
    assert "verdict: satisfied" in (out / "kt_report.txt").read_text()


def test_equilibrium_checks_given_allocation(runner, tmp_path):
    path = tmp_path / "problem.json"
    document = json.loads(two_node_file(tmp_path).read_text())
    document["allocation"] = {"x_self": 1, "x": [0]}
    path.write_text(json.dumps(document), encoding="utf-8")
    result = runner.invoke(
        app, ["equilibrium", "--problem", str(path), "--out", str(tmp_path / "out")]
    )
    assert result.exit_code == 0, result.output
    assert "KT violated" in result.output


def test_equilibrium_symmetric_cube(runner, tmp_path):
    path = tmp_path / "cube.json"
    path.write_text(
        dump_json(ProblemSet(problems_for_network(build_cube()), "cube")),
        encoding="utf-8",
    )
    result = runner.invoke(
        app,
        ["equilibrium", "--problem", str(path), "--out", str(tmp_path), "--seed", "3"],
    )
    assert result.exit_code == 0, result.output
    assert "randomly complete: true" in result.output
    document = json.loads((tmp_path / "equilibrium.json").read_text())
    assert len(document["players"]) == 8
    assert document["sampler"]["seed"] == 3
    for player in document["players"]:
        shares = [Fraction(x) for x in player["sample"]["x"]]
        assert sum(shares) == 1


def test_equilibrium_rejects_equal_benefit_and_cost(runner, tmp_path):
    problem = two_node_file(tmp_path, benefit=1)
    result = runner.invoke(
        app, ["equilibrium", "--problem", str(problem), "--out", str(tmp_path)]
    )
    assert result.exit_code == 1
    assert "b_{ij} > c_{ij} > 0" in result.output


def test_equilibrium_missing_file(runner, tmp_path):
    result = runner.invoke(
        app, ["equilibrium", "--problem", str(tmp_path / "missing.json")]
    )
    assert result.exit_code == 1
    assert "SchemaError" in result.output


def test_paradox(runner, tmp_path):
    result = runner.invoke(
        app,
        [
            "paradox",
            "--network",
            "lattice:1,1,1",
            "--network",
            "lattice:1,1,2",
            "--out",
            str(tmp_path),
        ],
    )
    assert result.exit_code == 0, result.output
    lines = (tmp_path / "paradox.csv").read_text().splitlines()
    assert lines[0].startswith("network,links_total,links_congested")
    assert lines[1].startswith('"lattice:1,1,1",28,16,4/7,12,')
    assert lines[2].startswith('"lattice:1,1,2",66,')


def test_paradox_rejects_non_lattice(runner, tmp_path):
    result = runner.invoke(
        app, ["paradox", "--network", "cube", "--out", str(tmp_path)]
    )
    assert result.exit_code == 1
    assert "lattices only" in result.output


def test_verify_paper_failure_exits_3(runner):
    failing = VerificationReport((ClaimRow("links", "anchor", "66", "65", False),))
    with patch("cubenet.cli.verify_claims", return_value=failing):
        result = runner.invoke(app, ["verify-paper"])
    assert result.exit_code == 3
    assert "[FAIL] links: expected 66, computed 65 (anchor)" in result.output
    assert "VerificationFailed" in result.output


def test_verify_paper_writes_json(runner, tmp_path):
    passing = VerificationReport((ClaimRow("links", "anchor", "66", "66", True),))
    with patch("cubenet.cli.verify_claims", return_value=passing) as mock_verify:
        result = runner.invoke(app, ["verify-paper", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    mock_verify.assert_called_once_with(workers=1)
    document = json.loads((tmp_path / "verification.json").read_text())
    assert document["passed"] is True


@pytest.mark.slow
def test_verify_paper(runner):
    result = runner.invoke(app, ["verify-paper", "--workers", "2"])
    assert result.exit_code == 0, result.output
    assert "overall pass" in result.output


def test_unexpected_errors_exit_1(runner, tmp_path):
    with patch("cubenet.cli.pairwise_congestion", side_effect=RuntimeError("boom")):
        result = runner.invoke(
            app, ["congestion", "--network", "cube", "--out", str(tmp_path)]
        )
    assert result.exit_code == 1
    assert "InternalFailure: RuntimeError: boom" in result.output

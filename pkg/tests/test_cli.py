import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from conemetrics import SymPDCone, sym_to_vec, thompson_distance
from conemetrics.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def test_distance_prints_all_four_quantities(runner):
    result = runner.invoke(main, [
        "distance", "--cone", "orthant:2",
        "--point", "[1, 1]", "--point", f"[{math.e!r}, 1]",
    ])
    assert result.exit_code == 0
    assert "d_T    = 1.0" in result.output
    assert "d_H    = 1.0" in result.output
    assert "M(x/y)" in result.output and "M(y/x)" in result.output


def test_distance_json_format(runner):
    result = runner.invoke(main, [
        "distance", "--cone", "orthant:2", "--format", "json",
        "--point", "[1, 1]", "--point", "[2, 1]",
    ])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["thompson"] == pytest.approx(math.log(2.0))


def test_distance_sympd_round_trip_through_file(runner, tmp_path):
    cone = SymPDCone(2)
    x = sym_to_vec(np.array([[2.0, 0.3], [0.3, 1.0]]))
    y = sym_to_vec(np.eye(2))
    path = tmp_path / "points.json"
    path.write_text(json.dumps([x.tolist(), y.tolist()]))
    result = runner.invoke(main, [
        "distance", "--cone", "sympd:2", "--points-file", str(path), "--format", "json",
    ])
    assert result.exit_code == 0
    data = json.loads(result.output)
    expected = thompson_distance(cone.point(x), cone.point(y))
    assert data["thompson"] == pytest.approx(expected, abs=1e-14)


def test_distance_parse_error_reports_position(runner):
    result = runner.invoke(main, [
        "distance", "--cone", "orthant:2",
        "--point", "[1, 1", "--point", "[1, 1]",
    ])
    assert result.exit_code != 0
    assert "line 1" in result.output and "column" in result.output


def test_bad_cone_spec(runner):
    result = runner.invoke(main, ["distance", "--cone", "orthant", "--point", "[1]",
                                  "--point", "[1]"])
    assert result.exit_code != 0
    assert "orthant:3" in result.output


def test_geodesic_grid(runner):
    result = runner.invoke(main, [
        "geodesic", "--cone", "orthant:2",
        "--point", "[1, 1]", "--point", "[4, 1]", "--n-samples", "3",
    ])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["points"][1] == pytest.approx([2.0, 1.0], abs=1e-14)
    assert data["s_values"] == [0.0, 0.5, 1.0]


def test_campaign_writes_report_and_exits_zero(runner, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(main, [
        "campaign", "--kind", "theorem1", "--cone", "orthant:3",
        "--n-samples", "100", "--seed", "1", "--out", str(out),
    ])
    assert result.exit_code == 0
    data = json.loads(out.read_text())
    assert data["aggregate"]["violations"] == 0
    assert "0 violations" in result.output


def test_campaign_csv_format(runner, tmp_path):
    out = tmp_path / "report.csv"
    result = runner.invoke(main, [
        "campaign", "--kind", "theorem2", "--cone", "orthant:3",
        "--n-samples", "20", "--seed", "1", "--format", "csv", "--out", str(out),
    ])
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    header = [line for line in lines if line.startswith("index,")]
    assert header == ["index,lhs,rhs,ratio,satisfied"]
    assert sum(1 for line in lines if line and not line.startswith(("#", "index"))) == 20


def test_campaign_violations_fail_exit_code(runner):
    # A negative tolerance forces every trial to count as a violation for
    # an asserted kind, which must surface in the exit code.
    result = runner.invoke(main, [
        "campaign", "--kind", "semihyperbolic", "--cone", "orthant:4",
        "--n-samples", "20", "--seed", "1", "--tol", "-10", "--no-trials",
    ])
    assert result.exit_code == 1


def test_busemann_never_fails_exit_code(runner):
    result = runner.invoke(main, [
        "campaign", "--kind", "busemann", "--cone", "orthant:3",
        "--n-samples", "500", "--seed", "2", "--R", "3.0", "--no-trials",
    ])
    assert result.exit_code == 0


def test_tightness_command(runner):
    result = runner.invoke(main, [
        "tightness", "--metric", "thompson", "--R", "2", "--s", "0.5",
    ])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["gap"] <= 0.01


def test_embed_command(runner, tmp_path):
    path = tmp_path / "pts.json"
    path.write_text(json.dumps([[1.0, 1.0], [2.0, 1.0], [1.0, 3.0]]))
    result = runner.invoke(main, [
        "embed", "--cone", "orthant:2", "--points-file", str(path),
    ])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["report"]["ok"] is True
    assert len(data["images"]) == 3

"""Command-line interface: outputs, reports and exit codes."""

import json
import subprocess
import sys

import numpy as np
import pytest

from genpentagram import __version__
from genpentagram.cli import main
from genpentagram.io import polygon_to_json, write_json
from genpentagram.maps import random_convex_polygon, regular_polygon


@pytest.fixture
def pentagon(tmp_path):
    path = tmp_path / "pentagon.json"
    write_json(path, polygon_to_json(regular_polygon(5)))
    return path


def test_map_with_equivalence_check(pentagon, tmp_path):
    out = tmp_path / "map.json"
    assert main(["map", "--polygon", str(pentagon), "--schema", "pentagram",
                 "--check-equivalence", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["version"] == __version__ and report["seed"] == 0
    assert report["config"]["schema"] == "pentagram"
    assert report["equivalence"]["equivalent"] is True
    assert len(report["polygons"]) == 2


def test_map_reports_non_equivalence(tmp_path):
    path = tmp_path / "p.json"
    write_json(path, polygon_to_json(random_convex_polygon(9, np.random.default_rng(0))))
    assert main(["map", "--polygon", str(path), "--schema", "pentagram",
                 "--check-equivalence"]) == 1


def test_map_with_schema_file(pentagon, tmp_path):
    schema = tmp_path / "s.json"
    schema.write_text(json.dumps({"dim": 2, "subspaces": [[-2, 1], [-1, 2]], "name": "s"}))
    assert main(["map", "--polygon", str(pentagon), "--schema", str(schema)]) == 0


@pytest.mark.parametrize("args", [
    ["map", "--polygon", "missing.json", "--schema", "pentagram"],
    ["map", "--schema", "pentagram"],
    ["search", "rp3", "--max-abs", "1"],
    ["search", "rp3", "--max-abs", "3", "--q", "x/y"],
    ["psdo", "--order", "4", "--exponent", "3/5"],
    ["limit", "--flavor", "rp4", "--offsets", "1,2,3"],
    ["limit", "--flavor", "syst2", "--out", "/nonexistent/dir/r.json"],
    ["verify-all", "--only", "a,b"],
    ["nonsense"],
])
def test_usage_errors_exit_two(args, capsys):
    assert main(args) == 2


def test_malformed_polygon_exits_two(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"vertices": [[1, 2]]}))
    assert main(["map", "--polygon", str(bad), "--schema", "pentagram"]) == 2


def test_degenerate_map_exits_one(tmp_path):
    square = tmp_path / "square.json"
    write_json(square, polygon_to_json(regular_polygon(4)))
    assert main(["map", "--polygon", str(square), "--schema", "syst2"]) == 1


def test_limit_report(tmp_path, capsys):
    out, csv = tmp_path / "l.json", tmp_path / "l.csv"
    assert main(["limit", "--flavor", "syst2", "--out", str(out), "--csv", str(csv)]) == 0
    report = json.loads(out.read_text())
    assert report["report"]["order"] == 2
    assert csv.read_text().startswith("row,eps")
    assert "fitted order" in capsys.readouterr().out


def test_search_report(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert main(["search", "rp3", "--max-abs", "6", "--threads", "2", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["count"] == 6 and report["config"]["threads"] == 2
    assert "6 solutions" in capsys.readouterr().out


def test_psdo_output(capsys):
    assert main(["psdo", "--order", "4", "--exponent", "3/4"]) == 0
    text = capsys.readouterr().out
    assert "l1 = 1/4*k2" in text and "res L^(3/4)" in text


@pytest.mark.parametrize("source", ["literature", "derived"])
def test_gauge_output(source, capsys):
    assert main(["gauge", "--n", "3", "--source", source]) == 0
    text = capsys.readouterr().out
    assert f"residual is zero: {source == 'derived'}" in text


def test_verify_all_exit_codes(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify-all", "--only", "1,5", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert [c["number"] for c in report["criteria"]] == [1, 5]
    assert main(["verify-all", "--only", "3,11"]) == 1


def test_console_script_version():
    proc = subprocess.run([sys.executable, "-m", "genpentagram.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout

"""
End-to-end tests of the conespec command line and the graph loader.
"""

import json
import math

import pytest

import metric_graph_oracle
from cone_graph import cycle_graph, path_graph
from conespec import main
from data_manager import DataManager
from errors import InputParseError
from euclid_degrees import scan_all_euclid


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_scan_reports_degrees(capsys, write_graph, triangle):
    code, out, _ = run(capsys, "scan", write_graph(triangle), "--alpha-max", 2.9)
    assert code == 0
    data = json.loads(out)
    assert [d["alpha"] for d in data["degrees"]] == pytest.approx([1.0, 2.0])
    assert [d["multiplicity"] for d in data["degrees"]] == [2, 2]
    assert [r["alpha"] for r in data["singular"]] == pytest.approx([1.5])
    assert 0 < data["lower_bound"] <= 1.0


def test_scan_is_deterministic(capsys, write_graph, square):
    path = write_graph(square)
    first = run(capsys, "scan", path, "--alpha-max", 2.5)[1]
    second = run(capsys, "scan", path, "--alpha-max", 2.5)[1]
    assert first == second


def test_angles_in_degrees(capsys, write_graph):
    raw = {
        "vertices": ["a", "b", "c", "d"],
        "edges": [{"u": u, "v": v, "theta": 90} for u, v in ["ab", "bc", "cd", "da"]],
    }
    code, out, _ = run(capsys, "scan", write_graph(raw), "--degrees", "--alpha-max", 1.5)
    assert code == 0
    data = json.loads(out)
    assert [d["alpha"] for d in data["degrees"]] == pytest.approx([1.0])


def test_output_file(capsys, write_graph, triangle, tmp_path):
    target = tmp_path / "reports" / "scan.json"
    code, out, _ = run(capsys, "scan", write_graph(triangle), "--alpha-max", 1.2, "--output", target)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["degrees"][0]["multiplicity"] == 2


def test_malformed_json_exits_with_parse_code(capsys, write_graph):
    code, _, err = run(capsys, "scan", write_graph("{not json"))
    assert code == 2
    assert json.loads(err.strip().splitlines()[-1])["exit_code"] == 2


def test_missing_file_and_bad_arguments(capsys, tmp_path):
    assert run(capsys, "scan", tmp_path / "absent.json")[0] == 2
    assert run(capsys, "scan")[0] == 2


def test_disconnected_graph_exits_with_validation_code(capsys, write_graph):
    raw = {
        "vertices": ["a", "b", "c", "d"],
        "edges": [{"u": "a", "v": "b", "theta": 1.0}, {"u": "c", "v": "d", "theta": 1.0}],
    }
    path = write_graph(raw)
    code, _, err = run(capsys, "scan", path)
    assert code == 3
    assert "disconnected" in json.loads(err.strip().splitlines()[-1])["violations"]

    code, out, _ = run(capsys, "validate", path)
    assert code == 3
    assert json.loads(out)["valid"] is False


def test_validate_reports_structure(capsys, write_graph, k4):
    code, out, _ = run(capsys, "validate", write_graph(k4))
    assert code == 0
    data = json.loads(out)
    assert data["valid"] is True
    assert data["summary"]["edges"] == 6
    assert "structure" in data


def test_verify_agrees_with_the_oracle(capsys, write_graph, triangle):
    code, out, _ = run(capsys, "verify", write_graph(triangle), "--alpha-max", 2.5, "--m", 64)
    assert code == 0
    data = json.loads(out)
    assert data["all_matched"] is True
    assert len(data["rows"]) == 2


def test_verify_flags_a_wrong_scanner(capsys, monkeypatch, write_graph, triangle):
    stretched = cycle_graph(3, 0.9 * 2 * math.pi / 3)
    monkeypatch.setattr(
        metric_graph_oracle,
        "scan_all_euclid",
        lambda g, alpha_max, cfg=None: scan_all_euclid(stretched, alpha_max, cfg),
    )
    code, out, _ = run(capsys, "verify", write_graph(triangle), "--alpha-max", 2.5, "--m", 64)
    assert code == 1
    assert json.loads(out)["all_matched"] is False


def test_verify_rejects_coarse_meshes(capsys, write_graph, triangle):
    assert run(capsys, "verify", write_graph(triangle), "--m", 2)[0] == 2


def test_curves_csv(capsys, write_graph, triangle):
    code, out, _ = run(capsys, "curves", write_graph(triangle), 0.1, 1.4)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "alpha,lambda_1,lambda_2,lambda_3"
    assert len(lines) == 101


def test_conemap_command(capsys, write_graph):
    g = path_graph(3, [math.pi / 2, math.pi / 3], phi=math.pi / 3)
    code, out, _ = run(capsys, "conemap", write_graph(g))
    assert code == 0
    data = json.loads(out)
    assert data["count"] == 3
    assert data["lower_bound"] == pytest.approx(2 / 3)
    assert data["endpoint"]["verdict"]


def test_conemap_needs_target_angles(capsys, write_graph, triangle):
    assert run(capsys, "conemap", write_graph(triangle))[0] == 3


def test_kpod_command(capsys, write_graph, square):
    code, out, _ = run(capsys, "kpod", write_graph(square), "--alpha", 2.0)
    assert code == 0
    data = json.loads(out)
    assert [d["alpha"] for d in data["degrees"]] == pytest.approx([1.0, 1.5, 2.0])
    assert data["certificate"]["exists"] is True


def test_pharmonic_command(capsys):
    code, out, _ = run(capsys, "pharmonic", "--p", 3)
    assert code == 0
    data = json.loads(out)
    assert data["alpha"] == pytest.approx((35 + math.sqrt(73)) / 32)
    assert data["bound"] == pytest.approx(data["alpha"])

    code, out, _ = run(capsys, "pharmonic", "--p", 2, "--theta0", 90, "--degrees")
    assert json.loads(out)["alpha"] == pytest.approx(2.0)
    assert run(capsys, "pharmonic", "--p", 1)[0] == 3


def test_oracle_command_writes_eigenfunction(capsys, write_graph, triangle, tmp_path):
    target = tmp_path / "mode.csv"
    code, out, _ = run(
        capsys, "oracle", write_graph(triangle), "--m", 32, "--alpha-max", 2.5, "--csv", target, "--mode", 1
    )
    assert code == 0
    data = json.loads(out)
    assert [d["multiplicity"] for d in data["oracle_degrees"]] == [2, 2]
    lines = target.read_text().strip().split("\n")
    assert lines[0] == "edge_id,s,rho"
    assert len(lines) == 1 + 3 * 33


def test_oracle_mode_out_of_range(capsys, write_graph, triangle, tmp_path):
    code = run(
        capsys, "oracle", write_graph(triangle), "--m", 32, "--csv", tmp_path / "x.csv", "--mode", 999
    )[0]
    assert code == 3


class TestDataManager:
    def test_round_trip_of_a_graph(self, mixed_path):
        g = DataManager().graph_from_dict(mixed_path.to_dict())
        assert g.vertex_order == mixed_path.vertex_order
        assert list(g.theta) == [1.0, 2.0]

    @pytest.mark.parametrize(
        "data",
        [
            [],
            {"vertices": ["a"]},
            {"vertices": "ab", "edges": []},
            {"vertices": ["a", "b"], "edges": ["ab"]},
            {"vertices": ["a", "b"], "edges": [{"u": "a", "v": "b"}]},
            {"vertices": ["a", "b"], "edges": [{"u": "a", "v": "b", "theta": "wide"}]},
            {"vertices": ["a", "b"], "edges": [{"u": "a", "v": "b", "theta": 1.0}], "options": "none"},
            {"vertices": ["a", "b"], "edges": [], "options": {"allow_wide_angles": "yes"}},
        ],
    )
    def test_parse_errors(self, data):
        with pytest.raises(InputParseError):
            DataManager().graph_from_dict(data)

    def test_edge_ids_and_phi(self):
        g = DataManager().graph_from_dict(
            {"vertices": ["a", "b"], "edges": [{"u": "a", "v": "b", "theta": 60, "phi": 45, "id": "x"}]},
            degrees=True,
        )
        assert g.edges[0].id == "x"
        assert g.edges[0].theta == pytest.approx(math.pi / 3)
        assert g.edges[0].phi == pytest.approx(math.pi / 4)

    def test_json_is_stable(self):
        dm = DataManager()
        assert dm.to_json({"b": 0.1, "a": [1, 2]}) == dm.to_json({"b": 0.1, "a": [1, 2]})
        assert "0.1" in dm.to_json({"x": 0.1})

    def test_relative_outputs_go_under_the_output_dir(self, tmp_path):
        dm = DataManager(output_dir=str(tmp_path))
        path = dm.write_text("hello\n", "nested/out.txt")
        assert (tmp_path / "nested" / "out.txt").read_text() == "hello\n"
        assert path.startswith(str(tmp_path))


def wide_triangle(flag_in_file):
    raw = {
        "vertices": ["a", "b", "c"],
        "edges": [
            {"u": "a", "v": "b", "theta": 1.2 * math.pi},
            {"u": "b", "v": "c", "theta": 1.0},
            {"u": "c", "v": "a", "theta": 1.0},
        ],
    }
    if flag_in_file:
        raw["options"] = {"allow_wide_angles": True}
    return raw


@pytest.mark.parametrize("command", ["scan", "verify", "curves", "oracle"])
def test_wide_angles_are_refused_outside_kpod(capsys, write_graph, command):
    path = write_graph(wide_triangle(flag_in_file=False))
    extra = [0.1, 1.0] if command == "curves" else []
    assert run(capsys, command, path, *extra, "--allow-wide-angles")[0] == 3

    path = write_graph(wide_triangle(flag_in_file=True), name="flagged.json")
    code, _, err = run(capsys, command, path, *extra)
    assert code == 3
    assert any("angle out of (0,π)" in v for v in json.loads(err.strip().splitlines()[-1])["violations"])


def test_kpod_accepts_wide_angles(capsys, write_graph):
    path = write_graph(wide_triangle(flag_in_file=False))
    code, _, _ = run(capsys, "kpod", path, "--allow-wide-angles")
    assert code == 0
    assert run(capsys, "validate", path, "--allow-wide-angles")[0] == 0


def test_edgeless_graph_exits_with_validation_code(capsys, write_graph):
    path = write_graph({"vertices": ["a"], "edges": []})
    code, _, err = run(capsys, "scan", path)
    assert code == 3
    assert "no edges" in json.loads(err.strip().splitlines()[-1])["violations"]

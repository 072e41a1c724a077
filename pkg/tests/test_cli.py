import json

import pytest
from click.testing import CliRunner

from ffconsensus.cli import EXIT_GUARD, EXIT_PARSE, EXIT_PRECONDITION, main

A1_TEXT = "3 3\n2 1 1\n2 1 1\n2 1 1\n"
A3_TEXT = "3 3\n2 1 1\n1 2 1\n1 1 2\n"
A7_TEXT = "4 5\n0 4 2 0\n1 1 0 4\n0 0 2 4\n0 1 2 3\n"
SCENARIO_TEXT = A7_TEXT + "0 1 1 1\n"
POSE_TEXT = SCENARIO_TEXT + "4\n1 2 4\n1 3 3\n2 4 3\n3 4 4\n"


@pytest.fixture
def runner():
    return CliRunner()


def write(path, text):
    path.write_text(text)
    return str(path)


def test_analyze_consensus_matrix(runner, tmp_path):
    f = write(tmp_path / "a1.txt", A1_TEXT)
    result = runner.invoke(main, ["analyze", f])
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    assert doc["kind"] == "analyze"
    assert doc["achieves_consensus"] is True
    assert doc["char_poly"] == "s^3 + 2s^2"
    assert doc["pi"] == [2, 1, 1]


def test_analyze_extras_and_dot(runner, tmp_path):
    f = write(tmp_path / "a3.txt", A3_TEXT)
    dot = tmp_path / "graph.dot"
    out = tmp_path / "report.json"
    result = runner.invoke(main, [
        "analyze", f, "--transition-graph", "--inverse-recursion", "1",
        "--predict-cycles", "--dot", str(dot), "-o", str(out),
    ])
    assert result.exit_code == 0, result.output
    doc = json.loads(out.read_text())
    assert doc["transition_graph"]["num_states"] == 27
    assert doc["inverse_recursion"]["limiting_set_size"] == 1
    assert doc["predicted_cycles"] == doc["transition_graph"]["cycle_inventory"]
    assert dot.read_text().startswith("digraph")
    assert "dot" not in doc  # the DOT body stays out of the JSON report


def test_analyze_reports_are_byte_identical(runner, tmp_path):
    f = write(tmp_path / "a1.txt", A1_TEXT)
    r1 = runner.invoke(main, ["analyze", f, "--predict-cycles"])
    r2 = runner.invoke(main, ["analyze", f, "--predict-cycles"])
    assert r1.output == r2.output


def test_parse_error_exit_code(runner, tmp_path):
    f = write(tmp_path / "bad.txt", "2 4\n1 0\n0 1\n")
    result = runner.invoke(main, ["analyze", f])
    assert result.exit_code == EXIT_PARSE
    missing = runner.invoke(main, ["analyze", str(tmp_path / "nope.txt")])
    assert missing.exit_code == EXIT_PARSE


def test_design_enumerate_and_out_dir(runner, tmp_path):
    g = write(tmp_path / "k2.txt", "2 3\n1 1\n1 2\n2 1\n2 2\n")
    outdir = tmp_path / "designs"
    result = runner.invoke(main, ["design", g, "--out-dir", str(outdir)])
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    assert doc["total_count"] == 3
    files = sorted(outdir.glob("matrix_*.txt"))
    assert len(files) == 3
    assert files[0].read_text() == "2 3\n0 1\n0 1\n"


def test_design_guard_exit_code(runner, tmp_path):
    edges = "\n".join(f"{i} {j}" for i in range(1, 5) for j in range(1, 5))
    g = write(tmp_path / "k4.txt", f"4 5\n{edges}\n")
    result = runner.invoke(main, ["design", g, "--limit", "10"])
    assert result.exit_code == EXIT_GUARD


def test_design_tree_and_complete(runner, tmp_path):
    g = write(tmp_path / "tree.txt", "3 3\n1 1\n2 1\n3 2\n")
    result = runner.invoke(main, ["design", g, "--construct", "tree"])
    assert result.exit_code == 0
    assert json.loads(result.output)["matrices"][0]["rows"] == [
        [1, 0, 0], [1, 0, 0], [0, 1, 0],
    ]

    k3 = write(tmp_path / "k3.txt", "3 5\n" + "\n".join(
        f"{i} {j}" for i in range(1, 4) for j in range(1, 4)) + "\n")
    result = runner.invoke(main, ["design", k3, "--construct", "complete"])
    assert result.exit_code == 0
    assert json.loads(result.output)["matrices"][0]["rows"] == [[2, 2, 2]] * 3


def test_design_complete_default_v_needs_invertible_n(runner, tmp_path):
    k3 = write(tmp_path / "k3.txt", "3 3\n" + "\n".join(
        f"{i} {j}" for i in range(1, 4) for j in range(1, 4)) + "\n")
    result = runner.invoke(main, ["design", k3, "--construct", "complete"])
    assert result.exit_code == EXIT_PRECONDITION


def test_design_kronecker_files(runner, tmp_path):
    f = write(tmp_path / "a7.txt", A7_TEXT)
    result = runner.invoke(main, ["design", "--kronecker", f, "--kronecker", f])
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    assert doc["n"] == 16
    assert doc["matrices"][0]["convergence_time"] == 3


def test_simulate_with_csv(runner, tmp_path):
    s = write(tmp_path / "scen.txt", "3 3\n2 1 1\n1 2 1\n1 1 2\n1 0 0\n")
    csv = tmp_path / "traj.csv"
    result = runner.invoke(main, ["simulate", s, "--rounds", "3", "--csv", str(csv)])
    assert result.exit_code == 0, result.output
    assert csv.read_text() == (
        "round,x1,x2,x3\n0,1,0,0\n1,2,1,1\n2,0,2,2\n3,1,0,0\n"
    )


def test_average_command(runner, tmp_path):
    s = write(tmp_path / "scen.txt", SCENARIO_TEXT)
    result = runner.invoke(main, ["average", s])
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    assert doc["x_field"] == 2
    assert (doc["average_numerator"], doc["average_denominator"]) == (3, 4)


def test_average_guard_exit_code(runner, tmp_path):
    s = write(tmp_path / "scen.txt", A7_TEXT + "2 2 2 2\n")
    result = runner.invoke(main, ["average", s])
    assert result.exit_code == EXIT_PRECONDITION


def test_pose_command(runner, tmp_path):
    s = write(tmp_path / "pose.txt", POSE_TEXT)
    csv = tmp_path / "err.csv"
    result = runner.invoke(main, ["pose", s, "--rounds", "6", "--csv", str(csv)])
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    assert doc["residual_nonzero"] == 0
    assert doc["rounds_to_fixed"] <= 3  # theta0 from the scenario gives a head start
    assert csv.read_text().startswith("round,e1,e2,e3,e4\n")
    # noisy run leaves a nonzero but eventually constant error
    noisy = runner.invoke(main, ["pose", s, "--rounds", "6", "--noise", "--seed", "7"])
    ndoc = json.loads(noisy.output)
    assert ndoc["error_fixed_from"] <= 3


def test_pose_requires_measurement_block(runner, tmp_path):
    s = write(tmp_path / "scen.txt", SCENARIO_TEXT)
    result = runner.invoke(main, ["pose", s])
    assert result.exit_code == EXIT_PARSE

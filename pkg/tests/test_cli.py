"""End-to-end command tests driven through main(argv)."""

import json

import pytest

from entconvert.cli import DEMO_NAMES, main


@pytest.fixture
def states(tmp_path):
    """Write the standard state files and return their paths."""
    paths = {}
    for name, doc in {
        "skewed": {"label": "skewed pair", "schmidt_sq": ["4/5", "1/5"]},
        "bell": {"schmidt_sq": ["1/2", "1/2"]},
        "three_a": {"schmidt_sq": ["1/2", "3/10", "1/5"]},
        "three_b": {"schmidt_sq": ["2/5", "2/5", "1/5"]},
        "half_quarters": {"schmidt_sq": ["1/2", "1/4", "1/4"]},
        "flat3": {"schmidt_sq": ["1/3", "1/3", "1/3"]},
    }.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(doc))
        paths[name] = str(p)
    return paths


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestProb:
    def test_skewed_to_bell(self, capsys, states):
        code, out, _ = run(capsys, ["prob", states["skewed"], states["bell"]])
        assert code == 0
        doc = json.loads(out)
        assert doc["probability"] == "2/5"
        assert doc["probability_decimal"] == 0.4
        assert doc["minimizer"] == 2
        assert doc["feasible"] is True
        assert doc["source_monotones"] == ["1", "1/5"]
        assert doc["target_monotones"] == ["1", "1/2"]

    def test_infeasible_pair_reports_reason(self, capsys, states):
        code, out, _ = run(capsys, ["prob", states["bell"], states["flat3"]])
        assert code == 0
        doc = json.loads(out)
        assert doc["probability"] == "0"
        assert doc["feasible"] is False
        assert "nonzero" in doc["reason"]

    def test_float_mode(self, capsys, states):
        code, out, _ = run(capsys, ["prob", states["skewed"], states["bell"],
                                    "--mode", "float"])
        assert code == 0
        doc = json.loads(out)
        assert doc["probability"] == pytest.approx(0.4)

    def test_out_flag_duplicates_stdout(self, capsys, states, tmp_path):
        target = tmp_path / "report.json"
        code, out, _ = run(capsys, ["prob", states["skewed"], states["bell"],
                                    "--out", str(target)])
        assert code == 0
        assert target.read_text() == out


class TestPlanAndSimulate:
    def test_plan_document(self, capsys, states):
        code, out, _ = run(capsys, ["plan", states["three_a"],
                                    states["three_b"]])
        assert code == 0
        doc = json.loads(out)
        assert doc["probability"] == "5/6"
        assert doc["breakpoints"]["boundaries"] == [4, 2, 1]
        assert doc["breakpoints"]["ratios"] == ["5/6", "5/4"]
        assert doc["intermediate"] == ["1/2", "1/3", "1/6"]
        assert doc["success_squared"] == ["2/3", "1", "1"]

    def test_simulate_exhaustive(self, capsys, states):
        code, out, _ = run(capsys, ["simulate", states["skewed"],
                                    states["bell"], "--exhaustive"])
        assert code == 0
        doc = json.loads(out)
        assert doc["mode"] == "exhaustive"
        assert doc["success_probability"] == "2/5"
        assert doc["predicted"] == "2/5"
        assert doc["branches"] == 2

    def test_simulate_from_saved_plan(self, capsys, states, tmp_path):
        plan_path = tmp_path / "plan.json"
        code, _, _ = run(capsys, ["plan", states["three_a"],
                                  states["three_b"], "--out",
                                  str(plan_path)])
        assert code == 0
        code, out, _ = run(capsys, ["simulate", "--plan", str(plan_path),
                                    "--exhaustive"])
        assert code == 0
        doc = json.loads(out)
        assert doc["success_probability"] == "5/6"

    def test_simulate_monte_carlo(self, capsys, states):
        code, out, _ = run(capsys, ["simulate", states["skewed"],
                                    states["bell"], "--trials", "4000",
                                    "--seed", "11"])
        assert code == 0
        doc = json.loads(out)
        assert doc["mode"] == "monte_carlo"
        assert doc["trials"] == 4000
        assert doc["predicted"] == "2/5"
        assert abs(doc["empirical"] - 0.4) < 0.05
        assert doc["audit"]

    def test_simulate_seed_reproducible(self, capsys, states):
        args = ["simulate", states["three_a"], states["three_b"],
                "--trials", "2000", "--seed", "21"]
        _, out1, _ = run(capsys, args)
        _, out2, _ = run(capsys, args)
        assert out1 == out2
        _, out3, _ = run(capsys, args + ["--workers", "3"])
        assert out3 == out1

    def test_simulate_needs_inputs(self, capsys):
        code, _, err = run(capsys, ["simulate"])
        assert code == 1
        assert "error:" in err


class TestOtherCommands:
    def test_monotones(self, capsys, states):
        code, out, _ = run(capsys, ["monotones", states["skewed"]])
        assert code == 0
        doc = json.loads(out)
        assert doc["label"] == "skewed pair"
        assert doc["monotones"] == ["1", "1/5"]
        assert doc["entropy_bits"] == pytest.approx(0.72192809, abs=1e-6)

    def test_compare(self, capsys, states):
        code, out, _ = run(capsys, ["compare", states["skewed"],
                                    states["bell"]])
        assert code == 0
        doc = json.loads(out)
        assert doc["p_forward"] == "2/5"
        assert doc["p_backward"] == "1"
        assert doc["verdict"] == "second_greater"

    def test_tensor(self, capsys, states):
        code, out, _ = run(capsys, ["tensor", states["half_quarters"],
                                    states["three_b"], "--copies", "2"])
        assert code == 0
        doc = json.loads(out)
        assert doc["single_copy"] == "5/6"
        assert doc["single_copy_power"] == "25/36"
        assert doc["joint"] == "25/28"
        assert doc["joint_beats_power"] is True


class TestDemos:
    @pytest.mark.parametrize("name", DEMO_NAMES)
    def test_all_demos_run(self, capsys, name):
        code, out, _ = run(capsys, ["demo", name])
        assert code == 0
        assert out.strip()

    def test_cycle_demo_content(self, capsys):
        _, out, _ = run(capsys, ["demo", "paper-cycle"])
        for token in ("P(1 -> 2) = 6/13", "P(2 -> 1) = 1/2",
                      "P(2 -> 3) = 6/25", "P(3 -> 2) = 1/2",
                      "P(3 -> 1) = 1/4", "P(1 -> 3) = 36/97",
                      "cycle: 1 < 2 < 3 < 1"):
            assert token in out

    def test_nonadditivity_demo_content(self, capsys):
        _, out, _ = run(capsys, ["demo", "non-additivity"])
        assert "25/28" in out and "25/36" in out

    def test_multi_copy_demo_content(self, capsys):
        _, out, _ = run(capsys, ["demo", "multi-copy"])
        assert "= 0 " in out
        assert "2/5" in out


class TestFailureModes:
    def test_missing_file_is_invalid_input(self, capsys):
        code, _, err = run(capsys, ["prob", "/nonexistent.json",
                                    "/nonexistent.json"])
        assert code == 1
        assert err.startswith("error:")

    def test_malformed_state_is_invalid_input(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"schmidt_sq": ["1/2", "1/3"]}))
        code, _, err = run(capsys, ["monotones", str(bad)])
        assert code == 1
        assert "error:" in err

    def test_infeasible_simulation_exits_two(self, capsys, states):
        code, _, err = run(capsys, ["simulate", states["bell"],
                                    states["flat3"]])
        assert code == 2
        assert err.startswith("infeasible:")

    def test_unknown_flag_is_invalid_input(self, capsys, states):
        code, _, _ = run(capsys, ["prob", states["bell"], states["bell"],
                                  "--bogus"])
        assert code == 1

    def test_bad_copies_value(self, capsys, states):
        code, _, err = run(capsys, ["tensor", states["bell"], states["bell"],
                                    "--copies", "0"])
        assert code == 1
        assert "error:" in err

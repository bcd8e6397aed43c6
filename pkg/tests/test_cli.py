import csv
import json

import pytest
from click.testing import CliRunner

from slaflearn.cli import main


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)

    return invoke


def test_oracle_on_the_locked_door(run):
    r = run("learn", "--domain", "locked-door", "--engine", "oracle", "--trace", "locked-door", "--no-figures")
    assert r.exit_code == 0
    assert "<{}, locked-door-r1>" in r.output


def test_learn_writes_outputs(run, tmp_path):
    out = tmp_path / "ld"
    r = run("learn", "--domain", "locked-door", "--steps", 5, "--obs-per-step", 1, "--record-every", 1, "--quiet",
            "--out-dir", out)
    assert r.exit_code == 0
    assert r.output.splitlines() == [
        "(UNLOCK1 CAUSES (NOT (LOCKED)))", "(UNLOCK2 KEEPS (LOCKED))", "(UNLOCK3 KEEPS (LOCKED))"]
    for name in ("trace.jsonl", "metrics.csv", "model.sexp", "model.pddl", "belief.sexp", "report.json", "metrics.png"):
        assert (out / name).exists(), name
    rep = json.loads((out / "report.json").read_text())
    assert rep["steps"] == 5
    with open(out / "metrics.csv") as fh:
        assert [row["step"] for row in csv.DictReader(fh)] == ["1", "2", "3", "4", "5"]


def test_zero_steps_leaves_everything_unknown(run):
    r = run("learn", "--domain", "blocksworld", "--steps", 0, "--quiet")
    assert r.exit_code == 0
    assert r.output == ""


def test_extract_from_snapshot(run, tmp_path):
    out = tmp_path / "ld"
    run("learn", "--domain", "locked-door", "--steps", 5, "--obs-per-step", 1, "--quiet", "--out-dir", out)
    r = run("extract", "--belief", out / "belief.sexp", "--domain", "locked-door", "--out-dir", tmp_path / "x")
    assert r.exit_code == 0
    assert (tmp_path / "x" / "model.sexp").read_text() == (out / "model.sexp").read_text()


def test_simulate_is_deterministic(run, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for p in (a, b):
        assert run("simulate", "--domain", "blocksworld", "--steps", 50, "--seed", 3, "--out", p).exit_code == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 52  # header, t=0, 50 steps


def test_bad_engine_is_a_usage_error(run):
    assert run("learn", "--engine", "magic").exit_code == 2


def test_too_many_observations_is_a_usage_error(run):
    assert run("learn", "--domain", "locked-door", "--obs-per-step", 5).exit_code == 2


def test_unsupported_pddl_exits_3(run, tmp_path):
    dom = tmp_path / "d.pddl"
    dom.write_text("(define (domain x) (:types a b)\n (:predicates (p ?x - (either a b))))")
    prob = tmp_path / "p.pddl"
    prob.write_text("(define (problem q) (:domain x))")
    r = run("learn", "--domain", dom, "--problem", prob)
    assert r.exit_code == 3
    assert "either" in r.stderr


def test_learning_failure_exits_4(run):
    # too many action-fluent pairs for the reference engine
    assert run("learn", "--domain", "depots", "--engine", "slaf0", "--steps", 2).exit_code == 4


def test_solver_failure_exits_5(run, tmp_path):
    r = run("learn", "--domain", "locked-door", "--steps", 3, "--obs-per-step", 1, "--solver", tmp_path / "nope")
    assert r.exit_code == 5


def test_oracle_check(run):
    r = run("oracle-check", "--instances", 5, "--checks", "as,pre")
    assert r.exit_code == 0
    assert r.output.count("PASS") == 2


def test_config_file(run, tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('domain = "locked-door"\nobs-per-step = 1\n[learn]\nsteps = 4\nquiet = true\n')
    r = run("--config", cfg, "learn")
    assert r.exit_code == 0
    assert "(UNLOCK1 CAUSES (NOT (LOCKED)))" in r.output


def test_bench_single_cell(run, tmp_path):
    out = tmp_path / "bench"
    r = run("bench", "--domains", "blocksworld", "--steps", 200, "--record-every", 200, "--out-dir", out)
    assert r.exit_code == 0
    with open(out / "bench.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert rows[0]["domain"] == "blocksworld" and rows[0]["step"] == "200"
    assert (out / "time_per_step.png").exists() and (out / "formula_size.png").exists()

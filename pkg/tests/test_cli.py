import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from cbgt.cli import run
from cbgt.model import instance_to_json, schedule_to_json, Schedule
from cbgt.generators import gen_random_normalized
from tests.instances import six_vertex_graph

CBGT = [sys.executable, "-m", "cbgt"]


def sh(args, stdin=None):
    return subprocess.run(CBGT + args, input=stdin, capture_output=True, text=True)


def pipe(*stages):
    data = None
    for stage in stages:
        proc = sh(stage, data)
        if proc.returncode:
            return proc
        data = proc.stdout
    return proc


@pytest.fixture
def example_file(tmp_path, example1):
    path = tmp_path / "example.json"
    path.write_text(json.dumps({"instance": instance_to_json(example1)}))
    return path


def test_binomial_general_pipeline_meets_the_log_bound():
    proc = pipe(["generate", "binomial", "--k", "2"],
                ["schedule", "general", "--mode", "efficient", "--days", "120"],
                ["verify", "--bound", "log"])
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.startswith("PASS")


def test_exact_on_the_example(example_file):
    proc = sh(["schedule", "exact", "--instance", str(example_file)])
    assert proc.returncode == 0, proc.stderr
    out = json.loads(proc.stdout)
    height = F(int(out["report"]["max_height"][0]), int(out["report"]["max_height"][1]))
    assert height < 2
    d = out["balanced_discrepancy"]
    assert F(int(d[0]), int(d[1])) < 1
    again = sh(["verify", "--bound", "height2"], proc.stdout)
    assert again.returncode == 0 and "PASS" in again.stdout


def test_simulate_published_example_schedule(tmp_path, example_file):
    sched = tmp_path / "sched.json"
    sched.write_text(json.dumps({"schedule": schedule_to_json(
        Schedule((frozenset({1, 3}), frozenset({4, 2}), frozenset({0, 3}), frozenset({4, 2})), periodic=True))}))
    proc = sh(["simulate", "--instance", str(example_file), "--schedule", str(sched), "--format", "json"])
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["report"]["max_height"] == ["1", "1"]
    table = sh(["simulate", "--instance", str(example_file), "--schedule", str(sched)])
    assert table.returncode == 0 and "e" in table.stdout


def test_fun_and_color_schedules(tmp_path, example_file):
    assert sh(["schedule", "fun", "--instance", str(example_file)]).returncode == 0
    graph = tmp_path / "graph.json"
    graph.write_text(json.dumps({"instance": instance_to_json(six_vertex_graph())}))
    proc = sh(["schedule", "color", "--instance", str(graph)])
    assert proc.returncode == 0
    assert len(set(json.loads(proc.stdout)["coloring"].values())) == 5
    assert sh(["verify", "--bound", "height4"], proc.stdout).returncode == 0


def test_failing_bound_exits_one(example_file, tmp_path):
    sched = tmp_path / "s.json"
    sched.write_text(json.dumps({"core": [[2, 3]], "periodic": True}))
    proc = sh(["verify", "--instance", str(example_file), "--schedule", str(sched), "--bound", "height2"])
    assert proc.returncode == 1 and proc.stdout.startswith("FAIL")


def test_malformed_json_names_the_position(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"instance": \n  [1, 2,, 3]}')
    proc = sh(["schedule", "fun", "--instance", str(bad)])
    assert proc.returncode == 2
    assert f"{bad}:2:" in proc.stderr


def test_missing_schedule_is_an_error(example_file):
    assert run(["verify", "--instance", str(example_file), "--bound", "disc1"]) == 2


def test_pinwheel_subcommands(tmp_path):
    proc = sh(["generate", "random", "--kind", "uniform", "--n", "3", "--seed", "2"])
    inst = tmp_path / "inst.json"
    inst.write_text(proc.stdout)
    reduced = sh(["pinwheel", "reduce", "--instance", str(inst), "--c", "2"])
    assert reduced.returncode == 0
    cps = tmp_path / "cps.json"
    cps.write_text(reduced.stdout)
    decided = sh(["pinwheel", "decide", "--cps", str(cps)])
    assert decided.returncode == 0
    verdict = json.loads(decided.stdout)
    dens = sh(["pinwheel", "density", "--cps", str(cps)])
    assert dens.returncode == 0 and "density" in json.loads(dens.stdout)
    if verdict["schedulable"]:
        sched = tmp_path / "w.json"
        sched.write_text(json.dumps({"schedule": verdict["schedule"]}))
        ok = sh(["pinwheel", "verify", "--cps", str(cps), "--schedule", str(sched)])
        assert ok.returncode == 0 and json.loads(ok.stdout)["ok"] is True


def test_generate_families(tmp_path):
    for args in (["hypercube", "--k", "3"], ["pair", "--eps", "1/10"], ["system", "--n", "8"],
                 ["random", "--kind", "graphic", "--n", "5", "--no-witness"]):
        out = tmp_path / "x.json"
        assert run(["generate", *args, "--out", str(out)]) == 0
        assert "instance" in json.loads(out.read_text())


def test_json_output_is_stable():
    a = sh(["generate", "random", "--kind", "laminar", "--n", "6", "--seed", "4"]).stdout
    b = sh(["generate", "random", "--kind", "laminar", "--n", "6", "--seed", "4"]).stdout
    assert a == b and json.loads(a) == json.loads(json.dumps(json.loads(a), sort_keys=True))


def test_quick_bench_passes():
    proc = sh(["bench", "--quick"])
    assert proc.returncode == 0, proc.stdout
    assert proc.stdout.count("PASS") == 11

"""Command line interface: exit codes, output channels, JSON determinism."""

import json
import shutil
import subprocess

import pytest

from pqm import cli
from pqm.cli import main
from pqm.subspace import InternalInvariantError

from test_structures import tiny_structure_json


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_decide_true_sentence_exits_zero(samples_dir, capsys):
    code, out, err = run(capsys, "decide", str(samples_dir / "bell.pqm"))
    assert code == 0
    assert out.splitlines()[0] == "true"
    assert err == ""


def test_decide_false_sentence_exits_one(samples_dir, capsys):
    code, out, _ = run(capsys, "decide", str(samples_dir / "contradiction.pqm"))
    assert code == 1
    assert out.splitlines()[0] == "false"


def test_decide_trace_lists_branches(samples_dir, capsys):
    code, out, _ = run(capsys, "decide", "--trace", str(samples_dir / "bell.pqm"))
    assert code == 0
    assert any(line.startswith("branch 0:") for line in out.splitlines())


def test_decide_emits_normal_form_on_request(tmp_path, capsys):
    f = tmp_path / "imp.pqm"
    f.write_text("dim 3\nlet p = span{(1,0,0)}\nassert forall x . [x : p] -> [x : p]\n")
    code, out, _ = run(capsys, "decide", "--emit-normal-form", str(f))
    assert code == 0
    assert any(line.startswith("normal form:") for line in out.splitlines())


def test_decide_json_payload_shape(samples_dir, capsys):
    code, out, _ = run(
        capsys, "decide", "--emit", "json", "--trace", str(samples_dir / "bell.pqm")
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == 1
    assert payload["command"] == "decide"
    assert payload["truth"] is True
    assert payload["leaves"]


def test_circuit_reachable_output_exits_zero(samples_dir, capsys):
    code, out, _ = run(capsys, "circuit", str(samples_dir / "bell_circuit.pqm"))
    assert code == 0
    assert "possible" in out.splitlines()


def test_circuit_impossible_output_exits_one(samples_dir, capsys):
    code, out, _ = run(capsys, "circuit", str(samples_dir / "bell_circuit_impossible.pqm"))
    assert code == 1
    assert "impossible" in out.splitlines()


def test_circuit_trace_reports_each_step(samples_dir, capsys):
    code, out, _ = run(capsys, "circuit", "--trace", str(samples_dir / "bell_circuit.pqm"))
    assert code == 0
    steps = [line for line in out.splitlines() if line.startswith("after ")]
    assert len(steps) == 3


def test_model_check_accepts_committed_sample(samples_dir, capsys):
    code, out, _ = run(capsys, "model-check", str(samples_dir / "model3.json"))
    assert code == 0
    assert out.splitlines()[0] == "verdict: model"


def test_model_check_rejects_gapped_structure(tmp_path, capsys):
    f = tmp_path / "gap.json"
    f.write_text(json.dumps(tiny_structure_json()))
    code, out, _ = run(capsys, "model-check", str(f))
    assert code == 1
    assert "no least filter member" in out


def test_kappa_lists_least_members(samples_dir, capsys):
    code, out, _ = run(capsys, "kappa", str(samples_dir / "model3.json"))
    assert code == 0
    assert len(out.splitlines()) == 16


def test_kappa_flags_missing_least_member(tmp_path, capsys):
    f = tmp_path / "gap.json"
    f.write_text(json.dumps(tiny_structure_json()))
    code, out, _ = run(capsys, "kappa", str(f))
    assert code == 1
    assert "no least filter member" in out


def test_kappa_single_element_and_unknown_element(tmp_path, capsys):
    f = tmp_path / "gap.json"
    f.write_text(json.dumps(tiny_structure_json()))
    code, out, _ = run(capsys, "kappa", "--element", "m", str(f))
    assert code == 1
    assert out.splitlines() == ["m: no least filter member (minimal pair p, q)"]

    code, _, err = run(capsys, "kappa", "--element", "ghost", str(f))
    assert code == 2
    assert err.startswith("error:")


def test_missing_file_is_a_usage_error(capsys):
    code, out, err = run(capsys, "decide", "/nonexistent/void.pqm")
    assert code == 2
    assert out == ""
    assert err.startswith("error:")


def test_syntax_error_reports_position(tmp_path, capsys):
    f = tmp_path / "bad.pqm"
    f.write_text("dim 3\nassert exists x . [x :\n")
    code, _, err = run(capsys, "decide", str(f))
    assert code == 2
    assert "3:1:" in err  # EOF right after the dangling colon


def test_corrupt_structure_json_is_a_usage_error(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text("{not json")
    code, _, err = run(capsys, "model-check", str(f))
    assert code == 2
    assert err.startswith("error:")


def test_validation_issues_all_reach_stderr(tmp_path, capsys):
    data = tiny_structure_json()
    data["relation"].append(["ghost", "p"])
    data["relation"].append(["m", "nosuch"])
    f = tmp_path / "invalid.json"
    f.write_text(json.dumps(data))
    code, out, err = run(capsys, "model-check", str(f))
    assert code == 2
    assert out == ""
    assert len([line for line in err.splitlines() if line.startswith("error:")]) == 2


def test_internal_invariant_exits_three(tmp_path, capsys, monkeypatch):
    f = tmp_path / "gap.json"
    f.write_text(json.dumps(tiny_structure_json()))

    def boom(path):
        raise InternalInvariantError("forced for the exit-code contract")

    monkeypatch.setattr(cli, "load_structure", boom)
    code, _, err = run(capsys, "model-check", str(f))
    assert code == 3
    assert err.startswith("internal invariant violated:")


def test_check_axioms_clean_run(capsys):
    code, out, _ = run(capsys, "check-axioms", "--dim", "2", "--samples", "40", "--seed", "1")
    assert code == 0
    assert out.splitlines()[-1] == "OK"


def test_check_rules_with_derived_axioms(capsys):
    code, out, _ = run(
        capsys,
        "check-rules",
        "--dim",
        "2",
        "--samples",
        "40",
        "--seed",
        "1",
        "--derived-axioms",
        "--derived-samples",
        "25",
    )
    assert code == 0
    assert out.splitlines()[-1] == "OK"
    assert any(line.startswith("derived ") for line in out.splitlines())


def test_json_output_is_byte_identical_across_runs(capsys):
    argv = ["check-axioms", "--dim", "2", "--samples", "25", "--seed", "3", "--emit", "json"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert json.loads(first)["schema"] == 1


def test_oracle_f_steps(capsys):
    code, out, _ = run(capsys, "oracle", "f-steps", "0.5")
    assert code == 0
    assert out.splitlines()[0] == "steps: 3"

    code, _, err = run(capsys, "oracle", "f-steps", "1.5")
    assert code == 2
    assert err.startswith("error:")


def test_oracle_ellipse_hit_and_miss(capsys):
    code, out, _ = run(capsys, "oracle", "ellipse", "0.6", "0.6", "0.0")
    assert code == 0
    assert "orthogonal" in out.splitlines()

    code, out, _ = run(capsys, "oracle", "ellipse", "0.6", "0.59", "0.0")
    assert code == 1
    assert "not orthogonal" in out.splitlines()


def test_oracle_incompat_paths(tmp_path, capsys):
    f = tmp_path / "defs.pqm"
    f.write_text(
        "dim 3\n"
        "let r1 = span{(1,0,0)}\n"
        "let r2 = span{(1,1,0)}\n"
        "let e1 = span{(1,0,0)}\n"
        "let e2 = span{(0,1,0)}\n"
    )
    code, out, _ = run(capsys, "oracle", "incompat", str(f), "r1", "r2")
    assert code == 0
    assert "mediator rank: 2" in out.splitlines()

    code, out, _ = run(capsys, "oracle", "incompat", str(f), "e1", "e2")
    assert code == 1
    assert out.splitlines() == ["compatible"]

    code, _, err = run(capsys, "oracle", "incompat", str(f), "r1", "ghost")
    assert code == 2
    assert "ghost" in err


def test_oracle_collapse(capsys):
    code, out, _ = run(capsys, "oracle", "collapse", "0.5")
    assert code == 0
    assert out.splitlines()[0] == "rounds: 3"


def test_unknown_flag_is_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["decide", "--no-such-flag", "x.pqm"])
    assert exc.value.code == 2


def test_installed_entry_point(samples_dir):
    exe = shutil.which("pqm")
    assert exe is not None
    proc = subprocess.run(
        [exe, "decide", str(samples_dir / "bell.pqm")], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "true"

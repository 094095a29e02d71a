import json
import shutil
import subprocess
import sys

import pytest

from conftest import program_path
from reviso.cli import main
from reviso.syntax import parse_program
from reviso.typecheck import check_program

CANTOR = str(program_path("cantor.rev"))
MAP = str(program_path("map.rev"))
OVERLAP = str(program_path("overlap.rev"))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_run_prints_the_value(capsys):
    code, out, _ = run(capsys, "run", CANTOR, "--iso", "CantorPairing", "--arg", "(1,1)")
    assert (code, out) == (0, "4\n")


def test_run_json(capsys):
    code, out, _ = run(capsys, "run", CANTOR, "--iso", "CantorPairing", "--arg", "(3, 4)", "--format", "json")
    assert code == 0
    assert json.loads(out) == {"result": "31", "steps": 223}


def test_run_list_sugar(capsys):
    code, out, _ = run(capsys, "run", MAP, "--iso", "incr_all", "--arg", "[0, 4]")
    assert (code, out) == (0, "[1, 5]\n")


def test_run_stuck_and_out_of_fuel(capsys, tmp_path):
    src = tmp_path / "p.rev"
    src.write_text("iso pred : Nat <-> Nat = { fold inr n <-> n };\n")
    code, out, _ = run(capsys, "run", str(src), "--iso", "pred", "--arg", "0")
    assert code == 2 and out.startswith("stuck: no-clause-matched")
    code, out, _ = run(capsys, "run", CANTOR, "--iso", "CantorPairing", "--arg", "(5,5)", "--fuel", "10")
    assert code == 3 and out == "out of fuel\n"


def test_run_rejects_ill_typed_argument(capsys):
    code, _, err = run(capsys, "run", CANTOR, "--iso", "CantorPairing", "--arg", "[1]")
    assert code == 1 and "mismatch" in err


def test_check(capsys):
    code, out, _ = run(capsys, "check", MAP)
    assert code == 0 and out.startswith("ok")
    code, _, err = run(capsys, "check", OVERLAP)
    assert code == 1
    assert err.startswith(f"{OVERLAP}:2:") and "overlap" in err


def test_syntax_error_location(capsys, tmp_path):
    src = tmp_path / "bad.rev"
    src.write_text("iso f : Nat <-> Nat =\n  { x <-> };\n")
    code, _, err = run(capsys, "check", str(src))
    assert code == 1 and err.startswith(f"{src}:2:") and "syntax" in err


def test_invert_output_rechecks(capsys, tmp_path):
    code, out, _ = run(capsys, "invert", MAP, "--iso", "map")
    assert code == 0 and out.startswith("iso map_inv : (Nat <-> Nat) -> ([Nat] <-> [Nat])")
    res = check_program(parse_program(out))
    assert res.ok


def test_invert_cantor_runs_backwards(capsys, tmp_path):
    _, out, _ = run(capsys, "invert", CANTOR, "--iso", "CantorPairing")
    f = tmp_path / "inv.rev"
    f.write_text(out)
    code, out, _ = run(capsys, "run", str(f), "--iso", "CantorPairing_inv", "--arg", "4")
    assert (code, out) == (0, "(1, 1)\n")


@pytest.mark.parametrize("name, ty", [("dup", "Nat"), ("snoc'", "Bool"), ("enc", "[Bool]"), ("rmBlank", "1 + 1 + 1"),
                                      ("growth", "1 + 1"), ("It", "Nat"), ("cantor", None)])
def test_stdlib_prints_checkable_source(capsys, name, ty):
    argv = ["stdlib", name] + (["--type", ty] if ty else [])
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert check_program(parse_program(out)).ok


def test_stdlib_needs_type(capsys):
    code, _, err = run(capsys, "stdlib", "dup")
    assert code == 64 and "--type" in err


def test_rtm_commands(capsys, tmp_path):
    copy = str(program_path("rtm/copy.rtm"))
    code, out, _ = run(capsys, "rtm", "check", copy)
    assert code == 0 and "27 rules" in out
    code, out, _ = run(capsys, "rtm", "run", copy, "--input", "aa")
    assert (code, out) == (0, "oracle: aacaa (57 steps)\n")
    code, out, _ = run(capsys, "rtm", "run", str(program_path("rtm/increment.rtm")), "--both")
    assert code == 0 and "oracle: aaaa" in out and "compiled: aaaa" in out
    code, out, _ = run(capsys, "rtm", "run", copy, "--input", "c", "--both")
    assert code == 2 and "oracle: stuck" in out and "compiled: stuck" in out
    target = tmp_path / "inc.rev"
    code, out, _ = run(capsys, "rtm", "compile", str(program_path("rtm/increment.rtm")), "-o", str(target))
    assert code == 0 and check_program(parse_program(target.read_text())).ok


def test_rtm_errors(capsys, tmp_path):
    bad = tmp_path / "bad.rtm"
    bad.write_text("symbols: b a\nstates: q0 q1 qf\nrule q0 a/b q1\nrule q0 a/a qf\n")
    code, _, err = run(capsys, "rtm", "check", str(bad))
    assert code == 1 and "forward" in err
    walker = tmp_path / "walk.rtm"
    walker.write_text("symbols: b a\nstates: qs l m qf\nrule qs b/b l\nrule l right m\nrule m b/a l\n")
    code, out, _ = run(capsys, "rtm", "run", str(walker), "--input", "", "--max-steps", "30")
    assert code == 3 and "diverged" in out


def test_sem_dump(capsys, tmp_path):
    dump = tmp_path / "g.tsv"
    code, out, _ = run(capsys, "sem", CANTOR, "--iso", "CantorPairing", "--depth", "6", "--unfold", "16",
                       "--dump-graph", str(dump))
    assert code == 0 and out.startswith("defined on ")
    rows = [line.split("\t") for line in dump.read_text().splitlines()]
    assert ["(1, 1)", "4"] in rows
    assert all(len(r) == 2 for r in rows)
    code, out, _ = run(capsys, "sem", CANTOR, "--iso", "CantorPairing", "--depth", "6", "--unfold", "16",
                       "--format", "json")
    assert json.loads(out)["steps"] == len(rows)


def test_adequacy(capsys):
    code, out, _ = run(capsys, "adequacy", CANTOR, "--fuel", "100000", "--depth", "10", "--unfold", "16",
                       "--inputs", "6")
    assert "Disagree: 0" in out and code in (0, 3)
    code, out, _ = run(capsys, "adequacy", MAP, "--fuel", "100000", "--depth", "5", "--unfold", "16",
                       "--inputs", "5", "--sample", "--seed", "3")
    assert "Disagree: 0" in out


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 64
    assert run(capsys)[0] == 64
    assert run(capsys, "run", CANTOR, "--iso", "nope", "--arg", "0")[0] == 64
    assert run(capsys, "run", CANTOR, "--iso", "CantorPairing", "--arg", "0", "--fuel", "-1")[0] == 64


def test_missing_file(capsys):
    code, _, err = run(capsys, "check", "/nonexistent.rev")
    assert code == 1 and "nonexistent" in err


@pytest.mark.skipif(shutil.which("reviso") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["reviso", "run", CANTOR, "--iso", "CantorPairing", "--arg", "(1,1)"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout == "4\n"
    out = subprocess.run([sys.executable, "-m", "reviso.cli", "check", OVERLAP], capture_output=True, text=True)
    assert out.returncode == 1

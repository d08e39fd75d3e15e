import io
import json
import subprocess
import sys

import pytest

from rightlinear.cli import CAP, NEGATIVE, OK, REJECTED, USAGE, run

INTRO = ["mu X. 1+a.X", "|-", "mu X. 1+a.a.X + a.(mu Y. 1+a.a.Y)"]


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_member():
    assert call("member", "~", "mu X. 1+a.X")[0] == OK
    code, out, _ = call("member", ":a", "mu X. 1+a.X")
    assert code == NEGATIVE and "not in" in out
    assert call("member", ":a", "nu X. 1+a.X")[0] == OK
    assert call("member", "c", "a.1", "--alphabet", "ab")[0] == REJECTED


def test_prove_intro_then_check(tmp_path):
    path = tmp_path / "intro.proof"
    code, out, _ = call("prove", *INTRO, "-o", str(path))
    assert code == OK and "nodes written" in out
    assert call("check", str(path))[0] == OK
    assert call("invariant", str(path))[0] == OK


def test_prove_to_stdout_round_trips(tmp_path):
    code, out, _ = call("prove", "mu X. X", "|-", "0")
    assert code == OK and out.startswith("alphabet:")
    path = tmp_path / "p.proof"
    path.write_text(out)
    assert call("check", str(path))[0] == OK


def test_prove_negative_and_rejected():
    code, out, _ = call("prove", "nu X. a.X", "|-", "nu X. b.X")
    assert code == NEGATIVE and ":a" in out
    code, _, err = call("prove", "nu X. X", "|-", "1 + a.(nu X. X)")
    assert code == REJECTED and "unguarded" in err


def test_countermodel():
    code, out, _ = call("countermodel", "nu X. 1+a.X", "|-", "mu X. 1+a.X")
    assert code == OK and out.strip() == ":a"
    assert call("countermodel", "mu X. X", "|-", "0")[0] == NEGATIVE


def test_check_failures(tmp_path):
    loop = tmp_path / "loop.proof"
    loop.write_text("alphabet: \nnode 0\nseq 1 |- mu X0. X0\nrule mu-r:mu X0. X0\nprem 0\n")
    code, out, _ = call("check", str(loop))
    assert code == NEGATIVE and "cycle [0]" in out
    assert call("invariant", str(loop))[0] == NEGATIVE
    bad = tmp_path / "bad.proof"
    bad.write_text("alphabet: a\nnode 0\nseq 1 |- 1\nrule k:a\nprem 0\n")
    assert call("check", str(bad))[0] == REJECTED
    garbage = tmp_path / "garbage.proof"
    garbage.write_text("hello\n")
    assert call("check", str(garbage))[0] == REJECTED
    assert call("check", str(tmp_path / "missing.proof"))[0] == USAGE


def test_invariant_discipline(tmp_path):
    p = tmp_path / "general-id.proof"
    p.write_text("alphabet: a\nnode 0\nseq a.1 |- a.1\nrule id\nprem\n")
    assert call("check", str(p))[0] == OK
    assert call("invariant", str(p))[0] == REJECTED


def test_cap_exceeded():
    assert call("prove", "nu X. a.X + b.X", "|-", "nu X. a.a.X + b.X + a.b.X", "--cap", "1")[0] == CAP


def test_translate():
    code, out, _ = call("translate", "regex", "a*")
    assert code == OK and out.strip() == "mu X0. 1 + a.X0"
    code, out, _ = call("translate", "omega", "b (a)^w")
    assert out.strip() == "b.(nu X0. a.X0)"
    code, out, _ = call("translate", "coeffs", "a.X + 1")
    assert out.strip() == "(a) X + (1)"
    assert call("translate", "regex", "(a")[0] == REJECTED


def test_solve(tmp_path):
    sys_file = tmp_path / "even.sys"
    sys_file.write_text("X = 1 + a.Y\nY = a.X\n")
    code, out, _ = call("solve", str(sys_file), "--words", "4")
    assert code == OK
    assert "~, aa, aaaa" in out and "a, aaa" in out
    code, out, _ = call("solve", str(sys_file), "--json")
    doc = json.loads(out)
    assert doc["solutions"]["Y"]["words"] == ["a", "aaa"]


def test_usage_errors():
    assert call()[0] == USAGE
    assert call("frobnicate")[0] == USAGE
    assert call("prove", "1")[0] == USAGE
    assert call("member", "~", "1", "--cap", "0")[0] == USAGE
    assert call("member", "~", "1", "--alphabet", "A")[0] == USAGE


def test_parse_errors_are_rejections():
    assert call("member", "~", "mu X 1")[0] == REJECTED
    assert call("prove", "a.X", "|-", "1")[0] == REJECTED


@pytest.mark.parametrize("argv, code", [
    (["member", "~", "1", "--json"], OK),
    (["member", "a", "1", "--json"], NEGATIVE),
    (["prove", "nu X. X", "|-", "1", "--json"], REJECTED),
    (["bogus", "--json"], USAGE),
])
def test_json_mode_emits_one_document(argv, code):
    got, out, _ = call(*argv)
    assert got == code
    doc = json.loads(out)
    assert doc["exit"] == code


def test_exit_codes_exclusive_on_matrix(tmp_path):
    proof = tmp_path / "p.proof"
    call("prove", "mu X. X", "|-", "0", "-o", str(proof))
    matrix = {
        ("member", "~", "mu X. 1+a.X"): OK,
        ("member", ":b", "nu X. a.X"): NEGATIVE,
        ("prove", "nu X. X", "|-", "1 + a.(nu X. X)"): REJECTED,
        ("prove", "a.1", "|-", "b.1"): NEGATIVE,
        ("check", str(proof)): OK,
        ("invariant", str(proof)): OK,
        ("countermodel", "a.1", "|-", "b.1"): OK,
        ("nope",): USAGE,
    }
    for argv, code in matrix.items():
        assert call(*argv)[0] == code, argv


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "rightlinear", "member", "~", "1"],
                          capture_output=True, text=True)
    assert done.returncode == OK
    assert "is in" in done.stdout

import json

import pytest

from freediv.cli import main


@pytest.fixture(autouse=True)
def private_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("FREEDIV_CACHE_DIR", str(tmp_path / "cache"))


def test_json_to_file(tmp_path):
    out = tmp_path / "r.json"
    assert main(["analyze", "--vars", "x,y", "--poly", "x*y", "--json", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["diagnostics"]["bernstein"]["payload"]["b"] == "s^2 + 2*s + 1"


def test_poly_from_file_and_text_output(tmp_path, capsys):
    src = tmp_path / "f.txt"
    src.write_text("x^2 - y^3\n")
    assert main(["analyze", "--vars", "x,y", "--poly", f"@{src}", "--text",
                 "--stages", "free,euler_homogeneous"]) == 0
    out = capsys.readouterr().out
    assert "free" in out and "weights=(0, 6)" in out
    assert "skipped" in out


def test_non_reduced_exit_code(capsys):
    assert main(["analyze", "--vars", "x", "--poly", "x^2"]) == 2
    assert "gcd(f, df) = x" in capsys.readouterr().err


def test_invalid_input_exit_code(capsys):
    assert main(["analyze", "--vars", "x1,x2", "--poly", "x1 + z"]) == 1
    assert "unknown variable" in capsys.readouterr().err
    assert main(["analyze", "--vars", "x", "--poly", "x", "--stages", "nope"]) == 1
    assert main(["analyze", "--vars", "x", "--poly", "@/nonexistent/file"]) == 1


def test_invariant_failure_exit_code(monkeypatch, capsys):
    from freediv import report
    from freediv.logderiv import InvariantError

    def broken(ctx):
        raise InvariantError("forced")

    monkeypatch.setitem(report.RUNNERS, "free", broken)
    assert main(["analyze", "--vars", "x", "--poly", "x", "--no-cache"]) == 3
    assert "forced" in capsys.readouterr().err


def test_timeouts_still_exit_zero(capsys):
    assert main(["analyze", "--vars", "x,y", "--poly", "x^2 - y^3", "--budget-steps", "5",
                 "--json", "-"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert "timeout" in {e["status"] for e in doc["diagnostics"].values()}

import json

import pytest

from cli import build_parser, main, parse_degree


def test_parse_degree():
    assert parse_degree("-2") == (-2,)
    assert parse_degree("-2,-2") == (-2, -2)
    with pytest.raises(SystemExit):
        build_parser().parse_args(["analyze", "ring.toml", "kernel", "--degree=two"])


def test_verify_writes_a_json_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["verify", "family-a", "--p", "2", "--json", str(out), "--no-timings"]) == 0
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["overall"] == "pass"
    assert data["p"] == 2
    assert "family A, p = 2: PASS" in capsys.readouterr().out


def test_verify_rejects_bad_primes(capsys):
    assert main(["verify", "family-a", "--p", "4"]) == 2
    assert "prime" in capsys.readouterr().err
    assert main(["verify", "family-b", "--p", "5"]) == 2


def test_analyze_kernel(rings_dir, capsys):
    path = str(rings_dir / "family_a_p2.toml")
    assert main(["analyze", path, "kernel", "--degree=-2", "--base-change", "--no-timings"]) == 0
    out = capsys.readouterr().out
    assert "frobenius_kernel" in out
    assert "frobenius_kernel: " in out


def test_analyze_reports_usage_errors(tmp_path, rings_dir, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("[field]\np = \n", encoding="utf-8")
    assert main(["analyze", str(bad), "basis", "--degree=-1"]) == 2
    assert "invalid TOML" in capsys.readouterr().err
    assert main(["analyze", str(tmp_path / "missing.toml"), "basis", "--degree=-1"]) == 2
    assert main(["analyze", str(rings_dir / "family_a_p2.toml"), "kernel"]) == 2

import json

import pytest

from certify import Verdict, kernel_witness_certificate
from families import family_a, family_b
from pipelines import PipelineError, analyze, run_family_a, run_family_b
from ring_files import parse_class_expression
from rings import RingError, base_change

FAMILY_A_STEPS = [
    "a_invariant",
    "isolated_singularity_probe",
    "s_not_f_injective",
    "frobenius_formula",
    "frobenius_image_rank",
    "f_rational_veronese",
    "annihilator_probe_mu",
    "base_change_component",
    "base_change_witness",
    "annihilator_probe_witness",
    "nilpotent_element",
    "enveloping_witness",
]


@pytest.fixture(scope="module")
def report_a2():
    return run_family_a(2)


@pytest.fixture(scope="module")
def report_b2():
    return run_family_b(2)


def test_family_a_p2(report_a2):
    assert report_a2.overall_pass, report_a2.to_text()
    assert [step.name for step in report_a2.steps] == FAMILY_A_STEPS
    assert report_a2.step("base_change_component").certificate.verdict is Verdict.FAIL
    assert report_a2.step("f_rational_veronese").certificate.passed
    assert set(report_a2.witnesses) >= {"base_change_witness", "enveloping_witness", "nilpotent_element"}


def test_family_a_p3():
    report = run_family_a(3)
    assert report.overall_pass, report.to_text()
    assert report.step("frobenius_formula").certificate.parameters["checked"] == 10


def test_family_b_p2(report_b2):
    assert report_b2.overall_pass, report_b2.to_text()
    assert report_b2.step("f_rational_veronese").certificate.parameters["component_dim"] == 4
    assert report_b2.step("kernel_consistency").certificate.passed
    assert report_b2.step("kernel_consistency_base_change").certificate.parameters["kernel_dim"] > 0


def test_family_b_p3():
    report = run_family_b(3)
    assert report.overall_pass, report.to_text()
    assert report.step("f_rational_veronese").certificate.parameters["component_dim"] == 15


@pytest.mark.slow
def test_family_a_p5():
    assert run_family_a(5).overall_pass


@pytest.mark.slow
def test_family_b_p5():
    report = run_family_b(5, allow_large=True)
    assert report.overall_pass
    assert report.step("f_rational_veronese").certificate.parameters["component_dim"] == 210


@pytest.mark.parametrize("p", [4, 1, 0, True])
def test_non_prime_is_rejected(p):
    with pytest.raises(PipelineError, match="prime"):
        run_family_a(p)


def test_prime_caps():
    with pytest.raises(PipelineError, match="p <= 5"):
        run_family_a(7)
    with pytest.raises(PipelineError, match="p <= 3"):
        run_family_b(5)


def test_reports_are_deterministic_without_timings(report_a2):
    first = report_a2.to_json(include_timings=False)
    second = run_family_a(2).to_json(include_timings=False)
    assert first == second
    data = json.loads(first)
    assert data["overall"] == "pass"
    assert data["schema_version"] == "1.0"
    assert all(record["ms"] == 0 for record in data["certificates"])
    assert {record["name"] for record in data["certificates"]} == set(FAMILY_A_STEPS)


def test_summary_frame(report_b2):
    frame = report_b2.summary_frame()
    assert list(frame.columns) == ["step", "kind", "verdict", "expected", "ok", "ms"]
    assert frame["ok"].all()
    assert "family B, p = 2: PASS" in report_b2.to_text(include_timings=False)


def test_printed_witnesses_reverify(report_a2, report_b2):
    for report, build in ((report_a2, family_a), (report_b2, family_b)):
        extended = base_change(build(2))
        eta = parse_class_expression(report.witnesses["base_change_witness"], extended)
        assert kernel_witness_certificate(eta).passed


def test_analyze_kernel(rings_dir):
    path = rings_dir / "family_a_p2.toml"
    report = analyze(path, "kernel", degree=(-2,))
    certificate = report.step("frobenius_kernel").certificate
    assert certificate.parameters["kernel_dim"] == 0
    assert report.overall_pass

    report = analyze(path, "kernel", degree=(-2,), use_base_change=True)
    certificate = report.step("frobenius_kernel").certificate
    assert certificate.parameters["kernel_dim"] == 2
    assert certificate.parameters["dim"] == 3


def test_analyze_basis_and_frobenius(rings_dir):
    report = analyze(rings_dir / "family_b_p2.toml", "basis", degree=(-1,))
    assert report.step("component_basis").certificate.parameters["dim"] == 1
    assert report.step("component_basis").certificate.parameters["basis"] == ["[w^2 / x y z1]"]

    report = analyze(rings_dir / "family_a_p2.toml", "frobenius", class_literal="[x0 / x1^2 x2]")
    assert report.witnesses["class_frobenius"] == "t1*[1 / x1^2 x2^2]"

    report = analyze(rings_dir / "family_a_p2.toml", "basis", degree=(-1,), veronese=2)
    assert report.step("component_basis").certificate.parameters["dim"] == 3


def test_analyze_certify(rings_dir):
    report = analyze(rings_dir / "family_b_p2.toml", "certify", n=2)
    assert report.overall_pass
    assert report.step("f_rational_veronese").certificate.parameters["component_dim"] == 4


def test_analyze_errors(rings_dir, tmp_path):
    path = rings_dir / "family_a_p2.toml"
    with pytest.raises(PipelineError, match="--degree"):
        analyze(path, "kernel")
    with pytest.raises(PipelineError, match="unknown"):
        analyze(path, "plot")
    bad = tmp_path / "bad.toml"
    bad.write_text('[field]\np = 2\n[variables]\nx0 = 1\nx1 = 1\n[relations]\nx0 = "x0^2 - x1^3"\n')
    with pytest.raises(RingError, match="non-homogeneous"):
        analyze(bad, "basis", degree=(-1,))

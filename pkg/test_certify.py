import pytest

from cech import CechClass
from certify import (
    CertificateKind,
    Verdict,
    a_invariant,
    a_invariant_certificate,
    annihilator_probe,
    f_injectivity_on_component,
    f_rational_veronese_certificate,
    isolated_singularity_probe,
    kernel_witness_certificate,
    veronese_a_invariant,
)
from families import (
    family_a,
    family_a_base_change_witness,
    family_a_low_kernel_class,
    family_a_mu,
    family_b,
)
from rings import Assumptions, RingError, base_change, integral_model, make_ring, tensor_square
from scalars import FieldDescriptor


@pytest.mark.parametrize("build", [family_a, family_b])
@pytest.mark.parametrize("p", [2, 3])
def test_a_invariant(build, p):
    ring = build(p)
    assert a_invariant(ring) == -1
    assert veronese_a_invariant(ring, p) == -1
    certificate = a_invariant_certificate(ring, expected=-1)
    assert certificate.passed
    assert certificate.parameters["dim_at_a"] == 1
    assert certificate.parameters["dim_above_a"] == 0


def test_a_invariant_mismatch(family_a_2):
    certificate = a_invariant_certificate(family_a_2, expected=0)
    assert certificate.verdict is Verdict.FAIL
    assert "expected 0" in certificate.reason
    with pytest.raises(RingError):
        a_invariant(tensor_square(family_a_2))


def test_injectivity_certificates(family_a_2_extended):
    assert f_injectivity_on_component(family_a(2), -2).passed
    certificate = f_injectivity_on_component(family_a_2_extended, -2)
    assert certificate.verdict is Verdict.FAIL
    assert certificate.parameters["kernel_dim"] == 2
    assert certificate.witness is not None and not certificate.witness.is_zero()


def test_kernel_witness_certificate(family_a_2):
    assert kernel_witness_certificate(family_a_low_kernel_class(family_a_2)).passed
    failed = kernel_witness_certificate(family_a_mu(family_a_2))
    assert failed.verdict is Verdict.FAIL
    assert "nonzero" in failed.reason
    zero = kernel_witness_certificate(CechClass(family_a_2))
    assert zero.verdict is Verdict.FAIL
    assert zero.reason == "class is zero"


@pytest.mark.parametrize("build, p", [(family_a, 2), (family_a, 3), (family_b, 2), (family_b, 3)])
def test_isolated_singularity_probe(build, p):
    certificate = isolated_singularity_probe(integral_model(build(p)), 2 * (p + 2))
    assert certificate.passed, certificate.reason
    assert all(certificate.parameters["memberships"].values())


def test_probe_without_enough_degree_is_inconclusive(family_b_2):
    certificate = isolated_singularity_probe(integral_model(family_b_2), 2)
    assert certificate.verdict is Verdict.INCONCLUSIVE
    assert "y" in certificate.reason


@pytest.mark.parametrize("build, p", [(family_a, 2), (family_a, 3), (family_b, 2)])
def test_f_rational_veronese(build, p):
    certificate = f_rational_veronese_certificate(build(p), p)
    assert certificate.passed
    statuses = {h.name: h.status for h in certificate.assumptions}
    assert statuses["isolated_singularity"] == "computed"
    assert statuses["normal_domain"] == "derived"
    assert statuses["gorenstein"] == "automatic"


def test_f_rational_veronese_for_index_five(family_a_2):
    certificate = f_rational_veronese_certificate(family_a_2, 5)
    assert certificate.passed, certificate.reason
    assert certificate.parameters["component_dim"] == 9


def test_f_rational_veronese_uses_asserted_hypotheses():
    ring = family_a(2, Assumptions(isolated_singularity_asserted=True, normal_asserted=True))
    certificate = f_rational_veronese_certificate(ring, 2, run_probe=False)
    assert certificate.passed
    statuses = {h.name: h.status for h in certificate.assumptions}
    assert statuses["isolated_singularity"] == "assumed"
    assert statuses["normal_domain"] == "assumed"


def test_f_rational_veronese_fails_after_base_change(family_a_2_extended):
    certificate = f_rational_veronese_certificate(family_a_2_extended, 2)
    assert certificate.verdict is Verdict.FAIL
    assert certificate.witness is not None


def test_f_rational_veronese_needs_standard_grading():
    field = FieldDescriptor(2)
    ring = make_ring(field, [("x", 1), ("y", 2)], [("x", {(2, 0): 1, (0, 1): 1})])
    certificate = f_rational_veronese_certificate(ring, 1, run_probe=False)
    assert certificate.verdict is Verdict.FAIL
    assert "standard graded" in certificate.reason


def test_f_rational_veronese_inconclusive_without_normality():
    field = FieldDescriptor(2)
    line = make_ring(field, [("x0", 1), ("x1", 1)], [("x0", {(1, 0): 1, (0, 1): 1})])
    certificate = f_rational_veronese_certificate(line, 1)
    assert certificate.verdict is Verdict.INCONCLUSIVE
    statuses = {h.name: h.status for h in certificate.assumptions}
    assert statuses["normal_domain"] == "missing"
    normal = make_ring(field, [("x0", 1), ("x1", 1)], [("x0", {(1, 0): 1, (0, 1): 1})],
                       Assumptions(normal_asserted=True))
    assert f_rational_veronese_certificate(normal, 1).passed


@pytest.mark.parametrize("p", [2, 3])
def test_annihilator_probe_on_mu(p):
    ring = family_a(p)
    certificate = annihilator_probe(ring, family_a_mu(ring), e_max=2, degree_cap=2 * p, n=p)
    assert certificate.passed
    assert certificate.evidence_only
    assert certificate.kind is CertificateKind.ANNIHILATOR_PROBE


@pytest.mark.parametrize("p", [2, 3])
def test_annihilator_probe_on_kernel_witness(p):
    extended = base_change(family_a(p))
    witness = family_a_base_change_witness(extended)
    certificate = annihilator_probe(extended, witness, e_max=1, degree_cap=2 * p, n=p)
    assert certificate.verdict is Verdict.FAIL
    assert certificate.parameters["e"] == 1
    assert certificate.witness == extended.one()


def test_annihilator_probe_finds_a_common_multiplier(family_a_2):
    # every linear form kills [x0 / x1 x2] because x0^2 = t1 x1^2 + t2 x2^2
    eta = family_a_low_kernel_class(family_a_2)
    certificate = annihilator_probe(family_a_2, eta, e_max=0, degree_cap=2)
    assert certificate.verdict is Verdict.FAIL
    assert certificate.parameters["degree"] == 1
    assert annihilator_probe(family_a_2, CechClass(family_a_2)).verdict is Verdict.FAIL


def test_certificate_serialization(family_a_2):
    certificate = f_rational_veronese_certificate(family_a_2, 2)
    record = certificate.to_dict()
    assert record["kind"] == "f_rational_veronese"
    assert record["verdict"] == "pass"
    assert {h["name"] for h in record["assumptions"]} >= {"standard_graded", "frobenius_injective"}
    assert "witness" not in record

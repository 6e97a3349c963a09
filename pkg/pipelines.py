"""Verification pipelines for the two families and generic analysis of ring files."""

import logging
import time
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import sympy

import config
from cech import class_frobenius, component_basis, multigraded_split, veronese_component_basis
from certify import (
    Certificate,
    CertificateKind,
    Verdict,
    a_invariant_certificate,
    annihilator_probe,
    f_injectivity_on_component,
    f_rational_veronese_certificate,
    isolated_singularity_probe,
    kernel_witness_certificate,
)
from families import (
    family_a,
    family_a_alphas,
    family_a_base_change_witness,
    family_a_enveloping_witness,
    family_a_eta,
    family_a_expected_image,
    family_a_low_kernel_class,
    family_a_mu,
    family_a_nilpotent,
    family_b,
    family_b_base_change_witness,
    family_b_component_dimension,
    family_b_enveloping_witness,
)
from linalg import same_span, span_contains
from report import Report
from ring_files import load_ring_file, parse_class_expression
from rings import RingPresentation, base_change, integral_model, nilpotency_check, tensor_square
from semilinear import build_frobenius_matrix, frobenius_image_rank, frobenius_kernel

logger = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    """Invalid pipeline request (non-prime or out-of-range p, unknown command)."""


def _check_prime(p: int, limit: int, family: str):
    if isinstance(p, bool) or not isinstance(p, int) or not sympy.isprime(p):
        raise PipelineError(f"p must be prime, got {p!r}")
    if p > limit:
        raise PipelineError(f"family {family} is limited to p <= {limit}")


def _run_step(report: Report, name: str, expected: Optional[Verdict], compute: Callable[[], Certificate],
              catch: bool = True):
    logger.info(f"Step {name}: starting")
    start = time.perf_counter()
    try:
        certificate = compute()
    except Exception as e:
        if not catch:
            raise
        logger.error(f"Step {name} raised: {e}")
        certificate = Certificate(CertificateKind.STEP_ERROR, Verdict.INCONCLUSIVE, reason=f"{type(e).__name__}: {e}")
    ms = (time.perf_counter() - start) * 1000
    report.add(name, certificate, expected, ms)
    logger.info(f"Step {name}: {certificate.verdict.value} in {ms:.0f} ms")
    return certificate


def _probe_cap(p: int) -> int:
    return 2 * (p + 2)


def _nilpotent_certificate(element, k: int) -> Certificate:
    verdict = nilpotency_check(element, k)
    return Certificate(
        CertificateKind.NILPOTENT_ELEMENT,
        Verdict.PASS if verdict.is_nonzero_nilpotent else Verdict.FAIL,
        witness=element,
        parameters={"k": k, "nonzero": verdict.nonzero, "kth_power_zero": verdict.kth_power_zero},
    )


def _enveloping_certificate(eta, p: int) -> Certificate:
    certificate = kernel_witness_certificate(eta)
    certificate.parameters["expected_degree"] = [-p, -p]
    if certificate.passed and eta.degree() != (-p, -p):
        certificate.verdict = Verdict.FAIL
        certificate.reason = f"witness has degree {eta.degree()}"
    return certificate


def _witness_in_kernel(ring: RingPresentation, witness, degree: int) -> Certificate:
    """The given class is a nonzero kernel element and lies in the computed kernel."""
    certificate = kernel_witness_certificate(witness)
    kernel = frobenius_kernel(ring, degree)
    contained = span_contains(kernel.vectors, kernel.source.coordinates(witness))
    certificate.parameters["kernel_dim"] = kernel.dim
    certificate.parameters["in_computed_kernel"] = contained
    if certificate.passed and not contained:
        certificate.verdict = Verdict.FAIL
        certificate.reason = "witness is not in the computed kernel"
    return certificate


def run_family_a(p: int) -> Report:
    """Verify every family A statement for a prime p <= FAMILY_A_MAX_PRIME."""
    _check_prime(p, config.FAMILY_A_MAX_PRIME, "A")
    logger.info(f"=== Family A, p = {p} ===")
    ring = family_a(p)
    report = Report("A", p, ring.field.describe())

    _run_step(report, "a_invariant", Verdict.PASS, lambda: a_invariant_certificate(ring, expected=-1))
    probe = _run_step(report, "isolated_singularity_probe", Verdict.PASS,
                      lambda: isolated_singularity_probe(integral_model(ring), _probe_cap(p)))
    _run_step(report, "s_not_f_injective", Verdict.PASS,
              lambda: kernel_witness_certificate(family_a_low_kernel_class(ring)))

    def formula() -> Certificate:
        mismatches = [alpha for alpha in family_a_alphas(p)
                      if class_frobenius(family_a_eta(ring, alpha)) != family_a_expected_image(ring, alpha)]
        return Certificate(CertificateKind.FROBENIUS_FORMULA, Verdict.FAIL if mismatches else Verdict.PASS,
                           parameters={"checked": len(family_a_alphas(p)), "mismatches": [list(a) for a in mismatches]})

    _run_step(report, "frobenius_formula", Verdict.PASS, formula)

    def image_rank() -> Certificate:
        M = build_frobenius_matrix(ring, -p)
        r = frobenius_image_rank(M)
        inside = M.target.basis == tuple(family_a_mu(ring).coords)
        return Certificate(CertificateKind.IMAGE_RANK, Verdict.PASS if r == 1 and inside else Verdict.FAIL,
                           parameters={"rank": r, "source_dim": M.source.dim, "image_in_mu_line": inside})

    _run_step(report, "frobenius_image_rank", Verdict.PASS, image_rank)
    _run_step(report, "f_rational_veronese", Verdict.PASS,
              lambda: f_rational_veronese_certificate(ring, p, probe=probe))
    if p <= config.ANNIHILATOR_MAX_PRIME:
        _run_step(report, "annihilator_probe_mu", Verdict.PASS,
                  lambda: annihilator_probe(ring, family_a_mu(ring), config.ANNIHILATOR_E_MAX, 2 * p, n=p))

    extended = base_change(ring)
    _run_step(report, "base_change_component", Verdict.FAIL, lambda: f_injectivity_on_component(extended, -p))
    witness = family_a_base_change_witness(extended)
    _run_step(report, "base_change_witness", Verdict.PASS, lambda: _witness_in_kernel(extended, witness, -p))
    if p <= config.ANNIHILATOR_MAX_PRIME:
        _run_step(report, "annihilator_probe_witness", Verdict.FAIL,
                  lambda: annihilator_probe(extended, witness, 1, 2 * p, n=p))
    _run_step(report, "nilpotent_element", Verdict.PASS,
              lambda: _nilpotent_certificate(family_a_nilpotent(extended), p))

    square = tensor_square(ring)
    _run_step(report, "enveloping_witness", Verdict.PASS,
              lambda: _enveloping_certificate(family_a_enveloping_witness(square), p))
    logger.info(f"Family A, p = {p}: {'PASS' if report.overall_pass else 'FAIL'}")
    return report


def _split_kernel_consistency(ring: RingPresentation, degree: int) -> Certificate:
    """Kernel via the multigraded split equals the unsplit kernel (mutual containment)."""
    component = component_basis(ring, degree)
    unsplit = frobenius_kernel(ring, degree)
    pieces = []
    parts = multigraded_split(ring, component)
    for part in parts.values():
        kernel = frobenius_kernel(ring, degree, basis=part)
        for vector in kernel.vectors:
            pieces.append(component.coordinates(kernel.source.from_vector(vector)))
    agree = same_span(unsplit.vectors, pieces) and len(pieces) == unsplit.dim
    return Certificate(CertificateKind.KERNEL_CONSISTENCY, Verdict.PASS if agree else Verdict.FAIL,
                       parameters={"degree": degree, "parts": len(parts), "dim": component.dim,
                                   "kernel_dim": unsplit.dim, "split_kernel_dim": len(pieces),
                                   "field": ring.field.describe()},
                       reason="" if agree else "split and unsplit kernels differ")


def run_family_b(p: int, allow_large: bool = False) -> Report:
    """Verify every family B statement; p = 5 needs allow_large."""
    limit = config.FAMILY_B_LARGE_PRIME if allow_large else config.FAMILY_B_MAX_PRIME
    _check_prime(p, limit, "B")
    logger.info(f"=== Family B, p = {p} ===")
    ring = family_b(p)
    report = Report("B", p, ring.field.describe())

    _run_step(report, "a_invariant", Verdict.PASS, lambda: a_invariant_certificate(ring, expected=-1))
    probe = _run_step(report, "isolated_singularity_probe", Verdict.PASS,
                      lambda: isolated_singularity_probe(integral_model(ring), _probe_cap(p)))

    def veronese() -> Certificate:
        certificate = f_rational_veronese_certificate(ring, p, probe=probe)
        expected_dim = family_b_component_dimension(p)
        if certificate.parameters.get("component_dim") != expected_dim:
            certificate.verdict = Verdict.FAIL
            certificate.reason = f"component dimension {certificate.parameters.get('component_dim')}, expected {expected_dim}"
        return certificate

    _run_step(report, "f_rational_veronese", Verdict.PASS, veronese)
    _run_step(report, "kernel_consistency", Verdict.PASS, lambda: _split_kernel_consistency(ring, -p))

    extended = base_change(ring)
    _run_step(report, "kernel_consistency_base_change", Verdict.PASS,
              lambda: _split_kernel_consistency(extended, -p))
    _run_step(report, "base_change_component", Verdict.FAIL, lambda: f_injectivity_on_component(extended, -p))
    _run_step(report, "base_change_witness", Verdict.PASS,
              lambda: _witness_in_kernel(extended, family_b_base_change_witness(extended), -p))

    square = tensor_square(ring)
    _run_step(report, "enveloping_witness", Verdict.PASS,
              lambda: _enveloping_certificate(family_b_enveloping_witness(square), p))
    logger.info(f"Family B, p = {p}: {'PASS' if report.overall_pass else 'FAIL'}")
    return report


def analyze(path: Union[str, Path], command: str, degree: Optional[Sequence[int]] = None, veronese: Optional[int] = None,
            class_literal: Optional[str] = None, e: int = 1, use_base_change: bool = False,
            n: Optional[int] = None, probe_cap: Optional[int] = None) -> Report:
    """Generic access to bases, Frobenius images, kernels and certificates on a ring file."""
    ring = load_ring_file(path)
    report = Report("custom", ring.p, ring.field.describe())

    if command == "basis":
        if degree is None:
            raise PipelineError("basis needs --degree")

        def basis() -> Certificate:
            component = veronese_component_basis(ring, veronese, degree) if veronese else component_basis(ring, degree)
            return Certificate(CertificateKind.COMPONENT_BASIS, Verdict.PASS, parameters={
                "degree": list(component.degree), "veronese": veronese, "dim": component.dim,
                "basis": [component.class_at(k).to_str() for k in range(component.dim)]})

        _run_step(report, "component_basis", None, basis, catch=False)
    elif command == "frobenius":
        if not class_literal:
            raise PipelineError("frobenius needs --class")
        eta = parse_class_expression(class_literal, ring)

        def image() -> Certificate:
            result = class_frobenius(eta, e)
            return Certificate(CertificateKind.FROBENIUS_IMAGE, Verdict.PASS, witness=result,
                               parameters={"e": e, "source": eta.to_str(), "zero": result.is_zero()})

        _run_step(report, "class_frobenius", None, image, catch=False)
    elif command == "kernel":
        if degree is None:
            raise PipelineError("kernel needs --degree")
        target = base_change(ring) if use_base_change else ring

        def kernel() -> Certificate:
            result = frobenius_kernel(target, degree, e)
            classes = result.classes()
            return Certificate(CertificateKind.FROBENIUS_KERNEL, Verdict.PASS,
                               witness=classes[0] if classes else None,
                               parameters={"degree": list(result.source.degree), "e": e, "dim": result.source.dim,
                                           "kernel_dim": result.dim, "kernel": [c.to_str() for c in classes],
                                           "field": target.field.describe()})

        _run_step(report, "frobenius_kernel", None, kernel, catch=False)
    elif command == "certify":
        if n is None:
            raise PipelineError("certify needs --n")
        _run_step(report, "f_rational_veronese", Verdict.PASS,
                  lambda: f_rational_veronese_certificate(ring, n, probe_cap=probe_cap), catch=False)
    else:
        raise PipelineError(f"unknown analyze command {command!r}")
    return report

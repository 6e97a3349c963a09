"""Decision procedures: a-invariant, F-injectivity on components, the Veronese
F-rationality certificate, the Jacobian probe for isolated singularities and the
bounded annihilator probe.

Every procedure returns a Certificate. Bounded searches report ``inconclusive``
rather than ``fail`` when nothing is found.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import config
from cech import CechClass, class_frobenius, class_multiply, component_basis
from linalg import nullspace, solve_mod_p
from rings import (
    RingElement,
    RingError,
    RingPresentation,
    integral_model,
    jacobian_partials,
    monomials_of_degree,
    monomials_up_to,
    relation_grading_weights,
)
from semilinear import frobenius_kernel

logger = logging.getLogger(__name__)


class CertificateKind(str, Enum):
    F_INJECTIVE_COMPONENT = "f_injective_component"
    F_RATIONAL_VERONESE = "f_rational_veronese"
    NOT_F_INJECTIVE = "not_f_injective"
    ISOLATED_SINGULARITY_PROBE = "isolated_singularity_probe"
    ANNIHILATOR_PROBE = "annihilator_probe"
    A_INVARIANT = "a_invariant"
    NILPOTENT_ELEMENT = "nilpotent_element"
    KERNEL_CONSISTENCY = "kernel_consistency"
    FROBENIUS_FORMULA = "frobenius_formula"
    IMAGE_RANK = "image_rank"
    COMPONENT_BASIS = "component_basis"
    FROBENIUS_IMAGE = "frobenius_image"
    FROBENIUS_KERNEL = "frobenius_kernel"
    STEP_ERROR = "step_error"


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Hypothesis:
    """One precondition of a certificate and how it was established."""

    name: str
    status: str  # computed | assumed | automatic | derived | missing
    holds: Optional[bool]
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "holds": self.holds, "detail": self.detail}


@dataclass
class Certificate:
    kind: CertificateKind
    verdict: Verdict
    assumptions: List[Hypothesis] = field(default_factory=list)
    witness: Optional[Union[CechClass, RingElement]] = None
    parameters: Dict[str, Any] = field(default_factory=dict)
    reason: str = ""
    evidence_only: bool = False

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def witness_text(self) -> Optional[str]:
        return None if self.witness is None else self.witness.to_str()

    def to_dict(self) -> dict:
        record = {
            "kind": self.kind.value,
            "verdict": self.verdict.value,
            "assumptions": [h.to_dict() for h in self.assumptions],
            "parameters": self.parameters,
        }
        if self.witness is not None:
            record["witness"] = self.witness_text()
        if self.reason:
            record["reason"] = self.reason
        if self.evidence_only:
            record["evidence_only"] = True
        return record


def _z_graded(ring: RingPresentation, what: str):
    if ring.grading_rank != 1:
        raise RingError(f"{what} needs a Z-graded ring")


def a_invariant(ring: RingPresentation) -> int:
    """sum_j m_j deg(bound v_j) - sum_i deg(v_i)."""
    _z_graded(ring, "a_invariant")
    top = sum(r.degree * ring.degrees[r.bound][0] for r in ring.relations)
    return top - sum(d[0] for d in ring.degrees)


def veronese_a_invariant(ring: RingPresentation, n: int) -> int:
    """a-invariant of S^(n) in its own grading."""
    return a_invariant(ring) // n


def a_invariant_certificate(ring: RingPresentation, expected: Optional[int] = None) -> Certificate:
    """a(S) cross-checked against the basis enumeration of H^d."""
    a = a_invariant(ring)
    top = component_basis(ring, a).dim
    above = component_basis(ring, a + 1).dim
    consistent = top > 0 and above == 0
    matches = expected is None or a == expected
    verdict = Verdict.PASS if consistent and matches else Verdict.FAIL
    reason = "" if consistent else f"enumeration finds {top} classes at {a} and {above} at {a + 1}"
    if not matches:
        reason = f"a(S) = {a}, expected {expected}"
    return Certificate(CertificateKind.A_INVARIANT, verdict,
                       parameters={"a": a, "dim_at_a": top, "dim_above_a": above}, reason=reason)


def f_injectivity_on_component(ring: RingPresentation, degree: Union[int, Sequence[int]], e: int = 1) -> Certificate:
    """Frobenius injectivity on one graded piece; a failure carries a kernel class."""
    result = frobenius_kernel(ring, degree, e)
    parameters = {
        "degree": list(result.source.degree),
        "e": e,
        "dim": result.source.dim,
        "kernel_dim": result.dim,
        "constraint_rank": result.constraint_rank,
        "field": ring.field.describe(),
    }
    if result.is_trivial:
        return Certificate(CertificateKind.F_INJECTIVE_COMPONENT, Verdict.PASS, parameters=parameters)
    witness = result.classes()[0]
    return Certificate(CertificateKind.F_INJECTIVE_COMPONENT, Verdict.FAIL, witness=witness, parameters=parameters,
                       reason=f"Frobenius kernel of dimension {result.dim}")


def kernel_witness_certificate(eta: CechClass, e: int = 1,
                               kind: CertificateKind = CertificateKind.NOT_F_INJECTIVE) -> Certificate:
    """pass iff eta is nonzero and F^e(eta) = 0 exactly."""
    image = class_frobenius(eta, e)
    degree = eta.degree()
    parameters = {"e": e, "degree": list(degree) if degree else None, "coordinates": len(eta.coords)}
    if eta.is_zero():
        return Certificate(kind, Verdict.FAIL, witness=eta, parameters=parameters, reason="class is zero")
    if not image.is_zero():
        return Certificate(kind, Verdict.FAIL, witness=eta, parameters=parameters,
                           reason=f"Frobenius image is nonzero: {image.to_str()}")
    return Certificate(kind, Verdict.PASS, witness=eta, parameters=parameters)


def _normality(ring: RingPresentation, isolated: Hypothesis) -> Hypothesis:
    if ring.assumptions.normal_asserted:
        return Hypothesis("normal_domain", "assumed", True, "asserted by the ring definition")
    if ring.dim >= 2 and isolated.holds:
        return Hypothesis("normal_domain", "derived", True,
                          "complete intersection of dimension >= 2 with an isolated singularity")
    return Hypothesis("normal_domain", "missing", None, "needs the normal flag")


def f_rational_veronese_certificate(ring: RingPresentation, n: int,
                                    probe: Optional[Certificate] = None,
                                    probe_cap: Optional[int] = None,
                                    run_probe: bool = True) -> Certificate:
    """F-rationality of S^(n) from injectivity of Frobenius on [H^d(S)]_(-n)."""
    hypotheses: List[Hypothesis] = []
    parameters: Dict[str, Any] = {"n": n}

    def finish(verdict: Verdict, reason: str = "", witness=None) -> Certificate:
        return Certificate(CertificateKind.F_RATIONAL_VERONESE, verdict, hypotheses, witness, parameters, reason)

    standard = ring.is_standard_graded
    hypotheses.append(Hypothesis("standard_graded", "computed", standard))
    if not standard:
        return finish(Verdict.FAIL, "ring is not standard graded")
    hypotheses.append(Hypothesis("gorenstein", "automatic", True, "complete-intersection presentation"))

    if ring.assumptions.isolated_singularity_asserted:
        isolated = Hypothesis("isolated_singularity", "assumed", True, "asserted by the ring definition")
    else:
        if probe is None and run_probe:
            probe = isolated_singularity_probe(integral_model(ring), probe_cap)
        if probe is not None and probe.passed:
            isolated = Hypothesis("isolated_singularity", "computed", True,
                                  "Jacobian containment on the integral model; localization step assumed")
        else:
            isolated = Hypothesis("isolated_singularity", "missing", None, "no bounded Jacobian certificate")
    hypotheses.append(isolated)
    hypotheses.append(_normality(ring, isolated))
    hypotheses.append(Hypothesis("test_element_powers", "derived" if isolated.holds else "missing", isolated.holds,
                                 "every element of the maximal ideal has a power that is a test element"))

    a = a_invariant(ring)
    parameters["a"] = a
    negative = a < 0 and -n <= a
    hypotheses.append(Hypothesis("a_invariant_bounds", "computed", negative, f"a(S) = {a}, -n = {-n}"))
    if not negative:
        return finish(Verdict.FAIL, f"need a(S) < 0 and -n <= a(S), got a(S) = {a}, n = {n}")

    injectivity = f_injectivity_on_component(ring, -n)
    parameters["component_dim"] = injectivity.parameters["dim"]
    hypotheses.append(Hypothesis("frobenius_injective", "computed", injectivity.passed, f"degree {-n}"))
    if not injectivity.passed:
        return finish(Verdict.FAIL, "Frobenius is not injective on the component", injectivity.witness)
    if any(h.holds is None for h in hypotheses):
        return finish(Verdict.INCONCLUSIVE, "some hypotheses are neither computed nor asserted")
    return finish(Verdict.PASS)


# isolated singularity probe

def _weight_of(weights: Sequence[Tuple[int, ...]], exponents: Sequence[int]) -> Tuple[int, ...]:
    return tuple(sum(w * a for w, a in zip(vector, exponents)) for vector in weights)


def _summand_degree(model: RingPresentation, param_count: int, exponents: Sequence[int]) -> int:
    """Parameter degree plus grading degree of the remaining variables."""
    total = sum(exponents[:param_count])
    for i in range(param_count, model.nvars):
        total += exponents[i] * sum(model.degrees[i])
    return total


def _membership(model: RingPresentation, variable: int, power: int, generators: List[RingElement],
                weights: List[Tuple[int, ...]], param_count: int, cap: int) -> Optional[str]:
    """Search h_k with v^power = sum h_k g_k in the model; None if not found or too large."""
    p = model.p
    target = model.element({tuple(power if i == variable else 0 for i in range(model.nvars)): model.field.one()})
    target_exponents = tuple(power if i == variable else 0 for i in range(model.nvars))
    target_weight = _weight_of(weights, target_exponents)
    target_degree = model.degree_of(target_exponents)
    x_indices = list(range(param_count, model.nvars))

    unknowns: List[Tuple[int, Tuple[int, ...]]] = []
    for k, g in enumerate(generators):
        some = next(iter(g.terms))
        g_degree = model.degree_of(some)
        needed = tuple(a - b for a, b in zip(target_weight, _weight_of(weights, some)))
        g_param_degree = max(sum(m[:param_count]) for m in g.terms)
        residual = tuple(a - b for a, b in zip(target_degree, g_degree))
        if any(r < 0 for r in residual):
            continue
        x_parts = monomials_of_degree(model, residual, x_indices)
        budget = cap - _summand_degree(model, param_count, target_exponents) - g_param_degree
        if budget < 0:
            continue
        for params in monomials_up_to(param_count, budget):
            for x_part in x_parts:
                exponents = params + x_part[param_count:]
                if _weight_of(weights, exponents) != needed:
                    continue
                unknowns.append((k, exponents))
                if len(unknowns) > config.PROBE_MAX_UNKNOWNS:
                    logger.warning(f"Probe for {model.names[variable]}^{power} exceeds "
                                   f"{config.PROBE_MAX_UNKNOWNS} unknowns")
                    return None
    if not unknowns:
        return None
    rows: Dict[Tuple[int, ...], Dict[int, int]] = {}
    for column, (k, exponents) in enumerate(unknowns):
        product = generators[k].multiply(model.monomial(exponents))
        for monomial, c in product.terms.items():
            rows.setdefault(monomial, {})[column] = c.num.constant_value()
    for monomial in target.terms:
        rows.setdefault(monomial, {})
    keys = sorted(rows)
    rhs = [target.terms[m].num.constant_value() if m in target.terms else 0 for m in keys]
    solution = solve_mod_p([rows[m] for m in keys], rhs, p)
    if solution is None:
        return None
    used = sorted({unknowns[c][0] for c in solution})
    return f"{model.names[variable]}^{power} in ideal of partials {used}"


def isolated_singularity_probe(model: RingPresentation, degree_cap: Optional[int] = None) -> Certificate:
    """Bounded search for v^N in the Jacobian ideal of the integral model, for every ring variable v."""
    if model.field.s:
        model = integral_model(model)
    param_count = sum(1 for d in model.degrees if not any(d))
    if degree_cap is None:
        top = sum(r.degree * sum(model.degrees[r.bound]) for r in model.relations)
        degree_cap = config.PROBE_DEGREE_CAP_FACTOR * max(top, 1)
    generators = [partial.derivative for partial in jacobian_partials(model) if not partial.derivative.is_zero()]
    weights = relation_grading_weights(model)
    parameters: Dict[str, Any] = {"degree_cap": degree_cap, "generators": len(generators)}
    found: Dict[str, Optional[str]] = {}
    for variable in range(param_count, model.nvars):
        name = model.names[variable]
        found[name] = None
        step = sum(model.degrees[variable])
        power = 1
        while generators and power * step <= degree_cap:
            certificate = _membership(model, variable, power, generators, weights, param_count, degree_cap)
            if certificate is not None:
                found[name] = certificate
                logger.debug(f"Probe: {certificate}")
                break
            power += 1
        if found[name] is None:
            logger.info(f"Probe found no power of {name} in the Jacobian ideal up to degree {degree_cap}")
    parameters["memberships"] = found
    if all(found.values()):
        return Certificate(CertificateKind.ISOLATED_SINGULARITY_PROBE, Verdict.PASS, parameters=parameters)
    missing = sorted(name for name, value in found.items() if value is None)
    return Certificate(CertificateKind.ISOLATED_SINGULARITY_PROBE, Verdict.INCONCLUSIVE, parameters=parameters,
                       reason=f"no bounded certificate for {missing}")


# annihilator probe

def annihilator_probe(ring: RingPresentation, eta: CechClass, e_max: Optional[int] = None,
                      degree_cap: Optional[int] = None, n: int = 1) -> Certificate:
    """Bounded tight-closure test for eta.

    Fails with s = 1 when some F^e(eta) vanishes, or with a form s of degree a
    multiple of n up to the cap that kills F^e(eta) for every e <= e_max.
    A pass is evidence only.
    """
    _z_graded(ring, "annihilator_probe")
    e_max = config.ANNIHILATOR_E_MAX if e_max is None else e_max
    degree_cap = 2 * n if degree_cap is None else degree_cap
    parameters: Dict[str, Any] = {"e_max": e_max, "degree_cap": degree_cap, "n": n}
    one = ring.one()
    if eta.is_zero():
        return Certificate(CertificateKind.ANNIHILATOR_PROBE, Verdict.FAIL, witness=one,
                           parameters={**parameters, "e": 0}, reason="the class is zero")
    images = [eta]
    for e in range(1, e_max + 1):
        images.append(class_frobenius(images[-1], 1))
    # s = 1 is checked for every e before any form of positive degree
    for e, image in enumerate(images):
        if image.is_zero():
            return Certificate(CertificateKind.ANNIHILATOR_PROBE, Verdict.FAIL, witness=one,
                               parameters={**parameters, "e": e}, reason=f"F^{e} of the class is zero")
    # one form must kill every F^e(eta) at once
    for degree in range(n, degree_cap + 1, n):
        monomials = monomials_of_degree(ring, (degree,))
        rows: Dict[Any, Dict[int, Any]] = {}
        for column, exponents in enumerate(monomials):
            s = ring.monomial(exponents)
            for e, image in enumerate(images):
                for index, c in class_multiply(s, image).coords.items():
                    rows.setdefault((e, index), {})[column] = c
        kernel = nullspace([rows[k] for k in sorted(rows)], len(monomials), ring.field)
        logger.debug(f"Annihilator probe degree {degree}: {len(monomials)} forms, common kernel {len(kernel)}")
        if kernel:
            s = ring.element({m: c for m, c in zip(monomials, kernel[0]) if c})
            return Certificate(CertificateKind.ANNIHILATOR_PROBE, Verdict.FAIL, witness=s,
                               parameters={**parameters, "degree": degree},
                               reason=f"a form of degree {degree} annihilates F^e of the class for e <= {e_max}")
    return Certificate(CertificateKind.ANNIHILATOR_PROBE, Verdict.PASS, parameters=parameters,
                       evidence_only=True, reason="bounded check only")

"""The two hypersurface families and their distinguished classes and elements."""

from __future__ import annotations

import logging
from math import factorial
from typing import Dict, List, Sequence, Tuple

import sympy

from cech import BasisClassIndex, CechClass, cech_fraction
from rings import Assumptions, RingElement, RingPresentation, make_ring
from scalars import FieldDescriptor, RationalScalar

logger = logging.getLogger(__name__)


def _require_prime(p: int):
    if isinstance(p, bool) or not isinstance(p, int) or not sympy.isprime(p):
        raise ValueError(f"p must be prime, got {p!r}")


def family_a(p: int, assumptions: Assumptions = Assumptions()) -> RingPresentation:
    """K[x0..xp]/(x0^p - t1 x1^p - ... - tp xp^p) over K = F_p(t1..tp), all degrees 1."""
    _require_prime(p)
    field = FieldDescriptor(p, tuple(f"t{i}" for i in range(1, p + 1)))
    variables = [(f"x{i}", 1) for i in range(p + 1)]
    relation: Dict[Tuple[int, ...], RationalScalar] = {(p,) + (0,) * p: field.one()}
    for i in range(1, p + 1):
        exponents = [0] * (p + 1)
        exponents[i] = p
        relation[tuple(exponents)] = -field.param(i - 1)
    return make_ring(field, variables, [("x0", relation)], assumptions)


def family_b(p: int, assumptions: Assumptions = Assumptions()) -> RingPresentation:
    """K[w,x,y,z1..z_(p-1)]/(w^(p+1) - t x^(p+1) - x y^p - sum z_i^(p+1)) over K = F_p(t)."""
    _require_prime(p)
    field = FieldDescriptor(p, ("t",))
    names = ["w", "x", "y"] + [f"z{i}" for i in range(1, p)]
    n = len(names)

    def monomial(**powers) -> Tuple[int, ...]:
        return tuple(powers.get(name, 0) for name in names)

    relation = {
        monomial(w=p + 1): field.one(),
        monomial(x=p + 1): -field.param("t"),
        monomial(x=1, y=p): field.constant(-1),
    }
    for i in range(1, p):
        exponents = [0] * n
        exponents[names.index(f"z{i}")] = p + 1
        relation[tuple(exponents)] = field.constant(-1)
    return make_ring(field, [(name, 1) for name in names], [("w", relation)], assumptions)


# Family A classes

def family_a_eta(ring: RingPresentation, alpha: Sequence[int]) -> CechClass:
    """eta_alpha = [x0^|alpha| / x1^(alpha_1+1) ... xp^(alpha_p+1)], of degree -p."""
    total = sum(alpha)
    return CechClass.basis_class(ring, BasisClassIndex((total,), tuple(alpha)))


def family_a_alphas(p: int) -> List[Tuple[int, ...]]:
    """All alpha in N^p with |alpha| <= p - 1, in lexicographic order."""
    found = []

    def walk(prefix: List[int], remaining: int):
        if len(prefix) == p:
            found.append(tuple(prefix))
            return
        for a in range(remaining + 1):
            walk(prefix + [a], remaining - a)

    walk([], p - 1)
    return sorted(found)


def family_a_mu(ring: RingPresentation) -> CechClass:
    """mu = [1 / (x1 ... xp)^p], the class every eta_alpha maps onto."""
    p = ring.p
    return CechClass.basis_class(ring, BasisClassIndex((0,), (p - 1,) * p))


def multinomial(alpha: Sequence[int]) -> int:
    """Multinomial coefficient (sum alpha)! / prod alpha_i!."""
    value = factorial(sum(alpha))
    for a in alpha:
        value //= factorial(a)
    return value


def family_a_expected_image(ring: RingPresentation, alpha: Sequence[int]) -> CechClass:
    """multinomial(alpha) t^alpha mu."""
    field = ring.field
    coefficient = field.constant(multinomial(alpha))
    for i, a in enumerate(alpha):
        coefficient = coefficient * field.param(i) ** a
    return family_a_mu(ring).scale(coefficient)


def family_a_socle(ring: RingPresentation) -> CechClass:
    """[x0^(p-1) / x1 ... xp], spanning the top nonzero degree -1."""
    p = ring.p
    return CechClass.basis_class(ring, BasisClassIndex((p - 1,), (0,) * p))


def family_a_low_kernel_class(ring: RingPresentation) -> CechClass:
    """[x0 / x1 ... xp]; its Frobenius image vanishes because x0^p = sum t_i x_i^p."""
    p = ring.p
    return CechClass.basis_class(ring, BasisClassIndex((1,), (0,) * p))


def family_a_base_change_witness(ring: RingPresentation) -> CechClass:
    """u2 eta_(1,0,..) - u1 eta_(0,1,0,..) over K^(1/p)."""
    p = ring.p
    first = [0] * p
    first[0] = 1
    second = [0] * p
    second[1] = 1
    field = ring.field
    return family_a_eta(ring, first).scale(field.param(1)) - family_a_eta(ring, second).scale(field.param(0))


def family_a_nilpotent(ring: RingPresentation) -> RingElement:
    """(x0 - sum u_i x_i) x1 ... x_(p-1) over K^(1/p); its p-th power vanishes."""
    p = ring.p
    linear = ring.gen("x0")
    for i in range(1, p + 1):
        linear = linear - ring.gen(f"x{i}").scale(ring.field.param(i - 1))
    result = linear
    for i in range(1, p):
        result = result * ring.gen(f"x{i}")
    return result


def family_a_enveloping_witness(square: RingPresentation) -> CechClass:
    """[(x0 x1' - x1 x0') / (x1^2 x2 ... xp x1'^2 x2' ... xp')] in S tensor S."""
    p = square.p
    numerator = square.gen("x0") * square.gen("x1'") - square.gen("x1") * square.gen("x0'")
    denominators = {}
    for prime in ("", "'"):
        for i in range(1, p + 1):
            denominators[f"x{i}{prime}"] = 2 if i == 1 else 1
    return cech_fraction(square, numerator, denominators)


# Family B classes

def _z_names(p: int) -> List[str]:
    return [f"z{i}" for i in range(1, p)]


def family_b_socle(ring: RingPresentation) -> CechClass:
    """[w^p / x y z1 ... z_{p-1}], spanning the top degree -1."""
    p = ring.p
    denominators = {name: 1 for name in ["x", "y"] + _z_names(p)}
    return cech_fraction(ring, ring.gen("w") ** p, denominators)


def family_b_base_change_witness(ring: RingPresentation) -> CechClass:
    """[w^2 / x^2 y z1..] - u [w^2 / x y^2 z1..] over K^(1/p)."""
    p = ring.p
    w2 = ring.gen("w") ** 2
    zs = {name: 1 for name in _z_names(p)}
    first = cech_fraction(ring, w2, {"x": 2, "y": 1, **zs})
    second = cech_fraction(ring, w2, {"x": 1, "y": 2, **zs})
    return first - second.scale(ring.field.param(0))


def family_b_enveloping_witness(square: RingPresentation) -> CechClass:
    """[(w w')^2 (x' y - x y') / ((x x' y y')^2 prod z_i z_i')] in S tensor S."""
    p = square.p
    ww = (square.gen("w") * square.gen("w'")) ** 2
    numerator = ww * (square.gen("x'") * square.gen("y") - square.gen("x") * square.gen("y'"))
    denominators = {"x": 2, "x'": 2, "y": 2, "y'": 2}
    for name in _z_names(p):
        denominators[name] = 1
        denominators[name + "'"] = 1
    return cech_fraction(square, numerator, denominators)


def family_b_component_dimension(p: int) -> int:
    """dim [H^d]_{-p} for family B."""
    return int(sympy.binomial(2 * p, p + 1))


def family_a_component_dimension(p: int) -> int:
    """dim [H^d]_{-p} for family A."""
    return int(sympy.binomial(2 * p - 1, p))

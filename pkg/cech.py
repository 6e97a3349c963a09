"""Graded components of top local cohomology through the Cech complex on the unbound variables."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from rings import (
    Degree,
    RingElement,
    RingPresentation,
    monomials_of_degree,
)
from scalars import RationalScalar

logger = logging.getLogger(__name__)


class CechError(ValueError):
    """Invalid Cech fraction, class or component request."""


@dataclass(frozen=True, order=True)
class BasisClassIndex:
    """[prod v_j^bound_j / prod u_i^(alpha_i + 1)] with v_j bound and u_i unbound."""

    bound: Tuple[int, ...]
    alphas: Tuple[int, ...]

    def denominators(self) -> Tuple[int, ...]:
        return tuple(a + 1 for a in self.alphas)


def index_degree(ring: RingPresentation, index: BasisClassIndex) -> Degree:
    """Degree of the basis class with this index."""
    total = [0] * ring.grading_rank
    for j, a in zip(ring.bound_indices, index.bound):
        for k, d in enumerate(ring.degrees[j]):
            total[k] += a * d
    for i, alpha in zip(ring.unbound_indices, index.alphas):
        for k, d in enumerate(ring.degrees[i]):
            total[k] -= (alpha + 1) * d
    return tuple(total)


def _numerator_exponents(ring: RingPresentation, index: BasisClassIndex) -> Tuple[int, ...]:
    exponents = [0] * ring.nvars
    for j, a in zip(ring.bound_indices, index.bound):
        exponents[j] = a
    return tuple(exponents)


def _format_index(ring: RingPresentation, index: BasisClassIndex) -> str:
    numerator = "*".join(
        ring.names[j] if a == 1 else f"{ring.names[j]}^{a}"
        for j, a in zip(ring.bound_indices, index.bound) if a
    ) or "1"
    denominator = " ".join(
        ring.names[i] if k == 1 else f"{ring.names[i]}^{k}"
        for i, k in zip(ring.unbound_indices, index.denominators())
    )
    return f"[{numerator} / {denominator}]"


class CechClass:
    """An element of H^d given by coordinates over the canonical basis."""

    __slots__ = ("ring", "coords")

    def __init__(self, ring: RingPresentation, coords: Optional[Dict[BasisClassIndex, RationalScalar]] = None):
        self.ring = ring
        self.coords = {k: v for k, v in (coords or {}).items() if v}

    @classmethod
    def basis_class(cls, ring: RingPresentation, index: BasisClassIndex) -> "CechClass":
        return cls(ring, {index: ring.field.one()})

    def is_zero(self) -> bool:
        return not self.coords

    def __bool__(self):
        return bool(self.coords)

    def _check(self, other: "CechClass"):
        if other.ring is not self.ring:
            raise CechError("classes belong to different rings")

    def __add__(self, other: "CechClass") -> "CechClass":
        self._check(other)
        coords = dict(self.coords)
        for index, c in other.coords.items():
            total = coords[index] + c if index in coords else c
            if total:
                coords[index] = total
            else:
                coords.pop(index, None)
        return CechClass(self.ring, coords)

    def __neg__(self) -> "CechClass":
        return CechClass(self.ring, {k: -v for k, v in self.coords.items()})

    def __sub__(self, other: "CechClass") -> "CechClass":
        return self + (-other)

    def scale(self, c: Union[RationalScalar, int]) -> "CechClass":
        if isinstance(c, int):
            c = self.ring.field.constant(c)
        if not c:
            return CechClass(self.ring)
        return CechClass(self.ring, {k: v * c for k, v in self.coords.items()})

    def __rmul__(self, c):
        if isinstance(c, (int, RationalScalar)):
            return self.scale(c)
        return NotImplemented

    def degree(self) -> Optional[Degree]:
        degrees = {index_degree(self.ring, index) for index in self.coords}
        return degrees.pop() if len(degrees) == 1 else None

    def is_homogeneous(self) -> bool:
        return not self.coords or self.degree() is not None

    def __eq__(self, other):
        if not isinstance(other, CechClass):
            return NotImplemented
        return self.ring is other.ring and self.coords == other.coords

    def __hash__(self):
        return hash(frozenset(self.coords.items()))

    def to_str(self) -> str:
        """Literal form ``c*[num / den] + ...`` that parse_class_expression reads back."""
        if not self.coords:
            return "0"
        params = self.ring.field.params
        pieces = []
        for index in sorted(self.coords):
            c = self.coords[index]
            bracket = _format_index(self.ring, index)
            if c.is_one():
                pieces.append(bracket)
            elif c.is_polynomial() and len(c.num.terms) == 1:
                pieces.append(f"{c.to_str(params)}*{bracket}")
            else:
                pieces.append(f"({c.to_str(params)})*{bracket}")
        return " + ".join(pieces)

    def __repr__(self):
        return f"CechClass({self.to_str()})"


def normalize_class(numerator: RingElement, denominators: Sequence[int]) -> CechClass:
    """Coordinates of [numerator / prod u_i^k_i]; terms reaching a denominator power die."""
    ring = numerator.ring
    if len(denominators) != len(ring.unbound_indices):
        raise CechError(f"expected {len(ring.unbound_indices)} denominator exponents, got {len(denominators)}")
    if any(k <= 0 for k in denominators):
        raise CechError(f"denominator exponents must be positive, got {tuple(denominators)}")
    coords: Dict[BasisClassIndex, RationalScalar] = {}
    for monomial, c in numerator.terms.items():
        alphas = tuple(k - monomial[i] - 1 for i, k in zip(ring.unbound_indices, denominators))
        if any(a < 0 for a in alphas):
            continue
        index = BasisClassIndex(tuple(monomial[j] for j in ring.bound_indices), alphas)
        total = coords[index] + c if index in coords else c
        if total:
            coords[index] = total
        else:
            del coords[index]
    return CechClass(ring, coords)


def cech_fraction(ring: RingPresentation, numerator: RingElement,
                  denominators: Mapping[str, int]) -> CechClass:
    """normalize_class with the denominator given by variable name."""
    unknown = set(denominators) - {ring.names[i] for i in ring.unbound_indices}
    if unknown:
        raise CechError(f"denominator mentions non-unbound variables {sorted(unknown)}")
    return normalize_class(numerator, [denominators.get(ring.names[i], 0) for i in ring.unbound_indices])


@dataclass
class GradedComponent:
    """[H^d]_degree with an ordered basis; ``complete`` is False for image supports."""

    ring: RingPresentation
    degree: Degree
    basis: Tuple[BasisClassIndex, ...]
    veronese: Optional[Tuple[int, Tuple[int, ...]]] = None
    complete: bool = True
    _positions: Dict[BasisClassIndex, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.basis = tuple(self.basis)
        self._positions = {index: k for k, index in enumerate(self.basis)}

    def __len__(self):
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def position(self, index: BasisClassIndex) -> int:
        return self._positions[index]

    def class_at(self, k: int) -> CechClass:
        return CechClass.basis_class(self.ring, self.basis[k])

    def coordinates(self, eta: CechClass) -> List[RationalScalar]:
        extra = set(eta.coords) - set(self._positions)
        if extra:
            raise CechError(f"class has support outside the component: {sorted(extra)[:3]}")
        zero = self.ring.field.zero()
        return [eta.coords.get(index, zero) for index in self.basis]

    def from_vector(self, vector: Sequence[RationalScalar]) -> CechClass:
        return CechClass(self.ring, {index: c for index, c in zip(self.basis, vector) if c})


def _as_degree(ring: RingPresentation, degree: Union[int, Sequence[int]]) -> Degree:
    vector = (degree,) if isinstance(degree, int) else tuple(degree)
    if len(vector) != ring.grading_rank:
        raise CechError(f"degree {vector} does not match the grading rank {ring.grading_rank}")
    return vector


def component_basis(ring: RingPresentation, degree: Union[int, Sequence[int]]) -> GradedComponent:
    """Canonical basis of [H^d]_k, ordered by index."""
    degree = _as_degree(ring, degree)
    for i in ring.unbound_indices:
        d = ring.degrees[i]
        if any(x < 0 for x in d) or not any(d):
            raise CechError(f"unbound variable {ring.names[i]} needs a positive degree")
    unbound_total = [0] * ring.grading_rank
    for i in ring.unbound_indices:
        for k, d in enumerate(ring.degrees[i]):
            unbound_total[k] += d
    ranges = [range(r.degree) for r in ring.relations]
    found: List[BasisClassIndex] = []
    for bound in product(*ranges):
        exponents = [0] * ring.nvars
        for j, a in zip(ring.bound_indices, bound):
            exponents[j] = a
        bound_degree = ring.degree_of(tuple(exponents))
        # sum alpha_i deg u_i must equal this residual
        residual = tuple(b - t - u for b, t, u in zip(bound_degree, degree, unbound_total))
        if any(r < 0 for r in residual):
            continue
        for monomial in monomials_of_degree(ring, residual, ring.unbound_indices):
            found.append(BasisClassIndex(tuple(bound), tuple(monomial[i] for i in ring.unbound_indices)))
    found.sort()
    logger.debug(f"Component of degree {degree}: {len(found)} basis classes")
    return GradedComponent(ring, degree, tuple(found))


def veronese_component_basis(ring: RingPresentation, n: int, k: Union[int, Sequence[int]]) -> GradedComponent:
    """The degree-k piece of H^d over S^(n), i.e. [H^d(S)]_(n k)."""
    if n < 1:
        raise CechError("Veronese index must be positive")
    k_vector = _as_degree(ring, k)
    component = component_basis(ring, tuple(n * x for x in k_vector))
    component.veronese = (n, k_vector)
    return component


def _frobenius_of_index(ring: RingPresentation, index: BasisClassIndex, e: int) -> Dict[BasisClassIndex, RationalScalar]:
    table = ring.memo.setdefault("class_frobenius", {})
    key = (index, e)
    cached = table.get(key)
    if cached is not None:
        return cached
    q = ring.p ** e
    denominators = tuple(q * k for k in index.denominators())
    bounds = tuple(zip(ring.unbound_indices, denominators))
    power = tuple(q * a for a in _numerator_exponents(ring, index))
    numerator = ring.element({power: ring.field.one()}, bounds)
    result = normalize_class(numerator, denominators).coords
    table[key] = result
    return result


def class_frobenius(eta: CechClass, e: int = 1) -> CechClass:
    """F^e on classes: coordinates go to their p^e powers, numerators and denominators to p^e powers."""
    if e < 0:
        raise CechError("Frobenius exponent must be nonnegative")
    if e == 0:
        return eta
    ring = eta.ring
    coords: Dict[BasisClassIndex, RationalScalar] = {}
    for index, c in eta.coords.items():
        twisted = c.frobenius(e)
        for target, value in _frobenius_of_index(ring, index, e).items():
            term = twisted * value
            total = coords[target] + term if target in coords else term
            if total:
                coords[target] = total
            else:
                coords.pop(target, None)
    return CechClass(ring, coords)


def class_multiply(s: RingElement, eta: CechClass) -> CechClass:
    """s * eta for a ring element s."""
    ring = eta.ring
    if s.ring is not ring:
        raise CechError("multiplier belongs to a different ring")
    result = CechClass(ring)
    for index, c in eta.coords.items():
        denominators = index.denominators()
        bounds = tuple(zip(ring.unbound_indices, denominators))
        basis_numerator = ring.element({_numerator_exponents(ring, index): c})
        numerator = s.multiply(basis_numerator, bounds)
        result = result + normalize_class(numerator, denominators)
    return result


def family_b_residue(ring: RingPresentation, index: BasisClassIndex) -> Tuple[int, ...]:
    """Degree in (Z/(p+1))^(p+1): z_i -> e_i, w -> e_p, x and y -> e_(p+1)."""
    slots = _family_b_slots(ring)
    modulus = ring.p + 1
    residue = [0] * modulus
    for j, a in zip(ring.bound_indices, index.bound):
        residue[slots[j]] += a
    for i, k in zip(ring.unbound_indices, index.denominators()):
        residue[slots[i]] -= k
    return tuple(r % modulus for r in residue)


def _family_b_slots(ring: RingPresentation) -> Dict[int, int]:
    p = ring.p
    expected = ["w", "x", "y"] + [f"z{i}" for i in range(1, p)]
    if sorted(ring.names) != sorted(expected):
        raise CechError(f"ring variables {ring.names} do not have the shape w, x, y, z1..z{p - 1}")
    if len(ring.relations) != 1 or ring.names[ring.relations[0].bound] != "w" or ring.relations[0].degree != p + 1:
        raise CechError(f"expected one relation monic of degree {p + 1} in w")
    slots = {ring.index("w"): p - 1, ring.index("x"): p, ring.index("y"): p}
    for i in range(1, p):
        slots[ring.index(f"z{i}")] = i - 1
    for monomial in ring.relations[0].rhs:
        residue = [0] * (p + 1)
        for index, a in enumerate(monomial):
            residue[slots[index]] += a
        if any(r % (p + 1) for r in residue):
            raise CechError("relation is not homogeneous for the (Z/(p+1))^(p+1) grading")
    return slots


def multigraded_split(ring: RingPresentation, component: GradedComponent) -> Dict[Tuple[int, ...], List[BasisClassIndex]]:
    """Partition a component's basis by residue degree; parts keep the basis order."""
    parts: Dict[Tuple[int, ...], List[BasisClassIndex]] = {}
    for index in component.basis:
        parts.setdefault(family_b_residue(ring, index), []).append(index)
    logger.debug(f"Split {component.dim} classes into {len(parts)} parts")
    return dict(sorted(parts.items()))


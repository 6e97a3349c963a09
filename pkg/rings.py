"""Graded quotient rings K[v_1..v_N]/(f_1..f_c), each f_j monic in its own bound variable."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy

from scalars import FieldDescriptor, RationalScalar, adjoin_pth_roots

logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]
Degree = Tuple[int, ...]
Bounds = Tuple[Tuple[int, int], ...]


class RingError(ValueError):
    """Invalid ring presentation or ring operation."""


@dataclass(frozen=True)
class Assumptions:
    """Facts about the ring that are cited rather than computed."""

    isolated_singularity_asserted: bool = False
    normal_asserted: bool = False


@dataclass(frozen=True, eq=False)
class Relation:
    """f = v^m - rhs, with rhs in normal form below v^m."""

    bound: int
    degree: int
    rhs: Mapping[Exponents, RationalScalar]


def _accumulate(target: Dict[Exponents, RationalScalar], monomial: Exponents, coeff: RationalScalar):
    current = target.get(monomial)
    if current is None:
        if coeff:
            target[monomial] = coeff
        return
    total = current + coeff
    if total:
        target[monomial] = total
    else:
        del target[monomial]


def _truncated(monomial: Exponents, bounds: Optional[Bounds]) -> bool:
    if not bounds:
        return False
    for index, cap in bounds:
        if monomial[index] >= cap:
            return True
    return False


class RingPresentation:
    """A validated presentation; build it with make_ring."""

    def __init__(self, field: FieldDescriptor, names: Tuple[str, ...], degrees: Tuple[Degree, ...],
                 relations: Tuple[Relation, ...], assumptions: Assumptions):
        self.field = field
        self.names = names
        self.degrees = degrees
        self.relations = relations
        self.assumptions = assumptions
        self.grading_rank = len(degrees[0]) if degrees else 1
        self.bound_indices = tuple(r.bound for r in relations)
        self.unbound_indices = tuple(i for i in range(len(names)) if i not in self.bound_indices)
        self.dim = len(names) - len(relations)
        self._power_cache: Dict[Tuple[int, int], Dict[Exponents, RationalScalar]] = {}
        # per-ring tables for derived computations (Frobenius images of basis classes)
        self.memo: Dict[str, dict] = {}

    # basic data

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def is_standard_graded(self) -> bool:
        return self.grading_rank == 1 and all(d == (1,) for d in self.degrees)

    @property
    def free_basis_size(self) -> int:
        size = 1
        for relation in self.relations:
            size *= relation.degree
        return size

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise RingError(f"unknown variable {name!r}") from None

    def degree_of(self, exponents: Exponents) -> Degree:
        total = [0] * self.grading_rank
        for a, degree in zip(exponents, self.degrees):
            if a:
                for k, d in enumerate(degree):
                    total[k] += a * d
        return tuple(total)

    def relation_polynomial(self, j: int) -> Dict[Exponents, RationalScalar]:
        """The full relation f_j = v^m - rhs as a term dictionary."""
        relation = self.relations[j]
        terms = {m: -c for m, c in relation.rhs.items()}
        top = [0] * self.nvars
        top[relation.bound] = relation.degree
        _accumulate(terms, tuple(top), self.field.one())
        return terms

    def describe(self) -> dict:
        return {
            "field": self.field.describe(),
            "variables": {n: list(d) for n, d in zip(self.names, self.degrees)},
            "relations": [self.format_relation(j) for j in range(len(self.relations))],
            "dim": self.dim,
        }

    def format_relation(self, j: int) -> str:
        return RingElement(self, self.relation_polynomial(j)).to_str()

    # elements

    def zero(self) -> "RingElement":
        return RingElement(self, {})

    def one(self) -> "RingElement":
        return self.scalar(self.field.one())

    def scalar(self, c: Union[RationalScalar, int]) -> "RingElement":
        if isinstance(c, int):
            c = self.field.constant(c)
        return RingElement(self, {(0,) * self.nvars: c} if c else {})

    def gen(self, name: Union[str, int]) -> "RingElement":
        index = self.index(name) if isinstance(name, str) else name
        exponents = [0] * self.nvars
        exponents[index] = 1
        return self.element({tuple(exponents): self.field.one()})

    def monomial(self, exponents: Sequence[int], coeff: Optional[RationalScalar] = None) -> "RingElement":
        return self.element({tuple(exponents): coeff if coeff is not None else self.field.one()})

    def element(self, terms: Mapping[Exponents, RationalScalar], bounds: Optional[Bounds] = None) -> "RingElement":
        return RingElement(self, self.reduce(terms, bounds))

    # normal forms

    def _power_nf(self, j: int, a: int) -> Dict[Exponents, RationalScalar]:
        """v_j^a reduced with relation j only."""
        key = (j, a)
        cached = self._power_cache.get(key)
        if cached is not None:
            return cached
        relation = self.relations[j]
        v, m = relation.bound, relation.degree
        if a < m:
            exponents = [0] * self.nvars
            exponents[v] = a
            result = {tuple(exponents): self.field.one()}
            self._power_cache[key] = result
            return result
        start = a - 1
        while start >= m and (j, start) not in self._power_cache:
            start -= 1
        current = self._power_nf(j, start)
        for step in range(start + 1, a + 1):
            shifted: Dict[Exponents, RationalScalar] = {}
            for monomial, coeff in current.items():
                if monomial[v] + 1 < m:
                    _accumulate(shifted, monomial[:v] + (monomial[v] + 1,) + monomial[v + 1:], coeff)
                    continue
                rest = monomial[:v] + (0,) + monomial[v + 1:]
                for rhs_monomial, rhs_coeff in relation.rhs.items():
                    _accumulate(shifted, tuple(x + y for x, y in zip(rest, rhs_monomial)), coeff * rhs_coeff)
            self._power_cache[(j, step)] = shifted
            current = shifted
        return current

    def reduce(self, terms: Mapping[Exponents, RationalScalar], bounds: Optional[Bounds] = None) -> Dict[Exponents, RationalScalar]:
        """Normal form of a term dictionary; monomials hitting ``bounds`` are dropped on the way."""
        current: Dict[Exponents, RationalScalar] = {}
        for monomial, coeff in terms.items():
            monomial = tuple(monomial)
            if len(monomial) != self.nvars:
                raise RingError(f"monomial {monomial} does not have {self.nvars} exponents")
            if isinstance(coeff, int):
                coeff = self.field.constant(coeff)
            if coeff and not _truncated(monomial, bounds):
                _accumulate(current, monomial, coeff)
        # later relations only mention earlier bound variables, so one descending pass suffices
        for j in reversed(range(len(self.relations))):
            relation = self.relations[j]
            v, m = relation.bound, relation.degree
            if all(monomial[v] < m for monomial in current):
                continue
            reduced: Dict[Exponents, RationalScalar] = {}
            for monomial, coeff in current.items():
                a = monomial[v]
                if a < m:
                    _accumulate(reduced, monomial, coeff)
                    continue
                rest = monomial[:v] + (0,) + monomial[v + 1:]
                for power_monomial, power_coeff in self._power_nf(j, a).items():
                    target = tuple(x + y for x, y in zip(rest, power_monomial))
                    if not _truncated(target, bounds):
                        _accumulate(reduced, target, coeff * power_coeff)
            current = reduced
        return current


class RingElement:
    """Element of a RingPresentation in free-basis normal form."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: RingPresentation, terms: Dict[Exponents, RationalScalar]):
        self.ring = ring
        self.terms = terms

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _coerce(self, other) -> "RingElement":
        if isinstance(other, RingElement):
            if other.ring is not self.ring:
                raise RingError("elements belong to different rings")
            return other
        if isinstance(other, (int, RationalScalar)):
            return self.ring.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        result = dict(self.terms)
        for monomial, coeff in other.terms.items():
            _accumulate(result, monomial, coeff)
        return RingElement(self.ring, result)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: RationalScalar) -> "RingElement":
        if not c:
            return self.ring.zero()
        return RingElement(self.ring, {m: coeff * c for m, coeff in self.terms.items()})

    def multiply(self, other: "RingElement", bounds: Optional[Bounds] = None) -> "RingElement":
        product_terms: Dict[Exponents, RationalScalar] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                _accumulate(product_terms, tuple(a + b for a, b in zip(m1, m2)), c1 * c2)
        return self.ring.element(product_terms, bounds)

    def __mul__(self, other):
        if isinstance(other, (int, RationalScalar)):
            return self.scale(other if isinstance(other, RationalScalar) else self.ring.field.constant(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.multiply(other)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "RingElement":
        if exponent < 0:
            raise RingError("negative powers are not defined in the ring")
        result = self.ring.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def frobenius(self, e: int = 1, bounds: Optional[Bounds] = None) -> "RingElement":
        return ring_frobenius(self, e, bounds)

    def degree(self) -> Optional[Degree]:
        """Degree vector when homogeneous, None otherwise (and for zero)."""
        degrees = {self.ring.degree_of(m) for m in self.terms}
        return degrees.pop() if len(degrees) == 1 else None

    def is_homogeneous(self) -> bool:
        return not self.terms or self.degree() is not None

    def __eq__(self, other):
        if isinstance(other, (int, RationalScalar)):
            other = self.ring.scalar(other)
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.ring is other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        names, params = self.ring.names, self.ring.field.params
        pieces = []
        for monomial in sorted(self.terms, key=lambda m: (sum(m), m), reverse=True):
            coeff = self.terms[monomial]
            factors = "*".join(n if a == 1 else f"{n}^{a}" for n, a in zip(names, monomial) if a)
            text = coeff.to_str(params)
            if not factors:
                pieces.append(text if len(coeff.num.terms) == 1 and coeff.is_polynomial() else f"({text})")
            elif coeff.is_one():
                pieces.append(factors)
            elif coeff.is_polynomial() and len(coeff.num.terms) == 1:
                pieces.append(f"{text}*{factors}")
            else:
                pieces.append(f"({text})*{factors}")
        return " + ".join(pieces)

    def __repr__(self):
        return f"RingElement({self.to_str()})"


def _degree_vector(value: Union[int, Sequence[int]]) -> Degree:
    if isinstance(value, bool):
        raise RingError(f"invalid degree {value!r}")
    if isinstance(value, int):
        return (value,)
    return tuple(int(x) for x in value)


def make_ring(field: FieldDescriptor,
              variables: Sequence[Tuple[str, Union[int, Sequence[int]]]],
              relations: Sequence[Tuple[str, Mapping[Exponents, Union[RationalScalar, int]]]] = (),
              assumptions: Optional[Assumptions] = None) -> RingPresentation:
    """Validate a presentation given as (bound variable, full relation polynomial) pairs."""
    names = tuple(name for name, _ in variables)
    degrees = tuple(_degree_vector(degree) for _, degree in variables)
    if not names:
        raise RingError("a ring needs at least one variable")
    if len(set(names)) != len(names):
        raise RingError(f"duplicate variable names in {names}")
    if set(names) & set(field.params):
        raise RingError(f"variables and parameters must be disjoint: {sorted(set(names) & set(field.params))}")
    if len({len(d) for d in degrees}) != 1 or not degrees[0]:
        raise RingError("all degree vectors must have the same positive length")

    shell = RingPresentation(field, names, degrees, (), assumptions or Assumptions())
    all_bound = {shell.index(b) for b, _ in relations}
    built: List[Relation] = []
    seen = set()
    for position, (bound_name, poly) in enumerate(relations):
        bound = shell.index(bound_name)
        if bound in seen:
            raise RingError(f"duplicate bound variable {bound_name!r}")
        seen.add(bound)
        terms: Dict[Exponents, RationalScalar] = {}
        for monomial, coeff in poly.items():
            monomial = tuple(monomial)
            if len(monomial) != len(names):
                raise RingError(f"relation for {bound_name}: monomial {monomial} has wrong length")
            if isinstance(coeff, int):
                coeff = field.constant(coeff)
            _accumulate(terms, monomial, coeff)
        if not terms:
            raise RingError(f"relation for {bound_name} is zero")
        term_degrees = {shell.degree_of(m) for m in terms}
        if len(term_degrees) != 1:
            raise RingError(f"non-homogeneous relation for {bound_name}: degrees {sorted(term_degrees)}")
        top = max(m[bound] for m in terms)
        leading = [m for m in terms if m[bound] == top]
        pure = tuple(top if i == bound else 0 for i in range(len(names)))
        if top == 0 or leading != [pure]:
            raise RingError(f"non-monic relation: not monic in {bound_name}")
        inverse = terms[pure].inverse()
        rhs = {m: -(c * inverse) for m, c in terms.items() if m != pure}
        earlier = {r.bound: r.degree for r in built}
        for monomial in rhs:
            for index, a in enumerate(monomial):
                if not a or index == bound or index not in all_bound:
                    continue
                if index in earlier:
                    if a >= earlier[index]:
                        raise RingError(f"relation for {bound_name} is not reduced in {names[index]}")
                else:
                    raise RingError(f"relation for {bound_name} mentions the later bound variable {names[index]}")
        built.append(Relation(bound, top, rhs))
        logger.debug(f"Relation {position}: {bound_name}^{top} monic, {len(rhs)} rhs terms")

    ring = RingPresentation(field, names, degrees, tuple(built), assumptions or Assumptions())
    logger.debug(f"Built ring in {names} with {len(built)} relations, dim {ring.dim}")
    return ring


def normal_form(ring: RingPresentation, terms: Mapping[Exponents, RationalScalar]) -> RingElement:
    """Reduce a term dictionary by the relations to the canonical representative."""
    return ring.element(terms)


def ring_frobenius(a: RingElement, e: int, bounds: Optional[Bounds] = None) -> RingElement:
    """Normal form of a^(p^e); in characteristic p this is sum of c^(p^e) * m^(p^e)."""
    if e < 0:
        raise RingError("Frobenius exponent must be nonnegative")
    if e == 0:
        return a
    q = a.ring.p ** e
    terms = {tuple(x * q for x in m): c.frobenius(e) for m, c in a.terms.items()}
    return a.ring.element(terms, bounds)


def tensor_square(ring: RingPresentation) -> RingPresentation:
    """S tensor_K S with primed names for the second copy and the Z^2 grading."""
    if ring.grading_rank != 1:
        raise RingError("tensor_square needs a Z-graded ring")
    n = ring.nvars
    variables = [(name, (d[0], 0)) for name, d in zip(ring.names, ring.degrees)]
    variables += [(name + "'", (0, d[0])) for name, d in zip(ring.names, ring.degrees)]
    relations = []
    for copy in (0, 1):
        for j in range(len(ring.relations)):
            poly = ring.relation_polynomial(j)
            if copy == 0:
                shifted = {m + (0,) * n: c for m, c in poly.items()}
            else:
                shifted = {(0,) * n + m: c for m, c in poly.items()}
            relations.append((variables[copy * n + ring.relations[j].bound][0], shifted))
    return make_ring(ring.field, variables, relations)


def base_change(ring: RingPresentation) -> RingPresentation:
    """The same presentation over K^(1/p)."""
    extended, embed = adjoin_pth_roots(ring.field)
    relations = []
    for j, relation in enumerate(ring.relations):
        poly = {m: embed(c) for m, c in ring.relation_polynomial(j).items()}
        relations.append((ring.names[relation.bound], poly))
    variables = list(zip(ring.names, ring.degrees))
    return make_ring(extended, variables, relations, ring.assumptions)


def embed_element(a: RingElement, target: RingPresentation) -> RingElement:
    """Carry an element of S into base_change(S)."""
    if target.names != a.ring.names or target.field.base_params != a.ring.field.params:
        raise RingError("target is not the base change of the element's ring")
    return target.element({m: c.frobenius(1) for m, c in a.terms.items()})


@dataclass(frozen=True)
class NilpotencyVerdict:
    nonzero: bool
    kth_power_zero: bool

    @property
    def is_nonzero_nilpotent(self) -> bool:
        return self.nonzero and self.kth_power_zero


def nilpotency_check(a: RingElement, k: int) -> NilpotencyVerdict:
    """Whether a is nonzero and a^k vanishes."""
    if k < 1:
        raise RingError("nilpotency exponent must be positive")
    return NilpotencyVerdict(nonzero=not a.is_zero(), kth_power_zero=(a ** k).is_zero())


def integral_model(ring: RingPresentation) -> RingPresentation:
    """The ring over F_p with the parameters promoted to degree-zero variables."""
    field = ring.field
    s = field.s
    zero_degree = (0,) * ring.grading_rank
    variables = [(name, zero_degree) for name in field.params] + list(zip(ring.names, ring.degrees))
    base = FieldDescriptor(field.p)
    relations = []
    for j, relation in enumerate(ring.relations):
        poly: Dict[Exponents, int] = {}
        for monomial, coeff in ring.relation_polynomial(j).items():
            if not coeff.is_polynomial():
                raise RingError("integral model needs relation coefficients in F_p[t]")
            for param_monomial, value in coeff.num.terms.items():
                key = param_monomial + monomial
                poly[key] = (poly.get(key, 0) + value) % field.p
        relations.append((ring.names[relation.bound], {m: c for m, c in poly.items() if c}))
    model = make_ring(base, variables, relations, ring.assumptions)
    logger.debug(f"Integral model has variables {model.names}")
    return model


@dataclass(frozen=True)
class Partial:
    variable: str
    relation: int
    derivative: RingElement


def jacobian_partials(model: RingPresentation) -> List[Partial]:
    """All formal partial derivatives of the relations (with respect to every variable)."""
    partials = []
    p = model.p
    for j in range(len(model.relations)):
        poly = model.relation_polynomial(j)
        for index, name in enumerate(model.names):
            derivative: Dict[Exponents, RationalScalar] = {}
            for monomial, coeff in poly.items():
                a = monomial[index]
                if a % p == 0:
                    continue
                lowered = monomial[:index] + (a - 1,) + monomial[index + 1:]
                _accumulate(derivative, lowered, coeff * a)
            partials.append(Partial(name, j, model.element(derivative)))
    return partials


def relation_grading_weights(ring: RingPresentation) -> List[Tuple[int, ...]]:
    """Integer weight vectors under which every relation is homogeneous."""
    differences = []
    for j in range(len(ring.relations)):
        monomials = sorted(ring.relation_polynomial(j))
        first = monomials[0]
        for other in monomials[1:]:
            differences.append([a - b for a, b in zip(other, first)])
    if not differences:
        return [tuple(1 if i == k else 0 for i in range(ring.nvars)) for k in range(ring.nvars)]
    weights = []
    for vector in sympy.Matrix(differences).nullspace():
        scale = sympy.ilcm(1, 1, *[sympy.Rational(x).q for x in vector])
        weights.append(tuple(int(sympy.Rational(x) * scale) for x in vector))
    return weights


def monomials_of_degree(ring: RingPresentation, degree: Degree,
                        variables: Optional[Sequence[int]] = None) -> List[Exponents]:
    """Normal-form monomials in the given variables with exactly this degree vector."""
    indices = list(range(ring.nvars)) if variables is None else list(variables)
    caps = {r.bound: r.degree for r in ring.relations}
    for index in indices:
        d = ring.degrees[index]
        if any(x < 0 for x in d) or not any(d):
            raise RingError(f"variable {ring.names[index]} has a non-positive degree; enumeration is infinite")
    found: List[Exponents] = []
    exponents = [0] * ring.nvars

    def walk(position: int, remaining: Tuple[int, ...]):
        if position == len(indices):
            if not any(remaining):
                found.append(tuple(exponents))
            return
        index = indices[position]
        d = ring.degrees[index]
        a = 0
        while all(r >= 0 for r in remaining) and a < caps.get(index, float("inf")):
            exponents[index] = a
            walk(position + 1, remaining)
            a += 1
            remaining = tuple(r - x for r, x in zip(remaining, d))
        exponents[index] = 0

    if all(x >= 0 for x in degree):
        walk(0, tuple(degree))
    return sorted(found)


def monomials_up_to(nvars: int, total: int) -> Iterable[Exponents]:
    """All exponent tuples in nvars variables of total degree at most ``total``."""
    if nvars == 0:
        yield ()
        return
    for first in range(total + 1):
        for rest in monomials_up_to(nvars - 1, total - first):
            yield (first,) + rest

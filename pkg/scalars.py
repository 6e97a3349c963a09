"""Exact arithmetic in F_p, in F_p[t_1..t_s] and in K = F_p(t_1..t_s)."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple, Union

import sympy
from sympy.polys.domains import GF
from sympy.polys.orderings import grlex
from sympy.polys.rings import ring as sympy_ring

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]


class ScalarError(ValueError):
    """Invalid field data: non-prime characteristic, mismatched fields, inexact division."""


def _grlex_key(monomial: Monomial) -> Tuple[int, Monomial]:
    return (sum(monomial), monomial)


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p."""

    p: int

    def __post_init__(self):
        if isinstance(self.p, bool) or not isinstance(self.p, int) or not sympy.isprime(self.p):
            raise ScalarError(f"characteristic must be a prime integer, got {self.p!r}")

    def reduce(self, n: int) -> int:
        return n % self.p

    def inverse(self, n: int) -> int:
        n %= self.p
        if n == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return pow(n, -1, self.p)


class ParamPoly:
    """Sparse polynomial in F_p[t_1..t_s]: exponent tuple -> nonzero residue mod p."""

    __slots__ = ("p", "nvars", "terms", "_hash")

    def __init__(self, p: int, nvars: int, terms: Optional[Dict[Monomial, int]] = None, _clean: bool = False):
        self.p = p
        self.nvars = nvars
        if terms is None:
            terms = {}
        elif not _clean:
            cleaned = {}
            for monomial, coeff in terms.items():
                monomial = tuple(monomial)
                if len(monomial) != nvars:
                    raise ScalarError(f"monomial {monomial} does not have {nvars} exponents")
                coeff %= p
                if coeff:
                    cleaned[monomial] = coeff
            terms = cleaned
        self.terms = terms
        self._hash = None

    # construction

    @classmethod
    def zero(cls, p: int, nvars: int) -> "ParamPoly":
        return cls(p, nvars, {}, _clean=True)

    @classmethod
    def constant(cls, p: int, nvars: int, value: int) -> "ParamPoly":
        value %= p
        return cls(p, nvars, {(0,) * nvars: value} if value else {}, _clean=True)

    @classmethod
    def one(cls, p: int, nvars: int) -> "ParamPoly":
        return cls.constant(p, nvars, 1)

    @classmethod
    def monomial(cls, p: int, exponents: Sequence[int], coeff: int = 1) -> "ParamPoly":
        return cls(p, len(exponents), {tuple(exponents): coeff})

    @classmethod
    def gen(cls, p: int, nvars: int, index: int) -> "ParamPoly":
        exponents = [0] * nvars
        exponents[index] = 1
        return cls(p, nvars, {tuple(exponents): 1}, _clean=True)

    # predicates

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get((0,) * self.nvars) == 1

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def constant_value(self) -> int:
        return self.terms.get((0,) * self.nvars, 0)

    # structure

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise ScalarError("zero polynomial has no leading monomial")
        return max(self.terms, key=_grlex_key)

    def leading_coefficient(self) -> int:
        return self.terms[self.leading_monomial()] if self.terms else 0

    def monic(self) -> "ParamPoly":
        if not self.terms:
            return self
        lc = self.leading_coefficient()
        if lc == 1:
            return self
        return self.scale(pow(lc, -1, self.p))

    # arithmetic

    def _check(self, other: "ParamPoly"):
        if other.p != self.p or other.nvars != self.nvars:
            raise ScalarError(f"mixing F_{self.p}[{self.nvars} params] with F_{other.p}[{other.nvars} params]")

    def _coerce(self, other) -> "ParamPoly":
        if isinstance(other, ParamPoly):
            self._check(other)
            return other
        if isinstance(other, int):
            return ParamPoly.constant(self.p, self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        result = dict(self.terms)
        for monomial, coeff in other.terms.items():
            value = (result.get(monomial, 0) + coeff) % self.p
            if value:
                result[monomial] = value
            else:
                result.pop(monomial, None)
        return ParamPoly(self.p, self.nvars, result, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly(self.p, self.nvars, {m: self.p - c for m, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, value: int) -> "ParamPoly":
        value %= self.p
        if not value:
            return ParamPoly.zero(self.p, self.nvars)
        if value == 1:
            return self
        return ParamPoly(self.p, self.nvars, {m: c * value % self.p for m, c in self.terms.items()}, _clean=True)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return ParamPoly.zero(self.p, self.nvars)
        if self.is_one():
            return other
        if other.is_one():
            return self
        p = self.p
        result: Dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                monomial = tuple(a + b for a, b in zip(m1, m2))
                result[monomial] = (result.get(monomial, 0) + c1 * c2) % p
        return ParamPoly(p, self.nvars, {m: c for m, c in result.items() if c}, _clean=True)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "ParamPoly":
        if exponent < 0:
            raise ScalarError("negative power of a polynomial")
        result = ParamPoly.one(self.p, self.nvars)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def inflate(self, factor: int) -> "ParamPoly":
        """Multiply every exponent by ``factor`` (coefficients are fixed by Frobenius on F_p)."""
        if factor == 1:
            return self
        return ParamPoly(self.p, self.nvars,
                         {tuple(a * factor for a in m): c for m, c in self.terms.items()}, _clean=True)

    def frobenius(self, e: int = 1) -> "ParamPoly":
        return self.inflate(self.p ** e)

    def exquo(self, divisor: "ParamPoly") -> "ParamPoly":
        """Exact division; raises ScalarError when the divisor does not divide."""
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero in K")
        if divisor.is_one():
            return self
        p = self.p
        lead = divisor.leading_monomial()
        inverse = pow(divisor.terms[lead], -1, p)
        remainder = dict(self.terms)
        quotient: Dict[Monomial, int] = {}
        while remainder:
            top = max(remainder, key=_grlex_key)
            shift = tuple(a - b for a, b in zip(top, lead))
            if any(a < 0 for a in shift):
                raise ScalarError("inexact polynomial division")
            coeff = remainder[top] * inverse % p
            quotient[shift] = coeff
            for monomial, dc in divisor.terms.items():
                target = tuple(a + b for a, b in zip(shift, monomial))
                value = (remainder.get(target, 0) - coeff * dc) % p
                if value:
                    remainder[target] = value
                else:
                    remainder.pop(target, None)
        return ParamPoly(p, self.nvars, quotient, _clean=True)

    # comparison

    def __eq__(self, other):
        if isinstance(other, int):
            return self == ParamPoly.constant(self.p, self.nvars, other)
        if not isinstance(other, ParamPoly):
            return NotImplemented
        return self.p == other.p and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.nvars, frozenset(self.terms.items())))
        return self._hash

    # display

    def to_str(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for monomial in sorted(self.terms, key=_grlex_key, reverse=True):
            coeff = self.terms[monomial]
            factors = [name if a == 1 else f"{name}^{a}" for name, a in zip(names, monomial) if a]
            if not factors:
                pieces.append(str(coeff))
            elif coeff == 1:
                pieces.append("*".join(factors))
            else:
                pieces.append(f"{coeff}*" + "*".join(factors))
        return " + ".join(pieces)

    def __repr__(self):
        return f"ParamPoly(p={self.p}, {self.to_str([f't{i + 1}' for i in range(self.nvars)])})"


@lru_cache(maxsize=None)
def _gcd_ring(p: int, nvars: int):
    names = ",".join(f"t{i}" for i in range(nvars))
    return sympy_ring(names, GF(p), grlex)[0]


def _monomial_gcd(monomial: ParamPoly, other: ParamPoly) -> ParamPoly:
    exponents = list(next(iter(monomial.terms)))
    for m in other.terms:
        exponents = [min(a, b) for a, b in zip(exponents, m)]
    return ParamPoly.monomial(monomial.p, exponents)


def _split_monomial_content(f: ParamPoly) -> Tuple[Monomial, ParamPoly]:
    """f = t^content * rest with rest not divisible by any t_i."""
    content = tuple(min(m[i] for m in f.terms) for i in range(f.nvars))
    if not any(content):
        return content, f
    terms = {tuple(a - b for a, b in zip(m, content)): c for m, c in f.terms.items()}
    return content, ParamPoly(f.p, f.nvars, terms, _clean=True)


def poly_gcd(f: ParamPoly, g: ParamPoly) -> ParamPoly:
    """Monic gcd in F_p[t]; monomial and constant cases are handled directly, the rest by sympy."""
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    if f.is_constant() or g.is_constant():
        return ParamPoly.one(f.p, f.nvars)
    if f.is_monomial():
        return _monomial_gcd(f, g)
    if g.is_monomial():
        return _monomial_gcd(g, f)
    # gcd(m_f f', m_g g') = gcd(m_f, m_g) gcd(f', g') once the monomial contents are split off
    f_content, f = _split_monomial_content(f)
    g_content, g = _split_monomial_content(g)
    shared = [min(a, b) for a, b in zip(f_content, g_content)]
    if f.is_constant() or g.is_constant() or f == g:
        rest = f.monic() if f == g else ParamPoly.one(f.p, f.nvars)
    else:
        ring = _gcd_ring(f.p, f.nvars)
        h = ring.from_dict(dict(f.terms)).gcd(ring.from_dict(dict(g.terms)))
        rest = ParamPoly(f.p, f.nvars, {tuple(m): int(c) for m, c in h.items()}).monic()
    return rest * ParamPoly.monomial(rest.p, shared) if any(shared) else rest


def poly_lcm(f: ParamPoly, g: ParamPoly) -> ParamPoly:
    """Monic lcm in F_p[t]; zero when either argument is zero."""
    if f.is_zero() or g.is_zero():
        return ParamPoly.zero(f.p, f.nvars)
    if f.is_one():
        return g.monic()
    if g.is_one():
        return f.monic()
    return (f * g).exquo(poly_gcd(f, g)).monic()


def poly_content(polys: Iterable[ParamPoly]) -> Optional[ParamPoly]:
    """Monic gcd of a family of polynomials, or None for an empty/all-zero family."""
    content = None
    for poly in polys:
        if poly.is_zero():
            continue
        content = poly.monic() if content is None else poly_gcd(content, poly)
        if content.is_one():
            break
    return content


class RationalScalar:
    """Element of K as a canonical fraction: gcd(num, den) = 1 and den monic in grlex order."""

    __slots__ = ("num", "den")

    def __init__(self, num: ParamPoly, den: Optional[ParamPoly] = None):
        # callers guarantee canonical form; use rf_normalize otherwise
        self.num = num
        self.den = den if den is not None else ParamPoly.one(num.p, num.nvars)

    @property
    def p(self) -> int:
        return self.num.p

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def __bool__(self):
        return not self.num.is_zero()

    def _coerce(self, other) -> "RationalScalar":
        if isinstance(other, RationalScalar):
            if other.p != self.p or other.nvars != self.nvars:
                raise ScalarError("mixing scalars from different fields")
            return other
        if isinstance(other, int):
            return RationalScalar(ParamPoly.constant(self.p, self.nvars, other))
        if isinstance(other, ParamPoly):
            return RationalScalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.num, self.den, other.num, other.den
        if b.is_one() and d.is_one():
            return RationalScalar(a + c, b)
        # a polynomial summand keeps the fraction canonical: gcd(a + c b, b) = gcd(a, b) = 1
        if d.is_one():
            return _canonical_or_zero(a + c * b, b)
        if b.is_one():
            return _canonical_or_zero(a * d + c, d)
        g = poly_gcd(b, d)
        if g.is_one():
            return _canonical_or_zero(a * d + c * b, b * d)
        b1, d1 = b.exquo(g), d.exquo(g)
        num = a * d1 + c * b1
        if num.is_zero():
            return RationalScalar(num)
        # num is already coprime to b1 d1, only the factor g can cancel
        h = poly_gcd(num, g)
        if not h.is_one():
            num, d = num.exquo(h), d.exquo(h)
        return RationalScalar(num, b1 * d)

    __radd__ = __add__

    def __neg__(self):
        return RationalScalar(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero() or other.num.is_zero():
            return RationalScalar(ParamPoly.zero(self.p, self.nvars))
        a, b, c, d = self.num, self.den, other.num, other.den
        if b.is_one() and d.is_one():
            return RationalScalar(a * c, b)
        # cancel across before multiplying: gcd(a, d) and gcd(c, b)
        if not d.is_one():
            g = poly_gcd(a, d)
            if not g.is_one():
                a, d = a.exquo(g), d.exquo(g)
        if not b.is_one():
            g = poly_gcd(c, b)
            if not g.is_one():
                c, b = c.exquo(g), b.exquo(g)
        return RationalScalar(a * c, b * d)

    __rmul__ = __mul__

    def inverse(self) -> "RationalScalar":
        if self.num.is_zero():
            raise ZeroDivisionError("division by zero in K")
        inverse = pow(self.num.leading_coefficient(), -1, self.p)
        return RationalScalar(self.den.scale(inverse), self.num.scale(inverse))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, exponent: int) -> "RationalScalar":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return RationalScalar(self.num ** exponent, self.den ** exponent)

    def frobenius(self, e: int = 1) -> "RationalScalar":
        # coprimality and a monic denominator survive raising to p^e
        return RationalScalar(self.num.frobenius(e), self.den.frobenius(e))

    def __eq__(self, other):
        if isinstance(other, (int, ParamPoly)):
            other = self._coerce(other)
        if not isinstance(other, RationalScalar):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def to_str(self, names: Sequence[str]) -> str:
        num = self.num.to_str(names)
        if self.den.is_one():
            return num
        den = self.den.to_str(names)
        if len(self.num.terms) > 1:
            num = f"({num})"
        if len(self.den.terms) > 1 or "*" in den:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"RationalScalar({self.to_str([f't{i + 1}' for i in range(self.nvars)])})"


def _canonical_or_zero(num: ParamPoly, den: ParamPoly) -> RationalScalar:
    """num/den with coprimality and a monic den already known."""
    if num.is_zero():
        return RationalScalar(num)
    return RationalScalar(num, den)


def rf_normalize(num: ParamPoly, den: ParamPoly) -> RationalScalar:
    """Canonical form of num/den: cancel the gcd and make the denominator monic."""
    if den.is_zero():
        raise ZeroDivisionError("division by zero in K")
    if num.is_zero():
        return RationalScalar(ParamPoly.zero(num.p, num.nvars))
    if den.is_constant():
        return RationalScalar(num.scale(pow(den.constant_value(), -1, num.p)))
    common = poly_gcd(num, den)
    if not common.is_one():
        num = num.exquo(common)
        den = den.exquo(common)
    lc = den.leading_coefficient()
    if lc != 1:
        inverse = pow(lc, -1, num.p)
        num = num.scale(inverse)
        den = den.scale(inverse)
    return RationalScalar(num, den)


def pth_root_decompose(g: ParamPoly) -> Dict[Monomial, ParamPoly]:
    """Split g as sum over eps in {0..p-1}^s of (g_eps)^p * t^eps; zero components are omitted."""
    p = g.p
    buckets: Dict[Monomial, Dict[Monomial, int]] = {}
    for monomial, coeff in g.terms.items():
        eps = tuple(a % p for a in monomial)
        root = tuple(a // p for a in monomial)
        # c^p = c in F_p, so the coefficient is carried unchanged
        buckets.setdefault(eps, {})[root] = coeff
    return {eps: ParamPoly(p, g.nvars, terms, _clean=True) for eps, terms in sorted(buckets.items())}


def recombine(components: Dict[Monomial, ParamPoly], p: int, nvars: int) -> ParamPoly:
    """Inverse of pth_root_decompose."""
    total = ParamPoly.zero(p, nvars)
    for eps, component in components.items():
        total = total + component.frobenius(1) * ParamPoly.monomial(p, eps)
    return total


def frobenius_scalar(c: RationalScalar, e: int) -> RationalScalar:
    """c^(p^e)."""
    if e < 0:
        raise ScalarError("Frobenius exponent must be nonnegative")
    return c.frobenius(e) if e else c


def _root_name(name: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    candidate = "u" + name[1:] if name.startswith("t") else f"{name}_root"
    if candidate in taken:
        candidate = f"{name}_root"
    return candidate


@dataclass(frozen=True)
class FieldDescriptor:
    """K = F_p(params), or K^(1/p) = F_p(u) with t_i = u_i^p when root_depth is 1."""

    p: int
    params: Tuple[str, ...] = ()
    root_depth: int = 0
    base_params: Tuple[str, ...] = ()

    def __post_init__(self):
        PrimeField(self.p)
        if self.root_depth not in (0, 1):
            raise ScalarError(f"root_depth must be 0 or 1, got {self.root_depth}")
        if len(set(self.params)) != len(self.params):
            raise ScalarError(f"duplicate parameter names in {self.params}")
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "base_params", tuple(self.base_params))

    @property
    def s(self) -> int:
        return len(self.params)

    def zero(self) -> RationalScalar:
        return RationalScalar(ParamPoly.zero(self.p, self.s))

    def one(self) -> RationalScalar:
        return RationalScalar(ParamPoly.one(self.p, self.s))

    def constant(self, value: int) -> RationalScalar:
        return RationalScalar(ParamPoly.constant(self.p, self.s, value))

    def poly(self, terms: Dict[Monomial, int]) -> ParamPoly:
        return ParamPoly(self.p, self.s, terms)

    def param(self, key: Union[int, str]) -> RationalScalar:
        index = self.params.index(key) if isinstance(key, str) else key
        return RationalScalar(ParamPoly.gen(self.p, self.s, index))

    def fraction(self, num: ParamPoly, den: Optional[ParamPoly] = None) -> RationalScalar:
        return rf_normalize(num, den if den is not None else ParamPoly.one(self.p, self.s))

    def format(self, c: RationalScalar) -> str:
        return c.to_str(self.params)

    def describe(self) -> dict:
        return {"p": self.p, "params": list(self.params), "root_depth": self.root_depth,
                "base_params": list(self.base_params)}

    def adjoin_pth_roots(self) -> Tuple["FieldDescriptor", Callable[[RationalScalar], RationalScalar]]:
        return adjoin_pth_roots(self)


def adjoin_pth_roots(field: FieldDescriptor) -> Tuple[FieldDescriptor, Callable[[RationalScalar], RationalScalar]]:
    """K -> K^(1/p) realized as F_p(u) with t_i -> u_i^p."""
    if field.root_depth != 0:
        raise ScalarError("field already contains the p-th roots of its parameters")
    names = []
    for name in field.params:
        names.append(_root_name(name, list(field.params) + names))
    extended = FieldDescriptor(field.p, tuple(names), 1, field.params)
    logger.debug(f"Adjoined p-th roots: {field.params} -> {extended.params}")

    def embed(c: RationalScalar) -> RationalScalar:
        # on representations t^a -> u^(pa) is exactly the Frobenius map
        return c.frobenius(1)

    return extended, embed


"""p^e-semilinear Frobenius maps between graded components and their kernels."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from cech import BasisClassIndex, CechClass, GradedComponent, class_frobenius, component_basis
from linalg import dense_nullspace_mod_p, normalize_vector, nullspace, rank
from rings import RingPresentation
from scalars import FieldDescriptor, ParamPoly, RationalScalar, poly_lcm, pth_root_decompose

logger = logging.getLogger(__name__)


class SemilinearError(ValueError):
    """Invalid Frobenius exponent or an oracle request the field cannot serve."""


Column = Dict[int, RationalScalar]


@dataclass
class SemilinearMap:
    """Column j holds the target coordinates of F^e(source basis j)."""

    source: GradedComponent
    target: GradedComponent
    e: int
    columns: List[Column]

    @property
    def ring(self) -> RingPresentation:
        return self.source.ring

    @property
    def field(self) -> FieldDescriptor:
        return self.source.ring.field

    def matrix(self) -> List[List[RationalScalar]]:
        zero = self.field.zero()
        return [[column.get(i, zero) for column in self.columns] for i in range(self.target.dim)]

    def apply(self, vector: Sequence[RationalScalar]) -> CechClass:
        """F^e of the source class with these coordinates."""
        image = CechClass(self.ring)
        for c, column in zip(vector, self.columns):
            if not c:
                continue
            twisted = c.frobenius(self.e)
            image = image + CechClass(self.ring, {self.target.basis[i]: v * twisted for i, v in column.items()})
        return image


@dataclass
class KernelResult:
    """A K-basis of a Frobenius kernel, in source coordinates."""

    source: GradedComponent
    e: int
    vectors: List[List[RationalScalar]]
    constraint_rank: int

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def is_trivial(self) -> bool:
        return not self.vectors

    def classes(self) -> List[CechClass]:
        return [self.source.from_vector(v) for v in self.vectors]


def build_frobenius_matrix(ring: RingPresentation, degree: Union[int, Sequence[int]], e: int = 1,
                           basis: Optional[Sequence[BasisClassIndex]] = None) -> SemilinearMap:
    """Matrix of F^e on [H^d]_degree (or on the span of ``basis``); the target is the image support."""
    if e < 1:
        raise SemilinearError("Frobenius exponent must be positive")
    if basis is None:
        source = component_basis(ring, degree)
    else:
        source = GradedComponent(ring, (degree,) if isinstance(degree, int) else tuple(degree), tuple(basis))
    images = [class_frobenius(source.class_at(k), e) for k in range(source.dim)]
    support = sorted({index for image in images for index in image.coords})
    q = ring.p ** e
    target = GradedComponent(ring, tuple(q * x for x in source.degree), tuple(support), complete=False)
    columns = [{target.position(index): c for index, c in image.coords.items()} for image in images]
    logger.debug(f"Frobenius matrix on degree {source.degree}: {source.dim} columns, {target.dim} rows")
    return SemilinearMap(source, target, e, columns)


def frobenius_twisted_kernel(columns: Sequence[Mapping[int, RationalScalar]],
                             field: FieldDescriptor) -> Tuple[List[List[RationalScalar]], int]:
    """Basis of {c : sum_j c_j^p col_j = 0} and the rank of the expanded K-linear system.

    With D_j the lcm of the denominators in column j, write c_j = D_j y_j and
    D_j^p M_ij = sum_eps P_ijeps^p t^eps. Independence of the t^eps over K^p
    turns the condition into the K-linear equations sum_j y_j P_ijeps = 0.
    """
    n = len(columns)
    one = ParamPoly.one(field.p, field.s)
    multipliers: List[ParamPoly] = []
    rows: Dict[Tuple[int, Tuple[int, ...]], Dict[int, ParamPoly]] = {}
    for j, column in enumerate(columns):
        common = one
        for entry in column.values():
            if not entry.is_polynomial():
                common = poly_lcm(common, entry.den)
        lifted = common.frobenius(1)
        for i, entry in column.items():
            if not entry:
                continue
            cleared = entry.num if entry.is_polynomial() and common.is_one() else entry.num * lifted.exquo(entry.den)
            for eps, component in pth_root_decompose(cleared).items():
                rows.setdefault((i, eps), {})[j] = component
        multipliers.append(common)
    system = [rows[key] for key in sorted(rows)]
    solutions = nullspace(system, n, field)
    kernel = []
    for y in solutions:
        kernel.append(normalize_vector([value * RationalScalar(d) for value, d in zip(y, multipliers)]))
    return kernel, n - len(solutions)


def _kernel_vectors(ring: RingPresentation, degree: Tuple[int, ...], basis: Sequence[BasisClassIndex],
                    e: int) -> Tuple[List[List[RationalScalar]], int]:
    step = build_frobenius_matrix(ring, degree, 1, basis=basis)
    if e == 1:
        return frobenius_twisted_kernel(step.columns, ring.field)
    # F^e(v) = 0 iff F(v) lies in W = ker F^(e-1) on the image support; project along W
    inner, _ = _kernel_vectors(ring, step.target.degree, step.target.basis, e - 1)
    if not inner:
        projected = step.columns
    else:
        functionals = nullspace([dict(enumerate(w)) for w in inner], step.target.dim, ring.field)
        projected = []
        for column in step.columns:
            image: Column = {}
            for k, phi in enumerate(functionals):
                total = None
                for i, entry in column.items():
                    if phi[i]:
                        term = phi[i] * entry
                        total = term if total is None else total + term
                if total is not None and total:
                    image[k] = total
            projected.append(image)
    return frobenius_twisted_kernel(projected, ring.field)


def semilinear_kernel(M: SemilinearMap) -> KernelResult:
    """Kernel of M with the rank of the expanded linear system."""
    if M.e == 1:
        vectors, constraint_rank = frobenius_twisted_kernel(M.columns, M.field)
    else:
        vectors, constraint_rank = _kernel_vectors(M.ring, M.source.degree, M.source.basis, M.e)
    logger.debug(f"Kernel of F^{M.e} on degree {M.source.degree}: dimension {len(vectors)} of {M.source.dim}")
    return KernelResult(M.source, M.e, vectors, constraint_rank)


def iterated_kernel(ring: RingPresentation, degree: Union[int, Sequence[int]], e: int,
                    basis: Optional[Sequence[BasisClassIndex]] = None) -> KernelResult:
    """Kernel of F^e composed from single Frobenius steps."""
    source = component_basis(ring, degree) if basis is None else \
        GradedComponent(ring, (degree,) if isinstance(degree, int) else tuple(degree), tuple(basis))
    if e < 1:
        raise SemilinearError("Frobenius exponent must be positive")
    vectors, constraint_rank = _kernel_vectors(ring, source.degree, source.basis, e)
    return KernelResult(source, e, vectors, constraint_rank)


def frobenius_kernel(ring: RingPresentation, degree: Union[int, Sequence[int]], e: int = 1,
                     basis: Optional[Sequence[BasisClassIndex]] = None) -> KernelResult:
    """ker F^e on [H^d]_degree, or on the span of ``basis``."""
    if e == 1:
        return semilinear_kernel(build_frobenius_matrix(ring, degree, 1, basis))
    return iterated_kernel(ring, degree, e, basis)


def is_injective(M: SemilinearMap) -> bool:
    """Trivial semilinear kernel; unchanged by rescaling the source basis."""
    return semilinear_kernel(M).is_trivial


def frobenius_image_rank(M: SemilinearMap) -> int:
    """K-dimension of the span of the columns."""
    rows: Dict[int, Dict[int, RationalScalar]] = {}
    for j, column in enumerate(M.columns):
        for i, entry in column.items():
            rows.setdefault(i, {})[j] = entry
    return rank([rows[i] for i in sorted(rows)])


def dense_kernel_mod_p(M: SemilinearMap) -> List[List[RationalScalar]]:
    """Plain linear kernel of a parameter-free map by dense elimination mod p."""
    field = M.field
    if field.s:
        raise SemilinearError("dense oracle needs a field without parameters")
    matrix = np.zeros((max(M.target.dim, 1), M.source.dim), dtype=np.int64)
    for j, column in enumerate(M.columns):
        for i, entry in column.items():
            matrix[i, j] = entry.num.constant_value()
    basis = dense_nullspace_mod_p(matrix, field.p)
    return [[field.constant(int(x)) for x in row] for row in basis]

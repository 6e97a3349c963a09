"""Exact linear algebra over K = F_p(t) and over F_p."""

from __future__ import annotations

import logging
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from scalars import FieldDescriptor, ParamPoly, RationalScalar, poly_content, poly_lcm

logger = logging.getLogger(__name__)

Entry = Union[RationalScalar, ParamPoly]
SparseRow = Dict[int, ParamPoly]


def _as_poly_row(row: Mapping[int, Entry]) -> SparseRow:
    """Scale a row of K-entries to coprime polynomial entries."""
    entries = {c: v for c, v in row.items() if v}
    if not entries:
        return {}
    if all(isinstance(v, ParamPoly) or v.is_polynomial() for v in entries.values()):
        polys = {c: (v if isinstance(v, ParamPoly) else v.num) for c, v in entries.items()}
    else:
        common = None
        for v in entries.values():
            if isinstance(v, RationalScalar) and not v.is_polynomial():
                common = v.den if common is None else poly_lcm(common, v.den)
        polys = {}
        for c, v in entries.items():
            if isinstance(v, ParamPoly):
                polys[c] = v * common
            else:
                polys[c] = v.num * common.exquo(v.den)
    return _primitive(polys)


def _primitive(row: SparseRow) -> SparseRow:
    content = poly_content(row.values())
    if content is None:
        return {}
    if content.is_one():
        return row
    return {c: v.exquo(content) for c, v in row.items()}


def echelon(rows: Sequence[Mapping[int, Entry]]) -> List[Tuple[int, SparseRow]]:
    """Fraction-free row echelon form; pivots are taken from the first row (in order) with a nonzero entry."""
    pending = [r for r in (_as_poly_row(row) for row in rows) if r]
    pivots: List[Tuple[int, SparseRow]] = []
    while pending:
        col = min(min(r) for r in pending)
        position = next(i for i, r in enumerate(pending) if col in r)
        pivot = pending.pop(position)
        a = pivot[col]
        survivors = []
        for row in pending:
            b = row.get(col)
            if b is None:
                survivors.append(row)
                continue
            combined: SparseRow = {}
            for c in set(row) | set(pivot):
                value = a * row[c] if c in row else None
                if c in pivot:
                    term = b * pivot[c]
                    value = -term if value is None else value - term
                if value is not None and not value.is_zero():
                    combined[c] = value
            combined = _primitive(combined)
            if combined:
                survivors.append(combined)
        pending = survivors
        pivots.append((col, pivot))
    return pivots


def rank(rows: Sequence[Mapping[int, Entry]]) -> int:
    """Rank of sparse rows over K."""
    return len(echelon(rows))


def normalize_vector(vector: Sequence[RationalScalar]) -> List[RationalScalar]:
    """Clear denominators, remove the content and make the first nonzero entry monic."""
    entries = {i: v for i, v in enumerate(vector) if v}
    if not entries:
        return list(vector)
    polys = _as_poly_row(entries)
    first = polys[min(polys)]
    lc = first.leading_coefficient()
    inverse = pow(lc, -1, first.p)
    zero = ParamPoly.zero(first.p, first.nvars)
    return [RationalScalar(polys[i].scale(inverse)) if i in polys else RationalScalar(zero) for i in range(len(vector))]


def _back_substitute(pivots: List[Tuple[int, SparseRow]], assignment: Dict[int, RationalScalar],
                     rhs: Optional[Dict[int, ParamPoly]] = None) -> Dict[int, RationalScalar]:
    for index in reversed(range(len(pivots))):
        col, row = pivots[index]
        total = None
        for c, v in row.items():
            if c == col or c not in assignment:
                continue
            term = assignment[c] * v
            total = term if total is None else total + term
        value = RationalScalar(rhs[index]) if rhs is not None and index in rhs else None
        if total is not None:
            value = -total if value is None else value - total
        if value is not None and value:
            assignment[col] = value / RationalScalar(row[col])
    return assignment


def nullspace(rows: Sequence[Mapping[int, Entry]], ncols: int, field: FieldDescriptor) -> List[List[RationalScalar]]:
    """Basis of {x : rows . x = 0}, one normalized vector per free column in increasing order."""
    pivots = echelon(rows)
    pivot_cols = {col for col, _ in pivots}
    if any(col >= ncols for col in pivot_cols):
        raise ValueError("row entry outside the declared number of columns")
    basis = []
    one = field.one()
    zero = field.zero()
    for free in range(ncols):
        if free in pivot_cols:
            continue
        assignment = _back_substitute(pivots, {free: one})
        basis.append(normalize_vector([assignment.get(i, zero) for i in range(ncols)]))
    logger.debug(f"Nullspace: {ncols} columns, rank {len(pivots)}, dimension {len(basis)}")
    return basis


def solve(rows: Sequence[Mapping[int, Entry]], rhs: Sequence[Entry], ncols: int,
          field: FieldDescriptor) -> Optional[List[RationalScalar]]:
    """One solution of rows . x = rhs (free unknowns set to zero), or None when inconsistent."""
    augmented = []
    for row, value in zip(rows, rhs):
        extended = dict(row)
        if value:
            extended[ncols] = value
        augmented.append(extended)
    pivots = echelon(augmented)
    if any(col == ncols for col, _ in pivots):
        return None
    reduced = [(col, {c: v for c, v in row.items() if c != ncols}) for col, row in pivots]
    # the augmented entries move to the right-hand side of each pivot row
    targets = {i: row[ncols] for i, (_, row) in enumerate(pivots) if ncols in row}
    assignment = _back_substitute(reduced, {}, targets)
    zero = field.zero()
    return [assignment.get(i, zero) for i in range(ncols)]


def span_contains(basis: Sequence[Sequence[RationalScalar]], vector: Sequence[RationalScalar]) -> bool:
    """Whether vector lies in the K-span of basis."""
    as_rows = [dict(enumerate(v)) for v in basis]
    return rank(as_rows) == rank(as_rows + [dict(enumerate(vector))])


def same_span(first: Sequence[Sequence[RationalScalar]], second: Sequence[Sequence[RationalScalar]]) -> bool:
    """Whether two families of vectors span the same subspace."""
    return all(span_contains(first, v) for v in second) and all(span_contains(second, v) for v in first)


def solve_mod_p(rows: Sequence[Mapping[int, int]], rhs: Sequence[int], p: int) -> Optional[Dict[int, int]]:
    """Sparse Gauss-Jordan over F_p; returns a solution with free unknowns zero, or None."""
    pivot_rows: Dict[int, Tuple[Dict[int, int], int]] = {}
    for row, value in zip(rows, rhs):
        current = {c: v % p for c, v in row.items() if v % p}
        target = value % p
        # pivot rows carry zeros in every other pivot column, so one pass suffices
        for col in [c for c in current if c in pivot_rows]:
            factor = current[col]
            pivot, pivot_value = pivot_rows[col]
            for c, v in pivot.items():
                updated = (current.get(c, 0) - factor * v) % p
                if updated:
                    current[c] = updated
                else:
                    current.pop(c, None)
            target = (target - factor * pivot_value) % p
        if not current:
            if target:
                return None
            continue
        col = min(current)
        inverse = pow(current[col], -1, p)
        current = {c: v * inverse % p for c, v in current.items()}
        target = target * inverse % p
        # keep earlier pivot rows free of the new pivot column
        for other_col, (other, other_value) in list(pivot_rows.items()):
            factor = other.get(col)
            if not factor:
                continue
            for c, v in current.items():
                updated = (other.get(c, 0) - factor * v) % p
                if updated:
                    other[c] = updated
                else:
                    other.pop(c, None)
            pivot_rows[other_col] = (other, (other_value - factor * target) % p)
        pivot_rows[col] = (current, target)
    return {col: value for col, (_, value) in pivot_rows.items() if value}


def dense_nullspace_mod_p(matrix: np.ndarray, p: int) -> np.ndarray:
    """Reduced-row-echelon nullspace over F_p; rows of the result form a basis."""
    work = np.array(matrix, dtype=np.int64) % p
    nrows, ncols = work.shape
    pivot_cols = []
    r = 0
    for c in range(ncols):
        candidates = np.nonzero(work[r:, c])[0] if r < nrows else []
        if len(candidates) == 0:
            continue
        k = r + int(candidates[0])
        work[[r, k]] = work[[k, r]]
        work[r] = (work[r] * pow(int(work[r, c]), -1, p)) % p
        for i in range(nrows):
            if i != r and work[i, c]:
                work[i] = (work[i] - work[i, c] * work[r]) % p
        pivot_cols.append(c)
        r += 1
        if r == nrows:
            break
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    basis = np.zeros((len(free_cols), ncols), dtype=np.int64)
    for k, f in enumerate(free_cols):
        basis[k, f] = 1
        for i, c in enumerate(pivot_cols):
            basis[k, c] = (-work[i, f]) % p
    return basis

"""Exact linear algebra over the rationals for relation/boundary matrices.

Rank uses fraction-free (Bareiss) elimination over Python integers after
clearing denominators row by row, so no rounding ever happens and the
intermediate entries stay divisions-of-determinants rather than blowing up.
Pivot policy, fixed for reproducibility: columns are eliminated left to
right in the given column order; the pivot row is the first remaining row
with a nonzero entry in the pivot column.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


def _int_rows(rows, ncols):
    out = []
    for row in rows:
        if isinstance(row, dict):
            dense = [Fraction(0)] * ncols
            for j, v in row.items():
                dense[j] = Fraction(v)
            row = dense
        else:
            dense = [Fraction(v) for v in row]
            row = dense
        den = lcm(*[f.denominator for f in row]) if row else 1
        ints = [int(f * den) for f in row]
        if any(ints):
            g = 0
            for v in ints:
                g = gcd(g, v)
            ints = [v // g for v in ints]
        out.append(ints)
    return out


def bareiss_rank(rows, ncols, *, pivot_columns=None):
    """Rank of the matrix, plus the list of pivot column indices.

    rows: iterables of Fraction/int, or {col: value} dicts.
    """
    m = [r for r in _int_rows(rows, ncols) if any(r)]
    if not m:
        return 0, []
    cols = list(pivot_columns) if pivot_columns is not None else list(range(ncols))
    prev = 1
    r = 0
    pivots = []
    for c in cols:
        piv = None
        for i in range(r, len(m)):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pc = m[r][c]
        for i in range(r + 1, len(m)):
            if not any(m[i]):
                continue
            mic = m[i][c]
            row = m[i]
            top = m[r]
            for j in range(ncols):
                row[j] = (pc * row[j] - mic * top[j]) // prev
        prev = pc
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return r, pivots


def nullspace(rows, ncols):
    """Basis of {w : M w = 0} as Fraction vectors (Gauss-Jordan over Q).

    Row/column processing order matches bareiss_rank's pivot policy; each
    basis vector is scaled to have integer entries with content 1 and first
    nonzero entry positive.
    """
    m = [[Fraction(v) for v in row] for row in _int_rows(rows, ncols)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free_cols = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free_cols:
        w = [Fraction(0)] * ncols
        w[fc] = Fraction(1)
        for row_i, pc in enumerate(pivots):
            w[pc] = -m[row_i][fc]
        den = lcm(*[f.denominator for f in w])
        ints = [f * den for f in w]
        g = 0
        for v in ints:
            g = gcd(g, int(v))
        if g:
            ints = [v / g for v in ints]
        lead = next(v for v in ints if v)
        if lead < 0:
            ints = [-v for v in ints]
        basis.append([Fraction(v) for v in ints])
    return basis


def in_row_span(rows, vector, ncols):
    """Exact membership of vector in the row span of rows."""
    base_rank, _ = bareiss_rank(list(rows), ncols)
    aug_rank, _ = bareiss_rank(list(rows) + [vector], ncols)
    return aug_rank == base_rank


def dump_triplets(rows, ncols, path):
    """Write a matrix in the debug text format: header then `i j value` lines,
    0-indexed, one entry per line, integers or exact fractions."""
    lines = [f"% triplet matrix {len(rows)} x {ncols}"]
    for i, row in enumerate(rows):
        items = row.items() if isinstance(row, dict) else enumerate(row)
        for j, v in items:
            if v:
                lines.append(f"{i} {j} {v}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")

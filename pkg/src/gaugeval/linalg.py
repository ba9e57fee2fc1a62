"""Exact linear algebra over an arbitrary field protocol.

Every routine takes a ``field`` object exposing ``zero``, ``one`` and
``is_zero(a)``; the matrix entries themselves must support the arithmetic
operators of the field (Fraction, the finite-field and quadratic-extension
elements of this package, and sympy FracElement all do).  Matrices are lists
of row lists.  Nothing here is numeric: no pivoting heuristics, no epsilons.
"""

from __future__ import annotations


def mat_copy(rows):
    return [list(r) for r in rows]


def identity(n, field):
    return [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]


def zero_vector(n, field):
    return [field.zero for _ in range(n)]


def mat_vec(rows, vec, field):
    out = []
    for r in rows:
        acc = field.zero
        for a, x in zip(r, vec):
            acc = acc + a * x
        out.append(acc)
    return out


def mat_mul(a, b, field):
    n, k = len(a), len(b)
    m = len(b[0]) if b else 0
    out = [[field.zero] * m for _ in range(n)]
    for i in range(n):
        for t in range(k):
            ait = a[i][t]
            if field.is_zero(ait):
                continue
            brow = b[t]
            orow = out[i]
            for j in range(m):
                orow[j] = orow[j] + ait * brow[j]
    return out


def transpose(rows):
    return [list(col) for col in zip(*rows)]


def rref(rows, field):
    """Reduced row echelon form.  Returns (new_rows, pivot_column_list)."""
    m = mat_copy(rows)
    if not m:
        return m, []
    nrows, ncols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if not field.is_zero(m[i][c]):
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = field.one / m[r][c]
        m[r] = [inv * a for a in m[r]]
        for i in range(nrows):
            if i != r and not field.is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(rows, field):
    return len(rref(rows, field)[1])


def row_space_basis(rows, field):
    m, pivots = rref(rows, field)
    return m[: len(pivots)]


def in_span(rows, vec, field):
    """Coefficients c with sum(c_i * rows[i]) == vec, or None."""
    if not rows:
        return [] if all(field.is_zero(x) for x in vec) else None
    aug = [list(r) for r in transpose(rows)]
    for i, x in enumerate(vec):
        aug[i].append(x)
    m, pivots = rref(aug, field)
    ncols = len(rows)
    if ncols in pivots:
        return None
    coeffs = [field.zero] * ncols
    for r, c in enumerate(pivots):
        coeffs[c] = m[r][ncols]
    return coeffs


def solve(rows, rhs, field):
    """One solution x of rows @ x = rhs, or None if inconsistent."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, pivots = rref(aug, field)
    ncols = len(rows[0]) if rows else 0
    if ncols in pivots:
        return None
    x = [field.zero] * ncols
    for r, c in enumerate(pivots):
        x[c] = m[r][ncols]
    return x


def kernel_basis(rows, field):
    """Basis of the right kernel {x : rows @ x = 0}."""
    if not rows:
        return []
    ncols = len(rows[0])
    m, pivots = rref(rows, field)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        v = [field.zero] * ncols
        v[f] = field.one
        for r, c in enumerate(pivots):
            v[c] = field.zero - m[r][f]
        basis.append(v)
    return basis


def invert(rows, field):
    """Inverse of a square matrix, or None if singular."""
    n = len(rows)
    aug = [list(r) + list(e) for r, e in zip(rows, identity(n, field))]
    m, pivots = rref(aug, field)
    if pivots != list(range(n)):
        return None
    return [r[n:] for r in m]


def intersect_row_spaces(rows_a, rows_b, field):
    """Basis of the intersection of two row spaces inside the same ambient."""
    if not rows_a or not rows_b:
        return []
    stacked = [list(r) for r in rows_a] + [list(r) for r in rows_b]
    combos = kernel_basis(transpose(stacked), field)
    na = len(rows_a)
    vectors = []
    for c in combos:
        v = [field.zero] * len(rows_a[0])
        for coeff, row in zip(c[:na], rows_a):
            if not field.is_zero(coeff):
                v = [x + coeff * y for x, y in zip(v, row)]
        vectors.append(v)
    return row_space_basis(vectors, field)

def charpoly(rows, field):
    """Monic characteristic polynomial of a square matrix, coefficients low
    degree first.  Hessenberg reduction by similarity, then the leading-block
    recurrence; uses field operations only, so it is exact over any field."""
    n = len(rows)
    h = [[field.coerce(c) for c in r] for r in rows]
    for j in range(n - 2):
        piv = None
        for r in range(j + 1, n):
            if not field.is_zero(h[r][j]):
                piv = r
                break
        if piv is None:
            continue
        if piv != j + 1:
            h[j + 1], h[piv] = h[piv], h[j + 1]
            for r in range(n):
                h[r][j + 1], h[r][piv] = h[r][piv], h[r][j + 1]
        inv = field.one / h[j + 1][j]
        for r in range(j + 2, n):
            if field.is_zero(h[r][j]):
                continue
            f = h[r][j] * inv
            for c in range(j, n):
                h[r][c] = h[r][c] - f * h[j + 1][c]
            # inverse column operation keeps the matrix similar
            for rr in range(n):
                h[rr][j + 1] = h[rr][j + 1] + f * h[rr][r]
    polys = [[field.one]]
    for k in range(1, n + 1):
        prev = polys[k - 1]
        shifted = [field.zero] + list(prev)
        scaled = [h[k - 1][k - 1] * c for c in prev] + [field.zero]
        cur = [a - b for a, b in zip(shifted, scaled)]
        beta = field.one
        for s in range(1, k):
            beta = beta * h[k - s][k - s - 1]
            if field.is_zero(beta):
                break
            coeff = h[k - 1 - s][k - 1] * beta
            if field.is_zero(coeff):
                continue
            for t, c in enumerate(polys[k - 1 - s]):
                cur[t] = cur[t] - coeff * c
        polys.append(cur)
    return polys[n]

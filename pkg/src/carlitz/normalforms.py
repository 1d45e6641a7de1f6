"""Canonical forms of matrices over k[t] and finite t-modules.

Matrices are lists of rows of :class:`~carlitz.poly.Poly`.  Columns are the
module generators, so the Hermite form uses column operations: permuting
the input columns does not change the form.  Everything here is exact; the
only normalization is scaling by units of k[t], i.e. by nonzero constants.
"""

from .poly import Poly, poly_gcd


def _eye(field, n):
    return [
        [Poly.one(field) if i == j else Poly.zero(field) for j in range(n)]
        for i in range(n)
    ]


def _col_addmul(M, dst, src, f):
    """column dst += f * column src."""
    for row in M:
        row[dst] = row[dst] + f * row[src]


def _col_swap(M, a, b):
    for row in M:
        row[a], row[b] = row[b], row[a]


def _col_scale(M, j, c):
    for row in M:
        row[j] = row[j] * c


def hermite_form(A):
    """Column Hermite normal form.

    Returns (H, V) with V unimodular and H = A * V in column echelon form:
    pivot rows strictly increase column by column, pivots are monic, and
    every entry left of a pivot in its row has smaller degree.  H depends
    only on the column module of A, so reordering generators leaves it
    unchanged.
    """
    if not A:
        return [], []
    field = A[0][0].field
    m, n = len(A), len(A[0])
    H = [list(row) for row in A]
    V = _eye(field, n)

    def apply(fn, *args):
        fn(H, *args)
        fn(V, *args)

    fixed = 0
    for r in range(m):
        if fixed == n:
            break
        # Euclidean elimination among columns fixed..n-1 at row r
        while True:
            live = [j for j in range(fixed, n) if not H[r][j].is_zero]
            if len(live) <= 1:
                break
            live.sort(key=lambda j: H[r][j].degree)
            j0 = live[0]
            for j in live[1:]:
                q = H[r][j] // H[r][j0]
                apply(_col_addmul, j, j0, -q)
        live = [j for j in range(fixed, n) if not H[r][j].is_zero]
        if not live:
            continue
        j0 = live[0]
        if j0 != fixed:
            apply(_col_swap, j0, fixed)
        lead = H[r][fixed].lead
        if lead != 1:
            apply(_col_scale, fixed, Poly.const(field, field.inv(lead)))
        # reduce the entries of earlier pivot columns in this row
        for j in range(fixed):
            if H[r][j].degree >= H[r][fixed].degree:
                q = H[r][j] // H[r][fixed]
                apply(_col_addmul, j, fixed, -q)
        fixed += 1
    return H, V


def smith_form(A):
    """Smith normal form.

    Returns (D, U, V) with U, V unimodular, U*A*V = D diagonal with monic
    invariant factors d_1 | d_2 | ... .
    """
    field = A[0][0].field
    m, n = len(A), len(A[0])
    D = [list(row) for row in A]
    U = _eye(field, m)
    V = _eye(field, n)

    def row_addmul(dst, src, f):
        for M in (D, U):
            M[dst] = [a + f * b for a, b in zip(M[dst], M[src])]

    def row_swap(a, b):
        for M in (D, U):
            M[a], M[b] = M[b], M[a]

    def row_scale(i, c):
        for M in (D, U):
            M[i] = [a * c for a in M[i]]

    def col_addmul(dst, src, f):
        _col_addmul(D, dst, src, f)
        _col_addmul(V, dst, src, f)

    def col_swap(a, b):
        _col_swap(D, a, b)
        _col_swap(V, a, b)

    r = min(m, n)
    for k in range(r):
        while True:
            # move a minimal-degree nonzero entry of the trailing block to (k, k)
            best = None
            for i in range(k, m):
                for j in range(k, n):
                    if not D[i][j].is_zero:
                        if best is None or D[i][j].degree < D[best[0]][best[1]].degree:
                            best = (i, j)
            if best is None:
                break
            i, j = best
            if i != k:
                row_swap(i, k)
            if j != k:
                col_swap(j, k)
            dirty = False
            for i in range(k + 1, m):
                if not D[i][k].is_zero:
                    q = D[i][k] // D[k][k]
                    row_addmul(i, k, -q)
                    if not D[i][k].is_zero:
                        dirty = True
            for j in range(k + 1, n):
                if not D[k][j].is_zero:
                    q = D[k][j] // D[k][k]
                    col_addmul(j, k, -q)
                    if not D[k][j].is_zero:
                        dirty = True
            if dirty:
                continue
            # divisibility: d_k must divide everything below and right
            offender = None
            for i in range(k + 1, m):
                for j in range(k + 1, n):
                    if not (D[i][j] % D[k][k]).is_zero:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_addmul(k, offender, Poly.one(field))
    for k in range(r):
        if not D[k][k].is_zero and D[k][k].lead != 1:
            row_scale(k, Poly.const(field, field.inv(D[k][k].lead)))
    return D, U, V


def invariant_factors(A):
    D, _, _ = smith_form(A)
    out = []
    for k in range(min(len(D), len(D[0]))):
        d = D[k][k]
        if d.is_zero:
            break
        if d.degree > 0 or out:
            out.append(d)
    return [d for d in out if d.degree > 0]


def bareiss_det(A):
    """Fraction-free determinant of a square matrix over k[t]."""
    n = len(A)
    if n == 0:
        return None
    field = A[0][0].field
    M = [list(row) for row in A]
    sign = 1
    prev = Poly.one(field)
    for k in range(n - 1):
        if M[k][k].is_zero:
            sel = next((i for i in range(k + 1, n) if not M[i][k].is_zero), None)
            if sel is None:
                return Poly.zero(field)
            M[k], M[sel] = M[sel], M[k]
            sign = field.neg(sign)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                quo, rem = divmod(num, prev)
                if not rem.is_zero:
                    raise ArithmeticError("Bareiss exact division failed")
                M[i][j] = quo
        prev = M[k][k]
    d = M[n - 1][n - 1]
    if sign != 1:
        d = d * sign
    return d


def is_unimodular(A):
    d = bareiss_det(A)
    return d is not None and d.degree == 0 and not d.is_zero


# -- characteristic polynomials and finite t-modules -------------------------


def charpoly(field, rows):
    """det(t*I - M) for a square matrix over the field, via Hessenberg form."""
    F = field
    n = len(rows)
    if n == 0:
        return Poly.one(F)
    H = [list(r) for r in rows]
    for c in range(n - 2):
        sel = next((i for i in range(c + 1, n) if H[i][c]), None)
        if sel is None:
            continue
        if sel != c + 1:
            H[c + 1], H[sel] = H[sel], H[c + 1]
            for row in H:
                row[c + 1], row[sel] = row[sel], row[c + 1]
        inv = F.inv(H[c + 1][c])
        for i in range(c + 2, n):
            f = F.mul(H[i][c], inv)
            if f:
                H[i] = [F.sub(a, F.mul(f, b)) for a, b in zip(H[i], H[c + 1])]
                for row in H:
                    row[c + 1] = F.add(row[c + 1], F.mul(f, row[i]))
    # Hessenberg charpoly recurrence
    t = Poly.t(F)
    ps = [Poly.one(F)]
    for m in range(1, n + 1):
        pm = (t - Poly.const(F, H[m - 1][m - 1])) * ps[m - 1]
        run = 1
        for i in range(m - 1, 0, -1):
            run = F.mul(run, H[i][i - 1])
            coef = F.mul(H[i - 1][m - 1], run)
            if coef:
                pm = pm - Poly.const(F, coef) * ps[i - 1]
        ps.append(pm)
    return ps[n]


def companion(f):
    """Companion matrix of a monic polynomial."""
    F = f.field
    n = f.degree
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    for i in range(n):
        rows[i][n - 1] = F.neg(f[i])
    return rows


class FiniteTModule:
    """A finite k[t]-module given by the action of t on a k-basis.

    The module is k[t]^N / (t*I - T) for the stored N x N matrix T, so its
    k-dimension is N and its Fitting generator has degree N.
    """

    def __init__(self, field, tmat):
        self.field = field
        self.tmat = tuple(tuple(r) for r in tmat)
        n = len(self.tmat)
        if any(len(r) != n for r in self.tmat):
            raise ValueError("t-action matrix must be square")

    @property
    def dim(self):
        return len(self.tmat)

    def fitting_generator(self):
        """The monic generator |M| of the Fitting ideal: det(t*I - T)."""
        return charpoly(self.field, self.tmat)

    def t_minus_T(self):
        F = self.field
        n = self.dim
        t = Poly.t(F)
        return [
            [
                (t if i == j else Poly.zero(F)) - Poly.const(F, self.tmat[i][j])
                for j in range(n)
            ]
            for i in range(n)
        ]

    def invariant_factors(self):
        if self.dim == 0:
            return []
        return invariant_factors(self.t_minus_T())

    @staticmethod
    def direct_sum(field, polys):
        """The module ⊕ k[t]/(f_i) for monic f_i."""
        blocks = [companion(f.monic()) for f in polys if f.degree > 0]
        n = sum(len(b) for b in blocks)
        rows = [[0] * n for _ in range(n)]
        off = 0
        for b in blocks:
            m = len(b)
            for i in range(m):
                for j in range(m):
                    rows[off + i][off + j] = b[i][j]
            off += m
        return FiniteTModule(field, rows)


def fitting_generator(module):
    return module.fitting_generator()

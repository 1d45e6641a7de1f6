"""Exact linear algebra over finite fields.

Vectors are tuples of packed field elements.  Systems over F_2 are solved
on bit-packed integer rows; other fields use dense list rows.  All
eliminations are deterministic (first usable pivot), so solutions and
kernel bases are reproducible and the canonical particular solution of an
underdetermined system is the reduced-echelon one with free variables set
to zero.
"""


def _rref_bits(rows, npivot):
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(npivot):
        mask = 1 << c
        sel = None
        for i in range(r, nrows):
            if rows[i] & mask:
                sel = i
                break
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        pr = rows[r]
        for i in range(nrows):
            if i != r and (rows[i] & mask):
                rows[i] ^= pr
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def _rref_generic(field, rows, npivot):
    pivots = []
    r = 0
    nrows = len(rows)
    width = len(rows[0]) if rows else 0
    for c in range(npivot):
        sel = None
        for i in range(r, nrows):
            if rows[i][c]:
                sel = i
                break
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        inv = field.inv(rows[r][c])
        if inv != 1:
            rows[r] = [field.mul(inv, x) for x in rows[r]]
        pr = rows[r]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [
                    field.sub(rows[i][j], field.mul(f, pr[j])) for j in range(width)
                ]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def _pack_row(vec):
    v = 0
    for i, c in enumerate(vec):
        if c:
            v |= 1 << i
    return v


def _unpack_row(bits, n):
    return tuple((bits >> i) & 1 for i in range(n))


def solve_affine(field, arows, ncols, rhs_list):
    """Solve A x = b for each b in rhs_list.

    ``arows`` holds the equations (each a length-``ncols`` vector over the
    field), ``rhs_list`` the right-hand sides (each of length len(arows)).
    Returns (solutions, kernel_basis) where solutions[i] is the canonical
    solution tuple or None when that system is inconsistent.
    """
    m = len(arows)
    k = len(rhs_list)
    if field.q == 2:
        rows = []
        for i in range(m):
            v = _pack_row(arows[i])
            for j in range(k):
                if rhs_list[j][i]:
                    v |= 1 << (ncols + j)
            rows.append(v)
        pivots = _rref_bits(rows, ncols)
        rank = len(pivots)
        # inconsistency: a row that is zero on solution columns, nonzero beyond
        solmask = (1 << ncols) - 1
        bad = 0
        for i in range(rank, m):
            if rows[i] and not (rows[i] & solmask):
                bad |= rows[i] >> ncols
        sols = []
        for j in range(k):
            if (bad >> j) & 1:
                sols.append(None)
                continue
            x = [0] * ncols
            for r, c in enumerate(pivots):
                x[c] = (rows[r] >> (ncols + j)) & 1
            sols.append(tuple(x))
        kernel = _kernel_from_rref_bits(rows, pivots, ncols)
        return sols, kernel
    rows = [list(arows[i]) + [rhs_list[j][i] for j in range(k)] for i in range(m)]
    pivots = _rref_generic(field, rows, ncols)
    rank = len(pivots)
    sols = []
    bad = [False] * k
    for i in range(rank, m):
        if any(rows[i][:ncols]):
            continue
        for j in range(k):
            if rows[i][ncols + j]:
                bad[j] = True
    for j in range(k):
        if bad[j]:
            sols.append(None)
            continue
        x = [0] * ncols
        for r, c in enumerate(pivots):
            x[c] = rows[r][ncols + j]
        sols.append(tuple(x))
    kernel = _kernel_from_rref_generic(field, rows, pivots, ncols)
    return sols, kernel


def _kernel_from_rref_bits(rows, pivots, ncols):
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        x = [0] * ncols
        x[fc] = 1
        fmask = 1 << fc
        for r, c in enumerate(pivots):
            if rows[r] & fmask:
                x[c] = 1
        basis.append(tuple(x))
    return basis


def _kernel_from_rref_generic(field, rows, pivots, ncols):
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        x = [0] * ncols
        x[fc] = 1
        for r, c in enumerate(pivots):
            if rows[r][fc]:
                x[c] = field.neg(rows[r][fc])
        basis.append(tuple(x))
    return basis


def kernel_basis(field, arows, ncols):
    """Basis of the right kernel of the system rows."""
    _, kern = solve_affine(field, arows, ncols, [])
    return kern


class AffineSolver:
    """A factorized linear system for repeated solves against new rhs.

    Eliminates [A | I] once; afterwards each solve costs one transform
    application.  Solutions are the canonical reduced-echelon ones.
    """

    def __init__(self, field, arows, ncols):
        self.field = field
        self.ncols = ncols
        self.m = len(arows)
        if field.q == 2:
            rows = [_pack_row(arows[i]) | (1 << (ncols + i)) for i in range(self.m)]
            self.pivots = _rref_bits(rows, ncols)
            self.rows = rows
            self.solmask = (1 << ncols) - 1
        else:
            rows = []
            for i in range(self.m):
                ident = [0] * self.m
                ident[i] = 1
                rows.append(list(arows[i]) + ident)
            self.pivots = _rref_generic(field, rows, ncols)
            self.rows = rows

    def solve(self, b):
        """Canonical solution of A x = b, or None when inconsistent."""
        F = self.field
        rank = len(self.pivots)
        if F.q == 2:
            bmask = _pack_row(b)
            x = [0] * self.ncols
            for r, c in enumerate(self.pivots):
                trow = self.rows[r] >> self.ncols
                x[c] = (trow & bmask).bit_count() & 1
            for i in range(rank, self.m):
                row = self.rows[i]
                if row & self.solmask:
                    continue
                if ((row >> self.ncols) & bmask).bit_count() & 1:
                    return None
            return tuple(x)
        x = [0] * self.ncols
        for r, c in enumerate(self.pivots):
            acc = 0
            for i in range(self.m):
                ti = self.rows[r][self.ncols + i]
                if ti and b[i]:
                    acc = F.add(acc, F.mul(ti, b[i]))
            x[c] = acc
        for i in range(rank, self.m):
            if any(self.rows[i][:self.ncols]):
                continue
            acc = 0
            for jj in range(self.m):
                ti = self.rows[i][self.ncols + jj]
                if ti and b[jj]:
                    acc = F.add(acc, F.mul(ti, b[jj]))
            if acc:
                return None
        return tuple(x)

    def solve_many(self, bs):
        return [self.solve(b) for b in bs]


def row_space_rank(field, vectors, ncols):
    if not vectors:
        return 0
    if field.q == 2:
        rows = [_pack_row(v) for v in vectors]
        return len(_rref_bits(rows, ncols))
    rows = [list(v) for v in vectors]
    return len(_rref_generic(field, rows, ncols))


class ColumnSolver:
    """Column-major linear algebra: solve sum x_j col_j = b and kernels.

    Built from packed columns (ints over F_2, tuples otherwise), which is
    the natural layout when columns come from series coefficients.  The
    eliminated [columns | identity] matrix is kept, so each solve is one
    reduction pass.
    """

    def __init__(self, field, cols, nrows):
        self.field = field
        self.nrows = nrows
        self.ncols = len(cols)
        if field.q == 2:
            rows = [cols[j] | (1 << (nrows + j)) for j in range(self.ncols)]
            self.pivots = _rref_bits(rows, nrows)
            self.rows = rows
            self.datamask = (1 << nrows) - 1
        else:
            rows = []
            for j in range(self.ncols):
                ident = [0] * self.ncols
                ident[j] = 1
                rows.append(list(cols[j]) + ident)
            self.pivots = _rref_generic(field, rows, nrows)
            self.rows = rows

    @property
    def rank(self):
        return len(self.pivots)

    def kernel(self):
        """Label-coefficient tuples spanning the null space of the columns."""
        out = []
        if self.field.q == 2:
            for i in range(self.rank, self.ncols):
                comb = self.rows[i] >> self.nrows
                out.append(_unpack_row(comb, self.ncols))
        else:
            for i in range(self.rank, self.ncols):
                out.append(tuple(self.rows[i][self.nrows :]))
        return out

    def solve(self, b):
        """Coefficients x with sum x_j col_j = b, or None.

        ``b`` is packed like a column.  The solution is the echelon-
        canonical one determined by the elimination order.
        """
        F = self.field
        if F.q == 2:
            acc = 0
            for r, c in enumerate(self.pivots):
                if (b >> c) & 1:
                    b ^= self.rows[r] & self.datamask
                    acc ^= self.rows[r] >> self.nrows
            if b:
                return None
            return _unpack_row(acc, self.ncols)
        b = list(b)
        acc = [0] * self.ncols
        for r, c in enumerate(self.pivots):
            if b[c]:
                f = F.mul(b[c], F.inv(self.rows[r][c]))
                for i in range(self.nrows):
                    b[i] = F.sub(b[i], F.mul(f, self.rows[r][i]))
                for i in range(self.ncols):
                    acc[i] = F.add(acc[i], F.mul(f, self.rows[r][self.nrows + i]))
        if any(b):
            return None
        return tuple(acc)


class SpanReducer:
    """Incremental row-space membership and reduction over a field.

    Maintains a reduced echelon family of vectors.  ``reduce`` returns the
    residue of a vector modulo the span (zero tuple iff it is a member),
    ``add`` extends the span.  Deterministic pivot positions make quotient
    computations reproducible.
    """

    def __init__(self, field, ncols):
        self.field = field
        self.ncols = ncols
        self.pivot_rows = {}  # pivot column -> row

    def reduce(self, vec):
        F = self.field
        if F.q == 2:
            v = _pack_row(vec)
            for c in sorted(self.pivot_rows):
                if (v >> c) & 1:
                    v ^= self.pivot_rows[c]
            return _unpack_row(v, self.ncols)
        v = list(vec)
        for c in sorted(self.pivot_rows):
            if v[c]:
                f = v[c]
                row = self.pivot_rows[c]
                v = [F.sub(v[j], F.mul(f, row[j])) for j in range(self.ncols)]
        return tuple(v)

    def add(self, vec):
        """Reduce and, if independent, insert.  Returns True if the span grew."""
        F = self.field
        red = self.reduce(vec)
        if not any(red):
            return False
        if F.q == 2:
            v = _pack_row(red)
            c = (v & -v).bit_length() - 1
            for pc, row in list(self.pivot_rows.items()):
                if (row >> c) & 1:
                    self.pivot_rows[pc] = row ^ v
            self.pivot_rows[c] = v
        else:
            c = next(i for i, x in enumerate(red) if x)
            inv = F.inv(red[c])
            red = tuple(F.mul(inv, x) for x in red)
            for pc, row in list(self.pivot_rows.items()):
                if row[c]:
                    f = row[c]
                    self.pivot_rows[pc] = tuple(
                        F.sub(row[j], F.mul(f, red[j])) for j in range(self.ncols)
                    )
            self.pivot_rows[c] = red
        return True

    @property
    def rank(self):
        return len(self.pivot_rows)

    def contains(self, vec):
        return not any(self.reduce(vec))

    def quotient_coords(self):
        """Columns forming a basis of the quotient space (non-pivot columns)."""
        return [c for c in range(self.ncols) if c not in self.pivot_rows]

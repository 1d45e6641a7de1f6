"""The exponential and logarithm of a Drinfeld module.

Coefficients are kept as exact rational functions and only embedded into a
local Laurent field at evaluation time, so no precision is lost in the
defining recursion.  Evaluation, the period product, and the window-based
preimage solver all work over an abstract :class:`LocalEmbedding`, which is
the uniformizer data ``t = c * u**(-e)`` of one completion together with
its residue field.
"""

from fractions import Fraction

from .errors import DivergenceError, PrecisionError
from .laurent import Laurent
from .linalg import solve_affine
from .poly import Poly, RatFunc


class LocalEmbedding:
    """A local field F((u)) in which t embeds as the exact monomial c*u**(-e).

    F is the residue field (an extension of the scalar field k), e the
    ramification index.  Embedding a polynomial or rational function in t
    is exact, so valuations of embedded k(t) data are exact integers.
    """

    def __init__(self, res_field, scalar_field, c, e):
        self.res_field = res_field
        self.scalar_field = scalar_field
        self.c = c
        self.e = e
        if e < 1:
            raise ValueError("ramification index must be positive")
        if c == 0:
            raise ValueError("uniformizer constant must be a unit")

    @property
    def res_deg(self):
        d, F = 1, self.res_field
        while F != self.scalar_field:
            d *= F.deg
            F = F.base
            if F is None:
                raise ValueError("residue field does not contain the scalar field")
        return d

    def poly(self, f, prec):
        """Embed f(t) = sum f_i t^i as sum f_i c^i u^(-e*i)."""
        F = self.res_field
        cmap = {}
        for i, co in enumerate(f.coeffs):
            if co:
                cmap[-self.e * i] = F.mul(co, F.pow(self.c, i))
        return Laurent.from_coeff_map(F, cmap, prec)

    def val_poly(self, f):
        if f.is_zero:
            return None
        return -self.e * f.degree

    def ratfunc(self, r, prec):
        if r.is_zero:
            return Laurent.zero(self.res_field, prec)
        rel = prec - self.val_rat(r)
        if rel < 0:
            return Laurent.zero(self.res_field, prec)
        num = self.poly(r.num, -self.e * r.num.degree + rel)
        den = self.poly(r.den, -self.e * r.den.degree + rel)
        return (num * den.inverse()).truncate(prec)

    def val_rat(self, r):
        if r.is_zero:
            return None
        return self.e * (r.den.degree - r.num.degree)

    def t_series(self, prec):
        return Laurent.monomial(self.res_field, self.c, -self.e, prec)

    # -- residue coordinates over the scalar field -----------------------

    def res_coords(self, a):
        """Coordinates of a residue-field element over the scalar field."""
        F = self.res_field
        k = self.scalar_field
        if F == k:
            return (a,)
        if F.base == k:
            return F.digits(a)
        raise ValueError("towers deeper than one extension are not supported here")

    def res_from_coords(self, coords):
        F = self.res_field
        if F == self.scalar_field:
            return coords[0]
        return F.from_digits(tuple(coords))

    def res_basis(self):
        """The power basis g^b of the residue field over the scalars."""
        F = self.res_field
        if F == self.scalar_field:
            return (1,)
        return tuple(F.from_digits((0,) * b + (1,)) for b in range(F.deg))


class ExpCoeffs:
    """Exact coefficients e_i of exp, with e_0 = 1.

    The list extends on demand through :meth:`ensure`; extension only
    appends, so shared instances stay valid.
    """

    kind = "exp"

    def __init__(self, module, coeffs):
        self.module = module
        self._coeffs = coeffs
        self._threshold = None
        self._vbounds = [0]

    @property
    def imax(self):
        return len(self._coeffs) - 1

    def __getitem__(self, i):
        return self._coeffs[i]

    def known(self):
        return list(self._coeffs)

    def ensure(self, imax):
        while self.imax < imax:
            self._extend_one()
        return self

    def _extend_one(self):
        D = self.module
        field = D.field
        q = field.q
        i = len(self._coeffs)
        t = Poly.t(field)
        den = Poly.t_pow(field, q**i) - t
        acc = RatFunc(Poly.zero(field))
        for j in range(1, min(i, D.rank) + 1):
            acc = acc + RatFunc(D.coeffs[j - 1]) * self._coeffs[i - j] ** (q**j)
        self._coeffs.append(acc / RatFunc(den))

    def val_bound(self, i):
        """Cheap lower bound for val_t(e_i), exact for rank one.

        Computed by the ultrametric min-plus version of the defining
        recursion, so no large coefficient is ever materialized just to
        read off a valuation.
        """
        D = self.module
        q = D.field.q
        while len(self._vbounds) <= i:
            m = len(self._vbounds)
            cands = []
            for j in range(1, min(m, D.rank) + 1):
                a = D.coeffs[j - 1]
                if a.is_zero:
                    continue
                cands.append(-a.degree + q**j * self._vbounds[m - j])
            if not cands:
                # rank 0: e_m = 0 for m >= 1
                self._vbounds.append(None)
            else:
                self._vbounds.append(min(cands) + q**m)
        return self._vbounds[i]

    def serialize(self):
        from .poly import format_poly

        return [
            {"num": format_poly(c.num), "den": format_poly(c.den)}
            for c in self._coeffs
        ]


class LogCoeffs(ExpCoeffs):
    kind = "log"

    def __init__(self, module, exp_coeffs, coeffs):
        super().__init__(module, coeffs)
        self.exp_coeffs = exp_coeffs

    def _extend_one(self):
        q = self.module.field.q
        m = len(self._coeffs)
        self.exp_coeffs.ensure(m)
        acc = RatFunc(Poly.zero(self.module.field))
        for i in range(m):
            acc = acc + self._coeffs[i] * self.exp_coeffs[m - i] ** (q**i)
        self._coeffs.append(-acc)

    def val_bound(self, i):
        q = self.module.field.q
        while len(self._vbounds) <= i:
            m = len(self._vbounds)
            cands = []
            for j in range(m):
                eb = self.exp_coeffs.val_bound(m - j)
                lb = self._vbounds[j]
                if eb is None or lb is None:
                    continue
                cands.append(lb + q**j * eb)
            self._vbounds.append(min(cands) if cands else None)
        return self._vbounds[i]


def exp_coefficients(module, imax):
    """Coefficients of the unique exponential with e_0 = 1.

    They satisfy e_i * (t^(q^i) - t) = sum over j of a_j * e_{i-j}^(q^j),
    which pins them down inductively from the module coefficients.
    """
    if imax < 0:
        raise ValueError("imax must be nonnegative")
    E = ExpCoeffs(module, [RatFunc(Poly.one(module.field))])
    return E.ensure(imax)


def log_coefficients(exp_coeffs, imax):
    """Coefficients of the compositional inverse among q-power series."""
    L = LogCoeffs(
        exp_coeffs.module, exp_coeffs, [RatFunc(Poly.one(exp_coeffs.module.field))]
    )
    return L.ensure(imax)


def compose_qseries(field, q, outer, inner, mmax):
    """Coefficients of outer(inner(X)) among q-power series, up to X^(q^mmax)."""
    out = []
    for m in range(mmax + 1):
        acc = RatFunc(Poly.zero(field))
        for i in range(m + 1):
            acc = acc + outer[i] * inner[m - i] ** (q**i)
        out.append(acc)
    return out


def _probe_depth(exp_coeffs):
    """How many coefficients the slope probe may afford to materialize.

    Degree growth of the denominators is predicted by the recursion before
    anything is computed; the probe stops where exact arithmetic would get
    expensive.  The slope maximum of an entire exponential is attained
    early (the later slopes -val(e_i)/(q^i - 1) decay to -infinity), so a
    bounded probe with a decay margin is reliable for the small-rank
    modules in scope.
    """
    D = exp_coeffs.module
    field = D.field
    q = field.q
    budget = 500_000 if q == 2 else (200_000 if field.base is None else 2_000)
    degs = [0]
    i = 0
    while i < 10:
        i += 1
        cand = max(
            (q**j * degs[i - j] + D.coeffs[j - 1].degree)
            for j in range(1, min(i, D.rank) + 1)
        ) + q**i
        if cand > budget and i > 2:
            return i - 1
        degs.append(cand)
    return i


def convergence_threshold(exp_coeffs, probe=None):
    """Largest t-valuation slope below which exp's terms strictly increase.

    For val_t(x) > the returned Fraction, val(e_i x^(q^i)) is strictly
    increasing in i, so exp converges with leading term x and is injective
    on that ball.  Rank 0 returns None (the series is just X).
    """
    D = exp_coeffs.module
    if D.rank == 0:
        return None
    if exp_coeffs._threshold is not None and probe is None:
        return exp_coeffs._threshold
    q = D.field.q
    exp_coeffs.ensure(probe if probe is not None else _probe_depth(exp_coeffs))
    best = None
    for i in range(1, exp_coeffs.imax + 1):
        ei = exp_coeffs[i]
        if ei.is_zero:
            continue
        bound = Fraction(-ei.valuation_at_infinity(), q**i - 1)
        if best is None or bound > best:
            best = bound
    if probe is None:
        exp_coeffs._threshold = best
    return best


def ball_start(emb, exp_coeffs):
    """Smallest integer s with exp an isomorphism of {val_u >= s} onto itself."""
    th = convergence_threshold(exp_coeffs)
    if th is None:
        return None
    s = (th.numerator * emb.e) // th.denominator + 1  # floor(e*th) + 1
    while not _ball_ok(emb, exp_coeffs, s):
        s += 1
    return s


def _ball_ok(emb, exp_coeffs, s):
    q = exp_coeffs.module.field.q
    for i in range(1, exp_coeffs.imax + 1):
        v = emb.val_rat(exp_coeffs[i])
        if v is not None and v + (q**i - 1) * s <= 0:
            return False
    return True


def required_imax(emb, exp_coeffs, val_lam, prec):
    """Indices needed so every omitted term of exp lies beyond prec.

    The scan works on the cheap valuation lower bounds, so deciding that a
    term is past the precision never materializes its exact coefficient;
    the bound grows superexponentially because exp is entire, and a margin
    of consecutive past indices ends the scan.
    """
    q = exp_coeffs.module.field.q
    margin = max(4, exp_coeffs.module.rank + 2)
    i = 0
    last_needed = 0
    past = 0
    while past < margin:
        i += 1
        vb = exp_coeffs.val_bound(i)
        tv = None if vb is None else emb.e * vb + q**i * val_lam
        if tv is not None and tv <= prec:
            last_needed = i
            past = 0
        else:
            past += 1
        if i > 4000:
            raise PrecisionError("exponential term index bound exploded")
    return last_needed


def exp_eval(emb, exp_coeffs, lam, prec, imax=None):
    """Evaluate exp at a local element, correct to O(u^(prec+1)).

    ``imax`` limits the coefficients in use; when the available indices
    cannot certify the requested precision a :class:`PrecisionError`
    reports how many would be needed.
    """
    q = exp_coeffs.module.field.q
    if lam.is_zero_to_prec:
        return Laurent.zero(
            emb.res_field, min(prec, _exp_err_prec(emb, exp_coeffs, lam.prec, q))
        )
    vlam = lam.valuation()
    need = required_imax(emb, exp_coeffs, vlam, prec)
    if imax is not None and need > imax:
        raise PrecisionError(
            f"exp needs coefficients through i={need} for precision O(u^{prec + 1}),"
            f" only i<={imax} allowed"
        )
    exp_coeffs.ensure(need)
    out_prec = min(prec, _exp_err_prec(emb, exp_coeffs, lam.prec, q))
    acc = lam.truncate(out_prec)
    for i in range(1, need + 1):
        ei = exp_coeffs[i]
        if ei.is_zero:
            continue
        term = emb.ratfunc(ei, out_prec - q**i * vlam) * lam.frobenius(q**i)
        acc = acc + term.truncate(out_prec)
    return acc.truncate(out_prec)


def _exp_err_prec(emb, exp_coeffs, lam_prec, q):
    # error of exp from the argument's own O-term: min_i val(e_i) + q^i*(P+1)
    best = lam_prec
    i, past = 0, 0
    while past < 4 and i < 200:
        i += 1
        vb = exp_coeffs.val_bound(i)
        if vb is None:
            past += 1
            continue
        cand = emb.e * vb + q**i * (lam_prec + 1) - 1
        if cand < best:
            best = cand
            past = 0
        else:
            past += 1
    return best


def log_eval(emb, log_coeffs, u, prec):
    """Evaluate the logarithm; raises DivergenceError outside its ball."""
    q = log_coeffs.module.field.q
    if u.is_zero_to_prec:
        return Laurent.zero(emb.res_field, min(prec, u.prec))
    vu = u.valuation()
    th = convergence_threshold(log_coeffs.exp_coeffs)
    if th is not None and Fraction(vu) <= th * emb.e:
        raise DivergenceError(
            f"log diverges: val(u) = {vu} is not above the threshold {th} * e = {th * emb.e}"
        )
    acc = u.truncate(prec)
    i = 0
    past = 0
    while past < 4:
        i += 1
        vb = log_coeffs.val_bound(i)
        tv = None if vb is None else emb.e * vb + q**i * vu
        if tv is not None and tv <= prec:
            log_coeffs.ensure(i)
            li = log_coeffs[i]
            if not li.is_zero:
                term = emb.ratfunc(li, prec - q**i * vu) * u.frobenius(q**i)
                acc = acc + term.truncate(prec)
            past = 0
        else:
            past += 1
        if i > 4000:
            raise PrecisionError("log term index bound exploded")
    return acc.truncate(min(prec, u.prec))


def carlitz_period(emb, alpha, prec):
    """The period alpha^q * prod (1 - t^(1-q^i))^(-1) at one place.

    ``alpha`` must satisfy alpha^(q-1) = -t in the local field.  Returns
    (period, truncation_index); the product stops at the first factor that
    is 1 within working precision, and the index is recorded for audit.
    """
    F = emb.res_field
    q = emb.scalar_field.q
    pw = alpha ** q
    vper = q * alpha.valuation()
    rel = prec - vper
    acc = pw.truncate(prec)
    i = 0
    while True:
        i += 1
        fv = emb.e * (q**i - 1)  # valuation of t^(1-q^i)
        if fv > rel:
            break
        mono = Laurent.monomial(F, F.pow(emb.c, 1 - q**i), fv, rel)
        factor = (Laurent.one(F, rel) - mono).inverse()
        acc = (acc * factor).truncate(prec)
    return acc, i - 1


def exp_tail_invert(emb, exp_coeffs, rho, prec, ball=None):
    """The unique preimage of rho under exp inside the contraction ball.

    Solves exp(x) = rho by the fixpoint iteration x <- rho - (exp(x) - x),
    which contracts when val(rho) is at least the ball start.
    """
    if rho.is_zero_to_prec:
        return Laurent.zero(emb.res_field, min(prec, rho.prec))
    if ball is None:
        ball = ball_start(emb, exp_coeffs)
    if ball is not None and rho.valuation() < ball:
        raise DivergenceError(
            f"val {rho.valuation()} below contraction ball start {ball}"
        )
    x = rho.truncate(prec)
    for _ in range(prec - rho.valuation() + 3):
        err = exp_eval(emb, exp_coeffs, x, prec) - rho.truncate(prec)
        if err.is_zero_to_prec:
            return x
        x = x - err
    raise PrecisionError("exp tail inversion did not converge")


class Window:
    """A compact-open coordinate patch of one local field.

    Spans the k-space of elements supported on u-exponents lo..hi with
    residue coordinates over the scalar field; its k-dimension is
    (hi - lo + 1) * residue degree.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        if hi < lo:
            raise ValueError("empty window")
        self.lo = lo
        self.hi = hi

    def dim(self, emb):
        return (self.hi - self.lo + 1) * emb.res_deg

    def basis(self, emb):
        """Basis labels (exponent, residue basis element)."""
        return [
            (i, b) for i in range(self.lo, self.hi + 1) for b in emb.res_basis()
        ]

    def coords(self, emb, x):
        """Coordinates of a series on the window; entries beyond hi ignored."""
        out = []
        for i in range(self.lo, self.hi + 1):
            c = x.coefficient(i) if i <= x.prec else 0
            out.extend(emb.res_coords(c))
        return tuple(out)

    def element(self, emb, coords, prec):
        F = emb.res_field
        d = emb.res_deg
        cmap = {}
        for n, i in enumerate(range(self.lo, self.hi + 1)):
            c = emb.res_from_coords(tuple(coords[n * d : (n + 1) * d]))
            if c:
                cmap[i] = c
        return Laurent.from_coeff_map(F, cmap, prec)

    def __repr__(self):
        return f"Window[{self.lo}, {self.hi}]"


def exp_window_columns(emb, exp_coeffs, domain, codomain):
    """exp of each domain basis element, truncated to the codomain window.

    Raises PrecisionError unless every produced term below the codomain
    window is provably absent, so nothing real is silently discarded.
    """
    q = exp_coeffs.module.field.q
    need = required_imax(emb, exp_coeffs, domain.lo, codomain.hi)
    exp_coeffs.ensure(need)
    # every term exp produces from the domain must sit at or above codomain.lo
    low = domain.lo
    for i in range(1, need + 1):
        v = emb.val_rat(exp_coeffs[i])
        if v is not None:
            low = min(low, v + q**i * domain.lo)
    if low < codomain.lo:
        raise PrecisionError(
            f"codomain window starts at {codomain.lo} but exp(domain) can reach u^{low}"
        )
    neg = max(
        [0]
        + [
            -emb.val_rat(exp_coeffs[i])
            for i in range(1, need + 1)
            if not exp_coeffs[i].is_zero
        ]
    )
    lam_prec = codomain.hi + neg + 1
    cols = []
    for i, b in domain.basis(emb):
        lam = Laurent.monomial(emb.res_field, b, i, lam_prec)
        img = exp_eval(emb, exp_coeffs, lam, codomain.hi)
        cols.append(((i, b), img))
    return cols


def exp_preimage_window(emb, exp_coeffs, target, domain, codomain):
    """Solve exp(lam) = target with lam supported on the domain window.

    Returns (lam_or_None, kernel_basis).  ``None`` certifies that target
    is not in exp(domain) modulo O(u^(codomain.hi+1)).  The particular
    solution is the canonical reduced-echelon one.
    """
    k = exp_coeffs.module.field
    if not target.is_zero_to_prec and target.valuation() < codomain.lo:
        raise PrecisionError("target has support below the codomain window")
    if target.prec < codomain.hi:
        raise PrecisionError(
            f"target precision O(u^{target.prec + 1}) cannot fill the codomain"
            f" window ending at {codomain.hi}"
        )
    cols = exp_window_columns(emb, exp_coeffs, domain, codomain)
    arows = []
    ncols = len(cols)
    rhs = []
    for j in range(codomain.lo, codomain.hi + 1):
        for bidx in range(emb.res_deg):
            row = []
            for _, img in cols:
                c = img.coefficient(j) if j <= img.prec else 0
                row.append(emb.res_coords(c)[bidx])
            arows.append(tuple(row))
            tc = target.coefficient(j) if j <= target.prec else 0
            rhs.append(emb.res_coords(tc)[bidx])
    sols, kern = solve_affine(k, arows, ncols, [tuple(rhs)])
    labels = [lab for lab, _ in cols]

    def assemble(coefvec, prec):
        F = emb.res_field
        cmap = {}
        for (i, b), c in zip(labels, coefvec):
            if c:
                cmap[i] = F.add(cmap.get(i, 0), F.mul(b, c))
        return Laurent.from_coeff_map(F, cmap, prec)

    lam = None if sols[0] is None else assemble(sols[0], domain.hi)
    kernel = [assemble(v, domain.hi) for v in kern]
    return lam, kernel

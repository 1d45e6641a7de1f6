"""Function fields K = k(t)[x]/(m) and their places above infinity.

A field is described by a monic defining polynomial in x with k[t]
coefficients; the ring of integers R is used through the power basis
1, x, ..., x^(d-1) of the order k[t][x]/(m).  Cyclotomic fields (torsion
fields of the Carlitz module) are the primary construction and their
orders are maximal; user-supplied fields get a squarefree-discriminant
certificate when that is affordable and an explicit warning otherwise.

Completions at infinity are found by a Newton polygon digit search over
explicitly constructed tame local fields F((u)) with t = c * u**(-e).  All
slopes that occur inside such a field are integral, so branching is a
plain residue-root enumeration and simple branches finish by Newton
iteration.  Places are returned in a canonical order that does not depend
on the working precision.
"""

from .errors import CarlitzError, PrecisionError
from .expmap import LocalEmbedding
from .ffield import GF
from .laurent import Laurent
from .poly import Poly, format_poly, is_irreducible, irreducible_polys, poly_gcd
from .twisted import DrinfeldModule

_BINOM_CACHE = {}


def _binom_mod(p, n, k):
    key = (p, n)
    row = _BINOM_CACHE.get(key)
    if row is None:
        row = [1]
        for _ in range(n):
            row = [1] + [(a + b) % p for a, b in zip(row, row[1:])] + [1]
        _BINOM_CACHE[key] = row
    return row[k]


# -- polynomials in x over k[t] ----------------------------------------------


def bipoly_deg(m):
    return len(m) - 1


def bipoly_derivative(m):
    field = m[0].field
    out = []
    for j in range(1, len(m)):
        out.append(m[j] * (j % field.p))
    while out and out[-1].is_zero:
        out.pop()
    return out


def bipoly_resultant(A, B):
    """Res_x(A, B) in k[t], as the Bareiss determinant of the Sylvester matrix.

    Exact and simple; intended for the small degrees where discriminants
    are actually materialized (certifying maximality of user orders).
    """
    from .normalforms import bareiss_det

    field = A[-1].field
    da, db = len(A) - 1, len(B) - 1
    if da == 0:
        return A[0] ** db
    if db == 0:
        return B[0] ** da
    n = da + db
    rows = []
    for i in range(db):
        row = [Poly.zero(field)] * n
        for j, c in enumerate(reversed(A)):
            row[i + j] = c
        rows.append(row)
    for i in range(da):
        row = [Poly.zero(field)] * n
        for j, c in enumerate(reversed(B)):
            row[i + j] = c
        rows.append(row)
    return bareiss_det(rows)


def bipoly_discriminant(m):
    """disc of a monic m in x, up to a sign unit: Res(m, m')."""
    dm = bipoly_derivative(m)
    if not dm:
        raise CarlitzError("defining polynomial is inseparable (m' = 0)")
    return bipoly_resultant(m, dm)


# -- local root finding -------------------------------------------------------


def _embed_bipoly(emb, m, prec):
    return [emb.poly(c, prec) for c in m]


def _eval_poly_series(coeffs, x):
    acc = None
    for c in reversed(coeffs):
        acc = c if acc is None else acc * x + c
    return acc


def _taylor_shift(coeffs, s, p):
    """Coefficients of m(s + x)."""
    n = len(coeffs)
    spow = [None] * n
    out = []
    for i in range(n):
        acc = coeffs[i]
        for j in range(i + 1, n):
            b = _binom_mod(p, j, i)
            if b == 0:
                continue
            if spow[j - i] is None:
                spow[j - i] = s ** (j - i)
            acc = acc + (coeffs[j] * spow[j - i]).scale(b % p)
        out.append(acc)
    return out


def _newton_refine(emb, mcoeffs, dmcoeffs, x0, prec):
    """Newton iteration on an isolated simple root; None if it stalls.

    Correct digits double per step, which interval precision tracking
    cannot certify on its own, so each iterate's digits are taken as exact
    and re-certified through the ultrametric Newton bound: inside the
    basin val(m(x)) > 2 val(m'(x)), the distance to the true root is
    exactly val(m(x)) - val(m'(x)).
    """
    F = emb.res_field
    claim = min(c.prec for c in mcoeffs)
    x = x0
    for _ in range(80):
        xb = Laurent(F, x.val or 0, x.coeffs, claim)
        fx = _eval_poly_series(mcoeffs, xb)
        dfx = _eval_poly_series(dmcoeffs, xb)
        if dfx.is_zero_to_prec:
            return None
        vd = dfx.valuation()
        if fx.is_zero_to_prec:
            cert = fx.prec - vd
            return xb.truncate(min(prec, cert)) if cert >= prec else None
        vf = fx.valuation()
        if vf <= 2 * vd:
            return None  # outside the Newton basin
        cert = vf - vd - 1
        if cert >= prec:
            return xb.truncate(prec)
        x = xb - fx / dfx
    return None


def _newton_polygon(coeffs):
    """Lower hull points (j, val c_j) of a poly with Laurent coefficients."""
    pts = []
    for j, c in enumerate(coeffs):
        if not c.is_zero_to_prec:
            pts.append((j, c.valuation()))
    if len(pts) < 2:
        return pts, []
    hull = [pts[0]]
    for pt in pts[1:]:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x2) >= (pt[1] - y2) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    segs = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segs.append((x1, y1, x2, y2))
    return pts, segs


def roots_in_local(emb, m, prec, branch_prec=None):
    """All roots of monic m (k[t][x]) in the local field of ``emb``.

    Returns a list of Laurent series, each satisfying m(x) = O(u^(prec+1)).
    Raises PrecisionError when branches cannot be separated within the
    branching budget.
    """
    F = emb.res_field
    p = F.p
    if branch_prec is None:
        branch_prec = max(40, prec // 4)
    # Horner evaluation loses precision proportional to the coefficient
    # and root valuations; embed with that much headroom
    drift = max((-emb.val_poly(c) for c in m if not c.is_zero), default=0)
    drift += len(m) * max(1, emb.e)
    mc_full = _embed_bipoly(emb, m, prec + drift)
    dmc_full = [c for c in _embed_bipoly(emb, bipoly_derivative(m), prec + drift)]
    mc = _embed_bipoly(emb, m, branch_prec + drift)
    roots = []

    def descend(coeffs, partial, min_val, depth):
        if depth > branch_prec:
            raise PrecisionError(
                "root branches not separated; raise the working precision"
                f" (currently {prec}, branch budget {branch_prec})"
            )
        if coeffs[0].is_zero_to_prec:
            # partial already kills m to branch precision; try to finish
            ref = _newton_refine(emb, mc_full, dmc_full, partial, prec)
            if ref is not None:
                roots.append(ref)
                return
            raise PrecisionError("stalled on a root known only to branch precision")
        _, segs = _newton_polygon(coeffs)
        for x1, y1, x2, y2 in segs:
            num, den = y1 - y2, x2 - x1
            if num % den:
                continue  # fractional slope has no roots in this field
            v0 = num // den
            if v0 < min_val:
                continue
            # residual polynomial along the segment line
            rescoef = []
            for j in range(x1, x2 + 1):
                line = y1 + (j - x1) * (-v0)
                c = coeffs[j] if j < len(coeffs) else None
                rescoef.append(
                    0
                    if c is None or c.is_zero_to_prec or c.valuation() > line or line > c.prec
                    else c.coefficient(line)
                )
            for a in range(1, F.q):
                # multiplicity of a as residual root
                val = _respoly_eval(F, rescoef, a)
                if val != 0:
                    continue
                mult = _respoly_multiplicity(F, rescoef, a)
                cand = partial + Laurent.monomial(F, a, v0, partial.prec)
                if mult == 1:
                    approx = cand.truncate(prec)
                    ref = _newton_refine(
                        emb, mc_full, dmc_full,
                        Laurent(F, approx.val, approx.coeffs, prec), prec,
                    )
                    if ref is not None:
                        roots.append(ref)
                        continue
                shifted = _taylor_shift(
                    coeffs, Laurent.monomial(F, a, v0, branch_prec + max(0, -v0)), p
                )
                descend(shifted, cand, v0 + 1, depth + 1)

    start = Laurent.zero(F, branch_prec + 8)
    descend(mc, start, -(10**9), 0)
    # distinctness certificate
    keyed = {}
    for r in roots:
        key = (r.val, r.coeffs)
        if key in keyed:
            raise PrecisionError("two root branches collide at working precision")
        keyed[key] = r
    return [keyed[k] for k in sorted(keyed, key=_root_sort_key)]


def _root_sort_key(key):
    val, coeffs = key
    return (val, coeffs)


def _respoly_eval(F, coeffs, a):
    acc = 0
    for c in reversed(coeffs):
        acc = F.add(F.mul(acc, a), c)
    return acc


def _respoly_multiplicity(F, coeffs, a):
    # deflate by (z - a) until the value is nonzero
    mult = 0
    cur = list(coeffs)
    while len(cur) > 1 and _respoly_eval(F, cur, a) == 0:
        out = [0] * (len(cur) - 1)
        acc = 0
        for j in range(len(cur) - 1, 0, -1):
            acc = F.add(F.mul(acc, a), cur[j])
            out[j - 1] = acc
        cur = out
        mult += 1
    return mult


# -- places -------------------------------------------------------------------


class InfinitePlace:
    """One completion of K above the infinite place of k(t).

    The local field is F((u)) with the exact relation u**e = c * (1/t),
    c in the residue field F; x embeds as ``x_emb``.  ``alpha`` is a
    (q-1)-st root of -t in the completion when one exists.
    """

    def __init__(self, field, emb, x_emb, prec, index=0):
        self.field = field
        self.emb = emb
        self.x_emb = x_emb
        self.prec = prec
        self.index = index
        self.alpha = alpha_root_local(emb, field.k.q, prec)
        self._xpow_cache = {}

    @property
    def e(self):
        return self.emb.e

    @property
    def fres(self):
        return self.emb.res_deg

    @property
    def res_field(self):
        return self.emb.res_field

    @property
    def c(self):
        return self.emb.c

    @property
    def alpha_exists(self):
        return self.alpha is not None

    def x_powers(self, upto, prec=None):
        """Powers of the embedded generator.

        Built once at the stored precision (so only the valuation drift
        costs digits).  With ``prec`` given, each power is truncated and a
        PrecisionError is raised when a power cannot honor the request;
        with ``prec`` None the native precisions are returned and callers
        rely on arithmetic to track the bounds.
        """
        cache = self._xpow_cache.get("full")
        if cache is None or len(cache) <= upto:
            cache = [Laurent.one(self.res_field, self.prec + self.e * self.field.d)]
            for _ in range(max(upto, 1)):
                cache.append(cache[-1] * self.x_emb)
            self._xpow_cache["full"] = cache
        if prec is None:
            return cache[: upto + 1]
        out = []
        for j in range(upto + 1):
            p = cache[j]
            if p.prec < prec:
                raise PrecisionError(
                    f"x^{j} known to O(u^{p.prec + 1}), asked for O(u^{prec + 1})"
                )
            out.append(p.truncate(prec))
        return out

    def embed_element(self, coords, prec):
        """Embed an element of K given by power-basis k[t] coordinates.

        The returned precision is the honest minimum of the request and
        what the stored place data supports.
        """
        xs = self.x_powers(len(coords) - 1)
        acc = Laurent.zero(self.res_field, prec)
        for j, g in enumerate(coords):
            if g.is_zero:
                continue
            gp = self.emb.poly(g, prec - min(0, xs[j].val_lower_bound()))
            acc = acc + gp * xs[j]
        return acc.truncate(prec)

    def sort_key(self):
        lead = []
        if not self.x_emb.is_zero_to_prec:
            v = self.x_emb.valuation()
            lead = [self.x_emb.coefficient(v + i) for i in range(12)]
            slope = v
        else:
            slope = 0
        return (self.e, self.fres, self.c, slope, tuple(lead))

    def describe(self):
        from .laurent import format_series

        al = "yes" if self.alpha_exists else "no"
        return (
            f"place {self.index}: e={self.e} f={self.fres} c={self.res_field.format_element(self.c)} "
            f"alpha={al} x={format_series(self.x_emb.truncate(min(self.prec, self.x_emb.val_lower_bound() + 8)), var='u', inverted=False)}"
        )


def alpha_root_local(emb, q, prec):
    """A canonical (q-1)-st root of -t in the local field, or None.

    With t = c*u**(-e) exactly, a root must be a*u**(-e/(q-1)) with
    a**(q-1) = -c, so existence reduces to integrality of e/(q-1) and a
    power test in the residue field.  The smallest admissible residue
    element is chosen, making the root reproducible.
    """
    if q == 2:
        # -t = t itself; alpha = t
        return emb.t_series(prec)
    if emb.e % (q - 1):
        return None
    F = emb.res_field
    roots = F.nth_roots(F.neg(emb.c), q - 1)
    if not roots:
        return None
    return Laurent.monomial(F, roots[0], -emb.e // (q - 1), prec)


class FunctionField:
    """K = k(t)[x]/(m) with its order k[t][x]/(m)."""

    def __init__(self, k, mx, cyclotomic_modulus=None, check=True):
        self.k = k
        self.mx = tuple(mx)
        self.cyclotomic_modulus = cyclotomic_modulus
        self.warnings = []
        if not self.mx or self.mx[-1].degree != 0 or self.mx[-1].coeffs != (1,):
            raise ValueError("defining polynomial must be monic in x")
        self.d = len(self.mx) - 1
        if self.d < 1:
            raise ValueError("defining polynomial must have positive degree")
        if check and not bipoly_derivative(self.mx):
            raise CarlitzError("inseparable defining polynomial")
        self.discriminant = None
        if cyclotomic_modulus is not None:
            self.maximal_certified = True
        else:
            self.maximal_certified = False
            if self.d <= 8 and check:
                disc = bipoly_discriminant(self.mx)
                self.discriminant = disc
                if not disc.is_zero:
                    from .poly import poly_factor

                    sqfree = all(mult == 1 for _, mult in poly_factor(disc))
                    self.maximal_certified = sqfree
            if not self.maximal_certified:
                self.warnings.append(
                    "order k[t][x]/(m) not certified maximal; results describe this order"
                )
        self._places = None
        self._places_prec = 0

    @property
    def q(self):
        return self.k.q

    def carlitz(self):
        return DrinfeldModule.carlitz(self.k)

    def __repr__(self):
        if self.cyclotomic_modulus is not None:
            return f"FunctionField(q={self.q}, cyclotomic f={format_poly(self.cyclotomic_modulus)})"
        return f"FunctionField(q={self.q}, d={self.d})"

    # -- places ---------------------------------------------------------

    def infinite_places(self, prec):
        if self._places is not None and self._places_prec >= prec:
            return self._places
        places = infinite_places(self, prec)
        self._places = places
        self._places_prec = prec
        return places


def build_cyclotomic(q, f):
    """The field of definition of the f-torsion of the Carlitz module.

    f must be irreducible; the defining polynomial is phi(f)(x)/x, the
    order k[t][lambda] is maximal, and d = q**deg(f) - 1.
    """
    k = GF(q)
    if f.field != k:
        raise ValueError("modulus not over the requested field")
    C = DrinfeldModule.carlitz(k)
    mx = C.cyclotomic_min_poly(f)  # raises on reducible f
    return FunctionField(k, mx, cyclotomic_modulus=f)


def rational_field(q):
    """K = k(t) presented by m = x + t, so R = k[t]."""
    k = GF(q)
    return FunctionField(k, [Poly.t(k), Poly.one(k)])


def _candidate_locals(k, d, notes):
    """Normalized tame local fields (e, g, c), lazily, in canonical order.

    Only e dividing q - 1 occurs for the fields in scope (tame inertia),
    and the normalization c in k* covers every completion with
    gcd(e, g) = 1; anything else fails the final degree check loudly.
    Residue fields are materialized only when a candidate is consumed, so
    early termination never builds large extensions.
    """
    import math

    q = k.q
    cands = []
    for e in range(1, q):
        if (q - 1) % e:
            continue
        for g in range(1, d + 1):
            if e * g > d or math.gcd(e, g) != 1:
                continue
            cands.append((e * g, e, g))
    cands.sort()
    for _, e, g in cands:
        try:
            F = k if g == 1 else k.canonical_extension(g)
        except CarlitzError:
            notes.append(f"skipped residue degree {g} (field beyond table limit)")
            continue
        reps = []
        for c in range(1, q):
            matched = False
            for r in reps:
                ratio = F.div(c, r)
                if F.pow(ratio, (F.q - 1) // e) == 1:
                    matched = True
                    break
            if not matched:
                reps.append(c)
                yield (e, g, F, c)


def _galois_orbit(emb, root, g, e):
    """Orbit of a root under coefficient Frobenius and u -> zeta*u."""
    F = emb.res_field
    q = emb.scalar_field.q
    zetas = [z for z in range(1, F.q) if F.pow(z, e) == 1]
    out = set()
    for j in range(g):
        fr = root.map_coeffs(lambda a: F.pow(a, q**j))
        for z in zetas:
            img = Laurent(
                F,
                fr.val or 0,
                tuple(
                    F.mul(c, F.pow(z, (fr.val + i) % (F.q - 1)))
                    for i, c in enumerate(fr.coeffs)
                ),
                fr.prec,
            )
            out.add((img.val, img.coeffs))
    return out


def infinite_places(F, prec):
    """All places of K above infinity, in a canonical, precision-stable order.

    Roots of m are collected over the candidate completions in increasing
    degree; a root whose Galois orbit is smaller than [L : k((1/t))]
    belongs to a smaller completion and is skipped.  The run fails loudly
    unless the residue/ramification degrees sum to d.
    """
    k = F.k
    d = F.d
    work_prec = prec + 10
    places = []
    notes = []
    total = 0
    for e, g, rf, c in _candidate_locals(k, d, notes):
        if total == d:
            break
        emb = LocalEmbedding(rf, k, c, e)
        roots = roots_in_local(emb, list(F.mx), work_prec)
        taken = set()
        for root in roots:
            key = (root.val, root.coeffs)
            if key in taken:
                continue
            orbit = _galois_orbit(emb, root, g, e)
            if len(orbit) != e * g:
                continue  # completion is a proper subfield; found elsewhere
            taken.update(orbit)
            if root.prec < prec:
                raise PrecisionError(
                    f"root refined only to O(u^{root.prec + 1}), need O(u^{prec + 1})"
                )
            places.append(InfinitePlace(F, emb, root.truncate(prec), prec))
            total += e * g
            if total > d:
                raise CarlitzError("place degrees exceed d; inconsistent factorization")
    if total != d:
        extra = ("; " + "; ".join(notes)) if notes else ""
        raise CarlitzError(
            f"places found only account for degree {total} of {d};"
            " the field has a completion outside the supported tame forms"
            f" or the precision is too low{extra}"
        )
    places.sort(key=lambda P: P.sort_key())
    for i, P in enumerate(places):
        P.index = i
    return places


def place_table(F, prec=30):
    lines = [f"q {F.q}"]
    if F.cyclotomic_modulus is not None:
        lines.append(f"modulus {format_poly(F.cyclotomic_modulus)}")
    lines.append(f"d {F.d}")
    for P in F.infinite_places(prec):
        lines.append(P.describe())
    return "\n".join(lines)


# -- prime splitting ----------------------------------------------------------


class PrimeSplitting:
    """Splitting type of a monic irreducible p of k[t] in R."""

    def __init__(self, p, entries, method):
        self.p = p
        self.entries = tuple(sorted(entries))
        self.method = method

    def check_degree(self, d):
        if sum(f * e * g for f, e, g in self.entries) != d:
            raise CarlitzError(f"splitting of {self.p} does not sum to {d}")

    def norm_degrees(self):
        """(norm degree, count) pairs for the primes above p."""
        out = []
        for fres, _e, count in self.entries:
            out.append((self.p.degree * fres, count))
        return out

    def __eq__(self, other):
        return (
            isinstance(other, PrimeSplitting)
            and self.p == other.p
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"PrimeSplitting({format_poly(self.p)}, {self.entries})"


def _mult_order(p, f):
    """Multiplicative order of p modulo irreducible f."""
    from .ffield import _factor_int

    field = f.field
    group = field.q**f.degree - 1
    rem = p % f
    if rem.is_zero:
        raise ValueError("p divides f")
    order = group
    for ell in sorted(set(_factor_int(group))):
        while order % ell == 0 and rem.powmod(order // ell, f).coeffs == (1,):
            order //= ell
    return order


def split_prime(F, p, method="auto"):
    """Factorization type of p in R.

    Cyclotomic fields use the order of p modulo the torsion modulus; the
    generic route factors m over the residue field k[t]/(p).  ``method``
    can force "order" or "factor"; the two must agree where both apply.
    """
    if not p.is_monic or not is_irreducible(p):
        raise ValueError(f"{p} is not monic irreducible")
    if F.d == 1:
        return PrimeSplitting(p, [(1, 1, 1)], "trivial")
    f = F.cyclotomic_modulus
    if method in ("auto", "order") and f is not None:
        if (p % f).is_zero:
            return PrimeSplitting(p, [(1, F.d, 1)], "order")
        ordp = _mult_order(p, f)
        return PrimeSplitting(p, [(ordp, 1, F.d // ordp)], "order")
    if f is None and not F.maximal_certified:
        disc = F.discriminant
        if disc is None or (disc % p).is_zero:
            raise CarlitzError(
                f"cannot split {format_poly(p)}: order not certified maximal there"
            )
    return _split_by_factoring(F, p)


def _split_by_factoring(F, p):
    from .poly import poly_factor

    k = F.k
    from .ffield import _TABLE_LIMIT

    if k.q ** p.degree > _TABLE_LIMIT:
        raise CarlitzError(f"residue field of {format_poly(p)} too large to factor over")
    if F.cyclotomic_modulus is not None:
        # Dedekind applies at every p for the maximal cyclotomic order, and
        # away from f the reduction must stay separable
        pass
    rf = k.extension(tuple(p.coeffs), name="w") if p.degree > 1 else k
    if p.degree == 1:
        # k[t]/(p) = k via t -> root
        root = k.neg(p[0])
        mbar = Poly(k, [c(root) for c in F.mx])
    else:
        gbar = rf.gen_ring
        mbar = Poly(rf, [_eval_poly_in_ext(rf, c, gbar) for c in F.mx])
    entries = {}
    for fac, mult in poly_factor(mbar):
        key = (fac.degree, mult)
        entries[key] = entries.get(key, 0) + 1
    out = [(fdeg, mult, count) for (fdeg, mult), count in sorted(entries.items())]
    ps = PrimeSplitting(p, out, "factor")
    ps.check_degree(F.d)
    return ps


def _eval_poly_in_ext(rf, c, at):
    acc = 0
    for co in reversed(c.coeffs):
        acc = rf.add(rf.mul(acc, at), co)
    return acc


def prime_ideals_up_to(F, maxdeg):
    """All primes P of R with deg |R/P| <= maxdeg.

    Enumerates monic irreducibles p with deg p <= maxdeg, splits each, and
    keeps the primes whose norm degree fits.  Returns (primes, audit)
    where primes is a list of (p, fres, e, count) and audit counts primes
    by norm degree.
    """
    if maxdeg < 0:
        raise ValueError("maxdeg must be >= 0")
    out = []
    audit = {}
    for deg in range(1, maxdeg + 1):
        for p in irreducible_polys(F.k, deg):
            sp = split_prime(F, p)
            sp.check_degree(F.d)
            for fres, e, count in sp.entries:
                nd = deg * fres
                if nd <= maxdeg:
                    out.append((p, fres, e, count))
                    audit[nd] = audit.get(nd, 0) + count
    return out, dict(sorted(audit.items()))

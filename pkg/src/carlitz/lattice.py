"""The lattice exp^{-1}(E(R)), its regulator, and the unit module.

The lattice is produced by windowed F_q-linear algebra: solve
exp(lambda) = xi simultaneously over a window of lambda coefficients at
every infinite place and bounded-degree power-basis coordinates of xi.
Each window solution extends to an honest preimage by inverting the tail
inside the contraction ball, where the logarithm converges.  Together with
the period vectors these generate the lattice over k[t]; a reduced basis
(leading coefficient vectors independent over k) then gives degrees,
determinant valuation and the regulator.

Saturation tests candidate index primes ell by one more linear solve per
ell: membership of (1/ell)-classes is a linear condition because exp is
F_q-linear, and every accepted class is re-verified by exact
reconstruction before the lattice grows.
"""

from .errors import (
    CarlitzError,
    PrecisionError,
    RankError,
    ReconstructionError,
    StabilizationError,
)
from .expmap import carlitz_period, exp_eval, log_coefficients, log_eval
from .laurent import Laurent
from .linalg import SpanReducer
from .normalforms import smith_form
from .poly import Poly, RatFunc, format_poly, irreducible_polys
from .seriesmat import SeriesMatrix
from .windows import PlaceWindows, block_degree, vector_blocks


class Lattice:
    """A finite-index sublattice of Lie(K_infinity) by a reduced basis.

    Basis vectors are stored in component form (one series per place);
    their block coordinates have k-independent leading coefficient
    vectors, so the degree data below is exact and v(det) is just minus
    the degree sum.
    """

    def __init__(self, ctx, vectors, provenance, degrees, lc_rows):
        self.ctx = ctx
        self.vectors = vectors
        self.provenance = list(provenance)
        self.degrees = list(degrees)
        self.lc_rows = lc_rows

    @property
    def rank(self):
        return len(self.vectors)

    def blocks(self):
        return [vector_blocks(self.ctx.places, v, self.ctx.k) for v in self.vectors]

    def det_valuation_w(self):
        """Exact valuation (in 1/t) of det of the basis block matrix."""
        return sum(self.degrees) * -1

    def signature(self):
        return tuple(sorted(self.degrees)), tuple(sorted(self.provenance))

    def __repr__(self):
        return f"Lattice(rank={self.rank}, degrees={sorted(self.degrees)})"


def reduce_block_vectors(ctx, gens, provenance, min_prec_guard=6):
    """Reduced k[t]-basis from a generating family.

    Repeatedly cancels k-dependencies among the leading coefficient
    vectors, pushing the highest-degree participant down; vectors that
    vanish to working precision are discarded as redundant.  Deterministic
    ordering makes the output reproducible.
    """
    k = ctx.k
    d = ctx.d
    work = []
    for v, tag in zip(gens, provenance):
        blocks = vector_blocks(ctx.places, v, k)
        deg = block_degree(blocks)
        if deg is None:
            continue
        work.append([blocks, v, tag])

    def lc_vector(blocks, deg):
        return tuple(
            b.coefficient(-deg) if (not b.is_zero_to_prec and -deg <= b.prec) else 0
            for b in blocks
        )

    while True:
        work.sort(key=lambda it: (block_degree(it[0]), it[2]))
        degs = [block_degree(it[0]) for it in work]
        sr = SpanReducer(k, d)
        offender = None
        coeffs = None
        for idx, it in enumerate(work):
            lc = lc_vector(it[0], degs[idx])
            red = sr.reduce(lc)
            if not any(red):
                offender = idx
                break
            sr.add(lc)
        if offender is None:
            break
        # express the offending leading vector over the earlier ones
        rows = [lc_vector(work[i][0], degs[i]) for i in range(offender)]
        sols, _ = _solve_combo(k, rows, lc_vector(work[offender][0], degs[offender]))
        if sols is None:
            raise CarlitzError("leading-vector dependence without a certificate")
        tgt = work[offender]
        dtg = degs[offender]
        for i, c in enumerate(sols):
            if not c:
                continue
            shift = dtg - degs[i]
            tgt[0] = [
                a - b.shift(-shift).scale(c) for a, b in zip(tgt[0], work[i][0])
            ]
            tgt[1] = [
                a - _comp_tmul(ctx.places[pi], b, shift, c)
                for pi, (a, b) in enumerate(zip(tgt[1], work[i][1]))
            ]
        newdeg = block_degree(tgt[0])
        if newdeg is None:
            work.pop(offender)
            continue
        if newdeg >= dtg:
            raise CarlitzError("reduction failed to lower the degree")
        floor_deg = -(min(b.prec for b in tgt[0]) - min_prec_guard)
        if newdeg <= floor_deg:
            raise PrecisionError(
                "a generator reduced into the precision floor; raise the precision"
            )

    work.sort(key=lambda it: (block_degree(it[0]), it[2]))
    degrees = [block_degree(it[0]) for it in work]
    lc_rows = [lc_vector(it[0], dg) for it, dg in zip(work, degrees)]
    return Lattice(
        ctx,
        [it[1] for it in work],
        [it[2] for it in work],
        degrees,
        lc_rows,
    )


def _solve_combo(k, rows, target):
    """Write target as a k-combination of rows (rows are k-vectors)."""
    from .linalg import solve_affine

    if not rows:
        return None, None
    n = len(rows[0])
    arows = [tuple(r[j] for r in rows) for j in range(n)]
    sols, kern = solve_affine(k, arows, len(rows), [tuple(target)])
    return sols[0], kern


def _comp_tmul(place, z, shift, scalar):
    """scalar * t^shift * z on one component."""
    emb = place.emb
    if z.is_zero_to_prec:
        return Laurent.zero(emb.res_field, z.prec - shift * emb.e)
    out = z.shift(-emb.e * shift).scale(
        emb.res_field.mul(scalar, emb.res_field.pow(emb.c, shift))
    )
    return out


def period_sublattice(ctx, prec=None):
    """One period generator per place where a (q-1)-st root of -t exists.

    Every generator is supported on its own place and annihilated by exp,
    which is asserted before it is accepted.
    """
    prec = prec or ctx.prec
    gens, tags = [], []
    for i, P in enumerate(ctx.places):
        if not P.alpha_exists:
            continue
        per, _ = carlitz_period(P.emb, P.alpha, prec)
        img = exp_eval(P.emb, ctx.exp, per, min(prec, per.prec) - 1)
        if not img.is_zero_to_prec:
            raise CarlitzError(f"period at place {i} not annihilated by exp")
        vec = [Laurent.zero(Q.res_field, prec) for Q in ctx.places]
        vec[i] = per.truncate(prec)
        gens.append(vec)
        tags.append(("period", i))
    return gens, tags


def _joint_solve(ctx, wlo, whi, degbound, prec):
    """Kernel of exp(lambda) - xi over windows and bounded xi coordinates.

    Returns a list of (xi_coords, lambda_window_vec) with xi nonzero, one
    for each new direction in xi-space, in deterministic order.
    """
    k = ctx.k
    places = ctx.places
    lam_labels = []
    lam_cols = []  # per label: per-place image list (None off-place)
    for pi, P in enumerate(places):
        emb = P.emb
        for i in range(wlo[pi], whi[pi] + 1):
            for b in emb.res_basis():
                lam = Laurent.monomial(emb.res_field, b, i, whi[pi] + 40)
                img = exp_eval(emb, ctx.exp, lam, whi[pi])
                lam_labels.append((pi, i, b))
                lam_cols.append((pi, img))
    xi_labels = ctx.r_basis_labels(degbound)
    xi_cols = [ctx.embed_monomial(j, s, max(h + 1 for h in whi)) for j, s in xi_labels]

    # equation floor per place: lowest support over every column
    eqlo = list(wlo)
    for pi, img in lam_cols:
        if not img.is_zero_to_prec:
            eqlo[pi] = min(eqlo[pi], img.valuation())
    for vec in xi_cols:
        for pi, z in enumerate(vec):
            if not z.is_zero_to_prec:
                eqlo[pi] = min(eqlo[pi], z.valuation())

    nlam = len(lam_labels)
    eqW = PlaceWindows(places, eqlo, whi)
    kern = _column_kernel(
        k, eqW,
        [(pi, img) for pi, img in lam_cols],
        xi_cols,
    )

    xi_span = SpanReducer(k, len(xi_labels))
    out = []
    for v in sorted(kern):
        xi_part = v[nlam:]
        if not any(xi_part):
            continue  # window-truncated period multiple; periods enter exactly
        if not xi_span.add(xi_part):
            continue
        coords = [Poly.zero(k)] * ctx.d
        for (j, s), c in zip(xi_labels, xi_part):
            if c:
                coords[j] = coords[j] + Poly.t_pow(k, s, c)
        lamvec = []
        for pi, P in enumerate(places):
            emb = P.emb
            cmap = {}
            for ci, (lpi, i, b) in enumerate(lam_labels):
                if lpi == pi and v[ci]:
                    F = emb.res_field
                    cmap[i] = F.add(cmap.get(i, 0), F.mul(b, v[ci]))
            lamvec.append(Laurent.from_coeff_map(emb.res_field, cmap, whi[pi]))
        out.append((tuple(coords), lamvec))
    return out


def _column_kernel(k, eqW, single_cols, vec_cols):
    """Kernel of [single-place columns | minus embedded vectors] over eqW.

    ``single_cols`` are (place index, series) pairs; ``vec_cols`` full
    K_infinity vectors entering with a minus sign.  Bit-packed over F_2.
    """
    from .linalg import ColumnSolver

    cols = []
    if eqW.fast_packable:
        for pi, img in single_cols:
            cols.append(eqW.packed_single(pi, img))
        for vec in vec_cols:
            cols.append(eqW.packed(vec))  # -1 = 1 over F_2
    else:
        for pi, img in single_cols:
            vec = [
                Laurent.zero(P.res_field, img.prec) for P in eqW.places
            ]
            vec[pi] = img
            cols.append(eqW.coords(vec, strict_below=False))
        for vec in vec_cols:
            raw = eqW.coords(vec, strict_below=False)
            cols.append(tuple(k.neg(c) for c in raw))
    solver = ColumnSolver(k, cols, eqW.dim)
    return solver.kernel()


def _refine_preimage(ctx, log_coeffs, xi_coords, lamvec, prec):
    """Lift a window solution to a preimage correct to full precision."""
    target = ctx.embed_coords(xi_coords, prec)
    out = []
    for P, lam, tgt in zip(ctx.places, lamvec, target):
        emb = P.emb
        lam_full = Laurent(emb.res_field, lam.val or 0, lam.coeffs, prec)
        img = exp_eval(emb, ctx.exp, lam_full, prec)
        rho = tgt - img
        if rho.is_zero_to_prec:
            out.append(lam_full)
            continue
        delta = log_eval(emb, log_coeffs, rho, prec)
        lifted = lam_full + delta
        check = exp_eval(emb, ctx.exp, lifted, prec - 2)
        if not (check - tgt.truncate(prec - 2)).is_zero_to_prec:
            raise PrecisionError("tail refinement failed the round trip")
        out.append(lifted)
    return out


def integral_preimage_lattice(ctx, degree_bound=1, window=None, prec=None, max_rounds=5):
    """Compute exp^{-1}(E(R)) as a reduced lattice.

    Enlarges the solve window and the xi degree bound until the reduced
    basis has full rank d and its degree/provenance signature is stable
    across two consecutive rounds.  Raises RankError with the achieved
    rank when the resource limits are exhausted.
    """
    if not ctx.places:
        raise CarlitzError("no infinite places; nothing to do")
    prec = prec or ctx.prec
    logc = log_coefficients(ctx.exp, 2)
    pergens, pertags = period_sublattice(ctx, prec)
    prev_sig = None
    lat = None
    for rnd in range(max_rounds):
        B = degree_bound + rnd
        depth = (window or 3) + rnd
        wlo = [min(_period_val(P, ctx) or 0, 0) - depth for P in ctx.places]
        whi = [(ctx.balls[i] if ctx.balls[i] is not None else 0) + 8 + 2 * rnd
               for i in range(len(ctx.places))]
        sols = _joint_solve(ctx, wlo, whi, B, prec)
        gens = list(pergens)
        tags = list(pertags)
        for xi, lamvec in sols:
            lifted = _refine_preimage(ctx, logc, xi, lamvec, prec)
            gens.append(lifted)
            tags.append(("unit", tuple(g.coeffs for g in xi)))
        lat = reduce_block_vectors(ctx, gens, tags)
        sig = lat.signature()
        if lat.rank == ctx.d and sig == prev_sig:
            return lat
        prev_sig = sig if lat.rank == ctx.d else None
    if lat is not None and lat.rank == ctx.d:
        return lat
    raise RankError(
        f"lattice rank {lat.rank if lat else 0} of {ctx.d} after {max_rounds} rounds"
    )


def _period_val(P, ctx):
    if not P.alpha_exists:
        return None
    return ctx.k.q * P.alpha.valuation()


def saturate(lat, ctx, target_valuation, prec=None, max_rounds=12):
    """Grow the lattice to the full preimage lattice, certified by valuation.

    ``target_valuation`` is dim_k of the class module (the valuation the
    true regulator must have).  The defect Delta = target - v(det rho)
    bounds the degree of the index, so only primes ell with
    deg(ell) <= Delta can occur; each candidate class gives one linear
    system, and solutions only count after exact reconstruction of their
    exp image.  Returns (lattice, certificates).
    """
    prec = prec or ctx.prec
    logc = log_coefficients(ctx.exp, 2)
    certs = []
    for _ in range(max_rounds):
        delta = target_valuation - _det_rho_valuation(lat, ctx)
        if delta == 0:
            return lat, certs
        if delta < 0:
            raise StabilizationError(
                f"candidate lattice too large: v(det) overshoots target by {-delta}"
            )
        grew = False
        for degl in range(1, delta + 1):
            for ell in irreducible_polys(ctx.k, degl):
                found = _saturation_step(lat, ctx, ell, logc, prec)
                certs.append((format_poly(ell), bool(found)))
                if found:
                    gens = list(lat.vectors) + [found]
                    tags = list(lat.provenance) + [("saturation", format_poly(ell))]
                    lat = reduce_block_vectors(ctx, gens, tags)
                    grew = True
                    break
            if grew:
                break
        if not grew:
            raise StabilizationError(
                f"index defect {delta} remains but no 1/ell class verified;"
                " raise the precision"
            )
    raise StabilizationError("saturation did not terminate")


def _det_rho_valuation(lat, ctx):
    return lat.det_valuation_w() - ctx.t_det().valuation()


def _saturation_step(lat, ctx, ell, logc, prec):
    """One verified (1/ell)-class enlargement, or None."""
    k = ctx.k
    dl = ell.degree
    # candidate vectors (t^s / ell) * basis_i
    cands = []
    for i, v in enumerate(lat.vectors):
        for s in range(dl):
            cands.append(_vec_polydiv(ctx, v, Poly.t_pow(k, s), ell, prec))
    imgs = []
    for w in cands:
        imgs.append([exp_eval(P.emb, ctx.exp, z, _img_prec(P, ctx)) for P, z in zip(ctx.places, w)])
    # linear condition: sum c_i exp-images lies in E(R) modulo the window
    degb = max(6, 2 * dl + 2)
    xi_labels = ctx.r_basis_labels(degb)
    hi = [(b if b is not None else 0) + 6 for b in ctx.balls]
    xi_cols = [ctx.embed_monomial(j, s, max(hi) + 1) for j, s in xi_labels]
    eqlo = [0] * len(ctx.places)
    for pi in range(len(ctx.places)):
        vals = [im[pi].valuation() for im in imgs if not im[pi].is_zero_to_prec]
        vals += [z[pi].valuation() for z in xi_cols if not z[pi].is_zero_to_prec]
        eqlo[pi] = min(vals + [0])
    ncand = len(cands)
    eqW = PlaceWindows(ctx.places, eqlo, hi)
    if eqW.fast_packable:
        cols = [eqW.packed(im) for im in imgs] + [eqW.packed(v) for v in xi_cols]
    else:
        cols = [eqW.coords(im, strict_below=False) for im in imgs] + [
            tuple(k.neg(c) for c in eqW.coords(v, strict_below=False))
            for v in xi_cols
        ]
    from .linalg import ColumnSolver

    kern = ColumnSolver(k, cols, eqW.dim).kernel()
    for v in sorted(kern):
        cpart = v[:ncand]
        if not any(cpart):
            continue
        mu = None
        for ci, c in enumerate(cpart):
            if not c:
                continue
            term = [z.scale(c) for z in cands[ci]]
            mu = term if mu is None else ctx.vec_add(mu, term)
        # verify: exp(mu) is an exact element of R
        try:
            img = [exp_eval(P.emb, ctx.exp, z, prec - 10) for P, z in zip(ctx.places, mu)]
            ctx.reconstruct(img, degb + dl + 4)
        except (ReconstructionError, PrecisionError):
            continue
        return mu
    return None


def _img_prec(P, ctx):
    return ctx.prec - 12


def _vec_polydiv(ctx, vec, num, den, prec):
    out = []
    for P, z in zip(ctx.places, vec):
        emb = P.emb
        r = RatFunc(num, den)
        factor = emb.ratfunc(r, prec - min(0, z.val_lower_bound()) + emb.e * den.degree)
        out.append((z * factor).truncate(prec))
    return out


class RegulatorResult:
    """det of the change of basis from the lattice to Lie(R), normalized monic."""

    def __init__(self, regulator, raw_det, det_t_val, basis_degrees):
        self.regulator = regulator
        self.raw_det = raw_det
        self.det_t_val = det_t_val
        self.basis_degrees = list(basis_degrees)

    @property
    def valuation(self):
        return self.regulator.valuation()

    @property
    def precision(self):
        return self.regulator.prec

    def __repr__(self):
        from .laurent import format_series

        return f"RegulatorResult({format_series(self.regulator.truncate(self.valuation + 6))}, v={self.valuation})"


def regulator(lat, ctx):
    """The monic representative of det(rho) for a full-rank lattice."""
    if lat.rank != ctx.d:
        raise RankError(f"need rank {ctx.d}, lattice has {lat.rank}")
    k = ctx.k
    cols = lat.blocks()
    W = SeriesMatrix(k, [[cols[j][i] for j in range(ctx.d)] for i in range(ctx.d)])
    detw = W.det()
    dett = ctx.t_det()
    raw = detw * dett.inverse()
    if raw.is_zero_to_prec:
        raise PrecisionError("regulator determinant vanishes at working precision")
    if raw.valuation() != lat.det_valuation_w() - dett.valuation():
        raise CarlitzError("determinant valuation disagrees with the reduced degrees")
    lead = raw.coeffs[0]
    reg = raw.scale(k.inv(lead))
    return RegulatorResult(reg, raw, dett.valuation(), lat.degrees)


class UnitModule:
    """exp of the lattice inside E(R): generators, rank, torsion."""

    def __init__(self, gens, rank, torsion_invariants, period_coords):
        self.gens = gens
        self.rank = rank
        self.torsion_invariants = torsion_invariants
        self.period_coords = period_coords

    def __repr__(self):
        tors = ", ".join(format_poly(f) for f in self.torsion_invariants) or "1"
        return f"UnitModule(rank={self.rank}, torsion=({tors}))"


def unit_module(lat, ctx, prec=None, degbound=None):
    """The unit module U_R = exp(lattice) with exact generators.

    Every basis vector's exp image is reconstructed as an exact element of
    R (with certification margin), the period coordinates in the basis are
    recognized as exact polynomials, and rank and torsion come out of the
    Smith form of that coordinate matrix: U_R = lattice / periods.
    """
    prec = prec or ctx.prec
    if degbound is None:
        degbound = ctx.integral_degree_bound(max(lat.degrees) + 6)
    gens = []
    for v in lat.vectors:
        img = [exp_eval(P.emb, ctx.exp, z, prec - 8) for P, z in zip(ctx.places, v)]
        gens.append(ctx.reconstruct(img, degbound))
    # periods in basis coordinates
    pervecs, _ = period_sublattice(ctx, prec)
    r = len(pervecs)
    rankU = ctx.d - r
    pmat = []
    if r:
        cols = lat.blocks()
        W = SeriesMatrix(ctx.k, [[cols[j][i] for j in range(ctx.d)] for i in range(ctx.d)])
        sols = W.solve_many(
            [vector_blocks(ctx.places, pv, ctx.k) for pv in pervecs]
        )
        for sol in sols:
            pmat.append([_series_to_poly(ctx.k, hj, margin=4) for hj in sol])
        rows = [[pmat[j][i] for j in range(r)] for i in range(ctx.d)]
        D, _, _ = smith_form(rows)
        diag = [D[i][i] for i in range(min(ctx.d, r))]
        if sum(1 for x in diag if not x.is_zero) != r:
            raise CarlitzError("period coordinates are k(t)-dependent")
        torsion = [x for x in diag if not x.is_zero and x.degree > 0]
    else:
        torsion = []
    return UnitModule(gens, rankU, torsion, pmat)


def _series_to_poly(k, hj, margin=4):
    if hj.is_zero_to_prec:
        return Poly.zero(k)
    if hj.prec < margin:
        raise PrecisionError("not enough precision to certify a polynomial coordinate")
    cmap = dict(hj.coeff_items())
    if any(j > 0 for j in cmap):
        raise ReconstructionError("period coordinate is not polynomial at this precision")
    return Poly(k, [cmap.get(-s, 0) for s in range(0, -hj.valuation() + 1)])

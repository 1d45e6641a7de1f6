"""Window coordinates on K_infinity and the machinery shared by the
lattice and class-module computations.

Elements of K_infinity are lists of Laurent series, one per infinite
place.  Two coordinate systems are used:

* window coordinates: the finite k-space of coefficients on a valuation
  window [lo_v, hi_v] at each place, for all the compact-open quotients;
* block coordinates: each completion is a free k((1/t))-module on the
  basis u^a * g^b (a below the ramification index, g the residue
  generator), giving K_infinity = k((1/t))^d.  Lattice reduction and
  determinants live here.
"""

from .errors import CarlitzError, PrecisionError, ReconstructionError
from .expmap import ball_start, exp_coefficients
from .laurent import Laurent
from .poly import Poly
from .seriesmat import SeriesMatrix


class PlaceWindows:
    """Coordinates on the product of per-place valuation windows."""

    def __init__(self, places, los, his):
        self.places = places
        self.los = list(los)
        self.his = list(his)
        self.sizes = []
        self.offsets = []
        off = 0
        for P, lo, hi in zip(places, self.los, self.his):
            self.offsets.append(off)
            size = max(0, hi - lo + 1) * P.fres
            self.sizes.append(size)
            off += size
        self.dim = off

    def coords(self, vec, strict_below=True):
        """Window coordinates of a K_infinity element.

        Entries above a window are cut off (the quotient by deeper balls),
        but support below a window raises unless ``strict_below`` is off.
        """
        out = []
        for P, lo, hi, z in zip(self.places, self.los, self.his, vec):
            if hi < lo:
                continue
            emb = P.emb
            if z.prec < hi:
                raise PrecisionError(
                    f"component known to O(u^{z.prec + 1}) cannot fill window top {hi}"
                )
            if strict_below and not z.is_zero_to_prec and z.valuation() < lo:
                raise CarlitzError(
                    f"element has support at u^{z.valuation()} below window floor {lo}"
                )
            for i in range(lo, hi + 1):
                out.extend(emb.res_coords(z.coefficient(i)))
        return tuple(out)

    def element(self, coords, prec):
        vec = []
        pos = 0
        for P, lo, hi in zip(self.places, self.los, self.his):
            emb = P.emb
            d = emb.res_deg
            cmap = {}
            if hi >= lo:
                for i in range(lo, hi + 1):
                    c = emb.res_from_coords(tuple(coords[pos : pos + d]))
                    pos += d
                    if c:
                        cmap[i] = c
            vec.append(Laurent.from_coeff_map(emb.res_field, cmap, prec))
        return vec

    def zero_vec(self, prec):
        return [Laurent.zero(P.res_field, prec) for P in self.places]

    @property
    def fast_packable(self):
        return all(P.fres == 1 for P in self.places) and (
            self.places[0].res_field.q == 2 if self.places else False
        )

    def packed(self, vec):
        """Window coordinates as one bit-packed int (F_2, residue degree 1).

        Support above a window is cut; support below is the caller's
        responsibility (validated where it matters).
        """
        out = 0
        for P, lo, hi, off, z in zip(
            self.places, self.los, self.his, self.offsets, vec
        ):
            if hi < lo or z.is_zero_to_prec:
                continue
            if z.prec < hi:
                raise PrecisionError(
                    f"component known to O(u^{z.prec + 1}) cannot fill window top {hi}"
                )
            v = z.val
            cs = z.coeffs
            start = max(lo, v)
            end = min(hi, v + len(cs) - 1)
            for i in range(start, end + 1):
                if cs[i - v]:
                    out |= 1 << (off + i - lo)
        return out

    def packed_single(self, pi, z):
        """Packed coordinates of a vector supported at one place."""
        lo, hi, off = self.los[pi], self.his[pi], self.offsets[pi]
        out = 0
        if hi < lo or z.is_zero_to_prec:
            return 0
        if z.prec < hi:
            raise PrecisionError(
                f"component known to O(u^{z.prec + 1}) cannot fill window top {hi}"
            )
        v = z.val
        cs = z.coeffs
        for i in range(max(lo, v), min(hi, v + len(cs) - 1) + 1):
            if cs[i - v]:
                out |= 1 << (off + i - lo)
        return out


# -- block coordinates --------------------------------------------------------


def block_labels(places):
    out = []
    for idx, P in enumerate(places):
        for a in range(P.e):
            for b in range(P.fres):
                out.append((idx, a, b))
    return out


def comp_to_blocks(place, z, k):
    """Block coordinates of one component over k((1/t)), w = 1/t."""
    emb = place.emb
    e, g = place.e, place.fres
    F = emb.res_field
    out = []
    for a in range(e):
        maps = [dict() for _ in range(g)]
        if not z.is_zero_to_prec:
            j = -((a - z.valuation()) // e)  # ceil((val - a) / e)
            while a + e * j <= z.prec:
                coef = z.coefficient(a + e * j)
                if coef:
                    scaled = F.mul(coef, F.pow(emb.c, j))
                    for b, digit in enumerate(emb.res_coords(scaled)):
                        if digit:
                            maps[b][j] = digit
                j += 1
        prec_w = (z.prec - a) // e
        for b in range(g):
            out.append(Laurent.from_coeff_map(k, maps[b], prec_w))
    return out


def blocks_to_comp(place, blocks, prec_u):
    """Inverse of comp_to_blocks."""
    emb = place.emb
    e, g = place.e, place.fres
    F = emb.res_field
    cmap = {}
    basis = emb.res_basis()
    pos = 0
    for a in range(e):
        for b in range(g):
            blk = blocks[pos]
            pos += 1
            for j, c in blk.coeff_items():
                i = a + e * j
                if i > prec_u:
                    continue
                contrib = F.mul(F.mul(c, basis[b]), F.pow(emb.c, -j))
                cmap[i] = F.add(cmap.get(i, 0), contrib)
    return Laurent.from_coeff_map(emb.res_field, cmap, prec_u)


def vector_blocks(places, vec, k):
    out = []
    for P, z in zip(places, vec):
        out.extend(comp_to_blocks(P, z, k))
    return out


def block_degree(blocks):
    """max over coordinates of deg_t = -val_w; None for a zero vector."""
    degs = [-(b.valuation()) for b in blocks if not b.is_zero_to_prec]
    return max(degs) if degs else None


# -- R-side embeddings and solvers --------------------------------------------


class WindowContext:
    """Places, exponential data and cached power-basis embeddings."""

    def __init__(self, F, exp_coeffs=None, prec=120):
        self.F = F
        self.k = F.k
        self.prec = prec
        self.exp = exp_coeffs if exp_coeffs is not None else exp_coefficients(F.carlitz(), 4)
        self.places = F.infinite_places(prec)
        self.balls = [ball_start(P.emb, self.exp) for P in self.places]
        self._tmat = None
        self._tdet = None

    @property
    def d(self):
        return self.F.d

    def monomial_coords(self, j, s):
        """Power-basis coordinates of x^j * t^s."""
        out = [Poly.zero(self.k)] * self.d
        out[j] = Poly.t_pow(self.k, s)
        return out

    def r_basis_labels(self, degbound):
        return [(j, s) for j in range(self.d) for s in range(degbound + 1)]

    def embed_monomial(self, j, s, prec):
        vec = []
        for P in self.places:
            F = P.res_field
            if j == 0:
                vec.append(
                    Laurent.monomial(F, F.pow(P.c, s), -P.e * s, prec).truncate(prec)
                )
                continue
            need = prec + P.e * s
            if need > P.prec:
                raise PrecisionError(
                    f"place stored at O(u^{P.prec + 1}); embedding x^{j} t^{s}"
                    f" to O(u^{prec + 1}) needs O(u^{need + 1})"
                )
            xj = P.x_powers(j, need)[j]
            ts_prec = prec + P.e * s + max(0, -xj.val_lower_bound())
            ts = Laurent.monomial(F, F.pow(P.c, s), -P.e * s, ts_prec)
            vec.append((xj * ts).truncate(prec))
        return vec

    def embed_coords(self, coords, prec):
        return [P.embed_element(coords, prec) for P in self.places]

    def vec_add(self, a, b):
        return [x + y for x, y in zip(a, b)]

    def vec_sub(self, a, b):
        return [x - y for x, y in zip(a, b)]

    def vec_scale_poly(self, vec, g, prec):
        out = []
        for P, z in zip(self.places, vec):
            gp = P.emb.poly(g, prec - min(0, z.val_lower_bound()))
            out.append((z * gp).truncate(prec))
        return out

    def phi_t_vec(self, vec, prec):
        """Apply phi(t) componentwise to a point of E(K_infinity)."""
        D = self.exp.module
        q = self.k.q
        out = []
        for P, z in zip(self.places, vec):
            emb = P.emb
            acc = z * emb.t_series(prec - min(0, z.val_lower_bound()))
            for j, a in enumerate(D.coeffs, start=1):
                if a.is_zero:
                    continue
                zq = z.frobenius(q**j)
                term = emb.poly(a, prec - min(0, zq.val_lower_bound())) * zq
                acc = acc + term
            out.append(acc.truncate(prec))
        return out

    # -- the embedding matrix T and exact reconstruction -----------------

    def t_matrix(self):
        """Block-coordinate matrix of the power basis, columns = x^j."""
        if self._tmat is None:
            cols = []
            for j in range(self.d):
                vec = [P.x_powers(j)[j] for P in self.places]
                cols.append(vector_blocks(self.places, vec, self.k))
            rows = [[cols[j][i] for j in range(self.d)] for i in range(self.d)]
            self._tmat = SeriesMatrix(self.k, rows)
        return self._tmat

    def t_det(self):
        if self._tdet is None:
            self._tdet = self.t_matrix().det()
        return self._tdet

    def integral_degree_bound(self, extra):
        """Degree bound for power-basis coordinates of integral elements.

        Coordinates of an element with bounded pole orders at infinity are
        Cramer quotients against the embedding matrix, so their degrees
        are controlled by the valuation of det(T) plus the pole depth.
        """
        return abs(self.t_det().valuation()) + extra

    def coordinate_series(self, vecs):
        """Power-basis coordinate series of K_infinity elements."""
        T = self.t_matrix()
        cols = [vector_blocks(self.places, v, self.k) for v in vecs]
        return T.solve_many(cols)

    def reconstruct(self, vec, degbound, margin=5):
        """Recognize a K_infinity element as an exact element of R.

        Solves for the power-basis coordinate series, demands that each one
        is a polynomial of degree <= degbound with at least ``margin``
        vanishing coefficients beyond certifying it, and re-embeds the
        result to check it against the input.  Raises ReconstructionError
        when any of that fails.
        """
        h = self.coordinate_series([vec])[0]
        coords = []
        for hj in h:
            if hj.is_zero_to_prec:
                coords.append(Poly.zero(self.k))
                continue
            if hj.prec < margin:
                raise ReconstructionError(
                    f"coordinate precision O(w^{hj.prec + 1}) leaves no certification margin"
                )
            if hj.valuation() < -degbound:
                raise ReconstructionError(
                    f"coordinate degree {-hj.valuation()} exceeds bound {degbound}"
                )
            cmap = dict(hj.coeff_items())
            for j, c in cmap.items():
                if j > 0:
                    raise ReconstructionError(
                        f"coordinate has a tail term w^{j}; not an R element at this precision"
                    )
            coeffs = [cmap.get(-s, 0) for s in range(0, -hj.valuation() + 1)]
            coords.append(Poly(self.k, coeffs))
        # round-trip certificate
        out = tuple(coords)
        back = self.embed_coords(out, min(self.prec, min(z.prec for z in vec)))
        for z, w in zip(vec, back):
            if not (z - w).is_zero_to_prec:
                raise ReconstructionError("re-embedding mismatch; reconstruction rejected")
        return out


class RSolver:
    """Window solver against the R side.

    Given per-place floors and cutoffs, solves z = xi + (tail above lo)
    with xi in R of bounded coordinate degree, i.e. reduces points of
    K_infinity into the window modulo E(R).
    """

    def __init__(self, ctx, los, floors, degbound, prec, col_prec=None):
        self.ctx = ctx
        self.los = list(los)
        self.floors = list(floors)
        self.degbound = degbound
        self.prec = prec
        self.col_prec = col_prec if col_prec is not None else prec
        self.labels = ctx.r_basis_labels(degbound)
        self.window = PlaceWindows(ctx.places, self.floors, [lo - 1 for lo in self.los])
        self.cols = []
        for j, s in self.labels:
            vec = ctx.embed_monomial(j, s, self.col_prec)
            for z, fl in zip(vec, self.floors):
                if not z.is_zero_to_prec and z.valuation() < fl:
                    raise PrecisionError(
                        f"R basis element x^{j} t^{s} reaches u^{z.valuation()}"
                        f" below the solver floor {fl}"
                    )
            self.cols.append(vec)
        self._solver = None

    def _pack(self, vec):
        if self.window.fast_packable:
            return self.window.packed(vec)
        return self.window.coords(vec, strict_below=False)

    def _get_solver(self):
        if self._solver is None:
            from .linalg import ColumnSolver

            packed = [self._pack(v) for v in self.cols]
            self._solver = ColumnSolver(self.ctx.k, packed, self.window.dim)
        return self._solver

    def reduce_many(self, vecs):
        """Reduce each vector mod R into the window; None when infeasible."""
        solver = self._get_solver()
        rhs = []
        for v in vecs:
            for P, z, fl in zip(self.ctx.places, v, self.floors):
                if not z.is_zero_to_prec and z.valuation() < fl:
                    raise PrecisionError(
                        f"vector valuation {z.valuation()} below solver floor {fl}"
                    )
            rhs.append(self._pack(v))
        sols = [solver.solve(b) for b in rhs]
        out = []
        for v, sol in zip(vecs, sols):
            if sol is None:
                out.append(None)
                continue
            coords = [Poly.zero(self.ctx.k)] * self.ctx.d
            for (j, s), c in zip(self.labels, sol):
                if c:
                    coords[j] = coords[j] + Poly.t_pow(self.ctx.k, s, c)
            xi = tuple(coords)
            redprec = min(self.col_prec, min(z.prec for z in v))
            red = self.ctx.vec_sub(v, self.ctx.embed_coords(xi, redprec))
            for z, lo in zip(red, self.los):
                if not z.is_zero_to_prec and z.valuation() < lo:
                    raise CarlitzError("reduction left support below the window")
            out.append((xi, red))
        return out

    def integral_window_basis(self):
        """k-basis of {xi in R_degbound : val_v(xi) >= lo_v at every place}."""
        kern = self._get_solver().kernel()
        out = []
        for c in kern:
            coords = [Poly.zero(self.ctx.k)] * self.ctx.d
            for (j, s), cv in zip(self.labels, c):
                if cv:
                    coords[j] = coords[j] + Poly.t_pow(self.ctx.k, s, cv)
            out.append(tuple(coords))
        return out

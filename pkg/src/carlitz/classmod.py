"""The class module H_R and the Euler characteristic valuation check.

H_R is computed as the paper's quotient E(K_inf) / (exp(Lie) + E(R)),
realized on a finite window: first quotient by a deep ball (inside which
exp is an isomorphism, so the ball is made of exponentials) and by the
integral points reduced into the window, then keep quotienting by
exponentials of progressively deeper arguments until the dimension
stabilizes and the induced t-action maps the quotient relations to zero.
The Fitting generator |H_R| is the characteristic polynomial of the
t-action.

``euler_char_check`` computes the regulator valuation prediction
chi(lattice side) - chi(R side) with both Euler characteristics obtained
by window linear algebra.  It shares nothing with the determinant
computation or with the class-module refinement, so the three numbers
deg |H_R| = dim H_R, v(Reg) and the prediction cross-certify each other.
"""

from .errors import CarlitzError, StabilizationError
from .expmap import exp_eval
from .laurent import Laurent
from .linalg import SpanReducer, kernel_basis
from .normalforms import FiniteTModule, charpoly
from .poly import Poly
from .windows import PlaceWindows, RSolver, block_degree, vector_blocks


class ClassModule:
    """H_R with its t-action, Fitting generator and window audit data."""

    def __init__(self, module, fitting, audit):
        self.module = module
        self.fitting = fitting
        self.audit = audit

    @property
    def dim(self):
        return self.module.dim

    def __repr__(self):
        from .poly import format_poly

        return f"ClassModule(dim={self.dim}, |H|={format_poly(self.fitting)})"


def _ball_tops(ctx):
    tops = []
    for b in ctx.balls:
        tops.append(0 if b is None else b)
    return tops


def class_module(ctx, prec=None, max_rounds=6, start_depth=2):
    """Compute H_R by stabilized window quotients.

    Raises StabilizationError when the dimension or the t-stability of the
    relations does not settle within ``max_rounds`` enlargements.
    """
    prec = prec or ctx.prec
    s0 = _ball_tops(ctx)
    prev = None
    for rnd in range(max_rounds):
        depth = start_depth + rnd
        result = _class_module_once(ctx, s0, depth, prec)
        if result is None:
            prev = None
            continue
        dim, tmat, audit = result
        module = FiniteTModule(ctx.k, tmat)
        fit = module.fitting_generator()
        if prev is not None and prev == (dim, fit):
            audit["stable_at_depth"] = depth
            return ClassModule(module, fit, audit)
        prev = (dim, fit)
    raise StabilizationError(
        f"class module dimension did not stabilize in {max_rounds} rounds"
    )


def _class_module_once(ctx, s0, depth, prec):
    k = ctx.k
    places = ctx.places
    emax = max(P.e for P in places)
    lo = [s - depth for s in s0]
    mlo = [s - depth - emax for s in s0]
    V = PlaceWindows(places, lo, [s - 1 for s in s0])
    if V.dim == 0:
        return 0, [], {}
    shallow = max(s0) + 8
    degb = ctx.integral_degree_bound(depth * emax + 8)

    span = SpanReducer(k, V.dim)
    # (a) integral points inside the window
    rw = RSolver(
        ctx, lo, _r_floors(ctx, list(lo), degb), degb, prec, col_prec=shallow
    )
    for coords in rw.integral_window_basis():
        vec = ctx.embed_coords(coords, prec)
        span.add(V.coords(vec))
    # (b) exponentials of window arguments
    images = []
    for pi, P in enumerate(places):
        emb = P.emb
        for i in range(mlo[pi], s0[pi]):
            for b in emb.res_basis():
                lam = Laurent.monomial(emb.res_field, b, i, prec)
                img = exp_eval(emb, ctx.exp, lam, prec - 4)
                vec = [Laurent.zero(Q.res_field, prec - 4) for Q in places]
                vec[pi] = img
                images.append(vec)
    # the reducer must reach below both Frobenius images of the window and
    # whatever exponentials overflow it
    floor0 = [ctx.k.q * l for l in lo]
    for vec in images:
        for pi, z in enumerate(vec):
            if not z.is_zero_to_prec:
                floor0[pi] = min(floor0[pi], z.valuation())
    floors = [f - 1 for f in floor0]
    degb_red = degb + max(-min(floors) // min(P.e for P in places), 0)
    reducer = RSolver(
        ctx, lo, _r_floors(ctx, floors, degb_red), degb_red, prec, col_prec=shallow
    )
    deep_imgs = []
    for vec in images:
        if all(z.is_zero_to_prec or z.valuation() >= l for z, l in zip(vec, lo)):
            span.add(V.coords(vec))
        else:
            deep_imgs.append(vec)
    if deep_imgs:
        for item in reducer.reduce_many(deep_imgs):
            if item is None:
                return None  # reducer window too small this round
            span.add(V.coords(item[1]))
    dim = V.dim - span.rank
    # quotient basis and t-action
    qcoords = span.quotient_coords()
    index = {c: i for i, c in enumerate(qcoords)}

    def act(vec_coords):
        z = V.element(vec_coords, prec - 4)
        img = ctx.phi_t_vec(z, prec - 8)
        out = reducer.reduce_many([img])[0]
        if out is None:
            return None
        red = span.reduce(V.coords(out[1]))
        return red

    tmat = [[0] * dim for _ in range(dim)]
    for j, c in enumerate(qcoords):
        unit = [0] * V.dim
        unit[c] = 1
        red = act(tuple(unit))
        if red is None:
            return None
        for cc, val in enumerate(red):
            if val:
                if cc not in index:
                    raise CarlitzError("quotient reduction left a pivot coordinate")
                tmat[index[cc]][j] = val
    # t-stability of the relation span
    for g in list(span.pivot_rows.values()) if k.q != 2 else _bit_rows(span, V.dim):
        red = act(tuple(g))
        if red is None:
            return None
        if any(red):
            return None  # span not yet t-stable; enlarge
    audit = {
        "window_lo": list(lo),
        "window_hi": [s - 1 for s in s0],
        "exp_window_lo": list(mlo),
        "depth": depth,
        "dim": dim,
    }
    return dim, tmat, audit


def _bit_rows(span, ncols):
    from .linalg import _unpack_row

    return [_unpack_row(v, ncols) for v in span.pivot_rows.values()]


def _exp_floor(ctx, place, arg_lo):
    """Lower bound for the support of exp on {val >= arg_lo}."""
    q = ctx.k.q
    low = arg_lo
    i, past = 0, 0
    while past < 4 and i < 400:
        i += 1
        vb = ctx.exp.val_bound(i)
        if vb is None:
            past += 1
            continue
        tv = place.e * vb + q**i * arg_lo
        if tv < low:
            low = tv
            past = 0
        else:
            past += 1
    return low


def _r_floors(ctx, floors, degb):
    """Lower the floors to cover every R basis embedding used."""
    out = list(floors)
    for pi, P in enumerate(ctx.places):
        xmin = min(
            (z.val_lower_bound() for z in P.x_powers(ctx.d - 1)), default=0
        )
        out[pi] = min(out[pi], xmin - P.e * degb)
    return out


# -- Euler characteristic route ----------------------------------------------


def _lattice_box_members(ctx, lat, bound_deg, floor, prec):
    """Vectors t^s * b_i with block degree <= bound_deg, as components."""
    out = []
    for i, v in enumerate(lat.vectors):
        base = lat.degrees[i]
        s = 0
        while base + s <= bound_deg:
            vec = []
            for P, z in zip(ctx.places, v):
                emb = P.emb
                sc = emb.res_field.pow(emb.c, s)
                vec.append(z.shift(-emb.e * s).scale(sc))
            out.append(vec)
            s += 1
    return out


def _span_dim_with_val_floor(ctx, vecs, lo):
    """dim of the k-span of vectors having val >= lo at every place."""
    k = ctx.k
    if not vecs:
        return 0, []
    floor = []
    for pi, P in enumerate(ctx.places):
        vals = [v[pi].valuation() for v in vecs if not v[pi].is_zero_to_prec]
        floor.append(min(vals + [lo[pi]]))
    below = PlaceWindows(ctx.places, floor, [l - 1 for l in lo])
    rows = []
    for r in range(below.dim):
        rows.append(tuple(below.coords(v, strict_below=False)[r] for v in vecs))
    kern = kernel_basis(k, rows, len(vecs))
    members = []
    for c in kern:
        acc = None
        for ci, coef in enumerate(c):
            if not coef:
                continue
            term = [z.scale(coef) for z in vecs[ci]]
            acc = term if acc is None else ctx.vec_add(acc, term)
        if acc is not None:
            members.append(acc)
    return len(kern), members


def euler_char_check(ctx, lat, prec=None):
    """Predicted regulator valuation chi(lattice) - chi(R), by windows.

    Kernels are intersections with the ball L = {val >= ball start};
    cokernels are window quotients of Lie(K_inf) by L plus the module.
    Depths are enlarged until both characteristics stabilize.
    """
    prec = prec or ctx.prec
    s0 = _ball_tops(ctx)
    prev = None
    for depth in range(2, 9):
        lo = [s - depth for s in s0]
        chi_l = _chi_lattice(ctx, lat, s0, lo, prec)
        chi_r = _chi_rside(ctx, s0, lo, depth, prec)
        cur = chi_l - chi_r
        if prev == cur:
            return cur
        prev = cur
    raise StabilizationError("Euler characteristics did not stabilize")


def _deg_bound_for_floor(places, los):
    """Block degree bound for elements with val_v >= lo_v everywhere."""
    bound = 0
    for P, lo in zip(places, los):
        bound = max(bound, -((lo - (P.e - 1)) // P.e))
    return max(bound, 0)


def _chi_lattice(ctx, lat, s0, lo, prec):
    # ker: lattice points inside the ball
    bound_ker = _deg_bound_for_floor(ctx.places, s0)
    cand = _lattice_box_members(ctx, lat, bound_ker, s0, prec)
    ker_dim, _ = _span_dim_with_val_floor(ctx, cand, s0)
    # coker: window modulo truncations of lattice points above the floor
    V = PlaceWindows(ctx.places, lo, [s - 1 for s in s0])
    bound_cok = _deg_bound_for_floor(ctx.places, lo)
    cand2 = _lattice_box_members(ctx, lat, bound_cok, lo, prec)
    _, members = _span_dim_with_val_floor(ctx, cand2, lo)
    span = SpanReducer(ctx.k, V.dim)
    for m in members:
        span.add(V.coords(m))
    coker = V.dim - span.rank
    return ker_dim - coker


def _chi_rside(ctx, s0, lo, depth, prec):
    emax = max(P.e for P in ctx.places)
    degb = ctx.integral_degree_bound(depth * emax + 8)
    shallow = max(s0) + 8
    # ker: R inside the ball
    rs_ball = RSolver(
        ctx, s0, _r_floors(ctx, [min(s0)] * len(s0), degb), degb, prec,
        col_prec=shallow,
    )
    ker_dim = len(rs_ball.integral_window_basis())
    # coker: window modulo truncations of R points above the floor
    V = PlaceWindows(ctx.places, lo, [s - 1 for s in s0])
    rs_w = RSolver(
        ctx, lo, _r_floors(ctx, [min(lo)] * len(lo), degb), degb, prec,
        col_prec=shallow,
    )
    span = SpanReducer(ctx.k, V.dim)
    for coords in rs_w.integral_window_basis():
        vec = ctx.embed_coords(coords, prec)
        span.add(V.coords(vec))
    coker = V.dim - span.rank
    return ker_dim - coker

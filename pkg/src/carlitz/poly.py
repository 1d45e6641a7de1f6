"""Dense univariate polynomials over a finite field.

Coefficients are stored ascending with no trailing zeros, so ``()`` is the
zero polynomial.  Over F_2 the hot paths (multiplication, division, gcd)
run on bit-packed integers.

The variable is called ``t`` throughout the library; rendering follows the
grammar ``c*t^k`` with terms joined by ``+`` in descending degree, e.g.
``t^5+t^2+1``.
"""

import random

from .ffield import GF, FiniteField


def _pack(coeffs):
    v = 0
    for i, c in enumerate(coeffs):
        if c:
            v |= 1 << i
    return v


def _unpack(v):
    out = []
    while v:
        out.append(v & 1)
        v >>= 1
    return tuple(out)


def _clmul(x, y):
    r = 0
    while x:
        lsb = x & -x
        r ^= y << (lsb.bit_length() - 1)
        x ^= lsb
    return r


def _cldivmod(a, b):
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    db = b.bit_length() - 1
    q = 0
    while a.bit_length() - 1 >= db and a:
        shift = a.bit_length() - 1 - db
        q |= 1 << shift
        a ^= b << shift
    return q, a


def _kronecker_mul(p, a, b):
    """Multiply prime-field coefficient vectors via integer packing.

    Coefficients sit in byte-aligned slots wide enough that convolution
    sums cannot overflow, so one big-int product carries the whole
    convolution and packing stays linear.
    """
    n = min(len(a), len(b))
    slot = ((n * (p - 1) * (p - 1)).bit_length() + 8) // 8  # bytes per slot
    ba = bytearray(len(a) * slot)
    for i, c in enumerate(a):
        if c:
            ba[i * slot] = c & 0xFF
            if c >> 8:
                ba[i * slot + 1] = c >> 8
    bb = bytearray(len(b) * slot)
    for i, c in enumerate(b):
        if c:
            bb[i * slot] = c & 0xFF
            if c >> 8:
                bb[i * slot + 1] = c >> 8
    prod = int.from_bytes(bytes(ba), "little") * int.from_bytes(bytes(bb), "little")
    m = len(a) + len(b) - 1
    raw = prod.to_bytes(m * slot + 16, "little")
    return [
        int.from_bytes(raw[i * slot : (i + 1) * slot], "little") % p for i in range(m)
    ]


class Poly:
    """Immutable polynomial over a FiniteField."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(field):
        return Poly(field, ())

    @staticmethod
    def one(field):
        return Poly(field, (1,))

    @staticmethod
    def const(field, c):
        return Poly(field, (c,))

    @staticmethod
    def t(field):
        return Poly(field, (0, 1))

    @staticmethod
    def t_pow(field, k, c=1):
        return Poly(field, (0,) * k + (c,))

    @staticmethod
    def random(field, deg, rng):
        c = [rng.randrange(field.q) for _ in range(deg)] + [
            rng.randrange(1, field.q)
        ]
        return Poly(field, c)

    # -- basic structure --------------------------------------------------

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def degree(self):
        """Degree, with deg 0 = -1 by convention."""
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        F = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return Poly(F, out)

    def __neg__(self):
        F = self.field
        return Poly(F, tuple(F.neg(c) for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        F = self.field
        if isinstance(other, int):
            return Poly(F, tuple(F.mul(c, other) for c in self.coeffs))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(F, ())
        if F.q == 2:
            return Poly(F, _unpack(_clmul(_pack(a), _pack(b))))
        if F.base is None and len(a) * len(b) > 4096:
            return Poly(F, _kronecker_mul(F.p, a, b))
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
        return Poly(F, out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        F = self.field
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        if F.q == 2:
            q, r = _cldivmod(_pack(self.coeffs), _pack(other.coeffs))
            return Poly(F, _unpack(q)), Poly(F, _unpack(r))
        a = list(self.coeffs)
        b = other.coeffs
        db = len(b) - 1
        inv_lead = F.inv(b[-1])
        q = [0] * max(len(a) - db, 0)
        while len(a) - 1 >= db and a:
            c = F.mul(a[-1], inv_lead)
            shift = len(a) - 1 - db
            q[shift] = c
            for i, bi in enumerate(b):
                if bi:
                    a[shift + i] = F.sub(a[shift + i], F.mul(c, bi))
            while a and a[-1] == 0:
                a.pop()
        return Poly(F, q), Poly(F, a)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        r = Poly.one(self.field)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def powmod(self, n, m):
        r = Poly.one(self.field)
        b = self % m
        while n:
            if n & 1:
                r = (r * b) % m
            b = (b * b) % m
            n >>= 1
        return r

    def monic(self):
        if self.is_zero or self.is_monic:
            return self
        F = self.field
        inv = F.inv(self.lead)
        return Poly(F, tuple(F.mul(c, inv) for c in self.coeffs))

    def derivative(self):
        F = self.field
        out = []
        for i in range(1, len(self.coeffs)):
            out.append(F.mul(self.coeffs[i], i % F.p))
        return Poly(F, out)

    def shift(self, k):
        """Multiply by t**k."""
        if self.is_zero:
            return self
        return Poly(self.field, (0,) * k + self.coeffs)

    def __call__(self, a):
        """Evaluate at a field element."""
        F = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, a), c)
        return acc

    def map_coeffs(self, fn, field=None):
        return Poly(field or self.field, tuple(fn(c) for c in self.coeffs))

    # -- display -----------------------------------------------------------

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({self.field!r}, {format_poly(self)!r})"


def format_poly(f, var="t"):
    if f.is_zero:
        return "0"
    F = f.field
    terms = []
    for k in range(f.degree, -1, -1):
        c = f[k]
        if c == 0:
            continue
        cs = F.format_element(c)
        if k == 0:
            terms.append(cs)
        else:
            tk = var if k == 1 else f"{var}^{k}"
            terms.append(tk if cs == "1" else f"{cs}*{tk}")
    return "+".join(terms)


def parse_poly(field, text, var="t"):
    """Parse the term grammar ``c*t^k`` joined by ``+``."""
    text = text.replace(" ", "")
    if text in ("", "0"):
        return Poly.zero(field)
    coeffs = {}
    for term in text.split("+"):
        if not term:
            raise ValueError(f"empty term in {text!r}")
        if "*" in term:
            cpart, vpart = term.split("*", 1)
        elif term.startswith(var):
            cpart, vpart = "1", term
        else:
            cpart, vpart = term, ""
        if vpart == "":
            k = 0
        elif vpart == var:
            k = 1
        elif vpart.startswith(var + "^"):
            k = int(vpart[len(var) + 1 :])
        else:
            raise ValueError(f"bad term {term!r}")
        c = field.parse_element(cpart)
        coeffs[k] = field.add(coeffs.get(k, 0), c)
    out = [0] * (max(coeffs) + 1)
    for k, c in coeffs.items():
        out[k] = c
    return Poly(field, out)


# -- gcd family -------------------------------------------------------------


def poly_gcd(a, b):
    """Monic greatest common divisor.  Raises if both inputs are zero."""
    if a.is_zero and b.is_zero:
        raise ValueError("gcd(0, 0) is undefined")
    while not b.is_zero:
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a, b):
    """Extended gcd: returns (g, s, u) with s*a + u*b = g, g monic."""
    F = a.field
    r0, r1 = a, b
    s0, s1 = Poly.one(F), Poly.zero(F)
    t0, t1 = Poly.zero(F), Poly.one(F)
    while not r1.is_zero:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero:
        raise ValueError("gcd(0, 0) is undefined")
    c = F.inv(r0.lead)
    return r0.monic(), s0 * c, t0 * c


def poly_invmod(a, m):
    g, s, _ = poly_xgcd(a, m)
    if g.degree != 0:
        raise ZeroDivisionError(f"{a} is not invertible modulo {m}")
    return s % m


# -- irreducibility and factorization ---------------------------------------


def is_irreducible(f):
    """Rabin irreducibility test."""
    n = f.degree
    if n <= 0:
        return False
    if n == 1:
        return True
    F = f.field
    q = F.q
    x = Poly.t(F)
    xq = x.powmod(q**n, f)
    if xq != x % f:
        return False
    from .ffield import _factor_int

    for ell in sorted(set(_factor_int(n))):
        h = x.powmod(q ** (n // ell), f) - x
        if poly_gcd(f, h).degree != 0:
            return False
    return True


_IRRED_CACHE = {}


def irreducible_polys(field, degree):
    """Monic irreducibles of exact degree, ascending by coefficient code.

    Enumerated by trial division against the cached irreducibles of degree
    at most degree/2, which is a complete test and much cheaper than a
    Rabin test per candidate.
    """
    if degree < 1:
        return
    key = (field.signature(), degree)
    cached = _IRRED_CACHE.get(key)
    if cached is not None:
        yield from cached
        return
    q = field.q
    smalls = []
    for d in range(1, degree // 2 + 1):
        smalls.extend(irreducible_polys(field, d))
    out = []
    for code in range(q**degree):
        digits = []
        c = code
        for _ in range(degree):
            digits.append(c % q)
            c //= q
        f = Poly(field, digits + [1])
        if degree > 1 and f[0] == 0:
            continue
        if all(not (f % g).is_zero for g in smalls):
            out.append(f)
            yield f
    _IRRED_CACHE[key] = out


def _pth_root(f):
    F = f.field
    p = F.p
    root_exp = F.q // p  # a^(q/p) is the p-th root in F_q
    out = []
    for i in range(0, len(f.coeffs), p):
        out.append(F.pow(f.coeffs[i], root_exp) if f.coeffs[i] else 0)
    return Poly(F, out)


def _ddf(f):
    """Distinct-degree split of a monic squarefree f: list of (degree, product)."""
    F = f.field
    q = F.q
    out = []
    x = Poly.t(F)
    w = x % f
    i = 0
    while f.degree > 0:
        i += 1
        if 2 * i > f.degree:
            out.append((f.degree, f))
            break
        w = w.powmod(q, f)
        g = poly_gcd(f, w - x)
        if g.degree > 0:
            out.append((i, g))
            f = f // g
            w = w % f
    return out


def _edf(f, d, rng):
    """Split a product of irreducibles of equal degree d."""
    F = f.field
    if f.degree == d:
        return [f]
    q = F.q
    while True:
        r = Poly(F, [rng.randrange(q) for _ in range(f.degree)])
        if r.degree < 1:
            continue
        if F.p == 2:
            # trace map over F_2 kernel split
            s = Poly.zero(F)
            w = r % f
            for _ in range(d * F.degree_over_prime):
                s = s + w
                w = w.powmod(2, f)
            g = poly_gcd(f, s) if not s.is_zero else Poly.one(F)
        else:
            s = r.powmod((q**d - 1) // 2, f)
            g = poly_gcd(f, s - Poly.one(F))
        if 0 < g.degree < f.degree:
            return _edf(g, d, rng) + _edf(f // g, d, rng)


def poly_factor(f):
    """Factor into monic irreducibles.

    Returns a list of (irreducible, multiplicity) pairs sorted by degree
    then by coefficient code; the product of the powers times the leading
    coefficient reproduces the input.  Raises on zero input.
    """
    if f.is_zero:
        raise ValueError("cannot factor the zero polynomial")
    F = f.field
    rng = random.Random(hash((F.q, f.coeffs)) & 0xFFFFFFFF)
    found = set()
    work = f.monic()
    while work.degree > 0:
        d = work.derivative()
        if d.is_zero:
            # work is a p-th power; its root has the same irreducible factors
            work = _pth_root(work)
            continue
        sqfree = work // poly_gcd(work, d)
        for deg, prod in _ddf(sqfree):
            found.update(_edf(prod, deg, rng))
        for g in found:
            while work.degree > 0 and (work % g).is_zero:
                work = work // g
    out = []
    mono = f.monic()
    for g in found:
        m = 0
        while (mono % g).is_zero:
            mono = mono // g
            m += 1
        if m:
            out.append((g, m))
    if mono.degree != 0:
        raise ArithmeticError("factorization incomplete")
    out.sort(key=lambda gm: (gm[0].degree, gm[0].coeffs))
    return out


# -- rational functions ------------------------------------------------------


class RatFunc:
    """Reduced fraction of polynomials with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce=True):
        if den is None:
            den = Poly.one(num.field)
        if den.is_zero:
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce and not num.is_zero and num.degree > 0 and den.degree > 0:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
        if num.is_zero:
            den = Poly.one(num.field)
        c = den.lead
        if c != 1:
            F = num.field
            inv = F.inv(c)
            num = num * inv
            den = den * inv
        self.num = num
        self.den = den

    @property
    def field(self):
        return self.num.field

    @property
    def is_zero(self):
        return self.num.is_zero

    def valuation_at_infinity(self):
        """deg den - deg num; the 1/t-adic valuation.  None for zero."""
        if self.is_zero:
            return None
        return self.den.degree - self.num.degree

    def __add__(self, other):
        other = self._coerce(other)
        return RatFunc(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        other = self._coerce(other)
        return RatFunc(self.num * other.den, self.den * other.num)

    def inv(self):
        return RatFunc(self.den, self.num)

    def __pow__(self, n):
        if n < 0:
            return self.inv() ** (-n)
        return RatFunc(self.num**n, self.den**n, reduce=False)

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc(other)
        raise TypeError(f"cannot coerce {other!r}")

    def __eq__(self, other):
        return (
            isinstance(other, RatFunc)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den.degree == 0:
            return format_poly(self.num)
        return f"({format_poly(self.num)})/({format_poly(self.den)})"

    __repr__ = __str__


def carlitz_d(field, imax):
    """The denominators D_i: D_0 = 1, D_i = (t^{q^i} - t) * D_{i-1}^q."""
    q = field.q
    t = Poly.t(field)
    out = [Poly.one(field)]
    for i in range(1, imax + 1):
        out.append((Poly.t_pow(field, q**i) - t) * out[-1] ** q)
    return out


def carlitz_l(field, imax):
    """The factorials L_i: L_0 = 1, L_i = (t^{q^i} - t) * L_{i-1}."""
    q = field.q
    t = Poly.t(field)
    out = [Poly.one(field)]
    for i in range(1, imax + 1):
        out.append((Poly.t_pow(field, q**i) - t) * out[-1])
    return out

"""Finite fields F_q with elements packed as plain integers.

A field element is an int in ``range(q)``.  For a prime field this is the
residue itself; for an extension of degree ``g`` over a base field with
``q0`` elements, the int is read in base ``q0`` and the digits are the
coordinates with respect to the power basis of the ring generator.

Fields keep multiplication tables in discrete-log form (a generator power
table plus its inverse), so all arithmetic is table lookups.  This caps the
supported size at ``_TABLE_LIMIT`` elements, which covers every field this
library needs: the scalars F_q of a Carlitz module and residue fields of
places and primes of small degree.
"""

from functools import lru_cache

from .errors import CarlitzError

_TABLE_LIMIT = 8192


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _factor_int(n):
    """Prime factors of a small positive integer, with multiplicity."""
    out = []
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _prime_power(q):
    for p in _factor_int(q)[:1]:
        e = 0
        m = q
        while m % p == 0:
            m //= p
            e += 1
        if m == 1:
            return p, e
    raise ValueError(f"{q} is not a prime power")


class FiniteField:
    """A finite field of q elements.

    Do not call the constructor directly in normal use; ``GF(q)`` returns
    the canonical field with the lexicographically minimal modulus, and
    ``field.extension(modulus)`` builds a named extension.
    """

    def __init__(self, p, base=None, modulus=None, name="g"):
        self.p = p
        self.base = base
        self.name = name
        self._sig = None
        if base is None:
            if not _is_prime(p):
                raise ValueError(f"characteristic {p} is not prime")
            self.q = p
            self.deg = 1
            self.modulus = None
        else:
            if p != base.p:
                raise ValueError("characteristic mismatch")
            if modulus is None or len(modulus) < 3 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree >= 2")
            if not _poly_is_irreducible(base, modulus):
                raise ValueError("extension modulus is reducible")
            self.modulus = tuple(modulus)
            self.deg = len(modulus) - 1
            self.q = base.q ** self.deg
        if self.q > _TABLE_LIMIT:
            raise CarlitzError(f"field size {self.q} exceeds table limit")
        self._build_tables()

    # -- packed digit helpers -------------------------------------------

    def digits(self, a):
        """Coordinates of a over the base field (ascending powers of g)."""
        if self.base is None:
            return (a,)
        q0 = self.base.q
        out = []
        for _ in range(self.deg):
            out.append(a % q0)
            a //= q0
        return tuple(out)

    def from_digits(self, digits):
        if self.base is None:
            return digits[0] % self.p
        q0 = self.base.q
        a = 0
        for d in reversed(digits):
            a = a * q0 + d
        return a

    # -- raw arithmetic used to bootstrap the tables --------------------

    def _raw_add(self, a, b):
        if self.base is None:
            return (a + b) % self.p
        da, db = self.digits(a), self.digits(b)
        return self.from_digits(tuple(self.base.add(x, y) for x, y in zip(da, db)))

    def _raw_mul(self, a, b):
        if self.base is None:
            return (a * b) % self.p
        base = self.base
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.deg - 1)
        for i, x in enumerate(da):
            if x == 0:
                continue
            for j, y in enumerate(db):
                if y:
                    prod[i + j] = base.add(prod[i + j], base._raw_mul(x, y))
        # reduce modulo the defining polynomial
        m = self.modulus
        for k in range(len(prod) - 1, self.deg - 1, -1):
            c = prod[k]
            if c == 0:
                continue
            prod[k] = 0
            for i in range(self.deg):
                if m[i]:
                    prod[k - self.deg + i] = base.add(
                        prod[k - self.deg + i], base.neg(base._raw_mul(c, m[i]))
                    )
        return self.from_digits(tuple(prod[: self.deg]))

    def _build_tables(self):
        q = self.q
        # discrete log tables on the unit group
        order = q - 1
        prime_divs = sorted(set(_factor_int(order))) if order > 1 else []
        gen = None
        for cand in range(1, q):
            if self._raw_pow(cand, order) != 1:
                continue
            if all(self._raw_pow(cand, order // ell) != 1 for ell in prime_divs):
                gen = cand
                break
        if gen is None:
            raise CarlitzError("no multiplicative generator found")
        self.generator = gen
        exp = [1] * order
        acc = 1
        for i in range(1, order):
            acc = self._raw_mul(acc, gen)
            exp[i] = acc
        log = [0] * q
        for i, v in enumerate(exp):
            log[v] = i
        self._exp = exp
        self._log = log
        # Zech logarithms: addition as zech[log b - log a] without a q^2 table
        self._zech = None
        if self.base is not None:
            zech = [None] * order
            for z in range(order):
                s = self._raw_add(1, exp[z])
                zech[z] = None if s == 0 else log[s]
            self._zech = zech

    def _raw_pow(self, a, n):
        r = 1
        while n:
            if n & 1:
                r = self._raw_mul(r, a)
            a = self._raw_mul(a, a)
            n >>= 1
        return r

    # -- public arithmetic ----------------------------------------------

    def add(self, a, b):
        if self.base is None:
            return (a + b) % self.p
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = self._log[a], self._log[b]
        s = self._zech[(lb - la) % (self.q - 1)]
        if s is None:
            return 0
        return self._exp[(la + s) % (self.q - 1)]

    def neg(self, a):
        if self.base is None:
            return (-a) % self.p
        return self.from_digits(tuple(self.base.neg(x) for x in self.digits(a)))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero field element")
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n):
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("inverse of zero field element")
            return 0 if n else 1
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def frob(self, a):
        """The p-th power map."""
        return self.pow(a, self.p)

    def qpow(self, a, q):
        return self.pow(a, q)

    def dlog(self, a):
        if a == 0:
            raise ZeroDivisionError("discrete log of zero")
        return self._log[a]

    def nth_roots(self, a, n):
        """All solutions x of x**n = a, in increasing int order."""
        if a == 0:
            return [0]
        order = self.q - 1
        la = self._log[a]
        import math

        g = math.gcd(n, order)
        if la % g:
            return []
        # one solution of n*x = la (mod order), then the full coset
        n_, la_, ord_ = n // g, la // g, order // g
        x0 = (la_ * pow(n_, -1, ord_)) % ord_
        return sorted(self._exp[(x0 + k * ord_) % order] for k in range(g))

    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)

    # -- structure -------------------------------------------------------

    @property
    def degree_over_prime(self):
        return self.deg if self.base is None else self.deg * self.base.degree_over_prime

    @property
    def gen_ring(self):
        """The class of the modulus variable, 0 for a prime field."""
        if self.base is None:
            return 0
        return self.from_digits((0, 1) + (0,) * (self.deg - 2))

    def signature(self):
        if self._sig is None:
            if self.base is None:
                self._sig = (self.p,)
            else:
                self._sig = self.base.signature() + (self.modulus,)
        return self._sig

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, FiniteField) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    def __repr__(self):
        return f"GF({self.q})"

    def extension(self, modulus, name="g"):
        """Extension of self defined by a monic modulus (ascending coeffs)."""
        return FiniteField(self.p, base=self, modulus=tuple(modulus), name=name)

    def canonical_extension(self, degree, name="g"):
        """Degree-n extension with the lexicographically minimal modulus."""
        if degree == 1:
            return self
        return FiniteField(
            self.p, base=self, modulus=_minimal_modulus(self, degree), name=name
        )

    def format_element(self, a):
        """Render an element: prime residues as ints, others as powers g^j."""
        if self.base is None:
            return str(a)
        if a == 0:
            return "0"
        j = self._log[a]
        if j == 0:
            return "1"
        if j == 1:
            return self.name
        return f"{self.name}^{j}"

    def parse_element(self, text):
        text = text.strip()
        if self.base is None:
            return int(text) % self.p
        if text == "0":
            return 0
        if text == "1":
            return 1
        if text == self.name:
            return self._exp[1]
        if text.startswith(self.name + "^"):
            return self._exp[int(text[len(self.name) + 1 :]) % (self.q - 1)]
        return int(text) % self.p


def _minimal_modulus(base, degree):
    """Lexicographically minimal monic irreducible of given degree.

    Minimality is on the ascending coefficient tuple (c_0, ..., c_{g-1}),
    each coefficient compared by its integer code, so the choice is
    reproducible across runs and versions.
    """
    q0 = base.q
    for code in range(q0**degree):
        digits = []
        c = code
        for _ in range(degree):
            digits.append(c % q0)
            c //= q0
        coeffs = tuple(digits) + (1,)
        if _poly_is_irreducible(base, coeffs):
            return coeffs
    raise CarlitzError("no irreducible modulus found")


# Minimal polynomial helpers over an arbitrary FiniteField, used only for
# bootstrapping moduli; the main Poly class lives in poly.py.


def _ptrim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _pmul(F, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _ptrim(out)


def _pmod(F, a, m):
    a = list(a)
    dm = len(m) - 1
    inv_lead = F.inv(m[-1])
    while len(a) - 1 >= dm and a:
        c = F.mul(a[-1], inv_lead)
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            if mi:
                a[shift + i] = F.sub(a[shift + i], F.mul(c, mi))
        _ptrim(a)
    return a


def _pgcd(F, a, b):
    a, b = list(a), list(b)
    while b:
        a, b = b, _pmod(F, a, b)
    return a


def _ppowmod(F, a, n, m):
    r = [1]
    a = _pmod(F, list(a), m)
    while n:
        if n & 1:
            r = _pmod(F, _pmul(F, r, a), m)
        a = _pmod(F, _pmul(F, a, a), m)
        n >>= 1
    return r


def _poly_is_irreducible(F, coeffs):
    m = list(coeffs)
    n = len(m) - 1
    if n <= 0:
        return False
    x = [0, 1]
    # x^(q^n) == x (mod m)
    xq = _ppowmod(F, x, F.q**n, m)
    if _ptrim([F.sub(a, b) for a, b in zip(xq + [0] * 2, x + [0] * len(xq))]):
        return False
    for ell in sorted(set(_factor_int(n))):
        xq = _ppowmod(F, x, F.q ** (n // ell), m)
        diff = [F.sub(a, b) for a, b in zip(xq + [0] * 2, x + [0] * len(xq))]
        if len(_pgcd(F, m, _ptrim(diff))) - 1 != 0:
            return False
    return True


@lru_cache(maxsize=None)
def GF(q, name="g"):
    """The canonical field with q elements.

    For q = p**e with e > 1 the modulus is the lexicographically minimal
    irreducible of degree e over F_p, so packed element codes mean the same
    thing in every run.
    """
    p, e = _prime_power(q)
    if e == 1:
        return FiniteField(p)
    base = FiniteField(p)
    return FiniteField(p, base=base, modulus=_minimal_modulus(base, e), name=name)

"""Twisted polynomials and Drinfeld modules over k[t].

A twisted polynomial is sum(b_i * tau**i) where tau is the q-power
Frobenius, so multiplication obeys tau * b = b**q * tau.  Coefficients may
live in any commutative ring object supporting +, * and ** (polynomials,
rational functions, Laurent series); the twist exponent q is carried by the
twisted polynomial itself.
"""


def _is_zero(c):
    for attr in ("is_zero", "is_zero_to_prec"):
        v = getattr(c, attr, None)
        if v is not None:
            return v
    return not c


class TwistedPoly:
    """sum(coeffs[i] * tau**i) with tau * b = b**q * tau."""

    __slots__ = ("q", "coeffs")

    def __init__(self, q, coeffs):
        coeffs = list(coeffs)
        while coeffs and _is_zero(coeffs[-1]):
            coeffs.pop()
        self.q = q
        self.coeffs = tuple(coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __getitem__(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        raise IndexError(i)

    def coeff(self, i, zero):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else zero

    def __add__(self, other):
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return TwistedPoly(self.q, out)

    def __sub__(self, other):
        self._check(other)
        out = list(self.coeffs)
        for i, c in enumerate(other.coeffs):
            if i < len(out):
                out[i] = out[i] - c
            else:
                out.append(-c)
        return TwistedPoly(self.q, out)

    def __mul__(self, other):
        """Twisted product: coefficients of the right factor get q-powered."""
        self._check(other)
        if not self.coeffs or not other.coeffs:
            return TwistedPoly(self.q, ())
        n, m = len(self.coeffs), len(other.coeffs)
        out = [None] * (n + m - 1)
        for i, a in enumerate(self.coeffs):
            if _is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                if _is_zero(b):
                    continue
                term = a * (b ** (self.q**i))
                out[i + j] = term if out[i + j] is None else out[i + j] + term
        zero = self.coeffs[0] * 0 if hasattr(self.coeffs[0], "__mul__") else 0
        return TwistedPoly(self.q, [zero if c is None else c for c in out])

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative twisted power")
        result = None
        acc = self
        while n:
            if n & 1:
                result = acc if result is None else result * acc
            n >>= 1
            if n:
                acc = acc * acc
        if result is None:
            raise ValueError("tau-degree-zero identity needs a coefficient ring")
        return result

    def apply(self, z):
        """Evaluate the additive polynomial sum(b_i * z**(q**i))."""
        out = None
        for i, b in enumerate(self.coeffs):
            if _is_zero(b):
                continue
            term = b * (z ** (self.q**i)) if i else b * z
            out = term if out is None else out + term
        if out is None:
            return z * 0 if hasattr(z, "__mul__") else 0
        return out

    def apply_scalars(self, coerce):
        """Map coefficients through ``coerce`` (e.g. embed into a local field)."""
        return TwistedPoly(self.q, [coerce(b) for b in self.coeffs])

    def _check(self, other):
        if self.q != other.q:
            raise TypeError("twist exponents differ")

    def __eq__(self, other):
        return (
            isinstance(other, TwistedPoly)
            and self.q == other.q
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        return "TwistedPoly(q=%d, [%s])" % (
            self.q,
            ", ".join(str(c) for c in self.coeffs),
        )


def twisted_mul(f, g):
    return f * g


class DrinfeldModule:
    """phi(t) = t + a_1 tau + ... + a_n tau^n over k[t], a_n nonzero.

    Rank 0 (no coefficients) is allowed: phi(t) is multiplication by t.
    """

    def __init__(self, field, coeffs):
        from .poly import Poly

        self.field = field
        self.coeffs = tuple(coeffs)
        if self.coeffs and self.coeffs[-1].is_zero:
            raise ValueError("leading coefficient of a Drinfeld module is zero")
        self._t = Poly.t(field)

    @staticmethod
    def carlitz(field):
        from .poly import Poly

        return DrinfeldModule(field, (Poly.one(field),))

    @property
    def rank(self):
        return len(self.coeffs)

    @property
    def q(self):
        return self.field.q

    def phi_t(self):
        return TwistedPoly(self.q, (self._t,) + self.coeffs)

    def phi_of(self, a):
        """The image of a in k[t] under the k-algebra map phi."""
        from .poly import Poly

        if a.is_zero:
            return TwistedPoly(self.q, ())
        phit = self.phi_t()
        acc = TwistedPoly(self.q, (Poly.const(self.field, a.lead),))
        for k in range(a.degree - 1, -1, -1):
            acc = phit * acc
            if a[k]:
                acc = acc + TwistedPoly(self.q, (Poly.const(self.field, a[k]),))
        return acc

    def torsion_poly(self, g):
        """phi(g) viewed as an additive polynomial in x of degree q**deg(g)."""
        if g.is_zero:
            raise ValueError("torsion polynomial of 0 is not defined")
        return self.phi_of(g)

    def cyclotomic_min_poly(self, f):
        """phi(f)(x)/x for irreducible f, as a dense coefficient list in x.

        The result is monic in x of degree q**deg(f) - 1 and has k[t]
        coefficients; its roots are the generators of the f-torsion module.
        """
        from .poly import Poly, is_irreducible

        if not is_irreducible(f):
            raise ValueError(f"modulus {f} is not irreducible")
        tw = self.phi_of(f)
        q = self.q
        deg = q ** f.degree - 1
        out = [Poly.zero(self.field) for _ in range(deg + 1)]
        for i, c in enumerate(tw.coeffs):
            out[q**i - 1] = c
        return out

    def __repr__(self):
        names = ", ".join(str(c) for c in self.coeffs)
        return f"DrinfeldModule(q={self.q}, a=[{names}])"

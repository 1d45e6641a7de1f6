"""Laurent series over a finite field with explicit precision tracking.

A series is stored as ``sum(coeffs[i] * u**(val+i)) + O(u**(prec+1))`` where
``u`` is the uniformizer of whatever local field the series lives in.  The
precision bound is part of the value: every operation propagates it
pessimistically and nothing is ever reported beyond it.

The leading coefficient is nonzero, so ``val`` is the exact valuation
whenever the series is distinguishable from zero.  A series with no stored
coefficients means "zero modulo O(u**(prec+1))"; its valuation is unknown
and inverting it raises :class:`PrecisionError`.
"""

from .errors import PrecisionError
from .poly import _clmul, _pack, _unpack


class Laurent:
    __slots__ = ("field", "val", "coeffs", "prec")

    def __init__(self, field, val, coeffs, prec):
        coeffs = list(coeffs)
        # strip leading zeros, moving the valuation up
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
            val += 1
        # drop anything beyond the precision bound
        if coeffs and val + len(coeffs) - 1 > prec:
            coeffs = coeffs[: prec - val + 1]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.field = field
        self.coeffs = tuple(coeffs)
        self.val = val if coeffs else None
        self.prec = prec

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(field, prec):
        return Laurent(field, 0, (), prec)

    @staticmethod
    def one(field, prec):
        return Laurent(field, 0, (1,), prec)

    @staticmethod
    def monomial(field, c, k, prec):
        return Laurent(field, k, (c,), prec)

    @staticmethod
    def from_coeff_map(field, cmap, prec):
        if not cmap:
            return Laurent.zero(field, prec)
        lo = min(cmap)
        hi = min(max(cmap), prec)
        coeffs = [cmap.get(i, 0) for i in range(lo, hi + 1)]
        return Laurent(field, lo, coeffs, prec)

    # -- predicates --------------------------------------------------------

    @property
    def is_zero_to_prec(self):
        return not self.coeffs

    def valuation(self):
        if self.val is None:
            raise PrecisionError(
                f"series is indistinguishable from zero at O(u^{self.prec + 1})"
            )
        return self.val

    def val_lower_bound(self):
        return self.val if self.coeffs else self.prec + 1

    def coefficient(self, k):
        if k > self.prec:
            raise PrecisionError(f"coefficient of u^{k} beyond O(u^{self.prec + 1})")
        if not self.coeffs or k < self.val or k >= self.val + len(self.coeffs):
            return 0
        return self.coeffs[k - self.val]

    def coeff_items(self):
        if not self.coeffs:
            return
        for i, c in enumerate(self.coeffs):
            if c:
                yield self.val + i, c

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        self._check(other)
        prec = min(self.prec, other.prec)
        if not self.coeffs:
            return other.truncate(prec)
        if not other.coeffs:
            return self.truncate(prec)
        F = self.field
        lo = min(self.val, other.val)
        hi = min(max(self.val + len(self.coeffs), other.val + len(other.coeffs)) - 1, prec)
        out = [0] * (hi - lo + 1)
        for i, c in enumerate(self.coeffs):
            k = self.val + i
            if k <= hi:
                out[k - lo] = c
        for i, c in enumerate(other.coeffs):
            k = other.val + i
            if k <= hi:
                out[k - lo] = F.add(out[k - lo], c)
        return Laurent(F, lo, out, prec)

    def __neg__(self):
        F = self.field
        return Laurent(
            F, self.val or 0, tuple(F.neg(c) for c in self.coeffs), self.prec
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        F = self.field
        prec = min(
            self.prec + other.val_lower_bound(),
            other.prec + self.val_lower_bound(),
        )
        if not self.coeffs or not other.coeffs:
            return Laurent.zero(F, prec)
        val = self.val + other.val
        n = prec - val + 1
        a = self.coeffs[:n]
        b = other.coeffs[:n]
        if F.q == 2:
            out = _unpack(_clmul(_pack(a), _pack(b)))
        else:
            out = [0] * min(len(a) + len(b) - 1, n)
            for i, x in enumerate(a):
                if x == 0 or i >= n:
                    continue
                for j, y in enumerate(b):
                    if i + j >= n:
                        break
                    if y:
                        out[i + j] = F.add(out[i + j], F.mul(x, y))
        return Laurent(F, val, out, prec)

    def scale(self, c):
        F = self.field
        if c == 0:
            return Laurent.zero(F, self.prec)
        return Laurent(
            F, self.val or 0, tuple(F.mul(x, c) for x in self.coeffs), self.prec
        )

    def shift(self, k):
        """Multiply by u**k."""
        return Laurent(self.field, (self.val or 0) + k, self.coeffs, self.prec + k)

    def inverse(self):
        if not self.coeffs:
            raise PrecisionError(
                f"cannot invert a series indistinguishable from zero at O(u^{self.prec + 1})"
            )
        F = self.field
        rel = self.prec - self.val  # number of known coefficients minus one
        a = list(self.coeffs[: rel + 1])
        n = rel + 1
        if F.q == 2:
            pa = _pack(a)
            pb = 1
            known = 1
            while known < n:
                known = min(2 * known, n)
                mask = (1 << known) - 1
                pb = _clmul(pa & mask, _clmul(pb, pb) & mask) & mask
            out = _unpack(pb)
        else:
            inv0 = F.inv(a[0])
            out = [inv0] + [0] * (n - 1)
            for k in range(1, n):
                s = 0
                for j in range(1, min(k, len(a) - 1) + 1):
                    if a[j] and out[k - j]:
                        s = F.add(s, F.mul(a[j], out[k - j]))
                out[k] = F.neg(F.mul(s, inv0))
        return Laurent(F, -self.val, out, self.prec - 2 * self.val)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, n):
        F = self.field
        if n == 0:
            return Laurent.one(F, self.prec)
        if n < 0:
            return self.inverse() ** (-n)
        # peel off Frobenius powers: p-th powers are exact and cheap
        base = self
        p = F.p
        pk = 1
        while n % p == 0:
            pk *= p
            n //= p
        if pk > 1:
            base = base.frobenius(pk)
        result = None
        acc = base
        while n:
            if n & 1:
                result = acc if result is None else result * acc
            n >>= 1
            if n:
                acc = acc * acc
        return result

    def frobenius(self, pk):
        """The pk-th power map for pk a power of the characteristic.

        Exact on the known window and precision-gaining: the error term
        O(u^(prec+1)) maps to O(u^(pk*(prec+1))).
        """
        F = self.field
        if not self.coeffs:
            return Laurent.zero(F, pk * (self.prec + 1) - 1)
        cmap = {}
        for k, c in self.coeff_items():
            cmap[k * pk] = F.pow(c, pk)
        return Laurent.from_coeff_map(F, cmap, pk * (self.prec + 1) - 1)

    def truncate(self, prec):
        if prec >= self.prec:
            return self
        return Laurent(self.field, self.val or 0, self.coeffs, prec)

    def map_coeffs(self, fn, field=None):
        return Laurent(
            field or self.field,
            self.val or 0,
            tuple(fn(c) for c in self.coeffs),
            self.prec,
        )

    # -- comparison ----------------------------------------------------------

    def agreement(self, other):
        """Precision through which the two series agree.

        Returns the overlap precision ``min(self.prec, other.prec)`` when
        all coefficients match on that window, else None.
        """
        self._check(other)
        overlap = min(self.prec, other.prec)
        d = self - other
        if d.is_zero_to_prec:
            return overlap
        return None

    def __eq__(self, other):
        return (
            isinstance(other, Laurent)
            and self.field == other.field
            and self.val == other.val
            and self.coeffs == other.coeffs
            and self.prec == other.prec
        )

    def __hash__(self):
        return hash((self.field, self.val, self.coeffs, self.prec))

    def _check(self, other):
        if self.field is not other.field and self.field != other.field:
            raise TypeError("series over different fields")

    def __str__(self):
        return format_series(self)

    def __repr__(self):
        return f"<Laurent {format_series(self)}>"


def format_series(x, var="t", inverted=True):
    """Render a series, by default in descending powers of t with u = 1/t."""
    F = x.field
    terms = []
    for k, c in x.coeff_items():
        e = -k if inverted else k
        cs = F.format_element(c)
        if e == 0:
            terms.append(cs)
        else:
            te = var if e == 1 else f"{var}^{e}"
            terms.append(te if cs == "1" else f"{cs}*{te}")
    oexp = -(x.prec + 1) if inverted else x.prec + 1
    oterm = f"O({var}^{oexp})" if oexp != 1 else f"O({var})"
    return "+".join(terms + [oterm])


def series_sum(terms, zero):
    acc = zero
    for s in terms:
        acc = acc + s
    return acc

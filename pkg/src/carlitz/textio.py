"""Text and JSON interchange formats.

Polynomials use the term grammar ``c*t^k`` joined by ``+`` (see poly.py);
defining polynomials in x allow parenthesized k[t] coefficients, as in
``x^3+(t^2+t)*x+t``.  Series are serialized as a lowest exponent, a
coefficient code list and the precision bound; reports are versioned JSON
with deterministic key order.
"""

import json

from .errors import CarlitzError
from .ffield import GF
from .funcfield import FunctionField, build_cyclotomic
from .laurent import Laurent
from .poly import Poly, format_poly, parse_poly

SCHEMA = "carlitz-verify/1"


def format_bipoly(mx, var="x"):
    terms = []
    for j in range(len(mx) - 1, -1, -1):
        c = mx[j]
        if c.is_zero:
            continue
        if j == 0:
            terms.append(format_poly(c))
            continue
        xs = var if j == 1 else f"{var}^{j}"
        if c.degree == 0 and c.coeffs == (1,):
            terms.append(xs)
        else:
            cs = format_poly(c)
            cs = f"({cs})" if ("+" in cs or "*" in cs) else cs
            terms.append(f"{cs}*{xs}")
    return "+".join(terms) if terms else "0"


def parse_bipoly(field, text, var="x"):
    text = text.replace(" ", "")
    parts = []
    depth = 0
    cur = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "+" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    coeffs = {}
    for term in parts:
        if not term:
            raise ValueError("empty term in defining polynomial")
        if var in term:
            pre, _, post = term.partition(var)
            j = int(post[1:]) if post.startswith("^") else 1
            pre = pre.rstrip("*")
            if pre.startswith("(") and pre.endswith(")"):
                pre = pre[1:-1]
            c = parse_poly(field, pre) if pre else Poly.one(field)
        else:
            j = 0
            c = parse_poly(field, term)
        coeffs[j] = coeffs.get(j, Poly.zero(field)) + c
    out = [Poly.zero(field)] * (max(coeffs) + 1)
    for j, c in coeffs.items():
        out[j] = c
    return out


def field_from_description(text):
    """Build a FunctionField from a description file.

    Two lines: ``q <prime power>`` then either ``modulus <poly in t>``
    (cyclotomic mode) or ``min-poly <poly in x>`` (general mode).
    """
    q = None
    modulus = None
    minpoly = None
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, val = line.partition(" ")
        val = val.strip()
        if key == "q":
            q = int(val)
        elif key == "modulus":
            modulus = val
        elif key in ("min-poly", "minpoly"):
            minpoly = val
        else:
            raise CarlitzError(f"unknown field description key {key!r}")
    if q is None:
        raise CarlitzError("field description missing q")
    return make_field(q, modulus, minpoly)


def make_field(q, modulus=None, minpoly=None):
    k = GF(q)
    if modulus is not None and minpoly is not None:
        raise CarlitzError("give either a torsion modulus or a defining polynomial")
    if modulus is not None:
        return build_cyclotomic(q, parse_poly(k, modulus))
    if minpoly is not None:
        return FunctionField(k, parse_bipoly(k, minpoly))
    raise CarlitzError("field description needs modulus or min-poly")


def describe_field(F):
    if F.cyclotomic_modulus is not None:
        return {
            "q": F.q,
            "mode": "cyclotomic",
            "modulus": format_poly(F.cyclotomic_modulus),
            "d": F.d,
        }
    return {"q": F.q, "mode": "min-poly", "min_poly": format_bipoly(F.mx), "d": F.d}


def series_to_json(x):
    return {
        "lowest_exponent": x.val,
        "coefficients": list(x.coeffs),
        "precision": x.prec,
    }


def series_from_json(field, data):
    if data["lowest_exponent"] is None:
        return Laurent.zero(field, data["precision"])
    return Laurent(
        field, data["lowest_exponent"], data["coefficients"], data["precision"]
    )


def dumps_deterministic(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def report_body(report_dict):
    """The deterministic part of a report: everything except timings."""
    body = {k: v for k, v in report_dict.items() if k != "timing"}
    return dumps_deterministic(body)

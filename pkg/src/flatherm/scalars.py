"""Scalar arithmetic in the two supported modes.

Exact mode stores real numbers as :class:`gmpy2.mpq` (always in lowest terms,
positive denominator) and complex numbers as :class:`ExactComplex`, an element
of the field Q(i, sqrt 2).  The extra sqrt 2 is what makes the unit-length
vectors ``(x - iJx)/sqrt 2`` exactly representable.  Float mode uses numpy's
float64 / complex128.

Arrays are plain numpy arrays; ``dtype=object`` marks an exact array.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpq

from .errors import ExactnessError, InputError

QQ = mpq
ZERO = mpq(0)
ONE = mpq(1)

_RATIONAL_TYPES = (int, type(mpq(0)), Fraction)


def _sq_mul(p, q, r, s):
    # (p + q sqrt2)(r + s sqrt2)
    return p * r + 2 * q * s, p * s + q * r


def _sq_inv(p, q):
    n = p * p - 2 * q * q
    return p / n, -q / n


class ExactComplex:
    """Element ``(a + b*sqrt2) + i*(c + d*sqrt2)`` with rational a, b, c, d.

    >>> z = ExactComplex(0, 0, 0, mpq(1, 2))    # i/sqrt2
    >>> z * z
    ExactComplex(-1/2)
    >>> (z * ExactComplex.sqrt2()).is_gaussian_rational
    True
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a=0, b=0, c=0, d=0):
        self.a = mpq(a)
        self.b = mpq(b)
        self.c = mpq(c)
        self.d = mpq(d)

    @classmethod
    def sqrt2(cls):
        return cls(0, 1)

    @classmethod
    def inv_sqrt2(cls):
        return cls(0, mpq(1, 2))

    @classmethod
    def imag_unit(cls):
        return cls(0, 0, 1)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, ExactComplex):
            return x
        if isinstance(x, _RATIONAL_TYPES):
            return cls(mpq(x))
        if isinstance(x, (float, complex, np.floating, np.complexfloating)):
            raise ExactnessError(f"refusing to mix float value {x!r} into exact arithmetic")
        if isinstance(x, numbers.Integral):
            return cls(int(x))
        raise TypeError(f"cannot interpret {type(x).__name__} as an exact scalar")

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        try:
            o = ExactComplex.coerce(other)
        except TypeError:
            return NotImplemented
        return ExactComplex(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self):
        return ExactComplex(-self.a, -self.b, -self.c, -self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            o = ExactComplex.coerce(other)
        except TypeError:
            return NotImplemented
        return ExactComplex(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            if other == 0:
                return _CZERO
            q = mpq(other)
            return ExactComplex(self.a * q, self.b * q, self.c * q, self.d * q)
        try:
            o = ExactComplex.coerce(other)
        except TypeError:
            return NotImplemented
        if o.is_zero() or self.is_zero():
            return _CZERO
        rr = _sq_mul(self.a, self.b, o.a, o.b)
        ii = _sq_mul(self.c, self.d, o.c, o.d)
        ri = _sq_mul(self.a, self.b, o.c, o.d)
        ir = _sq_mul(self.c, self.d, o.a, o.b)
        return ExactComplex(rr[0] - ii[0], rr[1] - ii[1], ri[0] + ir[0], ri[1] + ir[1])

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("ExactComplex division by zero")
        # 1/z = conj(z) / |z|^2, |z|^2 in Q(sqrt2)
        n = _sq_mul(self.a, self.b, self.a, self.b)
        m = _sq_mul(self.c, self.d, self.c, self.d)
        p, q = _sq_inv(n[0] + m[0], n[1] + m[1])
        re = _sq_mul(self.a, self.b, p, q)
        im = _sq_mul(-self.c, -self.d, p, q)
        return ExactComplex(re[0], re[1], im[0], im[1])

    def __truediv__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            q = mpq(other)
            return ExactComplex(self.a / q, self.b / q, self.c / q, self.d / q)
        try:
            o = ExactComplex.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return ExactComplex.coerce(other) * self.inverse()

    def conjugate(self):
        return ExactComplex(self.a, self.b, -self.c, -self.d)

    @property
    def real(self):
        return ExactComplex(self.a, self.b)

    @property
    def imag(self):
        return ExactComplex(self.c, self.d)

    # -- predicates and conversions ----------------------------------------
    def is_zero(self):
        return not (self.a or self.b or self.c or self.d)

    @property
    def is_rational(self):
        return not (self.b or self.c or self.d)

    @property
    def is_gaussian_rational(self):
        return not (self.b or self.d)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        try:
            o = ExactComplex.coerce(other)
        except (TypeError, ExactnessError):
            return NotImplemented
        return self.a == o.a and self.b == o.b and self.c == o.c and self.d == o.d

    def __hash__(self):
        if self.is_rational:
            return hash(self.a)
        return hash((self.a, self.b, self.c, self.d))

    def __complex__(self):
        r2 = math.sqrt(2.0)
        return complex(float(self.a) + float(self.b) * r2, float(self.c) + float(self.d) * r2)

    def __float__(self):
        if self.c or self.d:
            raise TypeError("ExactComplex with nonzero imaginary part has no float value")
        return float(self.a) + float(self.b) * math.sqrt(2.0)

    def __abs__(self):
        return abs(complex(self))

    def abs2(self):
        """|z|^2 as a pair (p, q) meaning p + q*sqrt2."""
        n = _sq_mul(self.a, self.b, self.a, self.b)
        m = _sq_mul(self.c, self.d, self.c, self.d)
        return n[0] + m[0], n[1] + m[1]

    def __repr__(self):
        return f"ExactComplex({self})"

    def __str__(self):
        parts = []
        for coef, unit in ((self.a, ""), (self.b, "*sqrt2"), (self.c, "*i"), (self.d, "*i*sqrt2")):
            if coef:
                parts.append(f"{coef}{unit}")
        return " + ".join(parts) if parts else "0"


_CZERO = ExactComplex()


# ---------------------------------------------------------------------------
# parsing and mode handling
# ---------------------------------------------------------------------------

def parse_rational(value, field=None):
    """Parse ``"p/q"``, a decimal string or an integer into an exact mpq."""
    if isinstance(value, bool):
        raise InputError("booleans are not scalars", field)
    if isinstance(value, _RATIONAL_TYPES):
        return mpq(value)
    if isinstance(value, float):
        raise InputError(f"float literal {value!r} in exact data; quote it as a string", field)
    if isinstance(value, str):
        try:
            return mpq(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse {value!r} as a rational", field) from exc
    raise InputError(f"unsupported scalar {value!r}", field)


def parse_float(value, field=None):
    if isinstance(value, bool):
        raise InputError("booleans are not scalars", field)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse {value!r} as a number", field) from exc
    raise InputError(f"unsupported scalar {value!r}", field)


def is_exact(arr):
    return np.asarray(arr).dtype == object


def exact_array(data):
    """Object array of mpq from nested lists of rationals."""
    arr = np.array(data, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = mpq(v) if not isinstance(v, ExactComplex) else v
    return out


def as_exact(arr):
    """Normalize an object array so every entry is mpq or ExactComplex."""
    arr = np.asarray(arr, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        if isinstance(v, ExactComplex) or type(v) is type(ZERO):
            out[idx] = v
        elif isinstance(v, _RATIONAL_TYPES) and not isinstance(v, bool):
            out[idx] = mpq(v)
        else:
            raise ExactnessError(f"non-exact entry {v!r} in exact array")
    return out


def exact_zeros(shape):
    out = np.empty(shape, dtype=object)
    out.fill(ZERO)
    return out


def exact_identity(n):
    out = exact_zeros((n, n))
    for i in range(n):
        out[i, i] = ONE
    return out


def to_complex_exact(arr):
    """Promote an exact real array (mpq) to an array of ExactComplex."""
    arr = np.asarray(arr, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = ExactComplex.coerce(v)
    return out


def to_float(arr):
    """Convert an exact or float array to float64 / complex128."""
    arr = np.asarray(arr)
    if arr.dtype != object:
        return arr
    if any(isinstance(v, ExactComplex) and not v.is_rational for v in arr.flat):
        return np.array([complex(v) for v in arr.flat], dtype=complex).reshape(arr.shape)
    return np.array([float(v) for v in arr.flat], dtype=float).reshape(arr.shape)


def unify(*arrays, exact=None):
    """Bring arrays to a common mode.

    Mixed inputs promote to float64 unless ``exact=True`` is requested, in
    which case an :class:`ExactnessError` is raised instead.
    """
    modes = {is_exact(a) for a in arrays}
    if modes == {True}:
        if exact is False:
            return tuple(to_float(a) for a in arrays)
        return tuple(np.asarray(a, dtype=object) for a in arrays)
    if exact:
        raise ExactnessError("exact computation requested but some inputs are floating point")
    return tuple(to_float(a) for a in arrays)


def conj(arr):
    arr = np.asarray(arr)
    if arr.dtype != object:
        return np.conj(arr)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = v.conjugate() if isinstance(v, ExactComplex) else v
    return out


def max_norm(arr):
    """Max-norm of an array of scalars.

    Exact real arrays give an exact mpq.  Exact complex arrays give an exact
    ``mpq(0)`` when every entry vanishes, the exact modulus when every entry is
    rational, and otherwise the modulus as a float.  Float arrays give floats.
    """
    arr = np.asarray(arr)
    if arr.size == 0:
        return ZERO if arr.dtype == object else 0.0
    if arr.dtype != object:
        return float(np.max(np.abs(arr)))
    best = ZERO
    inexact = False
    for v in arr.flat:
        if isinstance(v, ExactComplex):
            if v.is_zero():
                continue
            if v.is_rational:
                v = v.a
            else:
                inexact = True
                best = max(float(best), abs(v))
                continue
        av = abs(mpq(v))
        if inexact:
            best = max(float(best), float(av))
        elif av > best:
            best = av
    return best


def is_zero_defect(value, tol):
    """Verdict helper: exact values must be exactly zero, floats below tol."""
    if isinstance(value, type(ZERO)) or isinstance(value, int):
        return value == 0
    return float(value) < tol


def exact_sqrt(q):
    """Exact square root of a nonnegative rational inside Q(sqrt2), else None."""
    q = mpq(q)
    if q < 0:
        raise ValueError("negative radicand")
    num, den = q.numerator, q.denominator
    if gmpy2.is_square(num) and gmpy2.is_square(den):
        return ExactComplex(mpq(gmpy2.isqrt(num), gmpy2.isqrt(den)))
    half = q / 2
    num, den = half.numerator, half.denominator
    if gmpy2.is_square(num) and gmpy2.is_square(den):
        return ExactComplex(0, mpq(gmpy2.isqrt(num), gmpy2.isqrt(den)))
    return None


def format_scalar(v):
    """JSON-friendly rendering: rationals as "p/q", floats as numbers."""
    if isinstance(v, ExactComplex):
        return format_complex(v)
    if isinstance(v, _RATIONAL_TYPES):
        return str(mpq(v))
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    return float(v)


def format_complex(v):
    """Serialize an exact complex entry.

    Entries of the form ``(re + i im)`` or ``(re + i im)/sqrt2`` use the
    compact {re, im[, sqrt2_scale]} layout; anything else spells out all four
    rational coordinates.
    """
    if isinstance(v, ExactComplex):
        if v.is_gaussian_rational:
            return {"re": str(v.a), "im": str(v.c)}
        if not (v.a or v.c):
            return {"re": str(2 * v.b), "im": str(2 * v.d), "sqrt2_scale": True}
        return {"re": str(v.a), "im": str(v.c), "re_sqrt2": str(v.b), "im_sqrt2": str(v.d)}
    if isinstance(v, _RATIONAL_TYPES):
        return {"re": str(mpq(v)), "im": "0"}
    v = complex(v)
    return {"re": v.real, "im": v.imag}


def parse_complex(obj, field=None):
    if not isinstance(obj, dict) or "re" not in obj or "im" not in obj:
        raise InputError("complex entries need 're' and 'im'", field)
    re = parse_rational(obj["re"], field)
    im = parse_rational(obj["im"], field)
    if obj.get("sqrt2_scale"):
        return ExactComplex(0, re / 2, 0, im / 2)
    rs = parse_rational(obj.get("re_sqrt2", 0), field)
    ims = parse_rational(obj.get("im_sqrt2", 0), field)
    return ExactComplex(re, rs, im, ims)

"""Exact polynomial arithmetic under the eventual (m >> 0) ordering.

Everything downstream compares Hilbert polynomials, reduced Hilbert
polynomials and squared weight magnitudes.  All of those comparisons are
"for m large enough", which for polynomials with rational coefficients is
a lexicographic comparison from the top degree down.  No floating point
is used anywhere; coefficients are `fractions.Fraction` throughout.

Conventions:
  * coefficient lists are dense and stored lowest degree first,
  * the zero polynomial has an empty coefficient tuple and degree -1,
  * serialized form is a JSON array of "p/q" strings, lowest degree first.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]

#: orderings returned by the compare functions
LESS, EQUAL, GREATER = -1, 0, 1

#: polynomials of higher degree are rejected at input boundaries
MAX_DEGREE = 16


class InputError(ValueError):
    """Malformed external data: bad rational strings, degree cap exceeded,
    nonpositive ranks, and similar boundary problems."""


class ModeMismatch(ValueError):
    """Two ScaleValues from different modes (or different numeric m) were
    compared.  Values taken at different scales are never comparable."""


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad rational literal {x!r}") from exc
    raise InputError(f"cannot interpret {x!r} as an exact rational")


class Poly:
    """Dense univariate polynomial with exact rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [_to_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, c: Scalar) -> "Poly":
        return cls((c,))

    @classmethod
    def monomial(cls, degree: int, c: Scalar = 1) -> "Poly":
        return cls([0] * degree + [c])

    @classmethod
    def from_json(cls, data) -> "Poly":
        """Parse a JSON array of rational strings (lowest degree first).

        Raises InputError when the array is malformed or the degree cap
        is exceeded; this is the input boundary where the cap applies.
        """
        if not isinstance(data, (list, tuple)):
            raise InputError("polynomial must be an array of rational strings")
        p = cls(data)
        if p.degree > MAX_DEGREE:
            raise InputError(
                f"polynomial degree {p.degree} exceeds the cap {MAX_DEGREE}")
        return p

    def to_json(self) -> list:
        return [str(c) for c in self.coeffs]

    # -- basic queries ------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Fraction:
        """Leading coefficient; 0 for the zero polynomial."""
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def sign_eventual(self) -> int:
        """Sign of p(m) for m >> 0."""
        lc = self.leading()
        return GREATER if lc > 0 else LESS if lc < 0 else EQUAL

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({list(map(str, self.coeffs))})"

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly([c * other for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return Poly(out)

    __rmul__ = __mul__

    def eval(self, m: Scalar) -> Fraction:
        """Evaluate at m by Horner's rule."""
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * m + c
        return acc


def poly_eval(p: Poly, m: Scalar) -> Fraction:
    return p.eval(m)


def poly_compare_eventual(p: Poly, q: Poly) -> int:
    """Compare p(m) vs q(m) for m >> 0: LESS, EQUAL or GREATER."""
    return (p - q).sign_eventual()


def reduced_compare(p: Poly, rp: Scalar, q: Poly, rq: Scalar) -> int:
    """Compare p/rp against q/rq eventually, by cross multiplication.

    rp and rq must be positive (they are ranks); zero denominators are
    rejected rather than silently ordered.
    """
    rp = _to_fraction(rp)
    rq = _to_fraction(rq)
    if rp <= 0 or rq <= 0:
        raise InputError("reduced_compare needs positive ranks")
    return poly_compare_eventual(p * rq, q * rp)


def poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Exact rational long division: a = q*b + r with deg r < deg b."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a.coeffs)
    db, lb = b.degree, b.leading()
    q = [Fraction(0)] * max(len(rem) - db, 0)
    while len(rem) - 1 >= db and any(rem):
        while rem and rem[-1] == 0:
            rem.pop()
        if len(rem) - 1 < db:
            break
        shift = len(rem) - 1 - db
        factor = rem[-1] / lb
        q[shift] = factor
        for i, c in enumerate(b.coeffs):
            rem[shift + i] -= factor * c
        rem.pop()
    return Poly(q), Poly(rem)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm (1 when coprime)."""
    while not b.is_zero():
        a, b = b, poly_divmod(a, b)[1]
    if a.is_zero():
        return a
    return a * (Fraction(1) / a.leading())


def poly_to_str(p: Poly, var: str = "m") -> str:
    """Human readable rendering, highest degree first: "m^2 - 1/2"."""
    if p.is_zero():
        return "0"
    parts = []
    for k in range(p.degree, -1, -1):
        c = p.coeffs[k]
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            head = var if k == 1 else f"{var}^{k}"
            body = head if mag == 1 else f"{mag}*{head}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


class RationalFunction:
    """Quotient of two Polys, kept reduced with a monic denominator.

    The ordering is the eventual one: f < g iff f(m) < g(m) for all
    m >> 0.  With that order the rational functions form an ordered
    field, which is exactly what the asymptotic-mode cone computations
    run over.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly = Poly((1,)), reduce: bool = True):
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            den = Poly((1,))
        elif reduce:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = poly_divmod(num, g)[0]
                den = poly_divmod(den, g)[0]
            lc = den.leading()
            if lc != 1:
                inv = Fraction(1) / lc
                num = num * inv
                den = den * inv
        self.num = num
        self.den = den

    @classmethod
    def from_scalar(cls, c: Scalar) -> "RationalFunction":
        return cls(Poly((c,)), Poly((1,)), reduce=False)

    @classmethod
    def from_json(cls, data) -> "RationalFunction":
        if not isinstance(data, dict) or "num" not in data or "den" not in data:
            raise InputError('rational function must be {"num": [...], "den": [...]}')
        return cls(Poly.from_json(data["num"]), Poly.from_json(data["den"]))

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    def sign(self) -> int:
        return self.num.sign_eventual()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def eval(self, m: Scalar) -> Fraction:
        d = self.den.eval(m)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at m={m}")
        return self.num.eval(m) / d

    def __bool__(self):
        return not self.num.is_zero()

    def __repr__(self):
        return f"RF(({poly_to_str(self.num)}) / ({poly_to_str(self.den)}))"

    # -- field operations ---------------------------------------------

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalFunction.from_scalar(other)
        if isinstance(other, Poly):
            return RationalFunction(other, Poly((1,)), reduce=False)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RationalFunction(self.num * o.den + o.num * self.den,
                                self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RationalFunction(self.num * o.den - o.num * self.den,
                                self.den * o.den)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return o / self

    # -- eventual ordering ---------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare RationalFunction with {other!r}")
        # denominators are eventually positive, so cross multiply
        return (self.num * o.den - o.num * self.den).sign_eventual()

    def __lt__(self, other):
        return self._cmp(other) == LESS

    def __le__(self, other):
        return self._cmp(other) != GREATER

    def __gt__(self, other):
        return self._cmp(other) == GREATER

    def __ge__(self, other):
        return self._cmp(other) != LESS


def scalar_sign(x) -> int:
    """Sign of a Fraction/int or the eventual sign of a RationalFunction."""
    if isinstance(x, RationalFunction):
        return x.sign()
    return GREATER if x > 0 else LESS if x < 0 else EQUAL


class ScaleValue:
    """A signed square-magnitude, the comparable form of a Kempf value.

    Weight values are of the shape sign * sqrt(mag2) with mag2 an exact
    nonnegative quantity: a rational in numeric mode (instances evaluated
    at a concrete integer m) or a rational function of m in asymptotic
    mode.  Square roots are never taken; comparisons go through the sign
    first and cross-multiplied squared magnitudes second.  Values from
    different modes (including different numeric m) raise ModeMismatch
    rather than compare.
    """

    __slots__ = ("sign", "mag2", "mode", "m")

    def __init__(self, sign: int, mag2, mode: str, m: int | None = None):
        if mode not in ("numeric", "asymptotic"):
            raise InputError(f"unknown mode {mode!r}")
        if mode == "numeric" and not (m is None or isinstance(m, int)):
            raise InputError("numeric m must be an integer (or None for "
                             "standalone rational instances)")
        if mode == "asymptotic":
            m = None
            if not isinstance(mag2, RationalFunction):
                mag2 = RationalFunction.from_scalar(_to_fraction(mag2))
        else:
            mag2 = _to_fraction(mag2)
        if scalar_sign(mag2) == LESS:
            raise InputError("squared magnitude must be nonnegative")
        if (scalar_sign(mag2) == EQUAL) != (sign == 0):
            raise InputError("sign is zero exactly when the magnitude is zero")
        self.sign = sign
        self.mag2 = mag2
        self.mode = mode
        self.m = m

    @classmethod
    def zero(cls, mode: str, m: int | None = None) -> "ScaleValue":
        return cls(0, 0, mode, m)

    @property
    def mag2_num(self):
        if self.mode == "numeric":
            return self.mag2.numerator
        return self.mag2.num

    @property
    def mag2_den(self):
        if self.mode == "numeric":
            return self.mag2.denominator
        return self.mag2.den

    def __repr__(self):
        tag = f"numeric@{self.m}" if self.mode == "numeric" else "asymptotic"
        return f"ScaleValue(sign={self.sign}, mag2={self.mag2!r}, {tag})"


def scale_compare(a: ScaleValue, b: ScaleValue) -> int:
    """Order two ScaleValues: sign first, magnitudes second.

    For equal negative signs the magnitude comparison flips (a more
    negative value is smaller).  Raises ModeMismatch across modes.
    """
    if a.mode != b.mode or a.m != b.m:
        raise ModeMismatch(
            f"cannot compare {a.mode}(m={a.m}) with {b.mode}(m={b.m})")
    if a.sign != b.sign:
        return GREATER if a.sign > b.sign else LESS
    if a.sign == 0:
        return EQUAL
    if a.mode == "numeric":
        mc = GREATER if a.mag2 > b.mag2 else LESS if a.mag2 < b.mag2 else EQUAL
    else:
        mc = a.mag2._cmp(b.mag2)
    return mc if a.sign > 0 else -mc

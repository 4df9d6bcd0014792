"""Exact arithmetic in Q(i), the field of Gaussian rationals."""

from __future__ import annotations

from fractions import Fraction


class GaussianRational:
    """Immutable a + b*i with rational a, b; the scalar field of the engine.

    Values are hashable and usable as dict keys.  All arithmetic is exact;
    there are no tolerances anywhere downstream.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @classmethod
    def _make(cls, re: Fraction, im: Fraction) -> "GaussianRational":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    def __setattr__(self, name, value):
        if hasattr(self, "im"):
            raise AttributeError("GaussianRational is immutable")
        object.__setattr__(self, name, value)

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls._make(Fraction(value), _F0)
        if isinstance(value, str):
            return parse_gaussian(value)
        raise TypeError(f"cannot coerce {value!r} to GaussianRational")

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_integer(self) -> bool:
        return self.re.denominator == 1 and self.im.denominator == 1

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        return GaussianRational._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        return GaussianRational._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        return GaussianRational._make(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        return GaussianRational._make(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        if not n:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational._make(
            (self.re * o.re + self.im * o.im) / n,
            (self.im * o.re - self.re * o.im) / n,
        )

    def __rtruediv__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational._make(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._make(self.re, -self.im)

    def abs_sq(self) -> Fraction:
        """|x|^2 = re^2 + im^2, a nonnegative rational."""
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        return ONE / self

    # -- comparison / hashing ------------------------------------------------

    def __eq__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({str(self)!r})"

    def __str__(self):
        return format_gaussian(self)


def _as_gauss(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational._make(Fraction(value), _F0)
    return None


_F0 = Fraction(0)

ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)
MINUS_ONE = GaussianRational(-1)


def G(re=0, im=0) -> GaussianRational:
    """Shorthand constructor, accepting ints, Fractions, or literal strings."""
    if isinstance(re, str):
        return parse_gaussian(re)
    return GaussianRational(re, im)


class LiteralError(ValueError):
    """Malformed Gaussian-rational literal."""


def _parse_fraction(text: str, original: str, bare_sign_is_unit: bool = False) -> Fraction:
    if bare_sign_is_unit:
        if text in ("", "+"):
            return Fraction(1)
        if text == "-":
            return Fraction(-1)
    body = text[1:] if text[0] in "+-" else text
    if not body or not all(ch.isdigit() or ch == "/" for ch in body):
        raise LiteralError(f"malformed Gaussian-rational literal {original!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise LiteralError(f"malformed Gaussian-rational literal {original!r}") from exc


def parse_gaussian(text: str) -> GaussianRational:
    """Parse `a/b`, `a`, `a/b+c/di`, `a-c/di`, `2i`, `i`; whitespace-insensitive."""
    s = "".join(text.split())
    if not s:
        raise LiteralError("empty Gaussian-rational literal")
    if not s.endswith("i"):
        return GaussianRational(_parse_fraction(s, text))
    # Split the imaginary tail at the last sign that is not the leading one.
    split = None
    for k in range(len(s) - 1, 0, -1):
        if s[k] in "+-":
            split = k
            break
    if split is None:
        return GaussianRational(0, _parse_fraction(s[:-1], text, bare_sign_is_unit=True))
    return GaussianRational(
        _parse_fraction(s[:split], text),
        _parse_fraction(s[split:-1], text, bare_sign_is_unit=True),
    )


def _format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_gaussian(value: GaussianRational) -> str:
    """Canonical rendering; parse_gaussian round-trips it."""
    re, im = value.re, value.im
    if not im:
        return _format_fraction(re)
    if im == 1:
        imag = "i"
    elif im == -1:
        imag = "-i"
    else:
        imag = _format_fraction(im) + "i"
    if not re:
        return imag
    sign = "+" if im > 0 else ""
    return _format_fraction(re) + sign + imag

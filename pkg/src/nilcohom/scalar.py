"""Exact coefficient fields: the rationals QQ and the rational function field QQ(t).

Rationals are :class:`fractions.Fraction`.  Polynomials in ``t`` are stored as an
integer coefficient tuple over a positive common denominator, which keeps the
inner loops on machine-friendly ``int`` arithmetic while every value still has a
unique representation.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rat = Fraction
Number = Union[int, Fraction]


class FieldMismatch(TypeError):
    """Raised when QQ and QQ(t) values are combined without an explicit lift."""


class PoleError(ZeroDivisionError):
    """Evaluation of a rational function at a root of its denominator."""

    def __init__(self, den: "Poly", value: Fraction):
        super().__init__(f"denominator {den} vanishes at t = {value}")
        self.den = den
        self.value = value


# ---------------------------------------------------------------------------
# integer polynomial kernels (coefficient tuples, lowest degree first)
# ---------------------------------------------------------------------------

def _strip(c: list) -> tuple:
    n = len(c)
    while n and c[n - 1] == 0:
        n -= 1
    return tuple(c[:n])


def _iadd(a: tuple, b: tuple) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _strip(out)


def _isub(a: tuple, b: tuple) -> tuple:
    out = list(a) + [0] * (len(b) - len(a))
    for i, x in enumerate(b):
        out[i] -= x
    return _strip(out)


def _iscale(a: tuple, k: int) -> tuple:
    if k == 0:
        return ()
    return tuple(x * k for x in a)


def _imul(a: tuple, b: tuple) -> tuple:
    if not a or not b:
        return ()
    if len(a) == 1:
        return _iscale(b, a[0])
    if len(b) == 1:
        return _iscale(a, b[0])
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def _icontent(a: tuple) -> int:
    g = math.gcd(*a)
    if a and a[-1] < 0:
        g = -g
    return g


def _iprimitive(a: tuple) -> tuple:
    """Primitive part with positive leading coefficient."""
    if not a:
        return a
    g = _icontent(a)
    if g == 1:
        return a
    return tuple(x // g for x in a)


def _iprem(a: tuple, b: tuple) -> tuple:
    """Pseudo-remainder of a by b over ZZ."""
    db = len(b) - 1
    lb = b[-1]
    r = list(a)
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [x * lb for x in r]
        for i, y in enumerate(b):
            r[i + shift] -= lr * y
        r = list(_strip(r))
    return tuple(r)


def _igcd(a: tuple, b: tuple) -> tuple:
    """Primitive gcd over ZZ[t] (primitive remainder sequence)."""
    if not a:
        return _iprimitive(b)
    if not b:
        return _iprimitive(a)
    a, b = _iprimitive(a), _iprimitive(b)
    if len(a) < len(b):
        a, b = b, a
    while b:
        if len(b) == 1:
            return (1,)
        a, b = b, _iprimitive(_iprem(a, b))
    return a


def _iexactdiv(a: tuple, b: tuple) -> tuple:
    """Quotient a / b over ZZ[t]; caller guarantees divisibility."""
    if not a:
        return ()
    db = len(b) - 1
    lb = b[-1]
    r = list(a)
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1 - db, -1, -1):
        c = r[k + db]
        if c:
            qk, rem = divmod(c, lb)
            if rem:
                raise ArithmeticError("inexact polynomial division")
            q[k] = qk
            for i, y in enumerate(b):
                r[k + i] -= qk * y
    if any(r[:db]):
        raise ArithmeticError("inexact polynomial division")
    return _strip(q)


def _ideriv(a: tuple) -> tuple:
    return _strip([i * a[i] for i in range(1, len(a))])


# ---------------------------------------------------------------------------
# Poly: QQ[t]
# ---------------------------------------------------------------------------

class Poly:
    """Univariate polynomial over QQ in the variable ``t``.

    ``Poly([1, 0, 2])`` is ``1 + 2*t^2``.  The zero polynomial has degree -1.
    """

    __slots__ = ("_c", "_d", "_hash")

    def __init__(self, coeffs: Iterable[Number] = ()):
        fr = [Fraction(x) for x in coeffs]
        d = 1
        for x in fr:
            d = d * x.denominator // math.gcd(d, x.denominator)
        c = _strip([int(x * d) for x in fr])
        self._set(c, d)

    def _set(self, c: tuple, d: int) -> None:
        if not c:
            d = 1
        else:
            g = math.gcd(math.gcd(*c), d)
            if g != 1:
                c = tuple(x // g for x in c)
                d //= g
        self._c = c
        self._d = d
        self._hash = None

    @classmethod
    def _raw(cls, c: tuple, d: int = 1) -> "Poly":
        p = cls.__new__(cls)
        p._set(c, d)
        return p

    @classmethod
    def constant(cls, x: Number) -> "Poly":
        x = Fraction(x)
        return cls._raw(_strip([x.numerator]), x.denominator)

    @classmethod
    def t(cls) -> "Poly":
        return cls._raw((0, 1))

    # -- inspection --------------------------------------------------------
    @property
    def coeffs(self) -> tuple:
        return tuple(Fraction(x, self._d) for x in self._c)

    @property
    def degree(self) -> int:
        return len(self._c) - 1

    def is_zero(self) -> bool:
        return not self._c

    def is_constant(self) -> bool:
        return len(self._c) <= 1

    def leading(self) -> Fraction:
        return Fraction(self._c[-1], self._d) if self._c else Fraction(0)

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self._c):
            return Fraction(self._c[i], self._d)
        return Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self._c == other._c and self._d == other._d
        if isinstance(other, (int, Fraction)):
            return self == Poly.constant(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._c, self._d))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._c)

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d1, d2 = self._d, other._d
        if d1 == d2:
            return Poly._raw(_iadd(self._c, other._c), d1)
        g = math.gcd(d1, d2)
        return Poly._raw(_iadd(_iscale(self._c, d2 // g), _iscale(other._c, d1 // g)), d1 // g * d2)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(tuple(-x for x in self._c), self._d)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Poly._raw(_imul(self._c, other._c), self._d * other._d)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly._raw((1,))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, x: Number) -> "Poly":
        x = Fraction(x)
        return Poly._raw(_iscale(self._c, x.numerator), self._d * x.denominator)

    def divmod(self, other: "Poly") -> tuple:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        b = other.coeffs
        db = len(b) - 1
        q = [Fraction(0)] * max(len(r) - db, 0)
        for k in range(len(r) - 1 - db, -1, -1):
            c = r[k + db] / b[-1]
            q[k] = c
            if c:
                for i, y in enumerate(b):
                    r[k + i] -= c * y
        return Poly(q), Poly(r[:db] if db else [])

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        """Quotient of an exact division; raises ArithmeticError otherwise."""
        pa = _iprimitive(self._c)
        pb = _iprimitive(other._c)
        q = _iexactdiv(pa, pb)
        # value = (ca/da)*pa / ((cb/db)*pb)
        ca = Fraction(_icontent(self._c), self._d) if self._c else Fraction(0)
        cb = Fraction(_icontent(other._c), other._d)
        k = ca / cb
        return Poly._raw(_iscale(q, k.numerator), k.denominator)

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(1 / self.leading())

    def primitive(self) -> tuple:
        """Integer primitive part (positive leading coefficient) as a tuple."""
        return _iprimitive(self._c)

    def gcd(self, other: "Poly") -> "Poly":
        """Monic greatest common divisor (zero only if both are zero)."""
        g = _igcd(self._c, other._c)
        if not g:
            return Poly._raw(())
        return Poly._raw(g, g[-1])

    def derivative(self) -> "Poly":
        return Poly._raw(_ideriv(self._c), self._d)

    def __call__(self, x: Number) -> Fraction:
        x = Fraction(x)
        p, q = x.numerator, x.denominator
        # homogenised Horner keeps everything integral
        acc = 0
        qk = 1
        for c in reversed(self._c):
            acc = acc * p + c * qk
            qk *= q
        n = len(self._c)
        return Fraction(acc, self._d * q ** (n - 1)) if n else Fraction(0)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)


# ---------------------------------------------------------------------------
# RatFunc: QQ(t)
# ---------------------------------------------------------------------------

class RatFunc:
    """Reduced quotient num/den of polynomials with monic denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None):
        if not isinstance(num, Poly):
            num = Poly.constant(num) if isinstance(num, (int, Fraction)) else Poly(num)
        if den is None:
            den = Poly._raw((1,))
        elif not isinstance(den, Poly):
            den = Poly.constant(den) if isinstance(den, (int, Fraction)) else Poly(den)
        n, d = normalize(num, den)
        self.num = n
        self.den = d
        self._hash = None

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "RatFunc":
        r = cls.__new__(cls)
        r.num = num
        r.den = den
        r._hash = None
        return r

    @classmethod
    def t(cls) -> "RatFunc":
        return cls._raw(Poly.t(), _ONE_POLY)

    @classmethod
    def constant(cls, x: Number) -> "RatFunc":
        return cls._raw(Poly.constant(x), _ONE_POLY)

    # -- inspection --------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num[0]

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        if isinstance(other, int) and not isinstance(other, bool):
            return self.den.degree == 0 and self.num == other
        if isinstance(other, bool):
            return NotImplemented
        if isinstance(other, Fraction):
            raise FieldMismatch("comparing QQ(t) with QQ; lift the rational first")
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, int):
            return RatFunc._raw(Poly.constant(other), _ONE_POLY)
        if isinstance(other, Fraction):
            raise FieldMismatch("mixed QQ / QQ(t) arithmetic; use QQt.lift")
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            if self.den.degree == 0:
                return RatFunc._raw(self.num + other.num, _ONE_POLY)
            return RatFunc(self.num + other.num, self.den)
        if self.den.degree == 0:
            return RatFunc._raw(self.num * other.den + other.num, other.den)
        if other.den.degree == 0:
            return RatFunc._raw(other.num * self.den + self.num, self.den)
        g = self.den.gcd(other.den)
        if g.degree == 0:
            return RatFunc._raw(self.num * other.den + other.num * self.den, self.den * other.den)
        b1 = self.den.exact_div(g)
        d1 = other.den.exact_div(g)
        return RatFunc(self.num * d1 + other.num * b1, b1 * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc._raw(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return ZERO_RF
        a, b, c, d = self.num, self.den, other.num, other.den
        if b.degree == 0 and d.degree == 0:
            return RatFunc._raw(a * c, _ONE_POLY)
        g1 = a.gcd(d) if d.degree > 0 else _ONE_POLY
        g2 = c.gcd(b) if b.degree > 0 else _ONE_POLY
        if g1.degree > 0:
            a, d = a.exact_div(g1), d.exact_div(g1)
        if g2.degree > 0:
            c, b = c.exact_div(g2), b.exact_div(g2)
        return RatFunc._raw(a * c, b * d)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in QQ(t)")
        lc = self.num.leading()
        return RatFunc._raw(self.den.scale(1 / lc), self.num.scale(1 / lc))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc._raw(self.num ** n, self.den ** n)

    def scale(self, x: Number) -> "RatFunc":
        return RatFunc._raw(self.num.scale(x), self.den)

    def derivative(self) -> "RatFunc":
        return differentiate(self)

    def __call__(self, x: Number) -> Fraction:
        return evaluate(self, x)

    def __repr__(self) -> str:
        return f"RatFunc({format_ratfunc(self)!r})"

    def __str__(self) -> str:
        return format_ratfunc(self)


_ONE_POLY = Poly._raw((1,))
ZERO_RF = RatFunc._raw(Poly._raw(()), _ONE_POLY)
ONE_RF = RatFunc._raw(_ONE_POLY, _ONE_POLY)


def normalize(num: Poly, den: Poly) -> tuple:
    """Reduced representative (num, den) of num/den with den monic."""
    if den.is_zero():
        raise ZeroDivisionError("rational function with zero denominator")
    if num.is_zero():
        return Poly._raw(()), _ONE_POLY
    if den.degree > 0:
        g = num.gcd(den)
        if g.degree > 0:
            num = num.exact_div(g)
            den = den.exact_div(g)
    lc = den.leading()
    if lc != 1:
        num = num.scale(1 / lc)
        den = den.scale(1 / lc)
    return num, den


def differentiate(f: RatFunc) -> RatFunc:
    """d/dt of a rational function."""
    if f.den.degree == 0:
        return RatFunc._raw(f.num.derivative(), _ONE_POLY)
    num = f.num.derivative() * f.den - f.num * f.den.derivative()
    return RatFunc(num, f.den * f.den)


def evaluate(f: RatFunc, value: Number) -> Fraction:
    """Exact value of f at t = value."""
    value = Fraction(value)
    d = f.den(value)
    if d == 0:
        raise PoleError(f.den, value)
    return f.num(value) / d


# ---------------------------------------------------------------------------
# formatting and parsing
# ---------------------------------------------------------------------------

def _format_coeff_term(c: Fraction, k: int, first: bool) -> str:
    sign = "-" if c < 0 else ("" if first else "+")
    a = abs(c)
    mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
    if k == 0:
        body = str(a)
    elif a == 1:
        body = mono
    else:
        body = f"{a}*{mono}"
    return sign + body


def format_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for k in range(p.degree, -1, -1):
        c = p[k]
        if c:
            parts.append(_format_coeff_term(c, k, not parts))
    return "".join(parts)


def _paren(p: Poly) -> str:
    s = format_poly(p)
    nterms = sum(1 for c in p.coeffs if c)
    if nterms > 1 or (p.degree == 0 and p[0].denominator != 1):
        return f"({s})"
    return s


def format_ratfunc(f: RatFunc) -> str:
    if f.den.degree == 0:
        return format_poly(f.num)
    return f"{_paren(f.num)}/({format_poly(f.den)})"


def format_rat(x: Fraction) -> str:
    return str(Fraction(x))


_TOKEN = re.compile(r"\s*(?:(\d+)|(t)|(\*\*|[-+*/^()]))")


class ScalarSyntaxError(ValueError):
    def __init__(self, text: str, pos: int, msg: str):
        super().__init__(f"{msg} at column {pos + 1} in {text!r}")
        self.text = text
        self.column = pos + 1


def _tokenize(text: str) -> list:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            while text[pos].isspace():
                pos += 1
            raise ScalarSyntaxError(text, pos, "unexpected character")
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("num", int(m.group(1)), start))
        elif m.group(2):
            toks.append(("t", None, start))
        else:
            op = m.group(3)
            toks.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    # expr := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)*
    # unary := ('-'|'+') unary | power ; power := atom ('^' integer)?
    def __init__(self, text: str, field: "Field"):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.field = field

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg: str):
        raise ScalarSyntaxError(self.text, self.peek()[2], msg)

    def parse(self):
        val = self.expr()
        if self.peek()[0] != "end":
            self.error("unexpected token")
        return val

    def expr(self):
        val = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                val = val * rhs
            else:
                if rhs == 0:
                    self.error("division by zero")
                val = val / rhs
        return val

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            val = self.unary()
            return -val if tok[1] == "-" else val
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                sign = -1
            tok = self.take()
            if tok[0] != "num":
                self.i -= 1
                self.error("expected integer exponent")
            n = sign * tok[1]
            if n < 0 and base == 0:
                self.error("division by zero")
            return base ** n
        return base

    def atom(self):
        tok = self.take()
        if tok[0] == "num":
            return self.field.from_int(tok[1])
        if tok[0] == "t":
            if not self.field.parametric:
                self.i -= 1
                self.error("symbol t in a QQ scalar")
            return RatFunc.t()
        if tok[0] == "op" and tok[1] == "(":
            val = self.expr()
            if self.take()[1] != ")":
                self.i -= 1
                self.error("expected ')'")
            return val
        self.i -= 1
        self.error("unexpected token")


# ---------------------------------------------------------------------------
# field tags
# ---------------------------------------------------------------------------

class Field:
    """Coefficient field tag; every algebraic object carries exactly one."""

    def __init__(self, name: str, parametric: bool):
        self.name = name
        self.parametric = parametric

    def __repr__(self) -> str:
        return self.name

    def __reduce__(self):
        return (_field_by_name, (self.name,))

    @property
    def zero(self):
        return ZERO_RF if self.parametric else Fraction(0)

    @property
    def one(self):
        return ONE_RF if self.parametric else Fraction(1)

    def from_int(self, n: int):
        return RatFunc.constant(n) if self.parametric else Fraction(n)

    def __call__(self, x):
        """Coerce ints, rationals of the right field, or strings."""
        if isinstance(x, str):
            return self.parse(x)
        if self.parametric:
            if isinstance(x, RatFunc):
                return x
            if isinstance(x, int):
                return RatFunc.constant(x)
            raise FieldMismatch(f"{x!r} is not an element of QQ(t); use QQt.lift")
        if isinstance(x, RatFunc):
            raise FieldMismatch(f"{x} is not an element of QQ")
        return Fraction(x)

    def contains(self, x) -> bool:
        return isinstance(x, RatFunc) if self.parametric else isinstance(x, (int, Fraction))

    def lift(self, x):
        """Embed a rational into QQ(t)."""
        if not self.parametric:
            raise FieldMismatch("lift targets QQ(t)")
        if isinstance(x, RatFunc):
            return x
        return RatFunc.constant(Fraction(x))

    def parse(self, text: str):
        return _Parser(text, self).parse()

    def format(self, x) -> str:
        return format_ratfunc(x) if isinstance(x, RatFunc) else format_rat(x)

    def specialize(self, x, value: Number) -> Fraction:
        return evaluate(x, value) if self.parametric else Fraction(x)


QQ = Field("QQ", parametric=False)
QQt = Field("QQ(t)", parametric=True)


def _field_by_name(name: str) -> Field:
    return QQt if name == QQt.name else QQ


def field_of(x) -> Field:
    if isinstance(x, RatFunc):
        return QQt
    if isinstance(x, (int, Fraction)):
        return QQ
    raise TypeError(f"not a scalar: {x!r}")


def parse_scalar(text: str, field: Field = QQt):
    return field.parse(text)


def poly_from_string(text: str) -> Poly:
    f = QQt.parse(text)
    if f.den.degree != 0:
        raise ValueError(f"{text!r} is not a polynomial")
    return f.num


def common_field(values: Sequence) -> Field:
    fields = {field_of(v) for v in values if not isinstance(v, int)}
    if len(fields) > 1:
        raise FieldMismatch("values from both QQ and QQ(t)")
    return fields.pop() if fields else QQ

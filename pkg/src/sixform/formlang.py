"""Coordinate expressions and 3-form fields on a chart of R^6.

Grammar (whitespace insensitive)::

    field  := term (('+' | '-') term)*
    term   := [coef '*'] basis
    basis  := 'dx' INT ('^' 'dx' INT)*
    coef   := products of factors with '*', '/', unary '-', '**' [-]INT,
              sin(..), cos(..), sqrt(..), pi, x1..x6, decimal or p/q literals

'^' is only the wedge; exponentiation inside coefficients is '**'.
Expressions are simplified while they are built: constants fold, 0 and 1
are absorbed, and syntactically equal summands combine. There is no
further algebra; sampling decides what this misses.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import (
    BackendMismatch,
    DegreeMismatch,
    EvaluationDomain,
    FormSyntaxError,
    UnknownCoordinate,
)

NCOORDS = 6


class Expr:
    """Immutable expression node. Compare structurally with ``==``."""

    __slots__ = ("_key", "_hash")
    prec = 5

    def __init__(self, *key):
        self._key = (type(self).__name__,) + key
        self._hash = hash(self._key)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            if isinstance(other, (int, Fraction)) and isinstance(self, Const):
                return self.value == other
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Expr({to_text(self)!r})"

    def __str__(self):
        return to_text(self)

    def is_zero(self) -> bool:
        return isinstance(self, Const) and self.value == 0

    def children(self):
        return ()

    # arithmetic sugar so exterior-algebra code runs on symbolic coefficients
    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return add(self, neg(_lift(other)))

    def __rsub__(self, other):
        return add(_lift(other), neg(self))

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __truediv__(self, other):
        return div(self, _lift(other))

    def __rtruediv__(self, other):
        return div(_lift(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        return power(self, n)


def _lift(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise BackendMismatch(f"cannot combine {type(x).__name__} with a symbolic expression")
    return Const(x)


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = Fraction(value)
        super().__init__(self.value)


class Pi(Expr):
    __slots__ = ()

    def __init__(self):
        super().__init__()


class Var(Expr):
    __slots__ = ("index",)

    def __init__(self, index: int):
        if not 1 <= index <= NCOORDS:
            raise UnknownCoordinate(f"coordinate x{index} outside x1..x{NCOORDS}")
        self.index = index
        super().__init__(index)


class Neg(Expr):
    __slots__ = ("arg",)
    prec = 3

    def __init__(self, arg: Expr):
        self.arg = arg
        super().__init__(arg)

    def children(self):
        return (self.arg,)


class Add(Expr):
    __slots__ = ("terms",)
    prec = 1

    def __init__(self, terms):
        self.terms = tuple(terms)
        super().__init__(self.terms)

    def children(self):
        return self.terms


class Mul(Expr):
    __slots__ = ("factors",)
    prec = 2

    def __init__(self, factors):
        self.factors = tuple(factors)
        super().__init__(self.factors)

    def children(self):
        return self.factors


class Div(Expr):
    __slots__ = ("num", "den")
    prec = 2

    def __init__(self, num: Expr, den: Expr):
        self.num, self.den = num, den
        super().__init__(num, den)

    def children(self):
        return (self.num, self.den)


class Pow(Expr):
    __slots__ = ("base", "exp")
    prec = 4

    def __init__(self, base: Expr, exp: int):
        self.base, self.exp = base, int(exp)
        super().__init__(base, self.exp)

    def children(self):
        return (self.base,)


class Func(Expr):
    __slots__ = ("name", "arg")
    NAMES = ("sin", "cos", "sqrt")

    def __init__(self, name: str, arg: Expr):
        if name not in self.NAMES:
            raise ValueError(f"unknown function {name}")
        self.name, self.arg = name, arg
        super().__init__(name, arg)

    def children(self):
        return (self.arg,)


ZERO = Const(0)
ONE = Const(1)
PI = Pi()


def x(i: int) -> Var:
    return Var(i)


# ---------------------------------------------------------------- builders


def _split_coefficient(e: Expr) -> tuple[Fraction, Expr | None]:
    """Write e as c * base with rational c; base None means e is constant."""
    if isinstance(e, Const):
        return e.value, None
    if isinstance(e, Neg):
        c, base = _split_coefficient(e.arg)
        return -c, base
    if isinstance(e, Mul) and isinstance(e.factors[0], Const):
        rest = e.factors[1:]
        return e.factors[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    return Fraction(1), e


def scale(c: Fraction, base: Expr | None) -> Expr:
    if base is None or c == 0:
        return Const(c if base is None else 0)
    return mul(Const(c), base)


def add(*args: Expr) -> Expr:
    flat = []
    for a in args:
        flat.extend(a.terms if isinstance(a, Add) else (a,))
    constant = Fraction(0)
    order: list[Expr] = []
    coeffs: dict[Expr, Fraction] = {}
    for t in flat:
        c, base = _split_coefficient(t)
        if base is None:
            constant += c
            continue
        if base not in coeffs:
            order.append(base)
            coeffs[base] = Fraction(0)
        coeffs[base] += c
    terms = [scale(coeffs[b], b) for b in order if coeffs[b] != 0]
    if constant != 0:
        terms.append(Const(constant))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Add(terms)


def neg(a: Expr) -> Expr:
    return mul(Const(-1), a)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(b))


def mul(*args: Expr) -> Expr:
    constant = Fraction(1)
    factors: list[Expr] = []
    stack = list(args)
    for a in stack:
        if isinstance(a, Mul):
            for f in a.factors:
                if isinstance(f, Const):
                    constant *= f.value
                else:
                    factors.append(f)
        elif isinstance(a, Const):
            constant *= a.value
        elif isinstance(a, Neg):
            c, base = _split_coefficient(a)
            constant *= c
            if isinstance(base, Mul):
                factors.extend(base.factors)
            elif base is not None:
                factors.append(base)
        else:
            factors.append(a)
    if constant == 0:
        return ZERO
    if not factors:
        return Const(constant)
    if len(factors) == 1 and isinstance(factors[0], Add) and constant != 1:
        return add(*(mul(Const(constant), t) for t in factors[0].terms))
    body = factors[0] if len(factors) == 1 else Mul(factors)
    if constant == 1:
        return body
    if constant == -1:
        return Neg(body)
    return Mul((Const(constant),) + (body.factors if isinstance(body, Mul) else (body,)))


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(b, Const):
        if b.value == 0:
            return Div(a, b)
        return mul(Const(1 / b.value), a)
    if a.is_zero():
        return ZERO
    # keep constant coefficients outside: (c*a)/b -> c*(a/b)
    c, base = _split_coefficient(a)
    if c != 1:
        return mul(Const(c), Div(ONE if base is None else base, b))
    return Div(a, b)


def power(a: Expr, n: int) -> Expr:
    if n == 0:
        return ONE
    if n == 1:
        return a
    if isinstance(a, Const) and not (a.value == 0 and n < 0):
        return Const(a.value**n)
    return Pow(a, n)


def sin(a: Expr) -> Expr:
    if a.is_zero():
        return ZERO
    return Func("sin", a)


def cos(a: Expr) -> Expr:
    if a.is_zero():
        return ONE
    return Func("cos", a)


def sqrt(a: Expr) -> Expr:
    if isinstance(a, Const) and a.value >= 0:
        n, d = a.value.numerator, a.value.denominator
        rn, rd = math.isqrt(n), math.isqrt(d)
        if rn * rn == n and rd * rd == d:
            return Const(Fraction(rn, rd))
    return Func("sqrt", a)


_FUNCS = {"sin": sin, "cos": cos, "sqrt": sqrt}


# ---------------------------------------------------------------- printing


def _const_text(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _wrap(e: Expr, cond: bool) -> str:
    s = to_text(e)
    return f"({s})" if cond else s


def _is_atom(e: Expr) -> bool:
    if isinstance(e, Const):
        return e.value >= 0 and e.value.denominator == 1
    return isinstance(e, (Var, Pi, Func))


def to_text(e: Expr) -> str:
    """Canonical text; parsing it back gives a structurally equal expression."""
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Func):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, isinstance(e.arg, (Add, Div, Neg)))
    if isinstance(e, Pow):
        exp = str(e.exp) if e.exp >= 0 else f"({e.exp})"
        return _wrap(e.base, not isinstance(e.base, (Var, Pi, Func))) + "**" + exp
    if isinstance(e, Mul):
        return "*".join(_wrap(f, not _is_atom(f) and not isinstance(f, Pow)) for f in e.factors)
    if isinstance(e, Div):
        num = _wrap(e.num, isinstance(e.num, (Add, Div, Neg)))
        return num + "/" + _wrap(e.den, not (_is_atom(e.den) or isinstance(e.den, Pow)))
    if isinstance(e, Add):
        parts = []
        for k, t in enumerate(e.terms):
            c, base = _split_coefficient(t)
            if c < 0:
                body = to_text(scale(-c, base))
                parts.append(("-" if k == 0 else " - ") + _wrap_term(scale(-c, base), body))
            else:
                parts.append(("" if k == 0 else " + ") + to_text(t))
        return "".join(parts)
    raise TypeError(f"cannot print {type(e).__name__}")


def _wrap_term(t: Expr, body: str) -> str:
    # '-a/b' would parse as (-a)/b; keep the negation outside
    return f"({body})" if isinstance(t, Div) else body


# ---------------------------------------------------------------- lexer/parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()]))"
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            line, col = _line_col(text, pos)
            raise FormSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        start = m.start(kind)
        line, col = _line_col(text, start)
        toks.append(_Tok(kind, m.group(kind), line, col))
        pos = m.end()
    line, col = _line_col(text, n)
    toks.append(_Tok("eof", "", line, col))
    return toks


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


_COORD = re.compile(r"x(\d+)$")
_DIFF = re.compile(r"dx(\d+)$")


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: _Tok | None = None, cls=FormSyntaxError):
        tok = tok or self.tok
        raise cls(msg, tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")

    def is_dx(self, tok: _Tok) -> bool:
        return tok.kind == "id" and tok.text.startswith("dx")

    # expression level
    def expr(self) -> Expr:
        e = self.product()
        while True:
            if self.accept("+"):
                e = add(e, self.product())
            elif self.accept("-"):
                e = add(e, neg(self.product()))
            else:
                return e

    def product(self, stop_at_dx: bool = False) -> Expr:
        # a leading sign applies to the whole product: -a*b is -(a*b)
        negate = False
        while self.tok.kind == "op" and self.tok.text in "+-":
            negate ^= self.tok.text == "-"
            self.i += 1
        if negate:
            return neg(self.product(stop_at_dx))
        # runs of '*' go to mul() in one call so printed products reparse identically
        factors = [self.unary()]
        while True:
            if self.tok.kind == "op" and self.tok.text == "*":
                if stop_at_dx and self.is_dx(self.peek()):
                    break
                self.i += 1
                factors.append(self.unary())
            elif self.accept("/"):
                factors = [div(mul(*factors), self.unary())]
            else:
                break
        return factors[0] if len(factors) == 1 else mul(*factors)

    def unary(self) -> Expr:
        if self.accept("-"):
            return neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("**"):
            paren = self.accept("(")
            sign = -1 if self.accept("-") else 1
            tok = self.tok
            if tok.kind != "num" or not tok.text.isdigit():
                self.error("exponent must be an integer literal")
            self.i += 1
            if paren:
                self.expect(")")
            return power(base, sign * int(tok.text))
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Const(Fraction(tok.text))
        if tok.kind == "id":
            name = tok.text
            if name in _FUNCS:
                self.i += 1
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _FUNCS[name](arg)
            if name == "pi":
                self.i += 1
                return PI
            m = _COORD.match(name)
            if m:
                idx = int(m.group(1))
                if not 1 <= idx <= NCOORDS:
                    self.error(f"unknown coordinate {name}", tok, UnknownCoordinate)
                self.i += 1
                return Var(idx)
            if self.is_dx(tok):
                self.error(f"differential {name} inside a coefficient")
            self.error(f"unknown identifier {name!r}", tok, UnknownCoordinate)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.error(f"unexpected {tok.text or 'end of input'!r}")

    # field level
    def basis(self) -> tuple[int, ...]:
        idx = []
        while True:
            tok = self.tok
            m = _DIFF.match(tok.text) if tok.kind == "id" else None
            if not m:
                self.error(f"expected dx<i>, found {tok.text or 'end of input'!r}")
            k = int(m.group(1))
            if not 1 <= k <= NCOORDS:
                self.error(f"unknown coordinate differential {tok.text}", tok, UnknownCoordinate)
            idx.append(k)
            self.i += 1
            if not self.accept("^"):
                return tuple(idx)

    def term(self) -> tuple[Expr, tuple[int, ...], _Tok]:
        start = self.tok
        if self.is_dx(self.tok):
            return ONE, self.basis(), start
        coef = self.product(stop_at_dx=True)
        if not (self.tok.kind == "op" and self.tok.text == "*" and self.is_dx(self.peek())):
            self.error("expected '*' followed by a basis form dx<i>^...")
        self.i += 1
        return coef, self.basis(), start

    def field(self, degree: int | None = None) -> "FormField":
        terms = []
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        while True:
            coef, idx, start = self.term()
            if degree is None:
                degree = len(idx)
            elif len(idx) != degree:
                self.error(f"term of degree {len(idx)} in a degree-{degree} field", start, DegreeMismatch)
            terms.append((idx, coef if sign > 0 else neg(coef)))
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            elif self.tok.kind == "eof":
                break
            else:
                self.error(f"unexpected {self.tok.text!r}")
        return FormField.from_terms(degree, terms)


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}")
    return e


# ---------------------------------------------------------------- fields


@dataclass(frozen=True, eq=False)
class FormField:
    """A k-form on a chart of R^6 with expression coefficients."""

    degree: int
    terms: Mapping[tuple[int, ...], Expr] = field(default_factory=dict)
    dim: int = NCOORDS

    def __post_init__(self):
        clean = {}
        for idx, e in self.terms.items():
            if len(idx) != self.degree or any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"bad index {idx} for degree {self.degree}")
            e = _lift(e)
            if not e.is_zero():
                clean[tuple(idx)] = e
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def from_terms(cls, degree: int, pairs) -> "FormField":
        from .exterior import sort_with_sign

        acc: dict[tuple[int, ...], Expr] = {}
        for idx, e in pairs:
            s, key = sort_with_sign(idx)
            if s == 0:
                continue
            e = _lift(e)
            if s < 0:
                e = neg(e)
            acc[key] = add(acc[key], e) if key in acc else e
        return cls(degree, acc)

    @classmethod
    def constant(cls, form) -> "FormField":
        """Constant field from an exact KForm."""
        return cls(form.degree, {i: Const(c) for i, c in form.coeffs.items()})

    @classmethod
    def from_kform(cls, form) -> "FormField":
        return cls(form.degree, {i: _lift(c) for i, c in form.coeffs.items()})

    def as_kform(self):
        from .exterior import KForm

        return KForm(self.dim, self.degree, dict(self.terms), "symbolic" if self.terms else "exact")

    def __eq__(self, other):
        if not isinstance(other, FormField):
            return NotImplemented
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.degree, tuple(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(isinstance(e, Const) for e in self.terms.values())

    def __str__(self):
        return print_field(self)

    def evaluate(self, point):
        return eval_field(self, point)


def parse_field(text: str, degree: int | None = None) -> FormField:
    return _Parser(text).field(degree)


def print_field(f: FormField) -> str:
    if not f.terms:
        return "0*" + "^".join(f"dx{i}" for i in range(1, f.degree + 1)) if f.degree else "0"
    parts = []
    for k, (idx, e) in enumerate(f.terms.items()):
        basis = "^".join(f"dx{i}" for i in idx)
        c, base = _split_coefficient(e)
        sign = "-" if c < 0 else "+"
        mag = scale(abs(c), base)
        if mag == ONE:
            body = basis
        else:
            body = f"{_wrap(mag, not _is_atom(mag) and not isinstance(mag, (Pow, Mul)))}*{basis}"
        if k == 0:
            parts.append(body if sign == "+" else "-" + body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


# ---------------------------------------------------------------- calculus


def diff_expr(e: Expr, i: int, _memo: dict | None = None) -> Expr:
    """Partial derivative with respect to x_i."""
    if not 1 <= i <= NCOORDS:
        raise UnknownCoordinate(f"coordinate x{i} outside x1..x{NCOORDS}")
    memo = {} if _memo is None else _memo
    hit = memo.get(id(e))
    if hit is not None and hit[0] is e:
        return hit[1]
    d = _diff(e, i, memo)
    memo[id(e)] = (e, d)
    return d


def _diff(e: Expr, i: int, memo) -> Expr:
    D = lambda a: diff_expr(a, i, memo)  # noqa: E731
    if isinstance(e, (Const, Pi)):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.index == i else ZERO
    if isinstance(e, Neg):
        return neg(D(e.arg))
    if isinstance(e, Add):
        return add(*(D(t) for t in e.terms))
    if isinstance(e, Mul):
        parts = []
        for k, f in enumerate(e.factors):
            df = D(f)
            if df.is_zero():
                continue
            parts.append(mul(*e.factors[:k], df, *e.factors[k + 1 :]))
        return add(*parts) if parts else ZERO
    if isinstance(e, Div):
        dn, dd = D(e.num), D(e.den)
        if dd.is_zero():
            return div(dn, e.den)
        return div(sub(mul(dn, e.den), mul(e.num, dd)), power(e.den, 2))
    if isinstance(e, Pow):
        db = D(e.base)
        if db.is_zero():
            return ZERO
        return mul(Const(e.exp), power(e.base, e.exp - 1), db)
    if isinstance(e, Func):
        da = D(e.arg)
        if da.is_zero():
            return ZERO
        if e.name == "sin":
            return mul(cos(e.arg), da)
        if e.name == "cos":
            return neg(mul(sin(e.arg), da))
        return div(da, mul(Const(2), sqrt(e.arg)))
    raise TypeError(type(e).__name__)


def depends_on(e: Expr, i: int) -> bool:
    if isinstance(e, Var):
        return e.index == i
    return any(depends_on(c, i) for c in e.children())


# ---------------------------------------------------------------- evaluation


def eval_float(e: Expr, point, _cache: dict | None = None) -> float:
    """Evaluate at a float point (sequence of 6 numbers)."""
    cache = {} if _cache is None else _cache
    hit = cache.get(id(e))
    if hit is not None and hit[0] is e:
        return hit[1]
    v = _eval_float(e, point, cache)
    cache[id(e)] = (e, v)
    return v


def _eval_float(e: Expr, p, cache) -> float:
    E = lambda a: eval_float(a, p, cache)  # noqa: E731
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Pi):
        return math.pi
    if isinstance(e, Var):
        return float(p[e.index - 1])
    if isinstance(e, Neg):
        return -E(e.arg)
    if isinstance(e, Add):
        return math.fsum(E(t) for t in e.terms)
    if isinstance(e, Mul):
        out = 1.0
        for f in e.factors:
            out *= E(f)
        return out
    if isinstance(e, Div):
        den = E(e.den)
        if den == 0:
            raise EvaluationDomain(f"division by zero in {to_text(e)}")
        return E(e.num) / den
    if isinstance(e, Pow):
        b = E(e.base)
        if b == 0 and e.exp < 0:
            raise EvaluationDomain(f"zero to a negative power in {to_text(e)}")
        return b**e.exp
    if isinstance(e, Func):
        a = E(e.arg)
        if e.name == "sin":
            return math.sin(a)
        if e.name == "cos":
            return math.cos(a)
        if a < 0:
            raise EvaluationDomain(f"sqrt of negative value {a:.6g} in {to_text(e)}")
        return math.sqrt(a)
    raise TypeError(type(e).__name__)


class NotExact(Exception):
    """Raised when exact evaluation would leave the rationals."""


@dataclass(frozen=True)
class _PiLinear:
    """r + q*pi with rational r, q."""

    r: Fraction
    q: Fraction = Fraction(0)


# sin(k*pi/6) for the k where it is rational
_RATIONAL_SIN = {
    Fraction(0): Fraction(0),
    Fraction(1, 6): Fraction(1, 2),
    Fraction(1, 2): Fraction(1),
    Fraction(5, 6): Fraction(1, 2),
    Fraction(1): Fraction(0),
    Fraction(7, 6): Fraction(-1, 2),
    Fraction(3, 2): Fraction(-1),
    Fraction(11, 6): Fraction(-1, 2),
}


def _exact_sin(v: _PiLinear) -> Fraction:
    if v.r != 0:
        raise NotExact("sin of a nonzero rational")
    q = v.q % 2
    if q not in _RATIONAL_SIN:
        raise NotExact("sin at an irrational value")
    return _RATIONAL_SIN[q]


def eval_exact(e: Expr, point, _cache: dict | None = None) -> _PiLinear:
    """Exact evaluation over Q + Q*pi; raises NotExact when that is impossible.

    ``point`` entries are rationals or constant expressions such as ``3*pi/2``.
    """
    cache = {} if _cache is None else _cache
    hit = cache.get(id(e))
    if hit is not None and hit[0] is e:
        return hit[1]
    v = _eval_exact(e, point, cache)
    cache[id(e)] = (e, v)
    return v


def _eval_exact(e: Expr, p, cache) -> _PiLinear:
    E = lambda a: eval_exact(a, p, cache)  # noqa: E731
    if isinstance(e, Const):
        return _PiLinear(e.value)
    if isinstance(e, Pi):
        return _PiLinear(Fraction(0), Fraction(1))
    if isinstance(e, Var):
        c = p[e.index - 1]
        if isinstance(c, _PiLinear):
            return c
        if isinstance(c, Expr):
            return eval_exact(c, [0] * NCOORDS)
        if isinstance(c, float):
            raise NotExact("float coordinate")
        return _PiLinear(Fraction(c))
    if isinstance(e, Neg):
        a = E(e.arg)
        return _PiLinear(-a.r, -a.q)
    if isinstance(e, Add):
        r, q = Fraction(0), Fraction(0)
        for t in e.terms:
            a = E(t)
            r, q = r + a.r, q + a.q
        return _PiLinear(r, q)
    if isinstance(e, Mul):
        acc = _PiLinear(Fraction(1))
        for f in e.factors:
            acc = _mul_exact(acc, E(f))
        return acc
    if isinstance(e, Div):
        den = E(e.den)
        if den.q != 0:
            raise NotExact("division by a multiple of pi")
        if den.r == 0:
            raise EvaluationDomain(f"division by zero in {to_text(e)}")
        num = E(e.num)
        return _PiLinear(num.r / den.r, num.q / den.r)
    if isinstance(e, Pow):
        b = E(e.base)
        if b.q != 0:
            if e.exp == 1:
                return b
            raise NotExact("power of pi")
        if b.r == 0 and e.exp < 0:
            raise EvaluationDomain(f"zero to a negative power in {to_text(e)}")
        return _PiLinear(b.r**e.exp)
    if isinstance(e, Func):
        a = E(e.arg)
        if e.name == "sin":
            return _PiLinear(_exact_sin(a))
        if e.name == "cos":
            return _PiLinear(_exact_sin(_PiLinear(a.r, a.q + Fraction(1, 2))))
        if a.q != 0:
            raise NotExact("sqrt involving pi")
        if a.r < 0:
            raise EvaluationDomain(f"sqrt of negative value in {to_text(e)}")
        root = sqrt(Const(a.r))
        if not isinstance(root, Const):
            raise NotExact("irrational square root")
        return _PiLinear(root.value)
    raise TypeError(type(e).__name__)


def _mul_exact(a: _PiLinear, b: _PiLinear) -> _PiLinear:
    if a.q != 0 and b.q != 0:
        raise NotExact("pi squared")
    return _PiLinear(a.r * b.r, a.r * b.q + a.q * b.r)


def parse_point(values) -> list:
    """Normalise a point: numbers stay, strings are parsed as constant expressions."""
    out = []
    for v in values:
        if isinstance(v, str):
            e = parse_expr(v)
            if any(depends_on(e, i) for i in range(1, NCOORDS + 1)):
                raise FormSyntaxError(f"point coordinate {v!r} depends on coordinates")
            out.append(e)
        else:
            out.append(v)
    if len(out) != NCOORDS:
        raise ValueError(f"point needs {NCOORDS} coordinates, got {len(out)}")
    return out


def _exact_point(point):
    pts = []
    for v in point:
        if isinstance(v, float):
            return None
        if isinstance(v, Expr):
            try:
                pts.append(eval_exact(v, [0] * NCOORDS))
            except NotExact:
                return None
        else:
            pts.append(_PiLinear(Fraction(v)))
    return pts


def _float_point(point) -> list[float]:
    return [eval_float(v, [0.0] * NCOORDS) if isinstance(v, Expr) else float(v) for v in point]


def eval_field(f: FormField, point):
    """Coefficient-wise evaluation to a KForm; exact whenever every value is rational."""
    from .exterior import KForm

    point = parse_point(point)
    exact_pt = _exact_point(point)
    if exact_pt is not None:
        cache: dict = {}
        try:
            vals = {}
            for idx, e in f.terms.items():
                v = eval_exact(e, exact_pt, cache)
                if v.q != 0:
                    raise NotExact("coefficient involves pi")
                vals[idx] = v.r
            return KForm(f.dim, f.degree, vals, "exact")
        except NotExact:
            pass
    fp = _float_point(point)
    cache = {}
    vals = {idx: eval_float(e, fp, cache) for idx, e in f.terms.items()}
    return KForm(f.dim, f.degree, vals, "float")

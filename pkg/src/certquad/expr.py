"""Expressions of one variable and third-order forward-mode derivatives.

Grammar (loosest to tightest binding)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?          # right associative, constant exponent
    atom   := NUMBER | 'x' | 'pi' | 'e' | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := sin | cos | tan | exp | ln | sqrt

So ``-x^2`` is ``-(x^2)`` and ``2^-1`` is ``0.5``.  The exponent of ``^``
must not contain ``x``.

Derivatives come from :class:`Jet3`, a value carrying its first three
derivatives.  Components may be floats or numpy arrays, so a whole grid of
points is differentiated in one pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import EvaluationError, ParseError

FUNCTIONS = ("sin", "cos", "tan", "exp", "ln", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float

    def __str__(self) -> str:
        return repr(float(self.value))


@dataclass(frozen=True)
class Var:
    def __str__(self) -> str:
        return "x"


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or a name from FUNCTIONS
    arg: "Expr"

    def __str__(self) -> str:
        if self.op == "neg":
            return f"(-{self.arg})"
        return f"{self.op}({self.arg})"


@dataclass(frozen=True)
class Binary:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"

    def __str__(self) -> str:
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: float

    def __str__(self) -> str:
        return f"({self.base}^({float(self.exponent)!r}))"


Expr = Union[Const, Var, Unary, Binary, Pow]


def to_text(expr: Expr) -> str:
    """Fully parenthesised text that :func:`parse` maps back to ``expr``."""
    return str(expr)


def has_variable(expr: Expr) -> bool:
    if isinstance(expr, Var):
        return True
    if isinstance(expr, Const):
        return False
    if isinstance(expr, Unary):
        return has_variable(expr.arg)
    if isinstance(expr, Binary):
        return has_variable(expr.left) or has_variable(expr.right)
    return has_variable(expr.base)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "id", "op", "end"
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    while k < n and text[k].isdigit():
                        k += 1
                    j = k
            tokens.append(_Token("num", text[i:j], i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("id", text[i:j], i))
            i = j
        elif ch in "+-*/^()":
            tokens.append(_Token("op", ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


_ATOM_START = ("number", "x", "pi", "e", "function", "(")


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, text: str) -> None:
        if self.tok.kind == "op" and self.tok.text == text:
            self.advance()
            return
        found = self.tok.text or "end of input"
        raise ParseError(f"unexpected {found!r}", self.tok.offset, (text,))

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(
                f"unexpected {self.tok.text!r}", self.tok.offset, ("+", "-", "*", "/", "^", "end")
            )
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Unary("neg", self.unary())
        if self.tok.kind == "op" and self.tok.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            offset = self.tok.offset
            exponent = self.unary()
            if has_variable(exponent):
                raise ParseError("exponent must be a constant (use exp(c*ln(u)))", offset)
            value = float(evaluate(exponent, 0.0))
            return Pow(base, value)
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Const(float(tok.text))
        if tok.kind == "id":
            self.advance()
            if tok.text == "x":
                return Var()
            if tok.text in CONSTANTS:
                return Const(CONSTANTS[tok.text])
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(tok.text, arg)
            raise ParseError(f"unknown identifier {tok.text!r}", tok.offset)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise ParseError(f"unexpected {found!r}", tok.offset, _ATOM_START)


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    Raises
    ------
    ParseError
        With the byte offset of the offending token and the set of tokens
        that would have been accepted there.
    """
    if not text.isascii():
        raise ParseError("expression must be ASCII", next(i for i, c in enumerate(text) if ord(c) > 127))
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _fail(node: Expr, x, mask, reason: str):
    xs = np.broadcast_to(np.asarray(x, dtype=float), np.shape(mask))
    bad = float(xs[mask][0]) if np.ndim(mask) else float(xs)
    raise EvaluationError(str(node), bad, reason)


def _check_finite(node: Expr, x, value):
    bad = ~np.isfinite(value)
    if np.any(bad):
        _fail(node, x, bad, "non-finite result")
    return value


def evaluate(expr: Expr, x):
    """Value of ``expr`` at ``x`` (float or array)."""
    xa = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval(expr, xa)
    out = np.broadcast_to(out, xa.shape) if np.ndim(out) < xa.ndim else out
    if np.ndim(out) == 0:
        return float(out)
    return np.array(out, dtype=float)


def _eval(node: Expr, x):
    if isinstance(node, Const):
        return np.float64(node.value)
    if isinstance(node, Var):
        return x
    if isinstance(node, Unary):
        u = _eval(node.arg, x)
        op = node.op
        if op == "neg":
            return -u
        if op == "ln":
            bad = u <= 0
            if np.any(bad):
                _fail(node, x, bad, "ln of nonpositive value")
            return np.log(u)
        if op == "sqrt":
            bad = u < 0
            if np.any(bad):
                _fail(node, x, bad, "sqrt of negative value")
            return np.sqrt(u)
        if op == "tan":
            c = np.cos(u)
            bad = np.abs(c) < 1e-15
            if np.any(bad):
                _fail(node, x, bad, "tan at a pole")
            return np.sin(u) / c
        fn = {"sin": np.sin, "cos": np.cos, "exp": np.exp}[op]
        return _check_finite(node, x, fn(u))
    if isinstance(node, Binary):
        left = _eval(node.left, x)
        right = _eval(node.right, x)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        bad = right == 0
        if np.any(bad):
            _fail(node, x, bad, "division by zero")
        return left / right
    u = _eval(node.base, x)
    p = node.exponent
    if float(p).is_integer():
        if p < 0 and np.any(u == 0):
            _fail(node, x, u == 0, "zero raised to a negative power")
        return _check_finite(node, x, u ** int(p))
    bad = u <= 0
    if np.any(bad):
        _fail(node, x, bad, "non-integer power of nonpositive value")
    return _check_finite(node, x, np.exp(p * np.log(u)))


@dataclass(frozen=True)
class Jet3:
    """Value with first, second and third derivatives.

    Arithmetic follows the Leibniz and Faa di Bruno rules truncated at order
    three, e.g. ``(fg)''' = f'''g + 3f''g' + 3f'g'' + fg'''``.
    """

    v0: object
    v1: object = 0.0
    v2: object = 0.0
    v3: object = 0.0

    @classmethod
    def variable(cls, x) -> "Jet3":
        one = np.ones_like(x)
        zero = np.zeros_like(x)
        return cls(x, one, zero, zero)

    @classmethod
    def constant(cls, c: float) -> "Jet3":
        return cls(np.float64(c), 0.0, 0.0, 0.0)

    def __add__(self, o: "Jet3") -> "Jet3":
        return Jet3(self.v0 + o.v0, self.v1 + o.v1, self.v2 + o.v2, self.v3 + o.v3)

    def __sub__(self, o: "Jet3") -> "Jet3":
        return Jet3(self.v0 - o.v0, self.v1 - o.v1, self.v2 - o.v2, self.v3 - o.v3)

    def __neg__(self) -> "Jet3":
        return Jet3(-self.v0, -self.v1, -self.v2, -self.v3)

    def __mul__(self, o: "Jet3") -> "Jet3":
        f0, f1, f2, f3 = self.v0, self.v1, self.v2, self.v3
        g0, g1, g2, g3 = o.v0, o.v1, o.v2, o.v3
        return Jet3(
            f0 * g0,
            f1 * g0 + f0 * g1,
            f2 * g0 + 2.0 * f1 * g1 + f0 * g2,
            f3 * g0 + 3.0 * f2 * g1 + 3.0 * f1 * g2 + f0 * g3,
        )

    def compose(self, d0, d1, d2, d3) -> "Jet3":
        """``phi(self)`` given ``phi`` and its derivatives at ``self.v0``."""
        u1, u2, u3 = self.v1, self.v2, self.v3
        return Jet3(
            d0,
            d1 * u1,
            d2 * u1 * u1 + d1 * u2,
            d3 * u1 * u1 * u1 + 3.0 * d2 * u1 * u2 + d1 * u3,
        )

    def reciprocal(self) -> "Jet3":
        r = 1.0 / self.v0
        return self.compose(r, -r * r, 2.0 * r**3, -6.0 * r**4)

    def __truediv__(self, o: "Jet3") -> "Jet3":
        return self * o.reciprocal()

    def as_floats(self) -> "Jet3":
        conv = [float(v) if np.ndim(v) == 0 else np.asarray(v, dtype=float) for v in self]
        return Jet3(*conv)

    def __iter__(self):
        return iter((self.v0, self.v1, self.v2, self.v3))


def eval_jet(expr: Expr, x) -> Jet3:
    """``(f, f', f'', f''')`` of ``expr`` at ``x``, exact up to rounding."""
    xa = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        jet = _jet(expr, xa, Jet3.variable(xa))
        for v in jet:
            _check_finite(expr, xa, np.broadcast_to(v, xa.shape))
    shape = xa.shape
    return Jet3(*(np.broadcast_to(v, shape) if np.ndim(v) < len(shape) else v for v in jet)).as_floats()


def _jet(node: Expr, x, var: Jet3) -> Jet3:
    if isinstance(node, Const):
        return Jet3.constant(node.value)
    if isinstance(node, Var):
        return var
    if isinstance(node, Unary):
        u = _jet(node.arg, x, var)
        op = node.op
        if op == "neg":
            return -u
        if op == "sin":
            s, c = np.sin(u.v0), np.cos(u.v0)
            return u.compose(s, c, -s, -c)
        if op == "cos":
            s, c = np.sin(u.v0), np.cos(u.v0)
            return u.compose(c, -s, -c, s)
        if op == "tan":
            s, c = np.sin(u.v0), np.cos(u.v0)
            bad = np.abs(c) < 1e-15
            if np.any(bad):
                _fail(node, x, bad, "tan at a pole")
            return u.compose(s, c, -s, -c) / u.compose(c, -s, -c, s)
        if op == "exp":
            e = _check_finite(node, x, np.exp(u.v0))
            return u.compose(e, e, e, e)
        if op == "ln":
            bad = u.v0 <= 0
            if np.any(bad):
                _fail(node, x, bad, "ln of nonpositive value")
            r = 1.0 / u.v0
            return u.compose(np.log(u.v0), r, -r * r, 2.0 * r**3)
        # sqrt
        bad = u.v0 <= 0
        if np.any(bad):
            _fail(node, x, bad, "sqrt needs a positive argument for derivatives")
        s = np.sqrt(u.v0)
        return u.compose(s, 0.5 / s, -0.25 / s**3, 0.375 / s**5)
    if isinstance(node, Binary):
        left = _jet(node.left, x, var)
        right = _jet(node.right, x, var)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        bad = right.v0 == 0
        if np.any(bad):
            _fail(node, x, bad, "division by zero")
        return left / right
    u = _jet(node.base, x, var)
    p = node.exponent
    if float(p).is_integer():
        k = int(p)
        if k < 0:
            bad = u.v0 == 0
            if np.any(bad):
                _fail(node, x, bad, "zero raised to a negative power")
        result = _int_power(u, abs(k))
        return result.reciprocal() if k < 0 else result
    bad = u.v0 <= 0
    if np.any(bad):
        _fail(node, x, bad, "non-integer power of nonpositive value")
    # u^p = exp(p ln u)
    r = 1.0 / u.v0
    lnu = u.compose(np.log(u.v0), r, -r * r, 2.0 * r**3)
    scaled = Jet3(p * lnu.v0, p * lnu.v1, p * lnu.v2, p * lnu.v3)
    e = np.exp(scaled.v0)
    return scaled.compose(e, e, e, e)


def _int_power(u: Jet3, k: int) -> Jet3:
    result = Jet3.constant(1.0)
    base = u
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result

"""Expression mini-language for closed-form oracles.

Grammar (``^`` is right-associative and binds tighter than unary minus)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' unary)?
    primary := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')'

Variables are ``x1 .. xd``; functions are ``exp log sin cos``.  Evaluation is
complex-valued and vectorized over points.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidArgument
from .exppoly import MultivariatePolynomial, RonkinExponent, RonkinForm
from .oracle import FunctionOracle

FUNCTIONS = {"exp": np.exp, "log": np.log, "sin": np.sin, "cos": np.cos}


class ExpressionError(ValueError):
    """Parse failure at byte offset ``offset``; ``kind`` is lexical/syntax/
    unknown-identifier/variable-range/arity."""

    def __init__(self, kind: str, message: str, offset: int):
        self.kind = kind
        self.offset = offset
        super().__init__(f"{kind} error at offset {offset}: {message}")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based, as written


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks, pos = [], 0
    raw = text.encode("utf-8")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            offset = len(text[:pos].encode("utf-8"))
            raise ExpressionError("lexical", f"unexpected character {text[pos]!r}", offset)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), len(text[:pos].encode("utf-8"))))
        pos = m.end()
    toks.append(_Tok("eof", "", len(raw)))
    return toks


class _Parser:
    def __init__(self, text: str, dim: int, prefix: str = "x"):
        self.toks = _tokenize(text)
        self.i = 0
        self.dim = dim
        self.var = re.compile(re.escape(prefix) + r"(\d+)")
        self.prefix = prefix

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str):
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise ExpressionError("syntax", f"expected {text!r}, found {found!r}", self.tok.pos)
        return self.take()

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "eof":
            raise ExpressionError("syntax", f"unexpected {self.tok.text!r}", self.tok.pos)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.take().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.tok.text == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.tok.text == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.take()
            return Num(float(t.text))
        if t.text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "name":
            self.take()
            m = self.var.fullmatch(t.text)
            if m:
                idx = int(m.group(1))
                if not 1 <= idx <= self.dim:
                    raise ExpressionError("variable-range",
                                          f"{t.text} outside {self.prefix}1..{self.prefix}{self.dim}", t.pos)
                return Var(idx)
            if t.text in FUNCTIONS:
                return Call(t.text, self.call_args(t))
            raise ExpressionError("unknown-identifier", f"unknown identifier {t.text!r}", t.pos)
        found = t.text or "end of input"
        raise ExpressionError("syntax", f"unexpected {found!r}", t.pos)

    def call_args(self, name_tok: _Tok) -> Expr:
        if self.tok.text != "(":
            raise ExpressionError("arity", f"{name_tok.text} needs one parenthesized argument", self.tok.pos)
        self.take()
        if self.tok.text == ")":
            raise ExpressionError("arity", f"{name_tok.text} takes exactly one argument, got 0", self.tok.pos)
        arg = self.expr()
        if self.tok.text == ",":
            raise ExpressionError("arity", f"{name_tok.text} takes exactly one argument", self.tok.pos)
        self.expect(")")
        return arg


def parse_expression(text: str, dim: int, prefix: str = "x") -> Expr:
    """Parse ``text``; variables are ``{prefix}1 .. {prefix}{dim}``."""
    if dim < 1:
        raise InvalidArgument("dim must be positive")
    return _Parser(text, dim, prefix).parse()


def evaluate_expression(node: Expr, points: np.ndarray) -> np.ndarray:
    """Evaluate on an ``(m, d)`` array of points; returns ``m`` complex values."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    with np.errstate(all="ignore"):
        return np.broadcast_to(_eval(node, points), (points.shape[0],)).astype(complex)


def _eval(node: Expr, pts: np.ndarray):
    if isinstance(node, Num):
        return complex(node.value)
    if isinstance(node, Var):
        return pts[:, node.index - 1].astype(complex)
    if isinstance(node, Neg):
        # 0 - v keeps +0 imaginary parts, so log(-1) = +i*pi as for a literal
        return 0 - _eval(node.operand, pts)
    if isinstance(node, Call):
        return FUNCTIONS[node.name](np.asarray(_eval(node.arg, pts), dtype=complex))
    a, b = _eval(node.left, pts), _eval(node.right, pts)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return np.asarray(a, dtype=complex) / b
    return np.power(np.asarray(a, dtype=complex), b)


def to_text(node: Expr, prefix: str = "x") -> str:
    """Canonical fully parenthesized rendering; ``parse(to_text(e)) == e``."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return f"{prefix}{node.index}"
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand, prefix)})"
    if isinstance(node, Call):
        return f"{node.name}({to_text(node.arg, prefix)})"
    return f"({to_text(node.left, prefix)} {node.op} {to_text(node.right, prefix)})"


def max_variable(node: Expr) -> int:
    if isinstance(node, Num):
        return 0
    if isinstance(node, Var):
        return node.index
    if isinstance(node, (Neg, Call)):
        return max_variable(node.operand if isinstance(node, Neg) else node.arg)
    return max(max_variable(node.left), max_variable(node.right))


def expression_oracle(text: str, dim: int) -> FunctionOracle:
    node = parse_expression(text, dim)
    return FunctionOracle(dim, lambda pts: evaluate_expression(node, pts), "closed-form")


# --- symbolic conversion to Ronkin forms -------------------------------------

class NotRonkinForm(ValueError):
    """The expression is not a sum of polynomial * exp(multilinear) terms."""


def _poly_of(node: Expr, dim: int) -> MultivariatePolynomial:
    """Exact polynomial for a subtree without exp/log/sin/cos, else NotRonkinForm."""
    if isinstance(node, Num):
        return MultivariatePolynomial.constant(dim, node.value)
    if isinstance(node, Var):
        return MultivariatePolynomial.variable(dim, node.index - 1)
    if isinstance(node, Neg):
        return -_poly_of(node.operand, dim)
    if isinstance(node, BinOp):
        if node.op in "+-*":
            a, b = _poly_of(node.left, dim), _poly_of(node.right, dim)
            return a + b if node.op == "+" else a - b if node.op == "-" else a * b
        if node.op == "/":
            b = _poly_of(node.right, dim)
            if b.degree != 0:
                raise NotRonkinForm("division by a non-constant")
            return _poly_of(node.left, dim).scale(1 / b.terms[(0,) * dim])
        if node.op == "^":
            e = node.right
            if isinstance(e, Num) and float(e.value).is_integer() and e.value >= 0:
                base = _poly_of(node.left, dim)
                out = MultivariatePolynomial.constant(dim, 1.0)
                for _ in range(int(e.value)):
                    out = out * base
                return out
            raise NotRonkinForm("only non-negative integer powers are polynomial")
    raise NotRonkinForm(f"{to_text(node)} is not a polynomial")


def _exponent_of(poly: MultivariatePolynomial) -> RonkinExponent:
    coeffs, constant = {}, 0j
    for alpha, c in poly.terms.items():
        if any(a > 1 for a in alpha):
            raise NotRonkinForm("exponent is not multilinear (a variable appears squared)")
        subset = tuple(i for i, a in enumerate(alpha) if a)
        if subset:
            coeffs[subset] = c
        else:
            constant = c
    return RonkinExponent(poly.dim, constant, coeffs)


def _terms(node: Expr, dim: int) -> list[tuple[MultivariatePolynomial, RonkinExponent]]:
    zero_exp = RonkinExponent(dim)
    if isinstance(node, Call):
        if node.name != "exp":
            raise NotRonkinForm(f"{node.name} is not allowed in a Ronkin form")
        return [(MultivariatePolynomial.constant(dim, 1.0), _exponent_of(_poly_of(node.arg, dim)))]
    if isinstance(node, Neg):
        return [(-p, e) for p, e in _terms(node.operand, dim)]
    if isinstance(node, BinOp) and node.op in "+-":
        right = _terms(node.right, dim)
        if node.op == "-":
            right = [(-p, e) for p, e in right]
        return _terms(node.left, dim) + right
    if isinstance(node, BinOp) and node.op == "*":
        return [(p * q, e + f) for p, e in _terms(node.left, dim) for q, f in _terms(node.right, dim)]
    if isinstance(node, BinOp) and node.op == "/":
        b = _poly_of(node.right, dim)
        if b.degree != 0:
            raise NotRonkinForm("division by a non-constant")
        c = b.terms[(0,) * dim]
        return [(p.scale(1 / c), e) for p, e in _terms(node.left, dim)]
    return [(_poly_of(node, dim), zero_exp)]


def expression_to_ronkin(node: Expr, dim: int) -> RonkinForm:
    return RonkinForm(dim, tuple((p, e) for p, e in _terms(node, dim) if not p.is_zero()))

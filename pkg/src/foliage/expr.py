"""Closed-form scalar expression language.

Metric components, vertical frames, map components and distance fields are
written in this little language.  The grammar (also documented in the README,
it is part of the scenario-file contract):

    expr    := term  (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)*          # exponent must be constant
    atom    := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"

Binary operators of equal precedence associate to the left, "^" binds tighter
than unary minus, and the exponent of "^" must fold to a constant (no
variables).  Functions: exp, log, sin, cos, tan, sqrt, tanh, arccosh, abs.
There is no implicit multiplication: "2x" is a syntax error.

Parsed trees are immutable and shareable; evaluation is pure and targets
either jet arithmetic (`eval_jet`) or plain floats (`eval_real`).  Both paths
share scalar helpers so an order-0 jet evaluation is bit-identical to the
float evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ExprSyntaxError, UnknownIdentifier
from .jets import Jet, _powi

FUNCTIONS = ("exp", "log", "sin", "cos", "tan", "sqrt", "tanh", "arccosh", "abs")


class Expr:
    """Base class of AST nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr


# ---- lexer -----------------------------------------------------------------

_DIGITS = "0123456789"


def _tokenize(source):
    tokens = []
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch in _DIGITS or (ch == "." and i + 1 < n and source[i + 1] in _DIGITS):
            j = i
            while j < n and source[j] in _DIGITS:
                j += 1
            if j < n and source[j] == ".":
                j += 1
                while j < n and source[j] in _DIGITS:
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k] in _DIGITS:
                    j = k
                    while j < n and source[j] in _DIGITS:
                        j += 1
            tokens.append(("num", source[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(("ident", source[i:j], i))
            i = j
            continue
        if ch in "+-*/^()":
            tokens.append((ch, ch, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


# ---- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, source):
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ExprSyntaxError(f"expected {kind!r}", tok[2])
        self.pos += 1
        return tok

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected token {tok[1]!r}", tok[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        while self.peek()[0] == "^":
            offset = self.take()[2]
            exponent = self.unary()
            node = BinOp("^", node, Num(_fold_constant(exponent, offset)))
        return node

    def atom(self):
        kind, text, offset = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            if self.peek()[0] == "(":
                if text not in FUNCTIONS:
                    raise ExprSyntaxError(f"unknown function {text!r}", offset)
                self.take("(")
                arg = self.expr()
                self.take(")")
                return Call(text, arg)
            return Var(text)
        if kind == "(":
            node = self.expr()
            self.take(")")
            return node
        raise ExprSyntaxError(f"unexpected token {text!r}" if text else
                              "unexpected end of input", offset)


def _fold_constant(node, offset):
    """Exponents must be constant; fold the subtree to a number."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Neg):
        return -_fold_constant(node.operand, offset)
    if isinstance(node, BinOp):
        lhs = _fold_constant(node.left, offset)
        rhs = _fold_constant(node.right, offset)
        return {"+": lhs + rhs, "-": lhs - rhs, "*": lhs * rhs,
                "/": lhs / rhs, "^": lhs ** rhs}[node.op]
    raise ExprSyntaxError("exponent must be a constant", offset)


def parse(source):
    """Parse expression source text into an AST."""
    return _Parser(source).parse()


def variables(node):
    """Set of variable names appearing in a tree."""
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, Neg):
        return variables(node.operand)
    if isinstance(node, BinOp):
        return variables(node.left) | variables(node.right)
    if isinstance(node, Call):
        return variables(node.arg)
    raise TypeError(f"not an Expr node: {node!r}")


# ---- printer ---------------------------------------------------------------

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def to_source(node):
    """Render a tree back to source; parse(to_source(parse(s))) == parse(s)."""
    text, _ = _render(node)
    return text


def _render(node):
    if isinstance(node, Num):
        v = node.value
        if v < 0:
            return f"-{_format_number(-v)}", _PRECEDENCE["neg"]
        return _format_number(v), 9
    if isinstance(node, Var):
        return node.name, 9
    if isinstance(node, Call):
        inner, _ = _render(node.arg)
        return f"{node.fn}({inner})", 9
    if isinstance(node, Neg):
        inner, prec = _render(node.operand)
        if prec <= _PRECEDENCE["neg"]:
            inner = f"({inner})"
        return f"-{inner}", _PRECEDENCE["neg"]
    if isinstance(node, BinOp):
        my = _PRECEDENCE[node.op]
        lhs, lp = _render(node.left)
        rhs, rp = _render(node.right)
        # left associative: parenthesize a right child of equal precedence
        if lp < my or (node.op == "^" and lp <= my):
            lhs = f"({lhs})"
        if rp <= my:
            rhs = f"({rhs})"
        return f"{lhs} {node.op} {rhs}", my
    raise TypeError(f"not an Expr node: {node!r}")


def _format_number(v):
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


# ---- evaluation ------------------------------------------------------------


def eval_jet(node, env):
    """Evaluate to a jet; env maps variable names to same-space jets."""
    if isinstance(node, Num):
        probe = next(iter(env.values()))
        return Jet.constant(node.value, probe.dim, probe.order)
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise UnknownIdentifier(node.name) from None
    if isinstance(node, Neg):
        return -eval_jet(node.operand, env)
    if isinstance(node, BinOp):
        lhs = eval_jet(node.left, env)
        if node.op == "^":
            return lhs.pow(node.right.value)
        rhs = eval_jet(node.right, env)
        if node.op == "+":
            return lhs + rhs
        if node.op == "-":
            return lhs - rhs
        if node.op == "*":
            return lhs * rhs
        return lhs / rhs
    if isinstance(node, Call):
        arg = eval_jet(node.arg, env)
        if node.fn == "tan":
            return arg.sin() / arg.cos()
        return getattr(arg, "absolute" if node.fn == "abs" else node.fn)()
    raise TypeError(f"not an Expr node: {node!r}")


def eval_real(node, env):
    """Evaluate to a float, matching order-0 jet evaluation exactly."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        try:
            return float(env[node.name])
        except KeyError:
            raise UnknownIdentifier(node.name) from None
    if isinstance(node, Neg):
        return -eval_real(node.operand, env)
    if isinstance(node, BinOp):
        lhs = eval_real(node.left, env)
        if node.op == "^":
            return _real_pow(lhs, node.right.value)
        rhs = eval_real(node.right, env)
        if node.op == "+":
            return lhs + rhs
        if node.op == "-":
            return lhs - rhs
        if node.op == "*":
            return lhs * rhs
        if rhs == 0.0:
            raise DomainError("division by zero at base point")
        return lhs / rhs
    if isinstance(node, Call):
        return _real_call(node.fn, eval_real(node.arg, env))
    raise TypeError(f"not an Expr node: {node!r}")


def _real_pow(base, exponent):
    if isinstance(exponent, float) and exponent.is_integer():
        exponent = int(exponent)
    if isinstance(exponent, int):
        if exponent < 0 and base == 0.0:
            raise DomainError("zero base with negative exponent")
        return _powi(base, exponent)
    if base <= 0.0:
        raise DomainError(f"nonpositive base {base} with non-integer exponent")
    return base ** float(exponent)


def _real_call(fn, v):
    if fn == "exp":
        return math.exp(v)
    if fn == "log":
        if v <= 0.0:
            raise DomainError(f"log of nonpositive value {v}")
        return math.log(v)
    if fn == "sin":
        return math.sin(v)
    if fn == "cos":
        return math.cos(v)
    if fn == "tan":
        c = math.cos(v)
        if c == 0.0:
            raise DomainError("tan at a pole")
        return math.sin(v) / c
    if fn == "sqrt":
        if v <= 0.0:
            raise DomainError(f"sqrt of nonpositive value {v}")
        return v ** 0.5
    if fn == "tanh":
        return math.tanh(v)
    if fn == "arccosh":
        if v <= 1.0:
            raise DomainError(f"arccosh argument {v} not above 1")
        return math.acosh(v)
    if fn == "abs":
        if v == 0.0:
            raise DomainError("abs is not differentiable at 0")
        return abs(v)
    raise ValueError(f"unknown function {fn!r}")

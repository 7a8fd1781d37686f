"""Arithmetic expressions in x and lt = log(t/a), with truncated Taylor jets.

Grammar (precedence low to high)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

Jets give the Taylor coefficients of an expression in one variable; they
supply delta_t^j g(a) = j! * [lt^j] g, since delta_t = t d/dt is d/dlt.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .cq import series_power
from .special_functions import gamma as _gamma

__all__ = [
    "ExprSyntaxError",
    "ExprDomainError",
    "NonAnalyticError",
    "Num",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "Expression",
    "parse",
    "evaluate",
    "to_source",
    "uses_var",
    "TaylorJet",
    "taylor",
    "taylor_in_lt",
]

VARIABLES = ("x", "lt")
CONSTANTS = {"pi": math.pi}
FUNCTIONS = {"sin": 1, "cos": 1, "exp": 1, "log": 1, "sqrt": 1, "pow": 2, "gamma": 1}


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int, source: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.source = source


class ExprDomainError(ValueError):
    def __init__(self, message: str, node: "Expression"):
        super().__init__(f"{message} in '{to_source(node)}'")
        self.node = node


class NonAnalyticError(ValueError):
    pass


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Expression = Union[Num, Const, Var, Neg, BinOp, Call]

# ---------------------------------------------------------------------------
# tokenizer and parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)

_BINARY = {"+": (10, "left"), "-": (10, "left"), "*": (20, "left"), "/": (20, "left"), "^": (40, "right")}
_UNARY_BP = 30


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = []
        pos = 0
        while pos < len(src):
            if src[pos:].strip() == "":
                break
            m = _TOKEN.match(src, pos)
            if not m:
                bad = len(src[pos:]) - len(src[pos:].lstrip()) + pos
                raise ExprSyntaxError(f"unexpected character {src[bad]!r}", bad, src)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.tokens.append(("end", "", len(src)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, off = self.next()
        if text != value or kind != "op":
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", off, self.src)

    def parse(self) -> Expression:
        node = self.expression(0)
        kind, text, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"expected operator or end of input, found {text!r}", off, self.src)
        return node

    def expression(self, min_bp: int) -> Expression:
        left = self.prefix()
        while True:
            kind, text, _ = self.peek()
            if kind != "op" or text not in _BINARY:
                return left
            bp, assoc = _BINARY[text]
            if bp < min_bp or (bp == min_bp and assoc == "left"):
                return left
            self.next()
            right = self.expression(bp if assoc == "right" else bp + 1)
            left = BinOp(text, left, right)

    def prefix(self) -> Expression:
        kind, text, off = self.next()
        if kind == "num":
            return Num(float(text))
        if kind == "op" and text == "-":
            return Neg(self.expression(_UNARY_BP))
        if kind == "op" and text == "(":
            node = self.expression(0)
            self.expect(")")
            return node
        if kind == "name":
            if text in FUNCTIONS:
                self.expect("(")
                args = [self.expression(0)]
                while self.peek()[1] == "," and self.peek()[0] == "op":
                    self.next()
                    args.append(self.expression(0))
                self.expect(")")
                if len(args) != FUNCTIONS[text]:
                    raise ExprSyntaxError(
                        f"{text} expects {FUNCTIONS[text]} argument(s), got {len(args)}", off, self.src
                    )
                return Call(text, tuple(args))
            if text in VARIABLES:
                return Var(text)
            if text in CONSTANTS:
                return Const(text)
            raise ExprSyntaxError(f"unknown name {text!r}", off, self.src)
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"expected number, name or '(', found {found}", off, self.src)


def parse(src: str) -> Expression:
    return _Parser(src).parse()


# ---------------------------------------------------------------------------
# pretty printing


def _prec(node: Expression) -> int:
    if isinstance(node, BinOp):
        return _BINARY[node.op][0]
    if isinstance(node, Neg):
        return _UNARY_BP
    return 100


def to_source(node: Expression) -> str:
    """Render with the minimal parentheses that reparse to the same tree."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_source(a) for a in node.args)})"
    if isinstance(node, Neg):
        inner = to_source(node.operand)
        return f"-{inner}" if _prec(node.operand) >= _UNARY_BP else f"-({inner})"
    bp, assoc = _BINARY[node.op]
    left, right = to_source(node.left), to_source(node.right)
    lp, rp = _prec(node.left), _prec(node.right)
    if lp < bp or (lp == bp and assoc == "right") or (node.op == "^" and isinstance(node.left, Neg)):
        left = f"({left})"
    if rp < bp or (rp == bp and assoc == "left"):
        right = f"({right})"
    return f"{left}{node.op}{right}" if node.op == "^" else f"{left} {node.op} {right}"


def uses_var(node: Expression, name: str) -> bool:
    if isinstance(node, Var):
        return node.name == name
    if isinstance(node, Neg):
        return uses_var(node.operand, name)
    if isinstance(node, BinOp):
        return uses_var(node.left, name) or uses_var(node.right, name)
    if isinstance(node, Call):
        return any(uses_var(a, name) for a in node.args)
    return False


# ---------------------------------------------------------------------------
# evaluation


def _power(base, expo, node):
    base = np.asarray(base, dtype=float)
    expo = np.asarray(expo, dtype=float)
    if np.any((base == 0) & (expo < 0)):
        raise ExprDomainError("zero raised to a negative power", node)
    if np.any((base < 0) & (expo != np.round(expo))):
        raise ExprDomainError("negative base with non-integer exponent", node)
    return base**expo


def _eval(node: Expression, env: dict):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, BinOp):
        a, b = _eval(node.left, env), _eval(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if np.any(np.asarray(b) == 0):
                raise ExprDomainError("division by zero", node)
            return a / b
        return _power(a, b, node)
    args = [_eval(a, env) for a in node.args]
    name = node.name
    if name == "pow":
        return _power(args[0], args[1], node)
    (arg,) = args
    if name == "log":
        if np.any(np.asarray(arg) <= 0):
            raise ExprDomainError("log of a nonpositive value", node)
        return np.log(arg)
    if name == "sqrt":
        if np.any(np.asarray(arg) < 0):
            raise ExprDomainError("sqrt of a negative value", node)
        return np.sqrt(arg)
    if name == "gamma":
        try:
            return np.vectorize(_gamma, otypes=[float])(arg) if np.ndim(arg) else _gamma(arg)
        except ValueError as exc:
            raise ExprDomainError(str(exc), node) from exc
    return {"sin": np.sin, "cos": np.cos, "exp": np.exp}[name](arg)


def evaluate(node: Expression, x=0.0, lt=0.0):
    """Evaluate at ``x`` (scalar or array) and ``lt``; broadcasts like numpy."""
    out = _eval(node, {"x": x, "lt": lt})
    if np.ndim(out) == 0:
        return float(out)
    return np.broadcast_to(out, np.broadcast(np.asarray(x), np.asarray(lt)).shape)


# ---------------------------------------------------------------------------
# Taylor jets


class TaylorJet:
    """Truncated Taylor series c[0] + c[1] h + ... + c[J] h^J.

    Coefficients may be arrays (one jet per spatial point); arithmetic is
    elementwise in that trailing shape and truncates at order J.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=float)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @classmethod
    def constant(cls, value, J: int) -> "TaylorJet":
        value = np.asarray(value, dtype=float)
        c = np.zeros((J + 1,) + value.shape)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, point, J: int) -> "TaylorJet":
        c = cls.constant(point, J)
        if J >= 1:
            c.coeffs[1] = 1.0
        return c

    def _aligned(self, other):
        a, b = self.coeffs, other.coeffs
        # leading axis is the Taylor index; pad spatial axes on the right
        while a.ndim < b.ndim:
            a = a[..., None]
        while b.ndim < a.ndim:
            b = b[..., None]
        return a, b

    def __add__(self, other):
        a, b = self._aligned(other)
        return TaylorJet(a + b)

    def __sub__(self, other):
        a, b = self._aligned(other)
        return TaylorJet(a - b)

    def __neg__(self):
        return TaylorJet(-self.coeffs)

    def __mul__(self, other):
        a, b = self._aligned(other)
        J = self.order
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for n in range(J + 1):
            for k in range(n + 1):
                out[n] = out[n] + a[k] * b[n - k]
        return TaylorJet(out)

    def __truediv__(self, other):
        a, b = self._aligned(other)
        J = self.order
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for n in range(J + 1):
            acc = a[n] - sum((b[k] * out[n - k] for k in range(1, n + 1)), np.zeros_like(out[0]))
            out[n] = acc / b[0]
        return TaylorJet(out)

    def is_constant(self) -> bool:
        return not np.any(self.coeffs[1:])

    def power(self, r: float) -> "TaylorJet":
        """self ** r for a constant exponent, via the Miller recurrence."""
        c = self.coeffs
        J = self.order
        if float(r).is_integer() and r >= 0:
            out = TaylorJet.constant(np.ones(c.shape[1:]), J)
            for _ in range(int(r)):
                out = out * self
            return out
        flat = c.reshape(J + 1, -1)
        res = np.empty_like(flat)
        for i in range(flat.shape[1]):
            res[:, i] = series_power(_pad_lead(flat[:, i]), r, J)
        return TaylorJet(res.reshape(c.shape))

    def exp(self) -> "TaylorJet":
        a = self.coeffs
        out = np.zeros_like(a)
        out[0] = np.exp(a[0])
        for n in range(1, self.order + 1):
            out[n] = sum(k * a[k] * out[n - k] for k in range(1, n + 1)) / n
        return TaylorJet(out)

    def log(self) -> "TaylorJet":
        a = self.coeffs
        out = np.zeros_like(a)
        out[0] = np.log(a[0])
        for n in range(1, self.order + 1):
            s = sum((k * out[k] * a[n - k] for k in range(1, n)), np.zeros_like(a[0]))
            out[n] = (a[n] - s / n) / a[0]
        return TaylorJet(out)

    def sincos(self) -> tuple["TaylorJet", "TaylorJet"]:
        a = self.coeffs
        s = np.zeros_like(a)
        c = np.zeros_like(a)
        s[0], c[0] = np.sin(a[0]), np.cos(a[0])
        for n in range(1, self.order + 1):
            s[n] = sum(k * a[k] * c[n - k] for k in range(1, n + 1)) / n
            c[n] = -sum(k * a[k] * s[n - k] for k in range(1, n + 1)) / n
        return TaylorJet(s), TaylorJet(c)


def _pad_lead(a: np.ndarray) -> np.ndarray:
    # series_power trims trailing zeros; a zero-length result would lose a[0]
    return a if np.any(a) else np.array([a[0]])


def _jet(node: Expression, var: str, env: dict, J: int) -> TaylorJet:
    if not uses_var(node, var):
        return TaylorJet.constant(_eval(node, env), J)
    if isinstance(node, Var):
        return TaylorJet.variable(env[var], J)
    if isinstance(node, Neg):
        return -_jet(node.operand, var, env, J)
    if isinstance(node, BinOp):
        a, b = _jet(node.left, var, env, J), _jet(node.right, var, env, J)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if np.any(b.coeffs[0] == 0):
                raise NonAnalyticError(f"division by a quantity vanishing at the expansion point: '{to_source(node)}'")
            return a / b
        return _jet_pow(a, b, node)
    if node.name == "pow":
        a, b = (_jet(arg, var, env, J) for arg in node.args)
        return _jet_pow(a, b, node)
    (a,) = (_jet(arg, var, env, J) for arg in node.args)
    name = node.name
    if name == "exp":
        return a.exp()
    if name in ("sin", "cos"):
        s, c = a.sincos()
        return s if name == "sin" else c
    if name in ("log", "sqrt"):
        if np.any(a.coeffs[0] <= 0):
            raise NonAnalyticError(f"{name} is not analytic here: '{to_source(node)}'")
        return a.log() if name == "log" else a.power(0.5)
    raise NonAnalyticError(f"no Taylor rule for {name} of a varying argument: '{to_source(node)}'")


def _jet_pow(a: TaylorJet, b: TaylorJet, node) -> TaylorJet:
    if b.is_constant():
        r = b.coeffs[0]
        if np.ndim(r) and np.ptp(r) != 0:
            # exponent constant in the jet variable but varying in space
            if np.any(a.coeffs[0] <= 0):
                raise NonAnalyticError(f"non-analytic power '{to_source(node)}'")
            return (a.log() * b).exp()
        r = float(np.ravel(r)[0])
        if float(r).is_integer() and r >= 0:
            return a.power(r)
        if np.any(a.coeffs[0] == 0):
            raise NonAnalyticError(f"non-integer power of a vanishing base: '{to_source(node)}'")
        if np.any(a.coeffs[0] < 0):
            raise NonAnalyticError(f"non-integer power of a negative base: '{to_source(node)}'")
        return a.power(r)
    if np.any(a.coeffs[0] <= 0):
        raise NonAnalyticError(f"variable exponent needs a positive base: '{to_source(node)}'")
    return (a.log() * b).exp()


def taylor(node: Expression, var: str, point: float, J: int, **env) -> TaylorJet:
    """Jet of ``node`` in ``var`` about ``point``; other variables fixed by ``env``."""
    if var not in VARIABLES:
        raise ValueError(f"unknown variable {var!r}")
    values = {"x": 0.0, "lt": 0.0}
    values.update(env)
    values[var] = point
    return _jet(node, var, values, J)


def taylor_in_lt(node: Expression, x, J: int) -> TaylorJet:
    """Jet in lt at lt = 0; delta_t^j of the expression at t = a is j! * coeffs[j]."""
    return taylor(node, "lt", 0.0, J, x=x)

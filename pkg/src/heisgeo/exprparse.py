"""Arithmetic expression parser with exact forward-mode derivatives.

Radial profiles h(r) and graph heights f(x, y) can be given as strings
("sqrt(R^2 - r^2)", "(lambda*r*sqrt(1-lambda^2*r^2)+acos(lambda*r))/(2*lambda^2)", ...).
A small recursive-descent parser turns them into an immutable AST that
evaluates either on floats or on dual numbers (value, derivative), so
first derivatives come out exact instead of via finite differences.

Grammar (precedence low to high):
    sum      := product (('+' | '-') product)*
    product  := unary (('*' | '/') unary)*
    unary    := '-' unary | power            # unary minus binds looser than '^'
    power    := atom ('^' unary)?            # right-associative
    atom     := number | name | name '(' args ')' | '(' sum ')'

Domain edges get a small clamp slack (1e-12) so e.g. sqrt(1 - r^2)
evaluates to 0 at r = 1 instead of raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

CLAMP_SLACK = 1e-12

FUNCTIONS = {
    "sqrt": 1,
    "sin": 1,
    "cos": 1,
    "acos": 1,
    "abs": 1,
    "exp": 1,
    "ln": 1,
    "pow": 2,
}


class ExprError(ValueError):
    """Base class for parse/eval errors; ``position`` is a byte offset."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (offset {position})"
        super().__init__(message)


class IllegalCharacterError(ExprError):
    pass


class MalformedNumberError(ExprError):
    pass


class UnexpectedTokenError(ExprError):
    pass


class UnbalancedParenError(ExprError):
    pass


class UnboundVariableError(ExprError):
    pass


class DomainError(ExprError):
    pass


# ---------------------------------------------------------------- tokens

@dataclass(frozen=True)
class Token:
    kind: str  # 'number' | 'ident' | 'op' | 'lparen' | 'rparen' | 'comma' | 'end'
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and src[i + 1].isdigit()):
            start = i
            while i < n and src[i].isdigit():
                i += 1
            if i < n and src[i] == ".":
                dot = i
                i += 1
                if i >= n or not src[i].isdigit():
                    raise MalformedNumberError("digit expected after decimal point", dot)
                while i < n and src[i].isdigit():
                    i += 1
            if i < n and src[i] in "eE":
                epos = i
                i += 1
                if i < n and src[i] in "+-":
                    i += 1
                if i >= n or not src[i].isdigit():
                    raise MalformedNumberError("malformed exponent", epos)
                while i < n and src[i].isdigit():
                    i += 1
            tokens.append(Token("number", src[start:i], start))
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < n and (src[i].isalnum() or src[i] == "_"):
                i += 1
            tokens.append(Token("ident", src[start:i], start))
            continue
        if c in "+-*/^":
            tokens.append(Token("op", c, i))
            i += 1
            continue
        if c == "(":
            tokens.append(Token("lparen", c, i))
            i += 1
            continue
        if c == ")":
            tokens.append(Token("rparen", c, i))
            i += 1
            continue
        if c == ",":
            tokens.append(Token("comma", c, i))
            i += 1
            continue
        raise IllegalCharacterError(f"illegal character {c!r}", i)
    tokens.append(Token("end", "", n))
    return tokens


# ---------------------------------------------------------------- AST

@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Variable:
    name: str
    pos: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # 'neg'
    child: "Ast"


@dataclass(frozen=True)
class Binary:
    op: str  # '+', '-', '*', '/', '^'
    left: "Ast"
    right: "Ast"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Ast", ...]


Ast = Constant | Variable | Unary | Binary | Call


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            if kind == "rparen":
                raise UnbalancedParenError(f"expected {what}", tok.pos)
            raise UnexpectedTokenError(f"expected {what}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.advance()

    def parse_sum(self) -> Ast:
        node = self.parse_product()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = Binary(op, node, self.parse_product())
        return node

    def parse_product(self) -> Ast:
        node = self.parse_unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = Binary(op, node, self.parse_unary())
        return node

    def parse_unary(self) -> Ast:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Unary("neg", self.parse_unary())
        if tok.kind == "op" and tok.text == "+":
            self.advance()
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self) -> Ast:
        base = self.parse_atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            # right-associative; exponent may carry its own unary minus
            return Binary("^", base, self.parse_unary())
        return base

    def parse_atom(self) -> Ast:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Constant(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            if self.peek().kind == "lparen":
                if tok.text not in FUNCTIONS:
                    raise UnexpectedTokenError(f"unknown function {tok.text!r}", tok.pos)
                self.advance()
                args = [self.parse_sum()]
                while self.peek().kind == "comma":
                    self.advance()
                    args.append(self.parse_sum())
                self.expect("rparen", "')'")
                if len(args) != FUNCTIONS[tok.text]:
                    raise UnexpectedTokenError(
                        f"{tok.text} takes {FUNCTIONS[tok.text]} argument(s), got {len(args)}", tok.pos)
                return Call(tok.text, tuple(args))
            return Variable(tok.text, tok.pos)
        if tok.kind == "lparen":
            self.advance()
            node = self.parse_sum()
            self.expect("rparen", "')'")
            return node
        if tok.kind == "rparen":
            raise UnbalancedParenError("unmatched ')'", tok.pos)
        raise UnexpectedTokenError(f"expected a value, found {tok.text or 'end of input'!r}", tok.pos)


def parse(tokens: list[Token]) -> Ast:
    parser = _Parser(tokens)
    node = parser.parse_sum()
    tok = parser.peek()
    if tok.kind == "rparen":
        raise UnbalancedParenError("unmatched ')'", tok.pos)
    if tok.kind != "end":
        raise UnexpectedTokenError(f"trailing input {tok.text!r}", tok.pos)
    return node


def parse_expr(src: str) -> Ast:
    return parse(tokenize(src))


def free_variables(ast: Ast) -> set[str]:
    match ast:
        case Constant():
            return set()
        case Variable(name):
            return {name}
        case Unary(_, child):
            return free_variables(child)
        case Binary(_, left, right):
            return free_variables(left) | free_variables(right)
        case Call(_, args):
            out = set()
            for a in args:
                out |= free_variables(a)
            return out
    raise TypeError(f"not an Ast node: {ast!r}")


def pretty(ast: Ast) -> str:
    """Fully parenthesized rendering; reparses to an identical tree."""
    match ast:
        case Constant(value):
            return repr(value)
        case Variable(name):
            return name
        case Unary("neg", child):
            return f"(-{pretty(child)})"
        case Binary(op, left, right):
            return f"({pretty(left)}{op}{pretty(right)})"
        case Call(func, args):
            return f"{func}({','.join(pretty(a) for a in args)})"
    raise TypeError(f"not an Ast node: {ast!r}")


# ---------------------------------------------------------------- dual numbers

@dataclass(frozen=True)
class DualNumber:
    """value + deriv * eps with eps^2 = 0; carries an exact first derivative."""

    value: float
    deriv: float

    def __add__(self, other):
        return DualNumber(self.value + other.value, self.deriv + other.deriv)

    def __sub__(self, other):
        return DualNumber(self.value - other.value, self.deriv - other.deriv)

    def __neg__(self):
        return DualNumber(-self.value, -self.deriv)

    def __mul__(self, other):
        return DualNumber(self.value * other.value,
                          self.deriv * other.value + self.value * other.deriv)

    def __truediv__(self, other):
        if other.value == 0.0:
            raise DomainError("division by zero")
        v = self.value / other.value
        return DualNumber(v, (self.deriv - v * other.deriv) / other.value)


def _clamp_nonneg(x: float) -> float:
    if x < 0.0:
        if x < -CLAMP_SLACK:
            raise DomainError(f"sqrt of negative value {x}")
        return 0.0
    return x


def _clamp_unit(x: float) -> float:
    if x > 1.0:
        if x > 1.0 + CLAMP_SLACK:
            raise DomainError(f"acos argument {x} outside [-1, 1]")
        return 1.0
    if x < -1.0:
        if x < -1.0 - CLAMP_SLACK:
            raise DomainError(f"acos argument {x} outside [-1, 1]")
        return -1.0
    return x


def _pow_float(a: float, b: float) -> float:
    if a == 0.0 and b < 0.0:
        raise DomainError("zero raised to a negative power")
    if a < 0.0 and b != round(b):
        raise DomainError(f"negative base {a} with non-integer exponent {b}")
    return a ** b


def _call_float(func: str, args: list[float]) -> float:
    x = args[0]
    if func == "sqrt":
        return math.sqrt(_clamp_nonneg(x))
    if func == "sin":
        return math.sin(x)
    if func == "cos":
        return math.cos(x)
    if func == "acos":
        return math.acos(_clamp_unit(x))
    if func == "abs":
        return abs(x)
    if func == "exp":
        return math.exp(x)
    if func == "ln":
        if x <= 0.0:
            raise DomainError(f"ln of non-positive value {x}")
        return math.log(x)
    if func == "pow":
        return _pow_float(x, args[1])
    raise ExprError(f"unknown function {func!r}")


def _call_dual(func: str, args: list[DualNumber]) -> DualNumber:
    x = args[0]
    if func == "sqrt":
        v = math.sqrt(_clamp_nonneg(x.value))
        if v == 0.0:
            # one-sided limit at the domain edge
            d = 0.0 if x.deriv == 0.0 else math.copysign(math.inf, x.deriv)
        else:
            d = x.deriv / (2.0 * v)
        return DualNumber(v, d)
    if func == "sin":
        return DualNumber(math.sin(x.value), math.cos(x.value) * x.deriv)
    if func == "cos":
        return DualNumber(math.cos(x.value), -math.sin(x.value) * x.deriv)
    if func == "acos":
        xv = _clamp_unit(x.value)
        s = math.sqrt(max(1.0 - xv * xv, 0.0))
        if s == 0.0:
            d = 0.0 if x.deriv == 0.0 else math.copysign(math.inf, -x.deriv)
        else:
            d = -x.deriv / s
        return DualNumber(math.acos(xv), d)
    if func == "abs":
        # derivative at 0 defined as 0
        sign = 0.0 if x.value == 0.0 else math.copysign(1.0, x.value)
        return DualNumber(abs(x.value), sign * x.deriv)
    if func == "exp":
        v = math.exp(x.value)
        return DualNumber(v, v * x.deriv)
    if func == "ln":
        if x.value <= 0.0:
            raise DomainError(f"ln of non-positive value {x.value}")
        return DualNumber(math.log(x.value), x.deriv / x.value)
    if func == "pow":
        return _pow_dual(x, args[1])
    raise ExprError(f"unknown function {func!r}")


def _pow_dual(a: DualNumber, b: DualNumber) -> DualNumber:
    if b.deriv == 0.0:
        c = b.value
        v = _pow_float(a.value, c)
        if c == 0.0:
            return DualNumber(v, 0.0)
        if a.value == 0.0:
            # c > 0 here; derivative is 0 for c > 1, a.deriv for c == 1, +-inf below
            if c > 1.0:
                d = 0.0
            elif c == 1.0:
                d = a.deriv
            else:
                d = 0.0 if a.deriv == 0.0 else math.copysign(math.inf, a.deriv)
            return DualNumber(v, d)
        return DualNumber(v, c * _pow_float(a.value, c - 1.0) * a.deriv)
    if a.value <= 0.0:
        raise DomainError("variable exponent requires a positive base")
    v = a.value ** b.value
    return DualNumber(v, v * (b.deriv * math.log(a.value) + b.value * a.deriv / a.value))


def eval_ast(ast: Ast, bindings: dict[str, float]) -> float:
    """Evaluate on floats; domain errors are raised, never NaN-propagated."""
    match ast:
        case Constant(value):
            return value
        case Variable(name):
            try:
                return float(bindings[name])
            except KeyError:
                raise UnboundVariableError(f"unbound variable {name!r}") from None
        case Unary("neg", child):
            return -eval_ast(child, bindings)
        case Binary(op, left, right):
            a = eval_ast(left, bindings)
            b = eval_ast(right, bindings)
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                if b == 0.0:
                    raise DomainError("division by zero")
                return a / b
            if op == "^":
                return _pow_float(a, b)
        case Call(func, args):
            return _call_float(func, [eval_ast(a, bindings) for a in args])
    raise TypeError(f"not an Ast node: {ast!r}")


def eval_dual(ast: Ast, var: str, bindings: dict[str, float]) -> DualNumber:
    """Forward-mode evaluation; returns (value, d/d var) exactly."""
    match ast:
        case Constant(value):
            return DualNumber(value, 0.0)
        case Variable(name):
            try:
                v = float(bindings[name])
            except KeyError:
                raise UnboundVariableError(f"unbound variable {name!r}") from None
            return DualNumber(v, 1.0 if name == var else 0.0)
        case Unary("neg", child):
            return -eval_dual(child, var, bindings)
        case Binary(op, left, right):
            a = eval_dual(left, var, bindings)
            b = eval_dual(right, var, bindings)
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                return a / b
            if op == "^":
                return _pow_dual(a, b)
        case Call(func, args):
            return _call_dual(func, [eval_dual(a, var, bindings) for a in args])
    raise TypeError(f"not an Ast node: {ast!r}")


# ------------------------------------------------------- vectorized evaluation
#
# Same semantics as the scalar evaluators, applied elementwise to numpy
# arrays.  Quadrature drives expression surfaces with thousands of nodes
# per call; walking the tree once per array instead of once per point is
# what keeps those surfaces usable.

def _clamp_nonneg_array(x):
    if np.any(x < -CLAMP_SLACK):
        raise DomainError("sqrt of negative value")
    return np.clip(x, 0.0, None)


def _clamp_unit_array(x):
    if np.any(np.abs(x) > 1.0 + CLAMP_SLACK):
        raise DomainError("acos argument outside [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def eval_ast_array(ast: Ast, bindings: dict) -> np.ndarray:
    """Evaluate on numpy arrays (bindings may mix arrays and scalars)."""
    match ast:
        case Constant(value):
            return np.asarray(value, dtype=float)
        case Variable(name):
            try:
                return np.asarray(bindings[name], dtype=float)
            except KeyError:
                raise UnboundVariableError(f"unbound variable {name!r}") from None
        case Unary("neg", child):
            return -eval_ast_array(child, bindings)
        case Binary(op, left, right):
            a = eval_ast_array(left, bindings)
            b = eval_ast_array(right, bindings)
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                if np.any(b == 0.0):
                    raise DomainError("division by zero")
                return a / b
            if op == "^":
                return _pow_array(a, b)
        case Call(func, args):
            vals = [eval_ast_array(a, bindings) for a in args]
            x = vals[0]
            if func == "sqrt":
                return np.sqrt(_clamp_nonneg_array(x))
            if func == "sin":
                return np.sin(x)
            if func == "cos":
                return np.cos(x)
            if func == "acos":
                return np.arccos(_clamp_unit_array(x))
            if func == "abs":
                return np.abs(x)
            if func == "exp":
                return np.exp(x)
            if func == "ln":
                if np.any(x <= 0.0):
                    raise DomainError("ln of non-positive value")
                return np.log(x)
            if func == "pow":
                return _pow_array(x, vals[1])
    raise TypeError(f"not an Ast node: {ast!r}")


def _pow_array(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any((a == 0.0) & (b < 0.0)):
        raise DomainError("zero raised to a negative power")
    if np.any((a < 0.0) & (b != np.round(b))):
        raise DomainError("negative base with non-integer exponent")
    return a ** b


def eval_dual_array(ast: Ast, var: str, bindings: dict):
    """Vectorized forward-mode evaluation; returns (values, derivatives)."""
    match ast:
        case Constant(value):
            return np.asarray(value, dtype=float), np.asarray(0.0)
        case Variable(name):
            try:
                v = np.asarray(bindings[name], dtype=float)
            except KeyError:
                raise UnboundVariableError(f"unbound variable {name!r}") from None
            if name == var:
                return v, np.ones_like(v)
            return v, np.asarray(0.0)
        case Unary("neg", child):
            v, d = eval_dual_array(child, var, bindings)
            return -v, -d
        case Binary(op, left, right):
            av, ad = eval_dual_array(left, var, bindings)
            bv, bd = eval_dual_array(right, var, bindings)
            if op == "+":
                return av + bv, ad + bd
            if op == "-":
                return av - bv, ad - bd
            if op == "*":
                return av * bv, ad * bv + av * bd
            if op == "/":
                if np.any(bv == 0.0):
                    raise DomainError("division by zero")
                v = av / bv
                return v, (ad - v * bd) / bv
            if op == "^":
                return _pow_dual_array(av, ad, bv, bd)
        case Call(func, args):
            parts = [eval_dual_array(a, var, bindings) for a in args]
            xv, xd = parts[0]
            if func == "sqrt":
                v = np.sqrt(_clamp_nonneg_array(xv))
                with np.errstate(divide="ignore", invalid="ignore"):
                    d = np.where(v == 0.0,
                                 np.where(xd == 0.0, 0.0, np.copysign(np.inf, xd)),
                                 xd / (2.0 * v))
                return v, d
            if func == "sin":
                return np.sin(xv), np.cos(xv) * xd
            if func == "cos":
                return np.cos(xv), -np.sin(xv) * xd
            if func == "acos":
                xc = _clamp_unit_array(xv)
                s = np.sqrt(np.clip(1.0 - xc * xc, 0.0, None))
                with np.errstate(divide="ignore", invalid="ignore"):
                    d = np.where(s == 0.0,
                                 np.where(xd == 0.0, 0.0, np.copysign(np.inf, -xd)),
                                 -xd / s)
                return np.arccos(xc), d
            if func == "abs":
                return np.abs(xv), np.sign(xv) * xd
            if func == "exp":
                v = np.exp(xv)
                return v, v * xd
            if func == "ln":
                if np.any(xv <= 0.0):
                    raise DomainError("ln of non-positive value")
                return np.log(xv), xd / xv
            if func == "pow":
                yv, yd = parts[1]
                return _pow_dual_array(xv, xd, yv, yd)
    raise TypeError(f"not an Ast node: {ast!r}")


def _pow_dual_array(av, ad, bv, bd):
    if np.all(np.asarray(bd) == 0.0):
        c = np.asarray(bv, dtype=float)
        v = _pow_array(av, c)
        safe_base = np.where(av == 0.0, 1.0, av)  # both where-branches evaluate
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.where(av == 0.0,
                         np.where(c == 1.0, ad, np.where(c > 1.0, 0.0,
                                  np.where(ad == 0.0, 0.0, np.copysign(np.inf, ad)))),
                         c * _pow_array(safe_base, c - 1.0) * ad)
        return v, d
    if np.any(av <= 0.0):
        raise DomainError("variable exponent requires a positive base")
    v = av ** bv
    return v, v * (bd * np.log(av) + bv * ad / av)

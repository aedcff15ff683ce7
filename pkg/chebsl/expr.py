"""Coefficient expressions in one variable ``x``

Grammar, from lowest to highest precedence::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := primary ('^' unary)?
    primary := NUMBER | 'x' | 'pi' | 'e' | FUNC '(' sum ')' | '(' sum ')'

``^`` binds tighter than unary minus and is right-associative, so ``-x^2`` is
``-(x^2)`` and ``2^3^2`` is ``2^(3^2)``. Functions are ``sin``, ``cos``, ``tan``,
``exp``, ``ln``, ``sqrt`` and ``abs``.

>>> round(parse("(x+pi)^4").evaluate(0.0), 6)
97.409091
>>> str(derivative(parse("x^4")))
'(4.0 * (x ^ 3.0))'

"""

from __future__ import annotations

import math
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, NoReturn

import numpy as np

from chebsl.errors import ExprDomainError, ExprSyntaxError
from chebsl.grid import FloatArray

TOKEN_RE = re.compile(
    r"""
    \s*(?:
        (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
      | (?P<name>[A-Za-z_]\w*)
      | (?P<op>[-+*/^()])
      | (?P<junk>\S)
    )
    """,
    re.VERBOSE,
)

CONSTANTS: Mapping[str, float] = {"pi": math.pi, "e": math.e}


class Expr(ABC):
    """Immutable expression tree node."""

    @abstractmethod
    def evaluate(self, x: float) -> float:
        """Evaluate the expression at ``x`` in double precision."""

    @abstractmethod
    def differentiate(self) -> Expr:
        """Return the symbolic derivative with respect to ``x``."""

    @abstractmethod
    def depends_on_x(self) -> bool:
        """Return ``True`` if the variable ``x`` occurs in the expression."""

    def sample(self, xs: FloatArray) -> FloatArray:
        """Evaluate the expression at every point of ``xs``."""
        return np.array([self.evaluate(float(x)) for x in xs], dtype=np.float64)


@dataclass(frozen=True)
class Number(Expr):
    value: float

    def evaluate(self, x: float) -> float:  # noqa: ARG002
        return self.value

    def differentiate(self) -> Expr:
        return ZERO

    def depends_on_x(self) -> bool:
        return False

    def __str__(self) -> str:
        text = repr(float(self.value))
        return f"({text})" if math.copysign(1.0, self.value) < 0 else text


@dataclass(frozen=True)
class Variable(Expr):
    def evaluate(self, x: float) -> float:
        return x

    def differentiate(self) -> Expr:
        return ONE

    def depends_on_x(self) -> bool:
        return True

    def __str__(self) -> str:
        return "x"


@dataclass(frozen=True)
class Constant(Expr):
    name: str

    def evaluate(self, x: float) -> float:  # noqa: ARG002
        return CONSTANTS[self.name]

    def differentiate(self) -> Expr:
        return ZERO

    def depends_on_x(self) -> bool:
        return False

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    def evaluate(self, x: float) -> float:
        return -self.operand.evaluate(x)

    def differentiate(self) -> Expr:
        return neg(self.operand.differentiate())

    def depends_on_x(self) -> bool:
        return self.operand.depends_on_x()

    def __str__(self) -> str:
        return f"(-{self.operand})"


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def evaluate(self, x: float) -> float:
        u = self.left.evaluate(x)
        v = self.right.evaluate(x)
        if self.op == "+":
            return u + v
        if self.op == "-":
            return u - v
        if self.op == "*":
            return u * v
        if self.op == "/":
            if v == 0.0:
                raise ExprDomainError("Division by zero", str(self), x)
            return u / v
        try:
            result = math.pow(u, v)
        except (ValueError, ZeroDivisionError) as exc_info:
            raise ExprDomainError(f"Invalid power ({exc_info})", str(self), x) from None
        except OverflowError:
            raise ExprDomainError("Overflow", str(self), x) from None
        return result

    def differentiate(self) -> Expr:
        u, v = self.left, self.right
        du, dv = u.differentiate(), v.differentiate()
        if self.op == "+":
            return add(du, dv)
        if self.op == "-":
            return sub(du, dv)
        if self.op == "*":
            return add(mul(du, v), mul(u, dv))
        if self.op == "/":
            return div(sub(mul(du, v), mul(u, dv)), power(v, Number(2.0)))
        if not v.depends_on_x():
            # d(u^c) = c u^(c-1) u'
            return mul(mul(v, power(u, sub(v, ONE))), du)
        # d(u^v) = d(exp(v ln u)) = u^v (v' ln u + v u'/u)
        return mul(self, add(mul(dv, call("ln", u)), div(mul(v, du), u)))

    def depends_on_x(self) -> bool:
        return self.left.depends_on_x() or self.right.depends_on_x()

    def __str__(self) -> str:
        return f"({self.left} {self.op} {self.right})"


def _checked_ln(u: float) -> float | None:
    return math.log(u) if u > 0 else None


def _checked_sqrt(u: float) -> float | None:
    return math.sqrt(u) if u >= 0 else None


def _checked_exp(u: float) -> float | None:
    try:
        return math.exp(u)
    except OverflowError:
        return None


FUNCTIONS: Mapping[str, Callable[[float], float | None]] = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": _checked_exp,
    "ln": _checked_ln,
    "sqrt": _checked_sqrt,
    "abs": abs,
}


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr

    def evaluate(self, x: float) -> float:
        u = self.arg.evaluate(x)
        result = FUNCTIONS[self.func](u)
        if result is None:
            raise ExprDomainError(f"{self.func} undefined for {u!r}", str(self), x)
        return result

    def differentiate(self) -> Expr:
        u = self.arg
        outer: Expr
        if self.func == "sin":
            outer = call("cos", u)
        elif self.func == "cos":
            outer = neg(call("sin", u))
        elif self.func == "tan":
            outer = div(ONE, power(call("cos", u), Number(2.0)))
        elif self.func == "exp":
            outer = self
        elif self.func == "ln":
            outer = div(ONE, u)
        elif self.func == "sqrt":
            outer = div(Number(0.5), self)
        else:
            # sign(u); undefined (division by zero) where u == 0
            outer = div(u, self)
        return mul(outer, u.differentiate())

    def depends_on_x(self) -> bool:
        return self.arg.depends_on_x()

    def __str__(self) -> str:
        return f"{self.func}({self.arg})"


ZERO = Number(0.0)
ONE = Number(1.0)


def _is_number(e: Expr, value: float) -> bool:
    return isinstance(e, Number) and e.value == value


def _fold(op: str, left: Expr, right: Expr) -> Expr | None:
    """Replace an operation on two literals by its value, if it is finite."""
    if not (isinstance(left, Number) and isinstance(right, Number)):
        return None
    try:
        value = BinOp(op, left, right).evaluate(0.0)
    except ExprDomainError:
        return None
    return Number(value) if math.isfinite(value) else None


def add(left: Expr, right: Expr) -> Expr:
    if _is_number(left, 0.0):
        return right
    if _is_number(right, 0.0):
        return left
    return _fold("+", left, right) or BinOp("+", left, right)


def sub(left: Expr, right: Expr) -> Expr:
    if _is_number(right, 0.0):
        return left
    if _is_number(left, 0.0):
        return neg(right)
    return _fold("-", left, right) or BinOp("-", left, right)


def mul(left: Expr, right: Expr) -> Expr:
    if _is_number(left, 0.0) or _is_number(right, 0.0):
        return ZERO
    if _is_number(left, 1.0):
        return right
    if _is_number(right, 1.0):
        return left
    return _fold("*", left, right) or BinOp("*", left, right)


def div(left: Expr, right: Expr) -> Expr:
    if _is_number(left, 0.0) and not _is_number(right, 0.0):
        return ZERO
    if _is_number(right, 1.0):
        return left
    return _fold("/", left, right) or BinOp("/", left, right)


def power(left: Expr, right: Expr) -> Expr:
    if _is_number(right, 1.0):
        return left
    if _is_number(right, 0.0):
        return ONE
    return _fold("^", left, right) or BinOp("^", left, right)


def neg(operand: Expr) -> Expr:
    if isinstance(operand, Number):
        return Number(-operand.value)
    if isinstance(operand, Neg):
        return operand.operand
    return Neg(operand)


def call(func: str, arg: Expr) -> Expr:
    return Call(func, arg)


def derivative(e: Expr) -> Expr:
    """Differentiate ``e`` symbolically.

    ``abs`` differentiates to ``u / abs(u)``, which raises a domain error at the
    kink ``u = 0``.

    >>> derivative(parse("1")) == ZERO
    True

    """
    return e.differentiate()


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(source: str) -> Iterator[Token]:
    """Split ``source`` into number, name and operator tokens."""
    position = 0
    while position < len(source):
        match = TOKEN_RE.match(source, position)
        if not match or match.end() == position:
            break
        kind = match.lastgroup or "junk"
        text = match.group(kind)
        start = match.start(kind)
        if kind == "junk":
            message = f"Unexpected character {text!r}"
            raise ExprSyntaxError(message, start)
        yield Token(kind, text, start)
        position = match.end()
    yield Token("end", "", len(source))


class _Parser:
    """Recursive descent parser over the token stream of one expression."""

    def __init__(self, source: str) -> None:
        self._tokens = list(tokenize(source))
        self._index = 0

    @property
    def _current(self) -> Token:
        return self._tokens[self._index]

    def _accept(self, *texts: str) -> Token | None:
        token = self._current
        if token.kind == "op" and token.text in texts:
            self._index += 1
            return token
        return None

    def _expect(self, text: str) -> None:
        if not self._accept(text):
            self._fail(f"Expected {text!r}")

    def _fail(self, message: str) -> NoReturn:
        token = self._current
        found = "end of input" if token.kind == "end" else repr(token.text)
        raise ExprSyntaxError(f"{message}, found {found}", token.position)

    def parse(self) -> Expr:
        if self._current.kind == "end":
            raise ExprSyntaxError("Empty expression", 0)
        tree = self._sum()
        if self._current.kind != "end":
            self._fail("Expected an operator")
        return tree

    def _sum(self) -> Expr:
        tree = self._product()
        while True:
            token = self._accept("+", "-")
            if not token:
                return tree
            tree = BinOp(token.text, tree, self._product())

    def _product(self) -> Expr:
        tree = self._unary()
        while True:
            token = self._accept("*", "/")
            if not token:
                return tree
            tree = BinOp(token.text, tree, self._unary())

    def _unary(self) -> Expr:
        if self._accept("-"):
            return Neg(self._unary())
        if self._accept("+"):
            return self._unary()
        return self._power()

    def _power(self) -> Expr:
        base = self._primary()
        if self._accept("^"):
            return BinOp("^", base, self._unary())
        return base

    def _primary(self) -> Expr:
        token = self._current
        if token.kind == "number":
            self._index += 1
            return Number(float(token.text))
        if token.kind == "name":
            self._index += 1
            return self._name(token)
        if self._accept("("):
            tree = self._sum()
            self._expect(")")
            return tree
        self._fail("Expected a number, name or '('")

    def _name(self, token: Token) -> Expr:
        if token.text == "x":
            return Variable()
        if token.text in CONSTANTS:
            return Constant(token.text)
        if token.text in FUNCTIONS:
            self._expect("(")
            arg = self._sum()
            self._expect(")")
            return Call(token.text, arg)
        message = f"Unknown identifier {token.text!r}"
        raise ExprSyntaxError(message, token.position)


def parse(source: str) -> Expr:
    """Parse expression text into an :class:`Expr` tree.

    >>> parse("x^4")
    BinOp(op='^', left=Variable(), right=Number(value=4.0))

    """
    return _Parser(source).parse()


def evaluate(e: Expr, x: float) -> float:
    """Evaluate ``e`` at ``x``."""
    return e.evaluate(x)

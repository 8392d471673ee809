"""Small arithmetic-expression language for initial-condition profiles.

Grammar (whitespace-insensitive, byte offsets reported on errors):

    expr   :=  term (('+' | '-') term)*
    term   :=  unary (('*' | '/') unary)*
    unary  :=  '-' unary | power
    power  :=  atom ('^' unary)?          # right-associative
    atom   :=  NUMBER | 'pi' | 'x' | VAR | sin|cos|exp '(' expr ')'
             | 'sum' '(' VAR ',' INT ',' INT ',' expr ')'
             | '(' expr ')'

``sum(j, lo, hi, body)`` is a bounded loop; inside the body only ``x``
and the sum's own variable are visible.  Exponentiation binds tighter
than unary minus, so ``-x^2`` means ``-(x^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ExpressionError",
    "ExprSyntaxError",
    "EvalDomainError",
    "Expression",
    "parse",
    "evaluate",
    "to_source",
]

_FUNCTIONS = ("sin", "cos", "exp")
_MAX_SUM_SPAN = 10000


class ExpressionError(ValueError):
    """Base class for expression parsing and evaluation failures."""


class ExprSyntaxError(ExpressionError):
    """Malformed source text; carries the byte offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class EvalDomainError(ExpressionError):
    """Arithmetic left the real domain (zero division, invalid power)."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    child: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


@dataclass(frozen=True)
class Sum:
    var: str
    lo: int
    hi: int
    body: object


@dataclass(frozen=True)
class Expression:
    """Parsed syntax tree plus the source it came from."""

    root: object
    source: str

    def __call__(self, x: float) -> float:
        return evaluate(self, x)


class _Parser:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0
        self.scope: list[str] = []

    def error(self, message: str, position: int | None = None) -> ExprSyntaxError:
        return ExprSyntaxError(message, self.pos if position is None else position)

    def skip_ws(self) -> None:
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def expect(self, char: str) -> None:
        if self.peek() != char:
            raise self.error(f"expected '{char}'")
        self.pos += 1

    def ident(self) -> tuple[str, int]:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.src) and (
            self.src[self.pos].isalnum() or self.src[self.pos] == "_"
        ):
            self.pos += 1
        if self.pos == start:
            raise self.error("expected an identifier")
        return self.src[start : self.pos], start

    def number(self) -> float:
        start = self.pos
        src = self.src
        n = len(src)
        while self.pos < n and src[self.pos].isdigit():
            self.pos += 1
        if self.pos < n and src[self.pos] == ".":
            self.pos += 1
            while self.pos < n and src[self.pos].isdigit():
                self.pos += 1
        if self.pos < n and src[self.pos] in "eE":
            mark = self.pos
            self.pos += 1
            if self.pos < n and src[self.pos] in "+-":
                self.pos += 1
            if self.pos < n and src[self.pos].isdigit():
                while self.pos < n and src[self.pos].isdigit():
                    self.pos += 1
            else:
                self.pos = mark  # bare 'e' belongs to the next token
        text = src[start : self.pos]
        try:
            return float(text)
        except ValueError:
            raise self.error(f"bad numeric literal '{text}'", start) from None

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        if self.peek() in ("+", "-"):
            self.pos += 1
        while self.pos < len(self.src) and self.src[self.pos].isdigit():
            self.pos += 1
        text = self.src[start : self.pos]
        try:
            return int(text)
        except ValueError:
            raise self.error("expected an integer bound", start) from None

    def parse_expr(self):
        node = self.parse_term()
        while self.peek() in ("+", "-"):
            op = self.src[self.pos]
            self.pos += 1
            node = Binary(op, node, self.parse_term())
        return node

    def parse_term(self):
        node = self.parse_unary()
        while self.peek() in ("*", "/"):
            op = self.src[self.pos]
            self.pos += 1
            node = Binary(op, node, self.parse_unary())
        return node

    def parse_unary(self):
        if self.peek() == "-":
            self.pos += 1
            return Unary(self.parse_unary())
        return self.parse_power()

    def parse_power(self):
        node = self.parse_atom()
        if self.peek() == "^":
            self.pos += 1
            node = Binary("^", node, self.parse_unary())
        return node

    def parse_atom(self):
        ch = self.peek()
        if ch == "":
            raise self.error("unexpected end of input")
        if ch == "(":
            self.pos += 1
            node = self.parse_expr()
            self.expect(")")
            return node
        if ch.isdigit() or ch == ".":
            return Num(self.number())
        if ch.isalpha() or ch == "_":
            name, start = self.ident()
            if name == "pi":
                return Num(math.pi)
            if name in _FUNCTIONS:
                self.expect("(")
                arg = self.parse_expr()
                self.expect(")")
                return Call(name, arg)
            if name == "sum":
                return self.parse_sum(start)
            if name == "x" or (self.scope and name == self.scope[-1]):
                return Var(name)
            raise self.error(f"unknown identifier '{name}'", start)
        raise self.error(f"unexpected character '{ch}'")

    def parse_sum(self, start: int):
        self.expect("(")
        var, var_pos = self.ident()
        if var in _FUNCTIONS or var in ("pi", "x", "sum"):
            raise self.error(f"'{var}' cannot be a sum variable", var_pos)
        self.expect(",")
        lo = self.integer()
        self.expect(",")
        hi = self.integer()
        if lo > hi:
            raise self.error(f"sum bounds {lo}..{hi} are reversed", start)
        if hi - lo > _MAX_SUM_SPAN:
            raise self.error(
                f"sum spans {hi - lo} terms, above the limit {_MAX_SUM_SPAN}", start
            )
        self.expect(",")
        self.scope.append(var)
        try:
            body = self.parse_expr()
        finally:
            self.scope.pop()
        self.expect(")")
        return Sum(var, lo, hi, body)


def parse(source: str) -> Expression:
    """Parse source text into an immutable expression tree."""
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0)
    parser = _Parser(source)
    root = parser.parse_expr()
    parser.skip_ws()
    if parser.pos != len(source):
        raise parser.error(f"unexpected trailing text '{source[parser.pos:]}'")
    return Expression(root=root, source=source)


def _eval(node, x: float, env: dict) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x if node.name == "x" else env[node.name]
    if isinstance(node, Unary):
        return -_eval(node.child, x, env)
    if isinstance(node, Binary):
        left = _eval(node.left, x, env)
        right = _eval(node.right, x, env)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            if right == 0.0:
                raise EvalDomainError("division by zero")
            return left / right
        # power
        if left < 0.0 and right != math.floor(right):
            raise EvalDomainError(
                f"negative base {left!r} with non-integer exponent {right!r}"
            )
        if left == 0.0 and right < 0.0:
            raise EvalDomainError("zero base with negative exponent")
        try:
            return math.pow(left, right)
        except OverflowError as exc:
            raise EvalDomainError("power overflow") from exc
    if isinstance(node, Call):
        arg = _eval(node.arg, x, env)
        try:
            return getattr(math, node.func)(arg)
        except OverflowError as exc:
            raise EvalDomainError(f"{node.func} overflow") from exc
    if isinstance(node, Sum):
        total = 0.0
        inner = {node.var: 0.0}
        for k in range(node.lo, node.hi + 1):
            inner[node.var] = float(k)
            total += _eval(node.body, x, inner)
        return total
    raise TypeError(f"unknown expression node {node!r}")


def evaluate(expression: Expression, x: float) -> float:
    """Evaluate the expression at the point x."""
    return _eval(expression.root, float(x), {})


def _render(node) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        return f"(-{_render(node.child)})"
    if isinstance(node, Binary):
        return f"({_render(node.left)}{node.op}{_render(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({_render(node.arg)})"
    if isinstance(node, Sum):
        return f"sum({node.var},{node.lo},{node.hi},{_render(node.body)})"
    raise TypeError(f"unknown expression node {node!r}")


def to_source(expression: Expression) -> str:
    """Fully parenthesised source that re-parses to the same tree."""
    return _render(expression.root)

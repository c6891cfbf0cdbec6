"""Tiny expression language for scalar transfer functions of the variable s.

Grammar (whitespace insignificant)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' integer)?
    base   := number | 's' | 'exp' '(' expr ')' | '(' expr ')' | '-' base

Parsed expressions evaluate at complex points and differentiate exactly
(sum, product, quotient, integer-power and chain rules), so oracles built
on top of them come with analytic derivatives.
"""

import cmath
import re

from .errors import ExpressionParseError

__all__ = ["Expression", "parse_expression"]


class _Node:
    def eval(self, s):
        raise NotImplementedError

    def diff(self):
        raise NotImplementedError


class _Const(_Node):
    def __init__(self, value):
        self.value = complex(value)

    def eval(self, s):
        return self.value

    def diff(self):
        return _Const(0.0)

    def __repr__(self):
        v = self.value
        return repr(v.real if v.imag == 0 else v)


class _Var(_Node):
    def eval(self, s):
        return s

    def diff(self):
        return _Const(1.0)

    def __repr__(self):
        return "s"


class _Add(_Node):
    def __init__(self, a, b):
        self.a, self.b = a, b

    def eval(self, s):
        return self.a.eval(s) + self.b.eval(s)

    def diff(self):
        return _Add(self.a.diff(), self.b.diff())

    def __repr__(self):
        return f"({self.a} + {self.b})"


class _Sub(_Node):
    def __init__(self, a, b):
        self.a, self.b = a, b

    def eval(self, s):
        return self.a.eval(s) - self.b.eval(s)

    def diff(self):
        return _Sub(self.a.diff(), self.b.diff())

    def __repr__(self):
        return f"({self.a} - {self.b})"


class _Mul(_Node):
    def __init__(self, a, b):
        self.a, self.b = a, b

    def eval(self, s):
        return self.a.eval(s) * self.b.eval(s)

    def diff(self):
        return _Add(_Mul(self.a.diff(), self.b), _Mul(self.a, self.b.diff()))

    def __repr__(self):
        return f"({self.a} * {self.b})"


class _Div(_Node):
    def __init__(self, a, b):
        self.a, self.b = a, b

    def eval(self, s):
        return self.a.eval(s) / self.b.eval(s)

    def diff(self):
        num = _Sub(_Mul(self.a.diff(), self.b), _Mul(self.a, self.b.diff()))
        return _Div(num, _Pow(self.b, 2))

    def __repr__(self):
        return f"({self.a} / {self.b})"


class _Pow(_Node):
    def __init__(self, base, exponent):
        self.base = base
        self.exponent = int(exponent)

    def eval(self, s):
        return self.base.eval(s) ** self.exponent

    def diff(self):
        n = self.exponent
        if n == 0:
            return _Const(0.0)
        return _Mul(_Mul(_Const(n), _Pow(self.base, n - 1)), self.base.diff())

    def __repr__(self):
        return f"{self.base}^{self.exponent}"


class _Exp(_Node):
    def __init__(self, arg):
        self.arg = arg

    def eval(self, s):
        return cmath.exp(self.arg.eval(s))

    def diff(self):
        return _Mul(self, self.arg.diff())

    def __repr__(self):
        return f"exp({self.arg})"


class _Neg(_Node):
    def __init__(self, a):
        self.a = a

    def eval(self, s):
        return -self.a.eval(s)

    def diff(self):
        return _Neg(self.a.diff())

    def __repr__(self):
        return f"(-{self.a})"


_TOKEN_RE = re.compile(
    r"(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z]+)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "name" and m.group("name") not in ("s", "exp"):
            raise ExpressionParseError(
                f"unknown name {m.group('name')!r}", m.start("name")
            )
        tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.peek()
        if text != value:
            raise ExpressionParseError(f"expected {value!r}", pos)
        return self.advance()

    def parse(self):
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExpressionParseError(f"unexpected token {text!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.advance()[1]
            rhs = self.term()
            node = _Add(node, rhs) if op == "+" else _Sub(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/"):
            op = self.advance()[1]
            rhs = self.factor()
            node = _Mul(node, rhs) if op == "*" else _Div(node, rhs)
        return node

    def factor(self):
        node = self.base()
        if self.peek()[1] == "^":
            self.advance()
            node = _Pow(node, self.integer())
        return node

    def integer(self):
        sign = 1
        if self.peek()[1] == "-":
            self.advance()
            sign = -1
        kind, text, pos = self.peek()
        if kind != "number" or not re.fullmatch(r"\d+", text):
            raise ExpressionParseError("expected integer exponent", pos)
        self.advance()
        return sign * int(text)

    def base(self):
        kind, text, pos = self.advance()
        if kind == "number":
            return _Const(float(text))
        if text == "s":
            return _Var()
        if text == "exp":
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return _Exp(arg)
        if text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if text == "-":
            return _Neg(self.base())
        raise ExpressionParseError(f"unexpected token {text!r}", pos)


class Expression:
    """A parsed scalar expression in s, evaluable and exactly differentiable."""

    def __init__(self, root, text=None):
        self._root = root
        self.text = text

    def eval(self, s):
        return self._root.eval(complex(s))

    def derivative(self):
        return Expression(self._root.diff(), text=None)

    def __repr__(self):
        return f"Expression({self.text or self._root!r})"


def parse_expression(text):
    """Parse `text` into an :class:`Expression`.

    Raises :class:`~delaymor.errors.ExpressionParseError` with the offending
    position on malformed input.
    """
    return Expression(_Parser(text).parse(), text=text)

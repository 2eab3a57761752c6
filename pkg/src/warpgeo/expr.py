"""A small arithmetic expression language.

Grammar (lowest to highest precedence)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" unary)?          # right-associative
    atom   := NUMBER | NAME | FUNC "(" expr ")" | "(" expr ")"

so ``-x^2`` is ``-(x^2)`` and ``2^3^2`` is ``2^9``.  ``pi`` and ``e`` are
constants.  Evaluation is vectorized over numpy arrays.
"""

import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParseError

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
CONSTANTS = {"pi": np.pi, "e": np.e}
MAX_DEPTH = 200

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
)


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
    arg: object


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text):
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            tokens.append(Token(kind, s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        pos = m.end()
    tokens.append(Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.i = 0
        self.depth = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def fail(self, message, expected=()):
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"{message}, found {found}", t.line, t.column, tuple(expected))

    def eat(self, text):
        if self.tok.text == text and self.tok.kind == "op":
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.eat(text):
            self.fail(f"expected {text!r}", (text,))

    def enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            self.fail(f"expression nested deeper than {MAX_DEPTH}")

    def parse(self):
        if self.tok.kind == "end":
            self.fail("empty expression", ("number", "name", "(", "-"))
        node = self.expr()
        if self.tok.kind != "end":
            self.fail("expected operator or end of input", ("+", "-", "*", "/", "^"))
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = Bin(op, node, self.unary())
        return node

    def unary(self):
        self.enter()
        try:
            if self.eat("-"):
                return Neg(self.unary())
            if self.eat("+"):
                return self.unary()
            return self.power()
        finally:
            self.depth -= 1

    def power(self):
        base = self.atom()
        if self.eat("^"):
            return Bin("^", base, self.unary())
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Num(float(t.text))
        if t.kind == "name":
            self.i += 1
            if self.tok.kind == "op" and self.tok.text == "(":
                if t.text not in FUNCTIONS:
                    self.i -= 1
                    self.fail(f"unknown function {t.text!r}", tuple(sorted(FUNCTIONS)))
                self.i += 1
                self.enter()
                arg = self.expr()
                self.depth -= 1
                self.expect(")")
                return Call(t.text, arg)
            if t.text in FUNCTIONS:
                self.fail(f"function {t.text!r} needs an argument", ("(",))
            if t.text in CONSTANTS:
                return Const(t.text)
            return Var(t.text)
        if self.eat("("):
            self.enter()
            node = self.expr()
            self.depth -= 1
            self.expect(")")
            return node
        self.fail("expected a number, name or '('", ("number", "name", "("))


def parse_expression(text):
    """Parse `text` into an AST; raises `ParseError` with position on failure."""
    if not isinstance(text, str):
        raise ParseError(f"expression must be a string, got {type(text).__name__}")
    return _Parser(text).parse()


# -- printing ---------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(node):
    if isinstance(node, Bin):
        return _PREC[node.op]
    if isinstance(node, Neg) or (isinstance(node, Num) and node.value < 0):
        return _PREC["neg"]
    return _PREC["atom"]


def _num(v):
    if np.isnan(v):
        return "(0/0)"
    if np.isinf(v):
        return "(1e999)" if v > 0 else "(-1e999)"
    return repr(float(v))


def to_string(node):
    """Print with the minimal parentheses needed to parse back to the same tree."""
    if isinstance(node, Num):
        return _num(node.value) if node.value >= 0 else f"-{_num(-node.value)}"
    if isinstance(node, (Const, Var)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_string(node.arg)})"
    if isinstance(node, Neg):
        inner = to_string(node.arg)
        return f"-{inner}" if _prec(node.arg) >= _PREC["neg"] else f"-({inner})"
    p = _PREC[node.op]
    left, right = to_string(node.left), to_string(node.right)
    if node.op == "^":
        # base must be an atom; exponent is a unary expression
        if _prec(node.left) < _PREC["atom"]:
            left = f"({left})"
        if _prec(node.right) < _PREC["neg"]:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}"


# -- evaluation ---------------------------------------------------------------------

def variables(node):
    """Free variable names in order of first appearance."""
    out = []

    def walk(n):
        if isinstance(n, Var):
            if n.name not in out:
                out.append(n.name)
        elif isinstance(n, Neg):
            walk(n.arg)
        elif isinstance(n, Call):
            walk(n.arg)
        elif isinstance(n, Bin):
            walk(n.left)
            walk(n.right)

    walk(node)
    return out


def _apply(func, x):
    x = np.asarray(x, float)
    if func == "log" and np.any(x <= 0):
        raise DomainError("log of a nonpositive number")
    if func == "sqrt" and np.any(x < 0):
        raise DomainError("sqrt of a negative number")
    return FUNCTIONS[func](x)


def evaluate(node, env=None):
    """Evaluate with variables bound by `env` (scalars or arrays)."""
    env = env or {}
    with np.errstate(over="ignore", invalid="ignore"):
        return _eval(node, env)


def _eval(node, env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Var):
        if node.name not in env:
            raise DomainError(f"unbound variable {node.name!r}")
        return np.asarray(env[node.name], float)
    if isinstance(node, Neg):
        return -_eval(node.arg, env)
    if isinstance(node, Call):
        return _apply(node.func, _eval(node.arg, env))
    a, b = _eval(node.left, env), _eval(node.right, env)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        if np.any(np.asarray(b) == 0):
            raise DomainError("division by zero")
        return np.asarray(a, float) / b
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if np.any((a < 0) & (b != np.round(b))):
        raise DomainError("negative base with non-integer exponent")
    if np.any((a == 0) & (b < 0)):
        raise DomainError("zero to a negative power")
    return np.power(a, b)


def fold_constants(node):
    """Replace variable-free subtrees by their values (where defined)."""
    if isinstance(node, (Num, Var)):
        return node
    if isinstance(node, Const):
        return Num(CONSTANTS[node.name])
    if isinstance(node, Neg):
        node = Neg(fold_constants(node.arg))
    elif isinstance(node, Call):
        node = Call(node.func, fold_constants(node.arg))
    else:
        node = Bin(node.op, fold_constants(node.left), fold_constants(node.right))
    if not variables(node):
        try:
            return Num(float(evaluate(node)))
        except DomainError:
            return node
    return node


def compile_expression(text_or_node, names):
    """Vectorized callable ``p -> value`` binding ``p[..., i]`` to ``names[i]``.

    The result is broadcast to the batch shape of `p`.
    """
    node = parse_expression(text_or_node) if isinstance(text_or_node, str) else text_or_node
    node = fold_constants(node)
    unknown = [v for v in variables(node) if v not in names]
    if unknown:
        raise DomainError(f"unknown variable(s) {unknown}; available: {list(names)}")
    index = {n: i for i, n in enumerate(names)}

    def fn(p):
        p = np.asarray(p, float)
        env = {n: p[..., index[n]] for n in variables(node)}
        return np.broadcast_to(np.asarray(evaluate(node, env), float), p.shape[:-1]).copy()

    fn.source = to_string(node)
    return fn

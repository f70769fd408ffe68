"""Expression text, problem files and result rendering."""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from sympy.polys.domains import QQ

from .algebra import (
    R,
    RatFunc,
    coefficients_in_many,
    degree_in,
    poly_gcd,
)
from .config import DEFAULT_SAMPLES, DEFAULT_SEED, VARIABLES
from .errors import ParseError, ProblemFormatError

logger = logging.getLogger(__name__)

EQUATION_VARIABLES = frozenset({"z", "w", "wp"})
PARAM_VARIABLES = frozenset({"t", "z"})


@dataclass(frozen=True)
class Num:
    value: int
    pos: tuple[int, int] = field(default=(1, 1), compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: tuple[int, int] = field(default=(1, 1), compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    pos: tuple[int, int] = field(default=(1, 1), compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    pos: tuple[int, int] = field(default=(1, 1), compare=False)


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int
    pos: tuple[int, int] = field(default=(1, 1), compare=False)


Expr = Num | Var | Neg | BinOp | Pow


_TOKEN_RE = re.compile(r"(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, IDENT, OP, EOF
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start = 1, 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, line_start = line + 1, i + 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            continue
        col = i - line_start + 1
        m = _TOKEN_RE.match(text, i)
        num, ident, other = m.group(1), m.group(2), m.group(3)
        if num is not None:
            tokens.append(Token("NUM", num, line, col))
            i = m.end(1)
        elif ident is not None:
            tokens.append(Token("IDENT", ident, line, col))
            i = m.end(2)
        elif other in "+-*/^()":
            tokens.append(Token("OP", other, line, col))
            i = m.end(3)
        else:
            raise ParseError(f"unexpected character {other!r}", line, col)
    tokens.append(Token("EOF", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    """expr := term (('+'|'-') term)*
    term := unary (('*'|'/') unary)*
    unary := '-' unary | power
    power := atom ['^' unary]
    atom := INT | IDENT | '(' expr ')'
    """

    def __init__(self, tokens: list[Token], variables: frozenset[str]):
        self.tokens = tokens
        self.index = 0
        self.variables = variables

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def accept(self, text: str) -> Token | None:
        tok = self.current
        if tok.kind == "OP" and tok.text == text:
            return self.advance()
        return None

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.current
        return ParseError(message, tok.line, tok.column)

    def parse(self) -> Expr:
        if self.current.kind == "EOF":
            raise self.error("empty expression")
        node = self.expr()
        if self.current.kind != "EOF":
            raise self.error(f"unexpected token {self.current.text!r}")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while True:
            tok = self.accept("+") or self.accept("-")
            if tok is None:
                return node
            node = BinOp(tok.text, node, self.term(), (tok.line, tok.column))

    def term(self) -> Expr:
        node = self.unary()
        while True:
            tok = self.accept("*") or self.accept("/")
            if tok is None:
                return node
            node = BinOp(tok.text, node, self.unary(), (tok.line, tok.column))

    def unary(self) -> Expr:
        tok = self.accept("-")
        if tok is not None:
            return Neg(self.unary(), (tok.line, tok.column))
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        tok = self.accept("^")
        if tok is None:
            return base
        exp_tok = self.current
        exponent = self.unary()
        value = to_ratfunc(exponent)
        if not value.is_constant or value.constant_value().denominator != 1:
            raise self.error("non-integer exponent", exp_tok)
        return Pow(base, int(value.constant_value().numerator), (tok.line, tok.column))

    def atom(self) -> Expr:
        tok = self.current
        if tok.kind == "NUM":
            self.advance()
            return Num(int(tok.text), (tok.line, tok.column))
        if tok.kind == "IDENT":
            if tok.text not in self.variables:
                raise self.error(f"unknown identifier {tok.text!r}")
            self.advance()
            return Var(tok.text, (tok.line, tok.column))
        if self.accept("("):
            node = self.expr()
            if self.accept(")") is None:
                raise self.error("expected ')'")
            return node
        if tok.kind == "EOF":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected token {tok.text!r}")


def parse_expr(text: str, variables=VARIABLES) -> Expr:
    return _Parser(tokenize(text), frozenset(variables)).parse()


def to_ratfunc(node: Expr) -> RatFunc:
    if isinstance(node, Num):
        return RatFunc.new(node.value)
    if isinstance(node, Var):
        return RatFunc.var(node.name)
    if isinstance(node, Neg):
        return -to_ratfunc(node.operand)
    if isinstance(node, Pow):
        base = to_ratfunc(node.base)
        if node.exponent < 0 and base.is_zero:
            raise ParseError("division by zero", *node.pos)
        return base ** node.exponent
    left, right = to_ratfunc(node.left), to_ratfunc(node.right)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if right.is_zero:
        raise ParseError("division by zero", *node.pos)
    return left / right


def parse_ratfunc(text: str, variables=VARIABLES) -> RatFunc:
    return to_ratfunc(parse_expr(text, variables))


def _render_rational(c) -> str:
    c = QQ.convert(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _render_poly(p) -> str:
    if not p:
        return "0"
    out = []
    for monom, c in p.terms():
        factors = [name if e == 1 else f"{name}^{e}" for name, e in zip(VARIABLES, monom) if e]
        mag = abs(c)
        if not factors:
            body = _render_rational(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _render_rational(mag) + "*" + "*".join(factors)
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("- " if c < 0 else "+ ") + body)
    return " ".join(out)


def _is_bare_power(p) -> bool:
    if len(p) != 1:
        return False
    (monom, c), = p.terms()
    return c == 1 and sum(1 for e in monom if e) == 1


def render_expr(e) -> str:
    """Canonical text for an expression tree, polynomial or rational function."""
    if isinstance(e, (Num, Var, Neg, BinOp, Pow)):
        e = to_ratfunc(e)
    if not isinstance(e, RatFunc):
        return _render_poly(e)
    num = _render_poly(e.num)
    if e.den == R.one:
        return num
    if len(e.num) > 1 or "/" in num:
        num = f"({num})"
    den = _render_poly(e.den)
    if not _is_bare_power(e.den):
        den = f"({den})"
    return f"{num}/{den}"


@dataclass(frozen=True)
class Problem:
    equation: object  # PolyElement in z, w, wp
    parametrization: tuple[RatFunc, RatFunc] | None = None
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    source: str = "<string>"


_KEYS = ("equation", "param_w", "param_wp", "samples", "seed")


def prepare_equation(rf: RatFunc):
    """Numerator of the equation with its content in (w, wp) removed."""
    num = rf.num
    if not num:
        raise ProblemFormatError("equation is identically zero")
    content = None
    for coeff in coefficients_in_many(num, ("w", "wp")).values():
        content = coeff if content is None else poly_gcd(content, coeff)
    if content is not None and not content.is_ground:
        num = num.exquo(content)
    num = num.monic()
    if degree_in(num, "wp") < 1:
        raise ProblemFormatError("equation does not involve wp")
    return num


def _parse_value(key: str, text: str, line: int, variables) -> RatFunc:
    try:
        return parse_ratfunc(text, variables)
    except ParseError as err:
        raise ProblemFormatError(f"{key}: {err.message} at column {err.column}", line) from err


def _parse_count(key: str, text: str, line: int, minimum: int) -> int:
    if not re.fullmatch(r"\d+", text):
        raise ProblemFormatError(f"{key} must be an integer >= {minimum}", line)
    value = int(text)
    if value < minimum:
        raise ProblemFormatError(f"{key} must be an integer >= {minimum}", line)
    return value


def parse_problem(text: str, source: str = "<string>") -> Problem:
    values: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if ":" not in stripped:
            raise ProblemFormatError(f"expected 'key: value', got {stripped!r}", lineno)
        key, value = (part.strip() for part in stripped.split(":", 1))
        if key not in _KEYS:
            raise ProblemFormatError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ProblemFormatError(f"duplicate key {key!r}", lineno)
        values[key] = (value, lineno)

    if "equation" not in values:
        raise ProblemFormatError("missing required key 'equation'")
    eq_text, eq_line = values["equation"]
    equation = prepare_equation(_parse_value("equation", eq_text, eq_line, EQUATION_VARIABLES))

    parametrization = None
    if ("param_w" in values) != ("param_wp" in values):
        missing = "param_wp" if "param_w" in values else "param_w"
        raise ProblemFormatError(f"{missing} must be given together with the other param key")
    if "param_w" in values:
        pair = []
        for key in ("param_w", "param_wp"):
            text_value, line = values[key]
            rf = _parse_value(key, text_value, line, PARAM_VARIABLES)
            if not rf.depends_on("t"):
                raise ProblemFormatError(f"{key} must depend on t", line)
            pair.append(rf)
        parametrization = (pair[0], pair[1])

    samples, seed = DEFAULT_SAMPLES, DEFAULT_SEED
    if "samples" in values:
        samples = _parse_count("samples", *values["samples"], minimum=1)
    if "seed" in values:
        seed = _parse_count("seed", *values["seed"], minimum=0)

    logger.debug("parsed problem from %s", source)
    return Problem(equation, parametrization, samples, seed, source)


def load_problem(path) -> Problem:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ProblemFormatError(f"cannot read {path}: {err.strerror or err}") from err
    except UnicodeDecodeError as err:
        raise ProblemFormatError(f"{path} is not UTF-8 text (byte {err.start})") from err
    return parse_problem(text, str(path))


def result_to_dict(result) -> dict:
    riccati = None
    if result.riccati is not None:
        riccati = {
            "A": render_expr(result.riccati.A),
            "B": render_expr(result.riccati.B),
            "C": render_expr(result.riccati.C),
        }
    genus = None
    if result.genus is not None and isinstance(result.genus.consensus, int):
        genus = result.genus.consensus
    return {
        "status": result.status,
        "genus": genus,
        "riccati": riccati,
        "normal_r": None if result.normal_r is None else render_expr(result.normal_r),
        "solution": None if result.solution is None else render_expr(result.solution.expr),
        "verified": bool(result.verified),
        "reason": result.reason,
    }


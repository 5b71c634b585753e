"""A small expression language for cycles on the blow-up.

    expr   := term (("+" | "-") term)*
    term   := ["-"] factor ("*" factor)*
    factor := atom ("^" nat)*                      right associative
    atom   := rational | "N" | "D" | "box" "(" sexpr "," sexpr ")"
            | "exc" "(" sexpr ")" | "diag" "(" sexpr ")" | "(" expr ")"
    sexpr  := the same shape over satom
    satom  := rational | "N" | "pt" | divisor-name | "(" sexpr ")"

``sexpr`` positions hold classes on the surface (``1`` is the fundamental class).
Example: ``(box(N*H,1) + box(1,N*H) - D)^3``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .chow import CycleBlowup, D_class, box, diag, exc, mul_blowup
from .exactmath import CoeffPoly, parse_rational
from .surface import CycleX, SurfaceData, mul_X

__all__ = [
    "ParseError",
    "NestingError",
    "EvalError",
    "parse",
    "evaluate",
    "eval_surface_class",
    "format_cycle",
    "parse_divisor",
]

BLOWUP_WORDS = ("box", "exc", "diag", "D")
MAX_EXPONENT = 10**6
MAX_SCALAR_EXPONENT = 256  # powers of classes with a codimension-zero part grow in N-degree


class ParseError(ValueError):
    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column
        self.message = message


class NestingError(ParseError):
    pass


class EvalError(ValueError):
    pass


# --- tokens -----------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", "op", "end"
    text: str
    column: int  # 1-based


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        start = i
        if ch.isdigit():
            while i < n and text[i].isdigit():
                i += 1
            tokens.append(Token("int", text[start:i], start + 1))
        elif ch.isalpha() or ch == "_":
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            tokens.append(Token("ident", text[start:i], start + 1))
        elif ch in "+-*^/(),":
            tokens.append(Token("op", ch, start + 1))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", start + 1)
    # end-of-input errors point at the last character so columns stay inside the text
    tokens.append(Token("end", "", max(n, 1)))
    return tokens


# --- AST --------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class SymN:
    pass


@dataclass(frozen=True)
class DConst:
    pass


@dataclass(frozen=True)
class Name:
    """``pt`` or a divisor name; only legal in surface-class positions."""

    name: str
    column: int


@dataclass(frozen=True)
class Box:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Exc:
    arg: "Expr"


@dataclass(frozen=True)
class Diag:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # "+", "-", "*"
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Num, SymN, DConst, Name, Box, Exc, Diag, BinOp, Neg, Pow]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if self.tok.kind == "op" and self.tok.text == text:
            return self.advance()
        raise ParseError(f"expected {text!r}, found {self._describe(self.tok)}", self.tok.column)

    @staticmethod
    def _describe(t: Token) -> str:
        return "end of input" if t.kind == "end" else repr(t.text)

    def parse(self) -> Expr:
        node = self.expr(surface=False)
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self._describe(self.tok)}", self.tok.column)
        return node

    def expr(self, surface: bool) -> Expr:
        node = self.term(surface)
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term(surface))
        return node

    def term(self, surface: bool) -> Expr:
        negate = self.accept("-")
        node = self.factor(surface)
        while self.accept("*"):
            node = BinOp("*", node, self.factor(surface))
        return Neg(node) if negate else node

    def factor(self, surface: bool) -> Expr:
        base = self.atom(surface)
        exponents = []
        while self.accept("^"):
            t = self.tok
            if t.kind != "int":
                raise ParseError(f"exponent must be a nonnegative integer, found {self._describe(t)}", t.column)
            exponents.append(int(self.advance().text))
        if not exponents:
            return base
        e = exponents[-1]
        for x in reversed(exponents[:-1]):
            if x > 1 and e > MAX_EXPONENT.bit_length():
                raise ParseError("exponent tower too large", t.column)
            e = x**e
        if e > MAX_EXPONENT:
            raise ParseError(f"exponent {e} exceeds {MAX_EXPONENT}", t.column)
        return Pow(base, e)

    def rational(self) -> Num:
        num = int(self.advance().text)
        if self.accept("/"):
            t = self.tok
            if t.kind != "int" or int(t.text) == 0:
                raise ParseError("denominator must be a positive integer", t.column)
            return Num(Fraction(num, int(self.advance().text)))
        return Num(Fraction(num))

    def atom(self, surface: bool) -> Expr:
        t = self.tok
        if t.kind == "int":
            return self.rational()
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr(surface)
            self.expect(")")
            return node
        if t.kind == "ident":
            word = t.text
            if word == "N":
                self.advance()
                return SymN()
            if surface:
                if word in BLOWUP_WORDS:
                    raise NestingError(f"{word!r} inside surface-class position", t.column)
                self.advance()
                return Name(word, t.column)
            if word == "D":
                self.advance()
                return DConst()
            if word == "box":
                self.advance()
                self.expect("(")
                left = self.expr(surface=True)
                self.expect(",")
                right = self.expr(surface=True)
                self.expect(")")
                return Box(left, right)
            if word in ("exc", "diag"):
                self.advance()
                self.expect("(")
                arg = self.expr(surface=True)
                self.expect(")")
                return Exc(arg) if word == "exc" else Diag(arg)
            raise ParseError(f"surface class {word!r} must sit inside box(), exc() or diag()", t.column)
        raise ParseError(f"unexpected {self._describe(t)}", t.column)


def parse(text: str) -> Expr:
    """Parse an expression; raises :class:`ParseError` (1-based ``column``) on bad input."""
    return _Parser(text).parse()


def parse_surface_expr(text: str) -> Expr:
    p = _Parser(text)
    node = p.expr(surface=True)
    if p.tok.kind != "end":
        raise ParseError(f"unexpected {p._describe(p.tok)}", p.tok.column)
    return node


# --- evaluation -------------------------------------------------------------------


def eval_surface_class(e: Expr, s: SurfaceData) -> CycleX:
    rho = s.rho
    if isinstance(e, Num):
        return CycleX.scalar(rho, e.value)
    if isinstance(e, SymN):
        return CycleX.scalar(rho, CoeffPoly.N())
    if isinstance(e, Name):
        if e.name == "pt":
            return CycleX.point(rho)
        try:
            return CycleX.divisor(s.divisor(e.name))
        except KeyError:
            raise EvalError(f"unknown divisor {e.name!r} (column {e.column}); known: {', '.join(s.known_names())}") from None
    if isinstance(e, Neg):
        return -eval_surface_class(e.arg, s)
    if isinstance(e, Pow):
        base = eval_surface_class(e.base, s)
        out, k = CycleX.one(rho), e.exponent
        if base.r0.is_zero() and k > 2:
            return CycleX.zero(rho)
        if k > MAX_SCALAR_EXPONENT:
            raise EvalError(f"exponent {k} on a class with a scalar part exceeds {MAX_SCALAR_EXPONENT}")
        while k:
            if k & 1:
                out = mul_X(out, base, s)
            k >>= 1
            if k:
                base = mul_X(base, base, s)
        return out
    if isinstance(e, BinOp):
        a = eval_surface_class(e.left, s)
        b = eval_surface_class(e.right, s)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        return mul_X(a, b, s)
    raise EvalError(f"{type(e).__name__} is not a surface class")


def _pow_blowup(u: CycleBlowup, k: int, s: SurfaceData) -> CycleBlowup:
    codims = u.codims()
    if 0 not in codims:
        if k > 4:
            return CycleBlowup.zero(s.rho)
    elif k > MAX_SCALAR_EXPONENT:
        raise EvalError(f"exponent {k} on a class with a scalar part exceeds {MAX_SCALAR_EXPONENT}")
    result, base = CycleBlowup.scalar(s.rho, 1), u
    while k:
        if k & 1:
            result = mul_blowup(result, base, s)
        k >>= 1
        if k:
            base = mul_blowup(base, base, s)
    return result


def evaluate(e: Expr | str, s: SurfaceData) -> CycleBlowup:
    """Evaluate a parsed (or raw) expression to a normalized class on the blow-up."""
    if isinstance(e, str):
        e = parse(e)
    rho = s.rho
    if isinstance(e, Num):
        return CycleBlowup.scalar(rho, e.value)
    if isinstance(e, SymN):
        return CycleBlowup.scalar(rho, CoeffPoly.N())
    if isinstance(e, DConst):
        return D_class(rho)
    if isinstance(e, Box):
        return box(eval_surface_class(e.left, s), eval_surface_class(e.right, s))
    if isinstance(e, Exc):
        return exc(eval_surface_class(e.arg, s))
    if isinstance(e, Diag):
        return diag(eval_surface_class(e.arg, s))
    if isinstance(e, Neg):
        return -evaluate(e.arg, s)
    if isinstance(e, Pow):
        return _pow_blowup(evaluate(e.base, s), e.exponent, s)
    if isinstance(e, BinOp):
        a = evaluate(e.left, s)
        b = evaluate(e.right, s)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        return mul_blowup(a, b, s)
    if isinstance(e, Name):
        raise EvalError(f"surface class {e.name!r} outside box/exc/diag")
    raise EvalError(f"cannot evaluate {e!r}")


# --- printing ---------------------------------------------------------------------


def _basis_text(index: int, s: SurfaceData) -> str:
    if index == 0:
        return "1"
    if index == s.rho + 1:
        return "pt"
    return s.basis_names[index - 1]


def _signed_term(coeff: CoeffPoly, mono: str) -> tuple[bool, str]:
    nonzero = [c for c in coeff.coeffs if c]
    if len(nonzero) == 1:
        negative = coeff.leading < 0
        mag = str(-coeff if negative else coeff)
        return negative, mono if mag == "1" else f"{mag}*{mono}"
    negative = coeff.leading < 0
    return negative, f"({-coeff if negative else coeff})*{mono}"


def format_cycle(c: CycleBlowup, s: SurfaceData) -> str:
    """Canonical text: Kunneth terms by bidegree, then ``exc``, then ``diag``."""
    c = c.normalized()
    rho = s.rho
    terms: list[tuple[CoeffPoly, str]] = []
    kun = sorted(c.kunneth.terms, key=lambda kv: (c.kunneth.bidegree(kv[0]), kv[0]))
    for (u, v), coeff in kun:
        terms.append((coeff, f"box({_basis_text(u, s)},{_basis_text(v, s)})"))
    for word, cyc in (("exc", c.exc), ("diag", c.diag)):
        for idx, coeff in cyc.components():
            terms.append((coeff, f"{word}({_basis_text(idx, s)})"))
    if not terms:
        return "0"
    out = []
    for k, (coeff, mono) in enumerate(terms):
        negative, body = _signed_term(coeff, mono)
        if k == 0:
            out.append(f"- {body}" if negative else body)
        else:
            out.append(f"{'-' if negative else '+'} {body}")
    return " ".join(out)


def parse_divisor(text: str, s: SurfaceData) -> tuple[Fraction, ...]:
    """A divisor on the surface from a name, a combination like ``2*H - K``, or ``[1,0]``."""
    t = text.strip()
    if t.startswith("[") and t.endswith("]"):
        parts = [p for p in t[1:-1].replace(" ", ",").split(",") if p]
        if len(parts) != s.rho:
            raise EvalError(f"vector {text!r} needs {s.rho} entries")
        return tuple(parse_rational(p) for p in parts)
    cls = eval_surface_class(parse_surface_expr(t), s)
    if not (cls.r0.is_zero() and cls.pt.is_zero()):
        raise EvalError(f"{text!r} is not a divisor class")
    try:
        return cls.divisor_values()
    except ValueError:
        raise EvalError(f"{text!r} depends on N") from None

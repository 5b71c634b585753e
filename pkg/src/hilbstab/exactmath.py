"""Exact univariate polynomials in the symbol N and eventual-positivity decisions.

Coefficients are :class:`fractions.Fraction`; nothing here ever touches a float.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction]

__all__ = [
    "CoeffPoly",
    "AlwaysFrom",
    "NeverEventually",
    "IdenticallyZero",
    "eventually_positive",
    "sturm_sequence",
    "count_roots_above",
    "parse_rational",
    "format_rational",
]


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"`` or an integer string into a Fraction; floats are refused."""
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not an exact rational: {text!r}") from None
    if d == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(n, d)


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


_TERM = re.compile(r"([+-])(\d+(?:/\d+)?)?(?:(?(2)\*)(N)(?:\^(\d+))?)?")


def _normalize(coeffs: Iterable[Number]) -> tuple[Fraction, ...]:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True, init=False)
class CoeffPoly:
    """Polynomial in N with rational coefficients, ``coeffs[i]`` multiplying ``N**i``."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable[Number] = ()):
        object.__setattr__(self, "coeffs", _normalize(coeffs))

    @classmethod
    def const(cls, c: Number) -> "CoeffPoly":
        return cls((c,))

    @classmethod
    def N(cls) -> "CoeffPoly":
        return cls((0, 1))

    @classmethod
    def coerce(cls, x: "CoeffPoly | Number") -> "CoeffPoly":
        if isinstance(x, CoeffPoly):
            return x
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return cls((x,))
        raise TypeError(f"cannot use {type(x).__name__} as a polynomial coefficient")

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other):
        try:
            o = CoeffPoly.coerce(other)
        except TypeError:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return CoeffPoly(self.coeff(i) + o.coeff(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return CoeffPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        try:
            o = CoeffPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return CoeffPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return CoeffPoly(c * other for c in self.coeffs)
        if not isinstance(other, CoeffPoly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return CoeffPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return CoeffPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return CoeffPoly(c / Fraction(other) for c in self.coeffs)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result, base = CoeffPoly.const(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, CoeffPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.coeffs == _normalize((other,))
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x: Number) -> Fraction:
        """Exact Horner evaluation."""
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    eval_at = __call__

    def derivative(self) -> "CoeffPoly":
        return CoeffPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def divmod(self, other: "CoeffPoly") -> tuple["CoeffPoly", "CoeffPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        lead = other.leading
        dd = other.degree
        while len(rem) - 1 >= dd and rem:
            shift = len(rem) - 1 - dd
            c = rem[-1] / lead
            q[shift] = c
            for j, b in enumerate(other.coeffs):
                rem[shift + j] -= c * b
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return CoeffPoly(q), CoeffPoly(rem)

    def monic(self) -> "CoeffPoly":
        return self / self.leading if self.coeffs else self

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts: list[str] = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mag = abs(c)
            if i == 0:
                body = format_rational(mag)
            else:
                mono = "N" if i == 1 else f"N^{i}"
                body = mono if mag == 1 else f"{format_rational(mag)}*{mono}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"CoeffPoly({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "CoeffPoly":
        """Inverse of ``str``: accepts sums of terms ``c``, ``c*N``, ``N^k``, ``c*N^k``."""
        body = text.replace(" ", "")
        if not body:
            raise ValueError("empty polynomial text")
        if body[0] not in "+-":
            body = "+" + body
        pos, out = 0, {}
        while pos < len(body):
            m = _TERM.match(body, pos)
            if not m:
                raise ValueError(f"bad polynomial text at offset {pos}: {text!r}")
            sign, coeff, var, power = m.groups()
            if coeff is None and var is None:
                raise ValueError(f"empty term in {text!r}")
            c = parse_rational(coeff) if coeff is not None else Fraction(1)
            k = 0 if var is None else int(power) if power else 1
            out[k] = out.get(k, Fraction(0)) + (c if sign == "+" else -c)
            pos = m.end()
        n = max(out) + 1
        return cls(out.get(i, 0) for i in range(n))


def poly_gcd(a: CoeffPoly, b: CoeffPoly) -> CoeffPoly:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


def sturm_sequence(p: CoeffPoly) -> list[CoeffPoly]:
    """Sturm chain of the square-free part of ``p`` (so roots are counted without multiplicity)."""
    if p.degree < 1:
        return [p]
    sqf = p.divmod(poly_gcd(p, p.derivative()))[0]
    chain = [sqf, sqf.derivative()]
    while not chain[-1].is_zero():
        r = chain[-2].divmod(chain[-1])[1]
        if r.is_zero():
            break
        chain.append(-r)
    return chain


def _sign_changes(values: Sequence[Fraction]) -> int:
    nz = [v for v in values if v != 0]
    return sum(1 for a, b in zip(nz, nz[1:]) if (a > 0) != (b > 0))


def _variations_at(chain: Sequence[CoeffPoly], x: Fraction) -> int:
    return _sign_changes([q(x) for q in chain])


def _variations_at_infinity(chain: Sequence[CoeffPoly]) -> int:
    return _sign_changes([q.leading for q in chain])


def count_roots_above(p: CoeffPoly, x: Number, chain: Sequence[CoeffPoly] | None = None) -> int:
    """Number of distinct real roots of ``p`` in the half-open interval ``(x, +inf)``."""
    if p.degree < 1:
        return 0
    chain = sturm_sequence(p) if chain is None else chain
    return _variations_at(chain, Fraction(x)) - _variations_at_infinity(chain)


def cauchy_bound(p: CoeffPoly) -> int:
    """Integer ``B`` with every real root of ``p`` inside ``(-B, B)``."""
    lead = abs(p.leading)
    return 2 + floor(max((abs(c) / lead for c in p.coeffs[:-1]), default=Fraction(0)))


@dataclass(frozen=True)
class AlwaysFrom:
    """``p(n) > 0`` for every integer ``n >= M``; ``M >= 1`` is the least such integer."""

    M: int

    def __str__(self) -> str:
        return str(self.M)


@dataclass(frozen=True)
class NeverEventually:
    def __str__(self) -> str:
        return "never"


@dataclass(frozen=True)
class IdenticallyZero:
    def __str__(self) -> str:
        return "zero"


Positivity = Union[AlwaysFrom, NeverEventually, IdenticallyZero]


def eventually_positive(p: CoeffPoly) -> Positivity:
    """Decide whether ``p(n) > 0`` for all large integers ``n`` and give the exact start.

    The largest real root is bracketed between integers with a Sturm count, which
    gives the first integer past every root; from there we walk down while ``p``
    stays positive, so the returned ``M`` is minimal over integers ``>= 1``.
    """
    if p.is_zero():
        return IdenticallyZero()
    if p.leading < 0:
        return NeverEventually()
    if p.degree == 0:
        return AlwaysFrom(1)

    chain = sturm_sequence(p)
    bound = cauchy_bound(p)

    def clear_from(m: int) -> bool:
        # no root in [m, inf)
        return p(m) != 0 and count_roots_above(p, m, chain) == 0

    lo, hi = -bound, bound  # clear_from(hi) holds; search the least such integer
    if clear_from(lo):
        first = lo
    else:
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if clear_from(mid):
                hi = mid
            else:
                lo = mid
        first = hi

    m = max(1, first)
    if p(m) <= 0:
        raise AssertionError(f"root isolation inconsistent for {p} at {m}")
    while m > 1 and p(m - 1) > 0:
        m -= 1
    return AlwaysFrom(m)

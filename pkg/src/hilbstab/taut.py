"""Tautological sheaves on the Hilbert square: first Chern classes, slopes and verdicts.

All slopes are taken upstairs on the blow-up with respect to the pullback of
``H_N = N H - delta``, i.e. against ``(N H (x) 1 + 1 (x) N H - D)^3``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .chow import (
    CycleBlowup,
    D_class,
    NotADivisor,
    box,
    diag,
    divisor_class,
    divisor_parts,
    integrate,
    mul_blowup,
    power,
)
from .exactmath import CoeffPoly, Positivity, eventually_positive
from .surface import CycleX, SurfaceData, pair

__all__ = [
    "TautSpec",
    "LineClass",
    "SlopeReport",
    "taut_c1",
    "dual_c1_check",
    "hn_divisor",
    "hn_cubed",
    "hn_cubed_terms",
    "slope",
    "slope_line_closed",
    "slope_taut_closed",
    "Verdict",
    "destabilize_verdict",
    "Excluded",
    "ExceptionalCase",
    "NotDecided",
    "exclusion_filter",
]


def _vec(v: Sequence) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in v)


@dataclass(frozen=True)
class TautSpec:
    """Rank ``r`` and first Chern class ``f`` of the sheaf F on X generating F^[2]."""

    r: int
    f: tuple[Fraction, ...]

    def __post_init__(self):
        if not isinstance(self.r, int) or self.r < 1:
            raise ValueError("rank must be a positive integer")
        object.__setattr__(self, "f", _vec(self.f))

    @property
    def taut_rank(self) -> int:
        return 2 * self.r

    def dual(self) -> "TautSpec":
        return TautSpec(self.r, tuple(-x for x in self.f))


@dataclass(frozen=True)
class LineClass:
    """The line bundle class ``L_(g,h,a)`` with ``c_1 = g (x) 1 + 1 (x) h + a D``."""

    g: tuple[Fraction, ...]
    h: tuple[Fraction, ...]
    a: Fraction

    def __post_init__(self):
        object.__setattr__(self, "g", _vec(self.g))
        object.__setattr__(self, "h", _vec(self.h))
        object.__setattr__(self, "a", Fraction(self.a))
        if len(self.g) != len(self.h):
            raise ValueError("g and h must have the same length")

    @property
    def symmetric(self) -> bool:
        return self.g == self.h

    def c1(self) -> CycleBlowup:
        return divisor_class(self.g, self.h, self.a)

    def __str__(self) -> str:
        return f"g={_fmt_vec(self.g)} h={_fmt_vec(self.h)} a={self.a}"


def _fmt_vec(v: Sequence[Fraction]) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def _check_len(v: Sequence, s: SurfaceData, what: str) -> None:
    if len(v) != s.rho:
        raise ValueError(f"{what} has length {len(v)}, surface {s.name!r} has rho={s.rho}")


def taut_c1(t: TautSpec) -> CycleBlowup:
    """``c_1(pi^* F^[2]) = f (x) 1 + 1 (x) f - r D``; the rank is ``2 r``."""
    return divisor_class(t.f, t.f, -t.r)


def dual_c1_check(t: TautSpec) -> bool:
    """``c_1`` shadow of ``F^[2] dual = (F dual)^[2] (x) L_delta``: twisting rank 2r by D adds 2r D."""
    rho = len(t.f)
    lhs = -taut_c1(t)
    rhs = taut_c1(t.dual()) + D_class(rho).scale(2 * t.r)
    return lhs == rhs


def hn_divisor(s: SurfaceData) -> CycleBlowup:
    """``N H (x) 1 + 1 (x) N H - D``."""
    nh = CycleX.divisor([CoeffPoly([0, x]) for x in s.H])
    one = CycleX.one(s.rho)
    return box(nh, one) + box(one, nh) - D_class(s.rho)


def hn_cubed(s: SurfaceData) -> CycleBlowup:
    return power(hn_divisor(s), 3, s)


def hn_cubed_terms(s: SurfaceData) -> list[CycleBlowup]:
    """The four summands of the expanded cube, each built directly rather than by cubing.

    ``3N^3 (H^2 (x) H + H (x) H^2)``, ``-3N^2 (H^2 (x) 1 + 2 H (x) H + 1 (x) H^2) D``,
    ``-3N diag(1) (H (x) 1 + 1 (x) H)`` and ``D diag(1)``.
    """
    rho = s.rho
    one = CycleX.one(rho)
    h = CycleX.divisor(s.H)
    h2 = CycleX.point(rho, pair(s.H, s.H, s))
    N = CoeffPoly.N()
    D = D_class(rho)
    sd = diag(one)
    t1 = (box(h2, h) + box(h, h2)).scale(3 * N**3)
    t2 = mul_blowup(box(h2, one) + box(h, h).scale(2) + box(one, h2), D, s).scale(-3 * N**2)
    t3 = mul_blowup(sd, box(h, one) + box(one, h), s).scale(-3 * N)
    t4 = mul_blowup(D, sd, s)
    return [t1, t2, t3, t4]


@dataclass(frozen=True)
class SlopeReport:
    subject: str
    rank: int
    c1: CycleBlowup
    slope: CoeffPoly

    def render(self, fmt) -> str:
        """Labeled block; ``fmt`` turns a cycle into canonical text."""
        return "\n".join(
            [
                f"subject: {self.subject}",
                f"rank: {self.rank}",
                f"c1: {fmt(self.c1)}",
                f"slope: {self.slope}",
            ]
        )


def slope(c1: CycleBlowup, rank: int, s: SurfaceData, subject: str = "sheaf", *, cube: CycleBlowup | None = None) -> SlopeReport:
    """Slope computed in the ring: ``integrate(H_N^3 . c1) / rank``."""
    if not isinstance(rank, int) or rank < 1:
        raise ValueError("rank must be a positive integer")
    if c1.codims() - {1}:
        raise NotADivisor("slope needs a pure codimension-one first Chern class")
    cube = hn_cubed(s) if cube is None else cube
    value = integrate(mul_blowup(cube, c1, s)) / rank
    return SlopeReport(subject, rank, c1, value)


def slope_line_closed(l: LineClass, rank: int, s: SurfaceData) -> CoeffPoly:
    """Closed form of ``c_1(L_(g,h,a)) . H_N^3 / rank``.

    ``3 H^2 (H.(g+h)) N^3 + 12 a H^2 N^2 - 6 (H.(g+h)) N - c_2 a`` plus the canonical
    corrections ``6 a (H.K) N - K.(g+h) + a K^2``, which vanish when ``K_X = 0``.
    """
    if rank < 1:
        raise ValueError("rank must be positive")
    _check_len(l.g, s, "g")
    _check_len(l.h, s, "h")
    H, K = s.H, s.K
    hh = pair(H, H, s)
    gh = tuple(x + y for x, y in zip(l.g, l.h))
    h_gh = pair(H, gh, s)
    k_gh = pair(K, gh, s)
    a = l.a
    poly = CoeffPoly(
        [
            -s.c2 * a + a * s.K_squared - k_gh,
            -6 * h_gh + 6 * a * pair(H, K, s),
            12 * a * hh,
            3 * hh * h_gh,
        ]
    )
    return poly / rank


def slope_taut_closed(t: TautSpec, s: SurfaceData) -> CoeffPoly:
    """Closed form of the slope of ``pi^* F^[2]``.

    ``3 H^2 (H.f)/r N^3 - 6 H^2 N^2 - 6 (H.f)/r N + c_2/2``, with canonical corrections
    ``-3 (H.K) N - K.f / r - K^2 / 2``.
    """
    _check_len(t.f, s, "f")
    H, K = s.H, s.K
    r = Fraction(t.r)
    hh = pair(H, H, s)
    hf = pair(H, t.f, s)
    return CoeffPoly(
        [
            s.c2 / 2 - s.K_squared / 2 - pair(K, t.f, s) / r,
            -6 * hf / r - 3 * pair(H, K, s),
            -6 * hh,
            3 * hh * hf / r,
        ]
    )


# --- verdicts ---------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    destabilizing: bool
    strict: bool  # decided by the N^3 coefficient rather than the equality branch
    lhs: Fraction  # r H.(g+h)
    rhs: Fraction  # H.f
    difference: CoeffPoly  # slope(line) - slope(F^[2])
    threshold: Positivity

    @property
    def label(self) -> str:
        return "D" if self.destabilizing else "N"


def destabilize_verdict(l: LineClass, t: TautSpec, s: SurfaceData) -> Verdict:
    """Asymptotic destabilization test for ``L_(g,h,a)`` inside ``pi^* F^[2]``.

    Destabilizing iff ``r H.(g+h) > H.f``, or equality and ``a >= 0`` (``2a > -1`` when
    ``a`` is not an integer).  ``threshold`` is the first integer ``N`` from which the
    strict slope comparison in the verdict's direction holds.
    """
    lhs = t.r * pair(s.H, tuple(x + y for x, y in zip(l.g, l.h)), s)
    rhs = pair(s.H, t.f, s)
    if lhs != rhs:
        destab, strict = lhs > rhs, True
    else:
        strict = False
        destab = l.a >= 0 if l.a.denominator == 1 else 2 * l.a > -1
    diff = slope_line_closed(l, 1, s) - slope_taut_closed(t, s)
    threshold = eventually_positive(diff if destab else -diff)
    return Verdict(destab, strict, lhs, rhs, diff, threshold)


@dataclass(frozen=True)
class Excluded:
    """No line subbundle of ``r_1^* F`` has this class (F stable, not O_X)."""

    lhs: Fraction  # r H.(g+h)
    rhs: Fraction  # H.f

    label = "EXCL"

    @property
    def certificate(self) -> str:
        return f"r*H.(g+h) = {self.lhs} >= H.f = {self.rhs}"


@dataclass(frozen=True)
class ExceptionalCase:
    lhs: Fraction
    rhs: Fraction

    label = "EXC-CASE"


@dataclass(frozen=True)
class NotDecided:
    lhs: Fraction
    rhs: Fraction

    label = "UNDEC"


Exclusion = Union[Excluded, ExceptionalCase, NotDecided]


def exclusion_filter(l: LineClass, t: TautSpec, s: SurfaceData) -> Exclusion:
    """Rule out ``L_(g,h,a) inside r_1^* F`` when ``H.(g+h) >= H.f / r``.

    The bound does not apply to ``r = 1, h = 0, g = f``, where ``L`` may be ``F`` itself.
    """
    lhs = t.r * pair(s.H, tuple(x + y for x, y in zip(l.g, l.h)), s)
    rhs = pair(s.H, t.f, s)
    if lhs < rhs:
        return NotDecided(lhs, rhs)
    if t.r == 1 and not any(l.h) and l.g == t.f:
        return ExceptionalCase(lhs, rhs)
    return Excluded(lhs, rhs)

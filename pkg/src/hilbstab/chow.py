"""Algebraic cycles on X x X, on the exceptional divisor D and on the blow-up of the diagonal.

Every class on the blow-up is stored as three summands

    kunneth   sigma^*(x (x) y)             Kunneth classes pulled back from X x X
    exc(a)    i_* sigma_D^*(a)             codimension codim(a) + 1
    diag(a)   i_*(xi . sigma_D^*(a))       codimension codim(a) + 2

with ``xi = c_1(O_D(1))``.  ``diag(1)`` is the class written sigma^* Delta throughout
the stability computations; the precise relation to the pulled-back diagonal is

    sigma^* Delta_*(a) = diag(a) - exc(K_X . a)

so the two agree whenever ``K_X`` is numerically trivial (see :func:`diagonal_pullback`).
Multiplication is the closure of the rules

    box . box   = box of the factorwise products
    box . exc   : (b (x) c) . exc(a)  = exc(a b c)
    box . diag  : (b (x) c) . diag(a) = diag(a b c)
    exc . exc   : exc(a) . exc(b)     = -diag(a b)
    diag . exc  : diag(a) . exc(b)    = diag(c_1 a b) + exc(c_2 a b)
    diag . diag : diag(a) . diag(b)   = diag((c_2 - c_1^2) a b)

where ``c_i = c_i(T_X)``, ``c_1 = -K_X``.  The last two come from pushing forward
``xi^2 = -c_1 xi - c_2`` and ``xi^3 = (c_1^2 - c_2) xi`` along ``i``.  After every operation
``diag(pt)`` is folded into ``pt (x) pt``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .exactmath import CoeffPoly, Number
from .surface import CycleX, SurfaceData, basis_codim, basis_element, mul_X, pair

__all__ = [
    "CycleProduct",
    "CycleD",
    "CycleBlowup",
    "box",
    "exc",
    "diag",
    "D_class",
    "mul_blowup",
    "integrate",
    "mul_D",
    "push_i",
    "pull_i",
    "pi_pull",
    "pi_push",
    "canonical_class",
    "diagonal_pullback",
    "divisor_class",
    "divisor_parts",
    "NotADivisor",
]


class NotADivisor(ValueError):
    pass


def _c1_tangent(s: SurfaceData) -> CycleX:
    return CycleX.divisor([-k for k in s.K])


def _c2_tangent(s: SurfaceData) -> CycleX:
    return CycleX.point(s.rho, s.c2)


@dataclass(frozen=True, init=False)
class CycleProduct:
    """Algebraic Kunneth class on X x X, keyed by pairs of surface basis indices.

    Basis index 0 is ``[X]``, ``1..rho`` the Neron-Severi basis and ``rho + 1`` the point,
    so the key ``(u, v)`` has bidegree ``(codim u, codim v)``.
    """

    rho: int
    terms: tuple[tuple[tuple[int, int], CoeffPoly], ...]

    def __init__(self, rho: int, terms: Mapping[tuple[int, int], CoeffPoly] | None = None):
        items = sorted((k, v) for k, v in (terms or {}).items() if not v.is_zero())
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "terms", tuple(items))

    def as_dict(self) -> dict[tuple[int, int], CoeffPoly]:
        return dict(self.terms)

    @classmethod
    def box(cls, x: CycleX, y: CycleX) -> "CycleProduct":
        out: dict[tuple[int, int], CoeffPoly] = {}
        for u, a in x.components():
            for v, b in y.components():
                out[(u, v)] = out.get((u, v), CoeffPoly()) + a * b
        return cls(x.rho, out)

    def bidegree(self, key: tuple[int, int]) -> tuple[int, int]:
        return basis_codim(key[0], self.rho), basis_codim(key[1], self.rho)

    def component(self, i: int, j: int):
        """Bidegree ``(i, j)`` part: a scalar, a rho-vector or a rho x rho matrix."""
        d = self.as_dict()
        rho = self.rho
        idx = {0: [0], 1: list(range(1, rho + 1)), 2: [rho + 1]}
        rows = [[d.get((u, v), CoeffPoly()) for v in idx[j]] for u in idx[i]]
        if i != 1 and j != 1:
            return rows[0][0]
        if i == 1 and j == 1:
            return tuple(tuple(r) for r in rows)
        if i == 1:
            return tuple(r[0] for r in rows)
        return tuple(rows[0])

    def __add__(self, other: "CycleProduct") -> "CycleProduct":
        out = self.as_dict()
        for k, v in other.terms:
            out[k] = out.get(k, CoeffPoly()) + v
        return CycleProduct(self.rho, out)

    def __neg__(self) -> "CycleProduct":
        return CycleProduct(self.rho, {k: -v for k, v in self.terms})

    def scale(self, c: CoeffPoly | Number) -> "CycleProduct":
        c = CoeffPoly.coerce(c)
        return CycleProduct(self.rho, {k: v * c for k, v in self.terms})

    def restrict_diagonal(self, s: SurfaceData) -> CycleX:
        """``Delta^*``: the class on X obtained by multiplying the two factors."""
        total = CycleX.zero(self.rho)
        for (u, v), c in self.terms:
            total = total + mul_X(basis_element(u, self.rho), basis_element(v, self.rho), s).scale(c)
        return total

    def mul(self, other: "CycleProduct", s: SurfaceData) -> "CycleProduct":
        acc = CycleProduct(self.rho)
        for (u, v), a in self.terms:
            for (u2, v2), b in other.terms:
                left = mul_X(basis_element(u, self.rho), basis_element(u2, self.rho), s)
                right = mul_X(basis_element(v, self.rho), basis_element(v2, self.rho), s)
                if left.is_zero() or right.is_zero():
                    continue
                acc = acc + CycleProduct.box(left, right).scale(a * b)
        return acc


@dataclass(frozen=True)
class CycleD:
    """``sigma_D^*(a0) + xi . sigma_D^*(a1)`` on ``D = P(T_X)``."""

    a0: CycleX
    a1: CycleX

    @classmethod
    def zero(cls, rho: int) -> "CycleD":
        return cls(CycleX.zero(rho), CycleX.zero(rho))

    @classmethod
    def xi(cls, rho: int) -> "CycleD":
        return cls(CycleX.zero(rho), CycleX.one(rho))

    def __add__(self, other: "CycleD") -> "CycleD":
        return CycleD(self.a0 + other.a0, self.a1 + other.a1)

    def __neg__(self) -> "CycleD":
        return CycleD(-self.a0, -self.a1)

    def __sub__(self, other: "CycleD") -> "CycleD":
        return self + (-other)

    def is_zero(self) -> bool:
        return self.a0.is_zero() and self.a1.is_zero()


def mul_D(u: CycleD, v: CycleD, s: SurfaceData) -> CycleD:
    """Product in ``A^*(X)[xi] / (xi^2 + c_1 xi + c_2)``."""
    top = mul_X(u.a1, v.a1, s)
    a0 = mul_X(u.a0, v.a0, s) - mul_X(_c2_tangent(s), top, s)
    a1 = mul_X(u.a0, v.a1, s) + mul_X(u.a1, v.a0, s) - mul_X(_c1_tangent(s), top, s)
    return CycleD(a0, a1)


@dataclass(frozen=True)
class CycleBlowup:
    kunneth: CycleProduct
    exc: CycleX
    diag: CycleX

    @classmethod
    def zero(cls, rho: int) -> "CycleBlowup":
        return cls(CycleProduct(rho), CycleX.zero(rho), CycleX.zero(rho))

    @classmethod
    def scalar(cls, rho: int, c: CoeffPoly | Number) -> "CycleBlowup":
        one = CycleX.one(rho)
        return cls(CycleProduct.box(one, one).scale(c), CycleX.zero(rho), CycleX.zero(rho))

    @property
    def rho(self) -> int:
        return self.kunneth.rho

    def normalized(self) -> "CycleBlowup":
        """Fold ``diag(pt)`` into ``pt (x) pt``."""
        if self.diag.pt.is_zero():
            return self
        p = self.rho + 1
        extra = CycleProduct(self.rho, {(p, p): self.diag.pt})
        d = CycleX(self.diag.r0, self.diag.div, CoeffPoly())
        return CycleBlowup(self.kunneth + extra, self.exc, d)

    def __add__(self, other: "CycleBlowup") -> "CycleBlowup":
        return CycleBlowup(self.kunneth + other.kunneth, self.exc + other.exc, self.diag + other.diag).normalized()

    def __neg__(self) -> "CycleBlowup":
        return CycleBlowup(-self.kunneth, -self.exc, -self.diag)

    def __sub__(self, other: "CycleBlowup") -> "CycleBlowup":
        return self + (-other)

    def scale(self, c: CoeffPoly | Number) -> "CycleBlowup":
        return CycleBlowup(self.kunneth.scale(c), self.exc.scale(c), self.diag.scale(c))

    def is_zero(self) -> bool:
        return not self.kunneth.terms and self.exc.is_zero() and self.diag.is_zero()

    def codim_parts(self) -> Iterator[tuple[int, "CycleBlowup"]]:
        """Split into homogeneous pieces ``(codim, piece)``, skipping zero pieces."""
        rho = self.rho
        for k in range(5):
            kun = CycleProduct(rho, {key: c for key, c in self.kunneth.terms if sum(self.kunneth.bidegree(key)) == k})
            e = self.exc.codim_part(k - 1)
            d = self.diag.codim_part(k - 2)
            piece = CycleBlowup(kun, e, d)
            if not piece.is_zero():
                yield k, piece

    def codims(self) -> set[int]:
        return {k for k, _ in self.codim_parts()}

    def __mul__(self, other):
        raise TypeError("use mul_blowup(u, v, surface); the product depends on the surface")


def box(x: CycleX, y: CycleX) -> CycleBlowup:
    rho = x.rho
    return CycleBlowup(CycleProduct.box(x, y), CycleX.zero(rho), CycleX.zero(rho))


def exc(a: CycleX) -> CycleBlowup:
    return CycleBlowup(CycleProduct(a.rho), a, CycleX.zero(a.rho))


def diag(a: CycleX) -> CycleBlowup:
    return CycleBlowup(CycleProduct(a.rho), CycleX.zero(a.rho), a).normalized()


def D_class(rho: int) -> CycleBlowup:
    return exc(CycleX.one(rho))


def mul_blowup(u: CycleBlowup, v: CycleBlowup, s: SurfaceData) -> CycleBlowup:
    rho = s.rho
    c1 = _c1_tangent(s)
    c2 = _c2_tangent(s)
    c2_minus_c1sq = mul_X(c2, CycleX.one(rho), s) - mul_X(c1, c1, s)

    kun = u.kunneth.mul(v.kunneth, s)
    e = CycleX.zero(rho)
    d = CycleX.zero(rho)

    # Kunneth factors act on exc / diag through restriction to the diagonal
    ur = u.kunneth.restrict_diagonal(s)
    vr = v.kunneth.restrict_diagonal(s)
    e = e + mul_X(ur, v.exc, s) + mul_X(vr, u.exc, s)
    d = d + mul_X(ur, v.diag, s) + mul_X(vr, u.diag, s)

    d = d - mul_X(u.exc, v.exc, s)

    for x, y in ((u.diag, v.exc), (v.diag, u.exc)):
        xy = mul_X(x, y, s)
        if xy.is_zero():
            continue
        d = d + mul_X(c1, xy, s)
        e = e + mul_X(c2, xy, s)

    d = d + mul_X(c2_minus_c1sq, mul_X(u.diag, v.diag, s), s)
    return CycleBlowup(kun, e, d).normalized()


def power(u: CycleBlowup, k: int, s: SurfaceData) -> CycleBlowup:
    if k < 0:
        raise ValueError("negative exponent")
    result = CycleBlowup.scalar(s.rho, 1)
    for _ in range(k):
        result = mul_blowup(result, u, s)
    return result


def integrate(u: CycleBlowup) -> CoeffPoly:
    """Degree of the top-codimension part: the ``pt (x) pt`` coefficient."""
    p = u.rho + 1
    return u.kunneth.as_dict().get((p, p), CoeffPoly()) + u.diag.pt


def push_i(u: CycleD) -> CycleBlowup:
    rho = u.a0.rho
    return CycleBlowup(CycleProduct(rho), u.a0, u.a1).normalized()


def pull_i(u: CycleBlowup, s: SurfaceData) -> CycleD:
    """Restriction to D: ``i^* box = sigma_D^* Delta^*``, ``i^* i_* lambda = -xi . lambda``."""
    a0 = u.kunneth.restrict_diagonal(s)
    a1 = -u.exc
    # i^* diag(a) = -xi^2 . a = c_1 xi a + c_2 a
    a0 = a0 + mul_X(_c2_tangent(s), u.diag, s)
    a1 = a1 + mul_X(_c1_tangent(s), u.diag, s)
    return CycleD(a0, a1)


def diagonal_pullback(a: CycleX, s: SurfaceData) -> CycleBlowup:
    """``sigma^* Delta_*(a)`` itself, which differs from ``diag(a)`` by ``exc(K_X . a)``."""
    return diag(a) - exc(mul_X(CycleX.divisor(s.K), a, s))


# --- divisors ---------------------------------------------------------------------


def divisor_class(g: Sequence[Number], h: Sequence[Number], a: Number, rho: int | None = None) -> CycleBlowup:
    """``g (x) 1 + 1 (x) h + a D``."""
    rho = len(g) if rho is None else rho
    one = CycleX.one(rho)
    return (
        box(CycleX.divisor(g), one)
        + box(one, CycleX.divisor(h))
        + exc(CycleX.scalar(rho, a))
    )


def divisor_parts(u: CycleBlowup) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...], Fraction]:
    """Inverse of :func:`divisor_class` for a pure codimension-one class with constant coefficients."""
    if u.codims() - {1}:
        raise NotADivisor("class is not of pure codimension one")
    rho = u.rho
    try:
        g = tuple(c.constant_value() for c in u.kunneth.component(1, 0))
        h = tuple(c.constant_value() for c in u.kunneth.component(0, 1))
        a = u.exc.r0.constant_value()
    except ValueError:
        raise NotADivisor("divisor coefficients depend on N") from None
    if not u.is_zero() and len(g) != rho:
        raise NotADivisor("malformed class")
    return g, h, a


def pi_pull(g: Sequence[Number], m: Number) -> CycleBlowup:
    """Pull ``g + m delta`` back from the Hilbert square: ``g (x) 1 + 1 (x) g + m D``."""
    return divisor_class(g, g, m)


def pi_push(u: CycleBlowup) -> tuple[tuple[Fraction, ...], Fraction]:
    """Push an S_2-symmetric divisor ``(g, g, a)`` down: returns ``(2g, 2a)`` meaning ``2g + 2a delta``."""
    g, h, a = divisor_parts(u)
    if g != h:
        raise ValueError("pushforward needs an S_2-symmetric divisor (g == h)")
    return tuple(2 * x for x in g), 2 * a


def canonical_class(which: str, s: SurfaceData):
    """Canonical divisor of the blow-up, ``(K_X, K_X, 1)``, or of D, ``2 sigma_D^* K_X - 2 xi``."""
    if which == "blowup":
        return divisor_class(s.K, s.K, 1)
    if which == "D":
        return CycleD(CycleX.divisor([2 * k for k in s.K]), CycleX.scalar(s.rho, -2))
    raise ValueError(f"which must be 'blowup' or 'D', not {which!r}")

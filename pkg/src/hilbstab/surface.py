"""Polarized surface data and the algebraic Chow ring ``Q + NS_Q + Q.pt`` of a surface."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import yaml

from .exactmath import CoeffPoly, Number, parse_rational

__all__ = [
    "SurfaceError",
    "SurfaceData",
    "CycleX",
    "pair",
    "mul_X",
    "load_surface",
    "load_surface_file",
    "k3_surface",
    "preset",
    "PRESETS",
    "RESERVED_NAMES",
]

RESERVED_NAMES = frozenset({"N", "D", "box", "exc", "diag", "pt"})
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

Vector = tuple[Fraction, ...]


class SurfaceError(ValueError):
    """Invalid surface data; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _vec(values: Sequence[Number], length: int, field_name: str) -> Vector:
    if not isinstance(values, (list, tuple)):
        raise SurfaceError(field_name, f"expected a list of {length} rationals")
    if len(values) != length:
        raise SurfaceError(field_name, f"expected length {length}, got {len(values)}")
    try:
        return tuple(parse_rational(v) for v in values)
    except ValueError as exc:
        raise SurfaceError(field_name, str(exc)) from None


@dataclass(frozen=True)
class SurfaceData:
    """The model of ``(X, H)``: Neron-Severi lattice, canonical class and ``c_2(T_X)``.

    ``h^1(O_X) = 0`` is assumed throughout and not checked.
    """

    name: str
    rho: int
    gram: tuple[Vector, ...]
    canonical: Vector
    c2: Fraction
    named_divisors: Mapping[str, Vector]
    polarization: str
    basis_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not isinstance(self.rho, int) or self.rho < 1:
            raise SurfaceError("rho", "must be a positive integer")
        if len(self.gram) != self.rho or any(len(row) != self.rho for row in self.gram):
            raise SurfaceError("gram", f"must be {self.rho}x{self.rho}")
        for i in range(self.rho):
            for j in range(i):
                if self.gram[i][j] != self.gram[j][i]:
                    raise SurfaceError("gram", "not symmetric")
        if len(self.canonical) != self.rho:
            raise SurfaceError("canonical", f"expected length {self.rho}")
        for name, v in self.named_divisors.items():
            if not _IDENT.match(name) or name in RESERVED_NAMES:
                raise SurfaceError("divisors", f"illegal divisor name {name!r}")
            if len(v) != self.rho:
                raise SurfaceError("divisors", f"{name!r} has length {len(v)}, expected {self.rho}")
        if self.polarization not in self.named_divisors:
            raise SurfaceError("polarization", f"unknown divisor {self.polarization!r}")
        if pair(self.H, self.H, self) <= 0:
            raise SurfaceError("polarization", "polarization not positive")
        if not self.basis_names:
            object.__setattr__(self, "basis_names", self._pick_basis_names())

    def _pick_basis_names(self) -> tuple[str, ...]:
        names = []
        for i in range(self.rho):
            unit = tuple(Fraction(int(i == j)) for j in range(self.rho))
            hit = sorted(n for n, v in self.named_divisors.items() if v == unit)
            if hit:
                names.append(hit[0])
            else:
                fallback = f"e{i + 1}"
                if fallback in self.named_divisors:
                    raise SurfaceError("divisors", f"{fallback!r} shadows the coordinate name")
                names.append(fallback)
        return tuple(names)

    @property
    def H(self) -> Vector:
        return self.named_divisors[self.polarization]

    @property
    def K(self) -> Vector:
        return self.canonical

    def zero(self) -> Vector:
        return (Fraction(0),) * self.rho

    def unit(self, i: int) -> Vector:
        return tuple(Fraction(int(i == j)) for j in range(self.rho))

    def divisor(self, name: str) -> Vector:
        """Resolve a named divisor or a coordinate basis name."""
        if name in self.named_divisors:
            return self.named_divisors[name]
        if name in self.basis_names:
            return self.unit(self.basis_names.index(name))
        raise KeyError(f"unknown divisor {name!r} on surface {self.name!r}")

    def known_names(self) -> list[str]:
        return sorted(set(self.named_divisors) | set(self.basis_names))

    @property
    def K_squared(self) -> Fraction:
        return pair(self.K, self.K, self)

    def to_document(self) -> dict:
        fmt = str  # Fraction prints as "p/q" or "n"
        return {
            "name": self.name,
            "rho": self.rho,
            "gram": [[fmt(x) for x in row] for row in self.gram],
            "canonical": [fmt(x) for x in self.canonical],
            "c2": fmt(self.c2),
            "divisors": {k: [fmt(x) for x in v] for k, v in sorted(self.named_divisors.items())},
            "polarization": self.polarization,
        }


def pair(x: Sequence, y: Sequence, s: SurfaceData):
    """Intersection number ``x^T . gram . y``; entries may be rationals or CoeffPoly."""
    if len(x) != s.rho or len(y) != s.rho:
        raise SurfaceError("vector", f"expected length {s.rho}, got {len(x)} and {len(y)}")
    total = Fraction(0)
    for i, xi in enumerate(x):
        if not xi:
            continue
        row = s.gram[i]
        for j, yj in enumerate(y):
            if row[j] and yj:
                total = total + xi * row[j] * yj
    return total


def load_surface(document: str | Mapping) -> SurfaceData:
    """Build :class:`SurfaceData` from a YAML/JSON document (text or already-parsed mapping)."""
    if isinstance(document, str):
        try:
            doc = yaml.safe_load(document)
        except yaml.YAMLError as exc:
            raise SurfaceError("document", f"unparseable: {exc}") from None
    else:
        doc = document
    if not isinstance(doc, Mapping):
        raise SurfaceError("document", "top level must be a mapping")
    for key in ("name", "rho", "gram", "canonical", "c2", "divisors", "polarization"):
        if key not in doc:
            raise SurfaceError(key, "missing")
    rho = doc["rho"]
    if isinstance(rho, bool) or not isinstance(rho, int) or rho < 1:
        raise SurfaceError("rho", "must be a positive integer")
    gram_rows = doc["gram"]
    if not isinstance(gram_rows, list) or len(gram_rows) != rho:
        raise SurfaceError("gram", f"must have {rho} rows")
    gram = tuple(_vec(row, rho, "gram") for row in gram_rows)
    canonical = _vec(doc["canonical"], rho, "canonical")
    try:
        c2 = parse_rational(doc["c2"])
    except ValueError as exc:
        raise SurfaceError("c2", str(exc)) from None
    divs = doc["divisors"]
    if not isinstance(divs, Mapping) or not divs:
        raise SurfaceError("divisors", "must be a non-empty mapping")
    named = {str(k): _vec(v, rho, f"divisors.{k}") for k, v in divs.items()}
    return SurfaceData(
        name=str(doc["name"]),
        rho=rho,
        gram=gram,
        canonical=canonical,
        c2=c2,
        named_divisors=named,
        polarization=str(doc["polarization"]),
    )


def load_surface_file(path: str | Path) -> SurfaceData:
    return load_surface(Path(path).read_text(encoding="utf-8"))


def k3_surface(d: int = 2) -> SurfaceData:
    """K3 surface of Picard rank one with ``H^2 = 2d``."""
    if d < 1:
        raise ValueError("d must be positive")
    return SurfaceData(
        name=f"k3_deg{2 * d}",
        rho=1,
        gram=((Fraction(2 * d),),),
        canonical=(Fraction(0),),
        c2=Fraction(24),
        named_divisors={"H": (Fraction(1),)},
        polarization="H",
    )


def _packaged(name: str) -> SurfaceData:
    text = resources.files("hilbstab.presets").joinpath(f"{name}.yaml").read_text(encoding="utf-8")
    return load_surface(text)


PRESETS = ("k3", "k3_rho2", "elliptic", "quintic")


def preset(spec: str) -> SurfaceData:
    """Look up a shipped surface: ``k3`` (H^2=4), ``k3:<d>`` (H^2=2d), or a packaged file name."""
    name, _, arg = spec.partition(":")
    if name == "k3":
        return k3_surface(int(arg) if arg else 2)
    if name in PRESETS:
        return _packaged(name)
    raise KeyError(f"unknown preset {spec!r}; known: {', '.join(PRESETS)} (k3 accepts k3:<d>)")


# --- the ring A*(X) restricted to algebraic classes ---------------------------------


@dataclass(frozen=True)
class CycleX:
    """``r0.[X] + sum div_i e_i + pt.[pt]`` with CoeffPoly coefficients."""

    r0: CoeffPoly
    div: tuple[CoeffPoly, ...]
    pt: CoeffPoly

    @classmethod
    def zero(cls, rho: int) -> "CycleX":
        z = CoeffPoly()
        return cls(z, (z,) * rho, z)

    @classmethod
    def one(cls, rho: int) -> "CycleX":
        z = CoeffPoly()
        return cls(CoeffPoly.const(1), (z,) * rho, z)

    @classmethod
    def point(cls, rho: int, c: CoeffPoly | Number = 1) -> "CycleX":
        z = CoeffPoly()
        return cls(z, (z,) * rho, CoeffPoly.coerce(c))

    @classmethod
    def divisor(cls, v: Sequence[Number | CoeffPoly]) -> "CycleX":
        z = CoeffPoly()
        return cls(z, tuple(CoeffPoly.coerce(x) for x in v), z)

    @classmethod
    def scalar(cls, rho: int, c: CoeffPoly | Number) -> "CycleX":
        z = CoeffPoly()
        return cls(CoeffPoly.coerce(c), (z,) * rho, z)

    @property
    def rho(self) -> int:
        return len(self.div)

    def is_zero(self) -> bool:
        return self.r0.is_zero() and self.pt.is_zero() and all(c.is_zero() for c in self.div)

    def __add__(self, other: "CycleX") -> "CycleX":
        return CycleX(self.r0 + other.r0, tuple(a + b for a, b in zip(self.div, other.div)), self.pt + other.pt)

    def __neg__(self) -> "CycleX":
        return CycleX(-self.r0, tuple(-a for a in self.div), -self.pt)

    def __sub__(self, other: "CycleX") -> "CycleX":
        return self + (-other)

    def scale(self, c: CoeffPoly | Number) -> "CycleX":
        c = CoeffPoly.coerce(c)
        return CycleX(self.r0 * c, tuple(a * c for a in self.div), self.pt * c)

    def codim_part(self, k: int) -> "CycleX":
        z = CoeffPoly()
        zd = (z,) * self.rho
        if k == 0:
            return CycleX(self.r0, zd, z)
        if k == 1:
            return CycleX(z, self.div, z)
        if k == 2:
            return CycleX(z, zd, self.pt)
        return CycleX.zero(self.rho)

    def components(self) -> list[tuple[int, CoeffPoly]]:
        """Nonzero ``(basis index, coefficient)`` pairs; index 0 is [X], 1..rho the divisor basis, rho+1 the point."""
        out = [(0, self.r0)] + [(i + 1, c) for i, c in enumerate(self.div)] + [(self.rho + 1, self.pt)]
        return [(i, c) for i, c in out if not c.is_zero()]

    def divisor_values(self) -> tuple[Fraction, ...]:
        """The NS coordinates as rationals, for a class with constant coefficients."""
        return tuple(c.constant_value() for c in self.div)


def basis_codim(index: int, rho: int) -> int:
    return 0 if index == 0 else 2 if index == rho + 1 else 1


def basis_element(index: int, rho: int) -> CycleX:
    if index == 0:
        return CycleX.one(rho)
    if index == rho + 1:
        return CycleX.point(rho)
    z = CoeffPoly()
    div = tuple(CoeffPoly.const(1) if i == index - 1 else z for i in range(rho))
    return CycleX(z, div, z)


def mul_X(x: CycleX, y: CycleX, s: SurfaceData) -> CycleX:
    """Graded product on the surface; anything past codimension two vanishes."""
    r0 = x.r0 * y.r0
    div = tuple(x.r0 * b + y.r0 * a for a, b in zip(x.div, y.div))
    pt = x.r0 * y.pt + y.r0 * x.pt + CoeffPoly.coerce(pair(x.div, y.div, s))
    return CycleX(r0, div, pt)

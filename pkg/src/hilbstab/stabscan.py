"""Box scans over the Picard lattice and replays of the rank-2 / rank-3 subsheaf inequalities.

A scan certifies the finite box only.  A certified box is consistent with the absence of
destabilizing line subbundles of F^[2]; it is not a proof over the whole lattice
(:func:`analytic_certificate` covers that for Picard rank one).
"""
from __future__ import annotations

import itertools
import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactmath import AlwaysFrom, NeverEventually, Positivity
from .surface import SurfaceData, pair
from .taut import (
    Excluded,
    ExceptionalCase,
    Exclusion,
    LineClass,
    NotDecided,
    TautSpec,
    Verdict,
    destabilize_verdict,
    exclusion_filter,
)

__all__ = [
    "ScanError",
    "ScanTooLarge",
    "TrivialSheafWarning",
    "ScanBox",
    "ScanRow",
    "ScanResult",
    "scan",
    "recheck",
    "analytic_certificate",
    "Rank3Report",
    "Rank2Report",
    "rank3_subsheaf_check",
    "rank2_subsheaf_check",
]

DEFAULT_CAP = 200_000


class ScanError(ValueError):
    pass


class ScanTooLarge(ScanError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"box has {count} candidates, cap is {cap}")
        self.count = count
        self.cap = cap


class TrivialSheafWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ScanBox:
    coeff_bounds: tuple[tuple[int, int], ...]
    a_bounds: tuple[int, int]
    symmetric_only: bool = True
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        for lo, hi in (*self.coeff_bounds, self.a_bounds):
            if lo > hi:
                raise ScanError(f"empty interval [{lo}, {hi}]")

    @classmethod
    def uniform(cls, rho: int, g: tuple[int, int], a: tuple[int, int], symmetric_only: bool = True, cap: int = DEFAULT_CAP):
        return cls(tuple([tuple(g)] * rho), tuple(a), symmetric_only, cap)

    @property
    def count(self) -> int:
        n_vec = 1
        for lo, hi in self.coeff_bounds:
            n_vec *= hi - lo + 1
        n_a = self.a_bounds[1] - self.a_bounds[0] + 1
        return n_vec * (1 if self.symmetric_only else n_vec) * n_a

    def vectors(self):
        return itertools.product(*(range(lo, hi + 1) for lo, hi in self.coeff_bounds))

    def lines(self):
        vecs = list(self.vectors())
        a_range = range(self.a_bounds[0], self.a_bounds[1] + 1)
        if self.symmetric_only:
            for g in vecs:
                for a in a_range:
                    yield LineClass(g, g, a)
        else:
            for g in vecs:
                for h in vecs:
                    for a in a_range:
                        yield LineClass(g, h, a)

    def describe(self) -> str:
        gb = ",".join(f"{lo}:{hi}" for lo, hi in self.coeff_bounds)
        kind = "symmetric" if self.symmetric_only else "asymmetric"
        return f"g in [{gb}], a in {self.a_bounds[0]}:{self.a_bounds[1]}, {kind}"


@dataclass(frozen=True)
class ScanRow:
    index: int
    line: LineClass
    verdict: Verdict
    exclusion: Exclusion

    @property
    def threshold(self) -> Positivity:
        return self.verdict.threshold

    def render(self) -> str:
        l = self.line
        return (
            f"g={_vec_text(l.g)} h={_vec_text(l.h)} a={l.a} verdict={self.verdict.label} "
            f"exclusion={self.exclusion.label} threshold={_threshold_text(self.threshold)}"
        )

    def to_dict(self) -> dict:
        return {
            "g": [str(x) for x in self.line.g],
            "h": [str(x) for x in self.line.h],
            "a": str(self.line.a),
            "verdict": self.verdict.label,
            "exclusion": self.exclusion.label,
            "threshold": _threshold_text(self.threshold),
            "slope_difference": str(self.verdict.difference),
        }


def _vec_text(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def _threshold_text(p: Positivity) -> str:
    if isinstance(p, AlwaysFrom):
        return str(p.M)
    if isinstance(p, NeverEventually):
        return "never"
    return "-"


@dataclass
class ScanResult:
    surface: SurfaceData
    taut: TautSpec
    box: ScanBox
    rows: list[ScanRow]
    flags: dict = field(default_factory=dict)

    @property
    def summary(self) -> dict[str, int]:
        counts = {"total": len(self.rows), "D": 0, "N": 0, "EXCL": 0, "EXC-CASE": 0, "UNDEC": 0, "D&EXCL": 0, "D&EXC-CASE": 0, "D&UNDEC": 0}
        for row in self.rows:
            counts[row.verdict.label] += 1
            counts[row.exclusion.label] += 1
            if row.verdict.destabilizing:
                counts[f"D&{row.exclusion.label}"] += 1
        return counts

    @property
    def certified(self) -> bool:
        return all(isinstance(r.exclusion, Excluded) for r in self.rows if r.verdict.destabilizing)

    def render(self) -> str:
        t = self.taut
        lines = [
            f"surface: {self.surface.name}",
            f"taut: r={t.r} f=({','.join(str(x) for x in t.f)})",
            f"box: {self.box.describe()}",
            "flags: " + " ".join(f"{k}={v}" for k, v in sorted(self.flags.items())),
        ]
        lines += [row.render() for row in self.rows]
        lines.append("summary: " + " ".join(f"{k}={v}" for k, v in self.summary.items()))
        lines.append(
            "scope: finite box only"
            + ("; consistent with no destabilizing line subbundles on the scanned box" if self.certified else "")
        )
        lines.append(f"certified: {'yes' if self.certified else 'no'}")
        return "\n".join(lines)

    def to_json(self) -> str:
        doc = {
            "surface": self.surface.to_document(),
            "taut": {"r": self.taut.r, "f": [str(x) for x in self.taut.f]},
            "box": {
                "coeff_bounds": [list(b) for b in self.box.coeff_bounds],
                "a_bounds": list(self.box.a_bounds),
                "symmetric_only": self.box.symmetric_only,
            },
            "flags": self.flags,
            "rows": [r.to_dict() for r in self.rows],
            "summary": self.summary,
            "certified": self.certified,
        }
        return json.dumps(doc, indent=2)


def _evaluate(args):
    index, line, t, s = args
    return ScanRow(index, line, destabilize_verdict(line, t, s), exclusion_filter(line, t, s))


def scan(box: ScanBox, t: TautSpec, s: SurfaceData, *, assume_nontrivial: bool = False, workers: int = 1) -> ScanResult:
    """Evaluate every candidate class in ``box`` against the tautological sheaf ``t``.

    ``assume_nontrivial`` declares ``F`` not isomorphic to ``O_X``.  With ``f = 0`` and no
    such declaration the scan still runs but warns, since the no-line-subbundle statement
    fails for ``O_X`` itself.
    """
    if len(box.coeff_bounds) != s.rho:
        raise ScanError(f"box has {len(box.coeff_bounds)} coordinates, surface has rho={s.rho}")
    if box.count > box.cap:
        raise ScanTooLarge(box.count, box.cap)
    if not any(t.f) and not assume_nontrivial:
        warnings.warn(
            "f = 0 and F is not declared nontrivial: the no-destabilizing-line-subbundle "
            "statement does not apply (O_X^[2] contains O of the Hilbert square)",
            TrivialSheafWarning,
            stacklevel=2,
        )
    jobs = [(i, line, t, s) for i, line in enumerate(box.lines())]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate, jobs, chunksize=64))
    else:
        rows = [_evaluate(j) for j in jobs]
    rows.sort(key=lambda r: r.index)

    if assume_nontrivial:
        for row in rows:
            if row.line.symmetric and row.verdict.destabilizing and isinstance(row.exclusion, NotDecided):
                raise AssertionError(f"symmetric destabilizing class escaped the exclusion bound: {row.render()}")

    flags = {"symmetric_only": box.symmetric_only, "assume_nontrivial": assume_nontrivial}
    return ScanResult(s, t, box, rows, flags)


def recheck(result: ScanResult) -> bool:
    """Independent pass: recompute every row from the raw inequalities and compare."""
    s, t = result.surface, result.taut
    H = s.H
    hf = pair(H, t.f, s)
    for row in result.rows:
        l = row.line
        lhs = t.r * (pair(H, l.g, s) + pair(H, l.h, s))
        if lhs > hf:
            destab = True
        elif lhs == hf:
            destab = l.a >= 0 if l.a.denominator == 1 else 2 * l.a > -1
        else:
            destab = False
        if destab != row.verdict.destabilizing:
            return False
        if lhs >= hf:
            label = "EXC-CASE" if (t.r == 1 and not any(l.h) and l.g == t.f) else "EXCL"
        else:
            label = "UNDEC"
        if label != row.exclusion.label:
            return False
    certified = all(r.exclusion.label == "EXCL" for r in result.rows if r.verdict.destabilizing)
    return certified == result.certified


@dataclass(frozen=True)
class AnalyticCertificate:
    certified: bool
    h_basis: Fraction  # H.b for the generator b of NS
    destabilizing_from: str  # description of the destabilizing half-line
    note: str


def analytic_certificate(t: TautSpec, s: SurfaceData) -> AnalyticCertificate:
    """Picard rank one: decide every symmetric class ``(k b, k b, a)``, ``k, a`` in Z, at once.

    Both conditions are linear in ``k``: destabilizing needs ``2 r k (H.b) >= H.f`` and the
    exclusion bound is exactly ``2 r k (H.b) >= H.f``, so every destabilizing class is
    excluded except ``k = 0`` when ``r = 1`` and ``f = 0``.
    """
    if s.rho != 1:
        raise ScanError("analytic mode needs Picard rank one")
    hb = pair(s.H, (Fraction(1),), s)
    hf = pair(s.H, t.f, s)
    slope_k = 2 * t.r * hb  # coefficient of k in r H.(g+h)
    if slope_k > 0:
        region = f"k >= {hf / slope_k} (strict unless equality with a >= 0)"
    else:
        region = f"k <= {hf / slope_k} (strict unless equality with a >= 0)"
    exceptional = t.r == 1 and not any(t.f)
    note = (
        "exceptional class (0,0,a>=0) is destabilizing and not excluded"
        if exceptional
        else "every destabilizing symmetric class satisfies the exclusion bound"
    )
    return AnalyticCertificate(not exceptional, hb, region, note)


# --- rank 3 and rank 2 subsheaves of pi^* F^[2] for rank-two F ----------------------


@dataclass(frozen=True)
class Rank3Report:
    e: tuple[Fraction, ...]
    a: Fraction
    h_e: Fraction
    h_f: Fraction
    destabilizing: bool  # 4 H.e >= 3 H.f
    implied_lhs: Fraction | None  # 2 H.(e - f)
    implied_rhs: Fraction | None  # -H.f / 2
    quotient_line: LineClass | None
    exclusion: Exclusion | None

    @property
    def excluded(self) -> bool:
        return isinstance(self.exclusion, Excluded)


def _require_rank_two(t: TautSpec) -> None:
    if t.r != 2:
        raise ValueError(f"the subsheaf replays need rank-two F, got r={t.r}")


def rank3_subsheaf_check(e: Sequence, a, t: TautSpec, s: SurfaceData) -> Rank3Report:
    """Rank-three destabilizing subsheaf with ``c_1 = e (x) 1 + 1 (x) e + a D``.

    Destabilizing forces ``4 H.e >= 3 H.f``, hence ``2 H.(e - f) >= -H.f / 2``; the dual of the
    quotient is then the line class ``(e - f, e - f, 4 + a)`` inside the dual tautological
    sheaf, which the exclusion bound for ``(2, -f)`` rules out.
    """
    _require_rank_two(t)
    e = tuple(Fraction(x) for x in e)
    a = Fraction(a)
    he = pair(s.H, e, s)
    hf = pair(s.H, t.f, s)
    if 4 * he < 3 * hf:
        return Rank3Report(e, a, he, hf, False, None, None, None, None)
    ef = tuple(x - y for x, y in zip(e, t.f))
    implied_lhs = 2 * pair(s.H, ef, s)
    implied_rhs = -hf / 2
    assert implied_lhs >= implied_rhs, "4 H.e >= 3 H.f must imply 2 H.(e-f) >= -H.f/2"
    q = LineClass(ef, ef, 4 + a)
    return Rank3Report(e, a, he, hf, True, implied_lhs, implied_rhs, q, exclusion_filter(q, t.dual(), s))


@dataclass(frozen=True)
class Rank2Report:
    e: tuple[Fraction, ...]
    h_e: Fraction
    h_f: Fraction
    destabilizing: bool  # 2 H.e >= H.f
    image_bound: Fraction | None  # any rank-one image (g,h,b) has H.(g+h) >= this
    image_excluded: bool
    # kernel-free branch: effectivity of -e and f - e, necessary conditions only
    h_minus_e_positive: bool
    h_f_minus_e_nonnegative: bool
    case_a: str  # "contradiction" | "inconclusive" | "not-triggered"

    def render(self) -> str:
        lines = [
            f"H.e = {self.h_e}, H.f = {self.h_f}",
            f"destabilizing (2H.e >= H.f): {self.destabilizing}",
        ]
        if self.destabilizing:
            lines.append(
                f"rank-one image classes have H.(g+h) >= {self.image_bound}, so 2H.(g+h) >= H.f: "
                + ("excluded" if self.image_excluded else "not excluded")
            )
        lines.append(
            f"kernel-free branch (necessary conditions only): H.(-e) > 0 is {self.h_minus_e_positive}, "
            f"H.(f-e) >= 0 is {self.h_f_minus_e_nonnegative}; {self.case_a}"
        )
        return "\n".join(lines)


def rank2_subsheaf_check(e: Sequence, t: TautSpec, s: SurfaceData) -> Rank2Report:
    """Rank-two destabilizing subsheaf with ``c_1 = e (x) 1 + 1 (x) e + a D``."""
    _require_rank_two(t)
    e = tuple(Fraction(x) for x in e)
    he = pair(s.H, e, s)
    hf = pair(s.H, t.f, s)
    destab = 2 * he >= hf
    neg_e = -he > 0
    f_minus_e = hf - he >= 0
    if not destab:
        case_a = "not-triggered"
        image_bound, image_excluded = None, False
    else:
        image_bound = he
        # 2 H.(g+h) >= 2 H.e >= H.f, i.e. r H.(g+h) >= H.f with r = 2: no exceptional case
        image_excluded = t.r * image_bound >= hf
        if hf > 0:
            case_a = "contradiction"
            assert not neg_e, "H.e >= H.f/2 > 0 cannot coexist with H.(-e) > 0"
        else:
            case_a = "inconclusive (H.f <= 0)"
    return Rank2Report(e, he, hf, destab, image_bound, image_excluded, neg_e, f_minus_e, case_a)

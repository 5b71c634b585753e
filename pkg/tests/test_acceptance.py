"""End-to-end acceptance checks; every comparison is exact.

Each check records one PASS/FAIL line, printed at the end of the pytest run
(and directly when this file is executed as a script).
"""
from __future__ import annotations

import random
import time
from fractions import Fraction

import sympy as sp

from hilbstab.chow import CycleBlowup, CycleProduct, D_class, diag, diagonal_pullback, integrate, mul_blowup
from hilbstab.cyclelang import ParseError, evaluate, format_cycle, parse
from hilbstab.exactmath import AlwaysFrom, CoeffPoly, eventually_positive
from hilbstab.identities import identity_checks
from hilbstab.stabscan import ScanBox, rank2_subsheaf_check, rank3_subsheaf_check, recheck, scan
from hilbstab.surface import CycleX, mul_X, pair, preset
from hilbstab.taut import (
    LineClass,
    TautSpec,
    destabilize_verdict,
    hn_cubed,
    hn_cubed_terms,
    slope,
    slope_line_closed,
    slope_taut_closed,
    taut_c1,
)
from oracles import line_slope_without_canonical_terms, taut_slope_without_canonical_terms, to_sympy

RESULTS: list[str] = []
K_TRIVIAL = ["k3", "k3:1", "k3:3", "k3_rho2"]
ALL = K_TRIVIAL + ["elliptic", "quintic"]
CUBE = "(box(N*H,1)+box(1,N*H)-D)^3"


def record(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"acceptance {number}/9 {title}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
    RESULTS.append(line)
    print(line)
    assert ok, line


def rand_vec(rng, rho, bound=5):
    return tuple(rng.randint(-bound, bound) for _ in range(rho))


# --- 1 ----------------------------------------------------------------------------

RING_IDENTITIES = [
    "push_xi_is_diag",
    "self_intersection",
    "exc_times_box",
    "exc_times_exc",
    "restrict_D",
    "D_squared",
    "diag_squared",
    "diagonal_pullback_squared",
]


def test_ring_identity_suite():
    failures, counted = [], 0
    for name in ("k3", "elliptic"):
        s = preset(name)
        checks = identity_checks(s)
        for ident in RING_IDENTITIES:
            rng = random.Random(f"acceptance:{name}:{ident}")
            bad = sum(0 if checks[ident](rng) else 1 for _ in range(100))
            counted += 100
            if bad:
                failures.append(f"{name}:{ident}:{bad}")
    # K^2 != 0: the formal square of diag(1) is off by exactly K^2, the true diagonal is not
    q = preset("quintic")
    one = CycleX.one(q.rho)
    formal = integrate(mul_blowup(diag(one), diag(one), q))
    true_delta = diagonal_pullback(one, q)
    side = formal == q.c2 - q.K_squared and integrate(mul_blowup(true_delta, true_delta, q)) == q.c2
    record(1, "ring identities", not failures and side, f"{counted} random checks on k3 and elliptic; failures={failures}")


# --- 2 ----------------------------------------------------------------------------


def n_power_part(c: CycleBlowup, k: int) -> CycleBlowup:
    """Keep only the ``N^k`` part of every coefficient."""

    def pick(p: CoeffPoly) -> CoeffPoly:
        return CoeffPoly.N() ** k * p.coeff(k)

    def pick_x(x: CycleX) -> CycleX:
        return CycleX(pick(x.r0), tuple(pick(v) for v in x.div), pick(x.pt))

    kun = CycleProduct(c.rho, {key: pick(v) for key, v in c.kunneth.terms})
    return CycleBlowup(kun, pick_x(c.exc), pick_x(c.diag))


def test_cube_of_hn():
    ok, notes = True, []
    for name in ALL:
        s = preset(name)
        cube = hn_cubed(s)
        terms = hn_cubed_terms(s)
        for k, term in zip((3, 2, 1, 0), terms):
            if n_power_part(cube, k) != term:
                ok = False
                notes.append(f"{name}: N^{k} term")
        if evaluate(CUBE, s) != cube:
            ok = False
            notes.append(f"{name}: DSL cube")
    record(2, "H_N cube four-term expansion", ok, "; ".join(notes) or f"{len(ALL)} surfaces")


# --- 3 ----------------------------------------------------------------------------


def test_slope_oracle_equivalence():
    rng = random.Random("acceptance:slopes")
    bad = []
    n_lines = n_taut = 0
    for i in range(240):
        s = preset(K_TRIVIAL[i % len(K_TRIVIAL)])
        g, h, a = rand_vec(rng, s.rho), rand_vec(rng, s.rho), rng.randint(-6, 6)
        l = LineClass(g, h, a)
        ring = slope(l.c1(), 1, s).slope
        if to_sympy(ring) != line_slope_without_canonical_terms(g, h, a, 1, s) or ring != slope_line_closed(l, 1, s):
            bad.append(("line", s.name, g, h, a))
        n_lines += 1
    for i in range(60):
        s = preset(K_TRIVIAL[i % len(K_TRIVIAL)])
        t = TautSpec(rng.randint(1, 6), rand_vec(rng, s.rho))
        ring = slope(taut_c1(t), t.taut_rank, s).slope
        specialized = slope_line_closed(LineClass(t.f, t.f, -t.r), 2 * t.r, s)
        if not (to_sympy(ring) == taut_slope_without_canonical_terms(t.r, t.f, s) == to_sympy(specialized)):
            bad.append(("taut", s.name, t))
        # the linear coefficient carries a minus sign
        if ring.coeff(1) != -6 * pair(s.H, t.f, s) / t.r:
            bad.append(("sign", s.name, t))
        n_taut += 1
    # with K nonzero the ring agrees with the closed forms carrying the canonical terms
    for name in ("elliptic", "quintic"):
        s = preset(name)
        for _ in range(30):
            l = LineClass(rand_vec(rng, s.rho), rand_vec(rng, s.rho), rng.randint(-6, 6))
            if slope(l.c1(), 1, s).slope != slope_line_closed(l, 1, s):
                bad.append(("line-K", name, l))
            t = TautSpec(rng.randint(1, 6), rand_vec(rng, s.rho))
            if slope(taut_c1(t), t.taut_rank, s).slope != slope_taut_closed(t, s):
                bad.append(("taut-K", name, t))
    record(3, "slope oracle equivalence", not bad, f"{n_lines} line classes, {n_taut} tautological sheaves; mismatches={bad[:3]}")


# --- 4 ----------------------------------------------------------------------------


def test_structure_sheaf_counterexample():
    s = preset("k3")
    t = TautSpec(1, (0,))
    taut_slope = slope_taut_closed(t, s)
    v = destabilize_verdict(LineClass((0,), (0,), 0), t, s)
    line_slope = slope_line_closed(LineClass((0,), (0,), 0), 1, s)
    ok = (
        taut_slope == CoeffPoly.parse("-24*N^2 + 12")
        and line_slope.is_zero()
        and v.destabilizing
        and not v.strict
        and v.threshold == AlwaysFrom(1)
        and all(line_slope(n) >= taut_slope(n) for n in range(1, 200))
    )
    record(4, "trivial bundle destabilizes its tautological sheaf", ok, f"slope = {taut_slope}, threshold {v.threshold}")


# --- 5 ----------------------------------------------------------------------------


def test_scan_certificate():
    s = preset("k3")
    start = time.perf_counter()
    result = scan(ScanBox.uniform(1, (-5, 5), (-5, 5)), TautSpec(1, s.H), s, assume_nontrivial=True)
    elapsed = time.perf_counter() - start
    d_rows = [r for r in result.rows if r.verdict.destabilizing]
    ok = (
        result.certified
        and all(r.exclusion.label == "EXCL" for r in d_rows)
        and not any(r.exclusion.label == "EXC-CASE" for r in result.rows)
        and recheck(result)
        and elapsed < 5
    )
    record(5, "symmetric box scan certified", ok, f"{len(result.rows)} rows, {len(d_rows)} destabilizing, {elapsed:.2f}s")


# --- 6 ----------------------------------------------------------------------------


def test_subsheaf_inequalities():
    rng = random.Random("acceptance:rank3")
    triggered = 0
    ok = True
    for i in range(120):
        s = preset(ALL[i % len(ALL)])
        e, f = rand_vec(rng, s.rho, 6), rand_vec(rng, s.rho, 6)
        rep = rank3_subsheaf_check(e, rng.randint(-5, 5), TautSpec(2, f), s)
        if rep.destabilizing:
            triggered += 1
            ok &= rep.implied_lhs >= rep.implied_rhs and rep.excluded
    k3 = preset("k3")
    t = TautSpec(2, k3.H)
    fires = rank2_subsheaf_check(k3.H, t, k3)
    quiet = rank2_subsheaf_check((0,), t, k3)
    neg = rank2_subsheaf_check((-1,), t, k3)
    ok &= fires.destabilizing and fires.image_excluded and (2 * fires.h_e, fires.h_f) == (8, 4)
    ok &= not quiet.destabilizing
    ok &= not neg.destabilizing and neg.h_minus_e_positive and -neg.h_e == 4
    record(6, "rank-3 and rank-2 subsheaf replays", bool(ok), f"120 random (e,f), {triggered} in the destabilizing branch")


# --- 7 ----------------------------------------------------------------------------


def test_fourth_power_of_D():
    ok, notes = True, []
    for name in K_TRIVIAL + ["elliptic"]:
        s = preset(name)
        D = D_class(s.rho)
        one = CycleX.one(s.rho)
        D2 = mul_blowup(D, D, s)
        step_b = D2 == -diag(one)
        D4 = mul_blowup(D2, D2, s)
        step_c = D4 == mul_blowup(diag(one), diag(one), s) == diag(CycleX.point(s.rho, s.c2))
        value = integrate(D4)
        ok &= step_b and step_c and value == s.c2
        notes.append(f"{name}={value}")
    q = preset("quintic")
    D4q = integrate(mul_blowup(mul_blowup(D_class(1), D_class(1), q), mul_blowup(D_class(1), D_class(1), q), q))
    ok &= D4q == q.c2 - q.K_squared
    notes.append(f"quintic={D4q} (c2 - K^2)")
    record(7, "degree of D^4", bool(ok), ", ".join(notes))


# --- 8 ----------------------------------------------------------------------------


def test_threshold_soundness():
    rng = random.Random("acceptance:thresholds")
    checked, ok = 0, True
    while checked < 100:
        s = preset(ALL[checked % len(ALL)])
        l = LineClass(rand_vec(rng, s.rho), rand_vec(rng, s.rho), rng.randint(-8, 8))
        t = TautSpec(rng.randint(1, 4), rand_vec(rng, s.rho))
        v = destabilize_verdict(l, t, s)
        if not v.strict:
            continue
        p = v.difference if v.destabilizing else -v.difference
        res = eventually_positive(p)
        ok &= isinstance(res, AlwaysFrom) and res == v.threshold
        if isinstance(res, AlwaysFrom):
            ok &= p(res.M) > 0 and all(p(n) > 0 for n in range(res.M, res.M + 51))
            ok &= res.M == 1 or p(res.M - 1) <= 0
        checked += 1
    record(8, "threshold soundness", bool(ok), f"{checked} strict pairs")


# --- 9 ----------------------------------------------------------------------------


def random_surface_expr(rng, names, depth):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(["1", "pt", "N", f"{rng.randint(0, 4)}/{rng.randint(1, 3)}", *names])
    a, b = random_surface_expr(rng, names, depth - 1), random_surface_expr(rng, names, depth - 1)
    return rng.choice([f"{a} + {b}", f"{a} - {b}", f"({a})*({b})", f"-({a})", f"({a})^{rng.randint(0, 2)}"])


def random_expr(rng, names, depth):
    if depth == 0 or rng.random() < 0.25:
        kind = rng.randrange(6)
        sx = lambda: random_surface_expr(rng, names, 2)  # noqa: E731
        return [
            lambda: "D",
            lambda: "N",
            lambda: str(rng.randint(0, 5)),
            lambda: f"box({sx()},{sx()})",
            lambda: f"exc({sx()})",
            lambda: f"diag({sx()})",
        ][kind]()
    a, b = random_expr(rng, names, depth - 1), random_expr(rng, names, depth - 1)
    return rng.choice([f"{a} + {b}", f"{a} - {b}", f"({a})*({b})", f"-({a})", f"({a})^{rng.randint(0, 3)}"])


def test_parser():
    rng = random.Random("acceptance:parser")
    ok = True
    for i in range(50):
        s = preset(ALL[i % len(ALL)])
        text = random_expr(rng, s.known_names(), 3)
        value = evaluate(text, s)
        ok &= evaluate(format_cycle(value, s), s) == value
    k3 = preset("k3")
    ok &= evaluate("D^2", k3) == -diag(CycleX.one(1)) and format_cycle(evaluate("D^2", k3), k3) == "- diag(1)"
    ok &= evaluate(CUBE, k3) == hn_cubed(k3)
    ok &= integrate(evaluate("box(pt,pt)", k3)) == 1
    columns = []
    for text in ("box(exc(H),1)", "D^^2", "box(H,1) box(1,H)"):
        try:
            parse(text)
            columns.append(None)
        except ParseError as err:
            columns.append(err.column)
    ok &= columns == [5, 3, 10]
    record(9, "expression language", bool(ok), f"50 round trips, error columns {columns}")


if __name__ == "__main__":
    for fn in [
        test_ring_identity_suite,
        test_cube_of_hn,
        test_slope_oracle_equivalence,
        test_structure_sheaf_counterexample,
        test_scan_certificate,
        test_subsheaf_inequalities,
        test_fourth_power_of_D,
        test_threshold_soundness,
        test_parser,
    ]:
        try:
            fn()
        except AssertionError:
            pass

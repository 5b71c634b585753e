"""Randomized checks of the basic blow-up identities, shared by the CLI and the test suite."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .chow import (
    CycleBlowup,
    CycleD,
    D_class,
    box,
    diag,
    diagonal_pullback,
    exc,
    integrate,
    mul_blowup,
    mul_D,
    pull_i,
    push_i,
)
from .exactmath import CoeffPoly
from .surface import CycleX, SurfaceData, mul_X


def random_poly(rng: random.Random, max_degree: int = 1, bound: int = 4) -> CoeffPoly:
    deg = rng.randint(0, max_degree)
    return CoeffPoly(Fraction(rng.randint(-bound, bound), rng.choice((1, 1, 1, 2, 3))) for _ in range(deg + 1))


def random_cycle_x(rng: random.Random, rho: int, max_degree: int = 1) -> CycleX:
    return CycleX(
        random_poly(rng, max_degree),
        tuple(random_poly(rng, max_degree) for _ in range(rho)),
        random_poly(rng, max_degree),
    )


def random_cycle_d(rng: random.Random, rho: int) -> CycleD:
    return CycleD(random_cycle_x(rng, rho), random_cycle_x(rng, rho))


def random_cycle_blowup(rng: random.Random, rho: int) -> CycleBlowup:
    total = CycleBlowup.zero(rho)
    for _ in range(rng.randint(1, 3)):
        total = total + box(random_cycle_x(rng, rho), random_cycle_x(rng, rho))
    return total + exc(random_cycle_x(rng, rho)) + diag(random_cycle_x(rng, rho))


@dataclass(frozen=True)
class IdentityResult:
    name: str
    surface: str
    trials: int
    failures: int
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def render(self) -> str:
        status = "ok" if self.ok else "FAIL"
        tail = f"  ({self.note})" if self.note else ""
        return f"{self.surface:>12}  {self.name:<28} {self.trials:>4} trials  {status}{tail}"


def identity_checks(s: SurfaceData) -> dict[str, Callable[[random.Random], bool]]:
    """Named identities; each callable draws random inputs and reports whether the identity held."""
    rho = s.rho
    one = CycleX.one(rho)
    xi = CycleD.xi(rho)
    D = D_class(rho)

    def push_xi(rng):
        a = random_cycle_x(rng, rho)
        return push_i(CycleD(CycleX.zero(rho), a)) == diag(a)

    def self_intersection(rng):
        lam = random_cycle_d(rng, rho)
        return pull_i(push_i(lam), s) == mul_D(-xi, lam, s)

    def exc_times_box(rng):
        a, b, c = (random_cycle_x(rng, rho) for _ in range(3))
        return mul_blowup(exc(a), box(b, c), s) == exc(mul_X(mul_X(a, b, s), c, s))

    def exc_times_exc(rng):
        a, b = random_cycle_x(rng, rho), random_cycle_x(rng, rho)
        return mul_blowup(exc(a), exc(b), s) == -diag(mul_X(a, b, s))

    def restrict_D(rng):
        c = random_poly(rng)
        return pull_i(D.scale(c), s) == CycleD(CycleX.zero(rho), CycleX.scalar(rho, -c))

    def D_squared(rng):
        c = random_poly(rng)
        return mul_blowup(D.scale(c), D, s) == diag(one).scale(-c)

    def diag_squared(rng):
        c = random_poly(rng)
        lhs = mul_blowup(diag(one).scale(c), diag(one), s)
        return lhs == diag(CycleX.point(rho, s.c2)).scale(c)

    def diagonal_pullback_squared(rng):
        a, b = random_cycle_x(rng, rho), random_cycle_x(rng, rho)
        lhs = mul_blowup(diagonal_pullback(a, s), diagonal_pullback(b, s), s)
        c2ab = mul_X(CycleX.point(rho, s.c2), mul_X(a, b, s), s)
        return lhs == diagonal_pullback(c2ab, s)

    def D_fourth(rng):
        D2 = mul_blowup(D, D, s)
        return integrate(mul_blowup(D2, D2, s)) == s.c2 - s.K_squared

    return {
        "push_xi_is_diag": push_xi,
        "self_intersection": self_intersection,
        "exc_times_box": exc_times_box,
        "exc_times_exc": exc_times_exc,
        "restrict_D": restrict_D,
        "D_squared": D_squared,
        "diag_squared": diag_squared,
        "diagonal_pullback_squared": diagonal_pullback_squared,
        "D_fourth_degree": D_fourth,
    }


def ring_axiom_checks(s: SurfaceData) -> dict[str, Callable[[random.Random], bool]]:
    rho = s.rho

    def commutative(rng):
        u, v = random_cycle_blowup(rng, rho), random_cycle_blowup(rng, rho)
        return mul_blowup(u, v, s) == mul_blowup(v, u, s)

    def associative(rng):
        u, v, w = (random_cycle_blowup(rng, rho) for _ in range(3))
        return mul_blowup(mul_blowup(u, v, s), w, s) == mul_blowup(u, mul_blowup(v, w, s), s)

    def distributive(rng):
        u, v, w = (random_cycle_blowup(rng, rho) for _ in range(3))
        return mul_blowup(u, v + w, s) == mul_blowup(u, v, s) + mul_blowup(u, w, s)

    def restriction_multiplicative(rng):
        u, v = random_cycle_blowup(rng, rho), random_cycle_blowup(rng, rho)
        return pull_i(mul_blowup(u, v, s), s) == mul_D(pull_i(u, s), pull_i(v, s), s)

    return {
        "commutative": commutative,
        "associative": associative,
        "distributive": distributive,
        "restriction_multiplicative": restriction_multiplicative,
    }


def run_checks(
    s: SurfaceData, checks: dict[str, Callable[[random.Random], bool]], trials: int = 100, seed: int = 0
) -> list[IdentityResult]:
    results = []
    for name, fn in checks.items():
        rng = random.Random(f"{seed}:{s.name}:{name}")
        failures = sum(0 if fn(rng) else 1 for _ in range(trials))
        note = ""
        if name == "diag_squared" and s.K_squared != 0:
            note = f"needs K^2 = 0; here K^2 = {s.K_squared}, use diagonal_pullback_squared"
        results.append(IdentityResult(name, s.name, trials, failures, note))
    return results


def run_identity_suite(
    s: SurfaceData, trials: int = 100, seed: int = 0, axiom_trials: int = 20
) -> list[IdentityResult]:
    out = run_checks(s, identity_checks(s), trials, seed)
    if axiom_trials:
        out += run_checks(s, ring_axiom_checks(s), axiom_trials, seed)
    return out

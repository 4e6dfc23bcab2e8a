"""Seeded verification suites, shared by the CLI and the acceptance tests.

Each suite runs a deterministic sweep (given its seed) and returns a
``SuiteResult`` with pass/fail counts and failure descriptions; nothing
here raises on a mathematical failure.  Time is deliberately excluded
from results so repeated runs with one seed produce identical reports.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .adeles import (
    Adele,
    BasicOpen,
    ClassicalAdele,
    CylinderBall,
    cantor_adele,
    cantor_truncations,
    conorm,
    conorm_adele,
    contains,
    densify,
    in_conorm_image,
    is_cauchy,
    limit_local,
    neighborhood_base,
)
from .cyclotomic import CycloElement, GaloisElement, Tower, apply_automorphism, unit_group
from .localfield import (
    ball_arithmetic_check,
    berlekamp_factor_count,
    cached_context,
    count_cyclotomic_factors,
    from_integer,
    localize,
)
from .places import (
    act_on_place,
    find_splitting_extension,
    local_degree,
    places_above,
)
from .polys import euler_phi
from .transition import CyclotomicTowerView, build_transition, verify_td

SUITE_TOWERS = ("1,5", "1,8,24", "1,11,121", "1,5,20,60")
SUITE_PRIMES = (2, 3, 7, 11, 13)


@dataclass
class SuiteResult:
    name: str
    checks: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures

    def lines(self) -> list[str]:
        status = "pass" if self.ok else "FAIL"
        out = [f"[{status}] {self.name}: {self.checks} checks, {len(self.failures)} failures"]
        out.extend(f"    {f}" for f in self.failures[:10])
        return out


def _rng(name: str, seed: int) -> random.Random:
    return random.Random(f"{name}:{seed}")


def _random_cyclo(n: int, rng: random.Random, denominators: tuple[int, ...] = ()) -> CycloElement:
    phi = euler_phi(n)
    coeffs = []
    for _ in range(phi):
        num = rng.randint(-4, 4)
        den = rng.choice(denominators) if denominators and rng.random() < 0.3 else 1
        coeffs.append(Fraction(num, den))
    return CycloElement(n, tuple(coeffs))


def _random_classical(tower: Tower, level: int, rng: random.Random) -> ClassicalAdele:
    n = tower.conductors[level]
    pool = [p for p in (2, 3, 5, 7, 11, 13)]
    primes = rng.sample(pool, rng.randint(1, 2))
    entries = {}
    for p in primes:
        pls = places_above(n, p)
        chosen = rng.sample(pls, rng.randint(1, len(pls)))
        for w in chosen:
            entries[w] = _random_cyclo(n, rng, tuple(primes))
    den = rng.choice(primes)
    default_num = rng.randint(-6, 6)
    default = CycloElement.from_rational(
        n, Fraction(default_num, den if rng.random() < 0.5 else 1)
    )
    return ClassicalAdele(tower, level, entries, default)


# --------------------------------------------------------------------------


def suite_td(seed: int = 0) -> SuiteResult:
    """Build and exhaustively verify transition tables over the suite
    towers and primes (ramified primes included: the build is group
    theory only)."""
    failures = []
    checks = 0
    for spec in SUITE_TOWERS:
        tower = Tower.parse(spec)
        view = CyclotomicTowerView(tower)
        for p in SUITE_PRIMES:
            v = places_above(1, p)[0]
            for tie in ("least", "greatest"):
                checks += 1
                td = build_transition(view, v, tower.depth, tie)
                report = verify_td(td)
                if not report.ok:
                    failures.append(f"{spec} p={p} tie={tie}: {report.failures[0]}")
                td2 = build_transition(view, v, tower.depth, tie)
                if td2.table != td.table:
                    failures.append(f"{spec} p={p} tie={tie}: rebuild differs")
    return SuiteResult("td", checks, tuple(failures))


def suite_places(seed: int = 0) -> SuiteResult:
    """Coset place counts against the polynomial factor-count oracle for
    all conductors up to 200 and unramified primes up to 50, plus the
    local-degree sum and a linear-algebra cross-check on small cases."""
    failures = []
    checks = 0
    primes = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)
    for n in range(1, 201):
        for p in primes:
            if n % p == 0:
                continue
            checks += 1
            combinatorial = len(places_above(n, p))
            oracle = count_cyclotomic_factors(n, p)
            if combinatorial != oracle:
                failures.append(f"n={n} p={p}: {combinatorial} cosets vs {oracle} factors")
                continue
            f = local_degree(n, p)
            if combinatorial * f != euler_phi(n):
                failures.append(f"n={n} p={p}: sum of local degrees misses phi")
            if euler_phi(n) <= 64 and berlekamp_factor_count(n, p) != oracle:
                failures.append(f"n={n} p={p}: fixed-space dimension disagrees")
    return SuiteResult("places", checks, tuple(failures))


def suite_ring(seed: int = 0) -> SuiteResult:
    """Randomized exact ring laws on the locally constant layer."""
    rng = _rng("ring", seed)
    failures = []
    checks = 0
    plan = [("1,5", 70), ("1,8,24", 70), ("1,5,20,60", 70), ("1,11,121", 12)]
    for spec, triples in plan:
        tower = Tower.parse(spec)
        for _ in range(triples):
            level = rng.randint(0, tower.depth)
            a = conorm_adele(_random_classical(tower, level, rng))
            b = conorm_adele(_random_classical(tower, rng.randint(0, tower.depth), rng))
            c = conorm_adele(_random_classical(tower, rng.randint(0, tower.depth), rng))
            checks += 1
            if (a + b) + c != a + (b + c):
                failures.append(f"{spec}: addition not associative")
            if a + b != b + a or a * b != b * a:
                failures.append(f"{spec}: commutativity fails")
            if a * (b + c) != a * b + a * c:
                failures.append(f"{spec}: distributivity fails")
            if (a * b) * c != a * (b * c):
                failures.append(f"{spec}: multiplication not associative")
            zero = Adele.zero(tower)
            if a + zero != a or a - a != zero.refine_to(a.depth):
                failures.append(f"{spec}: additive identity fails")
    return SuiteResult("ring", checks, tuple(failures))


def suite_conorm(seed: int = 0) -> SuiteResult:
    """Conorm functoriality: tower composition is bit-exact and the
    classical witness round-trips through the locally constant layer."""
    rng = _rng("conorm", seed)
    failures = []
    checks = 0
    for spec in ("1,5,20", "1,11,121", "1,5,20,60"):
        tower = Tower.parse(spec)
        for _ in range(100):
            checks += 1
            i = rng.randint(0, tower.depth - 1)
            c = _random_classical(tower, i, rng)
            j = rng.randint(i, tower.depth)
            via = conorm_adele(conorm(c, j))
            direct = conorm_adele(c)
            if via != direct:
                failures.append(f"{spec}: composition differs at levels {i}->{j}")
                continue
            k = rng.randint(j, tower.depth)
            if conorm(conorm(c, j), k).entries != conorm(c, k).entries:
                failures.append(f"{spec}: classical composition differs {i}->{j}->{k}")
            ok, witness = in_conorm_image(direct, i)
            if not ok or conorm_adele(witness) != direct:
                failures.append(f"{spec}: witness round trip fails at level {i}")
    return SuiteResult("conorm", checks, tuple(failures))


def suite_isometry(seed: int = 0) -> SuiteResult:
    """Galois action moves places isometrically: valuations are preserved
    when the element and the place are moved together (precision 8)."""
    rng = _rng("isometry", seed)
    failures = []
    checks = 0
    plan = [(5, (2, 3, 7, 11, 13), 44), (20, (3, 7, 11, 13), 40), (121, (3, 7), 70)]
    for n, primes, count in plan:
        units = unit_group(n)
        for p in primes:
            ctx = cached_context(p, n, 8)
            pls = places_above(n, p)
            for _ in range(count):
                checks += 1
                alpha = _random_cyclo(n, rng, (p,))
                if alpha.is_zero():
                    alpha = CycloElement.one(n)
                sigma = rng.choice(units)
                y = rng.choice(pls)
                lhs = localize(apply_automorphism(sigma, alpha), ctx, act_on_place(sigma, y)).valuation()
                rhs = localize(alpha, ctx, y).valuation()
                if lhs != rhs:
                    failures.append(f"n={n} p={p} sigma={sigma.unit} y={y.coset_rep}: {lhs} vs {rhs}")
    return SuiteResult("isometry", checks, tuple(failures))


def suite_density(seed: int = 0) -> SuiteResult:
    """Classical witnesses inside arbitrary certified neighborhoods: the
    densified conorm must land back in the open set."""
    rng = _rng("density", seed)
    failures = []
    checks = 0
    for spec, count in (("1,5", 34), ("1,11,121", 33), ("1,5,20,60", 33)):
        tower = Tower.parse(spec)
        n_top = tower.top
        for _ in range(count):
            checks += 1
            kind = rng.random()
            can_cantor = n_top % 3 != 0 and len(places_above(n_top, 3)) > 1
            if kind < 0.7:
                a = conorm_adele(_random_classical(tower, rng.randint(0, tower.depth), rng))
            elif kind < 0.85 and can_cantor:
                a = cantor_adele(tower, 3)
            else:
                a = Adele.zero(tower)
            finite = {}
            for p in sorted(a.support) or [rng.choice([q for q in (3, 7) if n_top % q])]:
                k = rng.randint(0, 3)
                balls = []
                for y in places_above(n_top, p):
                    center = a.value_at(p, y)
                    if n_top % p != 0 and rng.random() < 0.4:
                        # shift the center inside the ball: membership stays
                        center = center + CycloElement.zeta(n_top, rng.randrange(n_top)).scale(
                            Fraction(p ** (k + 1))
                        )
                    balls.append(CylinderBall(y, center, k))
                finite[p] = tuple(balls)
            U = BasicOpen(tower, finite, a.default, Fraction(rng.randint(1, 3), 2))
            if contains(U, a) is not True:
                failures.append(f"{spec}: constructed U does not certify membership")
                continue
            level, witness = densify(a, U)
            if contains(U, conorm_adele(witness)) is not True:
                failures.append(f"{spec}: densified witness (level {level}) escapes U")
    return SuiteResult("density", checks, tuple(failures))


def suite_counterexample(seed: int = 0) -> SuiteResult:
    """The digit-map adele on (1,11,121) above 3: injective on places,
    outside every proper conorm image, Cauchy truncations, local limit."""
    failures = []
    checks = 0
    tower = Tower.parse("1,11,121")
    a = cantor_adele(tower, 3, 2)

    checks += 1
    values = [v.as_rational() for v in a.slices[3].values()]
    if len(set(values)) != 22:
        failures.append("digit map is not injective on the 22 places")
    if not all(0 <= v < 3**5 and v.denominator == 1 for v in values):
        failures.append("digit values leave the stated integer range")

    checks += 1
    ok1, _ = in_conorm_image(a, 1)
    if ok1:
        failures.append("digit adele sits in the level-1 conorm image")
    ok0, _ = in_conorm_image(a, 0)
    if ok0:
        failures.append("digit adele sits in the level-0 conorm image")

    checks += 1
    truncs = cantor_truncations(tower, 3, 2)
    base = [neighborhood_base(tower, {3}, 3**j) for j in range(1, 5)]
    rep = is_cauchy(truncs, base)
    if not rep.ok:
        failures.append(f"truncations not Cauchy: {rep.entries}")

    checks += 1
    lim = limit_local(truncs, 3, 6)
    ctx = cached_context(3, 121, 6)
    digit = {y: localize(a.value_at(3, y), ctx, y) for y in a.slices[3]}
    if lim.values != digit:
        failures.append("local limit does not reproduce the digit map")
    if lim.constant_level != 2:
        failures.append("limit slice is locally constant below its depth")
    return SuiteResult("counterexample", checks, tuple(failures))


def suite_balls(seed: int = 0) -> SuiteResult:
    """Sum/product ball containments: exhaustive at precision 2 and
    randomized at precision 6."""
    rng = _rng("balls", seed)
    failures = []
    checks = 0

    ctx_small = cached_context(3, 8, 2)
    x = from_integer(ctx_small, 0, 4)
    y = from_integer(ctx_small, 1, 7)
    for op, k in (("add", 0), ("mul", 0)):
        checks += 1
        rep = ball_arithmetic_check(x, x, k, op=op, rng=rng)
        if not rep.ok:
            failures.append(f"exhaustive {op} at precision 2: {rep.violations[0]}")
    checks += 1
    rep = ball_arithmetic_check(y, y, 0, op="add", rng=rng)
    if not rep.ok:
        failures.append(f"exhaustive add at precision 2: {rep.violations[0]}")

    plan = [(3, 8, 6), (11, 5, 6), (2, 5, 6)]
    for p, n, N in plan:
        ctx = cached_context(p, n, N)
        pls = places_above(n, p)
        for idx in range(len(ctx.factors)):
            for op in ("add", "mul"):
                checks += 1
                a = localize(_random_cyclo(n, rng), ctx, ctx.place_of(idx))
                b = localize(_random_cyclo(n, rng), ctx, ctx.place_of(idx))
                k = rng.randint(0, 2)
                rep = ball_arithmetic_check(a, b, k, op=op, samples=120, rng=rng)
                if not rep.ok:
                    failures.append(f"p={p} n={n} {op} k={k}: {rep.violations[0]}")
    return SuiteResult("balls", checks, tuple(failures))


def _chart_families(tower: Tower, p: int, rng: random.Random):
    """Two independently built chart families above p: the base-field
    charts with one tie-break rule against either the other tie-break or
    charts rooted one level up."""
    view = CyclotomicTowerView(tower)
    v = places_above(1, p)[0]
    charts_a = [build_transition(view, v, tower.depth, "least")]
    if tower.depth >= 1 and rng.random() < 0.5:
        lifted = Tower(tower.conductors, base_index=1)
        view_b = CyclotomicTowerView(lifted)
        charts_b = [
            build_transition(view_b, w, tower.depth, "greatest")
            for w in places_above(tower.conductors[1], p)
        ]
    else:
        charts_b = [build_transition(view, v, tower.depth, "greatest")]
    return charts_a, charts_b


def suite_charts(seed: int = 0) -> SuiteResult:
    """Transport verdicts are chart independent: locally constant levels
    of slices and openness/grouping of ball families agree across two
    independently built chart choices."""
    from .transition import BallSpec, chart_independence_check, j_independence_check

    rng = _rng("charts", seed)
    failures = []
    checks = 0
    for spec in SUITE_TOWERS:
        tower = Tower.parse(spec)
        n_top = tower.top
        for _ in range(50):
            checks += 1
            p = rng.choice(SUITE_PRIMES)
            charts_a, charts_b = _chart_families(tower, p, rng)
            kind = rng.random()
            pls = places_above(n_top, p)
            if kind < 0.6:
                level = rng.randint(0, tower.depth)
                c = _random_classical(tower, level, rng)
                a = conorm_adele(c)
                slice_map = {y: a.value_at(p, y) for y in pls}
            elif kind < 0.8 and n_top % 3 and len(places_above(n_top, 3)) > 1 and p == 3:
                a = cantor_adele(tower, 3)
                slice_map = {y: a.value_at(3, y) for y in pls}
            else:
                slice_map = {y: _random_cyclo(n_top, rng) for y in pls}
            rep = chart_independence_check(slice_map, charts_a, charts_b)
            if not rep.ok:
                failures.append(f"{spec} p={p}: slice profiles {rep.profile_a} vs {rep.profile_b}")
        for _ in range(50):
            checks += 1
            p = rng.choice(SUITE_PRIMES)
            charts_a, charts_b = _chart_families(tower, p, rng)
            level = rng.randint(0, tower.depth)
            n_level = tower.conductors[level]
            c = _random_classical(tower, level, rng)
            radii: dict = {}
            ball_map = {}
            for y in places_above(n_top, p):
                key = _restrict_to(y, n_level)
                radii.setdefault(key, rng.randint(0, 2))
                ball_map[y] = BallSpec(c.value_at(key), radii[key])
            rep = j_independence_check(ball_map, charts_a, charts_b, expected_level=level)
            if not rep.ok:
                failures.append(f"{spec} p={p}: open family {rep.detail}")
    return SuiteResult("charts", checks, tuple(failures))


def _restrict_to(place, n):
    from .places import restrict_place

    return restrict_place(place, n)


def suite_splitting(seed: int = 0) -> SuiteResult:
    """The place count above every suite prime can be strictly multiplied
    by extending the tower with one more conductor."""
    failures = []
    checks = 0
    for spec in SUITE_TOWERS:
        tower = Tower.parse(spec)
        for p in (2, 3, 5, 7):
            checks += 1
            try:
                m = find_splitting_extension(tower, p)
            except Exception as exc:
                failures.append(f"{spec} p={p}: {exc}")
                continue
            if len(places_above(m, p)) <= len(places_above(tower.top, p)):
                failures.append(f"{spec} p={p}: conductor {m} does not multiply the count")
    return SuiteResult("splitting", checks, tuple(failures))


SUITES = {
    "td": suite_td,
    "places": suite_places,
    "ring": suite_ring,
    "conorm": suite_conorm,
    "isometry": suite_isometry,
    "charts": suite_charts,
    "density": suite_density,
    "counterexample": suite_counterexample,
    "balls": suite_balls,
    "splitting": suite_splitting,
}


def run_suites(names: list[str], seed: int = 0) -> list[SuiteResult]:
    return [SUITES[name](seed) for name in names]

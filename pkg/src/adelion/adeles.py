"""The dense adele layer: locally constant entries with global values.

An adele here is a finite table: above each prime of a finite support
set it assigns one field element per deepest-level place, and a single
default value covers every other place and all archimedean ones.  The
default must be integral outside the support, which is the finite form
of the integral-tail requirement; the support region (finitely many
cylinders plus the archimedean places) plays the compact set.

Classical adeles at a fixed tower level embed into this layer by the
conorm, which duplicates each entry across its fiber.  The layer is
exactly the image-union of all conorms after refinement, and density
is realized by ``densify``, which extracts a classical witness inside
any given basic open set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

from .cyclotomic import (
    CycloElement,
    Tower,
    denominator_primes,
    embed,
    restrict_element,
)
from .errors import (
    EmptySequenceError,
    FiberIncompleteError,
    LevelMismatchError,
    LevelOrderError,
    NoSplittingError,
    NotContainedError,
    PreconditionRamifiedError,
    RamifiedError,
    TailNotIntegralError,
    TowerMismatchError,
)
from .localfield import (
    BOTTOM,
    UNDECIDED,
    ComplexInterval,
    LocalElement,
    arch_ball_contains,
    arch_embed,
    cached_context,
    localize,
)
from .places import ARCH, FinitePlace, fiber, places_above, restrict_place, splitting_profile


# --------------------------------------------------------------------------
# classical adeles


@dataclass
class ClassicalAdele:
    """A finitely supported tuple over the places of one tower level.

    ``entries`` may cover only part of a fiber; uncovered places above a
    supported prime take the default, which is legitimate because the
    support region is the full set of cylinders above supported primes.
    """

    tower: Tower
    level_index: int
    entries: dict[FinitePlace, CycloElement]
    default: CycloElement

    def __post_init__(self):
        n = self.conductor
        for place, value in self.entries.items():
            if place.is_arch:
                raise ValueError("entries live at finite places only")
            if place.level != n:
                raise LevelMismatchError(f"entry place at level {place.level}, expected {n}")
            if value.level != n:
                raise LevelMismatchError(f"entry value at level {value.level}, expected {n}")
        if self.default.level != n:
            raise LevelMismatchError("default level does not match")
        missing = denominator_primes(self.default) - self.support
        if missing:
            raise TailNotIntegralError(f"default has denominators at {sorted(missing)} outside support")

    @property
    def conductor(self) -> int:
        return self.tower.conductors[self.level_index]

    @property
    def support(self) -> set[int]:
        return {place.base for place in self.entries}

    def value_at(self, place: FinitePlace) -> CycloElement:
        return self.entries.get(place, self.default)


def conorm(c: ClassicalAdele, to_level: int) -> ClassicalAdele:
    """Duplicate entries across fibers up to a deeper tower level."""
    if to_level < c.level_index:
        raise LevelOrderError("conorm target must be at least the source level")
    if to_level == c.level_index:
        return ClassicalAdele(c.tower, c.level_index, dict(c.entries), c.default)
    n_to = c.tower.conductors[to_level]
    entries = {}
    for v, value in c.entries.items():
        lifted = embed(value, n_to)
        for w in fiber(v, n_to):
            entries[w] = lifted
    return ClassicalAdele(c.tower, to_level, entries, embed(c.default, n_to))


def conorm_adele(c: ClassicalAdele, depth: int | None = None) -> "Adele":
    """Conorm into the locally constant layer at the given depth."""
    tower = c.tower
    depth = tower.depth if depth is None else depth
    if depth < c.level_index:
        raise LevelOrderError("conorm target must be at least the source level")
    n_top = tower.conductors[depth]
    n_src = c.conductor
    default = embed(c.default, n_top)
    slices: dict[int, dict[FinitePlace, CycloElement]] = {}
    for p in sorted(c.support):
        table = {}
        for w in places_above(n_top, p):
            table[w] = embed(c.value_at(restrict_place(w, n_src)), n_top)
        slices[p] = table
    return Adele(tower, depth, slices, default)


# --------------------------------------------------------------------------
# the locally constant layer


@dataclass
class Adele:
    """Support-slices over deepest-level places plus one integral default."""

    tower: Tower
    depth: int
    slices: dict[int, dict[FinitePlace, CycloElement]]
    default: CycloElement

    def __post_init__(self):
        n = self.conductor
        if self.default.level != n:
            raise LevelMismatchError("default level does not match the depth")
        for p, table in self.slices.items():
            expected = set(places_above(n, p))
            if set(table) != expected:
                raise FiberIncompleteError(f"slice above {p} does not cover its fiber")
            for value in table.values():
                if value.level != n:
                    raise LevelMismatchError("slice value at the wrong level")
        # prune primes fully explained by the default
        den = denominator_primes(self.default)
        for p in [p for p, table in self.slices.items() if p not in den]:
            if all(v == self.default for v in self.slices[p].values()):
                del self.slices[p]
        missing = den - set(self.slices)
        if missing:
            raise TailNotIntegralError(
                f"default has denominators at {sorted(missing)} outside support"
            )

    @property
    def conductor(self) -> int:
        return self.tower.conductors[self.depth]

    @property
    def support(self) -> set[int]:
        return set(self.slices)

    def value_at(self, p: int, place: FinitePlace) -> CycloElement:
        table = self.slices.get(p)
        if table is None:
            return self.default
        return table[place]

    def is_zero(self) -> bool:
        return self.default.is_zero() and all(
            v.is_zero() for t in self.slices.values() for v in t.values()
        )

    def refine_to(self, depth: int) -> "Adele":
        if depth < self.depth:
            raise LevelOrderError("cannot coarsen an adele")
        if depth == self.depth:
            return self
        n_to = self.tower.conductors[depth]
        n_src = self.conductor
        slices = {}
        for p, table in self.slices.items():
            slices[p] = {
                w: embed(table[restrict_place(w, n_src)], n_to)
                for w in places_above(n_to, p)
            }
        return Adele(self.tower, depth, slices, embed(self.default, n_to))

    def _binary(self, other: "Adele", op) -> "Adele":
        if self.tower != other.tower:
            raise TowerMismatchError("adeles live over different towers")
        depth = max(self.depth, other.depth)
        a, b = self.refine_to(depth), other.refine_to(depth)
        n = a.conductor
        slices = {}
        for p in sorted(set(a.slices) | set(b.slices)):
            slices[p] = {
                w: op(a.value_at(p, w), b.value_at(p, w)) for w in places_above(n, p)
            }
        return Adele(a.tower, depth, slices, op(a.default, b.default))

    def __add__(self, other: "Adele") -> "Adele":
        return self._binary(other, lambda x, y: x + y)

    def __sub__(self, other: "Adele") -> "Adele":
        return self._binary(other, lambda x, y: x - y)

    def __mul__(self, other: "Adele") -> "Adele":
        return self._binary(other, lambda x, y: x * y)

    def __neg__(self) -> "Adele":
        return Adele(
            self.tower,
            self.depth,
            {p: {w: -v for w, v in t.items()} for p, t in self.slices.items()},
            -self.default,
        )

    @classmethod
    def zero(cls, tower: Tower, depth: int | None = None) -> "Adele":
        depth = tower.depth if depth is None else depth
        return cls(tower, depth, {}, CycloElement.zero(tower.conductors[depth]))


def make_adele(
    tower: Tower,
    depth: int,
    slices: dict[int, dict[FinitePlace, CycloElement]],
    default: CycloElement,
) -> Adele:
    """Validating constructor (integral tail, complete fibers)."""
    return Adele(tower, depth, {p: dict(t) for p, t in slices.items()}, default)


def in_conorm_image(a: Adele, level_index: int) -> tuple[bool, ClassicalAdele | None]:
    """Is the adele the conorm of a classical adele at the given level?

    Requires constancy on that level's cylinders, values and default in
    the level's subfield; returns the classical witness when so.
    """
    tower = a.tower
    n_i = tower.conductors[level_index]
    n_top = a.conductor
    if n_top % n_i != 0 or level_index > a.depth:
        raise LevelOrderError("witness level must not exceed the adele's depth")
    entries: dict[FinitePlace, CycloElement] = {}
    for p, table in a.slices.items():
        for w in places_above(n_i, p):
            block = [table[y] for y in fiber(w, n_top)]
            first = block[0]
            if any(v != first for v in block[1:]):
                return False, None
            down = restrict_element(first, n_i)
            if down is None:
                return False, None
            entries[w] = down
    down_default = restrict_element(a.default, n_i)
    if down_default is None:
        return False, None
    witness = ClassicalAdele(tower, level_index, entries, down_default)
    return True, witness


# --------------------------------------------------------------------------
# basic open sets


@dataclass(frozen=True)
class CylinderBall:
    """One ball assigned to a whole cylinder: center in the cylinder
    level's field, radius p^(-k) with the strict convention."""

    cylinder: FinitePlace
    center: CycloElement
    k: int

    def __post_init__(self):
        if self.center.level != self.cylinder.level:
            raise LevelMismatchError("ball center must live at the cylinder's level")


@dataclass
class BasicOpen:
    """A basis open set: cylinder-structured balls above finitely many
    primes, integral tail elsewhere, one ball at every archimedean place."""

    tower: Tower
    finite: dict[int, tuple[CylinderBall, ...]]
    arch_center: CycloElement
    arch_radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "arch_radius", Fraction(self.arch_radius))
        if self.arch_radius <= 0:
            raise ValueError("archimedean radius must be positive")
        n_top = self.tower.top
        if n_top % self.arch_center.level != 0:
            raise LevelMismatchError("arch center level must divide the top conductor")
        for p, balls in self.finite.items():
            covered: set[FinitePlace] = set()
            for ball in balls:
                cyl = ball.cylinder
                if cyl.base != p:
                    raise LevelMismatchError("cylinder above the wrong prime")
                if cyl.level not in self.tower.conductors:
                    raise LevelMismatchError("cylinder level is not a tower level")
                block = set(fiber(cyl, n_top))
                if block & covered:
                    raise ValueError("cylinders overlap")
                covered |= block
            if covered != set(places_above(n_top, p)):
                raise FiberIncompleteError(f"balls above {p} do not cover the fiber")

    @property
    def support(self) -> set[int]:
        return set(self.finite)

    def ball_at(self, p: int, place: FinitePlace) -> CylinderBall:
        for ball in self.finite[p]:
            if restrict_place(place, ball.cylinder.level) == ball.cylinder:
                return ball
        raise FiberIncompleteError(f"no ball covers {place.serialize()}")


def neighborhood_base(tower: Tower, primes: set[int], n: int) -> BasicOpen:
    """The countable-base element: radius-1/n balls around 0 above the
    given primes and at infinity, integral tail elsewhere."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    finite = {}
    for p in sorted(primes):
        k = 0
        while p ** (k + 1) <= n:
            k += 1
        finite[p] = (
            CylinderBall(FinitePlace(1, p, 1), CycloElement.zero(1), k),
        )
    return BasicOpen(tower, finite, CycloElement.zero(1), Fraction(1, n))


def _upper_sqrt(x: Fraction) -> Fraction:
    """A rational u with u >= sqrt(x), reasonably tight."""
    if x <= 0:
        return Fraction(0)
    scale = 1 << 64
    n = (x.numerator * scale * scale) // x.denominator + 1
    return Fraction(isqrt(n) + 1, scale)


def contains(U: BasicOpen, a: Adele, arch_bits: int = 96):
    """Membership of an adele in a basic open set.

    Finite places are decided exactly through local valuations (raising
    RAMIFIED if a genuinely needed prime divides the top conductor);
    archimedean places are tested with intervals and may yield UNDECIDED.
    """
    if U.tower != a.tower:
        raise TowerMismatchError("open set and adele live over different towers")
    a = a.refine_to(a.tower.depth)
    n_top = a.tower.top
    for p in sorted(U.support | a.support):
        if p in U.support:
            balls = U.finite[p]
            den_exp = 0
            for ball in balls:
                center = embed(ball.center, n_top)
                for y in fiber(ball.cylinder, n_top):
                    delta = a.value_at(p, y) - center
                    if delta.is_zero():
                        continue
                    if n_top % p == 0:
                        raise RamifiedError(
                            f"membership above ramified prime {p} is unsupported"
                        )
                    den = delta.denominator()
                    e = 0
                    while den % p == 0:
                        den //= p
                        e += 1
                    N = ball.k + e + 2
                    ctx = cached_context(p, n_top, N)
                    v = localize(delta, ctx, y).valuation()
                    if v is not BOTTOM and v < ball.k + 1:
                        return False
        else:
            # integral tail: slice values above p must have valuation >= 0
            for y, value in a.slices[p].items():
                if value.is_zero():
                    continue
                if value.denominator() % p != 0:
                    continue  # p-integral coordinates: integral at every place above p
                if n_top % p == 0:
                    raise RamifiedError(
                        f"integrality above ramified prime {p} is unsupported"
                    )
                ctx = cached_context(p, n_top, 2)
                v = localize(value, ctx, y).valuation()
                if v is not BOTTOM and v < 0:
                    return False
    # archimedean balls
    delta = embed(a.default, n_top) - embed(U.arch_center, n_top)
    if delta.is_zero():
        return True
    verdict = True
    for y in places_above(n_top, ARCH):
        res = arch_ball_contains(
            arch_embed(delta, y, arch_bits), ComplexInterval.point(0), U.arch_radius
        )
        if res is False:
            return False
        if res is UNDECIDED:
            verdict = UNDECIDED
    return verdict


@dataclass(frozen=True)
class EpsilonReport:
    """Largest safe per-prime radii p^(-k) around a point inside an open set."""

    per_prime: dict[int, int]
    arch: Fraction


def epsilon_for(U: BasicOpen, a: Adele, arch_bits: int = 96) -> EpsilonReport:
    """For each supported prime, the largest discrete radius whose balls
    around the adele's entries stay inside the open set; plus archimedean
    slack computed with outward rounding."""
    if contains(U, a, arch_bits) is not True:
        raise NotContainedError("epsilon_for needs a certified member")
    per: dict[int, int] = {}
    for p in sorted(U.support | a.support):
        if p in U.support:
            per[p] = max(ball.k for ball in U.finite[p])
        else:
            per[p] = -1  # radius p keeps the integral tail
    n_top = a.tower.top
    delta = embed(a.refine_to(a.tower.depth).default, n_top) - embed(U.arch_center, n_top)
    worst = Fraction(0)
    if not delta.is_zero():
        for y in places_above(n_top, ARCH):
            dist2 = arch_embed(delta, y, arch_bits).abs_squared()
            worst = max(worst, _upper_sqrt(dist2.hi))
    slack = U.arch_radius - worst
    if slack <= 0:
        raise NotContainedError("archimedean slack vanished at working precision")
    return EpsilonReport(per, slack)


def find_base_refinement(U: BasicOpen) -> tuple[set[int], int]:
    """(S', n') with the countable-base element over S' at scale n'
    contained in U; follows the finite epsilon extraction."""
    zero = Adele.zero(U.tower)
    eps = epsilon_for(U, zero)
    n_prime = 1
    for p, k in eps.per_prime.items():
        if p in U.support and k >= 0:
            n_prime = max(n_prime, p**k)
    arch_bound = eps.arch
    n_prime = max(n_prime, int(1 / arch_bound) + 1)
    return set(U.support), n_prime


def refinement_contained(S: set[int], n: int, U: BasicOpen) -> bool:
    """Certify neighborhood_base(S, n) is a subset of U (zero-centered case).

    Uses the ultrametric sub-ball criterion at finite places and triangle
    slack at infinity; requires 0 to belong to U.
    """
    base = neighborhood_base(U.tower, S, n)
    if contains(U, Adele.zero(U.tower)) is not True:
        return False
    if not U.support <= S:
        return False
    n_top = U.tower.top
    for p in U.support:
        k_base = base.finite[p][0].k
        for ball in U.finite[p]:
            if k_base < ball.k:
                return False
    # arch: |c| + 1/n <= radius, measured with outward rounding
    center = embed(U.arch_center, n_top)
    worst = Fraction(0)
    if not center.is_zero():
        for y in places_above(n_top, ARCH):
            worst = max(worst, _upper_sqrt(arch_embed(center, y).abs_squared().hi))
    return worst + Fraction(1, n) <= U.arch_radius


# --------------------------------------------------------------------------
# density


@dataclass
class LocalSliceTarget:
    """A precision-N slice above one prime, standing in for a limit point."""

    tower: Tower
    prime: int
    values: dict[FinitePlace, LocalElement]

    def __post_init__(self):
        n_top = self.tower.top
        expected = set(places_above(n_top, self.prime))
        if set(self.values) != expected:
            raise FiberIncompleteError("local slice must cover the fiber")


def _local_to_global(x: LocalElement, n_top: int) -> CycloElement:
    """The digit truncation of a local element as a global field element;
    it localizes back to x exactly at the working precision."""
    total = CycloElement.zero(n_top)
    for t, c in enumerate(x.coeffs):
        if c:
            total = total + CycloElement.zeta(n_top, t).scale(Fraction(c))
    return total.scale(Fraction(x.ctx.p) ** x.exponent)


def contains_local(U: BasicOpen, target: LocalSliceTarget) -> bool:
    """Membership of a local slice in the open set's balls above its prime."""
    p = target.prime
    if p not in U.support:
        # tail: all values must be integral
        return all(
            (v.valuation() is BOTTOM) or v.valuation() >= 0 for v in target.values.values()
        )
    n_top = U.tower.top
    for ball in U.finite[p]:
        center = embed(ball.center, n_top)
        for y in fiber(ball.cylinder, n_top):
            x = target.values[y]
            c_loc = localize(center, x.ctx, y)
            diff = x - c_loc
            bound, exact = diff.valuation_bound()
            if bound >= ball.k + 1:
                continue
            if exact:
                return False
            return False  # unresolvable at this precision counts as failure
    return True


def densify(target, U: BasicOpen) -> tuple[int, ClassicalAdele]:
    """Produce a tower level and a classical adele whose conorm lies in U.

    Exact adeles return their least conorm-witness level (their own depth
    at worst).  Local-slice targets return digit-truncation entries at
    the top level; the truncations localize back exactly, so membership
    transfers at the working precision.
    """
    if isinstance(target, Adele):
        if contains(U, target) is not True:
            raise NotContainedError("densify needs a certified member")
        a = target.refine_to(target.tower.depth)
        for i in range(a.tower.depth + 1):
            ok, witness = in_conorm_image(a, i)
            if ok:
                return i, witness
        raise AssertionError("every adele is a conorm of itself at full depth")
    if isinstance(target, LocalSliceTarget):
        if not contains_local(U, target):
            raise NotContainedError("local target is not certified inside U")
        tower = target.tower
        n_top = tower.top
        entries = {
            y: _local_to_global(x, n_top) for y, x in target.values.items()
        }
        witness = ClassicalAdele(tower, tower.depth, entries, CycloElement.zero(n_top))
        if contains(U, conorm_adele(witness)) is False:
            raise NotContainedError("digit truncation escaped the open set")
        return tower.depth, witness
    raise TypeError(f"cannot densify {type(target).__name__}")


def separating_open(a: Adele, arch_bits: int = 96) -> BasicOpen:
    """A basic open set containing ``a`` but not 0; needs a nonzero entry
    whose valuation is computable (unramified prime)."""
    a = a.refine_to(a.tower.depth)
    n_top = a.tower.top
    witness = None
    for p in sorted(a.support):
        if n_top % p == 0:
            continue
        for y in sorted(a.slices[p], key=lambda pl: pl.coset_rep):
            if not a.value_at(p, y).is_zero():
                witness = (p, y, a.value_at(p, y))
                break
        if witness:
            break
    if witness is None and not a.default.is_zero():
        p = 2
        while n_top % p == 0 or p in a.support:
            p = int(__import__("sympy").nextprime(p))
        y = places_above(n_top, p)[0]
        witness = (p, y, a.default)
    if witness is None:
        if a.is_zero():
            raise ValueError("cannot separate the zero adele from itself")
        raise RamifiedError("nonzero entries only above ramified primes")
    q, x_place, x_value = witness
    den = x_value.denominator()
    e = 0
    while den % q == 0:
        den //= q
        e += 1
    ctx = cached_context(q, n_top, e + 3)
    v = localize(x_value, ctx, x_place).valuation()
    while v is BOTTOM:
        ctx = cached_context(q, n_top, ctx.N + 4)
        v = localize(x_value, ctx, x_place).valuation()
    radius = Fraction(1, q**v) if v >= 0 else Fraction(q ** (-v))
    finite = {}
    for p in sorted(a.support | {q}):
        k_p = -1
        while Fraction(1, p ** (k_p + 1)) >= radius:
            k_p += 1
        balls = []
        for y in places_above(n_top, p):
            balls.append(CylinderBall(y, a.value_at(p, y), k_p))
        finite[p] = tuple(balls)
    return BasicOpen(a.tower, finite, a.default, radius)


# --------------------------------------------------------------------------
# the digit-map counterexample


def cantor_adele(tower: Tower, p: int, depth: int | None = None) -> Adele:
    """An adele supported above p whose slice is an injective digit map on
    the depth-d places: each level contributes a block of base-p digits
    encoding the index of the chain's step inside its fiber."""
    depth = tower.depth if depth is None else depth
    n_d = tower.conductors[depth]
    if n_d % p == 0:
        raise PreconditionRamifiedError(f"{p} ramifies below depth {depth}")
    profile = [len(places_above(tower.conductors[i], p)) for i in range(depth + 1)]
    if depth == 0:
        return Adele(
            tower, 0, {p: {places_above(1, p)[0]: CycloElement.zero(1)}}, CycloElement.zero(1)
        )
    if profile[depth] == 1:
        raise NoSplittingError(f"no splitting above {p} up to depth {depth}")
    return _digit_adele(tower, p, depth, depth)


def cantor_truncations(tower: Tower, p: int, depth: int) -> list[Adele]:
    """Digit truncations of the digit map at depths 0..depth, all expressed
    at the full depth; the sequence converges to the digit map above p."""
    return [_digit_adele(tower, p, depth, i) for i in range(depth + 1)]


def _digit_widths(tower: Tower, p: int, depth: int) -> list[int]:
    profile = [len(places_above(tower.conductors[i], p)) for i in range(depth + 1)]
    widths = [0]
    for i in range(1, depth + 1):
        size = profile[i] // profile[i - 1]
        w = 0
        while p**w < size:
            w += 1
        widths.append(w)
    return widths


def _digit_adele(tower: Tower, p: int, depth: int, use_levels: int) -> Adele:
    """Digit map value at each depth-`depth` place, using digit blocks of
    the first ``use_levels`` levels only."""
    n_d = tower.conductors[depth]
    widths = _digit_widths(tower, p, depth)
    offsets = [0] * (depth + 1)
    for i in range(1, depth + 1):
        offsets[i] = offsets[i - 1] + widths[i - 1]
    table = {}
    for y in places_above(n_d, p):
        chain = [restrict_place(y, tower.conductors[i]) for i in range(depth + 1)]
        value = 0
        for i in range(1, min(use_levels, depth) + 1):
            block = sorted(
                fiber(chain[i - 1], tower.conductors[i]), key=lambda pl: pl.coset_rep
            )
            value += p ** offsets[i] * block.index(chain[i])
        table[y] = CycloElement.from_rational(n_d, value)
    return Adele(tower, depth, {p: table}, CycloElement.zero(n_d))


# --------------------------------------------------------------------------
# Cauchy sequences and local limits


@dataclass(frozen=True)
class CauchyReport:
    entries: tuple[tuple[str, int | None], ...]  # (base element label, stabilization index)

    @property
    def ok(self) -> bool:
        return all(idx is not None for _, idx in self.entries)


def is_cauchy(seq: list[Adele], base: list[BasicOpen]) -> CauchyReport:
    """For each base neighborhood, the least index beyond which all pairwise
    differences lie inside it (None when no such index exists)."""
    if not seq:
        raise EmptySequenceError("empty sequence")
    results = []
    for idx_u, U in enumerate(base):
        found = None
        for m in range(len(seq)):
            ok = True
            for i in range(m, len(seq)):
                for j in range(i, len(seq)):
                    if contains(U, seq[i] - seq[j]) is not True:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                found = m
                break
        results.append((f"base[{idx_u}]", found))
    return CauchyReport(tuple(results))


@dataclass
class LocalLimitReport:
    values: dict[FinitePlace, LocalElement]
    final_step: int | None  # valuation of the last consecutive difference;
    # None when the sequence has exactly stabilized at the working precision
    constant_level: int

    @property
    def stabilized(self) -> bool:
        return self.final_step is None

    def locally_constant_below_depth(self, depth: int) -> bool:
        return self.constant_level < depth


def limit_local(seq: list[Adele], p: int, N: int) -> LocalLimitReport:
    """Entrywise limits above p at precision N, taken as the settled tail
    of the residue sequence; reports the least cylinder level at which
    the limiting slice is constant (equal to the full depth means: not
    locally constant below its own depth, the expected outcome for
    digit-map sequences)."""
    if not seq:
        raise EmptySequenceError("empty sequence")
    tower = seq[0].tower
    depth = max(a.depth for a in seq)
    refined = [a.refine_to(depth) for a in seq]
    n_top = tower.conductors[depth]
    if n_top % p == 0:
        raise RamifiedError(f"{p} ramifies at conductor {n_top}")
    ctx = cached_context(p, n_top, N)
    values: dict[FinitePlace, LocalElement] = {}
    final_step: int | None = None
    for y in places_above(n_top, p):
        residues = [localize(a.value_at(p, y), ctx, y) for a in refined]
        if len(residues) > 1:
            bound, exact = (residues[-1] - residues[-2]).valuation_bound()
            if exact:
                final_step = bound if final_step is None else min(final_step, bound)
        values[y] = residues[-1]
    level = tower.depth
    for i in range(depth + 1):
        n_i = tower.conductors[i]
        blocks: dict[FinitePlace, tuple] = {}
        ok = True
        for y, v in values.items():
            digits = (v.coeffs, v.exponent)  # cross-place comparison by digit pattern
            b = restrict_place(y, n_i)
            if b in blocks and blocks[b] != digits:
                ok = False
                break
            blocks[b] = digits
        if ok:
            level = i
            break
    return LocalLimitReport(values, final_step, level)

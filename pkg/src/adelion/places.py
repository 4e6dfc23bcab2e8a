"""Places of cyclotomic fields above rational primes and at infinity.

A place of Q(zeta_n) above p is a coset of the decomposition subgroup
of the unit group modulo n.  For p not dividing n that subgroup is
generated by p; for p | n it is the full p-part times the subgroup
generated by p modulo the prime-to-p part; at infinity it is {+-1}.
Cosets carry their least member as the canonical representative.

The Galois action implemented here is the pullback action on absolute
values, matched to the factor labelling used by the p-adic layer so
that valuations are carried isometrically (see ``localfield``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .cyclotomic import GaloisElement, Tower
from .errors import LevelMismatchError, NonDivisibleError, NotACoverError
from .polys import euler_phi, multiplicative_order

ARCH = "inf"


def _p_part_split(n: int, p: int) -> tuple[int, int]:
    """n = p^a * m with p not dividing m; returns (p^a, m)."""
    pa = 1
    while n % p == 0:
        n //= p
        pa *= p
    return pa, n


@lru_cache(maxsize=None)
def decomposition_subgroup(n: int, base) -> frozenset[int]:
    """The decomposition subgroup of (Z/n)^x at a rational prime or ARCH."""
    if n == 1:
        return frozenset({1})
    if base == ARCH:
        return frozenset({1, (n - 1) % n}) if n > 2 else frozenset({1})
    p = int(base)
    _, m = _p_part_split(n, p)
    if m == n:  # unramified: cyclic subgroup generated by p
        sub = set()
        x = p % n
        while x not in sub:
            sub.add(x)
            x = (x * p) % n
        return frozenset(sub)
    # ramified: all units congruent mod m to a power of p
    gen = set()
    x = p % m if m > 1 else 0
    if m > 1:
        while x not in gen:
            gen.add(x)
            x = (x * p) % m
    return frozenset(
        u for u in range(1, n) if gcd(u, n) == 1 and (m == 1 or (u % m) in gen)
    )


def _coset_rep(n: int, unit: int, subgroup: frozenset[int]) -> int:
    if n == 1:
        return 1
    u = unit % n
    return min((u * d) % n for d in subgroup)


@dataclass(frozen=True)
class FinitePlace:
    """A place of Q(zeta_level) above ``base`` (a prime, or ARCH)."""

    level: int
    base: int | str
    coset_rep: int

    def __post_init__(self):
        sub = decomposition_subgroup(self.level, self.base)
        rep = _coset_rep(self.level, self.coset_rep, sub)
        object.__setattr__(self, "coset_rep", rep)

    @property
    def is_arch(self) -> bool:
        return self.base == ARCH

    def coset(self) -> frozenset[int]:
        sub = decomposition_subgroup(self.level, self.base)
        if self.level == 1:
            return frozenset({1})
        return frozenset((self.coset_rep * d) % self.level for d in sub)

    def serialize(self) -> str:
        return f"p:{self.base}@n:{self.level}#{self.coset_rep}"

    @classmethod
    def parse(cls, text: str) -> "FinitePlace":
        head, rep = text.rsplit("#", 1)
        ppart, npart = head.split("@")
        base_str = ppart.removeprefix("p:")
        base = ARCH if base_str == ARCH else int(base_str)
        return cls(int(npart.removeprefix("n:")), base, int(rep))


def places_above(n: int, base) -> list[FinitePlace]:
    """All places of Q(zeta_n) above a rational prime or at infinity."""
    sub = decomposition_subgroup(n, base)
    if n == 1:
        return [FinitePlace(1, base, 1)]
    seen: set[int] = set()
    reps: list[int] = []
    for u in range(1, n):
        if gcd(u, n) != 1 or u in seen:
            continue
        coset = {(u * d) % n for d in sub}
        seen.update(coset)
        reps.append(min(coset))
    return [FinitePlace(n, base, r) for r in sorted(reps)]


def restrict_place(w: FinitePlace, n: int) -> FinitePlace:
    """The place of Q(zeta_n) below w; requires n | w.level."""
    if w.level % n != 0:
        raise NonDivisibleError(f"{n} does not divide {w.level}")
    if n == w.level:
        return w
    return FinitePlace(n, w.base, w.coset_rep % n if n > 1 else 1)


def fiber(v: FinitePlace, m: int) -> list[FinitePlace]:
    """All places at conductor m restricting to v; requires v.level | m."""
    if m % v.level != 0:
        raise NonDivisibleError(f"{v.level} does not divide {m}")
    return [w for w in places_above(m, v.base) if restrict_place(w, v.level) == v]


def act_on_place(sigma: GaloisElement, y: FinitePlace) -> FinitePlace:
    """Image of the place y under sigma.

    This is the pullback action on absolute values: the image place
    measures alpha by the size of sigma^{-1}(alpha) at y, which on
    coset labels divides the representative by the unit.  With this
    convention |sigma(alpha)| at sigma(y) equals |alpha| at y for the
    valuations computed by the p-adic layer.
    """
    if sigma.level != y.level:
        raise LevelMismatchError("automorphism and place live at different levels")
    if y.level == 1:
        return y
    inv = pow(sigma.unit, -1, y.level)
    return FinitePlace(y.level, y.base, (y.coset_rep * inv) % y.level)


@dataclass(frozen=True)
class ProfinitePlace:
    """A coherent chain of places along a tower, one per level."""

    tower: Tower
    chain: tuple[FinitePlace, ...]

    def __post_init__(self):
        if len(self.chain) != len(self.tower.conductors):
            raise ValueError("chain length must match tower depth")
        base = self.chain[0].base
        for place, n in zip(self.chain, self.tower.conductors):
            if place.level != n:
                raise ValueError("chain levels must follow the tower conductors")
            if place.base != base:
                raise ValueError("chain must stay above one rational place")
        for lower, upper in zip(self.chain, self.chain[1:]):
            if restrict_place(upper, lower.level) != lower:
                raise ValueError("chain is not coherent under restriction")

    @classmethod
    def from_top(cls, tower: Tower, top: FinitePlace) -> "ProfinitePlace":
        chain = tuple(restrict_place(top, n) for n in tower.conductors)
        return cls(tower, chain)

    def serialize(self) -> str:
        return "/".join(p.serialize() for p in self.chain)


@dataclass(frozen=True)
class Cylinder:
    """The set of deeper places restricting to a fixed finite-level place."""

    place: FinitePlace

    def contains_place(self, w: FinitePlace) -> bool:
        if w.base != self.place.base:
            return False
        if w.level % self.place.level == 0:
            return restrict_place(w, self.place.level) == self.place
        if self.place.level % w.level == 0:
            return fiber(w, self.place.level) == [self.place]
        return False


def refine_cover(tower: Tower, v: FinitePlace, cover: list[Cylinder]) -> int:
    """Least tower level index L at which every level-L place above v has
    its whole cylinder inside a single cover element.

    Mirrors the compact-cover refinement: the deepest level always works
    once the cylinders jointly cover the deepest fiber above v.
    """
    top = tower.top
    for cyl in cover:
        if cyl.place.base != v.base:
            raise NotACoverError("cover element lies above a different rational place")
    deepest = fiber(v, top)
    for x in deepest:
        if not any(c.contains_place(x) for c in cover):
            raise NotACoverError(f"{x.serialize()} is uncovered")
    start = tower.level_of(v.level)
    for idx in range(start, tower.depth + 1):
        n = tower.conductors[idx]
        ok = True
        for w in fiber(v, n):
            block = fiber(w, top)
            if not any(all(c.contains_place(x) for x in block) for c in cover):
                ok = False
                break
        if ok:
            return idx
    raise NotACoverError("no refining level found")  # unreachable given the precheck


def splitting_profile(base, tower: Tower) -> list[int]:
    """Number of places above ``base`` at each tower level."""
    return [len(places_above(n, base)) for n in tower.conductors]


def local_degree(n: int, p: int) -> int:
    """Residue degree f of the places above an unramified prime p."""
    if n % p == 0:
        raise NonDivisibleError(f"{p} ramifies in conductor {n}")
    return multiplicative_order(p % n if n > 1 else 1, n)


def find_splitting_extension(tower: Tower, p: int, limit: int = 10**7) -> int:
    """A conductor m, multiple of the tower top, with strictly more places
    above p than the top level has.

    Small primes are tried first; if none multiplies the count, primes
    dividing p^(jf) - 1 are adjoined (f the residue degree at the top),
    which provably multiplies the count once the new prime stays coprime
    to the tower.  Factoring is skipped when the exponent gets large.
    """
    import sympy

    top = tower.top
    current = len(places_above(top, p))

    def try_q(q: int) -> int | None:
        m = top * q
        if m <= limit and len(places_above(m, p)) > current:
            return m
        return None

    for q in sympy.primerange(2, 100):
        m = try_q(int(q))
        if m:
            return m
    _, m_part = _p_part_split(top, p)
    f = multiplicative_order(p % m_part if m_part > 1 else 1, m_part) if m_part > 1 else 1
    for j in (1, 2, 3):
        if j * f > 64:
            break
        value = p ** (j * f) - 1
        if value > 1:
            for q in sorted(int(x) for x in sympy.factorint(value)):
                m = try_q(q)
                if m:
                    return m
    raise NoSplittingSearchError(p, tower)


class NoSplittingSearchError(RuntimeError):
    def __init__(self, p: int, tower: Tower):
        super().__init__(f"no splitting extension found for p={p} over {tower.conductors}")

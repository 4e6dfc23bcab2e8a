"""Exact arithmetic in cyclotomic fields, their unit groups, and towers.

Elements of Q(zeta_n) are stored in the power basis 1, z, ..., z^(phi(n)-1)
modulo the n-th cyclotomic polynomial, with exact rational coordinates.
The reduced form is canonical, so equality is coordinate equality.
Automorphisms are units modulo n acting by z -> z^u.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

import sympy

from . import config
from .errors import (
    DivisionByZeroError,
    InvalidTowerError,
    LevelMismatchError,
    NonDivisibleError,
)
from .polys import (
    cyclotomic_int,
    euler_phi,
    inverse_mod_poly,
    power_table,
    solve_exact,
)

RationalLike = Fraction | int


# --------------------------------------------------------------------------
# towers


@dataclass(frozen=True)
class Tower:
    """An ascending divisibility chain of conductors 1 = n_0 | n_1 | ... | n_d.

    Level i stands for the field Q(zeta_{n_i}); the last level plays the
    role of the ambient field, and ``base_index`` marks the level whose
    field acts as the base of charts and transition tables.
    """

    conductors: tuple[int, ...]
    base_index: int = 0

    def __post_init__(self):
        cs = tuple(int(n) for n in self.conductors)
        object.__setattr__(self, "conductors", cs)
        if not cs:
            raise InvalidTowerError("tower needs at least one conductor")
        if cs[0] != 1:
            raise InvalidTowerError("towers start at conductor 1 (base field Q)")
        for a, b in zip(cs, cs[1:]):
            if b % a != 0:
                raise InvalidTowerError(f"{a} does not divide {b}")
            if b <= a:
                raise InvalidTowerError("conductors must strictly increase")
        if cs[-1] > config.CONDUCTOR_CAP:
            raise InvalidTowerError(f"conductor {cs[-1]} exceeds cap {config.CONDUCTOR_CAP}")
        if len(cs) - 1 > config.DEPTH_CAP:
            raise InvalidTowerError(f"depth {len(cs) - 1} exceeds cap {config.DEPTH_CAP}")
        if not (0 <= self.base_index < len(cs)):
            raise InvalidTowerError("base_index out of range")

    @classmethod
    def parse(cls, spec: str, base_index: int = 0) -> "Tower":
        """Parse a comma-separated conductor chain such as ``1,11,121``."""
        try:
            cs = tuple(int(part) for part in spec.split(","))
        except ValueError:
            raise InvalidTowerError(f"malformed tower spec {spec!r}")
        return cls(cs, base_index)

    @property
    def depth(self) -> int:
        return len(self.conductors) - 1

    @property
    def top(self) -> int:
        return self.conductors[-1]

    @property
    def base_conductor(self) -> int:
        return self.conductors[self.base_index]

    def level_of(self, conductor: int) -> int:
        try:
            return self.conductors.index(conductor)
        except ValueError:
            raise InvalidTowerError(f"{conductor} is not a level of {self.conductors}")

    def spec(self) -> str:
        return ",".join(str(n) for n in self.conductors)


# --------------------------------------------------------------------------
# Galois elements


def _norm_unit(level: int, unit: int) -> int:
    if level == 1:
        return 1
    u = unit % level
    if u == 0 or gcd(u, level) != 1:
        raise ValueError(f"{unit} is not a unit modulo {level}")
    return u


@dataclass(frozen=True)
class GaloisElement:
    """The automorphism zeta -> zeta^unit of Q(zeta_level)."""

    level: int
    unit: int

    def __post_init__(self):
        object.__setattr__(self, "unit", _norm_unit(self.level, self.unit))

    def compose(self, other: "GaloisElement") -> "GaloisElement":
        if self.level != other.level:
            raise LevelMismatchError("cannot compose automorphisms of different levels")
        return GaloisElement(self.level, (self.unit * other.unit) % self.level if self.level > 1 else 1)

    def inverse(self) -> "GaloisElement":
        if self.level == 1:
            return self
        return GaloisElement(self.level, pow(self.unit, -1, self.level))

    def is_identity(self) -> bool:
        return self.unit == 1


def identity(level: int) -> GaloisElement:
    return GaloisElement(level, 1)


def unit_group(n: int) -> list[GaloisElement]:
    """All automorphisms of Q(zeta_n), ascending by unit; phi(n) of them."""
    if n == 1:
        return [GaloisElement(1, 1)]
    return [GaloisElement(n, u) for u in range(1, n) if gcd(u, n) == 1]


def restrict(sigma: GaloisElement, n: int) -> GaloisElement:
    """Restriction of an automorphism to the subfield Q(zeta_n), n | level."""
    if sigma.level % n != 0:
        raise NonDivisibleError(f"{n} does not divide {sigma.level}")
    return GaloisElement(n, sigma.unit % n if n > 1 else 1)


def kernel_units(m: int, n: int) -> list[GaloisElement]:
    """Automorphisms at level m fixing Q(zeta_n) pointwise (units = 1 mod n)."""
    if m % n != 0:
        raise NonDivisibleError(f"{n} does not divide {m}")
    if m == 1:
        return [GaloisElement(1, 1)]
    return [GaloisElement(m, u) for u in range(1, m, n) if gcd(u, m) == 1]


# --------------------------------------------------------------------------
# field elements


def _to_fraction_tuple(values) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class CycloElement:
    """Element of Q(zeta_level) in reduced power-basis coordinates."""

    level: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = _to_fraction_tuple(self.coeffs)
        phi = euler_phi(self.level)
        if len(coeffs) != phi:
            raise ValueError(f"level {self.level} needs {phi} coordinates, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    # construction -------------------------------------------------------

    @classmethod
    def from_rational(cls, level: int, value: RationalLike) -> "CycloElement":
        phi = euler_phi(level)
        coeffs = [Fraction(value)] + [Fraction(0)] * (phi - 1)
        return cls(level, tuple(coeffs))

    @classmethod
    def zeta(cls, level: int, power: int = 1) -> "CycloElement":
        row = power_table(level)[power % level]
        return cls(level, _to_fraction_tuple(row))

    @classmethod
    def zero(cls, level: int) -> "CycloElement":
        return cls.from_rational(level, 0)

    @classmethod
    def one(cls, level: int) -> "CycloElement":
        return cls.from_rational(level, 1)

    # predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coeffs[0]

    # arithmetic ---------------------------------------------------------

    def _check(self, other: "CycloElement"):
        if self.level != other.level:
            raise LevelMismatchError(
                f"levels {self.level} and {other.level}; embed to a common level first"
            )

    def __add__(self, other: "CycloElement") -> "CycloElement":
        self._check(other)
        return CycloElement(self.level, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "CycloElement") -> "CycloElement":
        self._check(other)
        return CycloElement(self.level, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CycloElement":
        return CycloElement(self.level, tuple(-a for a in self.coeffs))

    def __mul__(self, other: "CycloElement") -> "CycloElement":
        self._check(other)
        n, phi = self.level, len(self.coeffs)
        na, da = _int_poly(self.coeffs)
        nb, db = _int_poly(other.coeffs)
        conv = [0] * (2 * phi - 1)
        for i, ca in enumerate(na):
            if ca:
                for j, cb in enumerate(nb):
                    conv[i + j] += ca * cb
        table = power_table(n)
        acc = [0] * phi
        for j, c in enumerate(conv):
            if not c:
                continue
            if j < phi:
                acc[j] += c
            else:
                row = table[j % n]
                for k in range(phi):
                    if row[k]:
                        acc[k] += c * row[k]
        den = da * db
        return CycloElement(n, tuple(Fraction(a, den) for a in acc))

    def scale(self, factor: RationalLike) -> "CycloElement":
        f = Fraction(factor)
        return CycloElement(self.level, tuple(c * f for c in self.coeffs))

    def inverse(self) -> "CycloElement":
        if self.is_zero():
            raise DivisionByZeroError("zero has no inverse")
        modulus = [Fraction(c) for c in cyclotomic_int(self.level)]
        inv = inverse_mod_poly(list(self.coeffs), modulus)
        inv += [Fraction(0)] * (len(self.coeffs) - len(inv))
        return CycloElement(self.level, tuple(inv))

    # ---------------------------------------------------------------------

    def denominator(self) -> int:
        """Least positive integer clearing all coordinate denominators."""
        return lcm(*(c.denominator for c in self.coeffs)) if self.coeffs else 1


def _int_poly(coeffs: tuple[Fraction, ...]) -> tuple[list[int], int]:
    den = lcm(*(c.denominator for c in coeffs))
    return [int(c * den) for c in coeffs], den


# --------------------------------------------------------------------------
# maps between levels and the Galois action


def embed(alpha: CycloElement, m: int) -> CycloElement:
    """Image of ``alpha`` under zeta_n -> zeta_m^(m/n); requires n | m."""
    n = alpha.level
    if m % n != 0:
        raise NonDivisibleError(f"{n} does not divide {m}")
    if m == n:
        return alpha
    step = m // n
    table = power_table(m)
    phi_m = euler_phi(m)
    acc = [Fraction(0)] * phi_m
    for k, c in enumerate(alpha.coeffs):
        if c:
            row = table[(k * step) % m]
            for t in range(phi_m):
                if row[t]:
                    acc[t] += c * row[t]
    return CycloElement(m, tuple(acc))


def apply_automorphism(sigma: GaloisElement, alpha: CycloElement) -> CycloElement:
    """zeta -> zeta^unit extended to a field automorphism."""
    if sigma.level != alpha.level:
        raise LevelMismatchError("automorphism and element live at different levels")
    n = alpha.level
    if sigma.unit == 1:
        return alpha
    table = power_table(n)
    phi = len(alpha.coeffs)
    acc = [Fraction(0)] * phi
    for k, c in enumerate(alpha.coeffs):
        if c:
            row = table[(k * sigma.unit) % n]
            for t in range(phi):
                if row[t]:
                    acc[t] += c * row[t]
    return CycloElement(n, tuple(acc))


def denominator_primes(alpha: CycloElement) -> set[int]:
    """Primes dividing the minimal integer m with m*alpha integral.

    The power basis generates the full ring of integers of Q(zeta_n),
    so alpha is integral at every place above every prime not returned.
    """
    den = alpha.denominator()
    if den == 1:
        return set()
    return set(int(p) for p in sympy.factorint(den))


# --------------------------------------------------------------------------
# subfield membership


def fixed_by_kernel(alpha: CycloElement, n: int) -> bool:
    """True when alpha is fixed by every automorphism that fixes Q(zeta_n)."""
    m = alpha.level
    for sigma in kernel_units(m, n):
        if not sigma.is_identity() and apply_automorphism(sigma, alpha) != alpha:
            return False
    return True


@lru_cache(maxsize=None)
def _embedding_columns(m: int, n: int) -> tuple[tuple[int, ...], ...]:
    step = m // n
    table = power_table(m)
    return tuple(table[(k * step) % m] for k in range(euler_phi(n)))


def restrict_element(alpha: CycloElement, n: int) -> CycloElement | None:
    """Coordinates of alpha in Q(zeta_n) when it lies there, else None."""
    m = alpha.level
    if m % n != 0:
        raise NonDivisibleError(f"{n} does not divide {m}")
    if m == n:
        return alpha
    if not fixed_by_kernel(alpha, n):
        return None
    cols = _embedding_columns(m, n)
    rows = len(cols[0])
    matrix = [[Fraction(cols[k][i]) for k in range(len(cols))] for i in range(rows)]
    sol = solve_exact(matrix, list(alpha.coeffs))
    if sol is None:
        return None
    return CycloElement(n, tuple(sol))

"""Finite-precision arithmetic in completions at unramified primes.

A local context fixes a prime p, a conductor n with p not dividing n,
and a working precision N.  The n-th cyclotomic polynomial is factored
modulo p (all factors share the residue degree f, the order of p mod n)
and each factor is Hensel-lifted to modulus p^N.  Factors are matched
to places by the canonical rule: the lexicographically least lifted
factor h_0 is the identity coset, and the coset of a corresponds to
the factor annihilating the image of zeta^a modulo (h_0, p).

Local elements store a residue polynomial modulo (factor, p^N) plus an
explicit integer power of p, so entries with denominators at p keep
exact negative valuations.  Balls use the strict convention
|x - c| < p^(-k)  iff  val(x - c) >= k + 1.

Archimedean embeddings return complex intervals with exact rational
endpoints; only the initial cos/sin enclosures involve rounding, which
is outward.  Membership tests on such intervals are three-valued and
return UNDECIDED when an interval straddles the boundary.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath
import numpy as np
import sympy
from sympy.polys.domains import ZZ
from sympy.polys.factortools import dup_zz_hensel_lift
from sympy.polys.galoistools import gf_factor_sqf, gf_from_int_poly, gf_to_int_poly

from .cyclotomic import CycloElement
from .errors import (
    ContextMismatchError,
    PrecisionError,
    PrecisionExhaustedError,
    RamifiedError,
)
from .places import ARCH, FinitePlace, places_above
from .polys import cyclotomic_int, euler_phi, multiplicative_order


class _Bottom:
    """Valuation indistinguishable from infinity at the working precision."""

    __slots__ = ()

    def __repr__(self):
        return "BOTTOM"


class _Undecided:
    """Three-valued archimedean membership: the interval straddles."""

    __slots__ = ()

    def __repr__(self):
        return "UNDECIDED"


BOTTOM = _Bottom()
UNDECIDED = _Undecided()


# --------------------------------------------------------------------------
# mod-p polynomial helpers (ascending coefficient tuples)


def _fp_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mulmod(a: list[int], b: list[int], h: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    # reduce modulo monic h
    deg = len(h) - 1
    for i in range(len(out) - 1, deg - 1, -1):
        c = out[i]
        if c:
            for j in range(deg + 1):
                out[i - deg + j] = (out[i - deg + j] - c * h[j]) % p
    return _fp_trim(out[:deg])


def _fp_powmod(base: list[int], e: int, h: list[int], p: int) -> list[int]:
    result = [1]
    b = list(base)
    while e:
        if e & 1:
            result = _fp_mulmod(result, b, h, p)
        b = _fp_mulmod(b, b, h, p)
        e >>= 1
    return result


def _fp_eval(poly: list[int], point: list[int], h: list[int], p: int) -> list[int]:
    """Horner evaluation of ``poly`` at ``point`` inside F_p[x]/(h)."""
    acc: list[int] = []
    for c in reversed(poly):
        acc = _fp_mulmod(acc, point, h, p)
        if c % p:
            if acc:
                acc[0] = (acc[0] + c) % p
                acc = _fp_trim(acc)
            else:
                acc = [c % p]
    return acc


# --------------------------------------------------------------------------
# local contexts


@dataclass(frozen=True)
class LocalContext:
    """Factored, Hensel-lifted model of the completions above p at level n."""

    p: int
    n: int
    N: int
    f: int
    factors: tuple[tuple[int, ...], ...]  # ascending, monic, coeffs in [0, p^N)
    place_of_factor: tuple[int, ...]  # factor index -> coset representative

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def factor_index(self, place: FinitePlace) -> int:
        if place.level != self.n or place.base != self.p:
            raise ContextMismatchError(
                f"place {place.serialize()} does not match context (p={self.p}, n={self.n})"
            )
        try:
            return self.place_of_factor.index(place.coset_rep)
        except ValueError:
            raise ContextMismatchError(f"unknown coset {place.coset_rep}")

    def place_of(self, index: int) -> FinitePlace:
        return FinitePlace(self.n, self.p, self.place_of_factor[index])


def build_context(p: int, n: int, N: int) -> LocalContext:
    """Factor Phi_n mod p, lift to p^N, and fix the factor/place matching."""
    if N < 1:
        raise PrecisionError("precision must be at least 1")
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    if n % p == 0:
        raise RamifiedError(f"{p} divides {n}; ramified valuations are unsupported")
    f = multiplicative_order(p % n, n) if n > 1 else 1
    phi = euler_phi(n)
    modulus = p**N
    phi_poly = cyclotomic_int(n)

    if f == phi:
        factors = [tuple(c % modulus for c in phi_poly)]
    else:
        desc = [int(c) for c in reversed(phi_poly)]
        _, raw = gf_factor_sqf(gf_from_int_poly(desc, p), p, ZZ)
        sym = [[ZZ(c) for c in gf_to_int_poly(h, p)] for h in raw]
        lifted = dup_zz_hensel_lift(ZZ(p), [ZZ(c) for c in desc], sym, N, ZZ)
        factors = [tuple(int(c) % modulus for c in reversed(h)) for h in lifted]
        factors.sort()

    # bit-exact congruence check: the lifted factors multiply back to Phi_n
    prod = [1]
    for h in factors:
        nxt = [0] * (len(prod) + len(h) - 1)
        for i, ca in enumerate(prod):
            if ca:
                for j, cb in enumerate(h):
                    nxt[i + j] = (nxt[i + j] + ca * cb) % modulus
        prod = nxt
    if prod != [c % modulus for c in phi_poly]:
        raise ArithmeticError("lifted factors do not multiply back to Phi_n")

    place_of_factor = [0] * len(factors)
    if n == 1:
        place_of_factor[0] = 1
    else:
        h0 = [c % p for c in factors[0]]
        factors_mod_p = [[c % p for c in h] for h in factors]
        assigned = set()
        for place in places_above(n, p):
            a = place.coset_rep
            xa = _fp_powmod([0, 1], a, h0, p)
            hits = [j for j, h in enumerate(factors_mod_p) if not _fp_eval(h, xa, h0, p)]
            if len(hits) != 1:
                raise ArithmeticError(f"coset {a}: factor match not unique ({hits})")
            if hits[0] in assigned:
                raise ArithmeticError("factor matched twice")
            assigned.add(hits[0])
            place_of_factor[hits[0]] = a
    return LocalContext(p, n, N, f, tuple(factors), tuple(place_of_factor))


# --------------------------------------------------------------------------
# local elements


@dataclass(frozen=True)
class LocalElement:
    """p^exponent times a residue polynomial modulo (factor, p^N)."""

    ctx: LocalContext
    factor_index: int
    coeffs: tuple[int, ...]
    exponent: int = 0

    def __post_init__(self):
        mod = self.ctx.modulus
        cs = tuple(int(c) % mod for c in self.coeffs)
        cs = cs + (0,) * (self.ctx.f - len(cs))
        object.__setattr__(self, "coeffs", cs[: self.ctx.f])

    def _check(self, other: "LocalElement"):
        if self.ctx != other.ctx or self.factor_index != other.factor_index:
            raise ContextMismatchError("elements live in different local slots")

    def is_residue_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def valuation_bound(self) -> tuple[int, bool]:
        """(lower bound, exact?) for the valuation; bound = exponent + N if the
        residue vanishes at working precision."""
        if self.is_residue_zero():
            return self.exponent + self.ctx.N, False
        v = min(_val_int(c, self.ctx.p) for c in self.coeffs if c != 0)
        return self.exponent + v, True

    def valuation(self):
        """Exact valuation, or BOTTOM when indistinguishable from zero."""
        bound, exact = self.valuation_bound()
        return bound if exact else BOTTOM

    def __add__(self, other: "LocalElement") -> "LocalElement":
        self._check(other)
        e = min(self.exponent, other.exponent)
        p, mod = self.ctx.p, self.ctx.modulus
        sa = p ** (self.exponent - e)
        sb = p ** (other.exponent - e)
        cs = tuple((sa * a + sb * b) % mod for a, b in zip(self.coeffs, other.coeffs))
        return LocalElement(self.ctx, self.factor_index, cs, e)

    def __sub__(self, other: "LocalElement") -> "LocalElement":
        return self + (-other)

    def __neg__(self) -> "LocalElement":
        mod = self.ctx.modulus
        return LocalElement(
            self.ctx, self.factor_index, tuple((-c) % mod for c in self.coeffs), self.exponent
        )

    def __mul__(self, other: "LocalElement") -> "LocalElement":
        self._check(other)
        h = self.ctx.factors[self.factor_index]
        cs = _residue_mulmod(self.coeffs, other.coeffs, h, self.ctx.modulus)
        return LocalElement(self.ctx, self.factor_index, cs, self.exponent + other.exponent)

    def abs_value(self) -> Fraction:
        """|x| = p^(-val); requires a resolvable valuation."""
        v = self.valuation()
        if v is BOTTOM:
            raise PrecisionExhaustedError("absolute value below working precision")
        return Fraction(1, self.ctx.p**v) if v >= 0 else Fraction(self.ctx.p ** (-v))


def _val_int(c: int, p: int) -> int:
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


def _residue_mulmod(a, b, h, modulus) -> tuple[int, ...]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % modulus
    deg = len(h) - 1
    for i in range(len(out) - 1, deg - 1, -1):
        c = out[i]
        if c:
            for j in range(deg + 1):
                out[i - deg + j] = (out[i - deg + j] - c * h[j]) % modulus
    return tuple(out[:deg])


def from_integer(ctx: LocalContext, factor_index: int, value: int) -> LocalElement:
    return LocalElement(ctx, factor_index, (value % ctx.modulus,) + (0,) * (ctx.f - 1))


def localize(alpha: CycloElement, ctx: LocalContext, place: FinitePlace) -> LocalElement:
    """Image of a global element in the completion at ``place``.

    Denominator powers of p become the explicit exponent; the prime-to-p
    denominator part is inverted modulo p^N.
    """
    if alpha.level != ctx.n:
        raise ContextMismatchError(f"element level {alpha.level} != context level {ctx.n}")
    j = ctx.factor_index(place)
    den = alpha.denominator()
    k = _val_int(den, ctx.p) if den % ctx.p == 0 else 0
    if k > ctx.N:
        raise PrecisionExhaustedError(f"denominator exponent {k} exceeds precision {ctx.N}")
    dprime = den // ctx.p**k
    nums = [int(c * den) for c in alpha.coeffs]
    h = ctx.factors[j]
    mod = ctx.modulus
    res = [c % mod for c in nums]
    deg = len(h) - 1
    for i in range(len(res) - 1, deg - 1, -1):
        c = res[i]
        if c:
            for t in range(deg + 1):
                res[i - deg + t] = (res[i - deg + t] - c * h[t]) % mod
    res = res[:deg] + [0] * max(0, deg - len(res))
    inv = pow(dprime % mod, -1, mod)
    res = tuple((c * inv) % mod for c in res)
    return LocalElement(ctx, j, res, -k)


def valuation(x: LocalElement):
    return x.valuation()


def frobenius(x: LocalElement) -> LocalElement:
    """The p-power map; reduces to the residue Frobenius modulo p."""
    h = x.ctx.factors[x.factor_index]
    result: tuple[int, ...] = (1,) + (0,) * (x.ctx.f - 1)
    base = x.coeffs
    e = x.ctx.p
    while e:
        if e & 1:
            result = _residue_mulmod(result, base, h, x.ctx.modulus)
        base = _residue_mulmod(base, base, h, x.ctx.modulus)
        e >>= 1
    return LocalElement(x.ctx, x.factor_index, result, x.exponent * x.ctx.p)


# --------------------------------------------------------------------------
# balls


@dataclass(frozen=True)
class PadicBall:
    """Open ball |x - center| < p^(-k), i.e. val(x - center) >= k + 1."""

    center: LocalElement
    k: int


def ball_contains(ball: PadicBall, x: LocalElement) -> bool:
    diff = x - ball.center
    bound, exact = diff.valuation_bound()
    if bound >= ball.k + 1:
        return True
    if exact:
        return False
    raise PrecisionExhaustedError(
        f"cannot separate at radius p^-{ball.k} with precision {x.ctx.N}"
    )


@dataclass(frozen=True)
class SweepReport:
    checked: int
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _p_power(p: int, e: int) -> Fraction:
    return Fraction(p**e) if e >= 0 else Fraction(1, p ** (-e))


def sample_threshold(p: int, rho: Fraction) -> int:
    """Least integer t with p^(-t) < rho."""
    t = -64
    while _p_power(p, -t) >= rho:
        t += 1
        if t > 10**6:
            raise ValueError("radius too small")
    return t


def ball_arithmetic_check(
    x: LocalElement,
    y: LocalElement,
    k: int,
    op: str = "add",
    samples: int = 200,
    rng=None,
    exhaustive_limit: int = 4096,
) -> SweepReport:
    """Sample the input balls of the sum/product containment and verify the
    images land in the target ball of radius p^(-k).

    Additive inputs use radius r/2; multiplicative inputs use
    min(1, r / (1 + |x| + |y|)).  Sampling is exhaustive over residues
    when the sample space is small, randomized otherwise.
    """
    import random

    x._check(y)
    ctx = x.ctx
    p = ctx.p
    r = _p_power(p, -k)
    if op == "add":
        t = sample_threshold(p, r / 2)
        target = PadicBall(x + y, k)
    elif op == "mul":
        rho = min(Fraction(1), r / (1 + x.abs_value() + y.abs_value()))
        t = sample_threshold(p, rho)
        target = PadicBall(x * y, k)
    else:
        raise ValueError(f"unknown op {op!r}")
    if t > ctx.N:
        raise PrecisionExhaustedError(f"sample radius p^-{t} finer than precision {ctx.N}")

    width = ctx.N - t
    space = (p**width) ** ctx.f
    rng = rng or random.Random(0)

    def perturb(base: LocalElement, digits: list[int]) -> LocalElement:
        delta = tuple((p**t * d) % ctx.modulus for d in digits)
        return base + LocalElement(ctx, base.factor_index, delta, 0)

    def run(d1: list[int], d2: list[int]) -> str | None:
        a = perturb(x, d1)
        b = perturb(y, d2)
        img = a + b if op == "add" else a * b
        if not ball_contains(target, img):
            return f"{op}: digits {d1}/{d2} escape radius p^-{k}"
        return None

    violations: list[str] = []
    checked = 0
    if space**2 <= exhaustive_limit:
        from itertools import product

        digit_space = list(product(range(p**width), repeat=ctx.f))
        for d1 in digit_space:
            for d2 in digit_space:
                checked += 1
                bad = run(list(d1), list(d2))
                if bad:
                    violations.append(bad)
    else:
        for _ in range(samples):
            checked += 1
            d1 = [rng.randrange(p**width) for _ in range(ctx.f)]
            d2 = [rng.randrange(p**width) for _ in range(ctx.f)]
            bad = run(d1, d2)
            if bad:
                violations.append(bad)
    return SweepReport(checked, tuple(violations))


# --------------------------------------------------------------------------
# archimedean embeddings


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")

    def __add__(self, other):
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other):
        return RationalInterval(self.lo - other.hi, self.hi - other.lo)

    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __mul__(self, other):
        prods = [
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        ]
        return RationalInterval(min(prods), max(prods))

    def scale(self, c: Fraction) -> "RationalInterval":
        a, b = self.lo * c, self.hi * c
        return RationalInterval(min(a, b), max(a, b))

    def square(self) -> "RationalInterval":
        if self.lo <= 0 <= self.hi:
            return RationalInterval(Fraction(0), max(self.lo * self.lo, self.hi * self.hi))
        vals = (self.lo * self.lo, self.hi * self.hi)
        return RationalInterval(min(vals), max(vals))

    def contains(self, value: Fraction) -> bool:
        return self.lo <= value <= self.hi

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @classmethod
    def point(cls, value) -> "RationalInterval":
        v = Fraction(value)
        return cls(v, v)


@dataclass(frozen=True)
class ComplexInterval:
    re: RationalInterval
    im: RationalInterval

    def __add__(self, other):
        return ComplexInterval(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return ComplexInterval(self.re - other.re, self.im - other.im)

    def abs_squared(self) -> RationalInterval:
        return self.re.square() + self.im.square()

    def conjugate(self) -> "ComplexInterval":
        return ComplexInterval(self.re, -self.im)

    @classmethod
    def point(cls, re, im=0) -> "ComplexInterval":
        return cls(RationalInterval.point(re), RationalInterval.point(im))


def _mpf_to_fraction(t) -> Fraction:
    sign, man, exp, _ = t
    man = int(man)
    if man == 0:
        if exp == 0:
            return Fraction(0)
        raise ArithmeticError("nonfinite interval endpoint")
    value = Fraction(man) * Fraction(2) ** int(exp)
    return -value if sign else value


from functools import lru_cache


@lru_cache(maxsize=4096)
def _root_of_unity_interval(a: int, n: int, bits: int) -> ComplexInterval:
    """Rigorous enclosure of exp(2*pi*i*a/n) at the requested precision."""
    iv = mpmath.iv
    old = iv.prec
    try:
        iv.prec = bits + 12
        ang = iv.pi * 2 * a / n
        c, s = iv.cos(ang), iv.sin(ang)
        re = RationalInterval(*(_mpf_to_fraction(e) for e in c._mpi_))
        im = RationalInterval(*(_mpf_to_fraction(e) for e in s._mpi_))
    finally:
        iv.prec = old
    return ComplexInterval(re, im)


def arch_embed(alpha: CycloElement, arch_place: FinitePlace, precision_bits: int = 64) -> ComplexInterval:
    """Numeric value of alpha under zeta -> exp(2*pi*i*a/n) for the place's
    coset representative a, as an outward-rounded complex interval."""
    if not arch_place.is_arch:
        raise ContextMismatchError("arch_embed needs an archimedean place")
    if arch_place.level != alpha.level:
        raise ContextMismatchError("place and element levels differ")
    n = alpha.level
    a = arch_place.coset_rep
    total = ComplexInterval.point(0)
    for k, c in enumerate(alpha.coeffs):
        if c == 0:
            continue
        root = _root_of_unity_interval((a * k) % n, n, precision_bits)
        total = total + ComplexInterval(root.re.scale(c), root.im.scale(c))
    return total


def arch_ball_contains(
    value: ComplexInterval, center: ComplexInterval, radius: Fraction
):
    """|value - center| < radius, three-valued on boundary straddle."""
    s = (value - center).abs_squared()
    r2 = radius * radius
    if s.hi < r2:
        return True
    if s.lo >= r2:
        return False
    return UNDECIDED


# --------------------------------------------------------------------------
# independent factor-count oracle


def count_cyclotomic_factors(n: int, p: int) -> int:
    """Number of irreducible factors of Phi_n modulo p, for p not dividing n.

    Computed polynomially: the order f of the Frobenius map x -> x^p on
    the class of x in F_p[x]/(Phi_n) is found by iterating an explicit
    Frobenius matrix, and the factor count is phi(n)/f (the factors of a
    cyclotomic polynomial at an unramified prime share their degree).
    """
    if n % p == 0:
        raise RamifiedError(f"{p} divides {n}")
    phi_coeffs = np.array(cyclotomic_int(n), dtype=np.int64) % p
    deg = len(phi_coeffs) - 1
    if deg == 1:
        return 1
    negphi = (-phi_coeffs[:deg]) % p
    rows = np.zeros((deg - 1, deg), dtype=np.int64)
    cur = negphi.copy()
    rows[0] = cur
    for t in range(1, deg - 1):
        top = cur[deg - 1]
        cur = np.roll(cur, 1)
        cur[0] = 0
        cur = (cur + top * negphi) % p
        rows[t] = cur

    def mulmod(a, b):
        c = np.convolve(a, b) % p
        if len(c) <= deg:
            out = np.zeros(deg, dtype=np.int64)
            out[: len(c)] = c
            return out
        return (c[:deg] + c[deg:] @ rows[: len(c) - deg]) % p

    xp = np.zeros(deg, dtype=np.int64)
    xp[0] = 1
    base = np.zeros(deg, dtype=np.int64)
    base[1] = 1
    e = p
    while e:
        if e & 1:
            xp = mulmod(xp, base)
        base = mulmod(base, base)
        e >>= 1
    frob = np.zeros((deg, deg), dtype=np.int64)
    col = np.zeros(deg, dtype=np.int64)
    col[0] = 1
    frob[:, 0] = col
    for j in range(1, deg):
        col = mulmod(col, xp)
        frob[:, j] = col
    x_vec = np.zeros(deg, dtype=np.int64)
    x_vec[1] = 1
    y = x_vec.copy()
    f = 0
    while True:
        y = (frob @ y) % p
        f += 1
        if np.array_equal(y, x_vec):
            break
        if f > deg:
            raise ArithmeticError("Frobenius iteration did not close")
    if deg % f:
        raise ArithmeticError("degree not divisible by Frobenius order")
    return deg // f


def berlekamp_factor_count(n: int, p: int) -> int:
    """Factor count as the dimension of the Frobenius fixed space
    (kernel of F - I over F_p); cross-checks the orbit-order route."""
    if n % p == 0:
        raise RamifiedError(f"{p} divides {n}")
    phi_coeffs = np.array(cyclotomic_int(n), dtype=np.int64) % p
    deg = len(phi_coeffs) - 1
    if deg == 1:
        return 1
    negphi = (-phi_coeffs[:deg]) % p
    rows = np.zeros((deg - 1, deg), dtype=np.int64)
    cur = negphi.copy()
    rows[0] = cur
    for t in range(1, deg - 1):
        top = cur[deg - 1]
        cur = np.roll(cur, 1)
        cur[0] = 0
        cur = (cur + top * negphi) % p
        rows[t] = cur

    def mulmod(a, b):
        c = np.convolve(a, b) % p
        if len(c) <= deg:
            out = np.zeros(deg, dtype=np.int64)
            out[: len(c)] = c
            return out
        return (c[:deg] + c[deg:] @ rows[: len(c) - deg]) % p

    xp = np.zeros(deg, dtype=np.int64)
    xp[0] = 1
    base = np.zeros(deg, dtype=np.int64)
    base[1] = 1
    e = p
    while e:
        if e & 1:
            xp = mulmod(xp, base)
        base = mulmod(base, base)
        e >>= 1
    mat = np.zeros((deg, deg), dtype=np.int64)
    col = np.zeros(deg, dtype=np.int64)
    col[0] = 1
    mat[:, 0] = col
    for j in range(1, deg):
        col = mulmod(col, xp)
        mat[:, j] = col
    mat = (mat - np.eye(deg, dtype=np.int64)) % p
    # Gaussian elimination mod p for the rank
    rank = 0
    row = 0
    for colidx in range(deg):
        sel = None
        for r in range(row, deg):
            if mat[r, colidx] % p:
                sel = r
                break
        if sel is None:
            continue
        mat[[row, sel]] = mat[[sel, row]]
        inv = pow(int(mat[row, colidx]), -1, p)
        mat[row] = (mat[row] * inv) % p
        for r in range(deg):
            if r != row and mat[r, colidx]:
                mat[r] = (mat[r] - mat[r, colidx] * mat[row]) % p
        rank += 1
        row += 1
        if row == deg:
            break
    return deg - rank


# --------------------------------------------------------------------------
# context cache (schema lctx/1)


def context_to_json(ctx: LocalContext) -> dict:
    return {
        "schema": "lctx/1",
        "p": ctx.p,
        "n": ctx.n,
        "N": ctx.N,
        "f": ctx.f,
        "factors": [list(h) for h in ctx.factors],
        "place_of_factor": list(ctx.place_of_factor),
    }


def context_from_json(data: dict) -> LocalContext:
    if data.get("schema") != "lctx/1":
        raise ValueError("not an lctx/1 document")
    ctx = LocalContext(
        int(data["p"]),
        int(data["n"]),
        int(data["N"]),
        int(data["f"]),
        tuple(tuple(int(c) for c in h) for h in data["factors"]),
        tuple(int(r) for r in data["place_of_factor"]),
    )
    # refuse cached contexts that fail the product congruence
    mod = ctx.modulus
    prod = [1]
    for h in ctx.factors:
        nxt = [0] * (len(prod) + len(h) - 1)
        for i, ca in enumerate(prod):
            if ca:
                for j, cb in enumerate(h):
                    nxt[i + j] = (nxt[i + j] + ca * cb) % mod
        prod = nxt
    if prod != [c % mod for c in cyclotomic_int(ctx.n)]:
        raise ValueError("cached context fails the product congruence")
    return ctx


@lru_cache(maxsize=128)
def cached_context(p: int, n: int, N: int) -> LocalContext:
    """Memoized context builder; consults the ADELION_CACHE directory when set."""
    return load_or_build_context(p, n, N, os.environ.get("ADELION_CACHE"))


def load_or_build_context(p: int, n: int, N: int, cache_dir: str | None = None) -> LocalContext:
    """Build a context, consulting/filling a JSON cache directory when given
    (the CLI passes ADELION_CACHE)."""
    if cache_dir:
        path = os.path.join(cache_dir, f"lctx_p{p}_n{n}_N{N}.json")
        if os.path.exists(path):
            try:
                with open(path, "r", encoding="utf-8") as fh:
                    return context_from_json(json.load(fh))
            except (ValueError, KeyError, json.JSONDecodeError):
                pass  # fall through and rebuild
        ctx = build_context(p, n, N)
        os.makedirs(cache_dir, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(context_to_json(ctx), fh, sort_keys=True)
        return ctx
    return build_context(p, n, N)

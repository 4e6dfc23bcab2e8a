"""Dense polynomial helpers shared by the exact and the p-adic layers.

Coefficient lists are ascending (index = degree) throughout the package.
Integer cyclotomic polynomials and the power tables ``x^j mod Phi_n``
are cached per conductor; both have modest coefficients because the
roots are simple and lie on the unit circle.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd


@lru_cache(maxsize=None)
def cyclotomic_int(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial over Z, ascending."""
    if n < 1:
        raise ValueError("conductor must be positive")
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _exact_div_int(poly, list(cyclotomic_int(d)))
    return tuple(poly)


def _exact_div_int(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials, den monic."""
    dn = len(den) - 1
    q = [0] * (len(num) - dn)
    r = list(num)
    for i in range(len(q) - 1, -1, -1):
        c = r[i + dn]
        q[i] = c
        if c:
            for j, pc in enumerate(den):
                r[i + j] -= c * pc
    if any(r[: dn]):
        raise ArithmeticError("division was not exact")
    return q


def euler_phi(n: int) -> int:
    return len(cyclotomic_int(n)) - 1 if n > 1 else 1


@lru_cache(maxsize=None)
def power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """x^j mod Phi_n for 0 <= j < n, as integer vectors of length phi(n).

    Since x^n = 1 modulo Phi_n, every exponent reduces into this table.
    """
    phi = list(cyclotomic_int(n))
    deg = len(phi) - 1
    rows: list[tuple[int, ...]] = []
    cur = [0] * deg
    if deg > 0:
        cur[0] = 1
    for _ in range(max(n, 1)):
        rows.append(tuple(cur))
        top = cur[deg - 1] if deg > 0 else 0
        nxt = [0] + cur[: deg - 1]
        if top:
            for k in range(deg):
                nxt[k] -= top * phi[k]
        cur = nxt
    return tuple(rows)


def multiplicative_order(a: int, n: int) -> int:
    """Order of a modulo n; a must be a unit."""
    if n == 1:
        return 1
    if gcd(a, n) != 1:
        raise ValueError(f"{a} is not a unit modulo {n}")
    x = a % n
    k = 1
    while x != 1:
        x = (x * a) % n
        k += 1
    return k


# --- arithmetic over Q for field inversion -------------------------------

def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod_q(a: list[Fraction], b: list[Fraction]):
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    inv_lead = 1 / b[-1]
    for i in range(len(q) - 1, -1, -1):
        if len(r) < len(b) + i:
            continue
        c = r[len(b) + i - 1] * inv_lead
        q[i] = c
        if c:
            for j, pc in enumerate(b):
                r[i + j] -= c * pc
    return q, _trim(r)


def inverse_mod_poly(a: list[Fraction], modulus: list[Fraction]) -> list[Fraction]:
    """Inverse of ``a`` in Q[x]/(modulus); modulus must be irreducible."""
    r0, r1 = list(modulus), _trim(list(a))
    if not r1:
        raise ZeroDivisionError("zero has no inverse")
    s0: list[Fraction] = []
    s1: list[Fraction] = [Fraction(1)]
    while r1:
        q, r = _poly_divmod_q(r0, r1)
        r0, r1 = r1, r
        # s_next = s0 - q*s1
        prod = [Fraction(0)] * (len(q) + len(s1) - 1) if q and s1 else []
        for i, qc in enumerate(q):
            if qc:
                for j, sc in enumerate(s1):
                    prod[i + j] += qc * sc
        nxt = [Fraction(0)] * max(len(s0), len(prod))
        for i, c in enumerate(s0):
            nxt[i] += c
        for i, c in enumerate(prod):
            nxt[i] -= c
        s0, s1 = s1, _trim(nxt)
    if len(r0) != 1:
        raise ArithmeticError("element not invertible modulo the given polynomial")
    lead = r0[0]
    return [c / lead for c in s0]


# --- exact linear algebra -------------------------------------------------

def solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Solve an (m x k) rational system exactly, m >= k.

    Returns the unique solution, or None when the system is inconsistent
    or underdetermined.  Plain Gaussian elimination; sizes here are tiny.
    """
    m = len(matrix)
    if m == 0:
        return []
    k = len(matrix[0])
    aug = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    pivots: list[int] = []
    row = 0
    for col in range(k):
        sel = next((r for r in range(row, m) if aug[r][col] != 0), None)
        if sel is None:
            return None  # rank-deficient: no unique solution
        aug[row], aug[sel] = aug[sel], aug[row]
        inv = 1 / aug[row][col]
        aug[row] = [c * inv for c in aug[row]]
        for r in range(m):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    if len(pivots) < k:
        return None
    # consistency of the remaining rows
    for r in range(m):
        if all(aug[r][c] == 0 for c in range(k)) and aug[r][k] != 0:
            return None
    sol = [Fraction(0)] * k
    for r, col in enumerate(pivots):
        sol[col] = aug[r][k]
    return sol

"""Exact and approximate scalar backends.

Three coefficient backends are used throughout:

* exact rationals (``gmpy2.mpq``), the default field for every polynomial
  and matrix computation;
* modular residues for fast certified rank computation (see ``ranks``);
* high-precision binary floats (``mpmath``) for identity spot checks that
  involve non-rational unit normals.
"""

from __future__ import annotations

import mpmath
from gmpy2 import mpq, mpz

Rational = type(mpq())

ZERO = mpq(0)
ONE = mpq(1)


class ZeroDenominatorError(ZeroDivisionError):
    """Raised when a rational is constructed with denominator zero."""


class BadPrimeError(ValueError):
    """Raised when a rational cannot be reduced modulo p (p | denominator).

    Callers retry with the next prime from PRIMES.
    """


def rational_reduce(n, d=1) -> Rational:
    """Exact rational n/d in lowest terms with positive denominator."""
    if d == 0:
        raise ZeroDenominatorError("denominator must be nonzero")
    return mpq(n, d)


def rat(n, d=1) -> Rational:
    return rational_reduce(n, d)


# Fixed, documented prime list for modular rank computation.  All primes sit
# just below 2**25 so that a mod-p matrix product with inner dimension up to
# 8192 never overflows int64 (8192 * (2**25)**2 < 2**63).  A rank claim is
# certified only when at least two primes agree (and, where available, the
# value matches a theorem-predicted count); a single modular rank is only a
# lower bound on the rational rank.
PRIMES = (
    33554393,
    33554383,
    33554371,
    33554347,
    33554341,
    33554317,
    33554291,
    33554273,
)

# Largest safe inner dimension for an int64 mod-p matrix product.
MATMUL_CHUNK = (2**63 - 1) // ((PRIMES[0] - 1) ** 2)

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


assert all(is_prime(p) for p in PRIMES)


class ModResidue:
    """Value in [0, p) for a fixed prime p, with field arithmetic."""

    __slots__ = ("value", "prime")

    def __init__(self, value: int, prime: int):
        if not is_prime(prime):
            raise ValueError(f"{prime} is not prime")
        self.value = value % prime
        self.prime = prime

    def _check(self, other: "ModResidue"):
        if self.prime != other.prime:
            raise ValueError("mixed primes")

    def __add__(self, other):
        self._check(other)
        return ModResidue(self.value + other.value, self.prime)

    def __sub__(self, other):
        self._check(other)
        return ModResidue(self.value - other.value, self.prime)

    def __mul__(self, other):
        self._check(other)
        return ModResidue(self.value * other.value, self.prime)

    def inverse(self) -> "ModResidue":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return ModResidue(pow(self.value, self.prime - 2, self.prime), self.prime)

    def __eq__(self, other):
        return (
            isinstance(other, ModResidue)
            and self.value == other.value
            and self.prime == other.prime
        )

    def __hash__(self):
        return hash((self.value, self.prime))

    def __repr__(self):
        return f"ModResidue({self.value} mod {self.prime})"


def mod_project(x, p: int) -> int:
    """Project a rational onto Z/p as num * den^-1, as a plain int.

    Raises BadPrimeError when p divides the denominator.
    """
    q = mpq(x)
    den = int(q.denominator) % p
    if den == 0:
        raise BadPrimeError(f"denominator of {q} vanishes mod {p}")
    num = int(q.numerator) % p
    return num * pow(den, p - 2, p) % p


def mod_project_residue(x, p: int) -> ModResidue:
    return ModResidue(mod_project(x, p), p)


# BigFloat backend: 256-bit default precision, 1e-40 identity tolerance.
DEFAULT_PRECISION = 256
DEFAULT_TOLERANCE = mpmath.mpf("1e-40")


class BigFloatContext:
    """mpmath context wrapper pinning the working precision (>= 128 bits)."""

    def __init__(self, precision: int = DEFAULT_PRECISION, tolerance=None):
        if precision < 128:
            raise ValueError("precision below 128 bits is not supported")
        self.precision = precision
        self.mp = mpmath.mp.clone()
        self.mp.prec = precision
        self.tolerance = (
            self.mp.mpf("1e-40") if tolerance is None else self.mp.mpf(tolerance)
        )

    def to_float(self, x):
        q = mpq(x)
        return self.mp.mpf(int(q.numerator)) / self.mp.mpf(int(q.denominator))

    def sqrt(self, x):
        return self.mp.sqrt(x)

    def close_to_zero(self, x) -> bool:
        return abs(x) < self.tolerance


def bigfloat(x, precision: int = DEFAULT_PRECISION):
    return BigFloatContext(precision).to_float(x)

"""Base scalar rings: the localization Z_(p) and the chain ring Z/p^N.

Both are valuation rings, so every linear-algebra routine in the package
pivots on minimal p-adic valuation and never needs a gcd.
"""
from __future__ import annotations

from fractions import Fraction
from math import inf


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


class ZLocal:
    """Rationals with denominator prime to p, stored as ``Fraction``."""

    exact = True

    def __init__(self, p: int):
        self.p = p
        self.modulus = None
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def __repr__(self):
        return f"Z_({self.p})"

    def __eq__(self, other):
        return isinstance(other, ZLocal) and other.p == self.p

    def __hash__(self):
        return hash(("ZLocal", self.p))

    def coerce(self, x) -> Fraction:
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise ValueError(f"{x} is not p-integral for p={self.p}")
        return x

    def val(self, x: Fraction):
        return inf if x == 0 else vp(x.numerator, self.p)

    def is_unit(self, x) -> bool:
        return x != 0 and x.numerator % self.p != 0

    def inv_unit(self, x: Fraction) -> Fraction:
        return 1 / Fraction(x)

    def div(self, a, b):
        """Return q with b*q == a; requires val(b) <= val(a)."""
        if a == 0:
            return self.zero
        return Fraction(a) / b

    def residue(self, x: Fraction, e: int) -> int:
        """Canonical representative of x modulo p^e, in [0, p^e)."""
        m = self.p**e
        return x.numerator * pow(x.denominator, -1, m) % m

    def reduce(self, x):
        return x

    def split(self, x):
        """Write nonzero x = p^v * u; return (v, u)."""
        v = self.val(x)
        return v, Fraction(x) / self.p**v

    def to_json(self, x):
        return x.numerator, x.denominator


class ZModPN:
    """The chain ring Z/p^N with elements stored as ints in [0, p^N)."""

    exact = False

    def __init__(self, p: int, N: int):
        if N < 1:
            raise ValueError("precision N must be >= 1")
        self.p = p
        self.N = N
        self.modulus = p**N
        self.zero = 0
        self.one = 1 % self.modulus

    def __repr__(self):
        return f"Z/{self.p}^{self.N}"

    def __eq__(self, other):
        return isinstance(other, ZModPN) and (other.p, other.N) == (self.p, self.N)

    def __hash__(self):
        return hash(("ZModPN", self.p, self.N))

    def coerce(self, x) -> int:
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ValueError(f"{x} is not p-integral for p={self.p}")
            return x.numerator * pow(x.denominator, -1, self.modulus) % self.modulus
        return int(x) % self.modulus

    def val(self, x: int):
        x %= self.modulus
        return inf if x == 0 else vp(x, self.p)

    def is_unit(self, x) -> bool:
        return x % self.p != 0

    def inv_unit(self, x: int) -> int:
        return pow(x, -1, self.modulus)

    def div(self, a, b):
        a %= self.modulus
        if a == 0:
            return 0
        va, ua = self.split(a)
        vb, ub = self.split(b)
        if vb > va:
            raise ZeroDivisionError("divisor has larger valuation")
        return self.p ** (va - vb) * ua * pow(ub, -1, self.modulus) % self.modulus

    def residue(self, x: int, e: int) -> int:
        return x % self.p ** min(e, self.N)

    def reduce(self, x):
        return x % self.modulus

    def split(self, x):
        v = self.val(x)
        return v, (x // self.p**v) % self.modulus

    def to_json(self, x):
        return x, 1

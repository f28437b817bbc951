"""Exact arithmetic in cyclotomic fields Q(zeta_N).

An element is a rational polynomial in zeta_N of degree < phi(N), i.e. its
canonical residue modulo the cyclotomic polynomial Phi_N.  Binary
operations embed both operands into Q(zeta_lcm) first.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import DomainError
from .lattice import cyclotomic_int

__all__ = ["CycloNumber", "zeta", "cot_pi", "csc2_pi", "as_rational", "arith"]


@lru_cache(maxsize=None)
def _phi(N: int) -> tuple:
    return cyclotomic_int(N).coeffs


def _totient(n: int) -> int:
    return len(_phi(n)) - 1


def _mobius(n: int) -> int:
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def _trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _reduce(c: list, N: int) -> list:
    """Remainder of c modulo the monic Phi_N."""
    phi = _phi(N)
    d = len(phi) - 1
    c = list(c)
    for k in range(len(c) - 1, d - 1, -1):
        top = c[k]
        if top:
            for j in range(d + 1):
                c[k - d + j] -= top * phi[j]
    c = c[:d] + [Fraction(0)] * max(0, d - len(c))
    return c


def _mul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _divmod(a: list, b: list):
    a = _trim(list(a))
    b = _trim(list(b))
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for j, y in enumerate(b):
            a[shift + j] -= f * y
        a.pop()
        _trim(a)
    return q, a


def _inverse_mod(a: list, N: int) -> list:
    """Extended Euclid: s with s*a = 1 mod Phi_N."""
    r0, r1 = [Fraction(x) for x in _phi(N)], _trim(list(a))
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = _divmod(r0, r1)
        qs = _mul(q, s1)
        s2 = [x - y for x, y in _pad(s0, qs)]
        r0, r1 = r1, r
        s0, s1 = s1, _trim(s2)
    # r0 is now a nonzero constant (Phi_N is irreducible)
    if len(r0) != 1:
        raise DomainError("element is not invertible")
    c = r0[0]
    return _reduce([x / c for x in s0], N)


def _pad(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return zip(a, b)


class CycloNumber:
    """An element of Q(zeta_N); immutable."""

    __slots__ = ("N", "coeffs")

    def __init__(self, N: int, coeffs=()):
        if N < 1:
            raise DomainError("conductor must be positive")
        c = _reduce([Fraction(x) for x in coeffs], N)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, key, value):
        raise AttributeError("CycloNumber is immutable")

    @classmethod
    def rational(cls, q, N: int = 1) -> "CycloNumber":
        return cls(N, [Fraction(q)])

    def embed(self, M: int) -> "CycloNumber":
        """Image in Q(zeta_M) for a multiple M of N (zeta_N -> zeta_M^(M/N))."""
        if M % self.N:
            raise DomainError(f"{self.N} does not divide {M}")
        step = M // self.N
        c = [Fraction(0)] * (step * (len(self.coeffs) - 1) + 1) if self.coeffs else []
        for k, x in enumerate(self.coeffs):
            c[k * step] = x
        return CycloNumber(M, c)

    def _common(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloNumber.rational(other, self.N)
        if not isinstance(other, CycloNumber):
            return None, None
        M = self.N * other.N // gcd(self.N, other.N)
        a = self if self.N == M else self.embed(M)
        b = other if other.N == M else other.embed(M)
        return a, b

    def __add__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        return CycloNumber(a.N, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.N, [-x for x in self.coeffs])

    def __sub__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        return CycloNumber(a.N, [x - y for x, y in zip(a.coeffs, b.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        return CycloNumber(a.N, _mul(list(a.coeffs), list(b.coeffs)))

    __rmul__ = __mul__

    def inverse(self) -> "CycloNumber":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in a cyclotomic field")
        return CycloNumber(self.N, _inverse_mod(list(self.coeffs), self.N))

    def __truediv__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        base = self if k >= 0 else self.inverse()
        out = CycloNumber.rational(1, self.N)
        for _ in range(abs(k)):
            out = out * base
        return out

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        return a.coeffs == b.coeffs

    def __hash__(self):
        # Tr(x)/phi(N) does not change when x is embedded in a larger field
        return hash(self.mean_trace())

    def mean_trace(self) -> Fraction:
        """Trace to Q divided by the degree, via Ramanujan sums c_N(k) = mu(N/g) phi(N)/phi(N/g)."""
        total = Fraction(0)
        for k, x in enumerate(self.coeffs):
            if x:
                q = self.N // gcd(self.N, k)
                total += x * Fraction(_mobius(q), _totient(q))
        return total

    def as_rational(self):
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def conjugate(self) -> "CycloNumber":
        """Complex conjugation, zeta -> zeta^(-1) = zeta^(N-1)."""
        out = CycloNumber(self.N)
        for k, x in enumerate(self.coeffs):
            if x:
                out = out + zeta(self.N, -k) * x
        return out

    def to_json(self) -> dict:
        return {"N": self.N, "coeffs": [[x.numerator, x.denominator] for x in self.coeffs]}

    def __repr__(self):
        terms = []
        for k, x in enumerate(self.coeffs):
            if x:
                mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
                terms.append(f"{x}{'*' + mono if mono else ''}")
        return f"CycloNumber(N={self.N}: {' + '.join(terms) or '0'})"


def zeta(N: int, k: int = 1) -> CycloNumber:
    """zeta_N^k."""
    k %= N
    c = [Fraction(0)] * (k + 1)
    c[k] = Fraction(1)
    return CycloNumber(N, c)


def arith(a: CycloNumber, b: CycloNumber, op: str) -> CycloNumber:
    ops = {"+": a.__add__, "-": a.__sub__, "*": a.__mul__, "/": a.__truediv__}
    if op not in ops:
        raise DomainError(f"unknown operation {op!r}")
    return ops[op](b)


@lru_cache(maxsize=None)
def cot_pi(a: int, m: int) -> CycloNumber:
    """cot(a pi / m) in Q(zeta_{4m}), via cot x = i (z + 1/z) / (z - 1/z), z = e^{ix}."""
    if m < 1:
        raise DomainError("m must be positive")
    if a % m == 0:
        raise DomainError(f"cot has a pole at {a}pi/{m}")
    N = 4 * m
    z = zeta(N, 2 * a)
    zi = zeta(N, -2 * a)
    i = zeta(N, m)
    return i * (z + zi) / (z - zi)


@lru_cache(maxsize=None)
def csc2_pi(a: int, m: int) -> CycloNumber:
    """csc^2(a pi / m) = -4 / (z - 1/z)^2."""
    if m < 1:
        raise DomainError("m must be positive")
    if a % m == 0:
        raise DomainError(f"csc has a pole at {a}pi/{m}")
    N = 4 * m
    diff = zeta(N, 2 * a) - zeta(N, -2 * a)
    return CycloNumber.rational(-4, N) / (diff * diff)


def as_rational(x: CycloNumber):
    return x.as_rational()

"""Exact integer linear algebra on the Lorentzian lattice Z^{1,n}.

Vectors are written in the basis (H, E1, ..., En) and the form is
Q = diag(1, -1, ..., -1).  Matrices act on column vectors from the left,
so ``(a @ b)(v) == a(b(v))``.

Everything here is plain Python integers or ``Fraction``; nothing can
overflow.  The sizes involved (at most 10 x 10) make this fast enough.
"""

from __future__ import annotations

import json
import operator
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InternalError

__all__ = [
    "LatticeVector",
    "RationalVector",
    "Isometry",
    "IntPolynomial",
    "Sublattice",
    "form_value",
    "canonical_class",
    "reflection",
    "fixed_sublattice",
    "char_poly",
    "char_poly_restricted",
    "restricted_matrix",
    "smith_normal_form",
    "hermite_normal_form",
    "integer_kernel",
    "orthogonal_complement",
    "span",
    "e_lattice",
    "parse_vector",
    "parse_matrix",
    "full_lattice",
    "invariant_factors",
    "cyclotomic_int",
    "cyclotomic_factorization",
    "cyclotomic_order",
]


def _as_int(x) -> int:
    try:
        return operator.index(x)
    except TypeError:
        raise DomainError(f"expected an integer entry, got {x!r}") from None


# ---------------------------------------------------------------- vectors


_TERM = re.compile(r"([+-]?)\s*(\d*)\s*(H|K|E(\d+))")


@dataclass(frozen=True)
class LatticeVector:
    n: int
    coords: tuple

    def __post_init__(self):
        coords = tuple(_as_int(c) for c in self.coords)
        if self.n < 0 or len(coords) != self.n + 1:
            raise DomainError(f"need {self.n + 1} coordinates for n={self.n}, got {len(coords)}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def H(cls, n: int) -> "LatticeVector":
        return cls(n, (1,) + (0,) * n)

    @classmethod
    def E(cls, n: int, i: int) -> "LatticeVector":
        if not 1 <= i <= n:
            raise DomainError(f"E{i} does not exist for n={n}")
        c = [0] * (n + 1)
        c[i] = 1
        return cls(n, tuple(c))

    @classmethod
    def zero(cls, n: int) -> "LatticeVector":
        return cls(n, (0,) * (n + 1))

    def __len__(self):
        return self.n + 1

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def _check(self, other):
        if not isinstance(other, (LatticeVector, RationalVector)):
            return NotImplemented
        if other.n != self.n:
            raise DomainError(f"rank mismatch: {self.n} vs {other.n}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        if isinstance(other, RationalVector):
            return RationalVector(self.n, tuple(a + b for a, b in zip(self.coords, other.coords)))
        return LatticeVector(self.n, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return LatticeVector(self.n, tuple(-a for a in self.coords))

    def __mul__(self, k):
        if isinstance(k, Fraction):
            return RationalVector(self.n, tuple(k * a for a in self.coords))
        try:
            k = operator.index(k)
        except TypeError:
            return NotImplemented
        return LatticeVector(self.n, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def content(self) -> int:
        """gcd of the coordinates (0 for the zero vector)."""
        g = 0
        for c in self.coords:
            g = gcd(g, c)
        return g

    def primitive(self) -> "LatticeVector":
        g = self.content()
        if g == 0:
            raise DomainError("the zero vector has no primitive multiple")
        return LatticeVector(self.n, tuple(c // g for c in self.coords))

    def __str__(self):
        return _format_terms(self.coords)


@dataclass(frozen=True)
class RationalVector:
    n: int
    coords: tuple

    def __post_init__(self):
        coords = tuple(Fraction(c) for c in self.coords)
        if self.n < 0 or len(coords) != self.n + 1:
            raise DomainError(f"need {self.n + 1} coordinates for n={self.n}, got {len(coords)}")
        object.__setattr__(self, "coords", coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def _pair(self, other):
        if not isinstance(other, (LatticeVector, RationalVector)):
            return None
        if other.n != self.n:
            raise DomainError(f"rank mismatch: {self.n} vs {other.n}")
        return other.coords

    def __add__(self, other):
        oc = self._pair(other)
        if oc is None:
            return NotImplemented
        return RationalVector(self.n, tuple(a + b for a, b in zip(self.coords, oc)))

    __radd__ = __add__

    def __sub__(self, other):
        oc = self._pair(other)
        if oc is None:
            return NotImplemented
        return RationalVector(self.n, tuple(a - b for a, b in zip(self.coords, oc)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return RationalVector(self.n, tuple(-a for a in self.coords))

    def __mul__(self, k):
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        return RationalVector(self.n, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def to_lattice(self) -> LatticeVector:
        if not self.is_integral():
            raise DomainError(f"{self} is not an integral vector")
        return LatticeVector(self.n, tuple(int(c) for c in self.coords))

    def __str__(self):
        return _format_terms(self.coords)


def _format_terms(coords) -> str:
    names = ["H"] + [f"E{i}" for i in range(1, len(coords))]
    out = []
    for c, name in zip(coords, names):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = name if mag == 1 else f"{mag}{name}"
        out.append((sign, body))
    if not out:
        return "0"
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


def parse_vector(n: int, text: str) -> LatticeVector:
    """Parse strings like ``"2H - E1 - E2 - E4"`` or ``"K"``."""
    s = text.replace(" ", "")
    if not s:
        raise DomainError("empty vector expression")
    coords = [0] * (n + 1)
    pos = 0
    for m in _TERM.finditer(s):
        if m.start() != pos:
            raise DomainError(f"cannot parse {text!r}")
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        k = int(m.group(2)) if m.group(2) else 1
        if m.group(3) == "H":
            coords[0] += sign * k
        elif m.group(3) == "K":
            for i, c in enumerate(canonical_class(n).coords):
                coords[i] += sign * k * c
        else:
            i = int(m.group(4))
            if not 1 <= i <= n:
                raise DomainError(f"E{i} does not exist for n={n}")
            coords[i] += sign * k
    if pos != len(s):
        raise DomainError(f"cannot parse {text!r}")
    return LatticeVector(n, tuple(coords))


def form_value(v, w):
    """Q(v, w) = v0*w0 - sum_{i>=1} vi*wi."""
    if v.n != w.n:
        raise DomainError(f"rank mismatch: {v.n} vs {w.n}")
    a, b = v.coords, w.coords
    return a[0] * b[0] - sum(x * y for x, y in zip(a[1:], b[1:]))


def canonical_class(n: int) -> LatticeVector:
    """K = -3H + E1 + ... + En."""
    if n < 0:
        raise DomainError("n must be non-negative")
    return LatticeVector(n, (-3,) + (1,) * n)


# ---------------------------------------------------------------- polynomials


@dataclass(frozen=True)
class IntPolynomial:
    """Monic integer polynomial, coefficients in ascending degree."""

    coeffs: tuple

    def __post_init__(self):
        c = [_as_int(x) for x in self.coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c or c[-1] != 1:
            raise DomainError(f"polynomial {c} is not monic")
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_descending(cls, coeffs: Sequence[int]) -> "IntPolynomial":
        return cls(tuple(reversed(list(coeffs))))

    @classmethod
    def one(cls) -> "IntPolynomial":
        return cls((1,))

    @classmethod
    def linear(cls, root: int) -> "IntPolynomial":
        """t - root."""
        return cls((-root, 1))

    @classmethod
    def t_power_plus(cls, k: int, c: int = 1) -> "IntPolynomial":
        """t^k + c."""
        if k == 0:
            raise DomainError("t^0 + c is not monic")
        return cls((c,) + (0,) * (k - 1) + (1,))

    @classmethod
    def product(cls, *factors: "IntPolynomial") -> "IntPolynomial":
        out = cls.one()
        for f in factors:
            out = out * f
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __mul__(self, other):
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def __pow__(self, k: int):
        out = IntPolynomial.one()
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def trace(self) -> int:
        """Sum of the roots, i.e. minus the subleading coefficient."""
        return -self.coeffs[-2] if self.degree >= 1 else 0

    def divmod(self, other: "IntPolynomial"):
        """Division by a monic polynomial; quotient is monic, remainder a list."""
        r = list(self.coeffs)
        d = other.degree
        if self.degree < d:
            return None, r
        q = [0] * (self.degree - d + 1)
        for k in range(self.degree - d, -1, -1):
            c = r[k + d]
            q[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    r[k + j] -= c * b
        rem = r[:d] if d else []
        while rem and rem[-1] == 0:
            rem.pop()
        return IntPolynomial(tuple(q)), rem

    def divides(self, other: "IntPolynomial") -> bool:
        _, rem = other.divmod(self)
        return not rem

    def multiplicity(self, root: int) -> int:
        """Multiplicity of an integer root."""
        k = 0
        p = self
        lin = IntPolynomial.linear(root)
        while p.degree > 0 and p(root) == 0:
            p, _ = p.divmod(lin)
            k += 1
        return k

    def __str__(self):
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                mono = "t" if k == 1 else f"t^{k}"
                body = mono if mag == 1 else f"{mag}{mono}"
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        text = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


# ---------------------------------------------------------------- isometries


def _gram_ok(rows) -> bool:
    d = len(rows)
    # columns c_i of g must satisfy Q(c_i, c_j) = Q_ij
    for i in range(d):
        for j in range(i, d):
            s = rows[0][i] * rows[0][j] - sum(rows[k][i] * rows[k][j] for k in range(1, d))
            want = 0 if i != j else (1 if i == 0 else -1)
            if s != want:
                return False
    return True


@dataclass(frozen=True)
class Isometry:
    n: int
    matrix: tuple

    def __post_init__(self):
        rows = tuple(tuple(_as_int(x) for x in row) for row in self.matrix)
        d = self.n + 1
        if self.n < 0 or len(rows) != d or any(len(r) != d for r in rows):
            raise DomainError(f"expected a {d}x{d} matrix")
        object.__setattr__(self, "matrix", rows)
        if not _gram_ok(rows):
            raise DomainError("matrix does not preserve the form diag(1,-1,...,-1)")

    @classmethod
    def _trusted(cls, n: int, rows) -> "Isometry":
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "matrix", tuple(tuple(int(x) for x in r) for r in rows))
        return obj

    @classmethod
    def from_rows(cls, rows) -> "Isometry":
        rows = [list(r) for r in rows]
        return cls(len(rows) - 1, tuple(tuple(r) for r in rows))

    @classmethod
    def from_array(cls, a, check: bool = True) -> "Isometry":
        a = np.asarray(a)
        rows = a.tolist()
        if check:
            return cls(a.shape[0] - 1, tuple(tuple(r) for r in rows))
        return cls._trusted(a.shape[0] - 1, rows)

    @classmethod
    def identity(cls, n: int) -> "Isometry":
        return cls._trusted(n, [[int(i == j) for j in range(n + 1)] for i in range(n + 1)])

    @classmethod
    def minus_identity(cls, n: int) -> "Isometry":
        return cls._trusted(n, [[-int(i == j) for j in range(n + 1)] for i in range(n + 1)])

    @property
    def dim(self) -> int:
        return self.n + 1

    def __matmul__(self, other):
        if isinstance(other, Isometry):
            if other.n != self.n:
                raise DomainError(f"rank mismatch: {self.n} vs {other.n}")
            cols = list(zip(*other.matrix))
            rows = [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.matrix]
            return Isometry._trusted(self.n, rows)
        if isinstance(other, (LatticeVector, RationalVector)):
            return self.apply(other)
        return NotImplemented

    def apply(self, v):
        if v.n != self.n:
            raise DomainError(f"rank mismatch: {self.n} vs {v.n}")
        out = tuple(sum(a * b for a, b in zip(r, v.coords)) for r in self.matrix)
        return type(v)(self.n, out)

    __call__ = apply

    def inverse(self) -> "Isometry":
        # g^{-1} = Q g^T Q
        d = self.dim
        sgn = [1] + [-1] * self.n
        rows = [[sgn[i] * self.matrix[j][i] * sgn[j] for j in range(d)] for i in range(d)]
        return Isometry._trusted(self.n, rows)

    def transpose(self) -> "Isometry":
        return Isometry._trusted(self.n, list(zip(*self.matrix)))

    def __pow__(self, k: int) -> "Isometry":
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        out = Isometry.identity(self.n)
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def conjugate(self, h: "Isometry") -> "Isometry":
        """h g h^{-1}."""
        return h @ self @ h.inverse()

    def trace(self) -> int:
        return sum(self.matrix[i][i] for i in range(self.dim))

    def det(self) -> int:
        return (-1) ** self.dim * char_poly(self).coeffs[0]

    def is_identity(self) -> bool:
        return all(self.matrix[i][j] == (i == j) for i in range(self.dim) for j in range(self.dim))

    def fixes(self, v) -> bool:
        return self.apply(v) == v

    def column(self, j: int) -> LatticeVector:
        return LatticeVector(self.n, tuple(r[j] for r in self.matrix))

    def as_array(self, dtype=np.int64) -> np.ndarray:
        return np.array(self.matrix, dtype=dtype)

    def to_text(self) -> str:
        return "\n".join(" ".join(str(x) for x in r) for r in self.matrix)

    def __str__(self):
        return self.to_text()


def parse_matrix(text: str) -> Isometry:
    """Whitespace rows (``#`` comments allowed) or a JSON array of arrays."""
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    if not body:
        raise DomainError("empty matrix text")
    if body.startswith("["):
        try:
            rows = json.loads(body)
        except json.JSONDecodeError as exc:
            raise DomainError(f"bad JSON matrix: {exc}") from None
    else:
        try:
            rows = [[int(tok) for tok in line.split()] for line in body.splitlines() if line.strip()]
        except ValueError as exc:
            raise DomainError(f"bad matrix entry: {exc}") from None
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise DomainError("matrix must be a non-empty list of rows")
    return Isometry.from_rows(rows)


def reflection(v: LatticeVector) -> Isometry:
    """Ref_v(x) = x - (2 Q(x,v) / Q(v,v)) v, for Q(v,v) in {+-1, +-2}."""
    q = form_value(v, v)
    if q not in (1, -1, 2, -2):
        raise DomainError(f"Q(v,v) = {q}; reflection is integral only for +-1, +-2")
    d = v.n + 1
    sgn = [1] + [-1] * v.n
    # column j is the image of basis vector j: e_j - (2 sgn_j v_j / q) v
    rows = [[int(i == j) - (2 * sgn[j] * v.coords[j] * v.coords[i]) // q for j in range(d)] for i in range(d)]
    return Isometry(v.n, tuple(tuple(r) for r in rows))


# ---------------------------------------------------------------- normal forms


def _row_echelon(rows, transform: bool = False):
    """Integer row echelon form with pivots positive and reduced above.

    Returns (E, T, rank) with T unimodular and T @ rows == E.
    """
    A = [list(r) for r in rows]
    m = len(A)
    d = len(A[0]) if m else 0
    T = [[int(i == j) for j in range(m)] for i in range(m)] if transform else None

    def sub(i, k, q):
        if q:
            A[i] = [a - q * b for a, b in zip(A[i], A[k])]
            if T is not None:
                T[i] = [a - q * b for a, b in zip(T[i], T[k])]

    def swap(i, k):
        A[i], A[k] = A[k], A[i]
        if T is not None:
            T[i], T[k] = T[k], T[i]

    r = 0
    for c in range(d):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            swap(p, r)
            clean = True
            for i in range(r + 1, m):
                if A[i][c]:
                    sub(i, r, A[i][c] // A[r][c])
                    if A[i][c]:
                        clean = False
            if clean:
                break
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-a for a in A[r]]
            if T is not None:
                T[r] = [-a for a in T[r]]
        for i in range(r):
            sub(i, r, A[i][c] // A[r][c])
        r += 1
    return A, T, r


def hermite_normal_form(rows) -> list:
    """Row HNF in lower-triangular style.

    Zero rows are dropped.  Each row's last nonzero entry (its pivot) is
    positive, pivot columns strictly increase down the rows, and entries of
    later rows in a pivot column are reduced into [0, pivot).
    """
    rows = [list(r) for r in rows]
    if not rows:
        return []
    rev = [r[::-1] for r in rows]
    E, _, rank = _row_echelon(rev)
    return [r[::-1] for r in E[:rank]][::-1]


def smith_normal_form(M):
    """Return (U, D, V) with U M V = D, U and V unimodular, D diagonal, d_i | d_{i+1}."""
    A = [list(map(int, r)) for r in M]
    m = len(A)
    d = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(d)] for i in range(d)]

    def row_sub(i, k, q):  # row_i -= q row_k
        A[i] = [a - q * b for a, b in zip(A[i], A[k])]
        U[i] = [a - q * b for a, b in zip(U[i], U[k])]

    def col_sub(j, k, q):  # col_j -= q col_k
        for row in A:
            row[j] -= q * row[k]
        for row in V:
            row[j] -= q * row[k]

    def row_swap(i, k):
        A[i], A[k] = A[k], A[i]
        U[i], U[k] = U[k], U[i]

    def col_swap(j, k):
        for row in A:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]

    for t in range(min(m, d)):
        cands = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, d) if A[i][j]]
        if not cands:
            break
        _, i, j = min(cands)
        row_swap(t, i)
        col_swap(t, j)
        while True:
            for i in range(t + 1, m):
                if A[i][t]:
                    row_sub(i, t, A[i][t] // A[t][t])
            for j in range(t + 1, d):
                if A[t][j]:
                    col_sub(j, t, A[t][j] // A[t][t])
            rest = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
            rest += [(abs(A[t][j]), t, j) for j in range(t + 1, d) if A[t][j]]
            if rest:
                _, i, j = min(rest)
                if i != t:
                    row_swap(t, i)
                else:
                    col_swap(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, d) if A[i][j] % A[t][t]),
                None,
            )
            if bad is None:
                break
            row_sub(t, bad, -1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return U, A, V


def invariant_factors(M) -> list:
    _, D, _ = smith_normal_form(M)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


def integer_kernel(M, ncols: int | None = None) -> list:
    """Saturated basis (HNF rows) of {x in Z^d : M x = 0}."""
    M = [list(r) for r in M]
    d = len(M[0]) if M else ncols
    if d is None:
        raise DomainError("cannot infer width of an empty matrix")
    if not M:
        return hermite_normal_form([[int(i == j) for j in range(d)] for i in range(d)])
    Mt = [list(c) for c in zip(*M)]
    _, T, rank = _row_echelon(Mt, transform=True)
    kern = T[rank:]
    return hermite_normal_form(kern) if kern else []


# ---------------------------------------------------------------- sublattices


@dataclass(frozen=True)
class Sublattice:
    n: int
    basis: tuple
    saturated: bool

    @property
    def rank(self) -> int:
        return len(self.basis)

    def rows(self) -> list:
        return [list(b.coords) for b in self.basis]

    def coordinates(self, v):
        """Coefficients c with v = sum c_i b_i, or None if v is not in the rational span."""
        if v.n != self.n:
            raise DomainError(f"rank mismatch: {self.n} vs {v.n}")
        res = [Fraction(x) for x in v.coords]
        coeff = [Fraction(0)] * self.rank
        # last basis vector is the only one touching its pivot column
        for k in range(self.rank - 1, -1, -1):
            b = self.basis[k].coords
            p = max(j for j, x in enumerate(b) if x)
            c = res[p] / b[p]
            coeff[k] = c
            if c:
                res = [a - c * x for a, x in zip(res, b)]
        if any(res):
            return None
        return coeff

    def contains(self, v) -> bool:
        c = self.coordinates(v)
        return c is not None and all(x.denominator == 1 for x in c)

    __contains__ = contains

    def is_saturated(self) -> bool:
        if not self.basis:
            return True
        return all(f == 1 for f in invariant_factors(self.rows()))

    def __eq__(self, other):
        if not isinstance(other, Sublattice):
            return NotImplemented
        return self.n == other.n and self.basis == other.basis

    def __hash__(self):
        return hash((self.n, self.basis))


def span(n: int, vectors: Iterable, saturate: bool = False) -> Sublattice:
    """Sublattice generated by ``vectors`` (optionally its saturation)."""
    rows = [list(v.coords) if hasattr(v, "coords") else list(v) for v in vectors]
    for r in rows:
        if len(r) != n + 1:
            raise DomainError(f"vector of length {len(r)} in rank {n} lattice")
    rows = [r for r in rows if any(r)]
    if saturate and rows:
        rows = integer_kernel(integer_kernel(rows), n + 1)
    basis = hermite_normal_form(rows) if rows else []
    sub = Sublattice(n, tuple(LatticeVector(n, tuple(b)) for b in basis), False)
    object.__setattr__(sub, "saturated", sub.is_saturated())
    return sub


def _from_kernel(n: int, rows) -> Sublattice:
    return Sublattice(n, tuple(LatticeVector(n, tuple(r)) for r in rows), True)


def full_lattice(n: int) -> Sublattice:
    return _from_kernel(n, integer_kernel([], n + 1))


def orthogonal_complement(s: Sublattice) -> Sublattice:
    """{v : Q(v, b) = 0 for all b in s}."""
    if not s.basis:
        return full_lattice(s.n)
    rows = [[b[0]] + [-x for x in b.coords[1:]] for b in s.basis]
    return _from_kernel(s.n, integer_kernel(rows))


def fixed_sublattice(g: Isometry) -> Sublattice:
    """Saturated kernel of g - I."""
    d = g.dim
    rows = [[g.matrix[i][j] - (i == j) for j in range(d)] for i in range(d)]
    return _from_kernel(g.n, integer_kernel(rows))


@lru_cache(maxsize=None)
def e_lattice(n: int) -> Sublattice:
    """The orthogonal complement of the canonical class."""
    return orthogonal_complement(span(n, [canonical_class(n)]))


def restricted_matrix(g: Isometry, s: Sublattice) -> list:
    """Integer matrix of g on the basis of s (column j = coordinates of g(b_j))."""
    if g.n != s.n:
        raise DomainError(f"rank mismatch: {g.n} vs {s.n}")
    cols = []
    for b in s.basis:
        c = s.coordinates(g.apply(b))
        if c is None or any(x.denominator != 1 for x in c):
            raise DomainError("the isometry does not preserve the sublattice")
        cols.append([int(x) for x in c])
    return [list(r) for r in zip(*cols)] if cols else []


def _charpoly_matrix(A) -> IntPolynomial:
    """Faddeev-LeVerrier with exact integer division."""
    k = len(A)
    if k == 0:
        return IntPolynomial.one()
    coeffs = [0] * (k + 1)
    coeffs[k] = 1
    M = [[0] * k for _ in range(k)]
    for step in range(1, k + 1):
        # M <- A M + c_{k-step+1} I
        AM = [[sum(A[i][l] * M[l][j] for l in range(k)) for j in range(k)] for i in range(k)]
        c_prev = coeffs[k - step + 1]
        for i in range(k):
            AM[i][i] += c_prev
        M = AM
        tr = sum(sum(A[i][l] * M[l][i] for l in range(k)) for i in range(k))
        if tr % step:
            raise InternalError("non-integral Faddeev-LeVerrier step")
        coeffs[k - step] = -tr // step
    return IntPolynomial(tuple(coeffs))


def char_poly(g) -> IntPolynomial:
    """det(tI - g) on the whole lattice (also accepts a square integer matrix)."""
    rows = g.matrix if isinstance(g, Isometry) else g
    return _charpoly_matrix([list(r) for r in rows])


def char_poly_restricted(g: Isometry, s: Sublattice) -> IntPolynomial:
    return _charpoly_matrix(restricted_matrix(g, s))


# ---------------------------------------------------------------- cyclotomic factors


@lru_cache(maxsize=None)
def cyclotomic_int(k: int) -> IntPolynomial:
    """Phi_k as an IntPolynomial, by dividing t^k - 1 by Phi_d for d | k, d < k."""
    if k < 1:
        raise DomainError("cyclotomic index must be positive")
    p = IntPolynomial((-1,) + (0,) * (k - 1) + (1,))
    for d in range(1, k):
        if k % d == 0:
            p, rem = p.divmod(cyclotomic_int(d))
            if rem:
                raise InternalError("cyclotomic division left a remainder")
    return p


def _totient(k: int) -> int:
    return sum(1 for j in range(1, k + 1) if gcd(j, k) == 1)


def cyclotomic_factorization(p: IntPolynomial):
    """{k: multiplicity} with p = prod Phi_k^m, or None if p is not a product of cyclotomics."""
    out = {}
    rest = p
    k = 1
    # phi(k) >= sqrt(k/2), so k <= 2 deg^2 bounds the search
    bound = max(2, 2 * p.degree * p.degree)
    while rest.degree > 0 and k <= bound:
        if _totient(k) <= rest.degree:
            phi = cyclotomic_int(k)
            while True:
                q, rem = rest.divmod(phi)
                if rem or q is None:
                    break
                rest = q
                out[k] = out.get(k, 0) + 1
        k += 1
    if rest.degree > 0:
        return None
    return out


def cyclotomic_order(p: IntPolynomial) -> int | None:
    """lcm of the cyclotomic indices, i.e. the order of a semisimple matrix with char poly p."""
    f = cyclotomic_factorization(p)
    if f is None:
        return None
    out = 1
    for k in f:
        out = out * k // gcd(out, k)
    return out

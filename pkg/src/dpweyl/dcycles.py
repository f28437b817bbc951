"""Signed-permutation model of type D Weyl groups inside W_n.

P_n acts on the orthonormal vectors

    e_i = (H - E1)/2 - E_{n-i+1},   i = 1 .. n-1,

(Q(e_i, e_j) = -delta_ij) by signed permutations, so every element has a
signed cycle type.  W_5 is itself of type D_5; its model uses

    e_k = (-H + E1 + ... + E5)/2 - E_k,   k = 1 .. 5,

which are orthonormal and orthogonal to K.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import DomainError, InternalError
from .lattice import (
    IntPolynomial,
    Isometry,
    LatticeVector,
    RationalVector,
    canonical_class,
    form_value,
    parse_vector,
)
from .weylgroups import parabolic_P_generators, weyl_generators

__all__ = [
    "DCoordinates",
    "SignedCycleType",
    "d_coordinates",
    "w5_coordinates",
    "signed_cycle_type",
    "cuspidal_types",
    "realize_type",
    "even_partitions",
    "signed_cycle_types_batch",
    "signed_permutations_batch",
]


@dataclass(frozen=True)
class DCoordinates:
    n: int
    e: tuple  # of RationalVector
    model: str = "P"

    @property
    def m(self) -> int:
        return len(self.e)

    def signed_image(self, g: Isometry, i: int):
        """(j, sign) with g(e_i) = sign * e_j, or None."""
        img = g.apply(self.e[i])
        for j, ej in enumerate(self.e):
            if img == ej:
                return j, 1
            if img == -ej:
                return j, -1
        return None


@dataclass(frozen=True)
class SignedCycleType:
    cycles: tuple  # of (length, sign), canonical order

    def __post_init__(self):
        for length, sign in self.cycles:
            if length < 1 or sign not in (1, -1):
                raise DomainError(f"bad cycle ({length}, {sign})")
        key = sorted(self.cycles, key=lambda c: (-c[0], c[1]))
        object.__setattr__(self, "cycles", tuple(key))

    @classmethod
    def negative(cls, partition) -> "SignedCycleType":
        return cls(tuple((a, -1) for a in partition))

    @classmethod
    def parse(cls, text: str) -> "SignedCycleType":
        """Accepts ``[3-2-]``, ``[2-111]`` or the overlined form ``[3̄2̄]``."""
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise DomainError(f"cycle type must be bracketed: {text!r}")
        body = body[1:-1].replace("̄", "-").replace(",", "").replace(" ", "")
        cycles = []
        for m in re.finditer(r"(\d)(-?)", body):
            cycles.append((int(m.group(1)), -1 if m.group(2) else 1))
        if "".join(f"{a}{'-' if s < 0 else ''}" for a, s in cycles) != body:
            raise DomainError(f"cannot parse cycle type {text!r}")
        return cls(tuple(cycles))

    @property
    def size(self) -> int:
        return sum(length for length, _ in self.cycles)

    def all_negative(self) -> bool:
        return all(s < 0 for _, s in self.cycles)

    def power(self, k: int) -> "SignedCycleType":
        """Type of g^k: an l-cycle of sign s splits into gcd(l, k) cycles of sign s^(k/gcd)."""
        out = []
        for length, sign in self.cycles:
            g = gcd(length, k)
            out.extend([(length // g, sign ** (k // g))] * g)
        return SignedCycleType(tuple(out))

    def order(self) -> int:
        out = 1
        for length, sign in self.cycles:
            o = length if sign > 0 else 2 * length
            out = out * o // gcd(out, o)
        return out

    def charpoly(self) -> IntPolynomial:
        """prod (t^l - sign)."""
        return IntPolynomial.product(*[IntPolynomial.t_power_plus(l, -s) for l, s in self.cycles])

    def ascii(self) -> str:
        return "[" + "".join(f"{a}{'-' if s < 0 else ''}" for a, s in self.cycles) + "]"

    def unicode(self) -> str:
        return "[" + "".join(f"{a}{chr(0x304) if s < 0 else ''}" for a, s in self.cycles) + "]"

    def __str__(self):
        return self.ascii()


def _half(n: int, v: LatticeVector) -> RationalVector:
    return RationalVector(n, tuple(Fraction(x, 2) for x in v.coords))


def _verify(coords: DCoordinates, gens) -> None:
    for i, ei in enumerate(coords.e):
        for j, ej in enumerate(coords.e):
            if form_value(ei, ej) != (-1 if i == j else 0):
                raise InternalError("coordinate vectors are not orthonormal")
    for name, g in gens:
        for i in range(coords.m):
            if coords.signed_image(g, i) is None:
                raise InternalError(f"{name} does not permute the +-e_i")


@lru_cache(maxsize=None)
def d_coordinates(n: int) -> DCoordinates:
    """e_i = (H - E1)/2 - E_{n-i+1} for i = 1..n-1, verified against the P_n generators."""
    if not 4 <= n <= 8:
        raise DomainError(f"need 4 <= n <= 8, got {n}")
    base = _half(n, parse_vector(n, "H - E1"))
    e = tuple(base - LatticeVector.E(n, n - i + 1) for i in range(1, n))
    coords = DCoordinates(n, e, "P")
    # fork relations: e_{m-1} - e_m = E2 - E3 and e_{m-1} + e_m = H - E1 - E2 - E3
    m = n - 1
    if (e[m - 2] - e[m - 1]).coords != parse_vector(n, "E2 - E3").coords or (
        e[m - 2] + e[m - 1]
    ).coords != parse_vector(n, "H - E1 - E2 - E3").coords:
        raise InternalError("fork relations fail")
    _verify(coords, parabolic_P_generators(n).generators)
    return coords


@lru_cache(maxsize=None)
def w5_coordinates() -> DCoordinates:
    """Orthonormal model of W_5 as a type D_5 group."""
    n = 5
    total = parse_vector(n, "-H + E1 + E2 + E3 + E4 + E5")
    e = tuple(_half(n, total - 2 * LatticeVector.E(n, k)) for k in range(1, 6))
    coords = DCoordinates(n, e, "W5")
    K = canonical_class(n)
    if any(form_value(v, K) != 0 for v in e):
        raise InternalError("W5 model vectors are not orthogonal to K")
    _verify(coords, weyl_generators(n).generators)
    return coords


def _model_for(g: Isometry, model: str | None) -> DCoordinates:
    if model == "W5" or (model is None and g.n == 5 and _maps_all(g, w5_coordinates())
                         and not _maps_all(g, d_coordinates(5))):
        return w5_coordinates()
    return d_coordinates(g.n)


def _maps_all(g: Isometry, coords: DCoordinates) -> bool:
    return all(coords.signed_image(g, i) is not None for i in range(coords.m))


def signed_cycle_type(g: Isometry, model: str | None = None) -> SignedCycleType:
    """Signed cycle decomposition of g acting on {+-e_i}.

    ``model`` picks "P" (the P_n coordinates) or "W5"; by default P_n is
    used, falling back to the W_5 model for elements of W_5 outside P_5.
    """
    coords = _model_for(g, model)
    images = []
    for i in range(coords.m):
        im = coords.signed_image(g, i)
        if im is None:
            raise DomainError("element does not act by signed permutations in this model")
        images.append(im)
    seen = [False] * coords.m
    cycles = []
    for start in range(coords.m):
        if seen[start]:
            continue
        length, sign, i = 0, 1, start
        while not seen[i]:
            seen[i] = True
            j, s = images[i]
            sign *= s
            length += 1
            i = j
        cycles.append((length, sign))
    return SignedCycleType(tuple(cycles))


def even_partitions(m: int):
    """Partitions of m with an even number of parts, parts in descending order."""
    out = []

    def rec(rest, top, acc):
        if rest == 0:
            if len(acc) % 2 == 0:
                out.append(tuple(acc))
            return
        for a in range(min(rest, top), 0, -1):
            rec(rest - a, a, acc + [a])

    rec(m, m, [])
    return out


def cuspidal_types(m: int):
    """(partition, order, charpoly) for every cuspidal class of W(D_m)."""
    if m < 2:
        raise DomainError("need m >= 2")
    out = []
    for part in even_partitions(m):
        order = 1
        for a in part:
            order = order * (2 * a) // gcd(order, 2 * a)
        poly = IntPolynomial.product(*[IntPolynomial.t_power_plus(a) for a in part])
        out.append((part, order, poly))
    return out


def _model_matrix(coords: DCoordinates, images) -> Isometry:
    """Lattice isometry acting on e_i as given and trivially on the orthogonal complement."""
    n = coords.n
    d = n + 1
    # the complement of the e_i is spanned by K and (for P) H - E1; pick a rational basis
    basis = [list(v.coords) for v in coords.e]
    extra = [canonical_class(n)]
    if coords.model == "P":
        extra.append(parse_vector(n, "H - E1"))
    basis += [[Fraction(x) for x in v.coords] for v in extra]
    if len(basis) != d:
        raise InternalError("model basis has the wrong size")
    target = [list((s * coords.e[j]).coords) for j, s in images]
    target += [[Fraction(x) for x in v.coords] for v in extra]
    # g B = T  =>  g = T B^{-1}; solve with exact fractions
    B = [[basis[c][r] for c in range(d)] for r in range(d)]
    T = [[target[c][r] for c in range(d)] for r in range(d)]
    Binv = _inverse(B)
    g = [[sum(T[i][k] * Binv[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    if any(x.denominator != 1 for row in g for x in row):
        raise InternalError("signed permutation does not give an integral matrix")
    return Isometry(n, tuple(tuple(int(x) for x in row) for row in g))


def _inverse(M):
    d = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(d)] for i, row in enumerate(M)]
    for c in range(d):
        p = next(r for r in range(c, d) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [x / piv for x in A[c]]
        for r in range(d):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[d:] for row in A]


def from_signed_permutation(coords: DCoordinates, images) -> Isometry:
    """Isometry sending e_i to sign * e_j for images[i] = (j, sign)."""
    return _model_matrix(coords, images)


def realize_type(partition, n: int | None = None) -> Isometry:
    """An element whose signed cycle type is all-negative with the given cycle lengths.

    A partition of n - 1 is realised in P_n (n defaults to sum + 1).  For
    n = 5 a partition of 5 is realised in W_5 through its own D_5 model.
    """
    partition = tuple(int(a) for a in partition)
    if any(a < 1 for a in partition) or not partition:
        raise DomainError("partition parts must be positive")
    if len(partition) % 2:
        raise DomainError("an all-negative type needs an even number of cycles")
    m = sum(partition)
    n = m + 1 if n is None else n
    if n == 5 and m == 5:
        coords = w5_coordinates()
    elif m == n - 1:
        coords = d_coordinates(n)
    else:
        raise DomainError(f"partition of {m} does not fit rank {n}")
    images = [None] * m
    pos = 0
    for a in partition:
        # e_pos -> e_{pos+1} -> ... -> e_{pos+a-1} -> -e_pos
        for k in range(a - 1):
            images[pos + k] = (pos + k + 1, 1)
        images[pos + a - 1] = (pos, -1)
        pos += a
    g = _model_matrix(coords, images)
    if signed_cycle_type(g, model=coords.model) != SignedCycleType.negative(partition):
        raise InternalError("realized element has the wrong type")
    return g


def signed_permutations_batch(mats, coords: DCoordinates):
    """(perm, sign) arrays of shape (N, m) with g e_i = sign[i] e_{perm[i]}, for a batch of matrices."""
    import numpy as np

    E2 = np.array([[int(2 * x) for x in v.coords] for v in coords.e], dtype=np.int64)  # (m, d)
    J = np.diag([1] + [-1] * coords.n).astype(np.int64)
    img = np.einsum("nij,mj->nmi", np.asarray(mats, dtype=np.int64), E2)  # images of 2 e_i
    # coefficient on e_j is -Q(g e_i, e_j)
    C = -np.einsum("nmi,ij,kj->nmk", img, J, E2) // 4
    absC = np.abs(C)
    ok = (absC.sum(axis=2) == 1) & (absC.max(axis=2) == 1)
    if not ok.all():
        raise DomainError("some elements do not act by signed permutations in this model")
    perm = absC.argmax(axis=2)
    sign = np.take_along_axis(C, perm[..., None], axis=2)[..., 0]
    return perm, sign


def signed_cycle_types_batch(mats, coords: DCoordinates) -> list:
    """SignedCycleType for every matrix in the batch."""
    perm, sign = signed_permutations_batch(mats, coords)
    out = []
    m = coords.m
    for p, s in zip(perm.tolist(), sign.tolist()):
        seen = [False] * m
        cycles = []
        for start in range(m):
            if seen[start]:
                continue
            length, sg, i = 0, 1, start
            while not seen[i]:
                seen[i] = True
                sg *= s[i]
                length += 1
                i = p[i]
            cycles.append((length, sg))
        out.append(SignedCycleType(tuple(cycles)))
    return out

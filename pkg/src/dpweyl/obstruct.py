"""Nonrealizability toolkit.

Lefschetz numbers, Weyl signatures, Edmonds' trivial/cyclotomic/regular
counts for prime-order actions, the fixed-point obstruction, and exact
G-signature evaluation with exhaustive feasibility search.

Edmonds counts come from Tate cohomology.  For a Z[C_p]-lattice M with
generator g and norm N = 1 + g + ... + g^(p-1),

    |M^G / N M|         = p^t
    |ker N / (g - 1) M| = p^c

since a trivial summand contributes (p, 1), a regular one (1, 1) and a
cyclotomic one (1, p).  The regular count then follows from the rank.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .cyclo import CycloNumber, cot_pi, csc2_pi
from .errors import DecompositionError, DomainError, ResourceError
from .lattice import (
    Isometry,
    canonical_class,
    char_poly_restricted,
    e_lattice,
    integer_kernel,
    invariant_factors,
)

__all__ = [
    "EdmondsInvariants",
    "FixedPointData",
    "InfeasibilityCertificate",
    "ObstructionCertificate",
    "SearchShape",
    "lefschetz",
    "weyl_signature",
    "tate_invariants",
    "edmonds_invariants",
    "obstruction_lemma",
    "g_signature_value",
    "point_contribution",
    "g_signature_feasible",
]

LAMBDA_ZERO_SIGN_NONZERO = "lambda_zero_sign_nonzero"
LAMBDA_NEGATIVE = "lambda_negative"
DEFAULT_SEARCH_CAP = 1_000_000


def lefschetz(g: Isometry) -> int:
    """2 + trace on H_2."""
    return 2 + g.trace()


def weyl_signature(g: Isometry) -> int:
    """1 - trace of g on E_n (requires g to fix K)."""
    if not g.fixes(canonical_class(g.n)):
        raise DomainError("signature formula needs an element fixing K")
    return 1 - char_poly_restricted(g, e_lattice(g.n)).trace()


# ---------------------------------------------------------------- Edmonds


@dataclass(frozen=True)
class EdmondsInvariants:
    p: int
    t: int
    c: int
    r: int

    def rank(self) -> int:
        return self.t + self.c * (self.p - 1) + self.r * self.p

    def as_tuple(self):
        return (self.t, self.c, self.r)

    def to_json(self) -> dict:
        return {"p": self.p, "t": self.t, "c": self.c, "r": self.r}


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def _identity(d):
    return [[int(i == j) for j in range(d)] for i in range(d)]


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


def _log_p(x: int, p: int, what: str) -> int:
    k = 0
    while x % p == 0 and x > 1:
        x //= p
        k += 1
    if x != 1:
        raise DecompositionError(f"{what} has order not a power of {p}")
    return k


def _index_in(basis_rows, gens_cols) -> int:
    """Index [L : S] where L has basis ``basis_rows`` and S is spanned by ``gens_cols``."""
    k = len(basis_rows)
    if k == 0:
        return 1
    L = _Coords(basis_rows)
    coords = []
    for col in gens_cols:
        c = L.coordinates(col)
        if c is None:
            raise DecompositionError("image is not contained in the expected sublattice")
        coords.append(c)
    facs = invariant_factors(coords) if coords else []
    if len(facs) < k:
        raise DecompositionError("quotient is infinite")
    out = 1
    for f in facs:
        out *= f
    return out


class _Coords:
    """Coordinates with respect to a basis in lower HNF (last-nonzero pivots)."""

    def __init__(self, rows):
        self.rows = [list(r) for r in rows]

    def coordinates(self, v):
        res = [Fraction(x) for x in v]
        out = [Fraction(0)] * len(self.rows)
        for k in range(len(self.rows) - 1, -1, -1):
            b = self.rows[k]
            p = max(j for j, x in enumerate(b) if x)
            c = res[p] / b[p]
            out[k] = c
            if c:
                res = [a - c * x for a, x in zip(res, b)]
        if any(res) or any(x.denominator != 1 for x in out):
            return None
        return [int(x) for x in out]


def tate_invariants(A, p: int) -> EdmondsInvariants:
    """(t, c, r) for the Z[C_p]-lattice Z^d with generator acting by the integer matrix A (A^p = I)."""
    if not _is_prime(p):
        raise DomainError(f"{p} is not prime")
    A = [list(map(int, r)) for r in A]
    d = len(A)
    powers = [_identity(d)]
    for _ in range(p):
        powers.append(_matmul(powers[-1], A))
    if powers[p] != _identity(d):
        raise DomainError(f"the matrix does not satisfy A^{p} = I")
    N = [[sum(P[i][j] for P in powers[:p]) for j in range(d)] for i in range(d)]
    A_minus = [[A[i][j] - (i == j) for j in range(d)] for i in range(d)]
    fixed = integer_kernel(A_minus, d)
    kerN = integer_kernel(N, d)
    cols_N = [list(c) for c in zip(*N)]
    cols_Am = [list(c) for c in zip(*A_minus)]
    t = _log_p(_index_in(fixed, cols_N), p, "M^G / N M")
    c = _log_p(_index_in(kerN, cols_Am), p, "ker N / (g - 1) M")
    rest = d - t - c * (p - 1)
    if rest < 0 or rest % p:
        raise DecompositionError("ranks do not fit trivial + cyclotomic + regular summands")
    return EdmondsInvariants(p, t, c, rest // p)


def _order_is(g: Isometry, p: int) -> bool:
    return not g.is_identity() and (g ** p).is_identity()


def edmonds_invariants(g: Isometry, p: int) -> EdmondsInvariants:
    """Edmonds counts of H_2 as a module over <g>, g of order exactly p."""
    if not _is_prime(p):
        raise DomainError(f"{p} is not prime")
    if not _order_is(g, p):
        raise DomainError(f"element does not have order {p}")
    inv = tate_invariants(g.matrix, p)
    if inv.rank() != g.dim:
        raise DecompositionError("rank identity fails")
    return inv


# ---------------------------------------------------------------- obstruction lemma


@dataclass(frozen=True)
class ObstructionCertificate:
    subject: Isometry
    prime: int
    power_checked: int
    edmonds: EdmondsInvariants
    lefschetz: int
    signature: int | None
    branch: str
    conclusion: str

    def __post_init__(self):
        if self.edmonds.c != 0:
            raise DomainError("certificate requires no cyclotomic summands")
        if self.branch == LAMBDA_ZERO_SIGN_NONZERO and not (self.lefschetz == 0 and self.signature):
            raise DomainError("branch needs Lefschetz 0 and nonzero signature")
        if self.branch == LAMBDA_NEGATIVE and not self.lefschetz < 0:
            raise DomainError("branch needs negative Lefschetz number")

    def to_json(self) -> dict:
        return {
            "subject": [list(r) for r in self.subject.matrix],
            "prime": self.prime,
            "power_checked": self.power_checked,
            "edmonds": self.edmonds.to_json(),
            "lefschetz": self.lefschetz,
            "signature": self.signature,
            "branch": self.branch,
            "conclusion": self.conclusion,
        }


def _primes_dividing(m: int):
    return [p for p in range(2, m + 1) if m % p == 0 and _is_prime(p)]


def obstruction_lemma(g: Isometry, order_m: int | None = None):
    """Certificate that no finite-order diffeomorphism realises g, or None.

    Looks for a prime p | m such that g^(m/p) gives no cyclotomic summands,
    then checks Lambda(g) = 0 with nonzero signature, or Lambda(g) < 0.
    """
    from .weylgroups import element_order

    m = element_order(g) if order_m is None else order_m
    if not (g ** m).is_identity():
        raise DomainError(f"element does not have order dividing {m}")
    lam = lefschetz(g)
    sig = weyl_signature(g) if g.fixes(canonical_class(g.n)) else None
    if lam == 0 and sig:
        branch = LAMBDA_ZERO_SIGN_NONZERO
    elif lam < 0:
        branch = LAMBDA_NEGATIVE
    else:
        return None
    for p in _primes_dividing(m):
        h = g ** (m // p)
        if h.is_identity():
            continue
        inv = edmonds_invariants(h, p)
        if inv.c == 0:
            why = "Lefschetz number 0 with nonzero signature" if branch == LAMBDA_ZERO_SIGN_NONZERO \
                else "negative Lefschetz number"
            return ObstructionCertificate(
                subject=g,
                prime=p,
                power_checked=m // p,
                edmonds=inv,
                lefschetz=lam,
                signature=sig,
                branch=branch,
                conclusion=(
                    f"H_2 has no cyclotomic summands over the order-{p} subgroup generated by "
                    f"g^{m // p}, and g has {why}; no finite-order diffeomorphism realises g"
                ),
            )
    return None


# ---------------------------------------------------------------- G-signature


@dataclass(frozen=True)
class FixedPointData:
    m: int
    points: tuple = ()  # (a, b): rotation angles 2 pi a / m, 2 pi b / m
    surfaces: tuple = ()  # (e(F), c): self-intersection and normal rotation 2 pi c / m

    def __post_init__(self):
        pts = tuple(tuple(int(x) for x in p) for p in self.points)
        srf = []
        for s in self.surfaces:
            if len(s) == 3 and not s[2]:
                raise DomainError("non-orientable fixed surfaces are not supported")
            if len(s) not in (2, 3):
                raise DomainError("surface entries are (e(F), c) pairs")
            srf.append((int(s[0]), int(s[1])))
        for a, b in pts:
            if not (1 <= a <= self.m - 1 and 1 <= b <= self.m - 1):
                raise DomainError(f"rotation numbers must lie in 1..{self.m - 1}")
        for _, c in srf:
            if not 1 <= c <= self.m - 1:
                raise DomainError(f"rotation numbers must lie in 1..{self.m - 1}")
        object.__setattr__(self, "points", tuple(sorted(pts)))
        object.__setattr__(self, "surfaces", tuple(sorted(srf)))

    def to_json(self) -> dict:
        return {"m": self.m, "points": [list(p) for p in self.points], "surfaces": [list(s) for s in self.surfaces]}


def point_contribution(a: int, b: int, m: int) -> CycloNumber:
    return cot_pi(a, m) * cot_pi(b, m)


def g_signature_value(d: FixedPointData) -> CycloNumber:
    """-sum cot(a pi/m) cot(b pi/m) + sum e(F) csc^2(c pi/m), exactly."""
    total = CycloNumber.rational(0, 4 * d.m)
    for a, b in d.points:
        total = total - point_contribution(a, b, d.m)
    for e, c in d.surfaces:
        total = total + csc2_pi(c, d.m) * e
    return total


@dataclass(frozen=True)
class SearchShape:
    """What fixed-point data to enumerate.

    ``point_rotations`` restricts both rotation numbers of every point;
    ``first_rotations`` additionally restricts the first one (e.g. a forced
    half-turn).  ``second_offset`` ties the second rotation number to the
    first, b = a + offset (mod m).  Surfaces take a self-intersection from ``selfints`` and a
    rotation from ``surface_rotations``.
    """

    points: int = 0
    surfaces: int = 0
    point_rotations: tuple | None = None
    first_rotations: tuple | None = None
    second_offset: int | None = None
    surface_rotations: tuple | None = None
    selfints: tuple = (0,)


def _multisets(items, k):
    return itertools.combinations_with_replacement(items, k)


def _n_multisets(n, k):
    return comb(n + k - 1, k) if n else (1 if k == 0 else 0)


def g_signature_feasible(m: int, target, shape: SearchShape = SearchShape(), *, cap: int = DEFAULT_SEARCH_CAP):
    """Every fixed-point configuration of the given shape whose G-signature equals target."""
    if m < 2:
        raise DomainError("group order must be at least 2")
    full = tuple(range(1, m))
    rot = tuple(sorted(set(shape.point_rotations))) if shape.point_rotations is not None else full
    first = tuple(sorted(set(shape.first_rotations))) if shape.first_rotations is not None else rot
    srot = tuple(sorted(set(shape.surface_rotations))) if shape.surface_rotations is not None else full
    for x in rot + first + srot:
        if not 1 <= x <= m - 1:
            raise DomainError(f"rotation {x} outside 1..{m - 1}")
    if shape.second_offset is not None:
        pairs = [(a, (a + shape.second_offset) % m) for a in first]
        pairs = [(a, b) for a, b in pairs if b and b in rot]
    elif first == rot:
        pairs = [(a, b) for a in rot for b in rot if a <= b]
    else:
        pairs = [(a, b) for a in first for b in rot]
    surfs = [(e, c) for e in shape.selfints for c in srot]
    size = _n_multisets(len(pairs), shape.points) * _n_multisets(len(surfs), shape.surfaces)
    if size > cap:
        raise ResourceError(f"search space of {size} assignments exceeds cap {cap}", cap=cap)
    target = target if isinstance(target, CycloNumber) else CycloNumber.rational(Fraction(target), 4 * m)
    pvals = {p: point_contribution(p[0], p[1], m) for p in pairs}
    svals = {s: csc2_pi(s[1], m) * s[0] for s in surfs}
    hits = []
    for pts in _multisets(pairs, shape.points):
        ptotal = CycloNumber.rational(0, 4 * m)
        for p in pts:
            ptotal = ptotal - pvals[p]
        for srf in _multisets(surfs, shape.surfaces):
            total = ptotal
            for s in srf:
                total = total + svals[s]
            if total == target:
                hits.append(FixedPointData(m, pts, srf))
    hits.sort(key=lambda d: (d.points, d.surfaces))
    return hits


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """An empty G-signature search together with the arithmetic facts that set it up."""

    subject: Isometry
    m: int
    target: int
    shape: SearchShape
    solutions: tuple
    checks: tuple  # (claim, holds)
    conclusion: str

    def __post_init__(self):
        if self.solutions:
            raise DomainError("an infeasibility certificate needs an empty search")
        if not all(ok for _, ok in self.checks):
            bad = [c for c, ok in self.checks if not ok]
            raise DomainError(f"certificate checks fail: {bad}")

    def to_json(self) -> dict:
        return {
            "subject": [list(r) for r in self.subject.matrix],
            "m": self.m,
            "target": self.target,
            "shape": {
                "points": self.shape.points,
                "surfaces": self.shape.surfaces,
                "point_rotations": list(self.shape.point_rotations) if self.shape.point_rotations else None,
                "first_rotations": list(self.shape.first_rotations) if self.shape.first_rotations else None,
                "second_offset": self.shape.second_offset,
                "surface_rotations": list(self.shape.surface_rotations) if self.shape.surface_rotations else None,
                "selfints": list(self.shape.selfints),
            },
            "solutions": [],
            "checks": [{"claim": c, "holds": ok} for c, ok in self.checks],
            "conclusion": self.conclusion,
        }

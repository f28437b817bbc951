"""Conjugacy classes of W_n: fingerprints, census, cuspidality and irreducibility."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import cache, engine
from .errors import DomainError, RefusalError, ResourceError
from .lattice import (
    IntPolynomial,
    Isometry,
    LatticeVector,
    canonical_class,
    char_poly_restricted,
    cyclotomic_order,
    e_lattice,
    fixed_sublattice,
    form_value,
    integer_kernel,
    orthogonal_complement,
    parse_vector,
    span,
)
from .weylgroups import (
    DEFAULT_CAP,
    standard_coxeter,
    weyl_generators,
)

__all__ = [
    "Fingerprint",
    "ClassRecord",
    "fingerprint",
    "census",
    "carter_label",
    "is_cuspidal_in_P",
    "irreducibility_case",
    "are_conjugate",
    "coxeter_class_size",
    "CERTIFIED_IRREDUCIBLE",
    "REDUCIBLE",
    "CASE_B",
]

CERTIFIED_IRREDUCIBLE = "certified_irreducible"
REDUCIBLE = "reducible"
CASE_B = "case_b_necessary_only"


def _divisors(m: int):
    return [d for d in range(1, m + 1) if m % d == 0]


def _poly(*desc) -> IntPolynomial:
    return IntPolynomial.from_descending(desc)


@dataclass(frozen=True)
class Fingerprint:
    n: int
    order: int
    trace_full: int
    charpoly_E: IntPolynomial
    fixed_rank_full: int
    cuspidal_W: bool
    charpoly_powers: tuple  # ((d, charpoly of g^d on E_n), ...) over divisors d of the order

    @property
    def trace_E(self) -> int:
        return self.charpoly_E.trace()

    def sort_key(self):
        return (self.order, self.charpoly_E.coeffs, tuple(p.coeffs for _, p in self.charpoly_powers))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "order": self.order,
            "trace_full": self.trace_full,
            "charpoly_E": list(self.charpoly_E.coeffs),
            "fixed_rank_full": self.fixed_rank_full,
            "cuspidal_W": self.cuspidal_W,
            "charpoly_powers": [{"d": d, "charpoly_E": list(p.coeffs)} for d, p in self.charpoly_powers],
        }


def _require_weyl(g: Isometry) -> None:
    if not g.fixes(canonical_class(g.n)):
        raise DomainError(
            "the isometry does not fix K; conjugate it into the Weyl group W_n before classifying"
        )


def _order_from_poly(g: Isometry, chi: IntPolynomial) -> int:
    m = cyclotomic_order(chi)
    if m is None or not (g ** m).is_identity():
        raise DomainError("element does not have finite order")
    return m


def fingerprint(g: Isometry) -> Fingerprint:
    """Conjugation invariants of an element of W_n."""
    _require_weyl(g)
    E = e_lattice(g.n)
    chi = char_poly_restricted(g, E)
    order = _order_from_poly(g, chi)
    powers = tuple((d, char_poly_restricted(g ** d, E)) for d in _divisors(order))
    return Fingerprint(
        n=g.n,
        order=order,
        trace_full=g.trace(),
        charpoly_E=chi,
        fixed_rank_full=fixed_sublattice(g).rank,
        cuspidal_W=chi(1) != 0,
        charpoly_powers=powers,
    )


# ---------------------------------------------------------------- Carter labels


def _coxeter_poly(n: int) -> IntPolynomial:
    # (t^{n-2}(t^3 - t - 1) + t^3 + t^2 - 1) / (t - 1)
    num = [0] * (n + 2)
    for k, c in ((n + 1, 1), (n - 1, -1), (n - 2, -1)):
        num[k] += c
    for k, c in ((3, 1), (2, 1), (0, -1)):
        num[k] += c
    q, rem = IntPolynomial(tuple(num)).divmod(IntPolynomial.linear(1))
    assert not rem
    return q


@lru_cache(maxsize=None)
def _carter_table():
    phi2 = _poly(1, 1)
    phi3 = _poly(1, 1, 1)
    phi4 = _poly(1, 0, 1)
    phi6 = _poly(1, -1, 1)
    phi10 = _poly(1, -1, 1, -1, 1)
    t3p1 = IntPolynomial.t_power_plus(3)
    t5p1 = IntPolynomial.t_power_plus(5)
    rows = [
        (5, _coxeter_poly(5), 8, "D_5"),
        (5, t3p1 * phi4, 12, "D_5(a_1)"),
        (5, phi4 * phi2 ** 3, 4, "D_2+D_3"),
        (6, _coxeter_poly(6), 12, "E_6"),
        (7, _coxeter_poly(7), 18, "E_7"),
        (7, _poly(1, 1, 1, 1, 1, 1, 1, 1), 8, "A_7"),
        (7, phi6 * phi2 ** 5, 6, "D_4+3A_1"),
        (7, t5p1 * phi2 ** 2, 10, "D_6+A_1"),
        (7, t5p1 * phi6, 30, "E_7(a_3)"),
        (7, phi6 ** 3 * phi2, 6, "E_7(a_4)"),
        (7, t3p1 ** 2 * phi2, 6, "D_6(a_2)+A_1"),
        (7, _poly(1, 1, 1, 1, 1, 1) * phi3, 6, "A_5+A_2"),
        (8, _coxeter_poly(8), 30, "E_8"),
        (8, phi2 ** 2 * phi6 * phi10, 30, "r_30"),
    ]
    return {(n, p.coeffs, True, m): label for n, p, m, label in rows}


def carter_label(fp: Fingerprint):
    """Label from the embedded table, or None."""
    return _carter_table().get((fp.n, fp.charpoly_E.coeffs, fp.cuspidal_W, fp.order))


def carter_polynomial(label: str) -> tuple:
    """(n, charpoly on E_n, order) for a labelled class."""
    for (n, coeffs, _, m), lab in _carter_table().items():
        if lab == label:
            return n, IntPolynomial(coeffs), m
    raise DomainError(f"no class labelled {label!r}")


# ---------------------------------------------------------------- cuspidality


def _require_parabolic(g: Isometry) -> None:
    n = g.n
    if not (g.fixes(canonical_class(n)) and g.fixes(parse_vector(n, "H - E1"))):
        raise DomainError("element must fix both K and H - E1")


@lru_cache(maxsize=None)
def p_complement(n: int):
    """The orthogonal complement of Z{K, H - E1} (rank n - 1)."""
    return orthogonal_complement(span(n, [canonical_class(n), parse_vector(n, "H - E1")]))


def is_cuspidal_in_P(g: Isometry) -> bool:
    """True iff g fixes no nonzero vector of Z{K, H - E1}^perp."""
    _require_parabolic(g)
    return char_poly_restricted(g, p_complement(g.n))(1) != 0


# ---------------------------------------------------------------- irreducibility


def _simple_roots(n: int):
    return [parse_vector(n, "H - E1 - E2 - E3")] + [parse_vector(n, f"E{i} - E{i + 1}") for i in range(1, n)]


def dominant(v: LatticeVector) -> LatticeVector:
    """The W_n-conjugate of v (in E_n tensor Q) lying in the fundamental chamber."""
    roots = _simple_roots(v.n)
    moved = True
    while moved:
        moved = False
        for a in roots:
            q = form_value(v, a)
            if q > 0:
                # Ref_a(v) = v + Q(v, a) a since Q(a, a) = -2
                v = v + q * a
                moved = True
    return v


@lru_cache(maxsize=None)
def _case_b_line(n: int):
    """Dominant representatives of +-y0, y0 spanning Q{K, H - E1} cap E_n."""
    K = canonical_class(n)
    h1 = parse_vector(n, "H - E1")
    # y0 = (9 - n)(H - E1) - Q(H - E1, K) K, primitive
    y0 = ((9 - n) * h1 - form_value(h1, K) * K).primitive()
    return {dominant(y0).coords, dominant(-y0).coords}


def _fixed_line_in_E(g: Isometry) -> LatticeVector:
    d = g.dim
    rows = [[g.matrix[i][j] - (i == j) for j in range(d)] for i in range(d)]
    K = canonical_class(g.n)
    rows.append([K[0]] + [-x for x in K.coords[1:]])
    ker = integer_kernel(rows)
    if len(ker) != 1:
        raise DomainError("expected a rank-one fixed line inside E_n")
    return LatticeVector(g.n, tuple(ker[0])).primitive()


def irreducibility_case(g: Isometry) -> str:
    """certified_irreducible, reducible or case_b_necessary_only."""
    _require_weyl(g)
    n = g.n
    fp_rank = fixed_sublattice(g).rank
    if fp_rank == 1:
        # saturated rank-one lattice containing the primitive K is Z{K}
        return CERTIFIED_IRREDUCIBLE
    if n in (4, 6) or fp_rank >= 3:
        return REDUCIBLE
    y = _fixed_line_in_E(g)
    if dominant(y).coords in _case_b_line(n):
        return CASE_B
    return REDUCIBLE


def reducing_vector(g: Isometry):
    """A fixed vector v with Q(v, v) = -1, or Q(v, v) = 1 and v not characteristic, if one is short."""
    L = fixed_sublattice(g)
    rng = range(-2, 3)
    import itertools

    for coeffs in itertools.product(rng, repeat=L.rank):
        if not any(coeffs):
            continue
        v = LatticeVector.zero(g.n)
        for c, b in zip(coeffs, L.basis):
            v = v + c * b
        q = form_value(v, v)
        if q == -1:
            return v
        if q == 1 and any(x % 2 == 0 for x in v.coords):
            return v
    return None


# ---------------------------------------------------------------- census


@dataclass(frozen=True)
class ClassRecord:
    representative: Isometry
    fingerprint: Fingerprint
    size: int
    carter_label: str | None
    irreducibility: str

    def to_json(self) -> dict:
        return {
            "representative": [list(r) for r in self.representative.matrix],
            "fingerprint": self.fingerprint.to_json(),
            "size": self.size,
            "carter_label": self.carter_label,
            "irreducibility": self.irreducibility,
        }


def _weyl_ops(n: int):
    return [engine.BatchOp(g, name) for name, g in weyl_generators(n).generators]


def class_partition(n: int, *, threads: int = 1, cache_dir=None, chunk: int = 1 << 16):
    """(group, labels, representatives): conjugacy component of every element.

    The representative of a class is its element of smallest digest index.
    """
    key = (n, cache_dir)
    if key in _partition_memo:
        return _partition_memo[key]
    G = cache.get_group(n, "weyl", cache_dir=cache_dir, threads=threads)
    N = G.order
    ops = _weyl_ops(n)
    rows, cols = [], []
    for lo in range(0, N, chunk):
        hi = min(N, lo + chunk)
        part = G.elements[lo:hi]
        src = np.arange(lo, hi, dtype=np.int32)
        for op in ops:
            idx = G.index_of(engine.compact(op.conj(part)))
            if (idx < 0).any():
                raise ResourceError("conjugate fell outside the enumerated group")
            rows.append(src)
            cols.append(idx.astype(np.int32))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(N, N)).tocsr()
    ncomp, labels = connected_components(graph, directed=False)
    reps = np.full(ncomp, N, dtype=np.int64)
    np.minimum.at(reps, labels, np.arange(N))
    out = (G, labels, reps)
    _partition_memo[key] = out
    return out


_partition_memo: dict = {}
_census_memo: dict = {}


def census(n: int, *, threads: int = 1, cache_dir=None) -> list:
    """All conjugacy classes of W_n (3 <= n <= 7), sorted by (order, charpoly, size)."""
    if n == 8:
        raise RefusalError("a full census of W_8 needs the whole group; use specific elements instead")
    if not 3 <= n <= 7:
        raise DomainError(f"census needs 3 <= n <= 7, got {n}")
    if n in _census_memo:
        return _census_memo[n]
    G, labels, reps = class_partition(n, threads=threads, cache_dir=cache_dir)
    sizes = np.bincount(labels)
    records = []
    for c, i in enumerate(reps):
        g = G.isometry(int(i))
        fp = fingerprint(g)
        records.append(ClassRecord(g, fp, int(sizes[c]), carter_label(fp), irreducibility_case(g)))
    records.sort(key=lambda r: (r.fingerprint.sort_key()[:2], r.size, r.fingerprint.sort_key()[2], r.representative.matrix))
    _census_memo[n] = records
    return records


def class_index(n: int, g: Isometry) -> int:
    """Position in census(n) of the class containing g."""
    G, labels, reps = class_partition(n)
    idx = int(G.index_of(np.array(g.matrix, dtype=np.int64).astype(G.elements.dtype))[0])
    if idx < 0:
        raise DomainError("element is not in W_n")
    rep = reps[labels[idx]]
    for k, rec in enumerate(census(n)):
        if rec.representative == G.isometry(int(rep)):
            return k
    raise DomainError("class not found")


# ---------------------------------------------------------------- conjugacy tests


def conjugation_orbit(g: Isometry, *, cap: int = DEFAULT_CAP, keep: bool = True, threads: int = 1, progress=None):
    _require_weyl(g)
    return engine.bfs(np.array(g.matrix, dtype=object), _weyl_ops(g.n), "conj", keep=keep, cap=cap,
                      threads=threads, progress=progress)


def are_conjugate(g: Isometry, h: Isometry, *, budget: int | None = None) -> bool:
    """Conjugacy in W_n: fingerprints first, then a conjugation-orbit search from g."""
    if g.n != h.n:
        raise DomainError("elements live in different ranks")
    if g.n == 8 and budget is None:
        raise RefusalError("conjugacy in W_8 needs an explicit orbit budget")
    if fingerprint(g) != fingerprint(h):
        return False
    orb = conjugation_orbit(g, cap=budget or DEFAULT_CAP)
    q = engine.compact(np.array(h.matrix, dtype=object))
    return bool(engine.lookup(orb.a, orb.b, orb.elements, q[None])[0] >= 0)


_PINNED_COXETER_8 = 23224320


def coxeter_class_size(n: int, large: bool = False, *, threads: int = 1, progress=None) -> int:
    """Size of the conjugacy class of the standard Coxeter element."""
    if n == 8 and not large:
        raise RefusalError("the W_8 Coxeter orbit (about 2.3e7 elements) requires the large flag")
    if not 3 <= n <= 8:
        raise DomainError(f"need 3 <= n <= 8, got {n}")
    cap = DEFAULT_CAP if n < 8 else 10 * DEFAULT_CAP
    res = conjugation_orbit(standard_coxeter(n), cap=cap, keep=False, threads=threads, progress=progress)
    return res.count

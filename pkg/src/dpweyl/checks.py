"""Reference check suite: every published numerical claim re-derived and compared."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import conjugacy as cj
from . import engine
from .cache import get_group
from .cyclo import CycloNumber, cot_pi, csc2_pi
from .dcycles import (
    SignedCycleType,
    cuspidal_types,
    d_coordinates,
    realize_type,
    signed_cycle_type,
    signed_cycle_types_batch,
)
from .fixtures import load_fixture
from .lattice import (
    IntPolynomial,
    Isometry,
    canonical_class,
    char_poly_restricted,
    e_lattice,
    fixed_sublattice,
    form_value,
    parse_vector,
    reflection,
    restricted_matrix,
    span,
)
from .obstruct import (
    FixedPointData,
    SearchShape,
    edmonds_invariants,
    g_signature_feasible,
    g_signature_value,
    lefschetz,
    obstruction_lemma,
    point_contribution,
    tate_invariants,
    weyl_signature,
)
from .verdict import (
    NOT_REALIZABLE,
    REALIZABLE,
    counts_table,
    matches_class,
    realizability_verdict,
)
from .weylgroups import coxeter_number, element_order, standard_coxeter

GROUP_ORDERS = {3: 12, 4: 120, 5: 1920, 6: 51840, 7: 2903040}
COUNTS = {3: 2, 4: 24, 5: 240, 6: 4320, 7: 161280, 8: 23224320}
CUSPIDAL_P_ORDERS = {4: [2, 4, 6], 6: [10, 8, 6, 4, 6, 2], 7: [12, 20, 24, 4, 12, 8, 4]}
COXETER_8 = IntPolynomial.from_descending([1, 1, 0, -1, -1, -1, 0, 1, 1])


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    skipped: bool = False

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "name": self.name,
            "passed": self.passed,
            "skipped": self.skipped,
            "detail": self.detail,
        }


@dataclass
class Report:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed or c.skipped for c in self.checks)

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}


def coxeter_closed_form(n: int) -> IntPolynomial:
    """(t^(n-2)(t^3 - t - 1) + t^3 + t^2 - 1) / (t - 1)."""
    num = [0] * (n + 2)
    for k, c in ((n + 1, 1), (n - 1, -1), (n - 2, -1), (3, 1), (2, 1), (0, -1)):
        num[k] += c
    q, rem = IntPolynomial(tuple(num)).divmod(IntPolynomial.linear(1))
    if any(rem):
        raise ArithmeticError("closed form is not divisible by t - 1")
    return q


def _poly(*desc) -> IntPolynomial:
    return IntPolynomial.from_descending(desc)


def _sqrt2() -> CycloNumber:
    return CycloNumber(8, [0, 1, 0, -1])


# ---------------------------------------------------------------- individual checks
# each returns (passed, detail)


def check_group_orders(threads=1, cache_dir=None):
    got = {n: len(get_group(n, "weyl", threads=threads, cache_dir=cache_dir)) for n in range(3, 8)}
    return got == GROUP_ORDERS, f"orders {got}"


def check_counts(threads=1, cache_dir=None):
    table = counts_table(threads=threads, cache_dir=cache_dir)
    got = {n: table[n].count for n in range(3, 8)}
    orbit = {n: cj.coxeter_class_size(n, threads=threads) for n in range(3, 8)}
    ok = got == {n: COUNTS[n] for n in range(3, 8)} and orbit == got
    return ok, f"exhaustive {got}; Coxeter orbits {orbit}"


def check_counts_large(threads=1, progress=None):
    c = cj.coxeter_class_size(8, large=True, threads=threads, progress=progress)
    return c == COUNTS[8], f"Coxeter class in W_8 has {c} elements"


def check_coxeter_data():
    bad = []
    for n in range(3, 9):
        c = standard_coxeter(n)
        chi = char_poly_restricted(c, e_lattice(n))
        fixed = fixed_sublattice(c)
        if chi != coxeter_closed_form(n) or element_order(c) != coxeter_number(n):
            bad.append(n)
        if fixed.rank != 1 or canonical_class(n) not in fixed:
            bad.append(n)
    chi8 = char_poly_restricted(standard_coxeter(8), e_lattice(8))
    ok = not bad and chi8 == COXETER_8
    return ok, f"charpoly on E_8: {chi8}; failures at n = {sorted(set(bad))}"


def check_cuspidal_w():
    c5 = [r for r in cj.census(5) if r.fingerprint.cuspidal_W]
    c7 = Counter(r.fingerprint.order for r in cj.census(7) if r.fingerprint.cuspidal_W)
    ok = len(c5) == 3 and c7[6] == 4 and c7[18] == 1 and c7[8] == 1
    return ok, f"W_5 cuspidal classes: {len(c5)}; W_7 cuspidal orders: {dict(sorted(c7.items()))}"


def check_cuspidal_p():
    details = []
    ok = True
    for m, expected in CUSPIDAL_P_ORDERS.items():
        n = m + 1
        G = get_group(n, "parabolic_P")
        types = signed_cycle_types_batch(G.elements, d_coordinates(n))
        polys = engine.batch_charpoly(G.elements)
        # fixed rank on H_2 is 2 (K and H - E1) exactly for elements cuspidal in P_n
        fixed2 = np.array([IntPolynomial(tuple(int(x) for x in p)).multiplicity(1) == 2 for p in polys])
        neg = np.array([t.all_negative() for t in types])
        seen = sorted({t.cycles for t, c in zip(types, neg) if c}, reverse=True)
        listed = [(part, order) for part, order, _ in cuspidal_types(m)]
        parts = sorted((tuple(a for a, _ in cyc) for cyc in seen), reverse=True)
        orders = [SignedCycleType(cyc).order() for cyc in seen]
        realized = [element_order(realize_type(part, n)) for part, _ in listed]
        ok &= bool((fixed2 == neg).all())
        ok &= parts == sorted((p for p, _ in listed), reverse=True)
        ok &= sorted(orders) == sorted(expected) == sorted(o for _, o in listed)
        ok &= realized == [o for _, o in listed]
        details.append(f"m={m}: orders {[o for _, o in listed]}")
    return ok, "; ".join(details)


def check_d2d3():
    f = realize_type((2, 1, 1, 1), 5)
    cert = obstruction_lemma(f)
    e = edmonds_invariants(f ** 2, 2)
    ok = (
        matches_class(cj.fingerprint(f), "D_2+D_3")
        and lefschetz(f) == 0
        and weyl_signature(f) == 4
        and e.as_tuple() == (2, 0, 2)
        and cert is not None
        and cert.prime == 2
    )
    return ok, f"Lambda {lefschetz(f)}, sign {weyl_signature(f)}, Edmonds {e.as_tuple()}"


def check_d4_3a1():
    w = load_fixture("w_d4_3a1")
    w2 = load_fixture("w_d4_3a1_sq")
    chi = char_poly_restricted(w, e_lattice(7))
    e = edmonds_invariants(w2, 3)
    cert = obstruction_lemma(w)
    n = 7
    sub = span(n, [parse_vector(n, "E1"), parse_vector(n, "E3"), parse_vector(n, "2H - E2 - E4 - E5 - E6 - E7")])
    A = restricted_matrix(w2, sub)
    gram = [[form_value(a, b) for b in sub.basis] for a in sub.basis]
    det = round(np.linalg.det(np.array(gram, dtype=float)))
    ok = (
        w ** 2 == w2
        and w.fixes(canonical_class(n))
        and chi == _poly(1, -1, 1) * _poly(1, 1) ** 5
        and lefschetz(w) == -1
        and e.as_tuple() == (5, 0, 1)
        and cert is not None
        and cert.prime == 3
        and cert.branch == "lambda_negative"
        and tate_invariants(A, 3).as_tuple() == (0, 0, 1)
        and abs(det) == 1
    )
    return ok, f"charpoly {chi}, Lambda {lefschetz(w)}, Edmonds {e.as_tuple()}, sublattice det {det}"


def check_a7():
    w = load_fixture("w_a7")
    w4 = load_fixture("w_a7_4")
    n = 7
    chi = char_poly_restricted(w, e_lattice(n))
    lam = [lefschetz(w ** k) for k in range(1, 8)]
    sig = [weyl_signature(w ** k) for k in range(1, 8)]
    e = edmonds_invariants(w4, 2)
    alpha = parse_vector(n, "H - E1 - E3 - E5")
    ok = (
        w ** 4 == w4
        and w.fixes(canonical_class(n))
        and element_order(w) == 8
        and chi == _poly(*[1] * 8)
        and set(lam) == {2}
        and set(sig) == {2}
        and e.as_tuple() == (2, 2, 2)
        and w.apply(alpha) == -alpha
        and matches_class(cj.fingerprint(w), "A_7")
    )
    return ok, f"charpoly {chi}, Lambda(w^k) {lam}, sign(w^k) {sig}, Edmonds(w^4) {e.as_tuple()}"


def check_r():
    r = load_fixture("r")
    r3 = load_fixture("r3")
    chi = char_poly_restricted(r, e_lattice(8))
    expected = _poly(1, 1) ** 2 * _poly(1, -1, 1) * _poly(1, -1, 1, -1, 1)
    e = edmonds_invariants(r ** 10, 3)
    cert = obstruction_lemma(r ** 5)
    ok = (
        r.fixes(canonical_class(8))
        and element_order(r) == 30
        and chi == expected
        and r ** 10 == r3
        and e.as_tuple() == (6, 0, 1)
        and lefschetz(r ** 5) == -2
        and cert is not None
        and realizability_verdict(r).status == NOT_REALIZABLE
    )
    return ok, f"order {element_order(r)}, charpoly {chi}, Edmonds(r^10) {e.as_tuple()}, Lambda(r^5) {lefschetz(r ** 5)}"


def check_gsig():
    t0 = time.perf_counter()
    empty10 = g_signature_feasible(10, 3, SearchShape(points=1))
    pairs = [(a, b) for a in range(1, 10) for b in range(1, 10)]
    none_minus3 = all(cot_pi(a, 10) * cot_pi(b, 10) != -3 for a, b in pairs)
    s2 = _sqrt2()
    allowed = {CycloNumber.rational(1), -3 + 2 * s2, -3 - 2 * s2}
    vals = {point_contribution(a, (a + 2) % 8, 8) for a in (1, 3, 5, 7)}
    zero = g_signature_value(FixedPointData(7)) == 0
    four = g_signature_value(FixedPointData(4, (), ((2, 2),))) == 2
    two_points = g_signature_value(FixedPointData(8, ((1, 3), (1, 3)))) == -2
    half = g_signature_feasible(4, 2, SearchShape(points=2, first_rotations=(2,))) == []
    free = [d.to_json() for d in g_signature_feasible(2, 0)] == [FixedPointData(2).to_json()]
    secs = time.perf_counter() - t0
    ok = empty10 == [] and none_minus3 and vals <= allowed and zero and four and two_points and half and free
    ok = ok and secs < 10
    return ok, f"{len(pairs)} pairs at m=10 avoid -3; order-8 point values lie in {{1, -3+-2sqrt2}}; under 10 s: {secs < 10}"


def check_dichotomy():
    bad_by_n = {}
    ok = True
    for n in (5, 7):
        bad = []
        for rec in cj.census(n):
            fp = rec.fingerprint
            if not fp.cuspidal_W or fp.fixed_rank_full != 1:
                continue
            v = realizability_verdict(rec.representative)
            if v.status == NOT_REALIZABLE:
                bad.append(v.label)
            else:
                ok &= v.status == REALIZABLE
        bad_by_n[n] = sorted(bad)
    ok &= bad_by_n == {5: ["D_2+D_3", "D_5(a_1)"], 7: ["A_7", "D_4+3A_1", "D_6+A_1", "E_7(a_3)"]}
    e7a3 = next(r.representative for r in cj.census(7) if r.carter_label == "E_7(a_3)")
    d5a1 = next(r.representative for r in cj.census(5) if r.carter_label == "D_5(a_1)")
    ok &= matches_class(cj.fingerprint(e7a3 ** 3), "D_6+A_1")
    ok &= matches_class(cj.fingerprint(d5a1 ** 3), "D_2+D_3")
    return ok, f"not realizable: {bad_by_n}"


def check_identities():
    ok = True
    for n in (7, 8):
        c = standard_coxeter(n)
        half = c ** (coxeter_number(n) // 2)
        ok &= half == Isometry.minus_identity(n) @ reflection(canonical_class(n))
    f = realize_type((2, 1, 1, 1), 5)
    g = realize_type((3, 2), 5)
    ok &= signed_cycle_type(f ** 2) == SignedCycleType.parse("[1-1-111]")
    ok &= signed_cycle_type(g ** 3) == SignedCycleType.parse("[2-1-1-1-]")
    ok &= SignedCycleType.parse("[2-1-1-1-]").power(2) == SignedCycleType.parse("[1-1-111]")
    ok &= SignedCycleType.parse("[3-2-]").power(3) == SignedCycleType.parse("[2-1-1-1-]")
    pyth = all(csc2_pi(a, m) == 1 + cot_pi(a, m) ** 2 for m in range(2, 31) for a in range(1, m))
    ok &= pyth
    return ok, f"Pythagorean identity for m <= 30: {pyth}"


def check_properties():
    ok = True
    for p in (2, 3, 5, 7):
        comp = [[0] * (p - 1) for _ in range(p - 1)]
        for i in range(p - 2):
            comp[i + 1][i] = 1
        for i in range(p - 1):
            comp[i][p - 2] = -1
        perm = [[int((i - j) % p == 1) for j in range(p)] for i in range(p)]
        ok &= tate_invariants([[1]], p).as_tuple() == (1, 0, 0)
        ok &= tate_invariants(comp, p).as_tuple() == (0, 1, 0)
        ok &= tate_invariants(perm, p).as_tuple() == (0, 0, 1)
    rng = np.random.default_rng(7)
    G = get_group(6)
    for _ in range(20):
        g = G.isometry(int(rng.integers(len(G))))
        h = G.isometry(int(rng.integers(len(G))))
        ok &= cj.fingerprint(g) == cj.fingerprint(g.conjugate(h))
    return ok, "Tate model modules for p in {2,3,5,7}; fingerprint invariance on 20 random pairs in W_6"


CHECKS = [
    (1, "Weyl group orders for n = 3..7", check_group_orders),
    (2, "counts of irreducible elements of order h_n, n = 3..7", check_counts),
    (2, "Coxeter class size in W_8", check_counts_large),
    (3, "Coxeter elements: charpoly, order, fixed lattice", check_coxeter_data),
    (4, "cuspidal classes of W_5 and W_7", check_cuspidal_w),
    (4, "cuspidal signed types of P_n", check_cuspidal_p),
    (5, "D_2+D_3 obstruction", check_d2d3),
    (5, "D_4+3A_1 matrix and obstruction", check_d4_3a1),
    (5, "A_7 matrix invariants", check_a7),
    (5, "order-30 matrix r in W_8", check_r),
    (6, "G-signature values and searches", check_gsig),
    (7, "verdicts on cuspidal classes of W_5 and W_7", check_dichotomy),
    (8, "involutions, signed types, trigonometric identity", check_identities),
    (9, "Tate model modules and fingerprint invariance", check_properties),
]

_TAKES = {
    check_group_orders: ("threads", "cache_dir"),
    check_counts: ("threads", "cache_dir"),
    check_counts_large: ("threads", "progress"),
}


def verify_paper(skip_large: bool = False, *, threads: int = 1, cache_dir=None, progress=None, only=None) -> Report:
    """Run every check and collect pass/fail results; failures never raise."""
    report = Report()
    opts = {"threads": threads, "cache_dir": cache_dir, "progress": progress}
    for crit, name, fn in CHECKS:
        if only is not None and crit not in only:
            continue
        if skip_large and fn is check_counts_large:
            report.checks.append(CheckResult(crit, name, False, "skipped (needs the large flag)", skipped=True))
            continue
        t0 = time.perf_counter()
        kwargs = {k: opts[k] for k in _TAKES.get(fn, ())}
        try:
            ok, detail = fn(**kwargs)
        except Exception as exc:  # a crash is a failed check, not a crashed report
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        report.checks.append(CheckResult(crit, name, bool(ok), detail, time.perf_counter() - t0))
    return report

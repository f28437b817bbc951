"""Realizability verdicts, the counts table and the reference check suite."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from . import conjugacy as cj
from . import engine
from .cyclo import csc2_pi
from .errors import DomainError, InternalError
from .lattice import (
    IntPolynomial,
    Isometry,
    _totient,
    canonical_class,
    char_poly_restricted,
    cyclotomic_factorization,
    cyclotomic_int,
    cyclotomic_order,
    e_lattice,
    fixed_sublattice,
    form_value,
    integer_kernel,
    LatticeVector,
)
from .obstruct import (
    InfeasibilityCertificate,
    SearchShape,
    edmonds_invariants,
    g_signature_feasible,
    lefschetz,
    obstruction_lemma,
    weyl_signature,
)
from .weylgroups import coxeter_number, element_order

__all__ = [
    "REALIZABLE",
    "NOT_REALIZABLE",
    "OPEN",
    "OUT_REDUCIBLE",
    "OUT_CASE_B",
    "STATUSES",
    "BAD_CLASSES",
    "Verdict",
    "CountRow",
    "realizability_verdict",
    "counts_table",
    "verify_paper",
    "power_charpoly",
    "matches_class",
    "order8_certificate",
    "order10_certificate",
]

REALIZABLE = "realizable_all_equivalent"
NOT_REALIZABLE = "not_smoothly_realizable"
OPEN = "open_question"
OUT_REDUCIBLE = "out_of_scope_reducible"
OUT_CASE_B = "out_of_scope_case_b"
STATUSES = (REALIZABLE, NOT_REALIZABLE, OPEN, OUT_REDUCIBLE, OUT_CASE_B)

# bases a justification can rest on
FIXED_POINT_OBSTRUCTION = "fixed-point obstruction"
G_SIGNATURE = "G-signature infeasibility"
POWER_REDUCTION = "power reduction"
TOPOLOGY_TRUSTED = "topological step, not replayed"
COMPLEX_REALIZATION = "complex automorphism and equivalence of realizations"
IRREDUCIBILITY = "irreducibility test"
COXETER_DICHOTOMY = "order-30 dichotomy in W_8"
OPEN_PROBLEM = "open problem"

BAD_CLASSES = ("D_2+D_3", "D_5(a_1)", "D_4+3A_1", "A_7", "D_6+A_1", "E_7(a_3)")

PINNED_COUNT_8 = 23224320


# ---------------------------------------------------------------- fingerprint matching


def power_charpoly(chi: IntPolynomial, k: int) -> IntPolynomial:
    """Characteristic polynomial of g^k from that of a finite-order g.

    A primitive j-th root of unity raised to the k-th power is a primitive
    j/gcd(j, k)-th root, so Phi_j becomes Phi_{j'}^(phi(j)/phi(j')).
    """
    fac = cyclotomic_factorization(chi)
    if fac is None:
        raise DomainError("polynomial is not a product of cyclotomic polynomials")
    parts = []
    for j, mult in fac.items():
        jj = j // gcd(j, k)
        parts += [cyclotomic_int(jj)] * (mult * _totient(j) // _totient(jj))
    return IntPolynomial.product(*parts) if parts else IntPolynomial.one()


def matches_class(fp: cj.Fingerprint, label: str) -> bool:
    """Fingerprint equality with a labelled class, power polynomials included."""
    n, chi, order = cj.carter_polynomial(label)
    if (fp.n, fp.order, fp.cuspidal_W, fp.charpoly_E) != (n, order, True, chi):
        return False
    return all(p == power_charpoly(chi, d) for d, p in fp.charpoly_powers)


def _bad_label(fp: cj.Fingerprint):
    for label in BAD_CLASSES:
        if matches_class(fp, label):
            return label
    return None


# ---------------------------------------------------------------- certificates


def _diff_squares_nonzero(N: int):
    """All (a, b) with a, b nonzero and a^2 - b^2 = N (finite for N != 0)."""
    out = []
    for u in range(1, abs(N) + 1):
        if N % u:
            continue
        for su in (u, -u):
            v = N // su
            if (su + v) % 2 == 0:
                a, b = (su + v) // 2, (v - su) // 2
                if a and b:
                    out.append((a, b))
    return sorted(set(out))


def order10_certificate(g: Isometry) -> InfeasibilityCertificate:
    """Single-point G-signature certificate for an order-10 element with charpoly (t^5+1)(t+1)^2."""
    n = g.n
    chi = char_poly_restricted(g, e_lattice(n))
    lam = lefschetz(g)
    sig = weyl_signature(g)
    f2 = g ** 5
    f5 = g ** 2
    e2 = edmonds_invariants(f2, 2)
    e5 = edmonds_invariants(f5, 5)
    shape = SearchShape(points=1)
    sols = g_signature_feasible(10, sig, shape)
    checks = (
        ("g has order 10", element_order(g) == 10),
        ("charpoly of g on E_n is (t^5 + 1)(t + 1)^2",
         chi == IntPolynomial.t_power_plus(5) * IntPolynomial.linear(-1) ** 2),
        ("charpoly of g^5 on E_n is (t + 1)^7", char_poly_restricted(f2, e_lattice(n)) == IntPolynomial.linear(-1) ** 7),
        ("Lefschetz number of g is 1", lam == 1),
        ("signature of g is 3", sig == 3),
        (f"Edmonds counts of g^5 at p = 2 are {e2.as_tuple()}, with t + r = 1 and c >= 6",
         e2.t + e2.r == 1 and e2.c >= 6),
        (f"Edmonds counts of g^2 at p = 5 are {e5.as_tuple()}, with no cyclotomic summand", e5.c == 0),
    )
    return InfeasibilityCertificate(
        subject=g,
        m=10,
        target=sig,
        shape=shape,
        solutions=tuple(sols),
        checks=checks,
        conclusion=(
            "a realization of order 10 would fix exactly one point (Lefschetz number 1 together with "
            "the Edmonds counts above); no rotation pair (a, b) at that point gives "
            f"-cot(a pi/10) cot(b pi/10) = {sig}"
        ),
    )


def order8_certificate(g: Isometry) -> InfeasibilityCertificate:
    """Arithmetic content of the nonrealizability argument for the order-8 class A_7."""
    n = g.n
    K = canonical_class(n)
    lam = [lefschetz(g ** k) for k in range(1, 8)]
    sig = [weyl_signature(g ** k) for k in range(1, 8)]
    e2 = edmonds_invariants(g ** 4, 2)
    d = g.dim
    plus = [[g.matrix[i][j] + (i == j) for j in range(d)] for i in range(d)]
    minus_space = integer_kernel(plus)
    alpha = LatticeVector(n, tuple(minus_space[0])).primitive() if len(minus_space) == 1 else None
    fixed = fixed_sublattice(g)
    qa = form_value(alpha, alpha) if alpha is not None else None
    qk = form_value(K, K)
    # 2 = Q(aK) + Q(b alpha) = qk a^2 + qa b^2 with qk = 2, qa = -2
    sols = _diff_squares_nonzero(2 // 2) if (qk, qa) == (2, -2) else None
    csc_one = [k for k in range(1, 8) if csc2_pi(k, 8) == 1]
    half8 = g_signature_feasible(8, 2, SearchShape(points=2, first_rotations=(4,)))
    half4 = g_signature_feasible(4, 2, SearchShape(points=2, first_rotations=(2,)))
    shape = SearchShape(points=2, point_rotations=(1, 3, 5, 7), second_offset=2)
    main = g_signature_feasible(8, 2, shape)
    checks = (
        ("g has order 8", element_order(g) == 8),
        ("Lefschetz number of g^k is 2 for k = 1..7", all(x == 2 for x in lam)),
        ("signature of g^k is 2 for k = 1..7", all(x == 2 for x in sig)),
        ("Edmonds counts of g^4 at p = 2 are (2, 2, 2)", e2.as_tuple() == (2, 2, 2)),
        ("fixed sublattice of g is Z{K}", fixed.rank == 1 and K in fixed),
        ("(-1)-eigenspace of g is spanned by a root alpha", alpha is not None and qa == -2),
        ("2(a^2 - b^2) = 2 has no solution with a, b nonzero", sols == []),
        ("csc^2(k pi/8) = 1 only for k = 4 in 1..7", csc_one == [4]),
        ("two points with a half-turn, orders 8 and 4: no configuration gives signature 2",
         half8 == [] and half4 == []),
    )
    return InfeasibilityCertificate(
        subject=g,
        m=8,
        target=2,
        shape=shape,
        solutions=tuple(main),
        checks=checks,
        conclusion=(
            "every G-signature constraint arising in the fixed-set case analysis for an order-8 "
            "realization fails in exact arithmetic; the case analysis itself (fixed sets of the "
            "powers and the quotient-manifold step) is topology and is taken as given"
        ),
    )


# ---------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class Verdict:
    subject: Isometry
    fingerprint: cj.Fingerprint
    status: str
    justification: tuple  # (claim, basis)
    certificate: object = None
    label: str | None = None
    irreducibility: str | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise DomainError(f"unknown status {self.status!r}")

    def to_json(self) -> dict:
        return {
            "subject": [list(r) for r in self.subject.matrix],
            "fingerprint": self.fingerprint.to_json(),
            "status": self.status,
            "label": self.label,
            "irreducibility": self.irreducibility,
            "justification": [{"claim": c, "basis": b} for c, b in self.justification],
            "certificate": self.certificate.to_json() if self.certificate is not None else None,
        }


def _bad_verdict(g, fp, label, irr):
    if label == "D_2+D_3":
        cert = obstruction_lemma(g, fp.order)
        just = ((f"the obstruction fires with p = {cert.prime}", FIXED_POINT_OBSTRUCTION),)
    elif label == "D_4+3A_1":
        cert = obstruction_lemma(g, fp.order)
        just = ((f"the obstruction fires with p = {cert.prime}", FIXED_POINT_OBSTRUCTION),)
    elif label == "D_5(a_1)":
        h = g ** 3
        if not matches_class(cj.fingerprint(h), "D_2+D_3"):
            raise InternalError("cube of a D_5(a_1) element should be of type D_2+D_3")
        cert = obstruction_lemma(h)
        just = (
            ("g^3 lies in the class D_2+D_3", POWER_REDUCTION),
            (f"the obstruction fires on g^3 with p = {cert.prime}", FIXED_POINT_OBSTRUCTION),
            ("a finite-order realization of g would give one of g^3", POWER_REDUCTION),
        )
    elif label == "D_6+A_1":
        cert = order10_certificate(g)
        just = (
            ("a realization of order 10 has a single fixed point", TOPOLOGY_TRUSTED),
            ("no rotation data at one point matches the signature", G_SIGNATURE),
        )
    elif label == "E_7(a_3)":
        h = g ** 3
        if not matches_class(cj.fingerprint(h), "D_6+A_1"):
            raise InternalError("cube of an E_7(a_3) element should be of type D_6+A_1")
        cert = order10_certificate(h)
        just = (
            ("g^3 has charpoly (t^5 + 1)(t + 1)^2 on E_7", POWER_REDUCTION),
            ("g^3 admits no realization of order 10", G_SIGNATURE),
            ("a realization of g of order 30 would give one of g^3 of order 10", POWER_REDUCTION),
        )
    elif label == "A_7":
        cert = order8_certificate(g)
        just = (
            ("every fixed-set configuration of an order-8 realization violates a G-signature "
             "identity checked exactly", G_SIGNATURE),
            ("the enumeration of fixed-set configurations", TOPOLOGY_TRUSTED),
        )
    else:
        raise InternalError(f"no certificate route for {label}")
    if cert is None:
        raise InternalError(f"expected certificate for {label} did not materialise")
    return Verdict(g, fp, NOT_REALIZABLE, just, cert, label, irr)


def realizability_verdict(g: Isometry) -> Verdict:
    """Verdict for a finite-order element g of W_n, 3 <= n <= 8."""
    if not 3 <= g.n <= 8:
        raise DomainError(f"verdicts cover 3 <= n <= 8, got n = {g.n}")
    irr = cj.irreducibility_case(g)
    fp = cj.fingerprint(g)
    label = cj.carter_label(fp)
    if irr == cj.REDUCIBLE:
        return Verdict(g, fp, OUT_REDUCIBLE,
                       (("g preserves an orthogonal splitting off a blow-up", IRREDUCIBILITY),), None, label, irr)
    if irr == cj.CASE_B:
        return Verdict(g, fp, OUT_CASE_B,
                       (("fixed sublattice has rank 2, so it is not Z{K}; irreducibility is not certified",
                         IRREDUCIBILITY),), None, label, irr)
    if g.n <= 7:
        bad = _bad_label(fp)
        if bad is not None:
            return _bad_verdict(g, fp, bad, irr)
        return Verdict(g, fp, REALIZABLE, (
            ("fixed sublattice is Z{K}", IRREDUCIBILITY),
            ("the class is realized by an automorphism of a del Pezzo surface and all "
             "realizations are equivalent", COMPLEX_REALIZATION),
        ), None, label, irr)
    # n = 8
    if fp.order == 30:
        if fp.trace_full == 0:
            return Verdict(g, fp, REALIZABLE, (
                ("order 30 with trace 0 on H_2: the Coxeter class", COXETER_DICHOTOMY),
                ("Coxeter elements are realized by automorphisms", COMPLEX_REALIZATION),
            ), None, label, irr)
        cert = obstruction_lemma(g ** 5, 6)
        if cert is None:
            raise InternalError("the order-30 non-Coxeter class should be obstructed through g^5")
        return Verdict(g, fp, NOT_REALIZABLE, (
            ("order 30 with trace 1 on H_2: the non-Coxeter class", COXETER_DICHOTOMY),
            (f"the obstruction fires on g^5 with p = {cert.prime}", FIXED_POINT_OBSTRUCTION),
            ("a finite-order realization of g would give one of g^5", POWER_REDUCTION),
        ), cert, label, irr)
    if fp.order == 2 or (fp.order > 2 and _is_prime(fp.order)):
        kind = "Bertini involution" if fp.order == 2 else f"power of a Coxeter element (order {fp.order})"
        return Verdict(g, fp, REALIZABLE, (
            (f"fixed sublattice is Z{{K}} and g is conjugate to a {kind}", IRREDUCIBILITY),
            ("realized by an automorphism; realizations are equivalent", COMPLEX_REALIZATION),
        ), None, label, irr)
    return Verdict(g, fp, OPEN, (
        ("for irreducible classes in W_8 outside the Coxeter class, the order-30 class, the odd "
         "prime orders and the Bertini involution, it is not known whether every realization by a "
         "finite-order diffeomorphism is equivalent to one by an automorphism", OPEN_PROBLEM),
    ), None, label, irr)


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


# ---------------------------------------------------------------- counts table


@dataclass(frozen=True)
class CountRow:
    n: int
    h: int
    count: int
    method: str  # exhaustive | orbit | pinned

    def to_json(self) -> dict:
        return {"n": self.n, "h": self.h, "count": self.count, "method": self.method}


def irreducible_coxeter_order_count(n: int, *, threads: int = 1, cache_dir=None) -> int:
    """Elements of W_n of order h_n whose fixed sublattice is Z{K}, by exhaustive scan."""
    from .cache import get_group

    G = get_group(n, "weyl", threads=threads, cache_dir=cache_dir)
    polys = engine.batch_charpoly(G.elements)
    uniq, inv = np.unique(polys, axis=0, return_inverse=True)
    inv = np.asarray(inv).ravel()
    h = coxeter_number(n)
    good = np.zeros(len(uniq), dtype=bool)
    for k, row in enumerate(uniq):
        p = IntPolynomial(tuple(int(x) for x in row))
        # finite order means semisimple, so the fixed rank is the multiplicity of 1
        good[k] = cyclotomic_order(p) == h and p.multiplicity(1) == 1
    return int(good[inv].sum())


def counts_table(large: bool = False, *, threads: int = 1, cache_dir=None, progress=None) -> dict:
    """n -> CountRow for 3 <= n <= 8; the n = 8 entry is pinned unless ``large``."""
    out = {}
    for n in range(3, 8):
        out[n] = CountRow(n, coxeter_number(n),
                          irreducible_coxeter_order_count(n, threads=threads, cache_dir=cache_dir), "exhaustive")
    if large:
        c8 = cj.coxeter_class_size(8, large=True, threads=threads, progress=progress)
        out[8] = CountRow(8, 30, c8, "orbit")
    else:
        out[8] = CountRow(8, 30, PINNED_COUNT_8, "pinned")
    return out


def verify_paper(skip_large: bool = False, **kwargs):
    """Structured pass/fail report over the full reference check suite."""
    from .checks import verify_paper as run

    return run(skip_large, **kwargs)

import pytest
from hypothesis import given, settings, strategies as st

from dpweyl.cache import get_group
from dpweyl.conjugacy import CASE_B, census, fingerprint
from dpweyl.dcycles import realize_type
from dpweyl.errors import DomainError
from dpweyl.fixtures import load_fixture
from dpweyl.lattice import Isometry, char_poly_restricted, e_lattice
from dpweyl.obstruct import InfeasibilityCertificate, ObstructionCertificate
from dpweyl.verdict import (
    BAD_CLASSES,
    NOT_REALIZABLE,
    OPEN,
    OUT_CASE_B,
    OUT_REDUCIBLE,
    REALIZABLE,
    STATUSES,
    Verdict,
    counts_table,
    matches_class,
    order8_certificate,
    order10_certificate,
    power_charpoly,
    realizability_verdict,
)
from dpweyl.weylgroups import standard_coxeter


def test_identity_is_reducible():
    for n in (3, 5, 8):
        v = realizability_verdict(Isometry.identity(n))
        assert v.status == OUT_REDUCIBLE and v.certificate is None


def test_rank_bounds():
    with pytest.raises(DomainError):
        realizability_verdict(Isometry.identity(2))
    with pytest.raises(DomainError):
        realizability_verdict(Isometry.identity(9))


def test_status_validation():
    g = Isometry.identity(3)
    with pytest.raises(DomainError):
        Verdict(g, fingerprint(g), "maybe", ())
    assert len(STATUSES) == 5


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_power_charpoly_matches_direct(i, k):
    G = get_group(6)
    g = G.isometry(i % G.order)
    k = 1 + k % 24
    E = e_lattice(6)
    assert power_charpoly(char_poly_restricted(g, E), k) == char_poly_restricted(g ** k, E)


def test_w5_verdicts():
    by_label = {}
    for r in census(5):
        if r.fingerprint.cuspidal_W:
            by_label[r.carter_label] = realizability_verdict(r.representative)
    assert by_label["D_5"].status == REALIZABLE
    for label in ("D_2+D_3", "D_5(a_1)"):
        v = by_label[label]
        assert v.status == NOT_REALIZABLE and v.label == label
        assert isinstance(v.certificate, ObstructionCertificate)
    assert by_label["D_5(a_1)"].certificate.power_checked >= 1


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6), st.sampled_from(range(18)))
def test_verdict_is_conjugation_invariant(j, cls):
    rec = census(5)[cls]
    G = get_group(5)
    h = G.isometry(j % G.order)
    g = rec.representative
    a = realizability_verdict(g)
    b = realizability_verdict(h @ g @ h.inverse())
    assert (a.status, a.label, a.irreducibility) == (b.status, b.label, b.irreducibility)


def test_bad_class_matching_uses_labels_consistently():
    for r in census(5):
        for label in BAD_CLASSES:
            if matches_class(r.fingerprint, label):
                assert r.carter_label == label


def test_case_b_involution_in_p7():
    g = realize_type((1,) * 6)
    v = realizability_verdict(g)
    assert v.irreducibility == CASE_B and v.status == OUT_CASE_B


def test_order10_and_order8_certificates():
    d6 = [r.representative for r in census(7) if r.carter_label == "D_6+A_1"][0]
    cert = order10_certificate(d6)
    assert isinstance(cert, InfeasibilityCertificate) and cert.m == 10 and cert.target == 3
    assert all(ok for _, ok in cert.checks)
    cert8 = order8_certificate(load_fixture("w_a7"))
    assert cert8.m == 8 and not cert8.solutions
    js = cert8.to_json()
    assert js["shape"]["second_offset"] == 2 and js["solutions"] == []


def test_w7_fixture_verdicts():
    assert realizability_verdict(load_fixture("w_d4_3a1")).status == NOT_REALIZABLE
    v = realizability_verdict(load_fixture("w_a7"))
    assert v.status == NOT_REALIZABLE and v.label == "A_7"


def test_w8_rules():
    cox = standard_coxeter(8)
    assert realizability_verdict(cox).status == REALIZABLE
    for k, status in ((2, OPEN), (3, OPEN), (5, OPEN), (6, REALIZABLE), (10, REALIZABLE), (15, REALIZABLE)):
        assert realizability_verdict(cox ** k).status == status, k
    v = realizability_verdict(load_fixture("r"))
    assert v.status == NOT_REALIZABLE
    assert v.certificate.prime == 3 and v.certificate.subject == load_fixture("r") ** 5
    assert realizability_verdict(load_fixture("r3")).status in STATUSES


def test_justifications_have_basis():
    for g in (standard_coxeter(5), load_fixture("r"), standard_coxeter(8) ** 2):
        v = realizability_verdict(g)
        assert v.justification and all(c and b for c, b in v.justification)
        js = v.to_json()
        assert js["status"] == v.status and len(js["justification"]) == len(v.justification)


def test_counts_table_small():
    table = counts_table()
    assert [table[n].count for n in range(3, 9)] == [2, 24, 240, 4320, 161280, 23224320]
    assert table[8].method == "pinned" and table[3].method == "exhaustive"

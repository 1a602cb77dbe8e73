import numpy as np
import pytest

from b0kit import families as fam
from b0kit.bogomolov import Strategy, b0
from b0kit.certificate import (
    Certificate,
    FailureReport,
    _cyclic_pair_table,
    check_lemf,
    check_lemma21,
    cyclic_check,
)
from b0kit.pcgroup import direct_product, quotient_by_tail


def g0(p):
    return fam.build(fam.FamilySpec("G2", p, 0))


def test_certificate_g0_5():
    c = check_lemma21(g0(5), 3)
    assert isinstance(c, Certificate) and c.valid
    assert (c.t, c.h, c.b0_lower_bound) == (5, 25, 5)
    assert c.pair_scan_passed
    d = c.to_dict()
    assert d["N"] == ["f4", "f5"] and d["certified"]


def test_certificate_accepts_subgroup():
    P = fam.build(fam.FamilySpec("G243_28", 3))
    N = P.subgroup([P.gen(3), P.gen(4)])
    c = check_lemma21(P, N)
    assert isinstance(c, Certificate) and c.valid and c.b0_lower_bound == 3


def test_abelian_whole_group_gives_no_certificate():
    P = fam.elementary_abelian(3, 2)
    r = check_lemma21(P, 0)
    assert isinstance(r, FailureReport)
    assert r.h == 1 and r.t >= 1


def test_failing_scan_has_witness():
    # Heis(3) x C3 with N = the last factor: G/N = Heis(3) has commuting non-cyclic pairs
    P = direct_product(fam.heisenberg(3), fam.cyclic(3))
    r = check_lemma21(P, 3)
    assert isinstance(r, FailureReport) and r.witness is not None
    x, y, qx, qy = r.witness
    assert P.commutator(x, y) == P.identity
    Q = quotient_by_tail(P, 3)
    cyc, comm = cyclic_check(qx, qy, Q)
    assert comm and not cyc


def test_non_segment_rejected():
    P = g0(5)
    with pytest.raises(ValueError):
        check_lemma21(P, P.subgroup([P.gen(2)]))


def test_nonabelian_n_rejected():
    P = g0(5)
    with pytest.raises(ValueError):
        check_lemma21(P, 1)  # <f2, ..., f5> is not abelian


def test_cyclic_check_examples():
    Q = quotient_by_tail(g0(5), 3)
    f1, f2, f3 = Q.generators
    assert cyclic_check(f1, Q.identity, Q) == (True, True)
    assert cyclic_check(f1, f2, Q) == (False, False)
    assert cyclic_check(f3, Q.power(f3, 2), Q) == (True, True)


@pytest.mark.parametrize("Q", [quotient_by_tail(g0(5), 3), fam.modular(3), fam.dihedral(8), direct_product(fam.cyclic(4), fam.cyclic(2))],
                         ids=lambda Q: Q.name or "Q")
def test_pair_table_matches_cyclic_check(Q):
    T = Q.table()
    cyc = _cyclic_pair_table(Q)
    rng = np.random.default_rng(0)
    idx = rng.integers(0, T.order, size=(300, 2))
    for a, b in idx:
        want, comm = cyclic_check(T.element(int(a)), T.element(int(b)), Q)
        assert bool(cyc[a, b]) == want


def test_conj_scan_matches_full_scan():
    for spec in fam.family_members(3):
        P = fam.build(spec)
        a = check_lemma21(P, 3, Strategy.FULL)
        c = check_lemma21(P, 3, Strategy.CONJ_REDUCED)
        assert type(a) is type(c) and a.valid == c.valid
        assert a.pairs_scanned > c.pairs_scanned
    P = direct_product(fam.heisenberg(3), fam.cyclic(3))
    assert isinstance(check_lemma21(P, 3, Strategy.FULL), FailureReport)
    assert isinstance(check_lemma21(P, 3, Strategy.CONJ_REDUCED), FailureReport)


@pytest.mark.parametrize("p", [3, 5])
def test_bound_below_exact(p):
    for spec in fam.family_members(p):
        P = fam.build(spec)
        c = check_lemma21(P, 3)
        assert c.valid and c.t == p and c.h == p * p
        assert b0(P).b0.order >= c.b0_lower_bound


def test_bound_below_exact_p7():
    P = g0(7)
    c = check_lemma21(P, 3)
    assert c.valid and c.b0_lower_bound == 7
    assert b0(P).b0.order >= 7


def test_controls_never_certified():
    for P in fam.order_p5_controls(3) + [fam.maximal_class_4(3), direct_product(fam.heisenberg(3), fam.cyclic(3))]:
        for k in range(1, P.n):
            try:
                r = check_lemma21(P, k)
            except ValueError:
                continue  # N not abelian
            assert not (isinstance(r, Certificate) and r.valid), (P.name, k)


def test_lemf():
    for P in [fam.build(fam.FamilySpec("G2", 7, 0)), fam.build(fam.FamilySpec("G243_29", 3))]:
        rep = check_lemf(P)
        assert rep.ok, rep.conditions
    rep = check_lemf(fam.heisenberg(3))
    assert not rep.ok and rep.conditions == {"shape": False}
    rep = check_lemf(fam.elementary_abelian(3, 5))
    assert not rep.ok and not rep.conditions["[f2,f1] = f3"]
    assert rep.to_dict()["ok"] is False

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from b0kit import families as fam
from b0kit.linalg import AbelianGroupInvariants
from b0kit.pcgroup import (
    CollectionBudgetExceeded,
    PcPresentation,
    PresentationError,
    collect,
    direct_product,
    enforced_quotient,
    format_presentation,
    is_consistent,
    parse_presentation,
    quotient_by_tail,
)


def g0(p):
    return fam.build(fam.FamilySpec("G2", p, 0))


def g243(tag="G243_28"):
    return fam.build(fam.FamilySpec(tag, 3))


def test_collect_examples():
    P = g0(5)
    assert collect(P, [(1, 1), (0, 1)]) == (1, 1, 1, 0, 0)
    assert collect(P, []) == P.identity
    Q = g243()
    assert collect(Q, [(3, 2), (0, 1)]) == (1, 0, 0, 2, 2)


def test_collect_negative_and_large_exponents():
    P = g243()
    f2 = P.gen(1)
    assert collect(P, [(1, -1)]) == P.inverse(f2)
    assert collect(P, [(1, 9)]) == P.identity  # f2 has order 9
    assert collect(P, [(1, 3)]) == P.power(f2, 3)


def test_collect_budget():
    with pytest.raises(CollectionBudgetExceeded):
        collect(g0(7), [(i % 5, 6) for i in range(200)], budget=10)


def test_commutator_examples():
    for spec in fam.family_members(5) + fam.family_members(3):
        P = fam.build(spec)
        f = P.generators
        assert P.commutator(f[1], f[0]) == f[2]
        assert P.commutator(f[3], f[1]) == P.identity
        assert P.commutator(f[2], f[2]) == P.identity


def test_commutator_convention():
    P = g0(5)
    rnd = random.Random(0)
    for _ in range(200):
        a = tuple(rnd.randrange(5) for _ in range(5))
        b = tuple(rnd.randrange(5) for _ in range(5))
        want = P.product([P.inverse(a), P.inverse(b), a, b])
        assert P.commutator(a, b) == want
        assert P.conjugate(a, b) == P.product([P.inverse(b), a, b])


CORPUS = [g0(3 + 2), g243(), g243("G243_29"), g243("G243_30"), fam.dihedral(16), fam.generalized_quaternion(16),
          fam.heisenberg(3), fam.modular(5), fam.symmetric3(), fam.dicyclic12()]


@pytest.mark.parametrize("P", CORPUS, ids=lambda P: P.name)
def test_associativity_random_triples(P):
    T = P.table()
    rng = np.random.default_rng(1)
    a, b, c = (rng.integers(0, T.order, size=10_000) for _ in range(3))
    assert np.array_equal(T.mul(T.mul(a, b), c), T.mul(a, T.mul(b, c)))
    # and through the collector on a subsample
    for i in range(300):
        x, y, z = (T.element(int(v[i])) for v in (a, b, c))
        assert P.multiply(P.multiply(x, y), z) == P.multiply(x, P.multiply(y, z))


@pytest.mark.parametrize("P", CORPUS + fam.controls(3) + fam.controls(5), ids=lambda P: P.name)
def test_enumeration_count(P):
    assert P.is_consistent()
    elems = set(P.enumerate_elements())
    assert len(elems) == P.nominal_order
    assert P.table().order == P.nominal_order


def test_table_matches_collector():
    P = g243("G243_30")
    T = P.table()
    rnd = random.Random(5)
    for _ in range(500):
        i, j = rnd.randrange(T.order), rnd.randrange(T.order)
        assert T.element(int(T.mul(i, j))) == P.multiply(T.element(i), T.element(j))
        assert T.element(int(T.inverses[i])) == P.inverse(T.element(i))


def test_consistency_examples():
    assert is_consistent(g0(5))[0]
    assert is_consistent(fam.cyclic(7))[0]
    ok, fails = is_consistent(fam.build(fam.FamilySpec("G28_IMPOSTOR", 5)))
    assert not ok and fails
    label, lhs, rhs = fails[0]
    assert lhs != rhs


@pytest.mark.parametrize("p, order", [(5, 625), (7, 2401)])
def test_enforced_quotient_collapse(p, order):
    Q, got = enforced_quotient(fam.build(fam.FamilySpec("G28_IMPOSTOR", p)))
    assert got == order
    assert Q.is_consistent() and Q.table().order == order


def test_enforced_quotient_fixed_point():
    P = g0(5)
    Q, order = enforced_quotient(P)
    assert order == 5**5 and Q == P


def test_enforced_quotient_rejects_noncentral():
    # g2^g1 = g2^2: the overlap failure forces a relation on the non-central g2
    P = PcPresentation((3, 3), ((0, 0), (0, 0)), {(0, 1): (0, 2)})
    if P.is_consistent():
        pytest.skip("presentation happened to be consistent")
    with pytest.raises(PresentationError):
        enforced_quotient(P)


def test_structure_of_g0():
    P = g0(5)
    Z = P.center()
    assert Z.order == 5 and P.gen(4) in Z
    assert P.derived_subgroup().order == 125
    assert P.abelianization() == AbelianGroupInvariants((5, 5))
    assert P.element_order(P.identity) == 1
    assert P.exponent() == 25  # f1^p = f5


def test_structure_of_243():
    P = g243()
    assert P.element_order(P.gen(1)) == 9
    assert P.exponent() == 9
    assert P.center().order == 3


def test_element_orders_divide_group_order():
    for P in CORPUS:
        T = P.table()
        assert np.all(T.order % T.element_orders() == 0)


def test_quotient_by_tail_examples():
    Q = quotient_by_tail(g0(5), 3)
    assert Q.nominal_order == 125 and Q.is_consistent()
    assert not Q.is_abelian() and Q.exponent() == 5
    assert quotient_by_tail(g0(5), 0).nominal_order == 1
    A = quotient_by_tail(g243(), 2)
    assert A.is_abelian() and A.abelianization() == AbelianGroupInvariants((3, 3))


def test_quotient_by_tail_range():
    # with the triangular shape every terminal segment is normal; only the index is checked
    with pytest.raises(ValueError):
        quotient_by_tail(g0(5), 6)


def test_direct_product_examples():
    C = direct_product(fam.cyclic(2), fam.cyclic(3))
    assert C.nominal_order == 6 and C.is_abelian() and C.is_consistent()
    D = direct_product(g0(5), fam.cyclic(2))
    assert D.is_consistent() and D.nominal_order == 2 * 5**5
    assert D.center().order == 10
    triv = PcPresentation((), (), {})
    assert direct_product(g0(5), triv).relative_orders == g0(5).relative_orders


def test_text_roundtrip():
    for P in CORPUS + [fam.build(fam.FamilySpec("G28_IMPOSTOR", 5))]:
        Q = parse_presentation(format_presentation(P), name=P.name)
        assert Q.relative_orders == P.relative_orders
        assert Q.power_words == P.power_words
        assert Q.conjugate_words == P.conjugate_words
        assert Q.fingerprint == P.fingerprint


@pytest.mark.parametrize(
    "text",
    [
        "order 1 2\n",  # missing header
        "pcgroup 2\norder 1 2\n",  # missing order line
        "pcgroup 2\norder 1 2\norder 2 2\npower 1 = g2^2\n",  # exponent out of range
        "pcgroup 3\norder 1 2\norder 2 2\norder 3 2\npower 1 = g3*g2\n",  # decreasing indices
        "pcgroup 2\norder 1 2\norder 2 2\npower 2 = g1\n",  # power word uses a lower generator
        "pcgroup 2\norder 1 2\norder 2 2\nconj 1 ^ 2 = g1\n",  # i > j
        "pcgroup 2\norder 1 2\norder 2 2\nfrobnicate\n",
    ],
)
def test_parser_rejects(text):
    with pytest.raises(PresentationError):
        parse_presentation(text)


def test_parser_comments_and_defaults():
    P = parse_presentation("# Q8\npcgroup 3\norder 1 2\norder 2 2\norder 3 2\npower 1 = g3\npower 2 = g3\nconj 2 ^ 1 = g2*g3\n")
    assert P.is_consistent() and P.nominal_order == 8
    T = P.table()
    assert int((T.element_orders() == 2).sum()) == 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(-12, 12)), max_size=12))
def test_collect_agrees_with_multiply(word):
    P = g0(5)
    acc = P.identity
    for i, e in word:
        acc = P.multiply(acc, P.power(P.gen(i), e))
    assert collect(P, word) == acc

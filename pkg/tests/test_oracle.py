import itertools
from math import gcd

import numpy as np
import pytest

from b0kit import families as fam
from b0kit.bogomolov import b0
from b0kit.homology import schur_multiplier
from b0kit.linalg import AbelianGroupInvariants as Inv
from b0kit.linalg import howell_form, span_order
from b0kit.oracle import (
    MulTable,
    OracleError,
    analyse,
    b0_direct,
    bicyclic_subgroups,
    cocycle_space,
    h2_mod_n,
    h2_qz,
    restriction_kernel,
    verify_space,
)
from b0kit.pcgroup import PcPresentation, TooLargeToEnumerate, direct_product


def table(P):
    return MulTable.from_presentation(P)


def _brute_h2_order(T, n):
    """|H^2(G, Z/n)| by listing every normalized cochain (tiny groups only)."""
    m = T.m
    cells = [(x, y) for x in range(1, m) for y in range(1, m)]
    t = T.t
    z = 0
    for vals in itertools.product(range(n), repeat=len(cells)):
        f = np.zeros((m, m), dtype=np.int64)
        for (x, y), v in zip(cells, vals):
            f[x, y] = v
        d = f[None, :, :] - f[t] + f[np.arange(m)[:, None, None], t[None, :, :]] - f[:, :, None]
        if not (d % n).any():
            z += 1
    bounds = set()
    for c in itertools.product(range(n), repeat=m - 1):
        c = np.concatenate([[0], c])
        db = (c[:, None] + c[None, :] - c[t]) % n
        bounds.add(db.tobytes())
    return z // len(bounds)


@pytest.mark.parametrize(
    "P, n",
    [(fam.cyclic(2), 2), (fam.cyclic(3), 3), (fam.cyclic(4), 2), (fam.elementary_abelian(2, 2), 2), (fam.cyclic(3), 2)],
    ids=lambda x: getattr(x, "name", str(x)),
)
def test_h2_mod_n_against_brute_force(P, n):
    T = table(P)
    assert h2_mod_n(T, n).h2.order == _brute_h2_order(T, n)


def test_h2_mod_n_examples():
    assert h2_mod_n(table(fam.cyclic(2)), 2).h2.order == 2
    assert h2_mod_n(table(fam.elementary_abelian(2, 2)), 2).h2.order == 8
    for m, n in ((4, 2), (6, 4), (5, 5), (9, 3), (8, 12)):
        assert h2_mod_n(table(fam.cyclic(m)), n).h2.order == gcd(m, n)


def test_trivial_group():
    T = MulTable(np.zeros((1, 1), dtype=np.int64))
    assert h2_qz(T).is_trivial and b0_direct(T).is_trivial
    triv = PcPresentation((), (), {})
    rep = analyse(triv)
    assert rep.order == 1 and rep.h2_qz.is_trivial


def test_h2_qz_examples():
    assert h2_qz(table(fam.cyclic(6))).is_trivial
    assert h2_qz(table(fam.elementary_abelian(2, 2))) == Inv((2,))
    d8 = h2_qz(table(fam.dihedral(8)))
    assert d8 in (Inv(), Inv((2,)))
    assert d8 == Inv((2,))
    assert h2_qz(table(fam.generalized_quaternion(8))).is_trivial
    assert h2_qz(table(fam.heisenberg(3))) == Inv((3, 3))


def test_b0_direct_examples():
    for P in (fam.cyclic(8), direct_product(fam.cyclic(4), fam.cyclic(2)), fam.generalized_quaternion(8), fam.heisenberg(3), fam.dihedral(16)):
        assert b0_direct(table(P)).is_trivial, P.name


@pytest.mark.parametrize("P", [fam.elementary_abelian(2, 3), fam.heisenberg(3), fam.dihedral(16), direct_product(fam.dihedral(8), fam.cyclic(2))],
                         ids=lambda P: P.name)
def test_space_verification(P):
    T = table(P)
    C = cocycle_space(T, T.m)
    verify_space(C)
    # coboundaries: |B^2| = n^(m-1) / |Hom(G, Z/n)|
    b = span_order(howell_form(C.B, C.n), C.n)
    assert b * span_order(howell_form(C.hom, C.n), C.n) == C.n ** (T.m - 1)


def test_verify_space_catches_corruption():
    T = table(fam.elementary_abelian(2, 2))
    C = cocycle_space(T, 4)
    C.Z = C.Z.copy()
    C.Z[0] = (C.Z[0] + 1) % 4
    C.Z[0, 0] = (C.Z[0, 0] + 1) % 4
    with pytest.raises(OracleError):
        verify_space(C)


@pytest.mark.parametrize("P", [fam.elementary_abelian(2, 3), fam.heisenberg(3), fam.dihedral(8), direct_product(fam.cyclic(4), fam.cyclic(4))],
                         ids=lambda P: P.name)
def test_restriction_to_cyclic_kills_everything(P):
    T = table(P)
    C = cocycle_space(T, T.m)
    r = len(C.Z)
    for g in range(1, T.m):
        A = T.closure([g])
        K = restriction_kernel(C, A)
        assert span_order(howell_form(K, C.n), C.n) == C.n**r


def test_restriction_functorial():
    # a class killed on A stays killed on every bicyclic B inside A
    P = direct_product(fam.cyclic(4), fam.cyclic(4))
    T = table(P)
    C = cocycle_space(T, T.m)
    subs = bicyclic_subgroups(T, maximal_only=False)
    kernels = [howell_form(restriction_kernel(C, A), C.n) for A in subs]
    nested = 0
    for (A, KA), (B, KB) in itertools.permutations(zip(subs, kernels), 2):
        if len(B) < len(A) and np.isin(B, A).all():
            nested += 1
            assert np.array_equal(howell_form(np.vstack([KA, KB]), C.n), KB)
    assert nested > 0


def test_bicyclic_subgroups():
    T = table(fam.elementary_abelian(2, 3))
    subs = bicyclic_subgroups(T)
    assert all(len(S) == 4 for S in subs) and len(subs) == 7
    T = table(fam.cyclic(6))
    assert len(bicyclic_subgroups(T)) == 1


def test_multable_validation():
    bad = np.array([[0, 1, 2], [1, 0, 2], [2, 2, 0]])
    with pytest.raises(Exception):
        MulTable(bad)
    with pytest.raises(TooLargeToEnumerate):
        MulTable.from_presentation(fam.build(fam.FamilySpec("G243_28", 3)))


def test_generating_set_is_small():
    for P, d in ((fam.cyclic(12), 1), (fam.heisenberg(3), 2), (fam.elementary_abelian(2, 3), 3), (fam.dihedral(16), 2)):
        T = table(P)
        S = T.generating_set()
        assert len(S) == d and len(T.closure(S)) == T.m


@pytest.mark.parametrize("P", fam.oracle_corpus(32), ids=lambda P: P.name)
def test_agrees_with_cover(P):
    rep = analyse(P)
    assert rep.h2_qz.order == schur_multiplier(P).order
    assert rep.b0_direct == b0(P).b0


@pytest.mark.slow
def test_order_243_direct():
    P = fam.build(fam.FamilySpec("G243_28", 3))
    T = MulTable.from_presentation(P, 243)
    C = cocycle_space(T, 243)
    assert h2_qz(T, C, 243).order == schur_multiplier(P).order
    direct = b0_direct(T, C, 243)
    assert not direct.is_trivial and direct == b0(P).b0

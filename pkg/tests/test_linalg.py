import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from b0kit.linalg import (
    AbelianGroupInvariants,
    TorsionQuotient,
    cokernel_invariants,
    dump_matrix,
    howell_form,
    howell_kernel,
    howell_solve,
    load_matrix,
    quotient_order_ratio,
    smith_normal_form,
    span_order,
    submodule_quotient,
)


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def _det(M):
    # fraction-free Bareiss, exact for small integer matrices
    M = [list(r) for r in M]
    n = len(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1


def _diag(D):
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


@pytest.mark.parametrize(
    "A, diag",
    [
        ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [1, 1, 1]),
        ([[0, 1], [1, 0]], [1, 1]),
        ([[2, 0], [0, 3]], [1, 6]),
    ],
)
def test_snf_examples(A, diag):
    D, U, V = smith_normal_form(A)
    assert [abs(d) for d in _diag(D)] == diag
    assert _matmul(_matmul(U, A), V) == D


int_matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-30, 30), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@settings(max_examples=150, deadline=None)
@given(int_matrices)
def test_snf_properties(A):
    D, U, V = smith_normal_form(A)
    assert _matmul(_matmul(U, A), V) == D
    assert abs(_det(U)) == 1 and abs(_det(V)) == 1
    for i, row in enumerate(D):
        for j, x in enumerate(row):
            if i != j:
                assert x == 0
    d = [abs(x) for x in _diag(D)]
    nz = [x for x in d if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert d[: len(nz)] == nz  # zeros trail


def test_cokernel_examples():
    assert cokernel_invariants([[5, 0], [0, 5]], 2) == AbelianGroupInvariants((5, 5), 0)
    assert cokernel_invariants([], 3) == AbelianGroupInvariants((), 3)
    assert cokernel_invariants([[2, 4], [0, 6]], 2) == AbelianGroupInvariants((2, 6), 0)


@settings(max_examples=100, deadline=None)
@given(int_matrices, st.randoms(use_true_random=False))
def test_cokernel_row_shuffle_and_zero_rows(A, rnd):
    m = len(A[0])
    base = cokernel_invariants(A, m)
    B = [list(r) for r in A] + [[0] * m]
    rnd.shuffle(B)
    assert cokernel_invariants(B, m) == base


def test_quotient_order_ratio_examples():
    assert quotient_order_ratio([[3, 0], [0, 3]], [], 2)[0] == 1
    ratio, inv = quotient_order_ratio([[3, 0], [0, 3]], [[1, 0]])
    assert ratio == 3 and inv == AbelianGroupInvariants((3,))
    ratio, inv = quotient_order_ratio([[4, 0], [0, 2]], [[2, 0]])
    assert ratio == 2
    # brute force over the 8-element group Z/4 x Z/2: the image of (2, 0) has order 2
    sub = {((2 * k) % 4, 0) for k in range(4)}
    assert len(sub) == ratio


def test_quotient_order_ratio_rejects_non_torsion():
    with pytest.raises(ValueError):
        quotient_order_ratio([[2, 0]], [[0, 1]], 2)


def test_torsion_quotient_canonical():
    L = [[4, 0, 0], [0, 6, 0]]
    tq = TorsionQuotient(L, 3)
    assert tq.invariants == AbelianGroupInvariants((2, 12), 1)
    v = [1, 1, 0]
    w = [1 + 4, 1 - 12, 0]
    assert tq.canon_torsion(v) == tq.canon_torsion(w)
    with pytest.raises(ValueError):
        tq.canon_torsion([0, 0, 1])
    X = np.array([v, w, [0, 0, 0]])
    assert np.array_equal(tq.canon_torsion_array(X)[0], tq.canon_torsion_array(X)[1])


# -- Howell form -------------------------------------------------------------


def _span(H, n):
    H = np.asarray(H, dtype=np.int64)
    if H.size == 0:
        return {()}
    out = set()
    for coeffs in itertools.product(range(n), repeat=H.shape[0]):
        out.add(tuple(int(x) for x in (np.array(coeffs) @ H) % n))
    return out


def test_howell_examples():
    K = howell_kernel([[2]], 4)
    assert K.tolist() == [[2]]
    assert howell_kernel(np.eye(3, dtype=np.int64), 6).shape[0] == 0
    assert howell_solve([[2]], [1], 4) is None
    x, K = howell_solve([[2]], [2], 4)
    assert (2 * x[0]) % 4 == 2


@pytest.mark.parametrize("n", [4, 6, 8, 9, 12])
def test_howell_span_small(n):
    rng = np.random.default_rng(n)
    for _ in range(20):
        A = rng.integers(0, n, size=(rng.integers(1, 4), 3))
        H = howell_form(A, n)
        assert _span(H, n) == _span(A, n)
        assert span_order(H, n) == len(_span(A, n))


@pytest.mark.parametrize("n", [4, 8, 9, 27, 12, 6, 5])
def test_howell_canonical(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(25):
        A = rng.integers(0, n, size=(rng.integers(1, 7), rng.integers(1, 7)))
        U = rng.integers(0, n, size=(A.shape[0] + 2, A.shape[0]))
        # B spans the same module: A's rows plus random combinations, shuffled
        B = np.vstack([A, (U @ A) % n])
        B = B[rng.permutation(B.shape[0])]
        assert np.array_equal(howell_form(A, n), howell_form(B, n))


def test_howell_kernel_random_z9():
    rng = np.random.default_rng(7)
    n = 9
    A = rng.integers(0, n, size=(20, 30))
    A[:, 25:] = (3 * A[:, 25:]) % n  # some non-unit structure
    K = howell_kernel(A, n)
    assert np.all((A @ K.T) % n == 0)
    # closure sampling: random combinations stay in the kernel
    for _ in range(50):
        c = rng.integers(0, n, size=K.shape[0])
        assert np.all((A @ ((c @ K) % n)) % n == 0)
    # size check: |ker| * |image| = n^cols
    img = span_order(howell_form(A.T, n), n)
    assert span_order(K, n) * img == n**30


def test_howell_kernel_exhaustive_small():
    rng = np.random.default_rng(3)
    for n in (4, 6, 9):
        for _ in range(10):
            A = rng.integers(0, n, size=(2, 3))
            K = howell_kernel(A, n)
            brute = {x for x in itertools.product(range(n), repeat=3) if not np.any((A @ np.array(x)) % n)}
            assert _span(K, n) == brute


def test_howell_solve_random():
    rng = np.random.default_rng(11)
    n = 12
    for _ in range(30):
        A = rng.integers(0, n, size=(4, 5))
        x0 = rng.integers(0, n, size=5)
        b = (A @ x0) % n
        x, K = howell_solve(A, b, n)
        assert np.all((A @ x - b) % n == 0)
        assert np.all((A @ K.T) % n == 0)


def test_submodule_quotient():
    n = 8
    A = np.eye(2, dtype=np.int64)
    B = np.array([[2, 0], [0, 4]])
    assert submodule_quotient(A, B, n) == AbelianGroupInvariants((2, 4))


def test_matrix_dump_roundtrip():
    A = [[1, -2, 3], [0, 5, 6]]
    assert load_matrix(dump_matrix(A)) == A


def test_invariants_validation():
    with pytest.raises(ValueError):
        AbelianGroupInvariants((4, 2))
    with pytest.raises(ValueError):
        AbelianGroupInvariants((1,))
    assert AbelianGroupInvariants.from_orders([2, 3, 4]) == AbelianGroupInvariants((2, 12))
    g = AbelianGroupInvariants((3, 9), 2)
    assert AbelianGroupInvariants.from_dict(g.to_dict()) == g
    assert g.order is None and AbelianGroupInvariants().is_trivial

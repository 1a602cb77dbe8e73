"""Brute-force second cohomology for small groups, used as ground truth.

Normalized 2-cocycles with values in Z/n are parametrised by their values
f(u, s) for u != 1 and s in a small generating set S. The cocycle identity

    f(x, ys) = f(x, y) + f(xy, s) - f(y, s)

then determines f(x, w) for every w along a breadth-first spanning tree of
the Cayley graph, and f is a cocycle iff the identity holds for every
(x, y, s) with s in S. Everything else is Howell-form linear algebra over
Z/n with n = |G|.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .linalg import AbelianGroupInvariants, howell_form, howell_kernel, howell_reduce, span_order, submodule_quotient
from .pcgroup import PcPresentation, TooLargeToEnumerate

DEFAULT_ORACLE_MAX_ORDER = 128


class OracleError(ArithmeticError):
    pass


class MulTable:
    """Dense multiplication table; element 0 is the identity."""

    def __init__(self, table, check: bool = True):
        t = np.asarray(table, dtype=np.int64)
        m = t.shape[0]
        if t.shape != (m, m):
            raise ValueError("table must be square")
        if not (np.array_equal(t[0], np.arange(m)) and np.array_equal(t[:, 0], np.arange(m))):
            raise ValueError("element 0 must be the identity")
        for row in t:
            if np.unique(row).size != m:
                raise ValueError("table rows must be permutations")
        self.t = t
        self.m = m
        if check:
            self._check_associative()
        self.inv = np.argmin(t, axis=1)  # t[a, b] == 0 iff b = a^-1

    def _check_associative(self):
        t, m = self.t, self.m
        for a in range(m):
            # (a b) c == a (b c) for all b, c
            if not np.array_equal(t[t[a]], t[a][t]):
                raise OracleError("multiplication table is not associative")

    @classmethod
    def from_presentation(cls, P: PcPresentation, max_order: int = DEFAULT_ORACLE_MAX_ORDER) -> "MulTable":
        if P.nominal_order > max_order:
            raise TooLargeToEnumerate(f"order {P.nominal_order} exceeds the oracle bound {max_order}")
        T = P.table()
        idx = np.arange(T.order, dtype=np.int64)
        tab = np.stack([T.mul(a, idx) for a in idx])
        return cls(tab)

    def mul(self, a, b):
        return self.t[a, b]

    def closure(self, gens) -> np.ndarray:
        have = np.zeros(self.m, dtype=bool)
        have[0] = True
        frontier = [0]
        gens = [int(g) for g in gens]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.t[x, g])
                    if not have[y]:
                        have[y] = True
                        nxt.append(y)
            frontier = nxt
        return np.nonzero(have)[0]

    @cached_property
    def element_orders(self) -> np.ndarray:
        idx = np.arange(self.m)
        cur = idx.copy()
        out = np.ones(self.m, dtype=np.int64)
        todo = cur != 0
        k = 1
        while todo.any():
            k += 1
            cur = self.t[cur, idx]
            hit = todo & (cur == 0)
            out[hit] = k
            todo &= ~hit
        return out

    def class_representatives(self) -> list[int]:
        idx = np.arange(self.m)
        seen = np.zeros(self.m, dtype=bool)
        reps = []
        for a in range(self.m):
            if not seen[a]:
                reps.append(a)
                seen[self.t[self.t[self.inv, a], idx]] = True
        return reps

    def generating_set(self) -> list[int]:
        """A small generating set; fewer generators mean fewer unknowns.

        Tries one element, then pairs (the first up to conjugacy), then
        falls back to greedily maximising the closure.
        """
        if self.m == 1:
            return []
        orders = self.element_orders
        if orders.max() == self.m:
            return [int(np.argmax(orders))]
        for a in self.class_representatives()[1:]:
            for b in np.argsort(-orders, kind="stable"):
                if len(self.closure([a, int(b)])) == self.m:
                    return [a, int(b)]
        gens: list[int] = []
        inside = np.zeros(self.m, dtype=bool)
        inside[0] = True
        while not inside.all():
            best, best_size = -1, -1
            for c in np.nonzero(~inside)[0]:
                size = len(self.closure(gens + [int(c)]))
                if size > best_size:
                    best, best_size = int(c), size
            gens.append(best)
            inside[:] = False
            inside[self.closure(gens)] = True
        return gens

    def commutes(self, a: int, b: int) -> bool:
        return self.t[a, b] == self.t[b, a]


def _bfs_tree(T: MulTable, S):
    """Spanning tree of the right Cayley graph: list of (w, parent, s_index)."""
    seen = np.zeros(T.m, dtype=bool)
    seen[0] = True
    order = []
    frontier = [0]
    while frontier:
        nxt = []
        for y in frontier:
            for k, s in enumerate(S):
                w = int(T.t[y, s])
                if not seen[w]:
                    seen[w] = True
                    order.append((w, y, k))
                    nxt.append(w)
        frontier = nxt
    if not seen.all():
        raise OracleError("generating set does not generate")
    return order


@dataclass
class CocycleSpace:
    """Z^2 and B^2 of a finite group with coefficients Z/n.

    Unknowns are f(u, S[k]) for u != 1, at column (u - 1) * len(S) + k.
    ``Z`` and ``B`` hold generating rows over these unknowns; ``forms`` maps
    the unknowns to the full table f(x, w).
    """

    T: MulTable
    n: int
    S: list
    forms: np.ndarray  # (m, m, k) linear forms over Z/n
    Z: np.ndarray  # cocycle generators (Howell form)
    B: np.ndarray  # coboundary generators
    hom: np.ndarray = field(default=None)  # Hom(G, Z/n) as value rows on all elements
    beta: np.ndarray = field(default=None)  # Bockstein images of ``hom`` rows

    @property
    def k(self) -> int:
        return self.forms.shape[2]

    def col(self, u: int, s_index: int) -> int:
        return (u - 1) * len(self.S) + s_index

    def full_table(self, coeffs) -> np.ndarray:
        """The m x m table of the cochain with the given unknown values."""
        c = np.asarray(coeffs, dtype=np.int64) % self.n
        return np.tensordot(self.forms, c, axes=([2], [0])) % self.n

    @cached_property
    def z_tables(self) -> np.ndarray:
        """Full m x m tables of the rows of ``Z``, shape (r, m, m)."""
        if not len(self.Z):
            return np.zeros((0, self.T.m, self.T.m), dtype=np.int64)
        return np.tensordot(self.Z % self.n, self.forms, axes=([1], [2])) % self.n

    @cached_property
    def h2(self) -> AbelianGroupInvariants:
        return submodule_quotient(self.Z, self.B, self.n) if len(self.Z) else AbelianGroupInvariants()

    @cached_property
    def denominators(self) -> np.ndarray:
        """Generators of B^2 + beta(Hom(G, Z/n)), the kernel into Q/Z coefficients."""
        parts = [self.B]
        if self.beta is not None and len(self.beta):
            parts.append(self.beta)
        D = np.vstack(parts) % self.n
        return howell_form(D, self.n) if len(D) else D


def _encode(T: MulTable, S, f) -> np.ndarray:
    """Unknown vector of a normalized cochain given as an m x m table."""
    m = T.m
    return np.asarray(f, dtype=np.int64)[1:, :][:, S].reshape((m - 1) * len(S))


def _build_forms(T: MulTable, S, n: int, dtype=np.int64) -> np.ndarray:
    m, r = T.m, len(S)
    k = (m - 1) * r
    F = np.zeros((m, m, k), dtype=dtype)
    for j, s in enumerate(S):
        F[1:, s, :][np.arange(m - 1), np.arange(m - 1) * r + j] = 1
    for w, y, j in _bfs_tree(T, S):
        s = S[j]
        if w == s and y == 0:
            continue
        # f(x, y s) = f(x, y) + f(x y, s) - f(y, s)
        F[:, w, :] = (F[:, y, :] + F[T.t[:, y], s, :] - F[y, s, :][None, :]) % n
    return F


def _incremental_howell(blocks, n: int, k: int, batch: int) -> np.ndarray:
    """Howell form of the stacked blocks, reducing each block first."""
    H = np.zeros((0, k), dtype=np.int64)
    buf = []
    size = 0
    for blk in blocks:
        blk = blk[np.any(blk, axis=1)]
        if not blk.size:
            continue
        blk = howell_reduce(H, np.unique(blk, axis=0), n)
        blk = blk[np.any(blk, axis=1)]
        if not blk.size:
            continue
        buf.append(blk)
        size += len(blk)
        if size >= batch:
            H = howell_form(np.vstack([H] + buf), n)
            buf, size = [], 0
    if buf:
        H = howell_form(np.vstack([H] + buf), n)
    return H


def _hom_values(T: MulTable, S, n: int) -> np.ndarray:
    """Rows: every homomorphism G -> Z/n as its value vector on all elements."""
    m, r = T.m, len(S)
    forms = np.zeros((m, r), dtype=np.int64)
    for j, s in enumerate(S):
        forms[s, j] = 1
    tree = _bfs_tree(T, S)
    for w, y, j in tree:
        if w == S[j] and y == 0:
            continue
        forms[w] = (forms[y] + forms[S[j]]) % n
    # chi(y) + chi(s) = chi(ys) on every edge
    rows = []
    for y in range(m):
        for j, s in enumerate(S):
            rows.append(forms[y] + forms[s] - forms[T.t[y, s]])
    A = np.array(rows, dtype=np.int64) % n
    K = howell_kernel(A, n) if A.any() else np.eye(r, dtype=np.int64)
    return (K @ forms.T) % n


def _bockstein(T: MulTable, chi: np.ndarray, n: int) -> np.ndarray:
    """Carry cocycle (chi(x) + chi(y) - chi(xy)) // n for chi with values in [0, n)."""
    c = chi % n
    return (c[:, None] + c[None, :] - c[T.t]) // n


def cocycle_space(T: MulTable, n: int, batch: int | None = None) -> CocycleSpace:
    if n < 2:
        raise ValueError("coefficient modulus must be >= 2")
    m = T.m
    S = T.generating_set() if m > 1 else []
    if m == 1:
        empty = np.zeros((0, 0), dtype=np.int64)
        return CocycleSpace(T, n, S, np.zeros((1, 1, 0), dtype=np.int64), empty, empty, np.zeros((1, 1), dtype=np.int64), empty)
    r = len(S)
    k = (m - 1) * r
    F = _build_forms(T, S, n)
    batch = batch or max(k // 2, 128)

    def blocks():
        x = np.arange(m)
        for j, s in enumerate(S):
            for y in range(1, m):
                # D(x, y, s) = f(y, s) - f(xy, s) + f(x, ys) - f(x, y)
                yield (F[y, s][None, :] - F[T.t[x, y], s] + F[x, T.t[y, s]] - F[x, y]) % n

    H = _incremental_howell(blocks(), n, k, batch)
    Z = howell_kernel(H, n) if len(H) else np.eye(k, dtype=np.int64)
    # coboundaries of the unit cochains e_v, v != 1
    B = np.zeros((m - 1, k), dtype=np.int64)
    for v in range(1, m):
        tab = np.zeros((m, m), dtype=np.int64)
        tab[v, :] += 1
        tab[:, v] += 1
        tab[T.t == v] -= 1
        tab[0, :] = 0
        tab[:, 0] = 0
        B[v - 1] = _encode(T, S, tab) % n
    hom = _hom_values(T, S, n)
    beta = np.array([_encode(T, S, _bockstein(T, chi, n)) for chi in hom], dtype=np.int64).reshape(len(hom), k) % n
    return CocycleSpace(T, n, S, F, Z, B, hom, beta)


def verify_space(C: CocycleSpace) -> None:
    """Independent checks: every generator is a normalized cocycle on all
    triples, B^2 lies in Z^2, and |B^2| * |Hom(G, Z/n)| = n^(m-1)."""
    T, n, m = C.T, C.n, C.T.m
    t = T.t
    for row in list(C.Z) + list(C.B) + list(C.beta if C.beta is not None else []):
        f = C.full_table(row)
        if f[0].any() or f[:, 0].any():
            raise OracleError("cochain is not normalized")
        # f(y,z) - f(xy,z) + f(x,yz) - f(x,y) for all x, y, z
        d = f[None, :, :] - f[t][:, :, :] + f[np.arange(m)[:, None, None], t[None, :, :]] - f[:, :, None]
        if (d % n).any():
            raise OracleError("generator fails the cocycle identity")
    Bh = howell_form(C.B, n) if len(C.B) else C.B
    b_order = span_order(Bh, n) if len(Bh) else 1
    hom_order = span_order(howell_form(C.hom, n), n) if C.hom is not None and C.hom.any() else 1
    if b_order * hom_order != n ** (m - 1):
        raise OracleError(f"|B^2| * |Hom| = {b_order * hom_order} but n^(m-1) = {n ** (m - 1)}")


def h2_mod_n(T: MulTable, n: int) -> CocycleSpace:
    return cocycle_space(T, n)


def _check_order_budget(T: MulTable, max_order: int):
    if T.m > max_order:
        raise TooLargeToEnumerate(f"order {T.m} exceeds the oracle bound {max_order}")


def h2_qz(T: MulTable, space: CocycleSpace | None = None, max_order: int = DEFAULT_ORACLE_MAX_ORDER) -> AbelianGroupInvariants:
    """H^2(G, Q/Z) as the image of H^2(G, Z/|G|) modulo Bockstein classes."""
    _check_order_budget(T, max_order)
    if T.m == 1:
        return AbelianGroupInvariants()
    C = space or cocycle_space(T, T.m)
    full = C.h2
    res = submodule_quotient(C.Z, C.denominators, C.n)
    hom = span_order(howell_form(C.hom, C.n), C.n) if C.hom.any() else 1
    if res.order * hom != full.order:
        raise OracleError(f"exactness check failed: {res.order} * {hom} != {full.order}")
    return res


def bicyclic_subgroups(T: MulTable, maximal_only: bool = True) -> list[np.ndarray]:
    """Index sets of subgroups generated by two commuting elements."""
    seen = {}
    for a in range(T.m):
        for b in range(a, T.m):
            if T.commutes(a, b):
                S = T.closure([a, b])
                seen.setdefault(S.tobytes(), S)
    subs = sorted(seen.values(), key=len, reverse=True)
    if not maximal_only:
        return subs
    keep: list[np.ndarray] = []
    for S in subs:
        if not any(np.isin(S, K).all() for K in keep):
            keep.append(S)
    return keep


def _subtable(T: MulTable, A: np.ndarray) -> MulTable:
    A = np.asarray(A)
    pos = -np.ones(T.m, dtype=np.int64)
    pos[A] = np.arange(len(A))
    return MulTable(pos[T.t[np.ix_(A, A)]], check=False)


def restriction_kernel(C: CocycleSpace, A: np.ndarray) -> np.ndarray:
    """Rows lam (over C.Z) whose cocycle lam . Z restricts to zero in H^2(A, Q/Z).

    A restricted class vanishes iff it lies in B^2(A) + beta(Hom(A, Z/n)).
    """
    n = C.n
    A = np.asarray(A)
    r = len(C.Z)
    if len(A) == 1 or r == 0:
        return np.eye(r, dtype=np.int64)
    sub = _subtable(C.T, A)
    a1 = len(A) - 1
    # restricted values on (a, b) with a, b != 1
    tabs = C.z_tables
    R = tabs[:, A[1:]][:, :, A[1:]].reshape(r, a1 * a1)
    W = []
    for v in range(1, len(A)):
        tab = np.zeros((len(A), len(A)), dtype=np.int64)
        tab[v, :] += 1
        tab[:, v] += 1
        tab[sub.t == v] -= 1
        W.append(tab[1:, 1:].reshape(-1))
    S_A = sub.generating_set()
    for chi in _hom_values(sub, S_A, n):
        W.append(_bockstein(sub, chi, n)[1:, 1:].reshape(-1))
    M = np.vstack([R, np.array(W, dtype=np.int64)]) % n
    # (lam, mu) with lam R + mu W = 0
    K = howell_kernel(M.T, n)
    return K[:, :r] % n


def _intersect(U: np.ndarray, V: np.ndarray, n: int) -> np.ndarray:
    """Intersection of two row spans in (Z/n)^k."""
    if len(U) == 0 or len(V) == 0:
        return np.zeros((0, U.shape[1] if U.ndim == 2 else V.shape[1]), dtype=np.int64)
    M = np.vstack([U, V]) % n
    K = howell_kernel(M.T, n)  # (x, y) with x U + y V = 0
    X = K[:, : len(U)]
    out = (X @ U) % n
    out = out[np.any(out, axis=1)]
    return howell_form(out, n) if len(out) else np.zeros((0, U.shape[1]), dtype=np.int64)


def b0_direct(T: MulTable, space: CocycleSpace | None = None, max_order: int = DEFAULT_ORACLE_MAX_ORDER) -> AbelianGroupInvariants:
    """Classes of H^2(G, Q/Z) that restrict to zero on every bicyclic subgroup."""
    _check_order_budget(T, max_order)
    if T.m == 1:
        return AbelianGroupInvariants()
    C = space or cocycle_space(T, T.m)
    n = C.n
    r = len(C.Z)
    K = np.eye(r, dtype=np.int64)
    for A in bicyclic_subgroups(T):
        K = _intersect(K, restriction_kernel(C, A), n)
        if len(K) == 0:
            break
    killed = (K @ C.Z) % n if len(K) else np.zeros((0, C.k), dtype=np.int64)
    D = C.denominators
    top = np.vstack([killed, D]) if len(D) else killed
    if not len(top):
        return AbelianGroupInvariants()
    return submodule_quotient(top, D, n) if len(D) else submodule_quotient(top, np.zeros((0, C.k), dtype=np.int64), n)


@dataclass
class OracleReport:
    name: str
    order: int
    h2_qz: AbelianGroupInvariants
    b0_direct: AbelianGroupInvariants

    def to_dict(self) -> dict:
        return {"group": self.name, "order": self.order, "h2_qz": self.h2_qz.to_dict(), "b0_direct": self.b0_direct.to_dict()}


def analyse(P: PcPresentation, max_order: int = DEFAULT_ORACLE_MAX_ORDER, verify: bool = True) -> OracleReport:
    T = MulTable.from_presentation(P, max_order)
    if T.m == 1:
        return OracleReport(P.name, 1, AbelianGroupInvariants(), AbelianGroupInvariants())
    C = cocycle_space(T, T.m)
    if verify:
        verify_space(C)
    return OracleReport(P.name, T.m, h2_qz(T, C, max_order), b0_direct(T, C, max_order))

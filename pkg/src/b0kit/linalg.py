"""Exact linear algebra over Z and Z/n.

Everything here works with Python integers (arbitrary precision) for the
integer routines, and with int64 numpy arrays for the modular routines, where
all residues stay below ``n`` and products below ``n**2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, prod

import numpy as np

__all__ = [
    "AbelianGroupInvariants",
    "smith_normal_form",
    "cokernel_invariants",
    "quotient_order_ratio",
    "TorsionQuotient",
    "howell_form",
    "howell_kernel",
    "howell_solve",
    "span_order",
    "submodule_quotient",
    "dump_matrix",
    "load_matrix",
]


@dataclass(frozen=True)
class AbelianGroupInvariants:
    """A finitely generated abelian group Z^free_rank + Z/d1 + Z/d2 + ...

    ``torsion`` holds the invariant factors, each >= 2, with d1 | d2 | ....
    """

    torsion: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        t = tuple(int(d) for d in self.torsion)
        if any(d < 2 for d in t):
            raise ValueError(f"invariant factors must be >= 2, got {t}")
        if any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError(f"invariant factors must form a divisibility chain: {t}")
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        object.__setattr__(self, "torsion", t)

    @classmethod
    def from_orders(cls, orders, free_rank: int = 0) -> "AbelianGroupInvariants":
        """Build from any list of cyclic orders (not necessarily a chain)."""
        diag = [[int(o)] for o in orders if int(o) != 1]
        if not diag:
            return cls((), free_rank)
        mat = [[o if i == j else 0 for j in range(len(diag))] for i, (o,) in enumerate(diag)]
        inv = cokernel_invariants(mat, len(diag))
        return cls(inv.torsion, free_rank + inv.free_rank)

    @property
    def order(self) -> int | None:
        """Group order, or ``None`` if infinite."""
        if self.free_rank:
            return None
        return prod(self.torsion)

    @property
    def is_trivial(self) -> bool:
        return not self.torsion and not self.free_rank

    def to_dict(self) -> dict:
        return {"torsion": list(self.torsion), "free_rank": self.free_rank}

    @classmethod
    def from_dict(cls, d: dict) -> "AbelianGroupInvariants":
        return cls(tuple(d["torsion"]), int(d["free_rank"]))

    def __str__(self) -> str:
        parts = [f"C{d}" for d in self.torsion] + ["Z"] * self.free_rank
        return " x ".join(parts) if parts else "trivial"


# ---------------------------------------------------------------------------
# Smith normal form over Z
# ---------------------------------------------------------------------------


def _as_int_rows(A, ncols=None):
    rows = [[int(x) for x in row] for row in A]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    for r in rows:
        if len(r) != ncols:
            raise ValueError("ragged matrix")
    return rows, ncols


def _identity(k):
    return [[int(i == j) for j in range(k)] for i in range(k)]


def smith_normal_form(A, ncols: int | None = None):
    """Return ``(D, U, V)`` with ``U @ A @ V == D`` diagonal, d1 | d2 | ....

    ``U`` and ``V`` are unimodular. Entries are Python ints throughout.
    Pivoting picks the entry of least absolute value in the active block.
    """
    M, c = _as_int_rows(A, ncols)
    r = len(M)
    U = _identity(r)
    V = _identity(c)

    def swap_rows(i, j):
        M[i], M[j] = M[j], M[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst -= q * row_src
        if q:
            Md, Ms = M[dst], M[src]
            for k in range(c):
                if Ms[k]:
                    Md[k] -= q * Ms[k]
            Ud, Us = U[dst], U[src]
            for k in range(r):
                if Us[k]:
                    Ud[k] -= q * Us[k]

    def add_col(dst, src, q):
        if q:
            for row in M:
                if row[src]:
                    row[dst] -= q * row[src]
            for row in V:
                if row[src]:
                    row[dst] -= q * row[src]

    t = 0
    while t < min(r, c):
        best = None
        for i in range(t, r):
            row = M[i]
            for j in range(t, c):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            swap_rows(i, t)
        if j != t:
            swap_cols(j, t)
        while True:
            piv = M[t][t]
            dirty = False
            for i in range(t + 1, r):
                if M[i][t]:
                    add_row(i, t, M[i][t] // piv)
                    if M[i][t]:
                        dirty = True
            for j in range(t + 1, c):
                if M[t][j]:
                    add_col(j, t, M[t][j] // piv)
                    if M[t][j]:
                        dirty = True
            if dirty:
                # move the smallest remainder in row/column t onto the diagonal
                cand = [(abs(M[i][t]), i, "r") for i in range(t + 1, r) if M[i][t]]
                cand += [(abs(M[t][j]), j, "c") for j in range(t + 1, c) if M[t][j]]
                _, k, kind = min(cand)
                if kind == "r":
                    swap_rows(k, t)
                else:
                    swap_cols(k, t)
                continue
            bad = None
            for i in range(t + 1, r):
                for j in range(t + 1, c):
                    if M[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, -1)
        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return M, U, V


def _snf_diagonal(A, ncols):
    D, _, _ = smith_normal_form(A, ncols)
    return [D[i][i] for i in range(min(len(D), ncols))]


def cokernel_invariants(A, ncols: int | None = None) -> AbelianGroupInvariants:
    """Invariants of Z^ncols / rowspace(A)."""
    rows, ncols = _as_int_rows(A, ncols)
    rows = [r for r in rows if any(r)]
    if not rows:
        return AbelianGroupInvariants((), ncols)
    diag = _snf_diagonal(rows, ncols)
    rank = sum(1 for d in diag if d)
    torsion = tuple(d for d in diag if d > 1)
    return AbelianGroupInvariants(torsion, ncols - rank)


class TorsionQuotient:
    """Canonical coordinates on Z^m / rowspace(L).

    ``canon(v)`` maps an integer vector to a tuple of residues, one per
    nontrivial invariant factor, plus the free coordinates. Two vectors are
    congruent modulo the lattice iff their canonical forms agree.
    """

    def __init__(self, L, m: int):
        rows, m = _as_int_rows(L, m)
        self.m = m
        rows = [r for r in rows if any(r)]
        if rows:
            D, _, V = smith_normal_form(rows, m)
            diag = [D[i][i] for i in range(min(len(D), m))]
        else:
            V = _identity(m)
            diag = []
        diag = diag + [0] * (m - len(diag))
        self.V = V
        self.diag = diag
        self.torsion_idx = [k for k, d in enumerate(diag) if d > 1]
        self.free_idx = [k for k, d in enumerate(diag) if d == 0]
        self.moduli = [diag[k] for k in self.torsion_idx]
        self.invariants = AbelianGroupInvariants(tuple(self.moduli), len(self.free_idx))
        cols = self.torsion_idx + self.free_idx
        self._Vsel = [[V[i][k] for k in cols] for i in range(m)]
        bound = max((abs(x) for row in self._Vsel for x in row), default=0)
        self._np_ok = bound < 2**20
        if self._np_ok:
            self._Vnp = np.array(self._Vsel, dtype=np.int64).reshape(m, len(cols))

    @property
    def torsion_order(self) -> int:
        return prod(self.moduli)

    def coordinates(self, v):
        """Return (torsion residues, free coordinates) of ``v``."""
        v = [int(x) for x in v]
        y = [sum(v[i] * row[k] for i, row in enumerate(self._Vsel) if v[i]) for k in range(len(self._Vsel[0]) if self._Vsel else 0)]
        t = len(self.torsion_idx)
        tors = tuple(y[k] % self.moduli[k] for k in range(t))
        free = tuple(y[t:])
        return tors, free

    def canon_torsion(self, v) -> tuple[int, ...]:
        """Torsion residues of ``v``; raises if ``v`` is not torsion modulo L."""
        tors, free = self.coordinates(v)
        if any(free):
            raise ValueError("vector is not torsion modulo the lattice")
        return tors

    def canon_torsion_array(self, X: np.ndarray) -> np.ndarray:
        """Vectorised ``canon_torsion`` over the rows of an int64 array."""
        X = np.asarray(X, dtype=np.int64)
        if not self._np_ok or np.abs(X).max(initial=0) > 2**30:
            return np.array([self.canon_torsion(row) for row in X.tolist()], dtype=np.int64).reshape(
                len(X), len(self.moduli)
            )
        Y = X @ self._Vnp
        t = len(self.torsion_idx)
        if np.any(Y[:, t:]):
            raise ValueError("vector is not torsion modulo the lattice")
        if t == 0:
            return np.zeros((len(X), 0), dtype=np.int64)
        return Y[:, :t] % np.array(self.moduli, dtype=np.int64)


def quotient_order_ratio(L, S, m: int | None = None):
    """Compare torsion(Z^m/L) with its quotient by the image of the rows of S.

    Returns ``(ratio, invariants)`` where ``ratio = |T(L)| / |T(L + S)|`` and
    ``invariants`` describes ``T(L) / <S>``. Every row of S must be torsion
    modulo L.
    """
    L = [list(r) for r in L]
    S = [list(r) for r in S]
    if m is None:
        m = len((L or S)[0])
    tq = TorsionQuotient(L, m)
    for s in S:
        tq.canon_torsion(s)
    big = cokernel_invariants(L + S, m) if (L or S) else AbelianGroupInvariants((), m)
    small_order = prod(big.torsion)
    ratio = tq.torsion_order // small_order
    if ratio * small_order != tq.torsion_order:
        raise ArithmeticError("torsion orders do not divide")
    return ratio, AbelianGroupInvariants(big.torsion, 0)


# ---------------------------------------------------------------------------
# Howell form over Z/n
# ---------------------------------------------------------------------------


def _xgcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _unit_normaliser(a: int, n: int) -> int:
    """A unit u mod n with u*a = gcd(a, n) (mod n)."""
    g = gcd(a, n)
    m = n // g
    if m == 1:
        return 1
    u0 = pow(a // g, -1, m)
    for k in range(g):
        u = u0 + k * m
        if gcd(u, n) == 1:
            return u % n
    raise ArithmeticError("no unit normaliser")  # unreachable


def _prime_power(n: int):
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            return (p, k) if n == 1 else None
        p += 1
    return (n, 1)


def _valuation(arr: np.ndarray, p: int, k: int) -> np.ndarray:
    v = np.zeros(arr.shape, dtype=np.int64)
    x = arr.copy()
    for _ in range(k):
        m = (x % p == 0) & (x != 0)
        v[m] += 1
        x[m] //= p
    v[arr == 0] = k
    return v


def _howell_local(A: np.ndarray, p: int, k: int) -> np.ndarray:
    """Howell form over Z/p^k by minimal-valuation pivoting."""
    n = p**k
    cols = A.shape[1]
    A = A % n
    A = A[np.any(A != 0, axis=1)]
    piv_rows, piv_cols = [], []
    for j in range(cols):
        # A holds only the columns j.. of the rows still to be processed
        if A.shape[0] == 0:
            break
        col = A[:, 0]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            A = A[:, 1:]
            continue
        vals = _valuation(col[nz], p, k)
        i0 = nz[int(np.argmin(vals))]
        v = int(vals.min())
        pv = p**v
        row = A[i0] * pow(int(A[i0, 0]) // pv, -1, n) % n
        rest = np.ones(A.shape[0], dtype=bool)
        rest[i0] = False
        rest &= col != 0
        if rest.any():
            q = A[rest, 0] // pv
            A[rest] = (A[rest] - np.outer(q, row)) % n
        A = np.delete(A, i0, axis=0)
        ann = row * (n // pv) % n
        if ann.any():
            A = np.vstack([A, ann[None, :]])
        A = A[np.any(A != 0, axis=1), 1:]
        full = np.zeros(cols, dtype=np.int64)
        full[j:] = row
        piv_rows.append(full)
        piv_cols.append(j)
    return _back_reduce(piv_rows, piv_cols, n, cols)


def howell_reduce(H: np.ndarray, V, n: int) -> np.ndarray:
    """Reduce the rows of ``V`` by a Howell-form matrix ``H`` over Z/n.

    A row reduces to zero iff it lies in the span of ``H``; other rows keep a
    remainder that spans the same module together with ``H``.
    """
    V = np.asarray(V, dtype=np.int64) % n
    for row in H:
        j = int(np.nonzero(row)[0][0])
        d = int(row[j])
        q = V[:, j] // d
        hit = q != 0
        if hit.any():
            V[hit] = (V[hit] - np.outer(q[hit], row)) % n
    return V
def _back_reduce(piv_rows, piv_cols, n, cols):
    if not piv_rows:
        return np.zeros((0, cols), dtype=np.int64)
    H = np.array(piv_rows, dtype=np.int64)
    for t, j in enumerate(piv_cols):
        d = H[t, j]
        if t:
            q = H[:t, j] // d
            H[:t] = (H[:t] - np.outer(q, H[t])) % n
    return H


def _howell_generic(A: np.ndarray, n: int) -> np.ndarray:
    """Howell form over an arbitrary Z/n (Storjohann-style elimination)."""
    A = A % n
    rows = [r for r in A if r.any()]
    cols = A.shape[1]
    piv_rows, piv_cols = [], []
    for j in range(cols):
        if not rows:
            break
        nz = [i for i, r in enumerate(rows) if r[j]]
        if not nz:
            continue
        top = rows[nz[0]]
        for i in nz[1:]:
            other = rows[i]
            a, b = int(top[j]), int(other[j])
            g, s, t = _xgcd(a, b)
            u, v = -b // g, a // g
            top, rows[i] = (s * top + t * other) % n, (u * top + v * other) % n
        rows[nz[0]] = top
        unit = _unit_normaliser(int(top[j]), n)
        top = top * unit % n
        d = int(top[j])
        rows.pop(nz[0])
        ann = top * (n // d) % n
        if ann.any():
            rows.append(ann)
        rows = [r for r in rows if r.any()]
        piv_rows.append(top)
        piv_cols.append(j)
    return _back_reduce(piv_rows, piv_cols, n, cols)


def howell_form(A, n: int) -> np.ndarray:
    """Canonical Howell form of the row span of ``A`` over Z/n.

    Rows are nonzero, pivots are divisors of ``n``, entries above a pivot lie
    in ``[0, pivot)``, and the span of the rows with zeros in the first ``k``
    columns is exactly the part of the row span vanishing there.
    """
    if n < 2:
        raise ValueError("modulus must be >= 2")
    if n >= 2**31:
        raise ValueError("modulus too large for int64 Howell arithmetic")
    A = np.asarray(A, dtype=np.int64)
    if A.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    if A.shape[0] == 0:
        return A.reshape(0, A.shape[1])
    pk = _prime_power(n)
    if pk is not None:
        return _howell_local(A, *pk)
    return _howell_generic(A, n)


def span_order(H: np.ndarray, n: int) -> int:
    """Number of elements in the span of a Howell-form matrix over Z/n."""
    H = np.asarray(H)
    out = 1
    for row in H:
        d = int(row[np.nonzero(row)[0][0]])
        out *= n // d
    return out


def howell_kernel(A, n: int) -> np.ndarray:
    """Generators (as rows, in Howell form) of {x : A x = 0 over Z/n}."""
    A = np.asarray(A, dtype=np.int64)
    c = A.shape[1]
    H = howell_form(A, n) if A.shape[0] else np.zeros((0, c), dtype=np.int64)
    r = H.shape[0]
    aug = np.hstack([H.T % n, np.eye(c, dtype=np.int64)])
    W = howell_form(aug, n)
    K = W[np.all(W[:, :r] == 0, axis=1)][:, r:]
    return K


def howell_solve(A, b, n: int):
    """Solve ``A x = b`` over Z/n.

    Returns ``(x, kernel)`` with a particular solution and kernel generators,
    or ``None`` when the system has no solution.
    """
    A = np.asarray(A, dtype=np.int64) % n
    b = np.asarray(b, dtype=np.int64).reshape(-1) % n
    r, c = A.shape
    aug = np.hstack([A.T, np.eye(c, dtype=np.int64)])
    H = howell_form(aug, n)
    w = np.concatenate([b, np.zeros(c, dtype=np.int64)])
    for row in H:
        nz = np.nonzero(row)[0]
        j = nz[0]
        if j >= r:
            break
        d = int(row[j])
        if w[j] % d:
            return None
        w = (w - (int(w[j]) // d) * row) % n
    if np.any(w[:r]):
        return None
    x = (-w[r:]) % n
    K = H[np.all(H[:, :r] == 0, axis=1)][:, r:]
    return x, K


def submodule_quotient(Agens, Bgens, n: int) -> AbelianGroupInvariants:
    """Invariants of span(A)/span(B) inside (Z/n)^k, assuming span(B) <= span(A)."""
    A = howell_form(np.asarray(Agens, dtype=np.int64), n) if len(Agens) else np.zeros((0, 0), dtype=np.int64)
    s = A.shape[0]
    if s == 0:
        return AbelianGroupInvariants()
    B = np.asarray(Bgens, dtype=np.int64).reshape(-1, A.shape[1])
    M = np.vstack([A, B]) % n
    # left kernel of M: vectors (lam, mu) with lam A + mu B = 0
    K = howell_kernel(M.T, n)
    rel = [list(map(int, row[:s])) for row in K]
    rel += [[n if i == j else 0 for j in range(s)] for i in range(s)]
    inv = cokernel_invariants(rel, s)
    if inv.free_rank:
        raise ArithmeticError("quotient of finite modules cannot be infinite")
    return inv


# ---------------------------------------------------------------------------
# debugging dump format
# ---------------------------------------------------------------------------


def dump_matrix(A) -> str:
    rows = [list(map(int, r)) for r in A]
    c = len(rows[0]) if rows else 0
    lines = [f"{len(rows)} {c}"] + [" ".join(map(str, r)) for r in rows]
    return "\n".join(lines) + "\n"


def load_matrix(text: str):
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    r, c = map(int, lines[0].split())
    rows = [list(map(int, ln.split())) for ln in lines[1 : 1 + r]]
    if len(rows) != r or any(len(x) != c for x in rows):
        raise ValueError("matrix dump has wrong shape")
    return rows

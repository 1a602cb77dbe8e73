"""Finite groups given by power-commutator (pc) presentations.

A presentation on generators g_0, ..., g_{n-1} (printed as f1, ..., fn) has

* relative orders o_i >= 2,
* power relations g_i^{o_i} = w_ii, with w_ii a normal word in g_{i+1}, ...,
* conjugate relations g_j^{g_i} = g_i^-1 g_j g_i = w_ij for i < j, with w_ij a
  normal word in g_j, g_{j+1}, ....

Normal words are stored as exponent tuples ``(e_0, ..., e_{n-1})`` with
``0 <= e_k < o_k``; an :data:`Element` is such a tuple. Commutators follow
``[g, h] = g^-1 h^-1 g h``.

Two multiplication routes exist: :meth:`PcPresentation.collect` is a plain
collection from the left on a letter stack, and :meth:`PcPresentation.multiply`
uses precomputed conjugation tables. Both are rewriting strategies for the same
rules, so they agree on consistent presentations.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from functools import cached_property, reduce
from math import gcd, prod
from typing import Iterable, Iterator, Sequence

import numpy as np

from .linalg import AbelianGroupInvariants, cokernel_invariants

Element = tuple  # exponent vector in normal form

DEFAULT_MAX_ORDER = 2 * 10**7
DEFAULT_STEP_BUDGET = 10**8


class PresentationError(ValueError):
    """Malformed presentation data."""


class CollectionBudgetExceeded(RuntimeError):
    """Collection did not finish inside its step budget."""


class TooLargeToEnumerate(RuntimeError):
    """The group order exceeds the enumeration budget."""


# ---------------------------------------------------------------------------
# table-driven multiplication (shared by the group and its tailed cover)
# ---------------------------------------------------------------------------


def _vadd(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    return tuple(x + y for x, y in zip(a, b))


class _Multiplier:
    """Normal-form multiplication with optional central tails.

    Elements are pairs ``(exps, tail)`` where ``tail`` is an integer vector
    (empty when no tails are attached). Tails are central and free abelian,
    so every relation application simply adds the relation's tail.
    """

    def __init__(self, orders, powers, conjs, power_tails=None, conj_tails=None, ntails=0):
        self.n = n = len(orders)
        self.orders = tuple(orders)
        self.ntails = ntails
        self.zero_tail = (0,) * ntails
        self.identity = ((0,) * n, self.zero_tail)
        pt = power_tails or [self.zero_tail] * n
        self.power_elem = [(tuple(powers[i]), tuple(pt[i])) for i in range(n)]
        self._memo_step = {}
        self._memo_conj = {}
        # cpow[i][e][j][f] = (g_j^f)^(g_i^e), an element of <g_{i+1}, ...>
        self.cpow = [None] * n
        if n:
            self.cpow[n - 1] = [[None] * n] * self.orders[n - 1]
        for i in range(n - 2, -1, -1):
            oi = self.orders[i]
            table = [None] * oi
            first = [None] * n
            for j in range(i + 1, n):
                ct = conj_tails[(i, j)] if conj_tails else self.zero_tail
                base = (tuple(conjs[(i, j)]), tuple(ct))
                pw = [self.identity, base]
                for _ in range(2, self.orders[j]):
                    pw.append(self.mul(pw[-1], base))
                first[j] = pw
            table[1] = first
            self.cpow[i] = table
            for e in range(2, oi):
                prev = table[e - 1]
                cur = [None] * n
                for j in range(i + 1, n):
                    cur[j] = [self._conj_by_gen(x, i) for x in prev[j]]
                table[e] = cur

    # conjugate an element of <g_{i+1}, ...> by g_i^e
    def _conj_suffix(self, exps: tuple, i: int, e: int):
        key = (exps, i, e)
        hit = self._memo_conj.get(key)
        if hit is not None:
            return hit
        tab = self.cpow[i][e]
        res = self.identity
        for j in range(i + 1, self.n):
            f = exps[j]
            if f:
                res = self.mul(res, tab[j][f])
        self._memo_conj[key] = res
        return res

    def _conj_by_gen(self, x, i):
        exps, tail = x
        ce, ct = self._conj_suffix(exps, i, 1)
        return ce, _vadd(tail, ct)

    def _step(self, suffix: tuple, i: int, e: int):
        """(g_i^{s_i} g_{i+1}^{s_{i+1}} ...) * g_i^e for a suffix starting at i."""
        key = (suffix, i, e)
        hit = self._memo_step.get(key)
        if hit is not None:
            return hit
        w = self._conj_suffix((0,) * (i + 1) + suffix[1:], i, e)
        s = suffix[0] + e
        if s >= self.orders[i]:
            s -= self.orders[i]
            w = self.mul(self.power_elem[i], w)
        res = ((s,) + w[0][i + 1 :], w[1])
        self._memo_step[key] = res
        return res

    def rmul_gen_pow(self, x, i: int, e: int):
        exps, tail = x
        suf, t = self._step(exps[i:], i, e)
        return exps[:i] + suf, _vadd(tail, t)

    def mul(self, a, b):
        ea, ta = a
        eb, tb = b
        res = (ea, _vadd(ta, tb))
        for i, e in enumerate(eb):
            if e:
                res = self.rmul_gen_pow(res, i, e)
        return res

    def inverse(self, a):
        cur = a
        inv = self.identity
        for i in range(self.n):
            f = cur[0][i]
            if f:
                e = self.orders[i] - f
                cur = self.rmul_gen_pow(cur, i, e)
                inv = self.rmul_gen_pow(inv, i, e)
        # a * inv == (identity exps, cur tail)
        if any(cur[0]):
            raise ArithmeticError("inverse computation did not reach the identity")
        return inv[0], tuple(x - y for x, y in zip(inv[1], cur[1]))


# ---------------------------------------------------------------------------
# the presentation
# ---------------------------------------------------------------------------


def _check_normal(word, orders, lo: int, what: str):
    if len(word) != len(orders):
        raise PresentationError(f"{what}: word has wrong length")
    for k, (e, o) in enumerate(zip(word, orders)):
        if not (0 <= e < o):
            raise PresentationError(f"{what}: exponent {e} of f{k + 1} outside [0, {o})")
        if e and k < lo:
            raise PresentationError(f"{what}: generator f{k + 1} not allowed (need index >= {lo + 1})")


@dataclass(frozen=True, eq=False)
class PcPresentation:
    """A power-conjugate presentation with element arithmetic.

    ``conjugate_words`` maps ``(i, j)`` with ``i < j`` to the normal word of
    g_j^{g_i}; missing pairs mean g_i and g_j commute.
    """

    relative_orders: tuple[int, ...]
    power_words: tuple[tuple[int, ...], ...]
    conjugate_words: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        orders = tuple(int(o) for o in self.relative_orders)
        n = len(orders)
        if any(o < 2 for o in orders):
            raise PresentationError("relative orders must be >= 2")
        object.__setattr__(self, "relative_orders", orders)
        if len(self.power_words) not in (0, n):
            raise PresentationError("need one power word per generator")
        powers = []
        for i in range(n):
            w = tuple(int(x) for x in self.power_words[i]) if self.power_words else (0,) * n
            _check_normal(w, orders, i + 1, f"power word of f{i + 1}")
            powers.append(w)
        object.__setattr__(self, "power_words", tuple(powers))
        conj = {}
        for (i, j), w in dict(self.conjugate_words).items():
            if not (0 <= i < j < n):
                raise PresentationError(f"bad conjugate index pair ({i}, {j})")
            w = tuple(int(x) for x in w)
            _check_normal(w, orders, j, f"conjugate f{j + 1}^f{i + 1}")
            conj[(i, j)] = w
        for i in range(n):
            for j in range(i + 1, n):
                conj.setdefault((i, j), tuple(int(k == j) for k in range(n)))
        object.__setattr__(self, "conjugate_words", conj)

    # -- basic data ---------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.relative_orders)

    @property
    def nominal_order(self) -> int:
        """Product of relative orders (the true order iff consistent)."""
        return prod(self.relative_orders)

    @property
    def identity(self) -> Element:
        return (0,) * self.n

    def gen(self, i: int, e: int = 1) -> Element:
        """Normal form of g_i^e (0-based index, 0 <= e < o_i)."""
        return tuple(e if k == i else 0 for k in range(self.n))

    @property
    def generators(self) -> list[Element]:
        return [self.gen(i) for i in range(self.n)]

    def element(self, *exps) -> Element:
        if len(exps) == 1 and not isinstance(exps[0], int):
            exps = tuple(exps[0])
        e = tuple(int(x) for x in exps)
        _check_normal(e, self.relative_orders, 0, "element")
        return e

    @cached_property
    def _mult(self) -> _Multiplier:
        return _Multiplier(self.relative_orders, self.power_words, self.conjugate_words)

    def commutator_word(self, i: int, j: int) -> Element:
        """[g_j, g_i] = g_j^-1 g_j^{g_i} for i < j."""
        return self.multiply(self.inverse(self.gen(j)), self.conjugate_words[(i, j)])

    # -- arithmetic ---------------------------------------------------------

    def multiply(self, a: Element, b: Element) -> Element:
        return self._mult.mul((tuple(a), ()), (tuple(b), ()))[0]

    def inverse(self, a: Element) -> Element:
        return self._mult.inverse((tuple(a), ()))[0]

    def power(self, a: Element, k: int) -> Element:
        if k < 0:
            a, k = self.inverse(a), -k
        result, base = self.identity, tuple(a)
        while k:
            if k & 1:
                result = self.multiply(result, base)
            base = self.multiply(base, base)
            k >>= 1
        return result

    def commutator(self, a: Element, b: Element) -> Element:
        ia, ib = self.inverse(a), self.inverse(b)
        return self.multiply(self.multiply(ia, ib), self.multiply(a, b))

    def conjugate(self, a: Element, b: Element) -> Element:
        """a^b = b^-1 a b."""
        return self.multiply(self.multiply(self.inverse(b), a), b)

    def element_order(self, a: Element) -> int:
        a = tuple(a)
        k, x = 1, a
        while any(x):
            x = self.multiply(x, a)
            k += 1
            if k > self.nominal_order:
                raise ArithmeticError("element order exceeds nominal group order")
        return k

    def product(self, elements: Iterable[Element]) -> Element:
        return reduce(self.multiply, elements, self.identity)

    # -- collection from the left -------------------------------------------

    def collect(self, word: Sequence[tuple[int, int]], budget: int = DEFAULT_STEP_BUDGET) -> Element:
        """Normal form of a word given as ``(generator index, exponent)`` pairs.

        Uses collection from the left on an explicit letter stack; negative
        exponents are replaced by powers of the generator's inverse.
        """
        n = self.n
        orders = self.relative_orders
        conj_letters = {k: _letters(w) for k, w in self.conjugate_words.items()}
        power_letters = [_letters(w) for w in self.power_words]
        stack: list[int] = []
        for gi, e in reversed(list(word)):
            if not 0 <= gi < n:
                raise PresentationError(f"generator index {gi} out of range")
            if e >= 0:
                stack.extend([gi] * e)
            else:
                inv = _letters(self.inverse(self.gen(gi)))
                for _ in range(-e):
                    stack.extend(reversed(inv))
        exps = [0] * n
        steps = 0
        while stack:
            steps += 1
            if steps > budget:
                raise CollectionBudgetExceeded("presentation not nilpotent-shaped: collection step budget exceeded")
            i = stack.pop()
            pending: list[int] = []
            for j in range(i + 1, n):
                if exps[j]:
                    pending.extend(conj_letters[(i, j)] * exps[j])
                    exps[j] = 0
            exps[i] += 1
            if exps[i] == orders[i]:
                exps[i] = 0
                pending = power_letters[i] + pending
            stack.extend(reversed(pending))
        return tuple(exps)

    # -- consistency --------------------------------------------------------

    def evaluate_overlaps(self, m: _Multiplier, gen_elem):
        """Evaluate every overlap test with multiplier ``m``.

        ``gen_elem(i, e)`` returns the multiplier element for g_i^e (with zero
        tail). Returns a list of ``(label, lhs, rhs)``.
        """
        n = self.n
        o = self.relative_orders
        out = []
        mul = m.mul
        for k in range(n):
            for j in range(k):
                for i in range(j):
                    gk, gj, gi = gen_elem(k, 1), gen_elem(j, 1), gen_elem(i, 1)
                    lhs = mul(gk, mul(gj, gi))
                    rhs = mul(mul(gk, gj), gi)
                    out.append((f"f{k+1}(f{j+1}f{i+1})", lhs, rhs))
        for j in range(n):
            for i in range(j):
                gj, gi = gen_elem(j, 1), gen_elem(i, 1)
                lhs = mul(m.power_elem[j], gi)
                rhs = mul(gen_elem(j, o[j] - 1), mul(gj, gi))
                out.append((f"f{j+1}^{o[j]} f{i+1}", lhs, rhs))
                lhs = mul(gj, m.power_elem[i])
                rhs = mul(mul(gj, gi), gen_elem(i, o[i] - 1))
                out.append((f"f{j+1} f{i+1}^{o[i]}", lhs, rhs))
        for i in range(n):
            gi = gen_elem(i, 1)
            lhs = mul(gi, m.power_elem[i])
            rhs = mul(m.power_elem[i], gi)
            out.append((f"f{i+1}^{o[i]+1}", lhs, rhs))
        return out

    def consistency_failures(self) -> list[tuple[str, Element, Element]]:
        m = self._mult
        res = self.evaluate_overlaps(m, lambda i, e: (self.gen(i, e), ()))
        return [(label, l[0], r[0]) for label, l, r in res if l[0] != r[0]]

    def is_consistent(self) -> bool:
        return not self.consistency_failures()

    # -- enumeration-backed structure --------------------------------------

    def table(self, max_order: int = DEFAULT_MAX_ORDER) -> "GroupTable":
        cached = self.__dict__.get("_table")
        if cached is not None and cached.order <= max_order:
            return cached
        t = GroupTable(self, max_order=max_order)
        object.__setattr__(self, "_table", t)
        return t

    def enumerate_elements(self, max_order: int = DEFAULT_MAX_ORDER) -> Iterator[Element]:
        if self.nominal_order > max_order:
            raise TooLargeToEnumerate(f"group of order {self.nominal_order} too large to enumerate")
        yield from _mixed_radix(self.relative_orders)

    def order(self) -> int:
        """Order of the group (requires consistency)."""
        if not self.is_consistent():
            raise PresentationError("presentation is inconsistent; use enforced_quotient")
        return self.nominal_order

    def exponent(self, max_order: int = DEFAULT_MAX_ORDER) -> int:
        t = self.table(max_order)
        return int(np.lcm.reduce(t.element_orders()))

    def center(self, max_order: int = DEFAULT_MAX_ORDER) -> "Subgroup":
        t = self.table(max_order)
        return Subgroup.from_indices(self, t.center_indices())

    def derived_subgroup(self, max_order: int = DEFAULT_MAX_ORDER) -> "Subgroup":
        gens = [self.commutator(a, b) for a in self.generators for b in self.generators]
        return self.normal_closure(gens, max_order)

    def normal_closure(self, gens, max_order: int = DEFAULT_MAX_ORDER) -> "Subgroup":
        t = self.table(max_order)
        gi = [t.index(g) for g in gens]
        idx = t.closure(gi)
        while True:
            conj = t.conjugate_set(idx, [t.index(g) for g in self.generators])
            if np.isin(conj, idx).all():
                break
            idx = t.closure(np.union1d(idx, conj).tolist())
        return Subgroup.from_indices(self, idx, normal=True)

    def subgroup(self, gens, max_order: int = DEFAULT_MAX_ORDER) -> "Subgroup":
        t = self.table(max_order)
        return Subgroup.from_indices(self, t.closure([t.index(g) for g in gens]), gens=gens)

    def abelianization(self) -> AbelianGroupInvariants:
        """G/[G,G] from the exponent-sum relation matrix."""
        n = self.n
        rows = []
        for i in range(n):
            r = [-x for x in self.power_words[i]]
            r[i] += self.relative_orders[i]
            rows.append(r)
        for (i, j), w in self.conjugate_words.items():
            r = [-x for x in w]
            r[j] += 1
            rows.append(r)
        return cokernel_invariants(rows, n)

    def is_abelian(self) -> bool:
        return all(self.commutator(a, b) == self.identity for a in self.generators for b in self.generators)

    # -- serialisation ------------------------------------------------------

    def to_text(self) -> str:
        return format_presentation(self)

    @property
    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"<PcPresentation{label} n={self.n} orders={self.relative_orders}>"


def _letters(word: Sequence[int]) -> list[int]:
    out = []
    for k, e in enumerate(word):
        out.extend([k] * e)
    return out


def _mixed_radix(orders) -> Iterator[tuple]:
    n = len(orders)
    e = [0] * n
    while True:
        yield tuple(e)
        k = n - 1
        while k >= 0:
            e[k] += 1
            if e[k] < orders[k]:
                break
            e[k] = 0
            k -= 1
        if k < 0:
            return


def collect(P: PcPresentation, word, budget: int = DEFAULT_STEP_BUDGET) -> Element:
    return P.collect(word, budget)


def is_consistent(P: PcPresentation) -> tuple[bool, list]:
    """``(ok, failures)`` where each failure is ``(overlap, lhs, rhs)``."""
    f = P.consistency_failures()
    return (not f), f


# ---------------------------------------------------------------------------
# subgroups
# ---------------------------------------------------------------------------


@dataclass
class Subgroup:
    group: PcPresentation
    gens: list
    indices: np.ndarray  # sorted element indices in the group table
    is_normal: bool | None = None

    @classmethod
    def from_indices(cls, group, indices, gens=None, normal=None) -> "Subgroup":
        idx = np.unique(np.asarray(indices, dtype=np.int64))
        t = group.table()
        if gens is None:
            gens = t.generating_set(idx)
        s = cls(group, [tuple(g) for g in gens], idx, normal)
        return s

    @property
    def order(self) -> int:
        return int(self.indices.size)

    def elements(self) -> list[Element]:
        t = self.group.table()
        return [t.element(i) for i in self.indices]

    def __contains__(self, g) -> bool:
        i = self.group.table().index(g)
        k = np.searchsorted(self.indices, i)
        return k < self.indices.size and self.indices[k] == i

    def check_normal(self) -> bool:
        t = self.group.table()
        conj = t.conjugate_set(self.indices, [t.index(g) for g in self.group.generators])
        self.is_normal = bool(np.isin(conj, self.indices).all())
        return self.is_normal

    def is_abelian(self) -> bool:
        g = self.group
        return all(g.commutator(a, b) == g.identity for a in self.gens for b in self.gens)

    def exponent(self) -> int:
        t = self.group.table()
        return int(np.lcm.reduce(t.element_orders()[self.indices]))

    def is_cyclic(self) -> bool:
        t = self.group.table()
        return int(t.element_orders()[self.indices].max()) == self.order


# ---------------------------------------------------------------------------
# vectorised element tables
# ---------------------------------------------------------------------------


class GroupTable:
    """Dense index tables for a consistent presentation.

    Elements are numbered by their exponent vectors in mixed radix (f1 most
    significant). ``rpow[i][e]`` is the permutation a -> a * g_i^e, so any
    product a * b is a chain of ``n`` lookups.
    """

    def __init__(self, P: PcPresentation, max_order: int = DEFAULT_MAX_ORDER):
        N = P.nominal_order
        if N > max_order:
            raise TooLargeToEnumerate(f"group of order {N} too large to enumerate (budget {max_order})")
        self.P = P
        self.order = N
        self.n = n = P.n
        self.orders = P.relative_orders
        strides = [1] * n
        for k in range(n - 2, -1, -1):
            strides[k] = strides[k + 1] * self.orders[k + 1]
        self.strides = np.array(strides, dtype=np.int64)
        idx = np.arange(N, dtype=np.int64)
        self.exps = np.stack([(idx // strides[k]) % self.orders[k] for k in range(n)], axis=1) if n else np.zeros((1, 0), dtype=np.int64)
        self.rgen = [self._right_gen_table(i) for i in range(n)]
        self.rpow = []
        for i in range(n):
            tabs = [idx]
            for _ in range(1, self.orders[i]):
                tabs.append(self.rgen[i][tabs[-1]])
            self.rpow.append(np.stack(tabs))

    def _right_gen_table(self, i: int) -> np.ndarray:
        # a * g_i depends only on the exponents of a from position i on
        P = self.P
        m = P._mult
        sub = self.strides[i] * self.orders[i] if i else self.order
        out_suffix = np.empty(sub, dtype=np.int64)
        sub_orders = self.orders[i:]
        for k, suf in enumerate(_mixed_radix(sub_orders)):
            res, _ = m._step(suf, i, 1)
            out_suffix[k] = sum(e * int(s) for e, s in zip(res, self.strides[i:]))
        idx = np.arange(self.order, dtype=np.int64)
        prefix = idx - idx % sub
        return prefix + out_suffix[idx % sub]

    # -- conversions --------------------------------------------------------

    def index(self, g) -> int:
        return int(np.dot(np.asarray(g, dtype=np.int64), self.strides))

    def element(self, i) -> Element:
        return tuple(int(x) for x in self.exps[int(i)])

    # -- vectorised products -----------------------------------------------

    def mul(self, a, b):
        """Elementwise product of index arrays (either may be a scalar)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        v = a.copy()
        eb = self.exps[b]
        for i in range(self.n):
            v = self.rpow[i][eb[..., i], v]
        return v

    def rmul_fixed(self, a, x: int):
        """a * x for an array a and a single element index x."""
        v = np.asarray(a, dtype=np.int64)
        ex = self.exps[x]
        for i in range(self.n):
            if ex[i]:
                v = self.rpow[i][ex[i]][v]
        return v

    def lmul_all(self, x: int):
        """x * g for every element g (in index order)."""
        v = np.full(self.order, x, dtype=np.int64)
        for i in range(self.n):
            v = self.rpow[i][self.exps[:, i], v]
        return v

    @cached_property
    def inverses(self) -> np.ndarray:
        # a^-1 = a^(e-1) where e is a multiple of every element order
        e = self.order
        k = e - 1
        idx = np.arange(self.order, dtype=np.int64)
        result = np.zeros(self.order, dtype=np.int64)
        base = idx
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def element_orders(self) -> np.ndarray:
        if "_orders" in self.__dict__:
            return self.__dict__["_orders"]
        idx = np.arange(self.order, dtype=np.int64)
        orders = np.zeros(self.order, dtype=np.int64)
        cur = idx.copy()
        k = 1
        orders[0] = 1
        todo = cur != 0
        while todo.any():
            k += 1
            cur = self.mul(cur, idx)
            hit = todo & (cur == 0)
            orders[hit] = k
            todo &= ~hit
        self.__dict__["_orders"] = orders
        return orders

    def centralizer(self, x: int) -> np.ndarray:
        xg = self.lmul_all(x)
        gx = self.rmul_fixed(np.arange(self.order, dtype=np.int64), x)
        return np.nonzero(xg == gx)[0]

    def center_indices(self) -> np.ndarray:
        idx = np.arange(self.order, dtype=np.int64)
        ok = np.ones(self.order, dtype=bool)
        for i in range(self.n):
            g = self.index(self.P.gen(i))
            ok &= self.rgen[i] == self.mul(g, idx)
        return np.nonzero(ok)[0]

    def conjugacy_class(self, x: int) -> np.ndarray:
        idx = np.arange(self.order, dtype=np.int64)
        return np.unique(self.mul(self.rmul_fixed(self.inverses, x), idx))

    def conjugacy_classes(self) -> list[np.ndarray]:
        seen = np.zeros(self.order, dtype=bool)
        classes = []
        for x in range(self.order):
            if seen[x]:
                continue
            cl = self.conjugacy_class(x)
            seen[cl] = True
            classes.append(cl)
        return classes

    def conjugate_set(self, S, by) -> np.ndarray:
        """{g^-1 s g : s in S, g in by}."""
        S = np.asarray(S, dtype=np.int64)
        out = []
        for g in by:
            out.append(self.rmul_fixed(self.mul(self.inverses[g], S), g))
        return np.unique(np.concatenate(out)) if out else S

    def closure(self, gens) -> np.ndarray:
        """Index set of the subgroup generated by ``gens``."""
        gens = [int(g) for g in gens if int(g) != 0]
        have = np.zeros(self.order, dtype=bool)
        have[0] = True
        frontier = np.array([0], dtype=np.int64)
        while frontier.size:
            new = []
            for g in gens:
                nxt = self.rmul_fixed(frontier, g)
                nxt = nxt[~have[nxt]]
                nxt = np.unique(nxt)
                have[nxt] = True
                new.append(nxt)
            frontier = np.concatenate(new) if new else np.zeros(0, dtype=np.int64)
        return np.nonzero(have)[0]

    def generating_set(self, idx) -> list[Element]:
        """A small generating set for a subgroup given by its index set."""
        idx = np.asarray(idx, dtype=np.int64)
        orders = self.element_orders()[idx]
        cand = idx[np.argsort(-orders, kind="stable")]
        gens: list[int] = []
        inside = np.zeros(self.order, dtype=bool)
        inside[0] = True
        for c in cand:
            if inside.sum() == idx.size:
                break
            if inside[c]:
                continue
            gens.append(int(c))
            inside[:] = False
            inside[self.closure(gens)] = True
        return [self.element(g) for g in gens]


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def _drop_tail(w, k):
    return tuple(w[:k])


def quotient_by_tail(P: PcPresentation, k: int) -> PcPresentation:
    """P / <g_k, ..., g_{n-1}> for a 0-based start index ``k``.

    The segment is checked for normality by conjugating each of its
    generators by every group generator.
    """
    n = P.n
    if not 0 <= k <= n:
        raise ValueError("segment start out of range")
    for j in range(k, n):
        for i in range(n):
            c = P.conjugate(P.gen(j), P.gen(i))
            if any(c[:k]):
                raise ValueError(f"terminal segment from f{k + 1} is not normal")
    orders = P.relative_orders[:k]
    powers = [_drop_tail(w, k) for w in P.power_words[:k]]
    conj = {(i, j): _drop_tail(w, k) for (i, j), w in P.conjugate_words.items() if j < k}
    return PcPresentation(orders, tuple(powers), conj, name=f"{P.name}/<f{k + 1}..>" if P.name else "")


def direct_product(P: PcPresentation, Q: PcPresentation) -> PcPresentation:
    n, m = P.n, Q.n
    orders = P.relative_orders + Q.relative_orders
    powers = [tuple(w) + (0,) * m for w in P.power_words] + [(0,) * n + tuple(w) for w in Q.power_words]
    conj = {}
    for (i, j), w in P.conjugate_words.items():
        conj[(i, j)] = tuple(w) + (0,) * m
    for (i, j), w in Q.conjugate_words.items():
        conj[(n + i, n + j)] = (0,) * n + tuple(w)
    name = f"{P.name} x {Q.name}" if P.name and Q.name else ""
    return PcPresentation(orders, tuple(powers), conj, name=name)


def enforced_quotient(P: PcPresentation, max_rounds: int = 64):
    """Consistent presentation of the group an inconsistent presentation defines.

    Each failed overlap yields a relation u = v between two normal forms. We
    require the difference d = u^-1 v to be a power of a single generator g_k
    with g_k central (for the presentations this is meant for, the failures
    land in the last central generator). Imposing d = 1 lowers the relative
    order of g_k to gcd(o_k, e), dropping g_k when it becomes trivial.

    Returns ``(presentation, order)``.
    """
    cur = P
    for _ in range(max_rounds):
        fails = cur.consistency_failures()
        if not fails:
            return cur, cur.nominal_order
        label, u, v = fails[0]
        d = cur.multiply(cur.inverse(u), v)
        support = [k for k, e in enumerate(d) if e]
        if len(support) != 1:
            raise PresentationError(f"failure not central: overlap {label} gives relation {d}")
        k = support[0]
        gk = cur.gen(k)
        # read centrality off the relations: arithmetic in an inconsistent
        # presentation depends on the collection path
        words = cur.conjugate_words
        if any(words[(i, k)] != gk for i in range(k)) or any(words[(k, j)] != cur.gen(j) for j in range(k + 1, cur.n)):
            raise PresentationError(f"failure not central: f{k + 1} from overlap {label} is not central")
        new_order = gcd(cur.relative_orders[k], d[k])
        cur = _impose_generator_order(cur, k, new_order)
    raise PresentationError("enforced_quotient did not converge")


def _impose_generator_order(P: PcPresentation, k: int, new_order: int) -> PcPresentation:
    """Impose g_k^new_order = 1 for a central generator g_k."""
    n = P.n
    if new_order == 1:
        keep = [i for i in range(n) if i != k]

        def strip(w):
            return tuple(w[i] for i in keep)

        orders = tuple(P.relative_orders[i] for i in keep)
        powers = tuple(strip(P.power_words[i]) for i in keep)
        pos = {old: new for new, old in enumerate(keep)}
        conj = {(pos[i], pos[j]): strip(w) for (i, j), w in P.conjugate_words.items() if i != k and j != k}
        return PcPresentation(orders, powers, conj, name=P.name)
    # shrink the relative order; exponents of g_k get reduced mod new_order
    def red(w):
        return tuple(e % new_order if i == k else e for i, e in enumerate(w))

    orders = tuple(new_order if i == k else o for i, o in enumerate(P.relative_orders))
    powers = tuple((0,) * n if i == k else red(w) for i, w in enumerate(P.power_words))
    conj = {key: red(w) for key, w in P.conjugate_words.items()}
    return PcPresentation(orders, powers, conj, name=P.name)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def _format_word(w) -> str:
    parts = [f"g{k + 1}^{e}" for k, e in enumerate(w) if e]
    return "*".join(parts) if parts else "1"


def format_presentation(P: PcPresentation) -> str:
    lines = [f"pcgroup {P.n}"]
    if P.name:
        lines.insert(0, f"# {P.name}")
    for i, o in enumerate(P.relative_orders):
        lines.append(f"order {i + 1} {o}")
    for i, w in enumerate(P.power_words):
        if any(w):
            lines.append(f"power {i + 1} = {_format_word(w)}")
    for (i, j), w in sorted(P.conjugate_words.items()):
        if tuple(w) != P.gen(j):
            lines.append(f"conj {j + 1} ^ {i + 1} = {_format_word(w)}")
    return "\n".join(lines) + "\n"


_FACTOR = re.compile(r"^g(\d+)(?:\^(\d+))?$")


def _parse_word(text: str, n: int, lineno: int) -> tuple:
    text = text.strip()
    w = [0] * n
    if text == "1":
        return tuple(w)
    last = -1
    for part in text.split("*"):
        m = _FACTOR.match(part.strip())
        if not m:
            raise PresentationError(f"line {lineno}: cannot parse factor {part!r}")
        k = int(m.group(1)) - 1
        e = int(m.group(2) or 1)
        if not 0 <= k < n:
            raise PresentationError(f"line {lineno}: generator g{k + 1} out of range")
        if k <= last:
            raise PresentationError(f"line {lineno}: word is not in normal form (indices must increase)")
        if e <= 0:
            raise PresentationError(f"line {lineno}: exponents must be positive")
        last = k
        w[k] = e
    return tuple(w)


def parse_presentation(text: str, name: str = "") -> PcPresentation:
    """Parse the ``pcgroup`` text format.

    Grammar (one statement per line, ``#`` starts a comment)::

        pcgroup <n>
        order <i> <o_i>            for each 1 <= i <= n
        power <i> = <word>         optional, default 1
        conj <j> ^ <i> = <word>    optional for i < j, default g<j>
        <word> := 1 | g<k>^<e> (* g<k>^<e>)*   with increasing k

    Words must be normal: exponents in [1, o_k), increasing indices, power
    words in generators > i, conjugates in generators >= j.
    """
    n = None
    orders: dict[int, int] = {}
    raw_powers = {}
    raw_conj = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "pcgroup":
            if n is not None or len(tok) != 2:
                raise PresentationError(f"line {lineno}: bad header")
            n = int(tok[1])
            if n < 1:
                raise PresentationError("need at least one generator")
            continue
        if n is None:
            raise PresentationError("missing 'pcgroup n' header")
        if tok[0] == "order" and len(tok) == 3:
            orders[int(tok[1]) - 1] = int(tok[2])
        elif tok[0] == "power":
            m = re.match(r"^power\s+(\d+)\s*=\s*(.+)$", line)
            if not m:
                raise PresentationError(f"line {lineno}: bad power line")
            raw_powers[int(m.group(1)) - 1] = (m.group(2), lineno)
        elif tok[0] == "conj":
            m = re.match(r"^conj\s+(\d+)\s*\^\s*(\d+)\s*=\s*(.+)$", line)
            if not m:
                raise PresentationError(f"line {lineno}: bad conj line")
            j, i = int(m.group(1)) - 1, int(m.group(2)) - 1
            raw_conj[(i, j)] = (m.group(3), lineno)
        else:
            raise PresentationError(f"line {lineno}: unknown statement {tok[0]!r}")
    if n is None:
        raise PresentationError("missing 'pcgroup n' header")
    if sorted(orders) != list(range(n)):
        raise PresentationError("need exactly one order line per generator")
    ords = tuple(orders[i] for i in range(n))
    powers = []
    for i in range(n):
        if i in raw_powers:
            txt, ln = raw_powers[i]
            powers.append(_parse_word(txt, n, ln))
        else:
            powers.append((0,) * n)
    conj = {}
    for (i, j), (txt, ln) in raw_conj.items():
        if not 0 <= i < j < n:
            raise PresentationError(f"line {ln}: conj needs 1 <= i < j <= n")
        conj[(i, j)] = _parse_word(txt, n, ln)
    return PcPresentation(ords, tuple(powers), conj, name=name)

"""Schur multipliers from tailed covers, commutator lifts, and character groups.

Every power and conjugate relation of a consistent presentation gets its own
central tail generator t_k of infinite order. Evaluating the overlap tests in
the tailed presentation gives integer relations among the tails; the tails
then generate R/[R,F] = Z^m / L, whose torsion subgroup is the Schur
multiplier and whose free rank equals the number of generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .linalg import AbelianGroupInvariants, TorsionQuotient, howell_form, howell_kernel, span_order
from .pcgroup import Element, PcPresentation, Subgroup, _Multiplier, _mixed_radix


class CoverError(RuntimeError):
    pass


@dataclass(eq=False)
class CoverPresentation:
    base: PcPresentation
    m: int
    tail_assignment: dict  # ("power", i) or ("conj", i, j) -> tail index
    relation_lattice: list  # rows over Z^m
    mult: _Multiplier = field(repr=False)

    @cached_property
    def quotient(self) -> TorsionQuotient:
        return TorsionQuotient(self.relation_lattice, self.m)

    @property
    def multiplier(self) -> AbelianGroupInvariants:
        return AbelianGroupInvariants(self.quotient.invariants.torsion, 0)

    def tail_product(self, a: Element, b: Element) -> tuple:
        """Tail picked up when multiplying the lifts of a and b."""
        z = self.mult.zero_tail
        return self.mult.mul((tuple(a), z), (tuple(b), z))[1]

    def lift_raw(self, x: Element, y: Element) -> tuple:
        """Tail vector of the commutator of the lifts of commuting x, y."""
        cxy = self.tail_product(x, y)
        cyx = self.tail_product(y, x)
        return tuple(a - b for a, b in zip(cxy, cyx))

    def tables(self, max_order: int | None = None) -> "CoverTables":
        t = self.__dict__.get("_tables")
        if t is None:
            t = CoverTables(self, max_order)
            self.__dict__["_tables"] = t
        return t


def _tail_layout(n: int, permutation: Sequence[int] | None):
    keys = [("power", i) for i in range(n)]
    keys += [("conj", i, j) for i in range(n) for j in range(i + 1, n)]
    m = len(keys)
    perm = list(range(m)) if permutation is None else list(permutation)
    if sorted(perm) != list(range(m)):
        raise ValueError("tail permutation must be a permutation of range(m)")
    return {k: perm[t] for t, k in enumerate(keys)}, m


def build_cover(P: PcPresentation, tail_permutation: Sequence[int] | None = None) -> CoverPresentation:
    """Attach a central tail to every relation and collect the overlap rows.

    ``tail_permutation`` relabels the tails; the multiplier does not depend
    on it.
    """
    n = P.n
    assign, m = _tail_layout(n, tail_permutation)

    def unit(k):
        v = [0] * m
        v[k] = 1
        return tuple(v)

    power_tails = [unit(assign[("power", i)]) for i in range(n)]
    conj_tails = {(i, j): unit(assign[("conj", i, j)]) for i in range(n) for j in range(i + 1, n)}
    mult = _Multiplier(P.relative_orders, P.power_words, P.conjugate_words, power_tails, conj_tails, m)
    zero = mult.zero_tail
    rows = []
    for label, lhs, rhs in P.evaluate_overlaps(mult, lambda i, e: (P.gen(i, e), zero)):
        if lhs[0] != rhs[0]:
            raise CoverError(f"presentation is inconsistent at overlap {label}")
        row = [a - b for a, b in zip(lhs[1], rhs[1])]
        if any(row):
            rows.append(row)
    return CoverPresentation(P, m, assign, rows, mult)


def schur_multiplier(P: PcPresentation) -> AbelianGroupInvariants:
    return build_cover(P).multiplier


def lift_commutator(C: CoverPresentation, x: Element, y: Element) -> tuple:
    """Canonical class of [x~, y~] in the multiplier, as torsion residues."""
    P = C.base
    if P.commutator(x, y) != P.identity:
        raise ValueError("lift_commutator needs commuting elements")
    try:
        return C.quotient.canon_torsion(C.lift_raw(x, y))
    except ValueError as exc:
        raise CoverError("commutator lift is not torsion modulo the relation lattice") from exc


class CoverTables:
    """Vectorised tail bookkeeping on top of a :class:`GroupTable`.

    ``tail_pow[i][e, a]`` is the tail produced by a * g_i^e, so the tail of
    a product a * b is a sum of n lookups along the same chain the group
    table uses for the product itself.
    """

    def __init__(self, C: CoverPresentation, max_order: int | None = None):
        P = C.base
        self.cover = C
        self.group = T = P.table() if max_order is None else P.table(max_order)
        m = C.m
        self.tail_pow = []
        for i in range(P.n):
            o = P.relative_orders[i]
            sub = int(T.strides[i]) * o
            tails = np.empty((sub, m), dtype=np.int64)
            for k, suf in enumerate(_mixed_radix(P.relative_orders[i:])):
                tails[k] = C.mult._step(suf, i, 1)[1]
            one = tails[np.arange(T.order) % sub]
            tp = np.zeros((o, T.order, m), dtype=np.int64)
            for e in range(1, o):
                tp[e] = tp[e - 1] + one[T.rpow[i][e - 1]]
            self.tail_pow.append(tp)

    def tail_product(self, X, Y) -> np.ndarray:
        T = self.group
        X = np.asarray(X, dtype=np.int64)
        Y = np.asarray(Y, dtype=np.int64)
        X, Y = np.broadcast_arrays(X, Y)
        cur = X.copy()
        acc = np.zeros(X.shape + (self.cover.m,), dtype=np.int64)
        ey = T.exps[Y]
        for i in range(T.n):
            e = ey[..., i]
            acc += self.tail_pow[i][e, cur]
            cur = T.rpow[i][e, cur]
        return acc

    def lift_raw(self, X, Y) -> np.ndarray:
        return self.tail_product(X, Y) - self.tail_product(Y, X)

    def lift_canonical(self, X, Y) -> np.ndarray:
        """Rows of torsion residues for the pairs (X[k], Y[k])."""
        raw = self.lift_raw(X, Y).reshape(-1, self.cover.m)
        try:
            return self.cover.quotient.canon_torsion_array(raw)
        except ValueError as exc:
            raise CoverError("commutator lift is not torsion modulo the relation lattice") from exc


# ---------------------------------------------------------------------------
# characters of an abelian normal subgroup
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Character:
    """Homomorphism N -> Q/Z stored as residues mod ``modulus`` on N's generators.

    ``values[k] = v`` means the k-th generator maps to v / modulus.
    """

    values: tuple
    modulus: int

    def __add__(self, other: "Character") -> "Character":
        if self.modulus != other.modulus:
            raise ValueError("characters use different moduli")
        return Character(tuple((a + b) % self.modulus for a, b in zip(self.values, other.values)), self.modulus)

    def scale(self, k: int) -> "Character":
        return Character(tuple(k * a % self.modulus for a in self.values), self.modulus)

    @property
    def is_trivial(self) -> bool:
        return not any(self.values)


@dataclass
class CharacterGroup:
    N: Subgroup
    gens: list  # generators of N the characters are evaluated on
    modulus: int
    relations: np.ndarray  # integer rows r with prod gens^r = 1
    generators: list  # Character generators of the (sub)group
    order: int
    _coords: dict = field(repr=False, default_factory=dict)

    def vector(self, h: Element) -> tuple:
        """Some exponent vector a with prod gens^a = h."""
        try:
            return self._coords[tuple(h)]
        except KeyError:
            raise ValueError(f"{h} is not in N") from None

    def evaluate(self, chi: Character, h: Element) -> int:
        """chi(h) as a residue modulo ``modulus``."""
        return sum(a * v for a, v in zip(self.vector(h), chi.values)) % self.modulus

    def act(self, g: Element, chi: Character) -> Character:
        """The character h -> chi(g^-1 h g)."""
        P = self.N.group
        vals = tuple(self.evaluate(chi, P.conjugate(h, g)) for h in self.gens)
        return Character(vals, self.modulus)

    def contains(self, chi: Character) -> bool:
        R = self.relations
        if R.size and np.any((R @ np.array(chi.values, dtype=np.int64)) % self.modulus):
            return False
        return True


def _abelian_coordinates(N: Subgroup):
    P = N.group
    if not N.is_abelian():
        raise ValueError("N is not abelian")
    gens = [tuple(g) for g in N.gens]
    orders = [P.element_order(g) for g in gens]
    coords = {}
    rows = []
    for i, o in enumerate(orders):
        r = [0] * len(gens)
        r[i] = o
        rows.append(r)
    # walk all exponent vectors; colliding images give relations
    for a in _mixed_radix(orders) if gens else [()]:
        h = P.identity
        for g, e in zip(gens, a):
            if e:
                h = P.multiply(h, P.power(g, e))
        prev = coords.get(h)
        if prev is None:
            coords[h] = a
        else:
            rows.append([x - y for x, y in zip(a, prev)])
    if len(coords) != N.order:
        raise ValueError("generators do not span N")
    return gens, coords, np.array(rows, dtype=np.int64).reshape(len(rows), len(gens))


def character_group(N: Subgroup) -> CharacterGroup:
    """Hom(N, Q/Z) for an abelian subgroup N, with values mod exponent(N)."""
    gens, coords, R = _abelian_coordinates(N)
    e = N.exponent()
    if e == 1:
        return CharacterGroup(N, gens, 1, R, [], 1, coords)
    K = howell_kernel(R % e, e) if R.size else np.eye(len(gens), dtype=np.int64)
    H = howell_form(K, e) if K.size else K
    chars = [Character(tuple(int(x) for x in row), e) for row in H]
    order = span_order(H, e) if H.size else 1
    if order != N.order:
        raise ArithmeticError(f"|Hom(N, Q/Z)| = {order} but |N| = {N.order}")
    return CharacterGroup(N, gens, e, R, chars, order, coords)


def fixed_characters(N: Subgroup, G: PcPresentation | None = None) -> CharacterGroup:
    """Characters of N invariant under conjugation by every generator of G."""
    P = N.group if G is None else G
    if N.is_normal is None:
        N.check_normal()
    if not N.is_normal:
        raise ValueError("N is not normal in G")
    full = character_group(N)
    e = full.modulus
    if e == 1:
        return full
    k = len(full.gens)
    blocks = [full.relations % e] if full.relations.size else []
    for g in P.generators:
        M = np.array([full.vector(P.conjugate(h, g)) for h in full.gens], dtype=np.int64)
        # (g.chi)(h_i) = sum_k M[i, k] chi(h_k); fixed iff (M - I) chi = 0
        blocks.append((M - np.eye(k, dtype=np.int64)) % e)
    A = np.vstack(blocks)
    K = howell_kernel(A, e)
    H = howell_form(K, e) if K.size else np.zeros((0, k), dtype=np.int64)
    chars = [Character(tuple(int(x) for x in row), e) for row in H]
    order = span_order(H, e) if H.size else 1
    return CharacterGroup(N, full.gens, e, full.relations, chars, order, full._coords)

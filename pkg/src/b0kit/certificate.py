"""Certify B0(G) != 0 from a normal abelian subgroup N without computing B0.

Let t be the number of G-invariant characters of N and h = |M(G/N)|. The
transgression from invariant characters to H^2(G/N, Q/Z) has image of size
dividing t, so inflation sends a subgroup of order at least h / gcd(h, t)
into H^2(G, Q/Z). If moreover every commuting pair of G maps to a cyclic
subgroup of G/N, every such inflated class dies on all bicyclic subgroups
and therefore lies in B0(G).

Only terminal segments N = <g_k, ..., g_n> are supported, because the
quotient G/N must again be a pc presentation.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .bogomolov import Strategy
from .homology import fixed_characters, schur_multiplier
from .pcgroup import Element, PcPresentation, Subgroup, quotient_by_tail


@dataclass
class FailureReport:
    group: str
    reason: str
    t: int | None = None
    h: int | None = None
    witness: tuple | None = None  # (x, y, x mod N, y mod N)

    def to_dict(self) -> dict:
        w = None
        if self.witness:
            w = [list(map(int, e)) for e in self.witness]
        return {"group": self.group, "certified": False, "reason": self.reason, "t": self.t, "h": self.h, "witness": w}


@dataclass
class Certificate:
    group: str
    fingerprint: str
    N: Subgroup
    segment_start: int
    t: int
    h: int
    pair_scan_passed: bool
    pairs_scanned: int
    strategy: Strategy
    wall_time: float = 0.0
    fixed_generators: list = field(default_factory=list)

    @property
    def b0_lower_bound(self) -> int:
        # the transgression image has order dividing both t and h
        return self.h // gcd(self.h, self.t)

    @property
    def valid(self) -> bool:
        return self.t < self.h and self.pair_scan_passed and self.b0_lower_bound > 1

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "fingerprint": self.fingerprint,
            "certified": self.valid,
            "N": [f"f{k + 1}" for k in range(self.segment_start, self.N.group.n)],
            "N_order": self.N.order,
            "t": self.t,
            "h": self.h,
            "b0_lower_bound": self.b0_lower_bound,
            "pair_scan_passed": self.pair_scan_passed,
            "pairs_scanned": self.pairs_scanned,
            "strategy": self.strategy.value,
            "fixed_characters": [list(c.values) for c in self.fixed_generators],
            "wall_time": round(self.wall_time, 4),
        }


def _segment_start(P: PcPresentation, N: Subgroup | int) -> int:
    if isinstance(N, int):
        return N
    T = P.table()
    for k in range(P.n + 1):
        seg = np.nonzero(~T.exps[:, :k].any(axis=1))[0] if k else np.arange(T.order)
        if seg.size == N.order and np.array_equal(seg, N.indices):
            return k
    raise ValueError("N must be a terminal segment <f_k, ..., f_n> of the generating sequence")


def cyclic_check(q1: Element, q2: Element, Q: PcPresentation) -> tuple[bool, bool]:
    """Is <q1, q2> cyclic?  Returns ``(cyclic, commuting)``.

    Non-commuting inputs return ``(False, False)``: two non-commuting elements
    never generate a cyclic group.
    """
    if Q.commutator(q1, q2) != Q.identity:
        return False, False
    S = Q.subgroup([q1, q2])
    return S.is_cyclic(), True


def _cyclic_pair_table(Q: PcPresentation) -> np.ndarray:
    """cyc[a, b] for all commuting a, b in Q (False where they do not commute).

    For commuting a, b the group <a, b> is abelian of exponent lcm(|a|, |b|),
    so it is cyclic iff |<a> & <b>| = gcd(|a|, |b|).
    """
    T = Q.table()
    N = T.order
    idx = np.arange(N, dtype=np.int64)
    orders = T.element_orders()
    member = np.zeros((N, N), dtype=bool)
    cur = np.zeros(N, dtype=np.int64)
    for _ in range(int(orders.max())):
        member[idx, cur] = True
        cur = T.mul(cur, idx)
    commute = np.zeros((N, N), dtype=bool)
    for a in range(N):
        commute[a] = T.lmul_all(a) == T.rmul_fixed(idx, a)
    inter = member.astype(np.int32) @ member.T.astype(np.int32)
    return commute & (inter == np.gcd.outer(orders, orders))


def check_lemma21(
    P: PcPresentation,
    N: Subgroup | int,
    strategy=Strategy.CONJ_REDUCED,
) -> Certificate | FailureReport:
    """Try to certify B0(P) != 0 using the normal abelian subgroup N.

    ``N`` is a Subgroup equal to a terminal segment, or the 0-based index k
    of the segment <g_k, ...>.
    """
    t0 = time.perf_counter()
    strategy = Strategy.parse(strategy)
    k = _segment_start(P, N)
    if isinstance(N, int):
        gens = [P.gen(i) for i in range(k, P.n)]
        N = P.subgroup(gens) if gens else Subgroup.from_indices(P, [0], gens=[])
        N.gens = gens
    if not N.is_abelian():
        raise ValueError("N is not abelian")
    if not N.check_normal():
        raise ValueError("N is not normal")
    Q = quotient_by_tail(P, k)
    fixed = fixed_characters(N, P)
    t = fixed.order
    h = schur_multiplier(Q).order if Q.n else 1

    T = P.table()
    qidx = np.arange(T.order, dtype=np.int64) // N.order  # index in G/N (f1 most significant)
    if Q.n:
        cyc = _cyclic_pair_table(Q)
    else:
        cyc = np.ones((1, 1), dtype=bool)
    if strategy is Strategy.FULL:
        outer = range(T.order)
    else:
        outer = [int(c[0]) for c in T.conjugacy_classes()]
    scanned = 0
    for x in outer:
        cen = T.centralizer(x)
        scanned += cen.size
        ok = cyc[qidx[x], qidx[cen]]
        if not ok.all():
            y = int(cen[np.argmin(ok)])
            qt = Q.table() if Q.n else None
            wit = (T.element(x), T.element(y), qt.element(qidx[x]) if qt else (), qt.element(qidx[y]) if qt else ())
            return FailureReport(P.name, "pair scan: a commuting pair has non-cyclic image in G/N", t, h, wit)
    cert = Certificate(P.name, P.fingerprint, N, k, t, h, True, scanned, strategy, time.perf_counter() - t0, fixed.generators)
    if not t < h:
        return FailureReport(P.name, f"transgression may be onto: t = {t} is not below h = {h}", t, h)
    return cert


@dataclass
class LemfReport:
    conditions: dict

    @property
    def ok(self) -> bool:
        return all(self.conditions.values())

    def to_dict(self) -> dict:
        return {"ok": self.ok, "conditions": dict(self.conditions)}


def check_lemf(P: PcPresentation) -> LemfReport:
    """Check the hypotheses of the five-generator criterion directly.

    Conditions: shape (five generators of a common odd prime relative
    order), f4^p = f5^p = 1 with f5 central, the listed commutator values,
    <f4, f5> = C_p x C_p, and G/<f4, f5> non-abelian of order p^3 and
    exponent p.
    """
    cond = {}
    orders = set(P.relative_orders)
    shape = P.n == 5 and len(orders) == 1 and min(orders) % 2 == 1 and P.is_consistent()
    cond["shape"] = shape
    if not shape:
        return LemfReport(cond)
    p = P.relative_orders[0]
    f = P.generators
    e = P.identity
    cond["f4^p = f5^p = 1"] = P.power(f[3], p) == e and P.power(f[4], p) == e
    cond["f5 central"] = all(P.commutator(f[4], g) == e for g in f)
    comm = P.commutator
    cond["[f2,f1] = f3"] = comm(f[1], f[0]) == f[2]
    cond["[f3,f1] = f4"] = comm(f[2], f[0]) == f[3]
    cond["[f4,f1] = f5"] = comm(f[3], f[0]) == f[4]
    cond["[f3,f2] = f5"] = comm(f[2], f[1]) == f[4]
    cond["[f4,f2] = 1"] = comm(f[3], f[1]) == e
    cond["[f4,f3] = 1"] = comm(f[3], f[2]) == e
    N = P.subgroup([f[3], f[4]])
    cond["<f4,f5> = Cp x Cp"] = N.order == p * p and N.is_abelian() and N.exponent() == p
    try:
        Q = quotient_by_tail(P, 3)
        cond["G/N non-abelian"] = not Q.is_abelian()
        cond["|G/N| = p^3"] = Q.is_consistent() and Q.nominal_order == p**3
        cond["exp(G/N) = p"] = Q.exponent() == p
    except ValueError:
        cond["G/N non-abelian"] = cond["|G/N| = p^3"] = cond["exp(G/N) = p"] = False
    return LemfReport(cond)

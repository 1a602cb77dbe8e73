"""Bogomolov multiplier as the Schur multiplier modulo commuting-pair lifts.

For commuting x, y the commutator of their lifts to the tailed cover is a
central element of the multiplier. These lifts span the subgroup M0, and
B0 = M / M0. Two enumerations of commuting pairs are offered:

* ``FULL``: every x with every y in C(x).
* ``CONJ_REDUCED``: one x per conjugacy class with every y in C(x). Inner
  automorphisms act trivially on the multiplier, so conjugate pairs give the
  same lift.

Lifted vectors are canonicalised modulo the relation lattice and folded into
an upper-triangular basis of M0 as they arrive. A vector is kept only if it
enlarges M0, which happens at most log2 |M| times, so the cost is dominated
by the pair stream.
"""

from __future__ import annotations

import enum
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Iterator

import numpy as np

from .homology import CoverPresentation, build_cover
from .linalg import AbelianGroupInvariants, cokernel_invariants
from .pcgroup import Element, PcPresentation, TooLargeToEnumerate

FULL_DEFAULT_LIMIT = 3**5
DEFAULT_B0_MAX_ORDER = 7**5


class Strategy(str, enum.Enum):
    FULL = "full"
    CONJ_REDUCED = "conj"

    @classmethod
    def parse(cls, s) -> "Strategy":
        if isinstance(s, Strategy):
            return s
        s = str(s).lower()
        for st in cls:
            if s in (st.value, st.name.lower()):
                return st
        raise ValueError(f"unknown strategy {s!r} (use 'full' or 'conj')")


def default_strategy(order: int) -> Strategy:
    return Strategy.FULL if order <= FULL_DEFAULT_LIMIT else Strategy.CONJ_REDUCED


@dataclass
class B0Result:
    group: str
    fingerprint: str
    order: int
    b0: AbelianGroupInvariants
    multiplier: AbelianGroupInvariants
    m0_generator_count: int
    strategy: Strategy
    pair_count: int
    complete: bool = True  # False when an early exit skipped pairs
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "fingerprint": self.fingerprint,
            "order": self.order,
            "b0": self.b0.to_dict(),
            "multiplier": self.multiplier.to_dict(),
            "m0_generator_count": self.m0_generator_count,
            "strategy": self.strategy.value,
            "pair_count": self.pair_count,
            "complete": self.complete,
            "wall_time": round(self.wall_time, 4),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "B0Result":
        return cls(
            d["group"],
            d["fingerprint"],
            d["order"],
            AbelianGroupInvariants.from_dict(d["b0"]),
            AbelianGroupInvariants.from_dict(d["multiplier"]),
            d["m0_generator_count"],
            Strategy.parse(d["strategy"]),
            d["pair_count"],
            d.get("complete", True),
            d.get("wall_time", 0.0),
        )


def _outer_elements(T, strategy: Strategy) -> np.ndarray:
    if strategy is Strategy.FULL:
        return np.arange(T.order, dtype=np.int64)
    return np.array([int(c[0]) for c in T.conjugacy_classes()], dtype=np.int64)


def _check_budget(P: PcPresentation, strategy: Strategy, max_order: int):
    N = P.nominal_order
    if N > max_order:
        hint = "raise max_order explicitly" if strategy is Strategy.CONJ_REDUCED else "try strategy 'conj' or raise max_order"
        raise TooLargeToEnumerate(f"group of order {N} exceeds the B0 budget {max_order} for strategy '{strategy.value}'; {hint}")


def commuting_pairs(
    P: PcPresentation, strategy=Strategy.FULL, max_order: int = DEFAULT_B0_MAX_ORDER
) -> Iterator[tuple[Element, Element]]:
    """Yield commuting pairs (x, y); y runs over all of C(x).

    Under ``CONJ_REDUCED`` x runs over conjugacy class representatives only.
    """
    strategy = Strategy.parse(strategy)
    _check_budget(P, strategy, max_order)
    T = P.table(max_order)
    for x in _outer_elements(T, strategy):
        ex = T.element(x)
        for y in T.centralizer(int(x)):
            yield ex, T.element(y)


def _quotient(moduli, vectors) -> AbelianGroupInvariants:
    t = len(moduli)
    rows = [[d if i == k else 0 for i in range(t)] for k, d in enumerate(moduli)]
    rows += [list(v) for v in vectors]
    return cokernel_invariants(rows, t)


def _xgcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


class _SpanBasis:
    """Upper-triangular basis of M0 + diag(moduli) inside Z^t.

    The diagonal is positive and entries above it are reduced, so a vector
    lies in the lattice iff reducing it column by column leaves zero.
    """

    def __init__(self, moduli):
        self.t = t = len(moduli)
        self.H = np.diag(np.array(moduli, dtype=np.int64)).reshape(t, t)
        self.generators: list[tuple] = []

    @property
    def index(self) -> int:
        """|Z^t / lattice| = |M / M0|."""
        return int(np.prod(np.diag(self.H))) if self.t else 1

    def reduce(self, V: np.ndarray) -> np.ndarray:
        V = np.array(V, dtype=np.int64).reshape(-1, self.t)
        for j in range(self.t):
            V -= (V[:, j] // self.H[j, j])[:, None] * self.H[j]
        return V

    def insert(self, v) -> None:
        H = [[int(x) for x in row] for row in self.H]
        v = [int(x) for x in v]
        self.generators.append(tuple(v))
        for j in range(self.t):
            if v[j] == 0:
                continue
            a, b = H[j][j], v[j]
            g, x, y = _xgcd(a, b)
            if g < 0:
                g, x, y = -g, -x, -y
            row = [x * p + y * q for p, q in zip(H[j], v)]
            v = [(a // g) * q - (b // g) * p for p, q in zip(H[j], v)]
            H[j] = row
        for j in range(self.t):
            for i in range(j):
                q = H[i][j] // H[j][j]
                if q:
                    H[i] = [p - q * r for p, r in zip(H[i], H[j])]
        self.H = np.array(H, dtype=np.int64).reshape(self.t, self.t)

    def absorb(self, V) -> int:
        """Fold the rows of V into the lattice; returns how many enlarged it."""
        R = self.reduce(V)
        R = R[np.any(R, axis=1)]
        added = 0
        while len(R):
            self.insert(R[0])
            added += 1
            R = self.reduce(R[1:])
            R = R[np.any(R, axis=1)]
        return added

    def invariants(self) -> AbelianGroupInvariants:
        inv = cokernel_invariants(self.H.tolist(), self.t) if self.t else AbelianGroupInvariants()
        return AbelianGroupInvariants(inv.torsion, 0)


class _LiftCollector:
    """Streams commuting pairs through the cover into a :class:`_SpanBasis`."""

    def __init__(self, C: CoverPresentation, max_order: int):
        self.C = C
        self.tables = C.tables(max_order)
        self.T = self.tables.group
        self.moduli = list(C.quotient.moduli)

    def absorb(self, xs, span: _SpanBasis | None = None, stop_when_trivial: bool = False):
        """Lifts of all (x, y), y in C(x), for x in ``xs``.

        Returns ``(span, pairs_seen, finished)``; ``finished`` is False when
        the scan stopped early because M0 already filled M.
        """
        T, tabs = self.T, self.tables
        span = span or _SpanBasis(self.moduli)
        count = 0
        for k, x in enumerate(xs):
            if stop_when_trivial and span.index == 1:
                return span, count, False
            cen = T.centralizer(int(x))
            count += cen.size
            if not self.moduli:
                continue
            lifts = tabs.lift_canonical(np.full(cen.size, x, dtype=np.int64), cen)
            span.absorb(np.unique(lifts, axis=0))
        return span, count, True


def b0(
    P: PcPresentation,
    strategy=None,
    *,
    max_order: int = DEFAULT_B0_MAX_ORDER,
    early_exit: bool = False,
    threads: int = 1,
    chunk: int = 256,
) -> B0Result:
    """B0(P) = M(P) / <commutator lifts of commuting pairs>.

    ``early_exit`` stops as soon as the lifts span the whole multiplier; the
    result is then only a proof of B0 = 0 and is flagged incomplete if pairs
    were skipped. ``threads`` splits the outer elements across workers whose
    partial spans are merged, so the answer does not depend on the split.
    """
    t0 = time.perf_counter()
    strategy = default_strategy(P.nominal_order) if strategy is None else Strategy.parse(strategy)
    _check_budget(P, strategy, max_order)
    C = build_cover(P)
    M = C.multiplier
    col = _LiftCollector(C, max_order)
    outer = _outer_elements(col.T, strategy)
    complete = True
    if threads > 1 and not early_exit:
        chunks = [outer[k : k + chunk] for k in range(0, outer.size, chunk)]
        span = _SpanBasis(col.moduli)
        pairs = 0
        with ThreadPoolExecutor(max_workers=threads) as ex:
            for part, cnt, _ in ex.map(col.absorb, chunks):
                span.absorb(part.H)
                pairs += cnt
    else:
        span, pairs, complete = col.absorb(outer, stop_when_trivial=early_exit)
    return B0Result(
        group=P.name,
        fingerprint=P.fingerprint,
        order=P.nominal_order,
        b0=span.invariants(),
        multiplier=M,
        m0_generator_count=len(span.generators),
        strategy=strategy,
        pair_count=pairs,
        complete=complete,
        wall_time=time.perf_counter() - t0,
    )


def b0_from_pairs(P: PcPresentation, pairs: Iterable[tuple[Element, Element]]) -> AbelianGroupInvariants:
    """B0-style quotient of M(P) by the lifts of an explicit pair list.

    Slow reference path used to test the vectorised enumeration.
    """
    from .homology import lift_commutator

    C = build_cover(P)
    vecs = {lift_commutator(C, x, y) for x, y in pairs}
    vecs.discard(tuple(0 for _ in C.quotient.moduli))
    return AbelianGroupInvariants(_quotient(C.quotient.moduli, sorted(vecs)).torsion, 0)


# ---------------------------------------------------------------------------
# batch driver
# ---------------------------------------------------------------------------


@dataclass
class BatchRow:
    label: str
    expected_nontrivial: bool | None
    result: B0Result | None
    error: str = ""

    @property
    def ok(self) -> bool:
        if self.result is None:
            return False
        if self.expected_nontrivial is None:
            return True
        return self.expected_nontrivial == (not self.result.b0.is_trivial)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "expected_nontrivial": self.expected_nontrivial,
            "ok": self.ok,
            "error": self.error,
            "result": self.result.to_dict() if self.result else None,
        }


@dataclass
class BatchReport:
    rows: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return [r for r in self.rows if not r.ok]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"ok": self.ok, "rows": [r.to_dict() for r in self.rows]}

    def to_text(self) -> str:
        lines = []
        for r in self.rows:
            if r.result is None:
                lines.append(f"{'FAIL':4}  {r.label:<24} error: {r.error}")
                continue
            res = r.result
            exp = {True: "nontrivial", False: "trivial", None: "-"}[r.expected_nontrivial]
            lines.append(
                f"{'ok' if r.ok else 'FAIL':4}  {r.label:<24} |G|={res.order:<6} M={str(res.multiplier):<16} "
                f"B0={str(res.b0):<10} expected={exp:<10} {res.strategy.value} {res.wall_time:.2f}s"
            )
        return "\n".join(lines)


def b0_batch(
    primes: Iterable[int],
    families=None,
    *,
    include_controls: bool = True,
    strategy=None,
    threads: int = 1,
    max_order: int = DEFAULT_B0_MAX_ORDER,
) -> BatchReport:
    """Run b0 over family members and controls, recording expectation mismatches.

    ``families`` restricts the family tags (None means all B0-positive ones).
    """
    from .families import build, controls, family_members, order_p5_controls

    report = BatchReport()
    seen = set()

    def run(label, P, expected):
        if P.fingerprint in seen:
            return
        seen.add(P.fingerprint)
        try:
            res = b0(P, strategy, max_order=max_order, threads=threads)
            report.rows.append(BatchRow(label, expected, res))
        except Exception as exc:  # reported, not raised: the batch keeps going
            report.rows.append(BatchRow(label, expected, None, f"{type(exc).__name__}: {exc}"))

    for p in primes:
        for spec in family_members(p):
            if families and spec.family not in families:
                continue
            run(spec.label, build(spec), True)
        if include_controls:
            for P in controls(p) + order_p5_controls(p):
                run(P.name, P, False)
    return report

"""Concrete groups: the order-p^5 families, their impostors, and controls.

Generators are 0-based internally; the family relations are written with the
1-based names f1..f5. Every family group shares the commutator relations

    [f2,f1] = f3, [f3,f1] = f4, [f4,f1] = [f3,f2] = f5, [f4,f2] = [f4,f3] = 1,

with f5 central, and differs only in its power relations.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .pcgroup import PcPresentation, direct_product

__all__ = [
    "FamilySpec",
    "PAPER_TAGS",
    "IMPOSTOR_TAGS",
    "is_prime",
    "smallest_primitive_root",
    "c2",
    "c3",
    "build",
    "family_members",
    "controls",
    "b0_family_count",
    "bagnera_count",
    "cyclic",
    "elementary_abelian",
    "heisenberg",
    "modular",
    "dihedral",
    "generalized_quaternion",
    "symmetric3",
    "dicyclic12",
    "maximal_class_4",
    "order_p5_controls",
    "oracle_corpus",
    "expected_consistency",
]

PAPER_TAGS = ("G243_28", "G243_29", "G243_30", "G1", "G2", "G3")
IMPOSTOR_TAGS = ("G28_IMPOSTOR", "G29_IMPOSTOR", "G30_IMPOSTOR")


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


def _mult_order(a: int, p: int) -> int:
    k, x = 1, a % p
    while x != 1:
        x = x * a % p
        k += 1
    return k


def smallest_primitive_root(p: int) -> int:
    """Least alpha >= 2 whose multiplicative order mod p is p - 1."""
    if not is_prime(p) or p == 2:
        raise ValueError(f"{p} is not an odd prime")
    for a in range(2, p):
        if _mult_order(a, p) == p - 1:
            return a
    raise ArithmeticError("no primitive root found")  # unreachable for primes


def c2(p: int) -> int:
    return gcd(4, p - 1) - 1


def c3(p: int) -> int:
    return gcd(3, p - 1) - 1


def b0_family_count(p: int) -> int:
    """Number of family members G(1|p), G_r(2|p), G_r(3|p) for p >= 5."""
    if not is_prime(p) or p < 5:
        raise ValueError("b0_family_count needs a prime p >= 5")
    return 1 + gcd(4, p - 1) + gcd(3, p - 1)


def bagnera_count(p: int) -> int:
    """Bagnera's count of groups of order p^5 (formula value only)."""
    if not is_prime(p) or p == 2:
        raise ValueError(f"{p} is not an odd prime")
    return 2 * p + 61 + gcd(4, p - 1) + 2 * gcd(3, p - 1)


@dataclass(frozen=True)
class FamilySpec:
    family: str
    p: int
    r: int = 0

    def __post_init__(self):
        fam = self.family
        p, r = self.p, self.r
        if fam not in PAPER_TAGS + IMPOSTOR_TAGS:
            raise ValueError(f"unknown family {fam!r}")
        if not is_prime(p) or p == 2:
            raise ValueError(f"p = {p} is not an odd prime")
        if fam.startswith("G243") and p != 3:
            raise ValueError(f"{fam} is only defined for p = 3")
        if fam == "G2" and not 0 <= r <= c2(p):
            raise ValueError(f"G2 needs 0 <= r <= c2({p}) = {c2(p)}")
        if fam == "G3" and not 0 <= r <= c3(p):
            raise ValueError(f"G3 needs 0 <= r <= c3({p}) = {c3(p)}")
        if fam not in ("G2", "G3") and r != 0:
            raise ValueError(f"{fam} takes no parameter r")

    @property
    def label(self) -> str:
        if self.family in ("G2", "G3"):
            return f"{self.family}_r{self.r}(p={self.p})"
        if self.family.startswith("G243"):
            return f"G(243,{self.family[-2:]})"
        return f"{self.family}(p={self.p})"


def _vec(n, **exps):
    w = [0] * n
    for name, e in exps.items():
        w[int(name[1:]) - 1] = e
    return tuple(w)


def _maximal_class_5(p: int, powers: dict, name: str) -> PcPresentation:
    """Five generators with the shared commutator relations and given powers.

    ``powers`` maps a 1-based generator number to its power word as a dict
    like ``{"f5": 2}``.
    """
    n = 5
    conj = {
        (0, 1): _vec(n, f2=1, f3=1),  # f2^f1 = f2 [f2,f1] = f2 f3
        (0, 2): _vec(n, f3=1, f4=1),
        (0, 3): _vec(n, f4=1, f5=1),
        (1, 2): _vec(n, f3=1, f5=1),
    }
    pw = tuple(_vec(n, **powers.get(i + 1, {})) for i in range(n))
    return PcPresentation((p,) * n, pw, conj, name=name)


def build(spec: FamilySpec) -> PcPresentation:
    """Presentation of a family member (consistency is not checked here)."""
    p, r, fam = spec.p, spec.r, spec.family
    neg = p - 1  # exponent -1 for generators of relative order p
    if fam == "G243_28":
        powers = {2: {"f4": neg}, 3: {"f5": neg}}
    elif fam == "G243_29":
        powers = {1: {"f5": 1}, 2: {"f4": neg}, 3: {"f5": neg}}
    elif fam == "G243_30":
        powers = {1: {"f5": neg}, 2: {"f4": neg}, 3: {"f5": neg}}
    elif fam == "G1":
        powers = {}
    elif fam == "G2":
        powers = {1: {"f5": pow(smallest_primitive_root(p), r, p)}}
    elif fam == "G3":
        powers = {2: {"f5": pow(smallest_primitive_root(p), r, p)}}
    elif fam == "G28_IMPOSTOR":
        powers = {2: {"f4": neg}, 3: {"f5": neg}}
    elif fam == "G29_IMPOSTOR":
        powers = {1: {"f5": 1}, 2: {"f4": neg}, 3: {"f5": neg}}
    elif fam == "G30_IMPOSTOR":
        powers = {1: {"f5": neg}, 2: {"f4": neg}, 3: {"f5": neg}}
    else:  # pragma: no cover - FamilySpec validates the tag
        raise ValueError(fam)
    return _maximal_class_5(p, powers, spec.label)


def family_members(p: int) -> list[FamilySpec]:
    """The groups claimed to have nontrivial Bogomolov multiplier at p."""
    if p == 3:
        return [FamilySpec(t, 3) for t in ("G243_28", "G243_29", "G243_30")]
    if not is_prime(p) or p < 5:
        raise ValueError("family members are defined for p = 3 and primes p >= 5")
    out = [FamilySpec("G1", p)]
    out += [FamilySpec("G2", p, r) for r in range(c2(p) + 1)]
    out += [FamilySpec("G3", p, r) for r in range(c3(p) + 1)]
    return out


# ---------------------------------------------------------------------------
# control groups
# ---------------------------------------------------------------------------


def _factor(n: int) -> list[int]:
    out, k = [], 2
    while k * k <= n:
        while n % k == 0:
            out.append(k)
            n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def cyclic(m: int) -> PcPresentation:
    """C_m via the chain g_0^{p_0} = g_1, g_1^{p_1} = g_2, ..."""
    if m == 1:
        raise ValueError("use a presentation with at least one generator")
    ps = _factor(m)
    n = len(ps)
    powers = tuple(tuple(int(k == i + 1) for k in range(n)) for i in range(n))
    return PcPresentation(tuple(ps), powers, {}, name=f"C{m}")


def elementary_abelian(p: int, rank: int) -> PcPresentation:
    return PcPresentation((p,) * rank, (), {}, name=f"C{p}^{rank}")


def heisenberg(p: int) -> PcPresentation:
    """Order p^3, [g2,g1] = g3 central; exponent p for odd p (D4 at p = 2)."""
    return PcPresentation((p, p, p), (), {(0, 1): (0, 1, 1)}, name=f"Heis({p})")


def modular(p: int) -> PcPresentation:
    """<a, b | a^{p^2} = b^p = 1, a^b = a^{1+p}> with generators b, a, a^p."""
    return PcPresentation((p, p, p), ((0, 0, 0), (0, 0, 1), (0, 0, 0)), {(0, 1): (0, 1, 1)}, name=f"M({p}^3)")


def dihedral(order: int) -> PcPresentation:
    """Dihedral group of 2-power order >= 8 (generators s, r, r^2, ...)."""
    k = order.bit_length() - 1
    if order != 2**k or k < 3:
        raise ValueError("dihedral(order) needs a power of two >= 8")
    return _dihedral_like(k, quaternion=False)


def generalized_quaternion(order: int) -> PcPresentation:
    k = order.bit_length() - 1
    if order != 2**k or k < 3:
        raise ValueError("generalized_quaternion(order) needs a power of two >= 8")
    return _dihedral_like(k, quaternion=True)


def _dihedral_like(k: int, quaternion: bool) -> PcPresentation:
    # g0 = s, g_i = r^(2^(i-1)) for i = 1..k-1; r has order 2^(k-1)
    n = k
    powers = [[0] * n for _ in range(n)]
    for i in range(1, n - 1):
        powers[i][i + 1] = 1
    if quaternion:
        powers[0][n - 1] = 1  # s^2 = r^(2^(k-2)), the central involution
    conj = {}
    m = 2 ** (k - 1)
    for i in range(1, n):
        # (r^(2^(i-1)))^s = r^(-2^(i-1)) = r^(m - 2^(i-1))
        e = (m - 2 ** (i - 1)) % m
        w = [0] * n
        for j in range(1, n):
            w[j] = (e >> (j - 1)) & 1
        conj[(0, i)] = tuple(w)
    name = ("Q" if quaternion else "D") + str(2**k)
    return PcPresentation((2,) * n, tuple(tuple(w) for w in powers), conj, name=name)


def symmetric3() -> PcPresentation:
    return PcPresentation((2, 3), (), {(0, 1): (0, 2)}, name="S3")


def dicyclic12() -> PcPresentation:
    """C3 x| C4: g0^2 = g1, g2^g0 = g2^-1."""
    return PcPresentation((2, 2, 3), ((0, 1, 0), (0, 0, 0), (0, 0, 0)), {(0, 2): (0, 0, 2)}, name="Dic12")


def maximal_class_4(p: int) -> PcPresentation:
    """Order p^4: [f2,f1] = f3, [f3,f1] = f4, all f_i^p = 1."""
    conj = {(0, 1): (0, 1, 1, 0), (0, 2): (0, 0, 1, 1)}
    return PcPresentation((p,) * 4, (), conj, name=f"MaxClass4({p})")


def controls(p: int = 3) -> list[PcPresentation]:
    """Groups expected to have trivial Bogomolov multiplier.

    Includes small 2-groups and non-p-groups, and groups of order p, ..., p^4
    for the given odd prime.
    """
    out = [
        cyclic(2),
        cyclic(4),
        cyclic(6),
        cyclic(8),
        cyclic(12),
        elementary_abelian(2, 2),
        elementary_abelian(2, 3),
        direct_product(cyclic(4), cyclic(2)),
        heisenberg(2),  # D8 of order 8 in this generator order
        dihedral(8),
        generalized_quaternion(8),
        dihedral(16),
        generalized_quaternion(16),
        direct_product(dihedral(8), cyclic(2)),
        symmetric3(),
        dicyclic12(),
        cyclic(p),
        cyclic(p * p),
        elementary_abelian(p, 2),
        elementary_abelian(p, 3),
        heisenberg(p),
        modular(p),
        elementary_abelian(p, 4),
        direct_product(heisenberg(p), cyclic(p)),
        direct_product(modular(p), cyclic(p)),
        direct_product(cyclic(p * p), cyclic(p * p)),
        maximal_class_4(p),
    ]
    return out


def order_p5_controls(p: int) -> list[PcPresentation]:
    """Order-p^5 groups with B0 = 0 used as negatives next to the families."""
    return [
        elementary_abelian(p, 5),
        direct_product(heisenberg(p), elementary_abelian(p, 2)),
        direct_product(maximal_class_4(p), cyclic(p)),
    ]


def oracle_corpus(max_order: int = 64) -> list[PcPresentation]:
    """Distinct small controls plus a few extra groups, all of order <= max_order."""
    extra = [
        dihedral(32),
        generalized_quaternion(32),
        direct_product(generalized_quaternion(8), cyclic(4)),
        direct_product(heisenberg(3), cyclic(2)),
        direct_product(dihedral(16), cyclic(4)),
    ]
    out, seen = [], set()
    for P in controls(3) + controls(5) + extra:
        if P.nominal_order <= max_order and P.fingerprint not in seen:
            seen.add(P.fingerprint)
            out.append(P)
    return out


def expected_consistency(spec: FamilySpec) -> tuple[bool, int]:
    """(consistent, order) that the literature claims for this presentation.

    G1, G2, G3 at p = 3 and the impostors at p >= 5 are not groups of order
    p^5; the impostors collapse to order p^4.
    """
    p = spec.p
    if spec.family in IMPOSTOR_TAGS:
        return (True, p**5) if p == 3 else (False, p**4)
    if spec.family in ("G1", "G2", "G3") and p == 3:
        return False, 0  # order after collapse is not claimed
    return True, p**5

"""Monomial matrices over ``p``-power roots of unity and a non-split subgroup of PSU(2p).

A monomial matrix is stored as a permutation together with exponents: row
``i`` has the single entry ``zeta^exps[i]`` in column ``perm[i]``, where
``zeta`` is a primitive ``p^K``-th root of unity.  Everything is exact.

The demonstration: with ``A = diag(1, w, ..., w^(p-1))`` (``w = zeta^(p^(K-1))``,
a primitive ``p``-th root) and the cyclic shift ``B``, the elements
``X = A1 B2`` and ``Y = B1 A2`` of ``SU(2p)`` commute modulo the torus
``{diag(uI, u^-1 I)}`` but every pair of torus translates ``XU, YV`` has the
same nontrivial commutator ``diag(wI, w^-1 I)`` in ``PSU(2p)``.  So the
quotient map admits no section over ``<x, y>``, which the module certifies
both by exhaustive search and as a nonzero extension class.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .abgrp import PresentedAbGroup
from .cobar import CohomologyClass
from .errors import HypothesisError
from .padic import is_prime


@dataclass(frozen=True)
class MonomialMatrix:
    perm: tuple[int, ...]
    exps: tuple[int, ...]
    p: int
    K: int

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))) or len(self.exps) != len(self.perm):
            raise ValueError("perm must be a permutation matching the exponent vector")
        mod = self.p ** self.K
        object.__setattr__(self, "exps", tuple(e % mod for e in self.exps))

    @property
    def n(self) -> int:
        return len(self.perm)

    @property
    def modulus(self) -> int:
        return self.p ** self.K

    @classmethod
    def identity(cls, n: int, p: int, K: int) -> MonomialMatrix:
        return cls(tuple(range(n)), (0,) * n, p, K)

    @classmethod
    def diagonal(cls, exps: Sequence[int], p: int, K: int) -> MonomialMatrix:
        return cls(tuple(range(len(exps))), tuple(exps), p, K)

    @classmethod
    def scalar(cls, n: int, e: int, p: int, K: int) -> MonomialMatrix:
        return cls.diagonal([e] * n, p, K)

    def __matmul__(self, other: MonomialMatrix) -> MonomialMatrix:
        if self.n != other.n or (self.p, self.K) != (other.p, other.K):
            raise ValueError("incompatible monomial matrices")
        perm = tuple(other.perm[j] for j in self.perm)
        exps = tuple(self.exps[i] + other.exps[self.perm[i]] for i in range(self.n))
        return MonomialMatrix(perm, exps, self.p, self.K)

    def inverse(self) -> MonomialMatrix:
        perm = [0] * self.n
        exps = [0] * self.n
        for i, j in enumerate(self.perm):
            perm[j] = i
            exps[j] = -self.exps[i]
        return MonomialMatrix(tuple(perm), tuple(exps), self.p, self.K)

    def __pow__(self, m: int) -> MonomialMatrix:
        base = self if m >= 0 else self.inverse()
        out = MonomialMatrix.identity(self.n, self.p, self.K)
        for _ in range(abs(m)):
            out = out @ base
        return out

    def commutator(self, other: MonomialMatrix) -> MonomialMatrix:
        """``self other self^-1 other^-1``."""
        return self @ other @ self.inverse() @ other.inverse()

    def permutation_sign(self) -> int:
        seen, sign = set(), 1
        for i in range(self.n):
            if i in seen:
                continue
            j, length = i, 0
            while j not in seen:
                seen.add(j)
                j = self.perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
        return sign

    def det(self) -> tuple[int, int]:
        """``(sign, e)`` with determinant ``sign * zeta^e``."""
        return self.permutation_sign(), sum(self.exps) % self.modulus

    def has_det_one(self) -> bool:
        return self.det() == (1, 0)

    def is_scalar(self) -> bool:
        return self.perm == tuple(range(self.n)) and len(set(self.exps)) == 1

    def apply(self, j: int) -> tuple[int, int]:
        """``M e_j = zeta^e e_i``, returned as ``(i, e)``."""
        i = self.perm.index(j)
        return i, self.exps[i]

    def dense(self) -> list[list[int | None]]:
        """Exponent matrix with ``None`` for zero entries (for display)."""
        out: list[list[int | None]] = [[None] * self.n for _ in range(self.n)]
        for i, j in enumerate(self.perm):
            out[i][j] = self.exps[i]
        return out

    def to_json(self) -> dict:
        return {"perm": list(self.perm), "exps": list(self.exps), "p": self.p, "K": self.K}


def _check_odd_prime(p: int, K: int) -> None:
    if p == 2 or not is_prime(p):
        raise HypothesisError("an odd prime p is required")
    if K < 1:
        raise HypothesisError("precision K must be at least 1")


def primitive_p_exponent(p: int, K: int) -> int:
    """Exponent of a primitive ``p``-th root of unity as a power of ``zeta_{p^K}``."""
    return p ** (K - 1)


def build_A(p: int, K: int) -> MonomialMatrix:
    """``diag(1, w, ..., w^(p-1))`` with ``w`` a primitive ``p``-th root of unity."""
    _check_odd_prime(p, K)
    w = primitive_p_exponent(p, K)
    return MonomialMatrix.diagonal([i * w for i in range(p)], p, K)


def build_B(p: int, K: int) -> MonomialMatrix:
    """The cyclic shift ``e_i -> e_(i+1)``, so that ``A B A^-1 B^-1 = w I``."""
    _check_odd_prime(p, K)
    return MonomialMatrix(tuple((i - 1) % p for i in range(p)), (0,) * p, p, K)


def tensor_slot(M: MonomialMatrix, slot: int, factors: int) -> MonomialMatrix:
    """``I ⊗ ... ⊗ M ⊗ ... ⊗ I`` with ``M`` in position ``slot`` (slot 0 most significant)."""
    if not 0 <= slot < factors:
        raise ValueError(f"slot {slot} out of range for {factors} factors")
    n = M.n
    perm, exps = [], []
    for idx in itertools.product(range(n), repeat=factors):
        a = idx[slot]
        target = list(idx)
        target[slot] = M.perm[a]
        perm.append(_flat(target, n))
        exps.append(M.exps[a])
    return MonomialMatrix(tuple(perm), tuple(exps), M.p, M.K)


def _flat(idx: Sequence[int], n: int) -> int:
    out = 0
    for a in idx:
        out = out * n + a
    return out


def block_diag(M: MonomialMatrix, N: MonomialMatrix) -> MonomialMatrix:
    m = M.n
    return MonomialMatrix(M.perm + tuple(m + j for j in N.perm), M.exps + N.exps, M.p, M.K)


@dataclass(frozen=True)
class QGenerators:
    """Generators of the monomial model of ``Q`` inside ``SU(2p)``."""

    p: int
    K: int
    A1: MonomialMatrix
    A2: MonomialMatrix
    B1: MonomialMatrix
    B2: MonomialMatrix
    scalar_pairs: tuple[tuple[int, int], ...]

    def scalar(self, a: int, b: int) -> MonomialMatrix:
        """``diag(zeta^a I, zeta^b I)``."""
        return MonomialMatrix.diagonal([a] * self.p + [b] * self.p, self.p, self.K)

    def torus(self, a: int) -> MonomialMatrix:
        """``diag(u I, u^-1 I)`` with ``u = zeta^a``."""
        return self.scalar(a, -a)

    @property
    def generators(self) -> list[MonomialMatrix]:
        return [self.A1, self.A2, self.B1, self.B2] + [self.scalar(a, b) for a, b in self.scalar_pairs]


def build_Q(p: int, K: int) -> QGenerators:
    """Block placements of ``A`` and ``B`` plus the determinant-one block scalars at level ``K``."""
    A, B = build_A(p, K), build_B(p, K)
    I = MonomialMatrix.identity(p, p, K)
    mod = p ** K
    pairs = tuple((a, b) for a in range(mod) for b in range(mod) if (p * (a + b)) % mod == 0)
    Q = QGenerators(p, K, block_diag(A, I), block_diag(I, A), block_diag(B, I), block_diag(I, B),
                    pairs)
    for g in Q.generators:
        if not g.has_det_one():
            raise AssertionError("generator outside SU(2p)")
    return Q


@dataclass(frozen=True)
class PSUElement:
    """A monomial matrix modulo the scalars ``<w I>``, ``w`` a primitive ``p``-th root."""

    matrix: MonomialMatrix

    def __post_init__(self):
        M = self.matrix
        step = primitive_p_exponent(M.p, M.K)
        shift = (M.exps[0] // step) * step
        object.__setattr__(self, "matrix", MonomialMatrix(M.perm, tuple(e - shift for e in M.exps),
                                                          M.p, M.K))

    def __mul__(self, other: PSUElement) -> PSUElement:
        return PSUElement(self.matrix @ other.matrix)

    def inverse(self) -> PSUElement:
        return PSUElement(self.matrix.inverse())

    def commutator(self, other: PSUElement) -> PSUElement:
        return PSUElement(self.matrix.commutator(other.matrix))

    def is_identity(self) -> bool:
        return self.matrix == MonomialMatrix.identity(self.matrix.n, self.matrix.p, self.matrix.K)

    def to_json(self) -> dict:
        return self.matrix.to_json()


def project_psu(m: MonomialMatrix) -> PSUElement:
    return PSUElement(m)


def xy_elements(p: int, K: int) -> tuple[MonomialMatrix, MonomialMatrix]:
    """``X = A1 B2`` and ``Y = B1 A2``."""
    Q = build_Q(p, K)
    return Q.A1 @ Q.B2, Q.B1 @ Q.A2


def xy_commutator(p: int, K: int) -> PSUElement:
    X, Y = xy_elements(p, K)
    c = project_psu(X).commutator(project_psu(Y))
    if c.is_identity():
        raise AssertionError("commutator of X and Y is trivial")
    return c


def expected_commutator(p: int, K: int) -> PSUElement:
    """``diag(w I, w^-1 I)``."""
    w = primitive_p_exponent(p, K)
    return project_psu(build_Q(p, K).torus(w))


def torus_elements(p: int, K: int) -> list[PSUElement]:
    """The level-``K`` torus ``{diag(uI, u^-1 I)}`` of ``R``."""
    Q = build_Q(p, K)
    return [project_psu(Q.torus(a)) for a in range(p ** K)]


def no_section_check(p: int, K: int, X: MonomialMatrix | None = None,
                     Y: MonomialMatrix | None = None) -> dict:
    """Commutators ``[X U, Y V]`` in ``R`` for every pair of torus elements ``U, V``.

    ``all_nontrivial`` certifies (at level ``K``) that no lift of ``<x, y>``
    through the torus quotient can commute, hence no section exists.
    """
    if X is None or Y is None:
        X, Y = xy_elements(p, K)
    x, y = project_psu(X), project_psu(Y)
    base = x.commutator(y)
    T = torus_elements(p, K)
    checked, nontrivial, equal = 0, 0, 0
    for U, V in itertools.product(T, repeat=2):
        c = (x * U).commutator(y * V)
        checked += 1
        nontrivial += not c.is_identity()
        equal += c == base
    return {
        "p": p, "K": K,
        "checked_pairs": checked,
        "all_nontrivial": nontrivial == checked,
        "all_equal_to_xy_commutator": equal == checked,
        "xy_commutator": base.to_json(),
    }


def generate(gens: Iterable[PSUElement]) -> list[PSUElement]:
    """Closure of ``gens`` under multiplication (a finite group)."""
    gens = list(gens)
    n = gens[0].matrix.n
    p, K = gens[0].matrix.p, gens[0].matrix.K
    e = PSUElement(MonomialMatrix.identity(n, p, K))
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = a * g
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return sorted(seen, key=lambda g: (g.matrix.perm, g.matrix.exps))


def _restricted_extension(p: int, K: int, X: MonomialMatrix, Y: MonomialMatrix):
    from .fixtures import cyclic_table, group_extension, product_table
    T = torus_elements(p, K)
    x, y = project_psu(X), project_psu(Y)
    elems = generate(T + [x, y])
    index = {g: i for i, g in enumerate(elems)}
    if len(elems) != p ** K * p * p:
        raise HypothesisError("the torus and <x, y> do not give an extension of (Z/p)^2")
    table = [[index[a * b] for b in elems] for a in elems]
    base = product_table(cyclic_table(p), cyclic_table(p))
    proj = [0] * len(elems)
    torus_set = set(T)
    for a, b in itertools.product(range(p), repeat=2):
        rep = _power(x, a) * _power(y, b)
        for t in T:
            proj[index[t * rep]] = a * p + b
    embed = {(a,): index[T[a]] for a in range(p ** K)}
    if set(embed.values()) != {index[t] for t in torus_set}:
        raise AssertionError("torus embedding is not onto the torus")
    return group_extension(table, base, proj, PresentedAbGroup.cyclic(p ** K), embed)


def _power(g: PSUElement, m: int) -> PSUElement:
    out = PSUElement(MonomialMatrix.identity(g.matrix.n, g.matrix.p, g.matrix.K))
    for _ in range(m):
        out = out * g
    return out


def restricted_class_obstruction(p: int, K: int, X: MonomialMatrix | None = None,
                                 Y: MonomialMatrix | None = None) -> CohomologyClass:
    """Class in ``H^2((Z/p)^2, Z/p^K)`` of the torus extension over ``<x, y>``."""
    if X is None or Y is None:
        X, Y = xy_elements(p, K)
    from .extension import extension_class
    return extension_class(_restricted_extension(p, K, X, Y))


def split_control(p: int, K: int) -> tuple[MonomialMatrix, MonomialMatrix]:
    """``X = A1``, ``Y = A2``: commuting lifts, so the extension splits."""
    Q = build_Q(p, K)
    return Q.A1, Q.A2


def abelian_invariants_from_orders(orders: Sequence[int], p: int) -> tuple[int, ...]:
    """Invariants of a finite abelian ``p``-group from the multiset of its element orders."""
    total = len(orders)
    # |G[p^j]| for j = 0, 1, ...
    counts = []
    j = 0
    while True:
        c = sum(1 for o in orders if (p ** j) % o == 0)
        counts.append(c)
        if c == total:
            break
        j += 1
    # number of cyclic factors of order >= p^j is log_p(|G[p^j]| / |G[p^(j-1)]|)
    ge = []
    for j in range(1, len(counts)):
        ratio, m = counts[j] // counts[j - 1], 0
        while ratio > 1:
            ratio //= p
            m += 1
        ge.append(m)
    out = []
    for j, m in enumerate(ge, start=1):
        nxt = ge[j] if j < len(ge) else 0
        out += [p ** j] * (m - nxt)
    return tuple(sorted(out))


def gamma_quotient_structure(p: int, k: int, K: int) -> dict:
    """Structure of the group generated by ``A_i, B_i`` (``i < k``) on ``(C^p)^⊗k`` modulo scalars."""
    _check_odd_prime(p, K)
    A, B = build_A(p, K), build_B(p, K)
    gens = [tensor_slot(A, i, k) for i in range(k)] + [tensor_slot(B, i, k) for i in range(k)]
    n = p ** k
    els = {MonomialMatrix.identity(n, p, K)}
    frontier = list(els)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = a @ g
                if b not in els:
                    els.add(b)
                    nxt.append(b)
        frontier = nxt

    def mod_scalars(m):
        return MonomialMatrix(m.perm, tuple(e - m.exps[0] for e in m.exps), p, K)
    cosets = {mod_scalars(m) for m in els}
    scalars = sorted({m.exps[0] for m in els if m.is_scalar()})
    coset_list = sorted(cosets, key=lambda m: (m.perm, m.exps))
    abelian = all(mod_scalars(a @ b) == mod_scalars(b @ a) for a in coset_list for b in coset_list)
    orders = []
    for c in coset_list:
        x, o = c, 1
        while not x.is_scalar():
            x, o = mod_scalars(x @ c), o + 1
        orders.append(o)
    inv = abelian_invariants_from_orders(orders, p) if abelian else ()
    return {"p": p, "factors": k, "K": K, "group_order": len(els),
            "scalar_subgroup_order": len(scalars), "quotient_order": len(coset_list),
            "quotient_abelian": abelian, "quotient_invariants": list(inv),
            "elementary_abelian": abelian and all(d == p for d in inv)}


def psu_demo(p: int, K: int) -> dict:
    """The full report: relations, commutator, exhaustive no-section check and class."""
    A, B = build_A(p, K), build_B(p, K)
    w = primitive_p_exponent(p, K)
    Q = build_Q(p, K)
    relations = {
        "AB_commutator_is_wI": A.commutator(B) == MonomialMatrix.scalar(p, w, p, K),
        "B_order_p": (B ** p) == MonomialMatrix.identity(p, p, K),
        "det_A_one": A.has_det_one(), "det_B_one": B.has_det_one(),
        "block_commutator": Q.A1.commutator(Q.B1) == Q.scalar(w, 0),
    }
    relations.update(tensor_relations(p, K, 2))
    report = no_section_check(p, K)
    cls = restricted_class_obstruction(p, K)
    control = no_section_check(p, K, *split_control(p, K))
    control_cls = restricted_class_obstruction(p, K, *split_control(p, K))
    return {
        "p": p, "K": K,
        "relations": relations,
        "xy_commutator_matches_diag": xy_commutator(p, K) == expected_commutator(p, K),
        "no_section": report,
        "restricted_class": {"zero": cls.is_zero(), "order": cls.order(),
                             "group_invariants": list(cls.group.invariants)},
        "split_control": {"all_nontrivial": control["all_nontrivial"],
                          "class_zero": control_cls.is_zero()},
        "quotient_structure": gamma_quotient_structure(p, 1, K),
    }


def tensor_relations(p: int, K: int, factors: int) -> dict:
    """All commutator relations among the tensor placements ``A_i, B_i``."""
    A, B = build_A(p, K), build_B(p, K)
    n = p ** factors
    I = MonomialMatrix.identity(n, p, K)
    wI = MonomialMatrix.scalar(n, primitive_p_exponent(p, K), p, K)
    As = [tensor_slot(A, i, factors) for i in range(factors)]
    Bs = [tensor_slot(B, i, factors) for i in range(factors)]
    ok_aa = all(a.commutator(b) == I for a in As for b in As)
    ok_bb = all(a.commutator(b) == I for a in Bs for b in Bs)
    ok_ab = all(As[i].commutator(Bs[j]) == (wI if i == j else I)
                for i in range(factors) for j in range(factors))
    return {"A_commute": ok_aa, "B_commute": ok_bb, "AB_relations": ok_ab}

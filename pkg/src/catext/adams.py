"""Truncated p-toral groups, normal Adams automorphisms and related cohomology checks.

A p-toral datum at level ``k`` is a finite group ``pi`` acting on the torus
``T_k = (Z/p^k)^r`` together with a regular 2-cocycle ``coc``.  The group
``S`` has elements ``(t, x)`` and product

    (t, x)(t', x') = (t + x·t' + coc(x, x'), x x').

The map ``(t, x) -> (zeta t + d(x), x)`` is an automorphism exactly when
``d(x) + x·d(x') - d(x x') = (zeta - 1) coc(x, x')``, which makes every
question about normal Adams automorphisms a linear problem over the cobar
complex of ``B(pi)``.

Cobar chains are read as group elements applied right to left: the chain
``(c0, c1)`` carries the value of a group 2-cochain at ``(c1, c0)``.  In
degree 1 the two differentials then agree on the nose.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import prod
from typing import Callable, Sequence

from .abgrp import AbHom, PresentedAbGroup, Vector, smith_normal_form
from .cobar import Cochain, CohomologyClass, cohomology, complex_of
from .errors import HypothesisError, ResourceRefusal, max_cells
from .fincat import AbFunctor, NatTrans, Violation, one_object_cat
from .fixtures import group_inverse, identity_of
from .padic import UnitModPk, gamma_membership, units

Matrix = list[list[int]]
Table = list[list[int]]


def _matvec(M: Matrix, v: Sequence[int], mod: int) -> tuple[int, ...]:
    return tuple(sum(a * b for a, b in zip(row, v)) % mod for row in M)


def _matmul(A: Matrix, B: Matrix, mod: int) -> Matrix:
    return [[sum(A[i][l] * B[l][j] for l in range(len(B))) % mod for j in range(len(B[0]))]
            for i in range(len(A))]


def _eye(r: int) -> Matrix:
    return [[int(i == j) for j in range(r)] for i in range(r)]


# ---------------------------------------------------------------------------
# p-toral data


class PToralData:
    """``(p, k, rank, pi, action, coc)``; ``action[x]`` is an ``r x r`` integer matrix."""

    def __init__(self, p: int, k: int, rank: int, pi: Table, action: Sequence[Matrix],
                 coc: dict[tuple[int, int], Sequence[int]] | None = None):
        self.p, self.k, self.rank = p, k, rank
        self.pi = [list(row) for row in pi]
        self.mod = p ** k
        self.action = [[[a % self.mod for a in row] for row in M] for M in action]
        coc = coc or {}
        n = len(self.pi)
        self.coc = {(x, y): tuple(a % self.mod for a in coc.get((x, y), (0,) * rank))
                    for x in range(n) for y in range(n)}

    # group structure ----------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.pi) * self.mod ** self.rank

    @cached_property
    def torus_elements(self) -> list[tuple[int, ...]]:
        return [tuple(t) for t in itertools.product(range(self.mod), repeat=self.rank)]

    def encode(self, t: Sequence[int], x: int) -> int:
        i = 0
        for a in t:
            i = i * self.mod + a % self.mod
        return x * self.mod ** self.rank + i

    def decode(self, i: int) -> tuple[tuple[int, ...], int]:
        x, rest = divmod(i, self.mod ** self.rank)
        t = []
        for _ in range(self.rank):
            rest, a = divmod(rest, self.mod)
            t.append(a)
        return tuple(reversed(t)), x

    def act(self, x: int, t: Sequence[int]) -> tuple[int, ...]:
        return _matvec(self.action[x], t, self.mod)

    def mul(self, a: tuple, b: tuple) -> tuple:
        (t, x), (s, y) = a, b
        xs = self.act(x, s)
        c = self.coc[(x, y)]
        return tuple((t[i] + xs[i] + c[i]) % self.mod for i in range(self.rank)), self.pi[x][y]

    @cached_property
    def table(self) -> Table:
        n = self.order
        els = [self.decode(i) for i in range(n)]
        return [[self.encode(*self.mul(a, b)) for b in els] for a in els]

    @cached_property
    def pi_identity(self) -> int:
        return identity_of(self.pi)

    # cobar view -----------------------------------------------------------
    @cached_property
    def torus_group(self) -> PresentedAbGroup:
        return PresentedAbGroup.from_invariants([self.mod] * self.rank)

    @cached_property
    def coeff(self) -> AbFunctor:
        C = one_object_cat(self.pi)
        T = self.torus_group
        return AbFunctor(C, {"*": T}, [AbHom(T, T, M, check=False) for M in self.action])

    def group_2cochain(self, values: Callable[[int, int], Sequence[int]]) -> Cochain:
        """The cobar 2-cochain of a group 2-cochain ``(x, y) -> values(x, y)``."""
        return Cochain.from_function(self.coeff, 2, lambda ch: values(ch[1], ch[0]))

    @cached_property
    def coc_cochain(self) -> Cochain:
        return self.group_2cochain(lambda x, y: self.coc[(x, y)])

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "rank": self.rank, "pi": self.pi,
                "action": {str(x): M for x, M in enumerate(self.action)},
                "coc": {f"{x},{y}": list(v) for (x, y), v in self.coc.items() if any(v)}}

    @classmethod
    def from_json(cls, data: dict) -> PToralData:
        pi = data["pi"]
        act = data.get("action") or {}
        r = int(data["rank"])
        action = [act.get(str(x), _eye(r)) for x in range(len(pi))]
        coc = {}
        for key, v in (data.get("coc") or {}).items():
            x, y = (int(a) for a in key.strip("[]() ").split(","))
            coc[(x, y)] = tuple(int(a) for a in v)
        return cls(int(data["p"]), int(data["k"]), r, pi, action, coc)


def ptoral_from_table(table: Table, p: int, k: int, torus_basis: Sequence[int]) -> PToralData:
    """Identify ``T`` as the subgroup generated by ``torus_basis`` (a basis of ``(Z/p^k)^r``).

    The quotient uses least-index coset representatives (the identity for the
    identity coset), and the cocycle is read off as ``s(x)s(y)s(xy)^-1``.
    """
    n = len(table)
    e = identity_of(table)
    mod = p ** k
    r = len(torus_basis)

    def power(g, m):
        x = e
        for _ in range(m):
            x = table[x][g]
        return x
    coords: dict[int, tuple[int, ...]] = {}
    for t in itertools.product(range(mod), repeat=r):
        x = e
        for g, m in zip(torus_basis, t):
            x = table[x][power(g, m)]
        if x in coords:
            raise HypothesisError("torus generators are not a basis of (Z/p^k)^r")
        coords[x] = t
    members = set(coords)
    if any(table[a][b] not in members for a in members for b in members):
        raise HypothesisError("torus is not a subgroup")
    if any(table[a][b] != table[b][a] for a in members for b in members):
        raise HypothesisError("torus is not abelian")
    inv = [group_inverse(table, g) for g in range(n)]
    reps, coset_of = [], {}
    for g in [e] + [g for g in range(n) if g != e]:
        if g in coset_of:
            continue
        reps.append(g)
        for t in members:
            coset_of[table[t][g]] = len(reps) - 1
    for g in range(n):
        for t in members:
            if table[table[g][t]][inv[g]] not in members:
                raise HypothesisError("torus is not normal")
    m = len(reps)
    pi = [[coset_of[table[reps[x]][reps[y]]] for y in range(m)] for x in range(m)]
    action = []
    for s in reps:
        cols = [coords[table[table[s][b]][inv[s]]] for b in torus_basis]
        action.append([[c[i] for c in cols] for i in range(r)])
    coc = {}
    for x, y in itertools.product(range(m), repeat=2):
        xy = pi[x][y]
        coc[(x, y)] = coords[table[table[reps[x]][reps[y]]][inv[reps[xy]]]]
    return PToralData(p, k, r, pi, action, coc)


def validate_ptoral(S: PToralData) -> list[Violation]:
    """Action homomorphism, cocycle regularity and the cocycle identity, checked exhaustively."""
    out: list[Violation] = []
    n = len(S.pi)
    try:
        one_object_cat(S.pi)
    except ValueError as exc:
        return [Violation("pi", (), str(exc))]
    e = S.pi_identity
    if len(S.action) != n:
        return [Violation("action", (), "one matrix per element of pi is required")]
    if S.action[e] != _eye(S.rank):
        out.append(Violation("action-identity", (e,)))
    for x, y in itertools.product(range(n), repeat=2):
        if _matmul(S.action[x], S.action[y], S.mod) != S.action[S.pi[x][y]]:
            out.append(Violation("action-homomorphism", (x, y)))
    for x in range(n):
        if any(S.coc[(e, x)]) or any(S.coc[(x, e)]):
            out.append(Violation("regularity", (x,), "coc(1, x) and coc(x, 1) must vanish"))
    for x, y, z in itertools.product(range(n), repeat=3):
        a = S.act(x, S.coc[(y, z)])
        lhs = [(a[i] - S.coc[(S.pi[x][y], z)][i] + S.coc[(x, S.pi[y][z])][i]
                - S.coc[(x, y)][i]) % S.mod for i in range(S.rank)]
        if any(lhs):
            out.append(Violation("cocycle", (x, y, z), "group 2-cocycle identity fails"))
    return out


def extension_class_order(S: PToralData) -> tuple[int, int]:
    """``(p^m, m)`` where ``p^m`` is the order of ``[coc]`` in ``H^2(pi, T_k)``."""
    n = CohomologyClass(S.coc_cochain).order()
    m = 0
    while S.p ** m < n:
        m += 1
    if S.p ** m != n:
        raise HypothesisError(f"class order {n} is not a power of {S.p}")
    return n, m


# ---------------------------------------------------------------------------
# Adams automorphisms


@dataclass(frozen=True)
class AdamsAut:
    """``(t, x) -> (zeta t + d(x), x)``; ``d`` lists one torus vector per element of pi."""

    host: PToralData = field(compare=False, repr=False)
    zeta: UnitModPk
    d: tuple[tuple[int, ...], ...]

    def __call__(self, elem: tuple) -> tuple:
        t, x = elem
        z = self.zeta.residue
        S = self.host
        return tuple((z * t[i] + self.d[x][i]) % S.mod for i in range(S.rank)), x

    @cached_property
    def permutation(self) -> tuple[int, ...]:
        S = self.host
        return tuple(S.encode(*self(S.decode(i))) for i in range(S.order))

    def compose(self, other: AdamsAut) -> AdamsAut:
        """``self after other``: degree ``zeta zeta'`` and ``d = zeta d' + d``."""
        S = self.host
        z = self.zeta.residue
        d = tuple(tuple((z * a + b) % S.mod for a, b in zip(other.d[x], self.d[x]))
                  for x in range(len(S.pi)))
        return AdamsAut(S, self.zeta * other.zeta, d)

    def power(self, n: int) -> AdamsAut:
        S = self.host
        out = AdamsAut(S, UnitModPk(S.p, S.k, 1), tuple((0,) * S.rank for _ in S.pi))
        for _ in range(n):
            out = self.compose(out)
        return out

    def is_valid(self) -> bool:
        S = self.host
        z = self.zeta.residue
        for x, y in itertools.product(range(len(S.pi)), repeat=2):
            lhs = [(self.d[x][i] + S.act(x, self.d[y])[i] - self.d[S.pi[x][y]][i]) % S.mod
                   for i in range(S.rank)]
            rhs = [((z - 1) * S.coc[(x, y)][i]) % S.mod for i in range(S.rank)]
            if lhs != rhs:
                return False
        return True

    def to_json(self) -> dict:
        return {"zeta": self.zeta.to_json(), "d": [list(v) for v in self.d]}


def _unit(S: PToralData, zeta: UnitModPk | int) -> UnitModPk:
    if isinstance(zeta, int):
        return UnitModPk(S.p, S.k, zeta)
    if (zeta.p, zeta.k) != (S.p, S.k):
        raise HypothesisError("degree must live at the datum's prime and level")
    return zeta


def _cochain_to_d(S: PToralData, u: Cochain) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(u[(x,)]) for x in range(len(S.pi)))


def adams_of_degree(S: PToralData, zeta: UnitModPk | int) -> AdamsAut | None:
    """A normal Adams automorphism of degree ``zeta``, or None.

    It exists iff ``(zeta - 1)[coc] = 0``; ``d`` is the canonical solver witness.
    """
    zeta = _unit(S, zeta)
    target = S.coc_cochain.scale(zeta.residue - 1)
    u = complex_of(S.coeff).delta(1).solve(target.flat())
    if u is None:
        return None
    return AdamsAut(S, zeta, _cochain_to_d(S, Cochain.from_flat(S.coeff, 1, u)))


def z1_elements(S: PToralData) -> list[tuple[tuple[int, ...], ...]]:
    """All crossed homomorphisms ``pi -> T_k`` (the 1-cocycles)."""
    K, inc = complex_of(S.coeff).delta(1).kernel()
    out = set()
    for v in K.elements():
        u = Cochain.from_flat(S.coeff, 1, inc(v))
        out.add(_cochain_to_d(S, u))
    return sorted(out)


DEFAULT_AD_BOUND = 200_000


def enumerate_ad(S: PToralData, bound: int = DEFAULT_AD_BOUND) -> list[AdamsAut]:
    """Every normal Adams automorphism, ordered by degree residue then ``d``."""
    n_units = len(units(S.p, S.k))
    estimate = n_units * S.mod ** (S.rank * len(S.pi))
    if estimate > bound:
        raise ResourceRefusal("Adams automorphism enumeration", estimate, bound)
    Z1 = z1_elements(S)
    out = []
    for zeta in units(S.p, S.k):
        base = adams_of_degree(S, zeta)
        if base is None:
            continue
        for z in Z1:
            d = tuple(tuple((a + b) % S.mod for a, b in zip(base.d[x], z[x]))
                      for x in range(len(S.pi)))
            out.append(AdamsAut(S, zeta, d))
    return sorted(out, key=lambda a: (a.zeta.residue, a.d))


def aut_T(S: PToralData) -> list[AdamsAut]:
    """Conjugations by torus elements: ``d_t(x) = t - x·t`` with degree 1."""
    one = UnitModPk(S.p, S.k, 1)
    ds = set()
    for t in S.torus_elements:
        ds.add(tuple(tuple((t[i] - S.act(x, t)[i]) % S.mod for i in range(S.rank))
                     for x in range(len(S.pi))))
    return [AdamsAut(S, one, d) for d in sorted(ds)]


def degree_image_given_auts(S: PToralData, auts: Sequence[Sequence[int]]) -> list[UnitModPk]:
    """Degrees of the normal Adams automorphisms among ``auts``, closed under products.

    Each entry of ``auts`` is a permutation of the element indices of ``S``.
    """
    table = S.table
    n = S.order
    degrees: set[UnitModPk] = set()
    e_pi = S.pi_identity
    for f in auts:
        f = list(f)
        if sorted(f) != list(range(n)):
            raise HypothesisError("listed map is not a bijection")
        if any(f[table[a][b]] != table[f[a]][f[b]] for a in range(n) for b in range(n)):
            raise HypothesisError("listed map is not a homomorphism")
        zeta = _scalar_on_torus(S, f, e_pi)
        if zeta is None:
            continue
        if all(S.decode(f[i])[1] == S.decode(i)[1] for i in range(n)):
            degrees.add(UnitModPk(S.p, S.k, zeta))
    degrees.add(UnitModPk(S.p, S.k, 1))
    closed = set(degrees)
    while True:
        more = {a * b for a in closed for b in closed} - closed
        if not more:
            break
        closed |= more
    return sorted(closed)


def _scalar_on_torus(S: PToralData, f: Sequence[int], e_pi: int) -> int | None:
    for z in range(1, S.mod):
        if z % S.p == 0:
            continue
        ok = True
        for t in S.torus_elements:
            image = S.decode(f[S.encode(t, e_pi)])
            if image != (tuple(z * a % S.mod for a in t), e_pi):
                ok = False
                break
        if ok:
            return z
    return None


# ---------------------------------------------------------------------------
# lemmas about powers


def power_stabilize(psi1: AdamsAut, psi2: AdamsAut) -> int:
    """Least ``r >= 0`` with ``psi1^(p^r) = psi2^(p^r)`` as maps on ``S``.

    Requires equal degrees ``zeta ≡ 1 mod p`` with ``zeta != 1`` at the working
    precision.
    """
    S = psi1.host
    if psi1.zeta != psi2.zeta:
        raise HypothesisError("the two automorphisms have different degrees")
    zeta = psi1.zeta
    if not gamma_membership(zeta, 1):
        raise HypothesisError("degree must be congruent to 1 mod p")
    if zeta.is_one():
        raise HypothesisError("degree is 1 at this precision; the statement needs zeta != 1")
    a, b = psi1, psi2
    for r in range(S.k + 1):
        if a.permutation == b.permutation:
            return r
        a, b = a.power(S.p), b.power(S.p)
    raise HypothesisError("no stabilization within the working precision")


def discrepancy_order(psi1: AdamsAut, psi2: AdamsAut) -> int:
    """Additive order of the cochain ``d1 - d2``."""
    S = psi1.host
    n = 1
    while any((n * (a - b)) % S.mod for x in range(len(S.pi))
              for a, b in zip(psi1.d[x], psi2.d[x])):
        n *= S.p
    return n


def coset_power(table: Table, g: int, h: int, N: Sequence[int]) -> int:
    """Least ``1 <= n <= |N|`` with ``g^n = h^n``, given ``gN = hN`` with ``N`` normal."""
    members = set(N)
    e = identity_of(table)
    inv = [group_inverse(table, x) for x in range(len(table))]
    if e not in members or any(table[a][b] not in members for a in members for b in members):
        raise HypothesisError("N is not a subgroup")
    if any(table[table[x][a]][inv[x]] not in members for x in range(len(table)) for a in members):
        raise HypothesisError("N is not normal")
    if table[inv[g]][h] not in members:
        raise HypothesisError("g and h lie in different cosets of N")
    a, b = g, h
    for n in range(1, len(members) + 1):
        if a == b:
            return n
        a, b = table[a][g], table[b][h]
    raise HypothesisError("no power found within |N|; inputs violate the hypotheses")


# ---------------------------------------------------------------------------
# group cohomology and torus coefficients


def group_cohomology(G: Table, M: PresentedAbGroup, action: Sequence[Matrix] | None,
                     n: int) -> PresentedAbGroup:
    """``H^n(G, M)`` for ``G`` given by its table, acting through ``action[g]``."""
    C = one_object_cat(G)
    if action is None:
        F = AbFunctor.constant(C, M)
    else:
        F = AbFunctor(C, {"*": M}, [AbHom(M, M, A) for A in action])
    return cohomology(C, F, n).group


@dataclass
class StableCohomology:
    """``H^n`` with torus-type coefficients, computed at a finite level ``k``.

    ``invariants`` describe the image of ``H^n(G, M_k)`` in ``H^n(G, M_{k+s})``
    once that image no longer shrinks; ``truncated`` is ``H^n(G, M_k)`` itself.
    """

    degree: int
    level: int
    invariants: tuple[int, ...]
    truncated: tuple[int, ...]
    steps: int
    stable: bool

    @property
    def order(self) -> int:
        return prod(self.invariants)

    @property
    def is_zero(self) -> bool:
        return self.order == 1

    def to_json(self) -> dict:
        return {"degree": self.degree, "level": self.level, "invariants": list(self.invariants),
                "truncated_invariants": list(self.truncated), "steps": self.steps,
                "stable": self.stable}


def _image_invariants(f: AbHom) -> tuple[int, ...]:
    K, inc = f.kernel()
    Q, _ = inc.cokernel()
    return tuple(d for d in Q.invariants if d != 1)


def stable_cohomology(level: Callable[[int], AbFunctor],
                      inclusion: Callable[[int, int], NatTrans],
                      k: int, n: int, max_extra: int = 6) -> StableCohomology:
    """Image of ``H^n(M_k) -> H^n(M_{k+s})`` for growing ``s`` until two consecutive images agree."""
    src = level(k)
    H = cohomology(src.base, src, n)
    truncated = tuple(d for d in H.group.invariants if d != 1)
    if H.group.order == 1:
        return StableCohomology(n, k, (), truncated, 0, True)
    prev = None
    for s in range(1, max_extra + 1):
        img = _image_invariants(_induced(inclusion(k, k + s), n))
        if prev is not None and prod(img) == prod(prev):
            return StableCohomology(n, k, img, truncated, s - 1, True)
        prev = img
    return StableCohomology(n, k, prev, truncated, max_extra, False)


def _induced(eta: NatTrans, n: int) -> AbHom:
    from .cobar import induced_map
    return induced_map(eta, n)


def torus_functor(G: Table, action: Sequence[Matrix], p: int, k: int) -> AbFunctor:
    """``G`` acting on ``(Z/p^k)^r`` through integer matrices reduced mod ``p^k``."""
    r = len(action[0])
    T = PresentedAbGroup.from_invariants([p ** k] * r)
    C = one_object_cat(G)
    return AbFunctor(C, {"*": T}, [AbHom(T, T, [[a % p ** k for a in row] for row in A])
                                   for A in action])


def torus_cohomology(G: Table, action: Sequence[Matrix], p: int, k: int, n: int,
                     max_extra: int = 6) -> StableCohomology:
    """``H^n(G, T)`` for the discrete torus ``T``, seen from level ``k``."""
    cache: dict[int, AbFunctor] = {}

    def level(j):
        if j not in cache:
            cache[j] = torus_functor(G, action, p, j)
        return cache[j]

    def inclusion(j, j2):
        A, B = level(j), level(j2)
        TA, TB = A.on_obj["*"], B.on_obj["*"]
        scale = [[p ** (j2 - j) * int(a == b) for b in range(TA.ngens)] for a in range(TB.ngens)]
        return NatTrans(A, B, {"*": AbHom(TA, TB, scale)})
    return stable_cohomology(level, inclusion, k, n, max_extra)


def _fixed_functor(G: Table, action: Sequence[Matrix], D: Sequence[int], p: int, j: int):
    """``G/D`` acting on the ``D``-fixed points of ``T_j``; also the inclusion of the fixed points."""
    r = len(action[0])
    mod = p ** j
    T = PresentedAbGroup.from_invariants([mod] * r)
    if len(D) == 0:
        D = [identity_of(G)]
    rows = []
    for d in D:
        for i in range(r):
            rows.append([(action[d][i][c] - int(i == c)) % mod for c in range(r)])
    stacked = PresentedAbGroup.direct_sum([T] * len(D))
    K, inc = AbHom(T, stacked, rows).kernel()
    cosets, rep_of = _quotient(G, D)
    Q = cosets
    mats = []
    for rep in rep_of:
        cols = []
        for i in range(K.ngens):
            img = _matvec(action[rep], inc(K.basis_vector(i)), mod)
            cols.append(inc.solve(img))
        mats.append([[c[a] for c in cols] for a in range(K.ngens)])
    C = one_object_cat(Q)
    F = AbFunctor(C, {"*": K}, [AbHom(K, K, M) for M in mats])
    return F, inc


def _quotient(G: Table, D: Sequence[int]) -> tuple[Table, list[int]]:
    members = set(D) | {identity_of(G)}
    coset_of, reps = {}, []
    e = identity_of(G)
    for g in [e] + list(range(len(G))):
        if g in coset_of:
            continue
        reps.append(g)
        for d in members:
            coset_of[G[g][d]] = len(reps) - 1
    table = [[coset_of[G[reps[a]][reps[b]]] for b in range(len(reps))] for a in range(len(reps))]
    return table, reps


def _is_pseudo_reflection(w: Matrix, p: int, k: int) -> bool:
    r = len(w)
    M = [[w[i][j] - int(i == j) for j in range(r)] for i in range(r)]
    _, D, _ = smith_normal_form(M, r)
    diag = [D[i][i] for i in range(min(len(D), r))]
    return sum(1 for a in diag if a % p ** k) == 1


def _generated(G: Table, gens: Sequence[int]) -> set[int]:
    e = identity_of(G)
    out = {e}
    frontier = [e]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = G[x][g]
            if y not in out:
                out.add(y)
                frontier.append(y)
    return out


def h1_weyl_vanishing(W: Table, action: Sequence[Matrix], D: Sequence[int], p: int,
                      k: int) -> dict:
    """Evaluate the decidable vanishing criteria for ``H^1(W, T)`` and compute it directly.

    ``D`` lists the elements of a central subgroup acting by scalars.
    """
    e = identity_of(W)
    r = len(action[0])
    D = sorted(set(D) | {e})
    for d in D:
        A = action[d]
        c = A[0][0]
        if any(A[i][j] != (c if i == j else 0) for i in range(r) for j in range(r)):
            raise HypothesisError(f"element {d} of D does not act by a scalar")
        if any(W[d][w] != W[w][d] for w in range(len(W))):
            raise HypothesisError(f"element {d} of D is not central")
    nontrivial = any(action[d][0][0] % p ** k != 1 for d in D)
    cond_i = p % 2 == 1 and nontrivial
    cache: dict[int, tuple] = {}

    def level(j):
        if j not in cache:
            cache[j] = _fixed_functor(W, action, D, p, j)
        return cache[j][0]

    def inclusion(j, j2):
        A, B = level(j), level(j2)
        incA, incB = cache[j][1], cache[j2][1]
        KA, KB = A.on_obj["*"], B.on_obj["*"]
        cols = []
        for i in range(KA.ngens):
            v = [p ** (j2 - j) * a for a in incA(KA.basis_vector(i))]
            cols.append(incB.solve(v))
        return NatTrans(A, B, {"*": AbHom(KA, KB, [[c[a] for c in cols] for a in range(KB.ngens)])})
    quotient_h1 = stable_cohomology(level, inclusion, k, 1)
    cond_ii = quotient_h1.is_zero
    reflections = [w for w in range(len(W)) if w != e and _is_pseudo_reflection(action[w], p, k)]
    cond_iii = len(_generated(W, reflections)) == len(W) and len(W) > 1
    direct = torus_cohomology(W, action, p, k, 1)
    return {
        "p": p, "level": k,
        "scalar_subgroup_nontrivial": nontrivial,
        "condition_odd_scalar": cond_i,
        "condition_quotient_h1": cond_ii,
        "quotient_h1_invariants": list(quotient_h1.invariants),
        "pseudo_reflections": reflections,
        "condition_pseudo_reflection_group": cond_iii,
        "h1_invariants": list(direct.invariants),
        "h1_vanishes": direct.is_zero,
        "stable": direct.stable and quotient_h1.stable,
    }


def dimension_shift_check(G: Table, action: Sequence[Matrix], n: int, k: int,
                          p: int, max_k: int | None = None) -> dict:
    """Compare ``H^n(G, L)`` for the lattice ``L = Z^r`` with ``H^(n-1)(G, T)``.

    The torus side is computed at levels ``k, k+1, ...`` until two consecutive
    levels give the same stable image; if that never happens before ``max_k``
    the report is marked inconclusive.
    """
    if not 2 <= n <= 3:
        raise HypothesisError("dimension shifting is checked in degrees 2 and 3")
    r = len(action[0])
    L = PresentedAbGroup.free(r)
    lattice = group_cohomology(G, L, action, n)
    lat_inv = tuple(d for d in lattice.invariants if d != 1)
    max_k = max_k or k + 4
    prev = None
    conclusive = False
    torus_inv: tuple[int, ...] = ()
    j = k
    while j <= max_k:
        res = torus_cohomology(G, action, p, j, n - 1)
        if prev is not None and res.invariants == prev and res.stable:
            conclusive = True
            torus_inv = res.invariants
            break
        prev = res.invariants
        j += 1
    # only the p-primary part of the lattice side is visible in a p-torus
    lat_p = tuple(_p_part(d, p) for d in lat_inv if _p_part(d, p) != 1)
    return {
        "degree": n,
        "lattice_invariants": list(lat_inv),
        "lattice_p_primary": list(lat_p),
        "torus_degree": n - 1,
        "torus_invariants": list(torus_inv if conclusive else (prev or ())),
        "level": j if conclusive else max_k,
        "conclusive": conclusive,
        "agree": conclusive and sorted(lat_p) == sorted(torus_inv),
    }


def _p_part(d: int, p: int) -> int:
    if d == 0:
        return 0
    out = 1
    while d % p == 0:
        d //= p
        out *= p
    return out

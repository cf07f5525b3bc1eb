"""The cobar cochain complex of a finite category with abelian coefficients.

An ``n``-cochain assigns to every ``n``-chain ``(c0, ..., c_{n-1})`` (``c0``
applied first) an element of the coefficient group at the chain's final
object; 0-cochains assign an element to every object.  The differential is

* degree 0: ``(du)(c) = F(c) u(X0) - u(X1)`` for ``c: X0 -> X1``;
* degree ``n >= 1``: ``(du)(c0..cn) = sum_i (-1)^i u(d_i) + (-1)^(n+1) F(cn) u(c0..c_{n-1})``
  where ``d_0`` drops ``c0`` and ``d_i`` composes ``c_i∘c_{i-1}``.

In degree 1 this reads ``du(c0, c1) = u(c1) - u(c1∘c0) + c1·u(c0)``.
Cohomology is computed as ``ker d / im d`` with the abgrp solvers, using the
unnormalized complex.
"""

from __future__ import annotations

from functools import cached_property
from math import gcd, lcm
from typing import Callable, Mapping, Sequence

from .abgrp import AbHom, PresentedAbGroup, Vector, describe_invariants
from .errors import HypothesisError, ResourceRefusal, max_cells
from .fincat import AbFunctor, CatFunctor, FinCat, NatTrans, chain_target, chains

DEFAULT_MAX_DEGREE = 3


class CobarComplex:
    """Cached chain bookkeeping and differentials for one coefficient functor."""

    def __init__(self, coeff: AbFunctor):
        self.coeff = coeff
        self.base = coeff.base
        self._index: dict[int, dict] = {}
        self._groups: dict[int, tuple[PresentedAbGroup, list[int]]] = {}
        self._deltas: dict[int, AbHom] = {}

    def chains(self, n: int) -> list:
        return chains(self.base, n)

    def index(self, n: int) -> dict:
        if n not in self._index:
            self._index[n] = {ch: i for i, ch in enumerate(self.chains(n))}
        return self._index[n]

    def target(self, ch) -> PresentedAbGroup:
        return self.coeff.on_obj[chain_target(self.base, ch)]

    def layout(self, n: int) -> tuple[PresentedAbGroup, list[int]]:
        """The product group of ``n``-cochains and the offset of each chain's block."""
        if n not in self._groups:
            groups = [self.target(ch) for ch in self.chains(n)]
            offsets, off = [], 0
            for g in groups:
                offsets.append(off)
                off += g.ngens
            self._groups[n] = (PresentedAbGroup.direct_sum(groups), offsets)
        return self._groups[n]

    def cells(self, n: int) -> int:
        """Size of the dense matrix of the degree-``n`` differential."""
        return self.layout(n)[0].ngens * self.layout(n + 1)[0].ngens

    def terms(self, n: int, s) -> list[tuple[int, object, AbHom | None]]:
        """Summands of ``(du)(s)`` for ``u`` of degree ``n``: ``(sign, chain, hom)``."""
        C = self.base
        if n == 0:
            (c,) = s
            return [(1, C.sources[c], self.coeff.on_mor[c]), (-1, C.targets[c], None)]
        out = [(1, s[1:], None)]
        for i in range(1, n + 1):
            face = s[:i - 1] + (C.comp[(s[i], s[i - 1])],) + s[i + 1:]
            out.append(((-1) ** i, face, None))
        out.append(((-1) ** (n + 1), s[:-1], self.coeff.on_mor[s[-1]]))
        return out

    def delta(self, n: int, limit: int | None = None) -> AbHom:
        if n not in self._deltas:
            cells = self.cells(n)
            if cells > max_cells(limit):
                raise ResourceRefusal(f"differential in degree {n}", cells, max_cells(limit))
            src, soff = self.layout(n)
            dst, doff = self.layout(n + 1)
            idx = self.index(n)
            M = [[0] * src.ngens for _ in range(dst.ngens)]
            for a, s in enumerate(self.chains(n + 1)):
                r0 = doff[a]
                for sign, face, hom in self.terms(n, s):
                    c0 = soff[idx[face]]
                    if hom is None:
                        for k in range(self.target(s).ngens):
                            M[r0 + k][c0 + k] += sign
                    else:
                        for i, row in enumerate(hom.matrix):
                            Mi = M[r0 + i]
                            for j, v in enumerate(row):
                                if v:
                                    Mi[c0 + j] += sign * v
            self._deltas[n] = AbHom(src, dst, M, check=False)
        return self._deltas[n]


def complex_of(coeff: AbFunctor) -> CobarComplex:
    cx = coeff.__dict__.get("_cobar")
    if cx is None:
        cx = coeff.__dict__["_cobar"] = CobarComplex(coeff)
    return cx


class Cochain:
    """An ``n``-cochain: one canonical value per ``n``-chain, in chain order."""

    def __init__(self, coeff: AbFunctor, degree: int, values: Sequence[Sequence[int]]):
        cx = complex_of(coeff)
        chs = cx.chains(degree)
        if len(values) != len(chs):
            raise ValueError(f"expected {len(chs)} values, got {len(values)}")
        self.coeff = coeff
        self.degree = degree
        self.values = tuple(cx.target(ch).reduce(v) for ch, v in zip(chs, values))

    @property
    def base(self) -> FinCat:
        return self.coeff.base

    @property
    def chains(self) -> list:
        return chains(self.base, self.degree)

    @classmethod
    def zero(cls, coeff: AbFunctor, degree: int) -> Cochain:
        cx = complex_of(coeff)
        return cls(coeff, degree, [cx.target(ch).zero() for ch in cx.chains(degree)])

    @classmethod
    def from_function(cls, coeff: AbFunctor, degree: int,
                      fn: Callable[[object], Sequence[int]]) -> Cochain:
        return cls(coeff, degree, [fn(ch) for ch in chains(coeff.base, degree)])

    @classmethod
    def from_mapping(cls, coeff: AbFunctor, degree: int, values: Mapping) -> Cochain:
        """Values for some chains; the rest are zero."""
        cx = complex_of(coeff)
        return cls(coeff, degree, [values.get(ch, cx.target(ch).zero()) for ch in cx.chains(degree)])

    @classmethod
    def from_flat(cls, coeff: AbFunctor, degree: int, vec: Sequence[int]) -> Cochain:
        cx = complex_of(coeff)
        _, offsets = cx.layout(degree)
        vals = [vec[o:o + cx.target(ch).ngens] for ch, o in zip(cx.chains(degree), offsets)]
        return cls(coeff, degree, vals)

    def flat(self) -> list[int]:
        return [a for v in self.values for a in v]

    def __getitem__(self, ch) -> Vector:
        return self.values[complex_of(self.coeff).index(self.degree)[ch]]

    value = __getitem__

    def items(self):
        return zip(self.chains, self.values)

    def _check(self, other: Cochain) -> None:
        if self.degree != other.degree:
            raise ValueError("cochains of different degrees")
        if self.coeff is not other.coeff and self.coeff != other.coeff:
            raise ValueError("cochains with different coefficients")

    def __add__(self, other: Cochain) -> Cochain:
        self._check(other)
        return Cochain(self.coeff, self.degree,
                       [[a + b for a, b in zip(x, y)] for x, y in zip(self.values, other.values)])

    def __sub__(self, other: Cochain) -> Cochain:
        self._check(other)
        return Cochain(self.coeff, self.degree,
                       [[a - b for a, b in zip(x, y)] for x, y in zip(self.values, other.values)])

    def __neg__(self) -> Cochain:
        return self.scale(-1)

    def scale(self, n: int) -> Cochain:
        return Cochain(self.coeff, self.degree, [[n * a for a in x] for x in self.values])

    def is_zero(self) -> bool:
        return all(not any(v) for v in self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        return (self.degree == other.degree and self.values == other.values
                and (self.coeff is other.coeff or self.coeff == other.coeff))

    __hash__ = None

    def __repr__(self) -> str:
        return f"Cochain(degree={self.degree}, values={list(self.values)})"

    def to_json(self) -> dict:
        vals = []
        for ch, v in self.items():
            vals.append({"chain": list(ch) if isinstance(ch, tuple) else ch, "value": list(v)})
        return {"degree": self.degree, "values": vals}

    @classmethod
    def from_json(cls, coeff: AbFunctor, data: dict) -> Cochain:
        n = int(data["degree"])
        given = {}
        for entry in data["values"]:
            ch = entry["chain"]
            ch = tuple(int(c) for c in ch) if n > 0 else str(ch)
            given[ch] = tuple(int(a) for a in entry["value"])
        known = set(chains(coeff.base, n))
        unknown = [ch for ch in given if ch not in known]
        if unknown:
            raise ValueError(f"not a {n}-chain of the base: {unknown[0]}")
        return cls.from_mapping(coeff, n, given)


def differential(u: Cochain) -> Cochain:
    """The coboundary ``du``, a cochain of degree ``u.degree + 1``."""
    cx = complex_of(u.coeff)
    d = cx.delta(u.degree)
    return Cochain.from_flat(u.coeff, u.degree + 1, d._apply(u.flat()))


def is_cocycle(u: Cochain) -> bool:
    return differential(u).is_zero()


def is_regular(u: Cochain) -> bool:
    """True when ``u`` vanishes on every chain containing an identity."""
    C = u.base
    return all(not any(v) for ch, v in u.items()
               if isinstance(ch, tuple) and any(C.is_identity(c) for c in ch))


class CohomologyGroup:
    """``H^n`` with its diagonal presentation, generators and coordinate map."""

    def __init__(self, coeff: AbFunctor, degree: int, limit: int | None = None):
        self.coeff = coeff
        self.degree = degree
        cx = complex_of(coeff)
        d = cx.delta(degree, limit)
        Z, inc = d.kernel()
        self._cycles = d
        self._inclusion = inc
        rels = list(Z.relations)
        if degree > 0:
            prev = cx.delta(degree - 1, limit)
            for j in range(prev.src.ngens):
                col = [row[j] for row in prev.matrix]
                rels.append(d.kernel_coords(col))
        H = PresentedAbGroup(Z.ngens, rels)
        self.group, self._to_s, from_s = H.simplify()
        gens = []
        for i in range(self.group.ngens):
            zc = [row[i] for row in from_s.matrix]
            gens.append(Cochain.from_flat(coeff, degree, inc._apply(zc)))
        self.generators = gens

    @property
    def invariants(self) -> list[int]:
        return list(self.group.invariants)

    @property
    def order(self) -> int:
        return self.group.order

    def coordinates(self, z: Cochain) -> Vector:
        """Coordinates of the class of the cocycle ``z`` in ``self.group``."""
        coords = self._cycles.kernel_coords(z.flat())
        if coords is None:
            raise HypothesisError("not a cocycle")
        return self._to_s(coords)

    def class_of(self, coords: Sequence[int]) -> CohomologyClass:
        rep = Cochain.zero(self.coeff, self.degree)
        for a, g in zip(coords, self.generators):
            if a:
                rep = rep + g.scale(a)
        return CohomologyClass(rep, self)

    def __str__(self) -> str:
        return describe_invariants(self.invariants)

    def __repr__(self) -> str:
        return f"H^{self.degree} = {self}"


def _check_degree(C: FinCat, coeff: AbFunctor, n: int, max_degree: int) -> None:
    if coeff.base is not C and coeff.base != C:
        raise ValueError("coefficient functor lives on a different category")
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n > max_degree:
        width = max((G.ngens for G in coeff.on_obj.values()), default=1)
        raise ResourceRefusal(f"cohomology in degree {n} (max degree {max_degree})",
                              C.n_mor ** (n + 1) * max(width, 1), max_degree)


def cohomology(C: FinCat, coeff: AbFunctor, n: int, max_degree: int = DEFAULT_MAX_DEGREE,
               limit: int | None = None) -> CohomologyGroup:
    """``H^n(C, coeff)``; ``.group`` is the diagonal presentation, ``.generators`` cocycles."""
    _check_degree(C, coeff, n, max_degree)
    cache = coeff.__dict__.setdefault("_cohomology", {})
    if n not in cache:
        cache[n] = CohomologyGroup(coeff, n, limit)
    return cache[n]


class CohomologyClass:
    """The class of a cocycle.  Zero tests and equality go through the solver,
    so the ambient group is only computed when asked for."""

    def __init__(self, representative: Cochain, ambient: CohomologyGroup | None = None):
        self.representative = representative
        if ambient is not None:
            self.__dict__["ambient"] = ambient

    @property
    def degree(self) -> int:
        return self.representative.degree

    @property
    def coeff(self) -> AbFunctor:
        return self.representative.coeff

    @cached_property
    def ambient(self) -> CohomologyGroup:
        return cohomology(self.coeff.base, self.coeff, self.degree)

    @property
    def group(self) -> PresentedAbGroup:
        return self.ambient.group

    def coordinates(self) -> Vector:
        return self.ambient.coordinates(self.representative)

    def is_zero(self) -> bool:
        if self.degree == 0:
            return self.representative.is_zero()
        d = complex_of(self.coeff).delta(self.degree - 1)
        return d.solve(self.representative.flat()) is not None

    def order(self) -> int:
        """Additive order of the class (0 if infinite)."""
        e = 1
        for G in self.coeff.on_obj.values():
            e = lcm(e, G.exponent) if G.exponent and e else 0
        if e == 0:
            S, y = self.group, self.coordinates()
            o = 1
            for i, a in enumerate(y):
                d = next((r[i] for r in S.relations if r[i]), 0)
                if d == 0 and a:
                    return 0
                if d:
                    o = lcm(o, d // gcd(a, d))
            return o
        for k in range(1, e + 1):
            if e % k == 0 and CohomologyClass(self.representative.scale(k)).is_zero():
                return k
        raise AssertionError("unreachable")

    def scale(self, n: int) -> CohomologyClass:
        return CohomologyClass(self.representative.scale(n), self.__dict__.get("ambient"))

    def __add__(self, other: CohomologyClass) -> CohomologyClass:
        return CohomologyClass(self.representative + other.representative, self.__dict__.get("ambient"))

    def __sub__(self, other: CohomologyClass) -> CohomologyClass:
        return CohomologyClass(self.representative - other.representative, self.__dict__.get("ambient"))

    def __neg__(self) -> CohomologyClass:
        return self.scale(-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CohomologyClass):
            return NotImplemented
        return self.degree == other.degree and (self - other).is_zero()

    __hash__ = None

    def __repr__(self) -> str:
        return f"CohomologyClass(degree={self.degree}, zero={self.is_zero()})"

    def to_json(self) -> dict:
        out = {"degree": self.degree, "representative": self.representative.to_json(),
               "is_zero": self.is_zero(), "order": self.order()}
        if "ambient" in self.__dict__ or self.degree <= 2:
            out["group_invariants"] = self.ambient.invariants
            out["coordinates"] = list(self.coordinates())
        return out


def cohomologous(z: Cochain, z2: Cochain) -> Cochain | None:
    """A cochain ``u`` with ``z2 - z = du`` (canonical solver witness), or None."""
    if z.degree != z2.degree:
        raise ValueError("cochains of different degrees")
    if z.degree == 0:
        raise ValueError("degree-0 cochains have no coboundaries to compare")
    d = complex_of(z.coeff).delta(z.degree - 1)
    x = d.solve((z2 - z).flat())
    return None if x is None else Cochain.from_flat(z.coeff, z.degree - 1, x)


def regularize_2cocycle(z: Cochain) -> tuple[Cochain, Cochain]:
    """Return ``(z + du, u)`` with ``z + du`` regular.

    ``u`` is ``-z(1_X, 1_X)`` on each identity ``1_X`` and zero elsewhere.
    """
    if z.degree != 2:
        raise ValueError("expected a 2-cochain")
    if not is_cocycle(z):
        raise HypothesisError("not a 2-cocycle")
    C = z.base
    vals = {}
    for X in C.objects:
        i = C.identity[X]
        a = z[(i, i)]
        if any(a):
            vals[(i,)] = tuple(-x for x in a)
    u = Cochain.from_mapping(z.coeff, 1, vals)
    return z + differential(u), u


def scalar_action_on_class(x: CohomologyClass, zeta: int) -> CohomologyClass:
    """The class of ``zeta`` times the representative."""
    return x.scale(zeta)


def pushforward(u: Cochain, eta: NatTrans) -> Cochain:
    """``eta_* u``: apply the component at each chain's final object."""
    C = u.base
    tgt = eta.pulled_target
    return Cochain(tgt, u.degree,
                   [eta.components[chain_target(C, ch)]._apply(v) for ch, v in u.items()])


def pullback(u: Cochain, psi: CatFunctor, coeff: AbFunctor | None = None) -> Cochain:
    """``psi^* u`` on ``psi.src``; ``coeff`` (the pulled-back functor) may be supplied
    so that the result shares coefficient objects with other cochains."""
    if coeff is None:
        coeff = u.coeff.precompose(psi)
    n = u.degree
    if n == 0:
        return Cochain.from_function(coeff, 0, lambda X: u[psi.obj_map[X]])
    return Cochain.from_function(coeff, n, lambda ch: u[tuple(psi.mor_map[c] for c in ch)])


def induced_map(eta: NatTrans, n: int) -> AbHom:
    """The homomorphism ``H^n(source) -> H^n(target)`` induced by ``eta`` (same base)."""
    H = cohomology(eta.source.base, eta.source, n)
    tgt = eta.pulled_target
    H2 = cohomology(tgt.base, tgt, n)
    cols = [H2.coordinates(pushforward(g, eta)) for g in H.generators]
    matrix = [[c[i] for c in cols] for i in range(H2.group.ngens)]
    return AbHom(H.group, H2.group, matrix)

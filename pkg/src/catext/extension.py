"""Extensions of finite categories by abelian-group-valued functors.

An extension of ``C`` by ``F`` is a category ``D`` on the same objects with a
projection ``D -> C`` that is surjective on hom-sets, and injections
``<.>: F(X) -> Aut_D(X)`` such that ``F(Y)`` acts freely on ``D(X, Y)`` by
post-composition with the fibres of the projection as orbits, and
``d∘<g> = <F([d]) g>∘d``.

Extensions are classified by ``H^2(C, F)``.  A regular section ``s`` (a lift
of every base morphism, identities to identities) defines the 2-cocycle
``z_s`` by ``s(c1)∘s(c0) = <z_s(c0, c1)>∘s(c1∘c0)``, and the code below
builds extensions back from cocycles, decides equivalence, splitting and
existence of morphisms through the cocycle calculus, and realizes ``H^1`` as
automorphisms modulo inner ones.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Mapping, Sequence

from .abgrp import AbHom, PresentedAbGroup, Vector
from .cobar import (
    Cochain, CohomologyClass, cohomologous, cohomology, complex_of, is_cocycle, is_regular,
    pullback, pushforward,
)
from .errors import HypothesisError
from .fincat import (
    AbFunctor, CatFunctor, FinCat, NatTrans, Obj, Violation, full_subcategory,
    inclusion_functor, validate_abfunctor, validate_category, validate_functor,
    validate_nat_trans,
)


class Extension:
    """The data ``(total, base, coeff, proj, delta)``.

    ``delta[X]`` maps each element of ``coeff(X)`` (a canonical vector) to the
    id of the corresponding automorphism of ``X`` in ``total``.
    """

    def __init__(self, total: FinCat, base: FinCat, coeff: AbFunctor, proj: CatFunctor,
                 delta: Mapping[Obj, Mapping[Sequence[int], int]]):
        self.total = total
        self.base = base
        self.coeff = coeff
        self.proj = proj
        self.delta = {X: {coeff.on_obj[X].reduce(g): int(d) for g, d in m.items()}
                      for X, m in delta.items()}

    def inject(self, X: Obj, g: Sequence[int]) -> int:
        """``<g>`` as a morphism id of the total category."""
        return self.delta[X][self.coeff.on_obj[X].reduce(g)]

    @cached_property
    def _delta_inv(self) -> dict[int, Vector]:
        return {d: g for m in self.delta.values() for g, d in m.items()}

    def element_of(self, d: int) -> Vector | None:
        """The ``g`` with ``<g> = d``, if ``d`` lies in the image of ``delta``."""
        return self._delta_inv.get(d)

    def act(self, g: Sequence[int], d: int) -> int:
        """``<g>∘d``."""
        return self.total.compose(self.inject(self.total.dst(d), g), d)

    @cached_property
    def _fibres(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {c: [] for c in range(self.base.n_mor)}
        for d in range(self.total.n_mor):
            out[self.proj(d)].append(d)
        return {c: tuple(v) for c, v in out.items()}

    def fibre(self, c: int) -> tuple[int, ...]:
        """Total morphisms over the base morphism ``c``, by increasing id."""
        return self._fibres[c]

    @cached_property
    def _orbits(self) -> dict[int, dict[int, Vector]]:
        out = {}
        for d in range(self.total.n_mor):
            Y = self.total.dst(d)
            out[d] = {self.act(g, d): g for g in self.coeff.on_obj[Y].elements()}
        return out

    def difference(self, d: int, e: int) -> Vector:
        """The unique ``g`` with ``d = <g>∘e`` (``d``, ``e`` in one fibre)."""
        try:
            return self._orbits[e][d]
        except KeyError:
            raise HypothesisError(f"morphisms {d} and {e} do not lie in one orbit") from None

    def to_json(self) -> dict:
        return {
            "total": self.total.to_json(),
            "base": self.base.to_json(),
            "phi": self.coeff.to_json(),
            "proj": {str(d): self.proj(d) for d in range(self.total.n_mor)},
            "delta": {str(X): {json.dumps(list(g)): d for g, d in m.items()}
                      for X, m in self.delta.items()},
        }

    @classmethod
    def from_json(cls, data: dict) -> Extension:
        total = FinCat.from_json(data["total"])
        base = FinCat.from_json(data["base"])
        coeff = AbFunctor.from_json(base, data["phi"])
        proj_map = data["proj"]
        if isinstance(proj_map, dict):
            mor = [int(proj_map[str(d)]) for d in range(total.n_mor)]
        else:
            mor = [int(x) for x in proj_map]
        proj = CatFunctor(total, base, {X: X for X in total.objects}, mor)
        delta = {}
        for X, m in data["delta"].items():
            delta[str(X)] = {_parse_element(k): int(v) for k, v in m.items()}
        return cls(total, base, coeff, proj, delta)


def _parse_element(key: str) -> tuple[int, ...]:
    key = key.strip()
    if key.startswith("["):
        return tuple(int(a) for a in json.loads(key))
    return tuple(int(a) for a in key.split(",") if a.strip())


def validate_extension(E: Extension) -> list[Violation]:
    """Every failed extension axiom, with witnesses (empty if ``E`` is valid)."""
    out: list[Violation] = []
    for name, vs in (("total", validate_category(E.total)), ("base", validate_category(E.base))):
        out += [Violation(f"{name}:{v.kind}", v.witness, v.detail) for v in vs]
    if out:
        return out
    out += [Violation(f"coeff:{v.kind}", v.witness, v.detail) for v in validate_abfunctor(E.coeff)]
    if set(E.total.objects) != set(E.base.objects):
        out.append(Violation("objects", (), "total and base have different objects"))
    if out:
        return out
    if any(E.proj.obj_map.get(X) != X for X in E.total.objects):
        out.append(Violation("projection", (), "projection is not the identity on objects"))
    out += [Violation(f"projection:{v.kind}", v.witness, v.detail) for v in validate_functor(E.proj)]
    if out:
        return out
    for c in range(E.base.n_mor):
        if not E.fibre(c):
            out.append(Violation("surjectivity", (c,), "base morphism has no lift"))
    for X in E.base.objects:
        G = E.coeff.on_obj[X]
        if not G.is_finite:
            out.append(Violation("coefficients", (X,), "coefficient group must be finite"))
            continue
        m = E.delta.get(X, {})
        elems = list(G.elements())
        if set(m) != set(elems):
            out.append(Violation("delta-domain", (X,), "delta must be defined on every element"))
            continue
        images = [m[g] for g in elems]
        if len(set(images)) != len(images):
            out.append(Violation("delta-injective", (X,)))
        for g, d in m.items():
            if E.total.src(d) != X or E.total.dst(d) != X or E.proj(d) != E.base.identity[X]:
                out.append(Violation("delta-image", (X, g), "<g> must be an automorphism over the identity"))
        if out:
            continue
        if m[G.zero()] != E.total.identity[X]:
            out.append(Violation("delta-identity", (X,)))
        for g in elems:
            for h in elems:
                if E.total.compose(m[g], m[h]) != m[G.add(g, h)]:
                    out.append(Violation("delta-homomorphism", (X, g, h)))
    if out:
        return out
    # free action whose orbits are exactly the fibres
    for d in range(E.total.n_mor):
        Y = E.total.dst(d)
        orbit = [E.act(g, d) for g in E.coeff.on_obj[Y].elements()]
        if len(set(orbit)) != len(orbit):
            out.append(Violation("free-action", (d,), "coefficient action on the hom-set is not free"))
        elif set(orbit) != set(E.fibre(E.proj(d))):
            out.append(Violation("orbits", (d,), "orbit differs from the projection fibre"))
    if out:
        return out
    for d in range(E.total.n_mor):
        X = E.total.src(d)
        phi = E.coeff.on_mor[E.proj(d)]
        for g in E.coeff.on_obj[X].elements():
            lhs = E.total.compose(d, E.inject(X, g))
            rhs = E.act(phi(g), d)
            if lhs != rhs:
                out.append(Violation("compatibility", (d, g),
                                     "d∘<g> differs from <F([d]) g>∘d"))
    return out


# ---------------------------------------------------------------------------
# sections and cocycles


@dataclass(frozen=True)
class Section:
    """A lift ``base morphism -> total morphism`` with ``proj(lift(c)) = c``."""

    extension: Extension
    lift: tuple[int, ...]

    def __call__(self, c: int) -> int:
        return self.lift[c]

    @property
    def regular(self) -> bool:
        E = self.extension
        return all(self.lift[E.base.identity[X]] == E.total.identity[X] for X in E.base.objects)


def canonical_section(E: Extension) -> Section:
    """Least-id lift of every base morphism; identities lift to identities."""
    lift = []
    for c in range(E.base.n_mor):
        if E.base.is_identity(c):
            lift.append(E.total.identity[E.base.src(c)])
        else:
            lift.append(min(E.fibre(c)))
    return Section(E, tuple(lift))


def make_section(E: Extension, lift: Sequence[int]) -> Section:
    lift = tuple(lift)
    if len(lift) != E.base.n_mor or any(E.proj(d) != c for c, d in enumerate(lift)):
        raise HypothesisError("not a section of the projection")
    return Section(E, lift)


def extension_cocycle(E: Extension, sigma: Section | None = None) -> Cochain:
    """The regular 2-cocycle ``z`` with ``s(c1)∘s(c0) = <z(c0, c1)>∘s(c1∘c0)``."""
    sigma = sigma or canonical_section(E)
    if not sigma.regular:
        raise HypothesisError("the section must send identities to identities")
    B, D = E.base, E.total

    def value(ch):
        c0, c1 = ch
        return E.difference(D.compose(sigma(c1), sigma(c0)), sigma(B.compose(c1, c0)))
    return Cochain.from_function(E.coeff, 2, value)


def extension_class(E: Extension) -> CohomologyClass:
    """``[E]`` in ``H^2(base, coeff)``, from the canonical section."""
    return CohomologyClass(extension_cocycle(E))


def build_from_cocycle(C: FinCat, coeff: AbFunctor, z: Cochain) -> Extension:
    """The extension whose morphisms are pairs ``(g, c)`` with ``g`` in ``coeff(target c)``.

    Composition is ``(g1, c1)∘(g0, c0) = (g1 + F(c1) g0 + z(c0, c1), c1∘c0)``.
    """
    if z.degree != 2:
        raise HypothesisError("expected a 2-cochain")
    if not is_cocycle(z):
        raise HypothesisError("not a 2-cocycle")
    if not is_regular(z):
        raise HypothesisError("cocycle is not regular; regularize it first")
    pairs: list[tuple[Vector, int]] = []
    index: dict[tuple[Vector, int], int] = {}
    for c in range(C.n_mor):
        for g in coeff.on_obj[C.dst(c)].elements():
            index[(g, c)] = len(pairs)
            pairs.append((g, c))
    comp = {}
    for i1, (g1, c1) in enumerate(pairs):
        G = coeff.on_obj[C.dst(c1)]
        for c0 in range(C.n_mor):
            if C.dst(c0) != C.src(c1):
                continue
            h = coeff.on_mor[c1]
            zval = z[(c0, c1)]
            for g0 in coeff.on_obj[C.dst(c0)].elements():
                g = G.reduce([a + b + w for a, b, w in zip(g1, h._apply(g0), zval)])
                comp[(i1, index[(g0, c0)])] = index[(g, C.compose(c1, c0))]
    labels = [f"({','.join(map(str, g))}|{C.label(c)})" for g, c in pairs]
    total = FinCat(C.objects, [(i, C.src(c), C.dst(c)) for i, (g, c) in enumerate(pairs)],
                   {X: index[(coeff.on_obj[X].zero(), C.identity[X])] for X in C.objects},
                   comp, labels)
    proj = CatFunctor(total, C, {X: X for X in C.objects}, [c for _, c in pairs])
    delta = {X: {g: index[(g, C.identity[X])] for g in coeff.on_obj[X].elements()}
             for X in C.objects}
    return Extension(total, C, coeff, proj, delta)


# ---------------------------------------------------------------------------
# morphisms


class ExtMorphism:
    """A functor ``functor: src.total -> dst.total`` over ``base`` inducing ``eta``."""

    def __init__(self, src: Extension, dst: Extension, functor: CatFunctor,
                 base: CatFunctor, eta: NatTrans):
        self.src = src
        self.dst = dst
        self.functor = functor
        self.base = base
        self.eta = eta

    def __call__(self, d: int) -> int:
        return self.functor(d)

    def compose(self, other: ExtMorphism) -> ExtMorphism:
        """``self after other``."""
        eta = NatTrans(other.eta.source, self.eta.target,
                       {X: self.eta.components[other.base.on_obj(X)] @ other.eta.components[X]
                        for X in other.src.base.objects},
                       self.base.compose(other.base))
        return ExtMorphism(other.src, self.dst, self.functor.compose(other.functor),
                           self.base.compose(other.base), eta)

    def same_functor(self, other: ExtMorphism) -> bool:
        return self.functor.mor_map == other.functor.mor_map

    def to_json(self) -> dict:
        return {"functor": self.functor.to_json(), "base": self.base.to_json(),
                "eta": self.eta.to_json()}


def validate_ext_morphism(M: ExtMorphism) -> list[Violation]:
    out = [Violation(f"functor:{v.kind}", v.witness, v.detail) for v in validate_functor(M.functor)]
    if out:
        return out
    E, E2 = M.src, M.dst
    for d in range(E.total.n_mor):
        if E2.proj(M.functor(d)) != M.base(E.proj(d)):
            out.append(Violation("covering", (d,), "functor does not cover the base functor"))
    for X in E.base.objects:
        Y = M.base.on_obj(X)
        for g in E.coeff.on_obj[X].elements():
            if M.functor(E.inject(X, g)) != E2.inject(Y, M.eta.components[X](g)):
                out.append(Violation("eta", (X, g), "functor disagrees with eta on <g>"))
    return out


def _require_natural(E: Extension, E2: Extension, psi: CatFunctor, eta: NatTrans) -> None:
    if psi.src != E.base or psi.dst != E2.base:
        raise HypothesisError("base functor has the wrong source or target")
    if validate_functor(psi):
        raise HypothesisError("base functor is not a functor")
    if eta.target.base != E2.base:
        raise HypothesisError("eta must land in the coefficients of the target extension")
    if validate_nat_trans(eta):
        raise HypothesisError("eta is not natural")


def morphism_exists(E: Extension, E2: Extension, psi: CatFunctor,
                    eta: NatTrans) -> ExtMorphism | None:
    """A morphism of extensions inducing ``(psi, eta)``, or None.

    One exists iff ``eta_*(z) - psi^*(z')`` is a coboundary ``du``; the functor
    is then ``<g>∘s(c) -> <eta(g) + u(c)>∘s'(psi c)``.
    """
    _require_natural(E, E2, psi, eta)
    sigma, sigma2 = canonical_section(E), canonical_section(E2)
    z, z2 = extension_cocycle(E, sigma), extension_cocycle(E2, sigma2)
    coeff = eta.pulled_target
    w = pushforward(z, eta) - pullback(z2, psi, coeff)
    u = cohomologous(Cochain.zero(coeff, 2), w)
    if u is None:
        return None
    mor = []
    for d in range(E.total.n_mor):
        c = E.proj(d)
        g = E.difference(d, sigma(c))
        Y = E.base.dst(c)
        h = [a + b for a, b in zip(eta.components[Y](g), u[(c,)])]
        mor.append(E2.act(h, sigma2(psi(c))))
    functor = CatFunctor(E.total, E2.total, dict(psi.obj_map), mor)
    return ExtMorphism(E, E2, functor, psi, eta)


def identity_morphism(E: Extension) -> ExtMorphism:
    return ExtMorphism(E, E, CatFunctor.identity(E.total), CatFunctor.identity(E.base),
                       NatTrans.identity(E.coeff))


def _same_coefficients(E: Extension, E2: Extension) -> None:
    if E.base != E2.base:
        raise ValueError("extensions have different bases")
    if E.coeff != E2.coeff:
        raise ValueError("extensions have different coefficient functors")


def are_equivalent(E: Extension, E2: Extension) -> ExtMorphism | None:
    """An equivalence over the identity with identity ``eta``, or None."""
    _same_coefficients(E, E2)
    eta = NatTrans(E.coeff, E2.coeff, {X: AbHom.identity(G) for X, G in E.coeff.on_obj.items()})
    return morphism_exists(E, E2, CatFunctor(E.base, E2.base, {X: X for X in E.base.objects},
                                             range(E.base.n_mor)), eta)


def is_split(E: Extension) -> CatFunctor | None:
    """A functorial section ``s`` of the projection, or None.

    With ``z`` the canonical cocycle and ``du = -z``, ``s(c) = <u(c)>∘sigma(c)``.
    """
    sigma = canonical_section(E)
    z = extension_cocycle(E, sigma)
    u = cohomologous(z, Cochain.zero(E.coeff, 2))
    if u is None:
        return None
    mor = [E.act(u[(c,)], sigma(c)) for c in range(E.base.n_mor)]
    return CatFunctor(E.base, E.total, {X: X for X in E.base.objects}, mor)


def morphism_from_functor(E: Extension, E2: Extension, functor: CatFunctor) -> ExtMorphism:
    """Recover the base functor and ``eta`` from a functor between totals.

    Raises HypothesisError if ``functor`` does not map coefficients to coefficients
    or does not respect the projections.
    """
    if validate_functor(functor):
        raise HypothesisError("not a functor")
    base_map = []
    for c in range(E.base.n_mor):
        images = {E2.proj(functor(d)) for d in E.fibre(c)}
        if len(images) != 1:
            raise HypothesisError(f"functor does not descend to the base at {c}")
        base_map.append(images.pop())
    psi = CatFunctor(E.base, E2.base, dict(functor.obj_map), base_map)
    comps = {}
    for X in E.base.objects:
        G = E.coeff.on_obj[X]
        Y = psi.on_obj(X)
        H = E2.coeff.on_obj[Y]
        cols = []
        for i in range(G.ngens):
            h = E2.element_of(functor(E.inject(X, G.basis_vector(i))))
            if h is None or E2.total.src(functor(E.inject(X, G.basis_vector(i)))) != Y:
                raise HypothesisError(f"<g> at {X} is not sent into the coefficients")
            cols.append(h)
        try:
            hom = AbHom(G, H, [[c[r] for c in cols] for r in range(H.ngens)])
        except ValueError:
            raise HypothesisError(f"induced map at {X} is not a homomorphism") from None
        for g in G.elements():
            if E2.element_of(functor(E.inject(X, g))) != hom(g):
                raise HypothesisError(f"functor is not additive on coefficients at {X}")
        comps[X] = hom
    eta = NatTrans(E.coeff, E2.coeff, comps, psi)
    if validate_nat_trans(eta):
        raise HypothesisError("induced transformation is not natural")
    return ExtMorphism(E, E2, functor, psi, eta)


def eta_of(M: ExtMorphism) -> NatTrans:
    """The transformation with ``<eta_X(g)> = M(<g>)``, recomputed from the functor alone."""
    return morphism_from_functor(M.src, M.dst, M.functor).eta


def inner_automorphism(E: Extension, u: Mapping[Obj, Sequence[int]]) -> ExtMorphism:
    """``d -> <u(Y)>∘d∘<-u(X)>`` for ``d: X -> Y``."""
    D = E.total
    mor = []
    for d in range(D.n_mor):
        X, Y = D.src(d), D.dst(d)
        neg = E.coeff.on_obj[X].neg(u[X])
        mor.append(D.compose(E.inject(Y, u[Y]), D.compose(d, E.inject(X, neg))))
    return ExtMorphism(E, E, CatFunctor(D, D, {X: X for X in D.objects}, mor),
                       CatFunctor.identity(E.base), NatTrans.identity(E.coeff))


def automorphism_from_cocycle(E: Extension, z: Cochain) -> ExtMorphism:
    """``alpha_z: d -> <z([d])>∘d`` for a 1-cocycle ``z``."""
    if z.degree != 1 or not is_cocycle(z):
        raise HypothesisError("expected a 1-cocycle")
    mor = [E.act(z[(E.proj(d),)], d) for d in range(E.total.n_mor)]
    D = E.total
    return ExtMorphism(E, E, CatFunctor(D, D, {X: X for X in D.objects}, mor),
                       CatFunctor.identity(E.base), NatTrans.identity(E.coeff))


@dataclass
class AutModInner:
    """``H^1(base, coeff)`` realized as automorphisms over ``(id, id)`` modulo inner ones."""

    extension: Extension
    group: PresentedAbGroup
    generators: list[Cochain]

    def automorphism(self, coords: Sequence[int]) -> ExtMorphism:
        z = Cochain.zero(self.extension.coeff, 1)
        for a, g in zip(coords, self.generators):
            z = z + g.scale(a)
        return automorphism_from_cocycle(self.extension, z)

    @property
    def generator_automorphisms(self) -> list[ExtMorphism]:
        return [automorphism_from_cocycle(self.extension, g) for g in self.generators]


def aut_id_id_mod_inner(E: Extension) -> AutModInner:
    H = cohomology(E.base, E.coeff, 1)
    return AutModInner(E, H.group, list(H.generators))


def restrict_extension(E: Extension, objs: Sequence[Obj]) -> Extension:
    """The full-subcategory extension on ``objs``."""
    if not objs:
        raise ValueError("restriction needs at least one object")
    tsub, told = full_subcategory(E.total, objs)
    bsub, bold = full_subcategory(E.base, objs)
    bnew = {f: i for i, f in enumerate(bold)}
    tnew = {f: i for i, f in enumerate(told)}
    coeff = E.coeff.restrict(bsub, bold)
    proj = CatFunctor(tsub, bsub, {X: X for X in tsub.objects},
                      [bnew[E.proj(d)] for d in told])
    delta = {X: {g: tnew[d] for g, d in E.delta[X].items()} for X in tsub.objects}
    return Extension(tsub, bsub, coeff, proj, delta)


def restrict_class(E: Extension, objs: Sequence[Obj], x: CohomologyClass,
                   sub: Extension | None = None) -> CohomologyClass:
    """Pull a class on ``E.base`` back to the full subcategory on ``objs``."""
    sub = sub or restrict_extension(E, objs)
    _, bold = full_subcategory(E.base, objs)
    inc = inclusion_functor(sub.base, E.base, bold)
    return CohomologyClass(pullback(x.representative, inc, sub.coeff))


def all_regular_2cocycles(coeff: AbFunctor) -> list[Cochain]:
    """Exhaustive list of regular 2-cocycles (small bases only)."""
    import itertools
    C = coeff.base
    cx = complex_of(coeff)
    free = [ch for ch in cx.chains(2) if not any(C.is_identity(c) for c in ch)]
    spaces = [list(cx.target(ch).elements()) for ch in free]
    out = []
    for vals in itertools.product(*spaces):
        z = Cochain.from_mapping(coeff, 2, dict(zip(free, vals)))
        if is_cocycle(z):
            out.append(z)
    return out

"""Finite categories with explicit composition tables, and functors out of them.

Morphisms carry dense integer ids ``0..M-1``; every deterministic ordering in
the package (chains, sections, witnesses) derives from those ids.  Validation
is explicit: constructors accept any table, and ``validate_*`` functions
report what is wrong as data.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Mapping, Sequence

from .abgrp import AbHom, PresentedAbGroup

Obj = Hashable
Chain = tuple[int, ...]


@dataclass(frozen=True)
class Violation:
    """One failed axiom, with the offending data as ``witness``."""

    kind: str
    witness: tuple
    detail: str = ""

    def to_json(self) -> dict:
        return {"kind": self.kind, "witness": _jsonable(self.witness), "detail": self.detail}


def _jsonable(x):
    if isinstance(x, (tuple, list)):
        return [_jsonable(a) for a in x]
    return x


class FinCat:
    """A finite category.

    ``morphisms`` is a sequence of ``(id, src, dst)`` with ids ``0..M-1``;
    ``comp`` maps composable pairs ``(g, f)`` to the id of ``g∘f``.
    """

    def __init__(self, objects: Sequence[Obj], morphisms: Sequence[tuple[int, Obj, Obj]],
                 identity: Mapping[Obj, int], comp: Mapping[tuple[int, int], int],
                 labels: Sequence[str] | None = None):
        self.objects = tuple(objects)
        mors = sorted((int(i), s, t) for i, s, t in morphisms)
        if [m[0] for m in mors] != list(range(len(mors))):
            raise ValueError("morphism ids must be exactly 0..M-1")
        self.sources = tuple(m[1] for m in mors)
        self.targets = tuple(m[2] for m in mors)
        self.identity = dict(identity)
        self.comp = {(int(g), int(f)): int(h) for (g, f), h in comp.items()}
        self.labels = tuple(labels) if labels is not None else None

    @property
    def n_mor(self) -> int:
        return len(self.sources)

    @property
    def morphisms(self) -> list[tuple[int, Obj, Obj]]:
        return [(i, self.sources[i], self.targets[i]) for i in range(self.n_mor)]

    def src(self, f: int) -> Obj:
        return self.sources[f]

    def dst(self, f: int) -> Obj:
        return self.targets[f]

    def compose(self, g: int, f: int) -> int:
        """``g∘f`` (apply ``f`` first)."""
        try:
            return self.comp[(g, f)]
        except KeyError:
            raise ValueError(f"morphisms {g} and {f} are not composable") from None

    def is_identity(self, f: int) -> bool:
        return self.identity.get(self.sources[f]) == f

    @cached_property
    def _homs(self) -> dict[tuple[Obj, Obj], tuple[int, ...]]:
        out: dict[tuple[Obj, Obj], list[int]] = {}
        for i in range(self.n_mor):
            out.setdefault((self.sources[i], self.targets[i]), []).append(i)
        return {k: tuple(v) for k, v in out.items()}

    def hom(self, X: Obj, Y: Obj) -> tuple[int, ...]:
        return self._homs.get((X, Y), ())

    @cached_property
    def _out(self) -> dict[Obj, tuple[int, ...]]:
        out: dict[Obj, list[int]] = {X: [] for X in self.objects}
        for i in range(self.n_mor):
            out.setdefault(self.sources[i], []).append(i)
        return {k: tuple(v) for k, v in out.items()}

    def out_of(self, X: Obj) -> tuple[int, ...]:
        return self._out.get(X, ())

    def chains(self, n: int) -> list:
        return chains(self, n)

    def label(self, f: int) -> str:
        return self.labels[f] if self.labels else str(f)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinCat):
            return NotImplemented
        return (self.objects == other.objects and self.sources == other.sources
                and self.targets == other.targets and self.identity == other.identity
                and self.comp == other.comp)

    __hash__ = None

    def __repr__(self) -> str:
        return f"FinCat({len(self.objects)} objects, {self.n_mor} morphisms)"

    def to_json(self) -> dict:
        out = {
            "objects": list(self.objects),
            "morphisms": [{"id": i, "src": s, "dst": t} for i, s, t in self.morphisms],
            "identity": {str(X): f for X, f in self.identity.items()},
            "comp": [[g, f, h] for (g, f), h in sorted(self.comp.items())],
        }
        if self.labels:
            out["labels"] = list(self.labels)
        return out

    @classmethod
    def from_json(cls, data: dict) -> FinCat:
        objects = [str(X) for X in data["objects"]]
        morphisms = [(int(m["id"]), str(m["src"]), str(m["dst"])) for m in data["morphisms"]]
        identity = {str(X): int(f) for X, f in data["identity"].items()}
        comp = {(int(g), int(f)): int(h) for g, f, h in data["comp"]}
        return cls(objects, morphisms, identity, comp, data.get("labels"))


def validate_category(C: FinCat) -> list[Violation]:
    """All identity, closure and associativity failures of ``C`` (empty if valid)."""
    out: list[Violation] = []
    objs = set(C.objects)
    for f in range(C.n_mor):
        if C.sources[f] not in objs or C.targets[f] not in objs:
            out.append(Violation("unknown-object", (f,), "morphism endpoint is not an object"))
    for X in C.objects:
        i = C.identity.get(X)
        if i is None or not 0 <= i < C.n_mor or C.sources[i] != X or C.targets[i] != X:
            out.append(Violation("identity", (X,), "object lacks an endomorphism identity"))
    for (g, f), h in sorted(C.comp.items()):
        if not (0 <= g < C.n_mor and 0 <= f < C.n_mor and 0 <= h < C.n_mor):
            out.append(Violation("unknown-morphism", (g, f, h)))
        elif C.targets[f] != C.sources[g]:
            out.append(Violation("not-composable", (g, f), "composite given for a non-composable pair"))
        elif C.sources[h] != C.sources[f] or C.targets[h] != C.targets[g]:
            out.append(Violation("endpoints", (g, f, h), "composite has wrong source or target"))
    if out:
        return out
    for f in range(C.n_mor):
        for g in C.out_of(C.targets[f]):
            if (g, f) not in C.comp:
                out.append(Violation("missing-composite", (g, f)))
    if out:
        return out
    for f in range(C.n_mor):
        if C.comp[(C.identity[C.targets[f]], f)] != f or C.comp[(f, C.identity[C.sources[f]])] != f:
            out.append(Violation("unit", (f,), "identity law fails"))
    for f in range(C.n_mor):
        for g in C.out_of(C.targets[f]):
            gf = C.comp[(g, f)]
            for h in C.out_of(C.targets[g]):
                if C.comp[(h, gf)] != C.comp[(C.comp[(h, g)], f)]:
                    out.append(Violation("associativity", (h, g, f)))
    return out


def one_object_cat(table: Sequence[Sequence[int]], name: Obj = "*",
                   labels: Sequence[str] | None = None) -> FinCat:
    """The one-object category of a finite group given by its multiplication table.

    ``table[a][b]`` is the product ``a*b``; composition is ``g∘f = g*f``.
    Raises ValueError naming the first failing group axiom.
    """
    n = len(table)
    if any(len(row) != n or any(not 0 <= x < n for x in row) for row in table):
        raise ValueError("closure: table is not an n x n table on 0..n-1")
    for a, b, c in itertools.product(range(n), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            raise ValueError(f"associativity fails at {(a, b, c)}")
    e = next((e for e in range(n) if all(table[e][x] == x == table[x][e] for x in range(n))), None)
    if e is None:
        raise ValueError("identity: no two-sided identity element")
    for a in range(n):
        if not any(table[a][b] == e == table[b][a] for b in range(n)):
            raise ValueError(f"inverses: element {a} has no inverse")
    comp = {(g, f): table[g][f] for g in range(n) for f in range(n)}
    return FinCat([name], [(i, name, name) for i in range(n)], {name: e}, comp, labels)


def group_table_of(C: FinCat) -> list[list[int]]:
    """Multiplication table of a one-object category."""
    if len(C.objects) != 1:
        raise ValueError("not a one-object category")
    n = C.n_mor
    return [[C.comp[(a, b)] for b in range(n)] for a in range(n)]


def poset_cat(objects: Sequence[Obj], leq: Sequence[tuple[Obj, Obj]]) -> FinCat:
    """The category of a finite poset; ``leq`` generates the order relation."""
    objects = list(objects)
    rel = {(x, x) for x in objects} | {tuple(p) for p in leq}
    changed = True
    while changed:
        extra = {(a, d) for a, b in rel for c, d in rel if b == c} - rel
        rel |= extra
        changed = bool(extra)
    pairs = sorted(rel, key=lambda p: (objects.index(p[0]), objects.index(p[1])))
    ids = {p: i for i, p in enumerate(pairs)}
    comp = {(ids[(b, c)], ids[(a, b)]): ids[(a, c)] for (a, b) in pairs for (b2, c) in pairs if b == b2}
    return FinCat(objects, [(ids[p], p[0], p[1]) for p in pairs],
                  {x: ids[(x, x)] for x in objects}, comp)


def chains(C: FinCat, n: int) -> list:
    """All ``n``-chains ``(c0, ..., c_{n-1})`` with ``c0`` applied first.

    The order is lexicographic in morphism ids; 0-chains are the objects.
    """
    if n < 0:
        raise ValueError("chain length must be nonnegative")
    cache = C.__dict__.setdefault("_chain_cache", {})
    if n not in cache:
        if n == 0:
            cache[n] = list(C.objects)
        else:
            out = [(f,) for f in range(C.n_mor)]
            for _ in range(n - 1):
                out = [ch + (g,) for ch in out for g in C.out_of(C.targets[ch[-1]])]
            cache[n] = out
    return cache[n]


def chain_target(C: FinCat, ch) -> Obj:
    return C.targets[ch[-1]] if isinstance(ch, tuple) else ch


# ---------------------------------------------------------------------------
# functors


class CatFunctor:
    """A functor between finite categories."""

    def __init__(self, src: FinCat, dst: FinCat, obj_map: Mapping[Obj, Obj],
                 mor_map: Sequence[int]):
        self.src = src
        self.dst = dst
        self.obj_map = dict(obj_map)
        self.mor_map = tuple(int(x) for x in mor_map)
        if len(self.mor_map) != src.n_mor:
            raise ValueError("morphism map must cover every morphism of the source")

    def __call__(self, f: int) -> int:
        return self.mor_map[f]

    def on_obj(self, X: Obj) -> Obj:
        return self.obj_map[X]

    @classmethod
    def identity(cls, C: FinCat) -> CatFunctor:
        return cls(C, C, {X: X for X in C.objects}, range(C.n_mor))

    def compose(self, other: CatFunctor) -> CatFunctor:
        """``self after other``."""
        return CatFunctor(other.src, self.dst, {X: self.obj_map[Y] for X, Y in other.obj_map.items()},
                          [self.mor_map[f] for f in other.mor_map])

    def is_identity(self) -> bool:
        return (self.src is self.dst or self.src == self.dst) and \
            self.mor_map == tuple(range(self.src.n_mor)) and \
            all(self.obj_map[X] == X for X in self.src.objects)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CatFunctor):
            return NotImplemented
        return self.obj_map == other.obj_map and self.mor_map == other.mor_map

    __hash__ = None

    def to_json(self) -> dict:
        return {"objects": {str(X): Y for X, Y in self.obj_map.items()}, "morphisms": list(self.mor_map)}


def validate_functor(F: CatFunctor) -> list[Violation]:
    out = []
    C, D = F.src, F.dst
    for X in C.objects:
        if X not in F.obj_map or F.obj_map[X] not in D.objects:
            out.append(Violation("object-map", (X,)))
            return out
    for f in range(C.n_mor):
        g = F.mor_map[f]
        if not 0 <= g < D.n_mor or D.sources[g] != F.obj_map[C.sources[f]] \
                or D.targets[g] != F.obj_map[C.targets[f]]:
            out.append(Violation("endpoints", (f,), "image has wrong source or target"))
    if out:
        return out
    for X in C.objects:
        if F.mor_map[C.identity[X]] != D.identity[F.obj_map[X]]:
            out.append(Violation("identity", (X,)))
    for (g, f), h in C.comp.items():
        if F.mor_map[h] != D.comp[(F.mor_map[g], F.mor_map[f])]:
            out.append(Violation("composition", (g, f)))
    return out


class AbFunctor:
    """A functor from a finite category to presented abelian groups."""

    def __init__(self, base: FinCat, on_obj: Mapping[Obj, PresentedAbGroup],
                 on_mor: Sequence[AbHom]):
        self.base = base
        self.on_obj = dict(on_obj)
        self.on_mor = tuple(on_mor)
        if len(self.on_mor) != base.n_mor:
            raise ValueError("a homomorphism is needed for every morphism")

    def __call__(self, f: int) -> AbHom:
        return self.on_mor[f]

    def obj(self, X: Obj) -> PresentedAbGroup:
        return self.on_obj[X]

    @classmethod
    def constant(cls, C: FinCat, G: PresentedAbGroup) -> AbFunctor:
        """The constant functor (trivial action) with value ``G``."""
        ident = AbHom.identity(G)
        return cls(C, {X: G for X in C.objects}, [ident] * C.n_mor)

    @classmethod
    def from_matrices(cls, C: FinCat, on_obj: Mapping[Obj, PresentedAbGroup],
                      matrices: Mapping[int, Sequence[Sequence[int]]]) -> AbFunctor:
        """Build from one matrix per morphism; missing morphisms act as identity matrices."""
        homs = []
        for f in range(C.n_mor):
            A, B = on_obj[C.sources[f]], on_obj[C.targets[f]]
            M = matrices.get(f)
            if M is None:
                M = [[int(i == j) for j in range(A.ngens)] for i in range(B.ngens)]
            homs.append(AbHom(A, B, M))
        return cls(C, on_obj, homs)

    def precompose(self, F: CatFunctor) -> AbFunctor:
        """``self∘F``, a functor on ``F.src``."""
        return AbFunctor(F.src, {X: self.on_obj[F.obj_map[X]] for X in F.src.objects},
                         [self.on_mor[F.mor_map[f]] for f in range(F.src.n_mor)])

    def restrict(self, sub: FinCat, inclusion: Sequence[int]) -> AbFunctor:
        return AbFunctor(sub, {X: self.on_obj[X] for X in sub.objects},
                         [self.on_mor[inclusion[f]] for f in range(sub.n_mor)])

    def is_trivial_action(self) -> bool:
        return all(h.same_map(AbHom.identity(h.src)) for h in self.on_mor if h.src == h.dst)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AbFunctor):
            return NotImplemented
        if self is other:
            return True
        return (self.base == other.base and self.on_obj == other.on_obj
                and all(a == b for a, b in zip(self.on_mor, other.on_mor)))

    __hash__ = None

    def to_json(self) -> dict:
        return {"objects": {str(X): G.to_json() for X, G in self.on_obj.items()},
                "morphisms": {str(f): h.to_json() for f, h in enumerate(self.on_mor)}}

    @classmethod
    def from_json(cls, C: FinCat, data: dict) -> AbFunctor:
        on_obj = {X: PresentedAbGroup.from_json(data["objects"][str(X)]) for X in C.objects}
        mats = {int(f): M for f, M in data.get("morphisms", {}).items()}
        return cls.from_matrices(C, on_obj, mats)


def validate_abfunctor(F: AbFunctor) -> list[Violation]:
    C = F.base
    out = []
    for f in range(C.n_mor):
        h = F.on_mor[f]
        if h.src != F.on_obj[C.sources[f]] or h.dst != F.on_obj[C.targets[f]]:
            out.append(Violation("endpoints", (f,), "homomorphism groups do not match the objects"))
    if out:
        return out
    for X in C.objects:
        if not F.on_mor[C.identity[X]].same_map(AbHom.identity(F.on_obj[X])):
            out.append(Violation("identity", (X,)))
    for (g, f), h in sorted(C.comp.items()):
        if not F.on_mor[h].same_map(F.on_mor[g] @ F.on_mor[f]):
            out.append(Violation("composition", (g, f)))
    return out


class NatTrans:
    """A natural transformation ``source -> target∘along``.

    ``along`` is a functor from ``source.base`` to ``target.base``; when
    omitted the two bases coincide and ``along`` is the identity.
    """

    def __init__(self, source: AbFunctor, target: AbFunctor,
                 components: Mapping[Obj, AbHom], along: CatFunctor | None = None):
        self.source = source
        self.target = target
        self.along = along if along is not None else CatFunctor.identity(source.base)
        self.components = dict(components)

    def __getitem__(self, X: Obj) -> AbHom:
        return self.components[X]

    @property
    def pulled_target(self) -> AbFunctor:
        """``target∘along``, the functor the components actually land in."""
        if self.along.is_identity() and self.target.base == self.source.base:
            return self.target
        return self.target.precompose(self.along)

    @classmethod
    def identity(cls, F: AbFunctor) -> NatTrans:
        return cls(F, F, {X: AbHom.identity(G) for X, G in F.on_obj.items()})

    def then(self, other: NatTrans) -> NatTrans:
        """Vertical composite ``other∘self`` over a common base."""
        return NatTrans(self.source, other.target,
                        {X: other.components[X] @ self.components[X] for X in self.components})

    def same_as(self, other: NatTrans) -> bool:
        return all(self.components[X].same_map(other.components[X]) for X in self.components)

    def is_identity(self) -> bool:
        return all(h.same_map(AbHom.identity(h.src)) for h in self.components.values())

    def to_json(self) -> dict:
        return {str(X): h.to_json() for X, h in self.components.items()}


def validate_nat_trans(eta: NatTrans) -> list[Violation]:
    C = eta.source.base
    tgt = eta.pulled_target
    out = []
    for X in C.objects:
        h = eta.components.get(X)
        if h is None or h.src != eta.source.on_obj[X] or h.dst != tgt.on_obj[X]:
            out.append(Violation("component", (X,), "missing or mistyped component"))
    if out:
        return out
    for f in range(C.n_mor):
        X, Y = C.sources[f], C.targets[f]
        lhs = tgt.on_mor[f] @ eta.components[X]
        rhs = eta.components[Y] @ eta.source.on_mor[f]
        if not lhs.same_map(rhs):
            out.append(Violation("naturality", (f,)))
    return out


def scalar_nat_trans(F: AbFunctor, zeta: int) -> NatTrans:
    """Multiplication by ``zeta`` on every value of ``F``."""
    return NatTrans(F, F, {X: AbHom.scalar(G, zeta) for X, G in F.on_obj.items()})


def full_subcategory(C: FinCat, objs: Sequence[Obj]) -> tuple[FinCat, list[int]]:
    """The full subcategory on ``objs`` and the list of original ids of its morphisms."""
    keep_objs = [X for X in C.objects if X in set(objs)]
    if not keep_objs:
        raise ValueError("a full subcategory needs at least one object")
    inside = set(keep_objs)
    old = [f for f in range(C.n_mor) if C.sources[f] in inside and C.targets[f] in inside]
    new = {f: i for i, f in enumerate(old)}
    comp = {(new[g], new[f]): new[h] for (g, f), h in C.comp.items() if g in new and f in new}
    labels = [C.labels[f] for f in old] if C.labels else None
    sub = FinCat(keep_objs, [(new[f], C.sources[f], C.targets[f]) for f in old],
                 {X: new[C.identity[X]] for X in keep_objs}, comp, labels)
    return sub, old


def inclusion_functor(sub: FinCat, C: FinCat, old_ids: Sequence[int]) -> CatFunctor:
    return CatFunctor(sub, C, {X: X for X in sub.objects}, old_ids)

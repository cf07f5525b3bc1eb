"""Small groups, categories and coefficient functors used by the tests and the CLI."""

from __future__ import annotations

import itertools
from typing import Sequence

from .abgrp import AbHom, PresentedAbGroup
from .fincat import AbFunctor, FinCat, one_object_cat, poset_cat

Table = list[list[int]]


def cyclic_table(n: int) -> Table:
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def product_table(A: Table, B: Table) -> Table:
    """Direct product; the element ``(a, b)`` has index ``a * |B| + b``."""
    m = len(B)
    return [[A[x // m][y // m] * m + B[x % m][y % m] for y in range(len(A) * m)]
            for x in range(len(A) * m)]


def perm_group_table(perms: Sequence[tuple[int, ...]]) -> Table:
    """Table of a list of permutations closed under composition; ``a*b`` applies ``b`` first."""
    index = {p: i for i, p in enumerate(perms)}
    return [[index[tuple(a[b[x]] for x in range(len(a)))] for b in perms] for a in perms]


def symmetric_table(n: int) -> Table:
    return perm_group_table(list(itertools.permutations(range(n))))


def dihedral_table(n: int) -> Table:
    """Dihedral group of order ``2n``: ``r^i s^j`` has index ``2i + j``."""
    def mul(x, y):
        i, j = divmod(x, 2)
        k, l = divmod(y, 2)
        return (((i + (-k if j else k)) % n) * 2) + (j ^ l)
    return [[mul(x, y) for y in range(2 * n)] for x in range(2 * n)]


def quaternion_table() -> Table:
    """Q8 as ``±1, ±i, ±j, ±k`` with indices ``2u + s`` (``u`` in 1,i,j,k and ``s`` the sign bit)."""
    units = {(0, 0): (0, 0), (0, 1): (1, 0), (0, 2): (2, 0), (0, 3): (3, 0),
             (1, 0): (1, 0), (1, 1): (0, 1), (1, 2): (3, 0), (1, 3): (2, 1),
             (2, 0): (2, 0), (2, 1): (3, 1), (2, 2): (0, 1), (2, 3): (1, 0),
             (3, 0): (3, 0), (3, 1): (2, 0), (3, 2): (1, 1), (3, 3): (0, 1)}

    def mul(x, y):
        u, s = divmod(x, 2)
        v, t = divmod(y, 2)
        w, sign = units[(u, v)]
        return 2 * w + (s ^ t ^ sign)
    return [[mul(x, y) for y in range(8)] for x in range(8)]


def group_inverse(table: Table, a: int) -> int:
    e = identity_of(table)
    return next(b for b in range(len(table)) if table[a][b] == e)


def identity_of(table: Table) -> int:
    return next(e for e in range(len(table)) if all(table[e][x] == x for x in range(len(table))))


def module_functor(table: Table, G: PresentedAbGroup,
                   action: Sequence[Sequence[Sequence[int]]] | None = None,
                   name: str = "*") -> AbFunctor:
    """Coefficients on the one-object category of ``table``; ``action[g]`` is a matrix."""
    C = one_object_cat(table, name)
    if action is None:
        return AbFunctor.constant(C, G)
    return AbFunctor(C, {name: G}, [AbHom(G, G, action[g]) for g in range(len(table))])


def sign_action(n_elements_table: Table, sign_of: Sequence[int], rank: int) -> list:
    """Scalar action ``g -> sign_of[g] * I``."""
    return [[[s * int(i == j) for j in range(rank)] for i in range(rank)] for s in sign_of]


def c2_torus(p: int, k: int, r: int) -> AbFunctor:
    """``C2`` acting by negation on ``(Z/p^k)^r``."""
    T = PresentedAbGroup.from_invariants([p ** k] * r)
    return module_functor(cyclic_table(2), T, sign_action(cyclic_table(2), [1, -1], r))


def poset_chain(n: int) -> FinCat:
    """The poset ``0 < 1 < ... < n-1``."""
    objs = [str(i) for i in range(n)]
    return poset_cat(objs, [(objs[i], objs[i + 1]) for i in range(n - 1)])


def group_extension(total_table: Table, base_table: Table, proj: Sequence[int],
                    kernel: PresentedAbGroup, embed) -> "Extension":
    """The one-object extension of a group extension ``kernel -> total -> base``.

    ``embed`` maps each canonical element of ``kernel`` to its index in the
    total group; the coefficient action is conjugation through any lift.
    """
    from .extension import Extension
    from .fincat import CatFunctor
    D = one_object_cat(total_table)
    C = one_object_cat(base_table)
    embed = {kernel.reduce(g): x for g, x in dict(embed).items()}
    back = {x: g for g, x in embed.items()}
    inv = [group_inverse(total_table, x) for x in range(len(total_table))]
    mats = []
    for q in range(len(base_table)):
        lift = proj.index(q)
        cols = []
        for i in range(kernel.ngens):
            x = embed[kernel.basis_vector(i)]
            conj = total_table[total_table[lift][x]][inv[lift]]
            if conj not in back:
                raise ValueError("kernel is not normal")
            cols.append(back[conj])
        mats.append([[c[r] for c in cols] for r in range(kernel.ngens)])
    coeff = AbFunctor(C, {"*": kernel}, [AbHom(kernel, kernel, m, check=False) for m in mats])
    return Extension(D, C, coeff, CatFunctor(D, C, {"*": "*"}, list(proj)), {"*": embed})


def cyclic_extension(n: int, m: int) -> "Extension":
    """``Z/n -> Z/nm -> Z/m`` with ``a -> a*m``."""
    return group_extension(cyclic_table(n * m), cyclic_table(m), [x % m for x in range(n * m)],
                           PresentedAbGroup.cyclic(n), {(a,): a * m for a in range(n)})


def split_product_extension(n: int, m: int) -> "Extension":
    """``Z/n -> Z/n x Z/m -> Z/m``."""
    return group_extension(product_table(cyclic_table(n), cyclic_table(m)), cyclic_table(m),
                           [x % m for x in range(n * m)], PresentedAbGroup.cyclic(n),
                           {(a,): a * m for a in range(n)})


def _v4_table() -> Table:
    return product_table(cyclic_table(2), cyclic_table(2))


def dihedral_over_v4() -> "Extension":
    """``D4`` as a central extension of ``Z/2 x Z/2`` by its centre ``{1, r^2}``."""
    proj = [((x // 2) % 2) * 2 + x % 2 for x in range(8)]
    return group_extension(dihedral_table(4), _v4_table(), proj,
                           PresentedAbGroup.cyclic(2), {(0,): 0, (1,): 4})


def quaternion_over_v4() -> "Extension":
    """``Q8`` as a central extension of ``Z/2 x Z/2`` by ``{±1}``."""
    image = {0: 0, 1: 2, 2: 1, 3: 3}
    return group_extension(quaternion_table(), _v4_table(), [image[x // 2] for x in range(8)],
                           PresentedAbGroup.cyclic(2), {(0,): 0, (1,): 1})


def dihedral_over_c2() -> "Extension":
    """``D4`` over ``Z/2`` with kernel the rotations ``Z/4``; ``s`` acts by negation."""
    return group_extension(dihedral_table(4), cyclic_table(2), [x % 2 for x in range(8)],
                           PresentedAbGroup.cyclic(4), {(a,): 2 * a for a in range(4)})


def fork_category() -> FinCat:
    """Objects ``x, y``; ``End(x) = {1, t}`` with ``t^2 = 1``, one arrow ``f: x -> y`` with ``f t = f``."""
    mors = [(0, "x", "x"), (1, "x", "x"), (2, "y", "y"), (3, "x", "y")]
    comp = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0, (2, 2): 2,
            (3, 0): 3, (3, 1): 3, (2, 3): 3}
    return FinCat(["x", "y"], mors, {"x": 0, "y": 2}, comp, ["1x", "t", "1y", "f"])


def fork_coefficients() -> AbFunctor:
    """``Z/4`` at ``x`` with ``t`` acting by ``-1``, ``Z/2`` at ``y``, ``f`` reduction mod 2."""
    C = fork_category()
    Z4, Z2 = PresentedAbGroup.cyclic(4), PresentedAbGroup.cyclic(2)
    return AbFunctor(C, {"x": Z4, "y": Z2},
                     [AbHom.identity(Z4), AbHom.scalar(Z4, -1), AbHom.identity(Z2),
                      AbHom(Z4, Z2, [[1]])])


def parallel_pair() -> FinCat:
    """Objects ``a, b`` with two arrows ``f, g: a -> b``; its nerve is a circle."""
    mors = [(0, "a", "a"), (1, "b", "b"), (2, "a", "b"), (3, "a", "b")]
    comp = {(0, 0): 0, (1, 1): 1, (2, 0): 2, (3, 0): 3, (1, 2): 2, (1, 3): 3}
    return FinCat(["a", "b"], mors, {"a": 0, "b": 1}, comp, ["1a", "1b", "f", "g"])


def ptoral_cyclic(p: int, k: int, q: int):
    """``Z/p^k -> Z/(q p^k) -> Z/q`` with trivial action and the carry cocycle."""
    from .adams import PToralData
    coc = {(x, y): (1,) for x in range(q) for y in range(q) if x + y >= q}
    return PToralData(p, k, 1, cyclic_table(q), [[[1]]] * q, coc)


def ptoral_split(p: int, k: int, pi: Table, signs: Sequence[int], rank: int = 1):
    """``T_k ⋊ pi`` with ``x`` acting by the scalar ``signs[x]``."""
    from .adams import PToralData
    return PToralData(p, k, rank, pi, sign_action(pi, signs, rank))


def ptoral_quaternion(k: int = 2):
    """Generalized quaternion group: ``Z/2^k`` with ``x`` acting by ``-1`` and ``x^2 = 2^(k-1)``."""
    from .adams import PToralData
    return PToralData(2, k, 1, cyclic_table(2), [[[1]], [[-1]]], {(1, 1): (2 ** (k - 1),)})

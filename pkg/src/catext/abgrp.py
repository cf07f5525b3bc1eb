"""Finitely generated abelian groups given by generators and relations.

A group is ``Z^n`` modulo the span of a list of relator columns.  Elements are
integer vectors of length ``n``; homomorphisms act by left multiplication with
an integer matrix.  Everything is exact: Python integers never overflow.

Two reduction engines live here.  A sparse Hermite echelon (Euclidean row
reduction on dictionary rows) backs kernels, solving and canonical forms; a
dense Smith normal form with tracked transforms backs invariant factors and
diagonal simplification.

>>> G = PresentedAbGroup(2, [(2, 0), (0, 3)])
>>> invariant_factors(G)
[6]
>>> G.reduce((5, -1))
(1, 2)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Iterable, Iterator, Sequence

Vector = tuple[int, ...]
Matrix = list[list[int]]


# ---------------------------------------------------------------------------
# sparse Hermite echelon


def _axpy(row: dict[int, int], q: int, other: dict[int, int]) -> None:
    """In place ``row -= q * other``."""
    for k, v in other.items():
        nv = row.get(k, 0) - q * v
        if nv:
            row[k] = nv
        else:
            row.pop(k, None)


def _echelon(rows: Iterable[dict[int, int]], npivot: int):
    """Row reduce sparse rows over Z on the columns ``< npivot``.

    Returns ``(pivots, rest)``.  ``pivots`` is a list of ``(col, row)`` with
    strictly increasing pivot columns and positive pivot entries; ``rest``
    holds the reduced rows supported on columns ``>= npivot``.  Zero rows are
    dropped.  Both lists span the same lattice as the input together.
    """
    buckets: dict[int, list[dict[int, int]]] = {}
    rest: list[dict[int, int]] = []

    def file(r: dict[int, int]) -> None:
        if not r:
            return
        lead = min(r)
        if lead >= npivot:
            rest.append(r)
        else:
            buckets.setdefault(lead, []).append(r)

    for r in rows:
        file({k: v for k, v in r.items() if v})

    pivots: list[tuple[int, dict[int, int]]] = []
    for col in range(npivot):
        cand = buckets.pop(col, None)
        if not cand:
            continue
        while len(cand) > 1:
            cand.sort(key=lambda r: (abs(r[col]), len(r)))
            piv = cand[0]
            keep = [piv]
            for r in cand[1:]:
                _axpy(r, r[col] // piv[col], piv)
                if col in r:
                    keep.append(r)
                else:
                    file(r)
            cand = keep
        piv = cand[0]
        if piv[col] < 0:
            for k in piv:
                piv[k] = -piv[k]
        pivots.append((col, piv))
    return pivots, rest


def _hermite(pivots: list[tuple[int, dict[int, int]]]) -> None:
    """Reduce entries above each pivot into ``[0, pivot)`` in place."""
    for j, (cj, bj) in enumerate(pivots):
        d = bj[cj]
        for i in range(j):
            bi = pivots[i][1]
            v = bi.get(cj)
            if v:
                q = v // d
                if q:
                    _axpy(bi, q, bj)


class _Lattice:
    """A sublattice of ``Z^dim`` held in Hermite normal form."""

    def __init__(self, dim: int, gens: Iterable[dict[int, int]]):
        self.dim = dim
        pivots, _ = _echelon(gens, dim)
        _hermite(pivots)
        self.pivots = pivots

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def basis(self) -> list[Vector]:
        return [_dense(row, self.dim) for _, row in self.pivots]

    def reduce(self, v: dict[int, int]) -> dict[int, int]:
        """Canonical representative of ``v`` modulo the lattice."""
        v = dict(v)
        for col, row in self.pivots:
            x = v.get(col)
            if x:
                q = x // row[col]
                if q:
                    _axpy(v, q, row)
        return v

    def coords(self, v: dict[int, int]) -> list[int] | None:
        """Coefficients of ``v`` in the Hermite basis, or None if outside."""
        v = dict(v)
        out = []
        for col, row in self.pivots:
            x = v.get(col, 0)
            if x % row[col]:
                return None
            q = x // row[col]
            if q:
                _axpy(v, q, row)
            out.append(q)
        return None if v else out


def _sparse(v: Sequence[int]) -> dict[int, int]:
    return {i: x for i, x in enumerate(v) if x}


def _dense(v: dict[int, int], n: int) -> Vector:
    out = [0] * n
    for i, x in v.items():
        out[i] = x
    return tuple(out)


# ---------------------------------------------------------------------------
# Smith normal form


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _smith(M: Sequence[Sequence[int]], ncols: int | None = None):
    """Smith form with transforms: returns ``(U, D, V, Uinv, Vinv)``."""
    A = [list(r) for r in M]
    n = len(A)
    m = len(A[0]) if n else (ncols or 0)
    U, Ui, V, Vi = _identity(n), _identity(n), _identity(m), _identity(m)

    def row_op(i: int, t: int, q: int) -> None:  # row_i -= q row_t
        A[i] = [a - q * b for a, b in zip(A[i], A[t])]
        U[i] = [a - q * b for a, b in zip(U[i], U[t])]
        for r in Ui:
            r[t] += q * r[i]

    def col_op(j: int, t: int, q: int) -> None:  # col_j -= q col_t
        for r in A:
            r[j] -= q * r[t]
        for r in V:
            r[j] -= q * r[t]
        Vi[t] = [a + q * b for a, b in zip(Vi[t], Vi[j])]

    def swap_rows(i: int, t: int) -> None:
        A[i], A[t] = A[t], A[i]
        U[i], U[t] = U[t], U[i]
        for r in Ui:
            r[i], r[t] = r[t], r[i]

    def swap_cols(j: int, t: int) -> None:
        for r in A:
            r[j], r[t] = r[t], r[j]
        for r in V:
            r[j], r[t] = r[t], r[j]
        Vi[j], Vi[t] = Vi[t], Vi[j]

    for t in range(min(n, m)):
        best = None
        for i in range(t, n):
            for j in range(t, m):
                a = A[i][j]
                if a and (best is None or abs(a) < best[0]):
                    best = (abs(a), i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            clean = True
            for i in range(t + 1, n):
                if A[i][t]:
                    row_op(i, t, A[i][t] // A[t][t])
                    if A[i][t]:
                        clean = False
            for j in range(t + 1, m):
                if A[t][j]:
                    col_op(j, t, A[t][j] // A[t][t])
                    if A[t][j]:
                        clean = False
            if not clean:
                i = min((i for i in range(t + 1, n) if A[i][t]),
                        key=lambda i: abs(A[i][t]), default=None)
                j = min((j for j in range(t + 1, m) if A[t][j]),
                        key=lambda j: abs(A[t][j]), default=None)
                if i is not None and (j is None or abs(A[i][t]) <= abs(A[t][j])):
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            piv = A[t][t]
            bad = next((i for i in range(t + 1, n)
                        if any(A[i][j] % piv for j in range(t + 1, m))), None)
            if bad is None:
                break
            row_op(t, bad, -1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
            for r in Ui:
                r[t] = -r[t]
    return U, A, V, Ui, Vi


def smith_normal_form(M: Sequence[Sequence[int]], ncols: int | None = None):
    """Return ``(U, D, V)`` with ``U*M*V == D`` diagonal and ``d1 | d2 | ...``.

    ``U`` and ``V`` are unimodular.  Pass ``ncols`` for a matrix with no rows.

    >>> U, D, V = smith_normal_form([[2, 4], [6, 8]])
    >>> D
    [[2, 0], [0, 4]]
    """
    U, D, V, _, _ = _smith(M, ncols)
    return U, D, V


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def determinant(M: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    A = [list(r) for r in M]
    n = len(A)
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else 1


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class PresentedAbGroup:
    """``Z^ngens`` modulo the span of ``relations`` (a tuple of relator columns)."""

    ngens: int
    relations: tuple[Vector, ...] = ()

    def __post_init__(self):
        rels = tuple(tuple(int(x) for x in r) for r in self.relations)
        for r in rels:
            if len(r) != self.ngens:
                raise ValueError(f"relator {r} has length {len(r)}, expected {self.ngens}")
        object.__setattr__(self, "relations", rels)

    # constructors

    @classmethod
    def cyclic(cls, n: int) -> PresentedAbGroup:
        """``Z/n``; ``n = 0`` gives ``Z``."""
        return cls(1, [(n,)] if n else [])

    @classmethod
    def free(cls, rank: int) -> PresentedAbGroup:
        return cls(rank)

    @classmethod
    def from_invariants(cls, orders: Sequence[int]) -> PresentedAbGroup:
        """Direct sum of cyclic groups ``Z/d`` (``d = 0`` for ``Z``)."""
        n = len(orders)
        rels = [tuple(d if i == j else 0 for i in range(n)) for j, d in enumerate(orders) if d]
        return cls(n, rels)

    @classmethod
    def direct_sum(cls, groups: Sequence[PresentedAbGroup]) -> PresentedAbGroup:
        n = sum(g.ngens for g in groups)
        rels, off = [], 0
        for g in groups:
            for r in g.relations:
                rels.append((0,) * off + r + (0,) * (n - off - g.ngens))
            off += g.ngens
        return cls(n, rels)

    # element arithmetic

    @cached_property
    def _lattice(self) -> _Lattice:
        return _Lattice(self.ngens, (_sparse(r) for r in self.relations))

    def reduce(self, x: Sequence[int]) -> Vector:
        """Canonical representative: Hermite reduction modulo the relations."""
        if len(x) != self.ngens:
            raise ValueError(f"element {tuple(x)} has length {len(x)}, expected {self.ngens}")
        return _dense(self._lattice.reduce(_sparse(x)), self.ngens)

    def zero(self) -> Vector:
        return (0,) * self.ngens

    def add(self, x: Sequence[int], y: Sequence[int]) -> Vector:
        return self.reduce([a + b for a, b in zip(x, y)])

    def sub(self, x: Sequence[int], y: Sequence[int]) -> Vector:
        return self.reduce([a - b for a, b in zip(x, y)])

    def neg(self, x: Sequence[int]) -> Vector:
        return self.reduce([-a for a in x])

    def scale(self, n: int, x: Sequence[int]) -> Vector:
        return self.reduce([n * a for a in x])

    def is_zero(self, x: Sequence[int]) -> bool:
        return not self._lattice.reduce(_sparse(x))

    def equal(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return self.is_zero([a - b for a, b in zip(x, y)])

    def basis_vector(self, i: int) -> Vector:
        return self.reduce([int(i == j) for j in range(self.ngens)])

    # structure

    @cached_property
    def invariants(self) -> tuple[int, ...]:
        if not self.relations:
            return (0,) * self.ngens
        cols = self.relations
        M = [[c[i] for c in cols] for i in range(self.ngens)]
        _, D, _ = smith_normal_form(M)
        diag = [D[i][i] for i in range(min(self.ngens, len(cols)))]
        nonzero = [d for d in diag if d]
        return tuple(d for d in nonzero if d != 1) + (0,) * (self.ngens - len(nonzero))

    @property
    def is_finite(self) -> bool:
        return self._lattice.rank == self.ngens

    @property
    def order(self) -> int:
        """Number of elements, or 0 if the group is infinite."""
        if not self.is_finite:
            return 0
        out = 1
        for col, row in self._lattice.pivots:
            out *= row[col]
        return out

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    @property
    def exponent(self) -> int:
        """Least ``e > 0`` killing the group, or 0 if infinite."""
        e = 1
        for d in self.invariants:
            if d == 0:
                return 0
            e = e * d // gcd(e, d)
        return e

    def elements(self) -> Iterator[Vector]:
        """All elements in canonical form, zero first (finite groups only)."""
        if not self.is_finite:
            raise ValueError("cannot enumerate an infinite group")
        ranges = [range(row[col]) for col, row in self._lattice.pivots]
        for v in itertools.product(*ranges):
            yield tuple(v)

    def element_order(self, x: Sequence[int]) -> int:
        """Additive order of ``x`` (0 when infinite)."""
        e = self.exponent
        if e == 0:
            raise ValueError("element orders are only computed in finite groups")
        for d in _divisors(e):
            if self.is_zero([d * a for a in x]):
                return d
        raise AssertionError("unreachable")

    def simplify(self):
        """Diagonal form of the group.

        Returns ``(S, to_s, from_s)`` where ``S`` is presented as a direct sum
        of cyclic groups with its invariant factors and the two maps are
        mutually inverse isomorphisms.
        """
        n = self.ngens
        M = [[c[i] for c in self.relations] for i in range(n)]
        U, D, _, Ui, _ = _smith(M, len(self.relations))
        diag = [D[i][i] if i < len(self.relations) else 0 for i in range(n)]
        keep = [i for i in range(n) if diag[i] != 1]
        S = PresentedAbGroup.from_invariants([diag[i] for i in keep])
        to_s = AbHom(self, S, [U[i] for i in keep], check=False)
        from_s = AbHom(S, self, [[Ui[r][i] for i in keep] for r in range(n)], check=False)
        return S, to_s, from_s

    # serialization

    def to_json(self) -> dict:
        return {"ngens": self.ngens, "relations": [list(r) for r in self.relations]}

    @classmethod
    def from_json(cls, data: dict) -> PresentedAbGroup:
        return cls(int(data["ngens"]), [tuple(r) for r in data.get("relations", [])])

    def __str__(self) -> str:
        return describe_invariants(self.invariants)


def describe_invariants(inv: Sequence[int]) -> str:
    if not inv:
        return "0"
    return " + ".join("Z" if d == 0 else f"Z/{d}" for d in inv)


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, int(n ** 0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def invariant_factors(G: PresentedAbGroup) -> list[int]:
    """Invariant factors ``d1 | d2 | ...``, 1s dropped, a trailing 0 per free rank."""
    return list(G.invariants)


# ---------------------------------------------------------------------------
# homomorphisms


class AbHom:
    """A homomorphism ``src -> dst`` given by a ``dst.ngens x src.ngens`` matrix.

    Construction checks that every relator of ``src`` maps to zero; pass
    ``check=False`` only when that is known by construction.
    """

    def __init__(self, src: PresentedAbGroup, dst: PresentedAbGroup,
                 matrix: Sequence[Sequence[int]], check: bool = True):
        rows = tuple(tuple(int(x) for x in r) for r in matrix)
        if len(rows) != dst.ngens or any(len(r) != src.ngens for r in rows):
            raise ValueError(f"matrix shape does not match {dst.ngens}x{src.ngens}")
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "matrix", rows)
        if check:
            for r in src.relations:
                if not dst.is_zero(self._apply(r)):
                    raise ValueError(f"ill-defined homomorphism: relator {r} is not sent to 0")

    def __setattr__(self, name, value):
        raise AttributeError("AbHom is immutable")

    @classmethod
    def identity(cls, G: PresentedAbGroup) -> AbHom:
        return cls(G, G, _identity(G.ngens), check=False)

    @classmethod
    def zero(cls, src: PresentedAbGroup, dst: PresentedAbGroup) -> AbHom:
        return cls(src, dst, [[0] * src.ngens for _ in range(dst.ngens)], check=False)

    @classmethod
    def scalar(cls, G: PresentedAbGroup, n: int) -> AbHom:
        return cls(G, G, [[n * int(i == j) for j in range(G.ngens)] for i in range(G.ngens)],
                   check=False)

    @cached_property
    def _columns(self) -> list[dict[int, int]]:
        return [{i: r[j] for i, r in enumerate(self.matrix) if r[j]} for j in range(self.src.ngens)]

    def _apply(self, x: Sequence[int]) -> list[int]:
        out = [0] * self.dst.ngens
        for j, a in enumerate(x):
            if a:
                for i, v in self._columns[j].items():
                    out[i] += a * v
        return out

    def __call__(self, x: Sequence[int]) -> Vector:
        if len(x) != self.src.ngens:
            raise ValueError(f"element {tuple(x)} does not lie in the source")
        return self.dst.reduce(self._apply(x))

    def compose(self, other: AbHom) -> AbHom:
        """``self after other``."""
        if other.dst.ngens != self.src.ngens:
            raise ValueError("homomorphisms are not composable")
        rows = [[sum(a * b for a, b in zip(r, col)) for col in zip(*other.matrix)]
                if other.matrix else [] for r in self.matrix]
        if not other.matrix:
            rows = [[0] * other.src.ngens for _ in self.matrix]
        return AbHom(other.src, self.dst, rows, check=False)

    def __matmul__(self, other: AbHom) -> AbHom:
        return self.compose(other)

    def __add__(self, other: AbHom) -> AbHom:
        return AbHom(self.src, self.dst,
                     [[a + b for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)],
                     check=False)

    def scaled(self, n: int) -> AbHom:
        return AbHom(self.src, self.dst, [[n * a for a in r] for r in self.matrix], check=False)

    def same_map(self, other: AbHom) -> bool:
        """Equality as maps (images of all generators agree in ``dst``)."""
        if self.src.ngens != other.src.ngens or self.dst.ngens != other.dst.ngens:
            return False
        return all(self.dst.equal(self._apply(e), other._apply(e))
                   for e in _identity(self.src.ngens))

    def __eq__(self, other) -> bool:
        if not isinstance(other, AbHom):
            return NotImplemented
        return self.src == other.src and self.dst == other.dst and self.same_map(other)

    __hash__ = None

    def __repr__(self) -> str:
        return f"AbHom({self.src.ngens}->{self.dst.ngens}, {[list(r) for r in self.matrix]})"

    # linear algebra

    @cached_property
    def _solver(self):
        """Echelon data for ``[F^T | I]`` stacked with the target relations."""
        n, m = self.dst.ngens, self.src.ngens
        rows = []
        for j in range(m):
            row = dict(self._columns[j])
            row[n + j] = 1
            rows.append(row)
        rows.extend(_sparse(r) for r in self.dst.relations)
        pivots, rest = _echelon(rows, n)
        kernel_rows = [{k - n: v for k, v in r.items()} for r in rest]
        ambiguity = _Lattice(m, kernel_rows + [_sparse(r) for r in self.src.relations])
        return pivots, ambiguity

    def kernel(self):
        """Return ``(K, inclusion)`` with ``inclusion`` an iso onto ``ker(self)``.

        >>> Z4 = PresentedAbGroup.cyclic(4)
        >>> K, inc = AbHom.scalar(Z4, 2).kernel()
        >>> invariant_factors(K)
        [2]
        """
        lat = self._solver[1]
        rels = [lat.coords(_sparse(r)) for r in self.src.relations]
        K = PresentedAbGroup(lat.rank, rels)
        basis = lat.basis()
        inc = AbHom(K, self.src, [[b[i] for b in basis] for i in range(self.src.ngens)],
                    check=False)
        return K, inc

    def kernel_coords(self, x: Sequence[int]) -> list[int] | None:
        """Coordinates of ``x`` in the generators of ``kernel()``, or None if ``f(x) != 0``."""
        return self._solver[1].coords(_sparse(x))

    def cokernel(self):
        """Return ``(Q, projection)`` with ``Q = dst / image``."""
        cols = [tuple(r[j] for r in self.matrix) for j in range(self.src.ngens)]
        Q = PresentedAbGroup(self.dst.ngens, self.dst.relations + tuple(cols))
        return Q, AbHom(self.dst, Q, _identity(self.dst.ngens), check=False)

    def solve(self, y: Sequence[int]) -> Vector | None:
        """Some ``x`` with ``self(x) == y`` in ``dst``, or None.

        The witness is canonical: the Hermite-reduced representative of the
        solution coset modulo kernel and source relations, put in the
        source's canonical form.  ``y`` need not be reduced.
        """
        if len(y) != self.dst.ngens:
            raise ValueError(f"element {tuple(y)} does not lie in the target")
        pivots, ambiguity = self._solver
        n = self.dst.ngens
        rem = _sparse(y)
        x: dict[int, int] = {}
        for col, row in pivots:
            v = rem.get(col, 0)
            if not v:
                continue
            if v % row[col]:
                return None
            q = v // row[col]
            for k, a in row.items():
                if k < n:
                    nv = rem.get(k, 0) - q * a
                    if nv:
                        rem[k] = nv
                    else:
                        rem.pop(k, None)
                else:
                    nv = x.get(k - n, 0) + q * a
                    if nv:
                        x[k - n] = nv
                    else:
                        x.pop(k - n, None)
        if rem:
            return None
        x = ambiguity.reduce(x)
        return self.src.reduce(_dense(x, self.src.ngens))

    def is_injective(self) -> bool:
        K, _ = self.kernel()
        return K.is_trivial

    def is_surjective(self) -> bool:
        Q, _ = self.cokernel()
        return Q.is_trivial

    def is_iso(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.matrix]


def kernel(f: AbHom):
    """``(K, inclusion)`` for ``ker f``."""
    return f.kernel()


def cokernel(f: AbHom):
    """``(Q, projection)`` for ``coker f``."""
    return f.cokernel()


def solve(f: AbHom, y: Sequence[int]) -> Vector | None:
    """A canonical preimage of ``y`` under ``f``, or None."""
    return f.solve(y)

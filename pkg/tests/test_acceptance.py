"""Acceptance criteria 1-8, each checked exactly and against its time budget.

Run ``python3 tests/test_acceptance.py`` for a bare pass/fail listing, or run
it under pytest (the lines then appear in the terminal summary).
"""

import itertools
import random
import time

import pytest

from catext.abgrp import AbHom, determinant, matmul, smith_normal_form
from catext.adams import (
    adams_of_degree, coset_power, discrepancy_order, enumerate_ad, extension_class_order,
    power_stabilize, torus_cohomology, z1_elements,
)
from catext.cobar import cohomologous, cohomology, differential, scalar_action_on_class
from catext.extension import (
    all_regular_2cocycles, are_equivalent, build_from_cocycle, extension_class,
    extension_cocycle, morphism_exists, validate_ext_morphism,
)
from catext.fincat import AbFunctor, CatFunctor, NatTrans, scalar_nat_trans
from catext.fixtures import cyclic_extension, cyclic_table, dihedral_table, split_product_extension
from catext.padic import gamma_membership, units
from catext.psu import (
    MonomialMatrix, build_A, build_B, expected_commutator, no_section_check, primitive_p_exponent,
    restricted_class_obstruction, tensor_relations, xy_commutator,
)

from oracles import all_automorphisms, functors_over, inner_maps
from test_adams import PTORAL, brute_adams, restricts_like_adams
from test_cobar import FIXTURE_FUNCTORS, random_cochain
from test_extension import FIXTURES, MORPHISM_CASES, reduction_psi

RESULTS: dict[int, str] = {}


def criterion_1():
    for r in (1, 2):
        neg = [[[int(i == j) for j in range(r)] for i in range(r)],
               [[-int(i == j) for j in range(r)] for i in range(r)]]
        for k in (2, 3):
            for n in range(4):
                got = torus_cohomology(cyclic_table(2), neg, 2, k, n)
                assert got.stable
                assert got.invariants == ((2,) * r if n % 2 == 0 else ()), (r, k, n)
                odd = torus_cohomology(cyclic_table(2), neg, 3, k, n)
                assert odd.stable and odd.invariants == (), (r, k, n)


def criterion_2():
    for p in (2, 3):
        target = cyclic_extension(p, p)
        coeff = target.coeff
        cocycles = all_regular_2cocycles(coeff)
        built = [build_from_cocycle(target.base, coeff, z) for z in cocycles]
        classes: list[list[int]] = []
        for i, E in enumerate(built):
            for cls in classes:
                if are_equivalent(built[cls[0]], E) is not None:
                    cls.append(i)
                    break
            else:
                classes.append([i])
        assert len(classes) == p, (p, len(classes))
        # the partition agrees with cohomology of the cocycles
        for cls in classes:
            assert all(cohomologous(cocycles[cls[0]], cocycles[j]) is not None for j in cls)
        for E in built:
            again = build_from_cocycle(E.base, E.coeff, extension_cocycle(E))
            assert are_equivalent(E, again) is not None
            assert are_equivalent(again, E) is not None
        assert not extension_class(cyclic_extension(p, p)).is_zero()
        assert extension_class(split_product_extension(p, p)).is_zero()


def criterion_3():
    checked = 0
    for name, make in sorted(FIXTURES.items()):
        E = make()
        if E.total.n_mor > 64:
            continue
        ident = CatFunctor.identity(E.base)
        auts = functors_over(E, E, ident, NatTrans.identity(E.coeff))
        inner = inner_maps(E)
        assert inner <= set(auts), name
        assert len(auts) % len(inner) == 0, name
        h1 = cohomology(E.base, E.coeff, 1).group.order
        assert len(auts) // len(inner) == h1, (name, len(auts), len(inner), h1)
        checked += 1
    assert checked == len(FIXTURES)


def criterion_4():
    for a, b, reduce_to, scalar in MORPHISM_CASES:
        E, E2 = FIXTURES[a](), FIXTURES[b]()
        G, H = E.coeff.on_obj["*"], E2.coeff.on_obj["*"]
        if reduce_to is None:
            if E.base != E2.base:
                continue
            psi = CatFunctor.identity(E.base)
            eta = NatTrans(E.coeff, E2.coeff, {"*": AbHom(G, H, [[scalar]])})
        else:
            psi = reduction_psi(E, E2, reduce_to)
            eta = NatTrans(E.coeff, E2.coeff, {"*": AbHom(G, H, [[1]])}, psi)
        M = morphism_exists(E, E2, psi, eta)
        found = functors_over(E, E2, psi, eta)
        assert (M is not None) == bool(found), (a, b)
        if M is not None:
            assert validate_ext_morphism(M) == []
            assert tuple(M.functor.mor_map) in found
    for n, m in ((4, 4), (3, 3), (2, 4)):
        E = cyclic_extension(n, m)
        x = extension_class(E)
        ident = CatFunctor.identity(E.base)
        for zeta in range(n * m):
            eta = scalar_nat_trans(E.coeff, zeta)
            M = morphism_exists(E, E, ident, eta)
            fixed = scalar_action_on_class(x, zeta) == x
            assert (M is not None) == fixed, (n, m, zeta)
            assert bool(functors_over(E, E, ident, eta)) == fixed, (n, m, zeta)


def criterion_5():
    for name, make in sorted(PTORAL.items()):
        S = make()
        if S.order > 64:
            continue
        pm, m = extension_class_order(S)
        z1 = len(z1_elements(S))
        ad = enumerate_ad(S)
        by_degree: dict[int, int] = {}
        for psi in ad:
            by_degree[psi.zeta.residue] = by_degree.get(psi.zeta.residue, 0) + 1
        for zeta in units(S.p, S.k):
            exists = adams_of_degree(S, zeta) is not None
            assert exists == gamma_membership(zeta, min(m, S.k)), (name, zeta)
            if S.order <= 32:
                assert exists == bool(brute_adams(S, zeta)), (name, zeta)
            assert by_degree.get(zeta.residue, 0) == (z1 if exists else 0), (name, zeta)
        raw = all_automorphisms(S.table)
        normal = {f for f in raw for z in units(S.p, S.k)
                  if restricts_like_adams(S, f, z.residue)}
        assert {psi.permutation for psi in ad} == normal, name


def criterion_6():
    p, K = 3, 2
    A, B = build_A(p, K), build_B(p, K)
    assert A.commutator(B) == MonomialMatrix.scalar(p, primitive_p_exponent(p, K), p, K)
    for q in (3, 5):
        for level in (1, 2):
            assert all(tensor_relations(q, level, 2).values()), (q, level)
    c = xy_commutator(p, K)
    assert c == expected_commutator(p, K) and not c.is_identity()
    rep = no_section_check(p, K)
    assert rep["checked_pairs"] == 81
    assert rep["all_nontrivial"] and rep["all_equal_to_xy_commutator"]
    x = restricted_class_obstruction(p, K)
    assert not x.is_zero()
    order = x.order()
    assert order > 1 and p ** 10 % order == 0


def _stabilize_hypothesis(S, zeta: int) -> bool:
    return zeta != 1 and (zeta - 1) % (4 if S.p == 2 else S.p) == 0


def criterion_7():
    pairs = 0
    for name, make in sorted(PTORAL.items()):
        S = make()
        fibres: dict[int, list] = {}
        for psi in enumerate_ad(S):
            fibres.setdefault(psi.zeta.residue, []).append(psi)
        for zeta, fibre in sorted(fibres.items()):
            if not _stabilize_hypothesis(S, zeta):
                continue
            for a, b in itertools.product(fibre, repeat=2):
                r = power_stabilize(a, b)
                assert 0 <= r <= S.k, (name, zeta)
                assert S.p ** r <= discrepancy_order(a, b)
                assert a.power(S.p ** r).permutation == b.power(S.p ** r).permutation
                pairs += 1
    assert pairs > 0
    groups = [(cyclic_table(8), [[0, 4], [0, 2, 4, 6]])]
    for n in (3, 4, 6):
        rotations = [2 * i for i in range(n)]
        groups.append((dihedral_table(n), [rotations] + ([[0, n]] if n % 2 == 0 else [])))
    for G, normals in groups:
        for N in normals:
            for g in range(len(G)):
                for h in (G[g][x] for x in N):
                    m = coset_power(G, g, h, N)
                    assert 1 <= m <= len(N)
                    a, b = g, h
                    for _ in range(m - 1):
                        a, b = G[a][g], G[b][h]
                    assert a == b


def criterion_8():
    rnd = random.Random(2024)
    functors: list[AbFunctor] = list(FIXTURE_FUNCTORS)
    functors += [FIXTURES[name]().coeff for name in ("fork", "parallel", "D4/V4")]
    count = 0
    while count < 1000:
        F = functors[count % len(functors)]
        n = count % 3
        u = random_cochain(F, n, rnd)
        assert differential(differential(u)).is_zero()
        count += 1
    for _ in range(1000):
        rows, cols = rnd.randint(1, 5), rnd.randint(1, 5)
        M = [[rnd.randint(-30, 30) for _ in range(cols)] for _ in range(rows)]
        U, D, V = smith_normal_form(M)
        assert matmul(matmul(U, M), V) == D
        assert abs(determinant(U)) == 1 and abs(determinant(V)) == 1
        diag = [D[i][i] for i in range(min(rows, cols))]
        assert all(D[i][j] == 0 for i in range(rows) for j in range(cols) if i != j)
        assert all(d >= 0 for d in diag)
        for a, b in zip(diag, diag[1:]):
            assert (b == 0) if a == 0 else b % a == 0


CRITERIA = {
    1: ("C2-torus cohomology", criterion_1, 5.0),
    2: ("extension classification roundtrip", criterion_2, 10.0),
    3: ("H^1 = Aut/Inn", criterion_3, 30.0),
    4: ("morphism criterion", criterion_4, 30.0),
    5: ("Adams degree sequence", criterion_5, 60.0),
    6: ("PSU(2p) obstruction", criterion_6, 60.0),
    7: ("power stabilization and coset powers", criterion_7, 10.0),
    8: ("numerical hygiene", criterion_8, 10.0),
}


def run_criterion(number: int) -> None:
    title, check, budget = CRITERIA[number]
    start = time.perf_counter()
    try:
        check()
    except Exception as exc:
        elapsed = time.perf_counter() - start
        RESULTS[number] = f"criterion {number} ({title}): FAIL after {elapsed:.2f}s: {exc!r}"
        print(RESULTS[number])
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < budget
    verdict = "PASS" if ok else "FAIL (over time budget)"
    RESULTS[number] = f"criterion {number} ({title}): {verdict} in {elapsed:.2f}s (limit {budget:.0f}s)"
    print(RESULTS[number])
    assert ok, RESULTS[number]


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    run_criterion(number)


if __name__ == "__main__":
    failed = 0
    for number in sorted(CRITERIA):
        try:
            run_criterion(number)
        except Exception:
            failed += 1
    raise SystemExit(1 if failed else 0)

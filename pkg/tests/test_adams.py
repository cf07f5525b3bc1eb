import itertools
import random

import pytest

from catext.abgrp import PresentedAbGroup
from catext.adams import (
    AdamsAut, PToralData, adams_of_degree, aut_T, coset_power, degree_image_given_auts,
    dimension_shift_check, discrepancy_order, enumerate_ad, extension_class_order,
    group_cohomology, h1_weyl_vanishing, power_stabilize, ptoral_from_table, torus_cohomology,
    validate_ptoral, z1_elements,
)
from catext.errors import HypothesisError, ResourceRefusal
from catext.fixtures import (
    cyclic_table, dihedral_table, product_table, ptoral_cyclic, ptoral_quaternion, ptoral_split,
    quaternion_table,
)
from catext.padic import UnitModPk, gamma_membership, units

from oracles import all_automorphisms, element_order

NEG = [[[1]], [[-1]]]

PTORAL = {
    "Z8": lambda: ptoral_cyclic(2, 2, 2),
    "Z16/Z4": lambda: ptoral_cyclic(2, 2, 4),
    "Z32/Z4": lambda: ptoral_cyclic(2, 3, 4),
    "Z27/Z3": lambda: ptoral_cyclic(3, 2, 3),
    "Z4xZ2": lambda: ptoral_split(2, 2, cyclic_table(2), [1, 1]),
    "D8": lambda: ptoral_split(2, 2, cyclic_table(2), [1, -1]),
    "D16": lambda: ptoral_split(2, 3, cyclic_table(2), [1, -1]),
    "Q8": ptoral_quaternion,
    "Q16": lambda: ptoral_quaternion(3),
    "Z9xZ3": lambda: ptoral_split(3, 2, cyclic_table(3), [1, 1, 1]),
    "Z4^2xC2": lambda: ptoral_split(2, 2, cyclic_table(2), [1, -1], rank=2),
    "Z4xV4": lambda: ptoral_split(2, 2, product_table(cyclic_table(2), cyclic_table(2)),
                                  [1, -1, 1, -1]),
}


@pytest.fixture(params=sorted(PTORAL))
def S(request):
    return PTORAL[request.param]()


def test_fixtures_valid_and_small(S):
    assert validate_ptoral(S) == []
    assert S.order <= 64


def test_z8_datum_is_z8():
    S = ptoral_cyclic(2, 2, 2)
    # (t, x) <-> 2t + x
    for a, b in itertools.product(range(8), repeat=2):
        ta, xa = S.decode(a)
        tb, xb = S.decode(b)
        t, x = S.decode(S.table[a][b])
        assert (2 * t[0] + x) % 8 == (2 * ta[0] + xa + 2 * tb[0] + xb) % 8


def test_broken_cocycle_reported():
    S = PToralData(2, 2, 1, cyclic_table(4), [[[1]]] * 4, {(1, 1): (1,)})
    v = validate_ptoral(S)
    assert v and all(x.kind == "cocycle" for x in v)
    assert len(v[0].witness) == 3
    bad_action = PToralData(2, 2, 1, cyclic_table(2), [[[1]], [[3]]], {})
    assert [x.kind for x in validate_ptoral(bad_action)] == []
    not_hom = PToralData(2, 2, 1, cyclic_table(4), [[[1]], [[-1]], [[1]], [[1]]])
    assert any(x.kind == "action-homomorphism" for x in validate_ptoral(not_hom))
    irregular = PToralData(2, 2, 1, cyclic_table(2), [[[1]]] * 2, {(0, 0): (1,)})
    assert any(x.kind == "regularity" for x in validate_ptoral(irregular))


def test_group_law_associative_on_samples(S):
    T = S.table
    rnd = random.Random(1)
    for _ in range(300):
        a, b, c = (rnd.randrange(S.order) for _ in range(3))
        assert T[T[a][b]][c] == T[a][T[b][c]]


def test_from_table():
    S = ptoral_from_table(cyclic_table(8), 2, 2, [2])
    assert validate_ptoral(S) == [] and extension_class_order(S) == (2, 1)
    D = ptoral_from_table(dihedral_table(4), 2, 2, [2])
    assert validate_ptoral(D) == []
    assert D.action[1] == [[3]] and extension_class_order(D) == (1, 0)
    Q = ptoral_from_table(quaternion_table(), 2, 2, [2])
    assert validate_ptoral(Q) == [] and extension_class_order(Q) == (2, 1)
    with pytest.raises(HypothesisError):
        ptoral_from_table(dihedral_table(4), 2, 1, [1])  # <s> is not normal


def test_class_order_examples():
    assert extension_class_order(ptoral_cyclic(2, 2, 2)) == (2, 1)
    assert extension_class_order(ptoral_split(2, 2, cyclic_table(2), [1, 1])) == (1, 0)
    assert extension_class_order(ptoral_cyclic(2, 2, 4)) == (4, 2)


def test_z16_class_order_by_brute_force():
    S = ptoral_cyclic(2, 2, 4)
    n = len(S.pi)

    def coboundary(d):
        return {(x, y): (d[x] + d[y] - d[S.pi[x][y]]) % 4 for x in range(n) for y in range(n)}
    bounds = {tuple(sorted(coboundary(d).items())) for d in itertools.product(range(4), repeat=n)}
    multiples = []
    for m in range(1, 5):
        c = tuple(sorted({k: (m * v[0]) % 4 for k, v in S.coc.items()}.items()))
        multiples.append(c in bounds)
    assert multiples == [False, False, False, True]


def brute_adams(S, zeta):
    """All d in T^pi for which (t, x) -> (zeta t + d(x), x) is an automorphism."""
    out = []
    for d in itertools.product(S.torus_elements, repeat=len(S.pi)):
        if AdamsAut(S, zeta, tuple(d)).is_valid():
            out.append(tuple(d))
    return out


def test_adams_examples():
    S = ptoral_cyclic(2, 2, 2)
    a = adams_of_degree(S, 3)
    assert a is not None and a.is_valid()
    # multiplication by 3 on Z/8 is one of the Adams automorphisms of degree 3
    times3 = tuple(S.encode(((3 * (2 * S.decode(i)[0][0] + S.decode(i)[1]) % 8) // 2,),
                            (3 * (2 * S.decode(i)[0][0] + S.decode(i)[1]) % 8) % 2)
                   for i in range(8))
    assert times3 in {x.permutation for x in enumerate_ad(S)}
    one = adams_of_degree(S, 1)
    assert all(not any(v) for v in one.d)
    T = ptoral_cyclic(2, 2, 4)
    assert adams_of_degree(T, 3) is None
    # at level 2 the unit 5 is 1
    assert adams_of_degree(T, UnitModPk(2, 2, 5)) is not None
    W = ptoral_cyclic(2, 3, 4)
    assert adams_of_degree(W, 3) is None and adams_of_degree(W, 5) is not None


@pytest.mark.parametrize("name", ["Z16/Z4", "Z8", "Q8", "Z27/Z3", "D8"])
def test_adams_existence_matches_exhaustive_search(name):
    S = PTORAL[name]()
    for zeta in units(S.p, S.k):
        assert (adams_of_degree(S, zeta) is not None) == bool(brute_adams(S, zeta))


def test_degree_sequence(S):
    pm, m = extension_class_order(S)
    for zeta in units(S.p, S.k):
        a = adams_of_degree(S, zeta)
        assert (a is not None) == gamma_membership(zeta, min(m, S.k))
        if a is not None:
            assert a.is_valid()


def restricts_like_adams(S, f, zeta):
    e = S.pi_identity
    for i in range(S.order):
        t, x = S.decode(i)
        t2, x2 = S.decode(f[i])
        if x2 != x:
            return False
        if x == e and t2 != tuple(zeta * a % S.mod for a in t):
            return False
    return True


def test_enumerate_ad_matches_raw_automorphisms(S):
    ad = enumerate_ad(S)
    perms = {a.permutation for a in ad}
    assert len(perms) == len(ad)
    raw = all_automorphisms(S.table)
    normal = {f for f in raw for z in units(S.p, S.k) if restricts_like_adams(S, f, z.residue)}
    assert perms == normal


def test_fibres_have_z1_size(S):
    ad = enumerate_ad(S)
    z1 = len(z1_elements(S))
    brute_z1 = len(brute_adams(S, UnitModPk(S.p, S.k, 1))) if S.order <= 32 else z1
    assert z1 == brute_z1
    by_degree = {}
    for a in ad:
        by_degree.setdefault(a.zeta, []).append(a)
    assert all(len(v) == z1 for v in by_degree.values())


def test_ad_is_a_group_and_degree_is_multiplicative(S):
    ad = enumerate_ad(S)
    perms = {a.permutation for a in ad}
    for a, b in itertools.product(ad[:12], repeat=2):
        c = a.compose(b)
        assert c.zeta == a.zeta * b.zeta
        assert c.is_valid()
        assert c.permutation == tuple(a.permutation[b.permutation[i]] for i in range(S.order))
        assert c.permutation in perms
    for a in ad:
        inv = [0] * S.order
        for i, j in enumerate(a.permutation):
            inv[j] = i
        assert tuple(inv) in perms


def test_kernel_mod_inner_is_h1(S):
    ad = enumerate_ad(S)
    kernel = {a.permutation for a in ad if a.zeta.is_one()}
    inner = {a.permutation for a in aut_T(S)}
    assert inner <= kernel
    H1 = group_cohomology(S.pi, S.torus_group, S.action, 1)
    assert len(kernel) // len(inner) == H1.order


def test_aut_t_examples():
    assert len(aut_T(ptoral_cyclic(2, 2, 2))) == 1
    D = ptoral_split(2, 2, cyclic_table(2), [1, -1])
    AT = aut_T(D)
    assert len(AT) == 2
    # compare with conjugation by torus elements in the group table
    T = D.table
    conj = set()
    for t in D.torus_elements:
        g = D.encode(t, 0)
        ginv = next(h for h in range(D.order) if T[g][h] == 0)
        conj.add(tuple(T[T[g][i]][ginv] for i in range(D.order)))
    assert conj == {a.permutation for a in AT}
    assert all(a.zeta.is_one() for a in AT)


def test_enumerate_ad_refusal():
    with pytest.raises(ResourceRefusal):
        enumerate_ad(ptoral_cyclic(2, 2, 4), bound=10)


def test_group_cohomology_examples():
    assert group_cohomology(cyclic_table(2), PresentedAbGroup.cyclic(4), None, 1).invariants == (2,)
    # hom-counting oracle for trivial action: |Hom(Z/2, Z/4)| = 2
    homs = [a for a in range(4) if (2 * a) % 4 == 0]
    assert len(homs) == 2
    neg = group_cohomology(cyclic_table(2), PresentedAbGroup.cyclic(8), NEG, 2)
    assert neg.order == 2


@pytest.mark.parametrize("r", [1, 2])
@pytest.mark.parametrize("k", [2, 3])
def test_c2_torus(r, k):
    neg = [[[int(i == j) for j in range(r)] for i in range(r)],
           [[-int(i == j) for j in range(r)] for i in range(r)]]
    for n in range(4):
        res = torus_cohomology(cyclic_table(2), neg, 2, k, n)
        assert res.stable
        assert res.invariants == ((2,) * r if n % 2 == 0 else ())
        # truncated modules keep a (Z/2)^r in odd degrees too
        assert res.truncated == (2,) * r
        assert torus_cohomology(cyclic_table(2), neg, 3, k, n).invariants == ()


def test_weyl_h1():
    rep = h1_weyl_vanishing(cyclic_table(2), NEG, [1], 3, 2)
    assert rep["condition_odd_scalar"] and rep["h1_vanishes"]
    rep2 = h1_weyl_vanishing(cyclic_table(2), NEG, [1], 2, 3)
    assert not rep2["condition_odd_scalar"]
    assert rep2["condition_quotient_h1"] and rep2["h1_vanishes"]
    triv = h1_weyl_vanishing([[0]], [[[1, 0], [0, 1]]], [], 3, 2)
    assert triv["h1_vanishes"] and not triv["condition_odd_scalar"]
    assert not triv["condition_pseudo_reflection_group"]


def test_weyl_h1_reflection_group():
    # Z/2 x Z/2 acting on (Z/3^k)^2 by independent sign changes: generated by pseudo-reflections
    V4 = product_table(cyclic_table(2), cyclic_table(2))
    action = [[[1, 0], [0, 1]], [[1, 0], [0, -1]], [[-1, 0], [0, 1]], [[-1, 0], [0, -1]]]
    rep = h1_weyl_vanishing(V4, action, [3], 3, 2)
    assert rep["pseudo_reflections"] == [1, 2]
    assert rep["condition_pseudo_reflection_group"]
    assert rep["h1_vanishes"]
    with pytest.raises(HypothesisError):
        h1_weyl_vanishing(V4, action, [1], 3, 2)


def test_dimension_shift():
    r = dimension_shift_check(cyclic_table(2), NEG, 2, 2, 2)
    assert r["conclusive"] and r["agree"] and r["lattice_invariants"] == []
    r3 = dimension_shift_check(cyclic_table(2), NEG, 3, 2, 2)
    assert r3["agree"] and r3["lattice_invariants"] == [2]
    t = dimension_shift_check(cyclic_table(2), [[[1]], [[1]]], 2, 2, 2)
    assert t["agree"] and t["torus_invariants"] == [2] and t["lattice_invariants"] == [2]
    g = dimension_shift_check([[0]], [[[1]]], 2, 2, 3)
    assert g["agree"] and g["torus_invariants"] == []
    with pytest.raises(HypothesisError):
        dimension_shift_check(cyclic_table(2), NEG, 1, 2, 2)


STAB_CASES = [("Z32/Z4", 5), ("Z27/Z3", 4), ("Z27/Z3", 7), ("Z9xZ3", 4),
              ("D16", 5), ("Q16", 5)]


@pytest.mark.parametrize("name,zeta", STAB_CASES)
def test_power_stabilize(name, zeta):
    S = PTORAL[name]()
    fibre = [a for a in enumerate_ad(S) if a.zeta.residue == zeta]
    assert len(fibre) >= 2
    inner = aut_T(S)
    for a, b in itertools.product(fibre, repeat=2):
        r = power_stabilize(a, b)
        pr = S.p ** r
        assert a.power(pr).permutation == b.power(pr).permutation
        if r > 0:
            q = S.p ** (r - 1)
            assert a.power(q).permutation != b.power(q).permutation
        assert S.p ** r <= discrepancy_order(a, b)
        for t in inner:
            c = b.compose(t)
            assert S.p ** power_stabilize(a, c) <= discrepancy_order(a, c)
    assert power_stabilize(fibre[0], fibre[0]) == 0


def test_power_stabilize_hypotheses():
    S = PTORAL["Z27/Z3"]()
    a4, a7 = adams_of_degree(S, 4), adams_of_degree(S, 7)
    with pytest.raises(HypothesisError, match="different degrees"):
        power_stabilize(a4, a7)
    one = adams_of_degree(S, 1)
    with pytest.raises(HypothesisError, match="zeta != 1"):
        power_stabilize(one, one)
    S2 = PTORAL["Z9xZ3"]()
    a2 = adams_of_degree(S2, 2)
    with pytest.raises(HypothesisError, match="congruent to 1"):
        power_stabilize(a2, a2)


def test_coset_power_examples():
    Z4 = cyclic_table(4)
    assert coset_power(Z4, 1, 3, [0, 2]) == 2
    assert coset_power(Z4, 1, 1, [0, 2]) == 1
    with pytest.raises(HypothesisError):
        coset_power(Z4, 1, 2, [0, 2])
    with pytest.raises(HypothesisError):
        coset_power(dihedral_table(4), 1, 3, [0, 1])  # <s> is not normal


def test_coset_power_random_dihedral():
    rnd = random.Random(5)
    for n in (3, 4, 5, 6, 8):
        G = dihedral_table(n)
        rotations = [2 * i for i in range(n)]
        centre = [0, n] if n % 2 == 0 else [0]
        for N in (centre, rotations):
            for _ in range(20):
                g = rnd.randrange(2 * n)
                h = G[g][rnd.choice(N)]
                m = coset_power(G, g, h, N)
                a, b = g, h
                for _ in range(m - 1):
                    a, b = G[a][g], G[b][h]
                assert a == b and 1 <= m <= len(N)
                # least: no smaller power agrees
                x, y = g, h
                for j in range(1, m):
                    assert x != y
                    x, y = G[x][g], G[y][h]


def test_degree_image():
    S = ptoral_cyclic(2, 2, 2)
    ident = tuple(range(S.order))
    assert [u.residue for u in degree_image_given_auts(S, [ident])] == [1]
    raw = all_automorphisms(S.table)
    assert len(raw) == 4
    assert [u.residue for u in degree_image_given_auts(S, raw)] == [1, 3]
    assert [u.residue for u in degree_image_given_auts(S, [a.permutation for a in aut_T(S)])] == [1]
    with pytest.raises(HypothesisError):
        degree_image_given_auts(S, [tuple([1, 0] + list(range(2, 8)))])


def test_json_roundtrip(S):
    S2 = PToralData.from_json(S.to_json())
    assert S2.table == S.table

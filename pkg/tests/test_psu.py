import cmath
import itertools

import numpy as np
import pytest

from catext.errors import HypothesisError
from catext.psu import (
    MonomialMatrix, PSUElement, abelian_invariants_from_orders, block_diag, build_A, build_B,
    build_Q, expected_commutator, gamma_quotient_structure, generate, no_section_check,
    primitive_p_exponent, project_psu, psu_demo, restricted_class_obstruction, split_control,
    tensor_relations, tensor_slot, torus_elements, xy_commutator, xy_elements,
)

PK = [(3, 1), (3, 2), (5, 1), (5, 2)]


def dense(M: MonomialMatrix) -> np.ndarray:
    z = cmath.exp(2j * cmath.pi / M.p ** M.K)
    out = np.zeros((M.n, M.n), dtype=complex)
    for i, j in enumerate(M.perm):
        out[i, j] = z ** M.exps[i]
    return out


def close(a, b):
    return np.allclose(a, b, atol=1e-9)


def random_monomial(rng, n, p, K):
    perm = list(range(n))
    rng.shuffle(perm)
    return MonomialMatrix(tuple(perm), tuple(rng.randrange(p ** K) for _ in range(n)), p, K)


@pytest.mark.parametrize("p,K", PK)
def test_arithmetic_matches_dense(p, K):
    import random
    rng = random.Random(p * 10 + K)
    for _ in range(30):
        M, N = random_monomial(rng, 4, p, K), random_monomial(rng, 4, p, K)
        assert close(dense(M @ N), dense(M) @ dense(N))
        assert close(dense(M.inverse()), np.linalg.inv(dense(M)))
        sign, e = M.det()
        z = cmath.exp(2j * cmath.pi * e / p ** K)
        assert abs(np.linalg.det(dense(M)) - sign * z) < 1e-9


@pytest.mark.parametrize("p,K", PK)
def test_A_B_against_dense(p, K):
    A, B = build_A(p, K), build_B(p, K)
    w = cmath.exp(2j * cmath.pi / p)
    assert close(dense(A), np.diag([w ** i for i in range(p)]))
    shift = np.zeros((p, p))
    for i in range(p):
        shift[(i + 1) % p, i] = 1
    assert close(dense(B), shift)
    a, b = dense(A), dense(B)
    assert close(a @ b @ np.linalg.inv(a) @ np.linalg.inv(b), w * np.eye(p))
    assert A.has_det_one() and B.has_det_one()


def test_rejects_even_prime():
    with pytest.raises(HypothesisError):
        build_B(2, 2)
    with pytest.raises(HypothesisError):
        build_A(4, 1)


@pytest.mark.parametrize("p,K", PK)
def test_tensor_relations(p, K):
    rel = tensor_relations(p, K, 2)
    assert rel == {"A_commute": True, "B_commute": True, "AB_relations": True}


@pytest.mark.parametrize("p,K", [(3, 1), (3, 2)])
def test_tensor_slot_is_kronecker(p, K):
    A, B = build_A(p, K), build_B(p, K)
    I = np.eye(p)
    assert close(dense(tensor_slot(A, 0, 2)), np.kron(dense(A), I))
    assert close(dense(tensor_slot(B, 1, 2)), np.kron(I, dense(B)))
    assert close(dense(tensor_slot(A, 1, 3)), np.kron(np.kron(I, dense(A)), I))


@pytest.mark.parametrize("p,K", PK)
def test_Q_generators(p, K):
    Q = build_Q(p, K)
    assert all(g.has_det_one() for g in Q.generators)
    # brute-force count of block scalars with u^p v^p = 1
    count = sum(1 for a in range(p ** K) for b in range(p ** K) if (p * (a + b)) % p ** K == 0)
    assert len(Q.scalar_pairs) == count == p ** (K + 1)
    pairs = set(Q.scalar_pairs)
    assert all(((a + c) % p ** K, (b + d) % p ** K) in pairs for a, b in pairs for c, d in pairs)


@pytest.mark.parametrize("p,K", PK)
def test_xy_commutator(p, K):
    c = xy_commutator(p, K)
    assert c == expected_commutator(p, K)
    assert not c.is_identity()
    X, Y = xy_elements(p, K)
    w = cmath.exp(2j * cmath.pi / p)
    x, y = dense(X), dense(Y)
    comm = x @ y @ np.linalg.inv(x) @ np.linalg.inv(y)
    assert close(comm, np.diag([w] * p + [1 / w] * p))
    # not a scalar multiple of the identity, so nontrivial in PSU
    assert not close(comm, comm[0, 0] * np.eye(2 * p))


def test_psu_canonical_form():
    p, K = 3, 2
    M = MonomialMatrix((1, 0, 2), (5, 2, 7), p, K)
    w = primitive_p_exponent(p, K)
    shifted = MonomialMatrix(M.perm, tuple(e + w for e in M.exps), p, K)
    assert project_psu(M) == project_psu(shifted)
    other = MonomialMatrix(M.perm, tuple(e + 1 for e in M.exps), p, K)
    assert project_psu(M) != project_psu(other)


def brute_no_section(p, K, X, Y):
    """Dense check: is [XU, YV] a p-th root of unity times I for some torus pair?"""
    Q = build_Q(p, K)
    roots = [cmath.exp(2j * cmath.pi * j / p) for j in range(p)]
    x, y = dense(X), dense(Y)
    for a, b in itertools.product(range(p ** K), repeat=2):
        u, v = dense(Q.torus(a)), dense(Q.torus(b))
        xu, yv = x @ u, y @ v
        comm = xu @ yv @ np.linalg.inv(xu) @ np.linalg.inv(yv)
        if any(close(comm, r * np.eye(2 * p)) for r in roots):
            return False
    return True


@pytest.mark.parametrize("p,K", [(3, 1), (3, 2), (5, 1)])
def test_no_section(p, K):
    rep = no_section_check(p, K)
    assert rep["checked_pairs"] == p ** (2 * K)
    assert rep["all_nontrivial"] and rep["all_equal_to_xy_commutator"]
    assert brute_no_section(p, K, *xy_elements(p, K))


def test_no_section_split_control():
    rep = no_section_check(3, 2, *split_control(3, 2))
    assert rep["checked_pairs"] == 81 and not rep["all_nontrivial"]
    assert not brute_no_section(3, 2, *split_control(3, 2))


def test_restricted_class_nonzero():
    cls = restricted_class_obstruction(3, 2)
    assert not cls.is_zero()
    order = cls.order()
    assert order > 1 and 3 ** 4 % order == 0


def test_restricted_class_split_control():
    assert restricted_class_obstruction(3, 2, *split_control(3, 2)).is_zero()


def test_restricted_group_size():
    p, K = 3, 2
    X, Y = xy_elements(p, K)
    G = generate(torus_elements(p, K) + [project_psu(X), project_psu(Y)])
    assert len(G) == 81
    assert len(set(torus_elements(p, K))) == 9


@pytest.mark.parametrize("k,order", [(1, 9), (2, 81)])
def test_gamma_quotient_structure(k, order):
    rep = gamma_quotient_structure(3, k, 2)
    assert rep["quotient_order"] == order
    assert rep["quotient_abelian"] and rep["elementary_abelian"]
    assert rep["quotient_invariants"] == [3] * (2 * k)


def test_abelian_invariants_from_orders():
    def orders(inv):
        return [max(1, *(d // np.gcd(x, d) for x, d in zip(el, inv)))
                for el in itertools.product(*(range(d) for d in inv))]
    for inv in [(3,), (9,), (3, 3), (3, 9), (3, 3, 27), (2, 4, 8)]:
        p = 2 if inv[0] == 2 else 3
        assert abelian_invariants_from_orders(orders(inv), p) == tuple(sorted(inv))


def test_block_diag_and_json():
    A = build_A(3, 1)
    D = block_diag(A, A.inverse())
    assert D.n == 6 and D.has_det_one()
    assert D.to_json()["exps"] == [0, 1, 2, 0, 2, 1]
    assert PSUElement(D).to_json()["p"] == 3


def test_psu_demo_report():
    rep = psu_demo(3, 2)
    assert all(rep["relations"].values())
    assert rep["xy_commutator_matches_diag"]
    assert rep["no_section"]["checked_pairs"] == 81
    assert not rep["restricted_class"]["zero"]
    assert rep["split_control"]["class_zero"]


def test_projection_is_homomorphism_and_kernel():
    import random
    rng = random.Random(7)
    p, K = 3, 2
    for _ in range(50):
        M, N = random_monomial(rng, 6, p, K), random_monomial(rng, 6, p, K)
        assert project_psu(M @ N) == project_psu(M) * project_psu(N)
    kernel = [a for a in range(p ** K) if project_psu(MonomialMatrix.scalar(6, a, p, K)).is_identity()]
    assert kernel == [j * primitive_p_exponent(p, K) for j in range(p)]


def test_xy_commute_modulo_torus():
    p, K = 3, 2
    X, Y = xy_elements(p, K)
    c = project_psu(X).commutator(project_psu(Y))
    torus = torus_elements(p, K)
    assert c in torus
    assert all(c * t == t * c for t in torus)

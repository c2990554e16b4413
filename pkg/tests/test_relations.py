import json

import numpy as np
import pytest

from oracles import enumerate_compose, enumerate_sum, span_projector, stabilized
from sspectral import clifford as cl
from sspectral import linalg as la
from sspectral import relations as rl
from sspectral.errors import DimensionMismatch, NotSubmodule

e = cl.basis_element


def random_op(rng, n, d):
    return la.RightLinearOperator(n, d, rng.normal(size=(d, d, 2 ** n)))


def vertical(n, d):
    N = d * 2 ** n
    return rl.rel_from_pairs(np.zeros((N, N)), np.eye(N), n, d)


def from_generators(G, d):
    N = 2 * d
    return rl.rel_from_pairs(G[:N], G[N:], 1, d)


def assert_same_span(rel, vectors):
    P = span_projector(vectors)
    Q = rel.projector()
    if P is None:
        assert rel.dim == 0
        return
    assert np.linalg.norm(P - Q) < 1e-10


def integer_cases():
    rng = np.random.default_rng(11)
    cases = []
    for d in (1, 2):
        N = 2 * d
        for k in range(6):
            shape = (2 * N, 1 + (k % 2))
            GA = rng.integers(-1, 2, size=shape).astype(float)
            GB = rng.integers(-1, 2, size=shape).astype(float)
            if k == 0:
                GA[:N] = 0.0  # purely vertical generator
            if k == 1:
                GB[:N, 0] = GA[:N, 0]  # shared domain direction
            if k == 2:
                GB[:N, 0] = GA[N:, 0]  # chainable middle component
            cases.append(pytest.param(d, stabilized(GA), stabilized(GB), id=f"d{d}-{k}"))
    return cases


class TestConstruction:
    def test_orthonormal(self, rng):
        A = rl.rel_from_operator(random_op(rng, 2, 2))
        np.testing.assert_allclose(A.basis.T @ A.basis, np.eye(A.dim), atol=1e-12)

    def test_identity_graph_is_diagonal(self):
        A = rl.rel_from_operator(la.RightLinearOperator.identity(1, 2))
        diag = np.vstack([np.eye(4), np.eye(4)]) / np.sqrt(2)
        assert np.linalg.norm(A.projector() - diag @ diag.T) < 1e-12

    def test_zero_graph(self):
        A = rl.rel_from_operator(la.RightLinearOperator.zeros(1, 1))
        assert np.allclose(A.second, 0.0)
        assert A.dim == 2

    def test_scalar_graph(self):
        A = rl.rel_from_operator(la.RightLinearOperator.from_elements([[cl.CliffordElement.scalar(1, 2.0)]]))
        # span{(1, 2), (e1, 2 e1)}
        assert_same_span(A, [np.array([1, 0, 2, 0.0]), np.array([0, 1, 0, 2.0])])

    def test_right_completion(self):
        A = rl.rel_from_pairs(np.array([[1.0], [0.0]]), np.array([[2.0], [0.0]]), 1, 1)
        assert A.dim == 2
        assert rl.is_right_linear(A)

    def test_domain_must_be_submodule(self):
        T = la.RightLinearOperator.identity(1, 1)
        with pytest.raises(NotSubmodule):
            rl.rel_from_operator(T, np.array([[1.0], [0.0]]))

    def test_restricted_domain(self):
        T = la.RightLinearOperator.identity(1, 2)
        A = rl.rel_from_operator(T, np.eye(4)[:, :2])
        assert A.dim == 2
        assert rl.rel_domain(A).shape[1] == 2

    def test_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            rl.rel_sum(rl.rel_from_operator(random_op(rng, 1, 1)), rl.rel_from_operator(random_op(rng, 1, 2)))

    def test_json_round_trip(self, rng):
        A = rl.rel_from_operator(random_op(rng, 2, 1))
        B = rl.LinearRelation.from_json(json.loads(json.dumps(A.to_json())), 2, 1)
        assert rl.rel_eq(A, B)


class TestOperatorImage:
    @pytest.mark.parametrize("n,d", [(1, 1), (1, 2), (2, 2), (3, 1)])
    def test_faithful(self, rng, n, d):
        T, S = random_op(rng, n, d), random_op(rng, n, d)
        gT, gS = rl.rel_from_operator(T), rl.rel_from_operator(S)
        assert rl.rel_distance(rl.rel_sum(gT, gS), rl.rel_from_operator(T + S)) < 1e-10
        assert rl.rel_distance(rl.rel_compose(gT, gS), rl.rel_from_operator(la.op_compose(T, S))) < 1e-10
        a = cl.CliffordElement(n, rng.normal(size=2 ** n))
        assert rl.rel_distance(rl.rel_scale_left(a, gT), rl.rel_from_operator(la.op_scale_left(a, T))) < 1e-10

    def test_scale_examples(self, rng):
        T = random_op(rng, 2, 1)
        A = rl.rel_from_operator(T)
        assert rl.rel_eq(rl.rel_scale_left(cl.CliffordElement.scalar(2, 1.0), A), A)
        zero = rl.rel_scale_left(cl.CliffordElement(2), A)
        assert np.allclose(zero.second, 0.0) and zero.dim == 4
        one = rl.rel_from_operator(la.RightLinearOperator.identity(2, 1))
        got = rl.rel_scale_left(e(2, 2), one)
        want = rl.rel_from_operator(la.op_scale_left(e(2, 2), la.RightLinearOperator.identity(2, 1)))
        assert rl.rel_eq(got, want)

    def test_to_operator_round_trip(self, rng):
        T = random_op(rng, 2, 2)
        back = rl.rel_to_operator(rl.rel_from_operator(T))
        np.testing.assert_allclose(back.embedding, T.embedding, atol=1e-10)

    def test_to_operator_rejects_multivalued(self):
        with pytest.raises(ValueError):
            rl.rel_to_operator(vertical(1, 1))


class TestExamples:
    def test_sum_with_trivial_domain(self, rng):
        A = vertical(1, 2)
        S = rl.rel_sum(A, rl.rel_from_operator(random_op(rng, 1, 2)))
        assert rl.rel_domain(S).shape[1] == 0

    def test_vertical_plus_identity(self):
        S = rl.rel_sum(vertical(1, 1), rl.rel_from_operator(la.RightLinearOperator.identity(1, 1)))
        assert rl.rel_eq(S, vertical(1, 1))

    def test_compose_with_zero(self, rng):
        T = random_op(rng, 1, 2)
        A = rl.rel_from_operator(T)
        C = rl.rel_compose(A, rl.rel_from_operator(la.RightLinearOperator.zeros(1, 2)))
        # {(v, u) : (0, u) in graph T} = V x {0}
        assert C.dim == 4 and np.allclose(C.second, 0.0)

    def test_inverse_graph_composition(self, rng):
        T = random_op(rng, 1, 2)
        gT = rl.rel_from_operator(T)
        C = rl.rel_compose(rl.rel_inverse(gT), gT)
        identity = rl.rel_from_operator(la.RightLinearOperator.identity(1, 2))
        assert rl.rel_contains(C, identity)

    def test_inverse_graph_of_singular(self):
        T = la.RightLinearOperator.diag([cl.CliffordElement(1), cl.CliffordElement.scalar(1, 1.0)])
        gT = rl.rel_from_operator(T)
        C = rl.rel_compose(rl.rel_inverse(gT), gT)
        assert rl.rel_contains(C, rl.rel_from_operator(la.RightLinearOperator.identity(1, 2)))
        assert not rl.rel_is_operator(C)

    def test_closure(self, rng):
        A = rl.rel_from_operator(random_op(rng, 2, 1))
        assert rl.rel_eq(rl.rel_closure(A), A)
        assert rl.rel_eq(rl.rel_closure(rl.rel_closure(A)), rl.rel_closure(A))
        V = vertical(2, 1)
        assert rl.rel_eq(rl.rel_closure(V), V)

    def test_domain_and_operator_flag(self, rng):
        A = rl.rel_from_operator(random_op(rng, 1, 2))
        assert rl.rel_domain(A).shape[1] == 4
        assert rl.rel_is_operator(A)
        assert not rl.rel_is_operator(vertical(1, 2))

    def test_containment_angle(self, rng):
        T = random_op(rng, 1, 1)
        A = rl.rel_from_operator(T)
        half = rl.rel_from_operator(T, np.eye(2)[:, :0])
        assert rl.containment_angle(A, half) == 0.0
        assert rl.containment_angle(vertical(1, 1), A) > 0.1


class TestBruteForce:
    @pytest.mark.parametrize("d,GA,GB", integer_cases())
    def test_sum(self, d, GA, GB):
        A, B = from_generators(GA, d), from_generators(GB, d)
        S = rl.rel_sum(A, B)
        assert_same_span(S, enumerate_sum(GA, GB, 2 * d))
        assert rl.is_right_linear(S)

    @pytest.mark.parametrize("d,GA,GB", integer_cases())
    def test_compose(self, d, GA, GB):
        A, B = from_generators(GA, d), from_generators(GB, d)
        C = rl.rel_compose(A, B)
        assert_same_span(C, enumerate_compose(GA, GB, 2 * d))
        assert rl.is_right_linear(C)

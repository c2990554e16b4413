import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import blades, clifford_product, quaternion_product
from sspectral import clifford as cl
from sspectral.errors import DimensionMismatch

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def element(n):
    return st.lists(finite, min_size=2 ** n, max_size=2 ** n).map(lambda c: cl.CliffordElement(n, c))


def paravector(n):
    return st.lists(finite, min_size=n + 1, max_size=n + 1).map(lambda c: cl.Paravector(c[0], c[1:]))


e = cl.basis_element


class TestBasis:
    def test_blade_order(self):
        for n in range(1, 6):
            assert list(cl.basis(n)) == blades(n)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_structure_tensor_matches_word_reduction(self, n):
        rng = np.random.default_rng(n)
        for _ in range(5):
            a, b = rng.normal(size=(2, 2 ** n))
            got = cl.clifford_mul(cl.CliffordElement(n, a), cl.CliffordElement(n, b)).coeffs
            np.testing.assert_allclose(got, clifford_product(a, b, n), atol=1e-12)

    def test_quaternion_model(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            p, q = rng.normal(size=(2, 4))
            got = (cl.CliffordElement(2, p) * cl.CliffordElement(2, q)).coeffs
            np.testing.assert_allclose(got, quaternion_product(p, q), atol=1e-12)

    def test_rejects_n_out_of_range(self):
        with pytest.raises((ValueError, DimensionMismatch)):
            cl.CliffordElement(6)
        with pytest.raises((ValueError, DimensionMismatch)):
            cl.CliffordElement(0)

    def test_wrong_coefficient_count(self):
        with pytest.raises(DimensionMismatch):
            cl.CliffordElement(2, [1, 2, 3])

    def test_mixed_algebras(self):
        with pytest.raises(DimensionMismatch):
            e(2, 1) + e(3, 1)


class TestProductExamples:
    def test_e1e2(self):
        assert e(2, 1) * e(2, 2) == e(2, 1, 2)

    def test_one_plus_e1_times_one_minus_e1(self):
        a = 1 + e(1, 1)
        b = 1 - e(1, 1)
        assert (a * b).allclose(cl.CliffordElement.scalar(1, 2.0))

    def test_e12_squared(self):
        assert (e(2, 1, 2) * e(2, 1, 2)).allclose(cl.CliffordElement.scalar(2, -1.0))

    def test_generators_square_to_minus_one(self):
        for n in range(1, 6):
            for i in range(1, n + 1):
                assert (e(n, i) * e(n, i)).allclose(cl.CliffordElement.scalar(n, -1.0))


class TestConjugate:
    def test_examples(self):
        assert cl.clifford_conjugate(1 + e(1, 1)) == 1 - e(1, 1)
        assert cl.clifford_conjugate(e(2, 1, 2)) == -e(2, 1, 2)
        assert cl.clifford_conjugate(cl.CliffordElement.scalar(3, 5.0)) == cl.CliffordElement.scalar(3, 5.0)

    def test_blade_signs(self):
        # grades 0..3 have signs +, -, -, +
        np.testing.assert_array_equal(cl.conj_signs(3), [1, -1, -1, -1, -1, -1, -1, 1])

    @given(element(3), element(3))
    def test_antiautomorphism(self, a, b):
        lhs = (a * b).conj()
        rhs = b.conj() * a.conj()
        scale = 1 + abs(a) * abs(b)
        assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) <= 1e-12 * scale


class TestNorm:
    def test_examples(self):
        assert abs(1 + e(2, 1) + e(2, 2)) == pytest.approx(math.sqrt(3), abs=1e-15)
        assert abs(cl.CliffordElement(2)) == 0.0
        assert abs(e(2, 1, 2)) == pytest.approx(1.0)

    @given(paravector(3), element(3))
    def test_paravector_isometry(self, s, a):
        lhs = abs(s.element * a)
        assert lhs == pytest.approx(abs(s) * abs(a), rel=1e-12, abs=1e-12)
        assert abs(a * s.element) == pytest.approx(abs(s) * abs(a), rel=1e-12, abs=1e-12)

    @given(paravector(2))
    def test_paravector_times_conjugate(self, s):
        prod = s.element * s.conj().element
        np.testing.assert_allclose(prod.coeffs, [abs(s) ** 2, 0, 0, 0], atol=1e-12 * (1 + abs(s) ** 2))


class TestAlgebraLaws:
    @given(element(3), element(3), element(3))
    def test_associativity(self, a, b, c):
        lhs = (a * b) * c
        rhs = a * (b * c)
        scale = 1 + abs(a) * abs(b) * abs(c)
        assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) <= 1e-12 * scale

    @given(element(2), element(2))
    def test_distributivity(self, a, b):
        c = e(2, 1) + 2 * e(2, 1, 2)
        assert ((a + b) * c).allclose(a * c + b * c, atol=1e-12)

    def test_anticommutation(self):
        for n in range(2, 6):
            for i in range(1, n + 1):
                for j in range(i + 1, n + 1):
                    assert e(n, i) * e(n, j) == -(e(n, j) * e(n, i))

    @given(element(2))
    def test_inverse(self, a):
        if abs(a) < 1e-3:
            return
        one = cl.CliffordElement.scalar(2, 1.0)
        assert (a * a.inverse()).allclose(one, atol=1e-9)


class TestParavectors:
    def test_slice_example(self):
        J = cl.ImaginaryUnit((1 / math.sqrt(2), 1 / math.sqrt(2)))
        s = cl.paravector_slice(1.0, 2.0, J)
        assert s.s0 == 1.0
        np.testing.assert_allclose(s.v, [math.sqrt(2), math.sqrt(2)], atol=1e-15)

    def test_sphere_examples(self):
        assert cl.sphere_of(cl.Paravector(2, (1, 0))) == cl.SpectralSphere(2, 1)
        J = cl.ImaginaryUnit((0, 1))
        assert cl.sample_sphere(cl.SpectralSphere(2, 1), J) == cl.Paravector(2, (0, 1))
        assert cl.sphere_of(cl.Paravector(3, (0, 0))) == cl.SpectralSphere(3, 0)

    def test_imaginary_unit_squares_to_minus_one(self):
        J = cl.ImaginaryUnit.normalized([1.0, -2.0, 0.5])
        assert (J.element * J.element).allclose(cl.CliffordElement.scalar(3, -1.0))

    def test_imaginary_unit_must_be_unit(self):
        with pytest.raises(ValueError):
            cl.ImaginaryUnit((1.0, 1.0))

    def test_split_round_trip(self):
        s = cl.Paravector(-1.5, (0.3, -0.4))
        x, y, J = s.split()
        assert cl.paravector_slice(x, y, J).element.allclose(s.element)
        assert y == pytest.approx(0.5)

    def test_as_paravector_rejects_bivectors(self):
        with pytest.raises(ValueError):
            cl.as_paravector(e(2, 1, 2))

    @given(paravector(3))
    def test_phase_range(self, s):
        assert 0.0 <= s.phase() <= math.pi / 2


class TestParsing:
    def test_literals(self):
        assert cl.parse_clifford("1 + 2*e1 - 0.5*e12") == cl.CliffordElement(2, [1, 2, 0, -0.5])
        assert cl.parse_clifford("e3").n == 3
        assert cl.parse_clifford("2", 2) == cl.CliffordElement.scalar(2, 2.0)

    @pytest.mark.parametrize("bad", ["", "2e1x", "1 2", "e0", "3 e1"])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            cl.parse_clifford(bad, 2)

    def test_dimension_too_small(self):
        with pytest.raises(DimensionMismatch):
            cl.parse_clifford("e3", 2)

    def test_dict_round_trip(self):
        a = cl.CliffordElement(3, np.arange(8.0))
        assert cl.CliffordElement.from_dict(a.to_dict()) == a

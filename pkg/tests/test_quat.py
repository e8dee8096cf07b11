from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from flagcurv.quat import (
    ONE,
    I,
    J,
    K,
    M2CRep,
    Quaternion,
    conj,
    from_m2c,
    j_conjugate,
    norm2,
    qmul,
    to_m2c,
)

floats = st.floats(-1e3, 1e3, allow_nan=False)
fractions = st.fractions(min_value=-100, max_value=100, max_denominator=50)
fquat = st.builds(Quaternion, floats, floats, floats, floats)
xquat = st.builds(Quaternion, fractions, fractions, fractions, fractions)


def sympy_oracle(a: Quaternion, b: Quaternion) -> Quaternion:
    # sympy's Quaternion class is an independent implementation of the Hamilton product
    p = sympy.Quaternion(*map(sympy.Rational, a)) * sympy.Quaternion(*map(sympy.Rational, b))
    return Quaternion(*(Fraction(int(c.p), int(c.q)) for c in (p.a, p.b, p.c, p.d)))


def embedding_oracle(a: Quaternion, b: Quaternion) -> Quaternion:
    return from_m2c(M2CRep.from_matrix(to_m2c(a).matrix() @ to_m2c(b).matrix()))


class TestProduct:
    @pytest.mark.parametrize(
        "a,b,expected",
        [(I, J, K), (J, K, I), (K, I, J), (J, I, -K), (I, I, -ONE), (J, J, -ONE), (K, K, -ONE)],
    )
    def test_hamilton_table(self, a, b, expected):
        assert qmul(a, b) == expected

    def test_ijk_is_minus_one(self):
        assert I * J * K == -ONE

    def test_unit_is_identity(self):
        q = Quaternion(0.3, -1.2, 2.5, 7.0)
        assert ONE * q == q and q * ONE == q

    def test_seed_42_matches_embedding_oracle(self):
        rng = np.random.default_rng(42)
        a, b = (Quaternion.from_array(rng.standard_normal(4)) for _ in range(2))
        np.testing.assert_allclose((a * b).as_array(), embedding_oracle(a, b).as_array(), rtol=0, atol=1e-14)

    @given(xquat, xquat)
    def test_matches_sympy_exactly(self, a, b):
        assert a * b == sympy_oracle(a, b)

    @given(xquat, xquat, xquat)
    def test_associative_and_distributive(self, a, b, c):
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c

    def test_scalar_multiplication(self):
        assert 2 * I == Quaternion(0, 2, 0, 0) == I * 2


class TestConjugation:
    def test_definition(self):
        assert conj(Quaternion(1, 2, 3, 4)) == Quaternion(1, -2, -3, -4)
        assert conj(ONE) == ONE

    @given(xquat, xquat)
    def test_antihomomorphism_exact(self, a, b):
        assert conj(a * b) == conj(b) * conj(a)

    @given(xquat)
    def test_q_times_conj_is_norm(self, q):
        assert q * conj(q) == Quaternion(norm2(q), 0, 0, 0)
        assert conj(conj(q)) == q

    @given(fquat, fquat)
    def test_norm_multiplicative_float(self, a, b):
        assert norm2(a * b) == pytest.approx(norm2(a) * norm2(b), rel=1e-14, abs=1e-300)

    @given(xquat, xquat)
    def test_norm_multiplicative_exact(self, a, b):
        assert norm2(a * b) == norm2(a) * norm2(b)

    def test_norm_zero_only_at_zero(self):
        assert norm2(Quaternion(0, 0, 0, 0)) == 0
        assert norm2(Quaternion(0, 0, 1e-3, 0)) > 0


class TestM2C:
    def test_examples(self):
        m = to_m2c(Quaternion(1.0, 0.0, 0.0, 0.0))
        assert (m.z1, m.z2) == (1, 0)
        m = to_m2c(Quaternion(0.0, 0.0, 0.0, 1.0))
        assert (m.z1, m.z2) == (1j, 0)

    def test_matrix_shape_convention(self):
        m = to_m2c(Quaternion(1.0, 2.0, 3.0, 4.0)).matrix()
        np.testing.assert_array_equal(m, [[1 + 4j, 2 + 3j], [-2 + 3j, 1 - 4j]])

    @given(fquat)
    def test_round_trip_float(self, q):
        assert from_m2c(to_m2c(q)) == q

    @given(xquat)
    def test_round_trip_exact(self, q):
        assert from_m2c(to_m2c(q)) == q

    @given(xquat, xquat)
    def test_homomorphism_exact(self, a, b):
        ma, mb, mab = to_m2c(a).matrix(), to_m2c(b).matrix(), to_m2c(a * b).matrix()
        prod = [[ma[r][0] * mb[0][c] + ma[r][1] * mb[1][c] for c in range(2)] for r in range(2)]
        assert prod == mab

    @given(xquat)
    def test_det_is_norm_exact(self, q):
        det = to_m2c(q).det()
        assert det.y == 0 and det.x == norm2(q)

    def test_from_matrix_rejects_non_quaternion(self):
        with pytest.raises(ValueError):
            M2CRep.from_matrix(np.array([[1, 2], [3, 4]], dtype=complex))

    @given(st.builds(Quaternion, *[st.integers(-20, 20).map(float)] * 4))
    def test_conj_is_j_transpose_j(self, q):
        j = np.array([[0, 1], [-1, 0]], dtype=complex)
        m = to_m2c(q).matrix()
        np.testing.assert_array_equal(to_m2c(conj(q)).matrix(), j.T @ m.T @ j)


class TestJConjugate:
    def test_examples(self):
        assert j_conjugate(J) == -J
        assert j_conjugate(ONE) == ONE

    @given(xquat)
    def test_involution(self, q):
        assert j_conjugate(j_conjugate(q)) == q

    @given(st.builds(Quaternion, *[st.integers(-20, 20).map(float)] * 4))
    def test_is_entrywise_conjugation_and_j_sandwich(self, q):
        j = np.array([[0, 1], [-1, 0]], dtype=complex)
        m = to_m2c(q).matrix()
        got = to_m2c(j_conjugate(q)).matrix()
        np.testing.assert_array_equal(got, m.conj())
        np.testing.assert_array_equal(got, j.T @ m @ j)

    def test_components(self):
        assert j_conjugate(Quaternion(1, 2, 3, 4)) == Quaternion(1, 2, -3, -4)

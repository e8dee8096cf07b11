import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flagcurv.checks import random_patch, ym_group_element
from flagcurv.forms import (
    CurvePatch,
    MixedDualityError,
    NotTangentError,
    Partition,
    block_diagonal,
    chart_velocity,
    chern_trace,
    connection_eval,
    curvature_block,
    curvature_closed_form,
    gauge_transform,
    hodge_duality_sign,
    mc2_residual,
    obstruction_fd,
    omega12,
    ricci_forms,
    torsion_identity_residual,
    ym_curvature,
)
from flagcurv.grassmann import BlockedGroupElement, GrassmannPoint, chart_point
from flagcurv.qmat import QMatrix, SpAlgebraElement, SpElement, frobenius, random_skew, random_sp, random_tangent
from flagcurv.quat import ONE, I, J, K, Quaternion, conj, norm2

seeds = st.integers(0, 2**32 - 1)
fquat = st.builds(Quaternion, *[st.floats(-5, 5)] * 4)


def blocked(k, n, seed):
    return BlockedGroupElement.split(random_sp(k + n, seed), k)


def block_diagonal_patch(parts, seed):
    skew = lambda tag: SpAlgebraElement(block_diagonal([random_skew(k, [seed, tag, i], 0.1).mat for i, k in enumerate(parts)]))  # noqa: E731
    g0 = SpElement(block_diagonal([random_sp(k, [seed, 9, i]).mat for i, k in enumerate(parts)]))
    return CurvePatch(g0, skew(1), skew(2))


class TestPartition:
    def test_validation(self):
        with pytest.raises(ValueError):
            Partition(())
        with pytest.raises(ValueError):
            Partition((1, 0))

    def test_blocks(self):
        p = Partition.of(1, 2)
        assert (p.N, p.m) == (3, 2)
        assert p.slice(2) == slice(1, 3)
        with pytest.raises(IndexError):
            p.slice(3)


class TestConnection:
    def test_identity_gives_algebra_element(self):
        a = random_skew(3, 0).mat
        assert connection_eval(SpElement.identity(3), a, Partition.of(1, 2)).omega == a

    def test_block_diagonal_curve(self):
        patch = block_diagonal_patch((1, 2), 3)
        w = connection_eval(patch.g(), patch.tangents()[0], Partition.of(1, 2))
        assert frobenius(w.block(1, 2)) == 0 and frobenius(w.block(2, 1)) == 0

    @given(seeds)
    def test_right_invariant_tangent(self, seed):
        g, a = random_sp(3, seed), random_skew(3, seed + 1).mat
        w = connection_eval(g, a @ g.mat, Partition.of(3)).omega
        assert frobenius(w + w.H) <= 1e-11

    def test_rejects_non_tangent(self):
        with pytest.raises(NotTangentError):
            connection_eval(SpElement.identity(2), QMatrix.identity(2), Partition.of(1, 1))


class TestMaurerCartan:
    def test_constant_patch(self):
        zero = SpAlgebraElement(QMatrix.zeros(2, 2))
        assert mc2_residual(CurvePatch(random_sp(2, 0), zero, zero), Partition.of(1, 1), 1e-3) == 0

    @pytest.mark.parametrize("N,parts", [(2, (1, 1)), (4, (2, 2))])
    def test_second_order(self, N, parts):
        patch, p = random_patch(N, 5), Partition(parts)
        r1, r2 = mc2_residual(patch, p, 1e-3), mc2_residual(patch, p, 5e-4)
        assert r1 <= 1e-5
        assert 3.5 <= r1 / r2 <= 4.5

    @pytest.mark.parametrize("h", [1e-1, 1e-7])
    def test_step_range(self, h):
        with pytest.raises(ValueError):
            mc2_residual(random_patch(2, 0), Partition.of(1, 1), h)


class TestCurvatureBlock:
    def test_block_diagonal_patch_is_flat(self):
        patch = block_diagonal_patch((1, 2), 1)
        for mu in (1, 2):
            assert frobenius(curvature_block(patch, Partition.of(1, 2), mu).value) == 0

    def test_matches_finite_differences(self):
        patch, p = random_patch(2, 2), Partition.of(1, 1)
        for mu in (1, 2):
            err = frobenius(curvature_block(patch, p, mu).value - obstruction_fd(patch, p, mu, 1e-3))
            assert err <= 1e-5

    def test_skew(self):
        assert curvature_block(random_patch(4, 3), Partition.of(1, 3), 2).skew_error() <= 1e-11

    def test_index_range(self):
        with pytest.raises(IndexError):
            curvature_block(random_patch(3, 0), Partition.of(1, 2), 3)


class TestClosedForm:
    def test_equal_arguments_vanish(self):
        g = blocked(1, 2, 0)
        u = random_tangent(1, 2, 1)
        om1, om2 = curvature_closed_form(g, chart_point(g), u, u)
        assert frobenius(om1.value) == 0 and frobenius(om2.value) == 0

    @pytest.mark.parametrize("kn", [(1, 2), (2, 2)])
    def test_matches_curvature_block(self, kn):
        k, n = kn
        patch, p = random_patch(k + n, 7), Partition(kn)
        g = BlockedGroupElement.split(patch.g0, k)
        u, v = (chart_velocity(g, t) for t in patch.tangents())
        om1, om2 = curvature_closed_form(g, chart_point(g), u, v)
        assert frobenius(om1.value - curvature_block(patch, p, 1).value) <= 1e-12
        assert frobenius(om2.value - curvature_block(patch, p, 2).value) <= 1e-12
        assert frobenius(om1.value - obstruction_fd(patch, p, 1, 1e-3)) <= 1e-5

    def test_omega12_sign(self):
        g = blocked(2, 1, 4)
        u = random_tangent(2, 1, 5)
        assert omega12(g, u) == -(g.A.H @ u @ g.D)


class TestRicci:
    def test_equal_arguments(self):
        y, u = GrassmannPoint(random_tangent(1, 2, 0)), random_tangent(1, 2, 1)
        r1, r2 = ricci_forms(y, u, u)
        assert r1.isclose(Quaternion(0, 0, 0, 0)) and r2.isclose(Quaternion(0, 0, 0, 0))

    def test_hand_example(self):
        r1, _ = ricci_forms(GrassmannPoint.origin(1, 1), QMatrix.scalar(ONE), QMatrix.scalar(I))
        assert r1.isclose(Quaternion(0, -2, 0, 0))

    @given(seeds)
    def test_antisymmetric_and_imaginary(self, seed):
        y = GrassmannPoint(random_tangent(2, 2, seed) * 0.5)
        u, v = random_tangent(2, 2, seed + 1), random_tangent(2, 2, seed + 2)
        for a, b in zip(ricci_forms(y, u, v), ricci_forms(y, v, u)):
            assert a == -b
            assert abs(a.x0) <= 1e-11


class TestTorsion:
    def test_zero_third_argument(self):
        g = blocked(1, 1, 0)
        u, v = random_tangent(1, 1, 1), random_tangent(1, 1, 2)
        assert torsion_identity_residual(g, chart_point(g), u, v, QMatrix.zeros(1, 1)) == 0

    @pytest.mark.parametrize("kn,trials,tol", [((1, 1), 100, 1e-10), ((2, 2), 50, 1e-9)])
    def test_identity_holds(self, kn, trials, tol):
        k, n = kn
        for s in range(trials):
            g = blocked(k, n, [s, 0])
            u, v, w = (random_tangent(k, n, [s, t]) for t in (1, 2, 3))
            assert torsion_identity_residual(g, chart_point(g), u, v, w) <= tol


class TestGauge:
    def test_identity(self):
        m = random_skew(3, 0).mat
        assert gauge_transform(m, SpElement.identity(3), Partition.of(1, 2)) == m

    @pytest.mark.parametrize("seed", range(5))
    def test_recomputation(self, seed):
        p = Partition.of(1, 2)
        patch = random_patch(3, seed)
        h = SpElement(block_diagonal([random_sp(1, [seed, 1]).mat, random_sp(2, [seed, 2]).mat]))
        omega = block_diagonal([curvature_block(patch, p, mu).value for mu in (1, 2)])
        moved = patch.right_translate(h)
        fd = block_diagonal([obstruction_fd(moved, p, mu, 1e-3) for mu in (1, 2)])
        transformed = gauge_transform(omega, h, p)
        assert frobenius(fd - transformed) <= 1e-5
        assert frobenius(transformed) == pytest.approx(frobenius(omega), rel=1e-12)

    def test_rejects_mixing_element(self):
        with pytest.raises(ValueError):
            gauge_transform(QMatrix.identity(3), random_sp(3, 0), Partition.of(1, 2))


class TestChern:
    def _omega(self, seed):
        g = blocked(1, 1, seed)
        y = chart_point(g)
        return lambda a, b: curvature_closed_form(g, y, a, b)[0].value

    def test_repeated_argument(self):
        om = self._omega(0)
        u, v, w = (random_tangent(1, 1, t) for t in (1, 2, 3))
        assert chern_trace(om, [u, u], 1) == 0
        assert abs(chern_trace(om, [u, v, u, w], 2)) <= 1e-12

    def test_first_chern_example(self):
        g = BlockedGroupElement.split(SpElement.identity(2), 1)
        om = lambda a, b: curvature_closed_form(g, GrassmannPoint.origin(1, 1), a, b)[0].value  # noqa: E731
        assert chern_trace(om, [QMatrix.scalar(ONE), QMatrix.scalar(I)], 1) == 0

    def test_second_chern_swap(self):
        om = self._omega(1)
        t = [random_tangent(1, 1, s) for s in range(4)]
        swapped = [t[1], t[0], t[2], t[3]]
        assert chern_trace(om, swapped, 2) == pytest.approx(-chern_trace(om, t, 2), rel=1e-12)

    def test_unsupported_degree(self):
        with pytest.raises(ValueError):
            chern_trace(self._omega(0), [], 3)


class TestYangMills:
    def test_hand_example(self):
        om1, _ = ym_curvature(Quaternion(0.0, 0.0, 0.0, 0.0), ONE, I)
        assert om1.isclose(Quaternion(0, -2, 0, 0))

    @given(fquat, fquat)
    def test_equal_arguments(self, q, u):
        om1, om2 = ym_curvature(q, u, u)
        assert om1.isclose(Quaternion(0, 0, 0, 0), 1e-9) and om2.isclose(Quaternion(0, 0, 0, 0), 1e-9)

    @given(fquat, fquat, fquat)
    def test_pure_imaginary_equal_magnitude(self, q, u, v):
        om1, om2 = ym_curvature(q, u, v)
        scale = 1 + norm2(u) * norm2(v)
        assert abs(om1.x0) <= 1e-12 * scale and abs(om2.x0) <= 1e-12 * scale
        assert norm2(om1) == pytest.approx(norm2(om2), rel=1e-9, abs=1e-12 * scale)

    @given(fquat, fquat, fquat)
    def test_second_form_is_first_with_conjugated_arguments(self, q, u, v):
        _, om2 = ym_curvature(q, u, v)
        f = 1 / (1 + norm2(q)) ** 2
        expected = (conj(u) * v - conj(v) * u) * f
        assert om2.isclose(expected, 1e-9)

    def test_second_form_is_not_the_conjugate_of_the_first(self):
        om1, om2 = ym_curvature(Quaternion(0.0, 0.0, 0.0, 0.0), J, I)
        assert not om2.isclose(conj(om1))

    @given(fquat, fquat, fquat)
    def test_matches_closed_form(self, q, u, v):
        g = ym_group_element(q)
        om1, om2 = curvature_closed_form(g, chart_point(g), QMatrix.scalar(u), QMatrix.scalar(v))
        ym1, ym2 = ym_curvature(q, u, v)
        scale = 1e-12 + (norm2(u) * norm2(v)) ** 0.5
        assert np.linalg.norm(om1.value.data[0, 0] - ym1.as_array()) <= 1e-9 * scale
        assert np.linalg.norm(om2.value.data[0, 0] - ym2.as_array()) <= 1e-9 * scale


class TestHodge:
    def test_measured_signs(self):
        q = Quaternion(0.3, -0.2, 0.5, 1.0)
        assert hodge_duality_sign(lambda a, b: ym_curvature(q, a, b)[0]) == 1
        assert hodge_duality_sign(lambda a, b: ym_curvature(q, a, b)[1]) == -1

    def test_mixed_form(self):
        basis = [ONE, I, J, K]

        def only_01(a, b):
            ia = next(i for i, e in enumerate(basis) if e == a)
            ib = next(i for i, e in enumerate(basis) if e == b)
            s = {(0, 1): 1, (1, 0): -1}.get((ia, ib), 0)
            return I * float(s)

        with pytest.raises(MixedDualityError):
            hodge_duality_sign(only_01)

    def test_rejects_symmetric_form(self):
        with pytest.raises(ValueError):
            hodge_duality_sign(lambda a, b: I)

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flagcurv.lorentz import (
    MINKOWSKI,
    PAULI,
    SL2C,
    BallPoint,
    Event,
    OffSurfaceError,
    PoleError,
    act_on_event,
    boost_coefficients,
    boost_velocity,
    cross_ratio,
    em_decompose,
    euler_su2,
    hyperboloid_project,
    polar_decompose,
    random_sl2c,
    sl2c_to_lorentz,
    sphere_project,
)

seeds = st.integers(0, 2**32 - 1)
lams = st.floats(0.2, 5.0)
angles = st.floats(-math.pi, math.pi)


def hermitian(x):
    return np.einsum("m,mab->ab", np.asarray(x, dtype=float), PAULI)


class TestPolar:
    def test_unitary_has_unit_stretch(self):
        _, lam, _ = polar_decompose(euler_su2(0.3, 1.1, -0.4))
        assert lam == pytest.approx(1.0, abs=1e-12)

    def test_diagonal(self):
        _, lam, _ = polar_decompose(SL2C(np.diag([0.5, 2.0])))
        assert lam == pytest.approx(2.0, abs=1e-12)

    @given(seeds)
    def test_reconstruction(self, seed):
        L = random_sl2c(seed)
        rho, lam, tau = polar_decompose(L)
        assert lam >= 1
        for u in (rho, tau):
            assert np.abs(u.m @ u.m.conj().T - np.eye(2)).max() <= 1e-10
        assert np.abs((rho @ SL2C.boost(lam) @ tau).m - L.m).max() <= 1e-10 * max(1, lam * lam)

    def test_rejects_bad_determinant(self):
        with pytest.raises(ValueError):
            SL2C(np.diag([2.0, 2.0]))


class TestEvents:
    def test_identity(self):
        ev = Event(1.0, 2.0, 3.0, 4.0)
        np.testing.assert_array_equal(act_on_event(SL2C.identity(), ev), ev.m2c())

    def test_diagonal_scales_entries(self):
        lam = 1.7
        ev = Event(0.4, -1.2, 0.8, 2.0)
        q, out = ev.m2c(), act_on_event(SL2C.boost(lam), ev)
        assert out[0, 0] == pytest.approx(lam**2 * q[0, 0])
        assert out[1, 1] == pytest.approx(q[1, 1] / lam**2)
        assert out[0, 1] == pytest.approx(q[0, 1]) and out[1, 0] == pytest.approx(q[1, 0])

    @given(seeds, st.lists(st.floats(-10, 10), min_size=4, max_size=4))
    def test_det_preserved(self, seed, x):
        ev = Event(*x)
        before = np.linalg.det(ev.m2c())
        after = np.linalg.det(act_on_event(random_sl2c(seed), ev))
        assert abs(after - before) <= 1e-9 * max(1.0, abs(before), np.linalg.norm(random_sl2c(seed).m) ** 4)


class TestLorentzMatrix:
    def test_identity(self):
        np.testing.assert_allclose(sl2c_to_lorentz(SL2C.identity()), np.eye(4), atol=1e-15)

    @pytest.mark.parametrize("w", [0.1, 0.7, -1.3])
    def test_diagonal_is_boost_along_third_axis(self, w):
        lam = sl2c_to_lorentz(SL2C.boost(math.exp(w)))
        expected = np.eye(4)
        expected[0, 0] = expected[3, 3] = math.cosh(2 * w)
        expected[0, 3] = expected[3, 0] = math.sinh(2 * w)
        np.testing.assert_allclose(lam, expected, atol=1e-12)

    @pytest.mark.parametrize("a", [0.5, 2.0])
    def test_phase_is_rotation_about_third_axis(self, a):
        # e^{ia} multiplies x1 - i x2, a clockwise turn in the (x1, x2) plane
        lam = sl2c_to_lorentz(euler_su2(a, 0.0, 0.0))
        c, s = math.cos(a), math.sin(a)
        np.testing.assert_allclose(lam[1:3, 1:3], [[c, s], [-s, c]], atol=1e-12)
        assert lam[0, 0] == pytest.approx(1) and lam[3, 3] == pytest.approx(1)

    @given(seeds, st.lists(st.floats(-5, 5), min_size=4, max_size=4))
    def test_matches_hermitian_action(self, seed, x):
        L = random_sl2c(seed)
        target = L.m @ hermitian(x) @ L.m.conj().T
        scale = np.linalg.norm(L.m) ** 2 * (1 + np.linalg.norm(x))
        assert np.abs(hermitian(sl2c_to_lorentz(L) @ x) - target).max() <= 1e-10 * scale

    @given(seeds)
    def test_group_membership_and_sign(self, seed):
        L = random_sl2c(seed)
        lam = sl2c_to_lorentz(L)
        scale = np.abs(lam).max() ** 2
        assert np.abs(lam.T @ MINKOWSKI @ lam - MINKOWSKI).max() <= 1e-10 * scale
        assert np.linalg.det(lam) == pytest.approx(1, rel=1e-8) and lam[0, 0] >= 1
        np.testing.assert_array_equal(lam, sl2c_to_lorentz(-L))

    @given(seeds, seeds)
    def test_homomorphism(self, s1, s2):
        a, b = random_sl2c(s1), random_sl2c(s2)
        lhs, rhs = sl2c_to_lorentz(a @ b), sl2c_to_lorentz(a) @ sl2c_to_lorentz(b)
        assert np.abs(lhs - rhs).max() <= 1e-10 * max(1.0, np.abs(lhs).max())


class TestBoosts:
    @given(lams)
    def test_fixed_points(self, lam):
        assert boost_velocity(lam, 1.0) == 1.0
        assert boost_velocity(lam, -1.0) == -1.0

    @given(st.floats(-3, 3))
    def test_rest_frame_velocity(self, w):
        assert boost_velocity(math.exp(w), 0.0) == pytest.approx(math.tanh(2 * w), abs=1e-12)

    def test_coefficients(self):
        C, S = boost_coefficients(2.0)
        assert (C, S) == (2.125, 1.875)
        assert C * C - S * S == pytest.approx(1)

    @given(lams, lams, st.floats(-0.99, 0.99))
    def test_composition(self, l1, l2, v):
        assert boost_velocity(l1, boost_velocity(l2, v)) == pytest.approx(boost_velocity(l1 * l2, v), abs=1e-12)

    @given(lams, st.lists(st.floats(-0.95, 0.95), min_size=4, max_size=4, unique=True))
    def test_cross_ratio_invariant(self, lam, vs):
        vs = sorted(vs)
        if min(b - a for a, b in zip(vs, vs[1:])) < 1e-3:
            return
        before = cross_ratio(*vs)
        after = cross_ratio(*(boost_velocity(lam, v) for v in vs))
        assert after == pytest.approx(before, rel=1e-8)

    def test_pole(self):
        C, S = boost_coefficients(2.0)
        with pytest.raises(PoleError):
            boost_velocity(2.0, -C / S)

    def test_nonpositive_lambda(self):
        with pytest.raises(ValueError):
            boost_velocity(0.0, 0.5)


class TestProjections:
    def test_origin(self):
        assert hyperboloid_project(1.0, [0, 0, 0], 1.0).y == (0.0, 0.0, 0.0)
        assert sphere_project(2.0, [0, 0, 0], 2.0).y == (0.0, 0.0, 0.0)

    def test_light_cone_lands_on_boundary(self):
        assert hyperboloid_project(5.0, [3.0, 4.0, 0.0], 0.0).norm2 == pytest.approx(1, abs=1e-14)

    def test_sphere_equator(self):
        assert sphere_project(0.0, [0.0, 3.0, 0.0], 3.0).norm2 == pytest.approx(1, abs=1e-14)

    @given(st.floats(0, 20), st.floats(0.1, 5), st.floats(-1, 1))
    def test_hyperboloid_inside_ball(self, r, a, c):
        d = np.array([math.sqrt(1 - c * c), 0.0, c])
        b = hyperboloid_project(math.sqrt(a * a + r * r), r * d, a)
        assert b.norm2 < 1

    def test_off_surface(self):
        with pytest.raises(OffSurfaceError):
            hyperboloid_project(1.0, [1.0, 0, 0], 1.0)
        with pytest.raises(OffSurfaceError):
            sphere_project(1.0, [1.0, 0, 0], 1.0)

    def test_ball_point_validates(self):
        with pytest.raises(ValueError):
            BallPoint((1.0, 1.0, 0.0))


class TestElectromagnetic:
    point = np.array([0.3, -0.2, 0.5, 0.1])

    def test_magnetic_example(self):
        f = em_decompose(lambda x: np.array([0, -x[2] / 2, x[1] / 2, 0]), self.point)
        assert abs(f.f) <= 1e-8
        np.testing.assert_allclose(f.E, 0, atol=1e-8)
        np.testing.assert_allclose(f.B, [0, 0, 1], atol=1e-8)

    def test_electric_example(self):
        f = em_decompose(lambda x: np.array([0, x[0], 0, 0]), self.point)
        np.testing.assert_allclose(f.E, [-1, 0, 0], atol=1e-8)
        np.testing.assert_allclose(f.B, 0, atol=1e-8)

    def test_constant_potential(self):
        f = em_decompose(lambda x: np.array([1.0, 2.0, 3.0, 4.0]), self.point)
        assert f.f == 0 and not f.E.any() and not f.B.any()

    def test_scalar_part_is_gauge_divergence(self):
        f = em_decompose(lambda x: np.array([x[0] ** 2, x[1], 0, 0]), self.point)
        assert f.f == pytest.approx(2 * self.point[0] - 1, abs=1e-8)

    def test_second_order(self):
        def pot(x):
            t, a, b, c = x
            return np.array([np.sin(a) * np.cos(t), np.sin(b * t), np.cos(c + a), np.exp(0.3 * b) * np.sin(t)])

        def vec(h):
            f = em_decompose(pot, self.point, h)
            return np.concatenate([[f.f], f.E, f.B])

        f1, f2, f3 = vec(4e-3), vec(2e-3), vec(1e-3)
        ratio = np.linalg.norm(f1 - f2) / np.linalg.norm(f2 - f3)
        assert 3.5 <= ratio <= 4.5

    @pytest.mark.parametrize("step", [1e-7, 0.1])
    def test_step_range(self, step):
        with pytest.raises(ValueError):
            em_decompose(lambda x: x, self.point, step)


class TestEuler:
    @given(angles, angles, angles)
    def test_unitary(self, a, b, g):
        m = euler_su2(a, b, g).m
        assert np.abs(m @ m.conj().T - np.eye(2)).max() <= 1e-12

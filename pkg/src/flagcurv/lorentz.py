"""SL(2,C) acting on quaternionic events, boosts, ball projections and the
electromagnetic split of the quaternion derivative.

Conventions: an event ``(x0, x1, x2, x3)`` with ``x0 = ct`` is written in the
2x2 complex form of :mod:`flagcurv.quat`; the Lorentz matrix of ``L`` is built
from the Hermitian (Pauli) form ``x0 s0 + x1 s1 + x2 s2 + x3 s3`` so that it
preserves ``diag(1, -1, -1, -1)``.  Velocities use the real convention
``v_hat = (S + C v) / (C + S v)``.

Checks registered with the harness:

    check: lorentz.boost_cross_ratio
    check: lorentz.boost_fixed_points
    check: lorentz.em_examples
    check: lorentz.em_second_order
    check: lorentz.event_det_invariance
    check: lorentz.lorentz_group_membership
    check: lorentz.projections_in_ball
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quat import Quaternion, to_m2c

__all__ = [
    "SL2C",
    "Event",
    "BallPoint",
    "EMFields",
    "PoleError",
    "OffSurfaceError",
    "polar_decompose",
    "act_on_event",
    "sl2c_to_lorentz",
    "boost_velocity",
    "boost_coefficients",
    "hyperboloid_project",
    "sphere_project",
    "em_decompose",
    "euler_su2",
    "random_sl2c",
    "cross_ratio",
    "MINKOWSKI",
    "PAULI",
]

MINKOWSKI = np.diag([1.0, -1.0, -1.0, -1.0])
PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


class PoleError(ZeroDivisionError):
    pass


class OffSurfaceError(ValueError):
    pass


@dataclass(frozen=True)
class SL2C:
    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got {m.shape}")
        det = np.linalg.det(m)
        if abs(det - 1) > 1e-12:
            raise ValueError(f"determinant {det} is not 1")
        object.__setattr__(self, "m", m)

    def __matmul__(self, other: SL2C) -> SL2C:
        return SL2C(self.m @ other.m)

    def __neg__(self) -> SL2C:
        return SL2C(-self.m)

    @classmethod
    def identity(cls) -> SL2C:
        return cls(np.eye(2, dtype=complex))

    @classmethod
    def boost(cls, lam: float) -> SL2C:
        return cls(np.diag([lam, 1 / lam]).astype(complex))


@dataclass(frozen=True)
class Event:
    x0: float
    x1: float
    x2: float
    x3: float

    def quaternion(self) -> Quaternion:
        return Quaternion(self.x0, self.x1, self.x2, self.x3)

    def m2c(self) -> np.ndarray:
        return to_m2c(self.quaternion()).matrix()

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3])


@dataclass(frozen=True)
class BallPoint:
    y: tuple[float, float, float]

    def __post_init__(self):
        if self.norm2 > 1 + 1e-12:
            raise ValueError(f"point with squared norm {self.norm2} is outside the unit ball")

    @property
    def norm2(self) -> float:
        return float(sum(c * c for c in self.y))


@dataclass(frozen=True)
class EMFields:
    f: float
    E: np.ndarray
    B: np.ndarray


def random_sl2c(seed: int) -> SL2C:
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    return SL2C(m / np.sqrt(np.linalg.det(m)))


def euler_su2(alpha: float, beta: float, gamma: float) -> SL2C:
    """Unit quaternion from Euler angles, ``diag(e^{ia/2}) R(b) diag(e^{ig/2})``."""
    d = lambda x: np.diag([np.exp(0.5j * x), np.exp(-0.5j * x)])  # noqa: E731
    rot = np.array([[np.cos(beta / 2), np.sin(beta / 2)], [-np.sin(beta / 2), np.cos(beta / 2)]])
    return SL2C(d(alpha) @ rot @ d(gamma))


def polar_decompose(L: SL2C) -> tuple[SL2C, float, SL2C]:
    """``L = rho diag(lam, 1/lam) tau`` with ``rho, tau`` in SU(2) and ``lam >= 1``."""
    u, s, vh = np.linalg.svd(L.m)
    lam = float(s[0])
    root = np.sqrt(np.linalg.det(u))
    rho = u / root
    tau = vh * root
    return SL2C(rho), lam, SL2C(tau)


def act_on_event(L: SL2C, x: Event) -> np.ndarray:
    """``L q L*`` on the 2x2 complex form of the event."""
    return L.m @ x.m2c() @ L.m.conj().T


def sl2c_to_lorentz(L: SL2C) -> np.ndarray:
    """4x4 real matrix of ``X -> L X L*`` on Hermitian ``X = sum x_mu sigma_mu``."""
    Lh = L.m.conj().T
    out = np.empty((4, 4))
    for mu in range(4):
        for nu in range(4):
            out[mu, nu] = 0.5 * np.trace(PAULI[mu] @ L.m @ PAULI[nu] @ Lh).real
    return out


def boost_coefficients(lam: float) -> tuple[float, float]:
    """``(C, S) = ((lam^2 + lam^-2)/2, (lam^2 - lam^-2)/2)``."""
    a, b = lam * lam, 1.0 / (lam * lam)
    return 0.5 * (a + b), 0.5 * (a - b)


def boost_velocity(lam: float, v: float) -> float:
    if lam <= 0:
        raise ValueError("boost parameter must be positive")
    C, S = boost_coefficients(lam)
    den = C + S * v
    if den == 0:
        raise PoleError(f"v = {v} is the pole of the boost with lambda = {lam}")
    return (S + C * v) / den


def cross_ratio(a: float, b: float, c: float, d: float) -> float:
    return ((a - c) * (b - d)) / ((a - d) * (b - c))


def hyperboloid_project(y0: float, yvec, a: float, tol: float = 1e-9) -> BallPoint:
    """``y / (|y0| + a)`` for a point on ``y0^2 - |y|^2 = a^2``."""
    yvec = np.asarray(yvec, dtype=float)
    if a < 0:
        raise ValueError("a must be non-negative")
    if abs(y0 * y0 - yvec @ yvec - a * a) > tol * max(1.0, y0 * y0):
        raise OffSurfaceError("point is not on the hyperboloid")
    den = abs(y0) + a
    if den == 0:
        raise OffSurfaceError("degenerate point |y0| + a = 0")
    return BallPoint(tuple(float(c) for c in yvec / den))


def sphere_project(x0: float, xvec, b: float, tol: float = 1e-9) -> BallPoint:
    """``x / (|x0| + b)`` for a point on ``x0^2 + |x|^2 = b^2``."""
    xvec = np.asarray(xvec, dtype=float)
    if b <= 0:
        raise ValueError("b must be positive")
    if abs(x0 * x0 + xvec @ xvec - b * b) > tol * b * b:
        raise OffSurfaceError("point is not on the sphere")
    return BallPoint(tuple(float(c) for c in xvec / (abs(x0) + b)))


def _jacobian(A: Callable, point: np.ndarray, step: float) -> np.ndarray:
    """``jac[nu, mu] = d A_nu / d x_mu`` by central differences."""
    jac = np.empty((4, 4))
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = step
        jac[:, mu] = (np.asarray(A(point + e), dtype=float) - np.asarray(A(point - e), dtype=float)) / (2 * step)
    return jac


def em_decompose(A: Callable, point, step: float = 1e-3) -> EMFields:
    """Split ``(d0 + grad)(A0 + A)`` into ``f 1 - E + B``."""
    if not 1e-6 <= step <= 1e-2:
        raise ValueError(f"step {step} outside [1e-6, 1e-2]")
    jac = _jacobian(A, np.asarray(point, dtype=float), step)
    f = jac[0, 0] - (jac[1, 1] + jac[2, 2] + jac[3, 3])
    E = -(jac[1:, 0] + jac[0, 1:])
    B = np.array([jac[3, 2] - jac[2, 3], jac[1, 3] - jac[3, 1], jac[2, 1] - jac[1, 2]])
    return EMFields(float(f), E, B)

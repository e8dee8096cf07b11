"""Connection and curvature forms on Sp(N) and its flag manifolds.

One-forms are evaluated on tangent vectors; two-forms on ordered pairs.  The
wedge of matrix-valued forms keeps the factors in argument order,

    (a ^ b)(u, v) = a(u) b(v) - a(v) b(u),

and a two-form against a one-form uses

    (F ^ t)(u, v, w) = F(u, v) t(w) - F(u, w) t(v) + F(v, w) t(u).

Exterior derivatives of one-forms are taken on a :class:`CurvePatch`
``g(s, t) = exp(s A) exp(t B) g0`` with central differences at ``s = t = 0``.

Checks registered with the harness:

    check: forms.block_curvature_matches_fd
    check: forms.block_sum_consistency
    check: forms.gauge_tensoriality
    check: forms.hodge_duality
    check: forms.mc2_second_order
    check: forms.offdiag_structure_equation
    check: forms.torsion_identity
    check: forms.two_form_skew
    check: forms.w12_chart_relation
    check: forms.ym_matches_closed_form
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .grassmann import BlockedGroupElement, GrassmannPoint, one_plus_ystar_y, one_plus_yy
from .qmat import QMatrix, SpAlgebraElement, SpElement, frobenius, q_expm, q_inverse
from .quat import ONE, I, J, K, Quaternion, conj, norm2

__all__ = [
    "Partition",
    "CurvePatch",
    "ConnectionValue",
    "TwoFormValue",
    "NotTangentError",
    "MixedDualityError",
    "connection_eval",
    "d_omega_fd",
    "mc2_matrix",
    "mc2_residual",
    "mc2_block_residual",
    "curvature_block",
    "obstruction_fd",
    "chart_velocity",
    "omega12",
    "curvature_closed_form",
    "ricci_forms",
    "torsion_identity_residual",
    "gauge_transform",
    "block_diagonal",
    "chern_trace",
    "ym_curvature",
    "hodge_star",
    "hodge_duality_sign",
    "wedge",
]

FD_MIN, FD_MAX = 1e-6, 1e-2


class NotTangentError(ValueError):
    pass


class MixedDualityError(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(int(p) for p in self.parts))
        if not self.parts or any(p < 1 for p in self.parts):
            raise ValueError(f"invalid partition {self.parts}")

    @classmethod
    def of(cls, *parts: int) -> Partition:
        return cls(tuple(parts))

    @property
    def N(self) -> int:
        return sum(self.parts)

    @property
    def m(self) -> int:
        return len(self.parts)

    def slice(self, mu: int) -> slice:
        """Rows/columns of block ``mu`` (1-based)."""
        if not 1 <= mu <= self.m:
            raise IndexError(f"block index {mu} outside 1..{self.m}")
        start = sum(self.parts[: mu - 1])
        return slice(start, start + self.parts[mu - 1])

    def block(self, m: QMatrix, mu: int, nu: int) -> QMatrix:
        return m[self.slice(mu), self.slice(nu)]

    def is_block_diagonal(self, m: QMatrix, tol: float = 0.0) -> bool:
        return all(
            frobenius(self.block(m, mu, nu)) <= tol
            for mu in range(1, self.m + 1)
            for nu in range(1, self.m + 1)
            if mu != nu
        )


@dataclass(frozen=True)
class CurvePatch:
    """Two-parameter surface ``g(s, t) = exp(s A) exp(t B) g0`` in Sp(N)."""

    g0: SpElement
    a_alg: SpAlgebraElement
    b_alg: SpAlgebraElement

    def __post_init__(self):
        if not self.g0.n == self.a_alg.n == self.b_alg.n:
            raise ValueError("patch data of mismatched sizes")

    @property
    def N(self) -> int:
        return self.g0.n

    def g(self, s: float = 0.0, t: float = 0.0) -> SpElement:
        return q_expm(self.a_alg * s) @ q_expm(self.b_alg * t) @ self.g0

    def tangents(self, s: float = 0.0, t: float = 0.0) -> tuple[QMatrix, QMatrix]:
        """``(dg/ds, dg/dt)`` at ``(s, t)``."""
        es = q_expm(self.a_alg * s).mat
        et = q_expm(self.b_alg * t).mat
        g = es @ et @ self.g0.mat
        return self.a_alg.mat @ g, es @ self.b_alg.mat @ et @ self.g0.mat

    def omega(self, s: float = 0.0, t: float = 0.0) -> tuple[QMatrix, QMatrix]:
        """Connection ``g* dg`` on ``d/ds`` and ``d/dt``."""
        g = self.g(s, t).mat
        gs, gt = self.tangents(s, t)
        return g.H @ gs, g.H @ gt

    def right_translate(self, h: SpElement) -> CurvePatch:
        """The patch ``g(s, t) h``."""
        return CurvePatch(self.g0 @ h, self.a_alg, self.b_alg)


@dataclass(frozen=True)
class ConnectionValue:
    omega: QMatrix
    partition: Partition

    def block(self, mu: int, nu: int) -> QMatrix:
        return self.partition.block(self.omega, mu, nu)


@dataclass(frozen=True)
class TwoFormValue:
    value: QMatrix
    args: tuple = field(default=(), compare=False)

    def skew_error(self) -> float:
        return frobenius(self.value.H + self.value)


def _check_step(h: float) -> None:
    if not FD_MIN <= h <= FD_MAX:
        raise ValueError(f"finite-difference step {h} outside [{FD_MIN}, {FD_MAX}]")


def connection_eval(g: SpElement, v: QMatrix, p: Partition) -> ConnectionValue:
    if p.N != g.n:
        raise ValueError(f"partition of {p.N} for a group element of size {g.n}")
    w = g.mat.H @ v
    err = frobenius(w + w.H)
    if err > 1e-8:
        raise NotTangentError(f"g* v is not skew-Hermitian (error {err:.3e})")
    return ConnectionValue(w, p)


def wedge(a: Callable, b: Callable, u, v):
    return a(u) @ b(v) - a(v) @ b(u)


def d_omega_fd(patch: CurvePatch, h: float) -> QMatrix:
    """``d omega(d/ds, d/dt)`` at the patch origin by central differences."""
    _check_step(h)
    wt_plus = patch.omega(h, 0.0)[1]
    wt_minus = patch.omega(-h, 0.0)[1]
    ws_plus = patch.omega(0.0, h)[0]
    ws_minus = patch.omega(0.0, -h)[0]
    return (wt_plus - wt_minus) / (2 * h) - (ws_plus - ws_minus) / (2 * h)


def mc2_matrix(patch: CurvePatch, h: float) -> QMatrix:
    """``(d omega + omega ^ omega)(d/ds, d/dt)`` as a full N x N matrix."""
    ws, wt = patch.omega()
    return d_omega_fd(patch, h) + (ws @ wt - wt @ ws)


def mc2_residual(patch: CurvePatch, p: Partition, h: float) -> float:
    if p.N != patch.N:
        raise ValueError(f"partition of {p.N} for a patch in Sp({patch.N})")
    return frobenius(mc2_matrix(patch, h))


def mc2_block_residual(patch: CurvePatch, p: Partition, mu: int, nu: int, h: float) -> float:
    """Residual of ``d w_{mu nu} + sum_a w_{mu a} ^ w_{a nu}``."""
    ws, wt = patch.omega()
    total = p.block(d_omega_fd(patch, h), mu, nu)
    for a in range(1, p.m + 1):
        total = total + p.block(ws, mu, a) @ p.block(wt, a, nu) - p.block(wt, mu, a) @ p.block(ws, a, nu)
    return frobenius(total)


def curvature_block(patch: CurvePatch, p: Partition, mu: int) -> TwoFormValue:
    """``Omega_mu = sum_{a != mu} w_{mu a} ^ w_{mu a}*`` on ``(d/ds, d/dt)``."""
    if p.N != patch.N:
        raise ValueError(f"partition of {p.N} for a patch in Sp({patch.N})")
    p.slice(mu)
    ws, wt = patch.omega()
    k = p.parts[mu - 1]
    out = QMatrix.zeros(k, k)
    for a in range(1, p.m + 1):
        if a == mu:
            continue
        xs, xt = p.block(ws, mu, a), p.block(wt, mu, a)
        out = out + xs @ xt.H - xt @ xs.H
    return TwoFormValue(out, args=patch.tangents())


def obstruction_fd(patch: CurvePatch, p: Partition, mu: int, h: float) -> QMatrix:
    """``d w_{mu mu} + w_{mu mu} ^ w_{mu mu}`` with the derivative by finite differences."""
    ws, wt = patch.omega()
    d = p.block(d_omega_fd(patch, h), mu, mu)
    a, b = p.block(ws, mu, mu), p.block(wt, mu, mu)
    return d + a @ b - b @ a


def chart_velocity(g: BlockedGroupElement, dg: QMatrix) -> QMatrix:
    """Velocity of ``Y = B D^{-1}`` when ``g`` moves with velocity ``dg``."""
    k = g.k
    dB, dD = dg[:k, k:], dg[k:, k:]
    Dinv = q_inverse(g.D)
    Y = g.B @ Dinv
    return (dB - Y @ dD) @ Dinv


def omega12(g: BlockedGroupElement, x: QMatrix) -> QMatrix:
    """Off-diagonal connection block on a chart tangent, ``-A* x D``.

    Note the sign: ``A* dY D`` is ``+(g* dg)_12``; the minus matches the (1, 2)
    block of the connection of ``S g S`` with ``S = diag(1_k, -1_n)``.
    """
    return -(g.A.H @ x @ g.D)


def curvature_closed_form(
    g: BlockedGroupElement, y: GrassmannPoint, u: QMatrix, v: QMatrix
) -> tuple[TwoFormValue, TwoFormValue]:
    """Grassmann curvature two-forms in chart coordinates.

    Omega_1 = A* dY (1+Y*Y)^{-1} ^ dY* A,   Omega_2 = D* dY* (1+YY*)^{-1} ^ dY D
    """
    Y = y.Y
    if Y.shape != (g.k, g.n) or u.shape != Y.shape or v.shape != Y.shape:
        raise ValueError("dimension mismatch between group blocks, point and tangents")
    P = q_inverse(one_plus_yy(Y))
    Q = q_inverse(one_plus_ystar_y(Y))
    A, D = g.A, g.D
    om1 = A.H @ (u @ Q @ v.H - v @ Q @ u.H) @ A
    om2 = D.H @ (u.H @ P @ v - v.H @ P @ u) @ D
    return TwoFormValue(om1, (u, v)), TwoFormValue(om2, (u, v))


def ricci_forms(y: GrassmannPoint, u: QMatrix, v: QMatrix) -> tuple[Quaternion, Quaternion]:
    Y = y.Y
    P = q_inverse(one_plus_yy(Y))
    Q = q_inverse(one_plus_ystar_y(Y))
    r1 = (P @ u @ Q @ v.H - P @ v @ Q @ u.H).trace()
    r2 = (Q @ u.H @ P @ v - Q @ v.H @ P @ u).trace()
    return r1, r2


def torsion_identity_residual(
    g: BlockedGroupElement, y: GrassmannPoint, u: QMatrix, v: QMatrix, w: QMatrix
) -> float:
    """Frobenius norm of ``Omega_1 ^ w12 - w12 ^ Omega_2`` on ``(u, v, w)``."""

    def om1(a, b):
        return curvature_closed_form(g, y, a, b)[0].value

    def om2(a, b):
        return curvature_closed_form(g, y, a, b)[1].value

    def th(a):
        return omega12(g, a)

    lhs = om1(u, v) @ th(w) - om1(u, w) @ th(v) + om1(v, w) @ th(u)
    rhs = th(u) @ om2(v, w) - th(v) @ om2(u, w) + th(w) @ om2(u, v)
    return frobenius(lhs - rhs)


def block_diagonal(blocks: Sequence[QMatrix]) -> QMatrix:
    n = sum(b.rows for b in blocks)
    out = np.zeros((n, n, 4))
    i = 0
    for b in blocks:
        out[i : i + b.rows, i : i + b.cols] = b.data
        i += b.rows
    return QMatrix(out)


def gauge_transform(value: QMatrix, h: SpElement, p: Partition) -> QMatrix:
    """``h* value h`` for a fiber element ``h`` (block diagonal under ``p``)."""
    if p.N != h.n or value.shape != (h.n, h.n):
        raise ValueError("dimension mismatch between value, gauge element and partition")
    if not p.is_block_diagonal(h.mat, tol=1e-12):
        raise ValueError("gauge element is not block diagonal under the partition")
    return h.mat.H @ value @ h.mat


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def chern_trace(omega: Callable[[QMatrix, QMatrix], QMatrix], tangents: Sequence, ell: int) -> float:
    """Real trace of the ``ell``-fold wedge power of a matrix two-form."""
    if ell not in (1, 2):
        raise ValueError(f"Chern traces implemented for ell in (1, 2), got {ell}")
    if len(tangents) != 2 * ell:
        raise ValueError(f"need {2 * ell} tangents, got {len(tangents)}")
    if ell == 1:
        return omega(tangents[0], tangents[1]).real_trace()
    total = 0.0
    for perm in itertools.permutations(range(4)):
        u = [tangents[i] for i in perm]
        total += _perm_sign(perm) * (omega(u[0], u[1]) @ omega(u[2], u[3])).real_trace()
    return total / 4.0


def ym_curvature(q: Quaternion, u: Quaternion, v: Quaternion) -> tuple[Quaternion, Quaternion]:
    """Curvature of Sp(2)/Sp(1)xSp(1) at chart point ``q`` in the real gauge.

    Omega_1 = (1+|q|^2)^{-2} (u conj(v) - v conj(u))    (dq ^ dq-bar)
    Omega_2 = (1+|q|^2)^{-2} (conj(u) v - conj(v) u)    (dq-bar ^ dq)
    """
    f = 1 / (1 + norm2(q)) ** 2
    om1 = (u * conj(v) - v * conj(u)) * f
    om2 = (conj(u) * v - conj(v) * u) * f
    return om1, om2


_LEVI = np.zeros((4, 4, 4, 4))
for _p in itertools.permutations(range(4)):
    _LEVI[_p] = _perm_sign(_p)


def hodge_star(F: np.ndarray) -> np.ndarray:
    """Hodge star of an antisymmetric 4x4 component array, orientation e0^e1^e2^e3."""
    return 0.5 * np.einsum("abcd,cd->ab", _LEVI, F)


def hodge_duality_sign(form: Callable[[Quaternion, Quaternion], Quaternion], atol: float = 1e-12) -> int:
    """Return ``s`` with ``*F = s F`` for every imaginary component of ``form``."""
    basis = (ONE, I, J, K)
    F = np.array([[form(a, b).as_array() for b in basis] for a in basis])
    if np.abs(F + F.transpose(1, 0, 2)).max() > atol:
        raise ValueError("form is not antisymmetric")
    if np.abs(F[..., 0]).max() > atol:
        raise ValueError("form has a real component")
    signs = set()
    for c in (1, 2, 3):
        Fc = F[..., c]
        if np.abs(Fc).max() <= atol:
            continue
        star = hodge_star(Fc)
        if np.abs(star - Fc).max() <= atol:
            signs.add(1)
        elif np.abs(star + Fc).max() <= atol:
            signs.add(-1)
        else:
            raise MixedDualityError(f"component {'ijk'[c - 1]} is neither self-dual nor anti-self-dual")
    if len(signs) != 1:
        raise MixedDualityError("components disagree on duality" if signs else "form vanishes")
    return signs.pop()


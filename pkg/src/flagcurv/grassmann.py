"""Affine chart of the quaternionic Grassmannian Sp(k+n)/Sp(k)xSp(n).

A group element is split as ``g = [[A, B], [C, D]]`` with ``A`` of size k x k.
Its first k rows form the Stiefel block ``X = [Xk, Xn]`` and the chart
coordinate is ``Y = Xk^{-1} Xn``.  The group acts on the chart by the linear
fractional map ``Y -> (AY + B)(CY + D)^{-1}``.

Checks registered with the harness:

    check: grassmann.chart_identity
    check: grassmann.dimension_counts
    check: grassmann.lft_action_axioms
    check: grassmann.lft_closed_forms_agree
    check: grassmann.metric_connection_form
    check: grassmann.metric_invariance
    check: grassmann.one_plus_yy_ge_one
    check: grassmann.origin_image
    check: grassmann.pushforward_companions
    check: grassmann.pushforward_linear
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qmat import (
    QMatrix,
    SingularMatrixError,
    SpElement,
    embed,
    frobenius,
    q_inverse,
)

__all__ = [
    "ChartBreakdownError",
    "StiefelBlock",
    "GrassmannPoint",
    "BlockedGroupElement",
    "Dimensions",
    "stiefel_from_group",
    "grassmann_from_stiefel",
    "chart_point",
    "lft_apply",
    "lft_pushforward",
    "metric_eval",
    "dimensions",
    "one_plus_yy",
    "one_plus_ystar_y",
]

CLOSED_FORM_TOL = 1e-9


class ChartBreakdownError(ArithmeticError):
    """The point (or its image) lies outside the affine chart."""


def _inv(m: QMatrix, what: str) -> QMatrix:
    try:
        return q_inverse(m)
    except SingularMatrixError as exc:
        raise ChartBreakdownError(f"{what} is singular: {exc}") from None


@dataclass(frozen=True)
class StiefelBlock:
    Xk: QMatrix
    Xn: QMatrix

    def __post_init__(self):
        k = self.Xk.rows
        if self.Xk.shape != (k, k) or self.Xn.rows != k:
            raise ValueError(f"incompatible Stiefel blocks {self.Xk.shape}, {self.Xn.shape}")
        err = frobenius(self.Xk @ self.Xk.H + self.Xn @ self.Xn.H - QMatrix.identity(k))
        if err > 1e-10:
            raise ValueError(f"X X* differs from the identity by {err:.3e}")

    @property
    def X(self) -> QMatrix:
        return QMatrix.block([[self.Xk, self.Xn]])


@dataclass(frozen=True)
class GrassmannPoint:
    Y: QMatrix

    def __post_init__(self):
        lo = np.linalg.eigvalsh(embed(one_plus_yy(self.Y))).min()
        if lo < 1 - 1e-10:
            raise ValueError(f"1 + YY* has eigenvalue {lo} < 1")

    @property
    def k(self) -> int:
        return self.Y.rows

    @property
    def n(self) -> int:
        return self.Y.cols

    @classmethod
    def origin(cls, k: int, n: int) -> GrassmannPoint:
        return cls(QMatrix.zeros(k, n))


@dataclass(frozen=True)
class BlockedGroupElement:
    A: QMatrix
    B: QMatrix
    C: QMatrix
    D: QMatrix

    def __post_init__(self):
        k, n = self.A.rows, self.D.rows
        shapes = (self.A.shape, self.B.shape, self.C.shape, self.D.shape)
        if shapes != ((k, k), (k, n), (n, k), (n, n)):
            raise ValueError(f"incompatible blocks {shapes}")
        SpElement(self.assemble())

    @classmethod
    def split(cls, g: SpElement, k: int) -> BlockedGroupElement:
        if not 1 <= k < g.n:
            raise ValueError(f"need 1 <= k < N, got k={k}, N={g.n}")
        m = g.mat
        return cls(m[:k, :k], m[:k, k:], m[k:, :k], m[k:, k:])

    @property
    def k(self) -> int:
        return self.A.rows

    @property
    def n(self) -> int:
        return self.D.rows

    def assemble(self) -> QMatrix:
        return QMatrix.block([[self.A, self.B], [self.C, self.D]])

    def group(self) -> SpElement:
        return SpElement(self.assemble())

    def __matmul__(self, other: BlockedGroupElement) -> BlockedGroupElement:
        return BlockedGroupElement.split(self.group() @ other.group(), self.k)


@dataclass(frozen=True)
class Dimensions:
    dim_Y: int
    dim_X: int
    dim_fiber: int


def one_plus_yy(Y: QMatrix) -> QMatrix:
    return QMatrix.identity(Y.rows) + Y @ Y.H


def one_plus_ystar_y(Y: QMatrix) -> QMatrix:
    return QMatrix.identity(Y.cols) + Y.H @ Y


def stiefel_from_group(g: SpElement, k: int) -> StiefelBlock:
    if not 1 <= k < g.n:
        raise ValueError(f"need 1 <= k < N, got k={k}, N={g.n}")
    return StiefelBlock(g.mat[:k, :k], g.mat[:k, k:])


def grassmann_from_stiefel(x: StiefelBlock) -> GrassmannPoint:
    return GrassmannPoint(_inv(x.Xk, "Xk") @ x.Xn)


def chart_point(g: BlockedGroupElement) -> GrassmannPoint:
    """Image of the origin, ``B D^{-1}``."""
    return GrassmannPoint(g.B @ _inv(g.D, "D"))


def lft_apply(g: BlockedGroupElement, y: GrassmannPoint) -> GrassmannPoint:
    """``(AY + B)(CY + D)^{-1}``, cross-checked against ``(A* - YB*)^{-1}(-C* + YD*)``."""
    Y = y.Y
    right = (g.A @ Y + g.B) @ _inv(g.C @ Y + g.D, "CY + D")
    left = _inv(g.A.H - Y @ g.B.H, "A* - YB*") @ (Y @ g.D.H - g.C.H)
    err = frobenius(left - right)
    if err > CLOSED_FORM_TOL * max(1.0, frobenius(right)):
        raise ArithmeticError(f"closed forms of the linear fractional map disagree by {err:.3e}")
    return GrassmannPoint(right)


def lft_pushforward(g: BlockedGroupElement, y: GrassmannPoint, u: QMatrix) -> QMatrix:
    """Tangent map ``u -> (A* - YB*)^{-1} u (CY + D)^{-1}``."""
    Y = y.Y
    if u.shape != Y.shape:
        raise ValueError(f"tangent of shape {u.shape} at a point of shape {Y.shape}")
    return _inv(g.A.H - Y @ g.B.H, "A* - YB*") @ u @ _inv(g.C @ Y + g.D, "CY + D")


def metric_eval(y: GrassmannPoint, u: QMatrix, v: QMatrix) -> float:
    """Invariant metric ``Re Tr[(1+YY*)^{-1} u (1+Y*Y)^{-1} v*]``."""
    Y = y.Y
    P = q_inverse(one_plus_yy(Y))
    Q = q_inverse(one_plus_ystar_y(Y))
    return (P @ u @ Q @ v.H).real_trace()


def dimensions(k: int, n: int) -> Dimensions:
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    dim_y = 4 * k * n
    dim_x = 4 * k * n + 2 * k * k + k
    return Dimensions(dim_Y=dim_y, dim_X=dim_x, dim_fiber=k * (2 * k + 1))

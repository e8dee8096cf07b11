"""Scalar quaternion arithmetic.

A :class:`Quaternion` stores its four components in the ``1, i, j, k`` basis.
Components may be floats (numeric path) or :class:`fractions.Fraction`
(exact path); every operation here is written with plain ``+ - *`` so the
exact path stays exact.

The 2x2 complex form used throughout the package is

    [[ z1,        z2      ],
     [ -conj(z2), conj(z1)]]      z1 = x0 + i x3,  z2 = x1 + i x2.

Checks registered with the harness:

    check: quat.associativity_distributivity
    check: quat.conj_antihomomorphism
    check: quat.conj_is_j_transpose_j
    check: quat.det_is_norm2
    check: quat.j_conjugate_involution
    check: quat.m2c_homomorphism
    check: quat.norm_multiplicative
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy.polys.domains import QQ_I

__all__ = [
    "Quaternion",
    "M2CRep",
    "qmul",
    "conj",
    "norm2",
    "to_m2c",
    "from_m2c",
    "j_conjugate",
    "ONE",
    "I",
    "J",
    "K",
]


@dataclass(frozen=True)
class Quaternion:
    x0: numbers.Real = 0
    x1: numbers.Real = 0
    x2: numbers.Real = 0
    x3: numbers.Real = 0

    @classmethod
    def from_array(cls, a) -> Quaternion:
        a = np.asarray(a, dtype=float)
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    @classmethod
    def exact(cls, *components) -> Quaternion:
        """Quaternion with :class:`Fraction` components."""
        return cls(*(Fraction(c) for c in components))

    def __iter__(self):
        return iter((self.x0, self.x1, self.x2, self.x3))

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self])

    @property
    def scalar(self):
        return self.x0

    @property
    def vector(self):
        return (self.x1, self.x2, self.x3)

    def __add__(self, other: Quaternion) -> Quaternion:
        return Quaternion(*(a + b for a, b in zip(self, other)))

    def __sub__(self, other: Quaternion) -> Quaternion:
        return Quaternion(*(a - b for a, b in zip(self, other)))

    def __neg__(self) -> Quaternion:
        return Quaternion(*(-a for a in self))

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return qmul(self, other)
        return Quaternion(*(a * other for a in self))

    def __rmul__(self, other):
        return Quaternion(*(other * a for a in self))

    def __truediv__(self, scalar):
        return Quaternion(*(a / scalar for a in self))

    def conj(self) -> Quaternion:
        return conj(self)

    def norm2(self):
        return norm2(self)

    def isclose(self, other: Quaternion, atol: float = 1e-12) -> bool:
        return all(abs(a - b) <= atol for a, b in zip(self, other))


ONE = Quaternion(1, 0, 0, 0)
I = Quaternion(0, 1, 0, 0)
J = Quaternion(0, 0, 1, 0)
K = Quaternion(0, 0, 0, 1)


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product from the scalar/vector split.

    ab = (a0 b0 - a.b) + a0 b + b0 a + a x b
    """
    a0, (a1, a2, a3) = a.x0, a.vector
    b0, (b1, b2, b3) = b.x0, b.vector
    dot = a1 * b1 + a2 * b2 + a3 * b3
    return Quaternion(
        a0 * b0 - dot,
        a0 * b1 + b0 * a1 + (a2 * b3 - a3 * b2),
        a0 * b2 + b0 * a2 + (a3 * b1 - a1 * b3),
        a0 * b3 + b0 * a3 + (a1 * b2 - a2 * b1),
    )


def conj(q: Quaternion) -> Quaternion:
    return Quaternion(q.x0, -q.x1, -q.x2, -q.x3)


def norm2(q: Quaternion):
    return q.x0 * q.x0 + q.x1 * q.x1 + q.x2 * q.x2 + q.x3 * q.x3


def _is_exact(q: Quaternion) -> bool:
    return all(isinstance(c, numbers.Rational) for c in q)


def _cconj(z):
    if isinstance(z, complex):
        return z.conjugate()
    return QQ_I(z.x, -z.y)


@dataclass(frozen=True)
class M2CRep:
    """Entries ``z1, z2`` of the 2x2 complex form of a quaternion.

    The entries are Python complex numbers on the numeric path and
    Gaussian rationals (``sympy`` ``QQ_I`` elements) on the exact path.
    """

    z1: object
    z2: object

    def matrix(self):
        """The full 2x2 matrix as nested lists (exact) or an ndarray."""
        rows = [[self.z1, self.z2], [-_cconj(self.z2), _cconj(self.z1)]]
        if isinstance(self.z1, complex):
            return np.array(rows, dtype=complex)
        return rows

    def det(self):
        m = self.matrix()
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]

    @classmethod
    def from_matrix(cls, m, atol: float = 1e-12) -> M2CRep:
        """Read ``z1, z2`` off a 2x2 matrix, checking the quaternion pattern."""
        if isinstance(m, np.ndarray):
            if abs(m[1, 1] - m[0, 0].conjugate()) > atol or abs(m[1, 0] + m[0, 1].conjugate()) > atol:
                raise ValueError("matrix is not of the form [[z1, z2], [-conj(z2), conj(z1)]]")
            return cls(complex(m[0, 0]), complex(m[0, 1]))
        z1, z2 = m[0][0], m[0][1]
        if m[1][1] != _cconj(z1) or m[1][0] != -_cconj(z2):
            raise ValueError("matrix is not of the form [[z1, z2], [-conj(z2), conj(z1)]]")
        return cls(z1, z2)


def to_m2c(q: Quaternion) -> M2CRep:
    if _is_exact(q):
        return M2CRep(QQ_I(q.x0, q.x3), QQ_I(q.x1, q.x2))
    return M2CRep(complex(q.x0, q.x3), complex(q.x1, q.x2))


def from_m2c(m: M2CRep) -> Quaternion:
    z1, z2 = m.z1, m.z2
    if isinstance(z1, complex):
        return Quaternion(z1.real, z2.real, z2.imag, z1.imag)
    return Quaternion(Fraction(int(z1.x.numerator), int(z1.x.denominator)),
                      Fraction(int(z2.x.numerator), int(z2.x.denominator)),
                      Fraction(int(z2.y.numerator), int(z2.y.denominator)),
                      Fraction(int(z1.y.numerator), int(z1.y.denominator)))


def j_conjugate(q: Quaternion) -> Quaternion:
    """Entrywise complex conjugation of the 2x2 form, ``j' q j``.

    In components this is ``(x0, x1, -x2, -x3)``.
    """
    return Quaternion(q.x0, q.x1, -q.x2, -q.x3)

"""Dense quaternion matrices.

A :class:`QMatrix` wraps a float array of shape ``(rows, cols, 4)``.  Inverses,
exponentials and condition numbers go through the ``2rows x 2cols`` complex
embedding (each entry replaced by its 2x2 complex block) and come back with
:func:`unembed`.

Checks registered with the harness:

    check: qmat.embed_homomorphism
    check: qmat.expm_block_diagonal
    check: qmat.expm_one_parameter_group
    check: qmat.sp_algebra_commutator_closure
    check: qmat.sp_closure
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .quat import Quaternion, qmul

__all__ = [
    "QMatrix",
    "SpElement",
    "SpAlgebraElement",
    "SingularMatrixError",
    "NotSymplecticError",
    "matmul",
    "embed",
    "unembed",
    "q_inverse",
    "q_expm",
    "random_sp",
    "random_skew",
    "random_tangent",
    "random_quaternion_array",
    "sp_dimension",
    "frobenius",
    "UNITARITY_TOL",
    "SINGULAR_COND",
]

UNITARITY_TOL = 1e-10
SINGULAR_COND = 1e12
STRUCTURE_TOL = 1e-10


class SingularMatrixError(ValueError):
    pass


class NotSymplecticError(ValueError):
    pass


def _structure_constants() -> np.ndarray:
    basis = [Quaternion(*row) for row in np.eye(4, dtype=int).tolist()]
    c = np.zeros((4, 4, 4))
    for a, ea in enumerate(basis):
        for b, eb in enumerate(basis):
            c[a, b] = [float(x) for x in qmul(ea, eb)]
    return c


# c[a, b, :] holds the components of e_a e_b
_MULT = _structure_constants()
_CONJ = np.array([1.0, -1.0, -1.0, -1.0])


class QMatrix:
    """Rectangular matrix of quaternions."""

    __slots__ = ("data",)

    def __init__(self, data):
        data = np.asarray(data, dtype=float)
        if data.ndim != 3 or data.shape[2] != 4:
            raise ValueError(f"expected an array of shape (rows, cols, 4), got {data.shape}")
        self.data = data

    @classmethod
    def zeros(cls, rows: int, cols: int) -> QMatrix:
        return cls(np.zeros((rows, cols, 4)))

    @classmethod
    def identity(cls, n: int) -> QMatrix:
        d = np.zeros((n, n, 4))
        d[np.arange(n), np.arange(n), 0] = 1.0
        return cls(d)

    @classmethod
    def scalar(cls, q: Quaternion) -> QMatrix:
        return cls(np.array([[q.as_array()]]))

    @classmethod
    def from_entries(cls, rows) -> QMatrix:
        return cls(np.array([[q.as_array() for q in row] for row in rows]))

    @classmethod
    def block(cls, blocks) -> QMatrix:
        return cls(np.concatenate([np.concatenate([b.data for b in row], axis=1) for row in blocks], axis=0))

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __getitem__(self, idx):
        i, j = idx
        if isinstance(i, slice) or isinstance(j, slice):
            return QMatrix(self.data[i, j])
        return Quaternion.from_array(self.data[i, j])

    def adjoint(self) -> QMatrix:
        return QMatrix(np.transpose(self.data, (1, 0, 2)) * _CONJ)

    @property
    def H(self) -> QMatrix:
        return self.adjoint()

    def real_trace(self) -> float:
        """Real part of the sum of diagonal entries."""
        return float(np.trace(self.data[:, :, 0]))

    def trace(self) -> Quaternion:
        n = min(self.shape)
        return Quaternion.from_array(self.data[np.arange(n), np.arange(n)].sum(axis=0))

    def norm(self) -> float:
        return frobenius(self)

    def __matmul__(self, other: QMatrix) -> QMatrix:
        return matmul(self, other)

    def __add__(self, other: QMatrix) -> QMatrix:
        return QMatrix(self.data + other.data)

    def __sub__(self, other: QMatrix) -> QMatrix:
        return QMatrix(self.data - other.data)

    def __neg__(self) -> QMatrix:
        return QMatrix(-self.data)

    def __mul__(self, s: float) -> QMatrix:
        return QMatrix(self.data * s)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> QMatrix:
        return QMatrix(self.data / s)

    def __eq__(self, other) -> bool:
        return isinstance(other, QMatrix) and np.array_equal(self.data, other.data)

    __hash__ = None

    def __repr__(self) -> str:
        return f"QMatrix(shape={self.shape})"


def frobenius(m: QMatrix) -> float:
    return float(np.sqrt(np.sum(m.data * m.data)))


def matmul(a: QMatrix, b: QMatrix) -> QMatrix:
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return QMatrix(np.einsum("ika,kjb,abc->ijc", a.data, b.data, _MULT, optimize=True))


def embed(m: QMatrix) -> np.ndarray:
    """Replace every entry by its 2x2 block ``[[z1, z2], [-conj z2, conj z1]]``."""
    d = m.data
    z1 = d[..., 0] + 1j * d[..., 3]
    z2 = d[..., 1] + 1j * d[..., 2]
    r, c = m.shape
    out = np.empty((2 * r, 2 * c), dtype=complex)
    out[0::2, 0::2] = z1
    out[0::2, 1::2] = z2
    out[1::2, 0::2] = -z2.conj()
    out[1::2, 1::2] = z1.conj()
    return out


def unembed(z: np.ndarray, tol: float = STRUCTURE_TOL) -> QMatrix:
    z = np.asarray(z, dtype=complex)
    if z.ndim != 2 or z.shape[0] % 2 or z.shape[1] % 2:
        raise ValueError(f"expected a (2r, 2c) complex matrix, got shape {z.shape}")
    a, b = z[0::2, 0::2], z[0::2, 1::2]
    c, d = z[1::2, 0::2], z[1::2, 1::2]
    scale = max(1.0, float(np.abs(z).max(initial=0.0)))
    err = max(float(np.abs(d - a.conj()).max(initial=0.0)), float(np.abs(c + b.conj()).max(initial=0.0)))
    if err > tol * scale:
        raise ValueError(f"complex matrix violates the quaternion block structure (error {err:.3e})")
    # average the two copies of each entry
    z1 = 0.5 * (a + d.conj())
    z2 = 0.5 * (b - c.conj())
    return QMatrix(np.stack([z1.real, z2.real, z2.imag, z1.imag], axis=-1))


def q_inverse(m: QMatrix) -> QMatrix:
    if m.rows != m.cols:
        raise ValueError(f"inverse of a non-square matrix {m.shape}")
    z = embed(m)
    cond = np.linalg.cond(z)
    if not np.isfinite(cond) or cond > SINGULAR_COND:
        raise SingularMatrixError(f"matrix is singular (embedded condition number {cond:.3e})")
    return unembed(np.linalg.inv(z), tol=1e-8)


@dataclass(frozen=True)
class SpAlgebraElement:
    """Skew-Hermitian quaternion matrix, an element of sp(N)."""

    mat: QMatrix

    def __post_init__(self):
        m = self.mat
        if m.rows != m.cols:
            raise ValueError("sp(N) elements are square")
        if not np.array_equal(m.adjoint().data, -m.data):
            raise ValueError("matrix is not skew-Hermitian")

    @classmethod
    def project(cls, m: QMatrix) -> SpAlgebraElement:
        """Skew-Hermitian part ``(m - m*)/2`` with the symmetry imposed exactly."""
        s = 0.5 * (m - m.adjoint()).data
        n = s.shape[0]
        iu = np.triu_indices(n, 1)
        s[iu[1], iu[0]] = -s[iu[0], iu[1]] * _CONJ
        s[np.arange(n), np.arange(n), 0] = 0.0
        return cls(QMatrix(s))

    @property
    def n(self) -> int:
        return self.mat.rows

    def __mul__(self, s: float) -> SpAlgebraElement:
        return SpAlgebraElement(self.mat * s)

    __rmul__ = __mul__


@dataclass(frozen=True)
class SpElement:
    """Element of the compact symplectic group Sp(N), ``g g* = 1``."""

    mat: QMatrix

    def __post_init__(self):
        m = self.mat
        if m.rows != m.cols:
            raise NotSymplecticError("Sp(N) elements are square")
        err = frobenius(m @ m.adjoint() - QMatrix.identity(m.rows))
        if err > UNITARITY_TOL:
            raise NotSymplecticError(f"g g* differs from the identity by {err:.3e}")

    @property
    def n(self) -> int:
        return self.mat.rows

    def __matmul__(self, other: SpElement) -> SpElement:
        return SpElement(self.mat @ other.mat)

    def adjoint(self) -> SpElement:
        return SpElement(self.mat.adjoint())

    @classmethod
    def identity(cls, n: int) -> SpElement:
        return cls(QMatrix.identity(n))


def q_expm(a: SpAlgebraElement) -> SpElement:
    return SpElement(unembed(scipy.linalg.expm(embed(a.mat))))


def random_quaternion_array(rng: np.random.Generator, *shape: int) -> np.ndarray:
    return rng.standard_normal((*shape, 4))


def random_skew(n: int, seed: int, scale: float = 1.0) -> SpAlgebraElement:
    """Random element of sp(n): pure-imaginary diagonal, upper triangle mirrored."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    d = np.zeros((n, n, 4))
    iu = np.triu_indices(n, 1)
    upper = scale * rng.standard_normal((len(iu[0]), 4))
    d[iu] = upper
    d[iu[1], iu[0]] = -upper * _CONJ
    d[np.arange(n), np.arange(n), 1:] = scale * rng.standard_normal((n, 3))
    return SpAlgebraElement(QMatrix(d))


def random_sp(n: int, seed: int) -> SpElement:
    return q_expm(random_skew(n, seed))


def random_tangent(rows: int, cols: int, seed: int) -> QMatrix:
    return QMatrix(np.random.default_rng(seed).standard_normal((rows, cols, 4)))


def sp_dimension(j: int) -> int:
    if j < 1:
        raise ValueError("j must be >= 1")
    return j * (2 * j + 1)

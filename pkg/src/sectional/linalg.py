"""Small dense vector and frame arithmetic.

Vectors are plain 1-D ``numpy`` arrays holding coordinates on a fixed
orthonormal basis of V. Frames store their vectors as the *rows* of a
``(k, n)`` array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DependentInput, DimensionMismatch, NonFiniteInput, NonSymmetricInput

ORTHO_TOL = 1e-10
RANK_TOL = 1e-10
SYMMETRY_TOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def as_vec(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise DimensionMismatch(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput("vector has non-finite entries")
    return v


@dataclass(frozen=True, eq=False)
class SymmetricForm:
    """A symmetric bilinear form, stored as its matrix on the standard basis."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _readonly(self.matrix))

    @classmethod
    def from_matrix(cls, matrix, tol: float = SYMMETRY_TOL) -> "SymmetricForm":
        """Validate ``matrix`` and symmetrize it exactly.

        Asymmetry is measured relative to the largest absolute entry.
        """
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            i, j = np.argwhere(~np.isfinite(a))[0]
            raise NonFiniteInput(f"entry ({i}, {j}) is not finite")
        scale = max(float(np.max(np.abs(a))), np.finfo(float).tiny)
        asym = np.abs(a - a.T)
        if asym.max() > tol * scale:
            i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
            i, j = (int(min(i, j)), int(max(i, j)))
            raise NonSymmetricInput(
                f"matrix is not symmetric: entries ({i}, {j}) = {float(a[i, j])!r} and "
                f"({j}, {i}) = {float(a[j, i])!r} differ",
                pair=(i, j),
            )
        return cls(0.5 * (a + a.T))

    @classmethod
    def diag(cls, values) -> "SymmetricForm":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, x, y) -> float:
        return float(np.asarray(x) @ self.matrix @ np.asarray(y))

    def scaled(self, c: float) -> "SymmetricForm":
        return SymmetricForm(c * self.matrix)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.matrix)))


@dataclass(frozen=True, eq=False)
class Frame:
    """An ordered orthonormal list of ``k <= n`` vectors (rows of ``vectors``)."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float)
        if v.ndim != 2 or v.shape[0] > v.shape[1] or v.shape[1] < 1:
            raise DimensionMismatch(f"frame must be (k, n) with k <= n, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NonFiniteInput("frame has non-finite entries")
        err = gram_error(v)
        if err > ORTHO_TOL:
            raise DependentInput(f"frame is not orthonormal (Gram error {err:.3e})")
        object.__setattr__(self, "vectors", _readonly(v))

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def __getitem__(self, i) -> np.ndarray:
        return self.vectors[i]


class TwoPlane(Frame):
    """An orthonormal pair spanning a 2-plane."""

    def __post_init__(self):
        super().__post_init__()
        if len(self) != 2:
            raise DimensionMismatch(f"a two-plane needs exactly 2 vectors, got {len(self)}")

    @property
    def x(self) -> np.ndarray:
        return self.vectors[0]

    @property
    def y(self) -> np.ndarray:
        return self.vectors[1]

    def tolist(self) -> list[list[float]]:
        return self.vectors.tolist()


@dataclass(frozen=True)
class Rotation2:
    theta: float
    c: float
    s: float

    @classmethod
    def from_angle(cls, theta: float) -> "Rotation2":
        return cls(theta, math.cos(theta), math.sin(theta))

    def apply(self, e1, e2) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(c e1 - s e2, s e1 + c e2)``."""
        e1 = np.asarray(e1, dtype=float)
        e2 = np.asarray(e2, dtype=float)
        return self.c * e1 - self.s * e2, self.s * e1 + self.c * e2


def gram_error(vectors) -> float:
    v = np.asarray(vectors, dtype=float)
    if v.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(v @ v.T - np.eye(v.shape[0]))))


def _orthonormalize_rows(vectors: np.ndarray, tol: float) -> np.ndarray:
    # modified Gram-Schmidt with one re-orthogonalization pass
    out = []
    for v in vectors:
        w = v.copy()
        for _ in range(2):
            for q in out:
                w -= (q @ w) * q
        norm = np.linalg.norm(w)
        if norm <= tol:
            raise DependentInput("input vectors are linearly dependent at the rank tolerance")
        out.append(w / norm)
    return np.array(out).reshape(len(out), vectors.shape[1])


def gram_schmidt(vectors) -> Frame:
    """Orthonormalize ``vectors`` in order.

    The first output vector is parallel to the first input. Raises
    ``DependentInput`` when a residual falls below ``RANK_TOL`` times the
    largest input norm.
    """
    v = np.atleast_2d(np.asarray(vectors, dtype=float))
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput("vectors have non-finite entries")
    if v.shape[0] > v.shape[1]:
        raise DependentInput(f"{v.shape[0]} vectors cannot be independent in dimension {v.shape[1]}")
    scale = float(np.max(np.linalg.norm(v, axis=1))) if v.size else 0.0
    if scale == 0.0:
        raise DependentInput("zero input vectors")
    return Frame(_orthonormalize_rows(v, RANK_TOL * scale))


def complete_frame(partial) -> Frame:
    """Extend an orthonormal frame to a basis of V.

    Standard basis vectors are tried in index order; those whose residual
    after orthogonalization has norm below ``RANK_TOL`` are skipped.
    """
    if not isinstance(partial, Frame):
        partial = Frame(np.atleast_2d(np.asarray(partial, dtype=float)))
    k, n = partial.vectors.shape
    if k == n:
        return partial
    rows = [r.copy() for r in partial.vectors]
    for i in range(n):
        if len(rows) == n:
            break
        w = np.zeros(n)
        w[i] = 1.0
        for _ in range(2):
            for q in rows:
                w -= (q @ w) * q
        norm = np.linalg.norm(w)
        if norm < RANK_TOL:
            continue
        rows.append(w / norm)
    return Frame(np.array(rows))


def complement_basis(vectors: np.ndarray) -> np.ndarray:
    """Rows spanning the orthogonal complement of the given orthonormal rows."""
    vectors = np.atleast_2d(vectors)
    k = vectors.shape[0]
    return complete_frame(Frame(vectors)).vectors[k:]


def diagonalizing_rotation(phi11: float, phi12: float, phi22: float) -> Rotation2:
    """Angle that diagonalizes a symmetric 2x2 block.

    With ``f1 = c e1 - s e2`` and ``f2 = s e1 + c e2`` the rotated
    off-diagonal entry is ``sin(2t)(phi11 - phi22)/2 + cos(2t) phi12``,
    which vanishes for ``tan(2t) = 2 phi12 / (phi22 - phi11)``. The root is
    reduced into (-pi/4, pi/4].
    """
    for v in (phi11, phi12, phi22):
        if not math.isfinite(v):
            raise NonFiniteInput("rotation inputs must be finite")
    if phi12 == 0.0:
        return Rotation2(0.0, 1.0, 0.0)
    theta = 0.5 * math.atan2(2.0 * phi12, phi22 - phi11)
    if theta > math.pi / 4:
        theta -= math.pi / 2
    elif theta <= -math.pi / 4:
        theta += math.pi / 2
    return Rotation2.from_angle(theta)


def rotated_block(phi11: float, phi12: float, phi22: float, rot: Rotation2) -> tuple[float, float, float]:
    """Entries ``(phi(f1,f1), phi(f1,f2), phi(f2,f2))`` after rotating by ``rot``."""
    c, s = rot.c, rot.s
    a11 = c * c * phi11 - 2 * c * s * phi12 + s * s * phi22
    a22 = s * s * phi11 + 2 * c * s * phi12 + c * c * phi22
    a12 = c * s * (phi11 - phi22) + (c * c - s * s) * phi12
    return a11, a12, a22


def restrict_form(phi: SymmetricForm, frame) -> SymmetricForm:
    """The k x k matrix ``phi(f_i, f_j)`` over the frame vectors."""
    v = frame.vectors if isinstance(frame, Frame) else np.atleast_2d(np.asarray(frame, dtype=float))
    if v.shape[1] != phi.dim:
        raise DimensionMismatch(f"frame dimension {v.shape[1]} does not match form dimension {phi.dim}")
    return SymmetricForm(symmetrize(v @ phi.matrix @ v.T))


def symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)

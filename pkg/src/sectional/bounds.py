"""Closed-form sectional curvature bounds.

For a canonical tensor ``R_phi`` the set of sectional curvatures is exactly
the interval between the smallest and largest product ``l_i l_j`` (i != j)
of eigenvalues of ``phi``. For a signed sum of canonical tensors, adding the
per-term intervals gives an outer bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import TensorSum
from .errors import DimensionMismatch
from .linalg import Frame, SymmetricForm, TwoPlane
from .spectral import spectral_decomposition


@dataclass(frozen=True, eq=False)
class CurvatureBounds:
    m: float
    M: float
    eigenvalues: np.ndarray
    min_pair: tuple[int, int]
    max_pair: tuple[int, int]
    eigenvectors: Frame | None = None

    def plane(self, pair: tuple[int, int]) -> TwoPlane:
        if self.eigenvectors is None:
            raise ValueError("bounds were built without eigenvectors")
        i, j = pair
        return TwoPlane(self.eigenvectors.vectors[[i, j]])

    @property
    def min_plane(self) -> TwoPlane:
        return self.plane(self.min_pair)

    @property
    def max_plane(self) -> TwoPlane:
        return self.plane(self.max_pair)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "M": self.M,
            "eigenvalues": self.eigenvalues.tolist(),
            "min_pair": list(self.min_pair),
            "max_pair": list(self.max_pair),
        }


def pairwise_extremes(values) -> tuple[float, float, tuple[int, int], tuple[int, int]]:
    """Min and max of ``l_i l_j`` over i != j for ascending ``values``.

    Only three products can be extremal: the two smallest, the two largest,
    and smallest times largest.
    """
    lam = np.asarray(values, dtype=float)
    n = lam.size
    if n < 2:
        raise DimensionMismatch("need at least two eigenvalues")
    pairs = [(0, 1), (n - 2, n - 1), (0, n - 1)]
    prods = [lam[i] * lam[j] for i, j in pairs]
    imin = min(range(3), key=lambda k: prods[k])
    imax = max(range(3), key=lambda k: prods[k])
    m, big = float(prods[imin]), float(prods[imax])
    if n <= 64:
        full = np.outer(lam, lam)[~np.eye(n, dtype=bool)]
        slack = 1e-12 * max(1.0, float(np.max(np.abs(full))))
        assert abs(full.min() - m) <= slack and abs(full.max() - big) <= slack
    return m, big, pairs[imin], pairs[imax]


def canonical_bounds(phi, mode: str = "sweep", seed: int = 0) -> CurvatureBounds:
    """Exact range ``[m, M]`` of sectional curvature for ``R_phi``."""
    if not isinstance(phi, SymmetricForm):
        phi = SymmetricForm.from_matrix(phi)
    if phi.dim < 2:
        raise DimensionMismatch("the Grassmannian of 2-planes is empty for dim < 2")
    eig = spectral_decomposition(phi, mode=mode, seed=seed).sorted()
    m, big, pmin, pmax = pairwise_extremes(eig.eigenvalues)
    return CurvatureBounds(m, big, eig.eigenvalues, pmin, pmax, eig.frame)


def sum_bounds(t: TensorSum) -> tuple[float, float]:
    """Outer bound ``(m, M)`` on the sectional curvatures of a signed sum.

    A negated term contributes ``[-M_i, -m_i]``.
    """
    if not t.terms:
        raise ValueError("empty tensor sum")
    lo = hi = 0.0
    for sign, phi in t.terms:
        b = canonical_bounds(phi)
        if sign > 0:
            lo += b.m
            hi += b.M
        else:
            lo -= b.M
            hi -= b.m
    return lo, hi


def remark_2_4_fixture() -> tuple[TensorSum, float]:
    """Two rank-two forms on R^3 whose outer bound 2 is not attained.

    ``phi_1 = diag(1, 1, 0)`` and ``phi_2 = diag(1, 0, 1)``; each canonical
    tensor has maximal curvature 1, yet every curvature of the sum stays
    below 2.
    """
    phi1 = SymmetricForm.diag([1.0, 1.0, 0.0])
    phi2 = SymmetricForm.diag([1.0, 0.0, 1.0])
    return TensorSum(3, ((1, phi1), (1, phi2))), 2.0

"""Hypersurfaces with a prescribed range of sectional curvatures at a point.

Given ``[a, b]`` we pick eigenvalues whose pairwise products run from ``a``
to ``b`` and take the graph of ``h(x) = sum(l_i x_i^2) / 2`` in R^{n+1}. At
the origin its second fundamental form is ``diag(l)`` and the induced metric
is the identity. The curvature tensor there is recovered numerically from
the metric through finite-difference Christoffel symbols, then compared to
``R_phi`` with ``phi = diag(l)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import canonical_bounds
from .curvature import CanonicalTensor, DenseTensor, dense_symmetry_violation
from .errors import DimensionMismatch, StepTooLarge, UnrealizableInterval
from .linalg import SymmetricForm
from .oracle import estimate_range

DEFAULT_STEP = 1e-3


def eigenvalues_for_interval(a: float, b: float, n: int = 3) -> list[float]:
    """Eigenvalues whose min and max pairwise products are ``a`` and ``b``.

    For ``n >= 3`` some pairwise product is always ``>= 0`` (two of any three
    reals share a sign or one vanishes), so ``b < 0`` is rejected.
    """
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("interval endpoints must be finite")
    if a > b:
        raise ValueError(f"empty interval [{a}, {b}]")
    if n < 3:
        raise DimensionMismatch("realization needs n >= 3")
    if b < 0:
        raise UnrealizableInterval(f"no {n} reals have all pairwise products below 0 (b = {b})")
    if b > 0:
        r = math.sqrt(b)
        pad = r if a > 0 else 0.0
        return [r, r, a / r] + [pad] * (n - 3)
    t = max(1.0, math.sqrt(abs(a)))
    return [t, a / t] + [0.0] * (n - 2)


@dataclass(frozen=True, eq=False)
class Hypersurface:
    """Graph of ``h(x) = sum(shape_i x_i^2) / 2``; the point P is the origin."""

    shape: np.ndarray

    def __post_init__(self):
        lam = np.array(self.shape, dtype=float)
        if lam.ndim != 1 or lam.size < 2:
            raise DimensionMismatch("need at least two principal curvatures")
        lam.setflags(write=False)
        object.__setattr__(self, "shape", lam)

    @property
    def dim(self) -> int:
        return self.shape.size

    @property
    def point(self) -> np.ndarray:
        return np.zeros(self.dim)

    def height(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return 0.5 * float(np.sum(self.shape * x * x))

    def gradient(self, x) -> np.ndarray:
        return self.shape * np.asarray(x, dtype=float)

    def embedding(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.append(x, self.height(x))

    def second_fundamental_form(self) -> SymmetricForm:
        return SymmetricForm.diag(self.shape)


def build_hypersurface(lambdas) -> Hypersurface:
    return Hypersurface(np.asarray(lambdas, dtype=float))


def metric_at(s: Hypersurface, x) -> np.ndarray:
    """Induced metric ``delta_ij + d_i h d_j h`` of the graph."""
    x = np.asarray(x, dtype=float)
    if x.shape != (s.dim,) or not np.all(np.isfinite(x)):
        raise ValueError("x must be a finite point of the chart")
    grad = s.gradient(x)
    return np.eye(s.dim) + np.outer(grad, grad)


def christoffel(s: Hypersurface, x, step: float) -> np.ndarray:
    """``gamma[k, i, j]`` from central differences of the metric."""
    n = s.dim
    x = np.asarray(x, dtype=float)
    dg = np.empty((n, n, n))  # dg[m, i, j] = d_m g_ij
    for m in range(n):
        e = np.zeros(n)
        e[m] = step
        dg[m] = (metric_at(s, x + e) - metric_at(s, x - e)) / (2 * step)
    ginv = np.linalg.inv(metric_at(s, x))
    # lowered[l, i, j] = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    lowered = 0.5 * (dg.transpose(2, 0, 1) + dg.transpose(2, 1, 0) - dg)
    return np.einsum("kl,lij->kij", ginv, lowered)


@dataclass(frozen=True, eq=False)
class CurvatureAtPoint:
    components: np.ndarray
    step: float

    def tensor(self) -> DenseTensor:
        return DenseTensor(self.components)

    def symmetry_violation(self) -> float:
        return dense_symmetry_violation(self.components)


def curvature_at_point(s: Hypersurface, step: float = DEFAULT_STEP) -> CurvatureAtPoint:
    """Riemann tensor ``R(e_i, e_j, e_k, e_l)`` at the origin.

    Uses the convention ``R(x, y, y, x) > 0`` on spheres, so the result is
    directly comparable with ``R_phi``.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    n = s.dim
    if n > 6:
        raise DimensionMismatch("dense curvature storage is limited to n <= 6")
    p = s.point
    gam = christoffel(s, p, step)
    dgam = np.empty((n, n, n, n))  # dgam[m, k, i, j] = d_m gamma^k_ij
    for m in range(n):
        e = np.zeros(n)
        e[m] = step
        dgam[m] = (christoffel(s, p + e, step) - christoffel(s, p - e, step)) / (2 * step)
    # R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
    up = (
        dgam.transpose(1, 0, 2, 3)
        - dgam.transpose(1, 2, 0, 3)
        + np.einsum("lim,mjk->lijk", gam, gam)
        - np.einsum("ljm,mik->lijk", gam, gam)
    )
    comps = np.einsum("lw,lijk->ijkw", metric_at(s, p), up)
    out = CurvatureAtPoint(comps, step)
    violation = out.symmetry_violation()
    if violation > 1e-3:
        raise StepTooLarge(f"curvature identities violated by {violation:.3e} at step {step}")
    return out


def gauss_tensor(s: Hypersurface) -> np.ndarray:
    """Curvature at P from the Gauss equation, i.e. dense ``R_phi`` for ``phi = diag(shape)``."""
    return CanonicalTensor(s.second_fundamental_form()).to_dense()


def max_component_error(s: Hypersurface, step: float = DEFAULT_STEP) -> float:
    return float(np.max(np.abs(curvature_at_point(s, step).components - gauss_tensor(s))))


def realize_interval(
    a: float,
    b: float,
    n: int = 3,
    step: float = DEFAULT_STEP,
    samples: int = 4096,
    seed: int = 0,
    workers: int = 1,
) -> dict:
    """End-to-end realization report for the target interval ``[a, b]``."""
    lam = eigenvalues_for_interval(a, b, n)
    surf = build_hypersurface(lam)
    curv = curvature_at_point(surf, step)
    est = estimate_range(curv.tensor(), samples=samples, seed=seed, workers=workers)
    err = float(np.max(np.abs(curv.components - gauss_tensor(surf))))
    err_half = max_component_error(surf, step / 2)
    formula = canonical_bounds(SymmetricForm.diag(lam))
    return {
        "target": [a, b],
        "eigenvalues": lam,
        "measured_range": [est.min_value, est.max_value],
        "max_symmetry_violation": curv.symmetry_violation(),
        "max_component_error": err,
        "step": step,
        "formula_range": [formula.m, formula.M],
        "half_step_component_error": err_half,
        "convergence_ratio": err / err_half if err_half > 0 else math.inf,
    }

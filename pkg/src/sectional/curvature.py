"""Algebraic curvature tensors built from symmetric forms.

Tensors are kept as generators: a canonical tensor stores its form, a sum
stores signed forms. Entries are evaluated on demand; ``to_dense`` exists
for cross-checks at small dimension only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePlane, DimensionMismatch, ZeroCoefficient
from .linalg import SymmetricForm, as_vec, restrict_form

DEGENERACY_TOL = 1e-12


def _form(phi) -> SymmetricForm:
    return phi if isinstance(phi, SymmetricForm) else SymmetricForm.from_matrix(phi)


def _check_args(dim: int, *vecs):
    out = [as_vec(v) for v in vecs]
    for v in out:
        if v.shape[0] != dim:
            raise DimensionMismatch(f"vector of length {v.shape[0]} for a tensor on dimension {dim}")
    return out


class _TensorBase:
    dim: int

    def sectional(self, x, y) -> float:
        return sectional_curvature(self, x, y)

    def to_dense(self) -> np.ndarray:
        n = self.dim
        if n > 6:
            raise DimensionMismatch("dense export is limited to n <= 6")
        eye = np.eye(n)
        out = np.empty((n, n, n, n))
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for l in range(n):
                        out[i, j, k, l] = self(eye[i], eye[j], eye[k], eye[l])
        return out


@dataclass(frozen=True, eq=False)
class CanonicalTensor(_TensorBase):
    """``R(x, y, z, w) = phi(x, w) phi(y, z) - phi(x, z) phi(y, w)``."""

    form: SymmetricForm

    def __post_init__(self):
        object.__setattr__(self, "form", _form(self.form))

    @property
    def dim(self) -> int:
        return self.form.dim

    @property
    def terms(self) -> tuple[tuple[int, SymmetricForm], ...]:
        return ((1, self.form),)

    def __call__(self, x, y, z, w) -> float:
        return eval_canonical(self, x, y, z, w)

    def sectional_batch(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return _batch_from_terms(self.terms, xs, ys)


@dataclass(frozen=True, eq=False)
class TensorSum(_TensorBase):
    """A signed sum of canonical tensors, ``sum_i sign_i R_{phi_i}``."""

    dim: int
    terms: tuple = field(default=())

    def __post_init__(self):
        terms = []
        for sign, phi in self.terms:
            if sign not in (1, -1):
                raise ValueError(f"term signs must be +1 or -1, got {sign!r}")
            phi = _form(phi)
            if phi.dim != self.dim:
                raise DimensionMismatch(f"term of dimension {phi.dim} in a sum on dimension {self.dim}")
            terms.append((int(sign), phi))
        object.__setattr__(self, "terms", tuple(terms))

    def __call__(self, x, y, z, w) -> float:
        return eval_sum(self, x, y, z, w)

    def sectional_batch(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return _batch_from_terms(self.terms, xs, ys)


@dataclass(frozen=True, eq=False)
class DenseTensor(_TensorBase):
    """A rank-4 tensor given by its components on the standard basis."""

    components: np.ndarray

    def __post_init__(self):
        c = np.array(self.components, dtype=float)
        if c.ndim != 4 or len(set(c.shape)) != 1:
            raise DimensionMismatch(f"expected an (n, n, n, n) array, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "components", c)

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    def __call__(self, x, y, z, w) -> float:
        x, y, z, w = _check_args(self.dim, x, y, z, w)
        return float(np.einsum("ijkl,i,j,k,l->", self.components, x, y, z, w))

    def sectional_batch(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return np.einsum("ijkl,ai,aj,ak,al->a", self.components, xs, ys, ys, xs)

    def to_dense(self) -> np.ndarray:
        return np.array(self.components)


def restrict_tensor(t, basis):
    """The tensor restricted to the span of the orthonormal rows of ``basis``.

    Coordinates of the result are taken on those rows. Canonical tensors and
    sums stay in generator form, since ``R_phi`` restricts to ``R_{phi|W}``.
    """
    v = np.atleast_2d(np.asarray(basis, dtype=float))
    if v.shape[1] != t.dim:
        raise DimensionMismatch(f"basis of dimension {v.shape[1]} for a tensor on dimension {t.dim}")
    if isinstance(t, DenseTensor):
        return DenseTensor(np.einsum("ijkl,ai,bj,ck,dl->abcd", t.components, v, v, v, v))
    terms = tuple((sign, SymmetricForm(restrict_form(phi, v).matrix)) for sign, phi in t.terms)
    if isinstance(t, CanonicalTensor):
        return CanonicalTensor(terms[0][1])
    return TensorSum(v.shape[0], terms)


def _batch_from_terms(terms, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    # R(x, y, y, x) for orthonormal rows; no normalization needed
    out = np.zeros(xs.shape[0])
    for sign, phi in terms:
        ax = xs @ phi.matrix
        xx = np.einsum("ai,ai->a", ax, xs)
        xy = np.einsum("ai,ai->a", ax, ys)
        yy = np.einsum("ai,ai->a", ys @ phi.matrix, ys)
        out += sign * (xx * yy - xy * xy)
    return out


def eval_canonical(t: CanonicalTensor, x, y, z, w) -> float:
    x, y, z, w = _check_args(t.dim, x, y, z, w)
    a = t.form.matrix
    return float((x @ a @ w) * (y @ a @ z) - (x @ a @ z) * (y @ a @ w))


def eval_sum(t: TensorSum, x, y, z, w) -> float:
    x, y, z, w = _check_args(t.dim, x, y, z, w)
    total = 0.0
    for sign, phi in t.terms:
        a = phi.matrix
        total += sign * ((x @ a @ w) * (y @ a @ z) - (x @ a @ z) * (y @ a @ w))
    return float(total)


def normalize_sum(coeffs) -> TensorSum:
    """Absorb real coefficients into the forms: ``a R_phi = sign(a) R_{sqrt|a| phi}``."""
    coeffs = list(coeffs)
    if not coeffs:
        raise ValueError("a tensor sum needs at least one term")
    terms = []
    dim = None
    for alpha, phi in coeffs:
        alpha = float(alpha)
        if alpha == 0.0:
            raise ZeroCoefficient("zero coefficient; drop the term before normalizing")
        phi = _form(phi)
        dim = phi.dim if dim is None else dim
        terms.append((1 if alpha > 0 else -1, phi.scaled(math.sqrt(abs(alpha)))))
    return TensorSum(dim, tuple(terms))


def sectional_curvature(t, x, y) -> float:
    """``R(x, y, y, x)`` divided by the Gram determinant of ``x, y``."""
    x, y = _check_args(t.dim, x, y)
    xx, yy, xy = float(x @ x), float(y @ y), float(x @ y)
    denom = xx * yy - xy * xy
    if denom <= DEGENERACY_TOL * xx * yy or denom <= 0.0:
        raise DegeneratePlane("x and y do not span a 2-plane")
    return t(x, y, y, x) / denom


@dataclass(frozen=True)
class SymmetryReport:
    """Largest violations of the curvature identities over random quadruples."""

    antisymmetry: float
    pair_symmetry: float
    bianchi: float
    scale: float
    trials: int
    seed: int

    @property
    def max_violation(self) -> float:
        return max(self.antisymmetry, self.pair_symmetry, self.bianchi)

    def passes(self, tol: float = 1e-10) -> bool:
        return self.max_violation <= tol * max(1.0, self.scale)

    def to_dict(self) -> dict:
        return {
            "antisymmetry": self.antisymmetry,
            "pair_symmetry": self.pair_symmetry,
            "bianchi": self.bianchi,
            "scale": self.scale,
            "trials": self.trials,
            "seed": self.seed,
        }


def check_symmetries(t, trials: int = 100, seed: int = 0, dim: int | None = None) -> SymmetryReport:
    """Probe antisymmetry, pair exchange and the first Bianchi identity.

    Each trial draws its quadruple from a generator keyed on ``(seed, trial)``
    so the report does not depend on evaluation order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = dim if dim is not None else t.dim
    anti = pair = bianchi = scale = 0.0
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        x, y, z, w = rng.standard_normal((4, n))
        r = t(x, y, z, w)
        scale = max(scale, abs(r))
        anti = max(anti, abs(r + t(y, x, z, w)))
        pair = max(pair, abs(r - t(z, w, x, y)))
        bianchi = max(bianchi, abs(r + t(x, w, y, z) + t(x, z, w, y)))
    return SymmetryReport(anti, pair, bianchi, scale, trials, seed)


def dense_symmetry_violation(r: np.ndarray) -> float:
    """Largest violation of the curvature identities over all components."""
    anti = np.abs(r + r.transpose(1, 0, 2, 3)).max()
    pair = np.abs(r - r.transpose(2, 3, 0, 1)).max()
    # R(x,y,z,w) + R(x,w,y,z) + R(x,z,w,y)
    bianchi = np.abs(r + r.transpose(0, 2, 3, 1) + r.transpose(0, 3, 1, 2)).max()
    return float(max(anti, pair, bianchi))

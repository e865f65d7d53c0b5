"""Symmetric eigensolvers built on the 2x2 diagonalizing rotation.

``spectral_paper_mode`` follows the constructive argument: find a plane of
extremal sectional curvature for ``R_phi``, rotate its basis so ``phi`` is
diagonal on it, and the two basis vectors are eigenvectors. If ``R_phi``
vanishes, ``phi`` has rank at most one and its largest column is an
eigenvector. Either way the found vectors are split off and the search
continues on their orthogonal complement, where ``R_phi`` restricts to
``R_{phi|W}``.

``spectral_sweep_mode`` is the classical Jacobi method using the same
rotation on the largest off-diagonal entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import CanonicalTensor
from .errors import ConvergenceFailure
from .linalg import (
    Frame,
    SymmetricForm,
    complement_basis,
    complete_frame,
    diagonalizing_rotation,
    gram_schmidt,
    symmetrize,
)
from .oracle import _refine, estimate_range

DEFAULT_TOL = 1e-10
MINOR_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralResult:
    frame: Frame
    eigenvalues: np.ndarray
    mode: str
    iterations: int
    max_offdiagonal: float
    fallbacks: int = 0

    def sorted(self) -> "SpectralResult":
        order = np.argsort(self.eigenvalues, kind="stable")
        return SpectralResult(
            Frame(self.frame.vectors[order]),
            self.eigenvalues[order],
            self.mode,
            self.iterations,
            self.max_offdiagonal,
            self.fallbacks,
        )

    def reconstruct(self) -> np.ndarray:
        f = self.frame.vectors
        return f.T @ (self.eigenvalues[:, None] * f)

    def to_dict(self) -> dict:
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "frame": self.frame.vectors.tolist(),
            "mode": self.mode,
            "iterations": self.iterations,
            "max_offdiagonal": self.max_offdiagonal,
        }


def _as_form(phi) -> SymmetricForm:
    if isinstance(phi, SymmetricForm):
        return phi
    return SymmetricForm.from_matrix(phi)


def _offdiagonal(a: np.ndarray, frame: np.ndarray) -> float:
    b = frame @ a @ frame.T
    if b.shape[0] < 2:
        return 0.0
    return float(np.max(np.abs(b - np.diag(np.diag(b)))))


def is_curvature_zero(phi, tol: float = MINOR_TOL) -> bool:
    """True when every 2x2 minor of ``phi`` is negligible.

    ``R_phi(e_i, e_j, e_l, e_k)`` is exactly the minor on rows ``i, j`` and
    columns ``k, l``, so this tests ``R_phi == 0``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = _as_form(phi).matrix
    n = a.shape[0]
    bound = tol * max(1.0, float(np.max(np.abs(a))) ** 2)
    for i in range(n):
        for j in range(i + 1, n):
            minors = np.outer(a[i], a[j]) - np.outer(a[j], a[i])
            if np.max(np.abs(minors)) > bound:
                return False
    return True


def rank_one_spectrum(phi) -> SpectralResult:
    """Spectrum of a form of rank at most one."""
    phi = _as_form(phi)
    if not is_curvature_zero(phi):
        raise ValueError("form has a nonzero 2x2 minor; it is not of rank <= 1")
    a = phi.matrix
    n = phi.dim
    if phi.max_abs() <= 1e-12:
        return SpectralResult(Frame(np.eye(n)), np.zeros(n), "paper", 0, _offdiagonal(a, np.eye(n)))
    col = a[:, int(np.argmax(np.linalg.norm(a, axis=0)))]
    frame = complete_frame(gram_schmidt([col])).vectors
    values = np.zeros(n)
    values[0] = frame[0] @ a @ frame[0]
    return SpectralResult(Frame(frame), values, "paper", 1, _offdiagonal(a, frame))


def eigen_residual(phi, v) -> float:
    """``|A v - (v.A v) v|``; zero exactly when unit ``v`` is an eigenvector."""
    a = phi.matrix if isinstance(phi, SymmetricForm) else np.asarray(phi, dtype=float)
    v = np.asarray(v, dtype=float)
    av = a @ v
    return float(np.linalg.norm(av - (v @ av) * v))


def spectral_sweep_mode(
    phi, tol: float = DEFAULT_TOL, history: list | None = None, max_rotations: int | None = None
) -> SpectralResult:
    """Classical Jacobi: repeatedly zero the largest off-diagonal entry.

    If ``history`` is a list, the off-diagonal sum of squares is appended
    before the first rotation and after each one.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    phi = _as_form(phi)
    a = phi.matrix
    n = phi.dim
    b = np.array(a)
    frame = np.eye(n)
    scale = phi.max_abs()
    limit = 50 * n * n if max_rotations is None else max_rotations
    rotations = 0
    mask = ~np.eye(n, dtype=bool)
    if history is not None:
        history.append(float(np.sum(b[mask] ** 2)))
    while n > 1:
        off = np.abs(np.where(mask, b, 0.0))
        k = int(np.argmax(off))
        i, j = divmod(k, n)
        if off[i, j] <= tol * scale:
            break
        if rotations >= limit:
            raise ConvergenceFailure(f"no convergence after {limit} rotations")
        i, j = min(i, j), max(i, j)
        rot = diagonalizing_rotation(b[i, i], b[i, j], b[j, j])
        g = np.array([[rot.c, -rot.s], [rot.s, rot.c]])
        idx = [i, j]
        b[idx] = g @ b[idx]
        b[:, idx] = b[:, idx] @ g.T
        b[i, j] = b[j, i] = 0.0
        frame[idx] = g @ frame[idx]
        rotations += 1
        if history is not None:
            history.append(float(np.sum(b[mask] ** 2)))
    values = np.diag(b).copy()
    frame = gram_schmidt(frame).vectors if n > 1 else frame
    return SpectralResult(Frame(frame), values, "sweep", rotations, _offdiagonal(a, frame))


def _sub_seed(seed: int, step: int) -> int:
    return int(np.random.SeedSequence([seed, step]).generate_state(1)[0])


def _plane_eigenvectors(b: np.ndarray, x: np.ndarray, y: np.ndarray):
    rot = diagonalizing_rotation(x @ b @ x, x @ b @ y, y @ b @ y)
    f1, f2 = rot.apply(x, y)
    return f1, f2, max(eigen_residual(b, f1), eigen_residual(b, f2))


def _extremal_eigenpair(b: np.ndarray, seed: int, samples: int, refinements: int, target: float, accept: float):
    """Eigenvectors of ``b`` from a plane of maximal ``|kappa|`` for ``R_b``.

    Any critical plane with nonzero curvature will do, so the oracle's global
    escape is switched off.

    Returns the accepted vectors (coordinates on the current subspace) and
    the largest residual seen.
    """
    t = CanonicalTensor(SymmetricForm(b))
    est = estimate_range(t, samples=samples, refinements=refinements, seed=seed, candidates=1, escape=False)
    maximize = abs(est.max_value) >= abs(est.min_value)
    plane = est.argmax_plane if maximize else est.argmin_plane
    x, y = plane.x, plane.y
    f1, f2, res = _plane_eigenvectors(b, x, y)
    for _ in range(3):
        if res <= target:
            break
        # additional refinement run, stopped on the eigenvector residual
        x, y, _, _ = _refine(t, x, y, refinements, maximize, residual_tol=target)
        f1, f2, res = _plane_eigenvectors(b, x, y)
    accepted = [f for f in (f1, f2) if eigen_residual(b, f) <= accept]
    return accepted, res


def spectral_paper_mode(
    phi,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    samples: int = 64,
    refinements: int = 100,
) -> SpectralResult:
    """Eigen-decomposition by extremal planes and deflation.

    Each step works on the current subspace ``W`` (rows of ``basis``) with the
    restricted form ``phi|W``. Vectors are accepted when their eigenvector
    residual is at most ``10 tol |A|_max``; if a step yields none, the
    remaining subspace is finished with ``spectral_sweep_mode``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    phi = _as_form(phi)
    a = phi.matrix
    n = phi.dim
    scale = max(phi.max_abs(), np.finfo(float).tiny)
    accept = 10 * tol * scale
    basis = np.eye(n)
    found: list[np.ndarray] = []
    values: list[float] = []
    steps = 0
    fallbacks = 0
    while basis.shape[0] > 0:
        m = basis.shape[0]
        b = symmetrize(basis @ a @ basis.T)
        if m == 1:
            vecs = [np.ones(1)]
        elif is_curvature_zero(b):
            r = rank_one_spectrum(SymmetricForm(b))
            vecs = [r.frame.vectors[0]]
            if eigen_residual(b, vecs[0]) > accept:
                vecs = []
        else:
            vecs, _ = _extremal_eigenpair(b, _sub_seed(seed, steps), samples, refinements, tol * scale, accept)
        if not vecs:
            fallbacks += 1
            sub = spectral_sweep_mode(SymmetricForm(b), tol)
            vecs = list(sub.frame.vectors)
        steps += 1
        local = gram_schmidt(vecs).vectors
        for v in local:
            f = v @ basis
            found.append(f)
            values.append(float(f @ a @ f))
        if local.shape[0] == m:
            break
        basis = complement_basis(local) @ basis
    frame = gram_schmidt(found).vectors
    values = np.array([f @ a @ f for f in frame])
    return SpectralResult(Frame(frame), values, "paper", steps, _offdiagonal(a, frame), fallbacks)


def spectral_decomposition(phi, mode: str = "sweep", tol: float = DEFAULT_TOL, seed: int = 0) -> SpectralResult:
    if mode == "sweep":
        return spectral_sweep_mode(phi, tol)
    if mode == "paper":
        return spectral_paper_mode(phi, tol, seed)
    raise ValueError(f"unknown mode {mode!r}; expected 'paper' or 'sweep'")

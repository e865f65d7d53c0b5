"""Brute-force search for the range of sectional curvature over 2-planes.

Random planes come from orthonormalized pairs of Gaussian vectors, which is
the rotation-invariant distribution on the Grassmannian. The best and worst
samples are then polished by exact coordinate steps: rotating one leg of
the plane toward a complementary direction ``f_j`` gives a curvature of the
form ``a + b cos(2t) + c sin(2t)``, whose optimum is closed form.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .curvature import restrict_tensor, sectional_curvature
from .errors import ConvergenceFailure, ValueOutOfRange
from .linalg import TwoPlane, complement_basis, complete_frame, diagonalizing_rotation, gram_schmidt

CHUNK = 1024
HISTOGRAM_BINS = 64
IMPROVEMENT_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class CurvatureRangeEstimate:
    min_value: float
    max_value: float
    argmin_plane: TwoPlane
    argmax_plane: TwoPlane
    samples: int
    histogram: list

    def to_dict(self) -> dict:
        return {
            "min": self.min_value,
            "max": self.max_value,
            "argmin_plane": self.argmin_plane.tolist(),
            "argmax_plane": self.argmax_plane.tolist(),
            "samples": self.samples,
            "histogram": [[edge, count] for edge, count in self.histogram],
        }


def _map(fn, items, workers: int):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _sample_chunk(dim: int, count: int, seed: int, chunk: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng([seed, chunk])
    g = rng.standard_normal((count, 2, dim))
    x = g[:, 0, :]
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    y = g[:, 1, :]
    for _ in range(2):
        y -= np.einsum("ai,ai->a", x, y)[:, None] * x
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    return x, y


def _chunks(count: int):
    return [(c, min(CHUNK, count - c * CHUNK)) for c in range((count + CHUNK - 1) // CHUNK)]


def sample_plane_arrays(dim: int, count: int, seed: int, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Random orthonormal pairs as two ``(count, dim)`` arrays.

    Chunk ``c`` draws from a generator keyed on ``(seed, c)``, so the result is
    the same for any worker count.
    """
    if dim < 2:
        raise ValueError("planes need dim >= 2")
    if count < 1:
        raise ValueError("count must be >= 1")
    parts = _map(lambda ck: _sample_chunk(dim, ck[1], seed, ck[0]), _chunks(count), workers)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def sample_planes(dim: int, count: int, seed: int = 0):
    """Yield ``count`` random planes, deterministic in ``seed``."""
    xs, ys = sample_plane_arrays(dim, count, seed)
    for x, y in zip(xs, ys):
        yield TwoPlane(np.array([x, y]))


def sectional_values(t, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Curvatures of many orthonormal pairs at once."""
    batch = getattr(t, "sectional_batch", None)
    if batch is not None:
        return np.asarray(batch(xs, ys), dtype=float)
    return np.array([t(x, y, y, x) for x, y in zip(xs, ys)])


def _rotate_rows(m: np.ndarray, a: int, j: int, c: float, s: float):
    # row a <- c row a + s row j, row j <- -s row a + c row j (in place; m may be a view)
    ra = m[a].copy()
    rj = m[j]
    m[a] = c * ra + s * rj
    m[j] = c * rj - s * ra


class _FormKernel:
    """Frame state for sums of canonical tensors.

    Keeps ``B_k = F A_k F^T`` for every term so that the three tensor values a
    coordinate step needs are products of matrix entries.
    """

    def __init__(self, terms, frame: np.ndarray):
        self.frame = frame.copy()
        self.signs = [s for s, _ in terms]
        self.blocks = [frame @ phi.matrix @ frame.T for _, phi in terms]

    def values(self, a: int, b: int, j: int) -> tuple[float, float, float]:
        va = vj = vc = 0.0
        for s, m in zip(self.signs, self.blocks):
            bb = m[b, b]
            ab = m[a, b]
            bj = m[b, j]
            va += s * (m[a, a] * bb - ab * ab)
            vj += s * (m[j, j] * bb - bj * bj)
            vc += s * (m[a, j] * bb - ab * bj)
        return va, vj, vc

    def rotate(self, a: int, j: int, c: float, s: float):
        _rotate_rows(self.frame, a, j, c, s)
        for m in self.blocks:
            _rotate_rows(m, a, j, c, s)
            _rotate_rows(m.T, a, j, c, s)

    def plane_residual(self) -> float:
        """Largest coupling of the plane to its complement, for a single form."""
        m = self.blocks[0]
        return float(max(np.linalg.norm(m[0, 2:]), np.linalg.norm(m[1, 2:])))

    def align(self):
        """Diagonalize a single form on the current plane; the plane is unchanged."""
        if len(self.blocks) != 1:
            return
        m = self.blocks[0]
        if m[0, 1] == 0.0:
            return
        rot = diagonalizing_rotation(m[0, 0], m[0, 1], m[1, 1])
        # f0 <- c f0 - s f1, f1 <- s f0 + c f1
        self.rotate(0, 1, rot.c, -rot.s)


class _GenericKernel:
    def __init__(self, t, frame: np.ndarray):
        self.t = t
        self.frame = frame.copy()

    def values(self, a: int, b: int, j: int) -> tuple[float, float, float]:
        f = self.frame
        t = self.t
        return t(f[a], f[b], f[b], f[a]), t(f[j], f[b], f[b], f[j]), t(f[a], f[b], f[b], f[j])

    def rotate(self, a: int, j: int, c: float, s: float):
        _rotate_rows(self.frame, a, j, c, s)

    def align(self):
        pass


def _kernel(t, frame: np.ndarray):
    terms = getattr(t, "terms", None)
    if terms:
        return _FormKernel(terms, frame)
    return _GenericKernel(t, frame)


def _orthonormal_pairs(xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    xs = xs / np.linalg.norm(xs, axis=1, keepdims=True)
    ys = ys - np.einsum("ai,ai->a", xs, ys)[:, None] * xs
    ys = ys / np.linalg.norm(ys, axis=1, keepdims=True)
    return xs, ys


@functools.lru_cache(maxsize=None)
def _chart_stencil(d: int, hg: float, hh: float):
    """Offsets for a central-difference gradient and Hessian in ``d`` coordinates.

    Rows: origin, +-hg e_i, +-hh e_i, then for each pair i < j the four
    corners (+,+), (+,-), (-,+), (-,-) at distance hh.
    """
    eye = np.eye(d)
    iu, ju = np.triu_indices(d, 1)
    corners = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)
    pairs = hh * (corners[None, :, 0, None] * eye[iu][:, None] + corners[None, :, 1, None] * eye[ju][:, None])
    offs = np.concatenate([np.zeros((1, d)), hg * eye, -hg * eye, hh * eye, -hh * eye, pairs.reshape(-1, d)])
    offs.setflags(write=False)
    return offs, iu, ju


def _newton_polish(t, x, y, maximize: bool, iters: int = 8):
    """Newton steps in the chart ``span(x + W z1, y + W z2)`` of the Grassmannian.

    Derivatives are central differences of the curvature itself, one batch
    per step. Coordinate sweeps crawl when the local Hessian is badly
    conditioned; this finishes the job. Steps that do not improve are
    rejected, so the result is never worse than the input.
    """
    sign = 1.0 if maximize else -1.0
    n = x.shape[0]
    m = n - 2
    if m < 1:
        return x, y
    d = 2 * m
    hg, hh = 1e-5, 1e-4
    offs, iu, ju = _chart_stencil(d, hg, hh)
    best = sign * sectional_curvature(t, x, y)
    for _ in range(iters):
        w = complete_frame(gram_schmidt([x, y])).vectors[2:]
        xs, ys = _orthonormal_pairs(x + offs[:, :m] @ w, y + offs[:, m:] @ w)
        f = sign * sectional_values(t, xs, ys)
        f0 = f[0]
        grad = (f[1 : 1 + d] - f[1 + d : 1 + 2 * d]) / (2 * hg)
        plus, minus = f[1 + 2 * d : 1 + 3 * d], f[1 + 3 * d : 1 + 4 * d]
        hess = np.diag((plus - 2 * f0 + minus) / hh**2)
        c = f[1 + 4 * d :].reshape(-1, 4)
        hess[iu, ju] = hess[ju, iu] = (c[:, 0] - c[:, 1] - c[:, 2] + c[:, 3]) / (4 * hh * hh)
        try:
            step = -np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)) or grad @ step <= 0.0:
            break
        nx, ny = _orthonormal_pairs((x + step[:m] @ w)[None], (y + step[m:] @ w)[None])
        value = sign * sectional_curvature(t, nx[0], ny[0])
        if value <= best:
            break
        x, y, best = nx[0], ny[0], value
        if np.max(np.abs(step)) < 1e-10:
            break
    return x, y


def _refine(
    t,
    x: np.ndarray,
    y: np.ndarray,
    max_iters: int,
    maximize: bool,
    tol: float = IMPROVEMENT_TOL,
    residual_tol: float | None = None,
):
    """Coordinate ascent (or descent) over the Grassmannian.

    Stops when a sweep gains at most ``tol``. With ``residual_tol`` (single
    canonical tensor only) it instead stops once the plane is invariant under
    the form to within that residual. Returns ``(x, y, value, sweeps)``.
    """
    n = x.shape[0]
    frame = complete_frame(gram_schmidt([x, y])).vectors
    kern = _kernel(t, np.array(frame))
    sign = 1.0 if maximize else -1.0
    current = sign * kern.values(0, 1, 1)[0] if n > 2 else sign * t(x, y, y, x)
    sweeps = 0
    if n == 2:
        return frame[0], frame[1], sign * current, 0
    for sweeps in range(1, max_iters + 1):
        start = current
        kern.align()
        for j in range(2, n):
            for a, b in ((0, 1), (1, 0)):
                va, vj, vc = kern.values(a, b, j)
                va, vj, vc = sign * va, sign * vj, sign * vc
                mean = 0.5 * (va + vj)
                half = 0.5 * (va - vj)
                # the step is taken even when the gain is below roundoff in
                # the curvature value; it still sharpens the plane itself
                if vc != 0.0 or half < 0.0:
                    theta = 0.5 * math.atan2(vc, half)
                    kern.rotate(a, j, math.cos(theta), math.sin(theta))
                    current = mean + math.hypot(half, vc)
                else:
                    current = va
        if residual_tol is not None:
            kern.align()
            if kern.plane_residual() <= residual_tol:
                break
        elif current - start <= tol:
            break
    f = kern.frame
    plane = gram_schmidt([f[0], f[1]]).vectors
    if residual_tol is None:
        x, y = _newton_polish(t, plane[0], plane[1], maximize)
        return x, y, sectional_curvature(t, x, y), sweeps
    return plane[0], plane[1], sign * current, sweeps


def refine_plane(t, start: TwoPlane, max_iters: int = 100, mode: str = "maximize") -> TwoPlane:
    """Push ``start`` toward a local extremum of sectional curvature.

    The curvature of the result is never worse than that of ``start``.
    """
    if mode not in ("maximize", "minimize"):
        raise ValueError(f"mode must be 'maximize' or 'minimize', got {mode!r}")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    x, y, _, _ = _refine(t, start.x, start.y, max_iters, mode == "maximize")
    out = TwoPlane(np.array([x, y]))
    k0 = sectional_curvature(t, start.x, start.y)
    k1 = sectional_curvature(t, out.x, out.y)
    worse = k1 < k0 if mode == "maximize" else k1 > k0
    return start if worse else out


def _sub_seed(seed: int, *path: int) -> int:
    return int(np.random.SeedSequence([seed, *path]).generate_state(1)[0])


def _extreme(t, xs, ys, values, maximize, refinements, candidates, workers, seed, escape=True, depth=0):
    """Best plane in one direction: refine the leading samples, then escape.

    Coordinate steps can stall on a local extremum. Every plane sharing a
    direction with a converged plane is reachable by those steps, so the
    remaining competitors live in its orthogonal complement; that subspace
    is searched recursively and the winner is polished in the full space.
    """
    sgn = 1.0 if maximize else -1.0
    k = min(candidates, values.size)
    order = np.argsort(-sgn * values, kind="stable")[:k]

    def run(i):
        if refinements < 1:
            return xs[i], ys[i]
        x, y, _, _ = _refine(t, xs[i], ys[i], refinements, maximize)
        return x, y

    planes = [TwoPlane(gram_schmidt([x, y]).vectors) for x, y in _map(run, order, workers)]
    # sampled planes can only lose to refinement by roundoff; keep them in the running
    planes.append(TwoPlane(np.array([xs[order[0]], ys[order[0]]])))
    kappas = [sectional_curvature(t, p.x, p.y) for p in planes]
    best = int(np.argmax(sgn * np.array(kappas)))
    plane, kappa = planes[best], kappas[best]

    if not escape or refinements < 1 or plane.dim < 4:
        return plane, kappa
    rest = complement_basis(plane.vectors)
    sub = restrict_tensor(t, rest)
    sub_seed = _sub_seed(seed, depth, int(maximize))
    sx, sy = sample_plane_arrays(rest.shape[0], values.size, sub_seed, workers)
    sv = sectional_values(sub, sx, sy)
    inner, _ = _extreme(sub, sx, sy, sv, maximize, refinements, candidates, workers, sub_seed, True, depth + 1)
    x, y, _, _ = _refine(t, inner.x @ rest, inner.y @ rest, refinements, maximize)
    lifted = TwoPlane(gram_schmidt([x, y]).vectors)
    value = sectional_curvature(t, lifted.x, lifted.y)
    if sgn * value > sgn * kappa:
        return lifted, value
    return plane, kappa


def estimate_range(
    t,
    dim: int | None = None,
    samples: int = 4096,
    refinements: int = 100,
    seed: int = 0,
    workers: int = 1,
    candidates: int = 8,
    escape: bool = True,
) -> CurvatureRangeEstimate:
    """Estimate the min and max sectional curvature of ``t``.

    Every reported value is recomputed from its plane with
    ``sectional_curvature``, so the estimate is always an inner bound.
    ``escape=False`` skips the complement search and returns the best local
    extremum found from the sampled candidates.
    """
    n = dim if dim is not None else t.dim
    if samples < 1:
        raise ValueError("samples must be >= 1")
    xs, ys = sample_plane_arrays(n, samples, seed, workers)
    spans = [slice(c * CHUNK, c * CHUNK + k) for c, k in _chunks(samples)]
    values = np.concatenate(_map(lambda sl: sectional_values(t, xs[sl], ys[sl]), spans, workers))

    pmax, kmax = _extreme(t, xs, ys, values, True, refinements, candidates, workers, seed, escape)
    pmin, kmin = _extreme(t, xs, ys, values, False, refinements, candidates, workers, seed, escape)
    if kmin > kmax:
        kmin = kmax = min(kmin, kmax)
    return CurvatureRangeEstimate(kmin, kmax, pmin, pmax, samples, histogram(values, kmin, kmax))


def histogram(values: np.ndarray, lo: float, hi: float, bins: int = HISTOGRAM_BINS) -> list:
    """``(lower edge, count)`` pairs of equal-width bins over ``[lo, hi]``."""
    width = (hi - lo) / bins
    if width <= 0.0:
        counts = [0] * bins
        counts[0] = int(values.size)
        return [(float(lo), c) for c in counts]
    idx = np.clip(np.floor((values - lo) / width).astype(int), 0, bins - 1)
    counts = np.bincount(idx, minlength=bins)
    return [(float(lo + b * width), int(counts[b])) for b in range(bins)]


def geodesic_path(pmin: TwoPlane, pmax: TwoPlane):
    """Return ``path(s)``, a shortest Grassmannian path from ``pmin`` (s=0) to ``pmax`` (s=1).

    Built from the principal vectors of the two planes; each point is an
    exactly orthonormal pair, so the path never degenerates.
    """
    a = pmin.vectors.T
    b = pmax.vectors.T
    u, sig, vt = np.linalg.svd(a.T @ b)
    a2 = a @ u
    b2 = b @ vt.T
    sig = np.clip(sig, -1.0, 1.0)
    angles = np.arccos(sig)
    dirs = np.zeros_like(a2)
    for k in range(2):
        w = b2[:, k] - sig[k] * a2[:, k]
        norm = np.linalg.norm(w)
        if norm > 1e-14:
            dirs[:, k] = w / norm
        else:
            angles[k] = 0.0

    def path(s: float) -> np.ndarray:
        return (a2 * np.cos(s * angles) + dirs * np.sin(s * angles)).T

    return path


def plane_for_value(t, pmin: TwoPlane, pmax: TwoPlane, c: float, max_iters: int = 200) -> TwoPlane:
    """Find a plane with curvature ``c`` between two planes bracketing it.

    Bisects along the geodesic from ``pmin`` to ``pmax``; continuity of the
    curvature along the path guarantees a root.
    """
    tol = 1e-8 * max(1.0, abs(c))
    kmin = sectional_curvature(t, pmin.x, pmin.y)
    kmax = sectional_curvature(t, pmax.x, pmax.y)
    if c == kmin or abs(c - kmin) <= tol and c <= kmax:
        return pmin
    if c == kmax or abs(c - kmax) <= tol and c >= kmin:
        return pmax
    if not kmin <= c <= kmax:
        raise ValueOutOfRange(f"target {c!r} lies outside [{kmin!r}, {kmax!r}]")
    path = geodesic_path(pmin, pmax)
    lo, hi = 0.0, 1.0
    best, best_err = None, math.inf
    for _ in range(max_iters):
        mid = 0.5 * (lo + hi)
        x, y = path(mid)
        err = sectional_curvature(t, x, y) - c
        if abs(err) < best_err:
            best, best_err = (x, y), abs(err)
        if abs(err) <= tol:
            break
        if err < 0:
            lo = mid
        else:
            hi = mid
    if best_err > tol:
        raise ConvergenceFailure(f"bisection stalled {best_err:.3e} away from {c!r}")
    return TwoPlane(gram_schmidt(list(best)).vectors)

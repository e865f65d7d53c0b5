"""Sharp sectional curvature bounds for canonical curvature tensors, and a
symmetric eigensolver built from extremal 2-planes."""

__version__ = "0.1.0"

from .bounds import CurvatureBounds, canonical_bounds, remark_2_4_fixture, sum_bounds
from .curvature import (
    CanonicalTensor,
    DenseTensor,
    TensorSum,
    check_symmetries,
    eval_canonical,
    eval_sum,
    normalize_sum,
    sectional_curvature,
)
from .linalg import Frame, Rotation2, SymmetricForm, TwoPlane, complete_frame, diagonalizing_rotation, gram_schmidt, restrict_form
from .oracle import CurvatureRangeEstimate, estimate_range, plane_for_value, refine_plane, sample_planes
from .realization import build_hypersurface, curvature_at_point, eigenvalues_for_interval, metric_at, realize_interval
from .spectral import (
    SpectralResult,
    eigen_residual,
    is_curvature_zero,
    rank_one_spectrum,
    spectral_paper_mode,
    spectral_sweep_mode,
)

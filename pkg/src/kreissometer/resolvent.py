"""Pointwise resolvent evaluation, ratio fields and region membership.

The central quantity is the ratio of the resolvent norm to the reciprocal
distance from the relevant part of the spectrum.  For the continuous
(half-plane) setting the denominator runs over the non-right-half-plane
eigenvalues; the discrete (exterior-of-disk) setting uses the full
spectrum.  Denominators are computed as minimum distances rather than
maximum inverses, which is algebraically identical and overflow-safe.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import SingularPointError
from .linalg import as_square_matrix
from .spectra import boundary_excluded_spectrum, spectrum

#: condition-estimate ceiling beyond which a point counts as singular
COND_LIMIT = 1e14

FLAG_OK = "ok"
FLAG_SINGULAR = "singular"
FLAG_LEFT_HALF_PLANE = "left-half-plane"


@dataclass(frozen=True)
class EvalPoint:
    """A resolvent evaluation point with its distance to the boundary."""

    z: complex
    half_plane_margin: float

    @classmethod
    def continuous(cls, z) -> "EvalPoint":
        z = complex(z)
        return cls(z, z.real)

    @classmethod
    def discrete(cls, z) -> "EvalPoint":
        z = complex(z)
        return cls(z, abs(z) - 1.0)


@dataclass(frozen=True)
class RatioSample:
    """Resolvent norm at ``z`` divided by the max reciprocal distance.

    ``denominator`` is ``max(1/|z - lam|)`` over the relevant eigenvalues;
    when that set is empty the denominator is 0 and the ratio is ``inf``
    (the defined value of the functional in that case).
    """

    z: complex
    resolvent_norm: float
    denominator: float
    ratio: float


def resolvent_norm(m, z) -> float:
    """Spectral norm of ``(z I - M)^{-1}``.

    Computed as the reciprocal smallest singular value of the shifted
    matrix, which is exact for the 2-norm.  A condition estimate above
    ``1e14`` raises :class:`SingularPointError`.
    """
    arr = as_square_matrix(m)
    z = complex(z)
    shifted = z * np.eye(arr.shape[0], dtype=complex) - arr
    svals = np.linalg.svd(shifted, compute_uv=False)
    smin = float(svals[-1])
    if smin == 0.0 or svals[0] / smin > COND_LIMIT:
        raise SingularPointError(f"z={z} is numerically on the spectrum")
    return 1.0 / smin


def jordan_resolvent(lam, k: int, z) -> np.ndarray:
    """Resolvent of a k-by-k Jordan block as the finite Neumann sum
    ``sum_j (z - lam)^{-(j+1)} N^j``."""
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValueError(f"block size must be a positive integer, got {k!r}")
    lam = complex(lam)
    z = complex(z)
    if z == lam:
        raise SingularPointError("z equals the block eigenvalue")
    w = 1.0 / (z - lam)
    out = np.zeros((k, k), dtype=complex)
    coeff = w
    for j in range(k):
        idx = np.arange(k - j)
        out[idx, idx + j] = coeff
        coeff *= w
    return out


def _min_distance(z: complex, values: Iterable[complex]) -> float:
    return min(abs(z - complex(lam)) for lam in values)


def ratio_continuous(m, z, excluded_spectrum: Sequence[complex]) -> RatioSample:
    """Pointwise half-plane ratio sample at ``z`` with ``Re z > 0``.

    ``excluded_spectrum`` is the list of eigenvalues outside the open right
    half-plane (see :func:`kreissometer.spectra.boundary_excluded_spectrum`);
    an empty list yields the defined ``inf`` ratio.
    """
    z = complex(z)
    if z.real <= 0.0:
        raise ValueError(f"z={z} is not in the open right half-plane")
    rnorm = resolvent_norm(m, z)
    if len(excluded_spectrum) == 0:
        return RatioSample(z, rnorm, 0.0, math.inf)
    dmin = _min_distance(z, excluded_spectrum)
    return RatioSample(z, rnorm, 1.0 / dmin if dmin > 0 else math.inf, rnorm * dmin)


def ratio_discrete(m, z, spectrum_values: Sequence[complex] | None = None) -> RatioSample:
    """Pointwise exterior-of-disk ratio sample at ``z`` with ``|z| > 1``.

    The denominator runs over the full spectrum; ``spectrum_values`` may be
    passed to avoid recomputing the eigenvalues inside sweeps.
    """
    z = complex(z)
    if abs(z) <= 1.0:
        raise ValueError(f"z={z} is not outside the closed unit disk")
    arr = as_square_matrix(m)
    rnorm = resolvent_norm(arr, z)
    if spectrum_values is None:
        spectrum_values = np.linalg.eigvals(arr)
    dmin = _min_distance(z, spectrum_values)
    return RatioSample(z, rnorm, 1.0 / dmin if dmin > 0 else math.inf, rnorm * dmin)


def _region_membership(m, z, r, numerator) -> bool:
    if r <= 0:
        raise ValueError("r must be positive")
    z = complex(z)
    lams = np.linalg.eigvals(as_square_matrix(m))
    worst = -math.inf
    for lam in lams:
        lam = complex(lam)
        if z == lam:
            raise SingularPointError("z equals an eigenvalue exactly")
        worst = max(worst, numerator(lam) / abs(z - lam))
    return worst <= 1.0 / r


def region_S_membership(m, z, r: float) -> bool:
    """Membership in the half-plane-style region: true iff
    ``max |Re lam| / |z - lam| <= 1/r`` over the spectrum.

    Eigenvalues on the imaginary axis contribute zero, so they never
    exclude a point (unless ``z`` hits one exactly, which is singular).
    """
    return _region_membership(m, z, r, lambda lam: abs(lam.real))


def region_T_membership(m, z, r: float) -> bool:
    """Membership in the disk-style region: true iff
    ``max (1 - |lam|) / |z - lam| <= 1/r`` over the spectrum."""
    return _region_membership(m, z, r, lambda lam: 1.0 - abs(lam))


@dataclass(frozen=True)
class GridCell:
    re: float
    im: float
    resolvent_norm: float
    ratio: float
    flag: str


@dataclass(frozen=True)
class ResolventGrid:
    """Rectangular field samples, row-major with the real axis as the slow
    index, ready for CSV emission."""

    re_values: tuple[float, ...]
    im_values: tuple[float, ...]
    cells: tuple[GridCell, ...]

    def write_csv(self, fileobj) -> None:
        w = csv.writer(fileobj, lineterminator="\n")
        w.writerow(["re", "im", "resolvent_norm", "ratio", "flag"])
        for c in self.cells:
            w.writerow([repr(c.re), repr(c.im), repr(c.resolvent_norm), repr(c.ratio), c.flag])


def resolvent_grid(m, re_range, im_range, counts, cluster_tol: float | None = None) -> ResolventGrid:
    """Sample resolvent norm and continuous ratio on a rectangular grid.

    Cells within ``1e-12`` of the spectrum are flagged ``singular`` and not
    evaluated; cells outside the open right half-plane carry the resolvent
    norm but a NaN ratio and the ``left-half-plane`` flag.
    """
    arr = as_square_matrix(m)
    n_re, n_im = counts
    if n_re < 1 or n_im < 1:
        raise ValueError("grid counts must be positive")
    report = spectrum(arr, cluster_tol=cluster_tol)
    excluded = boundary_excluded_spectrum(report)
    all_values = report.values()
    res = np.linspace(re_range[0], re_range[1], n_re)
    ims = np.linspace(im_range[0], im_range[1], n_im)
    cells = []
    for x in res:
        for y in ims:
            z = complex(x, y)
            if _min_distance(z, all_values) < 1e-12:
                cells.append(GridCell(float(x), float(y), math.nan, math.nan, FLAG_SINGULAR))
                continue
            try:
                rnorm = resolvent_norm(arr, z)
            except SingularPointError:
                cells.append(GridCell(float(x), float(y), math.nan, math.nan, FLAG_SINGULAR))
                continue
            if z.real > 0.0:
                sample = ratio_continuous(arr, z, excluded)
                cells.append(GridCell(float(x), float(y), rnorm, sample.ratio, FLAG_OK))
            else:
                cells.append(GridCell(float(x), float(y), rnorm, math.nan, FLAG_LEFT_HALF_PLANE))
    return ResolventGrid(
        re_values=tuple(float(x) for x in res),
        im_values=tuple(float(y) for y in ims),
        cells=tuple(cells),
    )

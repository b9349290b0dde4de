"""Spectrum extraction, Jordan-structure estimation and stability verdicts.

Jordan structure is discontinuous in the entries, so every answer here is
relative to an explicit clustering tolerance; the default is
``1e-8 * (1 + ||M||)``.  Eigenvalues within tolerance of the stability
boundary are treated as *on* it, which biases verdicts toward detecting
defectiveness (a false "diverged" is preferable to a false "bounded").
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import as_square_matrix, schur, spectral_norm

DEFAULT_TOL = 1e-8

REASON_POSITIVE_REAL_PART = "positive-real-part"
REASON_DEFECTIVE_ON_AXIS = "defective-on-axis"
REASON_RADIUS_EXCEEDS_ONE = "radius-exceeds-one"
REASON_DEFECTIVE_ON_CIRCLE = "defective-on-circle"


@dataclass(frozen=True)
class EigenvalueCluster:
    value: complex
    algebraic_multiplicity: int
    max_block_size: int


@dataclass(frozen=True)
class SpectrumReport:
    """Clustered eigenvalues with estimated largest Jordan block sizes."""

    eigenvalues: tuple[EigenvalueCluster, ...]
    cluster_tolerance: float
    abscissa: float
    radius: float

    @property
    def dimension(self) -> int:
        return sum(c.algebraic_multiplicity for c in self.eigenvalues)

    def values(self) -> list[complex]:
        return [c.value for c in self.eigenvalues]


@dataclass(frozen=True)
class Witness:
    eigenvalue: complex
    reason: str


@dataclass(frozen=True)
class StabilityVerdict:
    quasi_stable: bool
    witness: Optional[Witness]
    tolerance: float
    report: SpectrumReport


def _cluster_indices(lams: np.ndarray, tol: float) -> list[list[int]]:
    # union-find over |lam_i - lam_j| <= tol; n is small, O(n^2) is fine
    n = len(lams)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(lams[i] - lams[j]) <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def spectrum(m, cluster_tol: float | None = None) -> SpectrumReport:
    """Eigenvalues from the Schur diagonal, clustered, with block estimates.

    The largest Jordan block size of each cluster is read off the rank
    staircase of ``(M - lam I)^k``: singular values below
    ``cluster_tol * ||M - lam I||^k`` count as zero.
    """
    arr = as_square_matrix(m)
    n = arr.shape[0]
    norm = spectral_norm(arr)
    if cluster_tol is None:
        cluster_tol = DEFAULT_TOL * (1.0 + norm)
    if cluster_tol < 0:
        raise ValueError("cluster_tol must be nonnegative")
    lams = schur(arr).eigenvalues
    clusters = []
    for idx in _cluster_indices(lams, cluster_tol):
        value = complex(np.mean(lams[idx]))
        mult = len(idx)
        clusters.append((value, mult))
    eye = np.eye(n, dtype=complex)
    out = []
    for value, mult in clusters:
        if mult == 1:
            out.append(EigenvalueCluster(value, 1, 1))
            continue
        p = arr - value * eye
        p_norm = float(np.linalg.norm(p, 2))
        if p_norm == 0.0:
            out.append(EigenvalueCluster(value, mult, 1))
            continue
        block = mult
        power = eye
        for k in range(1, mult + 1):
            power = power @ p
            svals = np.linalg.svd(power, compute_uv=False)
            threshold = cluster_tol * p_norm**k
            rank = int(np.count_nonzero(svals > threshold))
            if rank <= n - mult:
                block = k
                break
        out.append(EigenvalueCluster(value, mult, block))
    out.sort(key=lambda c: (-c.value.real, c.value.imag))
    values = np.array([c.value for c in out])
    return SpectrumReport(
        eigenvalues=tuple(out),
        cluster_tolerance=float(cluster_tol),
        abscissa=float(np.max(values.real)),
        radius=float(np.max(np.abs(values))),
    )


def classify_quasi_stable(m, tol: float | None = None) -> StabilityVerdict:
    """Quasi-stability verdict: bounded semigroup sup iff every eigenvalue
    sits in the closed left half-plane and axis eigenvalues are semisimple.

    ``tol`` is relative; the absolute threshold is ``tol * (1 + ||M||)``.
    The witness is the first violation in the report order (descending real
    part, then ascending imaginary part).
    """
    arr = as_square_matrix(m)
    if tol is None:
        tol = DEFAULT_TOL
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    thresh = tol * (1.0 + spectral_norm(arr))
    report = spectrum(arr, cluster_tol=thresh)
    for c in report.eigenvalues:
        if c.value.real > thresh:
            return StabilityVerdict(False, Witness(c.value, REASON_POSITIVE_REAL_PART), thresh, report)
    for c in report.eigenvalues:
        if abs(c.value.real) <= thresh and c.max_block_size > 1:
            return StabilityVerdict(False, Witness(c.value, REASON_DEFECTIVE_ON_AXIS), thresh, report)
    return StabilityVerdict(True, None, thresh, report)


def classify_power_bounded(m, tol: float | None = None) -> StabilityVerdict:
    """Discrete analog: powers bounded iff the spectrum lies in the closed
    unit disk and eigenvalues on the circle are semisimple."""
    arr = as_square_matrix(m)
    if tol is None:
        tol = DEFAULT_TOL
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    thresh = tol * (1.0 + spectral_norm(arr))
    report = spectrum(arr, cluster_tol=thresh)
    for c in report.eigenvalues:
        if abs(c.value) > 1.0 + thresh:
            return StabilityVerdict(False, Witness(c.value, REASON_RADIUS_EXCEEDS_ONE), thresh, report)
    for c in report.eigenvalues:
        if abs(abs(c.value) - 1.0) <= thresh and c.max_block_size > 1:
            return StabilityVerdict(False, Witness(c.value, REASON_DEFECTIVE_ON_CIRCLE), thresh, report)
    return StabilityVerdict(True, None, thresh, report)


def boundary_excluded_spectrum(report: SpectrumReport, tol: float | None = None) -> list[complex]:
    """Eigenvalues not in the open right half-plane.

    Uses the report's cluster tolerance as the absolute axis threshold
    unless ``tol`` overrides it; may be empty.
    """
    thresh = report.cluster_tolerance if tol is None else tol
    return [c.value for c in report.eigenvalues if c.value.real <= thresh]

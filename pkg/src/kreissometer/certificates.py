"""Constructive and verification forms of the triangular-similarity and
Hermitian-form stability certificates, with the explicit ratio bound
``K31^2 * C / 4`` and the region bounds derived from it.

The triangular certificate is built from an ordered Schur form followed by
the diagonal scaling ``diag(1, eps, eps^2, ...)`` which shrinks
off-diagonal entries at the price of a larger similarity norm; callers can
trade the two via ``scaling_eps``.  Verification re-measures every claimed
constraint and never trusts the builder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import SingularPointError
from .linalg import (
    as_square_matrix,
    hermitian_extrema,
    schur,
    solve_lyapunov_continuous,
    solve_stein_discrete,
    spectral_norm,
)
from .resolvent import resolvent_norm
from .spectra import boundary_excluded_spectrum, spectrum

MODES = ("continuous", "discrete")

#: off-diagonal entries below this (relative) size count as structurally zero
NUMERATOR_RTOL = 1e-12


@dataclass(frozen=True)
class Condition3Certificate:
    """Similarity ``S`` with ``T = S M S^{-1}`` ordered upper triangular.

    ``k31 = ||S|| + ||S^{-1}||`` and ``k32`` is the measured maximum of
    ``|t_ij| / |Re(t_ii)|`` over ``i < j`` (continuous mode; discrete mode
    divides by ``1 - |t_ii|``).  Denominators below ``1e-8 (1 + ||M||)``
    count as zero: a zero numerator then contributes nothing and a nonzero
    one makes ``k32`` infinite.  ``eps_table`` reports ``(eps, k31, k32)``
    for eps in {1, 0.1, 0.01} so callers can trade the two constants.
    """

    s: np.ndarray
    t: np.ndarray
    k31: float
    k32: float
    kappa_s: float
    ordering_valid: bool
    triangular_valid: bool
    diagonal_sign_valid: bool
    mode: str
    scaling_eps: float
    eps_table: tuple[tuple[float, float, float], ...]

    @property
    def dimension(self) -> int:
        return self.t.shape[0]


@dataclass(frozen=True)
class Condition4Certificate:
    """Hermitian form ``H`` certifying stability, normalized so that the
    two-sided bound ``K4^{-1} I <= H <= K4 I`` is symmetric.

    ``negativity_residual`` is ``lambda_max(H M + M* H)`` in continuous
    mode and ``lambda_max(M* H M - H)`` in discrete mode; both are
    nonpositive for a valid certificate.
    """

    h: np.ndarray
    k4: float
    negativity_residual: float
    lambda_min: float
    mode: str
    valid: bool


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    slack: float


@dataclass(frozen=True)
class Condition3Verification:
    checks: tuple[CheckResult, ...]

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _denominators(diag: np.ndarray, mode: str, tol: float) -> np.ndarray:
    if mode == "continuous":
        d = np.abs(diag.real)
    else:
        d = 1.0 - np.abs(diag)
    d = np.where(d > tol, d, 0.0)
    return np.maximum(d, 0.0)


def _measure_k32(t: np.ndarray, mode: str, tol: float) -> float:
    n = t.shape[0]
    num_tol = NUMERATOR_RTOL * (1.0 + float(np.max(np.abs(t))))
    denom = _denominators(np.diag(t), mode, tol)
    k32 = 0.0
    for i in range(n):
        row_max = float(np.max(np.abs(t[i, i + 1 :]))) if i + 1 < n else 0.0
        if row_max <= num_tol:
            continue
        if denom[i] == 0.0:
            return math.inf
        k32 = max(k32, row_max / denom[i])
    return k32


def _ordering_keys(diag: np.ndarray, mode: str) -> np.ndarray:
    return diag.real if mode == "continuous" else np.abs(diag)


def build_condition3(m, mode: str = "continuous", scaling_eps: float = 1.0) -> Condition3Certificate:
    """Best-effort triangular-similarity certificate.

    Orders the Schur form (descending real part in continuous mode,
    descending modulus in discrete mode), applies the diagonal scaling
    ``diag(1, eps, ...)`` and measures all constants and validity flags.
    Nothing is assumed: an unsatisfiable entry bound simply shows up as an
    infinite ``k32``.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if scaling_eps <= 0:
        raise ValueError("scaling_eps must be positive")
    arr = as_square_matrix(m)
    n = arr.shape[0]
    norm = spectral_norm(arr)
    tol = 1e-8 * (1.0 + norm)
    ordering = "descending-real-part" if mode == "continuous" else "descending-modulus"
    sf = schur(arr, ordering)

    def measure(eps):
        # S = D^{-1} Q*, so S M S^{-1} = D^{-1} T D scales t_ij by eps^(j-i)
        d = eps ** np.arange(n)
        t_scaled = sf.t * np.outer(1.0 / d, d)
        s = sf.q.conj().T * (1.0 / d)[:, None]
        s_inv = sf.q * d[None, :]
        k31 = float(np.linalg.norm(s, 2) + np.linalg.norm(s_inv, 2))
        kappa = float(np.linalg.norm(s, 2) * np.linalg.norm(s_inv, 2))
        k32 = _measure_k32(t_scaled, mode, tol)
        return s, s_inv, t_scaled, k31, k32, kappa

    s, _, t_scaled, k31, k32, kappa = measure(scaling_eps)
    eps_table = []
    for eps in (1.0, 0.1, 0.01):
        _, _, _, k31_eps, k32_eps, _ = measure(eps)
        eps_table.append((eps, k31_eps, k32_eps))
    eps_table = tuple(eps_table)
    keys = _ordering_keys(np.diag(t_scaled), mode)
    ordering_valid = bool(np.all(np.diff(keys) <= tol))
    tri_max = float(np.max(np.abs(np.tril(t_scaled, -1)))) if n > 1 else 0.0
    triangular_valid = tri_max <= 1e-10 * max(float(np.linalg.norm(t_scaled, 2)), 1e-300)
    if mode == "continuous":
        diagonal_sign_valid = bool(np.max(np.diag(t_scaled).real) <= tol)
    else:
        diagonal_sign_valid = bool(np.max(np.abs(np.diag(t_scaled))) <= 1.0 + tol)
    return Condition3Certificate(
        s=s,
        t=t_scaled,
        k31=k31,
        k32=k32,
        kappa_s=kappa,
        ordering_valid=ordering_valid,
        triangular_valid=triangular_valid,
        diagonal_sign_valid=diagonal_sign_valid,
        mode=mode,
        scaling_eps=float(scaling_eps),
        eps_table=eps_table,
    )


def verify_condition3(m, cert: Condition3Certificate, k31_claim: float, k32_claim: float) -> Condition3Verification:
    """Re-check every certificate constraint against claimed constants.

    Checks: similarity reconstruction, triangularity, diagonal ordering,
    the similarity-norm claim and the entry bounds.  Failures are report
    content, never exceptions.
    """
    arr = as_square_matrix(m)
    n = arr.shape[0]
    norm = spectral_norm(arr)
    tol = 1e-8 * (1.0 + norm)
    s, t = cert.s, cert.t
    s_inv = np.linalg.solve(s, np.eye(n, dtype=complex))
    s_norm = float(np.linalg.norm(s, 2))
    s_inv_norm = float(np.linalg.norm(s_inv, 2))
    kappa = s_norm * s_inv_norm
    checks = []

    recon = float(np.linalg.norm(s @ arr @ s_inv - t, 2))
    recon_bound = 1e-8 * max(norm, 1e-300) * kappa
    checks.append(CheckResult("reconstruction", recon <= recon_bound, recon_bound - recon))

    tri_max = float(np.max(np.abs(np.tril(t, -1)))) if n > 1 else 0.0
    tri_bound = 1e-10 * max(float(np.linalg.norm(t, 2)), 1e-300)
    checks.append(CheckResult("triangularity", tri_max <= tri_bound, tri_bound - tri_max))

    keys = _ordering_keys(np.diag(t), cert.mode)
    worst_rise = float(np.max(np.diff(keys))) if n > 1 else 0.0
    checks.append(CheckResult("ordering", worst_rise <= tol, tol - worst_rise))

    measured_k31 = s_norm + s_inv_norm
    checks.append(CheckResult("norm-bound", measured_k31 <= k31_claim * (1.0 + 1e-12),
                              k31_claim - measured_k31))

    if k32_claim < 0:
        checks.append(CheckResult("entry-bound", False, float(k32_claim)))
    elif math.isinf(k32_claim):
        checks.append(CheckResult("entry-bound", True, math.inf))
    else:
        num_tol = NUMERATOR_RTOL * (1.0 + float(np.max(np.abs(t))))
        denom = _denominators(np.diag(t), cert.mode, tol)
        slack = math.inf
        ok = True
        for i in range(n):
            for j in range(i + 1, n):
                entry = abs(t[i, j])
                bound = max(k32_claim * denom[i], num_tol)
                slack = min(slack, bound - entry)
                # one-ulp allowance so a claim equal to the measured
                # constant verifies against its own defining entry
                if entry > bound * (1.0 + 1e-12):
                    ok = False
        checks.append(CheckResult("entry-bound", ok, slack if n > 1 else math.inf))

    return Condition3Verification(tuple(checks))


def build_condition4(m, mode: str = "continuous") -> Condition4Certificate:
    """Hermitian-form certificate from the Lyapunov (continuous) or Stein
    (discrete) equation, scaled so the eigenvalue bounds pair up as
    ``K4 = sqrt(lambda_max / lambda_min)`` of the raw solution.

    Raises :class:`kreissometer.errors.BoundaryError` when the spectrum is
    not strictly inside the stable region: no strict certificate of this
    form exists there.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    arr = as_square_matrix(m)
    norm = spectral_norm(arr)
    if mode == "continuous":
        h0 = solve_lyapunov_continuous(arr)
    else:
        h0 = solve_stein_discrete(arr)
    lmin0, lmax0 = hermitian_extrema(h0)
    h = h0 / math.sqrt(lmin0 * lmax0)
    h = (h + h.conj().T) / 2.0
    lmin, lmax = hermitian_extrema(h)
    k4 = max(lmax, 1.0 / lmin) if lmin > 0 else math.inf
    if mode == "continuous":
        residual_matrix = h @ arr + arr.conj().T @ h
    else:
        residual_matrix = arr.conj().T @ h @ arr - h
    residual = hermitian_extrema((residual_matrix + residual_matrix.conj().T) / 2.0)[1]
    h_norm = float(np.linalg.norm(h, 2))
    valid = lmin > 0.0 and residual <= 1e-8 * h_norm * (1.0 + norm) ** 2
    return Condition4Certificate(
        h=h,
        k4=float(k4),
        negativity_residual=float(residual),
        lambda_min=float(lmin),
        mode=mode,
        valid=bool(valid),
    )


def _entry_growth_constant(n: int, k32: float) -> float:
    # ||A|| <= n * max-entry <= n * max(1, k32) for the unit triangular
    # A = I - (zI - D)^{-1} N, then the unit-triangular inverse bound with
    # alpha = n * max(1, k32)
    return float((n**2 * max(1.0, k32)) ** (n - 1))


def bound_from_condition3(cert: Condition3Certificate) -> float:
    """Explicit upper bound ``K31^2 * C / 4`` on the half-plane ratio
    supremum, with ``C = (n^2 * max(1, K32))^(n-1)``; infinite when the
    entry bound is unsatisfiable (``K32 = inf``)."""
    if cert.mode != "continuous":
        raise ValueError("ratio bound is defined for continuous-mode certificates")
    if math.isinf(cert.k32):
        return math.inf
    c = _entry_growth_constant(cert.dimension, cert.k32)
    return cert.k31**2 * c / 4.0


def miller_region_bound(cert: Condition3Certificate, r: float) -> float:
    """Region resolvent-bound factor ``K (1 + 1/r)^(n-1)`` valid on the
    membership region of the certificate's mode, with
    ``K = K31^2 * C0 / 4`` and ``C0 = (n^2 * max(1, K32))^(n-1)``."""
    if r <= 0:
        raise ValueError("r must be positive")
    if math.isinf(cert.k32):
        return math.inf
    n = cert.dimension
    c0 = _entry_growth_constant(n, cert.k32)
    k = cert.k31**2 * c0 / 4.0
    return k * (1.0 + 1.0 / r) ** (n - 1)


@dataclass(frozen=True)
class InequalitySample:
    z: complex
    resolvent_norm: float
    denominator: float
    slack: float
    flag: str


@dataclass(frozen=True)
class ResolventInequalityReport:
    k: float
    denominator_mode: str
    samples: tuple[InequalitySample, ...]
    violations: tuple[int, ...]

    @property
    def all_ok(self) -> bool:
        return len(self.violations) == 0


def check_resolvent_inequality(
    m,
    k: float,
    samples: Sequence[complex],
    denominator: str = "full-spectrum",
) -> ResolventInequalityReport:
    """Check ``||R(z)|| <= K * max 1/|z - lam|`` at the given samples.

    ``denominator`` selects the eigenvalue set: "full-spectrum" or
    "excluded" (the non-right-half-plane part).  A sample violates when its
    slack is below ``-1e-8`` relative to the resolvent norm; singular
    samples are flagged in-band and never counted as violations.
    """
    if k <= 0:
        raise ValueError("K must be positive")
    if denominator not in ("full-spectrum", "excluded"):
        raise ValueError("denominator must be 'full-spectrum' or 'excluded'")
    arr = as_square_matrix(m)
    report = spectrum(arr)
    values = report.values() if denominator == "full-spectrum" else boundary_excluded_spectrum(report)
    if not values:
        raise ValueError("denominator spectrum set is empty (spectrum in the open right half-plane)")
    out = []
    violations = []
    for idx, z in enumerate(samples):
        z = complex(z)
        try:
            rnorm = resolvent_norm(arr, z)
        except SingularPointError:
            out.append(InequalitySample(z, math.nan, math.nan, math.nan, "singular"))
            continue
        dmin = min(abs(z - lam) for lam in values)
        denom = 1.0 / dmin if dmin > 0 else math.inf
        slack = k * denom - rnorm
        flag = "ok"
        if slack < -1e-8 * rnorm:
            flag = "violation"
            violations.append(idx)
        out.append(InequalitySample(z, rnorm, denom, slack, flag))
    return ResolventInequalityReport(
        k=float(k),
        denominator_mode=denominator,
        samples=tuple(out),
        violations=tuple(violations),
    )

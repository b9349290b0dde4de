"""Inverse-Laplace reconstruction for the forced linear Cauchy problem and
the envelope comparison between the half-plane resolvent bound (constant
along vertical contour lines) and the distance-based bound (decaying like
``1/|y|``).

The contour integral is a symmetrically truncated trapezoid rule on the
vertical line ``Re z = gamma`` (the principal-value reading of the
integral).  The reference solution is the Duhamel convolution by adaptive
quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad_vec
from scipy.special import wofz

from .constants import SearchConfig, cal_k_continuous, kreiss_constant_continuous
from .errors import ConfigurationError
from .linalg import as_square_matrix, expm
from .resolvent import resolvent_norm
from .spectra import spectrum


@dataclass(frozen=True)
class CauchyConfig:
    """Contour and envelope parameters.

    ``alpha``, ``k_old`` and ``k_new`` may be left ``None`` to be auto
    filled: ``alpha`` becomes the spectral abscissa plus ``1e-2`` and the
    constants come from the computed stability functionals.
    """

    gamma: float
    alpha: Optional[float] = None
    k_old: Optional[float] = None
    k_new: Optional[float] = None
    y_max: float = 100.0
    y_count: int = 20_001
    t_eval: tuple[float, ...] = ()

    def __post_init__(self):
        if self.y_max <= 0:
            raise ValueError("y_max must be positive")
        if self.y_count < 2:
            raise ValueError("y_count must be at least 2")
        if self.alpha is not None and self.gamma <= self.alpha:
            raise ValueError("gamma must exceed alpha")
        if any(t < 0 for t in self.t_eval):
            raise ValueError("t_eval entries must be nonnegative")
        object.__setattr__(self, "t_eval", tuple(float(t) for t in self.t_eval))


@dataclass(frozen=True)
class LaplaceReconstruction:
    t_eval: tuple[float, ...]
    values: np.ndarray  # shape (len(t_eval), n), complex
    y_max: float
    y_count: int
    step: float


def _contour_values(arr, f_transform, gamma, y):
    """Solve (zI - A) x = f(z) along the contour, chunked."""
    n = arr.shape[0]
    z = gamma + 1j * y
    out = np.empty((len(y), n), dtype=complex)
    eye = np.eye(n, dtype=complex)
    chunk = 20_000
    for lo in range(0, len(y), chunk):
        zc = z[lo : lo + chunk]
        rhs = np.empty((len(zc), n), dtype=complex)
        for i, zz in enumerate(zc):
            val = np.atleast_1d(np.asarray(f_transform(complex(zz)), dtype=complex))
            if val.shape != (n,):
                raise ConfigurationError(
                    f"transform returned shape {val.shape}, expected ({n},)"
                )
            if not np.all(np.isfinite(val.real)) or not np.all(np.isfinite(val.imag)):
                raise ConfigurationError(f"transform not finite at z={zz}")
            rhs[i] = val
        shifted = zc[:, None, None] * eye[None, :, :] - arr[None, :, :]
        out[lo : lo + chunk] = np.linalg.solve(shifted, rhs[:, :, None])[:, :, 0]
    return out


def laplace_reconstruct(a, f_transform: Callable, cfg: CauchyConfig) -> LaplaceReconstruction:
    """Reconstruct the transformed solution at the requested times by
    trapezoidal quadrature of the inverse-Laplace contour integral,
    truncated symmetrically at ``|y| <= y_max``.

    ``f_transform`` maps a contour point ``z`` to the transformed source
    vector.  The contour must lie strictly right of the spectrum.
    """
    arr = as_square_matrix(a)
    abscissa = float(np.max(np.linalg.eigvals(arr).real))
    if cfg.gamma <= abscissa:
        raise ConfigurationError(
            f"contour Re z = {cfg.gamma} does not clear the spectral abscissa {abscissa:.6g}"
        )
    y = np.linspace(-cfg.y_max, cfg.y_max, cfg.y_count)
    g = _contour_values(arr, f_transform, cfg.gamma, y)
    values = np.empty((len(cfg.t_eval), arr.shape[0]), dtype=complex)
    z = cfg.gamma + 1j * y
    for i, t in enumerate(cfg.t_eval):
        values[i] = np.trapezoid(np.exp(z * t)[:, None] * g, y, axis=0) / (2.0 * math.pi)
    return LaplaceReconstruction(
        t_eval=cfg.t_eval,
        values=values,
        y_max=cfg.y_max,
        y_count=cfg.y_count,
        step=2.0 * cfg.y_max / (cfg.y_count - 1),
    )


def reference_solution(a, f: Callable, t_eval: Sequence[float]) -> np.ndarray:
    """Duhamel convolution ``int_0^t exp(A (t - s)) f(s) ds`` by adaptive
    quadrature (relative accuracy 1e-9, well inside the 1e-6 contract)."""
    arr = as_square_matrix(a)
    n = arr.shape[0]
    out = np.zeros((len(t_eval), n), dtype=complex)
    for i, t in enumerate(t_eval):
        if t == 0.0:
            continue

        def integrand(s):
            v = expm(arr * (t - s)) @ np.atleast_1d(np.asarray(f(s), dtype=complex))
            return np.concatenate([v.real, v.imag])

        stacked, _ = quad_vec(integrand, 0.0, t, epsabs=1e-12, epsrel=1e-9)
        out[i] = stacked[:n] + 1j * stacked[n:]
    return out


@dataclass(frozen=True)
class SourceTerm:
    """Forcing term given in the time domain and, when available, in the
    transform domain (used on the contour)."""

    name: str
    time: Callable
    transform: Optional[Callable] = None


def numeric_laplace_transform(f: Callable, z: complex, t_upper: float) -> np.ndarray:
    """One-sided transform by adaptive quadrature on ``[0, t_upper]``."""
    z = complex(z)

    def integrand(t):
        v = np.atleast_1d(np.asarray(f(t), dtype=complex)) * np.exp(-z * t)
        return np.concatenate([v.real, v.imag])

    stacked, _ = quad_vec(integrand, 0.0, t_upper, epsabs=1e-13, epsrel=1e-10)
    n = len(stacked) // 2
    return stacked[:n] + 1j * stacked[n:]


def builtin_source(name: str, n: int, amplitude: float = 1.0, rate: float = 1.0,
                   center: float = 2.0, width: float = 0.5) -> SourceTerm:
    """Built-in forcing terms: "constant", "exp-decay" and "gaussian"."""
    c = np.full(n, complex(amplitude))
    if name == "constant":
        return SourceTerm("constant", lambda t: c, lambda z: c / complex(z))
    if name == "exp-decay":
        return SourceTerm(
            "exp-decay",
            lambda t: c * math.exp(-rate * t),
            lambda z: c / (complex(z) + rate),
        )
    if name == "gaussian":
        # int_0^inf e^{-zt} e^{-(t-c0)^2/(2w^2)} dt collapses to a single
        # Faddeeva evaluation; the exponentials cancel to exp(-c0^2/(2w^2))
        w, c0 = width, center

        def transform(z):
            u = (complex(z) * w * w - c0) / (w * math.sqrt(2.0))
            return c * (w * math.sqrt(math.pi / 2.0) * math.exp(-(c0 * c0) / (2 * w * w)) * wofz(1j * u))

        return SourceTerm(
            "gaussian",
            lambda t: c * math.exp(-((t - c0) ** 2) / (2.0 * w * w)),
            transform,
        )
    raise ValueError(f"unknown source {name!r}; expected constant, exp-decay or gaussian")


@dataclass(frozen=True)
class EnvelopeComparison:
    """Three integrand curves along ``z = gamma + i y`` plus optional
    per-time solution tables.

    The half-plane envelope is constant in ``y``; the distance envelope
    decays toward zero as ``|y|`` grows.  When constants were auto filled
    they are raised, if necessary, to the sampled field maxima so the drawn
    envelopes majorize the displayed samples (they remain valid lower
    bounds of the true constants)."""

    gamma: float
    alpha: float
    k_old: Optional[float]
    k_new: Optional[float]
    y: np.ndarray
    true_norm: np.ndarray
    old_envelope: Optional[np.ndarray]
    new_envelope: Optional[np.ndarray]
    autofilled: bool
    unavailable_reason: Optional[str]
    violations_old: tuple[int, ...]
    violations_new: tuple[int, ...]
    denominator_mode: str
    t_eval: tuple[float, ...] = ()
    reconstructed: Optional[np.ndarray] = None
    reference: Optional[np.ndarray] = None


def envelope_comparison(a, cfg: CauchyConfig, source: SourceTerm | None = None,
                        search_cfg: SearchConfig | None = None) -> EnvelopeComparison:
    """Tabulate the true resolvent norm along the contour against the
    constant-in-y envelope ``K_old / (gamma - alpha)`` and the decaying
    envelope ``K_new * max 1/|z - lam|`` (full-spectrum denominator).

    When the ratio functional diverges (defective axis spectrum) the new
    envelope is reported unavailable rather than guessed.  If ``source`` is
    given and ``cfg.t_eval`` is nonempty, reconstructed and reference
    solution tables are attached.
    """
    arr = as_square_matrix(a)
    report = spectrum(arr)
    abscissa = report.abscissa
    alpha = cfg.alpha if cfg.alpha is not None else abscissa + 1e-2
    if cfg.gamma <= alpha:
        raise ConfigurationError(
            f"gamma={cfg.gamma} must exceed alpha={alpha:.6g} (abscissa {abscissa:.6g})"
        )
    autofilled = cfg.k_old is None or cfg.k_new is None

    y = np.linspace(-cfg.y_max, cfg.y_max, cfg.y_count)
    true_norm = np.array([resolvent_norm(arr, complex(cfg.gamma, yy)) for yy in y])
    dmin = np.array([
        min(abs(complex(cfg.gamma, yy) - lam) for lam in report.values()) for yy in y
    ])

    unavailable = None
    k_old = cfg.k_old
    if k_old is None:
        shifted = arr - alpha * np.eye(arr.shape[0], dtype=complex)
        res = kreiss_constant_continuous(shifted, search_cfg)
        k_old = None if res.diverged else res.value
        if k_old is not None:
            k_old = max(k_old, float(np.max((cfg.gamma - alpha) * true_norm)))
    k_new = cfg.k_new
    if k_new is None:
        res = cal_k_continuous(arr, search_cfg)
        if res.diverged or math.isinf(res.value):
            unavailable = "ratio functional diverged (defective axis spectrum)"
        else:
            k_new = max(res.value, float(np.max(true_norm * dmin)))

    old_env = None if k_old is None else np.full_like(true_norm, k_old / (cfg.gamma - alpha))
    new_env = None if k_new is None else k_new / dmin

    def violations(env):
        if env is None:
            return ()
        return tuple(int(i) for i in np.nonzero(true_norm > env * (1.0 + 1e-8))[0])

    reconstructed = None
    reference = None
    if source is not None and cfg.t_eval:
        transform = source.transform
        if transform is None:
            t_upper = max(cfg.t_eval) + 50.0
            transform = lambda z: numeric_laplace_transform(source.time, z, t_upper)
        reconstructed = laplace_reconstruct(arr, transform, cfg).values
        if source.time is not None:
            reference = reference_solution(arr, source.time, cfg.t_eval)

    return EnvelopeComparison(
        gamma=cfg.gamma,
        alpha=float(alpha),
        k_old=k_old,
        k_new=k_new,
        y=y,
        true_norm=true_norm,
        old_envelope=old_env,
        new_envelope=new_env,
        autofilled=autofilled,
        unavailable_reason=unavailable,
        violations_old=violations(old_env),
        violations_new=violations(new_env),
        denominator_mode="full-spectrum",
        t_eval=cfg.t_eval,
        reconstructed=reconstructed,
        reference=reference,
    )

"""Stability functionals via deterministic supremum search.

Four scalar fields are maximized: the semigroup norm over time, power
norms over exponents, the half-plane Kreiss field ``Re(z) * ||R(z)||`` and
the resolvent-to-distance ratio (continuous and discrete variants).

Reported suprema are lower bounds obtained from finite sampling: a coarse
grid, far-field probes, geometric approach sequences anchored at the
spectrum, and local pattern refinement.  Each result carries its
refinement trace so convergence is auditable.  Divergence is declared only
with evidence: either the field crosses the divergence threshold along a
monotonically increasing approach sequence, or (for the time/power sweeps)
the tail keeps growing where theory says boundedness has failed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import SingularPointError
from .linalg import as_square_matrix, expm, spectral_norm
from .resolvent import ratio_continuous, ratio_discrete, resolvent_norm
from .spectra import boundary_excluded_spectrum, spectrum

#: geometric approach offsets used for spectrum-anchored probes (1e-1 .. ~3e-7)
DELTA_SEQ = tuple(10.0 ** (-(1.0 + j / 2.0)) for j in range(12))

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the supremum search.

    ``t_max``, ``re_cap`` and ``im_cap`` default to matrix-dependent values
    (``50 / (1 + |abscissa|)`` capped at 1e3, and ``10 * (1 + ||M||)``).
    """

    coarse: int = 24
    refine_iters: int = 60
    divergence_threshold: float = 1e6
    t_max: float | None = None
    nu_max: int = 10_000
    re_cap: float | None = None
    im_cap: float | None = None
    seed_spectrum: bool = True

    def __post_init__(self):
        if self.coarse < 2:
            raise ValueError("coarse resolution must be at least 2")
        if self.refine_iters < 1:
            raise ValueError("refine_iters must be positive")
        if self.divergence_threshold <= 1.0:
            raise ValueError("divergence threshold must exceed 1")
        if self.t_max is not None and self.t_max <= 0:
            raise ValueError("t_max must be positive")
        if self.nu_max < 1:
            raise ValueError("nu_max must be positive")
        if self.re_cap is not None and self.re_cap <= 0:
            raise ValueError("re_cap must be positive")
        if self.im_cap is not None and self.im_cap <= 0:
            raise ValueError("im_cap must be positive")


@dataclass(frozen=True)
class SupSearchResult:
    """Outcome of a supremum search.

    ``value`` is a lower bound on the true supremum (``inf`` marks the
    defined-infinite case).  When ``diverged`` is true, ``value`` is the
    largest observed magnitude and ``growth_certificate`` holds the
    monotone evidence as ``(location, value)`` pairs.
    """

    value: float
    argmax: object
    diverged: bool
    trace: tuple[tuple[int, float], ...]
    budget_used: int
    growth_certificate: Optional[tuple[tuple[object, float], ...]] = None

    @property
    def is_finite(self) -> bool:
        return (not self.diverged) and math.isfinite(self.value)


class _Tracker:
    """Feeds candidate points to an objective, keeping the running max."""

    def __init__(self, objective: Callable[[complex], float]):
        self._f = objective
        self.best = -math.inf
        self.argmax: Optional[complex] = None
        self.evals = 0
        self.trace: list[tuple[int, float]] = []

    def probe(self, z: complex) -> Optional[float]:
        try:
            v = self._f(z)
        except SingularPointError:
            return None
        self.evals += 1
        if v > self.best:
            self.best = v
            self.argmax = z
        return v

    def snapshot(self, level: int) -> None:
        self.trace.append((level, self.best))


def _increasing_tail(samples, threshold):
    """Longest strictly increasing suffix, kept only when it has at least
    three points and ends beyond the threshold."""
    if not samples or samples[-1][1] <= threshold:
        return None
    i = len(samples) - 1
    while i > 0 and samples[i - 1][1] < samples[i][1]:
        i -= 1
    tail = samples[i:]
    if len(tail) >= 3:
        return tuple(tail)
    return None


def _run_sequences(tracker, sequences, threshold):
    for seq in sequences:
        samples = []
        for z in seq:
            v = tracker.probe(z)
            if v is None:
                break
            samples.append((z, v))
            if v > 10.0 * threshold:
                break
        cert = _increasing_tail(samples, threshold)
        if cert is not None:
            return cert
    return None


def _confirm_divergence(tracker, eigs, threshold):
    # the best value crossed the threshold outside a seeded sequence; probe
    # geometrically toward the nearest eigenvalue to collect evidence
    z0 = tracker.argmax
    if z0 is None or len(eigs) == 0:
        return None
    lam = min((complex(l) for l in eigs), key=lambda l: abs(z0 - l))
    offset = z0 - lam
    if offset == 0:
        return None
    samples = []
    for j in range(8):
        v = tracker.probe(lam + offset * 10.0 ** (-j / 2.0))
        if v is None:
            break
        samples.append((lam + offset * 10.0 ** (-j / 2.0), v))
    return _increasing_tail(samples, threshold)


def _pattern_refine(tracker, z0, f0, to_uv, from_uv, iters, u_lo, u_hi, hv0):
    u, v = to_uv(z0)
    fval = f0
    hu, hv = 0.7, hv0
    start_level = len(tracker.trace)
    for it in range(iters):
        best_move = None
        best_val = fval
        for du, dv in ((hu, 0.0), (-hu, 0.0), (0.0, hv), (0.0, -hv)):
            uu = min(max(u + du, u_lo), u_hi)
            val = tracker.probe(from_uv(uu, v + dv))
            if val is not None and val > best_val:
                best_val = val
                best_move = (uu, v + dv)
        if best_move is None:
            hu *= 0.5
            hv *= 0.5
        else:
            u, v = best_move
            fval = best_val
        tracker.snapshot(start_level + it)


def _field_sup(arr, eigs, objective, cfg, geometry) -> SupSearchResult:
    scale = 1.0 + spectral_norm(arr)
    tracker = _Tracker(objective)
    threshold = cfg.divergence_threshold

    if geometry == "halfplane":
        far = [complex(scale * 10.0**j, 0.0) for j in range(9)]
        r_cap = cfg.re_cap if cfg.re_cap is not None else 10.0 * scale
        y_cap = cfg.im_cap if cfg.im_cap is not None else 10.0 * scale
        xs = np.geomspace(1e-6 * scale, r_cap, cfg.coarse)
        ys = np.linspace(-y_cap, y_cap, 2 * cfg.coarse + 1)
        grid = [complex(x, y) for x in xs for y in ys]
        sequences = []
        if cfg.seed_spectrum:
            for lam in eigs:
                lam = complex(lam)
                sequences.append([complex(d * scale, lam.imag) for d in DELTA_SEQ])
                if lam.real > 0.0:
                    sequences.append([lam + d * scale for d in DELTA_SEQ])

        def to_uv(z):
            return math.log(z.real), z.imag

        def from_uv(u, v):
            return complex(math.exp(u), v)

        u_lo, u_hi = math.log(1e-12 * scale), math.log(1e9 * scale)
        hv0 = 0.25 * scale
    elif geometry == "disk":
        far = [complex(1.0 + 10.0**j, 0.0) for j in range(9)]
        r_cap = cfg.re_cap if cfg.re_cap is not None else 10.0 * scale
        rads = 1.0 + np.geomspace(1e-6, max(r_cap - 1.0, 1.0), cfg.coarse)
        angs = np.linspace(0.0, 2.0 * math.pi, 2 * cfg.coarse, endpoint=False)
        grid = [cmath.rect(r, a) for r in rads for a in angs]
        sequences = []
        if cfg.seed_spectrum:
            for lam in eigs:
                lam = complex(lam)
                ang = cmath.phase(lam) if lam != 0 else 0.0
                sequences.append([cmath.rect(1.0 + d, ang) for d in DELTA_SEQ])
                if abs(lam) > 1.0:
                    sequences.append([lam * (1.0 + d) for d in DELTA_SEQ])

        def to_uv(z):
            return math.log(abs(z) - 1.0), cmath.phase(z)

        def from_uv(u, v):
            return cmath.rect(1.0 + math.exp(u), v)

        u_lo, u_hi = math.log(1e-12), math.log(1e9)
        hv0 = 0.3
    else:  # pragma: no cover
        raise ValueError(f"unknown geometry {geometry!r}")

    for z in far:
        tracker.probe(z)
    for z in grid:
        tracker.probe(z)
    certificate = _run_sequences(tracker, sequences, threshold)
    tracker.snapshot(0)
    if certificate is None and tracker.best > threshold:
        certificate = _confirm_divergence(tracker, eigs, threshold)
    if certificate is None and tracker.argmax is not None:
        _pattern_refine(
            tracker, tracker.argmax, tracker.best, to_uv, from_uv,
            cfg.refine_iters, u_lo, u_hi, hv0,
        )
        if tracker.best > threshold:
            certificate = _confirm_divergence(tracker, eigs, threshold)
    return SupSearchResult(
        value=tracker.best,
        argmax=tracker.argmax,
        diverged=certificate is not None,
        trace=tuple(tracker.trace),
        budget_used=tracker.evals,
        growth_certificate=certificate,
    )


def _thin(pairs: Sequence, limit: int = 12) -> tuple:
    if len(pairs) <= limit:
        return tuple(pairs)
    idx = np.unique(np.linspace(0, len(pairs) - 1, limit).astype(int))
    return tuple(pairs[i] for i in idx)


def sup_semigroup_norm(m, cfg: SearchConfig | None = None) -> SupSearchResult:
    """Estimate ``sup_{t >= 0} ||exp(M t)||``.

    Coarse time grid on ``[0, t_max]`` plus golden-section refinement around
    the best cell.  Divergence is reported when the norm at ``t_max``
    exceeds the threshold or grows monotonically over the last decade of
    the grid (by at least 1%, to ignore rounding jitter).
    """
    arr = as_square_matrix(m)
    cfg = cfg or SearchConfig()
    abscissa = float(np.max(np.linalg.eigvals(arr).real))
    t_max = cfg.t_max if cfg.t_max is not None else min(50.0 / (1.0 + abs(abscissa)), 1e3)
    count = 8 * cfg.coarse + 1
    ts = np.linspace(0.0, t_max, count)

    def f(t):
        return float(np.linalg.norm(expm(arr * t), 2))

    vals = np.array([f(t) for t in ts])
    evals = count
    i_best = int(np.argmax(vals))
    best, arg = float(vals[i_best]), float(ts[i_best])
    trace = [(0, best)]

    tail = vals[ts >= t_max / 10.0]
    tail_t = ts[ts >= t_max / 10.0]
    certificate = None
    if vals[-1] > cfg.divergence_threshold:
        certificate = _increasing_tail(list(zip(tail_t.tolist(), tail.tolist())), cfg.divergence_threshold)
        if certificate is None:
            certificate = tuple(zip(tail_t.tolist()[-3:], tail.tolist()[-3:]))
    elif len(tail) >= 3 and np.all(np.diff(tail) > 0.0) and tail[-1] >= 1.01 * tail[0]:
        certificate = _thin(list(zip(tail_t.tolist(), tail.tolist())))
    if certificate is not None:
        return SupSearchResult(best, arg, True, tuple(trace), evals, certificate)

    lo = float(ts[max(i_best - 1, 0)])
    hi = float(ts[min(i_best + 1, count - 1)])
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    evals += 2
    for it in range(cfg.refine_iters):
        for point, fp in ((c, fc), (d, fd)):
            if fp > best:
                best, arg = fp, point
        trace.append((it + 1, best))
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        evals += 1
    return SupSearchResult(best, arg, False, tuple(trace), evals, None)


def sup_power_norm(m, cfg: SearchConfig | None = None) -> SupSearchResult:
    """Estimate ``max_nu ||M^nu||`` over ``nu in {0..nu_max}``.

    Divergence is reported when a power norm crosses the threshold, or when
    the tail keeps increasing while the spectral radius is at least
    ``1 - 1e-8 (1 + ||M||)`` (powers cannot settle in that case).
    """
    arr = as_square_matrix(m)
    cfg = cfg or SearchConfig()
    n = arr.shape[0]
    norm = spectral_norm(arr)
    radius = float(np.max(np.abs(np.linalg.eigvals(arr))))
    threshold = cfg.divergence_threshold

    values = [1.0]
    p = np.eye(n, dtype=complex)
    best, arg = 1.0, 0
    crossed = False
    for nu in range(1, cfg.nu_max + 1):
        p = p @ arr
        v = float(np.linalg.norm(p, 2))
        values.append(v)
        if v > best:
            best, arg = v, nu
        if v > threshold or v > 1e150:
            crossed = True
            break
        if v < 1e-14:
            break

    trace = []
    level, nu_mark = 0, 1
    while nu_mark < len(values):
        trace.append((level, float(np.max(values[: nu_mark + 1]))))
        level += 1
        nu_mark *= 2
    trace.append((level, best))

    geo_idx = sorted({int(round(1.3**k)) for k in range(60)} & set(range(len(values))))
    geo_samples = [(i, values[i]) for i in geo_idx]

    certificate = None
    if crossed:
        certificate = _increasing_tail(geo_samples, threshold) or tuple(geo_samples[-3:])
    elif radius >= 1.0 - 1e-8 * (1.0 + norm):
        tail = geo_samples[len(geo_samples) // 2 :]
        if len(tail) >= 3 and all(b > a for (_, a), (_, b) in zip(tail, tail[1:])):
            certificate = _thin(tail)
    return SupSearchResult(
        value=best,
        argmax=arg,
        diverged=certificate is not None,
        trace=tuple(trace),
        budget_used=len(values) - 1,
        growth_certificate=certificate,
    )


def kreiss_constant_continuous(m, cfg: SearchConfig | None = None) -> SupSearchResult:
    """Estimate ``sup_{Re z > 0} Re(z) * ||(zI - M)^{-1}||``."""
    arr = as_square_matrix(m)
    cfg = cfg or SearchConfig()
    eigs = np.linalg.eigvals(arr)

    def f(z):
        return z.real * resolvent_norm(arr, z)

    return _field_sup(arr, eigs, f, cfg, "halfplane")


def kreiss_constant_discrete(m, cfg: SearchConfig | None = None) -> SupSearchResult:
    """Estimate ``sup_{|z| > 1} (|z| - 1) * ||(zI - M)^{-1}||``."""
    arr = as_square_matrix(m)
    cfg = cfg or SearchConfig()
    eigs = np.linalg.eigvals(arr)

    def f(z):
        return (abs(z) - 1.0) * resolvent_norm(arr, z)

    return _field_sup(arr, eigs, f, cfg, "disk")


def cal_k_continuous(m, cfg: SearchConfig | None = None) -> SupSearchResult:
    """Estimate the half-plane ratio supremum (the functional ``calK``).

    When the whole spectrum lies in the open right half-plane the
    functional is infinite by definition and the ``inf`` marker is returned
    immediately, without a search.
    """
    arr = as_square_matrix(m)
    cfg = cfg or SearchConfig()
    report = spectrum(arr)
    excluded = boundary_excluded_spectrum(report)
    if not excluded:
        return SupSearchResult(math.inf, None, False, (), 0, None)
    eigs = np.array(report.values())

    def f(z):
        return ratio_continuous(arr, z, excluded).ratio

    return _field_sup(arr, eigs, f, cfg, "halfplane")


def cal_k_discrete(m, cfg: SearchConfig | None = None) -> SupSearchResult:
    """Estimate the exterior-of-disk ratio supremum (discrete ``calK``)."""
    arr = as_square_matrix(m)
    cfg = cfg or SearchConfig()
    eigs = np.linalg.eigvals(arr)

    def f(z):
        return ratio_discrete(arr, z, eigs).ratio

    return _field_sup(arr, eigs, f, cfg, "disk")

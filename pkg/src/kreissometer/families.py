"""Matrix-family generation and family-level uniformity reports.

Families instantiate the quantifier domain of the uniformity theorems at
desk scale.  Uniformity of an infinite family is undecidable from finitely
many members, so verdicts are three-valued ("uniform", "non-uniform",
"inconclusive") and never overclaim: "non-uniform" requires a diverged
member, "inconclusive" flags monotone growth across a parameterized family
without a divergence certificate.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .certificates import build_condition3, build_condition4
from .constants import (
    SearchConfig,
    SupSearchResult,
    cal_k_continuous,
    cal_k_discrete,
    kreiss_constant_continuous,
    kreiss_constant_discrete,
    sup_power_norm,
    sup_semigroup_norm,
)
from .errors import BoundaryError, KreissError
from .linalg import as_square_matrix, direct_sum, jordan_block, spectral_norm
from .spectra import classify_power_bounded, classify_quasi_stable

FAMILY_KINDS = (
    "normal-stable",
    "random-shifted-stable",
    "defective-axis",
    "near-defective",
    "contraction",
    "jordan-parade",
    "symbol-sampled",
)

#: member-to-member growth factor beyond which a monotone family is flagged
GROWTH_FACTOR = 10.0


@dataclass(frozen=True)
class FamilySpec:
    """Deterministic recipe for a matrix family: same spec and seed, same
    matrices, bit for bit."""

    kind: str
    n: int
    count: int
    seed: int = 0
    shift_margin: float = 0.5
    delta: float = 0.1
    block_size: int = 2
    theta: Optional[float] = None
    symbol: Optional[str] = None
    xi_min: float = -math.pi
    xi_max: float = math.pi
    table_path: Optional[str] = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}; expected one of {FAMILY_KINDS}")
        if self.n < 1:
            raise ValueError("dimension must be positive")
        if self.count < 1:
            raise ValueError("member count must be positive")
        if self.kind in ("defective-axis", "near-defective") and self.n < 2:
            raise ValueError(f"{self.kind} families need dimension >= 2")
        if self.shift_margin <= 0:
            raise ValueError("shift_margin must be positive")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.block_size < 2:
            raise ValueError("block_size must be at least 2")
        if self.kind == "symbol-sampled" and self.symbol is None:
            raise ValueError("symbol-sampled families need a symbol identifier")


def _random_unitary(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    # fix the phase convention so the draw is unambiguous
    ph = np.diag(r).copy()
    ph = ph / np.abs(ph)
    return q * ph[None, :]


def _stable_normal(rng, n):
    re = -rng.uniform(0.1, 3.0, size=n)
    axis = rng.random(n) < 0.3
    re[axis] = 0.0
    lams = re + 1j * rng.uniform(-3.0, 3.0, size=n)
    q = _random_unitary(rng, n)
    return q @ np.diag(lams) @ q.conj().T


def _normal_stable_family(rng, spec):
    return [_stable_normal(rng, spec.n) for _ in range(spec.count)]


def _random_shifted_family(rng, spec):
    out = []
    for _ in range(spec.count):
        g = rng.standard_normal((spec.n, spec.n)) + 1j * rng.standard_normal((spec.n, spec.n))
        abscissa = float(np.max(np.linalg.eigvals(g).real))
        out.append(g - (abscissa + spec.shift_margin) * np.eye(spec.n))
    return out


def _stable_padding(rng, n):
    if n == 0:
        return None
    return np.diag(-rng.uniform(0.5, 2.0, size=n) + 1j * rng.uniform(-2.0, 2.0, size=n))


def _defective_axis_family(rng, spec):
    out = []
    k = min(spec.block_size, spec.n)
    for _ in range(spec.count):
        theta = spec.theta if spec.theta is not None else float(rng.uniform(-2.0, 2.0))
        blocks = [jordan_block(1j * theta, k)]
        pad = _stable_padding(rng, spec.n - k)
        if pad is not None:
            blocks.append(pad)
        out.append(direct_sum(blocks))
    return out


def _near_defective_family(rng, spec):
    # member m sits at distance delta / (m + 1) from the axis: the family
    # marches toward the defective-axis limit as the index grows
    out = []
    k = min(spec.block_size, spec.n)
    theta = spec.theta if spec.theta is not None else float(rng.uniform(-2.0, 2.0))
    for m in range(spec.count):
        lam = 1j * theta - spec.delta / (m + 1)
        blocks = [jordan_block(lam, k)]
        pad = _stable_padding(rng, spec.n - k)
        if pad is not None:
            blocks.append(pad)
        out.append(direct_sum(blocks))
    return out


def _contraction_family(rng, spec):
    out = []
    for _ in range(spec.count):
        g = rng.standard_normal((spec.n, spec.n)) + 1j * rng.standard_normal((spec.n, spec.n))
        target = float(rng.uniform(0.3, 1.0))
        out.append(g * (target / max(spectral_norm(g), 1e-300)))
    return out


def _jordan_parade_family(rng, spec):
    out = []
    for _ in range(spec.count):
        blocks = []
        remaining = spec.n
        while remaining > 0:
            k = int(rng.integers(1, min(3, remaining) + 1))
            lam = -rng.uniform(0.2, 2.0) + 1j * rng.uniform(-2.0, 2.0)
            blocks.append(jordan_block(lam, k))
            remaining -= k
        out.append(direct_sum(blocks))
    return out


def _symbol_sampled_family(rng, spec):
    sym = resolve_symbol(spec.symbol, spec.n, table_path=spec.table_path)
    grid = np.linspace(spec.xi_min, spec.xi_max, spec.count)
    samples = sample_symbol(sym, [float(x) for x in grid])
    bad = [s for s in samples if s.error is not None]
    if bad:
        raise KreissError(f"symbol evaluation failed at xi={bad[0].xi}: {bad[0].error}")
    return [s.matrix for s in samples]


_BUILDERS = {
    "normal-stable": _normal_stable_family,
    "random-shifted-stable": _random_shifted_family,
    "defective-axis": _defective_axis_family,
    "near-defective": _near_defective_family,
    "contraction": _contraction_family,
    "jordan-parade": _jordan_parade_family,
    "symbol-sampled": _symbol_sampled_family,
}


def generate_family(spec: FamilySpec) -> list[np.ndarray]:
    """Generate the family; a pure function of ``(spec, seed)``."""
    rng = np.random.default_rng(spec.seed)
    return [as_square_matrix(m) for m in _BUILDERS[spec.kind](rng, spec)]


@dataclass(frozen=True)
class SymbolSample:
    xi: object
    matrix: Optional[np.ndarray]
    error: Optional[str] = None


def sample_symbol(symbol: Callable, xi_grid: Sequence) -> list[SymbolSample]:
    """Evaluate a Fourier-symbol callback on a grid, recording per-point
    failures in-band."""
    out = []
    for xi in xi_grid:
        try:
            out.append(SymbolSample(xi, as_square_matrix(symbol(xi), name=f"symbol({xi})")))
        except Exception as exc:  # noqa: BLE001 - recorded, not raised
            out.append(SymbolSample(xi, None, str(exc)))
    return out


def _rotation_generator(n):
    # real antisymmetric tridiagonal generator; spectrum of xi*K is purely
    # imaginary, so members are normal with axis spectrum
    k = np.zeros((n, n), dtype=complex)
    for i in range(n - 1):
        k[i, i + 1] = -1.0
        k[i + 1, i] = 1.0
    return k


def resolve_symbol(symbol_id: str, n: int, table_path: str | None = None) -> Callable:
    """Look up a built-in symbol by identifier.

    Built-ins: "constant" (fixed stable diagonal), "transport"
    (``i xi diag(1..n)``), "rotation" (``xi K`` with ``K`` antisymmetric),
    "defective-transport" (an n-by-n Jordan block at ``i xi``) and
    "user-table" (nearest-sample lookup in a symbol table file).
    """
    if symbol_id == "constant":
        fixed = -np.eye(n, dtype=complex)
        return lambda xi: fixed
    if symbol_id == "transport":
        speeds = np.arange(1, n + 1, dtype=float)
        return lambda xi: np.diag(1j * float(xi) * speeds)
    if symbol_id == "rotation":
        gen = _rotation_generator(n)
        return lambda xi: float(xi) * gen
    if symbol_id == "defective-transport":
        return lambda xi: jordan_block(1j * float(xi), n)
    if symbol_id == "user-table":
        if table_path is None:
            raise ValueError("user-table symbol needs a table file path")
        from .mmio import read_symbol_table

        with open(table_path, "r", encoding="ascii") as fh:
            table = read_symbol_table(fh)
        if not table:
            raise ValueError(f"symbol table {table_path!r} is empty")

        def lookup(xi):
            xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
            best = min(table, key=lambda row: np.linalg.norm(np.atleast_1d(row[0]) - xi_arr))
            return best[1]

        return lookup
    raise ValueError(f"unknown symbol identifier {symbol_id!r}")


@dataclass(frozen=True)
class MemberRecord:
    """Per-member functional values; ``error`` marks an analysis that blew
    up (the sweep never aborts on member failures)."""

    index: int
    k1: Optional[SupSearchResult] = None
    k2: Optional[SupSearchResult] = None
    cal_k: Optional[SupSearchResult] = None
    k31: Optional[float] = None
    k32: Optional[float] = None
    k4: Optional[float] = None
    cond4_reason: Optional[str] = None
    stable_verdict: Optional[bool] = None
    witness_reason: Optional[str] = None
    error: Optional[str] = None


@dataclass(frozen=True)
class FamilyReport:
    mode: str
    members: tuple[MemberRecord, ...]
    sup_k1: float
    sup_k2: float
    sup_cal_k: float
    verdict: str
    witness_index: Optional[int]
    failure_count: int
    growth_trace: tuple[tuple[int, float], ...] = field(default_factory=tuple)


def _effective(result: Optional[SupSearchResult]) -> float:
    if result is None:
        return -math.inf
    if result.diverged or math.isinf(result.value):
        return math.inf
    return result.value


def _analyze_member(idx, matrix, mode, cfg) -> MemberRecord:
    try:
        if mode == "continuous":
            k1 = sup_semigroup_norm(matrix, cfg)
            k2 = kreiss_constant_continuous(matrix, cfg)
            ck = cal_k_continuous(matrix, cfg)
            verdict = classify_quasi_stable(matrix)
        else:
            k1 = sup_power_norm(matrix, cfg)
            k2 = kreiss_constant_discrete(matrix, cfg)
            ck = cal_k_discrete(matrix, cfg)
            verdict = classify_power_bounded(matrix)
        cert3 = build_condition3(matrix, mode)
        k4 = None
        cond4_reason = None
        try:
            cert4 = build_condition4(matrix, mode)
            k4 = cert4.k4
        except BoundaryError as exc:
            cond4_reason = str(exc)
        return MemberRecord(
            index=idx,
            k1=k1,
            k2=k2,
            cal_k=ck,
            k31=cert3.k31,
            k32=cert3.k32,
            k4=k4,
            cond4_reason=cond4_reason,
            stable_verdict=verdict.quasi_stable,
            witness_reason=verdict.witness.reason if verdict.witness else None,
        )
    except KreissError as exc:
        return MemberRecord(index=idx, error=str(exc))


def family_report(family: Sequence, mode: str = "continuous", cfg: SearchConfig | None = None) -> FamilyReport:
    """Run the functional and certificate pipeline over every member and
    aggregate a three-valued uniformity verdict.

    "non-uniform" needs a diverged member (with that member as witness);
    "uniform" needs every member finite with a satisfiable entry bound;
    monotone growth of the ratio supremum across the family (total factor
    >= 10) downgrades to "inconclusive" with the growth trace attached.
    Parallelism is capped by the KREISS_THREADS environment variable;
    records are always emitted in index order.
    """
    if mode not in ("continuous", "discrete"):
        raise ValueError("mode must be 'continuous' or 'discrete'")
    if len(family) == 0:
        raise ValueError("family must be nonempty")
    cfg = cfg or SearchConfig()
    matrices = [as_square_matrix(m, name=f"member {i}") for i, m in enumerate(family)]
    workers = int(os.environ.get("KREISS_THREADS", "1"))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(
                lambda im: _analyze_member(im[0], im[1], mode, cfg), enumerate(matrices)
            ))
    else:
        records = [_analyze_member(i, m, mode, cfg) for i, m in enumerate(matrices)]

    ok = [r for r in records if r.error is None]
    failure_count = len(records) - len(ok)
    sup_k1 = max((_effective(r.k1) for r in ok), default=-math.inf)
    sup_k2 = max((_effective(r.k2) for r in ok), default=-math.inf)
    sup_cal_k = max((_effective(r.cal_k) for r in ok), default=-math.inf)

    verdict = "inconclusive"
    witness_index = None
    growth_trace: tuple[tuple[int, float], ...] = ()
    diverged = [
        r.index
        for r in ok
        if math.isinf(_effective(r.cal_k)) or math.isinf(_effective(r.k1)) or math.isinf(_effective(r.k2))
    ]
    if diverged:
        verdict = "non-uniform"
        witness_index = diverged[0]
    elif ok:
        vals = [(r.index, _effective(r.cal_k)) for r in ok if r.cal_k is not None]
        monotone = (
            len(vals) >= 3
            and all(b > a for (_, a), (_, b) in zip(vals, vals[1:]))
            and vals[-1][1] >= GROWTH_FACTOR * vals[0][1]
        )
        if monotone:
            verdict = "inconclusive"
            witness_index = vals[-1][0]
            growth_trace = tuple(vals)
        elif failure_count == 0 and all(
            r.k32 is not None and math.isfinite(r.k32) for r in ok
        ):
            verdict = "uniform"
    return FamilyReport(
        mode=mode,
        members=tuple(records),
        sup_k1=sup_k1,
        sup_k2=sup_k2,
        sup_cal_k=sup_cal_k,
        verdict=verdict,
        witness_index=witness_index,
        failure_count=failure_count,
        growth_trace=growth_trace,
    )

"""Shared matrix builders for the test suite (all deterministic)."""

from __future__ import annotations

import numpy as np

from kreissometer import direct_sum, jordan_block


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_unitary(gen: np.random.Generator, n: int) -> np.ndarray:
    g = gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph[None, :]


def random_normal_quasi_stable(gen: np.random.Generator, n: int, axis_fraction: float = 0.3) -> np.ndarray:
    """Unitary conjugation of a diagonal with Re(lam) <= 0 (some exactly 0)."""
    re = -gen.uniform(0.1, 3.0, size=n)
    re[gen.random(n) < axis_fraction] = 0.0
    lams = re + 1j * gen.uniform(-3.0, 3.0, size=n)
    q = random_unitary(gen, n)
    return q @ np.diag(lams) @ q.conj().T


def random_strictly_stable(gen: np.random.Generator, n: int, margin: float = 0.3) -> np.ndarray:
    g = gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))
    abscissa = float(np.max(np.linalg.eigvals(g).real))
    return g - (abscissa + margin) * np.eye(n)


def random_contraction(gen: np.random.Generator, n: int) -> np.ndarray:
    g = gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))
    return g * (gen.uniform(0.3, 1.0) / np.linalg.norm(g, 2))


def random_unit_upper_triangular(gen: np.random.Generator, n: int, span: float = 3.0) -> np.ndarray:
    a = np.eye(n, dtype=complex)
    iu = np.triu_indices(n, 1)
    a[iu] = gen.uniform(-span, span, size=len(iu[0])) + 1j * gen.uniform(-span, span, size=len(iu[0]))
    return a


def quasi_stable_zoo(seed: int = 2024, normals: int = 6) -> list[np.ndarray]:
    """Curated quasi-stable matrices: normal, defective-interior, shifted
    random, mixed, near-defective (strictly off the axis)."""
    gen = rng(seed)
    out = [random_normal_quasi_stable(gen, int(gen.integers(2, 7))) for _ in range(normals)]
    out.append(jordan_block(-1.0, 2))
    out.append(jordan_block(-1.0, 3))
    out.append(jordan_block(-1.0, 4))
    out.append(direct_sum([jordan_block(-1.0, 2), np.diag([1j, -2.0 + 0j])]))
    out.append(direct_sum([jordan_block(-0.5 + 2j, 3), np.diag([-1.0 + 0j])]))
    out.append(jordan_block(-0.05, 2))
    out.append(random_strictly_stable(gen, 5))
    out.append(np.diag([1j, -1j, -1.0 + 0j]))
    return out


def not_quasi_stable_zoo(seed: int = 77) -> list[np.ndarray]:
    """Defective-axis, right-half-plane and mixed counterexamples."""
    gen = rng(seed)
    out = [
        jordan_block(0.0, 2),
        jordan_block(1j, 2),
        jordan_block(-2j, 3),
        direct_sum([jordan_block(1j, 2), np.diag([-1.0 + 0j])]),
        np.diag([0.1 + 0j]),
        np.diag([1.0 + 2j, -1.0 + 0j]),
        random_strictly_stable(gen, 3) + 2.0 * np.eye(3),
    ]
    return out

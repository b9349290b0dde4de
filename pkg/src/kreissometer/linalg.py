"""Dense complex linear-algebra kernel.

Everything downstream operates on plain ``numpy`` arrays of complex128.
This module provides the validated primitives: spectral norm, (ordered)
Schur forms, the matrix exponential, Lyapunov/Stein solves and the
unit-upper-triangular inverse machinery with its explicit norm bound.

All operations are pure; returned arrays are fresh copies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .errors import (
    BoundaryError,
    DimensionError,
    FactorizationError,
    NotUnitTriangularError,
)

ORDERINGS = ("none", "descending-real-part", "descending-modulus")

#: relative tolerance for factorization reconstruction checks
RECON_TOL = 1e-10


def as_square_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and convert to a square complex128 array (fresh copy)."""
    arr = np.array(a, dtype=complex, order="C")
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    if arr.size == 0:
        raise DimensionError(f"{name} must be nonempty")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def spectral_norm(a) -> float:
    """Largest singular value (the matrix 2-norm)."""
    arr = as_square_matrix(a)
    return float(np.linalg.norm(arr, 2))


@dataclass(frozen=True)
class SchurForm:
    """Unitary Schur factorization ``q @ t @ q.conj().T == a``.

    ``t`` is upper triangular; ``ordering`` records how its diagonal is
    sorted ("none", "descending-real-part" or "descending-modulus", ties
    broken by ascending imaginary part).
    """

    q: np.ndarray
    t: np.ndarray
    ordering: str

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.diag(self.t).copy()

    def reconstruct(self) -> np.ndarray:
        return self.q @ self.t @ self.q.conj().T


def _swap_adjacent(q: np.ndarray, t: np.ndarray, i: int) -> None:
    # Unitary swap of the adjacent diagonal entries (i, i+1) of t via a
    # Givens-type rotation built from the eigenvector of the 2x2 block.
    a, b, c = t[i, i], t[i, i + 1], t[i + 1, i + 1]
    v = np.array([b, c - a], dtype=complex)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return
    v /= nv
    g = np.array([[v[0], -np.conj(v[1])], [v[1], np.conj(v[0])]])
    rows = slice(i, i + 2)
    t[rows, :] = g.conj().T @ t[rows, :]
    t[:, rows] = t[:, rows] @ g
    q[:, rows] = q[:, rows] @ g
    t[i + 1, i] = 0.0


def _order_schur(q: np.ndarray, t: np.ndarray, ordering: str, tol: float) -> None:
    n = t.shape[0]
    lams = np.diag(t).copy()
    if ordering == "descending-real-part":
        primary = lams.real
    else:
        primary = np.abs(lams)
    # quantize the primary key so near-equal values count as ties
    if tol > 0:
        quant = np.round(primary / tol)
    else:
        quant = primary
    order = sorted(range(n), key=lambda k: (-quant[k], lams[k].imag, k))
    # realize the permutation with adjacent swaps; track labels explicitly so
    # rounding in the swapped diagonal cannot derail the sort
    perm = list(range(n))
    for target, label in enumerate(order):
        pos = perm.index(label)
        while pos > target:
            _swap_adjacent(q, t, pos - 1)
            perm[pos - 1], perm[pos] = perm[pos], perm[pos - 1]
            pos -= 1


def schur(a, ordering: str = "none") -> SchurForm:
    """Complex Schur form with optional eigenvalue ordering.

    Parameters
    ----------
    a : array_like
        Square complex matrix.
    ordering : str
        "none", "descending-real-part" or "descending-modulus".  Ties (keys
        within ``1e-12 * ||a||``) are broken by ascending imaginary part.

    Raises
    ------
    FactorizationError
        if the QR iteration fails or the factors do not reconstruct ``a``.
    """
    arr = as_square_matrix(a)
    if ordering not in ORDERINGS:
        raise ValueError(f"unknown ordering {ordering!r}; expected one of {ORDERINGS}")
    try:
        t, q = sla.schur(arr, output="complex")
    except (sla.LinAlgError, np.linalg.LinAlgError) as exc:  # pragma: no cover
        raise FactorizationError(f"Schur iteration failed: {exc}") from exc
    t = np.ascontiguousarray(t, dtype=complex)
    q = np.ascontiguousarray(q, dtype=complex)
    norm_a = float(np.linalg.norm(arr, 2))
    if ordering != "none":
        _order_schur(q, t, ordering, 1e-12 * norm_a)
    # zero the strictly-lower part outright: the swaps only touch it by rounding
    t[np.tril_indices_from(t, -1)] = 0.0
    n = arr.shape[0]
    if np.linalg.norm(q @ q.conj().T - np.eye(n), 2) > 1e-10 * n:
        raise FactorizationError("Schur Q lost unitarity")
    recon_err = np.linalg.norm(q @ t @ q.conj().T - arr, 2)
    if recon_err > RECON_TOL * max(norm_a, 1e-300) and norm_a > 0:
        raise FactorizationError(
            f"Schur reconstruction error {recon_err:.3e} exceeds tolerance"
        )
    return SchurForm(q=q, t=t, ordering=ordering)


def expm(a) -> np.ndarray:
    """Matrix exponential (scaling-and-squaring via scipy)."""
    arr = as_square_matrix(a)
    out = sla.expm(arr)
    if not np.all(np.isfinite(out)):
        raise FactorizationError("matrix exponential overflowed (scaling failure)")
    return out


def _stability_margin(norm: float) -> float:
    # "strictly inside" preconditions are checked against this margin; the
    # underlying theory never addresses numerically borderline spectra
    return 1e-8 * (1.0 + norm)


def solve_lyapunov_continuous(m) -> np.ndarray:
    """Hermitian ``H`` with ``H M + M* H = -I``.

    Requires the spectral abscissa of ``M`` to be strictly negative
    (margin ``1e-8 * (1 + ||M||)``); otherwise no strict solution exists and
    :class:`BoundaryError` is raised.
    """
    arr = as_square_matrix(m)
    n = arr.shape[0]
    norm = float(np.linalg.norm(arr, 2))
    tol = _stability_margin(norm)
    abscissa = float(np.max(np.linalg.eigvals(arr).real))
    if abscissa >= -tol:
        raise BoundaryError(
            f"spectral abscissa {abscissa:.3e} is not strictly negative "
            f"(tolerance {tol:.3e}); no strict Lyapunov certificate"
        )
    h = sla.solve_continuous_lyapunov(arr.conj().T, -np.eye(n, dtype=complex))
    h = (h + h.conj().T) / 2.0
    resid = np.linalg.norm(h @ arr + arr.conj().T @ h + np.eye(n), 2)
    h_norm = np.linalg.norm(h, 2)
    if resid > 1e-8 * max(h_norm * norm, 1.0):
        raise FactorizationError(
            f"Lyapunov residual {resid:.3e} too large for ||H||={h_norm:.3e}"
        )
    return h


def solve_stein_discrete(m) -> np.ndarray:
    """Hermitian ``H`` with ``H - M* H M = I``.

    Requires the spectral radius of ``M`` to be strictly below one
    (margin ``1e-8 * (1 + ||M||)``).
    """
    arr = as_square_matrix(m)
    n = arr.shape[0]
    norm = float(np.linalg.norm(arr, 2))
    tol = _stability_margin(norm)
    radius = float(np.max(np.abs(np.linalg.eigvals(arr))))
    if radius >= 1.0 - tol:
        raise BoundaryError(
            f"spectral radius {radius:.6f} is not strictly below 1 "
            f"(tolerance {tol:.3e}); no strict Stein certificate"
        )
    h = sla.solve_discrete_lyapunov(arr.conj().T, np.eye(n, dtype=complex))
    h = (h + h.conj().T) / 2.0
    resid = np.linalg.norm(h - arr.conj().T @ h @ arr - np.eye(n), 2)
    h_norm = np.linalg.norm(h, 2)
    if resid > 1e-8 * max(h_norm * (1.0 + norm**2), 1.0):
        raise FactorizationError(
            f"Stein residual {resid:.3e} too large for ||H||={h_norm:.3e}"
        )
    return h


@dataclass(frozen=True)
class UnitTriFactorization:
    """Inverse of a unit upper triangular matrix as rank-one factors.

    The inverse of ``A = I + U`` (``U`` strictly upper triangular with
    columns ``u_j``) is the ordered product of ``I - u_j e_j^T`` over the
    columns ``j = 1..n-1`` (0-based).  Columns whose strict upper part is
    identically zero are omitted.
    """

    n: int
    factors: tuple[tuple[int, np.ndarray], ...]

    def assemble(self) -> np.ndarray:
        """Multiply the factors out (left to right, ascending column)."""
        p = np.eye(self.n, dtype=complex)
        for j, u in self.factors:
            # p @ (I - u e_j^T) = p - (p u) e_j^T
            p[:, j] -= p @ u
        return p


def unit_tri_inverse_factored(a) -> tuple[UnitTriFactorization, np.ndarray]:
    """Factored inverse of a unit upper triangular matrix.

    Returns ``(factorization, inverse)`` where ``inverse`` is the assembled
    product.  The diagonal must equal one and the strictly lower part must
    vanish, both within ``1e-12 * (1 + max|a_ij|)``.
    """
    arr = as_square_matrix(a)
    n = arr.shape[0]
    tol = 1e-12 * (1.0 + float(np.max(np.abs(arr))))
    if np.max(np.abs(np.diag(arr) - 1.0)) > tol:
        raise NotUnitTriangularError("diagonal is not identically 1")
    if n > 1 and np.max(np.abs(arr[np.tril_indices(n, -1)])) > tol:
        raise NotUnitTriangularError("strictly lower part is not zero")
    factors = []
    for j in range(1, n):
        u = np.zeros(n, dtype=complex)
        u[:j] = arr[:j, j]
        if np.any(u != 0.0):
            factors.append((j, u))
    fact = UnitTriFactorization(n=n, factors=tuple(factors))
    return fact, fact.assemble()


def unit_tri_bound(n: int, alpha: float) -> float:
    """Norm bound ``(n * alpha)**(n - 1)`` for the inverse of a unit upper
    triangular matrix with ``||A|| <= alpha``.

    ``alpha >= 1`` is required: every unit triangular matrix has norm at
    least one, so smaller bounds are vacuous.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1 (any unit triangular norm is), got {alpha}")
    return float((n * alpha) ** (n - 1))


def jordan_block(lam: complex, k: int) -> np.ndarray:
    """The k-by-k Jordan block with eigenvalue ``lam``."""
    if k < 1:
        raise ValueError("block size must be positive")
    j = np.eye(k, dtype=complex) * complex(lam)
    if k > 1:
        j[np.arange(k - 1), np.arange(1, k)] = 1.0
    return j


def direct_sum(blocks: Sequence[np.ndarray]) -> np.ndarray:
    """Block-diagonal direct sum of square matrices."""
    mats = [as_square_matrix(b) for b in blocks]
    n = sum(b.shape[0] for b in mats)
    out = np.zeros((n, n), dtype=complex)
    pos = 0
    for b in mats:
        k = b.shape[0]
        out[pos : pos + k, pos : pos + k] = b
        pos += k
    return out


def hermitian_extrema(h) -> tuple[float, float]:
    """(lambda_min, lambda_max) of a Hermitian matrix."""
    w = np.linalg.eigvalsh(as_square_matrix(h))
    return float(w[0]), float(w[-1])


def condition_2norm(a) -> float:
    """2-norm condition number; ``inf`` when singular."""
    s = np.linalg.svd(as_square_matrix(a), compute_uv=False)
    if s[-1] == 0.0:
        return math.inf
    return float(s[0] / s[-1])

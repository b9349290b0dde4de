import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from kreissometer import (
    BoundaryError,
    NotUnitTriangularError,
    direct_sum,
    expm,
    jordan_block,
    schur,
    solve_lyapunov_continuous,
    solve_stein_discrete,
    spectral_norm,
    unit_tri_bound,
    unit_tri_inverse_factored,
)
from kreissometer.errors import DimensionError

from _helpers import random_strictly_stable, random_unit_upper_triangular, rng

GOLDEN = (1 + math.sqrt(5)) / 2


class TestSpectralNorm:
    def test_identity(self):
        assert spectral_norm(np.eye(3)) == pytest.approx(1.0, abs=1e-12)

    def test_single_entry(self):
        assert spectral_norm([[0, 1], [0, 0]]) == pytest.approx(1.0, abs=1e-12)

    def test_shear(self):
        # largest eigenvalue of A A* for [[1,1],[0,1]] is (3+sqrt 5)/2, whose
        # square root is the golden ratio
        assert spectral_norm([[1, 1], [0, 1]]) == pytest.approx(GOLDEN, rel=1e-10)

    def test_zero(self):
        assert spectral_norm(np.zeros((2, 2))) == 0.0

    def test_rejects_non_square(self):
        with pytest.raises(DimensionError):
            spectral_norm(np.ones((2, 3)))

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            spectral_norm([[np.nan, 0], [0, 0]])

    def test_adjoint_duality(self):
        gen = rng(11)
        for _ in range(25):
            a = gen.standard_normal((5, 5)) + 1j * gen.standard_normal((5, 5))
            assert spectral_norm(a) == pytest.approx(spectral_norm(a.conj().T), rel=1e-10)


class TestSchur:
    def test_identity(self):
        sf = schur(np.eye(2))
        assert np.allclose(sf.q, np.eye(2))
        assert np.allclose(sf.t, np.eye(2))

    def test_nilpotent_already_ordered(self):
        sf = schur([[0, 1], [0, 0]], "descending-real-part")
        assert np.allclose(sf.t, [[0, 1], [0, 0]])

    def test_random_reconstruction(self):
        gen = rng(5)
        a = gen.standard_normal((4, 4)) + 1j * gen.standard_normal((4, 4))
        for ordering in ("none", "descending-real-part", "descending-modulus"):
            sf = schur(a, ordering)
            err = np.linalg.norm(sf.reconstruct() - a, 2)
            assert err <= 1e-10 * np.linalg.norm(a, 2)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=12, max_value=5000), st.integers(min_value=2, max_value=8))
    def test_invariants_random(self, seed, n):
        gen = rng(seed)
        a = gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))
        sf = schur(a, "descending-real-part")
        assert np.linalg.norm(sf.q @ sf.q.conj().T - np.eye(n), 2) <= 1e-10 * n
        assert np.max(np.abs(np.tril(sf.t, -1))) <= 1e-10 * np.linalg.norm(sf.t, 2)
        diag = np.diag(sf.t)
        assert np.all(np.diff(diag.real) <= 1e-10 * np.linalg.norm(a, 2))
        # the multiset of eigenvalues is preserved
        assert np.allclose(
            sorted(np.linalg.eigvals(a), key=lambda z: (z.real, z.imag)),
            sorted(diag, key=lambda z: (z.real, z.imag)),
            atol=1e-8 * np.linalg.norm(a, 2),
        )

    def test_descending_modulus(self):
        sf = schur(np.diag([0.5, -2.0, 1.0]), "descending-modulus")
        mods = np.abs(np.diag(sf.t))
        assert np.all(np.diff(mods) <= 1e-12)

    def test_unknown_ordering(self):
        with pytest.raises(ValueError):
            schur(np.eye(2), "ascending")


class TestExpm:
    def test_zero(self):
        assert np.allclose(expm(np.zeros((3, 3))), np.eye(3))

    def test_diagonal(self):
        out = expm(np.diag([-1.0, -2.0]))
        assert np.allclose(out, np.diag([math.exp(-1), math.exp(-2)]), rtol=1e-12)

    def test_nilpotent(self):
        n = np.array([[0, 1], [0, 0]], dtype=complex)
        assert np.allclose(expm(n), np.eye(2) + n, atol=1e-14)

    def test_semigroup_property(self):
        gen = rng(9)
        for _ in range(10):
            a = random_strictly_stable(gen, 4)
            s, t = gen.uniform(0, 5, size=2)
            lhs = expm(a * (s + t))
            es, et = expm(a * s), expm(a * t)
            err = np.linalg.norm(lhs - es @ et, 2)
            assert err <= 1e-6 * np.linalg.norm(es, 2) * np.linalg.norm(et, 2)


class TestLyapunov:
    def test_minus_identity(self):
        h = solve_lyapunov_continuous(-np.eye(2))
        assert np.allclose(h, np.eye(2) / 2, atol=1e-12)

    def test_diagonal(self):
        h = solve_lyapunov_continuous(np.diag([-1.0, -2.0]))
        assert np.allclose(h, np.diag([0.5, 0.25]), atol=1e-12)

    def test_imaginary_spectrum_boundary(self):
        with pytest.raises(BoundaryError):
            solve_lyapunov_continuous(np.array([[0.0, 1.0], [-1.0, 0.0]]))

    def test_certificate_sign(self):
        gen = rng(21)
        for _ in range(10):
            m = random_strictly_stable(gen, 4)
            h = solve_lyapunov_continuous(m)
            w = np.linalg.eigvalsh(h @ m + m.conj().T @ h)
            assert w[-1] <= -1 + 1e-6


class TestStein:
    def test_zero(self):
        assert np.allclose(solve_stein_discrete(np.zeros((2, 2))), np.eye(2))

    def test_scalar(self):
        h = solve_stein_discrete(np.diag([0.5]))
        assert h[0, 0] == pytest.approx(4.0 / 3.0, rel=1e-12)

    def test_nilpotent(self):
        # hand oracle: H - M* H M = I with M = [[0,1],[0,0]] forces
        # h11 = 1, h12 = 0, h22 - h11 = 1
        h = solve_stein_discrete(np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert np.allclose(h, np.diag([1.0, 2.0]), atol=1e-12)

    def test_radius_one_boundary(self):
        with pytest.raises(BoundaryError):
            solve_stein_discrete(np.diag([1.0]))


class TestUnitTriangular:
    def test_identity(self):
        fact, inv = unit_tri_inverse_factored(np.eye(3))
        assert fact.factors == ()
        assert np.allclose(inv, np.eye(3))

    def test_two_by_two(self):
        fact, inv = unit_tri_inverse_factored([[1, 2], [0, 1]])
        assert len(fact.factors) == 1
        j, u = fact.factors[0]
        assert j == 1
        assert np.allclose(u, [2, 0])
        assert np.allclose(inv, [[1, -2], [0, 1]])

    def test_against_back_substitution(self):
        gen = rng(42)
        a = random_unit_upper_triangular(gen, 5)
        _, inv = unit_tri_inverse_factored(a)
        oracle = sla.solve_triangular(a, np.eye(5, dtype=complex))
        assert np.linalg.norm(inv - oracle, 2) <= 1e-10 * np.linalg.norm(oracle, 2)

    def test_rejects_non_unit_diagonal(self):
        with pytest.raises(NotUnitTriangularError):
            unit_tri_inverse_factored([[2, 1], [0, 1]])

    def test_rejects_lower_entries(self):
        with pytest.raises(NotUnitTriangularError):
            unit_tri_inverse_factored([[1, 0], [1, 1]])

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=6))
    def test_inverse_norm_bound(self, seed, n):
        a = random_unit_upper_triangular(rng(seed), n)
        _, inv = unit_tri_inverse_factored(a)
        assert np.linalg.norm(inv, 2) <= unit_tri_bound(n, max(np.linalg.norm(a, 2), 1.0))


class TestUnitTriBound:
    def test_empty_product(self):
        assert unit_tri_bound(1, 5.0) == 1.0

    def test_small_values(self):
        assert unit_tri_bound(2, 2.0) == 4.0
        assert unit_tri_bound(3, 3.0) == 81.0

    def test_alpha_below_one(self):
        with pytest.raises(ValueError):
            unit_tri_bound(3, 0.5)

    def test_bad_n(self):
        with pytest.raises(ValueError):
            unit_tri_bound(0, 2.0)


def test_jordan_block_shape():
    j = jordan_block(-1 + 2j, 3)
    assert j.shape == (3, 3)
    assert np.allclose(np.diag(j), (-1 + 2j) * np.ones(3))
    assert np.allclose(np.diag(j, 1), np.ones(2))


def test_direct_sum():
    out = direct_sum([np.eye(2), 3 * np.eye(1)])
    assert out.shape == (3, 3)
    assert out[2, 2] == 3

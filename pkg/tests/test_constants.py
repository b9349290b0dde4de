import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kreissometer import (
    SearchConfig,
    cal_k_continuous,
    cal_k_discrete,
    expm,
    jordan_block,
    kreiss_constant_continuous,
    kreiss_constant_discrete,
    sup_power_norm,
    sup_semigroup_norm,
)

from _helpers import random_contraction, random_normal_quasi_stable, rng

GOLDEN = (1 + math.sqrt(5)) / 2


class TestSearchConfig:
    def test_defaults_valid(self):
        SearchConfig()

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"coarse": 1},
            {"refine_iters": 0},
            {"divergence_threshold": 0.5},
            {"t_max": -1.0},
            {"nu_max": 0},
            {"re_cap": -1.0},
            {"im_cap": 0.0},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            SearchConfig(**kwargs)


class TestSupSemigroup:
    def test_zero_matrix(self):
        r = sup_semigroup_norm(np.zeros((2, 2)))
        assert r.value == pytest.approx(1.0, abs=1e-12)
        assert r.argmax == pytest.approx(0.0)
        assert not r.diverged

    def test_nilpotent_diverges(self):
        r = sup_semigroup_norm(jordan_block(0.0, 2))
        assert r.diverged
        assert r.growth_certificate is not None
        vals = [v for _, v in r.growth_certificate]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_transient_peak_against_scan(self):
        m = np.array([[-1.0, 4.0], [0.0, -1.0]])
        ts = np.linspace(0.0, 25.0, 10_000)
        scan = max(np.linalg.norm(expm(m * t), 2) for t in ts)
        r = sup_semigroup_norm(m)
        assert r.value >= scan - 1e-9
        assert r.value == pytest.approx(scan, rel=1e-4)
        assert r.value > 1.0

    def test_trace_nondecreasing(self):
        r = sup_semigroup_norm(np.array([[-1.0, 4.0], [0.0, -1.0]]))
        vals = [v for _, v in r.trace]
        assert all(b >= a for a, b in zip(vals, vals[1:]))


class TestSupPower:
    def test_zero_matrix(self):
        r = sup_power_norm(np.zeros((2, 2)))
        assert r.value == pytest.approx(1.0)
        assert r.argmax == 0

    def test_scalar_contraction(self):
        r = sup_power_norm(np.diag([0.5]))
        assert r.value == pytest.approx(1.0)
        assert not r.diverged

    def test_defective_radius_one_diverges(self):
        r = sup_power_norm(np.array([[1.0, 1.0], [0.0, 1.0]]))
        assert r.diverged
        assert r.growth_certificate is not None

    def test_contraction_never_exceeds_one(self):
        gen = rng(61)
        for _ in range(5):
            m = random_contraction(gen, 4)
            r = sup_power_norm(m)
            assert r.value <= 1.0 + 1e-10
            assert not r.diverged


class TestKreissContinuous:
    def test_scalar_stable(self):
        r = kreiss_constant_continuous(np.diag([-1.0]))
        assert r.value == pytest.approx(1.0, abs=1e-3)
        assert not r.diverged

    def test_normal_near_one(self):
        gen = rng(71)
        for _ in range(5):
            m = random_normal_quasi_stable(gen, 5)
            r = kreiss_constant_continuous(m)
            assert 1.0 - 1e-3 <= r.value <= 1.0 + 1e-3

    def test_nilpotent_diverges(self):
        r = kreiss_constant_continuous(jordan_block(0.0, 2))
        assert r.diverged
        vals = [v for _, v in r.growth_certificate]
        assert vals[-1] > 1e6
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_scaling_covariance(self):
        m = np.array([[-0.1, 1.0], [0.0, -0.1]])
        base = kreiss_constant_continuous(m).value
        for s in (0.5, 3.0):
            assert kreiss_constant_continuous(s * m).value == pytest.approx(base, rel=1e-3)


class TestKreissDiscrete:
    def test_scalar_zero(self):
        r = kreiss_constant_discrete(np.zeros((1, 1)))
        assert r.value == pytest.approx(1.0, abs=1e-3)

    def test_scalar_half(self):
        r = kreiss_constant_discrete(np.diag([0.5]))
        assert r.value == pytest.approx(1.0, abs=1e-3)

    def test_defective_circle_diverges(self):
        r = kreiss_constant_discrete(np.array([[1.0, 1.0], [0.0, 1.0]]))
        assert r.diverged


class TestCalKContinuous:
    def test_zero_matrix(self):
        r = cal_k_continuous(np.zeros((2, 2)))
        assert r.value == pytest.approx(1.0, abs=1e-9)

    def test_normal_is_one(self):
        gen = rng(81)
        for _ in range(5):
            m = random_normal_quasi_stable(gen, 5)
            r = cal_k_continuous(m)
            assert 1.0 - 1e-6 <= r.value <= 1.0 + 1e-3

    def test_spectrum_in_right_half_plane_is_defined_infinite(self):
        r = cal_k_continuous(np.diag([1.0 + 2j, 0.5]))
        assert math.isinf(r.value)
        assert not r.diverged
        assert not r.is_finite
        assert r.budget_used == 0

    def test_jordan_block_brute_force(self):
        # independent oracle: dense ratio scan; the true supremum is the
        # norm of [[1,1],[0,1]] approached as z -> 0 in the half-plane
        m = jordan_block(-1.0, 2)
        xs = np.geomspace(1e-6, 30.0, 1000)
        ys = np.linspace(-30.0, 30.0, 1001)
        brute = 0.0
        for x in xs:
            zs = x + 1j * ys
            w = 1.0 / np.abs(zs + 1.0)
            vals = (w + np.sqrt(w * w + 4.0)) / 2.0  # norm of [[1,s],[0,1]] at s=w
            brute = max(brute, float(np.max(vals)))
        r = cal_k_continuous(m)
        assert r.value >= brute - 1e-9
        assert r.value <= GOLDEN + 1e-9
        assert r.value == pytest.approx(GOLDEN, abs=1e-4)

    def test_defective_axis_diverges(self):
        r = cal_k_continuous(jordan_block(1j, 2))
        assert r.diverged
        assert not r.is_finite
        vals = [v for _, v in r.growth_certificate]
        assert vals[-1] > 1e6

    def test_kreiss_below_ratio_sup(self):
        gen = rng(91)
        mats = [random_normal_quasi_stable(gen, 4) for _ in range(3)]
        mats += [jordan_block(-1.0, 2), jordan_block(-1.0, 3)]
        for m in mats:
            k2 = kreiss_constant_continuous(m)
            ck = cal_k_continuous(m)
            assert k2.value <= ck.value + 1e-6


class TestCalKDiscrete:
    def test_zero_matrix(self):
        r = cal_k_discrete(np.zeros((2, 2)))
        assert r.value == pytest.approx(1.0, abs=1e-9)

    def test_normal(self):
        r = cal_k_discrete(np.diag([0.5, 0.5j]))
        assert r.value == pytest.approx(1.0, abs=1e-6)

    def test_defective_inside_polar_oracle(self):
        m = np.array([[0.5, 1.0], [0.0, 0.5]])
        brute = 0.0
        for rho in 1.0 + np.geomspace(1e-5, 10.0, 400):
            for ang in np.linspace(0, 2 * np.pi, 200, endpoint=False):
                z = rho * np.exp(1j * ang)
                res = np.linalg.inv(z * np.eye(2) - m)
                brute = max(brute, np.linalg.norm(res, 2) * abs(z - 0.5))
        r = cal_k_discrete(m)
        assert not r.diverged
        assert r.value >= brute - 1e-9
        assert r.value <= brute * 1.01

    def test_contractions_stay_finite(self):
        gen = rng(101)
        for _ in range(5):
            r = cal_k_discrete(random_contraction(gen, 4))
            assert r.is_finite


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_traces_nondecreasing(seed):
    gen = rng(seed)
    m = gen.standard_normal((3, 3)) + 1j * gen.standard_normal((3, 3))
    for result in (
        kreiss_constant_continuous(m),
        cal_k_discrete(m),
        sup_power_norm(m),
    ):
        vals = [v for _, v in result.trace]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

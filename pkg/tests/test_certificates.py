import dataclasses
import math

import numpy as np
import pytest

from kreissometer import (
    BoundaryError,
    bound_from_condition3,
    build_condition3,
    build_condition4,
    cal_k_continuous,
    check_resolvent_inequality,
    classify_quasi_stable,
    jordan_block,
    miller_region_bound,
    region_S_membership,
    resolvent_norm,
    verify_condition3,
)

from _helpers import (
    quasi_stable_zoo,
    random_normal_quasi_stable,
    random_strictly_stable,
    rng,
)


class TestBuildCondition3:
    def test_diagonal(self):
        cert = build_condition3(np.diag([-1.0, -2.0]))
        assert cert.k31 == pytest.approx(2.0, rel=1e-12)
        assert cert.k32 == 0.0
        assert cert.ordering_valid and cert.triangular_valid and cert.diagonal_sign_valid

    def test_scaling_trades_constants(self):
        m = np.array([[-1.0, 10.0], [0.0, -1.0]])
        cert = build_condition3(m, scaling_eps=0.1)
        # hand: S = diag(1, 10), so T = [[-1, 1], [0, -1]], norms 10 and 1
        assert cert.k32 == pytest.approx(1.0, rel=1e-10)
        assert cert.k31 == pytest.approx(11.0, rel=1e-10)

    def test_defective_axis_unsatisfiable(self):
        cert = build_condition3(np.array([[1j, 1.0], [0.0, 1j]]))
        assert math.isinf(cert.k32)

    def test_eps_table_has_three_rows(self):
        cert = build_condition3(np.diag([-1.0, -2.0]))
        assert [row[0] for row in cert.eps_table] == [1.0, 0.1, 0.01]

    def test_discrete_mode_ordering(self):
        cert = build_condition3(np.diag([0.2, 0.9, 0.5]), mode="discrete")
        mods = np.abs(np.diag(cert.t))
        assert np.all(np.diff(mods) <= 1e-10)
        assert cert.diagonal_sign_valid

    def test_am_gm_consistency(self):
        gen = rng(7)
        for _ in range(10):
            m = random_strictly_stable(gen, 4)
            for eps in (1.0, 0.1):
                cert = build_condition3(m, scaling_eps=eps)
                assert cert.kappa_s <= cert.k31**2 / 4.0 + 1e-9 * cert.k31**2

    def test_bad_mode_and_eps(self):
        with pytest.raises(ValueError):
            build_condition3(np.eye(2), mode="both")
        with pytest.raises(ValueError):
            build_condition3(np.eye(2), scaling_eps=0.0)


class TestVerifyCondition3:
    def test_valid_certificate_passes(self):
        m = np.diag([-1.0, -2.0])
        cert = build_condition3(m)
        v = verify_condition3(m, cert, 2.0, 0.0)
        assert v.all_pass

    def test_negative_entry_claim_fails(self):
        m = np.diag([-1.0, -2.0])
        cert = build_condition3(m)
        v = verify_condition3(m, cert, 2.0, -1.0)
        assert not v.all_pass
        assert not v.check("entry-bound").passed
        assert v.check("ordering").passed

    def test_shuffled_diagonal_fails_ordering(self):
        m = np.diag([-1.0, -2.0])
        cert = build_condition3(m)
        shuffled = dataclasses.replace(cert, t=np.diag([-2.0 + 0j, -1.0]))
        v = verify_condition3(m, shuffled, 2.0, 0.0)
        assert not v.check("ordering").passed

    def test_too_small_norm_claim_fails(self):
        m = np.array([[-1.0, 10.0], [0.0, -1.0]])
        cert = build_condition3(m, scaling_eps=0.1)
        v = verify_condition3(m, cert, 5.0, 2.0)
        assert not v.check("norm-bound").passed

    def test_reconstruction_residual_is_policed(self):
        m = np.diag([-1.0, -2.0])
        cert = build_condition3(m)
        corrupted = dataclasses.replace(cert, s=cert.s + 0.5)
        v = verify_condition3(m, corrupted, 10.0, 10.0)
        assert not v.check("reconstruction").passed

    def test_measured_constants_always_verify(self):
        gen = rng(13)
        for _ in range(8):
            m = random_strictly_stable(gen, 5)
            cert = build_condition3(m, scaling_eps=0.1)
            v = verify_condition3(m, cert, cert.k31, cert.k32)
            assert v.all_pass


class TestBuildCondition4:
    def test_minus_identity(self):
        cert = build_condition4(-np.eye(2))
        assert cert.k4 == pytest.approx(1.0, rel=1e-10)
        assert cert.valid

    def test_diagonal_normalization(self):
        cert = build_condition4(np.diag([-1.0, -2.0]))
        assert cert.k4 == pytest.approx(math.sqrt(2.0), rel=1e-10)

    def test_boundary_error(self):
        with pytest.raises(BoundaryError):
            build_condition4(np.diag([1j]))

    def test_discrete(self):
        cert = build_condition4(np.diag([0.5, 0.25]), mode="discrete")
        assert cert.valid
        assert cert.negativity_residual <= 0.0

    def test_validity_implies_quasi_stable(self):
        gen = rng(19)
        for _ in range(8):
            m = random_strictly_stable(gen, 4)
            cert = build_condition4(m)
            assert cert.valid
            assert classify_quasi_stable(m).quasi_stable


class TestBounds:
    def test_explicit_arithmetic(self):
        cert = build_condition3(np.diag([-1.0, -2.0]))
        fake = dataclasses.replace(cert, k31=2.0, k32=1.0)
        assert bound_from_condition3(fake) == pytest.approx(4.0)
        fake0 = dataclasses.replace(cert, k31=2.0, k32=0.0)
        assert bound_from_condition3(fake0) == pytest.approx(4.0)

    def test_infinite_k32(self):
        cert = build_condition3(np.array([[1j, 1.0], [0.0, 1j]]))
        assert math.isinf(bound_from_condition3(cert))

    def test_rejects_discrete_mode(self):
        cert = build_condition3(np.diag([0.5]), mode="discrete")
        with pytest.raises(ValueError):
            bound_from_condition3(cert)

    def test_region_bound_arithmetic(self):
        cert = build_condition3(np.diag([-1.0, -2.0]))
        fake = dataclasses.replace(cert, k31=2.0, k32=1.0)
        assert miller_region_bound(fake, 1.0) == pytest.approx(8.0)

    def test_region_bound_limit_recovers_halfplane_bound(self):
        cert = build_condition3(jordan_block(-1.0, 3))
        assert miller_region_bound(cert, 1e12) == pytest.approx(
            bound_from_condition3(cert), rel=1e-9
        )

    def test_region_bound_bad_r(self):
        cert = build_condition3(np.diag([-1.0]))
        with pytest.raises(ValueError):
            miller_region_bound(cert, 0.0)

    def test_soundness_against_ratio_sup(self):
        for m in quasi_stable_zoo(seed=303, normals=3):
            cert = build_condition3(m)
            if math.isinf(cert.k32):
                continue
            ck = cal_k_continuous(m)
            assert ck.value <= bound_from_condition3(cert) + 1e-6

    def test_region_inequality_sampled(self):
        gen = rng(29)
        m = random_strictly_stable(gen, 4)
        cert = build_condition3(m)
        lams = np.linalg.eigvals(m)
        r = 1.0
        bound = miller_region_bound(cert, r)
        checked = 0
        while checked < 200:
            z = complex(gen.uniform(-8, 8), gen.uniform(-8, 8))
            if min(abs(z - l) for l in lams) < 1e-6:
                continue
            if not region_S_membership(m, z, r):
                continue
            rn = resolvent_norm(m, z)
            denom = max(1.0 / abs(z - l) for l in lams)
            assert rn <= bound * denom * (1 + 1e-8)
            checked += 1


class TestResolventInequality:
    def test_normal_with_unit_constant(self):
        gen = rng(37)
        m = random_normal_quasi_stable(gen, 4)
        samples = [complex(gen.uniform(0.1, 5), gen.uniform(-5, 5)) for _ in range(50)]
        report = check_resolvent_inequality(m, 1.0, samples)
        assert report.all_ok

    def test_ratio_sup_constant_has_no_violations(self):
        m = jordan_block(-1.0, 2)
        k = cal_k_continuous(m).value
        gen = rng(39)
        samples = [complex(10 ** gen.uniform(-4, 1), gen.uniform(-5, 5)) for _ in range(100)]
        report = check_resolvent_inequality(m, k, samples, denominator="excluded")
        assert report.all_ok

    def test_too_small_constant_is_caught(self):
        m = jordan_block(-1.0, 2)
        samples = [complex(10.0 ** (-j), 0.0) for j in range(1, 7)]
        report = check_resolvent_inequality(m, 0.5, samples)
        assert not report.all_ok
        assert len(report.violations) > 0

    def test_singular_samples_flagged(self):
        report = check_resolvent_inequality(np.diag([-1.0]), 1.0, [-1.0 + 0j, 1.0 + 0j])
        assert report.samples[0].flag == "singular"
        assert report.samples[1].flag == "ok"
        assert report.all_ok

    def test_empty_denominator_set_rejected(self):
        with pytest.raises(ValueError):
            check_resolvent_inequality(np.diag([1.0]), 1.0, [2.0 + 0j], denominator="excluded")

    def test_bad_k(self):
        with pytest.raises(ValueError):
            check_resolvent_inequality(np.diag([-1.0]), 0.0, [1.0 + 0j])

import math

import numpy as np
import pytest

from conftest import angle_frame, pair_frame
from oracles import minimax_grid_s2
from scalekit import UnitNormFrame, analyze, approximate_scalable, frame_from_ellipsoid
from scalekit import is_scalable_2d_exact, minimax_coherence, random_unit_frame
from scalekit import solve_cone_projection
from scalekit.errors import DimensionError
from scalekit.scalemeasures import Certificate, k_active, report_to_dict, vd_envelope

MINIMAX_GRID_40_3_SEED9 = 0.8683642272978952  # refined Fibonacci grid, 1e6 points


class TestAnalyze:
    def test_orthonormal_basis(self):
        rep = analyze(UnitNormFrame(np.eye(3)))
        assert rep.scalable and rep.certificate is Certificate.CONE_ZERO
        assert rep.d_phi_lower == 0.0 and rep.d_phi_upper == pytest.approx(0.0, abs=1e-12)

    def test_pair_pi_over_8(self):
        rep = analyze(pair_frame(math.pi / 8))
        assert not rep.scalable
        assert rep.cone_distance == pytest.approx(0.8164966, abs=1e-7)
        assert rep.volume_ratio == pytest.approx(math.sqrt(2) / 2, abs=1e-6)
        assert rep.k_active == 2
        assert rep.d_phi_upper == pytest.approx(math.sqrt(4 * (1 - math.sqrt(2) / 2)), abs=1e-6)
        assert rep.d_phi_upper == pytest.approx(1.0824, abs=1e-4)
        assert not rep.d_hypothesis_holds and rep.d_phi_lower == 0.0

    def test_random_consistency(self):
        rep = analyze(random_unit_frame(20, 4, 5))
        assert rep.d_phi_lower <= rep.d_phi_upper
        assert rep.sandwich_ok
        v4 = rep.volume_ratio ** (4 / 4)
        lo, hi = vd_envelope(rep.cone_distance, 4)
        assert lo - 1e-5 <= v4 <= hi + 1e-5
        assert rep.omega == pytest.approx(rep.cone_distance + math.sqrt(10))

    def test_scalable_invariants(self):
        for seed in range(30):
            rep = analyze(random_unit_frame(20, 4, seed))
            if rep.scalable:
                assert rep.d_phi_lower <= rep.tol
                assert rep.cone_distance <= rep.tol
                assert rep.volume_ratio >= 1 - rep.tol

    def test_unitary_square(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
            assert analyze(UnitNormFrame(q)).scalable
        rep = analyze(random_unit_frame(4, 4, 1))
        assert not rep.scalable and rep.certificate is Certificate.UNITARY_M_BY_N

    def test_apex_certificate(self):
        rep = analyze(angle_frame([0.0, math.pi / 3]))
        assert not rep.scalable and rep.certificate is Certificate.APEX_2D

    def test_necessary_condition_certificate(self):
        # three nearby directions in R^3 plus a spanning pair: far from scalable
        a = np.array([[1.0, 0.99, 0.99, 0.0, 0.0],
                      [0.0, 0.14, -0.14, 0.2, 0.0],
                      [0.0, 0.0, 0.0, 0.98, 0.999]])
        f = UnitNormFrame(a / np.linalg.norm(a, axis=0))
        rep = analyze(f)
        assert not rep.scalable
        assert rep.certificate is Certificate.NECESSARY_VIOLATED
        assert rep.minimax_value < 1 / math.sqrt(3)

    def test_tol_domain(self):
        with pytest.raises(ValueError):
            analyze(UnitNormFrame(np.eye(2)), tol=0.1)

    def test_report_json_fields(self):
        d = report_to_dict(analyze(UnitNormFrame(np.eye(2))))
        assert d["certificate"] == "ConeZero"
        assert {"d_phi_lower", "d_phi_upper", "cone_distance", "volume_ratio", "scalable",
                "k_active", "omega", "tol"} <= set(d)

    def test_k_active(self):
        assert k_active(20, 4) == 10 and k_active(6, 4) == 6 and k_active(2, 2) == 2


class TestApex:
    def test_orthonormal(self):
        assert is_scalable_2d_exact(angle_frame([0.0, math.pi / 2]))

    def test_narrow(self):
        assert not is_scalable_2d_exact(angle_frame([0.0, math.pi / 3]))

    def test_boundary(self):
        assert is_scalable_2d_exact(angle_frame([0.0, math.pi / 4, math.pi / 2]))

    def test_sign_and_wrap(self):
        assert is_scalable_2d_exact(angle_frame([0.1, math.pi + 0.1 + math.pi / 2]))
        assert not is_scalable_2d_exact(angle_frame([3.0, 3.0 + math.pi / 3, -0.2]))

    def test_dimension(self):
        with pytest.raises(DimensionError):
            is_scalable_2d_exact(UnitNormFrame(np.eye(3)))

    def test_agrees_with_cone_test(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            f = angle_frame(rng.uniform(0, 2 * math.pi, rng.integers(2, 7)))
            d = solve_cone_projection(f).distance
            if d > 1e-6 or d < 1e-12:
                assert is_scalable_2d_exact(f) == (d <= 1e-6)


class TestApproximation:
    def test_scalable_frame_unchanged(self):
        ap = approximate_scalable(UnitNormFrame(np.eye(3)))
        assert ap.frobenius_error == pytest.approx(0.0, abs=1e-12)

    def test_pair_pi_over_6(self):
        t = math.pi / 6
        f = pair_frame(t)
        ap = approximate_scalable(f)
        v = math.sqrt(3) / 2
        assert ap.volume_ratio == pytest.approx(v, abs=1e-7)
        x_half = np.diag([1 / math.sqrt(1.5), 1 / math.sqrt(0.5)])
        direct = math.sqrt(v) * x_half @ f.columns
        assert np.allclose(ap.approx_frame, direct, atol=1e-7)
        assert ap.frobenius_error == pytest.approx(np.linalg.norm(direct - f.columns), abs=1e-7)

    def test_random_witness_scalable(self):
        ap = approximate_scalable(random_unit_frame(11, 4, 3))
        assert ap.approx_cone_distance <= 1e-6
        assert ap.active_set.size <= 10

    def test_witness_within_upper_bound(self):
        for seed in range(20):
            f = random_unit_frame(7, 3, seed)
            ap = approximate_scalable(f)
            rep = analyze(f, necessary_samples=0)
            assert ap.frobenius_error <= rep.d_phi_upper + 1e-8
            assert ap.frobenius_error <= ap.upper_bound + 1e-8
            if not math.isnan(ap.bound):
                assert ap.frobenius_error <= ap.bound + 1e-8

    def test_stored_unnormalised(self):
        ap = approximate_scalable(pair_frame(math.pi / 5))
        norms = np.linalg.norm(ap.approx_frame, axis=0)
        assert np.allclose(norms, ap.volume_ratio ** 0.5, atol=1e-7)


class TestMinimax:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_orthonormal_basis(self, n):
        est = minimax_coherence(np.eye(n), num_samples=10_000)
        assert est.value == pytest.approx(1 / math.sqrt(n), abs=5e-3)
        assert est.value >= 1 / math.sqrt(n) - 1e-12

    def test_value_matches_direction(self):
        f = random_unit_frame(9, 3, 2)
        est = minimax_coherence(f, num_samples=500, seed=4)
        assert est.value == np.abs(f.columns.T @ est.direction).max()
        assert est.is_upper_bound

    def test_narrow_cone_certified(self):
        f = angle_frame(np.linspace(-math.pi / 16, math.pi / 16, 6))
        est = minimax_coherence(f)
        assert est.value <= math.sin(math.pi / 16) + 1e-9
        assert est.certifies_not_scalable(2)
        assert not analyze(f).scalable

    def test_matches_dense_grid(self):
        f = random_unit_frame(40, 3, 9)
        est = minimax_coherence(f, num_samples=10_000, refine_iters=100, seed=0)
        grid = minimax_grid_s2(f.columns)
        assert grid == pytest.approx(MINIMAX_GRID_40_3_SEED9, abs=1e-12)
        assert abs(est.value - grid) <= 1e-3
        assert est.value >= grid - 1e-4

    def test_reproducible(self):
        f = random_unit_frame(9, 3, 2)
        assert minimax_coherence(f, seed=3).value == minimax_coherence(f, seed=3).value

    def test_samples_domain(self):
        with pytest.raises(ValueError):
            minimax_coherence(np.eye(2), num_samples=0)


def test_openness_of_strict_scalability():
    base = frame_from_ellipsoid(np.eye(3), 3)
    generic = random_unit_frame(9, 3, 77).columns
    f0 = np.hstack([base.columns, generic])
    assert analyze(UnitNormFrame(f0)).scalable
    rng = np.random.default_rng(1)
    for _ in range(100):
        g = f0 + rng.uniform(-1e-4, 1e-4, f0.shape)
        g /= np.linalg.norm(g, axis=0)
        assert solve_cone_projection(UnitNormFrame(g)).distance <= 1e-6

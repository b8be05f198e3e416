import numpy as np
import pytest

from qmb.errors import SingularQFIM, SingularState
from qmb.geometry import (
    compute_geometry,
    geometry_from_matrices,
    quantumness_R,
    rld_qfim,
    singular_values_pairing,
    t_measure,
    t_saturation_analysis,
    tangent_normal_decomposition,
    weight_transform,
)
from qmb.models import model_config, su2_qutrit_point, tunable_qubit_point

from conftest import random_antisymmetric, random_model, random_spd


def tq_point(r0=(0.3, 0.2, 0.5), phi=0.35, l1=0.525, l2=0.0):
    cfg = model_config(
        "tunable_qubit",
        r_x=r0[0], r_y=r0[1], r_z=r0[2],
        gamma=np.pi / 4, theta=np.pi / 2, phi=phi,
    )
    return tunable_qubit_point(cfg, (l1, l2))


def random_valid_geometry(rng, d, max_r=0.95):
    """Synthetic (Q, U) from a Gram matrix, so that Q + iU is PSD."""
    a = rng.normal(size=(d, 2 * d)) + 1j * rng.normal(size=(d, 2 * d))
    gram = a @ a.conj().T
    q = gram.real + 0.2 * np.eye(d)
    u = gram.imag * max_r
    return geometry_from_matrices(q, u)


class TestComputeGeometry:
    def test_matches_analytic_special_angles(self):
        pt = tq_point()
        g = compute_geometry(pt.rho, pt.derivs)
        qa, ua = pt.analytic_geometry
        assert np.max(np.abs(g.qfim - qa)) <= 1e-8
        assert np.max(np.abs(g.uhlmann - ua)) <= 1e-8
        assert g.tangent_dim == 2

    def test_single_parameter(self):
        pt = tq_point()
        g = compute_geometry(pt.rho, pt.derivs[:1])
        assert g.uhlmann.shape == (1, 1)
        assert g.uhlmann[0, 0] == 0.0

    def test_tangent_collapse(self):
        # r_y sin(xi) = r_x cos(xi) makes the two SLDs linearly dependent
        r0 = (0.3, 0.2, 0.5)
        xi = np.arctan2(r0[0], r0[1])
        phi = 0.2
        pt = tq_point(r0, phi=phi, l1=(xi + phi) / 2)
        g = compute_geometry(pt.rho, pt.derivs)
        assert g.tangent_dim == 1

    def test_basic_invariants(self, rng):
        for n, d in ((2, 2), (3, 3)):
            rho, derivs = random_model(rng, n, d)
            g = compute_geometry(rho, derivs)
            assert np.max(np.abs(g.qfim - g.qfim.T)) <= 1e-10
            assert np.min(np.linalg.eigvalsh(g.qfim)) >= -1e-10
            assert np.max(np.abs(g.uhlmann + g.uhlmann.T)) <= 1e-10
            assert np.max(np.abs(np.diag(g.uhlmann))) == 0.0


class TestRldQfim:
    def test_classical_family_reduces_to_qfim(self, rng):
        p = np.array([0.5, 0.3, 0.2])
        rho = np.diag(p).astype(complex)
        derivs = []
        for _ in range(2):
            v = rng.normal(size=3)
            v -= v.mean()
            derivs.append(np.diag(v).astype(complex))
        j = rld_qfim(rho, derivs)
        g = compute_geometry(rho, derivs)
        assert np.max(np.abs(j.imag)) <= 1e-10
        assert np.max(np.abs(j.real - g.qfim)) <= 1e-8

    def test_mixed_point_structure(self):
        r0 = np.array([0.3, 0.2, 0.5])
        r0 *= 0.7 / np.linalg.norm(r0)
        pt = tq_point(tuple(r0))
        j = rld_qfim(pt.rho, pt.derivs)
        assert np.max(np.abs(j - j.conj().T)) <= 1e-10
        assert np.min(np.linalg.eigvalsh(j)) >= -1e-8
        assert np.max(np.abs(j.imag + j.imag.T)) <= 1e-10

    def test_pure_state_rejected(self):
        cfg = model_config(
            "tunable_qubit", alpha=0.7, beta=0.1, gamma=np.pi / 4, theta=np.pi / 2, phi=0.0
        )
        pt = tunable_qubit_point(cfg, (0.2, 0.0))
        with pytest.raises(SingularState):
            rld_qfim(pt.rho, pt.derivs)


class TestQuantumness:
    def test_hand_example(self):
        g = geometry_from_matrices(np.diag([4.0, 2.0]), [[0.0, 1.0], [-1.0, 0.0]])
        assert quantumness_R(g) == pytest.approx(1 / np.sqrt(8), abs=1e-12)

    def test_zero_curvature(self):
        g = geometry_from_matrices(np.diag([4.0, 2.0]), np.zeros((2, 2)))
        assert quantumness_R(g) == 0.0

    def test_mixed_qubit_equals_purity(self, rng):
        for _ in range(10):
            r0 = rng.normal(size=3)
            r0 *= rng.uniform(0.3, 0.95) / np.linalg.norm(r0)
            pt = tq_point(tuple(r0), phi=rng.uniform(0, 2 * np.pi), l1=rng.uniform(-1, 1))
            g = compute_geometry(pt.rho, pt.derivs)
            if np.linalg.cond(g.qfim) > 1e5:
                continue
            assert quantumness_R(g) == pytest.approx(np.linalg.norm(r0), abs=1e-9)

    def test_left_right_spellings_agree(self, rng):
        for d in (2, 3, 4):
            g = random_valid_geometry(rng, d)
            qinv = np.linalg.inv(g.qfim)
            left = np.max(np.abs(np.linalg.eigvals(1j * qinv @ g.uhlmann)))
            right = np.max(np.abs(np.linalg.eigvals(1j * g.uhlmann @ qinv)))
            assert left == pytest.approx(right, abs=1e-10)
            assert quantumness_R(g) == pytest.approx(left, abs=1e-9)

    def test_singular_qfim_raises(self):
        g = geometry_from_matrices(np.diag([1.0, 0.0]), np.zeros((2, 2)))
        with pytest.raises(SingularQFIM):
            quantumness_R(g)


class TestTMeasure:
    def test_hand_example(self):
        g = geometry_from_matrices(np.diag([4.0, 2.0]), [[0.0, 1.0], [-1.0, 0.0]])
        assert t_measure(g, np.eye(2)) == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_zero_curvature(self, rng):
        g = geometry_from_matrices(random_spd(rng, 3), np.zeros((3, 3)))
        assert t_measure(g, random_spd(rng, 3)) == 0.0

    def test_qfim_weight_saturates(self, rng):
        for _ in range(10):
            g = random_valid_geometry(rng, 2)
            if abs(np.linalg.det(g.uhlmann)) < 1e-6:
                continue
            w = g.qfim / g.qfim[0, 0]
            assert t_measure(g, w) == pytest.approx(quantumness_R(g), abs=1e-9)

    def test_diagonal_closed_form_two_params(self, rng):
        for _ in range(20):
            g = random_valid_geometry(rng, 2)
            omega = rng.uniform(0.1, 5.0)
            w = np.diag([1.0, omega])
            det_u = np.linalg.det(g.uhlmann)
            expected = 2 * np.sqrt(omega * det_u) / (g.qfim[1, 1] + omega * g.qfim[0, 0])
            assert t_measure(g, w) == pytest.approx(expected, abs=1e-9)

    def test_offdiagonal_closed_form_two_params(self, rng):
        for _ in range(20):
            g = random_valid_geometry(rng, 2)
            w1 = rng.uniform(-0.4, 0.4)
            w2 = rng.uniform(w1 * w1 + 0.1, w1 * w1 + 3.0)
            w = np.array([[1.0, w1], [w1, w2]])
            det_u = np.linalg.det(g.uhlmann)
            q = g.qfim
            expected = (
                2 * np.sqrt((w2 - w1 * w1) * det_u)
                / (q[1, 1] + w2 * q[0, 0] - 2 * w1 * q[0, 1])
            )
            assert t_measure(g, w) == pytest.approx(expected, abs=1e-9)

    def test_diagonal_closed_form_three_params(self, rng):
        # trace-norm part equals 2 sqrt(u^T Q W3 Q u) / det(Q) with
        # W3 = diag(w1 w2, w2, w1); T divides by Tr[W Q^-1]
        for _ in range(20):
            g = random_valid_geometry(rng, 3)
            w1, w2 = rng.uniform(0.2, 4.0, size=2)
            w = np.diag([1.0, w1, w2])
            u_vec = np.array([g.uhlmann[1, 2], -g.uhlmann[0, 2], g.uhlmann[0, 1]])
            w3 = np.diag([w1 * w2, w2, w1])
            numer = 2 * np.sqrt(u_vec @ g.qfim @ w3 @ g.qfim @ u_vec) / np.linalg.det(g.qfim)
            expected = numer / np.trace(w @ np.linalg.inv(g.qfim))
            assert t_measure(g, w) == pytest.approx(expected, rel=1e-9)

    def test_bounded_by_quantumness(self, rng):
        for d in (2, 3, 4):
            for _ in range(15):
                g = random_valid_geometry(rng, d)
                w = random_spd(rng, d)
                t = t_measure(g, w)
                r = quantumness_R(g)
                assert 0.0 <= t <= r + 1e-9


class TestSaturationAnalysis:
    def test_identity_weight_block_case(self):
        g = geometry_from_matrices(np.eye(2), [[0.0, 0.4], [-0.4, 0.0]])
        report = t_saturation_analysis(g, np.eye(2))
        assert report.t_equals_r
        assert report.t_value == pytest.approx(0.4, abs=1e-12)
        assert report.r_value == pytest.approx(0.4, abs=1e-12)

    def test_odd_dimension_diagonal_strictly_below(self, rng):
        q = np.diag([1.0, 2.0, 3.0])
        u = random_antisymmetric(rng, 3)
        g = geometry_from_matrices(q, 0.3 * u)
        report = t_saturation_analysis(g, np.diag([1.0, 1.0, 2.0]))
        assert report.odd_diagonal_requires_zero_u
        assert not report.t_equals_r
        assert report.t_value < report.r_value

    def test_two_param_maximizer(self):
        g = geometry_from_matrices(np.diag([4.0, 2.0]), [[0.0, 0.9], [-0.9, 0.0]])
        report = t_saturation_analysis(g, np.diag([1.0, 2.0]))
        assert report.maximizing_diagonal_omega == pytest.approx(0.5, abs=1e-12)
        t_at_best = t_measure(g, np.diag([1.0, 0.5]))
        assert t_at_best == pytest.approx(report.r_value, abs=1e-9)
        assert report.saturating_omegas == pytest.approx((0.0, 0.5), abs=1e-12)

    def test_rank_bound(self, rng):
        for _ in range(10):
            g = random_valid_geometry(rng, 4)
            report = t_saturation_analysis(g, random_spd(rng, 4))
            assert report.rank_bound_ok


class TestWeightTransform:
    def test_identity(self, rng):
        g = random_valid_geometry(rng, 3)
        wt = weight_transform(g, np.eye(3))
        assert np.allclose(wt.rotation, np.eye(3))
        assert np.allclose(wt.diagonal_weight, np.eye(3))
        assert wt.rotated is g

    def test_diagonal_passthrough(self, rng):
        g = random_valid_geometry(rng, 2)
        w = np.diag([2.0, 0.5])
        wt = weight_transform(g, w)
        assert np.allclose(wt.rotation, np.eye(2))
        assert np.allclose(wt.diagonal_weight, w)

    def test_invariance_random_spd(self, rng):
        for _ in range(15):
            g = random_valid_geometry(rng, 3)
            w = random_spd(rng, 3)
            wt = weight_transform(g, w)
            p = wt.rotation
            assert np.max(np.abs(p.T @ p - np.eye(3))) <= 1e-10
            assert np.max(np.abs(p.T @ wt.diagonal_weight @ p - w)) <= 1e-9
            t_orig = t_measure(g, w)
            t_rot = t_measure(wt.rotated, wt.diagonal_weight)
            assert t_rot == pytest.approx(t_orig, abs=1e-10)

    def test_rotation_equivariance_property(self, rng):
        # T[P^T D P, Q, U] = T[D, P Q P^T, P U P^T] for any orthogonal P
        for _ in range(10):
            g = random_valid_geometry(rng, 3)
            p, _ = np.linalg.qr(rng.normal(size=(3, 3)))
            d = np.diag(rng.uniform(0.2, 3.0, size=3))
            w = p.T @ d @ p
            g_rot = geometry_from_matrices(p @ g.qfim @ p.T, p @ g.uhlmann @ p.T)
            assert t_measure(g, w) == pytest.approx(t_measure(g_rot, d), abs=1e-10)


class TestNormalSpace:
    def test_mixed_qubit_single_direction(self):
        pt = tq_point()
        g = compute_geometry(pt.rho, pt.derivs)
        basis = tangent_normal_decomposition(pt.rho, g)
        assert basis.size == 1

    def test_pure_qubit_empty(self):
        cfg = model_config(
            "tunable_qubit", alpha=0.9, beta=0.2, gamma=np.pi / 4, theta=np.pi / 2, phi=0.3
        )
        pt = tunable_qubit_point(cfg, (0.4, 0.0))
        g = compute_geometry(pt.rho, pt.derivs)
        basis = tangent_normal_decomposition(pt.rho, g)
        assert basis.size == 0

    def test_qutrit_anchor_structure(self):
        cfg = model_config("su2_qutrit", alpha=np.pi / 4, beta=0.0, t=1.0)
        pt = su2_qutrit_point(cfg, np.pi, 0.0, 0.0)
        g = compute_geometry(pt.rho, pt.derivs)
        basis = tangent_normal_decomposition(pt.rho, g)
        assert g.tangent_dim == 3
        assert basis.size == 1
        assert np.linalg.matrix_rank(basis.gram.real, tol=1e-9) == basis.size
        # the only surviving coupling is to the third parameter direction
        assert np.abs(basis.coupling[2, 0]) == pytest.approx(2 * np.sqrt(2), abs=1e-8)
        assert np.max(np.abs(basis.coupling[:2, 0])) <= 1e-8

    def test_invariants_random_models(self, rng):
        for n, d in ((2, 2), (3, 2), (3, 3)):
            rho, derivs = random_model(rng, n, d)
            g = compute_geometry(rho, derivs)
            basis = tangent_normal_decomposition(rho, g)
            assert basis.size == n * n - 1 - g.tangent_dim
            for op in basis.ops:
                assert abs(np.trace(rho @ op)) <= 1e-10
                for dr in derivs:
                    assert abs(np.trace(dr @ op)) <= 1e-8
            if basis.size:
                assert np.max(np.abs(basis.gram.real - np.eye(basis.size))) <= 1e-8
            assert np.max(np.abs(basis.l_gram.real - g.qfim)) <= 1e-8
            assert np.max(np.abs(basis.l_gram.imag - g.uhlmann)) <= 1e-8

    def test_local_unbiasedness_reconstruction(self, rng):
        rho, derivs = random_model(rng, 3, 2)
        g = compute_geometry(rho, derivs)
        basis = tangent_normal_decomposition(rho, g)
        qinv = np.linalg.inv(g.qfim)
        k = rng.normal(size=(basis.size, 2))
        for mu in range(2):
            x = sum(g.slds[i] * qinv[i, mu] for i in range(2))
            x = x + sum(basis.ops[j] * k[j, mu] for j in range(basis.size))
            for nu in range(2):
                overlap = np.real(np.trace(derivs[nu] @ x))
                assert overlap == pytest.approx(1.0 if mu == nu else 0.0, abs=1e-8)

    def test_singular_qfim_policy(self):
        pt = tq_point(l1=(np.arctan2(0.3, 0.2) + 0.35) / 2)
        g = compute_geometry(pt.rho, pt.derivs)
        with pytest.raises(SingularQFIM):
            tangent_normal_decomposition(pt.rho, g)
        basis = tangent_normal_decomposition(pt.rho, g, pseudo_inverse=True)
        assert basis.size >= 1


class TestSingularValuePairing:
    def test_block_aligned_construction(self, rng):
        # build W, Q sharing an eigenframe with a block-canonical U there
        for d in (2, 3, 4):
            p, _ = np.linalg.qr(rng.normal(size=(d, d)))
            a_vals = rng.uniform(0.3, 2.0, size=d)
            q_vals = rng.uniform(0.5, 3.0, size=d)
            u_tilde = np.zeros((d, d))
            mus = []
            for k in range(d // 2):
                mu = rng.uniform(0.1, 1.0)
                mus.append(mu)
                u_tilde[2 * k, 2 * k + 1] = mu
                u_tilde[2 * k + 1, 2 * k] = -mu
            q = p @ np.diag(q_vals) @ p.T
            sqrt_w = p @ np.diag(a_vals * q_vals) @ p.T
            w = sqrt_w @ sqrt_w
            u = p @ u_tilde @ p.T
            g = geometry_from_matrices(q, u)
            direct, paired = singular_values_pairing(g, w)
            assert np.max(np.abs(direct - paired)) <= 1e-9
            expected = sorted(
                [a_vals[2 * k] * a_vals[2 * k + 1] * mu for k, mu in enumerate(mus)] * 2,
                reverse=True,
            )
            expected += [0.0] * (d - len(expected))
            assert np.max(np.abs(direct - np.array(expected[:d]))) <= 1e-9


class TestWeakCommutativity:
    def test_zero_curvature_zero_measures(self, rng):
        p = np.array([0.5, 0.3, 0.2])
        rho = np.diag(p).astype(complex)
        derivs = []
        for _ in range(2):
            v = rng.normal(size=3)
            v -= v.mean()
            derivs.append(np.diag(v).astype(complex))
        g = compute_geometry(rho, derivs)
        assert np.max(np.abs(g.uhlmann)) <= 1e-12
        assert quantumness_R(g) == 0.0
        for _ in range(5):
            assert t_measure(g, random_spd(rng, 2)) == 0.0

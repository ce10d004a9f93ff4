import numpy as np
import pytest

from landmarkbm import (
    LandmarkConfig,
    MetricFactorizationError,
    christoffel,
    cometric_matrix,
    cometric_partials,
    make_gaussian,
    make_matern,
    metric_matrix,
    sqrt_psd,
)
from landmarkbm.distance_sde import DistanceCoefficients, drift

from conftest import SHIPPED, random_config

EXP_M1 = 0.36787944117144233
EXP_M5 = 0.006737946999085467


def line_config(*xs):
    return LandmarkConfig(np.asarray(xs, dtype=float)[:, None])


class TestLandmarkConfig:
    def test_flat_is_landmark_major(self):
        cfg = LandmarkConfig(np.array([[1.0, 2.0], [3.0, 4.0]]))
        assert np.array_equal(cfg.flat, [1.0, 2.0, 3.0, 4.0])
        assert cfg.n == 2 and cfg.d == 2

    def test_rejects_coincident_landmarks(self):
        with pytest.raises(ValueError):
            LandmarkConfig(np.array([[0.0, 0.0], [0.0, 0.0]]))

    def test_rejects_single_landmark_and_bad_shapes(self):
        with pytest.raises(ValueError):
            LandmarkConfig(np.array([[0.0]]))
        with pytest.raises(ValueError):
            LandmarkConfig(np.array([0.0, 1.0]))

    def test_points_are_immutable(self):
        cfg = line_config(0.0, 1.0)
        with pytest.raises(ValueError):
            cfg.points[0, 0] = 5.0


class TestCometric:
    def test_two_landmark_line_gaussian(self):
        K = cometric_matrix(line_config(0.0, 1.0), make_gaussian())
        expected = np.array([[1.0, EXP_M1], [EXP_M1, 1.0]])
        assert np.allclose(K, expected, rtol=0, atol=1e-15)

    def test_block_structure_345_triangle(self):
        cfg = LandmarkConfig(np.array([[0.0, 0.0], [3.0, 4.0]]))
        K = cometric_matrix(cfg, make_matern(0.5))
        assert np.allclose(K[0:2, 2:4], EXP_M5 * np.eye(2), rtol=1e-14)
        assert np.allclose(K[0:2, 0:2], np.eye(2), rtol=0, atol=0)

    def test_positive_definite_on_random_configs(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            cfg = random_config(rng, n=int(rng.integers(2, 6)), d=int(rng.integers(1, 4)))
            for kernel in SHIPPED.values():
                K = cometric_matrix(cfg, kernel)
                np.linalg.cholesky(K)  # raises if not PD

    def test_rotation_equivariance(self):
        rng = np.random.default_rng(3)
        for d in (2, 3):
            cfg = random_config(rng, n=3, d=d)
            theta = 0.7
            R = np.eye(d)
            R[0, 0], R[0, 1] = np.cos(theta), -np.sin(theta)
            R[1, 0], R[1, 1] = np.sin(theta), np.cos(theta)
            rotated = LandmarkConfig(cfg.points @ R.T)
            B = np.kron(np.eye(cfg.n), R)
            K = cometric_matrix(cfg, SHIPPED["gauss"])
            K_rot = cometric_matrix(rotated, SHIPPED["gauss"])
            assert np.abs(K_rot - B @ K @ B.T).max() <= 1e-12

    def test_quadratic_form_identity(self):
        # gradient of the distance: xi^T K xi = 2 (lam - k(r))
        rng = np.random.default_rng(11)
        for d in (1, 2, 3):
            cfg = random_config(rng, n=2, d=d)
            u = cfg.points[0] - cfg.points[1]
            r = np.linalg.norm(u)
            xi = np.concatenate([u / r, -u / r])
            for kernel in SHIPPED.values():
                K = cometric_matrix(cfg, kernel)
                assert xi @ K @ xi == pytest.approx(2.0 * kernel.gap(r), abs=1e-10)


class TestMetric:
    def test_two_landmark_closed_form(self):
        kernel = make_gaussian()
        cfg = line_config(0.0, 1.0)
        g = metric_matrix(cfg, kernel)
        lam, k = 1.0, EXP_M1
        expected = np.array([[lam, -k], [-k, lam]]) / (lam**2 - k**2)
        assert np.allclose(g, expected, rtol=1e-14)

    def test_inverse_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            cfg = random_config(rng, n=3, d=2)
            K = cometric_matrix(cfg, SHIPPED["gauss"])
            g = metric_matrix(cfg, SHIPPED["gauss"])
            assert np.abs(g @ K - np.eye(K.shape[0])).max() <= 1e-10

    def test_factorization_failure_reports_condition(self):
        # distances ~ 1e-9 drive the Gaussian cometric numerically singular
        cfg = LandmarkConfig(1e-9 * np.arange(4, dtype=float)[:, None])
        with pytest.raises(MetricFactorizationError) as err:
            metric_matrix(cfg, make_gaussian())
        assert err.value.condition_estimate > 1e12


class TestPartials:
    def test_diagonal_blocks_vanish(self):
        rng = np.random.default_rng(2)
        cfg = random_config(rng, n=3, d=2)
        dK = cometric_partials(cfg, SHIPPED["gauss"])
        n, d = cfg.n, cfg.d
        for a in range(n * d):
            for i in range(n):
                block = dK[a, i * d : (i + 1) * d, i * d : (i + 1) * d]
                assert np.all(block == 0.0)

    def test_each_slice_symmetric(self):
        rng = np.random.default_rng(4)
        cfg = random_config(rng, n=3, d=2)
        dK = cometric_partials(cfg, SHIPPED["matern32"])
        for a in range(dK.shape[0]):
            assert np.array_equal(dK[a], dK[a].T)

    def test_chain_rule_sign_two_landmarks(self):
        # d k(|x - y|) / dx at (x, y) = (0, 1): moving x toward y raises k
        kernel = make_gaussian()
        dK = cometric_partials(line_config(0.0, 1.0), kernel)
        fd = (kernel.eval(abs(0.0 + 1e-7 - 1.0)) - kernel.eval(abs(-1e-7 - 1.0))) / 2e-7
        assert dK[0, 0, 1] == pytest.approx(fd, rel=1e-6)
        assert dK[0, 0, 1] == pytest.approx(2 * EXP_M1, rel=1e-12)

    def test_against_finite_differences(self):
        rng = np.random.default_rng(12)
        h = 1e-5
        for _ in range(20):
            cfg = random_config(rng)
            kernel = SHIPPED["gauss"]
            dK = cometric_partials(cfg, kernel)
            nd = cfg.n * cfg.d
            flat = cfg.flat
            scale = np.abs(dK).max()
            for a in range(nd):
                fp, fm = flat.copy(), flat.copy()
                fp[a] += h
                fm[a] -= h
                Kp = cometric_matrix(LandmarkConfig(fp.reshape(cfg.n, cfg.d)), kernel)
                Km = cometric_matrix(LandmarkConfig(fm.reshape(cfg.n, cfg.d)), kernel)
                fd = (Kp - Km) / (2 * h)
                assert np.abs(dK[a] - fd).max() <= 1e-5 * max(scale, 1.0)


def fd_christoffel(cfg, kernel, h=1e-5):
    """Independent oracle: finite-difference the metric, then contract."""
    nd = cfg.n * cfg.d
    K = cometric_matrix(cfg, kernel)
    dg = np.zeros((nd, nd, nd))
    flat = cfg.flat
    for a in range(nd):
        fp, fm = flat.copy(), flat.copy()
        fp[a] += h
        fm[a] -= h
        gp = metric_matrix(LandmarkConfig(fp.reshape(cfg.n, cfg.d)), kernel)
        gm = metric_matrix(LandmarkConfig(fm.reshape(cfg.n, cfg.d)), kernel)
        dg[a] = (gp - gm) / (2 * h)
    return 0.5 * (
        np.einsum("ia,lam->ilm", K, dg)
        + np.einsum("ia,mal->ilm", K, dg)
        - np.einsum("ia,alm->ilm", K, dg)
    )


class TestChristoffel:
    def test_symmetry_exact(self):
        rng = np.random.default_rng(21)
        cfg = random_config(rng, n=3, d=2)
        G = christoffel(cfg, SHIPPED["matern52"])
        assert np.array_equal(G, np.transpose(G, (0, 2, 1)))

    def test_translation_invariance(self):
        rng = np.random.default_rng(22)
        cfg = random_config(rng, n=3, d=2)
        shift = np.array([1.5, -2.25])
        shifted = LandmarkConfig(cfg.points + shift)
        G0 = christoffel(cfg, SHIPPED["gauss"])
        G1 = christoffel(shifted, SHIPPED["gauss"])
        assert np.abs(G0 - G1).max() <= 1e-12

    def test_against_fd_oracle(self):
        rng = np.random.default_rng(23)
        for trial in range(20):
            cfg = random_config(rng)
            kernel = SHIPPED["gauss"] if trial % 2 == 0 else SHIPPED["matern32"]
            G = christoffel(cfg, kernel)
            G_fd = fd_christoffel(cfg, kernel)
            rel = np.abs(G - G_fd).max() / max(np.abs(G_fd).max(), 1e-12)
            assert rel <= 1e-5

    def test_drift_oracle_symmetric_pair(self):
        # for q = (-s, s) on the line the Euler drift projected on each
        # landmark is half the scalar distance drift at separation 2s
        for kernel in (SHIPPED["matern12"], SHIPPED["gauss"]):
            for s in (0.25, 0.5, 1.0):
                cfg = line_config(-s, s)
                K = cometric_matrix(cfg, kernel)
                G = christoffel(cfg, kernel)
                mu = -0.5 * np.einsum("lm,ilm->i", K, G)
                b = drift(DistanceCoefficients(kernel, 1), 2.0 * s)
                # landmark 1 sits left: it moves away from collision, i.e.
                # by -b/2; landmark 2 by +b/2
                assert mu[0] == pytest.approx(-0.5 * b, abs=1e-12)
                assert mu[1] == pytest.approx(+0.5 * b, abs=1e-12)

    def test_midpoint_stationary_symmetric_pair(self):
        cfg = line_config(-0.5, 0.5)
        K = cometric_matrix(cfg, SHIPPED["gauss"])
        G = christoffel(cfg, SHIPPED["gauss"])
        mu = -0.5 * np.einsum("lm,ilm->i", K, G)
        assert mu[0] + mu[1] == pytest.approx(0.0, abs=1e-14)


class TestSqrtPsd:
    def test_identity(self):
        assert np.array_equal(sqrt_psd(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        S = sqrt_psd(np.diag([4.0, 9.0]))
        assert np.allclose(S, np.diag([2.0, 3.0]), rtol=1e-15)

    def test_two_by_two_closed_form(self):
        lam, k = 1.0, 0.25
        K = np.array([[lam, k], [k, lam]])
        S = sqrt_psd(K)
        sp, sm = np.sqrt(lam + k), np.sqrt(lam - k)
        expected = 0.5 * np.array([[sp + sm, sp - sm], [sp - sm, sp + sm]])
        assert np.allclose(S, expected, rtol=1e-14)
        assert np.abs(S @ S - K).max() <= 1e-14

    def test_square_relation_on_random_cometrics(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            cfg = random_config(rng)
            K = cometric_matrix(cfg, SHIPPED["matern52"])
            S = sqrt_psd(K)
            assert np.array_equal(S, S.T)
            err = np.linalg.norm(S @ S - K) / np.linalg.norm(K)
            assert err <= 1e-10

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            sqrt_psd(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            sqrt_psd(np.array([[1.0, 0.5], [0.0, 1.0]]))

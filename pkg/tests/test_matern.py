import numpy as np
import pytest

from lqmatern.matern import (NU_CAP, LocationSet, MaternParams, build_cov,
                             build_cov_grad, build_cov_hess, matern_cov,
                             matern_grad, matern_hess)


def rand_theta(rng, nu_hi=3.0):
    return MaternParams(rng.uniform(0.3, 3.0), rng.uniform(0.05, 1.0),
                        rng.uniform(0.1, nu_hi))


def rand_locs(rng, n, min_dist=0.0):
    while True:
        c = rng.uniform(0.0, 1.0, size=(n, 2))
        d = np.sqrt(((c[:, None, :] - c[None, :, :]) ** 2).sum(-1))
        off = d[~np.eye(n, dtype=bool)]
        if n == 1 or off.min() > min_dist:
            return LocationSet(c)


class TestMaternParams:
    def test_validation(self):
        for bad in [(-1, 0.1, 0.5), (1, 0.0, 0.5), (1, 0.1, -0.5),
                    (np.nan, 0.1, 0.5), (1, np.inf, 0.5)]:
            with pytest.raises(ValueError):
                MaternParams(*bad)
        with pytest.raises(ValueError):
            MaternParams(1.0, 0.1, NU_CAP + 0.1)

    def test_array_round_trip(self):
        th = MaternParams(2.0, 0.3, 1.2)
        assert MaternParams.from_array(th.as_array()) == th


class TestLocationSet:
    def test_validation(self):
        with pytest.raises(ValueError):
            LocationSet(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            LocationSet(np.array([[0.5, 1.5]]))
        with pytest.raises(ValueError):
            LocationSet(np.array([[-0.1, 0.5]]))

    def test_duplicate_locations_error(self):
        locs = LocationSet(np.array([[0.2, 0.2], [0.2, 0.2], [0.5, 0.5]]))
        with pytest.raises(ValueError):
            locs.dists


class TestMaternCov:
    def test_zero_distance_is_exact_variance(self):
        assert matern_cov(0.0, MaternParams(2.0, 0.1, 0.7)) == 2.0

    def test_half_closed_form_point(self):
        assert matern_cov(0.1, MaternParams(1, 0.1, 0.5)) == \
            pytest.approx(np.exp(-1.0), rel=1e-12)

    def test_three_halves_closed_form_point(self):
        assert matern_cov(0.1, MaternParams(1, 0.1, 1.5)) == \
            pytest.approx(2 * np.exp(-1.0), rel=1e-12)

    def test_closed_forms_over_h(self):
        h = np.linspace(1e-4, 2.0, 400)
        s2, beta = 1.7, 0.23
        got = matern_cov(h, MaternParams(s2, beta, 0.5))
        want = s2 * np.exp(-h / beta)
        assert np.allclose(got, want, rtol=1e-10)
        got = matern_cov(h, MaternParams(s2, beta, 1.5))
        t = h / beta
        want = s2 * (1 + t) * np.exp(-t)
        assert np.allclose(got, want, rtol=1e-10)

    def test_decreasing_and_bounded(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            th = rand_theta(rng)
            h = np.sort(rng.uniform(0.0, 2.0, size=50))
            v = matern_cov(h, th)
            assert np.all(v > 0.0)
            assert np.all(v <= th.sigma2 + 1e-15)
            assert np.all(np.diff(matern_cov(np.unique(h) + 1e-3, th)) < 0.0)

    def test_scaling_law_in_sigma2(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            th = rand_theta(rng)
            c = rng.uniform(0.1, 10.0)
            scaled = MaternParams(c * th.sigma2, th.beta, th.nu)
            h = rng.uniform(0.01, 2.0)
            assert matern_cov(h, scaled) == pytest.approx(
                c * matern_cov(h, th), rel=1e-12)


class TestMaternGrad:
    def test_sigma2_component_is_cov_over_sigma2(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            th = rand_theta(rng)
            h = rng.uniform(0.01, 1.5)
            g = matern_grad(h, th)
            assert g[0] == pytest.approx(matern_cov(h, th) / th.sigma2,
                                         rel=1e-12)

    def test_beta_component_closed_form(self):
        # d/dbeta of sigma2 e^{-h/beta} = sigma2 e^{-h/beta} h / beta^2
        g = matern_grad(0.1, MaternParams(1, 0.1, 0.5))
        assert g[1] == pytest.approx(10.0 * np.exp(-1.0), rel=1e-8)

    def test_zero_distance_convention(self):
        g = matern_grad(0.0, MaternParams(1.3, 0.2, 0.9))
        assert np.array_equal(g, [1.0, 0.0, 0.0])

    def test_finite_differences(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            th = rand_theta(rng)
            h = rng.uniform(0.02, 1.5)
            g = matern_grad(h, th)
            t = th.as_array()
            for j, (rel_tol, s_rel) in enumerate([(1e-6, 1e-6), (1e-6, 1e-6),
                                                  (1e-4, 1e-5)]):
                s = s_rel * t[j]
                tp, tm = t.copy(), t.copy()
                tp[j] += s
                tm[j] -= s
                fd = (matern_cov(h, MaternParams.from_array(tp))
                      - matern_cov(h, MaternParams.from_array(tm))) / (2 * s)
                scale = max(abs(fd), 1e-8 * th.sigma2)
                assert abs(g[j] - fd) / scale < rel_tol


class TestMaternHess:
    def test_sigma2_sigma2_is_zero(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            th = rand_theta(rng)
            assert matern_hess(rng.uniform(0.01, 1.5), th)[0, 0] == 0.0

    def test_sigma2_cross_terms(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            th = rand_theta(rng)
            h = rng.uniform(0.01, 1.5)
            hh = matern_hess(h, th)
            g = matern_grad(h, th)
            assert hh[0, 1] == pytest.approx(g[1] / th.sigma2, rel=1e-10)
            assert hh[0, 2] == pytest.approx(g[2] / th.sigma2, rel=1e-10)

    def test_exact_symmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            hh = matern_hess(rng.uniform(0.01, 1.5), rand_theta(rng))
            assert np.array_equal(hh, hh.T)

    def test_zero_distance_convention(self):
        assert np.array_equal(matern_hess(0.0, MaternParams(1.3, 0.2, 0.9)),
                              np.zeros((3, 3)))

    def test_finite_differences_of_grad(self):
        rng = np.random.default_rng(8)
        for _ in range(40):
            th = rand_theta(rng, nu_hi=2.0)
            h = rng.uniform(0.05, 1.5)
            hh = matern_hess(h, th)
            t = th.as_array()
            for k in range(3):
                # the nu column differences an inner-FD gradient, so a tiny
                # outer step would amplify the inner stencil noise
                s = 1e-6 * t[k] if k < 2 else 1e-3 * max(1.0, t[k])
                tp, tm = t.copy(), t.copy()
                tp[k] += s
                tm[k] -= s
                fd = (matern_grad(h, MaternParams.from_array(tp))
                      - matern_grad(h, MaternParams.from_array(tm))) / (2 * s)
                scale = np.maximum(np.abs(fd), 1e-6 * th.sigma2)
                assert np.all(np.abs(hh[:, k] - fd) / scale < 1e-4)


class TestBuilders:
    def test_single_location(self):
        locs = LocationSet(np.array([[0.5, 0.5]]))
        th = MaternParams(2.5, 0.1, 0.5)
        assert np.array_equal(build_cov(locs, th), [[2.5]])

    def test_two_point_off_diagonal(self):
        locs = LocationSet(np.array([[0.2, 0.2], [0.3, 0.2]]))
        cov = build_cov(locs, MaternParams(1, 0.1, 0.5))
        assert cov[0, 1] == pytest.approx(np.exp(-1.0), rel=1e-10)
        assert cov[0, 1] == cov[1, 0]

    def test_diagonal_and_symmetry(self):
        rng = np.random.default_rng(9)
        th = rand_theta(rng)
        locs = rand_locs(rng, 12, min_dist=1e-3)
        cov = build_cov(locs, th)
        assert np.array_equal(np.diag(cov), np.full(12, th.sigma2))
        assert np.array_equal(cov, cov.T)

    def test_spd_on_random_sets(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            n = int(rng.integers(2, 65))
            locs = rand_locs(rng, n, min_dist=1e-3)
            th = rand_theta(rng, nu_hi=2.0)
            np.linalg.cholesky(build_cov(locs, th))

    def test_grad_sigma2_slice(self):
        rng = np.random.default_rng(11)
        th = rand_theta(rng)
        locs = rand_locs(rng, 6, min_dist=0.05)
        cov = build_cov(locs, th)
        dS = build_cov_grad(locs, th)
        assert np.allclose(dS[0], cov / th.sigma2, rtol=1e-12)

    def test_two_point_matches_scalar(self):
        locs = LocationSet(np.array([[0.1, 0.1], [0.4, 0.5]]))
        th = MaternParams(1.4, 0.3, 0.8)
        h = locs.dists[0, 1]
        dS = build_cov_grad(locs, th)
        hh = build_cov_hess(locs, th)
        g = matern_grad(h, th)
        H = matern_hess(h, th)
        for j in range(3):
            assert dS[j, 0, 1] == g[j]
            assert dS[j, 0, 0] == (1.0 if j == 0 else 0.0)
            for k in range(3):
                assert hh[j, k, 0, 1] == H[j, k]
                assert hh[j, k, 0, 0] == 0.0

    def test_builder_finite_differences(self):
        rng = np.random.default_rng(12)
        th = rand_theta(rng, nu_hi=1.6)
        locs = rand_locs(rng, 5, min_dist=0.08)
        dS = build_cov_grad(locs, th)
        t = th.as_array()
        for j, rel_tol in enumerate([1e-6, 1e-6, 1e-4]):
            s = (1e-6 if j < 2 else 1e-5) * t[j]
            tp, tm = t.copy(), t.copy()
            tp[j] += s
            tm[j] -= s
            fd = (build_cov(locs, MaternParams.from_array(tp))
                  - build_cov(locs, MaternParams.from_array(tm))) / (2 * s)
            scale = max(np.abs(fd).max(), 1e-8)
            assert np.abs(dS[j] - fd).max() / scale < rel_tol

    def test_hess_parameter_symmetry(self):
        rng = np.random.default_rng(13)
        th = rand_theta(rng)
        locs = rand_locs(rng, 5, min_dist=0.05)
        hh = build_cov_hess(locs, th)
        for j in range(3):
            for k in range(3):
                assert np.array_equal(hh[j, k], hh[k, j])
                assert np.array_equal(hh[j, k], hh[j, k].T)

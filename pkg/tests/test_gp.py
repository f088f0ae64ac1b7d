import numpy as np
import pytest

from calwq import ModelKind, ModelSpec, SingularKernel, load_model
from calwq.models import GaussianProcessModel, fit_gaussian_process


def gp_spec(seed=0, **hp):
    return ModelSpec(ModelKind.GAUSSIAN_PROCESS, hp, seed)


class TestClosedForms:
    def test_single_point_posterior_mean(self):
        # one observation: mean at the training input is y0 * s2 / (s2 + noise)
        y0 = 3.0
        for s2, noise in [(1.0, 1.0), (2.0, 0.5), (1.0, 1e-4)]:
            m = fit_gaussian_process(
                np.array([[0.7]]), np.array([y0]),
                gp_spec(signal=s2, nugget=noise, lengthscale=1.0, standardize_y=False))
            mean, var = m.predict_with_variance(np.array([[0.7]]))
            assert mean[0] == pytest.approx(y0 * s2 / (s2 + noise), abs=1e-9)
            # var at the point: s2 - s2^2/(s2+noise) + noise
            want = s2 - s2**2 / (s2 + noise) + noise
            assert var[0] == pytest.approx(want, abs=1e-9)

    def test_two_point_posterior_matches_direct_solve(self):
        X = np.array([[0.0], [1.0]])
        y = np.array([1.0, -1.0])
        ell, s2, noise = 1.0, 1.5, 0.1
        m = fit_gaussian_process(X, y, gp_spec(
            signal=s2, nugget=noise, lengthscale=ell, standardize_y=False))
        # independent oracle in the model's standardized x coordinates
        Xs = (X - X.mean(0)) / X.std(0)
        q = np.array([[0.25]])
        qs = (q - X.mean(0)) / X.std(0)

        def k(a, b):
            return s2 * np.exp(-0.5 * ((a - b) / ell) ** 2)

        K = np.array([[k(Xs[0, 0], Xs[0, 0]), k(Xs[0, 0], Xs[1, 0])],
                      [k(Xs[1, 0], Xs[0, 0]), k(Xs[1, 0], Xs[1, 0])]]) + noise * np.eye(2)
        kst = np.array([k(qs[0, 0], Xs[0, 0]), k(qs[0, 0], Xs[1, 0])])
        want_mean = kst @ np.linalg.solve(K, y)
        want_var = s2 - kst @ np.linalg.solve(K, kst) + noise
        mean, var = m.predict_with_variance(q)
        assert mean[0] == pytest.approx(want_mean, abs=1e-10)
        assert var[0] == pytest.approx(want_var, abs=1e-10)


class TestPosteriorShape:
    def test_interpolates_smooth_function(self):
        X = np.linspace(0.0, 1.0, 12).reshape(-1, 1)
        y = 2.0 * X[:, 0] + 1.0
        m = fit_gaussian_process(X, y, gp_spec(nugget=1e-8))
        probe = np.linspace(0.05, 0.95, 7).reshape(-1, 1)
        np.testing.assert_allclose(m.predict(probe), 2.0 * probe[:, 0] + 1.0, atol=1e-3)

    def test_far_field_reverts_to_target_mean(self, rng):
        X = rng.normal(size=(40, 1))
        y = 5.0 + np.sin(X[:, 0])
        m = fit_gaussian_process(X, y, gp_spec())
        far = np.array([[1000.0]])
        assert m.predict(far)[0] == pytest.approx(float(np.mean(y)), abs=1e-6)

    def test_far_field_variance_saturates(self, rng):
        X = rng.normal(size=(30, 1))
        y = np.sin(X[:, 0])
        m = fit_gaussian_process(X, y, gp_spec(standardize_y=False))
        _, var = m.predict_with_variance(np.array([[500.0]]))
        assert var[0] == pytest.approx(m.signal + m.nugget, abs=1e-9)

    def test_variance_never_exceeds_prior(self, rng):
        X = rng.normal(size=(60, 2))
        y = X[:, 0] + rng.normal(size=60) * 0.1
        m = fit_gaussian_process(X, y, gp_spec())
        probe = rng.normal(size=(100, 2)) * 3.0
        _, var = m.predict_with_variance(probe)
        cap = (m.signal + m.nugget) * m.y_scale**2
        assert np.all(var <= cap + 1e-9)
        assert np.all(var >= 0.0)


class TestHyperparameters:
    def test_fixed_lengthscale_skips_grid(self, rng):
        X = rng.normal(size=(30, 3))
        y = rng.normal(size=30)
        m = fit_gaussian_process(X, y, gp_spec(lengthscale=0.75))
        np.testing.assert_array_equal(m.lengthscales, np.full(3, 0.75))

    def test_per_dimension_lengthscale(self, rng):
        X = rng.normal(size=(30, 2))
        y = rng.normal(size=30)
        m = fit_gaussian_process(X, y, gp_spec(lengthscale=[0.5, 2.0]))
        np.testing.assert_array_equal(m.lengthscales, np.array([0.5, 2.0]))

    def test_grid_prefers_matching_lengthscale(self, rng):
        # a very wiggly function should pick the shortest grid lengthscale
        X = np.linspace(-2.0, 2.0, 120).reshape(-1, 1)
        y = np.sin(6.0 * X[:, 0])
        m = fit_gaussian_process(X, y, gp_spec())
        assert m.lengthscales[0] == 0.5

    def test_subsampling_caps_training_set(self, rng):
        X = rng.normal(size=(500, 2))
        y = rng.normal(size=500)
        m = fit_gaussian_process(X, y, gp_spec(max_train_points=100))
        assert m.X_std.shape[0] == 100
        assert any("subsampled" in w for w in m.warnings)

    def test_singular_kernel_raises(self):
        # fifty identical points and a vanishing nugget can't factorize
        X = np.zeros((50, 1))
        y = np.ones(50)
        with pytest.raises(SingularKernel):
            fit_gaussian_process(X, y, gp_spec(nugget=1e-300, standardize_y=False))

    def test_nugget_escalation_warns(self, rng):
        X = np.repeat(rng.normal(size=(5, 1)), 10, axis=0)
        y = np.repeat(rng.normal(size=5), 10)
        m = fit_gaussian_process(X, y, gp_spec(nugget=1e-14))
        assert any("escalated" in w for w in m.warnings) or m.nugget == 1e-14


class TestContract:
    def test_determinism(self, rng):
        X = rng.normal(size=(80, 2))
        y = rng.normal(size=80)
        a = fit_gaussian_process(X, y, gp_spec())
        b = fit_gaussian_process(X, y, gp_spec())
        np.testing.assert_array_equal(a.predict(X), b.predict(X))

    def test_save_load_round_trip(self, tmp_path, rng):
        X = rng.normal(size=(40, 2))
        y = np.sin(X[:, 0])
        m = fit_gaussian_process(X, y, gp_spec())
        p = tmp_path / "gp.npz"
        m.save(p)
        back = load_model(p)
        assert isinstance(back, GaussianProcessModel)
        probe = rng.normal(size=(10, 2))
        np.testing.assert_array_equal(back.predict(probe), m.predict(probe))
        mv, vv = m.predict_with_variance(probe)
        bv, bvar = back.predict_with_variance(probe)
        np.testing.assert_array_equal(vv, bvar)

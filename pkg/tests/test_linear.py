import numpy as np
import pytest

from calwq import DegenerateInput, ModelKind, ModelSpec, fit, load_model
from calwq.models import LinearModel, fit_linear


def spec(**hp):
    return ModelSpec(ModelKind.LINEAR, hp, 0)


class TestExactFits:
    def test_line_through_two_points(self):
        X = np.array([[0.0], [1.0]])
        y = np.array([1.0, 3.0])
        m = fit_linear(X, y, spec())
        assert m.coef[0] == pytest.approx(2.0, abs=1e-12)
        assert m.intercept == pytest.approx(1.0, abs=1e-12)

    def test_three_point_least_squares_hand_solved(self):
        # (0,1), (1,2), (2,2): normal equations give slope 1/2, intercept 7/6
        X = np.array([[0.0], [1.0], [2.0]])
        y = np.array([1.0, 2.0, 2.0])
        m = fit_linear(X, y, spec())
        assert m.coef[0] == pytest.approx(0.5, abs=1e-12)
        assert m.intercept == pytest.approx(7.0 / 6.0, abs=1e-12)

    def test_multivariate_exact_recovery(self, rng):
        X = rng.normal(size=(200, 5))
        beta = np.array([1.5, -2.0, 0.0, 3.25, 0.5])
        y = X @ beta + 4.0
        m = fit_linear(X, y, spec())
        np.testing.assert_allclose(m.coef, beta, atol=1e-10)
        assert m.intercept == pytest.approx(4.0, abs=1e-10)
        np.testing.assert_allclose(m.predict(X), y, atol=1e-9)

    def test_matches_lstsq_on_noisy_data(self, rng):
        X = rng.normal(size=(300, 4))
        y = X @ np.array([1.0, 2.0, -1.0, 0.5]) + rng.normal(size=300)
        m = fit_linear(X, y, spec())
        A = np.hstack([np.ones((300, 1)), X])
        beta, *_ = np.linalg.lstsq(A, y, rcond=None)
        assert m.intercept == pytest.approx(beta[0], abs=1e-9)
        np.testing.assert_allclose(m.coef, beta[1:], atol=1e-9)


class TestDegenerateInputs:
    def test_duplicate_column_gets_ridge_warning(self, rng):
        x = rng.normal(size=100)
        X = np.column_stack([x, x])
        y = 3.0 * x + 1.0
        m = fit_linear(X, y, spec())
        assert any("RankDeficient" in w for w in m.warnings)
        # the ridge solution splits the weight between the twin columns
        np.testing.assert_allclose(m.predict(X), y, atol=1e-4)

    def test_constant_target(self):
        X = np.arange(10.0).reshape(-1, 1)
        y = np.full(10, 6.5)
        m = fit_linear(X, y, spec())
        assert m.coef[0] == pytest.approx(0.0, abs=1e-12)
        assert m.intercept == pytest.approx(6.5, abs=1e-12)

    def test_non_finite_input_raises(self):
        X = np.array([[0.0], [np.inf]])
        with pytest.raises((DegenerateInput, ValueError)):
            fit_linear(X, np.array([1.0, 2.0]), spec())


class TestModelContract:
    def test_determinism(self, rng):
        X = rng.normal(size=(50, 3))
        y = rng.normal(size=50)
        a = fit_linear(X, y, spec())
        b = fit_linear(X, y, spec())
        assert np.array_equal(a.coef, b.coef)
        assert a.intercept == b.intercept

    def test_one_dim_predict_reshape(self):
        X = np.array([[0.0], [1.0]])
        m = fit_linear(X, np.array([1.0, 3.0]), spec())
        assert m.predict(np.array([2.0]))[0] == pytest.approx(5.0)

    def test_save_load_round_trip(self, tmp_path, rng):
        X = rng.normal(size=(40, 3))
        y = rng.normal(size=40)
        m = fit_linear(X, y, spec(), ["a", "b", "c"])
        p = tmp_path / "lm.npz"
        m.save(p)
        back = load_model(p)
        assert isinstance(back, LinearModel)
        assert np.array_equal(back.predict(X), m.predict(X))
        assert back.column_names == ["a", "b", "c"]

    def test_dispatch_through_fit(self, rng):
        X = rng.normal(size=(30, 2))
        y = X @ np.array([1.0, -1.0]) + 2.0
        m = fit(spec(), X, y)
        assert m.kind is ModelKind.LINEAR
        np.testing.assert_allclose(m.predict(X), y, atol=1e-9)

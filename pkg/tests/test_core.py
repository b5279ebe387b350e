import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvemean.core import (
    AlignmentResult,
    FourierCurve,
    GridCurve,
    as_signal,
    as_signal_matrix,
    grid_points,
    is_zero_mean,
    project_zero_mean,
)


class TestValidation:
    def test_as_signal_rejects_short(self):
        with pytest.raises(ValueError):
            as_signal([1.0])

    def test_as_signal_rejects_nan(self):
        with pytest.raises(ValueError):
            as_signal([1.0, np.nan])

    def test_as_signal_matrix_shapes(self):
        X = as_signal_matrix([[1.0, 2.0], [3.0, 4.0]])
        assert X.shape == (2, 2)
        with pytest.raises(ValueError):
            as_signal_matrix(np.ones((3, 2)), min_signals=4)

    def test_grid_points_convention(self):
        t = grid_points(4)
        assert np.allclose(t, [0.25, 0.5, 0.75, 1.0])


class TestFourierCurve:
    def test_constant_curve(self):
        c = FourierCurve([3.0])
        assert c.value(0.77) == pytest.approx(3.0)
        assert c.derivative(0.5) == 0.0

    def test_pure_harmonic(self):
        # c_1 = c_{-1} = 1/2 is cos(2 pi t)
        c = FourierCurve([0.0, 0.5])
        assert c.value(0.0) == pytest.approx(1.0, abs=1e-14)
        assert c.value(0.25) == pytest.approx(0.0, abs=1e-14)
        assert c.derivative(0.0) == pytest.approx(0.0, abs=1e-12)
        assert c.derivative(0.25) == pytest.approx(-2.0 * np.pi)

    def test_periodicity(self):
        rng = np.random.default_rng(0)
        c = FourierCurve(rng.standard_normal(6) + 1j * rng.standard_normal(6))
        t = rng.uniform(-2, 2, size=100)
        assert np.allclose(c.value(t), c.value(t + 1.0), atol=1e-12)

    def test_derivative_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        c = FourierCurve(rng.standard_normal(8) + 1j * rng.standard_normal(8))
        t = rng.uniform(0, 1, size=50)
        h = 1e-6
        fd = (c.value(t + h) - c.value(t - h)) / (2 * h)
        exact = c.derivative(t)
        assert np.max(np.abs(exact - fd)) / np.max(np.abs(fd)) < 1e-4

    def test_rejects_nonfinite_time(self):
        c = FourierCurve([1.0, 0.3])
        with pytest.raises(ValueError):
            c.value(np.nan)

    def test_vectorized_matches_scalar(self):
        c = FourierCurve([0.2, 0.1 - 0.4j, 0.05j])
        t = np.linspace(0, 1, 7)
        vec = c.value(t)
        assert vec.shape == (7,)
        for i, ti in enumerate(t):
            assert vec[i] == pytest.approx(c.value(float(ti)))


class TestGridCurve:
    def test_hits_samples_at_grid(self):
        vals = np.array([1.0, -2.0, 3.0, 0.5])
        c = GridCurve(vals)
        t = grid_points(4)
        assert np.allclose(c.value(t), vals)

    def test_wraps_periodically(self):
        c = GridCurve([1.0, 2.0, 3.0, 4.0])
        # t = 0 is equivalent to t = 1, the last sample
        assert c.value(0.0) == pytest.approx(4.0)
        rng = np.random.default_rng(2)
        t = rng.uniform(0, 1, 50)
        assert np.allclose(c.value(t), c.value(t + 3.0), atol=1e-9)

    def test_interpolates_midpoints(self):
        c = GridCurve([0.0, 1.0])
        assert c.value(0.75) == pytest.approx(0.5)

    def test_derivative_is_segment_slope(self):
        c = GridCurve([0.0, 1.0, 1.0, 0.0])
        assert c.derivative(0.3) == pytest.approx(4.0)  # rising segment
        assert c.derivative(0.6) == pytest.approx(0.0)  # flat segment


class TestProjectZeroMean:
    def test_already_centered_unchanged(self):
        raw = np.array([[0.1], [-0.1]])
        assert np.allclose(project_zero_mean(raw), raw)

    def test_constant_removed(self):
        out = project_zero_mean(np.ones((3, 1)))
        assert np.allclose(out, 0.0)

    def test_componentwise(self):
        out = project_zero_mean(np.array([[2.0, 0.0], [0.0, 2.0]]))
        assert np.allclose(out, [[1.0, -1.0], [-1.0, 1.0]])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            project_zero_mean(np.empty((0, 2)))

    @given(st.integers(2, 8), st.integers(1, 4), st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_idempotent_and_centered(self, J, p, seed):
        raw = np.random.default_rng(seed).uniform(-5, 5, size=(J, p))
        once = project_zero_mean(raw)
        twice = project_zero_mean(once)
        assert is_zero_mean(once)
        assert np.allclose(once, twice, atol=1e-14)


def test_alignment_result_defaults():
    res = AlignmentResult(params=np.zeros((2, 1)), mean_curve=np.zeros(4))
    assert res.converged and res.iterations == 0 and res.trace == []

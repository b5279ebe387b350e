import numpy as np
import pytest

from curvemean.core import FourierCurve, GridCurve, grid_points, project_zero_mean
from curvemean.criterion import (
    AlignmentCriterion,
    DiffeoFamily,
    TranslationFamily,
    make_family,
)
from curvemean.smoothing import fourier_smooth


def random_fourier_curves(rng, J=4, n=32, cutoff=9):
    return [fourier_smooth(rng.standard_normal(n), cutoff) for _ in range(J)]


def finite_difference_gradient(criterion, params, h):
    fd = np.zeros_like(params)
    for j in range(params.shape[0]):
        for q in range(params.shape[1]):
            e = np.zeros_like(params)
            e[j, q] = h
            fd[j, q] = (criterion.value(params + e)
                        - criterion.value(params - e)) / (2 * h)
    return fd


class TestConstruction:
    def test_needs_two_curves(self):
        with pytest.raises(ValueError):
            AlignmentCriterion([FourierCurve([1.0])], "translation")

    def test_param_shape_checked(self):
        crit = AlignmentCriterion(
            random_fourier_curves(np.random.default_rng(0)), "translation"
        )
        with pytest.raises(ValueError):
            crit.value(np.zeros((3, 1)))

    def test_make_family(self):
        assert isinstance(make_family("translation"), TranslationFamily)
        fam = make_family("diffeo", n_basis=6, degree=2, ode_steps=30)
        assert fam.n_params == 6 and fam.ode_steps == 30
        assert make_family(fam) is fam
        with pytest.raises(ValueError):
            make_family("affine")


class TestBacktransformedMean:
    def test_zero_params_plain_average(self):
        rng = np.random.default_rng(1)
        curves = random_fourier_curves(rng)
        crit = AlignmentCriterion(curves, "translation", 32)
        t = rng.uniform(0, 1, 16)
        expected = np.mean([c.value(t) for c in curves], axis=0)
        assert np.allclose(crit.backtransformed_mean(crit.zero_params(), t),
                           expected, atol=1e-12)

    def test_identical_curves_any_centered_shift(self):
        curve = FourierCurve([0.0, 0.3 + 0.2j])
        crit = AlignmentCriterion([curve, curve], "translation", 32)
        assert crit.backtransformed_mean(np.zeros((2, 1)), 0.37) == (
            pytest.approx(curve.value(0.37))
        )

    def test_matches_direct_summation_oracle(self):
        rng = np.random.default_rng(2)
        curves = random_fourier_curves(rng, J=5)
        crit = AlignmentCriterion(curves, "translation", 32)
        params = project_zero_mean(rng.uniform(-0.2, 0.2, (5, 1)))
        t = rng.uniform(0, 1, 9)
        direct = sum(c.value(t + p[0]) for c, p in zip(curves, params)) / 5
        assert np.allclose(crit.backtransformed_mean(params, t), direct,
                           atol=1e-12)


class TestEnergyValue:
    def test_identical_curves_zero(self):
        curve = FourierCurve([0.1, 0.4 - 0.1j, 0.02])
        crit = AlignmentCriterion([curve, curve, curve], "translation", 64)
        assert crit.value(np.zeros((3, 1))) == pytest.approx(0.0, abs=1e-20)

    def test_perfect_realignment_reaches_zero(self):
        s = 0.07
        base = FourierCurve([0.0, 0.5])  # cos(2 pi t)
        shifted = FourierCurve([0.0, 0.5 * np.exp(-2j * np.pi * 2 * s)])
        crit = AlignmentCriterion([base, shifted], "translation", 64)
        # base must move back by s and the 2s-delayed copy forward by s
        params = np.array([[-s], [s]])
        assert crit.value(params) == pytest.approx(0.0, abs=1e-15)

    def test_cosine_pair_closed_form(self):
        # both curves cos(2 pi t); spread at (s, -s) is sin^2(2 pi s)/2
        curve = FourierCurve([0.0, 0.5])
        crit = AlignmentCriterion([curve, curve], "translation", 256)
        for s in (0.03, 0.11, 0.2):
            params = np.array([[s], [-s]])
            dense = np.linspace(0, 1, 20001)[1:]
            a = np.cos(2 * np.pi * (dense + s))
            b = np.cos(2 * np.pi * (dense - s))
            m = 0.5 * (a + b)
            oracle = 0.5 * (np.mean((a - m) ** 2) + np.mean((b - m) ** 2))
            assert crit.value(params) == pytest.approx(oracle, abs=1e-8)

    def test_translation_shift_equivariance(self):
        rng = np.random.default_rng(3)
        curves = random_fourier_curves(rng)
        crit = AlignmentCriterion(curves, "translation", 32)
        params = rng.uniform(-0.1, 0.1, (4, 1))
        c = 0.23
        rotated = [
            FourierCurve(cur.coeffs * np.exp(
                2j * np.pi * np.arange(cur.coeffs.size) * c
            ))
            for cur in curves
        ]
        crit_rot = AlignmentCriterion(rotated, "translation", 32)
        assert crit_rot.value(params + c) == pytest.approx(
            crit.value(params), abs=1e-10
        )

    def test_nonnegative(self):
        rng = np.random.default_rng(4)
        curves = random_fourier_curves(rng)
        crit = AlignmentCriterion(curves, "translation", 32)
        for _ in range(10):
            params = project_zero_mean(rng.uniform(-0.5, 0.5, (4, 1)))
            assert crit.value(params) >= 0.0


class TestTranslationGradients:
    def test_zero_at_symmetric_point(self):
        curve = FourierCurve([0.2, 0.5 - 0.1j])
        crit = AlignmentCriterion([curve, curve, curve], "translation", 32)
        z = np.zeros((3, 1))
        assert np.allclose(crit.gradient_translation_time(z), 0.0, atol=1e-14)
        assert np.allclose(crit.gradient_translation_fourier(z), 0.0,
                           atol=1e-14)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            curves = random_fourier_curves(rng, J=4)
            crit = AlignmentCriterion(curves, "translation", 32)
            params = project_zero_mean(rng.uniform(-0.3, 0.3, (4, 1)))
            fd = finite_difference_gradient(crit, params, 1e-6)
            g = crit.gradient_translation_time(params)
            assert np.max(np.abs(g - fd)) / max(np.max(np.abs(fd)), 1e-12) < 1e-4

    def test_backends_agree(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            curves = random_fourier_curves(rng, J=5, cutoff=11)
            crit = AlignmentCriterion(curves, "translation", 32)
            params = project_zero_mean(rng.uniform(-0.4, 0.4, (5, 1)))
            gt = crit.gradient_translation_time(params)
            gf = crit.gradient_translation_fourier(params)
            assert np.max(np.abs(gt - gf)) < 1e-6

    def test_single_harmonic_closed_form(self):
        # both curves cos(2 pi t): dM/dtheta_1 at (s, -s) is
        # (pi/2) sin(4 pi s) for |c_1| = 1/2
        curve = FourierCurve([0.0, 0.5])
        crit = AlignmentCriterion([curve, curve], "translation", 64)
        for s in (0.01, 0.06, 0.13):
            grad = crit.gradient_translation_fourier(np.array([[s], [-s]]))
            assert grad[0, 0] == pytest.approx(
                (np.pi / 2) * np.sin(4 * np.pi * s), abs=1e-10
            )
            assert grad[1, 0] == pytest.approx(-grad[0, 0], abs=1e-10)

    def test_literal_display_matches_under_periodicity(self):
        # dropping the self term changes nothing when the quadrature is
        # exact for the product curves
        rng = np.random.default_rng(7)
        curves = random_fourier_curves(rng, J=3, cutoff=7)
        crit = AlignmentCriterion(curves, "translation", 32)
        params = project_zero_mean(rng.uniform(-0.2, 0.2, (3, 1)))
        full = crit.gradient_translation_time(params)
        literal = crit.gradient_translation_time(params,
                                                 include_self_term=False)
        assert np.allclose(full, literal, atol=1e-12)

    def test_time_backend_works_on_grid_curves(self):
        rng = np.random.default_rng(8)
        curves = [GridCurve(rng.standard_normal(64)) for _ in range(3)]
        crit = AlignmentCriterion(curves, "translation", 64)
        params = project_zero_mean(rng.uniform(-0.1, 0.1, (3, 1)))
        with pytest.raises(ValueError):
            crit.gradient_translation_fourier(params)
        g = crit.gradient(params)
        assert g.shape == (3, 1) and np.all(np.isfinite(g))

    def test_family_mismatch_rejected(self):
        rng = np.random.default_rng(9)
        curves = random_fourier_curves(rng, J=3)
        crit = AlignmentCriterion(curves, DiffeoFamily(n_basis=4))
        with pytest.raises(ValueError):
            crit.gradient_translation_time(np.zeros((3, 4)))


class TestNonrigidGradient:
    def test_zero_for_identical_curves(self):
        curve = FourierCurve([0.0, 0.4, 0.1j])
        fam = DiffeoFamily(n_basis=6)
        crit = AlignmentCriterion([curve, curve], fam, 64)
        g = crit.gradient_nonrigid(np.zeros((2, 6)))
        assert np.allclose(g, 0.0, atol=1e-14)

    def test_direct_quadrature_oracle_at_zero(self):
        # at theta = 0 the warp derivative collapses to the basis
        # functions and row 1 of the gradient is the dense quadrature of
        # h_q(t) f1'(t) (mean(t) - f1(t)); the mean - f1 orientation is
        # the one the finite differences of the energy confirm
        rng = np.random.default_rng(10)
        f1 = fourier_smooth(rng.standard_normal(32), 6)
        f2 = fourier_smooth(rng.standard_normal(32), 6)
        fam = DiffeoFamily(n_basis=8)
        crit = AlignmentCriterion([f1, f2], fam, 128)
        g = crit.gradient_nonrigid(np.zeros((2, 8)))
        t = grid_points(128)
        resid = 0.5 * (f1.value(t) + f2.value(t)) - f1.value(t)
        H = fam.basis.design_matrix(t)
        oracle = (2.0 / 2) * np.mean(
            (resid * f1.derivative(t))[:, None] * H, axis=0
        )
        assert np.allclose(g[0], oracle, atol=1e-12)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(11)
        fam = DiffeoFamily(n_basis=6)
        for _ in range(5):
            curves = random_fourier_curves(rng, J=3, cutoff=5)
            crit = AlignmentCriterion(curves, fam, 32)
            params = project_zero_mean(rng.uniform(-0.4, 0.4, (3, 6)))
            fd = finite_difference_gradient(crit, params, 1e-5)
            g = crit.gradient_nonrigid(params)
            rel = np.linalg.norm(g - fd) / max(np.linalg.norm(fd), 1e-12)
            assert rel < 1e-3

    def test_family_mismatch_rejected(self):
        rng = np.random.default_rng(12)
        curves = random_fourier_curves(rng, J=3)
        crit = AlignmentCriterion(curves, "translation")
        with pytest.raises(ValueError):
            crit.gradient_nonrigid(np.zeros((3, 1)))

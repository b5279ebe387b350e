"""Mean-shape estimators over stacks of equal-length periodic signals.

Three ways to average J noisy, time-deformed signals:

* plain pointwise (Euclidean) averaging,
* the smoothed aligned mean: denoise every signal, jointly fit zero-sum
  warp parameters by gradient descent on the template-free alignment
  energy, then average the back-transformed curves,
* the Procrustes baseline: alternate per-signal registration to a running
  template with template re-averaging, on the raw linear interpolants.

Functional entry points return :class:`~curvemean.core.AlignmentResult`;
thin scikit-learn wrappers (``fit`` + trailing-underscore attributes) are
provided so the estimators compose with the usual tooling.

All estimated parameters use the back-transform convention: the reported
mean is the average of ``signal_j`` evaluated at ``warp(-params[j], t)``.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .core import (
    AlignmentResult,
    GridCurve,
    as_signal,
    as_signal_matrix,
    grid_points,
)
from .criterion import AlignmentCriterion, TranslationFamily, make_family
from .deformation import DEFAULT_ODE_STEPS, flow_field
from .optimizer import OptimizerConfig, descend, minimize_alignment
from .smoothing import (
    default_gcv_search_cutoff,
    fourier_smooth,
    gcv_select_cutoff,
    make_smoother,
    wavelet_smooth,
)

__all__ = [
    "euclidean_mean",
    "mse",
    "frechet_mean",
    "procrustes_mean",
    "EuclideanMean",
    "FrechetMean",
    "ProcrustesMean",
    "FourierSmoother",
    "WaveletSmoother",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def euclidean_mean(signals) -> np.ndarray:
    """Pointwise average of the raw signals."""
    X = as_signal_matrix(signals, min_signals=1)
    return X.mean(axis=0)


def mse(estimate, truth) -> float:
    """Mean squared error between two equal-length signals."""
    a = as_signal(estimate)
    b = as_signal(truth)
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    return float(np.mean((a - b) ** 2))


def frechet_mean(signals, smoother="fourier-gcv", family="translation",
                 config: OptimizerConfig | None = None,
                 quadrature_points: int | None = None) -> AlignmentResult:
    """Smoothed aligned mean of a stack of signals.

    Smooths each row of ``signals`` according to ``smoother``, minimizes
    the alignment energy over zero-sum warp parameters, and averages the
    back-transformed curves on the sampling grid.

    Parameters
    ----------
    signals : (J, n) array, J >= 2
    smoother : smoother spec or callable, see
        :func:`curvemean.smoothing.make_smoother`. "none" skips denoising
        and aligns the linear interpolants.
    family : "translation", "diffeo", or a family instance
    config : optional OptimizerConfig
    quadrature_points : nodes for the energy integrals (default: n)
    """
    X = as_signal_matrix(signals, min_signals=2)
    smooth = make_smoother(smoother)
    curves = [smooth(row) for row in X]
    criterion = AlignmentCriterion(
        curves,
        make_family(family),
        quadrature_points=quadrature_points or X.shape[1],
    )
    return minimize_alignment(criterion, config)


# ---------------------------------------------------------------------------
# Procrustes baseline
# ---------------------------------------------------------------------------

def _golden_section_min(fun, lo: float, hi: float, tol: float = 1e-6) -> float:
    """Golden-section search for a minimum of ``fun`` on [lo, hi]."""
    a, b = float(lo), float(hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def _register_translation(curve, template_values, nodes, prev_shift,
                          halfwidth, tol=1e-6):
    """Best shift of one curve onto the template, never worse than prev."""

    def objective(shift):
        return float(
            np.mean((curve.value(nodes + shift) - template_values) ** 2)
        )

    best = _golden_section_min(objective, -halfwidth, halfwidth, tol)
    if objective(best) <= objective(prev_shift):
        return np.array([best])
    return np.array([prev_shift])


def _register_diffeo(curve, template_values, nodes, prev_theta, family,
                     config):
    """Gradient-descent registration of one curve onto the template."""

    def objective(theta):
        pos = flow_field(family.basis, -theta, nodes, family.ode_steps)
        return float(np.mean((curve.value(pos) - template_values) ** 2))

    def gradient(theta):
        pos, _, dpos = flow_field(family.basis, -theta, nodes,
                                  family.ode_steps, sensitivity=True)
        resid = curve.value(pos) - template_values
        slope = curve.derivative(pos)
        # dpos is the derivative at -theta; flip for the theta derivative
        return -2.0 * np.mean((resid * slope)[:, None] * dpos, axis=0)

    run = descend(objective, gradient, prev_theta, config,
                  clamp=family.max_theta_inf())
    return run.x


def procrustes_mean(signals, family="translation", max_rounds: int = 20,
                    search_halfwidth: float = 0.25,
                    template_tol: float = 1e-8,
                    config: OptimizerConfig | None = None) -> AlignmentResult:
    """Iterative template averaging of the raw signals (no smoothing).

    Starts from the Euclidean mean, then alternates: register every signal
    to the template (golden-section search over shifts, or gradient
    descent for the diffeomorphic family), re-average the aligned curves,
    and repeat until the template stops moving (sup-norm change below
    ``template_tol``) or ``max_rounds`` is reached.

    The trace records the mean squared registration residual, which never
    increases from round to round.
    """
    X = as_signal_matrix(signals, min_signals=1)
    J, n = X.shape
    fam = make_family(family)
    nodes = grid_points(n)
    curves = [GridCurve(row) for row in X]
    params = np.zeros((J, fam.n_params))
    template = X.mean(axis=0)
    trace = [float(np.mean((X - template) ** 2))]

    converged = False
    rounds = 0
    for _ in range(max_rounds):
        if isinstance(fam, TranslationFamily):
            params = np.stack([
                _register_translation(c, template, nodes, p[0],
                                      search_halfwidth)
                for c, p in zip(curves, params)
            ])
        else:
            params = np.stack([
                _register_diffeo(c, template, nodes, p, fam, config)
                for c, p in zip(curves, params)
            ])
        pos = fam.back_positions(params, nodes)
        aligned = np.stack([c.value(w) for c, w in zip(curves, pos)])
        new_template = aligned.mean(axis=0)
        trace.append(float(np.mean((aligned - new_template) ** 2)))
        shift = float(np.max(np.abs(new_template - template)))
        template = new_template
        rounds += 1
        if shift <= template_tol:
            converged = True
            break

    return AlignmentResult(
        params=params,
        mean_curve=template,
        trace=trace,
        iterations=rounds,
        converged=converged,
    )


# ---------------------------------------------------------------------------
# scikit-learn wrappers
# ---------------------------------------------------------------------------

class EuclideanMean(BaseEstimator):
    """Pointwise average of the input signals.

    Attributes after ``fit``: ``mean_curve_`` of shape (n,).
    """

    def fit(self, X, y=None):
        self.mean_curve_ = euclidean_mean(X)
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).mean_curve_


class FrechetMean(BaseEstimator):
    """Smoothed aligned mean with jointly estimated warp parameters.

    Parameters
    ----------
    smoother : str
        Smoother spec ("fourier-gcv", "fourier-fixed:<k>",
        "wavelet:<filter>:<level0>", "none").
    family : str
        "translation" or "diffeo".
    n_basis, degree, ode_steps : int
        Velocity-field configuration for the diffeomorphic family.
    rho, kappa, max_iterations, max_backtracks, regrow_step :
        Descent configuration, see
        :class:`~curvemean.optimizer.OptimizerConfig`.
    quadrature_points : int or None
        Energy quadrature nodes; None uses the signal length.

    Attributes after ``fit``
    ------------------------
    params_ : (J, p) zero-sum warp parameters
    mean_curve_ : (n,) aligned mean on the grid
    trace_ : objective values per accepted step
    n_iter_ : accepted steps
    converged_ : bool
    """

    def __init__(self, smoother="fourier-gcv", family="translation",
                 n_basis=10, degree=3, ode_steps=DEFAULT_ODE_STEPS,
                 rho=1e-4, kappa=2.0, max_iterations=200, max_backtracks=50,
                 regrow_step=True, quadrature_points=None):
        self.smoother = smoother
        self.family = family
        self.n_basis = n_basis
        self.degree = degree
        self.ode_steps = ode_steps
        self.rho = rho
        self.kappa = kappa
        self.max_iterations = max_iterations
        self.max_backtracks = max_backtracks
        self.regrow_step = regrow_step
        self.quadrature_points = quadrature_points

    def _config(self):
        return OptimizerConfig(
            rho=self.rho,
            kappa=self.kappa,
            max_iterations=self.max_iterations,
            max_backtracks=self.max_backtracks,
            regrow_step=self.regrow_step,
        )

    def fit(self, X, y=None):
        result = frechet_mean(
            X,
            smoother=self.smoother,
            family=make_family(self.family, n_basis=self.n_basis,
                               degree=self.degree, ode_steps=self.ode_steps),
            config=self._config(),
            quadrature_points=self.quadrature_points,
        )
        self.params_ = result.params
        self.mean_curve_ = result.mean_curve
        self.trace_ = result.trace
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.result_ = result
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).mean_curve_


class ProcrustesMean(BaseEstimator):
    """Template-iteration baseline on the raw signals.

    Attributes after ``fit``: ``params_``, ``mean_curve_``, ``trace_``
    (per-round registration residual), ``n_iter_``, ``converged_``.
    """

    def __init__(self, family="translation", n_basis=10, degree=3,
                 ode_steps=DEFAULT_ODE_STEPS, max_rounds=20,
                 search_halfwidth=0.25, template_tol=1e-8):
        self.family = family
        self.n_basis = n_basis
        self.degree = degree
        self.ode_steps = ode_steps
        self.max_rounds = max_rounds
        self.search_halfwidth = search_halfwidth
        self.template_tol = template_tol

    def fit(self, X, y=None):
        result = procrustes_mean(
            X,
            family=make_family(self.family, n_basis=self.n_basis,
                               degree=self.degree, ode_steps=self.ode_steps),
            max_rounds=self.max_rounds,
            search_halfwidth=self.search_halfwidth,
            template_tol=self.template_tol,
        )
        self.params_ = result.params
        self.mean_curve_ = result.mean_curve
        self.trace_ = result.trace
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.result_ = result
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).mean_curve_


class FourierSmoother(TransformerMixin, BaseEstimator):
    """Row-wise low-pass smoothing; stateless transformer.

    ``cutoff`` is an integer or "gcv" for the per-signal data-driven
    choice. ``transform`` returns the smoothed values on the original grid.
    """

    def __init__(self, cutoff="gcv"):
        self.cutoff = cutoff

    def fit(self, X, y=None):
        as_signal_matrix(X)
        return self

    def transform(self, X):
        X = as_signal_matrix(X)
        nodes = grid_points(X.shape[1])
        out = np.empty_like(X)
        for i, row in enumerate(X):
            if self.cutoff == "gcv":
                cut = gcv_select_cutoff(
                    row, default_gcv_search_cutoff(row.size)
                )
            else:
                cut = int(self.cutoff)
            out[i] = fourier_smooth(row, cut).value(nodes)
        return out


class WaveletSmoother(TransformerMixin, BaseEstimator):
    """Row-wise hard-threshold wavelet denoising; stateless transformer."""

    def __init__(self, wavelet="db4", level0=3):
        self.wavelet = wavelet
        self.level0 = level0

    def fit(self, X, y=None):
        as_signal_matrix(X)
        return self

    def transform(self, X):
        X = as_signal_matrix(X)
        return np.stack([
            wavelet_smooth(row, self.wavelet, self.level0).values
            for row in X
        ])

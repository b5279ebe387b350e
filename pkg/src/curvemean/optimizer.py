"""Projected gradient descent with an adaptive, backtracking step size.

Each iteration proposes x - delta * grad, applies the constraint projection,
and divides delta by kappa until the objective decreases. The run stops
once the progress of the latest step falls below rho times the total
progress since the first accepted step, or when the iteration or backtrack
budgets are exhausted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AlignmentResult, project_zero_mean

__all__ = ["OptimizerConfig", "DescentRun", "descend", "minimize_alignment"]


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs of the descent loop.

    rho : stopping parameter (> 0); smaller values run longer.
    kappa : step shrink factor (> 1) used while backtracking.
    max_iterations : cap on accepted steps.
    max_backtracks : cap on shrink retries within one step; exhausting it
        is treated as numerical stationarity.
    regrow_step : when True (default) the accepted step size is multiplied
        by kappa once per iteration, so the step can recover after a
        backtracking phase. False keeps the step monotone non-increasing.
    """

    rho: float = 1e-4
    kappa: float = 2.0
    max_iterations: int = 200
    max_backtracks: int = 50
    regrow_step: bool = True

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if not self.kappa > 1:
            raise ValueError("kappa must exceed 1")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")
        if self.max_backtracks < 1:
            raise ValueError("max_backtracks must be positive")


@dataclass
class DescentRun:
    """Raw outcome of :func:`descend`."""

    x: np.ndarray
    trace: list
    step_sizes: list
    backtracks: list
    converged: bool

    @property
    def iterations(self):
        return len(self.trace) - 1


def descend(fun, grad, x0, config: OptimizerConfig | None = None,
            project=None, clamp=None) -> DescentRun:
    """Minimize ``fun`` from ``x0`` by projected backtracking descent.

    ``project`` maps proposals back to the constraint set (identity when
    None); ``clamp`` bounds the absolute value of every component before
    projection. Only strictly decreasing steps are accepted, which keeps
    the recorded trace strictly decreasing; a proposal that cannot improve
    within the backtrack budget ends the run as converged (stationary).
    """
    cfg = config if config is not None else OptimizerConfig()
    x = np.asarray(x0, dtype=float).copy()
    if project is not None:
        x = project(x)

    def propose(x, g, delta):
        cand = x - delta * g
        if clamp is not None:
            cand = np.clip(cand, -clamp, clamp)
        if project is not None:
            cand = project(cand)
        return cand

    trace = [float(fun(x))]
    step_sizes: list = []
    backtracks: list = []

    g = np.asarray(grad(x), dtype=float)
    # the l1 norm keeps the first proposal's displacement inversely
    # proportional to the number of coordinates, which protects the
    # multimodal alignment energies from an over-long opening step
    gnorm = float(np.sum(np.abs(g)))
    if gnorm == 0.0 or cfg.max_iterations == 0:
        return DescentRun(x, trace, step_sizes, backtracks, converged=True)
    delta = 1.0 / gnorm

    converged = False
    for _ in range(cfg.max_iterations):
        n_shrink = 0
        cand = propose(x, g, delta)
        val = float(fun(cand))
        while not val < trace[-1]:
            n_shrink += 1
            if n_shrink > cfg.max_backtracks:
                return DescentRun(x, trace, step_sizes, backtracks,
                                  converged=True)
            delta /= cfg.kappa
            cand = propose(x, g, delta)
            val = float(fun(cand))

        x = cand
        trace.append(val)
        step_sizes.append(delta)
        backtracks.append(n_shrink)
        if cfg.regrow_step:
            delta *= cfg.kappa

        # stop when the latest drop is a negligible share of the progress
        # accumulated since the first accepted value
        if len(trace) >= 3:
            last_drop = trace[-2] - trace[-1]
            total_drop = trace[1] - trace[-1]
            if not last_drop >= cfg.rho * total_drop:
                converged = True
                break
        g = np.asarray(grad(x), dtype=float)
        if not np.all(np.isfinite(g)):
            raise FloatingPointError("gradient became non-finite")

    return DescentRun(x, trace, step_sizes, backtracks, converged=converged)


def minimize_alignment(criterion, config: OptimizerConfig | None = None
                       ) -> AlignmentResult:
    """Fit warp parameters for an alignment criterion.

    Starts from all-zero parameters, keeps every iterate on the zero-sum
    constraint set, and returns the aligned mean on the quadrature grid
    together with the optimization trace.
    """
    run = descend(
        criterion.value,
        criterion.gradient,
        criterion.zero_params(),
        config,
        project=project_zero_mean,
        clamp=criterion.family.max_theta_inf(),
    )
    return AlignmentResult(
        params=run.x,
        mean_curve=criterion.mean_on_grid(run.x),
        trace=run.trace,
        iterations=run.iterations,
        converged=run.converged,
        step_sizes=run.step_sizes,
        backtracks=run.backtracks,
    )

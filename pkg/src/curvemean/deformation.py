"""Time deformations of the unit interval.

Two families: plain translations t -> t - theta (combined with periodic
curve evaluation), and endpoint-preserving diffeomorphisms obtained by
flowing the identity for unit time along a velocity field built from
interior B-splines. The field vanishes, together with its slope, at t = 0
and t = 1, so 0 and 1 are fixed points of the flow and the warp inverts by
negating the coefficients.
"""

from __future__ import annotations

import numpy as np

from .core import _check_times

__all__ = [
    "warp_translation",
    "BSplineVelocityBasis",
    "DiffeoWarp",
]

DEFAULT_ODE_STEPS = 60


def warp_translation(theta: float, t):
    """The shift warp t - theta."""
    return np.asarray(t, dtype=float) - theta


def _cardinal_bspline(x, degree: int):
    """Uniform B-spline of the given degree, supported on [0, degree+1]."""
    if degree == 0:
        return ((x >= 0.0) & (x < 1.0)).astype(float)
    left = _cardinal_bspline(x, degree - 1)
    right = _cardinal_bspline(x - 1.0, degree - 1)
    return (x * left + (degree + 1.0 - x) * right) / degree


class BSplineVelocityBasis:
    """Interior uniform B-splines on [0, 1] for velocity fields.

    With ``n_basis`` functions of a given degree the knots are spaced
    1/(n_basis + degree) apart and only the splines whose support lies
    inside [0, 1] are kept, which makes every basis function and its
    derivative vanish at both endpoints.
    """

    def __init__(self, n_basis: int = 10, degree: int = 3):
        if n_basis < 1:
            raise ValueError("n_basis must be at least 1")
        if degree < 2:
            raise ValueError(
                "degree must be at least 2 so basis slopes vanish at 0 and 1"
            )
        self.n_basis = int(n_basis)
        self.degree = int(degree)
        self.spacing = 1.0 / (self.n_basis + self.degree)
        # peak of the cardinal spline, for the optimizer's magnitude guard
        xs = np.linspace(0.0, degree + 1.0, 2049)
        self.max_abs = float(np.max(_cardinal_bspline(xs, degree)))

    def _offsets(self, t):
        return (
            np.asarray(t, dtype=float)[..., None] / self.spacing
            - np.arange(self.n_basis)
        )

    def design_matrix(self, t) -> np.ndarray:
        """Values of every basis function at t; shape t.shape + (n_basis,)."""
        return _cardinal_bspline(self._offsets(t), self.degree)

    def slope_matrix(self, t) -> np.ndarray:
        """Derivatives of every basis function at t."""
        x = self._offsets(t)
        lower = _cardinal_bspline(x, self.degree - 1)
        return (lower - _cardinal_bspline(x - 1.0, self.degree - 1)) / self.spacing

    def velocity(self, theta, t):
        """The field sum_k theta_k h_k(t) for t in [0, 1]."""
        theta = self._check_theta(theta)
        tt = _check_times(t)
        if np.any(tt < 0.0) or np.any(tt > 1.0):
            raise ValueError("velocity is defined on [0, 1]")
        out = self.design_matrix(tt) @ theta
        return float(out) if np.ndim(t) == 0 else out

    def _check_theta(self, theta) -> np.ndarray:
        arr = np.atleast_1d(np.asarray(theta, dtype=float))
        if arr.shape != (self.n_basis,):
            raise ValueError(
                f"theta must have length {self.n_basis}, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("theta contains non-finite values")
        return arr

    def max_theta_inf(self) -> float:
        """Magnitude guard used by the optimizer when clamping proposals."""
        return 5.0 / self.max_abs

    def __repr__(self):
        return f"BSplineVelocityBasis(n_basis={self.n_basis}, degree={self.degree})"


def _rk4(derivative, state, n_steps: int, horizon: float):
    h = horizon / n_steps
    for _ in range(n_steps):
        k1 = derivative(state)
        k2 = derivative(tuple(s + 0.5 * h * k for s, k in zip(state, k1)))
        k3 = derivative(tuple(s + 0.5 * h * k for s, k in zip(state, k2)))
        k4 = derivative(tuple(s + h * k for s, k in zip(state, k3)))
        state = tuple(
            s + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
            for s, a, b, c, d in zip(state, k1, k2, k3, k4)
        )
    return state


def flow_field(basis, thetas, t, n_steps, horizon=1.0,
               jacobian=False, sensitivity=False):
    """Integrate the velocity flow, optionally with derived quantities.

    Parameters
    ----------
    thetas : (p,) or (J, p) array
        One coefficient vector, or a stack applied row-wise (state arrays
        then carry a leading J axis and ``t`` is shared).
    t : array
        Starting points in [0, 1].
    jacobian : bool
        Also integrate d(position)/d(start), the flow's space derivative.
    sensitivity : bool
        Also integrate the per-coefficient derivative of the endpoint
        (implies ``jacobian``).

    Returns
    -------
    psi : array like t (or (J,) + t.shape)
        Flow positions at time ``horizon``.
    jac : same shape, only if requested
    grad : shape + (p,), only if requested
    """
    thetas = np.asarray(thetas, dtype=float)
    batched = thetas.ndim == 2
    t = np.asarray(t, dtype=float)
    psi = np.broadcast_to(t, (thetas.shape[0],) + t.shape).copy() if batched else t.copy()
    need_jac = jacobian or sensitivity

    if batched:
        def apply(mat, vec):
            return np.einsum("j...p,jp->j...", mat, vec)
    else:
        def apply(mat, vec):
            return mat @ vec

    if sensitivity:
        def derivative(state):
            pos, jac, acc = state
            design = basis.design_matrix(pos)
            return (
                apply(design, thetas),
                apply(basis.slope_matrix(pos), thetas) * jac,
                design / jac[..., None],
            )

        state = (psi, np.ones_like(psi), np.zeros(psi.shape + (basis.n_basis,)))
        pos, jac, acc = _rk4(derivative, state, n_steps, horizon)
        return pos, jac, jac[..., None] * acc

    if need_jac:
        def derivative(state):
            pos, jac = state
            return (
                apply(basis.design_matrix(pos), thetas),
                apply(basis.slope_matrix(pos), thetas) * jac,
            )

        return _rk4(derivative, (psi, np.ones_like(psi)), n_steps, horizon)

    def derivative(state):
        return (apply(basis.design_matrix(state[0]), thetas),)

    return _rk4(derivative, (psi,), n_steps, horizon)[0]


class DiffeoWarp:
    """Endpoint-preserving warp of [0, 1]: unit-time flow of a velocity field.

    The warp is parameterized by the field coefficients ``theta``; negating
    them gives the inverse warp. Integration uses classical fixed-step RK4,
    which keeps every evaluation deterministic.
    """

    def __init__(self, basis: BSplineVelocityBasis, theta,
                 ode_steps: int = DEFAULT_ODE_STEPS):
        self.basis = basis
        self.theta = basis._check_theta(theta)
        if ode_steps < 1:
            raise ValueError("ode_steps must be positive")
        self.ode_steps = int(ode_steps)

    def _check_unit(self, t):
        tt = _check_times(t)
        if np.any(tt < 0.0) or np.any(tt > 1.0):
            raise ValueError("warp arguments must lie in [0, 1]")
        return np.asarray(tt, dtype=float)

    def warp(self, t):
        """Flow position after unit time, starting from t."""
        out = flow_field(self.basis, self.theta, self._check_unit(t),
                         self.ode_steps)
        return float(out) if np.ndim(t) == 0 else out

    def inverse_warp(self, t):
        """The warp with negated coefficients (the exact inverse flow)."""
        out = flow_field(self.basis, -self.theta, self._check_unit(t),
                         self.ode_steps)
        return float(out) if np.ndim(t) == 0 else out

    def space_derivative(self, u: float, t):
        """d(flow position)/d(start) after flowing for time u; positive."""
        if not 0.0 <= u <= 1.0:
            raise ValueError("flow time u must lie in [0, 1]")
        if u == 0.0:
            tt = self._check_unit(t)
            return 1.0 if np.ndim(t) == 0 else np.ones_like(tt)
        _, jac = flow_field(self.basis, self.theta, self._check_unit(t),
                            self.ode_steps, horizon=u, jacobian=True)
        return float(jac) if np.ndim(t) == 0 else jac

    def flow_at(self, u: float, t):
        """Intermediate flow position at time u in [0, 1]."""
        if not 0.0 <= u <= 1.0:
            raise ValueError("flow time u must lie in [0, 1]")
        if u == 0.0:
            tt = self._check_unit(t)
            return float(tt) if np.ndim(t) == 0 else tt.copy()
        out = flow_field(self.basis, self.theta, self._check_unit(t),
                         self.ode_steps, horizon=u)
        return float(out) if np.ndim(t) == 0 else out

    def param_gradient(self, t) -> np.ndarray:
        """Derivative of the warp with respect to each coefficient.

        Solves the forward sensitivity system alongside the flow, which
        realizes d(warp)/d(theta_k) = jac * integral of h_k(position)/jac
        over the flow, with RK4 accuracy in the integral as well.
        """
        _, _, grad = flow_field(self.basis, self.theta, self._check_unit(t),
                                self.ode_steps, sensitivity=True)
        return grad

    def __repr__(self):
        return (
            f"DiffeoWarp(p={self.basis.n_basis}, degree={self.basis.degree}, "
            f"ode_steps={self.ode_steps})"
        )

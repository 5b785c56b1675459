"""Rate functions of the time-evolved mean-field rotator.

All functions work in the plane R^2 containing the circle S^1. A magnetization
``m`` is an array of shape (..., 2) inside the closed unit disk; the field ``h``
is a 2-vector. The evaluators returned by the ``make_*`` helpers accept whole
arrays of points and are what the minimizers and certificates call.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .circle_kernel import (
    TWO_PI,
    ConditioningMeasure,
    Convention,
    HeatKernelSpec,
    QuadratureGrid,
    heat_kernel_density,
)
from .errors import InvalidParameterError, KernelUndefinedError

CONVERGENCE_TOL = 1e-9


class Interaction(str, enum.Enum):
    QUADRATIC_ROTATOR = "quadratic_rotator"
    GENERIC = "generic"


@dataclass(frozen=True)
class MeanFieldModel:
    """Inverse temperature, field vector and interaction type.

    ``h`` may be given as a scalar (meaning h_bar * e(0)) or as a 2-vector.
    The hooks ``F`` and ``g`` are only consulted for ``GENERIC`` models.
    """

    beta: float
    h: tuple = (0.0, 0.0)
    interaction: Interaction = Interaction.QUADRATIC_ROTATOR
    F: object = field(default=None, compare=False)
    g: object = field(default=None, compare=False)

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta >= 0):
            raise InvalidParameterError(f"beta must be finite and >= 0, got {self.beta!r}")
        h = np.atleast_1d(np.asarray(self.h, dtype=float))
        if h.size == 1:
            h = np.array([h[0], 0.0])
        if h.shape != (2,) or not np.all(np.isfinite(h)):
            raise InvalidParameterError(f"field must be a finite 2-vector, got {self.h!r}")
        object.__setattr__(self, "h", (float(h[0]), float(h[1])))
        object.__setattr__(self, "interaction", Interaction(self.interaction))

    @property
    def h_vec(self):
        return np.array(self.h)

    @property
    def h_bar(self):
        return float(np.hypot(*self.h))

    @property
    def h_angle(self):
        """Rotation taking h_bar * e(0) to h."""
        return math.atan2(self.h[1], self.h[0]) if self.h_bar > 0 else 0.0

    def canonical(self):
        """Return the model rotated so that h = h_bar * e(0), and the angle used."""
        return MeanFieldModel(self.beta, (self.h_bar, 0.0), self.interaction, self.F, self.g), self.h_angle

    def require_rotator(self):
        if self.interaction is not Interaction.QUADRATIC_ROTATOR:
            raise InvalidParameterError("rate functions are implemented for the quadratic rotator only")


def rotate(v, phi):
    """Rotate vectors of shape (..., 2) counterclockwise by ``phi``."""
    v = np.asarray(v, dtype=float)
    c, s = math.cos(phi), math.sin(phi)
    return np.stack([c * v[..., 0] - s * v[..., 1], s * v[..., 0] + c * v[..., 1]], axis=-1)


def make_lambda_epsilon(epsilon):
    """Two-atom conditioning with atoms at pi + epsilon and pi - epsilon."""
    if not (0.0 <= epsilon < math.pi):
        raise InvalidParameterError(f"epsilon must lie in [0, pi), got {epsilon!r}")
    return ConditioningMeasure((math.pi + epsilon, math.pi - epsilon), (0.5, 0.5)).merged()


def _grid(grid):
    if grid is None:
        return QuadratureGrid()
    if isinstance(grid, int):
        return QuadratureGrid(grid)
    return grid


def _kernel_spec(t, spec):
    if spec is None:
        return HeatKernelSpec(t, Convention.FOURIER_QT)
    if abs(spec.t - t) > 0:
        raise InvalidParameterError("kernel spec time does not match t")
    return spec


def _log_weighted_sum(exponent, weights):
    """log(sum_j weights_j exp(exponent_..j)) along the last axis.

    ``weights`` may contain tiny negative values from a truncated Fourier
    series, which rules out scipy's logsumexp with log-weights.
    """
    top = exponent.max(axis=-1, keepdims=True)
    return top[..., 0] + np.log(np.exp(exponent - top) @ weights)


def _as_points(m):
    m = np.asarray(m, dtype=float)
    if m.shape[-1] != 2:
        raise InvalidParameterError("magnetizations must have a trailing axis of length 2")
    return m


def make_F0_evaluator(model, grid=None):
    """Vectorized m -> beta |m|^2 / 2 - log int exp(beta sigma.(m + h)) alpha(d sigma)."""
    model.require_rotator()
    grid = _grid(grid)
    cos_n, sin_n = np.cos(grid.nodes), np.sin(grid.nodes)
    w = grid.weights / TWO_PI
    beta, h = model.beta, model.h_vec

    def F0(m):
        m = _as_points(m)
        a = m + h
        expo = beta * (a[..., 0, None] * cos_n + a[..., 1, None] * sin_n)
        return 0.5 * beta * (m * m).sum(axis=-1) - _log_weighted_sum(expo, w)

    return F0


def _atom_kernels(t, lam, grid, spec):
    spec = _kernel_spec(t, spec)
    return np.stack(
        [heat_kernel_density(grid.nodes - eta, spec) * grid.weights for eta in lam.angles]
    )


def make_F_evaluator(model, t, lam, grid=None, spec=None):
    """Vectorized m -> beta|m|^2/2 - sum_j w_j log int exp(beta s.(m+h)) p_t(eta_j, ds)."""
    model.require_rotator()
    grid = _grid(grid)
    kernels = _atom_kernels(t, lam, grid, spec)
    weights = lam.weight_array
    cos_n, sin_n = np.cos(grid.nodes), np.sin(grid.nodes)
    beta, h = model.beta, model.h_vec

    def F(m):
        m = _as_points(m)
        a = m + h
        expo = beta * (a[..., 0, None] * cos_n + a[..., 1, None] * sin_n)
        logs = sum(w * _log_weighted_sum(expo, k) for w, k in zip(weights, kernels))
        return 0.5 * beta * (m * m).sum(axis=-1) - logs

    return F


def make_atom_F_evaluators(model, t, atoms, grid=None, spec=None):
    """One single-atom rate function per conditioning angle, sharing the grid."""
    return [make_F_evaluator(model, t, ConditioningMeasure.point(a), grid, spec) for a in atoms]


def _scalar_or_array(values):
    return float(values) if np.ndim(values) == 0 else values


def rate_function_F0(m, model, grid=None):
    return _scalar_or_array(make_F0_evaluator(model, grid)(m))


def rate_function_F(m, model, t, lam, grid=None, spec=None):
    return _scalar_or_array(make_F_evaluator(model, t, lam, grid, spec)(m))


def make_L_evaluator(epsilon, t, grid=None, spec=None):
    """Vectorized U -> L(U; epsilon, t), the averaged log-moment over lambda_epsilon."""
    grid = _grid(grid)
    spec = _kernel_spec(t, spec)
    theta = grid.nodes
    kern = heat_kernel_density(theta, spec) * grid.weights
    cos_plus = np.cos(theta + math.pi + epsilon)
    cos_minus = np.cos(theta + math.pi - epsilon)

    def L(U):
        U = np.asarray(U, dtype=float)
        u = U[..., None]
        return 0.5 * (_log_weighted_sum(u * cos_plus, kern) + _log_weighted_sum(u * cos_minus, kern))

    return L


def log_moment_L(U, epsilon, t, grid=None, spec=None):
    return _scalar_or_array(make_L_evaluator(epsilon, t, grid, spec)(U))


def make_G_evaluator(beta, h_bar, epsilon, t, grid=None, spec=None):
    """Vectorized U -> U^2/(2 beta) - U h_bar - L(U; epsilon, t)."""
    if not (np.isfinite(beta) and beta > 0):
        raise InvalidParameterError(f"beta must be > 0 for the reduced functional, got {beta!r}")
    L = make_L_evaluator(epsilon, t, grid, spec)

    def G(U):
        U = np.asarray(U, dtype=float)
        return U * U / (2.0 * beta) - U * h_bar - L(U)

    return G


def reduced_G(U, beta, h_bar, epsilon, t, grid=None, spec=None):
    return _scalar_or_array(make_G_evaluator(beta, h_bar, epsilon, t, grid, spec)(U))


def u_domain(beta, h_bar):
    """Image of u in [-1, 1] under U = beta (u + h_bar)."""
    return beta * (-1.0 + h_bar), beta * (1.0 + h_bar)


def U_to_u(U, beta, h_bar):
    return np.asarray(U) / beta - h_bar


def u_to_U(u, beta, h_bar):
    return beta * (np.asarray(u) + h_bar)


@dataclass(frozen=True)
class ConvergenceReport:
    value: object
    refined_value: object
    change: float
    converged: bool
    num_points: int


def check_convergence(func, *args, grid=None, tol=CONVERGENCE_TOL, **kwargs):
    """Evaluate ``func(*args, grid=...)`` on a grid and on its doubling.

    The flag is raised when the largest pointwise change exceeds ``tol``.
    """
    grid = _grid(grid)
    value = func(*args, grid=grid, **kwargs)
    refined = func(*args, grid=grid.refined(), **kwargs)
    change = float(np.max(np.abs(np.asarray(refined) - np.asarray(value))))
    return ConvergenceReport(value, refined, change, change <= tol, grid.num_points)


def _unique_minimizer(m_star):
    if hasattr(m_star, "unique"):
        if not m_star.unique:
            raise KernelUndefinedError(
                "the constrained rate function has several global minimizers; "
                "the limiting kernel is undefined at this conditioning"
            )
        m_star = m_star.global_minima[0].location
    m = np.asarray(m_star, dtype=float).ravel()
    if m.size == 1:
        m = np.array([m[0], 0.0])
    if m.shape != (2,):
        raise InvalidParameterError("m_star must be a 2-vector or a minimizer report")
    return m


def make_gamma_evaluator(model, t, m_star, grid=None, spec=None):
    """Density in eta of int exp(beta s.(m*+h)) p_t(s, d eta) alpha(ds) / int exp(beta s.(m*+h)) alpha(ds)."""
    model.require_rotator()
    grid = _grid(grid)
    spec = _kernel_spec(t, spec)
    m = _unique_minimizer(m_star)
    a = model.beta * (m + model.h_vec)
    sigma = grid.nodes
    expo = a[0] * np.cos(sigma) + a[1] * np.sin(sigma)
    tilt = np.exp(expo - expo.max())
    tilt = tilt / (tilt @ grid.weights)

    def gamma(eta):
        eta = np.asarray(eta, dtype=float)
        kern = heat_kernel_density(eta[..., None] - sigma, spec)
        return kern @ (tilt * grid.weights)

    return gamma


def transformed_kernel_gamma(eta, model, t, lam, m_star, grid=None, spec=None):
    """Limiting single-site kernel density at ``eta``.

    ``lam`` is accepted for the record only: the conditioning enters through
    the minimizer ``m_star``, which may be a MinimizerReport. Non-unique
    minimizers raise KernelUndefinedError.
    """
    if not isinstance(lam, ConditioningMeasure):
        raise InvalidParameterError("lam must be a ConditioningMeasure")
    return _scalar_or_array(make_gamma_evaluator(model, t, m_star, grid, spec)(eta))


def variational_distance(density_a, density_b, grid=None):
    """1/2 int |a - b| on the periodic grid for two densities on the circle."""
    grid = _grid(grid)
    da, db = density_a(grid.nodes), density_b(grid.nodes)
    return 0.5 * float(np.abs(da - db) @ grid.weights)

"""Heat kernels on the circle, periodic quadrature and conditioning measures.

Two normalizations of the circle diffusion kernel are in use:

* ``FOURIER_QT``: q_t(theta) = 1/(2 pi) + (1/pi) sum_k exp(-k^2 t) cos(k theta),
  i.e. the wrapped Gaussian of variance 2t, evaluated from its Fourier series.
* ``WRAPPED_PT``: the wrapped Gaussian of variance t, evaluated as the sum of
  2 pi translates of a Gaussian.

Both are densities with respect to Lebesgue measure d theta on [0, 2 pi).
"""

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import logsumexp

from ._numerics import golden_section
from .errors import InvalidParameterError

TWO_PI = 2.0 * math.pi
FOURIER_TAIL_EXPONENT = 33.0  # exp(-33) < 1e-14
DEFAULT_QUAD_POINTS = 1024
QUAD_TOL = 1e-9


class Convention(str, enum.Enum):
    FOURIER_QT = "fourier_qt"
    WRAPPED_PT = "wrapped_pt"


class Metric(str, enum.Enum):
    EUCLIDEAN_CHORD = "euclidean_chord"


def wrap_angle(theta):
    """Reduce angles into [0, 2 pi)."""
    out = np.mod(theta, TWO_PI)
    # np.mod can return exactly 2 pi for tiny negative inputs
    out = np.where(out >= TWO_PI, 0.0, out)
    return float(out) if np.ndim(out) == 0 else out


def wrap_centered(theta):
    """Representative of an angle in (-pi, pi]."""
    out = math.pi - np.mod(math.pi - np.asarray(theta, dtype=float), TWO_PI)
    return float(out) if np.ndim(out) == 0 else out


def chord_distance(a, b):
    return 2.0 * np.abs(np.sin((np.asarray(a) - np.asarray(b)) / 2.0))


class Angle(float):
    """A float reduced modulo 2 pi into [0, 2 pi)."""

    def __new__(cls, theta):
        return super().__new__(cls, wrap_angle(float(theta)))

    def __repr__(self):
        return f"Angle({float(self)!r})"


def fourier_truncation(fourier_time):
    return max(8, math.ceil(math.sqrt(FOURIER_TAIL_EXPONENT / fourier_time)))


def wrapped_truncation(variance):
    # dropped translates satisfy (2 pi n - pi)^2 / (2 v) > 39
    return max(10, math.ceil((math.sqrt(78.0 * variance) + math.pi) / TWO_PI))


@dataclass(frozen=True)
class HeatKernelSpec:
    """Diffusion time, Fourier truncation and variance convention.

    ``truncation_K`` defaults to the smallest mode count whose dropped tail
    is below 1e-14 for the chosen convention.
    """

    t: float
    convention: Convention = Convention.FOURIER_QT
    truncation_K: int = None

    def __post_init__(self):
        if not (np.isfinite(self.t) and self.t > 0):
            raise InvalidParameterError(f"diffusion time t must be > 0, got {self.t!r}")
        object.__setattr__(self, "convention", Convention(self.convention))
        if self.truncation_K is None:
            object.__setattr__(self, "truncation_K", fourier_truncation(self.fourier_time))
        elif int(self.truncation_K) < 1:
            raise InvalidParameterError("truncation_K must be a positive integer")
        else:
            object.__setattr__(self, "truncation_K", int(self.truncation_K))

    @property
    def variance(self):
        return 2.0 * self.t if self.convention is Convention.FOURIER_QT else self.t

    @property
    def fourier_time(self):
        """Time tau such that the k-th mode decays as exp(-k^2 tau)."""
        return self.variance / 2.0

    def with_truncation(self, K):
        return HeatKernelSpec(self.t, self.convention, K)


def fourier_density(theta, fourier_time, K):
    k = np.arange(1, K + 1)
    theta = np.asarray(theta, dtype=float)
    modes = np.cos(theta[..., None] * k) @ np.exp(-(k * k) * fourier_time)
    return 1.0 / TWO_PI + modes / math.pi


def wrapped_gaussian_density(theta, variance, n_max=None):
    """(1 / sqrt(2 pi v)) sum_{|n| <= n_max} exp(-(theta + 2 pi n)^2 / (2 v))."""
    if n_max is None:
        n_max = wrapped_truncation(variance)
    n = np.arange(-n_max, n_max + 1)
    x = wrap_centered(theta)
    x = np.asarray(x, dtype=float)[..., None] + TWO_PI * n
    return np.exp(-x * x / (2.0 * variance)).sum(axis=-1) / math.sqrt(TWO_PI * variance)


def log_wrapped_gaussian_density(theta, variance, n_max=None):
    if n_max is None:
        n_max = wrapped_truncation(variance)
    n = np.arange(-n_max, n_max + 1)
    x = np.asarray(wrap_centered(theta), dtype=float)[..., None] + TWO_PI * n
    return logsumexp(-x * x / (2.0 * variance), axis=-1) - 0.5 * math.log(TWO_PI * variance)


def _check_spec(spec):
    if not isinstance(spec, HeatKernelSpec):
        raise InvalidParameterError("expected a HeatKernelSpec")
    return spec


def heat_kernel_density(theta, spec):
    """Circle heat kernel evaluated at angular separation ``theta``.

    FOURIER_QT uses the cosine series; WRAPPED_PT sums Gaussian translates,
    which keeps full relative precision deep in the tails for small t.
    """
    spec = _check_spec(spec)
    if spec.convention is Convention.FOURIER_QT:
        # round-off can push the series a few ulps below zero near theta = pi
        out = np.maximum(fourier_density(theta, spec.fourier_time, spec.truncation_K), 0.0)
    else:
        out = wrapped_gaussian_density(theta, spec.variance)
    return float(out) if np.ndim(out) == 0 else out


def log_heat_kernel_density(theta, spec):
    spec = _check_spec(spec)
    if spec.convention is Convention.WRAPPED_PT:
        out = log_wrapped_gaussian_density(theta, spec.variance)
    else:
        q = fourier_density(theta, spec.fourier_time, spec.truncation_K)
        tail = q < 1e-12
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(tail, log_wrapped_gaussian_density(theta, spec.variance), np.log(q))
    return float(out) if np.ndim(out) == 0 else out


def transition_density(sigma, eta, spec):
    """Density of moving from ``eta`` to ``sigma``; symmetric in its arguments."""
    return heat_kernel_density(np.asarray(sigma) - np.asarray(eta), spec)


def log_transition_density(sigma, eta, spec):
    return log_heat_kernel_density(np.asarray(sigma) - np.asarray(eta), spec)


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform periodic grid on [0, 2 pi) with equal weights 2 pi / N."""

    num_points: int = DEFAULT_QUAD_POINTS

    def __post_init__(self):
        if int(self.num_points) < 4:
            raise InvalidParameterError(
                f"quadrature needs at least 4 points, got {self.num_points}"
            )
        object.__setattr__(self, "num_points", int(self.num_points))

    @cached_property
    def nodes(self):
        return TWO_PI * np.arange(self.num_points) / self.num_points

    @cached_property
    def weights(self):
        return np.full(self.num_points, TWO_PI / self.num_points)

    @property
    def spacing(self):
        return TWO_PI / self.num_points

    def refined(self):
        return QuadratureGrid(2 * self.num_points)


def integrate_periodic(f, grid=None):
    """Rectangle rule on the uniform periodic grid; ``f`` must accept arrays."""
    if grid is None:
        grid = QuadratureGrid()
    elif isinstance(grid, int):
        grid = QuadratureGrid(grid)
    values = np.asarray(f(grid.nodes), dtype=float)
    if not np.all(np.isfinite(values)):
        raise InvalidParameterError("integrand is not finite on the quadrature nodes")
    return float(values @ grid.weights)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    refined_value: float
    num_points: int

    @property
    def change(self):
        return abs(self.refined_value - self.value)

    def converged(self, tol=QUAD_TOL):
        return self.change <= tol


def integrate_periodic_checked(f, grid=None):
    """Integrate and re-integrate on the doubled grid for a convergence flag."""
    if grid is None:
        grid = QuadratureGrid()
    return QuadratureResult(
        integrate_periodic(f, grid), integrate_periodic(f, grid.refined()), grid.num_points
    )


@dataclass(frozen=True)
class ConditioningMeasure:
    """Finite mixture of point masses on the circle."""

    angles: tuple
    weights: tuple = field(default=None)

    def __post_init__(self):
        angles = np.atleast_1d(np.asarray(self.angles, dtype=float))
        if self.weights is None:
            weights = np.full(angles.size, 1.0 / angles.size)
        else:
            weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if angles.shape != weights.shape or angles.size == 0:
            raise InvalidParameterError("atoms and weights must be non-empty and aligned")
        if not (np.all(np.isfinite(angles)) and np.all(np.isfinite(weights))):
            raise InvalidParameterError("atoms and weights must be finite")
        if np.any(weights < 0):
            raise InvalidParameterError("atom weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise InvalidParameterError(f"atom weights sum to {weights.sum()!r}, not 1")
        object.__setattr__(self, "angles", tuple(float(a) for a in wrap_angle(angles).ravel()))
        object.__setattr__(self, "weights", tuple(float(w) for w in weights))

    @classmethod
    def point(cls, angle):
        return cls((angle,), (1.0,))

    @classmethod
    def uniform(cls, num_atoms, offset=0.0):
        return cls(tuple(offset + TWO_PI * np.arange(num_atoms) / num_atoms))

    @property
    def angle_array(self):
        return np.array(self.angles)

    @property
    def weight_array(self):
        return np.array(self.weights)

    def rotated(self, phi):
        return ConditioningMeasure(tuple(self.angle_array + phi), self.weights)

    def reflected(self):
        """Mirror image across the e(0) axis."""
        return ConditioningMeasure(tuple(-self.angle_array), self.weights)

    def merged(self, atol=1e-15):
        """Combine atoms that coincide on the circle."""
        angles, weights = [], []
        for a, w in zip(self.angles, self.weights):
            for i, b in enumerate(angles):
                if abs(wrap_centered(a - b)) <= atol:
                    weights[i] += w
                    break
            else:
                angles.append(a)
                weights.append(w)
        return ConditioningMeasure(tuple(angles), tuple(weights))


@dataclass(frozen=True)
class StdAlphaReport:
    value: float
    per_eta: tuple
    argmin_offsets: tuple
    sup_spread: float
    num_points: int
    refined_value: float

    @property
    def converged(self):
        return abs(self.refined_value - self.value) <= QUAD_TOL


def _second_moment(a, eta, spec, grid):
    sigma = grid.nodes
    dens = heat_kernel_density(sigma - eta, spec)
    d2 = 2.0 - 2.0 * np.cos(sigma - a)
    return float((d2 * dens) @ grid.weights)


def _std_alpha_single(eta, spec, grid, num_candidates=256):
    cand = eta + TWO_PI * np.arange(num_candidates) / num_candidates
    vals = [_second_moment(a, eta, spec, grid) for a in cand]
    i = int(np.argmin(vals))
    h = TWO_PI / num_candidates
    a_best, v_best = golden_section(
        lambda a: _second_moment(a, eta, spec, grid), cand[i] - h, cand[i] + h, tol=1e-12
    )
    return math.sqrt(max(v_best, 0.0)), wrap_centered(a_best - eta)


def std_alpha_heat_report(spec, metric=Metric.EUCLIDEAN_CHORD, grid=None, num_eta=16):
    """sup over eta, inf over a of (int d(sigma, a)^2 k_t(sigma, eta) alpha(d sigma))^(1/2).

    alpha is the uniform measure, so k_t(., eta) alpha(d sigma) is the heat
    kernel density in sigma. Each eta on an equally spaced set is minimized
    over a independently; the spread of the per-eta values and the offset of
    the minimizing a from eta expose the rotational symmetry numerically.
    """
    if Metric(metric) is not Metric.EUCLIDEAN_CHORD:
        raise InvalidParameterError(f"unsupported metric {metric!r}")
    spec = _check_spec(spec)
    if grid is None:
        grid = QuadratureGrid()
    etas = TWO_PI * np.arange(num_eta) / num_eta + 0.1
    per_eta, offsets = zip(*(_std_alpha_single(e, spec, grid) for e in etas))
    refined, _ = _std_alpha_single(etas[0], spec, grid.refined())
    return StdAlphaReport(
        value=max(per_eta),
        per_eta=tuple(per_eta),
        argmin_offsets=tuple(offsets),
        sup_spread=max(per_eta) - min(per_eta),
        num_points=grid.num_points,
        refined_value=refined,
    )


def std_alpha_heat(spec, metric=Metric.EUCLIDEAN_CHORD, grid=None):
    return std_alpha_heat_report(spec, metric, grid).value


def std_alpha_uniform(grid=None):
    """The same functional with the kernel replaced by 1 (uniform posterior)."""
    if grid is None:
        grid = QuadratureGrid()
    sigma = grid.nodes
    best = min(
        float((2.0 - 2.0 * np.cos(sigma - a)) @ grid.weights) / TWO_PI
        for a in TWO_PI * np.arange(8) / 8
    )
    return math.sqrt(best)

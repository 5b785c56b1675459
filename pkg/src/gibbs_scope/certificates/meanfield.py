"""Mean-field Gibbsianness certificates built on the constant C(F, g).

The interaction is Phi(nu) = F(nu[g_1], ..., nu[g_l]) with g a bounded
observable on the sphere S^n (n = 1 or 2), represented through its values on
embedding coordinates x in R^(n+1). Suprema over the sphere are taken on
angle grids with 65 points per angle variable, polished locally and checked
against one grid doubling.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ..errors import InvalidParameterError, RefinementError

GRID_POINTS = 65
REFINE_TOL = 1e-8
HULL_STEPS = 9


def sphere_points(n, points_per_angle=GRID_POINTS):
    """Embedding coordinates of an angle grid on S^n, shape (N, n+1).

    The grids are closed (endpoints included) so that axis points such as
    the poles and theta = 0, pi are always present.
    """
    if n == 1:
        th = np.linspace(0.0, 2 * math.pi, points_per_angle)[:-1]
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    if n == 2:
        half = (points_per_angle + 1) // 2
        th = np.linspace(0.0, math.pi, half)
        ph = np.linspace(0.0, 2 * math.pi, points_per_angle)[:-1]
        T, P = np.meshgrid(th[1:-1], ph, indexing="ij")
        body = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1)
        poles = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
        return np.vstack([poles, body.reshape(-1, 3)])
    raise InvalidParameterError(f"sphere dimension n must be 1 or 2, got {n!r}")


def _to_sphere(params, n):
    if n == 1:
        return np.array([math.cos(params[0]), math.sin(params[0])])
    th, ph = params
    return np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])


def _to_angles(x, n):
    if n == 1:
        return np.array([math.atan2(x[1], x[0])])
    return np.array([math.acos(max(-1.0, min(1.0, x[2]))), math.atan2(x[1], x[0])])


@dataclass(frozen=True)
class SupResult:
    value: float
    refined_value: float
    converged: bool


def _checked(coarse, fine, tol, strict, name):
    ok = abs(fine - coarse) <= tol * max(1.0, abs(fine))
    if strict and not ok:
        raise RefinementError(f"{name}: grid supremum moved from {coarse!r} to {fine!r} on refinement")
    return SupResult(max(coarse, fine), fine, ok)


@dataclass
class MeanFieldInteractionSpec:
    """F with gradient and Hessian (all vectorized over (N, l)) and g: (N, n+1) -> (N, l)."""

    F: object
    grad: object
    hess: object
    g: object
    l: int
    n: int = 1
    name: str = "generic"
    strict: bool = True
    cache: dict = field(default_factory=dict, repr=False)

    def _samples(self, k):
        return sphere_points(self.n, k)

    def _polish(self, fun, x0):
        """Maximize fun over sphere angles starting from embedding points x0."""
        p0 = np.concatenate([_to_angles(x, self.n) for x in x0])
        k = len(x0)

        def neg(p):
            pts = [_to_sphere(p[i * self.n:(i + 1) * self.n], self.n) for i in range(k)]
            return -fun(*pts)

        res = minimize(neg, p0, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000})
        return max(-res.fun, fun(*x0))

    def delta_g(self):
        """Sum over components of sup g_j - inf g_j."""
        def at(k):
            vals = self.g(self._samples(k))
            osc = vals.max(axis=0) - vals.min(axis=0)
            total = 0.0
            for j in range(self.l):
                hi = self._polish(lambda x: float(self.g(x[None])[0, j]), [self._samples(k)[vals[:, j].argmax()]])
                lo = -self._polish(lambda x: -float(self.g(x[None])[0, j]), [self._samples(k)[vals[:, j].argmin()]])
                total += max(osc[j], hi - lo)
            return total

        return self._memo("delta_g", lambda: _checked(at(GRID_POINTS), at(2 * GRID_POINTS - 1),
                                                     REFINE_TOL, self.strict, "delta(g)"))

    def lipschitz_norm(self):
        """sup over distinct pairs of |g(x) - g(y)|_2 / |x - y|_2 (chord metric)."""
        def ratio(x, y):
            d = float(np.linalg.norm(x - y))
            if d < 1e-9:
                return 0.0
            gx, gy = self.g(np.stack([x, y]))
            return float(np.linalg.norm(gx - gy)) / d

        def at(k):
            pts = self._samples(k)
            vals = self.g(pts)
            best, arg = 0.0, None
            for start in range(0, len(pts), 256):
                blk = slice(start, start + 256)
                d = np.linalg.norm(pts[blk, None, :] - pts[None, :, :], axis=-1)
                dg = np.linalg.norm(vals[blk, None, :] - vals[None, :, :], axis=-1)
                with np.errstate(divide="ignore", invalid="ignore"):
                    r = np.where(d > 1e-9, dg / d, 0.0)
                i = np.unravel_index(np.argmax(r), r.shape)
                if r[i] > best:
                    best, arg = float(r[i]), (pts[blk][i[0]], pts[i[1]])
            return max(best, self._polish(ratio, list(arg)))

        fine_k = 2 * GRID_POINTS - 1 if self.n == 1 else 33
        coarse_k = GRID_POINTS if self.n == 1 else 17
        return self._memo("lip", lambda: _checked(at(coarse_k), at(fine_k), REFINE_TOL,
                                                 self.strict, "Lipschitz norm"))

    def hull_samples(self, k=None):
        """Points of D_g: g-images of grid points and chords between pairs of them."""
        k = k or (33 if self.n == 1 else 9)
        vals = self.g(self._samples(k))
        s = np.linspace(0.0, 1.0, HULL_STEPS)
        i, j = np.triu_indices(len(vals), 1)
        chords = (1 - s)[None, :, None] * vals[i][:, None, :] + s[None, :, None] * vals[j][:, None, :]
        return np.vstack([vals, chords.reshape(-1, self.l)])

    def hessian_max_norm(self):
        def at(k):
            H = self.hess(self.hull_samples(k))
            return float(np.abs(H).max())

        kc = 33 if self.n == 1 else 9
        return self._memo("hess", lambda: _checked(at(kc), at(2 * kc - 1), REFINE_TOL,
                                                  self.strict, "Hessian max norm"))

    def delta_Fg(self):
        """sup over m in D_g of the oscillation of grad F(m) . g over the sphere."""
        def at(k_hull, k_sph):
            m = self.hull_samples(k_hull)
            gv = self.g(self._samples(k_sph))
            best = 0.0
            for start in range(0, len(m), 2048):
                proj = self.grad(m[start:start + 2048]) @ gv.T
                best = max(best, float((proj.max(axis=1) - proj.min(axis=1)).max()))
            return best

        sizes = ((33, GRID_POINTS), (65, 2 * GRID_POINTS - 1)) if self.n == 1 else ((9, 17), (17, 33))
        return self._memo("dFg", lambda: _checked(at(*sizes[0]), at(*sizes[1]), REFINE_TOL,
                                                 self.strict, "delta_Fg"))

    def _memo(self, key, fn):
        if key not in self.cache:
            self.cache[key] = fn()
        return self.cache[key]


def quadratic_rotator_spec(beta, n=1, strict=True):
    """F(m) = -beta |m|^2 / 2 with g the embedding coordinates of S^n."""
    if not (np.isfinite(beta) and beta >= 0):
        raise InvalidParameterError("beta must be finite and >= 0")
    l = n + 1
    return MeanFieldInteractionSpec(
        F=lambda m: -0.5 * beta * (np.asarray(m) ** 2).sum(axis=-1),
        grad=lambda m: -beta * np.asarray(m),
        hess=lambda m: np.broadcast_to(-beta * np.eye(l), np.asarray(m).shape[:-1] + (l, l)),
        g=lambda x: np.asarray(x, dtype=float),
        l=l,
        n=n,
        name="quadratic_rotator",
        strict=strict,
    )


@dataclass(frozen=True)
class CfgConstant:
    value: float
    hessian_max_norm: float
    delta_g: float
    lipschitz_norm: float
    delta_Fg: float
    converged: bool


def mf_cfg_constant(spec):
    """C(F, g) = 2 ||d^2 F||_max,inf delta(g) ||g||_d,2 exp(delta_Fg / 2), with its parts."""
    parts = [spec.hessian_max_norm(), spec.delta_g(), spec.lipschitz_norm(), spec.delta_Fg()]
    h, dg, lip, dfg = (p.value for p in parts)
    return CfgConstant(2.0 * h * dg * lip * math.exp(dfg / 2.0), h, dg, lip, dfg,
                       all(p.converged for p in parts))


def cor3_constant(beta, n=1):
    """Closed form 4 beta (n+1) e^beta of C for the quadratic rotator."""
    return 4.0 * beta * (n + 1) * math.exp(beta)


def _c_value(spec_or_value):
    if isinstance(spec_or_value, MeanFieldInteractionSpec):
        return mf_cfg_constant(spec_or_value).value
    if isinstance(spec_or_value, CfgConstant):
        return spec_or_value.value
    c = float(spec_or_value)
    if not (c >= 0):
        raise InvalidParameterError("C(F, g) must be >= 0")
    return c


@dataclass(frozen=True)
class GeneralCertificate:
    holds: bool
    margin: float
    continuity_coefficient: float
    C: float
    std_alpha_k: float
    std_alpha: float


def mf_gibbs_certificate(spec, std_alpha_k, std_alpha=math.sqrt(2.0)):
    """holds iff C std_alpha(k) < 1; continuity coefficient C^2 std_alpha(k) std_alpha."""
    if not (std_alpha_k >= 0):
        raise InvalidParameterError("std_alpha(k) must be >= 0")
    C = _c_value(spec)
    prod = C * std_alpha_k
    return GeneralCertificate(prod < 1, 1.0 - prod, C * C * std_alpha_k * std_alpha, C,
                              float(std_alpha_k), float(std_alpha))


@dataclass(frozen=True)
class TimeThreshold:
    C: float
    n: int
    t_max: float
    beta: float = math.nan

    def condition(self, t):
        """sqrt(2) C (1 - exp(-n t))^(1/2)."""
        if t < 0:
            raise InvalidParameterError("t must be >= 0")
        return math.sqrt(2.0) * self.C * math.sqrt(-math.expm1(-self.n * t))

    def holds_at(self, t):
        return self.condition(t) < 1

    def continuity_coefficient(self, t):
        return 2.0 * self.C ** 2 * math.sqrt(-math.expm1(-self.n * t))

    @property
    def holds_for_all_t(self):
        return math.isinf(self.t_max)


def thm2_threshold(beta, n, C_value):
    """Largest t with sqrt(2) C (1 - e^{-nt})^(1/2) < 1, or inf when it holds forever."""
    C = _c_value(C_value)
    if n < 1:
        raise InvalidParameterError("sphere dimension n must be >= 1")
    two_c2 = 2.0 * C * C
    t_max = -math.log1p(-1.0 / two_c2) / n if two_c2 > 1 else math.inf
    return TimeThreshold(C, int(n), t_max, float(beta))


def cor3(beta, n=1):
    return thm2_threshold(beta, n, cor3_constant(beta, n))


@dataclass(frozen=True)
class FinenessCertificate:
    holds: bool
    rho_max: float
    rho: float
    min_arcs: int


def arc_diameter(M):
    """Chord diameter of one of M equal arcs of the unit circle."""
    return 2.0 if M == 1 else 2.0 * math.sin(math.pi / M)


def minimal_arc_count(rho_max):
    """Smallest M whose equal-arc decomposition has fineness < rho_max."""
    if not (rho_max > 0):
        raise InvalidParameterError("rho_max must be > 0")
    if rho_max > 2.0:
        return 1
    M = max(2, int(math.pi / math.asin(min(1.0, rho_max / 2.0))) - 1)
    while arc_diameter(M) >= rho_max:
        M += 1
    while M > 2 and arc_diameter(M - 1) < rho_max:
        M -= 1
    return M


def fineness_certificate_mf(spec, rho):
    """holds iff rho C < 1; rho_max = 1 / C."""
    if not (rho >= 0):
        raise InvalidParameterError("rho must be >= 0")
    C = _c_value(spec)
    rho_max = math.inf if C == 0 else 1.0 / C
    return FinenessCertificate(rho * C < 1, rho_max, float(rho),
                               1 if math.isinf(rho_max) else minimal_arc_count(rho_max))

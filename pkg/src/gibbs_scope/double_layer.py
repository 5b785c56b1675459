"""Conditioned double-layer pair potential on the circle.

Phi(s1, s2) = -beta J cos(s1 - s2) - (beta h / 4)(cos s1 + cos s2)
              - (1/4) log p_t(s1, pi + eps) - (1/4) log p_t(s2, pi - eps)

with p_t the wrapped Gaussian of variance t. The potential satisfies
Phi(s1, s2; eps) = Phi(-s2, -s1; eps), so critical points exist on the
anti-diagonal s1 + s2 = 0 (mod 2 pi); the North form is (d, -d) with cos d > 0
and the South form (pi + d', pi - d') with cos d' > 0.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ._numerics import fd_hessian, golden_section, parallel_map
from .circle_kernel import (
    TWO_PI,
    Convention,
    HeatKernelSpec,
    log_heat_kernel_density,
    log_wrapped_gaussian_density,
    wrap_centered,
)
from .errors import BifurcationError, BracketError, DegenerateBifurcationError, InvalidParameterError, SymmetricCaseError

R_TERMS = 10
FORM_TOL = 1e-6


@dataclass(frozen=True)
class PairPotentialParams:
    beta: float
    J: float
    h: float
    t: float
    epsilon: float = 0.0
    image_terms: int = None

    def __post_init__(self):
        for name in ("beta", "J", "h", "t", "epsilon"):
            if not np.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        if self.beta < 0 or self.h < 0:
            raise InvalidParameterError("beta and h must be >= 0")
        if not self.J > 0:
            raise InvalidParameterError("J must be > 0")
        if not self.t > 0:
            raise InvalidParameterError("t must be > 0")
        if not (-math.pi < self.epsilon < math.pi):
            raise InvalidParameterError("epsilon must lie in (-pi, pi)")

    @property
    def kernel_spec(self):
        return HeatKernelSpec(self.t, Convention.WRAPPED_PT)

    def with_epsilon(self, eps):
        return PairPotentialParams(self.beta, self.J, self.h, self.t, eps, self.image_terms)


def default_time(beta, h):
    """Starting point t = 0.4 / (beta h) for bracket searches."""
    if not beta * h > 0:
        raise InvalidParameterError("default time needs beta h > 0")
    return 0.4 / (beta * h)


def log_R_term(sigma, center, t, terms=R_TERMS):
    """log(1 + sum_{n != 0} exp(-((x + 2 pi n)^2 - x^2) / (2t))), x = sigma - center in (-pi, pi]."""
    if not t > 0:
        raise InvalidParameterError("t must be > 0")
    x = np.asarray(wrap_centered(np.asarray(sigma, dtype=float) - center))
    n = np.concatenate([np.arange(-terms, 0), np.arange(1, terms + 1)])
    expo = -(4.0 * math.pi * n * x[..., None] + 4.0 * math.pi ** 2 * n * n) / (2.0 * t)
    out = np.log1p(np.exp(expo).sum(axis=-1))
    return float(out) if out.ndim == 0 else out


def log_p_decomposed(sigma, center, t):
    """-log sqrt(2 pi t) - x^2 / (2t) + R_t, the split used in the potential's analysis."""
    x = wrap_centered(np.asarray(sigma, dtype=float) - center)
    return -0.5 * math.log(TWO_PI * t) - np.asarray(x) ** 2 / (2.0 * t) + log_R_term(sigma, center, t)


def make_potential(p):
    """Vectorized (s1, s2) -> Phi; also accepts a single (..., 2) array."""
    spec = p.kernel_spec
    c1, c2 = math.pi + p.epsilon, math.pi - p.epsilon
    bJ, bh = p.beta * p.J, p.beta * p.h
    if p.image_terms is None:
        logp = lambda x: log_heat_kernel_density(x, spec)
    else:
        logp = lambda x: log_wrapped_gaussian_density(x, p.t, p.image_terms)

    def phi(s1, s2=None):
        if s2 is None:
            s = np.asarray(s1, dtype=float)
            s1, s2 = s[..., 0], s[..., 1]
        s1, s2 = np.asarray(s1, dtype=float), np.asarray(s2, dtype=float)
        return (
            -bJ * np.cos(s1 - s2)
            - 0.25 * bh * (np.cos(s1) + np.cos(s2))
            - 0.25 * logp(s1 - c1)
            - 0.25 * logp(s2 - c2)
        )

    return phi


def pair_potential(sigma1, sigma2, p):
    out = make_potential(p)(sigma1, sigma2)
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class GroundState:
    location: tuple
    depth: float
    hessian: np.ndarray
    positive_definite: bool
    form: str


@dataclass
class GroundStateReport:
    minima: list
    global_minima: list
    near_form_flags: dict
    degenerate: bool
    grid_n: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def unique(self):
        return len(self.global_minima) == 1


def classify_form(s, tol=FORM_TOL):
    """'north', 'south' or 'other' for a minimizer location."""
    s1, s2 = s
    if abs(wrap_centered(s1 + s2)) > tol:
        return "other"
    return "north" if math.cos(s1) > 0 else "south"


def _canonical(s):
    return tuple(float(x) for x in np.mod(s, TWO_PI))


def _torus_distance(a, b):
    return float(np.hypot(*wrap_centered(np.asarray(a) - np.asarray(b))))


def ground_states(p, grid_n=256, tol=1e-10, depth_tol=1e-10):
    """Every local minimum of Phi on the torus, located by grid scan and descent.

    Grid ties are kept (<= against the 8 neighbours) and merged after
    refinement, so symmetric configurations are not lost on plateaus.
    """
    if grid_n < 128:
        raise InvalidParameterError("grid_n must be at least 128")
    phi = make_potential(p)
    g = TWO_PI * np.arange(grid_n) / grid_n
    S1, S2 = np.meshgrid(g, g, indexing="ij")
    V = phi(S1, S2)
    is_min = np.ones_like(V, dtype=bool)
    for d1 in (-1, 0, 1):
        for d2 in (-1, 0, 1):
            if d1 or d2:
                is_min &= V <= np.roll(np.roll(V, d1, 0), d2, 1)
    cands = np.argwhere(is_min)
    f = lambda x: float(phi(x[0], x[1]))
    spacing = TWO_PI / grid_n

    def refine(ij):
        x0 = np.array([g[ij[0]], g[ij[1]]])
        simplex = np.array([x0, x0 + [spacing, 0], x0 + [0, spacing]])
        res = minimize(f, x0, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": tol, "fatol": 1e-15, "maxiter": 4000})
        return res.x, float(res.fun)

    refined = parallel_map(refine, [tuple(c) for c in cands])
    minima = []
    for x, val in sorted(refined, key=lambda r: r[1]):
        loc = _canonical(x)
        if any(_torus_distance(loc, m.location) < 1e-5 for m in minima):
            continue
        H = fd_hessian(f, np.array(loc), 1e-4)
        pd = bool(np.all(np.linalg.eigvalsh(H) > 0))
        minima.append(GroundState(loc, val, H, pd, classify_form(loc, 1e-5)))
    best = minima[0].depth
    global_set = [m for m in minima if m.depth - best <= depth_tol]
    flags = {
        "north": any(m.form == "north" for m in global_set),
        "south": any(m.form == "south" for m in global_set),
        "lowest_two_forms": tuple(m.form for m in minima[:2]),
    }
    degenerate = any(not m.positive_definite for m in minima)
    return GroundStateReport(minima, global_set, flags, degenerate, grid_n,
                             {"candidates": int(len(cands)), "tol": tol})


def _diag_profile(p):
    """Phi restricted to the anti-diagonal, (d) -> Phi(d, -d)."""
    phi = make_potential(p)
    return lambda d: float(phi(d, -d))


@dataclass(frozen=True)
class BasinPair:
    north: tuple
    south: tuple
    north_depth: float
    south_depth: float

    @property
    def difference(self):
        return self.north_depth - self.south_depth


def basin_depths(p, n_scan=2048, tol=1e-12):
    """Deepest North-form and South-form minima along the anti-diagonal."""
    prof = _diag_profile(p)
    d = TWO_PI * np.arange(n_scan) / n_scan - math.pi
    phi = make_potential(p)
    v = phi(d, -d)
    out = {}
    for form, mask in (("north", np.cos(d) > 0), ("south", np.cos(d) < 0)):
        best = None
        for i in np.where(mask)[0]:
            if v[i] <= v[i - 1] and v[i] <= v[(i + 1) % n_scan]:
                x, fx = golden_section(prof, d[i] - TWO_PI / n_scan, d[i] + TWO_PI / n_scan, tol=tol)
                if best is None or fx < best[1]:
                    best = (x, fx)
        if best is None:
            raise DegenerateBifurcationError(f"no {form}-form minimum on the anti-diagonal")
        out[form] = best
    (xn, fn), (xs, fs) = out["north"], out["south"]
    return BasinPair(_canonical((xn, -xn)), _canonical((xs, -xs)), fn, fs)


@dataclass
class SpinFlopResult:
    epsilon: float
    width: float
    depth_difference: float
    basins: BasinPair
    leading_order_residual: float
    iterations: int


def leading_order_residual(p, basins):
    """Equal-depth expression keeping only the R_t image corrections.

    Evaluated at the located minimizers with centres pi + eps, eps, pi - eps
    and eps. The Gaussian parts and higher-order terms are dropped, so it
    need not vanish exactly at the true eps*.
    """
    d = wrap_centered(basins.north[0])
    dp = wrap_centered(basins.south[0] - math.pi)
    e, t = p.epsilon, p.t
    return -0.25 * (log_R_term(d, math.pi + e, t) - log_R_term(dp, e, t)
                    + log_R_term(-d, math.pi - e, t) - log_R_term(-dp, e, t))


def spin_flop_epsilon(beta, J, h, t, bracket=(0.0, math.pi / 2), tol=1e-12, width_tol=1e-12,
                      max_iter=200, n_scan=2048, image_terms=None):
    """Bisect on eps for equal depth of the North-form and South-form basins.

    ``n_scan`` sets the anti-diagonal scan density and ``image_terms`` the
    wrapped-Gaussian truncation, for refinement checks.
    """
    base = PairPotentialParams(beta, J, h, t, 0.0, image_terms)
    depths = lambda q: basin_depths(q, n_scan)
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (lo < hi):
        raise InvalidParameterError("bracket must have lo < hi")
    if h == 0:
        b = depths(base.with_epsilon(lo))
        raise SymmetricCaseError(
            "h = 0: the North/South depth difference is symmetry-controlled",
            epsilon=math.pi / 2, depth_difference=b.difference,
        )
    d_lo = depths(base.with_epsilon(lo)).difference
    d_hi = depths(base.with_epsilon(hi)).difference
    if d_lo * d_hi > 0:
        raise BracketError(f"bracket {bracket!r} does not straddle equal depth ({d_lo:.3e}, {d_hi:.3e})")
    it = 0
    while hi - lo > width_tol and it < max_iter:
        it += 1
        mid = 0.5 * (lo + hi)
        d_mid = depths(base.with_epsilon(mid)).difference
        if abs(d_mid) < tol:
            lo = hi = mid
            break
        if (d_mid > 0) == (d_lo > 0):
            lo, d_lo = mid, d_mid
        else:
            hi = mid
    eps = 0.5 * (lo + hi)
    p = base.with_epsilon(eps)
    b = depths(p)
    return SpinFlopResult(eps, hi - lo, b.difference, b, leading_order_residual(p, b), it)


def find_spin_flop_bracket(beta, J, h, t, eps_grid=None):
    """First adjacent pair on an epsilon grid where the depth difference changes sign."""
    eps_grid = np.linspace(0.0, math.pi / 2, 17) if eps_grid is None else np.asarray(eps_grid)
    base = PairPotentialParams(beta, J, h, t, 0.0)
    diffs = [basin_depths(base.with_epsilon(e)).difference for e in eps_grid]
    for a, b, da, db in zip(eps_grid, eps_grid[1:], diffs, diffs[1:]):
        if da * db <= 0:
            return float(a), float(b)
    raise BracketError("no sign change of the North/South depth difference on the grid")


@dataclass
class HessianCheck:
    location: tuple
    hessian: np.ndarray
    hessian_half_step: np.ndarray
    step_halving_change: float
    ratio: float
    positive_definite: bool
    determinant: float


def hessian_diagnostics(f, x, h=1e-3):
    x = np.asarray(x, dtype=float)
    H1 = fd_hessian(f, x, h)
    H2 = fd_hessian(f, x, h / 2)
    H = (4 * H2 - H1) / 3  # Richardson step
    ratio = abs(H[0, 1]) / H[0, 0] if H[0, 0] != 0 else math.inf
    pd = bool(np.all(np.linalg.eigvalsh(H) > 0))
    return HessianCheck(tuple(x), H, H2, float(np.abs(H2 - H1).max()), float(ratio), pd,
                        float(np.linalg.det(H)))


@dataclass
class Malyshev6Report:
    checks: list
    all_positive_definite: bool
    ratios: tuple
    note: str = "no threshold is given for the cross-derivative ratio; it is reported only"


def malyshev6_conditions(potential, minima, h=1e-3):
    """Second-differential diagnostics at each supplied minimum of a 2-variable potential."""
    f = lambda x: float(potential(x[0], x[1]))
    checks = [hessian_diagnostics(f, m.location if hasattr(m, "location") else m, h) for m in minima]
    return Malyshev6Report(checks, all(c.positive_definite for c in checks),
                           tuple(c.ratio for c in checks))


@dataclass
class RecoveryReport:
    c: float
    eta_ratio: float
    reference_hessian: np.ndarray
    hessian_sigma: np.ndarray
    hessian_rescaled: np.ndarray
    relative_mismatch: float
    relative_mismatch_alt: float
    positive_definite_reference: bool
    positive_definite_numeric: bool
    reference_determinant: float
    numeric_determinant: float
    origin_is_global_minimum: bool
    time_condition: bool
    log_c: float
    step_halving_change: float


def reference_recovery_form(J, h, beta):
    """c(J, h) = (4J + h) / (4 (2 pi)^2) and the matrix 2 beta [[c, -J/(2 pi)^2], [-J/(2 pi)^2, c]]."""
    c = (4.0 * J + h) / (4.0 * TWO_PI ** 2)
    off = -J / TWO_PI ** 2
    return c, 2.0 * beta * np.array([[c, off], [off, c]])


def recovery_check(J, h, t, beta=1.0, epsilon=0.0, grid_n=256):
    """Quadratic form of the shifted potential at the origin.

    Hessians are reported in the angle variables and in the rescaled variable
    s = sigma / (2 pi); the mismatch is measured against the reference form in
    the rescaled variable. ``relative_mismatch_alt`` compares instead against
    H_sigma / (2 pi)^2, the other reading of the prefactors.
    """
    if not (t > 0 and J > 0):
        raise InvalidParameterError("recovery check needs t > 0 and J > 0")
    p = PairPotentialParams(beta, J, h, t, epsilon)
    phi = make_potential(p)
    shift = float(phi(0.0, 0.0))
    f = lambda x: float(phi(x[0], x[1])) - shift
    diag = hessian_diagnostics(f, (0.0, 0.0), 1e-3)
    H_sigma = diag.hessian
    H_s = TWO_PI ** 2 * H_sigma
    c, ref = reference_recovery_form(J, h, beta)
    scale = np.abs(ref).max()
    mismatch = float(np.abs(H_s - ref).max() / scale)
    mismatch_alt = float(np.abs(H_sigma / TWO_PI ** 2 - ref).max() / scale)
    g = TWO_PI * np.arange(grid_n) / grid_n
    S1, S2 = np.meshgrid(g, g, indexing="ij")
    V = phi(S1, S2) - shift
    origin_global = bool(V.min() >= -1e-12)
    log_c = math.log(c)
    return RecoveryReport(
        c=c,
        eta_ratio=ref[0, 1] / ref[0, 0],
        reference_hessian=ref,
        hessian_sigma=H_sigma,
        hessian_rescaled=H_s,
        relative_mismatch=mismatch,
        relative_mismatch_alt=mismatch_alt,
        positive_definite_reference=bool(np.all(np.linalg.eigvalsh(ref) > 0)),
        positive_definite_numeric=diag.positive_definite,
        reference_determinant=float(np.linalg.det(ref)),
        numeric_determinant=diag.determinant,
        origin_is_global_minimum=origin_global,
        time_condition=bool(t > log_c),
        log_c=log_c,
        step_halving_change=diag.step_halving_change,
    )

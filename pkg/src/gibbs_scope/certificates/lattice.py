"""Dobrushin-type certificates for the nearest-neighbour rotor model on a torus.

The lattice Z^d is replaced by the periodic torus (Z / Ls Z)^d. Every matrix
in this module is translation invariant, so it is stored as a convolution
kernel: ``kernel[x]`` is the entry (i, i + x) for any site i.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..circle_kernel import (
    TWO_PI,
    Convention,
    HeatKernelSpec,
    QuadratureGrid,
    heat_kernel_density,
    std_alpha_heat,
)
from ..errors import DivergenceError, InvalidKernelError, InvalidParameterError, RefinementError

GRID_POINTS = 65
REFINE_TOL = 1e-9
NEUMANN_TOL = 1e-12
NEUMANN_MAX_TERMS = 100_000


@dataclass(frozen=True)
class LatticeInteractionSpec:
    """Nearest-neighbour pair term -beta J cos(s_i - s_j) plus field -beta h cos(s_i)."""

    beta: float
    J: float = 1.0
    h: float = 0.0
    d: int = 2
    n: int = 1
    Ls: int = 16

    def __post_init__(self):
        for name in ("beta", "J", "h"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise InvalidParameterError(f"{name} must be finite")
        if self.beta < 0:
            raise InvalidParameterError("beta must be >= 0")
        if self.d < 1 or self.n < 1:
            raise InvalidParameterError("dimension d and sphere dimension n must be >= 1")
        if self.Ls < 3:
            raise InvalidParameterError("torus side must be >= 3 so neighbours are distinct")

    @property
    def bJ(self):
        return self.beta * abs(self.J)

    @property
    def bh(self):
        return self.beta * abs(self.h)

    @property
    def coordination(self):
        return 2 * self.d

    @property
    def pair_oscillation(self):
        """delta(Phi_ij) for the cosine pair term."""
        return 2.0 * self.bJ

    @property
    def pair_sup_norm(self):
        return self.bJ

    @property
    def site_sup_sum(self):
        """sup_i sum_{A containing i} ||Phi_A||_inf, field term included."""
        return self.coordination * self.bJ + self.bh

    @property
    def triple_norm(self):
        return self.coordination * 2 * self.bJ + self.bh

    def neighbour_offsets(self):
        out = []
        for axis in range(self.d):
            for sign in (1, -1):
                v = [0] * self.d
                v[axis] = sign
                out.append(tuple(v))
        return out


@dataclass(frozen=True)
class DobrushinMatrix:
    """Nonnegative translation-invariant matrix on the torus, stored as a kernel."""

    kernel: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.kernel, dtype=float)
        if np.any(k < 0) or not np.all(np.isfinite(k)):
            raise InvalidParameterError("matrix entries must be finite and nonnegative")
        k.setflags(write=False)
        object.__setattr__(self, "kernel", k)

    @classmethod
    def zeros(cls, Ls, d):
        return cls(np.zeros((Ls,) * d))

    @classmethod
    def identity(cls, Ls, d):
        k = np.zeros((Ls,) * d)
        k[(0,) * d] = 1.0
        return cls(k)

    @classmethod
    def from_offsets(cls, Ls, d, entries):
        k = np.zeros((Ls,) * d)
        for off, v in entries.items():
            k[tuple(o % Ls for o in off)] += v
        return cls(k)

    @property
    def Ls(self):
        return self.kernel.shape[0]

    @property
    def d(self):
        return self.kernel.ndim

    @property
    def num_sites(self):
        return self.kernel.size

    def entry(self, i, j):
        off = tuple((b - a) % self.Ls for a, b in zip(np.atleast_1d(i), np.atleast_1d(j)))
        return float(self.kernel[off])

    def row_sums(self):
        """Row sum at every site; constant by translation invariance."""
        return np.full(self.kernel.shape, self.kernel.sum())

    @property
    def row_sum_sup(self):
        return float(self.kernel.sum())

    @property
    def offdiag_row_sum_sup(self):
        return float(self.kernel.sum() - self.kernel[(0,) * self.d])

    @property
    def spectral_radius(self):
        """Largest modulus of the kernel's discrete Fourier transform."""
        return float(np.abs(np.fft.fftn(self.kernel)).max())

    def nonzero_offsets(self):
        idx = np.argwhere(self.kernel != 0)
        return [(tuple(i), float(self.kernel[tuple(i)])) for i in idx]

    def compose(self, other):
        """Matrix product as a periodic convolution using only nonzero offsets of ``self``."""
        out = np.zeros_like(other.kernel)
        for off, v in self.nonzero_offsets():
            out += v * np.roll(other.kernel, off, axis=tuple(range(self.d)))
        return DobrushinMatrix(out)

    def scaled(self, c):
        return DobrushinMatrix(self.kernel * c)

    def __add__(self, other):
        return DobrushinMatrix(self.kernel + other.kernel)

    def to_dense(self):
        sites = list(itertools.product(range(self.Ls), repeat=self.d))
        M = np.empty((len(sites), len(sites)))
        for a, i in enumerate(sites):
            for b, j in enumerate(sites):
                M[a, b] = self.entry(i, j)
        return M

    def graph_distance_profile(self):
        """Max entry at each torus graph distance from the origin."""
        coords = np.indices(self.kernel.shape)
        dist = np.minimum(coords, self.Ls - coords).sum(axis=0)
        return [float(self.kernel[dist == r].max()) for r in range(int(dist.max()) + 1)]


def _checked(name, coarse, fine, strict=True):
    ok = abs(fine - coarse) <= REFINE_TOL * max(1.0, abs(fine))
    if strict and not ok:
        raise RefinementError(f"{name}: grid supremum changed from {coarse!r} to {fine!r}")
    return max(coarse, fine), ok


def _pair_lipschitz_sup(k):
    """Grid sup of the pair ratio with a_i = 0 (rotation invariance)."""
    g = np.linspace(0.0, TWO_PI, k)
    Z, Zb, S = np.meshgrid(g, g, g, indexing="ij", sparse=True)
    diff_s = np.cos(S - Z) - np.cos(S - Zb)
    diff_a = np.cos(Z) - np.cos(Zb)
    dist = 2.0 * np.abs(np.sin(S / 2.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(dist > 1e-12, np.abs(diff_s - diff_a) / dist, 0.0)
    return float(r.max())


def _site_lipschitz_sup(k, coord, bJ, bh):
    """Grid sup of the site ratio; all neighbours share the conditioning angle."""
    g = np.linspace(0.0, TWO_PI, k)
    W, S, A = np.meshgrid(g, g, g, indexing="ij", sparse=True)
    H = lambda x: -bJ * coord * np.cos(x - W) - bh * np.cos(x)
    dist = 2.0 * np.abs(np.sin((S - A) / 2.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(dist > 1e-12, np.abs(H(S) - H(A)) / dist, 0.0)
    return float(r.max())


@dataclass(frozen=True)
class LConstants:
    L_pair: float
    L_site: float
    pair_envelope: float
    site_envelope: float
    converged: bool


def lattice_L_constants(spec, strict=True):
    """Lipschitz constants L_ij (pair variation) and L_i (full site Hamiltonian).

    The cosine is evaluated with unit amplitude and scaled afterwards, so the
    grid computation is shared across couplings.
    """
    pair_unit, ok1 = _checked("L_ij", _pair_lipschitz_sup(GRID_POINTS),
                              _pair_lipschitz_sup(2 * GRID_POINTS - 1), strict)
    coord = spec.coordination
    site, ok2 = _checked(
        "L_i",
        _site_lipschitz_sup(GRID_POINTS, coord, spec.bJ, spec.bh),
        _site_lipschitz_sup(2 * GRID_POINTS - 1, coord, spec.bJ, spec.bh),
        strict,
    )
    return LConstants(spec.bJ * pair_unit, site, 2.0 * spec.bJ, coord * spec.bJ + spec.bh, ok1 and ok2)


def _neighbour_matrix(spec, value):
    return DobrushinMatrix.from_offsets(spec.Ls, spec.d, {o: value for o in spec.neighbour_offsets()})


def cbar_entry_t(spec, t, L_pair=None):
    if t < 0:
        raise InvalidParameterError("t must be >= 0")
    if L_pair is None:
        L_pair = lattice_L_constants(spec).L_pair
    return L_pair / math.sqrt(2.0) * math.sqrt(-math.expm1(-spec.n * t)) * math.exp(spec.pair_oscillation / 2)


def cbar_matrix_t(spec, t, L_pair=None):
    """C-bar(t): (L_ij / sqrt 2)(1 - e^{-nt})^(1/2) exp(delta(Phi_ij) / 2) on neighbours."""
    return _neighbour_matrix(spec, cbar_entry_t(spec, t, L_pair))


def cbar_matrix(spec, std_ij):
    """C-bar from a given std_ij(Phi): (1/2) exp(delta(Phi_ij) / 2) std_ij on neighbours."""
    return _neighbour_matrix(spec, 0.5 * math.exp(spec.pair_oscillation / 2) * std_ij)


@dataclass(frozen=True)
class NeumannResult:
    matrix: DobrushinMatrix
    terms: int
    tail_bound: float


def neumann_series_report(C, tol=NEUMANN_TOL, max_terms=NEUMANN_MAX_TERMS):
    r = C.row_sum_sup
    if r >= 1:
        raise DivergenceError(f"row-sum sup {r!r} >= 1: Neumann series does not converge")
    total = DobrushinMatrix.identity(C.Ls, C.d)
    term = total
    bound = math.inf
    for k in range(1, max_terms + 1):
        term = C.compose(term)
        total = total + term
        bound = term.row_sum_sup * r / (1.0 - r) if r > 0 else 0.0
        if bound < tol:
            return NeumannResult(total, k + 1, bound)
    raise DivergenceError(f"Neumann series did not reach tolerance {tol!r} in {max_terms} terms")


def neumann_series(C, tol=NEUMANN_TOL):
    """D-bar = sum_k C^k, stopping once the geometric tail bound is below ``tol``."""
    return neumann_series_report(C, tol).matrix


def goodness_matrix_Q(spec, C, tol=NEUMANN_TOL):
    """Q_ij = 4 exp(4 s) sum_{k ~ i} delta_k(Phi_ik) D-bar_kj, s the site sup-sum."""
    D = neumann_series(C, tol)
    pref = 4.0 * math.exp(4.0 * spec.site_sup_sum)
    return _neighbour_matrix(spec, pref * spec.pair_oscillation).compose(D)


@dataclass(frozen=True)
class GenthmCertificate:
    holds: bool
    row_sum: float
    t: float
    Qbar: DobrushinMatrix
    t_max: float
    L: LConstants


def genthm_t_max(spec, L_pair=None):
    """Largest t with sup_i sum_j C-bar_ij(t) < 1 (inf if it holds for all t)."""
    if L_pair is None:
        L_pair = lattice_L_constants(spec).L_pair
    sat = spec.coordination * L_pair / math.sqrt(2.0) * math.exp(spec.pair_oscillation / 2)
    if sat < 1:
        return math.inf
    return -math.log1p(-1.0 / (sat * sat)) / spec.n


def genthm_certificate(spec, t):
    """holds iff the C-bar(t) row sum is below 1; then emits Q-bar(t)."""
    if not (t > 0):
        raise InvalidParameterError("t must be > 0")
    L = lattice_L_constants(spec)
    C = cbar_matrix_t(spec, t, L.L_pair)
    holds = C.row_sum_sup < 1
    Qbar = None
    if holds:
        Q = goodness_matrix_Q(spec, C)
        cap = math.expm1(4.0 * L.L_site)
        Qbar = DobrushinMatrix(0.5 * np.minimum(math.sqrt(math.pi / t) * Q.kernel, cap))
    return GenthmCertificate(holds, C.row_sum_sup, float(t), Qbar, genthm_t_max(spec, L.L_pair), L)


@dataclass(frozen=True)
class FineappCertificate:
    holds: bool
    rho_max: float
    rho: float
    min_arcs: int


def fineapp_certificate(spec, rho):
    """holds iff (rho / 2) sup_i sum_{j != i} exp(delta(Phi_ij) / 2) L_ij < 1."""
    from .meanfield import minimal_arc_count

    if not (rho >= 0):
        raise InvalidParameterError("rho must be >= 0")
    L = lattice_L_constants(spec)
    s = spec.coordination * math.exp(spec.pair_oscillation / 2) * L.L_pair
    rho_max = math.inf if s == 0 else 2.0 / s
    return FineappCertificate(0.5 * rho * s < 1, rho_max, float(rho),
                              1 if math.isinf(rho_max) else minimal_arc_count(rho_max))


def heat_kernel_k(t, convention=Convention.FOURIER_QT):
    """k_t(sigma, eta) = 2 pi p_t(sigma - eta), the heat kernel relative to alpha."""
    spec = HeatKernelSpec(t, convention)
    return lambda sigma, eta: TWO_PI * heat_kernel_density(np.asarray(sigma) - eta, spec)


def posterior_metric_distance(kernel, eta1, eta2, grid=None):
    """Variational distance 1/2 int |a_1 - a_2| d alpha between normalized conditionals.

    a_e(sigma) = k(sigma, e) / int k(., e) d alpha, so the result lies in [0, 1].
    """
    grid = grid or QuadratureGrid()
    s = grid.nodes
    w = grid.weights / TWO_PI
    k1 = np.asarray(kernel(s, eta1), dtype=float)
    k2 = np.asarray(kernel(s, eta2), dtype=float)
    if k1.shape != s.shape:
        k1 = np.broadcast_to(k1, s.shape)
    if k2.shape != s.shape:
        k2 = np.broadcast_to(k2, s.shape)
    if not (np.all(k1 > 0) and np.all(k2 > 0) and np.all(np.isfinite(k1)) and np.all(np.isfinite(k2))):
        raise InvalidKernelError("kernel must be strictly positive and finite")
    a1, a2 = k1 / (k1 @ w), k2 / (k2 @ w)
    return 0.5 * float(np.abs(a1 - a2) @ w)


@dataclass(frozen=True)
class StdComparison:
    direct: float
    bound: float
    L_pair: float
    std_alpha_k: float


def std_ij_direct(spec, t, grid=None, k=GRID_POINTS):
    """std_ij(Phi) with b at the conditional mean, for the heat kernel at time t.

    The conditioning angle is fixed at 0 by rotation invariance of the pair
    term; the sup runs over the two values of the varied neighbour.
    """
    grid = grid or QuadratureGrid()
    ks = HeatKernelSpec(t, Convention.FOURIER_QT)
    s = grid.nodes
    w = heat_kernel_density(s, ks) * grid.weights
    g = np.linspace(0.0, TWO_PI, k)
    best = 0.0
    for z in g:
        diff = -spec.bJ * (np.cos(s[None, :] - z) - np.cos(s[None, :] - g[:, None]))
        mean = diff @ w
        var = (diff * diff) @ w - mean * mean
        best = max(best, float(np.sqrt(np.maximum(var, 0.0)).max()))
    return best


def std_ij_comparison(spec, t, grid=None):
    """Direct std_ij against the Lipschitz bound L_ij * std_alpha(k_t)."""
    L = lattice_L_constants(spec).L_pair
    sk = std_alpha_heat(HeatKernelSpec(t, Convention.FOURIER_QT), grid=grid)
    return StdComparison(std_ij_direct(spec, t, grid), L * sk, L, sk)

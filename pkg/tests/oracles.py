"""Independent reference computations used by several test modules.

The Bessel-series route to the log-moment avoids quadrature entirely:
int exp(U cos(theta + phi)) q_t(theta) dtheta = I0(U) + 2 sum_k e^{-k^2 t} I_k(U) cos(k phi).
"""

import math

import numpy as np
from scipy import special

KMAX = 80


def log_moment(U, phi, t, kmax=KMAX):
    U = np.asarray(U, dtype=float)
    k = np.arange(1, kmax + 1)
    damp = np.exp(-k * k * t) * np.cos(k * phi)
    scaled = special.ive(0, U) + 2.0 * (special.ive(k, U[..., None]) @ damp)
    return np.abs(U) + np.log(scaled)


def L_oracle(U, epsilon, t, kmax=KMAX):
    return 0.5 * (log_moment(U, math.pi + epsilon, t, kmax) + log_moment(U, math.pi - epsilon, t, kmax))


def G_oracle(U, beta, h_bar, epsilon, t, kmax=KMAX):
    U = np.asarray(U, dtype=float)
    return U * U / (2.0 * beta) - U * h_bar - L_oracle(U, epsilon, t, kmax)


def brute_minima_1d(f, lo, hi, n=10 ** 6, chunk=200_000):
    """Interior grid local minima (and boundary minima) of f on n points."""
    x = np.linspace(lo, hi, n)
    v = np.concatenate([f(x[i:i + chunk]) for i in range(0, n, chunk)])
    inner = np.where((v[1:-1] <= v[:-2]) & (v[1:-1] < v[2:]))[0] + 1
    idx = list(inner)
    if v[0] < v[1]:
        idx.insert(0, 0)
    if v[-1] < v[-2]:
        idx.append(n - 1)
    return [(float(x[i]), float(v[i])) for i in idx]

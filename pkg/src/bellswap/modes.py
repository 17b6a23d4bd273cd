"""Squeezed-vacuum mode functions and exact samplers for homodyne outcomes.

The initial optical modes are Gaussians g(x) with standard deviation sigma
(sigma = 1 is vacuum; the protocol regime is sigma > 1, i.e. momentum
squeezing). The two homodyne outcomes factorize for Gaussian modes:

* x outcome: zero-mean Gaussian with standard deviation sigma/sqrt(2);
* p outcome: a mixture over the integer grid-difference d = j - k with
  triangular weights (2**n - |d|)/2**(2n) and Gaussian components of mean
  d*delta/sqrt(2) and standard deviation 1/(sigma*sqrt(2)).

Both samplers draw through ``numpy.random.Generator`` (ziggurat normals,
PCG64 by default), so outputs are reproducible given the seed. The mixture
sampler draws the difference d directly, which is exact and O(1) in memory.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log10, pi, sqrt

import numpy as np

from .register import delta, validate_qubit_count


@dataclass(frozen=True)
class SqueezedMode:
    """Gaussian initial mode, parameterized by its position-space sigma."""

    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0.0 and np.isfinite(self.sigma)):
            raise ValueError(f"sigma must be a positive finite number, got {self.sigma!r}")


@dataclass(frozen=True)
class PdDecomposition:
    """Integer/fractional split of a p outcome: sqrt(2)*p_d = (t + delta_p)*delta."""

    t: int
    delta_p: float

    def __post_init__(self):
        if not -0.5 < self.delta_p <= 0.5:
            raise ValueError(f"delta_p must lie in (-0.5, 0.5], got {self.delta_p!r}")


def sigma_from_db(db: float) -> float:
    """Linear sigma from squeezing strength in dB (20*log10 convention)."""
    return 10.0 ** (db / 20.0)


def db_from_sigma(sigma: float) -> float:
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    return 20.0 * log10(sigma)


def u_eval(mode: SqueezedMode, p):
    """Momentum wavefunction sqrt(sigma/sqrt(pi)) * exp(-sigma^2 p^2 / 2)."""
    s = mode.sigma
    return sqrt(s / sqrt(pi)) * np.exp(-0.5 * s * s * np.square(p))


def hhat_gaussian(mode: SqueezedMode, x_d: float, p):
    """Post-beamsplitter kernel (1/sqrt(pi)) e^{-x_d^2/2s^2} e^{-p^2 s^2/2}."""
    s = mode.sigma
    return np.exp(-x_d * x_d / (2.0 * s * s)) * np.exp(-0.5 * s * s * np.square(p)) / sqrt(pi)


def sample_xd(mode: SqueezedMode, rng) -> float:
    """One draw from the x-outcome density (1/(sigma sqrt(pi))) e^{-x^2/sigma^2}."""
    return mode.sigma / sqrt(2.0) * rng.standard_normal()


def pd_mixture_weights(n: int):
    """Difference grid d and its triangular weights (2**n - |d|)/2**(2n)."""
    n = validate_qubit_count(n)
    dim = 2**n
    d = np.arange(-(dim - 1), dim)
    return d, (dim - np.abs(d)) / dim**2


def pd_density(mode: SqueezedMode, n: int, p):
    """Exact p-outcome density: triangular-weighted mixture of |u|^2 components."""
    d, weights = pd_mixture_weights(n)
    mu = d * (delta(n) / sqrt(2.0))
    comps = u_eval(mode, np.subtract.outer(np.asarray(p, dtype=float), mu)) ** 2
    return comps @ weights


def sample_pd(mode: SqueezedMode, n: int, rng, size=None):
    """Exact draws from the p-outcome density.

    Two-stage: the integer difference d is drawn by inverse CDF on the
    triangular weights (one uniform), then a Gaussian of mean d*delta/sqrt(2)
    and standard deviation 1/(sigma*sqrt(2)) is added (one normal draw).
    """
    d, weights = pd_mixture_weights(n)
    cum = np.cumsum(weights)
    step = delta(n) / sqrt(2.0)
    spread = 1.0 / (mode.sigma * sqrt(2.0))
    if size is None:
        idx = min(int(np.searchsorted(cum, rng.random(), side="right")), len(d) - 1)
        return d[idx] * step + spread * rng.standard_normal()
    idx = np.minimum(np.searchsorted(cum, rng.random(size), side="right"), len(d) - 1)
    return d[idx] * step + spread * rng.standard_normal(size)


def decompose_pd(p_d: float, n: int) -> PdDecomposition:
    """Unique split sqrt(2)*p_d = (t + delta_p)*delta with delta_p in (-0.5, 0.5].

    t is the smallest integer whose cell contains the outcome; a tie exactly
    at +0.5 belongs to the lower t (half-open comparison, not
    round-to-nearest-even).
    """
    x = sqrt(2.0) * p_d / delta(n)
    t = ceil(x - 0.5)
    return PdDecomposition(t, x - t)

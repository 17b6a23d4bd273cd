from math import erf, sqrt

import numpy as np
import pytest


def pd_chi_square_pvalue(sigma, n, size, seed):
    """Chi-square p-value of sampled p outcomes against the exact density.

    Expected bin masses come from the direct (j, k) double sum of Gaussian
    component CDFs, independent of the sampler's triangular-weight shortcut.
    """
    from scipy import stats

    from bellswap import modes
    from bellswap.register import delta

    mode = modes.SqueezedMode(sigma)
    draws = modes.sample_pd(mode, n, np.random.default_rng(seed), size=size)
    grid = (np.arange(2**n) - (2**n - 1) / 2) * delta(n)
    mus = ((grid[:, None] - grid[None, :]) / sqrt(2)).ravel()
    spread = 1.0 / (sigma * sqrt(2))
    edges = np.linspace(mus.min() - 6 * spread, mus.max() + 6 * spread, 121)
    counts, _ = np.histogram(draws, bins=edges)
    cdf = 0.5 * (1.0 + np.vectorize(erf)((edges[:, None] - mus[None, :]) / (spread * sqrt(2))))
    probs = np.diff(cdf.mean(axis=1))
    keep = probs * size > 10
    obs = np.append(counts[keep], counts[~keep].sum())
    exp = np.append(probs[keep], probs[~keep].sum() + (1.0 - probs.sum())) * size
    return stats.chisquare(obs, exp).pvalue


class SeqRng:
    """Generator stub replaying queued normal/uniform variates.

    Lets the same explicit variates drive both the operator pipeline
    (protocol.run_trial) and the trial kernels, so their outputs can be
    compared one trial at a time.
    """

    def __init__(self, normals, uniforms):
        self.normals = list(normals)
        self.uniforms = list(uniforms)

    def standard_normal(self):
        return self.normals.pop(0)

    def random(self, size=None):
        if size is not None:
            return np.array([self.uniforms.pop(0) for _ in range(size)])
        return self.uniforms.pop(0)


@pytest.fixture
def seq_rng():
    return SeqRng


def random_state(n, rng):
    """Normalized random JointState on n qubits per side."""
    from bellswap.register import JointState

    dim = 2**n
    amps = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return JointState(n, amps / np.linalg.norm(amps))


@pytest.fixture
def make_random_state():
    return random_state

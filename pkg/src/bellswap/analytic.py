"""Closed-form success probabilities, measurement-count selection, and
squeezing-requirement solvers for the swapping protocol.

The truncation cutoff ``c`` controls how aggressively the Gaussian momentum
tail is neglected in the closed forms. Defaults: ``DESIGN_CUTOFF = 2.2``
(keeps fidelity errors under ~1%) for choosing the number of purification
qubits, ``MC_FIT_CUTOFF = 2.17`` when comparing against Monte Carlo runs at
a 0.99 fidelity threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, erf, log2, log10, pi, sqrt

DESIGN_CUTOFF = 2.2
MC_FIT_CUTOFF = 2.17


class NoSolutionError(ValueError):
    """Raised when a requested target is unreachable within the search bracket."""


def _validate_positive(name, value):
    if not value > 0.0:
        raise ValueError(f"{name} must be positive, got {value!r}")


def prob_nb_pairs(n: int, sigma: float) -> float:
    """Success probability (1/2 + 1/2**n) * erf((sigma/2) sqrt(pi/2**n)).

    Probability that a register-size-n protocol produces its n-1-s_c Bell
    pairs, in the regime where truncation errors are negligible. Monotone
    increasing in sigma with limit 1/2 + 1/2**n.
    """
    if n < 2:
        raise ValueError(f"register size must be at least 2, got {n}")
    if sigma < 0.0:
        raise ValueError(f"sigma must be nonnegative, got {sigma!r}")
    return (0.5 + 0.5**n) * erf(0.5 * sigma * sqrt(pi / 2**n))


def prob_extra_pair(n: int, sigma: float) -> float:
    """Probability (1/2**n) * erf((sigma/2) sqrt(pi/2**n)) of one extra pair.

    The homodyne outcome lands in the central cell (t = 0) and the final
    state carries n - s_c pairs instead of n - 1 - s_c.
    """
    if n < 2:
        raise ValueError(f"register size must be at least 2, got {n}")
    if sigma < 0.0:
        raise ValueError(f"sigma must be nonnegative, got {sigma!r}")
    return 0.5**n * erf(0.5 * sigma * sqrt(pi / 2**n))


def success_prob(sigma: float, s_c: int, n_b: int) -> float:
    """Success probability for producing n_b pairs with s_c purification qubits.

    Equals (1/2 + 1/(2**n_b 2**(s_c+1))) * erf(sigma/sqrt(2**(s_c+1)) *
    sqrt(pi/2**(n_b+2))), which is prob_nb_pairs at register size
    n = n_b + 1 + s_c; evaluated through that substitution so the identity
    holds exactly. Strictly decreasing in s_c at fixed (sigma, n_b).
    """
    if s_c < 0:
        raise ValueError(f"s_c must be nonnegative, got {s_c}")
    if n_b < 1:
        raise ValueError(f"n_b must be at least 1, got {n_b}")
    return prob_nb_pairs(n_b + 1 + s_c, sigma)


def truncation_margin(sigma: float, s_c: int, n_b: int) -> float:
    """(2**s_c - 1/2) sqrt(pi/2**n) sigma with n = n_b + 1 + s_c.

    The protocol is in its high-fidelity regime when this exceeds the
    cutoff c.
    """
    n = n_b + 1 + s_c
    return (2**s_c - 0.5) * sqrt(pi / 2**n) * sigma


def required_sc_real(sigma: float, n_b: int, c: float) -> float:
    """Continuous lower bound on s_c ensuring truncation error below cutoff c.

    Any integer s_c >= this value satisfies truncation_margin > c.
    """
    _validate_positive("sigma", sigma)
    _validate_positive("c", c)
    if n_b < 1:
        raise ValueError(f"n_b must be at least 1, got {n_b}")
    q = (c / sigma) * sqrt(2**n_b / pi) + sqrt(2**n_b * c * c / (pi * sigma * sigma) + 1.0)
    return 2.0 * log2(q) - 1.0

def min_sc(sigma: float, n_b: int, c: float) -> int:
    """Minimum integer s_c satisfying the truncation requirement, clamped at 0.

    The closed form can go negative at large sigma, which simply means no
    extra qubits need measuring.
    """
    return max(0, ceil(required_sc_real(sigma, n_b, c) + 1.0) - 1)


def max_success_prob(sigma: float, n_b: int, c: float) -> float:
    """Best achievable success probability at (sigma, n_b): uses min_sc."""
    return success_prob(sigma, min_sc(sigma, n_b, c), n_b)


def prob_bounds(sigma: float, n_b: int, c: float):
    """Closed-form (lower, upper) bounds bracketing max_success_prob.

    The upper bound evaluates the success probability at the continuous
    s_c bound; the lower bound at that bound plus one.
    """
    _validate_positive("sigma", sigma)
    _validate_positive("c", c)
    if n_b < 1:
        raise ValueError(f"n_b must be at least 1, got {n_b}")
    root = c * sqrt(2**n_b) + sqrt(2**n_b * c * c + pi * sigma * sigma)
    upper = (0.5 + (1.0 / 2**n_b) * pi * sigma * sigma / root**2) * erf(
        pi * sigma * sigma / (2.0 * sqrt(2**n_b) * root)
    )
    lower = (0.5 + (1.0 / 2 ** (n_b + 1)) * pi * sigma * sigma / root**2) * erf(
        pi * sigma * sigma / (2.0 * sqrt(2 ** (n_b + 1)) * root)
    )
    return lower, upper


def min_squeezing_db(
    p_target: float,
    n_b: int,
    c: float,
    tol_db: float = 1e-6,
    bracket=(0.0, 60.0),
) -> float:
    """Smallest squeezing (dB) at which max_success_prob reaches p_target.

    Bisection on the monotone-nondecreasing map sigma_db -> max_success_prob
    over ``bracket``. max_success_prob is piecewise in sigma (the integer
    s_c steps down as sigma grows), so this solves the threshold problem
    "first sigma_db with value >= p_target"; at a step discontinuity the
    returned point is the jump location.
    """
    if not 0.0 < p_target < 1.0:
        raise ValueError(f"p_target must lie in (0, 1), got {p_target!r}")
    lo, hi = bracket

    def value(db):
        return max_success_prob(10.0 ** (db / 20.0), n_b, c)

    if value(lo) >= p_target:
        raise NoSolutionError(
            f"p_target={p_target} is already met at {lo} dB; no crossing inside the bracket"
        )
    if value(hi) < p_target:
        raise NoSolutionError(
            f"p_target={p_target} is unreachable below {hi} dB (max {value(hi):.6f})"
        )
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if value(mid) >= p_target:
            hi = mid
        else:
            lo = mid
    return hi


def saturation_threshold_db(n: int, c: float) -> float:
    """Squeezing (dB) above which prob_nb_pairs is saturated for register size n.

    10*log10(2)*n + 20*log10(2c/sqrt(pi)): about 3.01 dB per qubit plus a
    cutoff-dependent constant.
    """
    if n < 2:
        raise ValueError(f"register size must be at least 2, got {n}")
    _validate_positive("c", c)
    return 10.0 * log10(2.0) * n + 20.0 * log10(2.0 * c / sqrt(pi))


@dataclass(frozen=True)
class AnalyticPrediction:
    """Bundle of the closed-form quantities at one operating point."""

    sigma: float
    n_b: int
    c: float
    s_c: int
    p_success: float
    p_lower: float
    p_upper: float

    def __post_init__(self):
        if not self.p_lower < self.p_success <= self.p_upper + 1e-15:
            raise ValueError(
                f"bounds must bracket the prediction: {self.p_lower!r} < "
                f"{self.p_success!r} <= {self.p_upper!r}"
            )


def predict(sigma: float, n_b: int, c: float = DESIGN_CUTOFF) -> AnalyticPrediction:
    s_c = min_sc(sigma, n_b, c)
    lower, upper = prob_bounds(sigma, n_b, c)
    return AnalyticPrediction(
        sigma=sigma,
        n_b=n_b,
        c=c,
        s_c=s_c,
        p_success=success_prob(sigma, s_c, n_b),
        p_lower=lower,
        p_upper=upper,
    )

"""Kernel selection: compiled trial core when built, pure numpy otherwise.

Both implementations expose an identical ``TrialKernel`` bound to one
operating point. ``batch_trials`` fixes the batch variate protocol shared by
every implementation: four pre-drawn arrays (normal, uniform, normal,
uniform), one quadruple per trial, with the measurement uniform drawn for
every trial whether or not it is consumed. Given the same seed the variate
stream is therefore implementation-independent; residual float differences
between the compiled and python kernels are at the 1-ulp level of ``exp``.
"""

from __future__ import annotations

from . import _trial_fallback

try:
    from . import _trial_core

    HAVE_COMPILED = True
except ImportError:  # extension not built; numpy fallback
    _trial_core = None
    HAVE_COMPILED = False

DEFAULT_IMPL = "compiled" if HAVE_COMPILED else "python"
TRIAL_FIELDS = _trial_fallback.TRIAL_FIELDS


def available_impls():
    return ("compiled", "python") if HAVE_COMPILED else ("python",)


def make_kernel(n: int, sigma: float, s_c: int, threshold: float, impl: str | None = None):
    """Trial kernel for one operating point; ``impl`` forces a backend."""
    impl = impl or DEFAULT_IMPL
    if impl == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel requested but bellswap._trial_core is not built")
        return _trial_core.TrialKernel(n, sigma, s_c, threshold)
    if impl == "python":
        return _trial_fallback.TrialKernel(n, sigma, s_c, threshold)
    raise ValueError(f"unknown kernel implementation {impl!r}")


def batch_trials(kernel, count: int, rng):
    """Run ``count`` trials, drawing all variates from ``rng`` up front.

    Returns per-trial arrays (success, abandoned, extra_pair, fidelity).
    """
    z1s = rng.standard_normal(count)
    uds = rng.random(count)
    z2s = rng.standard_normal(count)
    ums = rng.random(count)
    return kernel.run_batch(z1s, uds, z2s, ums)

"""Self-verification checks: invariants plus the oracle/analytic/Monte-Carlo
triangle, runnable from the CLI with a machine-readable pass/fail summary.

``u_scale`` multiplies the momentum wavefunction inside the checks that
integrate or histogram it; anything but 1.0 must trip the suite (used to
prove the checks have teeth).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import erf, sqrt

import numpy as np

from . import analytic, experiments, modes, protocol, register
from .register import Side


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _simpson(values, h):
    w = np.ones(len(values))
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float(np.dot(w, values) * h / 3.0)


def check_u_normalization(u_scale: float = 1.0) -> CheckResult:
    mode = modes.SqueezedMode(2.0)
    grid = np.linspace(-10.0 / mode.sigma, 10.0 / mode.sigma, 2001)
    integral = _simpson((u_scale * modes.u_eval(mode, grid)) ** 2, grid[1] - grid[0])
    return CheckResult("u-normalization", abs(integral - 1.0) < 1e-9,
                       f"integral of |u|^2 = {integral:.12f}")


def check_qft_unitarity(n_max: int = 5) -> CheckResult:
    worst = 0.0
    for n in range(1, n_max + 1):
        f = register.qft_matrix(n)
        worst = max(worst, float(np.max(np.abs(f.conj().T @ f - np.eye(2**n)))))
    return CheckResult("qft-unitarity", worst < 1e-12, f"max |F^H F - I| = {worst:.3e}")


def check_momentum_eigenrelation(n_max: int = 5) -> CheckResult:
    worst = 0.0
    for n in range(1, n_max + 1):
        f = register.qft_matrix(n)
        pbar = f @ np.diag(register.xbar_grid(n)) @ f.conj().T
        for j in range(2**n):
            vec = f[:, j]
            worst = max(worst, float(np.max(np.abs(pbar @ vec - register.xbar(n, j) * vec))))
    return CheckResult("momentum-eigenrelation", worst < 1e-10, f"max residual = {worst:.3e}")


def check_decompose_roundtrip(samples: int = 10_000, seed: int = 7) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in (1, 3, 6):
        step = register.delta(n) / sqrt(2.0)
        for p_d in rng.uniform(-3.0, 3.0, samples // 3):
            dec = modes.decompose_pd(p_d, n)
            worst = max(worst, abs((dec.t + dec.delta_p) * step - p_d))
    return CheckResult("pd-decomposition-roundtrip", worst < 1e-12, f"max residual = {worst:.3e}")


def check_displacement_group_law(seed: int = 11) -> CheckResult:
    rng = np.random.default_rng(seed)
    n = 3
    amps = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    state = register.JointState(n, amps / np.linalg.norm(amps))
    ok = True
    for t1, t2 in ((1, 2), (-3, 5), (7, 9), (-4, -5)):
        lhs = register.displace(register.displace(state, Side.ALICE, t1), Side.ALICE, t2)
        rhs = register.displace(state, Side.ALICE, (t1 + t2) % 8)
        ok = ok and np.array_equal(lhs.amplitudes, rhs.amplitudes)
    return CheckResult("displacement-group-law", ok, "index permutations compose exactly")


def check_xd_independence() -> CheckResult:
    worst = 0.0
    for x_d in (0.7, -2.1):
        base = protocol.apply_phase_correction(protocol.post_homodyne_state(2, 4.0, 0.0, 0.3), 0.0)
        other = protocol.apply_phase_correction(protocol.post_homodyne_state(2, 4.0, x_d, 0.3), x_d)
        worst = max(worst, float(np.max(np.abs(base.amplitudes - other.amplitudes))))
    return CheckResult("xd-independence", worst < 1e-10, f"max amplitude difference = {worst:.3e}")


def check_analytic_identity() -> CheckResult:
    ok = True
    for sigma in (1.0, 3.16, 5.62):
        for s_c in (0, 1, 2):
            for n_b in (1, 2, 3):
                ok = ok and analytic.success_prob(sigma, s_c, n_b) == analytic.prob_nb_pairs(
                    n_b + 1 + s_c, sigma
                )
    return CheckResult("analytic-substitution-identity", ok,
                       "success_prob(sigma, s_c, n_b) == prob_nb_pairs(n_b+1+s_c, sigma)")


def check_bounds_ordering(seed: int = 3) -> CheckResult:
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(200):
        sigma = modes.sigma_from_db(rng.uniform(0.0, 30.0))
        n_b = int(rng.integers(1, 7))
        lower, upper = analytic.prob_bounds(sigma, n_b, 2.2)
        best = analytic.max_success_prob(sigma, n_b, 2.2)
        ok = ok and lower < upper and lower < best <= upper + 1e-12
    return CheckResult("bounds-bracket-maximum", ok, "p_lower < max_success_prob <= p_upper")


def check_sampler_density(u_scale: float = 1.0, draws: int = 200_000, seed: int = 5) -> CheckResult:
    # Coarse histogram comparison against the mixture density; the chi-square
    # version lives in the test suite.
    mode = modes.SqueezedMode(3.16)
    n = 2
    rng = np.random.default_rng(seed)
    samples = modes.sample_pd(mode, n, rng, size=draws)
    edges = np.linspace(-4.0, 4.0, 81)
    hist, _ = np.histogram(samples, bins=edges)
    centers = 0.5 * (edges[:-1] + edges[1:])
    expected = u_scale**2 * modes.pd_density(mode, n, centers) * (edges[1] - edges[0]) * draws
    mask = expected > 50
    dev = np.max(np.abs(hist[mask] - expected[mask]) / np.sqrt(expected[mask]))
    return CheckResult("pd-sampler-density", bool(dev < 6.0),
                       f"max bin deviation = {dev:.2f} sd")


def check_oracle_triangle(n: int, s_c: int, sigma_db: float, trials: int,
                          seed: int = 2024) -> CheckResult:
    sigma = modes.sigma_from_db(sigma_db)
    cfg = protocol.ProtocolConfig(n, sigma, s_c, 0.99)
    brute = experiments.brute_force_success_prob(n, sigma, s_c, 0.99, quad_points=129)
    row = experiments.monte_carlo_point(cfg, trials, seed)
    gap = abs(row.p_success - brute)
    tol = 3.0 * max(row.stderr, sqrt(brute * (1.0 - brute) / trials))
    name = f"oracle-triangle(n={n},s_c={s_c},{sigma_db:g}dB)"
    return CheckResult(name, gap <= tol,
                       f"MC {row.p_success:.4f} vs quadrature {brute:.4f} (tol {tol:.4f})")


def check_determinism() -> CheckResult:
    spec = experiments.SweepSpec(
        variable="sigma_db", grid=(12.0, 15.0), trials_per_point=2000, seed=99,
        n=2, s_c=0, fidelity_threshold=0.99,
    )
    first = experiments.sweep(spec)
    second = experiments.sweep(spec)
    return CheckResult("sweep-determinism", first == second, "identical seeds give identical rows")


def run_checks(quick: bool = False, u_scale: float = 1.0) -> list:
    checks = [
        check_u_normalization(u_scale),
        check_qft_unitarity(4 if quick else 5),
        check_momentum_eigenrelation(4 if quick else 5),
        check_decompose_roundtrip(3000 if quick else 10_000),
        check_displacement_group_law(),
        check_xd_independence(),
        check_analytic_identity(),
        check_bounds_ordering(),
        check_sampler_density(u_scale, draws=50_000 if quick else 200_000),
        check_determinism(),
        check_oracle_triangle(2, 0, 15.0, trials=10_000 if quick else 100_000),
    ]
    if not quick:
        checks.append(check_oracle_triangle(3, 0, 18.0, trials=100_000))
        checks.append(check_oracle_triangle(3, 1, 15.0, trials=100_000))
    return checks

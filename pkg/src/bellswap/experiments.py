"""Monte Carlo harness, brute-force quadrature oracle, and sweep emission.

Seed splitting rule: the seed for point ``i`` of a sweep is
``SeedSequence([master_seed, i]).generate_state(1)[0]`` and each point's
trials are split into fixed chunks of :data:`CHUNK` whose generators come
from ``SeedSequence(point_seed).spawn(...)``. Chunk boundaries and the
order partial results are combined in are fixed, so results are
bit-identical for a given seed regardless of thread count.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from math import sqrt

import numpy as np

from . import analytic, kernels, protocol, register
from .modes import db_from_sigma, pd_density, sigma_from_db, SqueezedMode
from .protocol import ProtocolConfig

CHUNK = 8192

CSV_COLUMNS = (
    "swept_var", "value", "p_success", "stderr", "p_analytic", "p_lower",
    "p_upper", "mean_fidelity", "extra_pair_rate", "abandon_rate", "trials",
    "seed",
)


@dataclass(frozen=True)
class SweepSpec:
    """One-variable sweep description.

    ``variable`` is one of ``sigma_db``, ``fidelity_threshold``, ``n_b``;
    the remaining operating-point fields are fixed. For an ``n_b`` sweep the
    register size is n_b + 1 + s_c per point. ``cutoff`` feeds the analytic
    bounds attached to each row.
    """

    variable: str
    grid: tuple
    trials_per_point: int
    seed: int
    n: int | None = None
    sigma_db: float | None = None
    s_c: int = 0
    fidelity_threshold: float | None = None
    cutoff: float = analytic.MC_FIT_CUTOFF

    def __post_init__(self):
        if self.variable not in ("sigma_db", "fidelity_threshold", "n_b"):
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        if len(self.grid) == 0:
            raise ValueError("sweep grid must be nonempty")
        diffs = np.diff(np.asarray(self.grid, dtype=float))
        if len(diffs) and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("sweep grid must be strictly monotone")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be at least 1")

    def config_at(self, value) -> ProtocolConfig:
        if self.variable == "sigma_db":
            return ProtocolConfig(self.n, sigma_from_db(value), self.s_c, self.fidelity_threshold)
        if self.variable == "fidelity_threshold":
            return ProtocolConfig(self.n, sigma_from_db(self.sigma_db), self.s_c, value)
        return ProtocolConfig(int(value) + 1 + self.s_c, sigma_from_db(self.sigma_db),
                              self.s_c, self.fidelity_threshold)


@dataclass(frozen=True)
class SweepRow:
    """Aggregated statistics of one sweep point plus its analytic prediction."""

    swept_var: str
    value: float
    p_success: float
    stderr: float
    p_analytic: float
    p_lower: float
    p_upper: float
    mean_fidelity: float
    extra_pair_rate: float
    abandon_rate: float
    trials: int
    seed: int


def derive_seed(master_seed: int, *indices) -> int:
    """Documented stable hash for sub-stream seeds."""
    return int(np.random.SeedSequence([int(master_seed), *map(int, indices)]).generate_state(1)[0])


def monte_carlo_point(
    config: ProtocolConfig,
    trials: int,
    seed: int,
    cutoff: float = analytic.MC_FIT_CUTOFF,
    impl: str | None = None,
    threads: int = 1,
    swept_var: str = "sigma_db",
    value: float | None = None,
) -> SweepRow:
    """Estimate the operating point by independent protocol trials.

    A trial counts as a success when the purification outcome passes the
    classification rule and the measured fidelity clears the configured
    threshold. ``mean_fidelity`` averages over successes only (0.0 when there
    are none); abandoned and degenerate trials land in ``abandon_rate``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    sizes = [CHUNK] * (trials // CHUNK)
    if trials % CHUNK:
        sizes.append(trials % CHUNK)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))

    def run_chunk(args):
        size, stream = args
        kern = kernels.make_kernel(config.n, config.sigma, config.s_c,
                                   config.fidelity_threshold, impl=impl)
        rng = np.random.Generator(np.random.PCG64(stream))
        success, abandoned, extra, fidelity = kernels.batch_trials(kern, size, rng)
        return (int(success.sum()), int(abandoned.sum()), int(extra.sum()),
                float(fidelity[success].sum()))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run_chunk, zip(sizes, streams)))
    else:
        parts = [run_chunk(args) for args in zip(sizes, streams)]

    n_success = sum(p[0] for p in parts)
    n_abandon = sum(p[1] for p in parts)
    n_extra = sum(p[2] for p in parts)
    fid_sum = sum(p[3] for p in parts)

    p = n_success / trials
    sigma_db = db_from_sigma(config.sigma)
    lower, upper = analytic.prob_bounds(config.sigma, config.n_b, cutoff)
    return SweepRow(
        swept_var=swept_var,
        value=sigma_db if value is None else value,
        p_success=p,
        stderr=sqrt(p * (1.0 - p) / trials),
        p_analytic=analytic.success_prob(config.sigma, config.s_c, config.n_b),
        p_lower=lower,
        p_upper=upper,
        mean_fidelity=fid_sum / n_success if n_success else 0.0,
        extra_pair_rate=n_extra / trials,
        abandon_rate=n_abandon / trials,
        trials=trials,
        seed=int(seed),
    )


def sweep(spec: SweepSpec, impl: str | None = None, threads: int = 1) -> list:
    """One SweepRow per grid point; deterministic given ``spec.seed``."""
    rows = []
    for i, value in enumerate(spec.grid):
        rows.append(
            monte_carlo_point(
                spec.config_at(value),
                spec.trials_per_point,
                derive_seed(spec.seed, i),
                cutoff=spec.cutoff,
                impl=impl,
                threads=threads,
                swept_var=spec.variable,
                value=value,
            )
        )
    return rows


def _simpson_weights(m: int, h: float) -> np.ndarray:
    w = np.ones(m)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def brute_force_success_prob(
    n: int,
    sigma: float,
    s_c: int,
    threshold: float,
    quad_points: int = 129,
) -> float:
    """Deterministic success probability by quadrature; no sampling, no truncation.

    For each homodyne cell t in [-2**(n-1), 2**(n-1)] the p outcome is
    integrated by composite Simpson (``quad_points`` nodes per cell, rounded
    up to odd), enumerating every matching purification outcome of the exact
    corrected state and counting those that pass the classification rule
    with fidelity at or above ``threshold``. The x outcome needs no
    integration: the corrected state is independent of it for Gaussian
    modes. Intended as the sampling-free oracle; n <= 4 keeps enumeration
    cheap.
    """
    if quad_points < 3:
        raise ValueError(f"quad_points must be at least 3, got {quad_points}")
    if quad_points % 2 == 0:
        quad_points += 1
    if n > 4:
        raise ValueError("brute force oracle is limited to n <= 4")
    cfg = ProtocolConfig(n, sigma, s_c, threshold)  # validates the point
    mode = SqueezedMode(sigma)
    step = register.delta(n) / sqrt(2.0)
    half = 2 ** (n - 1)
    tail = list(range(n - s_c, n))
    patterns = [
        (b, [(s >> (s_c - 1 - i)) & 1 for i in range(s_c)])
        for b in (0, 1)
        for s in range(2**s_c)
    ]

    total = 0.0
    for t in range(-half, half + 1):
        a, b = (t - 0.5) * step, (t + 0.5) * step
        nodes = np.linspace(a, b, quad_points)
        weights = _simpson_weights(quad_points, nodes[1] - nodes[0])
        dens = pd_density(mode, n, nodes)
        for p_d, wq, rho in zip(nodes, weights, dens):
            try:
                state = protocol.post_homodyne_state(n, sigma, 0.0, float(p_d))
            except protocol.DegenerateOutcomeError:
                continue  # the density there underflows as well
            state = protocol.apply_displacement_correction(state, t)
            win = 0.0
            for first_bit, s_bits in patterns:
                bits = (first_bit, *s_bits)
                outcome = register.MeasurementOutcome(tuple([0] + tail), bits, bits)
                if not protocol.classify_success(t, outcome, n):
                    continue
                prob, post = register.project_bits(state, [0] + tail, [0] + tail, bits, bits)
                if prob == 0.0:
                    continue
                if register.fidelity_to_bell(post, cfg.n_b) >= threshold:
                    win += prob
            total += wq * rho * win
    return float(total)


def fig2_curve(p_target: float, n_b_values, c: float = analytic.DESIGN_CUTOFF):
    """Minimum squeezing (dB) per Bell-pair count, with a least-squares line fit.

    Returns ``(points, slope, intercept)`` where points is a list of
    ``(n_b, sigma_db_min)``.
    """
    n_b_values = list(n_b_values)
    points = [(n_b, analytic.min_squeezing_db(p_target, n_b, c)) for n_b in n_b_values]
    slope, intercept = np.polyfit([p[0] for p in points], [p[1] for p in points], 1)
    return points, float(slope), float(intercept)


def _format_value(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def emit(rows, format: str, destination, metadata: dict | None = None) -> None:
    """Write sweep rows as CSV or JSON.

    CSV: optional ``# key=value`` metadata comment lines, a fixed header
    (:data:`CSV_COLUMNS`), floats at 17 significant digits. JSON: an object
    ``{"meta": {...}, "rows": [...]}`` with native float values.
    """
    fmt = format.lower()
    if fmt == "csv":
        with open(destination, "w", newline="") as fh:
            for key, val in (metadata or {}).items():
                fh.write(f"# {key}={val}\n")
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in rows:
                d = asdict(row)
                writer.writerow([_format_value(d[col]) for col in CSV_COLUMNS])
    elif fmt == "json":
        with open(destination, "w") as fh:
            json.dump({"meta": metadata or {}, "rows": [asdict(r) for r in rows]}, fh, indent=1)
            fh.write("\n")
    else:
        raise ValueError(f"unknown emission format {format!r}")


def load_rows(path, format: str) -> list:
    """Parse an emitted file back into SweepRow objects (inverse of emit)."""
    fmt = format.lower()
    rows = []
    if fmt == "csv":
        with open(path, newline="") as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
        for rec in csv.DictReader(lines):
            rows.append(_row_from_dict(rec))
    elif fmt == "json":
        with open(path) as fh:
            payload = json.load(fh)
        for rec in payload["rows"]:
            rows.append(_row_from_dict(rec))
    else:
        raise ValueError(f"unknown emission format {format!r}")
    return rows


def _row_from_dict(rec) -> SweepRow:
    return SweepRow(
        swept_var=str(rec["swept_var"]),
        value=float(rec["value"]),
        p_success=float(rec["p_success"]),
        stderr=float(rec["stderr"]),
        p_analytic=float(rec["p_analytic"]),
        p_lower=float(rec["p_lower"]),
        p_upper=float(rec["p_upper"]),
        mean_fidelity=float(rec["mean_fidelity"]),
        extra_pair_rate=float(rec["extra_pair_rate"]),
        abandon_rate=float(rec["abandon_rate"]),
        trials=int(rec["trials"]),
        seed=int(rec["seed"]),
    )

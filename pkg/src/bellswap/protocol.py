"""Seven-step hybrid swapping protocol engine.

The continuous modes are never represented as vectors: mode preparation,
the entangling gates, and the beam splitter are folded analytically into the
closed-form post-homodyne amplitude table, which is built exactly (no tail
truncation). The classical exchange between Alice, Bob, and Charlie is an
in-process recorded transcript, serializable one message per line.

``run_trial`` is a pure function of (config, generator state); trials are
embarrassingly parallel as long as each owns its generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from . import modes, register
from .register import JointState, MeasurementOutcome, Side


class DegenerateOutcomeError(RuntimeError):
    """All amplitudes underflowed for a homodyne outcome; trial is abandoned."""


@dataclass(frozen=True)
class ProtocolConfig:
    """Operating point: register size, squeezing, purification count, threshold."""

    n: int
    sigma: float
    s_c: int
    fidelity_threshold: float

    def __post_init__(self):
        register.validate_qubit_count(self.n)
        if not (self.sigma > 0.0 and np.isfinite(self.sigma)):
            raise ValueError(f"sigma must be a positive finite number, got {self.sigma!r}")
        if self.s_c < 0:
            raise ValueError(f"s_c must be nonnegative, got {self.s_c}")
        if self.n - 1 - self.s_c < 1:
            raise ValueError(
                f"need at least one Bell pair: n - 1 - s_c = {self.n - 1 - self.s_c}"
            )
        if not 0.0 <= self.fidelity_threshold <= 1.0:
            raise ValueError(f"fidelity threshold must lie in [0, 1], got {self.fidelity_threshold!r}")

    @property
    def n_b(self) -> int:
        return self.n - 1 - self.s_c


@dataclass(frozen=True)
class ClassicalMessage:
    """One classical-channel message: a mode dispatch or a homodyne report."""

    sender: str
    receiver: str
    kind: str  # "dispatch" | "homodyne"
    x_d: float | None = None
    p_d: float | None = None


def format_transcript(messages) -> list:
    """One tab-separated line per message, floats at 17 significant digits."""
    lines = []
    for m in messages:
        if m.kind == "homodyne":
            lines.append(f"{m.sender}\t{m.receiver}\thomodyne\t{m.x_d:.17g}\t{m.p_d:.17g}")
        else:
            lines.append(f"{m.sender}\t{m.receiver}\t{m.kind}")
    return lines


def parse_transcript(lines) -> list:
    out = []
    for line in lines:
        parts = line.rstrip("\n").split("\t")
        if len(parts) == 5 and parts[2] == "homodyne":
            out.append(ClassicalMessage(parts[0], parts[1], "homodyne", float(parts[3]), float(parts[4])))
        elif len(parts) == 3:
            out.append(ClassicalMessage(parts[0], parts[1], parts[2]))
        else:
            raise ValueError(f"malformed transcript line: {line!r}")
    return out


@dataclass
class TrialResult:
    """Full record of one protocol run."""

    x_d: float
    p_d: float
    t: int
    delta_p: float
    outcome: MeasurementOutcome | None
    abandoned: bool
    success: bool
    fidelity: float
    bell_pairs: int
    transcript: list = field(default_factory=list)
    boundary_t: bool = False  # |t| exactly at 2**(n-1); kept for audit
    fidelity_extra: float = 0.0  # overlap with the one-larger Bell target at t = 0


def post_homodyne_state(n: int, sigma: float, x_d: float, p_d: float, hhat=None) -> JointState:
    """Exact normalized joint state after Charlie's homodyne measurement.

    amplitude(j, k) is proportional to
    exp(-i x_d (xbar_j + xbar_k)/sqrt(2)) * hhat(p_d - (xbar_j - xbar_k)/sqrt(2)).
    Mode preparation, the entangling gates, and the beam splitter are folded
    into this closed form. ``hhat`` may be supplied to plug in a non-Gaussian
    mode kernel (signature hhat(x_d, p) -> array); the default is the
    squeezed-vacuum Gaussian, evaluated without its constant prefactor since
    normalization removes it.
    """
    register.validate_qubit_count(n)
    grid = register.xbar_grid(n)
    dim = grid.size
    diffs = np.arange(-(dim - 1), dim) * (register.delta(n) / sqrt(2.0))
    if hhat is None:
        mag_1d = np.exp(-0.5 * sigma * sigma * np.square(p_d - diffs))
    else:
        mag_1d = np.asarray(hhat(x_d, p_d - diffs), dtype=float)
    mag = mag_1d[np.subtract.outer(np.arange(dim), np.arange(dim)) + dim - 1]
    phases = np.exp(-1j * x_d / sqrt(2.0) * grid)
    amps = np.outer(phases, phases) * mag
    nrm = np.linalg.norm(amps)
    if not np.isfinite(nrm) or nrm == 0.0:
        raise DegenerateOutcomeError(
            f"all amplitudes vanished for outcome (x_d={x_d!r}, p_d={p_d!r})"
        )
    return JointState(n, amps / nrm)


def apply_phase_correction(state: JointState, x_d: float) -> JointState:
    """Both parties rotate by exp(i (x_d/sqrt(2)) xbar); cancels the x_d phases."""
    theta = x_d / sqrt(2.0)
    state = register.apply_xbar_phase(state, Side.ALICE, theta)
    return register.apply_xbar_phase(state, Side.BOB, theta)


def apply_displacement_correction(state: JointState, t: int) -> JointState:
    """Alice shifts her register down by the homodyne integer t."""
    return register.displace(state, Side.ALICE, -t)


def ts_reduce(t: int, bits) -> int:
    """Halve-and-round t once per purification bit, innermost (last) bit first.

    A bit value 0 rounds down, 1 rounds up; exact integer arithmetic.
    """
    val = int(t)
    for b in reversed(list(bits)):
        if b == 0:
            val = val // 2
        elif b == 1:
            val = -((-val) // 2)
        else:
            raise ValueError(f"bits must be 0 or 1, got {b!r}")
    return val


def abandon_check(t: int, n: int) -> bool:
    """True when t falls outside the closed interval [-2**(n-1), 2**(n-1)]."""
    return abs(t) > 2 ** (n - 1)


def purify(state: JointState, s_c: int, rng):
    """Measure qubit 0 and the last s_c qubits on both sides.

    Returns the joint outcome and the post-measurement state on the middle
    n - 1 - s_c qubits per side.
    """
    n = state.n
    if not 0 <= s_c <= n - 2:
        raise ValueError(f"s_c must satisfy 0 <= s_c <= n - 2, got {s_c}")
    indices = [0] + list(range(n - s_c, n))
    return register.measure_qubits(state, indices, indices, rng)


def classify_success(t: int, outcome: MeasurementOutcome, n: int) -> bool:
    """Success rule: outcomes match, and the first bit pairs with the sign of t.

    First bit 0 requires t in [0, 2**(n-1)]; first bit 1 requires t in
    [-2**(n-1), 0]; at t = 0 either matching value succeeds.
    """
    if outcome.bits_alice != outcome.bits_bob:
        return False
    first = outcome.bits_alice[0]
    half = 2 ** (n - 1)
    if first == 0:
        return 0 <= t <= half
    return -half <= t <= 0


def run_trial(config: ProtocolConfig, rng) -> TrialResult:
    """Execute one full protocol round and record everything.

    Alice and Bob dispatch their modes; Charlie measures both quadratures and
    broadcasts the outcomes; Alice and Bob apply the phase and displacement
    corrections and run the purification measurement. Fidelity is evaluated
    against the n_b-pair Bell target, and additionally against the
    (n_b + 1)-pair target when t = 0, reporting the larger pair count that
    clears the threshold. Abandoned trials (t out of range, or a degenerate
    homodyne outcome) carry success=False, fidelity=0, bell_pairs=0.
    """
    n, s_c = config.n, config.s_c
    mode = modes.SqueezedMode(config.sigma)

    transcript = [
        ClassicalMessage("alice", "charlie", "dispatch"),
        ClassicalMessage("bob", "charlie", "dispatch"),
    ]
    x_d = modes.sample_xd(mode, rng)
    p_d = modes.sample_pd(mode, n, rng)
    transcript.append(ClassicalMessage("charlie", "alice", "homodyne", x_d, p_d))
    transcript.append(ClassicalMessage("charlie", "bob", "homodyne", x_d, p_d))

    dec = modes.decompose_pd(p_d, n)
    t, delta_p = dec.t, dec.delta_p
    boundary = abs(t) == 2 ** (n - 1)

    def abandoned_result():
        return TrialResult(
            x_d=x_d, p_d=p_d, t=t, delta_p=delta_p, outcome=None, abandoned=True,
            success=False, fidelity=0.0, bell_pairs=0, transcript=transcript,
            boundary_t=boundary,
        )

    if abandon_check(t, n):
        return abandoned_result()

    try:
        state = post_homodyne_state(n, config.sigma, x_d, p_d)
    except DegenerateOutcomeError:
        return abandoned_result()
    state = apply_phase_correction(state, x_d)
    state = apply_displacement_correction(state, t)

    outcome, post = purify(state, s_c, rng)
    fidelity = register.fidelity_to_bell(post, config.n_b)

    fidelity_extra = 0.0
    if t == 0 and outcome.bits_alice[1:] == outcome.bits_bob[1:]:
        # Condition the pre-measurement state on the sampled fine bits only,
        # leaving qubit 0 in place: overlap with the one-larger Bell target.
        tail = list(range(n - s_c, n))
        _, kept = register.project_bits(
            state, tail, tail, outcome.bits_alice[1:], outcome.bits_bob[1:]
        )
        fidelity_extra = register.fidelity_to_bell(kept, n - s_c)

    success = classify_success(t, outcome, n) and fidelity >= config.fidelity_threshold
    if success and t == 0 and fidelity_extra >= config.fidelity_threshold:
        pairs = n - s_c
    elif success:
        pairs = config.n_b
    else:
        pairs = 0

    return TrialResult(
        x_d=x_d, p_d=p_d, t=t, delta_p=delta_p, outcome=outcome, abandoned=False,
        success=success, fidelity=fidelity, bell_pairs=pairs, transcript=transcript,
        boundary_t=boundary, fidelity_extra=fidelity_extra,
    )

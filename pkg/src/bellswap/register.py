"""Discrete-register algebra for qubit registers treated as discretized modes.

An ``n``-qubit register models a bosonic mode on a grid of ``2**n``
quadrature eigenvalues, symmetric about zero with spacing
``sqrt(2*pi/2**n)``. Bit convention throughout the package: qubit 0 is the
*most significant* bit of a basis index ``j``, so the first qubit carries
the sign of the quadrature grid and the last qubits its fine structure.

A :class:`JointState` holds the full complex amplitude table of a bipartite
(Alice x Bob) register pair. All operations are pure functions: they return
new states and never mutate their inputs, so independent protocol trials can
run concurrently as long as each owns its random generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import sqrt, pi

import numpy as np

#: Default register cap: the joint state holds 2**(2n) complex doubles,
#: which is ~256 MB at n=12.
DEFAULT_QUBIT_CAP = 12


class Side(Enum):
    """Which half of a bipartite state an operation acts on."""

    ALICE = "alice"
    BOB = "bob"


def validate_qubit_count(n, cap: int = DEFAULT_QUBIT_CAP) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValueError(f"qubit count must be an integer, got {n!r}")
    if not 1 <= n <= cap:
        raise ValueError(f"qubit count must satisfy 1 <= n <= {cap}, got {n}")
    return int(n)


def delta(n: int, cap: int = DEFAULT_QUBIT_CAP) -> float:
    """Grid spacing sqrt(2*pi/2**n) of the discretized quadrature."""
    n = validate_qubit_count(n, cap)
    return sqrt(2.0 * pi / 2**n)


def xbar(n: int, j: int, cap: int = DEFAULT_QUBIT_CAP) -> float:
    """Quadrature eigenvalue (j - (2**n - 1)/2) * delta(n) of basis state j."""
    n = validate_qubit_count(n, cap)
    if isinstance(j, bool) or not isinstance(j, (int, np.integer)):
        raise ValueError(f"basis index must be an integer, got {j!r}")
    if not 0 <= j <= 2**n - 1:
        raise ValueError(f"basis index must satisfy 0 <= j <= {2**n - 1}, got {j}")
    return (j - (2**n - 1) / 2.0) * delta(n, cap)


def xbar_grid(n: int, cap: int = DEFAULT_QUBIT_CAP) -> np.ndarray:
    """All 2**n quadrature eigenvalues as a vector."""
    n = validate_qubit_count(n, cap)
    return (np.arange(2**n) - (2**n - 1) / 2.0) * delta(n, cap)


@dataclass(frozen=True)
class RegisterSpec:
    """Discretization parameters of an n-qubit register.

    ``delta`` is derived from ``n``; passing it explicitly is only allowed
    when it equals ``sqrt(2*pi/2**n)`` to machine precision.
    """

    n: int
    delta: float = 0.0
    cap: int = DEFAULT_QUBIT_CAP

    def __post_init__(self):
        n = validate_qubit_count(self.n, self.cap)
        expected = sqrt(2.0 * pi / 2**n)
        if self.delta and self.delta != expected:
            raise ValueError(f"delta must equal sqrt(2*pi/2**n) = {expected!r}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "delta", expected)

    @property
    def dim(self) -> int:
        return 2**self.n

    def grid(self) -> np.ndarray:
        return xbar_grid(self.n, self.cap)


@dataclass
class JointState:
    """Normalized amplitude table over the Alice x Bob computational basis.

    ``amplitudes[j, k]`` is the amplitude of Alice basis state ``j`` and Bob
    basis state ``k``; both run over ``[0, 2**n - 1]`` with qubit 0 as the
    most significant bit. Treat instances as immutable: operations return
    fresh states.
    """

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        dim = 2**self.n if self.n else 1
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (dim, dim):
            raise ValueError(f"amplitude table must have shape ({dim}, {dim}), got {amps.shape}")
        self.amplitudes = amps

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "JointState":
        return JointState(self.n, self.amplitudes.copy())


@dataclass(frozen=True)
class MeasurementOutcome:
    """Computational-basis outcomes of the same qubit set on both sides."""

    qubit_indices: tuple
    bits_alice: tuple
    bits_bob: tuple

    def __post_init__(self):
        if len(self.bits_alice) != len(self.qubit_indices) or len(self.bits_bob) != len(self.qubit_indices):
            raise ValueError("bit lists must match the measured index list in length")


def bell_state(n_b: int, cap: int = DEFAULT_QUBIT_CAP) -> JointState:
    """Product of n_b Bell pairs: amplitude 2**(-n_b/2) on the (j, j) diagonal."""
    n_b = validate_qubit_count(n_b, cap)
    dim = 2**n_b
    amps = np.zeros((dim, dim), dtype=np.complex128)
    np.fill_diagonal(amps, 1.0 / sqrt(dim))
    return JointState(n_b, amps)


def fidelity_to_bell(state: JointState, n_b: int) -> float:
    """Squared overlap of ``state`` with ``bell_state(n_b)``."""
    if state.n != n_b:
        raise ValueError(f"state has {state.n} qubits per side, expected {n_b}")
    overlap = np.trace(state.amplitudes) / sqrt(2**n_b)
    return float(min(abs(overlap) ** 2, 1.0))


def qft_matrix(n: int, cap: int = DEFAULT_QUBIT_CAP) -> np.ndarray:
    """Dense centered-QFT matrix; reference implementation for verification.

    Entry (k, j) is exp(i*(2*pi/2**n)*(j - c)*(k - c))/2**(n/2) with
    c = (2**n - 1)/2. Conjugates the position grid into the momentum grid.
    """
    n = validate_qubit_count(n, cap)
    dim = 2**n
    c = (dim - 1) / 2.0
    idx = np.arange(dim) - c
    return np.exp(2j * pi / dim * np.outer(idx, idx)) / sqrt(dim)


def _qft_along_axis(amps: np.ndarray, axis: int, inverse: bool) -> np.ndarray:
    # Centered QFT as a phase-twiddle sandwich around a radix-2 FFT:
    # F = e^{i 2pi c^2/N} D ifft_ortho D  with  D = diag(e^{-i 2pi c j / N}).
    dim = amps.shape[axis]
    c = (dim - 1) / 2.0
    tw = np.exp(-2j * pi * c / dim * np.arange(dim))
    phase0 = np.exp(2j * pi * c * c / dim)
    if inverse:
        tw = tw.conj()
        phase0 = phase0.conjugate()
    shape = [1, 1]
    shape[axis] = dim
    tw = tw.reshape(shape)
    if inverse:
        out = np.fft.fft(tw * amps, axis=axis, norm="ortho")
    else:
        out = np.fft.ifft(tw * amps, axis=axis, norm="ortho")
    return phase0 * tw * out


def qft_apply(state: JointState, side: Side, inverse: bool = False) -> JointState:
    """Apply the centered QFT (or its inverse) to one register."""
    axis = 0 if side is Side.ALICE else 1
    return JointState(state.n, _qft_along_axis(state.amplitudes, axis, inverse))


def displace(state: JointState, side: Side, t: int) -> JointState:
    """Cyclic displacement |j> -> |(j + t) mod 2**n> on one register."""
    axis = 0 if side is Side.ALICE else 1
    return JointState(state.n, np.roll(state.amplitudes, int(t), axis=axis))


def apply_xbar_phase(state: JointState, side: Side, theta: float) -> JointState:
    """Multiply amplitudes by exp(i*theta*xbar) along one register."""
    phases = np.exp(1j * theta * xbar_grid(state.n))
    if side is Side.ALICE:
        return JointState(state.n, phases[:, None] * state.amplitudes)
    return JointState(state.n, phases[None, :] * state.amplitudes)


def _validate_indices(n: int, indices) -> list:
    out = []
    for q in indices:
        if isinstance(q, bool) or not isinstance(q, (int, np.integer)):
            raise ValueError(f"qubit index must be an integer, got {q!r}")
        if not 0 <= q < n:
            raise ValueError(f"qubit index {q} out of range for {n} qubits")
        out.append(int(q))
    if len(set(out)) != len(out):
        raise ValueError(f"qubit indices must be distinct, got {indices}")
    return out


def _bit_axes_probs(state: JointState, alice_indices, bob_indices) -> np.ndarray:
    """Joint outcome probabilities, lexicographic in (alice bits, bob bits)."""
    n = state.n
    p2 = np.abs(state.amplitudes.reshape([2] * (2 * n))) ** 2
    keep = list(alice_indices) + [n + q for q in bob_indices]
    rest = [ax for ax in range(2 * n) if ax not in keep]
    marg = np.transpose(p2, keep + rest).reshape(2 ** len(keep), -1).sum(axis=1)
    return marg


def _select_bits(state: JointState, alice_indices, bob_indices, bits_alice, bits_bob) -> np.ndarray:
    n = state.n
    full = state.amplitudes.reshape([2] * (2 * n))
    indexer = [slice(None)] * (2 * n)
    for q, b in zip(alice_indices, bits_alice):
        indexer[q] = b
    for q, b in zip(bob_indices, bits_bob):
        indexer[n + q] = b
    remaining = n - len(alice_indices)
    dim = 2**remaining if remaining else 1
    return full[tuple(indexer)].reshape(dim, dim)


def project_bits(state: JointState, alice_indices, bob_indices, bits_alice, bits_bob):
    """Condition on given bit values (no sampling).

    Returns ``(probability, post_state)`` where the post state lives on the
    remaining qubits in ascending original order; ``post_state`` is None when
    the probability is zero.
    """
    alice_indices = _validate_indices(state.n, alice_indices)
    bob_indices = _validate_indices(state.n, bob_indices)
    if len(alice_indices) != len(bob_indices):
        raise ValueError("alice and bob must condition on the same number of qubits")
    if not alice_indices:
        return 1.0, state
    sel = _select_bits(state, alice_indices, bob_indices, bits_alice, bits_bob)
    nrm = np.linalg.norm(sel)
    if nrm == 0.0:
        return 0.0, None
    return float(nrm**2), JointState(state.n - len(alice_indices), sel / nrm)


def measure_qubits(state: JointState, alice_indices, bob_indices, rng):
    """Projectively measure the listed qubits on both sides (Born rule).

    The joint outcome over all measured qubits is sampled with a single
    uniform draw by inverse CDF over outcomes ordered lexicographically as
    (alice bits in listed order, bob bits in listed order). Returns the
    sampled :class:`MeasurementOutcome` and the renormalized post-measurement
    state on the remaining qubits.
    """
    alice_indices = _validate_indices(state.n, alice_indices)
    bob_indices = _validate_indices(state.n, bob_indices)
    if len(alice_indices) != len(bob_indices):
        raise ValueError("alice and bob must measure the same number of qubits")
    if not alice_indices:
        raise ValueError("no qubits to measure")

    marg = _bit_axes_probs(state, alice_indices, bob_indices)
    total = float(marg.sum())
    if not np.isfinite(total) or total <= 0.0:
        raise RuntimeError("cannot measure a zero-norm state")
    cum = np.cumsum(marg)
    idx = int(np.searchsorted(cum, rng.random() * total, side="right"))
    idx = min(idx, len(marg) - 1)

    m = len(alice_indices)
    bits = [(idx >> (2 * m - 1 - i)) & 1 for i in range(2 * m)]
    bits_alice, bits_bob = tuple(bits[:m]), tuple(bits[m:])

    sel = _select_bits(state, alice_indices, bob_indices, bits_alice, bits_bob)
    nrm = np.linalg.norm(sel)
    if nrm == 0.0:
        raise RuntimeError("sampled a zero-probability outcome; state is inconsistent")
    outcome = MeasurementOutcome(tuple(alice_indices), bits_alice, bits_bob)
    return outcome, JointState(state.n - m, sel / nrm)

"""Readout strategies for the OAM register and their cost accounting.

Three routes out of the photon: a full branching sorter (exponential arms),
bitwise readout over repeated runs (one binary decision per run), and an
ideal demultiplexer into path-encoded qubits (priced at ``2 n - 1`` path
CNOT gates, annotated rather than simulated).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .errors import LeakageError, ValidationError
from .state import PhotonState

#: Sorter arm count above which plans are flagged as exponentially large.
DEFAULT_ARM_BUDGET = 512


@dataclass(frozen=True)
class ReadoutCost:
    decision_points: int = 0
    arms: int = 0
    runs: int = 0
    cnot_count: int = 0

    def to_json_dict(self) -> dict:
        return {
            "decision_points": self.decision_points,
            "arms": self.arms,
            "runs": self.runs,
            "cnot_count": self.cnot_count,
        }


@dataclass(frozen=True)
class PathQubitState:
    """Path-encoded register: amplitudes keyed by n-bit strings."""

    n: int
    amplitudes: Mapping[str, complex]

    def __post_init__(self) -> None:
        amps = {k: complex(v) for k, v in self.amplitudes.items() if v != 0}
        for bits in amps:
            if len(bits) != self.n or set(bits) - {"0", "1"}:
                raise ValidationError(f"bad bit string key {bits!r} for n={self.n}")
        norm2 = sum(abs(a) ** 2 for a in amps.values())
        if norm2 > 1.0 + 1e-12:
            raise ValidationError(f"squared norm {norm2} exceeds 1 + eps")
        object.__setattr__(self, "amplitudes", MappingProxyType(amps))


def _mode_weights(state: PhotonState, mode: int) -> dict[int, float]:
    weights = {}
    for (m, l), amp in state.amplitudes.items():
        if m == mode:
            weights[l] = weights.get(l, 0.0) + abs(amp) ** 2
    return weights


def sample_full_measurement(
    state: PhotonState, mode: int, rng: np.random.Generator
) -> int:
    """Sample an OAM index from the Born distribution, post-selected on survival."""
    weights = _mode_weights(state, mode)
    total = sum(weights.values())
    if total <= 0.0:
        raise ValidationError("state has no surviving amplitude in that mode")
    indices = sorted(weights)
    probs = np.array([weights[l] / total for l in indices])
    return int(indices[rng.choice(len(indices), p=probs)])


def measure_bit(
    state: PhotonState, mode: int, bit_k: int, rng: np.random.Generator
) -> tuple[int, PhotonState]:
    """Projectively measure one bit of the OAM index; collapse and renormalize."""
    if not 0 <= bit_k < state.n:
        raise ValidationError(f"bit index {bit_k} out of range for n={state.n}")
    weights = _mode_weights(state, mode)
    total = sum(weights.values())
    if total <= 0.0:
        raise ValidationError("state has no surviving amplitude in that mode")
    p_one = sum(w for l, w in weights.items() if (l >> bit_k) & 1) / total
    bit = 1 if rng.random() < p_one else 0
    keep = {
        key: amp
        for key, amp in state.amplitudes.items()
        if key[0] == mode and ((key[1] >> bit_k) & 1) == bit
    }
    branch_norm = math.sqrt(sum(abs(a) ** 2 for a in keep.values()))
    collapsed = PhotonState(
        n=state.n, amplitudes={k: v / branch_norm for k, v in keep.items()}
    )
    return bit, collapsed


def repeated_run_readout(
    state_factory: Callable[[], PhotonState],
    n: int,
    rng: np.random.Generator,
    mode: int = 0,
    msb_first: bool = False,
) -> tuple[str, ReadoutCost]:
    """Read one bit per fresh run; n runs assemble the full value.

    Exact only when the prepared output is (nearly) a single basis state; for
    genuine superpositions the per-run bits are independent samples and the
    assembled string need not describe any single basis state.  The returned
    string is MSB-first (``b_{n-1} ... b_0``).
    """
    order = range(n - 1, -1, -1) if msb_first else range(n)
    bits = {}
    for k in order:
        bit, _ = measure_bit(state_factory(), mode, k, rng)
        bits[k] = bit
    string = "".join(str(bits[k]) for k in range(n - 1, -1, -1))
    # One binary decision point per run.
    return string, ReadoutCost(decision_points=1, arms=2, runs=n, cnot_count=0)


def demux(state: PhotonState, mode: int) -> tuple[PathQubitState, ReadoutCost]:
    """Relabel OAM amplitudes as path-qubit bit strings (ideal demultiplexer)."""
    offenders = [
        key
        for key in state.amplitudes
        if key[0] != mode or not 0 <= key[1] < state.dim
    ]
    if offenders:
        raise LeakageError(sorted(offenders))
    amps = {
        format(l, f"0{state.n}b"): amp for (_, l), amp in state.amplitudes.items()
    }
    cost = ReadoutCost(cnot_count=2 * state.n - 1, runs=1)
    return PathQubitState(n=state.n, amplitudes=amps), cost


def remux(path_state: PathQubitState, mode: int = 0) -> PhotonState:
    """Inverse relabeling of :func:`demux`, back onto one spatial mode."""
    amps = {(mode, int(bits, 2)): amp for bits, amp in path_state.amplitudes.items()}
    return PhotonState(n=path_state.n, amplitudes=amps)


def sorter_cost(n: int, arm_budget: int = DEFAULT_ARM_BUDGET) -> tuple[ReadoutCost, bool]:
    """Cost of a full branching sorter; second value flags exponential blowup."""
    if n < 1:
        raise ValidationError("need at least one qubit")
    arms = 1 << n
    cost = ReadoutCost(decision_points=n, arms=arms, runs=1, cnot_count=0)
    return cost, arms > arm_budget


def born_distribution(state: PhotonState, mode: int) -> dict[int, float]:
    """Post-selected outcome probabilities of a full measurement."""
    weights = _mode_weights(state, mode)
    total = sum(weights.values())
    if total <= 0.0:
        raise ValidationError("state has no surviving amplitude in that mode")
    return {l: w / total for l, w in sorted(weights.items())}

"""Optical element IR and exact netlist execution.

Five primitives (phase shifter, hologram, beamsplitter, OAM filter, mirror)
plus two macro gates (extract / reintegrate) that the compiler emits and the
executor either applies ideally or expands into a Zeno chain.

Beamsplitter convention: the mode-pair amplitudes ``(a, b)`` at each OAM
index transform by the proper rotation ``[[cos t, sin t], [-sin t, cos t]]``,
so repeated application composes as a rotation by the summed angle.  Distinct
OAM indices never mix.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

from .errors import ValidationError
from .state import PhotonState

#: Marker for the lossless, infinite-stage limit of the extraction gate.
IDEAL = "ideal"

Stages = Union[int, str]  # positive int or IDEAL


@dataclass(frozen=True)
class PhaseShifter:
    mode: int
    phi: float


@dataclass(frozen=True)
class Hologram:
    mode: int
    k: int


@dataclass(frozen=True)
class BeamSplitter:
    mode_a: int
    mode_b: int
    theta: float

    def __post_init__(self) -> None:
        if self.mode_a == self.mode_b:
            raise ValidationError("beamsplitter requires two distinct modes")


@dataclass(frozen=True)
class Filter:
    """Absorbing projector: passes OAM index ``m`` in ``mode``, absorbs the rest."""

    mode: int
    m: int


@dataclass(frozen=True)
class Mirror:
    mode: int


@dataclass(frozen=True)
class ExtractGate:
    """Macro: move the OAM-``m`` component of ``src`` to OAM 0 of ``dst``."""

    m: int
    src: int
    dst: int
    stages: Stages = IDEAL

    def __post_init__(self) -> None:
        _check_spec(self.src, self.dst, self.stages)


@dataclass(frozen=True)
class ReintegrateGate:
    """Macro: inverse of :class:`ExtractGate` on the same mode pair."""

    m: int
    src: int
    dst: int
    stages: Stages = IDEAL

    def __post_init__(self) -> None:
        _check_spec(self.src, self.dst, self.stages)


def _check_spec(src: int, dst: int, stages: Stages) -> None:
    if src == dst:
        raise ValidationError("extraction requires src != dst")
    if stages != IDEAL and (not isinstance(stages, int) or stages < 1):
        raise ValidationError(f"stage count must be a positive integer, got {stages!r}")


Element = Union[
    PhaseShifter, Hologram, BeamSplitter, Filter, Mirror, ExtractGate, ReintegrateGate
]


@dataclass(frozen=True)
class Netlist:
    """Ordered element program over ``mode_count`` spatial modes, width ``n``."""

    n: int
    mode_count: int
    elements: tuple[Element, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        if self.mode_count < 1:
            raise ValidationError("mode_count must be >= 1")
        for el in self.elements:
            for mode in _element_modes(el):
                if not 0 <= mode < self.mode_count:
                    raise ValidationError(
                        f"element {el!r} references mode {mode} outside [0, {self.mode_count})"
                    )

    def __len__(self) -> int:
        return len(self.elements)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "modes": self.mode_count,
            "elements": [_element_to_json(el) for el in self.elements],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Netlist":
        try:
            n = int(data["n"])
            modes = int(data["modes"])
            elements = [_element_from_json(entry) for entry in data["elements"]]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed netlist JSON: {exc}") from exc
        return cls(n=n, mode_count=modes, elements=tuple(elements))


def _element_modes(el: Element) -> tuple[int, ...]:
    if isinstance(el, BeamSplitter):
        return (el.mode_a, el.mode_b)
    if isinstance(el, (ExtractGate, ReintegrateGate)):
        return (el.src, el.dst)
    return (el.mode,)


def _element_to_json(el: Element) -> dict:
    if isinstance(el, PhaseShifter):
        return {"type": "ps", "mode": el.mode, "phi": el.phi}
    if isinstance(el, Hologram):
        return {"type": "holo", "mode": el.mode, "k": el.k}
    if isinstance(el, BeamSplitter):
        return {"type": "bs", "mode_a": el.mode_a, "mode_b": el.mode_b, "theta": el.theta}
    if isinstance(el, Filter):
        return {"type": "filter", "mode": el.mode, "m": el.m}
    if isinstance(el, Mirror):
        return {"type": "mirror", "mode": el.mode}
    if isinstance(el, ExtractGate):
        return {"type": "extract", "m": el.m, "src": el.src, "dst": el.dst,
                "stages": el.stages}
    if isinstance(el, ReintegrateGate):
        return {"type": "reintegrate", "m": el.m, "src": el.src, "dst": el.dst,
                "stages": el.stages}
    raise ValidationError(f"unknown element {el!r}")


def _element_from_json(entry: dict) -> Element:
    kind = entry.get("type")
    if kind == "ps":
        return PhaseShifter(mode=int(entry["mode"]), phi=float(entry["phi"]))
    if kind == "holo":
        return Hologram(mode=int(entry["mode"]), k=int(entry["k"]))
    if kind == "bs":
        return BeamSplitter(
            mode_a=int(entry["mode_a"]),
            mode_b=int(entry["mode_b"]),
            theta=float(entry["theta"]),
        )
    if kind == "filter":
        return Filter(mode=int(entry["mode"]), m=int(entry["m"]))
    if kind == "mirror":
        return Mirror(mode=int(entry["mode"]))
    if kind in ("extract", "reintegrate"):
        stages = entry["stages"]
        stages = IDEAL if stages == IDEAL else int(stages)
        cls = ExtractGate if kind == "extract" else ReintegrateGate
        return cls(m=int(entry["m"]), src=int(entry["src"]), dst=int(entry["dst"]),
                   stages=stages)
    raise ValidationError(f"unknown element type {kind!r}")


# ---------------------------------------------------------------------------
# Primitive semantics.  All are pure: state in, new state out.


def apply_phase_shifter(state: PhotonState, mode: int, phi: float) -> PhotonState:
    """Multiply every amplitude in ``mode`` by ``exp(i * phi)``."""
    factor = cmath.exp(1j * phi)
    amps = {
        key: (amp * factor if key[0] == mode else amp)
        for key, amp in state.amplitudes.items()
    }
    return PhotonState(n=state.n, amplitudes=amps)


def apply_hologram(state: PhotonState, mode: int, k: int) -> PhotonState:
    """Shift every OAM index in ``mode`` by ``k`` (bijective relabeling)."""
    amps = {}
    for (m, l), amp in state.amplitudes.items():
        amps[(m, l + k) if m == mode else (m, l)] = amp
    return PhotonState(n=state.n, amplitudes=amps)


def apply_beamsplitter(
    state: PhotonState, mode_a: int, mode_b: int, theta: float
) -> PhotonState:
    """Rotate the ``(mode_a, mode_b)`` amplitude pair at every OAM index."""
    if mode_a == mode_b:
        raise ValidationError("beamsplitter requires two distinct modes")
    c, s = math.cos(theta), math.sin(theta)
    amps = {
        key: amp for key, amp in state.amplitudes.items() if key[0] not in (mode_a, mode_b)
    }
    indices = {l for m, l in state.amplitudes if m in (mode_a, mode_b)}
    for l in indices:
        a = state.amplitude(mode_a, l)
        b = state.amplitude(mode_b, l)
        new_a = a * c + b * s
        new_b = -a * s + b * c
        if new_a != 0:
            amps[(mode_a, l)] = new_a
        if new_b != 0:
            amps[(mode_b, l)] = new_b
    return PhotonState(n=state.n, amplitudes=amps)


def apply_filter(state: PhotonState, mode: int, m: int) -> PhotonState:
    """Project ``mode`` onto OAM ``m``; everything else in that mode is absorbed."""
    amps = {
        key: amp
        for key, amp in state.amplitudes.items()
        if key[0] != mode or key[1] == m
    }
    return PhotonState(n=state.n, amplitudes=amps)


def apply_mirror(state: PhotonState, mode: int) -> PhotonState:
    """Reflect OAM in ``mode``: amplitude at ``l`` moves to ``-l``."""
    amps = {}
    for (m, l), amp in state.amplitudes.items():
        amps[(m, -l) if m == mode else (m, l)] = amp
    return PhotonState(n=state.n, amplitudes=amps)


def apply_element(state: PhotonState, el: Element) -> PhotonState:
    if isinstance(el, PhaseShifter):
        return apply_phase_shifter(state, el.mode, el.phi)
    if isinstance(el, Hologram):
        return apply_hologram(state, el.mode, el.k)
    if isinstance(el, BeamSplitter):
        return apply_beamsplitter(state, el.mode_a, el.mode_b, el.theta)
    if isinstance(el, Filter):
        return apply_filter(state, el.mode, el.m)
    if isinstance(el, Mirror):
        return apply_mirror(state, el.mode)
    if isinstance(el, (ExtractGate, ReintegrateGate)):
        # Late import: macro semantics live in the extraction module.
        from . import extraction

        return extraction.apply_macro(state, el)
    raise ValidationError(f"unknown element {el!r}")


def run_netlist(state: PhotonState, netlist: Netlist) -> PhotonState:
    """Apply all elements in order; the result may be sub-normalized."""
    if state.n != netlist.n:
        raise ValidationError(
            f"state width {state.n} does not match netlist width {netlist.n}"
        )
    if state.max_mode() >= netlist.mode_count:
        raise ValidationError(
            f"state occupies mode {state.max_mode()} outside the netlist's "
            f"{netlist.mode_count} modes"
        )
    for el in netlist.elements:
        state = apply_element(state, el)
    return state


@dataclass(frozen=True)
class ReflectionParityReport:
    """Mirror counts per mode; a mode fails on an odd total."""

    counts: dict[int, int]
    total: int

    @property
    def failing_modes(self) -> list[int]:
        return sorted(m for m, c in self.counts.items() if c % 2 == 1)

    @property
    def ok(self) -> bool:
        return not self.failing_modes

    def passes(self, mode: int) -> bool:
        return self.counts.get(mode, 0) % 2 == 0


def check_reflection_parity(netlist: Netlist) -> ReflectionParityReport:
    """Count explicit mirror elements per mode over the whole netlist."""
    counts = {mode: 0 for mode in range(netlist.mode_count)}
    for el in netlist.elements:
        if isinstance(el, Mirror):
            counts[el.mode] += 1
    return ReflectionParityReport(counts=counts, total=sum(counts.values()))

"""Parametric linear interferometers built from phase shifters and splitters.

A circuit is an ordered list of elements on ``mode_count`` modes.  Phase
shifters carry a binding phi = a * theta + b to a named parameter (a = 0 for
constants), so one variational parameter may steer several physical phases
with integer multipliers.  Beam splitters have a fixed mixing angle; the
balanced value pi/4 gives the unbiased 50:50 splitter with 2x2 block
[[cos t, i sin t], [i sin t, cos t]].
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np

UNITARY_TOL = 1e-10

BALANCED_ANGLE = math.pi / 4


@dataclass(frozen=True)
class PhaseBinding:
    """phi = multiplier * parameter + offset; constant when parameter is None."""

    parameter: Optional[str] = None
    multiplier: int = 1
    offset: float = 0.0

    def __post_init__(self):
        if self.parameter is not None:
            if int(self.multiplier) != self.multiplier or self.multiplier == 0:
                raise ValueError("linear bindings need a nonzero integer multiplier")

    @staticmethod
    def constant(value: float) -> "PhaseBinding":
        return PhaseBinding(parameter=None, multiplier=1, offset=value)

    def resolve(self, values: Mapping[str, float]) -> float:
        if self.parameter is None:
            return self.offset
        if self.parameter not in values:
            raise KeyError(f"unbound parameter {self.parameter!r}")
        return self.multiplier * values[self.parameter] + self.offset


@dataclass(frozen=True)
class PhaseShifter:
    mode: int
    binding: PhaseBinding


@dataclass(frozen=True)
class BeamSplitter:
    mode_a: int
    mode_b: int
    mixing_angle: float = BALANCED_ANGLE

    def __post_init__(self):
        if self.mode_a == self.mode_b:
            raise ValueError("beam splitter modes must be distinct")


Element = PhaseShifter | BeamSplitter


@dataclass
class ParametricCircuit:
    """Ordered elements plus a table of declared parameters with default values."""

    mode_count: int
    elements: list[Element]
    parameters: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode_count < 1:
            raise ValueError("mode_count must be at least 1")
        for el in self.elements:
            modes = (el.mode,) if isinstance(el, PhaseShifter) else (el.mode_a, el.mode_b)
            if any(m < 0 or m >= self.mode_count for m in modes):
                raise ValueError(f"element {el} uses a mode outside 0..{self.mode_count - 1}")
            if isinstance(el, PhaseShifter):
                name = el.binding.parameter
                if name is not None and name not in self.parameters:
                    raise ValueError(f"binding references undeclared parameter {name!r}")

    def resolved_values(self, params: Optional[Mapping[str, float]] = None) -> dict[str, float]:
        values = dict(self.parameters)
        if params:
            unknown = set(params) - set(values)
            if unknown:
                raise KeyError(f"unknown parameters {sorted(unknown)}")
            values.update(params)
        return values

    def parameter_names(self) -> list[str]:
        return list(self.parameters)


def element_matrix(element: Element, mode_count: int, phase: Optional[float] = None) -> np.ndarray:
    """Full m x m matrix of a single element (phase value already resolved)."""
    U = np.eye(mode_count, dtype=complex)
    if isinstance(element, PhaseShifter):
        U[element.mode, element.mode] = np.exp(1j * phase)
    else:
        t = element.mixing_angle
        a, b = element.mode_a, element.mode_b
        U[a, a] = U[b, b] = math.cos(t)
        U[a, b] = U[b, a] = 1j * math.sin(t)
    return U


def evaluate_unitary(
    circuit: ParametricCircuit, params: Optional[Mapping[str, float]] = None
) -> np.ndarray:
    """Product of the element matrices in propagation order (later acts left)."""
    values = circuit.resolved_values(params)
    U = np.eye(circuit.mode_count, dtype=complex)
    for el in circuit.elements:
        if isinstance(el, PhaseShifter):
            M = element_matrix(el, circuit.mode_count, el.binding.resolve(values))
        else:
            M = element_matrix(el, circuit.mode_count)
        U = M @ U
    return U


def split_at_phase(
    circuit: ParametricCircuit,
    element_index: int,
    params: Optional[Mapping[str, float]] = None,
) -> tuple[np.ndarray, int, np.ndarray]:
    """Split as U = U2 * Phi(phi, mode) * U1 around one phase shifter.

    Returns (U1, mode, U2) evaluated at the circuit's current parameter
    values; the phase element itself is excluded so any phi can be re-inserted.
    """
    el = circuit.elements[element_index]
    if not isinstance(el, PhaseShifter):
        raise ValueError(f"element {element_index} is not a phase shifter")
    values = circuit.resolved_values(params)

    def product(elements):
        U = np.eye(circuit.mode_count, dtype=complex)
        for e in elements:
            if isinstance(e, PhaseShifter):
                M = element_matrix(e, circuit.mode_count, e.binding.resolve(values))
            else:
                M = element_matrix(e, circuit.mode_count)
            U = M @ U
        return U

    U1 = product(circuit.elements[:element_index])
    U2 = product(circuit.elements[element_index + 1 :])
    return U1, el.mode, U2


def parameter_phase_instances(
    circuit: ParametricCircuit, name: str
) -> list[tuple[int, int]]:
    """All (element_index, multiplier) pairs whose binding references ``name``."""
    if name not in circuit.parameters:
        raise KeyError(f"unknown parameter {name!r}")
    out = []
    for i, el in enumerate(circuit.elements):
        if isinstance(el, PhaseShifter) and el.binding.parameter == name:
            out.append((i, el.binding.multiplier))
    return out


def build_clements_mesh(
    m: int,
    *,
    prefix: str = "",
    output_phases: str = "constant",
) -> ParametricCircuit:
    """Rectangular mesh of m(m-1)/2 Mach-Zehnder cells covering all mode pairs.

    Each cell is external phase, splitter, internal phase, splitter, with both
    phases bound to fresh parameters (external ``phi``, internal ``theta``).
    A trailing layer of per-mode output phase shifters carries the residual
    diagonal of the decomposition; those are constant (zero) by default and
    become parameters ``out0..`` with ``output_phases="variational"``.
    """
    if m < 2:
        raise ValueError("a mesh needs at least 2 modes")
    if output_phases not in ("constant", "variational"):
        raise ValueError("output_phases must be 'constant' or 'variational'")

    elements: list[Element] = []
    parameters: dict[str, float] = {}
    cell = 0
    for layer in range(m):
        for a in range(layer % 2, m - 1, 2):
            phi = f"{prefix}phi{cell}"
            theta = f"{prefix}theta{cell}"
            parameters[phi] = 0.0
            parameters[theta] = 0.0
            elements.append(PhaseShifter(a, PhaseBinding(phi)))
            elements.append(BeamSplitter(a, a + 1))
            elements.append(PhaseShifter(a, PhaseBinding(theta)))
            elements.append(BeamSplitter(a, a + 1))
            cell += 1
    for mode in range(m):
        if output_phases == "variational":
            name = f"{prefix}out{mode}"
            parameters[name] = 0.0
            elements.append(PhaseShifter(mode, PhaseBinding(name)))
        else:
            elements.append(PhaseShifter(mode, PhaseBinding.constant(0.0)))
    return ParametricCircuit(m, elements, parameters)


# --- JSON round trip -------------------------------------------------------

def circuit_to_json(circuit: ParametricCircuit) -> str:
    def encode(el: Element) -> dict:
        if isinstance(el, PhaseShifter):
            b = el.binding
            return {
                "kind": "phase_shifter",
                "mode": el.mode,
                "binding": {
                    "parameter": b.parameter,
                    "multiplier": b.multiplier,
                    "offset": b.offset,
                },
            }
        return {
            "kind": "beam_splitter",
            "mode_a": el.mode_a,
            "mode_b": el.mode_b,
            "mixing_angle": el.mixing_angle,
        }

    doc = {
        "mode_count": circuit.mode_count,
        "elements": [encode(el) for el in circuit.elements],
        "parameters": circuit.parameters,
    }
    return json.dumps(doc, indent=2)


def circuit_from_json(text: str) -> ParametricCircuit:
    doc = json.loads(text)
    elements: list[Element] = []
    for e in doc["elements"]:
        if e["kind"] == "phase_shifter":
            b = e["binding"]
            binding = PhaseBinding(b["parameter"], b["multiplier"], b["offset"])
            elements.append(PhaseShifter(e["mode"], binding))
        elif e["kind"] == "beam_splitter":
            elements.append(BeamSplitter(e["mode_a"], e["mode_b"], e["mixing_angle"]))
        else:
            raise ValueError(f"unknown element kind {e['kind']!r}")
    return ParametricCircuit(doc["mode_count"], elements, dict(doc["parameters"]))

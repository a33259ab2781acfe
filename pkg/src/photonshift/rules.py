"""Degree analysis, exact shift derivatives, and weighted-integral rules.

Output probabilities of a linear interferometer are finite Fourier series in
every internal phase, with integer frequencies.  The degree in a given phase
is bounded by the number of photons that can traverse that phase at once
(``phase_degree``); derivatives and weighted integrals of such series are
then exact finite sums of shifted function evaluations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .circuit import ParametricCircuit, parameter_phase_instances, split_at_phase
from .core import mode_assignment

# Distinguishes structural zeros of a mesh from round-off in connectivity.
CONNECTIVITY_EPS = 1e-12


@dataclass
class DegreeReport:
    """Fourier-degree bound of one parameter for a given input/output set.

    ``instances`` holds (element_index, multiplier, k) per bound phase; the
    parameter degree is R = sum |multiplier| * k.
    """

    parameter: str
    instances: list[tuple[int, int, int]]
    photon_number: int

    @property
    def degree(self) -> int:
        return sum(abs(mult) * k for _, mult, k in self.instances)


def phase_degree(
    U1,
    U2,
    mode: int,
    input_occ: Sequence[int],
    output_occ: Sequence[int],
    eps: float = CONNECTIVITY_EPS,
) -> int:
    """Maximum number of photons that can traverse the phase on ``mode``.

    Each photon contributes a factor U2[h, mode] * U1[mode, j] to the
    phase-dependent part of a permutation term, so the term's degree is the
    number of photons routed through the phase.  The routing is a bipartite
    matching between input photons j with U1[mode, j] != 0 and output photons
    h with U2[h, mode] != 0, but every such pair is connectable (the
    connectivity matrix U2[h, mode] * U1[mode, j] is rank one), so the maximum
    matching size is simply the smaller of the two counts.
    """
    U1 = np.asarray(U1)
    U2 = np.asarray(U2)
    dr = mode_assignment(input_occ)
    ds = mode_assignment(output_occ)
    if len(dr) != len(ds):
        raise ValueError("photon numbers of input and output differ")
    n_in = sum(1 for j in dr if abs(U1[mode, j]) > eps)
    n_out = sum(1 for h in ds if abs(U2[h, mode]) > eps)
    return min(n_in, n_out)


def parameter_degree(
    circuit: ParametricCircuit,
    name: str,
    input_occ: Sequence[int],
    outputs,
    params: Optional[Mapping[str, float]] = None,
) -> DegreeReport:
    """Degree bound of one parameter: sum of |multiplier| * K over its phases.

    ``outputs`` is a single occupation list or an iterable of them; for a set
    the per-phase K is the max over outputs.
    """
    if outputs and isinstance(outputs[0], int):
        outputs = [outputs]
    n = sum(input_occ)
    instances = []
    for index, mult in parameter_phase_instances(circuit, name):
        U1, mode, U2 = split_at_phase(circuit, index, params)
        k = max(phase_degree(U1, U2, mode, input_occ, s) for s in outputs)
        instances.append((index, mult, k))
    return DegreeReport(parameter=name, instances=instances, photon_number=n)


def shift_derivative(f: Callable[[float], float], x0: float, degree: int) -> float:
    """Exact derivative at x0 of a trigonometric polynomial of degree <= R.

    Evaluates f at the 2R points x0 + (2k-1)pi/(2R) with weights
    (-1)^(k-1) / (4R sin^2((2k-1)pi/(4R))).
    """
    R = int(degree)
    if R < 1:
        raise ValueError("shift rule degree must be >= 1")
    total = 0.0
    for k in range(1, 2 * R + 1):
        shift = (2 * k - 1) * math.pi / (2 * R)
        weight = (-1) ** (k - 1) / (4 * R * math.sin((2 * k - 1) * math.pi / (4 * R)) ** 2)
        total += weight * f(x0 + shift)
    return total


def shift_rule_nodes(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Shifts and weights of the derivative rule (relative to x0)."""
    R = int(degree)
    k = np.arange(1, 2 * R + 1)
    shifts = (2 * k - 1) * np.pi / (2 * R)
    weights = (-1.0) ** (k - 1) / (4 * R * np.sin((2 * k - 1) * np.pi / (4 * R)) ** 2)
    return shifts, weights


@dataclass
class FourierSeries:
    """f(x) = a0 + sum a_l cos(lx) + b_l sin(lx), l = 1..R."""

    cos_coeffs: np.ndarray  # a_0 .. a_R
    sin_coeffs: np.ndarray  # b_1 .. b_R

    @property
    def degree(self) -> int:
        return len(self.cos_coeffs) - 1

    def __call__(self, x: float) -> float:
        l = np.arange(1, self.degree + 1)
        return float(
            self.cos_coeffs[0]
            + np.dot(self.cos_coeffs[1:], np.cos(l * x))
            + np.dot(self.sin_coeffs, np.sin(l * x))
        )

    def derivative(self, x: float) -> float:
        l = np.arange(1, self.degree + 1)
        return float(
            -np.dot(self.cos_coeffs[1:] * l, np.sin(l * x))
            + np.dot(self.sin_coeffs * l, np.cos(l * x))
        )

    def mean(self) -> float:
        return float(self.cos_coeffs[0])


def reconstruct_fourier(f: Callable[[float], float], degree: int) -> FourierSeries:
    """Recover the series of a degree <= R function from 2R+1 uniform samples."""
    R = int(degree)
    if R < 0:
        raise ValueError("degree must be non-negative")
    n = 2 * R + 1
    xs = 2.0 * np.pi * np.arange(n) / n
    samples = np.array([f(x) for x in xs], dtype=float)
    a = np.empty(R + 1)
    b = np.empty(R)
    a[0] = samples.mean()
    for l in range(1, R + 1):
        a[l] = 2.0 / n * np.dot(samples, np.cos(l * xs))
        b[l - 1] = 2.0 / n * np.dot(samples, np.sin(l * xs))
    return FourierSeries(a, b)


@dataclass
class IntegralRule:
    """Nodes and weights integrating degree <= R series against a weight g.

    ``kernel_coefficients`` are the c_k of the matching closed-form rule
    (general: 2R+1 of them; odd/even: the per-node kernel integrals).
    """

    kind: str
    degree: int
    nodes: np.ndarray
    weights: np.ndarray
    kernel_coefficients: Optional[np.ndarray] = None

    def to_json(self) -> str:
        doc = {
            "kind": self.kind,
            "degree": self.degree,
            "nodes": list(map(float, self.nodes)),
            "weights": list(map(float, self.weights)),
        }
        if self.kernel_coefficients is not None:
            doc["kernel_coefficients"] = list(map(float, self.kernel_coefficients))
        return json.dumps(doc, indent=2)


def _weight_moments(g: Callable[[float], float], degree: int):
    """cos/sin moments of g over [-pi, pi] by adaptive quadrature."""
    mc = np.empty(degree + 1)
    ms = np.empty(degree + 1)
    # interior break points help quad across kinks such as |sin x|
    breaks = [-np.pi / 2, 0.0, np.pi / 2]
    for l in range(degree + 1):
        mc[l], _ = quad(lambda x: g(x) * np.cos(l * x), -np.pi, np.pi,
                        points=breaks, limit=200)
        ms[l], _ = quad(lambda x: g(x) * np.sin(l * x), -np.pi, np.pi,
                        points=breaks, limit=200)
    return mc, ms


def _kernel_cos_expansion(kernel: Callable[[np.ndarray], np.ndarray], degree: int) -> np.ndarray:
    """Coefficients gamma_l of an even trig-polynomial kernel of degree <= R.

    The kernels below have removable singularities at their own nodes; a
    uniform grid offset away from all node locations sidesteps them and the
    discrete projection is exact for polynomials of this degree.
    """
    n = 8 * (degree + 4)
    xs = 2 * np.pi * (np.arange(n) + 0.2137) / n
    vals = kernel(xs)
    gamma = np.empty(degree + 1)
    gamma[0] = vals.mean()
    for l in range(1, degree + 1):
        gamma[l] = 2.0 / n * np.dot(vals, np.cos(l * xs))
    return gamma


def _kernel_sin_expansion(kernel, degree: int) -> np.ndarray:
    n = 8 * (degree + 4)
    xs = 2 * np.pi * (np.arange(n) + 0.2137) / n
    vals = kernel(xs)
    gamma = np.empty(degree)
    for l in range(1, degree + 1):
        gamma[l - 1] = 2.0 / n * np.dot(vals, np.sin(l * xs))
    return gamma


def _check_parity(g: Callable[[float], float], parity: str) -> None:
    xs = np.linspace(0.1, np.pi - 0.1, 7)
    sign = 1.0 if parity == "even" else -1.0
    for x in xs:
        if abs(g(-x) - sign * g(x)) > 1e-9 * (1.0 + abs(g(x))):
            raise ValueError(f"weight function is not {parity} as declared")


def integral_rule(weight, degree: int) -> IntegralRule:
    """Build the rule computing int_{-pi}^{pi} f(x) g(x) dx for deg(f) <= R.

    ``weight`` selects the construction:
      - "uniform": g = 1/(2pi), closed-form mean rule, 2R equal weights;
      - "abs_sin_quarter": g = |sin x|/4 through the even-weight rule;
      - ("odd", g) / ("even", g): 2R-node rules for weights of known parity;
      - ("general", g): 2R+1-node rule for arbitrary periodic g.
    """
    R = int(degree)
    if R < 1:
        raise ValueError("integral rule degree must be >= 1")

    if weight == "uniform":
        nodes = np.pi * np.arange(2 * R) / R
        weights = np.full(2 * R, 1.0 / (2 * R))
        return IntegralRule("uniform_mean", R, nodes, weights)

    if weight == "abs_sin_quarter":
        return _even_rule(lambda x: abs(math.sin(x)) / 4.0, R, kind="even_weight")

    kind, g = weight
    if kind == "general":
        return _general_rule(g, R)
    if kind == "even":
        _check_parity(g, "even")
        return _even_rule(g, R)
    if kind == "odd":
        _check_parity(g, "odd")
        return _odd_rule(g, R)
    raise ValueError(f"unknown weight specification {weight!r}")


def _general_rule(g, R: int) -> IntegralRule:
    # c_k = int g(x) sin((2R+1)x/2) / sin(x/2 - k pi/(2R+1)) dx; the shifted
    # Dirichlet kernel expands as (-1)^k [1 + 2 sum_l cos(l (x - x_k))], so the
    # c_k reduce to cos/sin moments of g.
    mc, ms = _weight_moments(g, R)
    n = 2 * R + 1
    nodes = 2 * np.pi * np.arange(n) / n
    c = np.empty(n)
    for k in range(n):
        acc = mc[0]
        for l in range(1, R + 1):
            acc += 2.0 * (math.cos(l * nodes[k]) * mc[l] + math.sin(l * nodes[k]) * ms[l])
        c[k] = (-1) ** k * acc
    weights = np.array([(-1) ** k * c[k] / n for k in range(n)])
    return IntegralRule("general", R, nodes, weights, kernel_coefficients=c)


def _even_rule(g, R: int, kind: str = "even_weight") -> IntegralRule:
    # nodes k pi / R, kernel sin(Rx) sin(x) / (cos(k pi/R) - cos(x))
    mc, _ = _weight_moments(g, R)
    nodes = np.pi * np.arange(2 * R) / R
    c = np.empty(2 * R)
    for k in range(2 * R):
        alpha = nodes[k]
        kernel = lambda x: np.sin(R * x) * np.sin(x) / (math.cos(alpha) - np.cos(x))
        gamma = _kernel_cos_expansion(kernel, R)
        c[k] = gamma[0] * mc[0] + np.dot(gamma[1:], mc[1 : R + 1])
    weights = np.array([(-1) ** k * c[k] / (2 * R) for k in range(2 * R)])
    return IntegralRule(kind, R, nodes, weights, kernel_coefficients=c)


def _odd_rule(g, R: int) -> IntegralRule:
    # antisymmetric node pairs +-(2k-1) pi/(2R), kernel
    # cos(Rx) sin(x) / (cos((2k-1) pi/(2R)) - cos(x))
    _, ms = _weight_moments(g, R)
    pos = (2 * np.arange(1, R + 1) - 1) * np.pi / (2 * R)
    c = np.empty(R)
    for k in range(1, R + 1):
        beta = pos[k - 1]
        kernel = lambda x: np.cos(R * x) * np.sin(x) / (math.cos(beta) - np.cos(x))
        gamma = _kernel_sin_expansion(kernel, R)
        c[k - 1] = np.dot(gamma, ms[1 : R + 1])
    nodes = np.concatenate([pos, -pos])
    w_pos = np.array([(-1) ** k * c[k - 1] / (2 * R) for k in range(1, R + 1)])
    weights = np.concatenate([w_pos, -w_pos])
    return IntegralRule("odd_weight", R, nodes, weights, kernel_coefficients=c)


def integrate(f: Callable[[float], float], rule: IntegralRule) -> float:
    """Apply a rule: exact weighted integral for f of degree <= rule.degree."""
    return float(sum(w * f(x) for x, w in zip(rule.nodes, rule.weights)))


def gradient(
    circuit: ParametricCircuit,
    observable: Callable[[Mapping[str, float]], float],
    names: Sequence[str],
    degrees: Mapping[str, int],
    params: Optional[Mapping[str, float]] = None,
) -> np.ndarray:
    """Shift-rule partial derivatives of ``observable`` at the given point.

    ``observable`` maps a full parameter dict to a real value; each component
    uses the 2R-point rule with R = degrees[name].
    """
    values = circuit.resolved_values(params)
    out = np.empty(len(names))
    for i, name in enumerate(names):
        R = degrees[name]
        if R == 0:
            out[i] = 0.0
            continue

        def f(x, _name=name):
            local = dict(values)
            local[_name] = x
            return observable(local)

        out[i] = shift_derivative(f, values[name], R)
    return out

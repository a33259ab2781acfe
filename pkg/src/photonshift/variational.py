"""Variational problems run on the simulated interferometer.

Two problems are provided: a two-qubit molecular eigensolver on dual-rail
encoded photons in a universal 4-mode block, and a variational Universal-NOT
gate on a single dual-rail qubit inside a 3-mode block.  Both expose cost and
shift-rule gradient evaluators suitable for the BFGS optimizer.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from . import core
from .circuit import (
    BeamSplitter,
    ParametricCircuit,
    PhaseBinding,
    PhaseShifter,
    build_clements_mesh,
    evaluate_unitary,
)
from .rules import shift_rule_nodes


def derive_seed(seed: int, *labels) -> int:
    """Stable named sub-stream seed derived from a master seed."""
    text = ":".join(str(x) for x in labels)
    return (int(seed) * 0x9E3779B1 + zlib.crc32(text.encode())) % (2**63)


# --- Hamiltonian -----------------------------------------------------------

@dataclass(frozen=True)
class PauliHamiltonian:
    """H = ii*II + zi*ZI + iz*IZ + zz*ZZ + xx*XX on two qubits (Hartree)."""

    ii: float
    zi: float
    iz: float
    zz: float
    xx: float

    def matrix(self) -> np.ndarray:
        I = np.eye(2)
        Z = np.diag([1.0, -1.0])
        X = np.array([[0.0, 1.0], [1.0, 0.0]])
        return (
            self.ii * np.kron(I, I)
            + self.zi * np.kron(Z, I)
            + self.iz * np.kron(I, Z)
            + self.zz * np.kron(Z, Z)
            + self.xx * np.kron(X, X)
        )

    def ground_energy(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix()).min())


# H2 molecule at the 0.7414 Angstrom equilibrium bond length, two-qubit
# reduced form; coefficients in Hartree.
H2_HAMILTONIAN = PauliHamiltonian(ii=-0.340, zi=0.394, iz=0.394, zz=0.011, xx=-0.181)


# --- Dual-rail layout ------------------------------------------------------

# 4-mode block: qubit A rails are modes (0, 1), qubit B rails (2, 3).
# Outcome labels use 1-based mode pairs; "13" means one photon in mode 1 and
# one in mode 3, which is the logical |00> pattern.
DUAL_RAIL_KEYS = ("13", "14", "23", "24")
DUAL_RAIL_OUTCOMES = {
    "13": (1, 0, 1, 0),
    "14": (1, 0, 0, 1),
    "23": (0, 1, 1, 0),
    "24": (0, 1, 0, 1),
}
VQE_INPUT = (1, 0, 1, 0)  # logical |00>

# sign patterns of the Z-type expectations over (13, 14, 23, 24)
_SIGNS = {
    "ZI": (1.0, -1.0, 1.0, -1.0),
    "IZ": (1.0, 1.0, -1.0, -1.0),
    "ZZ": (1.0, -1.0, -1.0, 1.0),
}


def dual_rail_post_selection(s: Sequence[int]) -> bool:
    """Exactly one photon on each rail pair (and none elsewhere)."""
    return (s[0] + s[1] == 1) and (s[2] + s[3] == 1)


def pauli_expectations(counts: Mapping[str, float]) -> dict[str, float]:
    """Normalized Z-basis expectations from dual-rail counts.

    ``counts`` maps the four outcome labels to counts (or unnormalized
    probabilities).  The same combination applied to counts recorded after
    the X-basis change layer yields <XX> through the ZZ pattern.
    """
    n = np.array([float(counts[k]) for k in DUAL_RAIL_KEYS])
    total = n.sum()
    if total <= 0:
        raise core.PostSelectionStarvation("no post-selected counts")
    p = n / total
    out = {"II": 1.0}
    for name, signs in _SIGNS.items():
        out[name] = float(np.dot(signs, p))
    return out


def _x_basis_layer() -> np.ndarray:
    """Maps a Z measurement to an X measurement on both dual-rail qubits.

    Per qubit: phase -pi/2 on the second rail followed by a balanced
    splitter, so that L^dag Z L = X on the rail pair.
    """
    U = np.eye(4, dtype=complex)
    for a, b in ((0, 1), (2, 3)):
        P = np.eye(4, dtype=complex)
        P[b, b] = np.exp(-1j * np.pi / 2)
        B = np.eye(4, dtype=complex)
        c = 1 / math.sqrt(2)
        B[a, a] = B[b, b] = c
        B[a, b] = B[b, a] = 1j * c
        U = B @ P @ U
    return U


_X_LAYER = _x_basis_layer()


def build_vqe_circuit() -> tuple[ParametricCircuit, list[str]]:
    """Universal 4-mode preparation block and its variational parameter names.

    The full mesh has 12 tunable phases; the first 9 in construction order
    are variational, the remaining 3 are held at their defaults.
    """
    circuit = build_clements_mesh(4)
    names = [n for n in circuit.parameters if not n.startswith("out")]
    return circuit, names[:9]


def vqe_raw_probabilities(
    circuit: ParametricCircuit,
    params: Optional[Mapping[str, float]],
    basis: str = "z",
) -> dict[str, float]:
    """Unnormalized probabilities of the four dual-rail outcomes."""
    U = evaluate_unitary(circuit, params)
    if basis == "x":
        U = _X_LAYER @ U
    elif basis != "z":
        raise ValueError(f"unknown basis {basis!r}")
    return {
        key: core.transition_probability(U, VQE_INPUT, s)
        for key, s in DUAL_RAIL_OUTCOMES.items()
    }


def _vqe_counts(circuit, params, basis, shots, seed) -> dict[str, float]:
    """Dual-rail counts: exact probabilities when shots is None, else sampled."""
    if shots is None:
        return vqe_raw_probabilities(circuit, params, basis)
    U = evaluate_unitary(circuit, params)
    if basis == "x":
        U = _X_LAYER @ U
    dist = core.output_distribution(U, VQE_INPUT)
    record = core.sample_counts(dist, shots, seed)
    raw = record.as_dict()
    return {key: float(raw.get(s, 0)) for key, s in DUAL_RAIL_OUTCOMES.items()}


def vqe_energy(
    circuit: ParametricCircuit,
    params: Optional[Mapping[str, float]],
    hamiltonian: PauliHamiltonian,
    shots: Optional[int] = None,
    seed: int = 0,
) -> float:
    """<H> from post-selected dual-rail measurements in the Z and X bases."""
    ez = pauli_expectations(_vqe_counts(circuit, params, "z", shots,
                                        derive_seed(seed, "energy", "z")))
    ex = pauli_expectations(_vqe_counts(circuit, params, "x", shots,
                                        derive_seed(seed, "energy", "x")))
    h = hamiltonian
    return (
        h.ii * ez["II"]
        + h.zi * ez["ZI"]
        + h.iz * ez["IZ"]
        + h.zz * ez["ZZ"]
        + h.xx * ex["ZZ"]
    )


def vqe_gradient(
    circuit: ParametricCircuit,
    params: Optional[Mapping[str, float]],
    hamiltonian: PauliHamiltonian,
    names: Optional[Sequence[str]] = None,
    shots: Optional[int] = None,
    seed: int = 0,
) -> np.ndarray:
    """Shift-rule gradient of the energy over the variational parameters.

    Coincidence counts obey the two-photon (degree 2) rule, so each count is
    differentiated with the four-node R=2 rule; the post-selected
    probabilities then follow from the quotient rule
    d(N/S) = dN/S - (N/S^2) dS.
    """
    if names is None:
        names = [n for n in circuit.parameters if not n.startswith("out")][:9]
    values = circuit.resolved_values(params)
    shifts, weights = shift_rule_nodes(2)

    h = hamiltonian
    coeff = {  # energy contribution per basis and Pauli pattern
        "z": {"ZI": h.zi, "IZ": h.iz, "ZZ": h.zz},
        "x": {"ZZ": h.xx},
    }

    grad = np.zeros(len(names))
    for i, name in enumerate(names):
        x0 = values[name]
        for basis in ("z", "x"):
            counts0 = _vqe_counts(circuit, values, basis, shots,
                                  derive_seed(seed, "grad0", basis, name))
            n0 = np.array([counts0[k] for k in DUAL_RAIL_KEYS])
            s0 = n0.sum()
            if s0 <= 0:
                raise core.PostSelectionStarvation("no post-selected counts")

            dn = np.zeros(4)
            for node, (shift, w) in enumerate(zip(shifts, weights)):
                local = dict(values)
                local[name] = x0 + shift
                counts = _vqe_counts(circuit, local, basis, shots,
                                     derive_seed(seed, "grad", basis, name, node))
                dn += w * np.array([counts[k] for k in DUAL_RAIL_KEYS])
            ds = dn.sum()
            dp = dn / s0 - (n0 / s0**2) * ds
            for pattern, c in coeff[basis].items():
                grad[i] += c * float(np.dot(_SIGNS[pattern], dp))
    return grad


# --- Universal-NOT ---------------------------------------------------------

@dataclass(frozen=True)
class BlochAngles:
    """Preparation angles of |psi> = cos(t/2) e^{i phi} |0> + sin(t/2) |1>."""

    theta: float
    phi: float


# Six preparation-phase pairs whose equal-weight average reproduces the
# Bloch-sphere integral of the mode-1 probability (degree-2 rule in both
# angles after symmetry reduction).
UNOT_Q_SET = (
    (0.0, 0.0),
    (math.pi / 2, 0.0),
    (math.pi / 2, math.pi / 2),
    (math.pi / 2, math.pi),
    (math.pi / 2, 3 * math.pi / 2),
    (math.pi, 0.0),
)

UNOT_VARIATIONAL = ("t1", "t2", "t3", "t4", "t5")


def build_unot_circuit() -> ParametricCircuit:
    """Preparation MZI, 3-mode universal block, orthogonal-state projection.

    The preparation phases (theta_p, phi_p) act on mode 0; the projection
    stage is the mirrored MZI with theta_m = pi - theta_p and
    phi_m = pi - phi_p realized as multiplier -1, offset pi bindings, so the
    detector on mode 0 projects onto the state orthogonal to the prepared
    one.  The block's first external phase is redundant against phi_p (the
    cost averages phi_p over a full period) and is fixed to zero, leaving the
    five variational phases t1..t5.
    """
    elements = [
        # preparation: photon enters mode 0
        BeamSplitter(0, 1),
        PhaseShifter(0, PhaseBinding("theta_p")),
        BeamSplitter(0, 1),
        PhaseShifter(0, PhaseBinding("phi_p")),
        # universal 3-mode block (rectangular mesh, first external phase fixed)
        PhaseShifter(0, PhaseBinding.constant(0.0)),
        BeamSplitter(0, 1),
        PhaseShifter(0, PhaseBinding("t1")),
        BeamSplitter(0, 1),
        PhaseShifter(1, PhaseBinding("t2")),
        BeamSplitter(1, 2),
        PhaseShifter(1, PhaseBinding("t3")),
        BeamSplitter(1, 2),
        PhaseShifter(0, PhaseBinding("t4")),
        BeamSplitter(0, 1),
        PhaseShifter(0, PhaseBinding("t5")),
        BeamSplitter(0, 1),
        # projection onto the orthogonal state, detector on mode 0
        PhaseShifter(0, PhaseBinding("phi_p", multiplier=-1, offset=math.pi)),
        BeamSplitter(0, 1),
        PhaseShifter(0, PhaseBinding("theta_p", multiplier=-1, offset=math.pi)),
        BeamSplitter(0, 1),
    ]
    parameters = {"theta_p": 0.0, "phi_p": 0.0}
    parameters.update({name: 0.0 for name in UNOT_VARIATIONAL})
    return ParametricCircuit(3, elements, parameters)


def _unot_values(theta: Sequence[float], theta_p: float, phi_p: float) -> dict[str, float]:
    values = {"theta_p": theta_p, "phi_p": phi_p}
    values.update(zip(UNOT_VARIATIONAL, map(float, theta)))
    return values


def unot_mode_probabilities(
    circuit: ParametricCircuit, theta: Sequence[float], theta_p: float, phi_p: float
) -> np.ndarray:
    """Output-mode probabilities of the single photon injected in mode 0."""
    U = evaluate_unitary(circuit, _unot_values(theta, theta_p, phi_p))
    return np.abs(U[:, 0]) ** 2


def unot_p1(
    circuit: ParametricCircuit,
    theta: Sequence[float],
    theta_p: float,
    phi_p: float,
    shots: Optional[int] = None,
    seed: int = 0,
) -> float:
    """Probability that the photon exits mode 0 (fidelity times success)."""
    probs = unot_mode_probabilities(circuit, theta, theta_p, phi_p)
    if shots is None:
        return float(probs[0])
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs / probs.sum())
    return counts[0] / shots


def unot_cost(
    circuit: ParametricCircuit,
    theta: Sequence[float],
    shots: Optional[int] = None,
    seed: int = 0,
) -> float:
    """Six-point estimate of minus the Bloch-averaged fidelity x success."""
    total = 0.0
    for i, (tp, pp) in enumerate(UNOT_Q_SET):
        total += unot_p1(circuit, theta, tp, pp, shots,
                         derive_seed(seed, "cost", i))
    return -total / 6.0


def unot_cost_tensor(circuit: ParametricCircuit, theta: Sequence[float],
                     theta_rule, phi_rule) -> float:
    """Full 16-point tensor form of the cost from two even-weight rules."""
    total = 0.0
    for tp, wt in zip(theta_rule.nodes, theta_rule.weights):
        for pp, wp in zip(phi_rule.nodes, phi_rule.weights):
            total += wt * wp * unot_p1(circuit, theta, tp, pp)
    return -total


def unot_gradient(
    circuit: ParametricCircuit,
    theta: Sequence[float],
    shots: Optional[int] = None,
    seed: int = 0,
) -> np.ndarray:
    """Gradient of the six-point cost; single photon, so the R=1 rule."""
    theta = np.asarray(theta, dtype=float)
    shifts, weights = shift_rule_nodes(1)
    grad = np.zeros(len(theta))
    for i in range(len(theta)):
        for q, (tp, pp) in enumerate(UNOT_Q_SET):
            for node, (shift, w) in enumerate(zip(shifts, weights)):
                shifted = theta.copy()
                shifted[i] += shift
                grad[i] -= w / 6.0 * unot_p1(
                    circuit, shifted, tp, pp, shots,
                    derive_seed(seed, "grad", i, q, node),
                )
    return grad


def sample_bloch_angles(n_states: int, seed: int) -> list[BlochAngles]:
    """Haar-uniform points: cos(theta) uniform on [-1, 1], phi uniform."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_states):
        theta = math.acos(rng.uniform(-1.0, 1.0))
        phi = rng.uniform(0.0, 2.0 * math.pi)
        out.append(BlochAngles(theta, phi))
    return out


def unot_fidelity_test(
    circuit: ParametricCircuit,
    theta: Sequence[float],
    n_states: int = 1000,
    seed: int = 0,
    bins: int = 40,
):
    """Post-selected fidelity over Haar-random input states.

    Returns (mean, standard_error, histogram) where the histogram is a list
    of (bin_left_edge, count) over [0, 1].
    """
    if n_states < 1:
        raise ValueError("n_states must be >= 1")
    fidelities = []
    for angles in sample_bloch_angles(n_states, seed):
        probs = unot_mode_probabilities(circuit, theta, angles.theta, angles.phi)
        success = probs[0] + probs[1]
        if success <= 0:
            raise core.PostSelectionStarvation("post-selection never succeeds")
        fidelities.append(float(probs[0] / success))
    fid = np.array(fidelities)
    mean = float(fid.mean())
    stderr = float(fid.std(ddof=1) / math.sqrt(n_states)) if n_states > 1 else 0.0
    counts, edges = np.histogram(fid, bins=bins, range=(0.0, 1.0))
    histogram = [(float(e), int(c)) for e, c in zip(edges[:-1], counts)]
    return mean, stderr, histogram

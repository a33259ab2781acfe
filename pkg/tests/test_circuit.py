"""Parametric circuits, the rectangular mesh, and serialization."""

import math

import numpy as np
import pytest

from photonshift import circuit as C
from helpers import random_unitary
from photonshift.optimize import bfgs_minimize


def unitarity_error(U):
    return np.abs(U.conj().T @ U - np.eye(U.shape[0])).max()


def test_phase_binding_resolution():
    b = C.PhaseBinding("theta", multiplier=-2, offset=0.5)
    assert b.resolve({"theta": 1.0}) == pytest.approx(-1.5)
    assert C.PhaseBinding.constant(0.7).resolve({}) == pytest.approx(0.7)
    with pytest.raises(KeyError):
        b.resolve({})
    with pytest.raises(ValueError):
        C.PhaseBinding("theta", multiplier=0)


def test_circuit_validation():
    with pytest.raises(ValueError):
        C.ParametricCircuit(2, [C.PhaseShifter(2, C.PhaseBinding.constant(0.0))])
    with pytest.raises(ValueError):
        C.ParametricCircuit(2, [C.PhaseShifter(0, C.PhaseBinding("missing"))])
    with pytest.raises(ValueError):
        C.BeamSplitter(1, 1)


def test_resolved_values_rejects_unknown():
    circ = C.build_clements_mesh(3)
    with pytest.raises(KeyError):
        circ.resolved_values({"nonsense": 1.0})


def test_balanced_splitter_block():
    U = C.element_matrix(C.BeamSplitter(0, 1), 2)
    c = 1 / math.sqrt(2)
    expected = np.array([[c, 1j * c], [1j * c, c]])
    assert np.allclose(U, expected)


def test_evaluate_unitary_order():
    """Later elements act on the left of the accumulated product."""
    circ = C.ParametricCircuit(
        2,
        [
            C.PhaseShifter(0, C.PhaseBinding.constant(0.3)),
            C.BeamSplitter(0, 1),
        ],
    )
    B = C.element_matrix(C.BeamSplitter(0, 1), 2)
    P = np.diag([np.exp(0.3j), 1.0])
    assert np.allclose(C.evaluate_unitary(circ), B @ P)


def test_mesh_is_unitary_and_covers_all_cells():
    for m in (2, 3, 4, 5):
        circ = C.build_clements_mesh(m)
        assert len([e for e in circ.elements if isinstance(e, C.BeamSplitter)]) \
            == m * (m - 1)
        assert len(circ.parameters) == m * (m - 1)  # phi + theta per cell
        rng = np.random.default_rng(m)
        values = {k: rng.uniform(0, 2 * np.pi) for k in circ.parameters}
        U = C.evaluate_unitary(circ, values)
        assert unitarity_error(U) < 1e-12


def test_mesh_universality_fit():
    """A 4-mode mesh with variational output phases reaches a random target."""
    rng = np.random.default_rng(2024)
    target = random_unitary(4, rng)
    circ = C.build_clements_mesh(4, output_phases="variational")
    names = list(circ.parameters)

    def cost(x):
        U = C.evaluate_unitary(circ, dict(zip(names, x)))
        return float(np.abs(U - target).sum() ** 2)

    def grad(x):
        h = 1e-7
        g = np.empty(len(x))
        for i in range(len(x)):
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            g[i] = (cost(xp) - cost(xm)) / (2 * h)
        return g

    best = None
    for start in range(8):
        x0 = np.random.default_rng(start).uniform(0, 2 * np.pi, len(names))
        t = bfgs_minimize(cost, grad, x0, max_iter=400, grad_tol=1e-12)
        if best is None or t.f_final < best.f_final:
            best = t
        if best.f_final < 1e-16:
            break
    U = C.evaluate_unitary(circ, dict(zip(names, best.x_final)))
    overlap = np.abs(U.conj().T @ target)
    off_diag = overlap - np.diag(np.diag(overlap))
    assert np.abs(off_diag).max() <= 1e-6


def test_split_at_phase_reconstructs_unitary():
    circ = C.build_clements_mesh(3)
    rng = np.random.default_rng(8)
    values = {k: rng.uniform(0, 2 * np.pi) for k in circ.parameters}
    U = C.evaluate_unitary(circ, values)
    for index, el in enumerate(circ.elements):
        if not isinstance(el, C.PhaseShifter):
            continue
        U1, mode, U2 = C.split_at_phase(circ, index, values)
        phi = el.binding.resolve(values)
        P = np.eye(3, dtype=complex)
        P[mode, mode] = np.exp(1j * phi)
        assert np.allclose(U2 @ P @ U1, U, atol=1e-12)
    with pytest.raises(ValueError):
        C.split_at_phase(circ, 1, values)  # element 1 is a splitter


def test_parameter_phase_instances():
    circ = C.build_clements_mesh(3)
    inst = C.parameter_phase_instances(circ, "theta0")
    assert len(inst) == 1
    index, mult = inst[0]
    assert mult == 1
    assert isinstance(circ.elements[index], C.PhaseShifter)
    with pytest.raises(KeyError):
        C.parameter_phase_instances(circ, "nope")


def test_json_round_trip():
    circ = C.build_clements_mesh(3, output_phases="variational")
    text = C.circuit_to_json(circ)
    back = C.circuit_from_json(text)
    assert back.mode_count == circ.mode_count
    assert back.parameters == circ.parameters
    rng = np.random.default_rng(1)
    values = {k: rng.uniform(0, 2 * np.pi) for k in circ.parameters}
    assert np.allclose(
        C.evaluate_unitary(back, values), C.evaluate_unitary(circ, values))

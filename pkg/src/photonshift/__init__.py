"""Simulator for parameter-shift rules on linear-optical interferometers.

Modules:
  core        -- permanents, Fock transition probabilities, sampling
  circuit     -- parametric phase/splitter circuits and the rectangular mesh
  rules       -- degree analysis, shift derivatives, weighted-integral rules
  optimize    -- BFGS with strong-Wolfe line search
  variational -- molecular eigensolver and Universal-NOT problems
"""

from .core import (
    PhotonNumberMismatch,
    PostSelectionStarvation,
    distinguishable_probability,
    enumerate_outputs,
    mode_assignment,
    normalization_mu,
    output_distribution,
    permanent,
    sample_counts,
    scattering_matrix,
    transition_probability,
)
from .circuit import (
    BeamSplitter,
    ParametricCircuit,
    PhaseBinding,
    PhaseShifter,
    build_clements_mesh,
    circuit_from_json,
    circuit_to_json,
    evaluate_unitary,
)
from .rules import (
    DegreeReport,
    FourierSeries,
    IntegralRule,
    integral_rule,
    integrate,
    parameter_degree,
    phase_degree,
    reconstruct_fourier,
    shift_derivative,
    shift_rule_nodes,
)
from .optimize import OptimizerTrace, bfgs_minimize, gradient_descent
from .variational import (
    H2_HAMILTONIAN,
    PauliHamiltonian,
    build_unot_circuit,
    build_vqe_circuit,
    derive_seed,
    unot_cost,
    unot_fidelity_test,
    unot_gradient,
    vqe_energy,
    vqe_gradient,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "1.0.0"

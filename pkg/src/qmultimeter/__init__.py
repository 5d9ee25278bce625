"""Programmable quantum multimeters.

A signal qubit is measured in a basis chosen by the state of a program
register. This package builds the fidelity-optimal measuring maps in closed
form, re-derives them with a fixed-point optimiser and certifies them, and
simulates the swap-test circuit that realises the single-copy device.
"""
from .choimap import ChoiMatrix, apply, mean_fidelity, pointwise_fidelity
from .fidelity_operator import (
    FidelityOperator,
    build_r_analytic,
    build_r_montecarlo,
    build_r_quadrature,
    symmetric_projector,
)
from .information import InfoReport, info_from_fidelities
from .multimeter import (
    Povm,
    discrimination_fidelities,
    effective_povm,
    joint_povm_identical,
    joint_povm_orthogonal,
    mean_fidelity_formula,
)
from .solver import OptimalityCertificate, SolverConfig, certify, closed_form_chi, solve
from .states import BlochPoint, ProgramKind, bloch_state, multimeter_input, orthogonal_state

__version__ = "0.1.0"

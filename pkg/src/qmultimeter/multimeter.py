"""Joint and effective POVMs of the programmable multimeter.

Outcome 0 is the "parallel" result (the signal was ``|psi>``), outcome 1 the
"perpendicular" one.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .fidelity_operator import symmetric_projector
from .linalg import ket, min_eigenvalue, partial_trace, projector, tensor
from .states import ProgramKind, check_normalized, orthogonal_state, program_qubits

POVM_TOL = 1e-10
LABELS = ("parallel", "perp")


@dataclass(frozen=True)
class Povm:
    elements: tuple
    labels: tuple = LABELS

    def __post_init__(self):
        elements = tuple(np.array(e, dtype=complex) for e in self.elements)
        if not elements:
            raise ValueError("a POVM needs at least one element")
        shape = elements[0].shape
        if any(e.shape != shape for e in elements):
            raise ValueError("POVM elements must share one shape")
        if len(self.labels) != len(elements):
            raise ValueError("one label per POVM element is required")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def completeness_error(self) -> float:
        return float(np.max(np.abs(sum(self.elements) - np.eye(self.dim))))

    def min_eigenvalue(self) -> float:
        return min(min_eigenvalue(e) for e in self.elements)

    def is_valid(self, tol: float = POVM_TOL) -> bool:
        return self.completeness_error() <= tol and self.min_eigenvalue() >= -tol

    def probabilities(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.ndim == 1:
            rho = projector(rho)
        return np.array([np.trace(e @ rho).real for e in self.elements])


def joint_povm_identical(n: int) -> Povm:
    """Symmetric projector on signal + ``n`` program qubits and its complement."""
    if n < 1:
        raise ValueError("n must be >= 1")
    sym = symmetric_projector(n + 1)
    return Povm((sym, np.eye(2 ** (n + 1)) - sym))


def orthogonal_program_vectors() -> tuple[np.ndarray, np.ndarray]:
    """The two extra rank-one directions of the orthogonal-program POVM.

    Ordering is signal qubit then the two program qubits.
    """
    s3 = math.sqrt(3.0)
    norm = 1.0 / (2.0 * s3)
    phi1 = norm * ((s3 + 1) * ket("001") - (s3 - 1) * ket("010") - 2 * ket("100"))
    phi2 = norm * ((s3 + 1) * ket("110") - (s3 - 1) * ket("101") - 2 * ket("011"))
    check_normalized(phi1)
    check_normalized(phi2)
    return phi1, phi2


def joint_povm_orthogonal() -> Povm:
    phi1, phi2 = orthogonal_program_vectors()
    plus = 0.5 * symmetric_projector(3) + projector(phi1) + projector(phi2)
    return Povm((plus, np.eye(8) - plus))


def joint_povm(kind, n: int) -> Povm:
    kind = ProgramKind.parse(kind)
    if kind is ProgramKind.ORTHOGONAL:
        program_qubits(kind, n)
        return joint_povm_orthogonal()
    return joint_povm_identical(n)


def effective_povm(joint: Povm, program) -> Povm:
    """Measurement induced on the signal qubit when the program register holds ``program``."""
    program = np.asarray(program, dtype=complex).ravel()
    d_p = program.size
    if joint.dim != 2 * d_p:
        raise ValueError(f"joint POVM dim {joint.dim} != 2 x program dim {d_p}")
    sandwich = tensor(np.eye(2), projector(program))
    elements = [partial_trace(sandwich @ e, [2, d_p], keep=[0]) for e in joint.elements]
    return Povm(tuple(elements), joint.labels)


def expected_effective_povm(kind, n: int, psi) -> Povm:
    """Closed-form effective single-qubit POVM for program state built from ``psi``."""
    kind = ProgramKind.parse(kind)
    psi = check_normalized(psi)
    perp = orthogonal_state(psi)
    eye = np.eye(2, dtype=complex)
    if kind is ProgramKind.ORTHOGONAL:
        a, b = effective_orthogonal_coefficients()
        return Povm((a * eye + b * projector(psi), a * eye + b * projector(perp)))
    p = click_probability(n)
    return Povm((eye / (n + 1) + p * projector(psi), p * projector(perp)))


def click_probability(n: int) -> float:
    """Chance that the perpendicular outcome fires on input ``|psi_perp>``: ``n/(n+1)``."""
    return n / (n + 1)


def effective_orthogonal_coefficients() -> tuple[float, float]:
    """Identity weight ``(3 - sqrt3)/6`` and projector weight ``sqrt3/3``."""
    s3 = math.sqrt(3.0)
    return (3 - s3) / 6, s3 / 3


def discrimination_fidelities(povm: Povm, psi) -> tuple[float, float]:
    """``(<psi|E_par|psi>, <psi_perp|E_perp|psi_perp>)``."""
    if povm.dim != 2 or len(povm.elements) != 2:
        raise ValueError("expected a two-outcome single-qubit POVM")
    psi = check_normalized(psi)
    perp = orthogonal_state(psi)
    f_par = np.vdot(psi, povm.elements[0] @ psi).real
    f_perp = np.vdot(perp, povm.elements[1] @ perp).real
    return float(f_par), float(f_perp)


def mean_fidelity_formula(kind, n: int = 1) -> float:
    kind = ProgramKind.parse(kind)
    if kind is ProgramKind.ORTHOGONAL:
        return 0.5 * (1 + 1 / math.sqrt(3.0))
    if n < 1:
        raise ValueError("n must be >= 1")
    return (2 * n + 1) / (2 * n + 2)


# Best single-copy estimation fidelities for |psi>|psi_perp> and |psi>|psi>.
ESTIMATION_FIDELITY_ORTHOGONAL = 0.5 * (1 + 1 / math.sqrt(3.0))
ESTIMATION_FIDELITY_PARALLEL = 0.75


def povm_to_json(povm: Povm) -> str:
    doc = {
        "dim": povm.dim,
        "ordering": "big_endian",
        "labels": list(povm.labels),
        "elements": [
            [[float(z.real), float(z.imag)] for z in e.reshape(-1)] for e in povm.elements
        ],
    }
    return json.dumps(doc)


def povm_from_json(text: str) -> Povm:
    doc = json.loads(text)
    d = doc["dim"]
    elements = []
    for entries in doc["elements"]:
        arr = np.array(entries, dtype=float)
        elements.append((arr[:, 0] + 1j * arr[:, 1]).reshape(d, d))
    return Povm(tuple(elements), tuple(doc["labels"]))

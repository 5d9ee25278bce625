"""State-vector simulator for the Hadamard / Fredkin multimeter circuit.

Wire 0 is the ancilla (control), wire 1 the signal, wire 2 the program.
Ancilla outcome 0 is read as the "parallel" result.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .linalg import H
from .multimeter import Povm
from .states import bloch_states, check_normalized, sample_bloch_angles

ORDERING = "big_endian"


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple
    controls: tuple = ()
    matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        if kind == "H":
            if len(self.targets) != 1 or self.controls:
                raise ValueError("H acts on exactly one wire")
        elif kind == "FREDKIN":
            if len(self.controls) != 1 or len(self.targets) != 2:
                raise ValueError("Fredkin needs one control and two targets")
            wires = self.controls + self.targets
            if len(set(wires)) != 3:
                raise ValueError("Fredkin wires must be distinct")
        elif kind == "U":
            if len(self.targets) != 1 or self.controls:
                raise ValueError("U acts on exactly one wire")
            m = np.asarray(self.matrix, dtype=complex)
            if m.shape != (2, 2) or not np.allclose(m.conj().T @ m, np.eye(2), atol=1e-12):
                raise ValueError("U needs a 2x2 unitary matrix")
            object.__setattr__(self, "matrix", m)
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    @property
    def wires(self) -> tuple:
        return self.controls + self.targets


@dataclass(frozen=True)
class GateCircuit:
    num_qubits: int
    gates: tuple = ()

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be positive")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(not 0 <= w < self.num_qubits for w in g.wires):
                raise ValueError(f"gate {g.kind} touches a wire outside 0..{self.num_qubits - 1}")

    def to_json(self) -> str:
        records = []
        for g in self.gates:
            rec = {"gate": g.kind, "targets": list(g.targets)}
            if g.controls:
                rec["controls"] = list(g.controls)
            if g.matrix is not None:
                rec["matrix"] = [[[float(z.real), float(z.imag)] for z in row] for row in g.matrix]
            records.append(rec)
        return json.dumps({"num_qubits": self.num_qubits, "ordering": ORDERING, "gates": records})

    @classmethod
    def from_json(cls, text: str) -> "GateCircuit":
        doc = json.loads(text)
        if doc.get("ordering", ORDERING) != ORDERING:
            raise ValueError(f"unsupported qubit ordering {doc['ordering']!r}")
        gates = []
        for rec in doc["gates"]:
            matrix = None
            if "matrix" in rec:
                arr = np.array(rec["matrix"], dtype=float)
                matrix = arr[..., 0] + 1j * arr[..., 1]
            gates.append(Gate(rec["gate"], rec["targets"], rec.get("controls", ()), matrix))
        return cls(int(doc["num_qubits"]), tuple(gates))


def fig1_circuit() -> GateCircuit:
    """Ancilla Hadamard, controlled swap of signal and program, ancilla Hadamard."""
    return GateCircuit(3, (Gate("H", (0,)), Gate("FREDKIN", (1, 2), (0,)), Gate("H", (0,))))


def _apply_1q(t: np.ndarray, u: np.ndarray, wire: int) -> np.ndarray:
    # axis 0 is the batch axis
    t = np.tensordot(u, t, axes=([1], [wire + 1]))
    return np.moveaxis(t, 0, wire + 1)


def _apply_fredkin(t: np.ndarray, control: int, a: int, b: int) -> np.ndarray:
    t = t.copy()
    sel = [slice(None)] * t.ndim
    sel[control + 1] = 1
    sub = t[tuple(sel)]
    # dropping the control axis shifts later wire axes down by one
    ax_a = a + 1 - (a > control)
    ax_b = b + 1 - (b > control)
    t[tuple(sel)] = np.swapaxes(sub, ax_a, ax_b)
    return t


def run_batch(circuit: GateCircuit, states) -> np.ndarray:
    """Evolve a batch of states, shape ``(batch, 2**num_qubits)``."""
    states = np.asarray(states, dtype=complex)
    n = circuit.num_qubits
    if states.ndim != 2 or states.shape[1] != 2**n:
        raise ValueError(f"states shape {states.shape} does not match {n} qubits")
    t = states.reshape((states.shape[0],) + (2,) * n)
    for g in circuit.gates:
        if g.kind == "H":
            t = _apply_1q(t, H, g.targets[0])
        elif g.kind == "U":
            t = _apply_1q(t, g.matrix, g.targets[0])
        else:
            t = _apply_fredkin(t, g.controls[0], *g.targets)
    return t.reshape(states.shape)


def run(circuit: GateCircuit, state) -> np.ndarray:
    state = np.asarray(state, dtype=complex).ravel()
    if state.size != 2**circuit.num_qubits:
        raise ValueError(f"state of length {state.size} does not fit {circuit.num_qubits} qubits")
    return run_batch(circuit, state[None, :])[0]


def swap_test_outcome_probs(signal, program) -> tuple[float, float]:
    """Exact ancilla outcome probabilities of the circuit on ``|0>|signal>|program>``."""
    signal = check_normalized(signal)
    program = check_normalized(program)
    if signal.size != 2 or program.size != 2:
        raise ValueError("signal and program must be single qubits")
    state = np.kron(np.array([1, 0], dtype=complex), np.kron(signal, program))
    out = run(fig1_circuit(), state)
    p0 = float(np.sum(np.abs(out[:4]) ** 2))
    return p0, 1.0 - p0


def swap_test_p0_many(signals, programs) -> np.ndarray:
    """Batched ancilla-0 probabilities through the compiled kernel when available."""
    return kernels.swap_test_p0_batch(
        np.ascontiguousarray(signals, dtype=complex), np.ascontiguousarray(programs, dtype=complex)
    )


def pointwise_circuit_fidelity(psis) -> np.ndarray:
    """``F(psi)`` of the circuit with program ``psi``, for each row of ``psis``."""
    psis = np.asarray(psis, dtype=complex)
    perps = np.stack([-psis[:, 1].conj(), psis[:, 0].conj()], axis=1)
    p0_par = swap_test_p0_many(psis, psis)
    p0_perp = swap_test_p0_many(perps, psis)
    return 0.5 * p0_par + 0.5 * (1.0 - p0_perp)


def circuit_mean_fidelity(samples: int, seed: int) -> float:
    psis = bloch_states(*sample_bloch_angles(seed, samples))
    return float(np.mean(pointwise_circuit_fidelity(psis)))


def sample_outcomes(p0: float, shots: int, seed: int) -> int:
    """Number of ancilla-0 outcomes in ``shots`` seeded measurements."""
    rng = np.random.default_rng(seed)
    return int(rng.binomial(shots, min(max(p0, 0.0), 1.0)))


def _pauli_basis():
    return [
        np.eye(2, dtype=complex),
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]], dtype=complex),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]


def default_probes() -> list[np.ndarray]:
    s = 1 / np.sqrt(2)
    return [
        np.array([1, 0], dtype=complex),
        np.array([0, 1], dtype=complex),
        np.array([s, s], dtype=complex),
        np.array([s, 1j * s], dtype=complex),
    ]


def tomographic_povm(procedure, probe_states=None, cond_limit: float = 1e10) -> Povm:
    """Least-squares reconstruction of a two-outcome qubit POVM.

    ``procedure(state) -> p0`` reports the outcome-0 probability on a probe.
    The outcome-0 element is expanded in the Pauli basis and fitted to the
    Born rule on every probe; outcome 1 is its complement.
    """
    probes = default_probes() if probe_states is None else [check_normalized(p) for p in probe_states]
    if len(probes) < 4:
        raise ValueError("need at least 4 probe states")
    basis = _pauli_basis()
    a = np.array([[np.vdot(p, b @ p).real for b in basis] for p in probes])
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[-1] <= sv[0] / cond_limit:
        raise ValueError("probe states are not informationally complete")
    p0 = np.array([float(procedure(p)) for p in probes])
    coeffs, *_ = np.linalg.lstsq(a, p0, rcond=None)
    e0 = sum(c * b for c, b in zip(coeffs, basis))
    e0 = 0.5 * (e0 + e0.conj().T)
    return Povm((e0, np.eye(2) - e0))


def circuit_effective_povm(program) -> Povm:
    """Effective signal-qubit POVM of the circuit for a fixed program state."""
    program = check_normalized(program)
    return tomographic_povm(lambda s: swap_test_outcome_probs(s, program)[0])


import numpy as np
import pytest

from qmultimeter.circuit import (
    Gate,
    GateCircuit,
    circuit_effective_povm,
    circuit_mean_fidelity,
    fig1_circuit,
    pointwise_circuit_fidelity,
    run,
    run_batch,
    sample_outcomes,
    swap_test_outcome_probs,
    swap_test_p0_many,
    tomographic_povm,
)
from qmultimeter.linalg import H, ket
from qmultimeter.multimeter import expected_effective_povm
from qmultimeter.states import orthogonal_state

from conftest import haar_qubit


def test_empty_circuit_is_identity(rng):
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    assert np.array_equal(run(GateCircuit(3), v), v.astype(complex))


def test_hadamard_on_each_wire():
    for w in range(3):
        out = run(GateCircuit(3, [Gate("H", (w,))]), ket("000"))
        bits = ["000"[:w] + "1" + "000"[w + 1 :]]
        expect = (ket("000") + ket(bits[0])) / np.sqrt(2)
        assert np.max(np.abs(out - expect)) <= 1e-15


def test_fredkin_truth_table():
    g = GateCircuit(3, [Gate("FREDKIN", (1, 2), (0,))])
    for i in range(8):
        bits = format(i, "03b")
        want = bits if bits[0] == "0" else bits[0] + bits[2] + bits[1]
        assert np.array_equal(run(g, ket(bits)), ket(want))


def test_fredkin_control_on_last_wire():
    g = GateCircuit(3, [Gate("FREDKIN", (0, 1), (2,))])
    assert np.array_equal(run(g, ket("101")), ket("011"))
    assert np.array_equal(run(g, ket("100")), ket("100"))


def test_circuit_matches_dense_unitary():
    swap = np.zeros((8, 8))
    for i in range(8):
        b = format(i, "03b")
        j = int(b if b[0] == "0" else b[0] + b[2] + b[1], 2)
        swap[j, i] = 1
    h0 = np.kron(H, np.eye(4))
    u = h0 @ swap @ h0
    states = np.eye(8, dtype=complex)
    assert np.max(np.abs(run_batch(fig1_circuit(), states) - u.T)) <= 1e-15


def test_swap_test_limits(rng):
    psi = haar_qubit(rng)
    p0, p1 = swap_test_outcome_probs(psi, psi)
    assert abs(p0 - 1) <= 1e-12 and abs(p1) <= 1e-12
    p0, _ = swap_test_outcome_probs(orthogonal_state(psi), psi)
    assert abs(p0 - 0.5) <= 1e-12


def test_swap_test_matches_born_rule(rng):
    for _ in range(100):
        s, p = haar_qubit(rng), haar_qubit(rng)
        p0, _ = swap_test_outcome_probs(s, p)
        e_par = expected_effective_povm("identical", 1, p).elements[0]
        assert abs(p0 - np.vdot(s, e_par @ s).real) <= 1e-12
        assert abs(p0 - 0.5 * (1 + abs(np.vdot(s, p)) ** 2)) <= 1e-12


def test_batched_p0_matches_single(rng):
    sig = np.array([haar_qubit(rng) for _ in range(20)])
    prog = np.array([haar_qubit(rng) for _ in range(20)])
    many = swap_test_p0_many(sig, prog)
    single = [swap_test_outcome_probs(s, p)[0] for s, p in zip(sig, prog)]
    assert np.max(np.abs(many - single)) <= 1e-13


def test_norm_preserved_random_circuits(rng):
    for _ in range(20):
        gates = []
        for _ in range(rng.integers(1, 51)):
            if rng.random() < 0.5:
                gates.append(Gate("H", (int(rng.integers(3)),)))
            else:
                w = [int(x) for x in rng.permutation(3)]
                gates.append(Gate("FREDKIN", (w[1], w[2]), (w[0],)))
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        v /= np.linalg.norm(v)
        assert abs(np.linalg.norm(run(GateCircuit(3, gates), v)) - 1) <= 1e-12


def test_unitary_gate():
    circ = GateCircuit(1, [Gate("U", (0,), matrix=np.array([[0, 1], [1, 0]]))])
    assert np.array_equal(run(circ, ket("0")), ket("1"))


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("H", (0, 1))
    with pytest.raises(ValueError):
        Gate("FREDKIN", (1, 1), (0,))
    with pytest.raises(ValueError):
        Gate("U", (0,), matrix=np.ones((2, 2)))
    with pytest.raises(ValueError):
        Gate("CNOT", (0,))
    with pytest.raises(ValueError):
        GateCircuit(2, [Gate("H", (2,))])
    with pytest.raises(ValueError):
        run(fig1_circuit(), np.ones(4))


def test_circuit_json_round_trip():
    u = np.array([[1, 1j], [1j, 1]]) / np.sqrt(2)
    circ = GateCircuit(3, list(fig1_circuit().gates) + [Gate("U", (2,), matrix=u)])
    back = GateCircuit.from_json(circ.to_json())
    assert back.num_qubits == 3 and back.gates == circ.gates
    assert np.allclose(back.gates[-1].matrix, u)
    v = np.arange(8) / np.linalg.norm(np.arange(8))
    assert np.allclose(run(back, v), run(circ, v))


def test_tomography_basis_program():
    povm = circuit_effective_povm(ket("0"))
    assert np.max(np.abs(povm.elements[0] - np.diag([1, 0.5]))) <= 1e-12
    assert povm.completeness_error() <= 1e-15


def test_tomography_random_program(rng):
    psi = haar_qubit(rng)
    got = circuit_effective_povm(psi)
    want = expected_effective_povm("identical", 1, psi)
    for a, b in zip(got.elements, want.elements):
        assert np.max(np.abs(a - b)) <= 1e-12


def test_tomography_trivial_procedure():
    povm = tomographic_povm(lambda s: 1.0)
    assert np.max(np.abs(povm.elements[0] - np.eye(2))) <= 1e-12


def test_tomography_rejects_incomplete_probes():
    probes = [ket("0"), ket("1"), ket("0"), ket("1")]
    with pytest.raises(ValueError):
        tomographic_povm(lambda s: 0.5, probes)
    with pytest.raises(ValueError):
        tomographic_povm(lambda s: 0.5, [ket("0")])


def test_pointwise_and_mean_fidelity(rng):
    psis = np.array([haar_qubit(rng) for _ in range(50)])
    assert np.max(np.abs(pointwise_circuit_fidelity(psis) - 0.75)) <= 1e-12
    assert abs(circuit_mean_fidelity(100_000, seed=3) - 0.75) <= 3e-3


def test_sample_outcomes():
    assert sample_outcomes(1.0, 100, 0) == 100
    assert sample_outcomes(0.0, 100, 0) == 0
    assert sample_outcomes(0.3, 1000, 5) == sample_outcomes(0.3, 1000, 5)
    k = sample_outcomes(0.75, 100_000, 1)
    sigma = np.sqrt(100_000 * 0.75 * 0.25)
    assert abs(k - 75_000) <= 5 * sigma

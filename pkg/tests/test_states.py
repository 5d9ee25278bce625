import math

import numpy as np
import pytest

from qmultimeter.fidelity_operator import symmetric_projector
from qmultimeter.kernels import accumulate_product_outer
from qmultimeter.linalg import ket
from qmultimeter.states import (
    BlochPoint,
    ProgramKind,
    bloch_state,
    multimeter_input,
    orthogonal_state,
    sample_bloch_angles,
    sample_bloch_uniform,
)

from conftest import haar_qubit


def test_north_pole():
    assert np.allclose(bloch_state(BlochPoint(0.0, 1.3)), ket("0"), atol=1e-15)


def test_south_pole():
    psi = bloch_state(BlochPoint(math.pi, 0.7))
    assert abs(abs(np.vdot(ket("1"), psi)) - 1) <= 1e-12


def test_equator():
    psi = bloch_state(BlochPoint(math.pi / 2, 0.0))
    assert np.allclose(psi, (ket("0") + ket("1")) / math.sqrt(2), atol=1e-15)


def test_bloch_state_normalized():
    for t, p in [(0.3, 0.1), (2.0, 6.0), (math.pi, 0.0)]:
        assert abs(np.linalg.norm(bloch_state(BlochPoint(t, p))) - 1) <= 1e-12


@pytest.mark.parametrize("theta,phi", [(-0.1, 0.0), (3.2, 0.0), (1.0, 2 * math.pi), (1.0, -0.5)])
def test_bloch_point_range(theta, phi):
    with pytest.raises(ValueError):
        BlochPoint(theta, phi)


def test_orthogonal_state(rng):
    assert abs(abs(np.vdot(ket("1"), orthogonal_state(ket("0")))) - 1) <= 1e-12
    plus = (ket("0") + ket("1")) / math.sqrt(2)
    assert abs(np.vdot(orthogonal_state(plus), plus)) <= 1e-12
    for _ in range(20):
        psi = haar_qubit(rng)
        perp = orthogonal_state(psi)
        assert abs(np.vdot(perp, psi)) <= 1e-12
        assert abs(abs(np.vdot(orthogonal_state(perp), psi)) - 1) <= 1e-12


def test_orthogonal_state_convention():
    a, b = 0.6, 0.8j
    assert np.allclose(orthogonal_state([a, b]), [-np.conj(b), np.conj(a)])


def test_multimeter_input_identical():
    big, big_perp = multimeter_input(ket("0"), ProgramKind.IDENTICAL, 1)
    assert np.array_equal(big, ket("00"))
    assert np.array_equal(big_perp, ket("10"))


def test_multimeter_input_orthogonal():
    big, big_perp = multimeter_input(ket("0"), ProgramKind.ORTHOGONAL, 2)
    assert np.array_equal(big, ket("001"))
    assert np.array_equal(big_perp, ket("101"))


@pytest.mark.parametrize("kind,n", [("identical", 1), ("identical", 3), ("orthogonal", 2)])
def test_multimeter_input_orthogonal_signals(rng, kind, n):
    for _ in range(10):
        big, big_perp = multimeter_input(haar_qubit(rng), kind, n)
        assert abs(np.vdot(big, big_perp)) <= 1e-12
        assert abs(np.linalg.norm(big) - 1) <= 1e-12
        assert big.size == 2 ** (n + 1)


def test_orthogonal_kind_requires_two_qubits():
    with pytest.raises(ValueError):
        multimeter_input(ket("0"), ProgramKind.ORTHOGONAL, 3)


def test_sampling_deterministic():
    a = sample_bloch_angles(5, 1000)
    b = sample_bloch_angles(5, 1000)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert sample_bloch_uniform(9, 3) == sample_bloch_uniform(9, 3)
    assert not np.array_equal(sample_bloch_angles(6, 1000)[0], a[0])


def test_sampling_ranges():
    theta, phi = sample_bloch_angles(1, 10_000)
    assert theta.min() >= 0 and theta.max() <= math.pi
    assert phi.min() >= 0 and phi.max() < 2 * math.pi
    with pytest.raises(ValueError):
        sample_bloch_angles(1, 0)


def test_sampling_moments():
    # law of large numbers: <cos theta> = 0, <|<0|psi>|^2> = 1/2
    theta, _ = sample_bloch_angles(123, 1_000_000)
    assert abs(np.mean(np.cos(theta))) <= 0.005
    assert abs(np.mean(np.cos(theta / 2) ** 2) - 0.5) <= 0.002


@pytest.mark.parametrize("m", [1, 2, 3])
def test_average_tensor_power_is_symmetric_projector(m):
    theta, phi = sample_bloch_angles(77, 100_000)
    avg = accumulate_product_outer(theta, phi, np.zeros(m, np.uint8)) / theta.size
    tol = 5e-3 if m == 1 else 1e-2
    assert np.max(np.abs(avg - symmetric_projector(m) / (m + 1))) <= tol

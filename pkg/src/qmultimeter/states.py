"""Bloch-sphere states, multimeter input states and uniform sampling."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .linalg import tensor

NORM_TOL = 1e-12


class ProgramKind(enum.Enum):
    """Which program register accompanies the signal qubit.

    ``IDENTICAL`` uses ``n`` copies of ``|psi>``; ``ORTHOGONAL`` uses the
    two-qubit program ``|psi>|psi_perp>``.
    """

    IDENTICAL = "identical"
    ORTHOGONAL = "orthogonal"

    @classmethod
    def parse(cls, value) -> "ProgramKind":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


def program_qubits(kind: ProgramKind, n: int) -> int:
    kind = ProgramKind.parse(kind)
    if kind is ProgramKind.ORTHOGONAL:
        if n != 2:
            raise ValueError(f"orthogonal program always has 2 qubits, got n={n}")
        return 2
    if n < 1:
        raise ValueError(f"identical program needs n >= 1, got {n}")
    return int(n)


@dataclass(frozen=True)
class BlochPoint:
    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        if not (0.0 <= self.phi < 2 * math.pi):
            raise ValueError(f"phi={self.phi} outside [0, 2pi)")


def bloch_state(p: BlochPoint) -> np.ndarray:
    """``cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>``."""
    if not isinstance(p, BlochPoint):
        p = BlochPoint(*p)
    return np.array(
        [math.cos(p.theta / 2), np.exp(1j * p.phi) * math.sin(p.theta / 2)], dtype=complex
    )


def bloch_states(theta, phi) -> np.ndarray:
    """Vectorised ``bloch_state``; returns shape ``(len(theta), 2)``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    out = np.empty(theta.shape + (2,), dtype=complex)
    out[..., 0] = np.cos(theta / 2)
    out[..., 1] = np.exp(1j * phi) * np.sin(theta / 2)
    return out


def check_normalized(psi, tol: float = NORM_TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    n = psi.size.bit_length() - 1
    if psi.size != 2**n:
        raise ValueError(f"state length {psi.size} is not a power of two")
    err = abs(np.vdot(psi, psi).real - 1.0)
    if err > tol:
        raise ValueError(f"state is not normalized (|norm^2 - 1| = {err:.3e})")
    return psi


def orthogonal_state(psi) -> np.ndarray:
    """``(-b*, a*)`` for ``psi = (a, b)``."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.size != 2:
        raise ValueError("orthogonal_state is defined for a single qubit")
    return np.array([-psi[1].conj(), psi[0].conj()])


def program_state(psi, kind: ProgramKind, n: int) -> np.ndarray:
    kind = ProgramKind.parse(kind)
    m = program_qubits(kind, n)
    psi = check_normalized(psi)
    if kind is ProgramKind.ORTHOGONAL:
        return tensor(psi, orthogonal_state(psi))
    return tensor(*([psi] * m))


def multimeter_input(psi, kind: ProgramKind, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(|Psi>, |Psi_perp>)``: signal ``psi`` or ``psi_perp``, then the program."""
    prog = program_state(psi, kind, n)
    psi = np.asarray(psi, dtype=complex).ravel()
    return tensor(psi, prog), tensor(orthogonal_state(psi), prog)


def sample_bloch_angles(rng_seed: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform points on the sphere as ``(theta, phi)`` arrays.

    ``cos(theta)`` is uniform on [-1, 1] and ``phi`` uniform on [0, 2pi).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(rng_seed)
    u = rng.random(count)
    v = rng.random(count)
    cos_t = 1.0 - 2.0 * u
    theta = np.arccos(np.clip(cos_t, -1.0, 1.0))
    phi = 2 * np.pi * v
    phi[phi >= 2 * np.pi] = 0.0
    return theta, phi


def sample_bloch_uniform(rng_seed: int, count: int) -> list[BlochPoint]:
    theta, phi = sample_bloch_angles(rng_seed, count)
    return [BlochPoint(float(t), float(p)) for t, p in zip(theta, phi)]


def product_states(theta, phi, pattern) -> np.ndarray:
    """Rows ``q_1 (x) ... (x) q_m`` with ``q_k = psi`` or ``psi_perp`` per ``pattern``.

    ``pattern[k]`` is 0 for ``psi`` and 1 for ``psi_perp``; shape ``(count, 2**m)``.
    """
    psi = bloch_states(np.atleast_1d(theta), np.atleast_1d(phi))
    perp = np.stack([-psi[:, 1].conj(), psi[:, 0].conj()], axis=1)
    v = np.ones((psi.shape[0], 1), dtype=complex)
    for bit in pattern:
        q = perp if bit else psi
        v = (v[:, :, None] * q[:, None, :]).reshape(psi.shape[0], -1)
    return v


def random_qubits(rng_seed: int, count: int) -> np.ndarray:
    """``count`` Haar-random single-qubit states, shape ``(count, 2)``."""
    return bloch_states(*sample_bloch_angles(rng_seed, count))

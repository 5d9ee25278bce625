"""The figure-of-merit operator R whose overlap with a Choi matrix is the mean fidelity.

``R = R_plus (x) |0><0| + R_minus (x) |1><1|`` on input (x) output, with
``R_plus^T = 1/2 <|Psi><Psi|>`` and ``R_minus^T = 1/2 <|Psi_perp><Psi_perp|>``
averaged over the Bloch sphere. Three constructions are provided: closed
form, deterministic product-grid quadrature and seeded Monte Carlo.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .linalg import (
    hermitize,
    projector,
    qubit_permutation_operator,
    tensor,
    transpose_in_basis,
)
from .states import ProgramKind, product_states, program_qubits, sample_bloch_angles

P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)


@dataclass(frozen=True)
class FidelityOperator:
    program_kind: ProgramKind
    n_program: int
    r_plus: np.ndarray
    r_minus: np.ndarray
    r_total: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.r_plus.shape != self.r_minus.shape:
            raise ValueError("r_plus and r_minus must have the same shape")
        object.__setattr__(self, "r_total", tensor(self.r_plus, P0) + tensor(self.r_minus, P1))

    @property
    def dim_in(self) -> int:
        return self.r_plus.shape[0]

    @property
    def dim_out(self) -> int:
        return 2


@lru_cache(maxsize=None)
def _symmetric_projector(m: int) -> np.ndarray:
    dim = 2**m
    acc = np.zeros((dim, dim), dtype=complex)
    perms = list(itertools.permutations(range(m)))
    for perm in perms:
        acc += qubit_permutation_operator(perm)
    acc /= len(perms)
    acc.setflags(write=False)
    return acc


def symmetric_projector(m: int) -> np.ndarray:
    """Projector onto the permutation-symmetric subspace of ``m`` qubits.

    Built as the average of all ``m!`` qubit-permutation operators.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if m == 0:
        return np.ones((1, 1), dtype=complex)
    return _symmetric_projector(int(m)).copy()


def embed_on_wires(op: np.ndarray, wires, m: int) -> np.ndarray:
    """Place ``op`` (acting on ``len(wires)`` qubits) on the given wires of ``m`` qubits."""
    wires = list(wires)
    rest = [w for w in range(m) if w not in wires]
    full = tensor(op, np.eye(2 ** len(rest), dtype=complex)) if rest else np.asarray(op, complex)
    u = qubit_permutation_operator(wires + rest)
    return u @ full @ u.conj().T


def twirl_average(pattern) -> np.ndarray:
    """Exact Bloch average of ``q_1 (x) ... (x) q_m`` projectors.

    ``pattern[k]`` picks ``|psi><psi|`` (0) or ``|psi_perp><psi_perp|`` (1).
    Uses ``|psi_perp><psi_perp| = 1 - |psi><psi|``, expands the product and
    applies ``<(|psi><psi|)^{(x)j}> = Pi_sym(j) / (j + 1)`` to every term.
    """
    pattern = [int(b) for b in pattern]
    m = len(pattern)
    psi_wires = [k for k, b in enumerate(pattern) if b == 0]
    perp_wires = [k for k, b in enumerate(pattern) if b == 1]
    acc = np.zeros((2**m, 2**m), dtype=complex)
    for r in range(len(perp_wires) + 1):
        for chosen in itertools.combinations(perp_wires, r):
            wires = sorted(psi_wires + list(chosen))
            j = len(wires)
            if j == 0:
                term = np.eye(2**m, dtype=complex)
            else:
                term = embed_on_wires(symmetric_projector(j), wires, m) / (j + 1)
            acc += (-1) ** r * term
    return acc


def input_patterns(kind: ProgramKind, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Qubit patterns of ``|Psi>`` and ``|Psi_perp>`` (signal first)."""
    kind = ProgramKind.parse(kind)
    m = program_qubits(kind, n)
    if kind is ProgramKind.ORTHOGONAL:
        return (0, 0, 1), (1, 0, 1)
    return (0,) * (m + 1), (1,) + (0,) * m


def input_support(kind: ProgramKind, n: int) -> np.ndarray:
    """Projector onto the span of all possible multimeter inputs.

    For ``n`` identical program copies this is ``1_s (x) Pi_sym(n)``, i.e. the
    identity of the physical input space embedded in the full qubit space.
    """
    kind = ProgramKind.parse(kind)
    m = program_qubits(kind, n)
    if kind is ProgramKind.ORTHOGONAL:
        return np.eye(2 ** (m + 1), dtype=complex)
    return tensor(np.eye(2, dtype=complex), symmetric_projector(m))


def build_r_analytic(kind: ProgramKind, n: int) -> FidelityOperator:
    kind = ProgramKind.parse(kind)
    m = program_qubits(kind, n)
    if kind is ProgramKind.IDENTICAL:
        sym = symmetric_projector(m + 1)
        r_plus = sym / (2 * (m + 2))
        r_minus = input_support(kind, m) / (2 * (m + 1)) - sym / (2 * (m + 2))
    else:
        pat_plus, pat_minus = input_patterns(kind, m)
        r_plus = transpose_in_basis(0.5 * twirl_average(pat_plus))
        r_minus = transpose_in_basis(0.5 * twirl_average(pat_minus))
    return FidelityOperator(kind, m, hermitize(r_plus), hermitize(r_minus))


def _from_averages(kind, m, avg_plus, avg_minus) -> FidelityOperator:
    r_plus = hermitize(transpose_in_basis(0.5 * avg_plus))
    r_minus = hermitize(transpose_in_basis(0.5 * avg_minus))
    return FidelityOperator(kind, m, r_plus, r_minus)


def build_r_montecarlo(
    kind: ProgramKind, n: int, samples: int = 100_000, seed: int = 42, points=None
) -> FidelityOperator:
    """Monte-Carlo estimate of R from uniform Bloch samples.

    ``points`` may supply explicit ``(theta, phi)`` arrays in place of sampling.
    """
    kind = ProgramKind.parse(kind)
    m = program_qubits(kind, n)
    if points is None:
        if samples < 1:
            raise ValueError("samples must be >= 1")
        theta, phi = sample_bloch_angles(seed, samples)
    else:
        theta, phi = (np.atleast_1d(np.asarray(x, dtype=float)) for x in points)
    theta = np.ascontiguousarray(theta)
    phi = np.ascontiguousarray(phi)
    pat_plus, pat_minus = input_patterns(kind, m)
    count = theta.size
    avg_plus = kernels.accumulate_product_outer(theta, phi, np.array(pat_plus, np.uint8)) / count
    avg_minus = kernels.accumulate_product_outer(theta, phi, np.array(pat_minus, np.uint8)) / count
    return _from_averages(kind, m, avg_plus, avg_minus)


def _grid_average(pattern, order: int) -> np.ndarray:
    # Gauss-Legendre in cos(theta) x equispaced phi; exact for low-degree integrands
    x, w = np.polynomial.legendre.leggauss(order)
    theta = np.arccos(x)
    n_phi = 2 * order + 1
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    weights = np.repeat(w / 2.0, n_phi) / n_phi
    v = product_states(tt.ravel(), pp.ravel(), pattern)
    return v.T @ (weights[:, None] * v.conj())


def build_r_quadrature(
    kind: ProgramKind, n: int, tol: float = 1e-10, max_order: int = 64
) -> FidelityOperator:
    """R from product-grid quadrature, refined until successive grids agree within ``tol``."""
    kind = ProgramKind.parse(kind)
    m = program_qubits(kind, n)
    pat_plus, pat_minus = input_patterns(kind, m)
    order = 2
    prev = None
    while True:
        cur = (_grid_average(pat_plus, order), _grid_average(pat_minus, order))
        if prev is not None:
            diff = max(np.max(np.abs(a - b)) for a, b in zip(cur, prev))
            if diff < tol:
                return _from_averages(kind, m, *cur)
        if order >= max_order:
            raise RuntimeError(f"quadrature did not converge to {tol} by order {max_order}")
        prev = cur
        order += 1


def rank_one_r(kind: ProgramKind, n: int, psi) -> FidelityOperator:
    """R restricted to a single state ``psi``: the integrand of the average at one point."""
    from .states import multimeter_input

    kind = ProgramKind.parse(kind)
    m = program_qubits(kind, n)
    big, big_perp = multimeter_input(psi, kind, m)
    return _from_averages(kind, m, projector(big), projector(big_perp))


"""Choi matrices of trace-preserving CP maps.

The Choi matrix lives on input (x) output and uses the unnormalised maximally
entangled state, so a map ``E`` acts as
``E(rho) = Tr_in[chi (rho^T (x) 1_out)]`` and trace preservation reads
``Tr_out chi = 1_in``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .fidelity_operator import FidelityOperator, input_patterns, rank_one_r
from .linalg import (
    hermiticity_error,
    hermitize,
    min_eigenvalue,
    partial_trace,
    tensor,
    trace_out_last,
    transpose_in_basis,
)
from .states import product_states

PSD_TOL = 1e-9
ORDERING = "in_out"


class ChoiError(ValueError):
    """Raised when a matrix violates the CP or TP constraint."""


@dataclass(frozen=True)
class ChoiMatrix:
    dim_in: int
    dim_out: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = self.dim_in * self.dim_out
        if m.shape != (d, d):
            raise ChoiError(f"matrix shape {m.shape} != ({d}, {d})")
        if not np.all(np.isfinite(m)):
            raise ChoiError("Choi matrix has non-finite entries")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def validated(cls, dim_in: int, dim_out: int, matrix, tol: float = PSD_TOL) -> "ChoiMatrix":
        chi = cls(dim_in, dim_out, matrix)
        chi.check(tol)
        return chi

    def check(self, tol: float = PSD_TOL) -> None:
        herm = hermiticity_error(self.matrix)
        if herm > tol:
            raise ChoiError(f"Choi matrix not Hermitian ({herm:.3e})")
        lo = self.min_eigenvalue()
        if lo < -tol:
            raise ChoiError(f"Choi matrix not positive semidefinite (min eig {lo:.3e})")
        tp = self.tp_error()
        if tp > tol:
            raise ChoiError(f"Choi matrix not trace preserving (|Tr_out chi - 1| = {tp:.3e})")

    def is_valid(self, tol: float = PSD_TOL) -> bool:
        try:
            self.check(tol)
        except ChoiError:
            return False
        return True

    def min_eigenvalue(self) -> float:
        return min_eigenvalue(self.matrix)

    def trace_out_output(self) -> np.ndarray:
        return trace_out_last(self.matrix, self.dim_out)

    def tp_error(self) -> float:
        return float(np.max(np.abs(self.trace_out_output() - np.eye(self.dim_in))))

    def output_block(self, k: int) -> np.ndarray:
        """``<k|_out chi |k>_out`` as an operator on the input space."""
        t = self.matrix.reshape(self.dim_in, self.dim_out, self.dim_in, self.dim_out)
        return t[:, k, :, k].copy()


def identity_channel(dim: int) -> ChoiMatrix:
    v = np.eye(dim, dtype=complex).reshape(-1)
    return ChoiMatrix(dim, dim, np.outer(v, v))


def depolarizing_channel(dim_in: int, dim_out: int) -> ChoiMatrix:
    return ChoiMatrix(dim_in, dim_out, np.eye(dim_in * dim_out, dtype=complex) / dim_out)


def measure_and_prepare(povm_elements) -> ChoiMatrix:
    """Map ``rho -> sum_k Tr[E_k rho] |k><k|``; Choi matrix ``sum_k E_k^T (x) |k><k|``."""
    elements = [np.asarray(e, dtype=complex) for e in povm_elements]
    d_out = len(elements)
    d_in = elements[0].shape[0]
    chi = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for k, e in enumerate(elements):
        ket_k = np.zeros((d_out, d_out), dtype=complex)
        ket_k[k, k] = 1.0
        chi += tensor(transpose_in_basis(e), ket_k)
    return ChoiMatrix(d_in, d_out, chi)


def povm_elements_from_choi(chi: ChoiMatrix) -> list[np.ndarray]:
    """Effective measurement of the map followed by a computational-basis readout."""
    return [transpose_in_basis(chi.output_block(k)) for k in range(chi.dim_out)]


def random_choi(dim_in: int, dim_out: int, rng: np.random.Generator, rank: int | None = None) -> ChoiMatrix:
    """Random TP CP map: a random PSD matrix normalised by ``(Tr_out W)^{-1/2}``."""
    d = dim_in * dim_out
    rank = d if rank is None else rank
    if rank * dim_out < dim_in:
        raise ValueError("rank too small for a trace-preserving map")
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    w = g @ g.conj().T
    t = trace_out_last(w, dim_out)
    vals, vecs = np.linalg.eigh(hermitize(t))
    s = (vecs / np.sqrt(vals)) @ vecs.conj().T
    big = tensor(s, np.eye(dim_out))
    return ChoiMatrix(dim_in, dim_out, hermitize(big @ w @ big))


def apply(chi: ChoiMatrix, rho_in) -> np.ndarray:
    rho_in = np.asarray(rho_in, dtype=complex)
    if rho_in.shape != (chi.dim_in, chi.dim_in):
        raise ValueError(f"input shape {rho_in.shape} does not match dim_in={chi.dim_in}")
    full = chi.matrix @ tensor(transpose_in_basis(rho_in), np.eye(chi.dim_out))
    return partial_trace(full, [chi.dim_in, chi.dim_out], keep=[1])


def _check_dims(chi: ChoiMatrix, r: FidelityOperator):
    if (chi.dim_in, chi.dim_out) != (r.dim_in, r.dim_out):
        raise ValueError(
            f"Choi dims ({chi.dim_in}, {chi.dim_out}) incompatible with R dims "
            f"({r.dim_in}, {r.dim_out})"
        )


def mean_fidelity(chi: ChoiMatrix, r: FidelityOperator) -> float:
    """``Tr[R chi]``."""
    _check_dims(chi, r)
    val = np.sum(r.r_total.T * chi.matrix)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"Tr[R chi] has imaginary part {val.imag:.3e}")
    return float(val.real)


def pointwise_fidelity(chi: ChoiMatrix, psi, kind, n: int) -> float:
    """Success probability of telling ``psi`` from ``psi_perp`` at one Bloch point."""
    r = rank_one_r(kind, n, psi)
    return mean_fidelity(chi, r)


def pointwise_fidelities(chi: ChoiMatrix, theta, phi, kind, n: int) -> np.ndarray:
    """Vectorised ``pointwise_fidelity`` over arrays of Bloch angles."""
    pat_par, pat_perp = input_patterns(kind, n)
    if 2 ** len(pat_par) != chi.dim_in or chi.dim_out != 2:
        raise ValueError("Choi matrix does not match the multimeter input space")
    big = product_states(theta, phi, pat_par)
    big_perp = product_states(theta, phi, pat_perp)
    # Tr[chi (|v><v|)^T (x) |k><k|] = <v| block_k^T |v>
    b0 = chi.output_block(0).T
    b1 = chi.output_block(1).T
    f0 = np.einsum("ki,ij,kj->k", big.conj(), b0, big).real
    f1 = np.einsum("ki,ij,kj->k", big_perp.conj(), b1, big_perp).real
    return 0.5 * f0 + 0.5 * f1


def choi_to_json(chi: ChoiMatrix) -> str:
    flat = chi.matrix.reshape(-1)
    doc = {
        "dim_in": chi.dim_in,
        "dim_out": chi.dim_out,
        "ordering": ORDERING,
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }
    return json.dumps(doc)


def choi_from_json(text: str) -> ChoiMatrix:
    doc = json.loads(text)
    if doc.get("ordering") != ORDERING:
        raise ValueError(f"unsupported Choi ordering {doc.get('ordering')!r}")
    d = doc["dim_in"] * doc["dim_out"]
    entries = np.array(doc["entries"], dtype=float)
    if entries.shape != (d * d, 2):
        raise ValueError("entries length does not match dimensions")
    matrix = (entries[:, 0] + 1j * entries[:, 1]).reshape(d, d)
    return ChoiMatrix(doc["dim_in"], doc["dim_out"], matrix)

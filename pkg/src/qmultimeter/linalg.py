"""Dense complex-matrix helpers shared by the rest of the package.

Qubit ordering is big-endian everywhere: the leftmost tensor factor owns the
most significant bits of a basis index, so ``|0>_s|01>_p`` is index ``0b001``.
"""
from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
SPECTRAL_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite 2-D complex array."""
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array with shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def tensor(*ops) -> np.ndarray:
    """Kronecker product, first argument most significant."""
    if not ops:
        raise ValueError("tensor needs at least one factor")
    return reduce(np.kron, (np.asarray(op, dtype=complex) for op in ops))


def tensor_power(op, k: int) -> np.ndarray:
    if k < 0:
        raise ValueError("tensor power must be non-negative")
    op = np.asarray(op, dtype=complex)
    if k == 0:
        return np.ones((1,) * op.ndim, dtype=complex)
    return tensor(*([op] * k))


def ket(bits: str) -> np.ndarray:
    """Computational basis state from a bit string, e.g. ``ket("01")``."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2) if bits else 0] = 1.0
    return v


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, v.conj())


def dagger(m) -> np.ndarray:
    return np.asarray(m).conj().T


def transpose_in_basis(m) -> np.ndarray:
    """Transpose (no conjugation) in the computational basis."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"transpose_in_basis needs a square matrix, got {m.shape}")
    return m.T.copy()


def hermiticity_error(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and hermiticity_error(m) <= tol


def hermitize(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    return 0.5 * (m + m.conj().T)


def eig_hermitian(h, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and unitary eigenvectors of a Hermitian matrix."""
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise ValueError(f"eig_hermitian needs a square matrix, got {h.shape}")
    err = hermiticity_error(h)
    if err > tol:
        raise ValueError(f"matrix is not Hermitian (max |M - M^dag| = {err:.3e})")
    return np.linalg.eigh(hermitize(h))


def min_eigenvalue(h) -> float:
    return float(np.linalg.eigvalsh(hermitize(h))[0])


def is_psd(h, tol: float) -> bool:
    return min_eigenvalue(h) >= -tol


def psd_power(h, power: float, cutoff: float = 0.0) -> np.ndarray:
    """``h**power`` for a PSD matrix via its spectrum.

    Eigenvalues at or below ``cutoff * max_eigenvalue`` are treated as zero,
    which gives the Moore-Penrose pseudo-power for negative ``power``.
    """
    w, v = np.linalg.eigh(hermitize(h))
    top = max(float(w[-1]), 0.0)
    keep = w > cutoff * top if top > 0 else np.zeros_like(w, dtype=bool)
    wp = np.zeros_like(w)
    wp[keep] = w[keep] ** power
    return (v * wp) @ v.conj().T


def support_projector(h, cutoff: float) -> np.ndarray:
    w, v = np.linalg.eigh(hermitize(h))
    top = max(float(w[-1]), 0.0)
    vk = v[:, w > cutoff * top] if top > 0 else v[:, :0]
    return vk @ vk.conj().T


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` lists the subsystem dimensions in tensor order. The kept
    subsystems stay in their original relative order.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise ValueError(f"matrix shape {m.shape} does not match subsystem dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} subsystems")

    n = len(dims)
    t = m.reshape(dims + dims)
    row = list(range(n))
    col = list(range(n, 2 * n))
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out_idx = [row[i] for i in keep] + [col[i] for i in keep]
    reduced = np.einsum(t, row + col, out_idx)
    d = int(np.prod([dims[i] for i in keep]))
    return reduced.reshape(d, d)


def trace_out_last(m, d_last: int) -> np.ndarray:
    """Trace over the final tensor factor of dimension ``d_last``."""
    m = np.asarray(m)
    d_first = m.shape[0] // d_last
    return np.einsum("ikjk->ij", m.reshape(d_first, d_last, d_first, d_last))


def qubit_permutation_operator(perm: Sequence[int]) -> np.ndarray:
    """Unitary sending qubit ``k`` to wire ``perm[k]``."""
    m = len(perm)
    if sorted(perm) != list(range(m)):
        raise ValueError(f"{perm} is not a permutation of range({m})")
    dim = 2**m
    idx = np.arange(dim)
    bits = (idx[:, None] >> (m - 1 - np.arange(m))[None, :]) & 1
    new_bits = np.empty_like(bits)
    new_bits[:, list(perm)] = bits
    target = (new_bits << (m - 1 - np.arange(m))[None, :]).sum(axis=1)
    p = np.zeros((dim, dim), dtype=complex)
    p[target, idx] = 1.0
    return p


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return hermitize(g)

"""Pure numpy versions of the compiled kernels."""
import numpy as np

from ..states import product_states

_CHUNK = 65536


def accumulate_product_outer(theta, phi, pattern):
    theta = np.ascontiguousarray(theta, dtype=float)
    phi = np.ascontiguousarray(phi, dtype=float)
    if theta.shape != phi.shape:
        raise ValueError("theta and phi must have the same length")
    dim = 2 ** len(pattern)
    acc = np.zeros((dim, dim), dtype=complex)
    for start in range(0, theta.size, _CHUNK):
        v = product_states(theta[start:start + _CHUNK], phi[start:start + _CHUNK], pattern)
        acc += v.T @ v.conj()
    return acc


def swap_test_p0_batch(signals, programs):
    signals = np.asarray(signals, dtype=complex)
    programs = np.asarray(programs, dtype=complex)
    if signals.shape != programs.shape or signals.ndim != 2 or signals.shape[1] != 2:
        raise ValueError("signals and programs must both have shape (n, 2)")
    # lazy import: circuit imports this package
    from ..circuit import fig1_circuit, run_batch

    n = signals.shape[0]
    state = np.einsum("ks,kp->ksp", signals, programs).reshape(n, 4)
    state = np.concatenate([state, np.zeros((n, 4), dtype=complex)], axis=1)
    out = run_batch(fig1_circuit(), state)
    return np.sum(np.abs(out[:, :4]) ** 2, axis=1)

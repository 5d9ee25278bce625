"""Fixed-point search for the fidelity-optimal trace-preserving CP map.

The iteration is ``chi <- L^{-1} R chi R L^{-1}`` with
``L = (Tr_out[R chi R])^{1/2} (x) 1_out``, which keeps ``chi`` positive and
trace preserving. Optimality is certified with the extremal conditions
``(lam (x) 1 - R) chi = 0`` and ``lam (x) 1 - R >= 0`` where
``lam = Tr_out[R chi]``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .choimap import ChoiMatrix, depolarizing_channel, mean_fidelity, measure_and_prepare
from .fidelity_operator import FidelityOperator
from .linalg import hermitize, psd_power, support_projector, tensor, trace_out_last
from .multimeter import joint_povm


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 10_000
    convergence_tol: float = 1e-10
    psd_tol: float = 1e-7
    pinv_cutoff: float = 1e-12

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not self.convergence_tol >= 1e-14:
            raise ValueError("convergence_tol must be >= 1e-14")
        if self.psd_tol <= 0 or self.pinv_cutoff <= 0:
            raise ValueError("psd_tol and pinv_cutoff must be positive")


@dataclass(frozen=True)
class OptimalityCertificate:
    lambda_op: np.ndarray
    residual_eq10: float
    min_eig_eq11: float
    fidelity: float
    support_leak: float
    psd_tol: float
    passed: bool

    def blocks(self, r: FidelityOperator) -> tuple[np.ndarray, np.ndarray]:
        """``(lam - R_minus, lam - R_plus)``: the two diagonal blocks of ``lam (x) 1 - R``."""
        return self.lambda_op - r.r_minus, self.lambda_op - r.r_plus

    def to_dict(self) -> dict:
        return {
            "residual_eq10": self.residual_eq10,
            "min_eig_eq11": self.min_eig_eq11,
            "fidelity": self.fidelity,
            "support_leak": self.support_leak,
            "psd_tol": self.psd_tol,
            "passed": self.passed,
            "lambda_eigenvalues": np.linalg.eigvalsh(self.lambda_op).tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class IterationRecord:
    iter: int
    fidelity: float
    step_norm: float
    min_eig: float


@dataclass
class SolveResult:
    chi: ChoiMatrix
    certificate: OptimalityCertificate
    log: list = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.log)

    def __iter__(self):
        return iter((self.chi, self.certificate, self.log))


def _stationarity(chi: np.ndarray, r_total: np.ndarray, d_out: int):
    lam = hermitize(trace_out_last(r_total @ chi, d_out))
    gap = tensor(lam, np.eye(d_out)) - r_total
    return lam, gap


def certify(
    chi: ChoiMatrix, r: FidelityOperator, psd_tol: float = 1e-7, pinv_cutoff: float = 1e-12
) -> OptimalityCertificate:
    if (chi.dim_in, chi.dim_out) != (r.dim_in, r.dim_out):
        raise ValueError("Choi matrix and R have different dimensions")
    lam, gap = _stationarity(chi.matrix, r.r_total, chi.dim_out)
    residual = float(np.linalg.norm(gap @ chi.matrix))
    min_eig = float(np.linalg.eigvalsh(hermitize(gap))[0])
    # R chi must live on the support of lam, else lam cannot act as its multiplier
    outside = tensor(np.eye(chi.dim_in) - support_projector(lam, pinv_cutoff), np.eye(chi.dim_out))
    leak = float(np.linalg.norm(outside @ r.r_total @ chi.matrix))
    passed = residual <= psd_tol and min_eig >= -psd_tol and leak <= psd_tol
    return OptimalityCertificate(
        lambda_op=lam,
        residual_eq10=residual,
        min_eig_eq11=min_eig,
        fidelity=mean_fidelity(chi, r),
        support_leak=leak,
        psd_tol=psd_tol,
        passed=passed,
    )


def closed_form_chi(kind, n: int) -> ChoiMatrix:
    """Measure-and-prepare map of the closed-form joint POVM."""
    return measure_and_prepare(joint_povm(kind, n).elements)


def iterate_once(chi: np.ndarray, r_total: np.ndarray, d_in: int, d_out: int, pinv_cutoff: float):
    m = r_total @ chi @ r_total
    t = hermitize(trace_out_last(m, d_out))
    # t = L^2, so the cutoff on L's spectrum is applied to t's
    inv_l = tensor(psd_power(t, -0.5, cutoff=pinv_cutoff), np.eye(d_out))
    new = inv_l @ m @ inv_l
    # directions R never reaches keep a fixed trace-preserving filler
    rest = np.eye(d_in) - support_projector(t, pinv_cutoff)
    new = new + tensor(rest, np.eye(d_out) / d_out)
    return hermitize(new)


def solve(
    r: FidelityOperator, cfg: SolverConfig | None = None, chi0: ChoiMatrix | None = None
) -> SolveResult:
    cfg = cfg or SolverConfig()
    d_in, d_out = r.dim_in, r.dim_out
    if chi0 is None:
        chi0 = depolarizing_channel(d_in, d_out)
    elif (chi0.dim_in, chi0.dim_out) != (d_in, d_out):
        raise ValueError("chi0 dimensions do not match R")
    else:
        chi0.check()

    chi = np.array(chi0.matrix)
    r_total = r.r_total
    fid = float(np.sum(r_total.T * chi).real)
    log: list[IterationRecord] = []
    converged = False
    for k in range(1, cfg.max_iters + 1):
        new = iterate_once(chi, r_total, d_in, d_out, cfg.pinv_cutoff)
        step = float(np.linalg.norm(new - chi))
        new_fid = float(np.sum(r_total.T * new).real)
        _, gap = _stationarity(new, r_total, d_out)
        min_eig = float(np.linalg.eigvalsh(hermitize(gap))[0])
        log.append(IterationRecord(k, new_fid, step, min_eig))
        fid_step = abs(new_fid - fid)
        chi, fid = new, new_fid
        if step < cfg.convergence_tol or fid_step < cfg.convergence_tol**2:
            converged = True
            break

    result_chi = ChoiMatrix(d_in, d_out, chi)
    cert = certify(result_chi, r, cfg.psd_tol, cfg.pinv_cutoff)
    return SolveResult(result_chi, cert, log, converged)


def log_to_csv(log) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["iter", "fidelity", "step_norm", "min_eig"])
    for rec in log:
        writer.writerow([rec.iter, repr(rec.fidelity), repr(rec.step_norm), repr(rec.min_eig)])
    return buf.getvalue()
